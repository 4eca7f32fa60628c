//! Searches and probes around the cusp forms `F_{D,r}`.
//!
//! * which weight-1 eta quotients `eta^i(z) eta^j(Dz)` are holomorphic (or
//!   cuspidal) at prime level `D`;
//! * the Schoeneberg pairs, whose theta half-difference is `eta(z) eta(Dz)`;
//! * growth of the product exponents of `F_{D,r}`;
//! * the weighted count of zeros of `F_{D,r}` inside the upper half plane.

use std::collections::btree_map::{BTreeMap, Entry};

use num_bigint::BigInt;
use num_integer::gcd;
use num_rational::Ratio;
use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ntheory::is_prime;
use crate::qforms::{enumerate_reduced, schoeneberg_pair, Discriminant, QuadForm};
use crate::qseries::{eta_product_one_d, product_exponents, EtaQuotientSpec};
use crate::theta::{f_dr, half_theta_difference, theta_series};

/// Order of vanishing of `prod eta(delta z)^{r_delta}` at a cusp `c/d` of
/// `Gamma_0(N)`, in the local parameter of that cusp:
///
/// `(N / 24) sum_delta gcd(d, delta)^2 r_delta / (gcd(d, N/d) d delta)`.
pub fn eta_order_at_cusp(spec: &EtaQuotientSpec, level: u64, d: u64) -> Ratio<i64> {
    assert!(
        level.is_multiple_of(d),
        "cusp denominator must divide the level"
    );
    let width = gcd(d, level / d) as i64 * d as i64;
    let mut total = Ratio::from_integer(0);
    for (delta, r) in spec.factors() {
        let g = gcd(d, delta) as i64;
        total += Ratio::new(g * g * r, width * delta as i64);
    }
    total * Ratio::new(level as i64, 24)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaSearchResult {
    #[serde(rename = "D")]
    pub d: u64,
    pub cusp_form_only: bool,
    /// `(i, j)` with `i + j = 2`, ascending in `i`.
    pub solutions: Vec<(i64, i64)>,
}

/// All `eta^i(z) eta^j(Dz)` with `i + j = 2` whose orders at `i∞` and at `0`
/// are non-negative integers (positive when `cusp_form_only`).
///
/// For prime `D` these are the only two cusps, with orders `(i + Dj)/24`
/// and `(Di + j)/24`. Non-negativity of both bounds
/// `-2/(D-1) <= i <= 2D/(D-1)`, so the scan is finite.
pub fn eta_quotient_search(d: u64, cusp_form_only: bool) -> Result<EtaSearchResult> {
    if d < 3 || !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let di = d as i64;
    let lo = (-2i64).div_euclid(di - 1);
    let hi = (2 * di + di - 2) / (di - 1);
    let min_order = if cusp_form_only { 1 } else { 0 };
    let mut solutions = Vec::new();
    for i in lo..=hi {
        let j = 2 - i;
        let mut factors = Vec::new();
        if i != 0 {
            factors.push((1, i));
        }
        if j != 0 {
            factors.push((d, j));
        }
        let spec = EtaQuotientSpec::new(&factors)?;
        let ok = [d, 1].iter().all(|&cusp| {
            let v = eta_order_at_cusp(&spec, d, cusp);
            v.is_integer() && v.to_integer() >= min_order
        });
        if ok {
            solutions.push((i, j));
        }
    }
    Ok(EtaSearchResult {
        d,
        cusp_form_only,
        solutions,
    })
}

/// Whether `(Theta_{Qs} - Theta_{Qr})/2 = eta(z) eta(Dz)` through `q^order`
/// for the Schoeneberg pair of `D`.
pub fn schoeneberg_identity_check(d: u64, order: usize) -> Result<bool> {
    let (qs, qr) = schoeneberg_pair(d)?;
    let lhs = half_theta_difference(&qs, &qr, order)?;
    let rhs = eta_product_one_d(d, order)?;
    Ok(lhs == rhs)
}

/// Theta series depend only on `(a, |b|, c)`.
fn theta_key(q: &QuadForm) -> QuadForm {
    QuadForm::new(q.a, q.b.abs(), q.c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSearchResult {
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "N")]
    pub order: usize,
    /// Ordered `(Qs, Qr)` with `(Theta_{Qs} - Theta_{Qr})/2 = eta(z) eta(Dz)`.
    pub matches: Vec<(QuadForm, QuadForm)>,
    /// Matches modulo conjugation of either member, as `(a, |b|, c)` pairs.
    pub classes: Vec<(QuadForm, QuadForm)>,
    /// Least `n` with `a(n, Qs) != a(n, Qr)` for each class.
    pub first_difference: Vec<usize>,
}

/// Test every ordered pair of distinct reduced forms of discriminant `-D`
/// against `eta(z) eta(Dz)` through `q^order`.
pub fn schoeneberg_pair_search(d: u64, order: usize) -> Result<PairSearchResult> {
    if d % 24 != 23 {
        return Err(Error::WrongResidue(d));
    }
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let classes = enumerate_reduced(&Discriminant::fundamental(d)?);
    let target = eta_product_one_d(d, order)?;

    let mut thetas = BTreeMap::new();
    for q in &classes.forms {
        let key = theta_key(q);
        if let Entry::Vacant(e) = thetas.entry(key) {
            e.insert(theta_series(&key, order)?);
        }
    }

    let mut matches = Vec::new();
    let mut by_class: BTreeMap<(QuadForm, QuadForm), usize> = BTreeMap::new();
    for qs in &classes.forms {
        for qr in &classes.forms {
            if qs == qr {
                continue;
            }
            let (ts, tr) = (&thetas[&theta_key(qs)], &thetas[&theta_key(qr)]);
            let hit = (0..=order).all(|n| {
                let diff = ts.count(n) as i64 - tr.count(n) as i64;
                BigInt::from(diff) == target.coeff(n) * 2
            });
            if hit {
                matches.push((*qs, *qr));
                let first = (1..=order)
                    .find(|&n| ts.count(n) != tr.count(n))
                    .unwrap_or(0);
                by_class.insert((theta_key(qs), theta_key(qr)), first);
            }
        }
    }
    let (classes, first_difference) = by_class.into_iter().unzip();
    Ok(PairSearchResult {
        d,
        order,
        matches,
        classes,
        first_difference,
    })
}

fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeResult {
    #[serde(rename = "D")]
    pub d: u64,
    pub r: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub threshold: u64,
    #[serde(serialize_with = "serialize_bigint")]
    pub max_c: BigInt,
    pub first_exceed: Option<usize>,
}

/// Largest `|c(n)|`, `n < order`, in `F_{D,r} = q prod (1 - q^n)^{c(n)}`, and
/// the first `n` with `|c(n)| > threshold`.
pub fn unboundedness_probe(
    disc: &Discriminant,
    r: usize,
    order: usize,
    threshold: u64,
) -> Result<ProbeResult> {
    let f = f_dr(disc, r, order)?;
    let pe = product_exponents(&f)?;
    let bound = BigInt::from(threshold);
    let first_exceed = (1..=pe.len()).find(|&n| pe.c(n).abs() > bound);
    Ok(ProbeResult {
        d: disc.d(),
        r,
        order,
        threshold,
        max_c: pe.max_abs(),
        first_exceed,
    })
}

fn check_prime_3_mod_4(d: u64) -> Result<()> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if d % 4 != 3 {
        return Err(Error::NotFundamental {
            d,
            reason: "prime must be 3 mod 4",
        });
    }
    Ok(())
}

/// Weighted number of zeros of `F_{D,r}` in a fundamental domain of
/// `Gamma_1(D)` away from the cusps: `(D^2 - 1)/24 - (D - 1)`, that is
/// `(D - 1)(D - 23)/24`.
///
/// The `(D^2 - 1)/24` is `k [SL_2(Z) : Gamma_1(D)] / 12` at weight 1 (the
/// index is `D^2 - 1`, halved since `-1` is absent from `Gamma_1(D)`); each of
/// the `D - 1` cusps takes at least one zero.
pub fn interior_zero_mass(d: u64) -> Result<Ratio<i64>> {
    check_prime_3_mod_4(d)?;
    let d = d as i64;
    Ok(Ratio::new((d - 1) * (d - 23), 24))
}

/// [`interior_zero_mass`] divided by the number of cusps, `(D - 23)/24`.
pub fn interior_zero_mass_per_cusp(d: u64) -> Result<Ratio<i64>> {
    check_prime_3_mod_4(d)?;
    Ok(Ratio::new(d as i64 - 23, 24))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::primes_below;

    #[test]
    fn cusp_orders_of_eta_products() {
        let spec = EtaQuotientSpec::new(&[(1, 1), (23, 1)]).unwrap();
        assert_eq!(eta_order_at_cusp(&spec, 23, 23), Ratio::from_integer(1));
        assert_eq!(eta_order_at_cusp(&spec, 23, 1), Ratio::from_integer(1));
        // Delta at level 1
        let delta = EtaQuotientSpec::new(&[(1, 24)]).unwrap();
        assert_eq!(eta_order_at_cusp(&delta, 1, 1), Ratio::from_integer(1));
        let spec = EtaQuotientSpec::new(&[(1, 3), (31, -1)]).unwrap();
        assert_eq!(eta_order_at_cusp(&spec, 31, 31), Ratio::new(3 - 31, 24));
        assert_eq!(eta_order_at_cusp(&spec, 31, 1), Ratio::new(3 * 31 - 1, 24));
    }

    #[test]
    fn eta_search_examples() {
        assert_eq!(
            eta_quotient_search(23, true).unwrap().solutions,
            vec![(1, 1)]
        );
        assert_eq!(
            eta_quotient_search(47, true).unwrap().solutions,
            vec![(1, 1)]
        );
        assert!(eta_quotient_search(31, true).unwrap().solutions.is_empty());
        assert!(matches!(
            eta_quotient_search(25, true),
            Err(Error::NotPrime(25))
        ));
    }

    /// The same search written as the explicit `i = 6l + 1, j = 1 - 6l` scan.
    fn search_by_l(d: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for l in -2i64..=2 {
            let (i, j) = (6 * l + 1, 1 - 6 * l);
            let inf = i + d * j;
            let zero = d * i + j;
            if inf > 0 && zero > 0 && inf % 24 == 0 && zero % 24 == 0 {
                out.push((i, j));
            }
        }
        out
    }

    #[test]
    fn eta_search_over_primes() {
        for d in primes_below(500).into_iter().filter(|&p| p >= 3) {
            let got = eta_quotient_search(d, true).unwrap().solutions;
            if d % 24 == 23 {
                assert_eq!(got, vec![(1, 1)], "D = {d}");
            } else {
                assert!(got.is_empty(), "D = {d}: {got:?}");
            }
            assert_eq!(got, search_by_l(d as i64), "D = {d}");
        }
    }

    #[test]
    fn eta_search_holomorphic_mode() {
        // an order-0 cusp needs j(1 - D) = 2 or i(1 - D) = 2, leaving only
        // D = 3, where the other order is 1/3; so both modes agree
        for d in primes_below(500).into_iter().filter(|&p| p >= 3) {
            assert_eq!(
                eta_quotient_search(d, false).unwrap().solutions,
                eta_quotient_search(d, true).unwrap().solutions,
                "D = {d}"
            );
        }
    }

    #[test]
    fn schoeneberg_identities() {
        for d in [23u64, 47, 71, 95, 119, 167, 191] {
            assert!(schoeneberg_identity_check(d, 300).unwrap(), "D = {d}");
        }
        assert!(matches!(
            schoeneberg_identity_check(31, 10),
            Err(Error::WrongResidue(31))
        ));
    }

    #[test]
    fn pair_search_small() {
        let f = QuadForm::new;
        let res = schoeneberg_pair_search(23, 200).unwrap();
        assert_eq!(res.classes, vec![(f(1, 1, 6), f(2, 1, 3))]);
        assert_eq!(
            res.matches,
            vec![(f(1, 1, 6), f(2, 1, 3)), (f(1, 1, 6), f(2, -1, 3))]
        );
        assert_eq!(res.first_difference, vec![1]);

        let res = schoeneberg_pair_search(47, 200).unwrap();
        assert_eq!(res.classes, vec![(f(2, 1, 6), f(3, 1, 4))]);
        assert_eq!(res.matches.len(), 4);
        assert_eq!(res.first_difference, vec![2]);
    }

    #[test]
    fn pair_search_first_difference_is_leading_exponent() {
        for d in [71u64, 167] {
            let res = schoeneberg_pair_search(d, 200).unwrap();
            assert_eq!(res.classes.len(), 1, "D = {d}");
            for &n in &res.first_difference {
                assert_eq!(n as u64, (d + 1) / 24);
            }
            // closed under conjugating either member
            for (s, r) in &res.matches {
                assert!(res.matches.contains(&(s.conjugate(), *r)));
                assert!(res.matches.contains(&(*s, r.conjugate())));
            }
        }
    }

    #[test]
    fn pair_search_preconditions() {
        assert!(matches!(
            schoeneberg_pair_search(95, 10),
            Err(Error::NotPrime(95))
        ));
        assert!(matches!(
            schoeneberg_pair_search(31, 10),
            Err(Error::WrongResidue(31))
        ));
    }

    #[test]
    fn probe() {
        let d23 = Discriminant::fundamental(23).unwrap();
        let p = unboundedness_probe(&d23, 1, 400, 10).unwrap();
        assert_eq!(p.max_c, BigInt::from(2));
        assert_eq!(p.first_exceed, None);

        let d31 = Discriminant::fundamental(31).unwrap();
        let p = unboundedness_probe(&d31, 1, 300, 10).unwrap();
        assert_eq!(p.first_exceed, Some(28));
        assert!(p.max_c > BigInt::from(10));
    }

    #[test]
    fn zero_mass() {
        assert_eq!(interior_zero_mass(23).unwrap(), Ratio::from_integer(0));
        assert_eq!(interior_zero_mass(31).unwrap(), Ratio::from_integer(10));
        assert_eq!(interior_zero_mass(47).unwrap(), Ratio::from_integer(46));
        assert_eq!(interior_zero_mass(3).unwrap(), Ratio::new(-5, 3));
        assert_eq!(
            interior_zero_mass_per_cusp(47).unwrap(),
            Ratio::from_integer(1)
        );
        for d in primes_below(3000)
            .into_iter()
            .filter(|&p| p % 4 == 3 && p > 23)
        {
            assert!(interior_zero_mass(d).unwrap() > Ratio::from_integer(0));
            assert!(interior_zero_mass(d).unwrap().is_integer(), "D = {d}");
        }
        assert!(matches!(interior_zero_mass(35), Err(Error::NotPrime(35))));
        assert!(interior_zero_mass(29).is_err());
    }
}
