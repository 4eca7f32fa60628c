//! Theta series `sum_{x,y} q^{Q(x,y)}` by lattice enumeration, their
//! half-differences, and the expansion at the cusp 1/1.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qforms::{enumerate_reduced, Discriminant, QuadForm};
use crate::qseries::IntSeries;

/// Coefficients below this magnitude count as zero in the cusp expansion.
pub const CUSP_ZERO_THRESHOLD: f64 = 1e-9;

/// `a(n, Q)` for `n = 0..=order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepCountTable {
    pub form: QuadForm,
    pub counts: Vec<u64>,
}

impl RepCountTable {
    pub fn order(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, n: usize) -> u64 {
        self.counts[n]
    }
}

impl Serialize for RepCountTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RepCountTable", 3)?;
        st.serialize_field("form", &self.form)?;
        st.serialize_field("order", &self.order())?;
        st.serialize_field("counts", &self.counts)?;
        st.end()
    }
}

fn definite_disc(q: &QuadForm) -> Result<i64> {
    if !q.is_positive_definite() {
        return Err(Error::NotPositiveDefinite(*q));
    }
    Ok(-q.discriminant())
}

/// `#{(x, y) : Q(x, y) = n}` by scanning the bounding box
/// `|y| <= sqrt(4an/D)`, `|x| <= sqrt(4cn/D)`.
///
/// This is the independent oracle for every formula in the crate; it shares
/// no code with [`theta_series`].
pub fn rep_count_bruteforce(q: &QuadForm, n: u64) -> Result<u64> {
    let d = definite_disc(q)? as u64;
    let y_max = (4 * q.a as u64 * n / d).isqrt() as i64;
    let x_max = (4 * q.c as u64 * n / d).isqrt() as i64;
    let n = n as i64;
    let mut count = 0;
    for y in -y_max..=y_max {
        for x in -x_max..=x_max {
            if q.eval(x, y) == n {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// All `a(n, Q)` for `n <= order` in one sweep.
///
/// For each `y` with `D y^2 <= 4aN`, the admissible `x` form the interval
/// between the roots of `a x^2 + b y x + (c y^2 - N)`, whose discriminant is
/// `4aN - D y^2`.
pub fn theta_series(q: &QuadForm, order: usize) -> Result<RepCountTable> {
    let d = definite_disc(q)?;
    let n = order as i64;
    let two_a = 2 * q.a;
    let mut counts = vec![0u64; order + 1];
    let y_max = ((4 * q.a * n) / d).isqrt();
    for y in -y_max..=y_max {
        let delta = 4 * q.a * n - d * y * y;
        if delta < 0 {
            continue;
        }
        let s = delta.isqrt();
        let by = q.b * y;
        let lo = Integer::div_floor(&(-by - s - 1), &two_a);
        let hi = Integer::div_ceil(&(-by + s + 1), &two_a);
        for x in lo..=hi {
            let v = q.eval(x, y);
            if (0..=n).contains(&v) {
                counts[v as usize] += 1;
            }
        }
    }
    Ok(RepCountTable { form: *q, counts })
}

/// `(Theta_{Qs} - Theta_{Qr}) / 2` up to `q^order`.
///
/// Representation counts are even for `n >= 1` (the point `(x, y)` pairs
/// with `(-x, -y)`), so the halving is exact.
pub fn half_theta_difference(qs: &QuadForm, qr: &QuadForm, order: usize) -> Result<IntSeries> {
    let ds = qs.discriminant();
    let dr = qr.discriminant();
    if ds != dr {
        return Err(Error::DiscriminantMismatch {
            form: *qr,
            expected: ds,
            found: dr,
        });
    }
    let ts = theta_series(qs, order)?;
    let tr = theta_series(qr, order)?;
    let coeffs = ts
        .counts
        .iter()
        .zip(&tr.counts)
        .map(|(&a, &b)| {
            let diff = a as i64 - b as i64;
            debug_assert!(diff % 2 == 0);
            BigInt::from(diff / 2)
        })
        .collect();
    Ok(IntSeries::from_coeffs(coeffs))
}

/// `F_{D,r} = (Theta_{Q_0} - Theta_{Q_r}) / 2` for the `r`-th pair of the
/// enumerated reduced forms.
pub fn f_dr(disc: &Discriminant, r: usize, order: usize) -> Result<IntSeries> {
    let classes = enumerate_reduced(disc);
    if !classes.paired {
        return Err(Error::EvenClassNumber {
            d: disc.d(),
            h: classes.class_number(),
        });
    }
    if r == 0 {
        return Err(Error::IndexOutOfRange {
            index: r,
            k: classes.k(),
        });
    }
    let qr = classes.form(r)?;
    half_theta_difference(&classes.principal, &qr, order)
}

/// A finite expansion in `q^{1/D}`: exponent `m` stands for `q^{m/D}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootOfUnitySeries {
    pub level: u64,
    pub terms: BTreeMap<u64, Complex64>,
}

impl RootOfUnitySeries {
    pub fn coeff(&self, m: u64) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    /// `(self - other) / 2` termwise.
    pub fn half_difference(&self, other: &RootOfUnitySeries) -> RootOfUnitySeries {
        assert_eq!(self.level, other.level);
        let mut terms = BTreeMap::new();
        for m in self.terms.keys().chain(other.terms.keys()) {
            terms
                .entry(*m)
                .or_insert_with(|| (self.coeff(*m) - other.coeff(*m)) / 2.0);
        }
        RootOfUnitySeries {
            level: self.level,
            terms,
        }
    }

    /// Least exponent whose coefficient exceeds [`CUSP_ZERO_THRESHOLD`].
    pub fn leading_term(&self) -> Option<(u64, Complex64)> {
        self.terms
            .iter()
            .find(|(_, c)| c.norm() > CUSP_ZERO_THRESHOLD)
            .map(|(m, c)| (*m, *c))
    }
}

impl Serialize for RootOfUnitySeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let triples: Vec<(u64, f64, f64)> =
            self.terms.iter().map(|(m, c)| (*m, c.re, c.im)).collect();
        let mut st = serializer.serialize_struct("RootOfUnitySeries", 2)?;
        st.serialize_field("D", &self.level)?;
        st.serialize_field("terms", &triples)?;
        st.end()
    }
}

/// `Theta_Q [rho]_1` for `rho = (1 0; 1 1)`, the theta series seen from the
/// cusp 1/1:
///
/// `(-i / sqrt(D)) sum_m a(m, Q) e^{2 pi i m / D} q^{m/D}`, for `m <= max_exp`.
///
/// The lattice sum carries the phase `e^{2 pi i Q(x,y)/D}`, which is constant
/// on each level set `Q(x, y) = m`; grouping by `m` collapses it to the
/// representation counts.
pub fn cusp_expansion_at_one(q: &QuadForm, max_exp: u64) -> Result<RootOfUnitySeries> {
    let d = definite_disc(q)? as u64;
    let table = theta_series(q, max_exp as usize)?;
    let prefactor = Complex64::new(0.0, -1.0 / (d as f64).sqrt());
    let terms = table
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(m, &a)| {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * (m as u64 % d) as f64 / d as f64);
            (m as u64, prefactor * phase * a as f64)
        })
        .collect();
    Ok(RootOfUnitySeries { level: d, terms })
}

/// Orders of vanishing of `F_{D,r}` at `i∞` (in `q`) and at `1/1` (in `q^{1/D}`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspOrders {
    pub infinity: Option<u64>,
    pub one: Option<u64>,
    /// Leading coefficient at `1/1` as `(re, im)`.
    pub leading_one: Option<(f64, f64)>,
}

impl CuspOrders {
    pub fn leading_one_magnitude(&self) -> Option<f64> {
        self.leading_one.map(|(re, im)| re.hypot(im))
    }
}

pub fn cusp_vanishing_orders(disc: &Discriminant, r: usize, bound: u64) -> Result<CuspOrders> {
    let classes = enumerate_reduced(disc);
    if !classes.paired {
        return Err(Error::EvenClassNumber {
            d: disc.d(),
            h: classes.class_number(),
        });
    }
    if r == 0 || r > classes.k() {
        return Err(Error::IndexOutOfRange {
            index: r,
            k: classes.k(),
        });
    }
    let q0 = classes.principal;
    let qr = classes.form(r)?;

    let f = half_theta_difference(&q0, &qr, bound as usize)?;
    let infinity = f.valuation().map(|n| n as u64);

    let at_one =
        cusp_expansion_at_one(&q0, bound)?.half_difference(&cusp_expansion_at_one(&qr, bound)?);
    let lead = at_one.leading_term();
    Ok(CuspOrders {
        infinity,
        one: lead.map(|(m, _)| m),
        leading_one: lead.map(|(_, c)| (c.re, c.im)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::{char_divisor_sum, kronecker};

    fn f(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(rep_count_bruteforce(&f(1, 1, 6), 1).unwrap(), 2);
        assert_eq!(rep_count_bruteforce(&f(2, 1, 3), 6).unwrap(), 2);
        assert_eq!(rep_count_bruteforce(&f(1, 0, 1), 5).unwrap(), 8);
        let d4 = Discriminant::fundamental(4).unwrap();
        assert_eq!(
            rep_count_bruteforce(&f(1, 0, 1), 5).unwrap() as i64,
            4 * char_divisor_sum(5, &d4)
        );
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(rep_count_bruteforce(&f(1, 1, 6), 0).unwrap(), 1);
        assert!(rep_count_bruteforce(&f(1, 3, 1), 1).is_err());
    }

    #[test]
    fn sweep_examples() {
        // x^2 + xy + 6y^2: 4 -> (±2, 0); 6 -> (0, ±1), (-1, 1), (1, -1);
        // 8 -> (1, 1), (-2, 1) and their negatives
        assert_eq!(
            theta_series(&f(1, 1, 6), 8).unwrap().counts,
            vec![1, 2, 0, 0, 2, 0, 4, 0, 4]
        );
        assert_eq!(
            theta_series(&f(1, 0, 1), 4).unwrap().counts,
            vec![1, 4, 4, 0, 4]
        );
    }

    #[test]
    fn sweep_matches_brute_force() {
        let forms = [
            f(1, 1, 1),
            f(1, 0, 1),
            f(1, 0, 2),
            f(1, 1, 6),
            f(2, 1, 3),
            f(2, -1, 3),
            f(3, 1, 4),
            f(13, 9, 19),
            f(23, 13, 31),
            f(1, 1, 671),
            f(6, 5, 8),
        ];
        for q in forms {
            let t = theta_series(&q, 200).unwrap();
            for n in 0..=200 {
                assert_eq!(
                    t.count(n),
                    rep_count_bruteforce(&q, n as u64).unwrap(),
                    "{q} n={n}"
                );
            }
        }
    }

    #[test]
    fn counts_are_even_and_conjugate_invariant() {
        for q in [f(2, 1, 3), f(3, 1, 4), f(5, 3, 11), f(17, 13, 19)] {
            let t = theta_series(&q, 400).unwrap();
            let tbar = theta_series(&q.conjugate(), 400).unwrap();
            assert_eq!(t.counts, tbar.counts);
            assert!(t.counts[1..].iter().all(|c| c % 2 == 0));
        }
    }

    #[test]
    fn half_differences() {
        let d23 = half_theta_difference(&f(1, 1, 6), &f(2, 1, 3), 25).unwrap();
        let mut expected = vec![0i64; 26];
        for (n, c) in [
            (1, 1),
            (2, -1),
            (3, -1),
            (6, 1),
            (8, 1),
            (13, -1),
            (16, -1),
            (23, 1),
            (24, -1),
            (25, 1),
        ] {
            expected[n] = c;
        }
        assert_eq!(d23, IntSeries::from_i64(&expected));

        let d47 = half_theta_difference(&f(1, 1, 12), &f(2, 1, 6), 18).unwrap();
        let mut expected = vec![0i64; 19];
        for (n, c) in [
            (1, 1),
            (2, -1),
            (4, 1),
            (6, -1),
            (7, -1),
            (8, -1),
            (12, 1),
            (14, 2),
            (18, 1),
        ] {
            expected[n] = c;
        }
        assert_eq!(d47, IntSeries::from_i64(&expected));

        assert!(half_theta_difference(&f(2, 1, 3), &f(2, -1, 3), 300)
            .unwrap()
            .is_zero());
        assert!(matches!(
            half_theta_difference(&f(1, 1, 6), &f(5, 1, 7), 10),
            Err(Error::DiscriminantMismatch {
                expected: -23,
                found: -139,
                ..
            })
        ));
    }

    #[test]
    fn fdr_starts_with_q() {
        for d in [23u64, 31, 47, 59, 79, 283, 2683] {
            let disc = Discriminant::fundamental(d).unwrap();
            let k = enumerate_reduced(&disc).k();
            for r in 1..=k {
                let s = f_dr(&disc, r, 60).unwrap();
                assert_eq!(s.valuation(), Some(1));
                assert_eq!(s.coeff_i64(1), 1);
            }
        }
        let d7 = Discriminant::fundamental(7).unwrap();
        assert!(f_dr(&d7, 1, 10).is_err());
    }

    #[test]
    fn representation_minima() {
        for d in [23u64, 47, 79, 131, 947, 2683] {
            let disc = Discriminant::fundamental(d).unwrap();
            for (q, _) in enumerate_reduced(&disc).pairs {
                let t = theta_series(&q, 3 * q.c as usize).unwrap();
                let mut represented = (1..=t.order()).filter(|&n| t.count(n) > 0);
                assert_eq!(represented.next(), Some(q.a as usize));
                assert_eq!(represented.next(), Some(q.c.min(4 * q.a) as usize));
            }
        }
    }

    #[test]
    fn cusp_expansion_examples() {
        let s = cusp_expansion_at_one(&f(1, 1, 6), 30).unwrap();
        let inv_sqrt = 1.0 / 23f64.sqrt();
        let c0 = s.coeff(0);
        assert!((c0 - Complex64::new(0.0, -inv_sqrt)).norm() < 1e-12);
        assert!((s.coeff(1).norm() - 2.0 * inv_sqrt).abs() < 1e-12);

        let s1 = cusp_expansion_at_one(&f(2, 1, 3), 30).unwrap();
        let first_after_zero = s1.terms.keys().copied().find(|&m| m > 0);
        assert_eq!(first_after_zero, Some(2));

        let table = theta_series(&f(2, 1, 3), 30).unwrap();
        for (m, c) in &s1.terms {
            assert!((c.norm() - table.count(*m as usize) as f64 * inv_sqrt).abs() < 1e-12);
        }
    }

    #[test]
    fn cusp_orders() {
        for (d, r) in [(23u64, 1usize), (31, 1), (47, 1), (47, 2)] {
            let disc = Discriminant::fundamental(d).unwrap();
            let o = cusp_vanishing_orders(&disc, r, 60).unwrap();
            assert_eq!((o.infinity, o.one), (Some(1), Some(1)), "D = {d}, r = {r}");
            let mag = o.leading_one_magnitude().unwrap();
            assert!((mag - 1.0 / (d as f64).sqrt()).abs() < 1e-9);
        }
        let d23 = Discriminant::fundamental(23).unwrap();
        assert!(cusp_vanishing_orders(&d23, 2, 10).is_err());
    }

    #[test]
    fn json_shapes() {
        let t = theta_series(&f(1, 0, 1), 2).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"form":"1,0,1","order":2,"counts":[1,4,4]}"#
        );
        let s = cusp_expansion_at_one(&f(1, 1, 1), 0).unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["D"], 3);
        assert_eq!(v["terms"][0][0], 0);
    }
}
