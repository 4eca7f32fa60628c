//! Truncated q-expansions with arbitrary-precision integer coefficients.
//!
//! An [`IntSeries`] of order `N` carries the coefficients of `q^0..=q^N`.
//! Binary operations on series of different orders truncate to the smaller
//! order; nothing ever truncates below what the caller asked for.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ntheory::{divisors, moebius_table};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntSeries {
    coeffs: Vec<BigInt>,
}

impl IntSeries {
    /// Build from explicit coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        IntSeries { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        IntSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// Truncation order `N`: coefficients are known for `q^0..=q^N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    /// Coefficient as `i64`, panicking if it does not fit.
    pub fn coeff_i64(&self, n: usize) -> i64 {
        self.coeffs[n].to_i64().expect("coefficient exceeds i64")
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        IntSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Multiply by `q^k`, keeping the same order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in k..=n {
            out.coeffs[i] = self.coeffs[i - k].clone();
        }
        out
    }

    /// Drop the first `k` coefficients (divide by `q^k`); the order shrinks by `k`.
    pub fn unshift(&self, k: usize) -> Self {
        assert!(k <= self.order());
        IntSeries {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    /// The Cauchy product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &IntSeries) -> IntSeries {
        series_mul(self, other)
    }

    /// Formal inverse by forward substitution; needs constant term `±1`.
    pub fn inverse(&self) -> Result<IntSeries> {
        let c0 = &self.coeffs[0];
        if !c0.abs().is_one() {
            return Err(Error::NotInvertible(c0.to_string()));
        }
        let n = self.order();
        let support = self.support();
        let mut inv = Self::zero(n);
        inv.coeffs[0] = c0.clone();
        for m in 1..=n {
            let mut acc = BigInt::zero();
            for &k in support.iter().take_while(|&&k| k <= m) {
                if k == 0 {
                    continue;
                }
                acc += &self.coeffs[k] * &inv.coeffs[m - k];
            }
            // c0 * inv[m] = -acc, and c0 = ±1 is its own inverse
            inv.coeffs[m] = -(acc * c0);
        }
        Ok(inv)
    }

    /// Integer power. Negative exponents go through [`IntSeries::inverse`].
    ///
    /// With constant term 1 this uses the power recurrence
    /// `n g_n = sum_{k=1}^n ((e + 1) k - n) f_k g_{n-k}`, which costs one pass
    /// over the nonzero coefficients of `f` per output coefficient; other
    /// series fall back to binary exponentiation.
    pub fn pow(&self, e: i64) -> Result<IntSeries> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        if e == 0 {
            return Ok(Self::one(self.order()));
        }
        if self.coeffs[0].is_one() {
            return Ok(self.pow_unit_constant(e));
        }
        let mut base = self.clone();
        let mut acc = Self::one(self.order());
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    fn pow_unit_constant(&self, e: i64) -> IntSeries {
        let n = self.order();
        let support: Vec<usize> = self.support().into_iter().filter(|&k| k > 0).collect();
        let mut g = Self::zero(n);
        g.coeffs[0] = BigInt::one();
        for m in 1..=n {
            let mut acc = BigInt::zero();
            for &k in support.iter().take_while(|&&k| k <= m) {
                if g.coeffs[m - k].is_zero() {
                    continue;
                }
                let weight = (e + 1) * k as i64 - m as i64;
                acc += &self.coeffs[k] * &g.coeffs[m - k] * weight;
            }
            let (q, r) = acc.div_rem(&BigInt::from(m));
            debug_assert!(r.is_zero());
            g.coeffs[m] = q;
        }
        g
    }

    /// Indices of nonzero coefficients.
    fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Exact division of every coefficient by `d`, or `None` if some
    /// coefficient is not divisible.
    pub fn div_exact(&self, d: i64) -> Option<IntSeries> {
        let d = BigInt::from(d);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            coeffs.push(q);
        }
        Some(IntSeries { coeffs })
    }

    /// JSON carrier with decimal-string coefficients.
    pub fn to_json(&self, lead_exponent: i64) -> SeriesJson {
        SeriesJson {
            order: self.order(),
            lead_exponent,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
    }

    /// Readable q-expansion such as `q - q^2 + 2q^5 + O(q^8)`, with every
    /// exponent shifted by `lead`.
    pub fn display_with_lead(&self, lead: i64) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let exp = i as i64 + lead;
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let mono = match exp {
                0 => String::new(),
                1 => "q".to_string(),
                e => format!("q^{e}"),
            };
            if mag.is_one() && exp != 0 {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}{mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(&format!(" + O(q^{})", self.order() as i64 + 1 + lead));
        out
    }
}

impl std::fmt::Display for IntSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.display_with_lead(0))
    }
}

impl Add for &IntSeries {
    type Output = IntSeries;
    fn add(self, rhs: &IntSeries) -> IntSeries {
        let n = self.order().min(rhs.order());
        IntSeries {
            coeffs: (0..=n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &IntSeries {
    type Output = IntSeries;
    fn sub(self, rhs: &IntSeries) -> IntSeries {
        let n = self.order().min(rhs.order());
        IntSeries {
            coeffs: (0..=n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Neg for &IntSeries {
    type Output = IntSeries;
    fn neg(self) -> IntSeries {
        IntSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Serialized form of a series: `{order, lead_exponent, coeffs}` where the
/// coefficients are decimal strings and the expansion is `q^lead * sum`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub order: usize,
    pub lead_exponent: i64,
    pub coeffs: Vec<String>,
}

impl SeriesJson {
    pub fn to_series(&self) -> Result<(i64, IntSeries)> {
        if self.coeffs.len() != self.order + 1 {
            return Err(Error::Fixture(format!(
                "series of order {} has {} coefficients",
                self.order,
                self.coeffs.len()
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|_| Error::Fixture(format!("bad coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((self.lead_exponent, IntSeries::from_coeffs(coeffs)))
    }
}

/// Schoolbook product truncated at `min(f.order(), g.order())`.
pub fn series_mul(f: &IntSeries, g: &IntSeries) -> IntSeries {
    let n = f.order().min(g.order());
    let mut out = IntSeries::zero(n);
    let g_support: Vec<usize> = g.support().into_iter().filter(|&j| j <= n).collect();
    for (i, fi) in f.coeffs.iter().enumerate().take(n + 1) {
        if fi.is_zero() {
            continue;
        }
        for &j in &g_support {
            if i + j > n {
                break;
            }
            out.coeffs[i + j] += fi * &g.coeffs[j];
        }
    }
    out
}

/// `prod_{n >= 1} (1 - q^{delta n})` up to `q^order`, from Euler's pentagonal
/// number theorem: the exponents are `delta k(3k - 1)/2` for `k` in ℤ with
/// sign `(-1)^k`.
pub fn eta_core(delta: u64, order: usize) -> IntSeries {
    assert!(delta >= 1);
    let mut s = IntSeries::zero(order);
    s.coeffs[0] = BigInt::one();
    let delta = delta as usize;
    let mut k = 1usize;
    loop {
        let p1 = k * (3 * k - 1) / 2 * delta;
        if p1 > order {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        s.coeffs[p1] += sign;
        let p2 = k * (3 * k + 1) / 2 * delta;
        if p2 <= order {
            s.coeffs[p2] += sign;
        }
        k += 1;
    }
    s
}

/// `prod_delta eta(delta z)^{r_delta}` as a list of distinct `(delta, r_delta)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotientSpec {
    factors: BTreeMap<u64, i64>,
}

impl EtaQuotientSpec {
    pub fn new(factors: &[(u64, i64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(delta, r) in factors {
            if delta == 0 || map.insert(delta, r).is_some() {
                return Err(Error::Fixture(format!(
                    "eta quotient factors need distinct positive delta, got {delta}"
                )));
            }
        }
        Ok(EtaQuotientSpec { factors: map })
    }

    pub fn factors(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.factors.iter().map(|(&d, &r)| (d, r))
    }

    /// lcm of the `delta` with nonzero exponent.
    pub fn level(&self) -> u64 {
        self.factors()
            .filter(|&(_, r)| r != 0)
            .fold(1, |acc, (d, _)| acc.lcm(&d))
    }

    /// `sum delta r_delta`; the q-power prefactor is this over 24.
    pub fn lead_numerator(&self) -> i64 {
        self.factors().map(|(d, r)| d as i64 * r).sum()
    }

    /// Twice the weight, `sum r_delta`.
    pub fn twice_weight(&self) -> i64 {
        self.factors().map(|(_, r)| r).sum()
    }
}

/// `f = q^e S` with `S` normalized to constant term 1.
///
/// Fails with [`Error::NonIntegralLead`] when `e = sum delta r_delta / 24`
/// is not an integer.
pub fn eta_quotient(spec: &EtaQuotientSpec, order: usize) -> Result<(i64, IntSeries)> {
    let num = spec.lead_numerator();
    if num % 24 != 0 {
        return Err(Error::NonIntegralLead { numerator: num });
    }
    let mut acc = IntSeries::one(order);
    for (delta, r) in spec.factors() {
        if r == 0 {
            continue;
        }
        let factor = eta_core(delta, order).pow(r)?;
        acc = acc.mul(&factor);
    }
    Ok((num / 24, acc))
}

/// The eta quotient as an ordinary series `sum_{n=0}^{order} a(n) q^n`;
/// requires a non-negative integral leading exponent.
pub fn eta_quotient_expansion(spec: &EtaQuotientSpec, order: usize) -> Result<IntSeries> {
    let (e, s) = eta_quotient(spec, order)?;
    if e < 0 {
        return Err(Error::NonIntegralLead {
            numerator: spec.lead_numerator(),
        });
    }
    Ok(s.shift(e as usize))
}

/// `eta(z) eta(Dz) = q^{(D+1)/24} prod (1 - q^n)(1 - q^{Dn})` truncated at `order`.
pub fn eta_product_one_d(d: u64, order: usize) -> Result<IntSeries> {
    eta_quotient_expansion(&EtaQuotientSpec::new(&[(1, 1), (d, 1)])?, order)
}

/// The exponents `c(n)` in `t = q prod_{n >= 1} (1 - q^n)^{c(n)}`, together
/// with `alpha(n) = sum_{d | n} d c(d)`. Index 0 of both vectors is unused.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductExponents {
    order: usize,
    alpha: Vec<BigInt>,
    c: Vec<BigInt>,
}

impl ProductExponents {
    /// Wrap explicit exponents `c(1..=len)`; `alpha` is derived from them.
    /// The resulting order is `c.len() + 1`.
    pub fn from_exponents(c: Vec<BigInt>) -> Self {
        let m = c.len();
        let mut cc = Vec::with_capacity(m + 1);
        cc.push(BigInt::zero());
        cc.extend(c);
        let mut alpha = vec![BigInt::zero(); m + 1];
        for (d, c) in cc.iter().enumerate().skip(1) {
            let dc = c * d;
            for n in (d..=m).step_by(d) {
                alpha[n] += &dc;
            }
        }
        ProductExponents {
            order: m + 1,
            alpha,
            c: cc,
        }
    }

    /// Order of the series the exponents describe; `c(n)` is defined for `1..order`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of exponents, `order - 1`.
    pub fn len(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn c(&self, n: usize) -> &BigInt {
        assert!(n >= 1);
        &self.c[n]
    }

    pub fn alpha(&self, n: usize) -> &BigInt {
        assert!(n >= 1);
        &self.alpha[n]
    }

    /// `c(1..)` as a slice.
    pub fn exponents(&self) -> &[BigInt] {
        &self.c[1..]
    }

    pub fn alphas(&self) -> &[BigInt] {
        &self.alpha[1..]
    }

    /// `max_n |c(n)|`.
    pub fn max_abs(&self) -> BigInt {
        self.exponents()
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }
}

/// Recover the product exponents of `t = q + t(2) q^2 + ...`.
///
/// With `alpha(n) = -n t(n+1) - sum_{k=1}^{n-1} t(n-k+1) alpha(k)` (the
/// logarithmic derivative of `t/q`), the exponents are the Möbius inversion
/// `c(n) = (1/n) sum_{d | n} mu(n/d) alpha(d)`. A series of order `N` yields
/// `c(1..N-1)`.
pub fn product_exponents(t: &IntSeries) -> Result<ProductExponents> {
    if !t.coeff(0).is_zero() || !t.coeff(1).is_one() {
        return Err(Error::NotNormalized);
    }
    let order = t.order();
    let m = order.saturating_sub(1);
    // shifted[j] = t(j + 1), the coefficients of t/q
    let shifted = &t.coeffs()[1..];
    let support: Vec<usize> = (1..shifted.len())
        .filter(|&j| !shifted[j].is_zero())
        .collect();

    let mut alpha = vec![BigInt::zero(); m + 1];
    for n in 1..=m {
        let mut acc = -(&shifted[n] * n);
        // sum_{k=1}^{n-1} t(n-k+1) alpha(k), indexed by j = n - k
        for &j in support.iter().take_while(|&&j| j < n) {
            acc -= &shifted[j] * &alpha[n - j];
        }
        alpha[n] = acc;
    }

    let mu = moebius_table(m);
    let mut c = vec![BigInt::zero(); m + 1];
    for n in 1..=m {
        let mut sum = BigInt::zero();
        for d in divisors(n as u64) {
            let d = d as usize;
            match mu[n / d] {
                1 => sum += &alpha[d],
                -1 => sum -= &alpha[d],
                _ => {}
            }
        }
        let (q, r) = sum.div_rem(&BigInt::from(n));
        if !r.is_zero() {
            return Err(Error::IntegralityViolation {
                n,
                numerator: sum.to_string(),
            });
        }
        c[n] = q;
    }
    Ok(ProductExponents {
        order: m + 1,
        alpha,
        c,
    })
}

/// `q prod_{n=1}^{order-1} (1 - q^n)^{c(n)}` truncated at `q^order`.
///
/// Each factor is expanded with generalized binomial coefficients,
/// `(1 - x)^c = sum_j (-1)^j binom(c, j) x^j`, which stay integral for
/// negative `c`.
pub fn expand_product(pe: &ProductExponents, order: usize) -> IntSeries {
    // work on t/q at order - 1, then shift
    let inner = order.saturating_sub(1);
    let mut acc = IntSeries::one(inner);
    for n in 1..=inner.min(pe.len()) {
        let c = pe.c(n);
        if c.is_zero() {
            continue;
        }
        let max_j = inner / n;
        let mut next = IntSeries::zero(inner);
        // binom(c, j) (-1)^j, built incrementally
        let mut coef = BigInt::one();
        for j in 0..=max_j {
            if j > 0 {
                coef = -(coef * (c - (j - 1))) / j;
            }
            if coef.is_zero() {
                break;
            }
            let shift = j * n;
            for i in 0..=inner - shift {
                if !acc.coeffs[i].is_zero() {
                    next.coeffs[i + shift] += &coef * &acc.coeffs[i];
                }
            }
        }
        acc = next;
    }
    let mut out = IntSeries::zero(order);
    if order > 0 {
        for i in 0..=inner {
            out.coeffs[i + 1] = acc.coeffs[i].clone();
        }
    }
    out
}

/// Coefficients of `Delta = q prod (1 - q^n)^24` up to `q^order`; entry `n`
/// is Ramanujan's `tau(n)`.
pub fn ramanujan_tau(order: usize) -> IntSeries {
    let base = eta_core(1, order.saturating_sub(1));
    let p = base.pow(24).expect("non-negative power");
    let mut out = IntSeries::zero(order);
    for i in 0..order {
        out.coeffs[i + 1] = p.coeffs[i].clone();
    }
    out
}

/// `n -> |sum_{d | n} d c(d)| / n^alpha_exp` for `n = 1..=len`.
///
/// Bounded exponents keep this `O(n^{1 + eps - alpha_exp})`; geometric growth
/// shows up regardless of `alpha_exp`.
pub fn weighted_divisor_growth(pe: &ProductExponents, alpha_exp: f64) -> Vec<f64> {
    (1..=pe.len())
        .map(|n| {
            let s = pe.alpha(n).abs();
            let mag = s.to_f64().unwrap_or(f64::INFINITY);
            mag / (n as f64).powf(alpha_exp)
        })
        .collect()
}
