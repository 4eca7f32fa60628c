//! Positive definite binary quadratic forms `ax^2 + bxy + cy^2`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ntheory::is_squarefree;

/// The form `ax^2 + bxy + cy^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    /// `b^2 - 4ac`.
    pub fn discriminant(&self) -> i64 {
        let d = (self.b as i128) * (self.b as i128) - 4 * (self.a as i128) * (self.c as i128);
        i64::try_from(d).expect("discriminant overflows i64")
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.discriminant() < 0
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// `Q(x, y)`.
    #[inline]
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// `|b| <= a <= c`, with `b >= 0` whenever `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let abs_b = self.b.abs();
        abs_b <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (abs_b != self.a && self.a != self.c))
    }

    /// The unique reduced form properly equivalent to `self`.
    ///
    /// Alternates the translation `x -> x + ky` (bringing `b` into `(-a, a]`)
    /// with the swap `(a, b, c) -> (c, -b, a)` while `a > c`; `a` strictly
    /// decreases at every swap.
    pub fn reduce(&self) -> Result<QuadForm> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(*self));
        }
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            if !(-a < b && b <= a) {
                let k = Integer::div_floor(&(a - b), &(2 * a));
                c += a * k * k + b * k;
                b += 2 * a * k;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        let narrow = |v: i128| i64::try_from(v).expect("reduced coefficient overflows i64");
        Ok(QuadForm::new(narrow(a), narrow(b), narrow(c)))
    }

    /// `(a, -b, c)`.
    pub fn conjugate(&self) -> QuadForm {
        QuadForm::new(self.a, -self.b, self.c)
    }

    /// Human-readable polynomial, e.g. `2x^2 - xy + 3y^2`.
    pub fn pretty(&self) -> String {
        fn coef(v: i64) -> String {
            if v == 1 {
                String::new()
            } else {
                v.to_string()
            }
        }
        let mut s = format!("{}x^2", coef(self.a));
        match self.b {
            0 => {}
            b if b > 0 => s.push_str(&format!(" + {}xy", coef(b))),
            b => s.push_str(&format!(" - {}xy", coef(-b))),
        }
        if self.c >= 0 {
            s.push_str(&format!(" + {}y^2", coef(self.c)));
        } else {
            s.push_str(&format!(" - {}y^2", coef(-self.c)));
        }
        s
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl FromStr for QuadForm {
    type Err = Error;

    /// Accepts `a,b,c`, optionally wrapped in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::ParseForm(s.to_string()));
        }
        let parse = |p: &str| {
            p.parse::<i64>()
                .map_err(|_| Error::ParseForm(s.to_string()))
        };
        Ok(QuadForm::new(
            parse(parts[0])?,
            parse(parts[1])?,
            parse(parts[2])?,
        ))
    }
}

impl Serialize for QuadForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A negative discriminant `-D`, stored by its magnitude `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Discriminant {
    d: u64,
    fundamental: bool,
}

impl Discriminant {
    /// Any negative discriminant: `D > 0` with `-D ≡ 0, 1 (mod 4)`.
    pub fn new(d: u64) -> Result<Self> {
        if d == 0 || !matches!(d % 4, 0 | 3) {
            return Err(Error::NotADiscriminant(d as i64));
        }
        Ok(Discriminant {
            d,
            fundamental: fundamental_failure(d).is_none(),
        })
    }

    /// A fundamental discriminant, or the reason it is not one.
    pub fn fundamental(d: u64) -> Result<Self> {
        let disc = Self::new(d)?;
        match fundamental_failure(d) {
            None => Ok(disc),
            Some(reason) => Err(Error::NotFundamental { d, reason }),
        }
    }

    /// The magnitude `D`.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// The discriminant itself, `-D`.
    pub fn value(&self) -> i64 {
        -(self.d as i64)
    }

    pub fn is_fundamental(&self) -> bool {
        self.fundamental
    }

    /// `D mod 4`, either 0 or 3.
    pub fn residue_mod4(&self) -> u64 {
        self.d % 4
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-{}", self.d)
    }
}

fn fundamental_failure(d: u64) -> Option<&'static str> {
    if d % 4 == 3 {
        (!is_squarefree(d)).then_some("D ≡ 3 mod 4 but D is not squarefree")
    } else {
        let m = d / 4;
        if !matches!(m % 4, 1 | 2) {
            Some("D = 4m requires m ≡ 1 or 2 mod 4")
        } else if !is_squarefree(m) {
            Some("D = 4m requires m squarefree")
        } else {
            None
        }
    }
}

/// Validate a negative integer as a fundamental discriminant.
pub fn is_fundamental(neg_d: i64) -> Result<Discriminant> {
    if neg_d >= 0 || !matches!(neg_d.rem_euclid(4), 0 | 1) {
        return Err(Error::NotADiscriminant(neg_d.unsigned_abs() as i64));
    }
    Discriminant::fundamental(neg_d.unsigned_abs())
}

/// `(1, 0, D/4)` or `(1, 1, (1 + D)/4)`.
pub fn principal_form(disc: &Discriminant) -> QuadForm {
    let d = disc.d() as i64;
    if d % 4 == 0 {
        QuadForm::new(1, 0, d / 4)
    } else {
        QuadForm::new(1, 1, (1 + d) / 4)
    }
}

/// The number of roots of unity in `Q(sqrt(-D))`.
pub fn units_w(disc: &Discriminant) -> u32 {
    match disc.d() {
        3 => 6,
        4 => 4,
        _ => 2,
    }
}

/// The reduced forms of one discriminant, arranged as principal form plus
/// conjugate pairs when the class number is odd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormClassList {
    pub disc: Discriminant,
    pub principal: QuadForm,
    /// `(Q_r, conjugate(Q_r))` for `r = 1..=k`, `Q_r` having `b > 0`.
    pub pairs: Vec<(QuadForm, QuadForm)>,
    /// Every reduced form: principal first, then each pair in order. For
    /// even class number this is the raw sorted list and `pairs` is empty.
    pub forms: Vec<QuadForm>,
    /// False when the class number is even and no pairing is claimed.
    pub paired: bool,
}

impl FormClassList {
    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    /// Number of conjugate pairs, `(h - 1)/2` for odd `h`.
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    /// `Q_0` for index 0, `Q_r` for `1 <= r <= k`.
    pub fn form(&self, index: usize) -> Result<QuadForm> {
        if index == 0 {
            Ok(self.principal)
        } else if self.paired && index <= self.k() {
            Ok(self.pairs[index - 1].0)
        } else {
            Err(Error::IndexOutOfRange { index, k: self.k() })
        }
    }
}

/// All primitive reduced forms of discriminant `-D`.
///
/// Scans `1 <= a <= sqrt(D/3)`, `|b| <= a`, `b ≡ D (mod 2)`, with
/// `c = (b^2 + D)/(4a)` integral.
pub fn enumerate_reduced(disc: &Discriminant) -> FormClassList {
    let d = disc.d() as i64;
    let mut found = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in -a..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let q = QuadForm::new(a, b, num / (4 * a));
            if q.is_reduced() && q.is_primitive() {
                found.push(q);
            }
        }
        a += 1;
    }
    let principal = principal_form(disc);
    debug_assert!(found.contains(&principal));
    let key = |q: &QuadForm| (q.a, q.c, q.b.abs(), -q.b);
    found.sort_by_key(key);

    let h = found.len();
    if h % 2 == 0 {
        found.retain(|q| *q != principal);
        found.insert(0, principal);
        return FormClassList {
            disc: *disc,
            principal,
            pairs: Vec::new(),
            forms: found,
            paired: false,
        };
    }

    let mut pairs: Vec<(QuadForm, QuadForm)> = found
        .iter()
        .filter(|q| **q != principal && q.b > 0)
        .map(|q| (*q, q.conjugate()))
        .collect();
    pairs.sort_by_key(|(q, _)| key(q));
    debug_assert!(pairs.iter().all(|(_, qbar)| found.contains(qbar)));
    debug_assert_eq!(1 + 2 * pairs.len(), h);

    let mut forms = vec![principal];
    for (q, qbar) in &pairs {
        forms.push(*q);
        forms.push(*qbar);
    }
    FormClassList {
        disc: *disc,
        principal,
        pairs,
        forms,
        paired: true,
    }
}

/// `h(-D)`, the number of reduced forms.
pub fn class_number(disc: &Discriminant) -> usize {
    enumerate_reduced(disc).class_number()
}

/// The smallest and second smallest positive integers primitively
/// represented by a non-principal reduced form, namely `(a, c)`.
///
/// Over all vectors the second value is `min(c, 4a)`, since `(2, 0)`
/// represents `4a`.
pub fn min_nonzero_values(q: &QuadForm) -> Result<(i64, i64)> {
    if q.a == 1 {
        return Err(Error::NotApplicable(*q));
    }
    Ok((q.a, q.c))
}

/// Reduced Schoeneberg pairs for `(D + 1)/24 < 6`.
pub const SCHOENEBERG_SMALL: [(u64, QuadForm, QuadForm); 5] = [
    (23, QuadForm::new(1, 1, 6), QuadForm::new(2, 1, 3)),
    (47, QuadForm::new(2, 1, 6), QuadForm::new(3, 1, 4)),
    (71, QuadForm::new(3, 1, 6), QuadForm::new(4, 3, 5)),
    (95, QuadForm::new(4, 1, 6), QuadForm::new(5, 5, 6)),
    (119, QuadForm::new(5, 1, 6), QuadForm::new(6, 5, 6)),
];

/// The pair `(Q_s, Q_r)` whose theta half-difference is `eta(z) eta(Dz)`.
///
/// For `(D + 1)/24 >= 6` this is `(6, 1, (D+1)/24)` and `(6, 5, (D+25)/24)`;
/// below that the reduced pair comes from [`SCHOENEBERG_SMALL`].
pub fn schoeneberg_pair(d: u64) -> Result<(QuadForm, QuadForm)> {
    if d % 24 != 23 {
        return Err(Error::WrongResidue(d));
    }
    let m = (d as i64 + 1) / 24;
    if m < 6 {
        let (_, s, r) = SCHOENEBERG_SMALL
            .iter()
            .find(|(dd, _, _)| *dd == d)
            .expect("every D ≡ 23 mod 24 below 143 is tabulated");
        return Ok((*s, *r));
    }
    let s = QuadForm::new(6, 1, m);
    let r = QuadForm::new(6, 5, (d as i64 + 25) / 24);
    debug_assert_eq!(s.reduce().ok(), Some(s));
    debug_assert_eq!(r.reduce().ok(), Some(r));
    Ok((s, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::is_prime;
    use proptest::prelude::*;

    fn disc(d: u64) -> Discriminant {
        Discriminant::fundamental(d).unwrap()
    }

    /// Brute force over small unimodular substitutions: the reduced forms
    /// reachable from `q` by `(x, y) -> (px + qy, rx + sy)`, `ps - qr = 1`.
    fn reduced_by_search(f: &QuadForm) -> Vec<QuadForm> {
        let mut out = Vec::new();
        for p in -6i64..=6 {
            for q in -6i64..=6 {
                for r in -6i64..=6 {
                    for s in -6i64..=6 {
                        if p * s - q * r != 1 {
                            continue;
                        }
                        let a = f.eval(p, r);
                        let c = f.eval(q, s);
                        let b = 2 * f.a * p * q + f.b * (p * s + q * r) + 2 * f.c * r * s;
                        let g = QuadForm::new(a, b, c);
                        if g.is_reduced() && !out.contains(&g) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(QuadForm::new(1, 1, 6).discriminant(), -23);
        assert_eq!(QuadForm::new(1, 0, 1).discriminant(), -4);
        assert_eq!(QuadForm::new(2, 1, 3).discriminant(), -23);
    }

    #[test]
    fn fundamental_validation() {
        assert!(is_fundamental(-23).is_ok());
        assert!(is_fundamental(-4).is_ok());
        assert!(is_fundamental(-8).is_ok());
        assert!(matches!(
            is_fundamental(-12),
            Err(Error::NotFundamental { d: 12, .. })
        ));
        assert!(matches!(
            is_fundamental(-6),
            Err(Error::NotADiscriminant(6))
        ));
        assert!(matches!(
            is_fundamental(-5),
            Err(Error::NotADiscriminant(5))
        ));
        assert!(matches!(is_fundamental(3), Err(Error::NotADiscriminant(_))));
        assert!(matches!(
            is_fundamental(-16),
            Err(Error::NotFundamental { .. })
        ));
        assert!(matches!(
            is_fundamental(-75),
            Err(Error::NotFundamental { .. })
        ));
        assert!(is_fundamental(-20).is_ok());
        assert!(is_fundamental(-24).is_ok());
        assert!(is_fundamental(-95).is_ok());
    }

    #[test]
    fn reduced_examples() {
        assert!(QuadForm::new(2, 1, 3).is_reduced());
        assert!(QuadForm::new(2, -1, 3).is_reduced());
        assert!(!QuadForm::new(1, 2, 6).is_reduced());
        assert!(!QuadForm::new(2, -2, 3).is_reduced());
        assert!(!QuadForm::new(3, -1, 3).is_reduced());
        assert!(QuadForm::new(5, 5, 6).is_reduced());
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(
            QuadForm::new(6, 1, 1).reduce().unwrap(),
            QuadForm::new(1, 1, 6)
        );
        assert_eq!(
            reduced_by_search(&QuadForm::new(6, 1, 1)),
            vec![QuadForm::new(1, 1, 6)]
        );
        assert_eq!(
            QuadForm::new(1, 1, 6).reduce().unwrap(),
            QuadForm::new(1, 1, 6)
        );
        assert_eq!(
            QuadForm::new(3, -1, 4).reduce().unwrap(),
            QuadForm::new(3, -1, 4)
        );
        assert!(QuadForm::new(1, 3, 1).reduce().is_err());
    }

    #[test]
    fn reduce_agrees_with_exhaustive_search() {
        let seeds = [
            QuadForm::new(6, 1, 1),
            QuadForm::new(3, 5, 4),
            QuadForm::new(8, 7, 3),
            QuadForm::new(12, 11, 5),
            QuadForm::new(4, 3, 2),
        ];
        for f in seeds {
            let r = f.reduce().unwrap();
            assert_eq!(reduced_by_search(&f), vec![r], "{f}");
        }
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_preserves_discriminant(
            a in 1i64..200, b in -300i64..300, c in 1i64..200,
        ) {
            let f = QuadForm::new(a, b, c);
            prop_assume!(f.discriminant() < 0);
            let r = f.reduce().unwrap();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.discriminant(), f.discriminant());
            prop_assert_eq!(r.reduce().unwrap(), r);
        }

        #[test]
        fn conjugation_is_an_involution(a in 1i64..100, b in -100i64..100, c in 1i64..100) {
            let f = QuadForm::new(a, b, c);
            prop_assert_eq!(f.conjugate().conjugate(), f);
        }
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(QuadForm::new(2, 1, 3).conjugate(), QuadForm::new(2, -1, 3));
        assert_eq!(QuadForm::new(1, 0, 1).conjugate(), QuadForm::new(1, 0, 1));
    }

    #[test]
    fn principal_forms() {
        assert_eq!(principal_form(&disc(23)), QuadForm::new(1, 1, 6));
        assert_eq!(principal_form(&disc(4)), QuadForm::new(1, 0, 1));
        assert_eq!(principal_form(&disc(8)), QuadForm::new(1, 0, 2));
    }

    #[test]
    fn enumerate_examples() {
        let l = enumerate_reduced(&disc(23));
        assert_eq!(l.principal, QuadForm::new(1, 1, 6));
        assert_eq!(
            l.pairs,
            vec![(QuadForm::new(2, 1, 3), QuadForm::new(2, -1, 3))]
        );
        assert_eq!(l.class_number(), 3);

        let l = enumerate_reduced(&disc(7));
        assert_eq!(l.forms, vec![QuadForm::new(1, 1, 2)]);

        let l = enumerate_reduced(&disc(47));
        assert_eq!(l.principal, QuadForm::new(1, 1, 12));
        assert_eq!(
            l.pairs,
            vec![
                (QuadForm::new(2, 1, 6), QuadForm::new(2, -1, 6)),
                (QuadForm::new(3, 1, 4), QuadForm::new(3, -1, 4)),
            ]
        );
        assert_eq!(l.form(2).unwrap(), QuadForm::new(3, 1, 4));
        assert!(l.form(3).is_err());
    }

    #[test]
    fn even_class_number_is_unpaired() {
        let l = enumerate_reduced(&disc(95));
        assert!(!l.paired);
        assert!(l.pairs.is_empty());
        assert_eq!(l.class_number(), 8);
        assert_eq!(l.forms[0], QuadForm::new(1, 1, 24));
        assert!(l.forms.contains(&QuadForm::new(5, 5, 6)));
        assert_eq!(class_number(&disc(87)), 6);
        assert_eq!(class_number(&disc(420)), 8);
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(&disc(23)), 3);
        assert_eq!(class_number(&disc(163)), 1);
        assert_eq!(class_number(&disc(47)), 5);
        for d in [3, 4, 7, 8, 11, 19, 43, 67, 163] {
            assert_eq!(class_number(&disc(d)), 1, "D = {d}");
        }
    }

    #[test]
    fn units() {
        assert_eq!(units_w(&disc(3)), 6);
        assert_eq!(units_w(&disc(4)), 4);
        assert_eq!(units_w(&disc(23)), 2);
    }

    #[test]
    fn enumeration_invariants_up_to_3000() {
        for d in 3..=3000u64 {
            let Ok(disc) = Discriminant::fundamental(d) else {
                continue;
            };
            let l = enumerate_reduced(&disc);
            let h = l.class_number();
            for (i, q) in l.forms.iter().enumerate() {
                assert!(q.is_reduced());
                assert_eq!(q.discriminant(), -(d as i64));
                assert!(3 * q.a * q.a <= d as i64);
                assert!(!l.forms[i + 1..].contains(q));
                if *q != l.principal {
                    assert!(q.a > 1, "D = {d}: {q}");
                }
            }
            if h % 2 == 1 {
                if h > 1 {
                    assert!(is_prime(d) && d % 4 == 3, "odd h = {h} for D = {d}");
                }
                for (q, qbar) in &l.pairs {
                    assert!(q.b.abs() < q.a && q.a < q.c, "D = {d}: {q}");
                    assert!(qbar.is_reduced());
                }
            } else {
                assert!(!(is_prime(d) && d % 4 == 3), "even h for prime D = {d}");
            }
            if d == 4 || d == 8 {
                assert_eq!(h, 1);
            }
        }
    }

    #[test]
    fn min_values() {
        assert_eq!(min_nonzero_values(&QuadForm::new(2, 1, 3)).unwrap(), (2, 3));
        assert_eq!(min_nonzero_values(&QuadForm::new(3, 1, 4)).unwrap(), (3, 4));
        assert!(matches!(
            min_nonzero_values(&QuadForm::new(1, 1, 6)),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn min_values_match_lattice_scan() {
        for d in [23u64, 31, 47, 59, 71, 79, 83, 103, 107] {
            for (q, _) in enumerate_reduced(&disc(d)).pairs {
                let mut vals: Vec<i64> = Vec::new();
                for x in -10i64..=10 {
                    for y in -10i64..=10 {
                        if x.gcd(&y) == 1 && x * x + y * y <= 100 {
                            vals.push(q.eval(x, y));
                        }
                    }
                }
                vals.sort();
                vals.dedup();
                assert_eq!((vals[0], vals[1]), min_nonzero_values(&q).unwrap(), "{q}");
            }
        }
    }

    #[test]
    fn schoeneberg_pairs() {
        let f = QuadForm::new;
        assert_eq!(schoeneberg_pair(47).unwrap(), (f(2, 1, 6), f(3, 1, 4)));
        assert_eq!(schoeneberg_pair(23).unwrap(), (f(1, 1, 6), f(2, 1, 3)));
        assert_eq!(schoeneberg_pair(167).unwrap(), (f(6, 1, 7), f(6, 5, 8)));
        assert!(matches!(schoeneberg_pair(31), Err(Error::WrongResidue(31))));
        for d in (23..5000u64).step_by(24) {
            let (s, r) = schoeneberg_pair(d).unwrap();
            assert!(s.is_reduced() && r.is_reduced(), "D = {d}");
            assert_eq!(s.discriminant(), -(d as i64));
            assert_eq!(r.discriminant(), -(d as i64));
        }
    }

    #[test]
    fn form_notation() {
        let q: QuadForm = "2,-1,3".parse().unwrap();
        assert_eq!(q, QuadForm::new(2, -1, 3));
        assert_eq!(q.to_string(), "2,-1,3");
        assert_eq!(
            "(1, 1, 6)".parse::<QuadForm>().unwrap(),
            QuadForm::new(1, 1, 6)
        );
        assert!("1,2".parse::<QuadForm>().is_err());
        assert_eq!(q.pretty(), "2x^2 - xy + 3y^2");
        assert_eq!(QuadForm::new(1, 0, 1).pretty(), "x^2 + y^2");
        assert_eq!(QuadForm::new(13, 9, 19).pretty(), "13x^2 + 9xy + 19y^2");
    }
}
