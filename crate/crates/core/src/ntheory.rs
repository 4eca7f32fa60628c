//! Elementary multiplicative number theory used throughout the crate.
//!
//! Everything here works at desk scale (inputs below roughly 10^7), so
//! factorization is plain trial division.

use std::collections::BTreeMap;

use crate::qforms::Discriminant;

/// Prime factorization `n = prod p^e`, keyed by prime.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorMap(BTreeMap<u64, u32>);

impl FactorMap {
    /// Factor `n >= 1` by trial division. `factorize(1)` is the empty map.
    pub fn factorize(mut n: u64) -> Self {
        assert!(n >= 1, "cannot factor 0");
        let mut map = BTreeMap::new();
        let mut p = 2u64;
        while p * p <= n {
            if n.is_multiple_of(p) {
                let mut e = 0;
                while n.is_multiple_of(p) {
                    n /= p;
                    e += 1;
                }
                map.insert(p, e);
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if n > 1 {
            *map.entry(n).or_insert(0) += 1;
        }
        FactorMap(map)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.0.iter().map(|(&p, &e)| (p, e))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }

    /// The integer this map factors.
    pub fn value(&self) -> u64 {
        self.iter().map(|(p, e)| p.pow(e)).product()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Kronecker symbol `(a|n)`.
///
/// Conventions: `(a|0) = 1` iff `a = ±1`; `(a|-1) = -1` iff `a < 0`;
/// `(a|2) = 0` for even `a`, `1` for `a ≡ ±1 (mod 8)` and `-1` for
/// `a ≡ ±3 (mod 8)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut m = n.unsigned_abs();
    if n < 0 && a < 0 {
        result = -result;
    }
    let twos = m.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= twos;
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    result * jacobi(a.rem_euclid(m as i64) as u64, m)
}

/// Jacobi symbol `(a|m)` for odd `m >= 1`.
fn jacobi(mut a: u64, mut m: u64) -> i32 {
    debug_assert!(m % 2 == 1);
    let mut result = 1;
    a %= m;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// The Möbius function.
pub fn moebius(n: u64) -> i32 {
    let f = FactorMap::factorize(n);
    let mut sign = 1;
    for (_, e) in f.iter() {
        if e > 1 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// Möbius values for `0..=limit` by a linear sieve (`mu[0]` is unused and set to 0).
pub fn moebius_table(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    mu[0] = 0;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors of 0 are not defined");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `sum_{d | n} (-D|d)`, the twisted divisor sum in the representation formulas.
pub fn char_divisor_sum(n: u64, disc: &Discriminant) -> i64 {
    let neg_d = disc.value();
    divisors(n)
        .into_iter()
        .map(|d| kronecker(neg_d, d as i64) as i64)
        .sum()
}

pub fn is_squarefree(n: u64) -> bool {
    FactorMap::factorize(n).iter().all(|(_, e)| e == 1)
}

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// Primes below `limit`.
pub fn primes_below(limit: u64) -> Vec<u64> {
    (2..limit).filter(|&n| is_prime(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Legendre symbol by Euler's criterion, used as an oracle for odd primes.
    fn legendre_euler(a: i64, p: u64) -> i32 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        let mut base = a as u128;
        let mut e = (p - 1) / 2;
        let mut acc: u128 = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u128;
            }
            base = base * base % p as u128;
            e >>= 1;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    }

    /// Kronecker symbol straight from the definition via factorization of `n`.
    fn kronecker_by_definition(a: i64, n: i64) -> i32 {
        if n == 0 {
            return if a.abs() == 1 { 1 } else { 0 };
        }
        let mut r = if n < 0 && a < 0 { -1 } else { 1 };
        for (p, e) in FactorMap::factorize(n.unsigned_abs()).iter() {
            let s = if p == 2 {
                match a.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                legendre_euler(a, p)
            };
            r *= s.pow(e);
        }
        r
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-23, 2), 1);
        for a in -50..50 {
            assert_eq!(kronecker(a, 1), 1);
        }
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(5, 0), 0);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(3, -1), 1);
    }

    #[test]
    fn kronecker_minus_23_matches_residues_mod_23() {
        let squares: Vec<i64> = (1..23).map(|x| x * x % 23).collect();
        for d in 1..2000i64 {
            if d % 2 == 0 || d % 23 == 0 {
                continue;
            }
            // quadratic reciprocity: (-23|d) = (d|23)
            let expected = if squares.contains(&(d % 23)) { 1 } else { -1 };
            assert_eq!(kronecker(-23, d), expected, "d = {d}");
        }
    }

    #[test]
    fn kronecker_agrees_with_definition() {
        for a in -60..60 {
            for n in -60..60 {
                assert_eq!(kronecker(a, n), kronecker_by_definition(a, n), "({a}|{n})");
            }
        }
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative_in_n(a in -500i64..500, m in 1i64..3000, n in 1i64..3000) {
            prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
        }

        #[test]
        fn divisors_are_exact(n in 1u64..20_000) {
            let ds = divisors(n);
            let brute: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            prop_assert_eq!(ds, brute);
        }

        #[test]
        fn factor_map_reconstructs(n in 1u64..1_000_000) {
            let f = FactorMap::factorize(n);
            prop_assert_eq!(f.value(), n);
            prop_assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn moebius_examples_and_sum() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(30), -1);
        let table = moebius_table(3000);
        for n in 1..=3000u64 {
            assert_eq!(table[n as usize] as i32, moebius(n));
            let s: i32 = divisors(n).into_iter().map(moebius).sum();
            assert_eq!(s, if n == 1 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(6), vec![1, 2, 3, 6]);
        assert_eq!(divisors(23), vec![1, 23]);
        assert_eq!(divisors(36), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
    }

    #[test]
    fn char_divisor_sum_examples() {
        let d23 = Discriminant::new(23).unwrap();
        assert_eq!(char_divisor_sum(1, &d23), 1);
        assert_eq!(char_divisor_sum(6, &d23), 4);
        assert_eq!(char_divisor_sum(2, &d23), 2);
        for p in primes_below(500) {
            assert_eq!(
                char_divisor_sum(p, &d23),
                1 + kronecker(-23, p as i64) as i64
            );
        }
    }

    #[test]
    fn squarefree_and_primes() {
        assert!(is_squarefree(1));
        assert!(!is_squarefree(12));
        assert!(is_squarefree(23));
        assert!(!is_squarefree(49));
        assert_eq!(primes_below(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(1));
        assert!(!is_prime(287));
        assert!(is_prime(2683));
    }
}
