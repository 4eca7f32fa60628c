//! Closed formulas for `a(n, Q)` when the class number is odd.
//!
//! With `h(-D) = 2k + 1`, `S(n) = sum_{d | n} (-D|d)` and the cusp forms
//! `F_{D,r} = sum t_r(n) q^n`:
//!
//! ```text
//! a(n, Q_0) = (2 S(n) + 4 sum_j t_j(n)) / (2k + 1)
//! a(n, Q_r) = (2 S(n) + 4 sum_{j != r} t_j(n) - (4k - 2) t_r(n)) / (2k + 1)
//! ```
//!
//! and `a(n, Q_0) = w S(n)` when `k = 0`. All arithmetic is exact.

use std::time::Instant;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ntheory::char_divisor_sum;
use crate::qforms::{enumerate_reduced, units_w, Discriminant, FormClassList, QuadForm};
use crate::qseries::{eta_product_one_d, IntSeries};
use crate::theta::{half_theta_difference, rep_count_bruteforce};

/// Where the coefficients `t_j(n)` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TSource {
    /// Half-differences of theta series.
    ThetaDifference,
    /// The product `q prod (1 - q^n)(1 - q^{23n})`; only for `D = 23`.
    EtaProduct,
}

/// Everything the representation formulas need for one discriminant.
#[derive(Debug, Clone)]
pub struct RepFormulaContext {
    pub classes: FormClassList,
    /// `t_1..t_k`, each of order `order`.
    pub t: Vec<IntSeries>,
    pub w: u32,
    pub source: TSource,
    order: usize,
}

impl RepFormulaContext {
    /// Context with `t_j` computed from theta half-differences up to `order`.
    pub fn new(disc: &Discriminant, order: usize) -> Result<Self> {
        let classes = odd_classes(disc)?;
        let t = classes
            .pairs
            .iter()
            .map(|(qr, _)| half_theta_difference(&classes.principal, qr, order))
            .collect::<Result<Vec<_>>>()?;
        Ok(RepFormulaContext {
            w: units_w(disc),
            classes,
            t,
            source: TSource::ThetaDifference,
            order,
        })
    }

    /// The discriminant `-23` with `t` taken from `eta(z) eta(23z)`, so that
    /// checks against lattice counts do not go through theta series at all.
    pub fn eta_minus_23(order: usize) -> Result<Self> {
        let disc = Discriminant::fundamental(23)?;
        let classes = odd_classes(&disc)?;
        Ok(RepFormulaContext {
            w: units_w(&disc),
            classes,
            t: vec![eta_product_one_d(23, order)?],
            source: TSource::EtaProduct,
            order,
        })
    }

    pub fn disc(&self) -> &Discriminant {
        &self.classes.disc
    }

    pub fn k(&self) -> usize {
        self.classes.k()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `t_j(n)` for `1 <= j <= k`.
    pub fn t(&self, j: usize, n: usize) -> i64 {
        self.t[j - 1].coeff_i64(n)
    }
}

fn odd_classes(disc: &Discriminant) -> Result<FormClassList> {
    let classes = enumerate_reduced(disc);
    if !classes.paired {
        return Err(Error::EvenClassNumber {
            d: disc.d(),
            h: classes.class_number(),
        });
    }
    Ok(classes)
}

/// `a(n, Q_index)` from the closed formula; index 0 is the principal form.
pub fn rep_formula(ctx: &RepFormulaContext, index: usize, n: u64) -> Result<u64> {
    let k = ctx.k();
    if index > k {
        return Err(Error::IndexOutOfRange { index, k });
    }
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    if n as usize > ctx.order {
        return Err(Error::OrderExceeded {
            n,
            order: ctx.order,
        });
    }
    let s = char_divisor_sum(n, ctx.disc()) as i128;
    if k == 0 {
        return Ok((ctx.w as i128 * s) as u64);
    }
    let h = 2 * k as i128 + 1;
    let weight = |num: i128| Ratio::new(num, h);
    let mut value = weight(2) * s;
    for j in 1..=k {
        let tj = ctx.t(j, n as usize) as i128;
        if index != 0 && j == index {
            value -= weight(4 * k as i128 - 2) * tj;
        } else {
            value += weight(4) * tj;
        }
    }
    if !value.is_integer() || *value.numer() < 0 {
        return Err(Error::NonIntegralResult {
            n,
            numerator: *value.numer(),
            denominator: *value.denom(),
        });
    }
    Ok(value.to_integer() as u64)
}

/// `a(n, Q_0) + 2 sum_r a(n, Q_r) - w S(n)` from lattice counts; zero when
/// the counts are consistent with the Dedekind zeta factorization.
pub fn mass_formula_residual(ctx: &RepFormulaContext, n: u64) -> Result<i64> {
    let mut total = rep_count_bruteforce(&ctx.classes.principal, n)? as i64;
    for (qr, _) in &ctx.classes.pairs {
        total += 2 * rep_count_bruteforce(qr, n)? as i64;
    }
    Ok(total - ctx.w as i64 * char_divisor_sum(n, ctx.disc()))
}

/// `(a(n, Q_0), a(n, Q_1))` for `Q_0 = x^2 + xy + 6y^2`, `Q_1 = 2x^2 + xy + 3y^2`,
/// with `t(n)` from `q prod (1 - q^n)(1 - q^{23n})` up to `order`.
pub fn van_der_blij(n: u64, order: usize) -> Result<(u64, u64)> {
    let ctx = RepFormulaContext::eta_minus_23(order)?;
    Ok((rep_formula(&ctx, 0, n)?, rep_formula(&ctx, 1, n)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub n: u64,
    /// Lattice count.
    pub expected: u64,
    /// Formula value, or `None` if the formula itself failed.
    pub got: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    #[serde(rename = "D")]
    pub d: u64,
    pub order: usize,
    pub checks_run: u64,
    pub failures: Vec<Mismatch>,
    pub elapsed_ms: u128,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `Err(ValidationFailure)` naming the first mismatch, if any.
    pub fn ensure_passed(&self) -> Result<()> {
        match self.failures.first() {
            None => Ok(()),
            Some(m) => Err(Error::ValidationFailure {
                d: self.d,
                index: m.index,
                n: m.n,
            }),
        }
    }
}

/// Compare the formula against lattice counts for every reduced form
/// (conjugates included, sharing their partner's index) and `1 <= n <= order`.
pub fn cross_validate(disc: &Discriminant, order: usize) -> Result<ValidationReport> {
    let start = Instant::now();
    let ctx = RepFormulaContext::new(disc, order)?;
    let mut targets: Vec<(usize, QuadForm)> = vec![(0, ctx.classes.principal)];
    for (r, (q, qbar)) in ctx.classes.pairs.iter().enumerate() {
        targets.push((r + 1, *q));
        targets.push((r + 1, *qbar));
    }
    let mut checks_run = 0;
    let mut failures = Vec::new();
    for n in 1..=order as u64 {
        for (index, q) in &targets {
            let expected = rep_count_bruteforce(q, n)?;
            let got = rep_formula(&ctx, *index, n).ok();
            checks_run += 1;
            if got != Some(expected) {
                failures.push(Mismatch {
                    index: *index,
                    n,
                    expected,
                    got,
                });
            }
        }
    }
    Ok(ValidationReport {
        d: disc.d(),
        order,
        checks_run,
        failures,
        elapsed_ms: start.elapsed().as_millis(),
    })
}
