//! Verification suites over the published tables and the identities the
//! library relies on.
//!
//! A suite is a list of independent named [`Check`]s. Running them in any
//! order (or in parallel) and then sorting by position gives the same report.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::classify::{eta_quotient_search, schoeneberg_identity_check, unboundedness_probe};
use crate::error::Result;
use crate::fixtures::{PrintedSeries, Tables};
use crate::ntheory::{char_divisor_sum, primes_below};
use crate::qforms::{enumerate_reduced, schoeneberg_pair, units_w, Discriminant, QuadForm};
use crate::qseries::{expand_product, product_exponents, ramanujan_tau};
use crate::repnum::{
    cross_validate, mass_formula_residual, rep_formula, van_der_blij, RepFormulaContext,
};
use crate::theta::{
    cusp_vanishing_orders, half_theta_difference, rep_count_bruteforce, theta_series,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tables,
    Identities,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Tables => "tables",
            Suite::Identities => "identities",
        })
    }
}

type CheckFn = Box<dyn Fn() -> std::result::Result<String, String> + Send + Sync>;

/// A named, self-contained verification step.
pub struct Check {
    pub suite: Suite,
    pub name: String,
    run: CheckFn,
}

impl Check {
    fn new(
        suite: Suite,
        name: impl Into<String>,
        run: impl Fn() -> std::result::Result<String, String> + Send + Sync + 'static,
    ) -> Self {
        Check {
            suite,
            name: name.into(),
            run: Box::new(run),
        }
    }

    pub fn run(&self) -> CheckOutcome {
        let (passed, detail) = match (self.run)() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        CheckOutcome {
            suite: self.suite,
            name: self.name.clone(),
            passed,
            detail,
        }
    }
}

impl fmt::Debug for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Check")
            .field("suite", &self.suite)
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcomes in check order, with the first failure if there is one.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| !o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

/// Run every check on the current thread.
pub fn run_checks(checks: &[Check]) -> SuiteReport {
    SuiteReport {
        outcomes: checks.iter().map(Check::run).collect(),
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn describe_diff(diff: &[(usize, i64, i64)]) -> String {
    diff.iter()
        .map(|(n, p, c)| format!("q^{n}: printed {p}, computed {c}"))
        .collect::<Vec<_>>()
        .join("; ")
}

fn series_check(
    q0: QuadForm,
    qr: QuadForm,
    printed: &PrintedSeries,
) -> std::result::Result<String, String> {
    let f = lift(half_theta_difference(&q0, &qr, printed.big_o - 1))?;
    let diff = printed.diff(&f);
    if diff.is_empty() {
        Ok(format!("{} coefficients agree", printed.big_o))
    } else {
        Err(describe_diff(&diff))
    }
}

fn forms_check(d: u64, listed: &[QuadForm]) -> std::result::Result<String, String> {
    let disc = lift(Discriminant::fundamental(d))?;
    let classes = enumerate_reduced(&disc);
    let enumerated: Vec<QuadForm> = (0..listed.len())
        .map(|r| classes.form(r))
        .collect::<Result<_>>()
        .map_err(|e| e.to_string())?;
    if classes.class_number() != 2 * listed.len() - 1 {
        return Err(format!("h(-{d}) = {}", classes.class_number()));
    }
    if enumerated != listed {
        return Err(format!("enumerated {enumerated:?}, listed {listed:?}"));
    }
    Ok(format!("h = {}", classes.class_number()))
}

/// Re-derive every table entry from scratch and compare.
pub fn table_checks(tables: &Tables) -> Vec<Check> {
    let mut checks = Vec::new();
    for row in tables.table1.clone() {
        checks.push(Check::new(
            Suite::Tables,
            format!("table1/D={}", row.d),
            move || {
                let pair = lift(schoeneberg_pair(row.d))?;
                if pair != (row.qs, row.qr) {
                    return Err(format!("computed pair {pair:?}"));
                }
                if !lift(schoeneberg_identity_check(row.d, 200))? {
                    return Err("theta half-difference differs from eta(z)eta(Dz)".into());
                }
                Ok("pair reduced, identity holds to q^200".into())
            },
        ));
    }
    for row in tables.table2.clone() {
        checks.push(Check::new(
            Suite::Tables,
            format!("table2/D={}", row.d),
            move || {
                let disc = lift(Discriminant::fundamental(row.d))?;
                let classes = enumerate_reduced(&disc);
                if classes.forms != vec![row.q0] {
                    return Err(format!("reduced forms {:?}", classes.forms));
                }
                let w = units_w(&disc);
                if w != row.w {
                    return Err(format!("w = {w}"));
                }
                let theta = lift(theta_series(&row.q0, 200))?;
                for n in 1..=200u64 {
                    let expected = w as i64 * char_divisor_sum(n, &disc);
                    if theta.count(n as usize) as i64 != expected {
                        return Err(format!(
                            "a({n}) = {}, w S(n) = {expected}",
                            theta.count(n as usize)
                        ));
                    }
                }
                Ok(format!("h = 1, w = {w}"))
            },
        ));
    }
    for (t, rows) in [(3, &tables.table3), (4, &tables.table4)] {
        for row in rows.clone() {
            let r2 = row.clone();
            checks.push(Check::new(
                Suite::Tables,
                format!("table{t}/D={}/forms", row.d),
                move || forms_check(r2.d, &[r2.q0, r2.q1]),
            ));
            checks.push(Check::new(
                Suite::Tables,
                format!("table{t}/D={}/F1", row.d),
                move || series_check(row.q0, row.q1, &row.f1),
            ));
        }
    }
    for row in tables.table5.clone() {
        let row = Arc::new(row);
        let r = row.clone();
        checks.push(Check::new(
            Suite::Tables,
            format!("table5/D={}/forms", row.d),
            move || forms_check(r.d, &[r.q0, r.q1, r.q2]),
        ));
        for i in 1..=2 {
            let r = row.clone();
            checks.push(Check::new(
                Suite::Tables,
                format!("table5/D={}/F{i}", row.d),
                move || series_check(r.q0, r.form(i), r.series(i)),
            ));
        }
    }
    checks
}

/// Range used for the representation-number identities.
pub const IDENTITY_N: u64 = 500;

/// The representation formulas, the mass formula, the van der Blij case,
/// the tau congruence and the eta-quotient identities.
pub fn identity_checks(tables: &Tables) -> Vec<Check> {
    let mut checks = Vec::new();
    for d in tables.discriminants() {
        checks.push(Check::new(
            Suite::Identities,
            format!("formula/D={d}"),
            move || {
                let disc = lift(Discriminant::fundamental(d))?;
                let report = lift(cross_validate(&disc, IDENTITY_N as usize))?;
                match report.failures.first() {
                    None => Ok(format!("{} values agree", report.checks_run)),
                    Some(m) => Err(format!(
                        "{} mismatches, first at index {} n = {}: lattice {}, formula {:?}",
                        report.failures.len(),
                        m.index,
                        m.n,
                        m.expected,
                        m.got
                    )),
                }
            },
        ));
        checks.push(Check::new(
            Suite::Identities,
            format!("mass/D={d}"),
            move || {
                let disc = lift(Discriminant::fundamental(d))?;
                let ctx = lift(RepFormulaContext::new(&disc, 1))?;
                for n in 1..=IDENTITY_N {
                    let res = lift(mass_formula_residual(&ctx, n))?;
                    if res != 0 {
                        return Err(format!("residual {res} at n = {n}"));
                    }
                }
                Ok(format!("residual 0 for n <= {IDENTITY_N}"))
            },
        ));
        checks.push(Check::new(
            Suite::Identities,
            format!("difference/D={d}"),
            move || {
                let disc = lift(Discriminant::fundamental(d))?;
                let ctx = lift(RepFormulaContext::new(&disc, IDENTITY_N as usize))?;
                for r in 1..=ctx.k() {
                    let qr = lift(ctx.classes.form(r))?;
                    for n in 1..=IDENTITY_N {
                        let lhs = lift(rep_count_bruteforce(&ctx.classes.principal, n))? as i64
                            - lift(rep_count_bruteforce(&qr, n))? as i64;
                        let via_formula = lift(rep_formula(&ctx, 0, n))? as i64
                            - lift(rep_formula(&ctx, r, n))? as i64;
                        let t = 2 * ctx.t(r, n as usize);
                        if lhs != t || via_formula != t {
                            return Err(format!(
                                "r = {r}, n = {n}: {lhs} / {via_formula} vs 2t = {t}"
                            ));
                        }
                    }
                }
                Ok(format!(
                    "a(n,Q0) - a(n,Qr) = 2 t_r(n) for n <= {IDENTITY_N}"
                ))
            },
        ));
    }

    checks.push(Check::new(Suite::Identities, "van-der-blij", || {
        let q0 = QuadForm::new(1, 1, 6);
        let q1 = QuadForm::new(2, 1, 3);
        let order = 2000;
        for n in 1..=order as u64 {
            let (a0, a1) = lift(van_der_blij(n, order))?;
            let b0 = lift(rep_count_bruteforce(&q0, n))?;
            let b1 = lift(rep_count_bruteforce(&q1, n))?;
            if (a0, a1) != (b0, b1) {
                return Err(format!(
                    "n = {n}: formula ({a0}, {a1}), lattice ({b0}, {b1})"
                ));
            }
        }
        Ok(format!("n <= {order}"))
    }));

    checks.push(Check::new(Suite::Identities, "tau-congruence", || {
        let order = 1500;
        let disc = lift(Discriminant::fundamental(23))?;
        let t1 = lift(crate::theta::f_dr(&disc, 1, order))?;
        let tau = ramanujan_tau(order);
        let m = BigInt::from(23);
        for n in 1..=order {
            if !(t1.coeff(n) - tau.coeff(n)).is_multiple_of(&m) {
                return Err(format!(
                    "n = {n}: t = {}, tau = {}",
                    t1.coeff(n),
                    tau.coeff(n)
                ));
            }
        }
        Ok(format!("n <= {order}"))
    }));

    for d in [23u64, 47, 71, 95, 119, 167, 191, 239] {
        checks.push(Check::new(
            Suite::Identities,
            format!("schoeneberg/D={d}"),
            move || {
                if lift(schoeneberg_identity_check(d, 1000))? {
                    Ok("agrees through q^1000".into())
                } else {
                    Err("theta half-difference differs from eta(z)eta(Dz)".into())
                }
            },
        ));
    }

    checks.push(Check::new(Suite::Identities, "eta-search", || {
        for d in primes_below(500).into_iter().filter(|&p| p >= 3) {
            let found = lift(eta_quotient_search(d, true))?.solutions;
            let expected = if d % 24 == 23 { vec![(1, 1)] } else { vec![] };
            if found != expected {
                return Err(format!("D = {d}: {found:?}"));
            }
        }
        Ok("primes below 500".into())
    }));

    checks.push(Check::new(
        Suite::Identities,
        "product-exponents/D=23",
        || {
            let disc = lift(Discriminant::fundamental(23))?;
            let f = lift(crate::theta::f_dr(&disc, 1, 1001))?;
            let pe = lift(product_exponents(&f))?;
            for n in 1..=1000 {
                let expected = if n % 23 == 0 { 2 } else { 1 };
                if *pe.c(n) != BigInt::from(expected) {
                    return Err(format!("c({n}) = {}", pe.c(n)));
                }
            }
            Ok("c(n) = 2 iff 23 | n, n <= 1000".into())
        },
    ));

    for d in [31u64, 47, 59] {
        checks.push(Check::new(
            Suite::Identities,
            format!("probe/D={d}"),
            move || {
                let disc = lift(Discriminant::fundamental(d))?;
                let p = lift(unboundedness_probe(&disc, 1, 300, 10))?;
                match p.first_exceed {
                    Some(n) => Ok(format!("|c({n})| > 10, max {}", p.max_c)),
                    None => Err(format!("max |c(n)| = {} below threshold", p.max_c)),
                }
            },
        ));
    }

    for d in [23u64, 31, 47] {
        checks.push(Check::new(
            Suite::Identities,
            format!("cusp-orders/D={d}"),
            move || {
                let disc = lift(Discriminant::fundamental(d))?;
                let k = enumerate_reduced(&disc).k();
                let target = 1.0 / (d as f64).sqrt();
                for r in 1..=k {
                    let o = lift(cusp_vanishing_orders(&disc, r, 4 * d))?;
                    let mag = o.leading_one_magnitude().unwrap_or(0.0);
                    if o.infinity != Some(1) || o.one != Some(1) || (mag - target).abs() > 1e-9 {
                        return Err(format!("r = {r}: {o:?}"));
                    }
                }
                Ok(format!("orders (1, 1) for r = 1..={k}"))
            },
        ));
    }

    let mut rows: Vec<(u64, QuadForm, QuadForm)> = Vec::new();
    for row in tables.table3.iter().chain(&tables.table4) {
        rows.push((row.d, row.q0, row.q1));
    }
    for row in &tables.table5 {
        rows.push((row.d, row.q0, row.q1));
        rows.push((row.d, row.q0, row.q2));
    }
    checks.push(Check::new(Suite::Identities, "round-trip", move || {
        for (d, q0, qr) in &rows {
            // rows whose listed forms are inconsistent are reported by the tables suite
            let Ok(f) = half_theta_difference(q0, qr, 100) else {
                continue;
            };
            let pe = lift(product_exponents(&f))?;
            if expand_product(&pe, 100) != f {
                return Err(format!("D = {d}, {qr}"));
            }
        }
        Ok(format!("{} series at N = 100", rows.len()))
    }));

    checks
}

pub fn suite_checks(suite: Suite, tables: &Tables) -> Vec<Check> {
    match suite {
        Suite::Tables => table_checks(tables),
        Suite::Identities => identity_checks(tables),
    }
}
