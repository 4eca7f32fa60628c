use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use qformlab::classify::{
    eta_quotient_search, interior_zero_mass, interior_zero_mass_per_cusp,
    schoeneberg_identity_check, schoeneberg_pair_search, unboundedness_probe,
};
use qformlab::fixtures::{embedded_errata, load_errata, Tables};
use qformlab::qforms::{enumerate_reduced, schoeneberg_pair, units_w, Discriminant, QuadForm};
use qformlab::qseries::{eta_product_one_d, product_exponents, ramanujan_tau};
use qformlab::repnum::{cross_validate, rep_formula, RepFormulaContext};
use qformlab::theta::{cusp_vanishing_orders, f_dr, rep_count_bruteforce, theta_series};
use qformlab::verify::{suite_checks, CheckOutcome, Suite, SuiteReport};

#[derive(Parser)]
#[command(
    name = "qformlab",
    version,
    about = "Representation numbers of binary quadratic forms"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Formula,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Tables,
    Identities,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class number, w and the reduced forms of discriminant -D.
    Forms {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
    },
    /// a(n, Q_i) by lattice count, by the closed formula, or both.
    Repcount {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        /// Form index: 0 is the principal form.
        #[arg(short = 'i', long = "index", default_value_t = 0)]
        index: usize,
        #[arg(short = 'n')]
        n: u64,
        #[arg(long, value_enum, default_value_t = Method::Formula)]
        method: Method,
    },
    /// Representation counts a(0..=N) of a single form.
    Theta {
        /// The form as a,b,c.
        #[arg(long, allow_hyphen_values = true)]
        form: QuadForm,
        #[arg(short = 'N', long = "order", default_value_t = 30)]
        order: usize,
    },
    /// Coefficients t_r(1..=N) of F_{D,r} = (Theta_{Q_0} - Theta_{Q_r})/2.
    ///
    /// Without -N, uses the printed truncation for tabulated D and 50 otherwise.
    Fdr {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        #[arg(short = 'r', long = "index", default_value_t = 1)]
        r: usize,
        #[arg(short = 'N', long = "order")]
        order: Option<usize>,
    },
    /// Exponents c(1..N-1) in F_{D,r} = q prod (1 - q^n)^c(n).
    ProductExponents {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        #[arg(short = 'r', long = "index", default_value_t = 1)]
        r: usize,
        #[arg(short = 'N', long = "order", default_value_t = 100)]
        order: usize,
    },
    /// Weight-one eta quotients eta^i(z) eta^j(Dz) of prime level D.
    EtaSearch {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        /// Accept forms that merely do not blow up at the cusps.
        #[arg(long)]
        holomorphic: bool,
    },
    /// Check the Schoeneberg pair identity, or search for all such pairs.
    Schoeneberg {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        #[arg(short = 'N', long = "order", default_value_t = 1000)]
        order: usize,
        /// Scan every pair of reduced forms instead of checking the known pair.
        #[arg(long)]
        search: bool,
    },
    /// Growth of the product exponents of F_{D,r}.
    Probe {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        #[arg(short = 'r', long = "index", default_value_t = 1)]
        r: usize,
        #[arg(short = 'N', long = "order", default_value_t = 300)]
        order: usize,
        #[arg(long, default_value_t = 10)]
        threshold: u64,
    },
    /// Orders of F_{D,r} at the cusps infinity and 1/1.
    CuspOrders {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        #[arg(short = 'r', long = "index", default_value_t = 1)]
        r: usize,
    },
    /// Weighted count of zeros of F_{D,r} away from the cusps, for prime D.
    ZeroMass {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
    },
    /// Ramanujan tau(1..=N).
    Tau {
        #[arg(short = 'N', long = "order", default_value_t = 30)]
        order: usize,
    },
    /// Compare the closed formula with lattice counts for every form and n <= N.
    Validate {
        #[arg(short = 'D', long = "discriminant")]
        d: u64,
        #[arg(short = 'N', long = "order", default_value_t = 500)]
        order: usize,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Directory holding table1.csv .. table5.csv (and optionally errata.csv).
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Correct the known misprints before comparing.
        #[arg(long)]
        apply_errata: bool,
    },
}

enum Failure {
    /// Bad input: exit code 2.
    Input(String),
    /// A computed value disagreed with its oracle: exit code 3.
    Mismatch(String),
}

impl From<qformlab::Error> for Failure {
    fn from(e: qformlab::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// A closed pipe (e.g. `| head`) is not an error worth reporting.
fn ignore_broken_pipe(r: io::Result<()>) -> io::Result<()> {
    match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

type CmdResult = Result<(), Failure>;

/// One command's result in all three renderings.
struct Report {
    text: String,
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Report {
    fn emit(&self, format: Format) -> CmdResult {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Text => ignore_broken_pipe(writeln!(out, "{}", self.text.trim_end()))?,
            Format::Json => {
                let s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                ignore_broken_pipe(writeln!(out, "{s}"))?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)
                    .map_err(|e| Failure::Input(e.to_string()))?;
                for row in &self.rows {
                    w.write_record(row)
                        .map_err(|e| Failure::Input(e.to_string()))?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn discriminant(d: u64) -> Result<Discriminant, Failure> {
    Ok(Discriminant::fundamental(d)?)
}

/// Form by index: `Q_r` for odd class number, position in the sorted list otherwise.
fn form_at(d: u64, index: usize) -> Result<QuadForm, Failure> {
    let classes = enumerate_reduced(&discriminant(d)?);
    if classes.paired {
        return Ok(classes.form(index)?);
    }
    classes.forms.get(index).copied().ok_or_else(|| {
        Failure::Input(format!(
            "form index {index} out of range (h = {})",
            classes.class_number()
        ))
    })
}

fn cmd_forms(d: u64) -> Result<Report, Failure> {
    let disc = discriminant(d)?;
    let classes = enumerate_reduced(&disc);
    let w = units_w(&disc);
    let h = classes.class_number();
    let mut entries = vec![(0, classes.principal, None)];
    if classes.paired {
        for (r, (q, qbar)) in classes.pairs.iter().enumerate() {
            entries.push((r + 1, *q, Some(*qbar)));
        }
    } else {
        entries.extend(
            classes
                .forms
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, q)| (i, *q, None)),
        );
    }
    let mut text = format!("D = {d}  h = {h}  w = {w}\n");
    text += &format!("{:<6}{:<14}{:<14}{}\n", "index", "form", "conjugate", "");
    for (i, q, qbar) in &entries {
        let conj = qbar.map(|c| c.to_string()).unwrap_or_default();
        text += &format!("{:<6}{:<14}{:<14}{}\n", i, q.to_string(), conj, q.pretty());
    }
    let json = json!({
        "D": d,
        "h": h,
        "w": w,
        "forms": entries.iter().map(|(i, q, qbar)| json!({
            "index": i,
            "form": q,
            "conjugate": qbar,
        })).collect::<Vec<_>>(),
    });
    let rows = entries
        .iter()
        .map(|(i, q, qbar)| {
            vec![
                i.to_string(),
                q.to_string(),
                qbar.map(|c| c.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Report {
        text,
        json,
        header: vec!["index", "form", "conjugate"],
        rows,
    })
}

fn cmd_repcount(d: u64, index: usize, n: u64, method: Method, format: Format) -> CmdResult {
    let q = form_at(d, index)?;
    let brute = match method {
        Method::Formula => None,
        _ => Some(rep_count_bruteforce(&q, n)?),
    };
    let formula = match method {
        Method::Brute => None,
        _ => {
            let ctx = RepFormulaContext::new(&discriminant(d)?, n as usize)?;
            Some(rep_formula(&ctx, index, n)?)
        }
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for (name, v) in [("brute", brute), ("formula", formula)] {
        if let Some(v) = v {
            text += &format!("a({n}, ({q})) = {v}  [{name}]\n");
            rows.push(vec![
                name.to_string(),
                q.to_string(),
                n.to_string(),
                v.to_string(),
            ]);
        }
    }
    Report {
        text,
        json: json!({ "D": d, "index": index, "form": q, "n": n, "brute": brute, "formula": formula }),
        header: vec!["method", "form", "n", "count"],
        rows,
    }
    .emit(format)?;
    match (brute, formula) {
        (Some(b), Some(f)) if b != f => Err(Failure::Mismatch(format!(
            "a({n}, ({q})): lattice count {b}, formula {f}"
        ))),
        _ => Ok(()),
    }
}

fn cmd_theta(q: QuadForm, order: usize) -> Result<Report, Failure> {
    let table = theta_series(&q, order)?;
    let mut text = format!("theta series of {} through q^{order}\n", q.pretty());
    let mut rows = Vec::new();
    for n in 0..=order {
        let a = table.count(n);
        if a > 0 {
            text += &format!("{n:>6} {a}\n");
        }
        rows.push(vec![n.to_string(), a.to_string()]);
    }
    Ok(Report {
        text,
        json: serde_json::to_value(&table).expect("table serializes"),
        header: vec!["n", "count"],
        rows,
    })
}

/// The printed truncation for `(D, r)` if the tables contain it.
fn printed_order(d: u64, r: usize) -> Option<usize> {
    let tables = Tables::embedded();
    let three = tables
        .table3
        .iter()
        .chain(&tables.table4)
        .find(|row| row.d == d && r == 1);
    if let Some(row) = three {
        return Some(row.f1.big_o - 1);
    }
    tables
        .table5
        .iter()
        .find(|row| row.d == d && (1..=2).contains(&r))
        .map(|row| row.series(r).big_o - 1)
}

fn cmd_fdr(d: u64, r: usize, order: Option<usize>) -> Result<Report, Failure> {
    let order = order.or_else(|| printed_order(d, r)).unwrap_or(50);
    let f = f_dr(&discriminant(d)?, r, order)?;
    let coeffs: Vec<String> = (1..=order).map(|n| f.coeff(n).to_string()).collect();
    Ok(Report {
        text: format!("F_{{{d},{r}}} = {f}\n"),
        json: json!({ "D": d, "r": r, "N": order, "t": coeffs }),
        header: vec!["n", "t"],
        rows: coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| vec![(i + 1).to_string(), c.clone()])
            .collect(),
    })
}

fn cmd_product_exponents(d: u64, r: usize, order: usize) -> Result<Report, Failure> {
    let f = f_dr(&discriminant(d)?, r, order)?;
    let pe = product_exponents(&f)?;
    let c: Vec<String> = pe.exponents().iter().map(ToString::to_string).collect();
    let mut text = format!("F_{{{d},{r}}} = q prod (1 - q^n)^c(n), n < {order}\n");
    for (i, v) in c.iter().enumerate() {
        text += &format!("{:>6} {v}\n", i + 1);
    }
    Ok(Report {
        text,
        json: json!({ "D": d, "r": r, "N": order, "c": c }),
        header: vec!["n", "c"],
        rows: c
            .iter()
            .enumerate()
            .map(|(i, v)| vec![(i + 1).to_string(), v.clone()])
            .collect(),
    })
}

fn cmd_eta_search(d: u64, holomorphic: bool) -> Result<Report, Failure> {
    let res = eta_quotient_search(d, !holomorphic)?;
    let kind = if holomorphic {
        "holomorphic"
    } else {
        "cusp form"
    };
    let mut text = format!("{kind} solutions eta^i(z) eta^j({d}z), i + j = 2:\n");
    if res.solutions.is_empty() {
        text += "none\n";
    }
    for (i, j) in &res.solutions {
        text += &format!("i = {i}, j = {j}\n");
    }
    Ok(Report {
        text,
        json: serde_json::to_value(&res).expect("result serializes"),
        header: vec!["i", "j"],
        rows: res
            .solutions
            .iter()
            .map(|(i, j)| vec![i.to_string(), j.to_string()])
            .collect(),
    })
}

fn cmd_schoeneberg(d: u64, order: usize, search: bool, format: Format) -> CmdResult {
    if search {
        let res = schoeneberg_pair_search(d, order)?;
        let mut text =
            format!("pairs with theta half-difference eta(z)eta({d}z) through q^{order}:\n");
        for (s, r) in &res.matches {
            text += &format!("{s}  {r}\n");
        }
        text += &format!("{} pair class(es)\n", res.classes.len());
        Report {
            text,
            json: serde_json::to_value(&res).expect("result serializes"),
            header: vec!["Qs", "Qr"],
            rows: res
                .matches
                .iter()
                .map(|(s, r)| vec![s.to_string(), r.to_string()])
                .collect(),
        }
        .emit(format)?;
        return if res.classes.len() == 1 {
            Ok(())
        } else {
            Err(Failure::Mismatch(format!(
                "{} pair classes, expected 1",
                res.classes.len()
            )))
        };
    }
    let (qs, qr) = schoeneberg_pair(d)?;
    let holds = schoeneberg_identity_check(d, order)?;
    let lead = eta_product_one_d(d, order)?;
    Report {
        text: format!(
            "Qs = {qs}, Qr = {qr}\n(Theta_Qs - Theta_Qr)/2 = eta(z)eta({d}z) through q^{order}: {holds}\n"
        ),
        json: json!({ "D": d, "N": order, "Qs": qs, "Qr": qr, "holds": holds, "lead_exponent": lead.valuation() }),
        header: vec!["D", "Qs", "Qr", "N", "holds"],
        rows: vec![vec![d.to_string(), qs.to_string(), qr.to_string(), order.to_string(), holds.to_string()]],
    }
    .emit(format)?;
    if holds {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("identity fails for D = {d}")))
    }
}

fn cmd_probe(d: u64, r: usize, order: usize, threshold: u64) -> Result<Report, Failure> {
    let p = unboundedness_probe(&discriminant(d)?, r, order, threshold)?;
    let first = p
        .first_exceed
        .map(|n| n.to_string())
        .unwrap_or_else(|| "none".into());
    Ok(Report {
        text: format!("D = {d}, r = {r}, n < {order}: max |c(n)| = {}, first |c(n)| > {threshold} at n = {first}\n", p.max_c),
        json: serde_json::to_value(&p).expect("result serializes"),
        header: vec!["D", "r", "N", "threshold", "max_c", "first_exceed"],
        rows: vec![vec![
            d.to_string(),
            r.to_string(),
            order.to_string(),
            threshold.to_string(),
            p.max_c.to_string(),
            p.first_exceed.map(|n| n.to_string()).unwrap_or_default(),
        ]],
    })
}

fn cmd_cusp_orders(d: u64, r: usize) -> Result<Report, Failure> {
    let o = cusp_vanishing_orders(&discriminant(d)?, r, 4 * d)?;
    let show = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_else(|| "none".into());
    let mag = o.leading_one_magnitude();
    Ok(Report {
        text: format!(
            "order at infinity: {}\norder at 1/1: {}\n|leading coefficient at 1/1|: {}\n",
            show(o.infinity),
            show(o.one),
            mag.map(|m| format!("{m:.12}"))
                .unwrap_or_else(|| "none".into())
        ),
        json: serde_json::to_value(&o).expect("result serializes"),
        header: vec!["D", "r", "infinity", "one", "leading_magnitude"],
        rows: vec![vec![
            d.to_string(),
            r.to_string(),
            show(o.infinity),
            show(o.one),
            mag.map(|m| m.to_string()).unwrap_or_default(),
        ]],
    })
}

fn cmd_zero_mass(d: u64) -> Result<Report, Failure> {
    let total = interior_zero_mass(d)?;
    let per_cusp = interior_zero_mass_per_cusp(d)?;
    Ok(Report {
        text: format!("(D-1)(D-23)/24 = {total}\nper cusp (D-23)/24 = {per_cusp}\n"),
        json: json!({ "D": d, "mass": total.to_string(), "per_cusp": per_cusp.to_string() }),
        header: vec!["D", "mass", "per_cusp"],
        rows: vec![vec![d.to_string(), total.to_string(), per_cusp.to_string()]],
    })
}

fn cmd_tau(order: usize) -> Result<Report, Failure> {
    let tau = ramanujan_tau(order);
    let values: Vec<String> = (1..=order).map(|n| tau.coeff(n).to_string()).collect();
    let mut text = String::new();
    for (i, v) in values.iter().enumerate() {
        text += &format!("{:>6} {v}\n", i + 1);
    }
    Ok(Report {
        text,
        json: json!({ "N": order, "tau": values }),
        header: vec!["n", "tau"],
        rows: values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![(i + 1).to_string(), v.clone()])
            .collect(),
    })
}

fn cmd_validate(d: u64, order: usize, format: Format) -> CmdResult {
    let report = cross_validate(&discriminant(d)?, order)?;
    let mut text = format!(
        "D = {d}: {} checks, {} failures\n",
        report.checks_run,
        report.failures.len()
    );
    for m in &report.failures {
        text += &format!(
            "index {} n = {}: lattice {}, formula {:?}\n",
            m.index, m.n, m.expected, m.got
        );
    }
    // elapsed time is left out so repeated runs print identical json
    Report {
        text,
        json: json!({
            "D": report.d,
            "order": report.order,
            "checks_run": report.checks_run,
            "failures": report.failures,
        }),
        header: vec!["index", "n", "expected", "got"],
        rows: report
            .failures
            .iter()
            .map(|m| {
                vec![
                    m.index.to_string(),
                    m.n.to_string(),
                    m.expected.to_string(),
                    m.got.map(|g| g.to_string()).unwrap_or_default(),
                ]
            })
            .collect(),
    }
    .emit(format)?;
    report
        .ensure_passed()
        .map_err(|e| Failure::Mismatch(e.to_string()))
}

fn cmd_verify(
    suite: SuiteArg,
    fixtures: Option<PathBuf>,
    apply_errata: bool,
    format: Format,
) -> CmdResult {
    let mut tables = match &fixtures {
        Some(dir) => Tables::load_dir(dir)?,
        None => Tables::embedded(),
    };
    if apply_errata {
        let errata = match &fixtures {
            Some(dir) => load_errata(dir)?,
            None => embedded_errata(),
        };
        tables.apply_errata(&errata)?;
    }
    let suites: &[Suite] = match suite {
        SuiteArg::Tables => &[Suite::Tables],
        SuiteArg::Identities => &[Suite::Identities],
        SuiteArg::All => &[Suite::Tables, Suite::Identities],
    };
    let checks: Vec<_> = suites
        .iter()
        .flat_map(|s| suite_checks(*s, &tables))
        .collect();
    // par_iter keeps positions, so the report order is the check order
    let report = SuiteReport {
        outcomes: checks.par_iter().map(|c| c.run()).collect(),
    };
    let mark = |o: &CheckOutcome| if o.passed { "ok  " } else { "FAIL" };
    let mut text = String::new();
    for o in &report.outcomes {
        text += &format!("{} {:<28} {}\n", mark(o), o.name, o.detail);
    }
    let failed = report.failures().count();
    text += &format!("{} checks, {failed} failed\n", report.outcomes.len());
    Report {
        text,
        json: json!({ "passed": report.passed(), "errata_applied": apply_errata, "checks": report.outcomes }),
        header: vec!["suite", "name", "passed", "detail"],
        rows: report
            .outcomes
            .iter()
            .map(|o| vec![o.suite.to_string(), o.name.clone(), o.passed.to_string(), o.detail.clone()])
            .collect(),
    }
    .emit(format)?;
    match report.first_failure() {
        None => Ok(()),
        Some(o) => Err(Failure::Mismatch(format!(
            "first failing check {}: {}",
            o.name, o.detail
        ))),
    }
}

fn run(cli: Cli) -> CmdResult {
    let f = cli.format;
    match cli.cmd {
        Cmd::Forms { d } => cmd_forms(d)?.emit(f),
        Cmd::Repcount {
            d,
            index,
            n,
            method,
        } => cmd_repcount(d, index, n, method, f),
        Cmd::Theta { form, order } => cmd_theta(form, order)?.emit(f),
        Cmd::Fdr { d, r, order } => cmd_fdr(d, r, order)?.emit(f),
        Cmd::ProductExponents { d, r, order } => cmd_product_exponents(d, r, order)?.emit(f),
        Cmd::EtaSearch { d, holomorphic } => cmd_eta_search(d, holomorphic)?.emit(f),
        Cmd::Schoeneberg { d, order, search } => cmd_schoeneberg(d, order, search, f),
        Cmd::Probe {
            d,
            r,
            order,
            threshold,
        } => cmd_probe(d, r, order, threshold)?.emit(f),
        Cmd::CuspOrders { d, r } => cmd_cusp_orders(d, r)?.emit(f),
        Cmd::ZeroMass { d } => cmd_zero_mass(d)?.emit(f),
        Cmd::Tau { order } => cmd_tau(order)?.emit(f),
        Cmd::Validate { d, order } => cmd_validate(d, order, f),
        Cmd::Verify {
            suite,
            fixtures,
            apply_errata,
        } => cmd_verify(suite, fixtures, apply_errata, f),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QFORMLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Input(format!(
            "QFORMLAB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(3)
        }
    }
}
