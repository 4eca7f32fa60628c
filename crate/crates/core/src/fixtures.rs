//! The published tables of reduced forms and cusp form expansions, as data.
//!
//! The CSV files under `data/` are compiled in; [`Tables::load_dir`] reads the
//! same layout from another directory. Series are stored as printed, e.g.
//! `q-q^2-q^3+q^6` with a separate column holding the exponent of the
//! printed `O(q^n)`.
//!
//! A handful of printed entries disagree with direct lattice counts. Those are
//! listed in `data/errata.csv` and are applied only on request.

use std::fmt;
use std::fs;
use std::path::Path;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qforms::QuadForm;
use crate::qseries::IntSeries;

const TABLE1: &str = include_str!("../data/table1.csv");
const TABLE2: &str = include_str!("../data/table2.csv");
const TABLE3: &str = include_str!("../data/table3.csv");
const TABLE4: &str = include_str!("../data/table4.csv");
const TABLE5: &str = include_str!("../data/table5.csv");
const ERRATA: &str = include_str!("../data/errata.csv");

/// A truncated expansion `sum_{n < big_o} a(n) q^n` as printed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrintedSeries {
    /// Exponent of the printed error term `O(q^big_o)`.
    pub big_o: usize,
    /// `a(0..big_o)`.
    pub coeffs: Vec<i64>,
}

impl PrintedSeries {
    /// Parse `q-q^2+2q^17`-style text; terms at or beyond `big_o` are an error.
    pub fn parse(text: &str, big_o: usize) -> Result<Self> {
        let bad = |why: &str| Error::Fixture(format!("{text:?}: {why}"));
        let mut coeffs = vec![0i64; big_o];
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ => (1, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (mult, power) = match term.find('q') {
                None => (term, None),
                Some(at) => (&term[..at], Some(&term[at + 1..])),
            };
            let mult: i64 = if mult.is_empty() {
                1
            } else {
                mult.parse().map_err(|_| bad("bad multiplier"))?
            };
            let exp: usize = match power {
                None => 0,
                Some("") => 1,
                Some(p) => p
                    .strip_prefix('^')
                    .and_then(|e| e.parse().ok())
                    .ok_or_else(|| bad("bad exponent"))?,
            };
            if exp >= big_o {
                return Err(bad("term beyond the error term"));
            }
            coeffs[exp] += sign * mult;
        }
        Ok(PrintedSeries { big_o, coeffs })
    }

    /// `(n, printed, computed)` for every disagreement below `big_o`.
    /// The computed series must reach at least `q^{big_o - 1}`.
    pub fn diff(&self, computed: &IntSeries) -> Vec<(usize, i64, i64)> {
        assert!(
            computed.order() + 1 >= self.big_o,
            "computed series too short"
        );
        (0..self.big_o)
            .filter_map(|n| {
                let got = computed.coeff(n).to_i64().expect("coefficient fits i64");
                (got != self.coeffs[n]).then_some((n, self.coeffs[n], got))
            })
            .collect()
    }

    pub fn matches(&self, computed: &IntSeries) -> bool {
        self.diff(computed).is_empty()
    }
}

impl fmt::Display for PrintedSeries {
    /// The compact printed form, without the error term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
            if a < 0 {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            if a.abs() != 1 || n == 0 {
                write!(f, "{}", a.abs())?;
            }
            match n {
                0 => {}
                1 => f.write_str("q")?,
                _ => write!(f, "q^{n}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Schoeneberg pair for small `D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRow {
    #[serde(rename = "D")]
    pub d: u64,
    pub qs: QuadForm,
    pub qr: QuadForm,
}

/// Class number one: the reduced form and `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassOneRow {
    #[serde(rename = "D")]
    pub d: u64,
    pub q0: QuadForm,
    pub w: u32,
}

/// Class number three with a one-dimensional cusp space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassThreeRow {
    #[serde(rename = "D")]
    pub d: u64,
    pub q0: QuadForm,
    pub q1: QuadForm,
    pub f1: PrintedSeries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassFiveRow {
    #[serde(rename = "D")]
    pub d: u64,
    pub q0: QuadForm,
    pub q1: QuadForm,
    pub q2: QuadForm,
    pub f1: PrintedSeries,
    pub f2: PrintedSeries,
}

impl ClassFiveRow {
    pub fn form(&self, r: usize) -> QuadForm {
        match r {
            0 => self.q0,
            1 => self.q1,
            2 => self.q2,
            _ => panic!("class number five rows have r <= 2"),
        }
    }

    pub fn series(&self, r: usize) -> &PrintedSeries {
        match r {
            1 => &self.f1,
            2 => &self.f2,
            _ => panic!("class number five rows have r in 1..=2"),
        }
    }
}

/// One correction to a printed table entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub table: u8,
    #[serde(rename = "D")]
    pub d: u64,
    pub column: String,
    pub printed: String,
    pub corrected: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tables {
    pub table1: Vec<PairRow>,
    pub table2: Vec<ClassOneRow>,
    pub table3: Vec<ClassThreeRow>,
    pub table4: Vec<ClassThreeRow>,
    pub table5: Vec<ClassFiveRow>,
}

#[derive(Deserialize)]
struct RawPair {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "Qs")]
    qs: QuadForm,
    #[serde(rename = "Qr")]
    qr: QuadForm,
}

#[derive(Deserialize)]
struct RawClassOne {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "Q0")]
    q0: QuadForm,
    w: u32,
}

#[derive(Deserialize)]
struct RawClassThree {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "Q0")]
    q0: QuadForm,
    #[serde(rename = "Q1")]
    q1: QuadForm,
    order: usize,
    #[serde(rename = "F1")]
    f1: String,
}

#[derive(Deserialize)]
struct RawClassFive {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "Q0")]
    q0: QuadForm,
    #[serde(rename = "Q1")]
    q1: QuadForm,
    #[serde(rename = "Q2")]
    q2: QuadForm,
    order1: usize,
    #[serde(rename = "F1")]
    f1: String,
    order2: usize,
    #[serde(rename = "F2")]
    f2: String,
}

fn read_rows<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Fixture(format!("{name}: {e}")))
}

fn class_three(name: &str, text: &str) -> Result<Vec<ClassThreeRow>> {
    read_rows::<RawClassThree>(name, text)?
        .into_iter()
        .map(|r| {
            Ok(ClassThreeRow {
                d: r.d,
                q0: r.q0,
                q1: r.q1,
                f1: PrintedSeries::parse(&r.f1, r.order)?,
            })
        })
        .collect()
}

impl Tables {
    fn parse(texts: [&str; 5]) -> Result<Self> {
        let table1 = read_rows::<RawPair>("table1", texts[0])?
            .into_iter()
            .map(|r| PairRow {
                d: r.d,
                qs: r.qs,
                qr: r.qr,
            })
            .collect();
        let table2 = read_rows::<RawClassOne>("table2", texts[1])?
            .into_iter()
            .map(|r| ClassOneRow {
                d: r.d,
                q0: r.q0,
                w: r.w,
            })
            .collect();
        let table5 = read_rows::<RawClassFive>("table5", texts[4])?
            .into_iter()
            .map(|r| {
                Ok(ClassFiveRow {
                    d: r.d,
                    q0: r.q0,
                    q1: r.q1,
                    q2: r.q2,
                    f1: PrintedSeries::parse(&r.f1, r.order1)?,
                    f2: PrintedSeries::parse(&r.f2, r.order2)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Tables {
            table1,
            table2,
            table3: class_three("table3", texts[2])?,
            table4: class_three("table4", texts[3])?,
            table5,
        })
    }

    /// The tables exactly as printed.
    pub fn embedded() -> Self {
        Self::parse([TABLE1, TABLE2, TABLE3, TABLE4, TABLE5]).expect("embedded fixtures parse")
    }

    /// Read `table1.csv` .. `table5.csv` from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut texts = Vec::with_capacity(5);
        for i in 1..=5 {
            let path = dir.join(format!("table{i}.csv"));
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
            texts.push(text);
        }
        Self::parse([&texts[0], &texts[1], &texts[2], &texts[3], &texts[4]])
    }

    /// Every discriminant in the class number one, three and five tables.
    pub fn discriminants(&self) -> Vec<u64> {
        let mut ds: Vec<u64> = self.table2.iter().map(|r| r.d).collect();
        ds.extend(self.table3.iter().map(|r| r.d));
        ds.extend(self.table4.iter().map(|r| r.d));
        ds.extend(self.table5.iter().map(|r| r.d));
        ds
    }

    /// Replace the entries named by `errata`. The printed value must match
    /// what is currently stored, so an erratum cannot silently apply twice or
    /// to the wrong row.
    pub fn apply_errata(&mut self, errata: &[Erratum]) -> Result<()> {
        for e in errata {
            let stale = |found: String| {
                Error::Fixture(format!(
                    "erratum for table {} D={} {}: expected {:?}, found {found:?}",
                    e.table, e.d, e.column, e.printed
                ))
            };
            let missing = || {
                Error::Fixture(format!(
                    "erratum names unknown entry table {} D={} {}",
                    e.table, e.d, e.column
                ))
            };
            match (e.table, e.column.as_str()) {
                (3 | 4, "F1") => {
                    let rows = if e.table == 3 {
                        &mut self.table3
                    } else {
                        &mut self.table4
                    };
                    let row = rows.iter_mut().find(|r| r.d == e.d).ok_or_else(missing)?;
                    replace_series(&mut row.f1, e, stale)?;
                }
                (5, col @ ("F1" | "F2" | "Q1" | "Q2")) => {
                    let row = self
                        .table5
                        .iter_mut()
                        .find(|r| r.d == e.d)
                        .ok_or_else(missing)?;
                    match col {
                        "F1" => replace_series(&mut row.f1, e, stale)?,
                        "F2" => replace_series(&mut row.f2, e, stale)?,
                        _ => {
                            let slot = if col == "Q1" {
                                &mut row.q1
                            } else {
                                &mut row.q2
                            };
                            if slot.to_string() != e.printed {
                                return Err(stale(slot.to_string()));
                            }
                            *slot = e.corrected.parse()?;
                        }
                    }
                }
                _ => return Err(missing()),
            }
        }
        Ok(())
    }
}

fn replace_series(
    slot: &mut PrintedSeries,
    e: &Erratum,
    stale: impl Fn(String) -> Error,
) -> Result<()> {
    if slot.to_string() != e.printed {
        return Err(stale(slot.to_string()));
    }
    *slot = PrintedSeries::parse(&e.corrected, slot.big_o)?;
    Ok(())
}

/// Corrections to the printed tables, each confirmed by lattice counts.
pub fn embedded_errata() -> Vec<Erratum> {
    read_rows("errata", ERRATA).expect("embedded errata parse")
}

/// Errata from `dir/errata.csv`, or none if the file is absent.
pub fn load_errata(dir: &Path) -> Result<Vec<Erratum>> {
    let path = dir.join("errata.csv");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
    read_rows("errata", &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_series() {
        let s = PrintedSeries::parse("q-q^2-q^3+q^6+2q^17", 20).unwrap();
        assert_eq!(s.coeffs[1], 1);
        assert_eq!(s.coeffs[2], -1);
        assert_eq!(s.coeffs[17], 2);
        assert_eq!(s.coeffs.iter().filter(|&&a| a != 0).count(), 5);
        assert_eq!(s.to_string(), "q-q^2-q^3+q^6+2q^17");
        assert_eq!(
            PrintedSeries::parse("q - 2 q^3", 4).unwrap().coeffs,
            vec![0, 1, 0, -2]
        );
        assert!(PrintedSeries::parse("q+q^5", 5).is_err());
        assert!(PrintedSeries::parse("q+q^x", 9).is_err());
        assert!(PrintedSeries::parse("q++q^2", 9).is_err());
    }

    #[test]
    fn embedded_tables_shape() {
        let t = Tables::embedded();
        assert_eq!(t.table1.len(), 5);
        assert_eq!(t.table2.len(), 9);
        assert_eq!(t.table3.len(), 13);
        assert_eq!(t.table4.len(), 3);
        assert_eq!(t.table5.len(), 25);
        assert_eq!(t.discriminants().len(), 50);
        let r23 = &t.table3[0];
        assert_eq!(r23.d, 23);
        assert_eq!(r23.q1, QuadForm::new(2, 1, 3));
        assert_eq!(r23.f1.big_o, 26);
        assert_eq!(r23.f1.coeffs[25], 1);
        assert_eq!(t.table2.last().unwrap().q0, QuadForm::new(1, 1, 41));
    }

    #[test]
    fn diff_reports_positions() {
        let printed = PrintedSeries::parse("q-q^2", 4).unwrap();
        let computed = IntSeries::from_i64(&[0, 1, -1, 1]);
        assert_eq!(printed.diff(&computed), vec![(3, 0, 1)]);
        assert!(!printed.matches(&computed));
    }

    #[test]
    fn errata_apply_once() {
        let mut t = Tables::embedded();
        let errata = embedded_errata();
        assert!(!errata.is_empty());
        t.apply_errata(&errata).unwrap();
        assert!(t.apply_errata(&errata).is_err());
    }

    #[test]
    fn load_dir_matches_embedded() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        assert_eq!(Tables::load_dir(&dir).unwrap(), Tables::embedded());
        assert_eq!(load_errata(&dir).unwrap(), embedded_errata());
        assert!(Tables::load_dir(Path::new("/nonexistent")).is_err());
    }
}
