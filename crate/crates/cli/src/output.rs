//! Result tables for `overlap-t simulate`.
//!
//! One row per cell per requested test. Columns, in order:
//! `rho, n_a, n_b, n_c, var1, var2, var_a, var_b, var_c, mu_diff, test, reps,
//! failures, rate, mc_stderr, verdict, mu1, mu2`.
//!
//! Design fields a cell does not use are empty (`var1`/`var2` for identical
//! pairs, `var_a`/`var_b`/`var_c` for bivariate cells). `verdict` is one of
//! `robust`, `not_robust`, `undefined` (every replicate failed),
//! `not_applicable` or `error`. Numbers use the shortest representation that
//! parses back to the same `f64`.

use std::io::Write;

use overlap_core::{CellResult, DesignCell, PairMode, TestKind};

use crate::error::Result;

pub const COLUMNS: [&str; 18] = [
    "rho", "n_a", "n_b", "n_c", "var1", "var2", "var_a", "var_b", "var_c", "mu_diff", "test",
    "reps", "failures", "rate", "mc_stderr", "verdict", "mu1", "mu2",
];

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRow {
    pub design: DesignCell,
    pub test: TestKind,
    pub reps: Option<u64>,
    pub failures: Option<u64>,
    pub rate: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub verdict: &'static str,
}

pub fn rows(
    grid: &[DesignCell],
    results: &[overlap_core::Result<CellResult>],
    tests: &[TestKind],
) -> Vec<OutputRow> {
    let mut tests = tests.to_vec();
    tests.sort();
    tests.dedup();
    let mut out = Vec::with_capacity(grid.len() * tests.len());
    for (design, result) in grid.iter().zip(results) {
        for &test in &tests {
            let blank = |verdict| OutputRow {
                design: design.clone(),
                test,
                reps: None,
                failures: None,
                rate: None,
                mc_stderr: None,
                verdict,
            };
            let row = match result {
                Err(_) => blank("error"),
                Ok(cell) => match cell.tests.get(&test) {
                    None => blank("not_applicable"),
                    Some(s) => OutputRow {
                        design: design.clone(),
                        test,
                        reps: Some(cell.reps),
                        failures: Some(s.failures),
                        rate: s.rate,
                        mc_stderr: s.mc_stderr,
                        verdict: s.verdict.map_or("undefined", |v| v.name()),
                    },
                },
            };
            out.push(row);
        }
    }
    out
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl OutputRow {
    fn fields(&self, rate: impl Fn(f64) -> String) -> Vec<String> {
        let d = &self.design;
        let identical = d.pair_mode == PairMode::IdenticalPairs;
        let (var1, var2) = if identical {
            (None, None)
        } else {
            (Some(d.var1), Some(d.var2))
        };
        vec![
            num(d.rho),
            d.n_a.to_string(),
            d.n_b.to_string(),
            d.n_c.to_string(),
            opt(var1, num),
            opt(var2, num),
            opt(d.var_a, num),
            opt(d.var_b, num),
            opt(d.var_c, num),
            num(d.hyp_diff),
            self.test.name().to_string(),
            opt(self.reps, |v| v.to_string()),
            opt(self.failures, |v| v.to_string()),
            opt(self.rate, rate),
            opt(self.mc_stderr, num),
            self.verdict.to_string(),
            num(d.mu1),
            num(d.mu2),
        ]
    }
}

pub fn write_csv<W: Write>(w: W, rows: &[OutputRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(COLUMNS).map_err(csv_io)?;
    for row in rows {
        out.write_record(row.fields(num)).map_err(csv_io)?;
    }
    out.flush()?;
    Ok(())
}

/// Markdown table with rates to three decimals; robust rates are bold.
pub fn write_markdown<W: Write>(mut w: W, rows: &[OutputRow]) -> Result<()> {
    writeln!(w, "| {} |", COLUMNS.join(" | "))?;
    writeln!(w, "|{}", "---|".repeat(COLUMNS.len()))?;
    for row in rows {
        let robust = row.verdict == "robust";
        let fields = row.fields(|r| {
            if robust {
                format!("**{r:.3}**")
            } else {
                format!("{r:.3}")
            }
        });
        writeln!(w, "| {} |", fields.join(" | "))?;
    }
    Ok(())
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}
