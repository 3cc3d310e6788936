//! Reproduction of the published Type I error tables, with the printed
//! reference values for comparison.

use std::fmt::Write as _;

use overlap_core::{BradleyCriterion, CellResult, DesignCell, MonteCarlo, TestKind, Verdict};

use crate::error::Result;

/// Allowed gap between a rerun rate and the printed one.
pub const RATE_TOLERANCE: f64 = 0.015;
/// Verdicts are only compared when the printed rate is at least this far
/// from a Bradley boundary.
pub const VERDICT_GUARD: f64 = 0.01;
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Table {
    Table2,
    Table3,
    Table4,
}

impl Table {
    pub fn title(&self) -> &'static str {
        match self {
            Table::Table2 => "Type I error rates, extended design",
            Table::Table3 => "Type I error rates, n_a = 5, rho = 1 and paired d = 0",
            Table::Table4 => "Type I error rates, H0: mu1 - mu2 = 10, var2 = 1, n_c = 5",
        }
    }

    pub fn design_headers(&self) -> &'static [&'static str] {
        match self {
            Table::Table2 => &["ρ", "n_a", "n_b", "n_c", "σ1²", "σ2²"],
            Table::Table3 => &["n_b", "n_c", "σa²", "σb²", "σc²"],
            Table::Table4 => &["ρ", "n_a", "n_b", "σ1²"],
        }
    }

    pub fn columns(&self) -> &'static [Column] {
        match self {
            Table::Table2 => TABLE2_COLUMNS,
            Table::Table3 => TABLE3_COLUMNS,
            Table::Table4 => TABLE4_COLUMNS,
        }
    }

    /// Every test the rerun needs, including ones shown only in notes.
    pub fn tests(&self) -> Vec<TestKind> {
        let mut t: Vec<TestKind> = self.columns().iter().map(|c| c.test).collect();
        if *self == Table::Table3 {
            t.push(TestKind::T1);
        }
        t.sort();
        t.dedup();
        t
    }

    pub fn rows(&self) -> Vec<ReferenceRow> {
        match self {
            Table::Table2 => TABLE2
                .iter()
                .map(|&(rho, n_a, n_b, n_c, v1, v2, ref rates, bold)| ReferenceRow {
                    design: DesignCell::bivariate(n_a, n_b, n_c, v1, v2, rho),
                    labels: vec![num(rho), n_a.to_string(), n_b.to_string(), n_c.to_string(), num(v1), num(v2)],
                    printed: reference(rates, bold),
                })
                .collect(),
            Table::Table3 => TABLE3
                .iter()
                .map(|&(n_b, n_c, va, vb, vc, ref rates, bold)| ReferenceRow {
                    design: DesignCell::identical_pairs(5, n_b, n_c, va, vb, vc),
                    labels: vec![n_b.to_string(), n_c.to_string(), num(va), num(vb), num(vc)],
                    printed: reference(rates, bold),
                })
                .collect(),
            Table::Table4 => TABLE4
                .iter()
                .map(|&(rho, n_a, n_b, v1, ref rates, bold)| ReferenceRow {
                    design: table4_cell(rho, n_a, n_b, v1),
                    labels: vec![format!("{rho:.2}"), n_a.to_string(), n_b.to_string(), num(v1)],
                    printed: reference(rates, bold),
                })
                .collect(),
        }
    }
}

/// A printed column and the test rerun for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Column {
    pub header: &'static str,
    pub test: TestKind,
    /// Whether the column takes part in the pass/fail comparison.
    pub asserted: bool,
}

const fn col(header: &'static str, test: TestKind, asserted: bool) -> Column {
    Column { header, test, asserted }
}

const TABLE2_COLUMNS: &[Column] = &[
    col("T_new1", TestKind::Tnew1, true),
    col("T_new2", TestKind::Tnew2, true),
];

// The printed T_1/T_2 columns are rerun with the pairs discarded: pooled t
// for T_1 and Welch for T_2.
const TABLE3_COLUMNS: &[Column] = &[
    col("T_new1", TestKind::Tnew1, true),
    col("T_new2", TestKind::Tnew2, true),
    col("T_1 [pooled t, pairs discarded]", TestKind::T2, false),
    col("T_2 [Welch, pairs discarded]", TestKind::T3, false),
    col("ANOVA", TestKind::Anova, true),
];

const TABLE4_COLUMNS: &[Column] = &[
    col("T_1", TestKind::T1, true),
    col("T_2", TestKind::T2, true),
    col("T_3", TestKind::T3, true),
    col("T_new1", TestKind::Tnew1, true),
    col("T_new2", TestKind::Tnew2, true),
];

type Row2 = (f64, usize, usize, usize, f64, f64, [f64; 2], &'static str);
type Row3 = (usize, usize, f64, f64, f64, [f64; 5], &'static str);
type Row4 = (f64, usize, usize, f64, [f64; 5], &'static str);

// Bold masks: `b` printed in bold, `-` not.
#[rustfmt::skip]
const TABLE2: &[Row2] = &[
    (0.25, 0, 30, 5, 1.0, 1.0, [0.045, 0.053], "bb"),
    (0.75, 0, 5, 5, 1.0, 1.0, [0.041, 0.040], "bb"),
    (0.25, 0, 30, 5, 4.0, 1.0, [0.222, 0.053], "-b"),
    (0.75, 0, 5, 5, 4.0, 1.0, [0.124, 0.048], "-b"),
    (0.25, 0, 30, 5, 1.0, 4.0, [0.001, 0.051], "-b"),
    (0.75, 0, 5, 5, 1.0, 4.0, [0.032, 0.041], "bb"),
    (1.0, 5, 30, 5, 1.0, 1.0, [0.044, 0.047], "bb"),
    (1.0, 30, 5, 5, 1.0, 1.0, [0.042, 0.047], "bb"),
    (1.0, 5, 30, 5, 4.0, 1.0, [0.050, 0.055], "bb"),
    (1.0, 30, 5, 5, 4.0, 1.0, [0.044, 0.050], "bb"),
    (1.0, 5, 30, 5, 1.0, 4.0, [0.003, 0.042], "-b"),
    (1.0, 30, 5, 5, 1.0, 4.0, [0.185, 0.050], "-b"),
    (1.0, 0, 30, 5, 1.0, 1.0, [0.039, 0.058], "bb"),
    (1.0, 0, 5, 5, 1.0, 1.0, [0.019, 0.044], "-b"),
    (1.0, 0, 30, 5, 4.0, 1.0, [0.037, 0.066], "bb"),
    (1.0, 0, 5, 5, 4.0, 1.0, [0.019, 0.043], "-b"),
    (1.0, 0, 30, 5, 1.0, 4.0, [0.264, 0.061], "-b"),
    (1.0, 0, 5, 5, 1.0, 4.0, [0.180, 0.064], "-b"),
];

#[rustfmt::skip]
const TABLE3: &[Row3] = &[
    (5, 5, 1.0, 1.0, 1.0, [0.035, 0.031, 0.048, 0.043, 0.049], "bbbbb"),
    (30, 5, 1.0, 1.0, 1.0, [0.047, 0.048, 0.051, 0.056, 0.053], "bbbbb"),
    (5, 30, 1.0, 1.0, 1.0, [0.048, 0.046, 0.054, 0.047, 0.050], "bbbbb"),
    (5, 5, 1.0, 4.0, 1.0, [0.075, 0.058, 0.059, 0.051, 0.070], "-bbbb"),
    (5, 5, 1.0, 1.0, 4.0, [0.004, 0.003, 0.052, 0.045, 0.042], "--bbb"),
    (5, 5, 1.0, 4.0, 4.0, [0.021, 0.015, 0.055, 0.046, 0.057], "--bbb"),
    (30, 5, 1.0, 4.0, 1.0, [0.009, 0.063, 0.004, 0.049, 0.092], "-b-b-"),
    (5, 30, 1.0, 4.0, 1.0, [0.000, 0.000, 0.054, 0.049, 0.071], "--bbb"),
];

#[rustfmt::skip]
const TABLE4: &[Row4] = &[
    (-0.75, 5, 10, 1.0, [0.051, 0.050, 0.051, 0.051, 0.051], "bbbbb"),
    (-0.50, 10, 30, 4.0, [0.051, 0.160, 0.053, 0.129, 0.048], "b-b-b"),
    (-0.25, 30, 5, 1.0, [0.048, 0.052, 0.059, 0.051, 0.052], "bbbbb"),
    (0.00, 5, 5, 4.0, [0.050, 0.061, 0.052, 0.055, 0.046], "bbbbb"),
    (0.25, 10, 5, 1.0, [0.049, 0.055, 0.054, 0.047, 0.046], "bbbbb"),
    (0.50, 30, 10, 4.0, [0.052, 0.009, 0.047, 0.013, 0.048], "b-b-b"),
    (0.75, 5, 30, 1.0, [0.051, 0.047, 0.054, 0.042, 0.043], "bbbbb"),
];

/// Printed "Overall" row of the H0: μ1 − μ2 = 10 table.
pub const TABLE4_OVERALL: ([f64; 5], &str) = ([0.050, 0.101, 0.051, 0.079, 0.049], "b-b-b");

pub const TABLE1_SIZES: [usize; 6] = [5, 10, 30, 50, 100, 500];
pub const TABLE1_VARIANCES: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
pub const TABLE1_RHO: [f64; 7] = [-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75];

fn table4_cell(rho: f64, n_a: usize, n_b: usize, var1: f64) -> DesignCell {
    DesignCell::bivariate(n_a, n_b, 5, var1, 1.0, rho).with_hyp_diff(10.0)
}

/// The grid behind the "Overall" row: every Table 1 combination with
/// σ2² = 1 and n_c = 5, tested against μ1 − μ2 = 10.
pub fn table4_overall_grid() -> Vec<DesignCell> {
    let mut grid = Vec::new();
    for &rho in &TABLE1_RHO {
        for &n_a in &TABLE1_SIZES {
            for &n_b in &TABLE1_SIZES {
                for &v1 in &TABLE1_VARIANCES {
                    grid.push(table4_cell(rho, n_a, n_b, v1));
                }
            }
        }
    }
    grid
}

fn reference(rates: &[f64], bold: &str) -> Vec<(f64, bool)> {
    rates.iter().zip(bold.chars()).map(|(&r, b)| (r, b == 'b')).collect()
}

fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone)]
pub struct ReferenceRow {
    pub design: DesignCell,
    pub labels: Vec<String>,
    /// Printed (rate, bold) per column.
    pub printed: Vec<(f64, bool)>,
}

/// One rerun cell set against its printed value.
#[derive(Debug, Clone, PartialEq)]
pub struct CellComparison {
    pub row: usize,
    pub column: Column,
    pub printed: f64,
    pub printed_bold: bool,
    pub rerun: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub verdict: Option<Verdict>,
}

impl CellComparison {
    pub fn diff(&self) -> Option<f64> {
        self.rerun.map(|r| r - self.printed)
    }

    pub fn within_tolerance(&self) -> bool {
        self.diff().is_some_and(|d| d.abs() <= RATE_TOLERANCE + 1e-12)
    }

    /// Whether the printed rate is far enough from a boundary for the
    /// verdict to be compared.
    pub fn verdict_checked(&self) -> bool {
        BradleyCriterion::liberal(ALPHA).boundary_distance(self.printed) >= VERDICT_GUARD - 1e-12
    }

    pub fn verdict_matches(&self) -> bool {
        self.verdict.map(|v| v == Verdict::Robust) == Some(self.printed_bold)
    }

    pub fn passes(&self) -> bool {
        self.within_tolerance() && (!self.verdict_checked() || self.verdict_matches())
    }
}

#[derive(Debug, Clone)]
pub struct Overall {
    pub cells: usize,
    pub reps: u64,
    /// Mean rate per column across cells with a defined rate.
    pub rates: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub table: Table,
    pub reps: u64,
    pub seed: u64,
    pub rows: Vec<ReferenceRow>,
    pub results: Vec<overlap_core::Result<CellResult>>,
    pub overall: Option<Overall>,
}

/// Reruns a table. `overall_reps` sizes the Overall row of table 4 and is
/// ignored for the other tables; `None` skips it.
pub fn reproduce(
    table: Table,
    reps: u64,
    seed: u64,
    workers: usize,
    overall_reps: Option<u64>,
) -> Result<Reproduction> {
    let rows = table.rows();
    let grid: Vec<DesignCell> = rows.iter().map(|r| r.design.clone()).collect();
    let mc = MonteCarlo::new(table.tests(), reps, ALPHA, seed);
    let results = mc.run_grid(&grid, workers);

    let overall = match (table, overall_reps) {
        (Table::Table4, Some(n)) => {
            let grid = table4_overall_grid();
            let mc = MonteCarlo::new(table.tests(), n, ALPHA, seed);
            let cells = mc.run_grid(&grid, workers).into_iter().collect::<overlap_core::Result<Vec<_>>>()?;
            let rates = table
                .columns()
                .iter()
                .map(|c| {
                    let defined: Vec<f64> = cells.iter().filter_map(|r| r.rate(c.test)).collect();
                    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
                })
                .collect();
            Some(Overall {
                cells: grid.len(),
                reps: n,
                rates,
            })
        }
        _ => None,
    };

    Ok(Reproduction {
        table,
        reps,
        seed,
        rows,
        results,
        overall,
    })
}

impl Reproduction {
    pub fn comparisons(&self) -> Vec<CellComparison> {
        let mut out = Vec::new();
        for (i, (row, result)) in self.rows.iter().zip(&self.results).enumerate() {
            for (column, &(printed, printed_bold)) in self.table.columns().iter().zip(&row.printed) {
                let stats = result.as_ref().ok().and_then(|c| c.tests.get(&column.test));
                out.push(CellComparison {
                    row: i + 1,
                    column: *column,
                    printed,
                    printed_bold,
                    rerun: stats.and_then(|s| s.rate),
                    mc_stderr: stats.and_then(|s| s.mc_stderr),
                    verdict: stats.and_then(|s| s.verdict),
                });
            }
        }
        out
    }

    /// The table in the published layout; bold rates are Bradley-robust.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (reps = {}, seed = {})\n", self.table.title(), self.reps, self.seed);
        let columns = self.table.columns();
        let headers: Vec<&str> = self
            .table
            .design_headers()
            .iter()
            .copied()
            .chain(columns.iter().map(|c| c.header))
            .collect();
        let _ = writeln!(s, "| {} |", headers.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(headers.len()));
        for (row, result) in self.rows.iter().zip(&self.results) {
            let mut fields = row.labels.clone();
            for c in columns {
                fields.push(match result {
                    Ok(cell) => bold_rate(cell.rate(c.test), cell.verdict(c.test)),
                    Err(e) => format!("error: {e}"),
                });
            }
            let _ = writeln!(s, "| {} |", fields.join(" | "));
        }
        if let Some(o) = &self.overall {
            let c = BradleyCriterion::liberal(ALPHA);
            let mut fields = vec!["Overall".to_string()];
            fields.extend(std::iter::repeat_n(String::new(), self.table.design_headers().len() - 1));
            fields.extend(o.rates.iter().map(|r| bold_rate(*r, r.map(|r| c.classify(r)))));
            let _ = writeln!(s, "| {} |", fields.join(" | "));
            let _ = writeln!(
                s,
                "\nOverall: mean rate over the {} cells with var2 = 1, n_c = 5 and every other axis \
                 at its Table 1 values (reps = {} per cell); reported without a tolerance.",
                o.cells, o.reps
            );
        }
        if self.table == Table::Table3 {
            s.push_str(&self.literal_note());
        }
        s
    }

    fn literal_note(&self) -> String {
        let mut s = String::from(
            "\nT_1 and T_2 are rerun with the pairs discarded. Read literally, T_1 is the paired \
             t-test, which identical pairs leave undefined, and T_2 is the pooled t above:\n",
        );
        for (i, result) in self.results.iter().enumerate() {
            if let Ok(cell) = result {
                if let Some(t1) = cell.tests.get(&TestKind::T1) {
                    let shown = t1.rate.map_or("undefined".to_string(), |r| format!("{r:.3}"));
                    let _ = writeln!(
                        s,
                        "  row {}: paired T_1 {} ({} of {} replicates failed)",
                        i + 1,
                        shown,
                        t1.failures,
                        cell.reps
                    );
                }
            }
        }
        s
    }

    /// Long-format diff against the printed values.
    pub fn render_comparison(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "\nComparison with the printed values (tolerance ±{RATE_TOLERANCE}; verdicts compared \
             when the printed rate is at least {VERDICT_GUARD} from a Bradley boundary)\n"
        );
        let _ = writeln!(s, "| row | column | rerun | printed | diff | rate | verdict |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        let mut failed = 0;
        let mut checked = 0;
        for c in self.comparisons() {
            let rate = if c.within_tolerance() { "ok" } else { "MISS" };
            let verdict = match (c.verdict_checked(), c.verdict_matches()) {
                (false, _) => "near boundary",
                (true, true) => "ok",
                (true, false) => "MISS",
            };
            let status = if c.column.asserted {
                checked += 1;
                if !c.passes() {
                    failed += 1;
                }
                ""
            } else {
                " (documented only)"
            };
            let _ = writeln!(
                s,
                "| {} | {}{} | {} | {} | {} | {} | {} |",
                c.row,
                c.column.header,
                status,
                bold_rate(c.rerun, c.verdict),
                if c.printed_bold { format!("**{:.3}**", c.printed) } else { format!("{:.3}", c.printed) },
                c.diff().map_or("-".into(), |d| format!("{d:+.3}")),
                rate,
                verdict
            );
        }
        if let Some(o) = &self.overall {
            for ((c, r), (&printed, _)) in self
                .table
                .columns()
                .iter()
                .zip(&o.rates)
                .zip(TABLE4_OVERALL.0.iter().zip(TABLE4_OVERALL.1.chars()))
            {
                let _ = writeln!(
                    s,
                    "| Overall | {} (not asserted) | {} | {printed:.3} | {} | - | - |",
                    c.header,
                    r.map_or("-".into(), |r| format!("{r:.3}")),
                    r.map_or("-".into(), |r| format!("{:+.3}", r - printed))
                );
            }
        }
        let _ = writeln!(s, "\n{} of {checked} asserted cells within tolerance", checked - failed);
        s
    }
}

fn bold_rate(rate: Option<f64>, verdict: Option<Verdict>) -> String {
    match (rate, verdict) {
        (Some(r), Some(Verdict::Robust)) => format!("**{r:.3}**"),
        (Some(r), _) => format!("{r:.3}"),
        (None, _) => "undefined".into(),
    }
}
