//! Monte Carlo rejection-rate estimation over factorial design grids.
//!
//! Every replicate of every cell reads its own derived random stream, so
//! results depend only on `(grid, tests, reps, alpha, seed)` and never on
//! the number of workers or on scheduling order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simgen::{gen_cell, DesignCell, PairMode, SeedSpec};
use crate::ttests::{
    oneway_anova, paired_t, partover_test, pooled_t, welch_t, Hypothesis, OverlappingSamples,
    TestOutcome,
};

/// The tests the harness knows how to run on a generated replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestKind {
    /// Paired t-test on the complete pairs.
    T1,
    /// Pooled independent t-test on the unpaired observations.
    T2,
    /// Welch test on the unpaired observations.
    T3,
    /// Overlapping-samples test, pooled variance.
    Tnew1,
    /// Overlapping-samples test, unpooled variance.
    Tnew2,
    /// One-way ANOVA over (unpaired 1, unpaired 2, paired values).
    #[serde(rename = "ANOVA")]
    Anova,
}

impl TestKind {
    pub const ALL: [TestKind; 6] = [
        TestKind::T1,
        TestKind::T2,
        TestKind::T3,
        TestKind::Tnew1,
        TestKind::Tnew2,
        TestKind::Anova,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TestKind::T1 => "T1",
            TestKind::T2 => "T2",
            TestKind::T3 => "T3",
            TestKind::Tnew1 => "Tnew1",
            TestKind::Tnew2 => "Tnew2",
            TestKind::Anova => "ANOVA",
        }
    }

    /// Whether the design can ever produce data this test accepts.
    ///
    /// ANOVA is only defined for identical-pairs designs, where the paired
    /// block is a single group of values, and only under a zero
    /// hypothesized difference.
    pub fn applicable(&self, d: &DesignCell) -> bool {
        let (n1, n2) = (d.n_a + d.n_c, d.n_b + d.n_c);
        match self {
            TestKind::T1 => d.n_c >= 2,
            TestKind::T2 | TestKind::T3 => d.n_a >= 2 && d.n_b >= 2,
            TestKind::Tnew1 | TestKind::Tnew2 => n1 >= 2 && n2 >= 2 && d.n_c != 1,
            TestKind::Anova => {
                let groups = [d.n_a, d.n_b, d.n_c].iter().filter(|&&n| n > 0).count();
                d.pair_mode == PairMode::IdenticalPairs
                    && d.hyp_diff == 0.0
                    && groups >= 2
                    && d.n_a + d.n_b + d.n_c > groups
            }
        }
    }

    pub fn run(&self, s: &OverlappingSamples, hyp_diff: f64) -> Result<TestOutcome> {
        let h = Hypothesis::new(hyp_diff);
        match self {
            TestKind::T1 => paired_t(s.pairs(), &h),
            TestKind::T2 => pooled_t(s.a(), s.b(), &h),
            TestKind::T3 => welch_t(s.a(), s.b(), &h),
            TestKind::Tnew1 => partover_test(s, &h, true),
            TestKind::Tnew2 => partover_test(s, &h, false),
            TestKind::Anova => {
                let paired: Vec<f64> = s.pairs().iter().map(|p| p.1).collect();
                let groups: Vec<&[f64]> = [s.a(), s.b(), paired.as_slice()]
                    .into_iter()
                    .filter(|g| !g.is_empty())
                    .collect();
                oneway_anova(&groups)
            }
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        TestKind::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown test '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Robust,
    NotRobust,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Robust => "robust",
            Verdict::NotRobust => "not_robust",
        }
    }
}

/// Bradley's liberal robustness interval `[α/2, 1.5α)`.
///
/// The upper end is open: a rate of exactly 1.5α is not robust.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BradleyCriterion {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BradleyCriterion {
    pub fn liberal(alpha: f64) -> Self {
        Self {
            alpha,
            lower: 0.5 * alpha,
            upper: 1.5 * alpha,
        }
    }

    pub fn classify(&self, rate: f64) -> Verdict {
        bradley_classify(rate, self)
    }

    /// Distance from `rate` to the nearest interval boundary.
    pub fn boundary_distance(&self, rate: f64) -> f64 {
        (rate - self.lower).abs().min((rate - self.upper).abs())
    }
}

/// Relative slack so that a rate printed as exactly 1.5α (or 0.5α) lands on
/// the boundary despite rounding in `1.5 * alpha`.
const BOUNDARY_REL: f64 = 1e-12;

pub fn bradley_classify(rate: f64, c: &BradleyCriterion) -> Verdict {
    let lower = c.lower * (1.0 - BOUNDARY_REL);
    let upper = c.upper * (1.0 - BOUNDARY_REL);
    if lower <= rate && rate < upper {
        Verdict::Robust
    } else {
        Verdict::NotRobust
    }
}

/// Rejection tally of one test in one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestStats {
    pub rejections: u64,
    pub failures: u64,
    /// `rejections / (reps − failures)`; `None` when every replicate failed.
    pub rate: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub verdict: Option<Verdict>,
}

impl TestStats {
    fn from_counts(rejections: u64, failures: u64, reps: u64, c: &BradleyCriterion) -> Self {
        let decided = reps - failures;
        let rate = (decided > 0).then(|| rejections as f64 / decided as f64);
        Self {
            rejections,
            failures,
            rate,
            mc_stderr: rate.map(|p| mc_stderr(p, decided)),
            verdict: rate.map(|p| c.classify(p)),
        }
    }
}

/// Binomial Monte Carlo standard error of a rate estimated from `n` trials.
pub fn mc_stderr(rate: f64, n: u64) -> f64 {
    (rate * (1.0 - rate) / n as f64).sqrt()
}

/// Estimated rejection rates of every applicable test for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub design: DesignCell,
    pub reps: u64,
    pub alpha: f64,
    pub tests: BTreeMap<TestKind, TestStats>,
    /// Requested tests that cannot apply to this design.
    pub skipped: Vec<TestKind>,
}

impl CellResult {
    pub fn rate(&self, test: TestKind) -> Option<f64> {
        self.tests.get(&test).and_then(|s| s.rate)
    }

    pub fn verdict(&self, test: TestKind) -> Option<Verdict> {
        self.tests.get(&test).and_then(|s| s.verdict)
    }
}

/// Monte Carlo settings shared by every cell of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub tests: Vec<TestKind>,
    pub reps: u64,
    pub alpha: f64,
    pub seed: u64,
}

impl MonteCarlo {
    pub fn new(tests: Vec<TestKind>, reps: u64, alpha: f64, seed: u64) -> Self {
        Self {
            tests,
            reps,
            alpha,
            seed,
        }
    }

    pub fn criterion(&self) -> BradleyCriterion {
        BradleyCriterion::liberal(self.alpha)
    }

    /// Runs one cell on the current rayon pool, as cell 0 of the seed.
    pub fn run_cell(&self, d: &DesignCell) -> Result<CellResult> {
        self.run_cell_indexed(d, 0)
    }

    /// Rejection rates under an alternative; identical machinery to
    /// [`MonteCarlo::run_cell`], so a zero effect reproduces the Type I
    /// error estimate bit for bit.
    pub fn estimate_power(&self, d: &DesignCell) -> Result<CellResult> {
        self.run_cell(d)
    }

    pub fn run_cell_indexed(&self, d: &DesignCell, cell_index: u64) -> Result<CellResult> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if self.reps == 0 {
            return Err(Error::NoReplicates);
        }
        d.validate()?;

        let mut tests: Vec<TestKind> = self.tests.clone();
        tests.sort();
        tests.dedup();
        let (active, skipped): (Vec<TestKind>, Vec<TestKind>) =
            tests.into_iter().partition(|t| t.applicable(d));
        if active.is_empty() {
            return Err(Error::NoApplicableTests);
        }

        // (rejections, failures) per active test
        let zero = || vec![(0_u64, 0_u64); active.len()];
        let counts = (0..self.reps)
            .into_par_iter()
            .try_fold(zero, |mut acc, rep| -> Result<_> {
                let data = gen_cell(d, SeedSpec::new(self.seed, cell_index, rep))?;
                for (slot, test) in acc.iter_mut().zip(&active) {
                    match test.run(&data, d.hyp_diff) {
                        Ok(out) if out.rejects(self.alpha) => slot.0 += 1,
                        Ok(_) => {}
                        Err(_) => slot.1 += 1,
                    }
                }
                Ok(acc)
            })
            .try_reduce(zero, |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    a.0 += b.0;
                    a.1 += b.1;
                }
                Ok(x)
            })?;

        let c = self.criterion();
        let tests = active
            .iter()
            .zip(counts)
            .map(|(&t, (rej, fail))| (t, TestStats::from_counts(rej, fail, self.reps, &c)))
            .collect();
        Ok(CellResult {
            design: d.clone(),
            reps: self.reps,
            alpha: self.alpha,
            tests,
            skipped,
        })
    }

    /// Runs every cell on a pool of `workers` threads. Per-cell failures are
    /// reported in place and do not stop the grid.
    pub fn run_grid(&self, grid: &[DesignCell], workers: usize) -> Vec<Result<CellResult>> {
        let run = || {
            grid.par_iter()
                .enumerate()
                .map(|(i, d)| self.run_cell_indexed(d, i as u64))
                .collect()
        };
        match rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    }
}
