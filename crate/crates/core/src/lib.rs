//! Partially overlapping samples t-tests and a Monte Carlo harness for
//! their Type I error robustness.
//!
//! The crate is organized bottom-up:
//!
//! * [`stats`]: moments, correlation, t and F distribution functions.
//! * [`ttests`]: the overlapping-samples statistics, the classical
//!   comparators and the degenerate-input ladder behind [`partover_test`].
//! * [`simgen`]: reproducible data generation for one design cell.
//! * [`harness`]: rejection-rate estimation, Bradley classification and
//!   parallel grid sweeps.

pub mod error;
pub mod harness;
pub mod simgen;
pub mod stats;
pub mod ttests;

pub use error::{Error, Result};
pub use harness::{
    bradley_classify, mc_stderr, BradleyCriterion, CellResult, MonteCarlo, TestKind, TestStats,
    Verdict,
};
pub use simgen::{derive_stream, gen_cell, gen_cell_by_deletion, DesignCell, PairMode, SeedSpec};
pub use stats::{f_cdf, f_sf, moments, pearson_r, t_cdf, t_two_sided_p, Moments};
pub use ttests::{
    nu1, nu2, oneway_anova, paired_t, partover_test, pooled_t, summarize, t_new1, t_new2, welch_gamma,
    welch_t, Alternative, Branch, Df, Hypothesis, OverlappingSamples, PartoverTest, SampleSummary,
    SinglePairPolicy, TestOutcome,
};
