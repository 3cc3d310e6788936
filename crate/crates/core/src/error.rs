use thiserror::Error;

/// Errors raised by the statistical kernel, the tests, the generator and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    #[error("variance is undefined for a single observation")]
    VarianceUndefined,

    #[error("input contains a non-finite value")]
    NonFinite,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("at least two pairs are required, got {0}")]
    TooFewPairs(usize),

    #[error("one side of the pairs has zero variance")]
    ZeroVarianceSide,

    #[error("invalid degrees of freedom: {0}")]
    InvalidDf(f64),

    #[error("each full sample needs at least two observations (n1 = {n1}, n2 = {n2})")]
    SampleTooSmall { n1: usize, n2: usize },

    #[error("standard error of the mean difference is zero")]
    ZeroStandardError,

    #[error("both variances are zero")]
    DegenerateVariances,

    #[error("the paired differences have zero variance; the paired t-test cannot be performed")]
    ZeroVarianceDifferences,

    #[error("pooled variance is zero")]
    ZeroPooledVariance,

    #[error("within-group variance is zero")]
    ZeroWithinVariance,

    #[error("at least two non-empty groups are required")]
    TooFewGroups,

    #[error(
        "only one paired observation: a correlation needs at least two pairs; \
         discard the pair and rerun as an independent-samples comparison"
    )]
    SinglePair,

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("no requested test is applicable to this design")]
    NoApplicableTests,

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("replicate count must be at least 1")]
    NoReplicates,
}

impl Error {
    /// True for errors that come from degenerate statistical input rather
    /// than from misuse of the API.
    pub fn is_degenerate_input(&self) -> bool {
        matches!(
            self,
            Error::VarianceUndefined
                | Error::TooFewPairs(_)
                | Error::ZeroVarianceSide
                | Error::SampleTooSmall { .. }
                | Error::ZeroStandardError
                | Error::DegenerateVariances
                | Error::ZeroVarianceDifferences
                | Error::ZeroPooledVariance
                | Error::ZeroWithinVariance
                | Error::TooFewGroups
                | Error::SinglePair
                | Error::EmptyInput
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
