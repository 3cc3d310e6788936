//! Two-sample mean comparisons for partially overlapping samples.
//!
//! Sample 1 is made of `n_a` unpaired observations plus the first member of
//! each of `n_c` pairs; sample 2 is made of `n_b` unpaired observations plus
//! the second member of each pair. Besides the two overlapping-samples
//! statistics this module carries the classical comparators (paired,
//! pooled, Welch) and a one-way ANOVA, all with a hypothesized difference
//! `μ1 − μ2 = x` on the numerator.
//!
//! [`partover_test`] is the public entry point and resolves degenerate input
//! (constant samples, missing blocks, a single pair, constant paired sides)
//! before falling through to the general statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{
    compensated_sum, f_sf, is_negligible_variance, pearson_r, refined_mean, t_two_sided_p, Moments,
};

/// Raw data for a partially overlapping two-sample comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlappingSamples {
    a: Vec<f64>,
    b: Vec<f64>,
    pairs: Vec<(f64, f64)>,
}

impl OverlappingSamples {
    pub fn new(a: Vec<f64>, b: Vec<f64>, pairs: Vec<(f64, f64)>) -> Result<Self> {
        if a.is_empty() && b.is_empty() && pairs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let finite = a.iter().chain(&b).all(|v| v.is_finite())
            && pairs.iter().all(|(x, y)| x.is_finite() && y.is_finite());
        if !finite {
            return Err(Error::NonFinite);
        }
        Ok(Self { a, b, pairs })
    }

    /// Sample-1-only observations.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Sample-2-only observations.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn n_a(&self) -> usize {
        self.a.len()
    }

    pub fn n_b(&self) -> usize {
        self.b.len()
    }

    pub fn n_c(&self) -> usize {
        self.pairs.len()
    }

    /// Every sample-1 observation: unpaired first, then paired.
    pub fn sample1(&self) -> Vec<f64> {
        self.a.iter().copied().chain(self.pairs.iter().map(|p| p.0)).collect()
    }

    /// Every sample-2 observation: unpaired first, then paired.
    pub fn sample2(&self) -> Vec<f64> {
        self.b.iter().copied().chain(self.pairs.iter().map(|p| p.1)).collect()
    }

    /// The same data with the paired block removed.
    pub fn without_pairs(&self) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), Vec::new())
    }

    /// Applies `f1` to every sample-1 value and `f2` to every sample-2 value.
    pub fn map(&self, f1: impl Fn(f64) -> f64, f2: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.a.iter().map(|&v| f1(v)).collect(),
            self.b.iter().map(|&v| f2(v)).collect(),
            self.pairs.iter().map(|&(x, y)| (f1(x), f2(y))).collect(),
        )
    }

    /// Exchanges the roles of the two samples.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            pairs: self.pairs.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }
}

/// Moments of the two full samples and the paired correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n_a: usize,
    pub n_b: usize,
    pub n_c: usize,
    pub n1: usize,
    pub n2: usize,
    pub mean1: f64,
    pub mean2: f64,
    pub var1: f64,
    pub var2: f64,
    pub r: f64,
    /// Set when `r` was forced to 0 (fewer than two pairs, or a constant paired side).
    pub r_substituted: bool,
    pub magnitude: f64,
}

impl SampleSummary {
    pub fn both_constant(&self) -> bool {
        is_negligible_variance(self.var1, self.magnitude)
            && is_negligible_variance(self.var2, self.magnitude)
    }
}

pub fn summarize(s: &OverlappingSamples) -> Result<SampleSummary> {
    let (n1, n2) = (s.n_a() + s.n_c(), s.n_b() + s.n_c());
    if n1 < 2 || n2 < 2 {
        return Err(Error::SampleTooSmall { n1, n2 });
    }
    let m1 = Moments::of(&s.sample1())?;
    let m2 = Moments::of(&s.sample2())?;

    let (r, r_substituted) = if s.n_c() < 2 {
        (0.0, true)
    } else {
        let xs: Vec<f64> = s.pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = s.pairs.iter().map(|p| p.1).collect();
        match pearson_r(&xs, &ys) {
            Ok(r) => (r, false),
            Err(Error::ZeroVarianceSide) => (0.0, true),
            Err(e) => return Err(e),
        }
    };

    Ok(SampleSummary {
        n_a: s.n_a(),
        n_b: s.n_b(),
        n_c: s.n_c(),
        n1,
        n2,
        mean1: m1.mean,
        mean2: m2.mean,
        var1: m1.variance()?,
        var2: m2.variance()?,
        r,
        r_substituted,
        magnitude: m1.magnitude.max(m2.magnitude),
    })
}

/// Alternative hypothesis. Only the two-sided form is supported.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    #[default]
    TwoSided,
}

/// Null hypothesis `μ1 − μ2 = mu_diff`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub mu_diff: f64,
    pub alternative: Alternative,
}

impl Hypothesis {
    pub fn new(mu_diff: f64) -> Self {
        Self {
            mu_diff,
            alternative: Alternative::TwoSided,
        }
    }
}

/// Degrees of freedom of a t or F reference distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Df {
    T(f64),
    F(f64, f64),
}

impl Df {
    /// The t degrees of freedom, or the denominator df of an F.
    pub fn value(&self) -> f64 {
        match *self {
            Df::T(v) => v,
            Df::F(_, d2) => d2,
        }
    }
}

/// Which rung of the degenerate-input ladder produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Standard,
    NoPairs,
    NoIndependent,
    RSubstitutedZero,
    BothSamplesConstant,
    PairDiscarded,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Standard => "Standard",
            Branch::NoPairs => "NoPairs",
            Branch::NoIndependent => "NoIndependent",
            Branch::RSubstitutedZero => "RSubstitutedZero",
            Branch::BothSamplesConstant => "BothSamplesConstant",
            Branch::PairDiscarded => "PairDiscarded",
        }
    }
}

/// Result of one test. `statistic` and `df` are absent only on the
/// [`Branch::BothSamplesConstant`] rung (and `statistic` when a zero
/// standard error meets a zero numerator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: Option<f64>,
    pub df: Option<Df>,
    pub p_value: f64,
    pub branch: Branch,
}

impl TestOutcome {
    fn t(statistic: f64, df: f64, branch: Branch) -> Result<Self> {
        Ok(Self {
            statistic: Some(statistic),
            df: Some(Df::T(df)),
            p_value: t_two_sided_p(statistic, df)?,
            branch,
        })
    }

    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Relative tolerance for deciding that a mean difference is exactly the
/// hypothesized one.
const ZERO_DIFF_REL: f64 = 1e-12;

fn shifted_difference(mean1: f64, mean2: f64, mu_diff: f64) -> (f64, bool) {
    let diff = (mean1 - mean2) - mu_diff;
    let scale = mean1.abs().max(mean2.abs()).max(mu_diff.abs());
    (diff, diff.abs() <= ZERO_DIFF_REL * scale)
}

/// Share of the unpaired observations in the total count,
/// `(n_a + n_b) / (n_a + n_b + 2 n_c)`; exactly 1 without pairs and exactly
/// 0 without unpaired observations.
fn unpaired_weight(n_a: usize, n_b: usize, n_c: usize) -> f64 {
    let m = (n_a + n_b) as f64;
    m / (m + 2.0 * n_c as f64)
}

/// Degrees of freedom of the pooled-variance overlapping statistic.
pub fn nu1(n_a: usize, n_b: usize, n_c: usize) -> f64 {
    let w = unpaired_weight(n_a, n_b, n_c);
    (n_c as f64 - 1.0) + (n_a + n_b + n_c) as f64 * w - w
}

/// Degrees of freedom of the unpooled overlapping statistic, interpolating
/// between the paired df `n_c − 1` and the Welch df `gamma`.
pub fn nu2(n_a: usize, n_b: usize, n_c: usize, gamma: f64) -> f64 {
    let w = unpaired_weight(n_a, n_b, n_c);
    gamma * w + (n_c as f64 - 1.0) * (1.0 - w)
}

/// Welch–Satterthwaite degrees of freedom.
pub fn welch_gamma(var1: f64, n1: usize, var2: f64, n2: usize) -> Result<f64> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::SampleTooSmall { n1, n2 });
    }
    if var1 < 0.0 || var2 < 0.0 || !var1.is_finite() || !var2.is_finite() {
        return Err(Error::NonFinite);
    }
    if var1 == 0.0 && var2 == 0.0 {
        return Err(Error::DegenerateVariances);
    }
    let q1 = var1 / n1 as f64;
    let q2 = var2 / n2 as f64;
    Ok((q1 + q2) * (q1 + q2) / (q1 * q1 / (n1 - 1) as f64 + q2 * q2 / (n2 - 1) as f64))
}

fn pooled_variance(n1: usize, var1: f64, n2: usize, var2: f64) -> f64 {
    ((n1 - 1) as f64 * var1 + (n2 - 1) as f64 * var2) / (n1 + n2 - 2) as f64
}

fn label(sum: &SampleSummary) -> Branch {
    if sum.n_c == 0 {
        Branch::NoPairs
    } else if sum.n_a + sum.n_b == 0 {
        Branch::NoIndependent
    } else if sum.r_substituted {
        Branch::RSubstitutedZero
    } else {
        Branch::Standard
    }
}

fn t_new1_from(sum: &SampleSummary, h: &Hypothesis, branch: Branch) -> Result<TestOutcome> {
    let (n1, n2, nc) = (sum.n1 as f64, sum.n2 as f64, sum.n_c as f64);
    let sp2 = pooled_variance(sum.n1, sum.var1, sum.n2, sum.var2);
    let base = 1.0 / n1 + 1.0 / n2;
    let factor = base - 2.0 * sum.r * nc / (n1 * n2);
    if is_negligible_variance(sp2, sum.magnitude) || factor <= 1e-12 * base {
        return Err(Error::ZeroStandardError);
    }
    let (diff, _) = shifted_difference(sum.mean1, sum.mean2, h.mu_diff);
    let statistic = diff / (sp2.sqrt() * factor.sqrt());
    TestOutcome::t(statistic, nu1(sum.n_a, sum.n_b, sum.n_c), branch)
}

fn t_new2_from(sum: &SampleSummary, h: &Hypothesis, branch: Branch) -> Result<TestOutcome> {
    let (n1, n2, nc) = (sum.n1 as f64, sum.n2 as f64, sum.n_c as f64);
    if sum.both_constant() {
        return Err(Error::ZeroStandardError);
    }
    let base = sum.var1 / n1 + sum.var2 / n2;
    let se2 = base - 2.0 * sum.r * sum.var1.sqrt() * sum.var2.sqrt() * nc / (n1 * n2);
    if se2 <= 1e-12 * base {
        return Err(Error::ZeroStandardError);
    }
    let gamma = welch_gamma(sum.var1, sum.n1, sum.var2, sum.n2)?;
    let (diff, _) = shifted_difference(sum.mean1, sum.mean2, h.mu_diff);
    TestOutcome::t(
        diff / se2.sqrt(),
        nu2(sum.n_a, sum.n_b, sum.n_c, gamma),
        branch,
    )
}

/// Pooled-variance partially overlapping samples statistic.
pub fn t_new1(s: &OverlappingSamples, h: &Hypothesis) -> Result<TestOutcome> {
    let sum = summarize(s)?;
    t_new1_from(&sum, h, label(&sum))
}

/// Unpooled (Welch-type) partially overlapping samples statistic.
pub fn t_new2(s: &OverlappingSamples, h: &Hypothesis) -> Result<TestOutcome> {
    let sum = summarize(s)?;
    t_new2_from(&sum, h, label(&sum))
}

/// Paired-samples t-test on the complete pairs only.
pub fn paired_t(pairs: &[(f64, f64)], h: &Hypothesis) -> Result<TestOutcome> {
    if pairs.len() < 2 {
        return Err(Error::TooFewPairs(pairs.len()));
    }
    let diffs: Vec<f64> = pairs.iter().map(|&(x, y)| x - y).collect();
    let m = Moments::of(&diffs)?;
    let var = m.variance()?;
    let magnitude = pairs
        .iter()
        .fold(0.0_f64, |acc, &(x, y)| acc.max(x.abs()).max(y.abs()));
    if is_negligible_variance(var, magnitude) {
        return Err(Error::ZeroVarianceDifferences);
    }
    let n = pairs.len() as f64;
    let statistic = (m.mean - h.mu_diff) / (var / n).sqrt();
    TestOutcome::t(statistic, n - 1.0, Branch::Standard)
}

fn two_sample_moments(a: &[f64], b: &[f64]) -> Result<(Moments, Moments, f64, f64)> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::SampleTooSmall {
            n1: a.len(),
            n2: b.len(),
        });
    }
    let ma = Moments::of(a)?;
    let mb = Moments::of(b)?;
    let (va, vb) = (ma.variance()?, mb.variance()?);
    Ok((ma, mb, va, vb))
}

/// Independent-samples t-test with pooled variance.
pub fn pooled_t(a: &[f64], b: &[f64], h: &Hypothesis) -> Result<TestOutcome> {
    let (ma, mb, va, vb) = two_sample_moments(a, b)?;
    let sp2 = pooled_variance(ma.n, va, mb.n, vb);
    if is_negligible_variance(sp2, ma.magnitude.max(mb.magnitude)) {
        return Err(Error::ZeroPooledVariance);
    }
    let (n1, n2) = (ma.n as f64, mb.n as f64);
    let factor = 1.0 / n1 + 1.0 / n2;
    let (diff, _) = shifted_difference(ma.mean, mb.mean, h.mu_diff);
    TestOutcome::t(
        diff / (sp2.sqrt() * factor.sqrt()),
        (ma.n + mb.n - 2) as f64,
        Branch::Standard,
    )
}

/// Welch's unequal-variance t-test.
pub fn welch_t(a: &[f64], b: &[f64], h: &Hypothesis) -> Result<TestOutcome> {
    let (ma, mb, va, vb) = two_sample_moments(a, b)?;
    let magnitude = ma.magnitude.max(mb.magnitude);
    if is_negligible_variance(va, magnitude) && is_negligible_variance(vb, magnitude) {
        return Err(Error::DegenerateVariances);
    }
    let se2 = va / ma.n as f64 + vb / mb.n as f64;
    let gamma = welch_gamma(va, ma.n, vb, mb.n)?;
    let (diff, _) = shifted_difference(ma.mean, mb.mean, h.mu_diff);
    TestOutcome::t(diff / se2.sqrt(), gamma, Branch::Standard)
}

/// One-way ANOVA F test across `groups`.
pub fn oneway_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<TestOutcome> {
    let k = groups.len();
    if k < 2 {
        return Err(Error::TooFewGroups);
    }
    let mut stats = Vec::with_capacity(k);
    for g in groups {
        let g = g.as_ref();
        let m = Moments::of(g)?;
        stats.push((g, m));
    }
    let total: usize = stats.iter().map(|(_, m)| m.n).sum();
    if total <= k {
        return Err(Error::VarianceUndefined);
    }
    let all: Vec<f64> = stats.iter().flat_map(|(g, _)| g.iter().copied()).collect();
    let grand = refined_mean(&all);
    let ss_between =
        compensated_sum(stats.iter().map(|(_, m)| m.n as f64 * (m.mean - grand).powi(2)));
    let ss_within = compensated_sum(
        stats
            .iter()
            .flat_map(|(g, m)| g.iter().map(move |&x| (x - m.mean) * (x - m.mean))),
    );
    let (df1, df2) = ((k - 1) as f64, (total - k) as f64);
    let ms_within = ss_within / df2;
    let magnitude = stats.iter().fold(0.0_f64, |acc, (_, m)| acc.max(m.magnitude));
    if is_negligible_variance(ms_within, magnitude) {
        return Err(Error::ZeroWithinVariance);
    }
    let f = (ss_between / df1) / ms_within;
    Ok(TestOutcome {
        statistic: Some(f),
        df: Some(Df::F(df1, df2)),
        p_value: f_sf(f, df1, df2)?,
        branch: Branch::Standard,
    })
}

/// What to do when exactly one pair is present.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SinglePairPolicy {
    /// Refuse with [`Error::SinglePair`].
    #[default]
    Reject,
    /// Drop the pair and compare the unpaired observations.
    Discard,
}

/// Configured overlapping-samples test.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartoverTest {
    /// Pooled-variance statistic when true, Welch-type otherwise.
    pub var_equal: bool,
    pub single_pair: SinglePairPolicy,
}

impl PartoverTest {
    pub fn new(var_equal: bool) -> Self {
        Self {
            var_equal,
            single_pair: SinglePairPolicy::Reject,
        }
    }

    pub fn discarding_single_pair(mut self) -> Self {
        self.single_pair = SinglePairPolicy::Discard;
        self
    }

    pub fn run(&self, s: &OverlappingSamples, h: &Hypothesis) -> Result<TestOutcome> {
        let (n1, n2) = (s.n_a() + s.n_c(), s.n_b() + s.n_c());
        if n1 < 2 || n2 < 2 {
            return Err(Error::SampleTooSmall { n1, n2 });
        }
        let m1 = Moments::of(&s.sample1())?;
        let m2 = Moments::of(&s.sample2())?;
        let magnitude = m1.magnitude.max(m2.magnitude);

        if is_negligible_variance(m1.variance()?, magnitude)
            && is_negligible_variance(m2.variance()?, magnitude)
        {
            let (_, zero) = shifted_difference(m1.mean, m2.mean, h.mu_diff);
            return Ok(TestOutcome {
                statistic: None,
                df: None,
                p_value: if zero { 1.0 } else { 0.0 },
                branch: Branch::BothSamplesConstant,
            });
        }

        if s.n_a() == 0 && s.n_b() == 0 {
            let mut out = paired_t(s.pairs(), h)?;
            out.branch = Branch::NoIndependent;
            return Ok(out);
        }

        match s.n_c() {
            0 => {
                let mut out = if self.var_equal {
                    pooled_t(s.a(), s.b(), h)?
                } else {
                    welch_t(s.a(), s.b(), h)?
                };
                out.branch = Branch::NoPairs;
                return Ok(out);
            }
            1 => {
                return match self.single_pair {
                    SinglePairPolicy::Reject => Err(Error::SinglePair),
                    SinglePairPolicy::Discard => {
                        let mut out = self.run(&s.without_pairs()?, h)?;
                        if out.branch == Branch::NoPairs {
                            out.branch = Branch::PairDiscarded;
                        }
                        Ok(out)
                    }
                };
            }
            _ => {}
        }

        let sum = summarize(s)?;
        let branch = if sum.r_substituted {
            Branch::RSubstitutedZero
        } else {
            Branch::Standard
        };
        let result = if self.var_equal {
            t_new1_from(&sum, h, branch)
        } else {
            t_new2_from(&sum, h, branch)
        };
        match result {
            Err(Error::ZeroStandardError) => {
                let (diff, zero) = shifted_difference(sum.mean1, sum.mean2, h.mu_diff);
                let df = if self.var_equal {
                    nu1(sum.n_a, sum.n_b, sum.n_c)
                } else {
                    nu2(
                        sum.n_a,
                        sum.n_b,
                        sum.n_c,
                        welch_gamma(sum.var1, sum.n1, sum.var2, sum.n2)?,
                    )
                };
                Ok(TestOutcome {
                    statistic: (!zero).then(|| f64::INFINITY.copysign(diff)),
                    df: Some(Df::T(df)),
                    p_value: if zero { 1.0 } else { 0.0 },
                    branch,
                })
            }
            other => other,
        }
    }
}

/// Partially overlapping samples t-test with the full degenerate-input ladder.
pub fn partover_test(
    s: &OverlappingSamples,
    h: &Hypothesis,
    var_equal: bool,
) -> Result<TestOutcome> {
    PartoverTest::new(var_equal).run(s, h)
}
