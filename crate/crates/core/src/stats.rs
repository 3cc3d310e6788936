//! Numerical kernel: sample moments, Pearson correlation, and the Student t
//! and F distribution functions used to turn statistics into p-values.
//!
//! The distribution functions go through the regularized incomplete beta
//! function, evaluated with a Lentz continued fraction on whichever side of
//! the symmetry point converges fastest. Degrees of freedom may be any
//! positive real.

use crate::error::{Error, Result};

/// Variances at or below `ZERO_VARIANCE_REL * magnitude²` count as zero,
/// where `magnitude` is the largest absolute observation involved.
pub const ZERO_VARIANCE_REL: f64 = 1e-12;

/// Correlations within this distance of ±1 are reported as exactly ±1.
pub const UNIT_CORRELATION_SNAP: f64 = 1e-12;

/// Returns true when `var` is indistinguishable from zero for data whose
/// largest absolute value is `magnitude`.
pub fn is_negligible_variance(var: f64, magnitude: f64) -> bool {
    var <= ZERO_VARIANCE_REL * magnitude * magnitude
}

/// Neumaier compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean with one refinement pass; exact for constant input.
pub(crate) fn refined_mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let rough = compensated_sum(values.iter().copied()) / n;
    rough + compensated_sum(values.iter().map(|&v| v - rough)) / n
}

/// Count, mean and sample variance (divisor n − 1) of a set of observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// `None` when `n < 2`.
    pub var: Option<f64>,
    /// Largest absolute observation, used for zero-variance decisions.
    pub magnitude: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = values.len();
        let mean = refined_mean(values);
        let var = (n >= 2).then(|| {
            // corrected two-pass: the second term removes the residual bias
            // left by rounding in the mean
            let sum_dev = compensated_sum(values.iter().map(|&v| v - mean));
            let sum_sq = compensated_sum(values.iter().map(|&v| (v - mean) * (v - mean)));
            ((sum_sq - sum_dev * sum_dev / n as f64) / (n - 1) as f64).max(0.0)
        });
        let magnitude = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(Moments {
            n,
            mean,
            var,
            magnitude,
        })
    }

    pub fn variance(&self) -> Result<f64> {
        self.var.ok_or(Error::VarianceUndefined)
    }

    /// True when the variance exists and is negligible relative to the data.
    pub fn is_constant(&self) -> bool {
        self.var
            .map(|v| is_negligible_variance(v, self.magnitude))
            .unwrap_or(false)
    }
}

/// Convenience wrapper around [`Moments::of`].
pub fn moments(values: &[f64]) -> Result<Moments> {
    Moments::of(values)
}

/// Pearson product-moment correlation of two equally long series.
///
/// Fails with [`Error::ZeroVarianceSide`] when either series is constant; the
/// overlapping-samples tests catch that and continue with `r = 0`.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPairs(xs.len()));
    }
    let mx = Moments::of(xs)?;
    let my = Moments::of(ys)?;
    if mx.is_constant() || my.is_constant() {
        return Err(Error::ZeroVarianceSide);
    }
    let sxx = compensated_sum(xs.iter().map(|&x| (x - mx.mean) * (x - mx.mean)));
    let syy = compensated_sum(ys.iter().map(|&y| (y - my.mean) * (y - my.mean)));
    let sxy = compensated_sum(
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| (x - mx.mean) * (y - my.mean)),
    );
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(if 1.0 - r.abs() <= UNIT_CORRELATION_SNAP {
        r.signum()
    } else {
        r
    })
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    const MAX_ITER: usize = 20_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`, with the complement `y = 1 − x`
/// supplied separately so callers can pass it without cancellation.
fn beta_inc_split(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        (front * beta_continued_fraction(a, b, x) / a).clamp(0.0, 1.0)
    } else {
        (1.0 - front * beta_continued_fraction(b, a, y) / b).clamp(0.0, 1.0)
    }
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`, `x ∈ [0, 1]`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    beta_inc_split(a, b, x, 1.0 - x)
}

fn check_df(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDf(nu))
    }
}

/// `(ν/(ν+t²), t²/(ν+t²))` without overflow for large |t|.
fn t_beta_args(t: f64, nu: f64) -> (f64, f64) {
    let t2 = t * t;
    if t2 > nu {
        let q = nu / t2;
        (q / (1.0 + q), 1.0 / (1.0 + q))
    } else {
        (nu / (nu + t2), t2 / (nu + t2))
    }
}

/// `P(|T| ≥ |t|)` for Student's t with `nu` degrees of freedom.
pub fn t_two_sided_p(t: f64, nu: f64) -> Result<f64> {
    check_df(nu)?;
    if t.is_nan() {
        return Err(Error::NonFinite);
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let (x, y) = t_beta_args(t, nu);
    Ok(beta_inc_split(0.5 * nu, 0.5, x, y))
}

/// Student's t cumulative distribution function `P(T ≤ t)`.
pub fn t_cdf(t: f64, nu: f64) -> Result<f64> {
    check_df(nu)?;
    if t.is_nan() {
        return Err(Error::NonFinite);
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    let tail = 0.5 * t_two_sided_p(t, nu)?;
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// F distribution cumulative distribution function `P(F ≤ f)`.
pub fn f_cdf(f: f64, d1: f64, d2: f64) -> Result<f64> {
    check_df(d1)?;
    check_df(d2)?;
    if f.is_nan() {
        return Err(Error::NonFinite);
    }
    if f <= 0.0 {
        return Ok(0.0);
    }
    if f.is_infinite() {
        return Ok(1.0);
    }
    let (x, y) = f_beta_args(f, d1, d2);
    Ok(beta_inc_split(0.5 * d1, 0.5 * d2, x, y))
}

/// Upper tail `P(F > f)`, computed directly rather than as `1 − f_cdf`.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> Result<f64> {
    check_df(d1)?;
    check_df(d2)?;
    if f.is_nan() {
        return Err(Error::NonFinite);
    }
    if f <= 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let (x, y) = f_beta_args(f, d1, d2);
    Ok(beta_inc_split(0.5 * d2, 0.5 * d1, y, x))
}

fn f_beta_args(f: f64, d1: f64, d2: f64) -> (f64, f64) {
    let num = d1 * f;
    if num > d2 {
        let q = d2 / num;
        (1.0 / (1.0 + q), q / (1.0 + q))
    } else {
        (num / (num + d2), d2 / (num + d2))
    }
}
