//! Data generation for one factorial design cell.
//!
//! Each replicate draws its three blocks directly (unpaired sample 1,
//! unpaired sample 2, complete pairs), which under MCAR is equivalent to
//! generating complete pairs and deleting values at random.
//! [`gen_cell_by_deletion`] implements the deletion route for comparison.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ttests::OverlappingSamples;

/// How the paired block is generated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Bivariate normal with correlation `rho`; `|rho| = 1` is allowed.
    #[default]
    Bivariate,
    /// Both members of a pair are the same draw (ρ = 1, d = 0) with their
    /// own variance `var_c`; unpaired blocks use `var_a` and `var_b`.
    IdenticalPairs,
}

/// One parameter combination of the simulation design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignCell {
    pub mu1: f64,
    pub mu2: f64,
    pub var1: f64,
    pub var2: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub n_c: usize,
    pub rho: f64,
    /// Hypothesized `μ1 − μ2`, realized by shifting every sample-1 value.
    pub hyp_diff: f64,
    pub pair_mode: PairMode,
    pub var_a: Option<f64>,
    pub var_b: Option<f64>,
    pub var_c: Option<f64>,
}

impl DesignCell {
    /// Bivariate-normal cell with zero means and no hypothesized shift.
    pub fn bivariate(n_a: usize, n_b: usize, n_c: usize, var1: f64, var2: f64, rho: f64) -> Self {
        Self {
            mu1: 0.0,
            mu2: 0.0,
            var1,
            var2,
            n_a,
            n_b,
            n_c,
            rho,
            hyp_diff: 0.0,
            pair_mode: PairMode::Bivariate,
            var_a: None,
            var_b: None,
            var_c: None,
        }
    }

    /// Identical-pairs cell (ρ = 1, d = 0) with per-block variances.
    pub fn identical_pairs(
        n_a: usize,
        n_b: usize,
        n_c: usize,
        var_a: f64,
        var_b: f64,
        var_c: f64,
    ) -> Self {
        Self {
            mu1: 0.0,
            mu2: 0.0,
            var1: var_a,
            var2: var_b,
            n_a,
            n_b,
            n_c,
            rho: 1.0,
            hyp_diff: 0.0,
            pair_mode: PairMode::IdenticalPairs,
            var_a: Some(var_a),
            var_b: Some(var_b),
            var_c: Some(var_c),
        }
    }

    pub fn with_hyp_diff(mut self, hyp_diff: f64) -> Self {
        self.hyp_diff = hyp_diff;
        self
    }

    pub fn with_means(mut self, mu1: f64, mu2: f64) -> Self {
        self.mu1 = mu1;
        self.mu2 = mu2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDesign(msg.to_string()));
        if self.n_a + self.n_b + self.n_c == 0 {
            return bad("all block sizes are zero");
        }
        if !(self.rho.is_finite() && self.rho.abs() <= 1.0) {
            return bad("rho must lie in [-1, 1]");
        }
        for (name, v) in [("var1", self.var1), ("var2", self.var2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidDesign(format!("{name} must be finite and >= 0")));
            }
        }
        if ![self.mu1, self.mu2, self.hyp_diff].iter().all(|v| v.is_finite()) {
            return bad("means and hyp_diff must be finite");
        }
        if self.pair_mode == PairMode::IdenticalPairs {
            if self.rho != 1.0 {
                return bad("identical pairs require rho = 1");
            }
            for (name, v) in [("var_a", self.var_a), ("var_b", self.var_b), ("var_c", self.var_c)] {
                match v {
                    Some(v) if v.is_finite() && v >= 0.0 => {}
                    Some(_) => {
                        return Err(Error::InvalidDesign(format!("{name} must be finite and >= 0")))
                    }
                    None => {
                        return Err(Error::InvalidDesign(format!(
                            "identical pairs require {name}"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Standard deviations of (unpaired 1, unpaired 2, paired 1, paired 2).
    fn block_sds(&self) -> [f64; 4] {
        match self.pair_mode {
            PairMode::Bivariate => {
                let (s1, s2) = (self.var1.sqrt(), self.var2.sqrt());
                [s1, s2, s1, s2]
            }
            PairMode::IdenticalPairs => {
                let sc = self.var_c.unwrap_or(0.0).sqrt();
                [
                    self.var_a.unwrap_or(0.0).sqrt(),
                    self.var_b.unwrap_or(0.0).sqrt(),
                    sc,
                    sc,
                ]
            }
        }
    }
}

/// Identifies the random stream of one replicate of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub cell_index: u64,
    pub replicate_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, cell_index: u64, replicate_index: u64) -> Self {
        Self {
            master_seed,
            cell_index,
            replicate_index,
        }
    }
}

/// Words reserved for each replicate inside a cell's ChaCha stream.
const REPLICATE_STRIDE_WORDS: u128 = 1 << 36;

/// Random stream for `(master, cell, replicate)`.
///
/// The master seed keys a ChaCha8 generator, the cell index selects the
/// ChaCha stream, and the replicate index positions the block counter, so
/// distinct triples read disjoint keystream segments.
pub fn derive_stream(seed: SeedSpec) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.master_seed);
    rng.set_stream(seed.cell_index);
    rng.set_word_pos(seed.replicate_index as u128 * REPLICATE_STRIDE_WORDS);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Draws one paired observation `(x1, x2)` before the hypothesized shift.
fn draw_pair(d: &DesignCell, sd1: f64, sd2: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    match d.pair_mode {
        PairMode::Bivariate => {
            let z1 = normal(rng);
            let z2 = normal(rng);
            // at |rho| = 1 the second term is exactly zero
            let resid = (1.0 - d.rho * d.rho).max(0.0).sqrt();
            let x1 = d.mu1 + sd1 * z1;
            let x2 = d.mu2 + sd2 * (d.rho * z1 + resid * z2);
            (x1, x2)
        }
        PairMode::IdenticalPairs => {
            let x = sd1 * normal(rng);
            (d.mu1 + x, d.mu2 + x)
        }
    }
}

/// Generates one replicate of `d`.
///
/// Unpaired sample-1 values are drawn around `mu1 + hyp_diff`; paired values
/// are correlated around `mu1` first and the sample-1 member is shifted by
/// `hyp_diff` afterwards.
pub fn gen_cell(d: &DesignCell, seed: SeedSpec) -> Result<OverlappingSamples> {
    d.validate()?;
    let mut rng = derive_stream(seed);
    let [sd_a, sd_b, sd_p1, sd_p2] = d.block_sds();

    let a: Vec<f64> = (0..d.n_a)
        .map(|_| (d.mu1 + d.hyp_diff) + sd_a * normal(&mut rng))
        .collect();
    let b: Vec<f64> = (0..d.n_b).map(|_| d.mu2 + sd_b * normal(&mut rng)).collect();
    let pairs: Vec<(f64, f64)> = (0..d.n_c)
        .map(|_| {
            let (x1, x2) = draw_pair(d, sd_p1, sd_p2, &mut rng);
            (x1 + d.hyp_diff, x2)
        })
        .collect();
    OverlappingSamples::new(a, b, pairs)
}

/// Alternative construction: draw `n_a + n_b + n_c` complete bivariate
/// pairs, then delete completely at random so that `n_a` keep only their
/// sample-1 value and `n_b` only their sample-2 value.
pub fn gen_cell_by_deletion(d: &DesignCell, seed: SeedSpec) -> Result<OverlappingSamples> {
    d.validate()?;
    if d.pair_mode != PairMode::Bivariate {
        return Err(Error::InvalidDesign(
            "deletion construction needs a bivariate design".into(),
        ));
    }
    let mut rng = derive_stream(seed);
    let (sd1, sd2) = (d.var1.sqrt(), d.var2.sqrt());
    let total = d.n_a + d.n_b + d.n_c;
    let complete: Vec<(f64, f64)> = (0..total)
        .map(|_| {
            let (x1, x2) = draw_pair(d, sd1, sd2, &mut rng);
            (x1 + d.hyp_diff, x2)
        })
        .collect();
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng);

    let pairs = order[..d.n_c].iter().map(|&i| complete[i]).collect();
    let a = order[d.n_c..d.n_c + d.n_a]
        .iter()
        .map(|&i| complete[i].0)
        .collect();
    let b = order[d.n_c + d.n_a..].iter().map(|&i| complete[i].1).collect();
    OverlappingSamples::new(a, b, pairs)
}
