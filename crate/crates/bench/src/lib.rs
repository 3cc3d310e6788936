//! Shared inputs for the criterion benches.

use overlap_core::{gen_cell, DesignCell, OverlappingSamples, SeedSpec};

/// One generated dataset with the given block sizes.
pub fn dataset(n_a: usize, n_b: usize, n_c: usize) -> OverlappingSamples {
    let cell = DesignCell::bivariate(n_a, n_b, n_c, 1.0, 4.0, 0.5);
    gen_cell(&cell, SeedSpec::new(1, 0, 0)).expect("valid design")
}
