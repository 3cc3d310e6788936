//! Generator distribution checks and harness contracts.

mod common;

use common::quadrature::tanh_sinh;
use overlap_core::{
    derive_stream, gen_cell, gen_cell_by_deletion, mc_stderr, moments, DesignCell, Error,
    MonteCarlo, SeedSpec, TestKind,
};
use rand::Rng;
use rand_distr::StandardNormal;

/// Standard normal CDF by quadrature of the density.
fn normal_cdf(x: f64) -> f64 {
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let half = tanh_sinh(density, 0.0, x.abs(), 1e-14);
    if x < 0.0 {
        0.5 - half
    } else {
        0.5 + half
    }
}

fn ks_distance(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS distance.
fn ks_critical(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

#[test]
fn normal_cdf_oracle_fixed_points() {
    assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
    assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-12);
    assert!((normal_cdf(-1.0) - 0.15865525393145707).abs() < 1e-12);
}

#[test]
fn derived_stream_normals_pass_ks() {
    let mut rng = derive_stream(SeedSpec::new(42, 3, 17));
    let xs: Vec<f64> = (0..10_000).map(|_| rng.sample(StandardNormal)).collect();
    let d = ks_distance(xs);
    assert!(d < ks_critical(10_000), "KS distance {d}");
}

#[test]
fn generated_blocks_are_standardized_normal() {
    let cell = DesignCell::bivariate(10_000, 10_000, 10_000, 4.0, 0.5, -0.6).with_means(1.0, -2.0);
    let s = gen_cell(&cell, SeedSpec::new(7, 0, 0)).unwrap();
    let blocks: [(Vec<f64>, f64, f64); 4] = [
        (s.a().to_vec(), 1.0, 4.0),
        (s.b().to_vec(), -2.0, 0.5),
        (s.pairs().iter().map(|p| p.0).collect(), 1.0, 4.0),
        (s.pairs().iter().map(|p| p.1).collect(), -2.0, 0.5),
    ];
    for (i, (xs, mu, var)) in blocks.into_iter().enumerate() {
        let z: Vec<f64> = xs.iter().map(|x| (x - mu) / var.sqrt()).collect();
        let d = ks_distance(z);
        assert!(d < ks_critical(10_000), "block {i}: KS distance {d}");
    }
}

/// Mean and variance of each block within 3-sigma bounds at n = 10⁵.
#[test]
fn marginal_moments_per_block_and_mode() {
    let n = 100_000;
    let check = |xs: &[f64], mu: f64, var: f64, what: &str| {
        let m = moments(xs).unwrap();
        let mean_bound = 3.0 * (var / n as f64).sqrt();
        // Var(s²) = 2σ⁴/(n − 1) for normal data
        let var_bound = 3.0 * var * (2.0 / (n - 1) as f64).sqrt();
        assert!((m.mean - mu).abs() <= mean_bound, "{what}: mean {} vs {mu}", m.mean);
        let v = m.variance().unwrap();
        assert!((v - var).abs() <= var_bound, "{what}: var {v} vs {var}");
    };

    let cell = DesignCell::bivariate(n, n, n, 2.0, 8.0, 0.75).with_means(0.5, 0.0).with_hyp_diff(10.0);
    let s = gen_cell(&cell, SeedSpec::new(11, 2, 5)).unwrap();
    check(s.a(), 10.5, 2.0, "bivariate a");
    check(s.b(), 0.0, 8.0, "bivariate b");
    let x1: Vec<f64> = s.pairs().iter().map(|p| p.0).collect();
    let x2: Vec<f64> = s.pairs().iter().map(|p| p.1).collect();
    check(&x1, 10.5, 2.0, "bivariate paired x1");
    check(&x2, 0.0, 8.0, "bivariate paired x2");
    let r = overlap_core::pearson_r(&x1, &x2).unwrap();
    // 3 sigma of r is about 3(1 − ρ²)/√n
    assert!((r - 0.75).abs() <= 3.0 * (1.0 - 0.5625) / (n as f64).sqrt(), "r = {r}");

    let cell = DesignCell::identical_pairs(n, n, n, 1.0, 4.0, 2.0);
    let s = gen_cell(&cell, SeedSpec::new(11, 3, 5)).unwrap();
    check(s.a(), 0.0, 1.0, "identical a");
    check(s.b(), 0.0, 4.0, "identical b");
    let c: Vec<f64> = s.pairs().iter().map(|p| p.0).collect();
    check(&c, 0.0, 2.0, "identical pairs");
}

#[test]
fn perfect_correlation_is_exact_for_any_variances() {
    for (rho, var1, var2) in [(1.0, 4.0, 1.0), (-1.0, 1.0, 9.0), (1.0, 0.3, 7.0), (-1.0, 2.0, 2.0)] {
        let cell = DesignCell::bivariate(0, 0, 25, var1, var2, rho);
        for rep in 0..50 {
            let s = gen_cell(&cell, SeedSpec::new(5, 0, rep)).unwrap();
            let (x1, x2): (Vec<f64>, Vec<f64>) = s.pairs().iter().copied().unzip();
            assert_eq!(overlap_core::pearson_r(&x1, &x2).unwrap(), rho);
        }
    }
}

/// Rejection rates of the direct three-block generator and of deleting
/// values from complete pairs agree within 3 combined standard errors.
#[test]
fn direct_generation_matches_deletion_route() {
    let cell = DesignCell::bivariate(8, 12, 6, 1.0, 3.0, 0.4);
    let tests = [TestKind::T1, TestKind::T2, TestKind::T3, TestKind::Tnew1, TestKind::Tnew2];
    let reps = 10_000;
    let mut counts = [[0_u64; 2]; 5];
    for rep in 0..reps {
        let direct = gen_cell(&cell, SeedSpec::new(99, 0, rep)).unwrap();
        let deleted = gen_cell_by_deletion(&cell, SeedSpec::new(99, 1, rep)).unwrap();
        assert_eq!((deleted.n_a(), deleted.n_b(), deleted.n_c()), (8, 12, 6));
        for (k, t) in tests.iter().enumerate() {
            for (route, data) in [&direct, &deleted].into_iter().enumerate() {
                if t.run(data, 0.0).unwrap().rejects(0.05) {
                    counts[k][route] += 1;
                }
            }
        }
    }
    for (t, [a, b]) in tests.iter().zip(counts) {
        let (p, q) = (a as f64 / reps as f64, b as f64 / reps as f64);
        let se = (mc_stderr(p, reps).powi(2) + mc_stderr(q, reps).powi(2)).sqrt();
        assert!((p - q).abs() <= 3.0 * se, "{t}: direct {p} vs deletion {q}");
    }
}

#[test]
fn grid_results_do_not_depend_on_worker_count() {
    let grid = vec![
        DesignCell::bivariate(5, 10, 5, 1.0, 4.0, -0.5),
        DesignCell::identical_pairs(5, 5, 5, 1.0, 4.0, 1.0),
        DesignCell::bivariate(30, 5, 10, 2.0, 1.0, 0.25).with_hyp_diff(10.0),
        DesignCell::bivariate(0, 0, 0, 1.0, 1.0, 0.0),
        DesignCell::bivariate(0, 0, 8, 1.0, 1.0, 0.5),
    ];
    let mc = MonteCarlo::new(TestKind::ALL.to_vec(), 2_000, 0.05, 314);
    let one = mc.run_grid(&grid, 1);
    let eight = mc.run_grid(&grid, 8);
    assert_eq!(one, eight);
    assert!(matches!(one[3], Err(Error::InvalidDesign(_))));
    assert!(one.iter().enumerate().all(|(i, r)| i == 3 || r.is_ok()));
    // cell 4 has only pairs: T2, T3 and ANOVA are skipped
    let cell = one[4].as_ref().unwrap();
    assert_eq!(cell.skipped, vec![TestKind::T2, TestKind::T3, TestKind::Anova]);
}

#[test]
fn grid_cells_match_single_cell_runs_at_the_same_index() {
    let grid = vec![
        DesignCell::bivariate(5, 5, 5, 1.0, 1.0, 0.0),
        DesignCell::bivariate(10, 5, 5, 1.0, 2.0, 0.5),
    ];
    let mc = MonteCarlo::new(vec![TestKind::Tnew2], 500, 0.05, 8);
    let res = mc.run_grid(&grid, 3);
    for (i, d) in grid.iter().enumerate() {
        assert_eq!(res[i].as_ref().unwrap(), &mc.run_cell_indexed(d, i as u64).unwrap());
    }
}

#[test]
fn rates_respect_the_denominator_accounting() {
    let cells = [
        DesignCell::identical_pairs(5, 5, 5, 1.0, 1.0, 1.0),
        DesignCell::bivariate(2, 2, 2, 1.0, 1.0, 0.9),
    ];
    let mc = MonteCarlo::new(TestKind::ALL.to_vec(), 3_000, 0.05, 21);
    for d in &cells {
        let cell = mc.run_cell(d).unwrap();
        for (t, s) in &cell.tests {
            assert!(s.rejections + s.failures <= cell.reps, "{t}");
            match s.rate {
                Some(rate) => {
                    let decided = cell.reps - s.failures;
                    assert_eq!(rate, s.rejections as f64 / decided as f64);
                    assert_eq!(s.mc_stderr, Some((rate * (1.0 - rate) / decided as f64).sqrt()));
                }
                None => assert_eq!(s.failures, cell.reps),
            }
        }
    }
}

#[test]
fn vanishing_alpha_rejects_nothing() {
    let d = DesignCell::bivariate(10, 10, 10, 1.0, 4.0, 0.3);
    let cell = MonteCarlo::new(TestKind::ALL.to_vec(), 2_000, 1e-300, 3).run_cell(&d).unwrap();
    for s in cell.tests.values() {
        assert_eq!(s.rate, Some(0.0));
    }
}

#[test]
fn large_balanced_cell_holds_the_nominal_level() {
    let d = DesignCell::bivariate(30, 30, 30, 1.0, 1.0, 0.0);
    let tests = [TestKind::T1, TestKind::T2, TestKind::T3, TestKind::Tnew1, TestKind::Tnew2];
    let cell = MonteCarlo::new(tests.to_vec(), 10_000, 0.05, 17).run_cell(&d).unwrap();
    for t in tests {
        let rate = cell.rate(t).unwrap();
        assert!((0.035..=0.065).contains(&rate), "{t}: {rate}");
    }
}

#[test]
fn zero_effect_power_is_the_type_one_error_rate() {
    let d = DesignCell::bivariate(10, 10, 10, 1.0, 2.0, 0.5);
    let mc = MonteCarlo::new(TestKind::ALL.to_vec(), 2_000, 0.05, 5);
    assert_eq!(mc.estimate_power(&d.clone().with_means(0.0, 0.0)).unwrap(), mc.run_cell(&d).unwrap());
}
