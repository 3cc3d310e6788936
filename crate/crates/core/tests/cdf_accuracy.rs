//! t and F distribution functions against tanh-sinh quadrature of the
//! unnormalized densities.

mod common;

use common::quadrature::{f_cdf_quadrature, t_cdf_quadrature};
use overlap_core::{f_cdf, f_sf, t_cdf, t_two_sided_p};

const TOL: f64 = 1e-10;

pub fn t_grid() -> Vec<(f64, f64)> {
    let nus = [0.7, 1.0, 2.0, 3.0, 4.5, 7.3, 12.0, 30.0, 113.0, 1000.0];
    let ts = [
        -40.0, -12.0, -6.0, -3.5, -2.5, -2.0, -1.5, -1.0, -0.6, -0.3, -0.05, 0.0, 0.02, 0.25, 0.5,
        0.9, 1.3, 1.96, 2.4, 3.0, 4.2, 7.5, 15.0, 60.0, 250.0,
    ];
    nus.iter().flat_map(|&nu| ts.iter().map(move |&t| (t, nu))).collect()
}

pub fn f_grid() -> Vec<(f64, f64, f64)> {
    let dfs = [(1.0, 1.0), (1.0, 10.0), (2.0, 3.0), (2.0, 27.0), (3.0, 12.0), (4.5, 2.5), (5.0, 50.0), (10.0, 4.0), (30.0, 30.0), (120.0, 7.0)];
    let fs = [
        1e-4, 0.01, 0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.85, 1.0, 1.2, 1.5, 1.8, 2.2, 2.7, 3.3, 4.0,
        5.0, 6.5, 8.0, 11.0, 16.0, 25.0, 60.0, 200.0,
    ];
    dfs.iter()
        .flat_map(|&(d1, d2)| fs.iter().map(move |&f| (f, d1, d2)))
        .collect()
}

#[test]
fn grid_has_five_hundred_points() {
    assert_eq!(t_grid().len() + f_grid().len(), 500);
}

#[test]
fn t_cdf_matches_quadrature() {
    let mut worst = (0.0, 0.0, 0.0);
    for (t, nu) in t_grid() {
        let err = (t_cdf(t, nu).unwrap() - t_cdf_quadrature(t, nu)).abs();
        if err > worst.0 {
            worst = (err, t, nu);
        }
    }
    assert!(worst.0 <= TOL, "worst |error| {:e} at t = {}, nu = {}", worst.0, worst.1, worst.2);
}

#[test]
fn f_cdf_matches_quadrature() {
    let mut worst = (0.0, 0.0, 0.0, 0.0);
    for (f, d1, d2) in f_grid() {
        let err = (f_cdf(f, d1, d2).unwrap() - f_cdf_quadrature(f, d1, d2)).abs();
        if err > worst.0 {
            worst = (err, f, d1, d2);
        }
    }
    assert!(worst.0 <= TOL, "worst |error| {:e} at f = {}, d = ({}, {})", worst.0, worst.1, worst.2, worst.3);
}

#[test]
fn quadrature_reproduces_closed_forms() {
    for t in [-30.0_f64, -2.0, -0.4, 0.0, 0.7, 3.0, 90.0] {
        let cauchy = 0.5 + t.atan() / std::f64::consts::PI;
        assert!((t_cdf_quadrature(t, 1.0) - cauchy).abs() < 1e-13, "nu = 1, t = {t}");
        let two = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
        assert!((t_cdf_quadrature(t, 2.0) - two).abs() < 1e-13, "nu = 2, t = {t}");
    }
    for (f, d2) in [(0.1, 3.0), (1.0, 7.0), (4.0, 20.0), (15.0, 2.5)] {
        let closed = 1.0 - (1.0_f64 + 2.0 * f / d2).powf(-0.5 * d2);
        assert!((f_cdf_quadrature(f, 2.0, d2) - closed).abs() < 1e-13, "f = {f}, d2 = {d2}");
    }
}

#[test]
fn upper_tails_keep_relative_accuracy() {
    // the two-sided p of |t| = 40 is far below the resolution of 1 - cdf
    let p = t_two_sided_p(40.0, 30.0).unwrap();
    let q = 2.0 * t_cdf_quadrature(-40.0, 30.0);
    assert!(((p - q) / q).abs() < 1e-8, "{p:e} vs {q:e}");

    let sf = f_sf(200.0, 5.0, 50.0).unwrap();
    assert!(sf > 0.0 && sf < 1e-20, "{sf:e}");
    assert_eq!(f_sf(2.0, 5.0, 50.0).unwrap() + f_cdf(2.0, 5.0, 50.0).unwrap(), 1.0);
}
