#![allow(dead_code)]

use berslab::polygon::{validate_polygon, PolygonSpec};
use berslab::C64;
use rand::Rng;

pub const O: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn rectangle() -> PolygonSpec {
    validate_polygon(&[0.5; 4], &[0.0, 1.0, 2.0, 4.0], O, ONE).unwrap()
}

/// Convex polygon with `n` vertices: angle ratios drawn in (0.05, 0.95) and
/// rescaled to sum to `n - 2`, redrawn until all stay in range.
pub fn random_polygon<R: Rng>(rng: &mut R, n: usize) -> PolygonSpec {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.95)).collect();
        let s: f64 = raw.iter().sum();
        let mut alphas: Vec<f64> = raw.iter().map(|a| a * (n - 2) as f64 / s).collect();
        let head: f64 = alphas[..n - 1].iter().sum();
        alphas[n - 1] = (n - 2) as f64 - head;
        if alphas.iter().any(|&a| !(a > 0.02 && a < 0.98)) {
            continue;
        }
        let mut pre = vec![0.0, 1.0];
        while pre.len() < n {
            let last = *pre.last().unwrap();
            pre.push(last + rng.gen_range(0.3..2.0));
        }
        if let Ok(p) = validate_polygon(&alphas, &pre, O, ONE) {
            return p;
        }
    }
}

/// Random point in the upper half-plane, at least `clearance` from the real axis.
pub fn random_point<R: Rng>(rng: &mut R, lo: f64, hi: f64, clearance: f64) -> C64 {
    C64::new(rng.gen_range(lo - 1.0..hi + 1.0), rng.gen_range(clearance..3.0))
}

/// `sum (alpha_j - 1) / (z - a_j)` straight from the angles.
pub fn log_derivative(alphas: &[f64], pre: &[f64], z: C64) -> C64 {
    alphas.iter().zip(pre).map(|(a, p)| (a - 1.0) / (z - p)).sum()
}

/// `k`-th Taylor coefficient of `f` at `z0` from `m` samples on the circle of
/// radius `r`.
pub fn cauchy_coefficient(f: impl Fn(C64) -> C64, z0: C64, r: f64, m: usize, k: i32) -> C64 {
    let mut acc = O;
    for j in 0..m {
        let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
        acc += f(z0 + r * e) * e.powi(-k);
    }
    acc / m as f64 / r.powi(k)
}

/// Schwarzian from the first three Taylor coefficients.
pub fn schwarzian_from_taylor(c1: C64, c2: C64, c3: C64) -> C64 {
    let (d1, d2, d3) = (c1, 2.0 * c2, 6.0 * c3);
    d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1)
}
