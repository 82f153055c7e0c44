//! Truncated Grunsky matrices of maps `g(z) = z + b_0 + b_1/z + ...` on the
//! exterior disk.
//!
//! Coefficients follow `log((g(z) - g(s)) / (z - s)) = -sum b_{nk} z^-n s^-k`
//! and come from the Faber recursion
//! `Phi_{n+1} = (w - b_0) Phi_n - sum_{k=1}^{n} b_k Phi_{n-k} - n b_n`
//! applied to `Psi_n(z) = Phi_n(g(z)) = z^n + n sum_k b_{nk} z^-k`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::io::Pair;
use crate::norms::{cayley, DiskSide};
use crate::ode::TaylorOptions;
use crate::rational::PoleExpansion;
use crate::schwarz::solve_companion;
use crate::{Error, Result, C64};

pub const DEFAULT_TRUNCATION: usize = 32;
pub const DEFAULT_NODES: usize = 512;
pub const DEFAULT_RADIUS: f64 = 1.5;
/// Allowed deviation of the leading coefficient from 1.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// `g(z) = z + b_0 + b_1 / z + ... + b_N / z^N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExteriorExpansion {
    /// `b_0, b_1, ..., b_N`.
    #[serde(serialize_with = "ser_pairs")]
    pub coeffs: Vec<C64>,
    /// Largest relative size of the discarded positive powers `z^2, z^3, ...`
    /// when built from samples, 0 otherwise.
    pub aliasing: f64,
}

fn ser_pairs<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<Pair> = v.iter().map(|&z| z.into()).collect();
    pairs.serialize(s)
}

impl ExteriorExpansion {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("expansion needs b_0".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("Laurent coefficient"));
        }
        Ok(ExteriorExpansion { coeffs, aliasing: 0.0 })
    }

    pub fn identity() -> Self {
        ExteriorExpansion { coeffs: vec![C64::new(0.0, 0.0)], aliasing: 0.0 }
    }

    /// Truncation order `N`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `b_m`, zero beyond the truncation.
    pub fn b(&self, m: usize) -> C64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        let inv = z.inv();
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * inv + c;
        }
        z + acc
    }

    /// Laurent coefficients from `samples[m] = F(R e^{2 pi i m / M})`. The
    /// leading coefficient must equal 1 within [`NORMALIZATION_TOL`] unless
    /// `normalize` is set, in which case `F` is divided by it.
    pub fn from_circle_samples(samples: &[C64], radius: f64, n: usize, normalize: bool) -> Result<Self> {
        let m = samples.len();
        if m < 8 * n.max(1) {
            return Err(Error::TooFewSamples { got: m, need: 8 * n.max(1) });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Invalid("sampling radius must be positive".into()));
        }
        let coeff = |k: i64| -> C64 {
            let mut acc = C64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * ((k * j as i64).rem_euclid(m as i64)) as f64 / m as f64;
                acc += s * C64::from_polar(1.0, ang);
            }
            acc / m as f64 * radius.powi(-k as i32)
        };
        let lead = coeff(1);
        if !normalize && (lead - 1.0).norm() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(lead.norm()));
        }
        if lead.norm() == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let coeffs: Vec<C64> = (0..=n as i64).map(|k| coeff(-k) / lead).collect();
        let aliasing = (2..=4).map(|k| (coeff(k) * radius.powi(k as i32)).norm()).fold(0.0, f64::max)
            / (lead * radius).norm();
        let mut out = Self::new(coeffs)?;
        out.aliasing = aliasing;
        Ok(out)
    }
}

/// Samples `F(zeta) = w(T(zeta))` on `|zeta| = radius`, where `w` solves
/// `S_w = phi` normalized at `i` and `T` is the Cayley map of the exterior disk,
/// and returns the normalized Laurent expansion.
pub fn exterior_expansion_from_schwarzian(phi: &PoleExpansion, radius: f64, nodes: usize, n: usize, opts: &TaylorOptions) -> Result<ExteriorExpansion> {
    if !(radius > 1.0) {
        return Err(Error::Invalid("sampling radius must exceed 1".into()));
    }
    let mut path = vec![C64::new(0.0, 1.0)];
    for j in 0..nodes {
        let zeta = C64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / nodes as f64);
        path.push(cayley(DiskSide::Exterior, zeta)?.0);
    }
    let sol = solve_companion(phi, &path, opts)?;
    let samples: Vec<C64> = sol.values().into_iter().skip(1).collect();
    ExteriorExpansion::from_circle_samples(&samples, radius, n, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyMatrix {
    /// `b_{nk}` for `1 <= n, k <= N` (stored zero-based).
    pub coeffs: DMatrix<C64>,
    /// `sqrt(n k) b_{nk}`.
    pub weighted: DMatrix<C64>,
    pub operator_norm_lower_bound: f64,
    pub symmetry_defect: f64,
    pub conditioning_warning: Option<String>,
}

impl GrunskyMatrix {
    pub fn truncation(&self) -> usize {
        self.coeffs.nrows()
    }
}

/// Negative parts `h_n` of `Psi_n` for `n = 1..=n_max`; `h[n][k]` is the
/// coefficient of `z^-k`, `k = 1..=depth`.
fn faber_tails(f: &ExteriorExpansion, n_max: usize, depth: usize) -> Vec<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let mut h: Vec<Vec<C64>> = vec![vec![zero; depth + 2]; n_max + 1];
    for n in 0..n_max {
        let mut next = vec![zero; depth + 2];
        for k in 1..=depth {
            // z h_n
            next[k] += h[n][k + 1];
            // B z^n, only powers below zero
            next[k] += f.b(n + k);
            // B h_n
            for m in 1..k {
                next[k] += f.b(m) * h[n][k - m];
            }
            for m in 1..n {
                next[k] -= f.b(m) * h[n - m][k];
            }
        }
        h[n + 1] = next;
    }
    h
}

pub fn grunsky_matrix(f: &ExteriorExpansion, n: usize) -> Result<GrunskyMatrix> {
    if n == 0 {
        return Err(Error::Invalid("truncation must be at least 1".into()));
    }
    let h = faber_tails(f, n, 2 * n);
    let coeffs = DMatrix::from_fn(n, n, |i, k| h[i + 1][k + 1] / (i + 1) as f64);
    let weighted = DMatrix::from_fn(n, n, |i, k| coeffs[(i, k)] * (((i + 1) * (k + 1)) as f64).sqrt());
    let mut symmetry_defect: f64 = 0.0;
    for i in 0..n {
        for k in 0..i {
            symmetry_defect = symmetry_defect.max((coeffs[(i, k)] - coeffs[(k, i)]).norm());
        }
    }
    let finite = weighted.iter().all(|c| c.re.is_finite() && c.im.is_finite());
    let conditioning_warning = if !finite {
        Some("non-finite Grunsky coefficients".to_string())
    } else if symmetry_defect > 1e-6 {
        Some(format!("symmetry defect {symmetry_defect:e}"))
    } else {
        None
    };
    let operator_norm_lower_bound = if finite {
        weighted.clone().svd(false, false).singular_values.max()
    } else {
        f64::NAN
    };
    Ok(GrunskyMatrix { coeffs, weighted, operator_norm_lower_bound, symmetry_defect, conditioning_warning })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrunskyRow {
    pub n: usize,
    pub norm: f64,
    pub symmetry_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrunskyReport {
    pub schema: &'static str,
    pub rows: Vec<GrunskyRow>,
    /// Sup-norm of the associated harmonic Beltrami coefficient, if supplied.
    pub beltrami_norm: Option<f64>,
    pub aliasing: f64,
    pub warnings: Vec<String>,
}

pub const REPORT_SCHEMA: &str = "berslab.grunsky/1";

pub fn grunsky_report(f: &ExteriorExpansion, n_list: &[usize], beltrami_norm: Option<f64>) -> Result<GrunskyReport> {
    let mut rows = Vec::with_capacity(n_list.len());
    let mut warnings = Vec::new();
    for &n in n_list {
        let g = grunsky_matrix(f, n)?;
        if let Some(w) = g.conditioning_warning {
            warnings.push(format!("N = {n}: {w}"));
        }
        rows.push(GrunskyRow { n, norm: g.operator_norm_lower_bound, symmetry_defect: g.symmetry_defect });
    }
    Ok(GrunskyReport { schema: REPORT_SCHEMA, rows, beltrami_norm, aliasing: f.aliasing, warnings })
}

/// Weighted entries as CSV rows `n,k,re,im`.
pub fn matrix_csv(g: &GrunskyMatrix) -> String {
    let mut out = String::from("n,k,re,im\n");
    for i in 0..g.truncation() {
        for k in 0..g.truncation() {
            let c = g.weighted[(i, k)];
            out.push_str(&format!("{},{},{:.17e},{:.17e}\n", i + 1, k + 1, c.re, c.im));
        }
    }
    out
}
