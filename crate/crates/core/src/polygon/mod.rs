//! Convex polygons given by angle ratios and real prevertices, the critical
//! radius of the homotopy family, and the Schwarz-Christoffel map.

mod sc;

pub use sc::{collinearity_residual, is_convex_polyline, turning_angles, ImagePolyline, ScMap};

use serde::Serialize;

use crate::{Error, Result, C64};

/// Absolute tolerance on `sum alpha_j = n - 2`.
pub const ANGLE_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSpec {
    alphas: Vec<f64>,
    prevertices: Vec<f64>,
    d0: C64,
    d1: C64,
}

impl PolygonSpec {
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn prevertices(&self) -> &[f64] {
        &self.prevertices
    }

    pub fn d0(&self) -> C64 {
        self.d0
    }

    pub fn d1(&self) -> C64 {
        self.d1
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `c_j = alpha_j - 1`, the exponents of the Schwarz-Christoffel integrand.
    pub fn exponents(&self) -> Vec<f64> {
        self.alphas.iter().map(|a| a - 1.0).collect()
    }

    /// Checks the `a1 = 0, a2 = 1` normalization.
    pub fn check_normalized(&self) -> Result<()> {
        if self.prevertices[0] == 0.0 && self.prevertices[1] == 1.0 {
            Ok(())
        } else {
            Err(Error::Normalization)
        }
    }

    /// Same polygon class with prevertices replaced by `scale * a_j + shift`.
    pub fn with_affine_prevertices(&self, scale: f64, shift: f64) -> Result<Self> {
        let pre: Vec<f64> = self.prevertices.iter().map(|a| scale * a + shift).collect();
        validate_polygon(&self.alphas, &pre, self.d0, self.d1)
    }
}

/// Checks the convex-polygon invariants and returns a validated spec.
pub fn validate_polygon(alphas: &[f64], prevertices: &[f64], d0: C64, d1: C64) -> Result<PolygonSpec> {
    if alphas.len() != prevertices.len() {
        return Err(Error::LengthMismatch { alphas: alphas.len(), prevertices: prevertices.len() });
    }
    let n = alphas.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    if alphas.iter().chain(prevertices).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("angle ratio or prevertex"));
    }
    if !(d0.re.is_finite() && d0.im.is_finite() && d1.re.is_finite() && d1.im.is_finite()) {
        return Err(Error::NonFinite("d0 or d1"));
    }
    if d1 == C64::new(0.0, 0.0) {
        return Err(Error::ZeroScale);
    }
    if let Some((index, &value)) = alphas.iter().enumerate().find(|(_, a)| !(**a > 0.0 && **a < 1.0)) {
        return Err(Error::AngleOutOfRange { index, value });
    }
    let sum: f64 = alphas.iter().sum();
    let expected = n as f64 - 2.0;
    if (sum - expected).abs() > ANGLE_SUM_TOL {
        return Err(Error::AngleSum { sum, expected });
    }
    if let Some(i) = prevertices.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotonePrevertices(i + 1));
    }
    Ok(PolygonSpec { alphas: alphas.to_vec(), prevertices: prevertices.to_vec(), d0, d1 })
}

/// Index set used for the double sum `sum (alpha_j - 1)(alpha_l - 1)` in the
/// quadratic coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairConvention {
    /// `j < l` (the adopted reading).
    Unordered,
    /// `j != l`.
    Distinct,
    /// all `(j, l)`, including `j = l`.
    Ordered,
}

/// Positive root of `A r^2 + B r + C = 0` with the quadratic's coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalRadius {
    pub r0: f64,
    /// `(A, B, C)`.
    pub quad_coeffs: (f64, f64, f64),
    /// `-sum (alpha_j - 1)` evaluated from the angles; equals `B = 2` up to rounding.
    pub linear_from_angles: f64,
}

impl CriticalRadius {
    pub fn discriminant(&self) -> f64 {
        let (a, b, c) = self.quad_coeffs;
        b * b - 4.0 * a * c
    }

    /// `A r0^2 + B r0 + C`.
    pub fn residual(&self) -> f64 {
        let (a, b, c) = self.quad_coeffs;
        (a * self.r0 + b) * self.r0 + c
    }
}

/// `A` under the given pair convention.
pub fn quadratic_leading(p: &PolygonSpec, conv: PairConvention) -> f64 {
    let c = p.exponents();
    let squares: f64 = c.iter().map(|c| c * c).sum();
    let mut pairs = 0.0;
    for j in 0..c.len() {
        for l in 0..c.len() {
            let take = match conv {
                PairConvention::Unordered => j < l,
                PairConvention::Distinct => j != l,
                PairConvention::Ordered => true,
            };
            if take {
                pairs += c[j] * c[l];
            }
        }
    }
    0.5 * (squares + pairs)
}

/// Critical radius from `A r^2 + B r + C = 0` with `A = (sum c_j^2 + sum_{j<l} c_j c_l) / 2`,
/// `B = -sum c_j = 2` and `C = -2`.
pub fn critical_radius(p: &PolygonSpec) -> CriticalRadius {
    let a = quadratic_leading(p, PairConvention::Unordered);
    let linear_from_angles = -p.exponents().iter().sum::<f64>();
    // sum alpha_j = n - 2 makes the linear coefficient exactly 2.
    let b = 2.0;
    let c = -2.0;
    // -2c / (b + sqrt(disc)) avoids cancellation for the positive root.
    let r0 = -2.0 * c / (b + (b * b - 4.0 * a * c).sqrt());
    CriticalRadius { r0, quad_coeffs: (a, b, c), linear_from_angles }
}
