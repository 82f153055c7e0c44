//! Rational functions on the upper half-plane written as sums of simple,
//! double and cross pole terms at real points.
//!
//! A convex polygon map has log-derivative `b(z) = sum c_j / (z - a_j)` with
//! `c_j = alpha_j - 1`, and Schwarzian `S = b' - b^2 / 2`. Both stay inside
//! this representation, so all evaluation is closed-form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::io::Pair;
use crate::jet::Jet;
use crate::polygon::PolygonSpec;
use crate::{Error, Holomorphic, Result, C64};

/// Points closer than this to a pole are rejected by [`PoleExpansion::evaluate`].
pub const NEAR_POLE_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExpansionWire", try_from = "ExpansionWire")]
pub struct PoleExpansion {
    poles: Vec<f64>,
    simple: Vec<C64>,
    double: Vec<C64>,
    cross: BTreeMap<(usize, usize), C64>,
}

impl PoleExpansion {
    pub fn new(
        poles: Vec<f64>,
        simple: Vec<C64>,
        double: Vec<C64>,
        cross: BTreeMap<(usize, usize), C64>,
    ) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::Invalid("expansion needs at least one pole".into()));
        }
        if poles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("pole"));
        }
        if let Some(i) = poles.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotonePrevertices(i + 1));
        }
        let n = poles.len();
        if simple.len() != n || double.len() != n {
            return Err(Error::Invalid(format!(
                "coefficient lists must have {n} entries (simple {}, double {})",
                simple.len(),
                double.len()
            )));
        }
        for &(j, l) in cross.keys() {
            if j >= l || l >= n {
                return Err(Error::Invalid(format!("cross index ({j}, {l}) must satisfy j < l < {n}")));
            }
        }
        Ok(Self { poles, simple, double, cross })
    }

    pub fn zero(poles: Vec<f64>) -> Result<Self> {
        let n = poles.len();
        Self::new(poles, vec![ZERO; n], vec![ZERO; n], BTreeMap::new())
    }

    /// `sum c_j / (z - a_j)` with no higher-order terms.
    pub fn from_simple(poles: Vec<f64>, simple: Vec<C64>) -> Result<Self> {
        let n = poles.len();
        Self::new(poles, simple, vec![ZERO; n], BTreeMap::new())
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn simple_coeffs(&self) -> &[C64] {
        &self.simple
    }

    pub fn double_coeffs(&self) -> &[C64] {
        &self.double
    }

    pub fn cross_coeffs(&self) -> &BTreeMap<(usize, usize), C64> {
        &self.cross
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// True when the expansion only has simple-pole terms.
    pub fn is_log_derivative(&self) -> bool {
        self.double.iter().all(|c| *c == ZERO) && self.cross.values().all(|c| *c == ZERO)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            poles: self.poles.clone(),
            simple: self.simple.iter().map(|c| c * s).collect(),
            double: self.double.iter().map(|c| c * s).collect(),
            cross: self.cross.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    /// Index and distance of the pole nearest to `z`.
    pub fn nearest_pole(&self, z: C64) -> (usize, f64) {
        self.poles
            .iter()
            .enumerate()
            .map(|(i, &a)| (i, (z - a).norm()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    pub fn evaluate(&self, z: C64) -> Result<C64> {
        let (index, dist) = self.nearest_pole(z);
        if !(dist >= NEAR_POLE_TOL) {
            return Err(Error::NearPole { index, tol: NEAR_POLE_TOL });
        }
        let recips: Vec<C64> = self.poles.iter().map(|&a| (z - a).inv()).collect();
        Ok(self.combine_values(&recips))
    }

    /// Evaluates the expansion given the values `g_j = 1 / (z - a_j)`.
    pub fn combine_values(&self, g: &[C64]) -> C64 {
        let mut acc = ZERO;
        for j in 0..self.poles.len() {
            acc += g[j] * (self.simple[j] + self.double[j] * g[j]);
        }
        for (&(j, l), c) in &self.cross {
            acc += c * g[j] * g[l];
        }
        acc
    }

    /// Same combination as [`Self::combine_values`], on Taylor jets of `1 / (z - a_j)`.
    pub fn combine_jets(&self, g: &[Jet]) -> Jet {
        let order = g[0].order();
        let mut acc = Jet::zero(order);
        for j in 0..self.poles.len() {
            if self.simple[j] != ZERO {
                acc = &acc + &g[j].scale(self.simple[j]);
            }
            if self.double[j] != ZERO {
                acc = &acc + &g[j].square().scale(self.double[j]);
            }
        }
        for (&(j, l), c) in &self.cross {
            if *c != ZERO {
                acc = &acc + &(&g[j] * &g[l]).scale(*c);
            }
        }
        acc
    }

    /// Taylor coefficients about `z0` up to `order`.
    pub fn taylor(&self, z0: C64, order: usize) -> Jet {
        let g: Vec<Jet> = self.poles.iter().map(|&a| Jet::geometric(z0 - a, order)).collect();
        self.combine_jets(&g)
    }

    /// Derivative of a log-derivative expansion: `b' = -sum c_j / (z - a_j)^2`.
    pub fn derivative_of_simple(&self) -> Result<Self> {
        if !self.is_log_derivative() {
            return Err(Error::NotLogDerivative);
        }
        let n = self.poles.len();
        Self::new(
            self.poles.clone(),
            vec![ZERO; n],
            self.simple.iter().map(|c| -c).collect(),
            BTreeMap::new(),
        )
    }
}

impl Holomorphic for PoleExpansion {
    fn eval(&self, z: C64) -> Result<C64> {
        self.evaluate(z)
    }
}

/// `b(z) = sum (alpha_j - 1) / (z - a_j)`.
pub fn log_derivative_from_polygon(p: &PolygonSpec) -> PoleExpansion {
    let simple = p.alphas().iter().map(|a| C64::new(a - 1.0, 0.0)).collect();
    PoleExpansion::from_simple(p.prevertices().to_vec(), simple)
        .expect("validated polygon has increasing finite prevertices")
}

/// Schwarzian `b' - b^2 / 2` of the map whose log-derivative is `b`.
///
/// Double coefficients are `-c_j - c_j^2 / 2`, cross coefficients (j < l) are `-c_j c_l`.
pub fn schwarzian_from_log_derivative(b: &PoleExpansion) -> Result<PoleExpansion> {
    homotopy_coefficients(b, 1.0)
}

fn homotopy_coefficients(b: &PoleExpansion, t: f64) -> Result<PoleExpansion> {
    if !b.is_log_derivative() {
        return Err(Error::NotLogDerivative);
    }
    let n = b.len();
    let c = &b.simple;
    let double = c.iter().map(|c| -t * c - 0.5 * t * t * c * c).collect();
    let mut cross = BTreeMap::new();
    for j in 0..n {
        for l in j + 1..n {
            cross.insert((j, l), -t * t * c[j] * c[l]);
        }
    }
    PoleExpansion::new(b.poles.clone(), vec![ZERO; n], double, cross)
}

/// One point of the pointwise comparison between printed and derived forms.
#[derive(Debug, Clone, Serialize)]
pub struct FormResidual {
    pub z: Pair,
    pub printed: Pair,
    pub derived: Pair,
    pub abs_diff: f64,
}

/// The Schwarzian coefficients in the closed form usually printed for
/// Schwarz-Christoffel maps, next to the derived expansion.
///
/// The printed double-pole coefficient `C_j = c_j - c_j^2 / 2` disagrees with
/// direct differentiation, which gives `-c_j - c_j^2 / 2 = (1 - alpha_j^2) / 2`.
/// `literal` keeps the printed coefficients verbatim; `resolved` is the
/// expansion with the corrected double term and the cross sum over `j < l`,
/// which coincides with the derived `b' - b^2 / 2`.
#[derive(Debug, Clone, Serialize)]
pub struct PrintedForm {
    /// `C_j = c_j - c_j^2 / 2`, as printed.
    pub c_j: Vec<f64>,
    /// `C_jl = c_j c_l` for `j < l`.
    pub c_jl: Vec<((usize, usize), f64)>,
    pub literal: PoleExpansion,
    pub resolved: PoleExpansion,
    pub samples: Vec<FormResidual>,
    pub max_literal_residual: f64,
    pub max_resolved_residual: f64,
}

/// Fixed sample points for the printed-versus-derived comparison.
pub fn printed_form_sample_points(poles: &[f64]) -> Vec<C64> {
    let lo = poles[0];
    let hi = poles[poles.len() - 1];
    let span = (hi - lo).max(1.0);
    (0..10)
        .map(|k| {
            let s = k as f64 / 9.0;
            C64::new(lo - 0.25 * span + 1.5 * span * s, 0.1 * span + 0.3 * span * (k % 4) as f64)
        })
        .collect()
}

pub fn printed_schwarzian_form(p: &PolygonSpec) -> PrintedForm {
    let b = log_derivative_from_polygon(p);
    let derived = schwarzian_from_log_derivative(&b).expect("log-derivative input");
    let c: Vec<f64> = p.alphas().iter().map(|a| a - 1.0).collect();
    let n = c.len();
    let c_j: Vec<f64> = c.iter().map(|c| c - 0.5 * c * c).collect();
    let mut c_jl = Vec::new();
    let mut literal_cross = BTreeMap::new();
    let mut resolved_cross = BTreeMap::new();
    for j in 0..n {
        for l in j + 1..n {
            let v = c[j] * c[l];
            c_jl.push(((j, l), v));
            literal_cross.insert((j, l), C64::new(-v, 0.0));
            resolved_cross.insert((j, l), C64::new(-v, 0.0));
        }
    }
    let poles = p.prevertices().to_vec();
    let literal = PoleExpansion::new(
        poles.clone(),
        vec![ZERO; n],
        c_j.iter().map(|v| C64::new(*v, 0.0)).collect(),
        literal_cross,
    )
    .expect("valid poles");
    let resolved = PoleExpansion::new(
        poles.clone(),
        vec![ZERO; n],
        c.iter().map(|c| C64::new(-c - 0.5 * c * c, 0.0)).collect(),
        resolved_cross,
    )
    .expect("valid poles");

    let mut samples = Vec::new();
    let mut max_literal_residual: f64 = 0.0;
    let mut max_resolved_residual: f64 = 0.0;
    for z in printed_form_sample_points(&poles) {
        let d = derived.evaluate(z).expect("sample points avoid poles");
        let lit = literal.evaluate(z).expect("sample points avoid poles");
        let res = resolved.evaluate(z).expect("sample points avoid poles");
        max_literal_residual = max_literal_residual.max((lit - d).norm());
        max_resolved_residual = max_resolved_residual.max((res - d).norm());
        samples.push(FormResidual { z: z.into(), printed: lit.into(), derived: d.into(), abs_diff: (lit - d).norm() });
    }
    PrintedForm { c_j, c_jl, literal, resolved, samples, max_literal_residual, max_resolved_residual }
}

/// A point `t` on the homotopy whose members have log-derivative `t b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyFamily {
    base: PoleExpansion,
    t: f64,
}

impl HomotopyFamily {
    pub fn new(base: PoleExpansion, t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::ParameterRange(t));
        }
        if !base.is_log_derivative() {
            return Err(Error::NotLogDerivative);
        }
        Ok(Self { base, t })
    }

    pub fn base(&self) -> &PoleExpansion {
        &self.base
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `t b' - (t^2 / 2) b^2`, the Schwarzian of the map with log-derivative `t b`.
pub fn homotopy_schwarzian(h: &HomotopyFamily) -> PoleExpansion {
    homotopy_coefficients(&h.base, h.t).expect("family holds a log-derivative")
}

/// The undifferentiated reading `t b - (t^2 / 2) b^2`, kept for comparison only.
pub fn homotopy_schwarzian_literal(h: &HomotopyFamily) -> PoleExpansion {
    let t = h.t;
    let mut e = homotopy_coefficients(&h.base, t).expect("family holds a log-derivative");
    for (j, c) in h.base.simple.iter().enumerate() {
        e.simple[j] = c * t;
        e.double[j] = -0.5 * t * t * c * c;
    }
    e
}

#[derive(Serialize, Deserialize)]
struct CrossWire {
    j: usize,
    l: usize,
    c: Pair,
}

#[derive(Serialize, Deserialize)]
struct ExpansionWire {
    poles: Vec<f64>,
    simple: Vec<Pair>,
    double: Vec<Pair>,
    cross: Vec<CrossWire>,
}

impl From<PoleExpansion> for ExpansionWire {
    fn from(e: PoleExpansion) -> Self {
        ExpansionWire {
            poles: e.poles,
            simple: e.simple.into_iter().map(Pair::from).collect(),
            double: e.double.into_iter().map(Pair::from).collect(),
            cross: e.cross.into_iter().map(|((j, l), c)| CrossWire { j, l, c: c.into() }).collect(),
        }
    }
}

impl TryFrom<ExpansionWire> for PoleExpansion {
    type Error = Error;
    fn try_from(w: ExpansionWire) -> Result<Self> {
        let mut cross = BTreeMap::new();
        for c in w.cross {
            if cross.insert((c.j, c.l), c.c.into()).is_some() {
                return Err(Error::Invalid(format!("duplicate cross term ({}, {})", c.j, c.l)));
            }
        }
        PoleExpansion::new(
            w.poles,
            w.simple.into_iter().map(C64::from).collect(),
            w.double.into_iter().map(C64::from).collect(),
            cross,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::validate_polygon;

    fn square() -> PolygonSpec {
        validate_polygon(&[0.5; 4], &[0.0, 1.0, 2.0, 3.0], C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap()
    }

    fn re(v: &[C64]) -> Vec<f64> {
        v.iter().map(|c| c.re).collect()
    }

    #[test]
    fn square_log_derivative_coefficients() {
        let b = log_derivative_from_polygon(&square());
        assert_eq!(re(b.simple_coeffs()), vec![-0.5; 4]);
        assert!(b.is_log_derivative());
    }

    #[test]
    fn triangle_coefficients_sum_to_minus_two() {
        let t = validate_polygon(&[1.0 / 3.0; 3], &[0.0, 1.0, 2.0], C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap();
        let b = log_derivative_from_polygon(&t);
        for c in b.simple_coeffs() {
            assert!((c.re + 2.0 / 3.0).abs() < 1e-15);
        }
        let s: f64 = b.simple_coeffs().iter().map(|c| c.re).sum();
        assert!((s + 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_log_derivative_has_zero_schwarzian() {
        let b = PoleExpansion::zero(vec![0.0, 1.0]).unwrap();
        let s = schwarzian_from_log_derivative(&b).unwrap();
        assert_eq!(s.evaluate(C64::new(0.3, 2.0)).unwrap(), ZERO);
    }

    #[test]
    fn single_pole_double_coefficient() {
        let b = PoleExpansion::from_simple(vec![0.0], vec![C64::new(-0.5, 0.0)]).unwrap();
        let s = schwarzian_from_log_derivative(&b).unwrap();
        assert_eq!(s.double_coeffs()[0], C64::new(0.375, 0.0));
    }

    #[test]
    fn schwarzian_rejects_double_terms() {
        let b = log_derivative_from_polygon(&square());
        let s = schwarzian_from_log_derivative(&b).unwrap();
        assert_eq!(schwarzian_from_log_derivative(&s), Err(Error::NotLogDerivative));
    }

    #[test]
    fn evaluate_simple_pole_at_i() {
        let e = PoleExpansion::from_simple(vec![0.0], vec![C64::new(1.0, 0.0)]).unwrap();
        let v = e.evaluate(C64::new(0.0, 1.0)).unwrap();
        assert!((v - C64::new(0.0, -1.0)).norm() < 1e-16);
    }

    #[test]
    fn evaluate_near_pole_reports_index() {
        let e = PoleExpansion::from_simple(vec![0.0, 2.0], vec![C64::new(1.0, 0.0); 2]).unwrap();
        let err = e.evaluate(C64::new(2.0, 1e-13)).unwrap_err();
        assert_eq!(err, Error::NearPole { index: 1, tol: NEAR_POLE_TOL });
    }

    #[test]
    fn printed_form_square() {
        let f = printed_schwarzian_form(&square());
        for c in &f.c_j {
            assert!((c + 0.625).abs() < 1e-15);
        }
        for (_, v) in &f.c_jl {
            assert_eq!(*v, 0.25);
        }
        assert_eq!(f.samples.len(), 10);
        assert!(f.max_resolved_residual < 1e-12);
        assert!(f.max_literal_residual > 1e-3);
    }

    #[test]
    fn homotopy_rejects_out_of_range_t() {
        let b = log_derivative_from_polygon(&square());
        assert!(HomotopyFamily::new(b.clone(), 0.0).is_err());
        assert!(HomotopyFamily::new(b.clone(), 1.5).is_err());
        assert!(HomotopyFamily::new(b, 1.0).is_ok());
    }

    #[test]
    fn homotopy_at_one_equals_schwarzian() {
        let b = log_derivative_from_polygon(&square());
        let h = HomotopyFamily::new(b.clone(), 1.0).unwrap();
        assert_eq!(homotopy_schwarzian(&h), schwarzian_from_log_derivative(&b).unwrap());
    }

    #[test]
    fn homotopy_vanishes_as_t_shrinks() {
        let b = log_derivative_from_polygon(&square());
        let h = HomotopyFamily::new(b, 1e-9).unwrap();
        let s = homotopy_schwarzian(&h);
        let m = s.double_coeffs().iter().chain(s.cross_coeffs().values()).map(|c| c.norm()).fold(0.0, f64::max);
        assert!(m < 1e-9);
    }

    #[test]
    fn literal_homotopy_differs_by_simple_terms() {
        let b = log_derivative_from_polygon(&square());
        let h = HomotopyFamily::new(b.clone(), 0.5).unwrap();
        let lit = homotopy_schwarzian_literal(&h);
        assert_eq!(re(lit.simple_coeffs()), vec![-0.25; 4]);
    }

    #[test]
    fn json_shape() {
        let b = log_derivative_from_polygon(&square());
        let s = schwarzian_from_log_derivative(&b).unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["poles"].as_array().unwrap().len(), 4);
        assert_eq!(v["double"][0], serde_json::json!([0.375, 0.0]));
        assert_eq!(v["cross"][0], serde_json::json!({"j": 0, "l": 1, "c": [-0.25, -0.0]}));
        let back: PoleExpansion = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
