//! Harmonic Beltrami coefficients `nu(z) = -s y^2 phi(conj z)` on the lower
//! half-plane.

use serde::Serialize;

use crate::io::Pair;
use crate::norms::{half_plane_norms, sup_search, Model, SupBudget};
use crate::rational::PoleExpansion;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct BeltramiField {
    pub source_phi: PoleExpansion,
    pub scale: f64,
}

pub fn ahlfors_weill_field(phi: &PoleExpansion, scale: f64) -> Result<BeltramiField> {
    if !scale.is_finite() {
        return Err(Error::NonFinite("field scale"));
    }
    Ok(BeltramiField { source_phi: phi.clone(), scale })
}

impl BeltramiField {
    pub fn eval(&self, z: C64) -> Result<C64> {
        if !(z.im < 0.0) {
            return Err(Error::OutsideDomain(format!("{z} (field lives on Im z < 0)")));
        }
        let y = z.im;
        Ok(-self.scale * y * y * self.source_phi.evaluate(z.conj())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldNorm {
    pub value: f64,
    pub argmax: Pair,
    pub stabilized: bool,
    pub samples: usize,
    pub refinement_depth: usize,
}

/// Sup of `|nu|` over the lower half-plane.
pub fn field_sup_norm(field: &BeltramiField, budget: &SupBudget) -> FieldNorm {
    let r = sup_search(Model::LowerHalfPlane, budget, |z, _| field.eval(z).ok().map(|v| v.norm()).filter(|v| v.is_finite()));
    FieldNorm {
        value: r.value,
        argmax: r.argmax.into(),
        stabilized: r.stabilized,
        samples: r.samples,
        refinement_depth: r.levels,
    }
}

/// Field norm next to the norms of its source in both half-plane conventions.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub scale: f64,
    pub field_norm: f64,
    pub norm_hp1: f64,
    pub norm_hp4: f64,
    /// `scale * norm_hp1`, the value the field norm must reproduce.
    pub predicted: f64,
    /// `field_norm < 1`.
    pub admissible: bool,
    /// `norm_hp1 < 2`.
    pub below_two_hp1: bool,
    /// `norm_hp4 < 2`.
    pub below_two_hp4: bool,
    pub stabilized: bool,
}

pub fn admissibility(field: &BeltramiField, budget: &SupBudget) -> AdmissibilityReport {
    let norm = field_sup_norm(field, budget);
    let (hp1, hp4) = half_plane_norms(&field.source_phi, budget);
    AdmissibilityReport {
        scale: field.scale,
        field_norm: norm.value,
        norm_hp1: hp1.value,
        norm_hp4: hp4.value,
        predicted: field.scale.abs() * hp1.value,
        admissible: norm.value < 1.0,
        below_two_hp1: hp1.value < 2.0,
        below_two_hp4: hp4.value < 2.0,
        stabilized: norm.stabilized && hp1.stabilized,
    }
}

/// `|nu|` on an `nx` by `ny` grid over `[x0, x1] x [-y1, -y0]`, as rows of
/// `(x, y, |nu|)`; points at conjugate poles give NaN.
pub fn field_grid(field: &BeltramiField, x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Vec<(f64, f64, f64)>> {
    if nx < 2 || ny < 2 {
        return Err(Error::TooFewSamples { got: nx.min(ny), need: 2 });
    }
    if !(y.0 > 0.0 && y.1 > y.0 && x.1 > x.0) {
        return Err(Error::Invalid("grid needs x0 < x1 and 0 < y0 < y1".into()));
    }
    let rows: Vec<usize> = (0..ny).collect();
    let out = crate::par::map(&rows, |&j| {
        let yy = -(y.0 + (y.1 - y.0) * j as f64 / (ny - 1) as f64);
        (0..nx)
            .map(|i| {
                let xx = x.0 + (x.1 - x.0) * i as f64 / (nx - 1) as f64;
                let v = field.eval(C64::new(xx, yy)).map_or(f64::NAN, |v| v.norm());
                (xx, yy, v)
            })
            .collect::<Vec<_>>()
    });
    Ok(out.into_iter().flatten().collect())
}

pub fn grid_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("x,y,abs_nu\n");
    for (x, y, v) in rows {
        out.push_str(&format!("{x:.12e},{y:.12e},{v:.12e}\n"));
    }
    out
}
