//! Hyperbolic sup-norms of quadratic differentials and pre-Schwarzians.
//!
//! Estimates come from a coarse grid over the model (laid out in hyperbolic
//! polar coordinates) followed by a pattern search with hyperbolically scaled
//! steps from the best grid cells. Values are lower bounds of the true
//! supremum. Each refinement level reruns the grid at doubled resolution and
//! the reported value is the running maximum over levels, so it never
//! decreases when the budget grows.

use std::f64::consts::PI;

use serde::{Serialize, Serializer};

use crate::io::Pair;
use crate::{Error, Holomorphic, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormConvention {
    /// `4 sup y^2 |phi|` on the upper half-plane.
    #[serde(rename = "hp4")]
    HalfPlane4,
    /// `sup y^2 |phi|` on the upper half-plane.
    #[serde(rename = "hp1")]
    HalfPlane1,
    /// `sup (|z|^2 - 1)^2 |phi|` on a disk model.
    #[serde(rename = "disk")]
    DiskSchwarzian,
    /// `sup (|z|^2 - 1) |z psi(z)|` on the exterior disk.
    #[serde(rename = "becker")]
    BeckerPreSchwarzian,
}

impl NormConvention {
    pub fn name(&self) -> &'static str {
        match self {
            NormConvention::HalfPlane4 => "hp4",
            NormConvention::HalfPlane1 => "hp1",
            NormConvention::DiskSchwarzian => "disk",
            NormConvention::BeckerPreSchwarzian => "becker",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            NormConvention::HalfPlane4 => "4 sup_{Im z > 0} y^2 |phi(z)|",
            NormConvention::HalfPlane1 => "sup_{Im z > 0} y^2 |phi(z)|",
            NormConvention::DiskSchwarzian => "sup (|z|^2 - 1)^2 |phi(z)| over the disk model",
            NormConvention::BeckerPreSchwarzian => "sup_{|z| > 1} (|z|^2 - 1) |z psi(z)|",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hp4" => Ok(NormConvention::HalfPlane4),
            "hp1" => Ok(NormConvention::HalfPlane1),
            "disk" => Ok(NormConvention::DiskSchwarzian),
            "becker" => Ok(NormConvention::BeckerPreSchwarzian),
            other => Err(Error::Invalid(format!("unknown norm convention {other:?}"))),
        }
    }
}

/// Region over which a supremum is taken, with a coordinate `q > 0` measuring
/// the distance to the ideal boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `z = p + i q`
    UpperHalfPlane,
    /// `z = p - i q`
    LowerHalfPlane,
    /// `z = (1 + q) e^{i p}`
    ExteriorDisk,
    /// `z = (1 - q) e^{i p}`, `q <= 1`
    InteriorDisk,
}

/// Which disk a Cayley transport lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskSide {
    /// `|w| > 1`, with `w = inf` going to `i`.
    Exterior,
    /// `|w| < 1`, with `w = 0` going to `i`.
    Interior,
}

impl Model {
    fn point(&self, p: f64, q: f64) -> C64 {
        match self {
            Model::UpperHalfPlane => C64::new(p, q),
            Model::LowerHalfPlane => C64::new(p, -q),
            Model::ExteriorDisk => C64::from_polar(1.0 + q, p),
            Model::InteriorDisk => C64::from_polar(1.0 - q, p),
        }
    }

    /// Grid point with hyperbolic polar coordinates `(theta, eps)` where
    /// `1 - eps` is the Euclidean radius in the unit disk.
    fn grid_coords(&self, theta: f64, eps: f64) -> (f64, f64) {
        match self {
            Model::UpperHalfPlane | Model::LowerHalfPlane => {
                let w = C64::from_polar(1.0 - eps, theta);
                let d = (C64::new(1.0, 0.0) - w).norm_sqr();
                (-2.0 * w.im / d, eps * (2.0 - eps) / d)
            }
            Model::ExteriorDisk => (theta, eps / (1.0 - eps)),
            Model::InteriorDisk => (theta, eps),
        }
    }

    fn step(&self, p: f64, q: f64, h: f64, dir: f64) -> (f64, f64) {
        let lateral = match self {
            Model::UpperHalfPlane | Model::LowerHalfPlane => q,
            Model::ExteriorDisk | Model::InteriorDisk => q.min(1.0),
        };
        let p2 = p + h * lateral * dir.cos();
        let mut q2 = q * (h * dir.sin()).exp();
        if *self == Model::InteriorDisk {
            q2 = q2.min(1.0);
        }
        (p2, q2)
    }
}

/// Sampling budget. Level `l` uses `base_angles * 2^l` angles and
/// `base_depths * 2^l` depths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBudget {
    pub levels: usize,
    pub base_angles: usize,
    pub base_depths: usize,
    /// Number of best grid cells refined by pattern search.
    pub starts: usize,
    pub max_iters: usize,
    /// Smallest boundary-distance coordinate visited.
    pub floor: f64,
}

impl Default for SupBudget {
    fn default() -> Self {
        SupBudget { levels: 3, base_angles: 96, base_depths: 24, starts: 6, max_iters: 4000, floor: 1e-10 }
    }
}

impl SupBudget {
    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }
}

/// Relative change between the last two levels above which an estimate is
/// flagged as not stabilized.
pub const STABILIZATION_TOL: f64 = 1e-4;

fn pair_ser<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Pair::from(*z).serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub convention: NormConvention,
    pub value: f64,
    #[serde(serialize_with = "pair_ser")]
    pub argmax: C64,
    pub stabilized: bool,
    pub samples: usize,
    pub refinement_depth: usize,
}

/// Raw result of [`sup_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupResult {
    pub value: f64,
    pub argmax: C64,
    pub samples: usize,
    pub levels: usize,
    pub stabilized: bool,
    /// Value reached at each level, in order.
    pub level_values: [f64; 8],
}

/// Estimates `sup f` over `model`; `f(z, q)` receives the model point and its
/// boundary-distance coordinate and returns `None` where it is undefined.
pub fn sup_search<F>(model: Model, budget: &SupBudget, f: F) -> SupResult
where
    F: Fn(C64, f64) -> Option<f64> + Sync,
{
    let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    let mut samples = 0;
    let mut level_values = [f64::NAN; 8];
    let mut previous = f64::NAN;
    let mut stabilized = false;
    let levels = budget.levels.clamp(1, 8);
    for level in 0..levels {
        let n_theta = budget.base_angles << level;
        let n_depth = budget.base_depths << level;
        let eps_hi: f64 = 0.95;
        let eps_lo: f64 = 1e-6;
        let depths: Vec<f64> = (0..n_depth)
            .map(|m| eps_hi * (eps_lo / eps_hi).powf(m as f64 / (n_depth - 1).max(1) as f64))
            .collect();
        let rows: Vec<Vec<(f64, f64, f64)>> = crate::par::map(&depths, |&eps| {
            (0..n_theta)
                .filter_map(|k| {
                    let theta = 2.0 * PI * (k as f64 + 0.5) / n_theta as f64;
                    let (p, q) = model.grid_coords(theta, eps);
                    if !(q > 0.0 && p.is_finite() && q.is_finite()) {
                        return None;
                    }
                    f(model.point(p, q), q).filter(|v| v.is_finite()).map(|v| (v, p, q))
                })
                .collect()
        });
        let mut cells: Vec<(f64, f64, f64)> = rows.into_iter().flatten().collect();
        samples += n_theta * n_depth;
        cells.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        cells.truncate(budget.starts.max(1));
        let refined: Vec<(f64, f64, f64, usize)> =
            crate::par::map(&cells, |&(v, p, q)| pattern_search(model, budget, &f, v, p, q));
        for (v, p, q, evals) in refined {
            samples += evals;
            if v > best.0 {
                best = (v, model.point(p, q));
            }
        }
        if best.0.is_finite() {
            level_values[level] = best.0;
        }
        if level > 0 {
            let change = (best.0 - previous).abs() / best.0.abs().max(1e-300);
            stabilized = change <= STABILIZATION_TOL || best.0 == previous;
        }
        previous = best.0;
    }
    let value = if best.0.is_finite() { best.0 } else { 0.0 };
    SupResult { value, argmax: best.1, samples, levels, stabilized: stabilized || levels == 1, level_values }
}

fn pattern_search<F>(model: Model, budget: &SupBudget, f: &F, v0: f64, p0: f64, q0: f64) -> (f64, f64, f64, usize)
where
    F: Fn(C64, f64) -> Option<f64>,
{
    let (mut v, mut p, mut q) = (v0, p0, q0);
    let mut h = 0.25;
    let mut evals = 0;
    for _ in 0..budget.max_iters {
        let mut improved = None;
        for k in 0..8 {
            let dir = k as f64 * PI / 4.0;
            let (p2, q2) = model.step(p, q, h, dir);
            if !(q2 >= budget.floor) || !p2.is_finite() || !q2.is_finite() {
                continue;
            }
            evals += 1;
            if let Some(v2) = f(model.point(p2, q2), q2) {
                if v2.is_finite() && v2 > improved.map_or(v, |(b, _, _)| b) {
                    improved = Some((v2, p2, q2));
                }
            }
        }
        match improved {
            Some((v2, p2, q2)) => {
                v = v2;
                p = p2;
                q = q2;
                h = (h * 1.5).min(0.5);
            }
            None => {
                h *= 0.5;
                if h < 1e-9 {
                    break;
                }
            }
        }
    }
    (v, p, q, evals)
}

fn finite(v: C64) -> Option<C64> {
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

/// Hyperbolic sup-norm of `phi` in the given convention. Half-plane
/// conventions sample the upper half-plane; disk conventions the exterior disk.
pub fn hyperbolic_sup_norm(phi: &(impl Holomorphic + ?Sized), conv: NormConvention, budget: &SupBudget) -> NormEstimate {
    match conv {
        NormConvention::DiskSchwarzian => disk_sup_norm(phi, DiskSide::Exterior, budget),
        _ => {
            let (model, factor): (Model, fn(C64, f64) -> f64) = match conv {
                NormConvention::HalfPlane1 | NormConvention::HalfPlane4 => (Model::UpperHalfPlane, |_, q| q * q),
                _ => (Model::ExteriorDisk, |z, q| q * (2.0 + q) * z.norm()),
            };
            let r = sup_search(model, budget, |z, q| phi.eval(z).ok().and_then(finite).map(|v| factor(z, q) * v.norm()));
            let scale = if conv == NormConvention::HalfPlane4 { 4.0 } else { 1.0 };
            NormEstimate {
                convention: conv,
                value: scale * r.value,
                argmax: r.argmax,
                stabilized: r.stabilized,
                samples: r.samples,
                refinement_depth: r.levels,
            }
        }
    }
}

/// `sup (|z|^2 - 1)^2 |psi(z)|` over the chosen disk.
pub fn disk_sup_norm(psi: &(impl Holomorphic + ?Sized), side: DiskSide, budget: &SupBudget) -> NormEstimate {
    let (model, sign) = match side {
        DiskSide::Exterior => (Model::ExteriorDisk, 1.0),
        DiskSide::Interior => (Model::InteriorDisk, -1.0),
    };
    let r = sup_search(model, budget, |z, q| {
        let w = q * (2.0 + sign * q);
        psi.eval(z).ok().and_then(finite).map(|v| w * w * v.norm())
    });
    NormEstimate {
        convention: NormConvention::DiskSchwarzian,
        value: r.value,
        argmax: r.argmax,
        stabilized: r.stabilized,
        samples: r.samples,
        refinement_depth: r.levels,
    }
}

/// Half-plane norms in both conventions from a single search; `hp4` is
/// exactly four times `hp1` with the same maximizer.
pub fn half_plane_norms(phi: &(impl Holomorphic + ?Sized), budget: &SupBudget) -> (NormEstimate, NormEstimate) {
    let hp1 = hyperbolic_sup_norm(phi, NormConvention::HalfPlane1, budget);
    let hp4 = NormEstimate { convention: NormConvention::HalfPlane4, value: 4.0 * hp1.value, ..hp1 };
    (hp1, hp4)
}

/// Cayley map from the chosen disk onto the upper half-plane and its derivative.
pub fn cayley(side: DiskSide, w: C64) -> Result<(C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match side {
        DiskSide::Exterior => {
            if (w - one).norm() < 1e-15 {
                return Err(Error::OutsideDomain("Cayley pole w = 1".into()));
            }
            let d = w - one;
            Ok((i * (w + one) / d, -2.0 * i / (d * d)))
        }
        DiskSide::Interior => {
            if (one - w).norm() < 1e-15 {
                return Err(Error::OutsideDomain("Cayley pole w = 1".into()));
            }
            let d = one - w;
            Ok((i * (one + w) / d, 2.0 * i / (d * d)))
        }
    }
}

/// Inverse of [`cayley`].
pub fn cayley_inverse(side: DiskSide, z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    match side {
        DiskSide::Exterior => (z + i) / (z - i),
        DiskSide::Interior => (z - i) / (z + i),
    }
}

/// Quadratic differential pulled back to a disk: `psi(w) = phi(T(w)) T'(w)^2`.
pub struct Transported<'a, H: ?Sized> {
    pub phi: &'a H,
    pub side: DiskSide,
}

pub fn cayley_transport<H: Holomorphic + ?Sized>(phi: &H, side: DiskSide) -> Transported<'_, H> {
    Transported { phi, side }
}

impl<H: Holomorphic + ?Sized> Holomorphic for Transported<'_, H> {
    fn eval(&self, w: C64) -> Result<C64> {
        let (z, dz) = cayley(self.side, w)?;
        Ok(self.phi.eval(z)? * dz * dz)
    }
}

/// Log-derivative pulled back to a disk: `b(T(w)) T'(w) + T''(w) / T'(w)`.
pub struct TransportedLogDerivative<'a, H: ?Sized> {
    pub b: &'a H,
    pub side: DiskSide,
}

impl<H: Holomorphic + ?Sized> Holomorphic for TransportedLogDerivative<'_, H> {
    fn eval(&self, w: C64) -> Result<C64> {
        let (z, dz) = cayley(self.side, w)?;
        let one = C64::new(1.0, 0.0);
        let second_over_first = match self.side {
            DiskSide::Exterior => -2.0 / (w - one),
            DiskSide::Interior => 2.0 / (one - w),
        };
        Ok(self.b.eval(z)? * dz + second_over_first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic(c: f64) -> impl Fn(C64) -> C64 + Sync {
        move |z: C64| C64::new(c, 0.0) / (z + C64::new(0.0, 1.0)).powi(4)
    }

    /// Golden-section maximization on [a, b].
    fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        f(0.5 * (a + b))
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let z = |_: C64| C64::new(0.0, 0.0);
        let e = hyperbolic_sup_norm(&z, NormConvention::HalfPlane1, &SupBudget::default());
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn quartic_matches_one_dimensional_oracle() {
        let c = 2.5;
        let phi = quartic(c);
        let oracle = golden_max(|y| y * y * c / (y + 1.0).powi(4), 1e-6, 50.0);
        let e = hyperbolic_sup_norm(&phi, NormConvention::HalfPlane1, &SupBudget::default());
        assert!((e.value - oracle).abs() < 1e-6, "{} vs {oracle}", e.value);
        assert!(e.argmax.re.abs() < 1e-3 && (e.argmax.im - 1.0).abs() < 1e-3);
        assert!(e.stabilized);
    }

    #[test]
    fn convention_ratio_is_exact() {
        let phi = quartic(1.0);
        let (hp1, hp4) = half_plane_norms(&phi, &SupBudget::default());
        assert_eq!(hp4.value, 4.0 * hp1.value);
        assert_eq!(hp4.argmax, hp1.argmax);
    }

    #[test]
    fn monotone_in_levels() {
        let phi = quartic(1.0);
        let mut last = 0.0;
        for levels in 1..=4 {
            let e = hyperbolic_sup_norm(&phi, NormConvention::HalfPlane1, &SupBudget::default().with_levels(levels));
            assert!(e.value >= last);
            last = e.value;
        }
    }

    #[test]
    fn cayley_round_trip() {
        for side in [DiskSide::Exterior, DiskSide::Interior] {
            let z = C64::new(0.3, 0.7);
            let w = cayley_inverse(side, z);
            let (z2, _) = cayley(side, w).unwrap();
            assert!((z - z2).norm() < 1e-14);
        }
        assert!(cayley_inverse(DiskSide::Exterior, C64::new(0.3, 0.7)).norm() > 1.0);
        assert!(cayley_inverse(DiskSide::Interior, C64::new(0.3, 0.7)).norm() < 1.0);
    }

    #[test]
    fn transport_of_zero_is_zero() {
        let z = |_: C64| C64::new(0.0, 0.0);
        let t = cayley_transport(&z, DiskSide::Exterior);
        assert_eq!(t.eval(C64::new(2.0, 0.5)).unwrap(), C64::new(0.0, 0.0));
        assert!(t.eval(C64::new(1.0, 0.0)).is_err());
    }
}
