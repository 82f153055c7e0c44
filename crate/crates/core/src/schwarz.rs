//! The Schwarz equation `S_w = phi`, solved as `w = u1 / u2` for two solutions
//! of `u'' + (phi / 2) u = 0` normalized at `z = i`.
//!
//! Boundary traces follow the real axis with small semicircular detours over
//! the poles and close through infinity in the chart `zeta = -1/z`, where
//! `v(zeta) = zeta u(-1/zeta)` solves the companion equation for
//! `phi(-1/zeta) zeta^-4`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::intersect::{first_self_intersection, min_gap_beyond};
use crate::io::Pair;
use crate::jet::Jet;
use crate::norms::{half_plane_norms, SupBudget};
use crate::ode::{CoefficientSource, CompanionState, TaylorIntegrator, TaylorOptions};
use crate::rational::{homotopy_schwarzian, HomotopyFamily, PoleExpansion};
use crate::{Error, Result, C64};

/// Minimum distance between an integration path and a pole of `phi`.
pub const PATH_CLEARANCE: f64 = 1e-3;
/// Default radius of the semicircles stepping over poles on the real axis.
pub const DETOUR_RADIUS: f64 = 1e-4;
/// Minimum number of trace samples per pole.
pub const SAMPLES_PER_POLE: usize = 8;
/// Relative gap below which a simple trace is reported as indeterminate.
pub const INDETERMINATE_GAP: f64 = 1e-6;

const I: C64 = C64::new(0.0, 1.0);

/// `phi` in the coordinate `z`.
pub struct PlaneChart<'a> {
    phi: &'a PoleExpansion,
}

impl<'a> PlaneChart<'a> {
    pub fn new(phi: &'a PoleExpansion) -> Self {
        PlaneChart { phi }
    }
}

impl CoefficientSource for PlaneChart<'_> {
    fn taylor(&self, z0: C64, order: usize) -> Jet {
        self.phi.taylor(z0, order)
    }

    fn singular_distance(&self, z0: C64) -> f64 {
        self.phi.nearest_pole(z0).1
    }
}

/// `phi(-1/zeta) zeta^-4` in the coordinate `zeta = -1/z`; `zeta = 0` is
/// always treated as singular.
pub struct InfinityChart<'a> {
    phi: &'a PoleExpansion,
}

impl<'a> InfinityChart<'a> {
    pub fn new(phi: &'a PoleExpansion) -> Self {
        InfinityChart { phi }
    }

    pub fn eval(&self, zeta: C64) -> Result<C64> {
        let z = -zeta.inv();
        Ok(self.phi.evaluate(z)? * zeta.powi(-4))
    }
}

impl CoefficientSource for InfinityChart<'_> {
    fn taylor(&self, zeta0: C64, order: usize) -> Jet {
        let g: Vec<Jet> = self
            .phi
            .poles()
            .iter()
            .map(|&a| {
                if a == 0.0 {
                    Jet::variable(zeta0, order).scale(C64::new(-1.0, 0.0))
                } else {
                    Jet::geometric(zeta0 + 1.0 / a, order).scale(C64::new(1.0 / (a * a), 0.0)).add_constant(C64::new(-1.0 / a, 0.0))
                }
            })
            .collect();
        let f = self.phi.combine_jets(&g);
        let r2 = Jet::geometric(zeta0, order).square();
        &f * &r2.square()
    }

    fn singular_distance(&self, zeta0: C64) -> f64 {
        self.phi
            .poles()
            .iter()
            .filter(|&&a| a != 0.0)
            .map(|&a| (zeta0 + 1.0 / a).norm())
            .fold(zeta0.norm(), f64::min)
    }
}

/// State in the infinity chart from a state in the plane chart.
fn to_infinity(s: &CompanionState) -> CompanionState {
    let zeta = -s.z.inv();
    let mut out = CompanionState { z: zeta, u: s.u, du: s.du };
    for k in 0..2 {
        out.u[k] = zeta * s.u[k];
        out.du[k] = s.u[k] + s.du[k] / zeta;
    }
    out
}

/// State in the plane chart from a state in the infinity chart.
fn from_infinity(s: &CompanionState) -> CompanionState {
    let zeta = s.z;
    let mut out = CompanionState { z: -zeta.inv(), u: s.u, du: s.du };
    for k in 0..2 {
        out.u[k] = s.u[k] / zeta;
        out.du[k] = zeta * s.du[k] - s.u[k];
    }
    out
}

fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// Companion solutions continued along a polyline starting at `i`.
#[derive(Debug, Clone)]
pub struct SchwarzSolution {
    pub phi: PoleExpansion,
    pub path: Vec<C64>,
    /// States at the path vertices.
    pub states: Vec<CompanionState>,
    /// Largest relative Wronskian deviation from 1 seen while integrating.
    pub wronskian_drift: f64,
    pub steps: usize,
}

impl SchwarzSolution {
    /// `w = u1 / u2` at the path vertices.
    pub fn values(&self) -> Vec<C64> {
        self.states.iter().map(CompanionState::ratio).collect()
    }

    pub fn end(&self) -> &CompanionState {
        self.states.last().expect("path is nonempty")
    }
}

fn check_point(z: C64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("path vertex"));
    }
    if z.im < 0.0 {
        return Err(Error::OutsideDomain(format!("{z}")));
    }
    Ok(())
}

/// Integrates the normalized companion solutions along `path`, which must start
/// at `i`, stay in the closed upper half-plane and keep [`PATH_CLEARANCE`]
/// from every pole.
pub fn solve_companion(phi: &PoleExpansion, path: &[C64], opts: &TaylorOptions) -> Result<SchwarzSolution> {
    let Some(&start) = path.first() else {
        return Err(Error::Invalid("empty path".into()));
    };
    if (start - I).norm() > 1e-15 {
        return Err(Error::Invalid(format!("path must start at i, got {start}")));
    }
    for z in path {
        check_point(*z)?;
    }
    for w in path.windows(2) {
        for &a in phi.poles() {
            let d = point_segment_distance(C64::new(a, 0.0), w[0], w[1]);
            if d < PATH_CLEARANCE {
                return Err(Error::PathNearSingularity { distance: d, required: PATH_CLEARANCE });
            }
        }
    }
    let chart = PlaneChart::new(phi);
    let mut it = TaylorIntegrator::new(&chart, *opts, C64::new(1.0, 0.0));
    let mut state = CompanionState::normalized(I);
    let mut states = vec![state];
    for &z in &path[1..] {
        state = it.advance(state, z)?;
        states.push(state);
    }
    Ok(SchwarzSolution {
        phi: phi.clone(),
        path: path.to_vec(),
        states,
        wronskian_drift: it.max_drift(),
        steps: it.steps(),
    })
}

/// `w(z)` continued along the straight segment from `i`.
pub fn map_value(phi: &PoleExpansion, z: C64, opts: &TaylorOptions) -> Result<C64> {
    Ok(solve_companion(phi, &[I, z], opts)?.end().ratio())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub detour_radius: f64,
    /// Points sampled on each detour semicircle, endpoints excluded.
    pub detour_samples: usize,
    pub vertex_images: bool,
    pub taylor: TaylorOptions,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { detour_radius: DETOUR_RADIUS, detour_samples: 6, vertex_images: true, taylor: TaylorOptions::default() }
    }
}

/// Image of the extended real line under `w`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryTrace {
    pub points: Vec<C64>,
    /// Boundary parameter `theta` of each point, `x = tan(theta / 2)`,
    /// increasing along the trace.
    pub params: Vec<f64>,
    pub simple: bool,
    /// Parameters at the start of the first pair of crossing segments.
    pub first_self_intersection: Option<(f64, f64)>,
    /// Smallest distance between segments more than a detour apart, relative
    /// to the trace diameter (capped at 1).
    pub min_gap: f64,
    /// Simple, but with a relative gap below [`INDETERMINATE_GAP`].
    pub indeterminate: bool,
    pub closure_residual: f64,
    pub wronskian_drift: f64,
    /// Extrapolated `w(a_j)`; `None` where the local exponent is not positive.
    pub vertex_images: Vec<Option<C64>>,
}

impl BoundaryTrace {
    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &self.points {
            lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (hi - lo).norm()
    }
}

/// `count` interior points of `(p, q)`, geometrically graded toward the
/// endpoints that are flagged singular; `offset` is the distance kept from
/// singular endpoints.
fn graded(p: f64, q: f64, count: usize, sing_p: bool, sing_q: bool, offset: f64) -> Vec<f64> {
    let len = q - p;
    let map_half = |s: f64, singular: bool, half: f64| -> f64 {
        if singular {
            offset * (half / offset).powf(s)
        } else {
            half * s
        }
    };
    match (sing_p, sing_q) {
        (false, false) => (1..=count).map(|k| p + len * k as f64 / (count + 1) as f64).collect(),
        (true, false) => (0..count).map(|k| p + map_half(k as f64 / count.max(1) as f64, true, len)).collect(),
        (false, true) => (0..count).rev().map(|k| q - map_half(k as f64 / count.max(1) as f64, true, len)).collect(),
        (true, true) => {
            let left = count / 2;
            let right = count - left;
            let half = 0.5 * len;
            let mut out: Vec<f64> =
                (0..left).map(|k| p + map_half(k as f64 / left.max(1) as f64, true, half)).collect();
            out.extend((0..right).rev().map(|k| q - map_half((k as f64 + 0.5) / right.max(1) as f64, true, half)));
            out
        }
    }
}

fn theta_of_x(x: f64) -> f64 {
    2.0 * x.atan()
}

fn theta_of_zeta(zeta: f64) -> f64 {
    PI + 2.0 * zeta.atan()
}

/// Traces `w` along the extended real line with at least `n_samples` points.
pub fn trace_boundary(phi: &PoleExpansion, n_samples: usize, opts: &TraceOptions) -> Result<BoundaryTrace> {
    let poles = phi.poles();
    let n = poles.len();
    let need = SAMPLES_PER_POLE * n.max(1);
    if n_samples < need {
        return Err(Error::TooFewSamples { got: n_samples, need });
    }
    let rho = opts.detour_radius;
    if !(rho > 0.0) {
        return Err(Error::Invalid("detour radius must be positive".into()));
    }
    let lo = poles.first().copied().unwrap_or(0.0).min(0.0);
    let hi = poles.last().copied().unwrap_or(0.0).max(0.0);
    let gap = 0.5 * (hi - lo) + 1.0;
    let (x_left, x_right) = (lo - gap, hi + gap);
    for w in poles.windows(2) {
        if w[1] - w[0] <= 2.0 * rho {
            return Err(Error::PathNearSingularity { distance: w[1] - w[0], required: 2.0 * rho });
        }
    }

    // Breakpoints of the real-axis leg and sample allocation.
    let mut knots = vec![(x_left, false)];
    knots.extend(poles.iter().map(|&a| (a, true)));
    knots.push((x_right, false));
    let pieces = knots.len(); // real intervals plus the leg through infinity
    let per_piece = (n_samples / pieces).max(SAMPLES_PER_POLE);

    let plane = PlaneChart::new(phi);
    let inf = InfinityChart::new(phi);
    let taylor = opts.taylor;
    let mut it_plane = TaylorIntegrator::new(&plane, taylor, C64::new(1.0, 0.0));
    let mut it_inf = TaylorIntegrator::new(&inf, taylor, C64::new(1.0, 0.0));

    let mut state = it_plane.advance(CompanionState::normalized(I), C64::new(x_left, 0.0))?;
    let start_w = state.ratio();
    let mut points = vec![start_w];
    let mut params = vec![theta_of_x(x_left)];

    for k in 0..knots.len() - 1 {
        let (p, sp) = knots[k];
        let (q, sq) = knots[k + 1];
        let xs = graded(p, q, per_piece, sp, sq, rho);
        for x in xs {
            if sp && x - p < rho * (1.0 + 1e-6) {
                continue;
            }
            if sq && q - x < rho * (1.0 + 1e-6) {
                continue;
            }
            state = it_plane.advance(state, C64::new(x, 0.0))?;
            points.push(state.ratio());
            params.push(theta_of_x(x));
        }
        if sq {
            // semicircle over the pole q, from q - rho to q + rho
            state = it_plane.advance(state, C64::new(q - rho, 0.0))?;
            points.push(state.ratio());
            params.push(theta_of_x(q - rho));
            let m = opts.detour_samples;
            for s in 1..=m + 1 {
                let ang = PI * (1.0 - s as f64 / (m + 1) as f64);
                let target = C64::new(q, 0.0) + C64::from_polar(rho, ang);
                state = it_plane.advance(state, target)?;
                let z = if s == m + 1 { C64::new(q + rho, 0.0) } else { target };
                points.push(state.ratio());
                params.push(theta_of_x(z.re));
            }
        }
    }
    state = it_plane.advance(state, C64::new(x_right, 0.0))?;

    // Leg through infinity in the zeta chart, with a semicircle over zeta = 0.
    let mut zs = to_infinity(&state);
    let (z_start, z_end) = (-1.0 / x_right, -1.0 / x_left);
    let zeta_rho = rho.min(0.25 * z_end.min(-z_start));
    let mut zeta_targets: Vec<f64> = graded(z_start, 0.0, per_piece / 2 + 1, false, true, zeta_rho);
    zeta_targets.retain(|&s| -s >= zeta_rho * (1.0 + 1e-6));
    for s in zeta_targets {
        zs = it_inf.advance(zs, C64::new(s, 0.0))?;
        points.push(zs.ratio());
        params.push(theta_of_zeta(s));
    }
    zs = it_inf.advance(zs, C64::new(-zeta_rho, 0.0))?;
    points.push(zs.ratio());
    params.push(theta_of_zeta(-zeta_rho));
    let m = opts.detour_samples;
    for s in 1..=m + 1 {
        let ang = PI * (1.0 - s as f64 / (m + 1) as f64);
        let target = C64::from_polar(zeta_rho, ang);
        zs = it_inf.advance(zs, target)?;
        points.push(zs.ratio());
        params.push(theta_of_zeta(target.re));
    }
    let mut tail: Vec<f64> = graded(0.0, z_end, per_piece / 2 + 1, true, false, zeta_rho);
    tail.retain(|&s| s > zeta_rho * (1.0 + 1e-6));
    for s in tail {
        zs = it_inf.advance(zs, C64::new(s, 0.0))?;
        points.push(zs.ratio());
        params.push(theta_of_zeta(s));
    }
    zs = it_inf.advance(zs, C64::new(z_end, 0.0))?;
    let back = from_infinity(&zs);
    let end_w = back.ratio();
    let closure_residual = (end_w - start_w).norm() / start_w.norm().max(1.0);

    if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::NonFinite("trace point"));
    }

    let vertex_images = if opts.vertex_images {
        poles
            .iter()
            .enumerate()
            .map(|(j, _)| vertex_image(phi, j, &taylor).ok().flatten())
            .collect()
    } else {
        vec![None; n]
    };

    let crossing = first_self_intersection(&points, true);
    let mut trace = BoundaryTrace {
        params: params.clone(),
        simple: crossing.is_none(),
        first_self_intersection: crossing.map(|(i, j)| (params[i], params[j])),
        min_gap: 1.0,
        indeterminate: false,
        closure_residual,
        wronskian_drift: it_plane.max_drift().max(it_inf.max_drift()),
        vertex_images,
        points,
    };
    let diam = trace.diameter().max(f64::MIN_POSITIVE);
    if trace.simple {
        trace.min_gap = min_gap_beyond(&trace.points, true, diam, opts.detour_samples + 3) / diam;
        trace.indeterminate = trace.min_gap < INDETERMINATE_GAP;
    } else {
        trace.min_gap = 0.0;
    }
    Ok(trace)
}

/// Local exponent `beta = sqrt(1 - 2 D_j)` of `w - w(a_j) ~ (z - a_j)^beta`.
pub fn local_exponent(phi: &PoleExpansion, j: usize) -> C64 {
    (C64::new(1.0, 0.0) - 2.0 * phi.double_coeffs()[j]).sqrt()
}

/// Extrapolates `w(a_j)` from values straight above the pole. Returns `None`
/// when the local exponent has nonpositive real part (spiralling vertex).
pub fn vertex_image(phi: &PoleExpansion, j: usize, opts: &TaylorOptions) -> Result<Option<C64>> {
    let poles = phi.poles();
    let a = poles[j];
    if phi.simple_coeffs()[j].norm() > 0.0 {
        return Ok(None);
    }
    let beta = local_exponent(phi, j);
    if beta.re <= 1e-3 {
        return Ok(None);
    }
    let mut exps: Vec<C64> = Vec::new();
    for e in [beta, 2.0 * beta, beta + 1.0, 3.0 * beta] {
        if !exps.iter().any(|f| (f - e).norm() < 1e-9) {
            exps.push(e);
        }
    }
    let mut spacing = 0.5f64;
    for (k, &b) in poles.iter().enumerate() {
        if k != j {
            spacing = spacing.min(0.25 * (b - a).abs());
        }
    }
    let chart = PlaneChart::new(phi);
    let mut it = TaylorIntegrator::new(&chart, *opts, C64::new(1.0, 0.0));
    let mut state = it.advance(CompanionState::normalized(I), C64::new(a, spacing))?;
    let m = exps.len() + 1;
    let eps0 = 1e-6;
    let mut samples = Vec::with_capacity(m);
    for k in 0..m {
        let eps = eps0 * 0.25f64.powi(k as i32);
        state = it.advance(state, C64::new(a, eps))?;
        samples.push((eps / eps0, state.ratio()));
    }
    let mut mat = DMatrix::<C64>::zeros(m, m);
    let mut rhs = DVector::<C64>::zeros(m);
    for (r, (s, w)) in samples.iter().enumerate() {
        mat[(r, 0)] = C64::new(1.0, 0.0);
        for (c, e) in exps.iter().enumerate() {
            mat[(r, c + 1)] = C64::new(*s, 0.0).powc(*e);
        }
        rhs[r] = *w;
    }
    let sol = mat.lu().solve(&rhs).ok_or_else(|| Error::Invalid("singular extrapolation system".into()))?;
    Ok(Some(sol[0]))
}

/// Points of the trace as CSV rows `index,theta,x,y`.
pub fn trace_csv(trace: &BoundaryTrace) -> String {
    let mut out = String::from("index,theta,x,y\n");
    for (k, (p, th)) in trace.points.iter().zip(&trace.params).enumerate() {
        out.push_str(&format!("{k},{th:.17e},{:.17e},{:.17e}\n", p.re, p.im));
    }
    out
}

/// The two one-parameter families probed for univalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `t S_{r0}`: a fixed Schwarzian scaled along its ray.
    Scaled,
    /// `S_t`, the Schwarzian of the map with log-derivative `t b`.
    Homotopy,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Scaled => "scaled",
            Variant::Homotopy => "homotopy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "scaled" => Ok(Variant::Scaled),
            "homotopy" => Ok(Variant::Homotopy),
            other => Err(Error::Invalid(format!("unknown variant {other:?}"))),
        }
    }
}

/// A polygon log-derivative together with the radius defining the scaled ray.
#[derive(Debug, Clone)]
pub struct ProbeSubject {
    pub log_derivative: PoleExpansion,
    pub r0: f64,
}

impl ProbeSubject {
    pub fn new(log_derivative: PoleExpansion, r0: f64) -> Result<Self> {
        HomotopyFamily::new(log_derivative.clone(), r0)?;
        Ok(ProbeSubject { log_derivative, r0 })
    }

    /// Schwarzian probed at parameter `t`. Only the homotopy family is
    /// restricted to `t <= 1`.
    pub fn schwarzian(&self, variant: Variant, t: f64) -> Result<PoleExpansion> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::ParameterRange(t));
        }
        match variant {
            Variant::Scaled => {
                let base = HomotopyFamily::new(self.log_derivative.clone(), self.r0)?;
                Ok(homotopy_schwarzian(&base).scaled(t))
            }
            Variant::Homotopy => Ok(homotopy_schwarzian(&HomotopyFamily::new(self.log_derivative.clone(), t)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub samples: usize,
    pub trace: TraceOptions,
    pub budget: SupBudget,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { samples: 400, trace: TraceOptions::default(), budget: SupBudget::default().with_levels(2) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub t: f64,
    pub variant: Variant,
    pub simple: Option<bool>,
    pub indeterminate: bool,
    pub norm_hp1: Option<f64>,
    pub norm_hp4: Option<f64>,
    /// `hp1 < 1/2`, the Ahlfors-Weill univalence criterion.
    pub aw_applicable: Option<bool>,
    pub min_gap: Option<f64>,
    pub closure_residual: Option<f64>,
    pub wronskian_drift: Option<f64>,
    pub breakdown_flag: String,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Bracket {
    pub variant: Variant,
    pub last_simple: Option<f64>,
    pub first_nonsimple: Option<f64>,
    /// A simple row follows a non-simple one.
    pub non_monotone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub r0: f64,
    pub rows: Vec<ProbeRow>,
    pub brackets: Vec<Bracket>,
}

fn probe_row(subject: &ProbeSubject, variant: Variant, t: f64, opts: &ProbeOptions) -> ProbeRow {
    let mut row = ProbeRow {
        t,
        variant,
        simple: None,
        indeterminate: false,
        norm_hp1: None,
        norm_hp4: None,
        aw_applicable: None,
        min_gap: None,
        closure_residual: None,
        wronskian_drift: None,
        breakdown_flag: "-".into(),
        error: None,
    };
    let phi = match subject.schwarzian(variant, t) {
        Ok(phi) => phi,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let (hp1, hp4) = half_plane_norms(&phi, &opts.budget);
    row.norm_hp1 = Some(hp1.value);
    row.norm_hp4 = Some(hp4.value);
    row.aw_applicable = Some(hp1.value < 0.5);
    match trace_boundary(&phi, opts.samples, &TraceOptions { vertex_images: false, ..opts.trace }) {
        Ok(tr) => {
            row.simple = Some(tr.simple);
            row.indeterminate = tr.indeterminate;
            row.min_gap = Some(tr.min_gap);
            row.closure_residual = Some(tr.closure_residual);
            row.wronskian_drift = Some(tr.wronskian_drift);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn bracket(variant: Variant, rows: &[ProbeRow]) -> Bracket {
    let mut b = Bracket { variant, last_simple: None, first_nonsimple: None, non_monotone: false };
    for r in rows.iter().filter(|r| r.variant == variant) {
        match r.simple {
            Some(true) => {
                b.last_simple = Some(r.t);
                if b.first_nonsimple.is_some() {
                    b.non_monotone = true;
                }
            }
            Some(false) if b.first_nonsimple.is_none() => b.first_nonsimple = Some(r.t),
            _ => {}
        }
    }
    b
}

/// Probes both variants on `t_grid` (strictly increasing, positive). Rows
/// that fail carry their error inline.
pub fn ray_probe(subject: &ProbeSubject, t_grid: &[f64], variants: &[Variant], opts: &ProbeOptions) -> Result<ProbeReport> {
    if t_grid.is_empty() {
        return Err(Error::Invalid("empty t grid".into()));
    }
    if t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Invalid("t grid values must be positive and finite".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("t grid must be strictly increasing".into()));
    }
    let jobs: Vec<(Variant, f64)> = variants.iter().flat_map(|&v| t_grid.iter().map(move |&t| (v, t))).collect();
    let mut rows = crate::par::map(&jobs, |&(v, t)| probe_row(subject, v, t, opts));
    let brackets: Vec<Bracket> = variants.iter().map(|&v| bracket(v, &rows)).collect();
    for row in &mut rows {
        let b = brackets.iter().find(|b| b.variant == row.variant).expect("bracket per variant");
        let after_break = b.first_nonsimple.is_some_and(|f| row.t > f);
        row.breakdown_flag = if row.error.is_some() {
            "error"
        } else if row.indeterminate {
            "indeterminate"
        } else if row.simple == Some(true) && after_break {
            "non_monotone"
        } else if b.first_nonsimple == Some(row.t) {
            "first_nonsimple"
        } else if b.last_simple == Some(row.t) {
            "last_simple"
        } else {
            "-"
        }
        .into();
    }
    Ok(ProbeReport { r0: subject.r0, rows, brackets })
}

fn opt_f(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.12e}"))
}

fn opt_b(v: Option<bool>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// CSV `t,variant,simple,norm_hp1,norm_hp4,aw_applicable,breakdown_flag`.
pub fn probe_csv(report: &ProbeReport) -> String {
    let mut out = String::from("t,variant,simple,norm_hp1,norm_hp4,aw_applicable,breakdown_flag\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.t,
            r.variant.name(),
            opt_b(r.simple),
            opt_f(r.norm_hp1),
            opt_f(r.norm_hp4),
            opt_b(r.aw_applicable),
            r.breakdown_flag
        ));
    }
    out
}

impl From<&BoundaryTrace> for Vec<Pair> {
    fn from(t: &BoundaryTrace) -> Self {
        t.points.iter().map(|&p| p.into()).collect()
    }
}
