//! Schwarz-Christoffel integral `f(z) = d1 int_0^z prod (xi - a_j)^(alpha_j - 1) dxi + d0`.
//!
//! Panels touching a prevertex use Gauss-Jacobi rules carrying the endpoint
//! factor `(xi - a_j)^(alpha_j - 1)`; all other panels use Gauss-Legendre,
//! bisected until each panel is at most half as long as the distance from its
//! midpoint to the nearest prevertex. Boundary values are the limits from the
//! upper half-plane, so `arg(xi - a_j)` is taken in `[0, pi]`.

use gauss_quad::{GaussJacobi, GaussLegendre};
use serde::Serialize;

use super::PolygonSpec;
use crate::{Error, Result, C64};

const JACOBI_DEGREE: usize = 24;
const LEGENDRE_DEGREE: usize = 24;
const TAIL_DEGREE: usize = 48;
const MAX_BISECTIONS: usize = 80;

type Rule = Vec<(f64, f64)>;

/// `d^e` with the argument of `d` taken in `[0, pi]`.
fn upper_power(d: C64, e: f64) -> C64 {
    let im = if d.im > 0.0 { d.im } else { 0.0 };
    let arg = im.atan2(d.re);
    C64::from_polar(d.norm().powf(e), e * arg)
}

#[derive(Debug, Clone)]
pub struct ScMap {
    spec: PolygonSpec,
    exps: Vec<f64>,
    jacobi: Vec<Rule>,
    legendre: Rule,
    tail: Rule,
    vertices: Vec<C64>,
    infinity_right: C64,
    infinity_left: C64,
    tail_start: f64,
}

/// Sampled boundary image of the polygon map.
#[derive(Debug, Clone, Serialize)]
pub struct ImagePolyline {
    /// Starts at the image of `-inf`, passes `A_1 .. A_n` and ends at the image of `+inf`.
    pub points: Vec<C64>,
    pub vertex_indices: Vec<usize>,
    pub closure_gap: f64,
}

impl ScMap {
    pub fn new(spec: &PolygonSpec) -> Result<Self> {
        let exps = spec.exponents();
        let jacobi = exps
            .iter()
            .map(|&e| {
                GaussJacobi::new(JACOBI_DEGREE, 0.0, e)
                    .map(|q| q.as_node_weight_pairs().to_vec())
                    .map_err(|err| Error::Quadrature(err.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let legendre = GaussLegendre::new(LEGENDRE_DEGREE)
            .map_err(|e| Error::Quadrature(e.to_string()))?
            .as_node_weight_pairs()
            .to_vec();
        let tail = GaussLegendre::new(TAIL_DEGREE)
            .map_err(|e| Error::Quadrature(e.to_string()))?
            .as_node_weight_pairs()
            .to_vec();
        let amax = spec.prevertices().iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let mut map = ScMap {
            spec: spec.clone(),
            exps,
            jacobi,
            legendre,
            tail,
            vertices: Vec::new(),
            infinity_right: C64::new(0.0, 0.0),
            infinity_left: C64::new(0.0, 0.0),
            tail_start: 4.0 * amax + 1.0,
        };
        let n = spec.len();
        let vertices: Vec<C64> = (0..n)
            .map(|j| map.real_path_integral(0.0, spec.prevertices()[j]))
            .map(|i| spec.d0() + spec.d1() * i)
            .collect();
        map.vertices = vertices;
        let a = spec.prevertices();
        let x = map.tail_start;
        let right = map.segment(C64::new(a[n - 1], 0.0), C64::new(x, 0.0), Some(n - 1), None) + map.tail_right(x);
        let left = map.segment(C64::new(-x, 0.0), C64::new(a[0], 0.0), None, Some(0)) + map.tail_left(-x);
        map.infinity_right = map.vertices[n - 1] + spec.d1() * right;
        map.infinity_left = map.vertices[0] - spec.d1() * left;
        Ok(map)
    }

    pub fn spec(&self) -> &PolygonSpec {
        &self.spec
    }

    /// Vertex images `A_j = f(a_j)`.
    pub fn vertices(&self) -> &[C64] {
        &self.vertices
    }

    /// `f(inf)` reached along the positive real axis.
    pub fn infinity_image(&self) -> C64 {
        self.infinity_right
    }

    /// `f(inf)` reached along the negative real axis; equals [`Self::infinity_image`] up to quadrature error.
    pub fn infinity_image_left(&self) -> C64 {
        self.infinity_left
    }

    /// Integrand `prod (xi - a_j)^(c_j)`, optionally skipping factor `skip`.
    fn integrand(&self, xi: C64, skip: Option<usize>) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (j, (&a, &e)) in self.spec.prevertices().iter().zip(&self.exps).enumerate() {
            if Some(j) != skip {
                acc *= upper_power(xi - a, e);
            }
        }
        acc
    }

    fn nearest_prevertex_distance(&self, z: C64, skip: Option<usize>) -> f64 {
        self.spec
            .prevertices()
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != skip)
            .map(|(_, &a)| (z - a).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Integral over the straight segment `p -> q`; `sp`/`sq` name the prevertex
    /// sitting at an endpoint, if any.
    fn segment(&self, p: C64, q: C64, sp: Option<usize>, sq: Option<usize>) -> C64 {
        if p == q {
            return C64::new(0.0, 0.0);
        }
        match (sp, sq) {
            (Some(_), Some(_)) => {
                let m = 0.5 * (p + q);
                self.segment(p, m, sp, None) + self.segment(m, q, None, sq)
            }
            (None, Some(_)) => -self.segment(q, p, sq, None),
            (Some(k), None) => {
                let len = (q - p).norm();
                let dir = (q - p) / len;
                let h = len.min(0.5 * self.nearest_prevertex_distance(p, Some(k)));
                let e = self.exps[k];
                let half = 0.5 * h;
                let theta = if dir.im > 0.0 { dir.im } else { 0.0 }.atan2(dir.re);
                let front = dir * half * half.powf(e) * C64::from_polar(1.0, e * theta);
                let sum: C64 = self.jacobi[k]
                    .iter()
                    .map(|&(x, w)| w * self.integrand(p + dir * (half * (1.0 + x)), Some(k)))
                    .sum();
                let first = front * sum;
                if h < len {
                    first + self.smooth(p + dir * h, q, 0)
                } else {
                    first
                }
            }
            (None, None) => self.smooth(p, q, 0),
        }
    }

    fn smooth(&self, u: C64, v: C64, depth: usize) -> C64 {
        let mid = 0.5 * (u + v);
        let half = 0.5 * (v - u).norm();
        if depth < MAX_BISECTIONS && half > 0.5 * self.nearest_prevertex_distance(mid, None) {
            return self.smooth(u, mid, depth + 1) + self.smooth(mid, v, depth + 1);
        }
        let hv = 0.5 * (v - u);
        let sum: C64 = self.legendre.iter().map(|&(x, w)| w * self.integrand(mid + hv * x, None)).sum();
        hv * sum
    }

    /// `int_{x0}^{x1} g` along the real axis (boundary values from above).
    fn real_path_integral(&self, x0: f64, x1: f64) -> C64 {
        if x0 == x1 {
            return C64::new(0.0, 0.0);
        }
        let pre = self.spec.prevertices();
        let idx = |x: f64| pre.iter().position(|&a| a == x);
        let (lo, hi, sign) = if x0 < x1 { (x0, x1, 1.0) } else { (x1, x0, -1.0) };
        let mut breaks: Vec<f64> = vec![lo];
        breaks.extend(pre.iter().copied().filter(|&a| a > lo && a < hi));
        breaks.push(hi);
        let total: C64 = breaks
            .windows(2)
            .map(|w| self.segment(C64::new(w[0], 0.0), C64::new(w[1], 0.0), idx(w[0]), idx(w[1])))
            .sum();
        total * sign
    }

    /// `int_x^inf g` for `x >= tail_start`, via `xi = x / s`.
    fn tail_right(&self, x: f64) -> C64 {
        let total: f64 = self.exps.iter().sum();
        let pre = self.spec.prevertices();
        let sum: C64 = self
            .tail
            .iter()
            .map(|&(node, w)| {
                let s = 0.5 * (node + 1.0);
                let mut prod = 1.0;
                for (&a, &e) in pre.iter().zip(&self.exps) {
                    prod *= (1.0 - a * s / x).powf(e);
                }
                C64::new(w * prod * s.powf(-2.0 - total), 0.0)
            })
            .sum();
        0.5 * sum * x.powf(1.0 + total)
    }

    /// `int_{-inf}^{x} g` for `x <= -tail_start`, via `xi = x / s`.
    fn tail_left(&self, x: f64) -> C64 {
        let total: f64 = self.exps.iter().sum();
        let pre = self.spec.prevertices();
        let big = -x;
        let sum: f64 = self
            .tail
            .iter()
            .map(|&(node, w)| {
                let s = 0.5 * (node + 1.0);
                let mut prod = 1.0;
                for (&a, &e) in pre.iter().zip(&self.exps) {
                    prod *= (1.0 + a * s / big).powf(e);
                }
                w * prod * s.powf(-2.0 - total)
            })
            .sum();
        0.5 * sum * big.powf(1.0 + total) * C64::from_polar(1.0, std::f64::consts::PI * total)
    }

    /// Evaluates the map at a point of the closed upper half-plane.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("evaluation point"));
        }
        if z.im < 0.0 {
            return Err(Error::OutsideDomain(format!("{z}")));
        }
        let pre = self.spec.prevertices();
        if z.im == 0.0 {
            if let Some(j) = pre.iter().position(|&a| a == z.re) {
                return Ok(self.vertices[j]);
            }
            return Ok(self.spec.d0() + self.spec.d1() * self.real_path_integral(0.0, z.re));
        }
        let start = pre.iter().position(|&a| a == 0.0);
        let v = self.segment(C64::new(0.0, 0.0), z, start, None);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite integral at {z}")));
        }
        Ok(self.spec.d0() + self.spec.d1() * v)
    }

    /// Image of a real point, continued from the nearest vertex.
    fn boundary_point(&self, x: f64) -> C64 {
        let pre = self.spec.prevertices();
        let n = pre.len();
        let d1 = self.spec.d1();
        if x < pre[0] {
            if x <= -self.tail_start {
                return self.infinity_left + d1 * self.tail_left(x);
            }
            return self.infinity_left
                + d1 * (self.tail_left(-self.tail_start)
                    + self.segment(C64::new(-self.tail_start, 0.0), C64::new(x, 0.0), None, None));
        }
        if x > pre[n - 1] {
            if x >= self.tail_start {
                return self.infinity_right - d1 * self.tail_right(x);
            }
            return self.vertices[n - 1] + d1 * self.segment(C64::new(pre[n - 1], 0.0), C64::new(x, 0.0), Some(n - 1), None);
        }
        let j = pre.iter().rposition(|&a| a <= x).expect("x >= a_1");
        if pre[j] == x {
            return self.vertices[j];
        }
        self.vertices[j] + d1 * self.segment(C64::new(pre[j], 0.0), C64::new(x, 0.0), Some(j), None)
    }

    /// Boundary trace through every vertex and through the image of infinity,
    /// which lies inside the edge `A_n A_1`.
    pub fn image_polygon(&self, samples_per_edge: usize) -> Result<ImagePolyline> {
        if samples_per_edge < 2 {
            return Err(Error::TooFewSamples { got: samples_per_edge, need: 2 });
        }
        let pre = self.spec.prevertices();
        let n = pre.len();
        let inner = samples_per_edge - 2;
        let half = (samples_per_edge - 1) / 2;
        let lambda = (pre[n - 1] - pre[0]).max(1.0);
        let mut points = vec![self.infinity_left];
        for k in 1..=half {
            let u = k as f64 / (half + 1) as f64;
            points.push(self.boundary_point(pre[0] - lambda * (1.0 - u) / u));
        }
        let mut vertex_indices = Vec::with_capacity(n);
        for j in 0..n {
            vertex_indices.push(points.len());
            points.push(self.vertices[j]);
            if j + 1 < n {
                for k in 1..=inner {
                    let s = k as f64 / (inner + 1) as f64;
                    points.push(self.boundary_point(pre[j] + s * (pre[j + 1] - pre[j])));
                }
            }
        }
        for k in 1..=half {
            let u = k as f64 / (half + 1) as f64;
            points.push(self.boundary_point(pre[n - 1] + lambda * u / (1.0 - u)));
        }
        points.push(self.infinity_right);
        if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::Quadrature("non-finite boundary sample".into()));
        }
        let closure_gap = (self.infinity_right - self.infinity_left).norm();
        Ok(ImagePolyline { points, vertex_indices, closure_gap })
    }
}

/// Largest distance of the points from the chord joining the first and last
/// point, relative to the chord length.
pub fn collinearity_residual(points: &[C64]) -> f64 {
    let (p, q) = (points[0], points[points.len() - 1]);
    let chord = q - p;
    let len = chord.norm();
    points
        .iter()
        .map(|z| ((z - p) * chord.conj()).im.abs() / (len * len))
        .fold(0.0, f64::max)
}

/// Turning angles `arg((A_{j+1} - A_j) / (A_j - A_{j-1}))` of a closed vertex list.
pub fn turning_angles(vertices: &[C64]) -> Vec<f64> {
    let n = vertices.len();
    (0..n)
        .map(|j| {
            let prev = vertices[(j + n - 1) % n];
            let next = vertices[(j + 1) % n];
            ((next - vertices[j]) / (vertices[j] - prev)).arg()
        })
        .collect()
}

/// True when all non-degenerate turns of the closed polyline have the same sign.
pub fn is_convex_polyline(points: &[C64]) -> bool {
    let mut pts: Vec<C64> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.last().is_none_or(|q: &C64| (p - q).norm() > 1e-12) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= 1e-9 {
        pts.pop();
    }
    let n = pts.len();
    if n < 3 {
        return false;
    }
    let mut sign = 0.0f64;
    for j in 0..n {
        let e1 = pts[(j + 1) % n] - pts[j];
        let e2 = pts[(j + 2) % n] - pts[(j + 1) % n];
        let cross = (e1.conj() * e2).im;
        if cross.abs() <= 1e-9 * e1.norm() * e2.norm() {
            continue;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    sign != 0.0
}
