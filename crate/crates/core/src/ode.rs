//! Taylor-series integration of the linear companion `u'' + (phi / 2) u = 0`
//! along straight segments in the complex plane.
//!
//! The coefficient `phi` is rational, so its Taylor expansion about any point
//! is available in closed form. Steps are a fixed fraction of the distance to
//! the nearest singularity and are shortened further whenever the last terms
//! of the series exceed the tolerance.

use crate::jet::Jet;
use crate::{Error, Result, C64};

/// A coefficient function with computable Taylor expansions.
pub trait CoefficientSource: Sync {
    /// Taylor coefficients of `phi` about `z0` up to `order`.
    fn taylor(&self, z0: C64, order: usize) -> Jet;
    /// Distance from `z0` to the nearest singularity of `phi`.
    fn singular_distance(&self, z0: C64) -> f64;
}

/// Two solutions of the companion equation with their derivatives at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompanionState {
    pub z: C64,
    pub u: [C64; 2],
    pub du: [C64; 2],
}

impl CompanionState {
    /// `u1(z0) = 1, u1'(z0) = 0, u2(z0) = 0, u2'(z0) = 1`.
    pub fn normalized(z0: C64) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        CompanionState { z: z0, u: [one, zero], du: [zero, one] }
    }

    pub fn wronskian(&self) -> C64 {
        self.u[0] * self.du[1] - self.u[1] * self.du[0]
    }

    /// Ratio `w = u1 / u2`, whose Schwarzian is `phi`.
    pub fn ratio(&self) -> C64 {
        self.u[0] / self.u[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorOptions {
    pub order: usize,
    /// Step length as a fraction of the distance to the nearest singularity.
    pub radius_fraction: f64,
    pub tol: f64,
    /// Abort once the Wronskian drifts this far from its initial value.
    pub wronskian_abort: f64,
    pub max_steps: usize,
}

impl Default for TaylorOptions {
    fn default() -> Self {
        TaylorOptions { order: 30, radius_fraction: 0.3, tol: 1e-15, wronskian_abort: 1e-6, max_steps: 200_000 }
    }
}

pub struct TaylorIntegrator<'a, S: ?Sized> {
    source: &'a S,
    opts: TaylorOptions,
    w0: C64,
    max_drift: f64,
    steps: usize,
}

impl<'a, S: CoefficientSource + ?Sized> TaylorIntegrator<'a, S> {
    pub fn new(source: &'a S, opts: TaylorOptions, reference_wronskian: C64) -> Self {
        TaylorIntegrator { source, opts, w0: reference_wronskian, max_drift: 0.0, steps: 0 }
    }

    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Continues `state` along the straight segment to `target`.
    pub fn advance(&mut self, mut state: CompanionState, target: C64) -> Result<CompanionState> {
        let k = self.opts.order;
        let mut u = [vec![C64::new(0.0, 0.0); k + 1], vec![C64::new(0.0, 0.0); k + 1]];
        loop {
            let remaining = target - state.z;
            let dist_left = remaining.norm();
            if dist_left == 0.0 {
                return Ok(state);
            }
            let radius = self.source.singular_distance(state.z);
            let mut h_len = (self.opts.radius_fraction * radius).min(dist_left);
            if !(h_len > 1e-15 * (1.0 + state.z.norm())) {
                return Err(Error::StepUnderflow(format!("{}", state.z)));
            }
            let phi = self.source.taylor(state.z, k.saturating_sub(2));
            for s in 0..2 {
                u[s][0] = state.u[s];
                u[s][1] = state.du[s];
                for m in 0..k - 1 {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..=m {
                        acc += phi.0[i] * u[s][m - i];
                    }
                    u[s][m + 2] = -0.5 * acc / ((m + 1) * (m + 2)) as f64;
                }
            }
            let dir = remaining / dist_left;
            loop {
                let h = dir * h_len;
                let mut ok = true;
                for coeffs in &u {
                    let mut biggest: f64 = 0.0;
                    let mut p = C64::new(1.0, 0.0);
                    let mut tail = 0.0;
                    for (m, c) in coeffs.iter().enumerate() {
                        let t = (c * p).norm();
                        biggest = biggest.max(t);
                        if m + 2 > k {
                            tail += t;
                        }
                        p *= h;
                    }
                    if tail > self.opts.tol * biggest.max(1e-300) {
                        ok = false;
                    }
                }
                if ok {
                    break;
                }
                h_len *= 0.5;
                if !(h_len > 1e-15 * (1.0 + state.z.norm())) {
                    return Err(Error::StepUnderflow(format!("{}", state.z)));
                }
            }
            let h = dir * h_len;
            for s in 0..2 {
                let mut val = C64::new(0.0, 0.0);
                let mut der = C64::new(0.0, 0.0);
                for m in (0..=k).rev() {
                    val = val * h + u[s][m];
                    if m >= 1 {
                        der = der * h + u[s][m] * m as f64;
                    }
                }
                state.u[s] = val;
                state.du[s] = der;
            }
            state.z = if h_len >= dist_left { target } else { state.z + h };
            self.steps += 1;
            let drift = (state.wronskian() - self.w0).norm() / self.w0.norm().max(1e-300);
            self.max_drift = self.max_drift.max(drift);
            if drift > self.opts.wronskian_abort {
                return Err(Error::WronskianDrift(drift));
            }
            if self.steps > self.opts.max_steps {
                return Err(Error::StepUnderflow(format!("step budget exhausted at {}", state.z)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// phi = 2 c^2 (constant): u'' + c^2 u = 0
    struct Constant(C64);

    impl CoefficientSource for Constant {
        fn taylor(&self, _z0: C64, order: usize) -> Jet {
            Jet::constant(self.0, order)
        }
        fn singular_distance(&self, _z0: C64) -> f64 {
            1.0
        }
    }

    #[test]
    fn harmonic_oscillator_along_complex_segment() {
        let c = 1.5;
        let src = Constant(C64::new(2.0 * c * c, 0.0));
        let z0 = C64::new(0.0, 1.0);
        let mut it = TaylorIntegrator::new(&src, TaylorOptions::default(), C64::new(1.0, 0.0));
        let end = it.advance(CompanionState::normalized(z0), C64::new(3.0, -0.5)).unwrap();
        let dz = end.z - z0;
        let exact_u1 = (dz * c).cos();
        let exact_u2 = (dz * c).sin() / c;
        assert!((end.u[0] - exact_u1).norm() < 1e-12 * exact_u1.norm().max(1.0));
        assert!((end.u[1] - exact_u2).norm() < 1e-12 * exact_u2.norm().max(1.0));
        assert!(it.max_drift() < 1e-12);
    }
}
