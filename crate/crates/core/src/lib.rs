//! Computable constructions around Schwarzians of convex polygon maps.
//!
//! The crate covers:
//!
//! * [`rational`]: log-derivatives and Schwarzians of Schwarz-Christoffel maps as
//!   exact pole expansions, plus the homotopy family `t b' - (t^2/2) b^2`.
//! * [`polygon`]: polygon validation, the critical-radius quadratic and the
//!   Schwarz-Christoffel integral evaluated with Gauss-Jacobi panels.
//! * [`norms`]: hyperbolic sup-norms in half-plane and disk conventions.
//! * [`schwarz`]: the Schwarz equation `S_w = phi` solved through its linear
//!   companion `u'' + phi u / 2 = 0`, boundary traces and univalence probing.
//! * [`beltrami`]: harmonic (Ahlfors-Weill) Beltrami coefficients.
//! * [`grunsky`]: truncated Grunsky matrices and their operator norms.
//! * [`theta`]: Poincare theta series over finitely generated Fuchsian groups.

pub mod beltrami;
pub mod error;
pub mod grunsky;
pub mod intersect;
pub mod io;
pub mod jet;
pub mod moebius;
pub mod norms;
pub mod ode;
mod par;
pub mod polygon;
pub mod rational;
pub mod schwarz;
pub mod theta;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Anything that can be evaluated as a holomorphic function off a known
/// finite singular set.
pub trait Holomorphic: Sync {
    fn eval(&self, z: C64) -> Result<C64>;
}

impl<F> Holomorphic for F
where
    F: Fn(C64) -> C64 + Sync,
{
    fn eval(&self, z: C64) -> Result<C64> {
        Ok(self(z))
    }
}

/// Cross-ratio `(z1, z2; z3, z4) = ((z1 - z3)(z2 - z4)) / ((z1 - z4)(z2 - z3))`.
pub fn cross_ratio(z: [C64; 4]) -> C64 {
    ((z[0] - z[2]) * (z[1] - z[3])) / ((z[0] - z[3]) * (z[1] - z[2]))
}
