//! Fractional-linear maps with unit-determinant matrices.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::io::Pair;
use crate::{Error, Result, C64};

pub const DETERMINANT_TOL: f64 = 1e-12;

/// `z -> (a z + b) / (c z + d)` with `a d - b c = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusTransform {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MoebiusWire {
    pub a: Pair,
    pub b: Pair,
    pub c: Pair,
    pub d: Pair,
}

impl MoebiusTransform {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).norm() > DETERMINANT_TOL {
            return Err(Error::Determinant(det.norm()));
        }
        Ok(MoebiusTransform { a, b, c, d })
    }

    /// Rescales by a square root of the determinant.
    pub fn normalized(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.norm().is_finite() {
            return Err(Error::Determinant(det.norm()));
        }
        let s = det.sqrt().inv();
        Ok(MoebiusTransform { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0))
    }

    pub fn identity() -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        MoebiusTransform { a: one, b: zero, c: zero, d: one }
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `1 / (c z + d)^2`.
    pub fn derivative(&self, z: C64) -> C64 {
        (self.c * z + self.d).powi(-2)
    }

    pub fn inverse(&self) -> Self {
        MoebiusTransform { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    /// Representative of `{M, -M}` whose first nonzero entry has positive
    /// real part (or zero real part and positive imaginary part).
    pub fn canonical(&self) -> Self {
        let first = self.entries().into_iter().find(|e| e.norm() > 0.0).unwrap_or_default();
        if first.re < 0.0 || (first.re == 0.0 && first.im < 0.0) {
            MoebiusTransform { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            *self
        }
    }

    /// Equality up to the global sign, entrywise within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |s: f64| self.entries().iter().zip(other.entries()).all(|(x, y)| (x - s * y).norm() <= tol);
        close(1.0) || close(-1.0)
    }

    pub fn from_wire(w: &MoebiusWire) -> Result<Self> {
        Self::new(w.a.into(), w.b.into(), w.c.into(), w.d.into())
    }

    pub fn to_wire(&self) -> MoebiusWire {
        MoebiusWire { a: self.a.into(), b: self.b.into(), c: self.c.into(), d: self.d.into() }
    }
}

impl Mul for MoebiusTransform {
    type Output = MoebiusTransform;

    /// Composition: `(self * rhs)(z) = self(rhs(z))`.
    fn mul(self, r: MoebiusTransform) -> MoebiusTransform {
        MoebiusTransform {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

/// Loads generators from `[{"a":[re,im],"b":..,"c":..,"d":..}, ...]`.
pub fn generators_from_json(s: &str) -> Result<Vec<MoebiusTransform>> {
    let wires: Vec<MoebiusWire> = serde_json::from_str(s)?;
    wires.iter().map(MoebiusTransform::from_wire).collect()
}

pub fn generators_to_json(g: &[MoebiusTransform]) -> String {
    let wires: Vec<MoebiusWire> = g.iter().map(MoebiusTransform::to_wire).collect();
    serde_json::to_string_pretty(&wires).expect("plain data serializes")
}
