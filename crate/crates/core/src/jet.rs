//! Truncated Taylor series in a local variable `h`, used by the Taylor-series
//! ODE integrator to obtain coefficient expansions of rational functions.

use crate::C64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<C64>);

impl Jet {
    pub fn zero(order: usize) -> Self {
        Jet(vec![C64::new(0.0, 0.0); order + 1])
    }

    pub fn constant(c: C64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.0[0] = c;
        j
    }

    /// `c0 + h`
    pub fn variable(c0: C64, order: usize) -> Self {
        let mut j = Self::constant(c0, order);
        if order >= 1 {
            j.0[1] = C64::new(1.0, 0.0);
        }
        j
    }

    /// Expansion of `1 / (d + h)` about `h = 0`.
    pub fn geometric(d: C64, order: usize) -> Self {
        let inv = d.inv();
        let mut out = Vec::with_capacity(order + 1);
        let mut term = inv;
        for _ in 0..=order {
            out.push(term);
            term *= -inv;
        }
        Jet(out)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> C64 {
        self.0[0]
    }

    pub fn scale(&self, s: C64) -> Self {
        Jet(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add_constant(mut self, c: C64) -> Self {
        self.0[0] += c;
        self
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Reciprocal via the standard recurrence; requires a nonzero constant term.
    pub fn recip(&self) -> Self {
        let n = self.0.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        let inv0 = self.0[0].inv();
        out[0] = inv0;
        for k in 1..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 1..=k {
                s += self.0[i] * out[k - i];
            }
            out[k] = -s * inv0;
        }
        Jet(out)
    }

    /// Sum `sum c_k h^k` at a concrete `h`.
    pub fn eval(&self, h: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * h + c)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.0.len().min(rhs.0.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, a) in self.0.iter().take(n).enumerate() {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in rhs.0.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet(out)
    }
}
