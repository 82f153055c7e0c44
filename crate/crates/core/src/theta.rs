//! Poincare theta series `sum phi(g z) g'(z)^2` over balls in finitely
//! generated groups.

use std::collections::HashMap;

use serde::Serialize;

use crate::io::Pair;
use crate::moebius::MoebiusTransform;
use crate::{Error, Holomorphic, Result, C64};

/// Largest ball [`enumerate_ball`] will build.
pub const ELEMENT_CAP: usize = 1_000_000;
const DEDUP_TOL: f64 = 1e-10;

/// Group elements of word length at most `max_len`.
#[derive(Debug, Clone)]
pub struct GroupBall {
    pub generators: Vec<MoebiusTransform>,
    pub max_len: usize,
    pub elements: Vec<MoebiusTransform>,
    /// Word length of each element.
    pub lengths: Vec<usize>,
}

impl GroupBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements of word length at most `l`.
    pub fn truncated(&self, l: usize) -> GroupBall {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.lengths[i] <= l).collect();
        GroupBall {
            generators: self.generators.clone(),
            max_len: l.min(self.max_len),
            elements: keep.iter().map(|&i| self.elements[i]).collect(),
            lengths: keep.iter().map(|&i| self.lengths[i]).collect(),
        }
    }
}

fn bucket_key(g: &MoebiusTransform) -> [i64; 8] {
    let e = g.canonical().entries();
    let scale = e.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let q = |x: f64| (x / (scale * 1e-7)).round() as i64;
    [q(e[0].re), q(e[0].im), q(e[1].re), q(e[1].im), q(e[2].re), q(e[2].im), q(e[3].re), q(e[3].im)]
}

/// Reduced words in the generators and their inverses up to length `max_len`,
/// deduplicated up to sign.
pub fn enumerate_ball(generators: &[MoebiusTransform], max_len: usize) -> Result<GroupBall> {
    let mut letters = Vec::with_capacity(2 * generators.len());
    for g in generators {
        letters.push(*g);
        letters.push(g.inverse());
    }
    let inverse_of = |k: usize| k ^ 1;
    let mut elements = vec![MoebiusTransform::identity()];
    let mut lengths = vec![0];
    let mut seen: HashMap<[i64; 8], Vec<usize>> = HashMap::new();
    seen.entry(bucket_key(&elements[0])).or_default().push(0);
    // frontier: (element index, last letter)
    let mut frontier: Vec<(usize, Option<usize>)> = vec![(0, None)];
    for len in 1..=max_len {
        let mut next = Vec::new();
        for &(idx, last) in &frontier {
            for (k, letter) in letters.iter().enumerate() {
                if last.is_some_and(|l| inverse_of(l) == k) {
                    continue;
                }
                let g = elements[idx] * *letter;
                let key = bucket_key(&g);
                let dup = seen.get(&key).is_some_and(|v| v.iter().any(|&j| elements[j].approx_eq(&g, DEDUP_TOL * (1.0 + g.entries().iter().map(|c| c.norm()).fold(0.0, f64::max)))));
                if dup {
                    continue;
                }
                if elements.len() >= ELEMENT_CAP {
                    return Err(Error::BallTooLarge(ELEMENT_CAP));
                }
                seen.entry(key).or_default().push(elements.len());
                next.push((elements.len(), Some(k)));
                elements.push(g);
                lengths.push(len);
            }
        }
        frontier = next;
    }
    Ok(GroupBall { generators: generators.to_vec(), max_len, elements, lengths })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaValue {
    #[serde(serialize_with = "ser_c")]
    pub value: C64,
    /// Sum of `|phi(g z) g'(z)^2|` over each word length.
    pub shell_abs: Vec<f64>,
    /// Absolute size of the outermost shell.
    pub tail: f64,
    /// Outermost shell smaller than the one before; `None` below two shells.
    pub converging: Option<bool>,
}

fn ser_c<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Pair::from(*z).serialize(s)
}

pub fn theta_series(phi: &(impl Holomorphic + ?Sized), ball: &GroupBall, z: C64) -> Result<ThetaValue> {
    if ball.is_empty() {
        return Err(Error::Invalid("empty group ball".into()));
    }
    let idx: Vec<usize> = (0..ball.len()).collect();
    let terms = crate::par::map(&idx, |&i| {
        let g = &ball.elements[i];
        let d = g.derivative(z);
        phi.eval(g.apply(z)).map(|v| v * d * d)
    });
    let mut value = C64::new(0.0, 0.0);
    let mut shell_abs = vec![0.0; ball.max_len + 1];
    for (i, t) in terms.into_iter().enumerate() {
        let t = t?;
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::NonFinite("theta series term"));
        }
        value += t;
        shell_abs[ball.lengths[i]] += t.norm();
    }
    let tail = *shell_abs.last().expect("at least the identity shell");
    let converging = (shell_abs.len() >= 3).then(|| tail < shell_abs[shell_abs.len() - 2]);
    Ok(ThetaValue { value, shell_abs, tail, converging })
}

/// `max |Theta(g z) g'(z)^2 - Theta(z)|` over `points`.
pub fn equivariance_residual(phi: &(impl Holomorphic + ?Sized), ball: &GroupBall, gamma: &MoebiusTransform, points: &[C64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in points {
        let d = gamma.derivative(z);
        let lhs = theta_series(phi, ball, gamma.apply(z))?.value * d * d;
        let rhs = theta_series(phi, ball, z)?.value;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualRow {
    pub max_len: usize,
    pub elements: usize,
    pub residual: f64,
}

/// Equivariance residual under each generator for every truncation
/// `0..=ball.max_len` (maximum over generators).
pub fn residual_table(phi: &(impl Holomorphic + ?Sized), ball: &GroupBall, points: &[C64]) -> Result<Vec<ResidualRow>> {
    (0..=ball.max_len)
        .map(|l| {
            let b = ball.truncated(l);
            let mut r: f64 = 0.0;
            for g in &ball.generators {
                r = r.max(equivariance_residual(phi, &b, g, points)?);
            }
            Ok(ResidualRow { max_len: l, elements: b.len(), residual: r })
        })
        .collect()
}

pub fn residual_csv(rows: &[ResidualRow]) -> String {
    let mut out = String::from("L,elements,residual\n");
    for r in rows {
        out.push_str(&format!("{},{},{:.12e}\n", r.max_len, r.elements, r.residual));
    }
    out
}

/// `z -> lambda z` as a unit-determinant matrix.
pub fn dilation(lambda: f64) -> Result<MoebiusTransform> {
    if !(lambda > 0.0) {
        return Err(Error::Invalid("dilation factor must be positive".into()));
    }
    let s = lambda.sqrt();
    MoebiusTransform::real(s, 0.0, 0.0, 1.0 / s)
}

/// Two hyperbolic generators with trace 4 and perpendicular axes through `i`;
/// their isometric circles are pairwise disjoint.
pub fn schottky_pair() -> [MoebiusTransform; 2] {
    let sh = 3f64.sqrt();
    let a = MoebiusTransform::real(2.0, sh, sh, 2.0).expect("cosh^2 - sinh^2 = 1");
    // conjugate of `a` by the quarter turn about i
    let b = MoebiusTransform::real(2.0 + sh, 0.0, 0.0, 2.0 - sh).expect("unit determinant");
    [a, b]
}
