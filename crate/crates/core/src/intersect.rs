//! Self-intersection tests for polylines, with a sweep over x-sorted segment
//! bounding boxes.

use crate::C64;

/// Relative tolerance below which an orientation is treated as collinear.
pub const COLLINEAR_TOL: f64 = 1e-9;

fn orient(a: C64, b: C64, c: C64) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let cross = ab.re * ac.im - ab.im * ac.re;
    let scale = ab.norm() * ac.norm();
    if cross.abs() <= COLLINEAR_TOL * scale {
        0.0
    } else {
        cross.signum()
    }
}

fn on_segment(a: C64, b: C64, p: C64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection test.
pub fn segments_intersect(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segment_distance(p1: C64, p2: C64, q1: C64, q2: C64) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

struct Seg {
    index: usize,
    a: C64,
    b: C64,
    lo: C64,
    hi: C64,
}

fn segments(points: &[C64], closed: bool, pad: f64) -> Vec<Seg> {
    let n = points.len();
    let count = if closed { n } else { n.saturating_sub(1) };
    let mut segs: Vec<Seg> = (0..count)
        .map(|i| {
            let a = points[i];
            let b = points[(i + 1) % n];
            Seg {
                index: i,
                a,
                b,
                lo: C64::new(a.re.min(b.re) - pad, a.im.min(b.im) - pad),
                hi: C64::new(a.re.max(b.re) + pad, a.im.max(b.im) + pad),
            }
        })
        .collect();
    segs.sort_by(|s, t| s.lo.re.total_cmp(&t.lo.re).then(s.index.cmp(&t.index)));
    segs
}

fn adjacent(i: usize, j: usize, count: usize, closed: bool, window: usize) -> bool {
    let d = i.abs_diff(j);
    d <= window || (closed && count - d <= window)
}

/// Visits every pair of non-adjacent segments whose padded boxes overlap.
fn sweep<F: FnMut(&Seg, &Seg)>(points: &[C64], closed: bool, pad: f64, window: usize, mut visit: F) {
    let segs = segments(points, closed, pad);
    let count = segs.len();
    let mut active: Vec<usize> = Vec::new();
    for (k, s) in segs.iter().enumerate() {
        active.retain(|&m| segs[m].hi.re >= s.lo.re);
        for &m in &active {
            let t = &segs[m];
            if t.lo.im > s.hi.im || s.lo.im > t.hi.im || adjacent(s.index, t.index, count, closed, window) {
                continue;
            }
            visit(s, t);
        }
        active.push(k);
    }
}

/// Lexicographically smallest pair of intersecting non-adjacent segments.
pub fn first_self_intersection(points: &[C64], closed: bool) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    sweep(points, closed, 0.0, 1, |s, t| {
        if segments_intersect(s.a, s.b, t.a, t.b) {
            let pair = (s.index.min(t.index), s.index.max(t.index));
            if best.is_none_or(|b| pair < b) {
                best = Some(pair);
            }
        }
    });
    best
}

/// Smallest distance between non-adjacent segments, searched up to `threshold`
/// (returns `threshold` when nothing is closer).
pub fn min_nonadjacent_gap(points: &[C64], closed: bool, threshold: f64) -> f64 {
    min_gap_beyond(points, closed, threshold, 1)
}

/// Like [`min_nonadjacent_gap`], ignoring pairs less than `window + 1`
/// segments apart.
pub fn min_gap_beyond(points: &[C64], closed: bool, threshold: f64, window: usize) -> f64 {
    let mut best = threshold;
    sweep(points, closed, threshold, window.max(1), |s, t| {
        best = best.min(segment_distance(s.a, s.b, t.a, t.b));
    });
    best
}
