use std::f64::consts::PI;

use berslab::polygon::{
    collinearity_residual, critical_radius, is_convex_polyline, turning_angles, validate_polygon, ScMap,
};
use berslab::C64;
use proptest::prelude::*;

const O: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[test]
fn symmetric_rectangle_edge_is_straight() {
    let k = 0.4;
    let p = validate_polygon(&[0.5; 4], &[-1.0 / k, -1.0, 1.0, 1.0 / k], O, ONE).unwrap();
    let m = ScMap::new(&p).unwrap();
    let pts: Vec<C64> = (0..=40).map(|i| m.eval(C64::new(-1.0 + i as f64 / 20.0, 0.0)).unwrap()).collect();
    assert!(collinearity_residual(&pts) < 1e-8, "{}", collinearity_residual(&pts));
}

#[test]
fn rectangle_trace_closes_and_turns_correctly() {
    let p = validate_polygon(&[0.5; 4], &[0.0, 1.0, 2.0, 3.0], O, ONE).unwrap();
    let m = ScMap::new(&p).unwrap();
    let img = m.image_polygon(16).unwrap();
    assert!(img.closure_gap < 1e-7, "gap {}", img.closure_gap);
    assert!(is_convex_polyline(&img.points));
    for (a, t) in p.alphas().iter().zip(turning_angles(m.vertices())) {
        assert!((t - PI * (1.0 - a)).abs() < 1e-6, "{t}");
    }
    // every edge, including the one through f(inf), is straight
    let vi = &img.vertex_indices;
    for j in 0..3 {
        assert!(collinearity_residual(&img.points[vi[j]..=vi[j + 1]]) < 1e-8);
    }
    let mut last: Vec<C64> = img.points[vi[3]..].to_vec();
    last.extend_from_slice(&img.points[..=vi[0]]);
    assert!(collinearity_residual(&last) < 1e-8);
}

#[test]
fn triangle_has_three_vertices() {
    let t = 1.0 / 3.0;
    let p = validate_polygon(&[t, t, t], &[0.0, 1.0, 4.0], O, ONE).unwrap();
    let m = ScMap::new(&p).unwrap();
    let img = m.image_polygon(8).unwrap();
    assert_eq!(img.vertex_indices.len(), 3);
    let v = m.vertices();
    let sides = [(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()];
    // equilateral image
    assert!((sides[0] - sides[1]).abs() < 1e-9 && (sides[1] - sides[2]).abs() < 1e-9, "{sides:?}");
}

fn random_polygon() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..=8).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.05f64..1.0, n),
            proptest::collection::vec(0.2f64..2.0, n - 1),
        )
    })
    .prop_filter_map("angles must fit in (0,1)", |(w, gaps)| {
        let n = w.len();
        // alpha_j = 1 - 2 w_j / sum(w) gives sum alpha = n - 2; reject alphas outside (0.02, 0.98)
        let s: f64 = w.iter().sum();
        let mut alphas: Vec<f64> = w.iter().map(|x| 1.0 - 2.0 * x / s).collect();
        let head: f64 = alphas[..n - 1].iter().sum();
        alphas[n - 1] = (n as f64 - 2.0) - head;
        if alphas.iter().any(|a| !(*a > 0.02 && *a < 0.98)) {
            return None;
        }
        let mut pre = vec![0.0];
        for g in gaps {
            pre.push(pre.last().unwrap() + g);
        }
        Some((alphas, pre))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_polygons_have_convex_images((alphas, pre) in random_polygon()) {
        let p = validate_polygon(&alphas, &pre, O, ONE).unwrap();
        let m = ScMap::new(&p).unwrap();
        let img = m.image_polygon(6).unwrap();
        prop_assert!(img.closure_gap < 1e-7, "gap {}", img.closure_gap);
        prop_assert!(is_convex_polyline(&img.points));
        for (a, t) in alphas.iter().zip(turning_angles(m.vertices())) {
            prop_assert!((t - PI * (1.0 - a)).abs() < 1e-6);
        }
    }

    #[test]
    fn critical_radius_solves_its_quadratic((alphas, pre) in random_polygon()) {
        let p = validate_polygon(&alphas, &pre, O, ONE).unwrap();
        let r = critical_radius(&p);
        prop_assert!(r.r0 > 0.0);
        prop_assert!(r.residual().abs() < 1e-12);
        prop_assert!(r.discriminant() > 0.0);
        prop_assert_eq!(r.quad_coeffs.1, 2.0);
        prop_assert!((r.linear_from_angles - 2.0).abs() < 1e-12);
    }
}
