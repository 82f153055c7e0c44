//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use berslab::beltrami::{admissibility, ahlfors_weill_field, field_sup_norm};
use berslab::grunsky::{exterior_expansion_from_schwarzian, grunsky_matrix, grunsky_report, ExteriorExpansion};
use berslab::moebius::MoebiusTransform;
use berslab::norms::{half_plane_norms, SupBudget};
use berslab::ode::TaylorOptions;
use berslab::polygon::{
    collinearity_residual, critical_radius, quadratic_leading, turning_angles, PairConvention, ScMap,
};
use berslab::rational::{
    homotopy_schwarzian, log_derivative_from_polygon, schwarzian_from_log_derivative, HomotopyFamily, PoleExpansion,
};
use berslab::schwarz::{
    map_value, ray_probe, solve_companion, trace_boundary, vertex_image, ProbeOptions, ProbeSubject, TraceOptions,
    Variant,
};
use berslab::theta::{dilation, enumerate_ball, residual_table, schottky_pair, theta_series};
use berslab::{cross_ratio, C64};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn workspace_root() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_berslab"))
        .args(args)
        .current_dir(workspace_root())
        .output()
        .map_err(|e| e.to_string())
}

fn rectangle_critical_radius() -> Outcome {
    let start = Instant::now();
    let out = run_cli(&["critical-radius", "--polygon", "configs/rectangle.json"])?;
    let elapsed = start.elapsed();
    ensure(out.status.success(), || format!("exit {:?}", out.status.code()))?;
    let text = String::from_utf8_lossy(&out.stdout);
    let json = &text[text.find('{').ok_or("no JSON on stdout")?..];
    let v: serde_json::Value = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let q: Vec<f64> = v["quad_coeffs"].as_array().ok_or("no quad_coeffs")?.iter().filter_map(|x| x.as_f64()).collect();
    ensure(q == [1.25, 2.0, -2.0], || format!("quadratic {q:?}"))?;
    let r0 = v["r0"].as_f64().ok_or("no r0")?;
    ensure((r0 - 0.696663).abs() < 1e-5, || format!("r0 = {r0}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("r0 = {r0:.10}, {elapsed:.2?}"))
}

fn index_convention_lock() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let n = rng.gen_range(3..=8);
        let p = random_polygon(&mut rng, n);
        let cr = critical_radius(&p);
        ensure(cr.quad_coeffs.1 == 2.0, || format!("linear coefficient {}", cr.quad_coeffs.1))?;
        ensure((cr.linear_from_angles - 2.0).abs() < 1e-12, || format!("angle sum gives {}", cr.linear_from_angles))?;
        ensure(cr.residual().abs() < 1e-12, || format!("residual {}", cr.residual()))?;
    }
    let rect = rectangle();
    ensure(quadratic_leading(&rect, PairConvention::Unordered) == 1.25, || "rectangle A != 5/4".into())?;
    for other in [PairConvention::Distinct, PairConvention::Ordered] {
        let a = quadratic_leading(&rect, other);
        ensure(a != 1.25, || format!("{other:?} also gives 5/4"))?;
    }
    Ok("20 polygons, B = 2 exactly; only j < l gives 5/4".into())
}

fn schwarzian_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(3..=8);
        let p = random_polygon(&mut rng, n);
        let s = schwarzian_from_log_derivative(&log_derivative_from_polygon(&p)).map_err(|e| e.to_string())?;
        let pre = p.prevertices();
        for _ in 0..100 {
            let z = random_point(&mut rng, pre[0], pre[n - 1], 0.02);
            let b = |w: C64| log_derivative(p.alphas(), pre, w);
            let db = cauchy_coefficient(b, z, 0.5 * z.im, 64, 1);
            let oracle = db - 0.5 * b(z) * b(z);
            let got = s.evaluate(z).map_err(|e| e.to_string())?;
            worst = worst.max((got - oracle).norm() / oracle.norm().max(1e-300));
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-8, || format!("relative error {worst:e}"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("max relative error {worst:.1e}, {elapsed:.2?}"))
}

fn homotopy_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = random_polygon(&mut rng, 6);
    let b = log_derivative_from_polygon(&p);
    let s = schwarzian_from_log_derivative(&b).map_err(|e| e.to_string())?;
    let at_one = homotopy_schwarzian(&HomotopyFamily::new(b.clone(), 1.0).map_err(|e| e.to_string())?);
    ensure(at_one == s, || "S_1 differs from S_f".into())?;
    let db = b.derivative_of_simple().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t = rng.gen_range(0.01..1.0);
        let st = homotopy_schwarzian(&HomotopyFamily::new(b.clone(), t).map_err(|e| e.to_string())?);
        let z = random_point(&mut rng, 0.0, 10.0, 0.05);
        let (bz, dbz) = (b.evaluate(z).unwrap(), db.evaluate(z).unwrap());
        let oracle = t * dbz - 0.5 * t * t * bz * bz;
        worst = worst.max((st.evaluate(z).unwrap() - oracle).norm() / (1.0 + oracle.norm()));
    }
    ensure(worst <= 1e-10, || format!("identity error {worst:e}"))?;
    Ok(format!("t = 1 exact, identity error {worst:.1e}"))
}

fn sc_geometry() -> Outcome {
    let p = rectangle();
    let m = ScMap::new(&p).map_err(|e| e.to_string())?;
    let img = m.image_polygon(32).map_err(|e| e.to_string())?;
    ensure(img.closure_gap < 1e-7, || format!("closure gap {:e}", img.closure_gap))?;
    let vi = &img.vertex_indices;
    let mut worst: f64 = 0.0;
    for j in 0..vi.len() - 1 {
        worst = worst.max(collinearity_residual(&img.points[vi[j]..=vi[j + 1]]));
    }
    let mut wrap: Vec<C64> = img.points[vi[vi.len() - 1]..].to_vec();
    wrap.extend_from_slice(&img.points[..=vi[0]]);
    worst = worst.max(collinearity_residual(&wrap));
    ensure(worst < 1e-8, || format!("collinearity {worst:e}"))?;
    let mut turn: f64 = 0.0;
    for (a, t) in p.alphas().iter().zip(turning_angles(m.vertices())) {
        turn = turn.max((t - PI * (1.0 - a)).abs());
    }
    ensure(turn < 1e-6, || format!("turning angle error {turn:e}"))?;
    Ok(format!("gap {:.1e}, collinearity {worst:.1e}, angles {turn:.1e}", img.closure_gap))
}

fn schwarz_ode_consistency() -> Outcome {
    let opts = TaylorOptions::default();
    let mut drift: f64 = 0.0;
    let zero = PoleExpansion::zero(vec![0.0]).map_err(|e| e.to_string())?;
    let z = [C64::new(0.5, 0.3), C64::new(1.5, 1.0), C64::new(3.0, 0.2), C64::new(-1.0, 2.0)];
    let mut w = [O; 4];
    for (k, &zk) in z.iter().enumerate() {
        let sol = solve_companion(&zero, &[I, zk], &opts).map_err(|e| e.to_string())?;
        drift = drift.max(sol.wronskian_drift);
        w[k] = sol.end().ratio();
    }
    let moebius = (cross_ratio(w) - cross_ratio(z)).norm();
    ensure(moebius < 1e-8, || format!("phi = 0 cross-ratio error {moebius:e}"))?;

    let phi = schwarzian_from_log_derivative(&log_derivative_from_polygon(&rectangle())).map_err(|e| e.to_string())?;
    let sc = ScMap::new(&rectangle()).map_err(|e| e.to_string())?;
    let v = sc.vertices();
    let mut img = [O; 4];
    for (j, slot) in img.iter_mut().enumerate() {
        *slot = vertex_image(&phi, j, &opts).map_err(|e| e.to_string())?.ok_or("vertex image unavailable")?;
    }
    let vertex = (cross_ratio(img) - cross_ratio([v[0], v[1], v[2], v[3]])).norm();
    ensure(vertex < 1e-6, || format!("vertex cross-ratio error {vertex:e}"))?;
    let tr = trace_boundary(&phi, 400, &TraceOptions::default()).map_err(|e| e.to_string())?;
    drift = drift.max(tr.wronskian_drift);
    for &zk in &z {
        map_value(&phi, zk, &opts).map_err(|e| e.to_string())?;
        drift = drift.max(solve_companion(&phi, &[I, zk], &opts).map_err(|e| e.to_string())?.wronskian_drift);
    }
    ensure(drift <= 1e-8, || format!("Wronskian drift {drift:e}"))?;
    Ok(format!("Moebius {moebius:.1e}, vertices {vertex:.1e}, drift {drift:.1e}"))
}

fn univalence_probe() -> Outcome {
    let start = Instant::now();
    let rect = rectangle();
    let r0 = critical_radius(&rect).r0;
    let subject = ProbeSubject::new(log_derivative_from_polygon(&rect), r0).map_err(|e| e.to_string())?;
    let small: Vec<f64> = (1..=9).map(|k| 0.1 * k as f64 * r0).collect();
    let opts = ProbeOptions::default();
    let near = ray_probe(&subject, &small, &[Variant::Scaled, Variant::Homotopy], &opts).map_err(|e| e.to_string())?;
    for row in &near.rows {
        ensure(row.simple == Some(true), || format!("{} at t = {} not simple", row.variant.name(), row.t))?;
    }
    let wide: Vec<f64> = (1..=20).map(|k| 0.25 * k as f64).collect();
    let far = ray_probe(&subject, &wide, &[Variant::Scaled], &opts).map_err(|e| e.to_string())?;
    let mut large = 0;
    for row in &far.rows {
        if row.norm_hp1.is_some_and(|n| n > 1.5) {
            large += 1;
            ensure(row.simple == Some(false), || format!("scaled t = {} simple with hp1 {:?}", row.t, row.norm_hp1))?;
        }
    }
    ensure(large > 0, || "grid never exceeds hp1 = 3/2".into())?;
    let b = &far.brackets[0];
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "simple up to 0.9 r0; {large} rows past 3/2 all non-simple; scaled breakdown in ({}, {}); {elapsed:.2?}",
        b.last_simple.map_or("none".into(), |t| t.to_string()),
        b.first_nonsimple.map_or("none".into(), |t| t.to_string())
    ))
}

fn ahlfors_weill_identity() -> Outcome {
    let budget = SupBudget::default();
    let b = log_derivative_from_polygon(&rectangle());
    let mut list: Vec<PoleExpansion> =
        [0.1, 0.4, 0.7, 1.0].iter().map(|&t| homotopy_schwarzian(&HomotopyFamily::new(b.clone(), t).unwrap())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 3..=8 {
        list.push(schwarzian_from_log_derivative(&log_derivative_from_polygon(&random_polygon(&mut rng, n))).unwrap());
    }
    let mut worst: f64 = 0.0;
    for phi in &list {
        let nu = ahlfors_weill_field(phi, 0.5).map_err(|e| e.to_string())?;
        let (hp1, _) = half_plane_norms(phi, &budget);
        let f = field_sup_norm(&nu, &budget).value;
        worst = worst.max((f - 0.5 * hp1.value).abs() / (1.0 + hp1.value));
    }
    ensure(worst < 1e-5, || format!("identity error {worst:e}"))?;
    // scale 2 is the field in the 4 y^2 |phi| normalization
    let base = &list[3];
    let (hp1, _) = half_plane_norms(base, &budget);
    for target in [1.9, 1.99, 2.01, 2.1] {
        let phi = base.scaled(target / (4.0 * hp1.value));
        let rep = admissibility(&ahlfors_weill_field(&phi, 2.0).map_err(|e| e.to_string())?, &budget);
        ensure(rep.below_two_hp4 == (target < 2.0), || format!("hp4 flag wrong at {target}"))?;
        ensure(rep.admissible == rep.below_two_hp4, || format!("admissible disagrees at hp4 = {}", rep.norm_hp4))?;
        ensure(rep.below_two_hp1, || "hp1 flag should hold below 2".into())?;
    }
    Ok(format!("10 Schwarzians, error {worst:.1e}; flag flips at hp4 = 2, hp1 reported alongside"))
}

fn series_oracle(f: &ExteriorExpansion, n: usize) -> Vec<Vec<C64>> {
    let mul = |a: &Vec<Vec<C64>>, b: &Vec<Vec<C64>>| {
        let mut r = vec![vec![O; n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n {
                for p in 0..=n - i {
                    for q in 0..=n - j {
                        r[i + p][j + q] += a[i][j] * b[p][q];
                    }
                }
            }
        }
        r
    };
    let mut p = vec![vec![O; n + 1]; n + 1];
    for m in 1..=f.truncation() {
        for a in 0..m {
            if a < n && m - a <= n {
                p[a + 1][m - a] += f.b(m);
            }
        }
    }
    let mut sum = vec![vec![O; n + 1]; n + 1];
    let mut pow = p.clone();
    for j in 1..=n {
        for a in 0..=n {
            for b in 0..=n {
                sum[a][b] += pow[a][b] / j as f64;
            }
        }
        pow = mul(&pow, &p);
    }
    sum
}

fn grunsky_suite() -> Outcome {
    let opts = TaylorOptions::default();
    let zero = PoleExpansion::zero(vec![0.0]).map_err(|e| e.to_string())?;
    let f = exterior_expansion_from_schwarzian(&zero, 1.5, 512, 16, &opts).map_err(|e| e.to_string())?;
    let g = grunsky_matrix(&f, 16).map_err(|e| e.to_string())?;
    let mob = g.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    ensure(mob <= 1e-9, || format!("Moebius matrix entry {mob:e}"))?;

    let jouk = ExteriorExpansion::new(vec![O, ONE]).map_err(|e| e.to_string())?;
    let gj = grunsky_matrix(&jouk, 12).map_err(|e| e.to_string())?;
    let oracle = series_oracle(&jouk, 12);
    let mut jerr: f64 = 0.0;
    for n in 1..=12 {
        for k in 1..=12 {
            jerr = jerr.max((gj.coeffs[(n - 1, k - 1)] - oracle[n][k]).norm());
        }
    }
    ensure(jerr <= 1e-10, || format!("Joukowski error {jerr:e}"))?;

    let b = log_derivative_from_polygon(&rectangle());
    let mut list: Vec<PoleExpansion> =
        [0.3, 0.7, 1.0].iter().map(|&t| homotopy_schwarzian(&HomotopyFamily::new(b.clone(), t).unwrap())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [3, 5] {
        list.push(schwarzian_from_log_derivative(&log_derivative_from_polygon(&random_polygon(&mut rng, n))).unwrap());
    }
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for phi in &list {
        let tr = trace_boundary(phi, 400, &TraceOptions { vertex_images: false, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let f = exterior_expansion_from_schwarzian(phi, 1.5, 512, 32, &opts).map_err(|e| e.to_string())?;
        let rep = grunsky_report(&f, &[1, 2, 4, 8, 16, 32], None).map_err(|e| e.to_string())?;
        for w in rep.rows.windows(2) {
            ensure(w[1].norm >= w[0].norm - 1e-12, || format!("norm drops from N = {} to {}", w[0].n, w[1].n))?;
        }
        if tr.simple {
            checked += 1;
            let top = rep.rows.iter().map(|r| r.norm).fold(0.0, f64::max);
            worst = worst.max(top);
            ensure(top <= 1.0 + 1e-3, || format!("simple map with norm {top}"))?;
        }
    }
    ensure(checked > 0, || "no simple map checked".into())?;
    Ok(format!("Moebius {mob:.1e}, Joukowski {jerr:.1e}, {checked} simple maps, max norm {worst:.3}"))
}

fn theta_suite() -> Outcome {
    let phi = |z: C64| (z + I).powi(-4);
    let lambda = 2.5f64;
    let ball = enumerate_ball(&[dilation(lambda).map_err(|e| e.to_string())?], 40).map_err(|e| e.to_string())?;
    let mut cerr: f64 = 0.0;
    for z in [C64::new(0.3, 0.8), C64::new(-2.0, 0.1), C64::new(5.0, 3.0)] {
        let oracle: C64 = (-200..=200).map(|k| lambda.powi(2 * k) * (lambda.powi(k) * z + I).powi(-4)).sum();
        let got = theta_series(&phi, &ball, z).map_err(|e| e.to_string())?.value;
        cerr = cerr.max((got - oracle).norm() / (1.0 + oracle.norm()));
    }
    ensure(cerr <= 1e-10, || format!("cyclic error {cerr:e}"))?;
    let points = [C64::new(0.1, 1.0), C64::new(-0.7, 0.6), C64::new(1.2, 2.0)];
    let configs: [(&str, Vec<MoebiusTransform>, usize); 2] =
        [("cyclic", vec![dilation(2.0).unwrap()], 12), ("pair", schottky_pair().to_vec(), 6)];
    for (name, gens, l) in configs {
        let rows = residual_table(&phi, &enumerate_ball(&gens, l).unwrap(), &points).map_err(|e| e.to_string())?;
        let t = &rows[rows.len() - 3..];
        ensure(t[0].residual > t[1].residual && t[1].residual > t[2].residual, || format!("{name} residuals {t:?}"))?;
    }
    let id = enumerate_ball(&schottky_pair(), 0).unwrap();
    let z = C64::new(0.4, 0.9);
    ensure(theta_series(&phi, &id, z).unwrap().value == phi(z), || "identity ball differs from phi".into())?;
    Ok(format!("cyclic {cerr:.1e}; residuals decrease in both groups; identity exact"))
}

fn determinism() -> Outcome {
    let args = ["report", "--polygon", "configs/rectangle.json", "--seed", "17"];
    let a = run_cli(&args)?;
    let b = run_cli(&args)?;
    ensure(a.status.success() && b.status.success(), || "report failed".into())?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("rectangle critical radius", rectangle_critical_radius),
        ("index convention lock", index_convention_lock),
        ("Schwarzian oracle equivalence", schwarzian_oracle),
        ("homotopy closure", homotopy_closure),
        ("SC geometry", sc_geometry),
        ("Schwarz ODE consistency", schwarz_ode_consistency),
        ("univalence probe", univalence_probe),
        ("Ahlfors-Weill identity", ahlfors_weill_identity),
        ("Grunsky suite", grunsky_suite),
        ("theta series", theta_suite),
        ("report determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
