use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use berslab::beltrami::{admissibility, ahlfors_weill_field, field_grid, grid_csv};
use berslab::grunsky::{exterior_expansion_from_schwarzian, grunsky_matrix, grunsky_report, matrix_csv};
use berslab::io::{points_csv, with_schema, PolygonConfig};
use berslab::moebius::{generators_from_json, MoebiusTransform};
use berslab::norms::{hyperbolic_sup_norm, NormConvention, NormEstimate, SupBudget};
use berslab::ode::TaylorOptions;
use berslab::polygon::{critical_radius, PolygonSpec, ScMap};
use berslab::rational::{
    homotopy_schwarzian, log_derivative_from_polygon, printed_schwarzian_form, schwarzian_from_log_derivative, HomotopyFamily,
    PoleExpansion,
};
use berslab::schwarz::{probe_csv, ray_probe, trace_boundary, trace_csv, ProbeOptions, ProbeSubject, TraceOptions, Variant};
use berslab::theta::{enumerate_ball, residual_csv, residual_table, schottky_pair, theta_series};
use berslab::C64;

/// Invalid input or configuration; exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl std::fmt::Display) -> anyhow::Error {
    Usage(msg.to_string()).into()
}

#[derive(Parser)]
#[command(name = "berslab", version, about = "Schwarzians of polygon maps, univalence probes and related norms")]
struct Cli {
    /// Directory for output files; results go to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct PolygonArg {
    /// Polygon config (JSON or TOML).
    #[arg(long)]
    polygon: PathBuf,
}

#[derive(Args, Clone)]
struct PointArg {
    /// Ray parameter; defaults to the critical radius.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum, default_value = "homotopy")]
    variant: VariantArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Scaled,
    Homotopy,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Hp1,
    Hp4,
    Disk,
    Becker,
}

impl From<ConventionArg> for NormConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Hp1 => NormConvention::HalfPlane1,
            ConventionArg::Hp4 => NormConvention::HalfPlane4,
            ConventionArg::Disk => NormConvention::DiskSchwarzian,
            ConventionArg::Becker => NormConvention::BeckerPreSchwarzian,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Positive root of the critical-radius quadratic.
    CriticalRadius(PolygonArg),
    /// Boundary of the Schwarz-Christoffel image polygon.
    ScTrace {
        #[command(flatten)]
        polygon: PolygonArg,
        #[arg(long, default_value_t = 32)]
        samples_per_edge: usize,
    },
    /// Boundary simplicity and norms along both rays.
    RayProbe {
        #[command(flatten)]
        polygon: PolygonArg,
        /// `a:b:step`, inclusive.
        #[arg(long, default_value = "0.05:1.0:0.05")]
        t_grid: String,
        #[arg(long, value_enum, default_value = "both")]
        variant: VariantArg,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Permit t > 1 (only meaningful for the scaled ray).
        #[arg(long)]
        allow_beyond_one: bool,
        /// Also write each trace as CSV (requires --out).
        #[arg(long)]
        traces: bool,
    },
    /// Hyperbolic sup-norm of a Schwarzian on the ray.
    Bnorm {
        #[command(flatten)]
        polygon: PolygonArg,
        #[command(flatten)]
        point: PointArg,
        #[arg(long, value_enum, default_value = "hp1")]
        convention: ConventionArg,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Harmonic Beltrami coefficient and its admissibility.
    Beltrami {
        #[command(flatten)]
        polygon: PolygonArg,
        #[command(flatten)]
        point: PointArg,
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
        /// Grid resolution for the |nu| dump (written with --out).
        #[arg(long, default_value_t = 120)]
        grid: usize,
    },
    /// Truncated Grunsky norms of the map on the ray.
    Grunsky {
        #[command(flatten)]
        polygon: PolygonArg,
        #[command(flatten)]
        point: PointArg,
        #[arg(long = "N", default_value_t = 32)]
        n: usize,
        #[arg(long = "M", default_value_t = 512)]
        m: usize,
        #[arg(long, default_value_t = 1.5)]
        radius: f64,
    },
    /// Theta series equivariance residuals.
    Theta {
        /// Generators JSON; a two-generator Schottky group by default.
        #[arg(long)]
        generators: Option<PathBuf>,
        #[arg(long = "L", default_value_t = 6)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Combined report.
    Report {
        #[command(flatten)]
        polygon: PolygonArg,
        #[arg(long = "N", default_value_t = 32)]
        n: usize,
        #[arg(long = "M", default_value_t = 512)]
        m: usize,
        #[arg(long = "L", default_value_t = 5)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_polygon(p: &PolygonArg) -> Result<PolygonSpec> {
    if !p.polygon.exists() {
        return Err(usage(format!("polygon file {} does not exist", p.polygon.display())));
    }
    let cfg = PolygonConfig::load(&p.polygon).map_err(usage)?;
    cfg.validate().map_err(|e| usage(format!("invalid polygon: {e}")))
}

fn parse_grid(s: &str, allow_beyond_one: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("t grid {s:?} is not of the form a:b:step")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("bad number {p:?} in t grid"))))
        .collect::<Result<_>>()?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(usage("t grid step must be positive"));
    }
    let count = ((b - a) / step + 1e-9).floor();
    if count < 0.0 {
        return Err(usage("t grid is empty"));
    }
    let grid: Vec<f64> = (0..=count as usize).map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12).collect();
    if grid.iter().any(|&t| t <= 0.0) {
        return Err(usage("t grid values must be positive"));
    }
    if !allow_beyond_one && grid.iter().any(|&t| t > 1.0 + 1e-12) {
        return Err(usage("t grid exceeds 1 (pass --allow-beyond-one for the scaled ray)"));
    }
    Ok(grid)
}

fn variants(v: VariantArg) -> Vec<Variant> {
    match v {
        VariantArg::Scaled => vec![Variant::Scaled],
        VariantArg::Homotopy => vec![Variant::Homotopy],
        VariantArg::Both => vec![Variant::Scaled, Variant::Homotopy],
    }
}

fn single_variant(v: VariantArg) -> Result<Variant> {
    match v {
        VariantArg::Scaled => Ok(Variant::Scaled),
        VariantArg::Homotopy => Ok(Variant::Homotopy),
        VariantArg::Both => Err(usage("this command takes a single variant")),
    }
}

struct Subject {
    spec: PolygonSpec,
    probe: ProbeSubject,
}

impl Subject {
    fn new(spec: PolygonSpec) -> Result<Self> {
        let r0 = critical_radius(&spec).r0;
        let probe = ProbeSubject::new(log_derivative_from_polygon(&spec), r0)?;
        Ok(Subject { spec, probe })
    }

    fn phi(&self, point: &PointArg) -> Result<(f64, Variant, PoleExpansion)> {
        let variant = single_variant(point.variant)?;
        let t = match (point.t, variant) {
            (Some(t), _) => t,
            (None, Variant::Homotopy) => self.probe.r0,
            (None, Variant::Scaled) => 1.0,
        };
        let phi = self.probe.schwarzian(variant, t).map_err(usage)?;
        Ok((t, variant, phi))
    }
}

struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    /// Writes `body` to `name` under the output directory, or to stdout.
    fn emit(&self, name: &str, body: &str) -> Result<()> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{body}"),
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.emit(name, &s)
    }

    fn side_file(&self, name: &str, body: &str) -> Result<()> {
        if self.out.is_some() {
            self.emit(name, body)?;
        }
        Ok(())
    }
}

fn estimate_json(e: &NormEstimate) -> serde_json::Value {
    json!({
        "convention": e.convention.name(),
        "description": e.convention.description(),
        "value": e.value,
        "argmax": [e.argmax.re, e.argmax.im],
        "stabilized": e.stabilized,
        "samples": e.samples,
        "refinement_depth": e.refinement_depth,
    })
}

fn cmd_critical_radius(sink: &Sink, p: &PolygonArg) -> Result<()> {
    let spec = load_polygon(p)?;
    let cr = critical_radius(&spec);
    let (a, b, c) = cr.quad_coeffs;
    eprintln!("{a} r^2 + {b} r + {c} = 0, r0 = {:.6}", cr.r0);
    sink.emit_json(
        "critical_radius.json",
        &json!({
            "schema": "berslab.critical_radius/1",
            "quad_coeffs": [a, b, c],
            "r0": cr.r0,
            "discriminant": cr.discriminant(),
            "residual": cr.residual(),
            "linear_from_angles": cr.linear_from_angles,
        }),
    )
}

fn cmd_sc_trace(sink: &Sink, p: &PolygonArg, samples: usize) -> Result<()> {
    let spec = load_polygon(p)?;
    if samples < 2 {
        return Err(usage("--samples-per-edge must be at least 2"));
    }
    let map = ScMap::new(&spec)?;
    let poly = map.image_polygon(samples)?;
    sink.emit("sc_trace.csv", &with_schema("berslab.sc_trace/1", &points_csv(&poly.points)))?;
    sink.side_file(
        "sc_trace.json",
        &serde_json::to_string_pretty(&json!({
            "schema": "berslab.sc_trace_summary/1",
            "vertices": map.vertices().iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
            "infinity": [map.infinity_image().re, map.infinity_image().im],
            "closure_gap": poly.closure_gap,
        }))?,
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_ray_probe(sink: &Sink, p: &PolygonArg, grid: &str, v: VariantArg, samples: usize, beyond: bool, traces: bool) -> Result<bool> {
    let subject = Subject::new(load_polygon(p)?)?;
    let grid = parse_grid(grid, beyond)?;
    if traces && sink.out.is_none() {
        return Err(usage("--traces needs --out"));
    }
    let opts = ProbeOptions { samples, ..ProbeOptions::default() };
    let vs = variants(v);
    let report = ray_probe(&subject.probe, &grid, &vs, &opts).map_err(usage)?;
    sink.emit("ray_probe.csv", &with_schema("berslab.ray_probe/1", &probe_csv(&report)))?;
    sink.side_file("ray_probe.json", &serde_json::to_string_pretty(&json!({"schema": "berslab.ray_probe/1", "report": report}))?)?;
    for b in &report.brackets {
        eprintln!(
            "{}: last simple t = {}, first non-simple t = {}{}",
            b.variant.name(),
            b.last_simple.map_or("-".into(), |t| t.to_string()),
            b.first_nonsimple.map_or("-".into(), |t| t.to_string()),
            if b.non_monotone { " (non-monotone)" } else { "" }
        );
    }
    if traces {
        for row in report.rows.iter().filter(|r| r.error.is_none()) {
            let phi = subject.probe.schwarzian(row.variant, row.t)?;
            let tr = trace_boundary(&phi, samples, &TraceOptions { vertex_images: false, ..TraceOptions::default() })?;
            let name = format!("trace_{}_{:.4}.csv", row.variant.name(), row.t);
            sink.emit(&name, &with_schema("berslab.trace/1", &trace_csv(&tr)))?;
        }
    }
    Ok(report.rows.iter().any(|r| r.error.is_none()))
}

fn cmd_bnorm(sink: &Sink, p: &PolygonArg, point: &PointArg, conv: ConventionArg, levels: usize) -> Result<()> {
    let subject = Subject::new(load_polygon(p)?)?;
    let (t, variant, phi) = subject.phi(point)?;
    let budget = SupBudget::default().with_levels(levels);
    let conv: NormConvention = conv.into();
    let e = match conv {
        NormConvention::BeckerPreSchwarzian => {
            let b = subject.probe.log_derivative.scaled(if variant == Variant::Homotopy { t } else { 1.0 });
            let pre = berslab::norms::TransportedLogDerivative { b: &b, side: berslab::norms::DiskSide::Exterior };
            hyperbolic_sup_norm(&pre, conv, &budget)
        }
        NormConvention::DiskSchwarzian => {
            let psi = berslab::norms::cayley_transport(&phi, berslab::norms::DiskSide::Exterior);
            hyperbolic_sup_norm(&psi, conv, &budget)
        }
        _ => hyperbolic_sup_norm(&phi, conv, &budget),
    };
    let mut v = estimate_json(&e);
    v["schema"] = json!("berslab.bnorm/1");
    v["t"] = json!(t);
    v["variant"] = json!(variant.name());
    sink.emit_json("bnorm.json", &v)
}

fn cmd_beltrami(sink: &Sink, p: &PolygonArg, point: &PointArg, scale: f64, grid: usize) -> Result<()> {
    let subject = Subject::new(load_polygon(p)?)?;
    let (t, variant, phi) = subject.phi(point)?;
    let field = ahlfors_weill_field(&phi, scale).map_err(usage)?;
    let rep = admissibility(&field, &SupBudget::default());
    sink.emit_json("beltrami.json", &json!({"schema": "berslab.beltrami/1", "t": t, "variant": variant.name(), "report": rep}))?;
    if sink.out.is_some() {
        let pre = subject.spec.prevertices();
        let (lo, hi) = (pre[0] - 1.0, pre[pre.len() - 1] + 1.0);
        let rows = field_grid(&field, (lo, hi), (1e-3, 0.5 * (hi - lo)), grid.max(2), grid.max(2))?;
        sink.emit("beltrami_grid.csv", &with_schema("berslab.beltrami_grid/1", &grid_csv(&rows)))?;
    }
    Ok(())
}

fn cmd_grunsky(sink: &Sink, p: &PolygonArg, point: &PointArg, n: usize, m: usize, radius: f64) -> Result<()> {
    let subject = Subject::new(load_polygon(p)?)?;
    let (t, variant, phi) = subject.phi(point)?;
    if n == 0 || m < 8 * n {
        return Err(usage(format!("need N >= 1 and M >= 8N (got N = {n}, M = {m})")));
    }
    let f = exterior_expansion_from_schwarzian(&phi, radius, m, 2 * n, &TaylorOptions::default())?;
    let n_list: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|&k| k < n).chain([n]).collect();
    let field = ahlfors_weill_field(&phi, 0.5)?;
    let nu = berslab::beltrami::field_sup_norm(&field, &SupBudget::default()).value;
    let rep = grunsky_report(&f, &n_list, Some(nu))?;
    sink.emit_json("grunsky.json", &json!({"t": t, "variant": variant.name(), "report": rep, "schema": rep.schema}))?;
    sink.side_file("grunsky_matrix.csv", &with_schema("berslab.grunsky_matrix/1", &matrix_csv(&grunsky_matrix(&f, n)?)))
}

fn load_generators(path: &Option<PathBuf>) -> Result<Vec<MoebiusTransform>> {
    match path {
        None => Ok(schottky_pair().to_vec()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            let g = generators_from_json(&text).map_err(usage)?;
            if g.is_empty() {
                return Err(usage("no generators given"));
            }
            Ok(g)
        }
    }
}

fn sample_points(seed: u64, count: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0))).collect()
}

fn theta_phi(z: C64) -> C64 {
    (z + C64::new(0.0, 1.0)).powi(-4)
}

fn cmd_theta(sink: &Sink, generators: &Option<PathBuf>, l: usize, seed: u64) -> Result<()> {
    let gens = load_generators(generators)?;
    let ball = enumerate_ball(&gens, l).map_err(usage)?;
    let points = sample_points(seed, 4);
    let rows = residual_table(&theta_phi, &ball, &points)?;
    sink.emit("theta_residuals.csv", &with_schema("berslab.theta_residuals/1", &residual_csv(&rows)))?;
    let value = theta_series(&theta_phi, &ball, points[0])?;
    sink.side_file(
        "theta.json",
        &serde_json::to_string_pretty(&json!({"schema": "berslab.theta/1", "elements": ball.len(), "at": [points[0].re, points[0].im], "series": value, "residuals": rows}))?,
    )
}

fn cmd_report(sink: &Sink, p: &PolygonArg, n: usize, m: usize, l: usize, seed: u64) -> Result<()> {
    let spec = load_polygon(p)?;
    if n == 0 || m < 8 * n {
        return Err(usage(format!("need N >= 1 and M >= 8N (got N = {n}, M = {m})")));
    }
    let cr = critical_radius(&spec);
    let r0 = cr.r0;
    let b = log_derivative_from_polygon(&spec);
    let s = schwarzian_from_log_derivative(&b)?;
    let phi = homotopy_schwarzian(&HomotopyFamily::new(b.clone(), r0)?);
    let budget = SupBudget::default();
    let (hp1, hp4) = berslab::norms::half_plane_norms(&phi, &budget);
    let field = ahlfors_weill_field(&phi, 0.5)?;
    let bel = admissibility(&field, &budget);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel: f64 = 0.0;
    let db = b.derivative_of_simple()?;
    for _ in 0..100 {
        let z = C64::new(rng.gen_range(-2.0..6.0), rng.gen_range(0.05..3.0));
        let direct = s.evaluate(z)?;
        let bz = b.evaluate(z)?;
        let oracle = db.evaluate(z)? - 0.5 * bz * bz;
        max_rel = max_rel.max((direct - oracle).norm() / (1.0 + direct.norm()));
    }
    let printed = printed_schwarzian_form(&spec);

    let f = exterior_expansion_from_schwarzian(&phi, 1.5, m, 2 * n, &TaylorOptions::default())?;
    let n_list: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|&k| k < n).chain([n]).collect();
    let gr = grunsky_report(&f, &n_list, Some(bel.field_norm))?;

    let trace = trace_boundary(&phi, 400, &TraceOptions::default())?;

    let ball = enumerate_ball(&schottky_pair(), l)?;
    let points: Vec<C64> = (0..4).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0))).collect();
    let theta_rows = residual_table(&theta_phi, &ball, &points)?;

    let report = json!({
        "schema": "berslab.report/1",
        "seed": seed,
        "polygon": PolygonConfig::from(&spec),
        "critical_radius": {"quad_coeffs": [cr.quad_coeffs.0, cr.quad_coeffs.1, cr.quad_coeffs.2], "r0": r0},
        "schwarzian_check": {"points": 100, "max_relative_residual": max_rel},
        "printed_form": {"max_literal_residual": printed.max_literal_residual, "max_resolved_residual": printed.max_resolved_residual},
        "t": r0,
        "norm_hp1": hp1.value,
        "norm_hp4": hp4.value,
        "norm_argmax": [hp1.argmax.re, hp1.argmax.im],
        "norm_stabilized": hp1.stabilized,
        "beltrami_norm": bel.field_norm,
        "beltrami": bel,
        "trace": {"simple": trace.simple, "indeterminate": trace.indeterminate, "min_gap": trace.min_gap, "closure_residual": trace.closure_residual, "wronskian_drift": trace.wronskian_drift},
        "grunsky": gr,
        "theta": {"generators": "schottky_pair", "L": l, "residuals": theta_rows},
    });
    sink.emit_json("report.json", &report)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("BERSLAB_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| usage(format!("BERSLAB_THREADS={v:?} is not a number")))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| anyhow!(e))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let sink = Sink { out: cli.out };
    match &cli.cmd {
        Command::CriticalRadius(p) => cmd_critical_radius(&sink, p)?,
        Command::ScTrace { polygon, samples_per_edge } => cmd_sc_trace(&sink, polygon, *samples_per_edge)?,
        Command::RayProbe { polygon, t_grid, variant, samples, allow_beyond_one, traces } => {
            return cmd_ray_probe(&sink, polygon, t_grid, *variant, *samples, *allow_beyond_one, *traces)
        }
        Command::Bnorm { polygon, point, convention, levels } => cmd_bnorm(&sink, polygon, point, *convention, *levels)?,
        Command::Beltrami { polygon, point, scale, grid } => cmd_beltrami(&sink, polygon, point, *scale, *grid)?,
        Command::Grunsky { polygon, point, n, m, radius } => cmd_grunsky(&sink, polygon, point, *n, *m, *radius)?,
        Command::Theta { generators, l, seed } => cmd_theta(&sink, generators, *l, *seed)?,
        Command::Report { polygon, n, m, l, seed } => cmd_report(&sink, polygon, *n, *m, *l, *seed)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: every row failed");
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<Usage>().is_some() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
