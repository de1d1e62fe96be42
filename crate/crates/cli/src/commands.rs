//! The subcommands. Each returns the full report text plus the run status;
//! the caller writes the text once and then exits.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use capacitary_core::bem::{solve_equilibrium_with, BemOptions, EquilibriumSolution, SolveMethod};
use capacitary_core::functionals::{NoiseFloor, TheoremReport, Thresholds};
use capacitary_core::geometry::TriMesh;
use capacitary_core::identity_lab::{
    run_suite, IdentityKind, SuiteOptions, SuiteReport, ORDER_RANGE,
};
use capacitary_core::oracles::unit_sphere_area;
use serde_json::{json, Value};

use crate::args::Format;
use crate::config::{Input, RunConfig, Shape, ShapeSpec};
use crate::error::CliError;
use crate::io::load_off;
use crate::report::{fmt17, num, opt, to_text};

/// Report text and run status.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub status: Result<(), CliError>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            status: Ok(()),
        }
    }
}

/// Header of the convergence CSV.
pub const CONVERGENCE_HEADER: &str =
    "level,panels,capacity,cap_error,f1,f2_gap,newton_deficit,wall_time_s";

fn load_mesh(input: &Input) -> Result<TriMesh, CliError> {
    let mesh = match input {
        Input::Mesh(path) => load_off(path)?,
        Input::Shape(spec) => spec.mesh()?,
    };
    validated(mesh)
}

fn validated(mesh: TriMesh) -> Result<TriMesh, CliError> {
    let report = mesh.validate();
    if !report.is_valid() {
        return Err(CliError::Validation(report.failures()));
    }
    Ok(mesh)
}

fn solve<'m>(mesh: &'m TriMesh, quad_order: usize) -> Result<EquilibriumSolution<'m>, CliError> {
    solve_equilibrium_with(mesh, &BemOptions::with_quad_order(quad_order)).map_err(CliError::Solver)
}

fn input_of(cfg: &RunConfig) -> Result<&Input, CliError> {
    cfg.input
        .as_ref()
        .ok_or_else(|| CliError::Usage("no input given".into()))
}

fn mesh_json(mesh: &TriMesh) -> Value {
    json!({
        "panels": mesh.num_panels(),
        "level": mesh.level(),
        "vertices": mesh.vertices().len(),
        "total_area": num(mesh.total_area()),
    })
}

fn solver_json(sol: &EquilibriumSolution<'_>) -> Value {
    let info = sol.info();
    let (method, iterations) = match info.method {
        SolveMethod::DirectLu => ("lu", None),
        SolveMethod::Gmres { iterations } => ("gmres", Some(iterations)),
    };
    json!({
        "method": method,
        "iterations": iterations,
        "quad_order": info.quad_order,
        "residual_inf": num(info.residual_inf),
        "condition_estimate": num(info.condition_estimate),
        "min_sigma": num(info.min_sigma),
        "max_sigma": num(info.max_sigma),
        "positive": info.positive,
        "creased": info.creased,
    })
}

fn oracle_of(input: &Input) -> Option<f64> {
    match input {
        Input::Shape(spec) => spec.oracle_capacity(),
        Input::Mesh(_) => None,
    }
}

pub fn capacity(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let input = input_of(cfg)?;
    let mesh = load_mesh(input)?;
    let sol = solve(&mesh, cfg.quad_order)?;
    let caps = sol
        .capacity_three_ways(cfg.far_radius * mesh.diameter())
        .map_err(CliError::Solver)?;
    let oracle = oracle_of(input);
    let text = match cfg.format {
        Format::Json => to_text(&json!({
            "command": "capacity",
            "config": cfg.echo(),
            "mesh": mesh_json(&mesh),
            "solver": solver_json(&sol),
            "cap_charge": num(caps.charge),
            "cap_asymptotic": num(caps.asymptotic),
            "cap_energy": num(caps.energy),
            "spread": num(caps.spread()),
            "oracle_capacity": opt(oracle),
            "relative_error": opt(oracle.map(|o| (caps.charge - o) / o)),
        })),
        Format::Csv => {
            let info = sol.info();
            format!(
                "panels,level,cap_charge,cap_asymptotic,cap_energy,spread,min_sigma,max_sigma\n{},{},{},{},{},{},{},{}\n",
                mesh.num_panels(),
                mesh.level().map_or(String::new(), |l| l.to_string()),
                fmt17(caps.charge),
                fmt17(caps.asymptotic),
                fmt17(caps.energy),
                fmt17(caps.spread()),
                fmt17(info.min_sigma),
                fmt17(info.max_sigma),
            )
        }
    };
    Ok(Outcome::ok(text))
}

/// The icosphere level whose panel count `20·4^L` is closest to `panels`.
pub fn calibration_level(mesh: &TriMesh) -> u32 {
    mesh.level().unwrap_or_else(|| {
        let l = ((mesh.num_panels() as f64 / 20.0).ln() / 4f64.ln()).round();
        l.clamp(1.0, 5.0) as u32
    })
}

fn noise_floor(
    cfg: &RunConfig,
    mesh: &TriMesh,
    sol: &EquilibriumSolution<'_>,
) -> Result<NoiseFloor, CliError> {
    let level = calibration_level(mesh);
    let same_sphere = matches!(
        cfg.input,
        Some(Input::Shape(ShapeSpec { shape: Shape::Sphere { .. }, level: Some(l) })) if l == level
    );
    if same_sphere {
        NoiseFloor::of_sphere_solution(sol, cfg.seed)
    } else {
        NoiseFloor::measure(level, cfg.quad_order, cfg.seed)
    }
    .map_err(CliError::Solver)
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let input = input_of(cfg)?;
    let mesh = load_mesh(input)?;
    let sol = solve(&mesh, cfg.quad_order)?;
    let floor = noise_floor(cfg, &mesh, &sol)?;
    let calibrated = Thresholds::from_noise_floor(&floor);
    let thresholds = Thresholds {
        f1: cfg.tol_f1.unwrap_or(calibrated.f1),
        f2: cfg.tol_f2.unwrap_or(calibrated.f2),
        newton: cfg.tol_newton.unwrap_or(calibrated.newton),
    };
    let rep = TheoremReport::from_solution(&sol, thresholds, cfg.samples, cfg.seed)
        .map_err(CliError::Solver)?;
    let lb = rep.lower_bound;
    let text = match cfg.format {
        Format::Json => to_text(&json!({
            "command": "verify",
            "config": cfg.echo(),
            "capacity": num(rep.capacity),
            "f1": num(rep.f1),
            "f1_scale": num(rep.f1_scale),
            "f1_relative": num(rep.f1_relative()),
            "f2_lhs": num(rep.f2_lhs),
            "f2_rhs": num(rep.f2_rhs),
            "f2_gap": num(rep.f2_relative_gap()),
            "lb_product": opt(lb.map(|l| l.product)),
            "lb_rhs": opt(lb.map(|l| l.rhs)),
            "lb_quoted_rhs": opt(lb.map(|l| l.quoted_rhs)),
            "lb_note": "F2 >= 8*pi^2/Cap, so Cap*F2 >= 8*pi^2 with equality on every ball; \
                        (n-2)^3*omega_n/2 = 2*pi is the F2 bound only when Cap = 4*pi",
            "newton_sup_deficit": num(rep.newton_sup_deficit),
            "pbv_max_residual": num(rep.pbv_max_residual),
            "sample_count": rep.sample_count,
            "verdict_ball": rep.verdict.ball,
            "verdict": { "ball": rep.verdict.ball, "reasons": rep.verdict.reasons },
            "mesh": mesh_json(&mesh),
            "solver": solver_json(&sol),
            "thresholds": {
                "f1": num(thresholds.f1),
                "f2": num(thresholds.f2),
                "newton": num(thresholds.newton),
            },
            "noise_floor": {
                "level": floor.level,
                "f1": num(floor.f1),
                "f2": num(floor.f2),
                "newton": num(floor.newton),
            },
        })),
        Format::Csv => format!(
            "panels,level,capacity,f1,f2_lhs,f2_rhs,lb_product,lb_rhs,newton_sup_deficit,pbv_max_residual,verdict_ball\n\
             {},{},{},{},{},{},{},{},{},{},{}\n",
            mesh.num_panels(),
            mesh.level().map_or(String::new(), |l| l.to_string()),
            fmt17(rep.capacity),
            fmt17(rep.f1),
            fmt17(rep.f2_lhs),
            fmt17(rep.f2_rhs),
            lb.map_or(String::new(), |l| fmt17(l.product)),
            lb.map_or(String::new(), |l| fmt17(l.rhs)),
            fmt17(rep.newton_sup_deficit),
            fmt17(rep.pbv_max_residual),
            rep.verdict.ball,
        ),
    };
    Ok(Outcome::ok(text))
}

/// Settings of the identity suite command.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityConfig {
    pub suite: SuiteOptions,
    /// `None` prints the plain-text summary.
    pub format: Option<Format>,
}

pub fn identity_check(cfg: &IdentityConfig) -> Result<Outcome, CliError> {
    if cfg.suite.dims.is_empty() || cfg.suite.dims.iter().any(|&n| n < 3) {
        return Err(CliError::Usage("--dims must list dimensions >= 3".into()));
    }
    if cfg.suite.points_per_function == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let report = run_suite(&cfg.suite).map_err(CliError::Solver)?;
    let text = match cfg.format {
        None => suite_summary(&report),
        Some(Format::Json) => to_text(&suite_json(cfg, &report)),
        Some(Format::Csv) => suite_csv(&report),
    };
    let status = if report.passed() {
        Ok(())
    } else {
        Err(CliError::Check(suite_failures(&report)))
    };
    Ok(Outcome { text, status })
}

fn suite_failures(report: &SuiteReport) -> String {
    let mut names: BTreeMap<(usize, IdentityKind, String), usize> = BTreeMap::new();
    for c in report.failed_checks() {
        *names.entry((c.n, c.kind, c.function.clone())).or_default() += 1;
    }
    let mut msg = String::from("identity suite failed:");
    for ((n, kind, f), count) in names {
        let _ = write!(
            msg,
            "\n  {} n={n} {f}: {count} check(s) outside the order range",
            kind.name()
        );
    }
    if !report.level_sets_ok() {
        let _ = write!(
            msg,
            "\n  level-set identities: residual {:.3e}",
            report.level_set_max
        );
    }
    if !report.gamma_roots_ok() {
        msg.push_str("\n  gamma roots");
    }
    if !report.boundary_limits_ok() {
        msg.push_str("\n  boundary limits");
    }
    msg
}

type GroupKey = (usize, IdentityKind, String, i64);
type GroupStats = (f64, f64, usize, usize, f64);

/// Per `(n, identity, function, γ)`: order range over points and exact count.
fn suite_groups(report: &SuiteReport) -> BTreeMap<GroupKey, GroupStats> {
    let mut groups: BTreeMap<_, GroupStats> = BTreeMap::new();
    for c in &report.checks {
        let key = (
            c.n,
            c.kind,
            c.function.clone(),
            (c.gamma * 2.0).round() as i64,
        );
        let e = groups
            .entry(key)
            .or_insert((f64::INFINITY, f64::NEG_INFINITY, 0, 0, c.gamma));
        e.2 += 1;
        match c.estimate.order {
            Some(p) => {
                e.0 = e.0.min(p);
                e.1 = e.1.max(p);
            }
            None => e.3 += 1,
        }
    }
    groups
}

/// Plain-text suite report.
pub fn suite_summary(report: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "identity suite, dimensions {:?}", report.dims);
    let _ = writeln!(
        out,
        "{:<3} {:<17} {:<22} {:>6}  {:<19} {:>6} {:>6}  status",
        "n", "identity", "function", "gamma", "order (min..max)", "points", "exact"
    );
    for ((n, kind, f, _), (lo, hi, count, exact, gamma)) in suite_groups(report) {
        let range = if lo.is_finite() {
            format!("{lo:.4}..{hi:.4}")
        } else {
            "exact".to_string()
        };
        let ok = !lo.is_finite() || (lo >= ORDER_RANGE.0 && hi <= ORDER_RANGE.1);
        let _ = writeln!(
            out,
            "{n:<3} {:<17} {f:<22} {gamma:>6} {range:<19} {count:>6} {exact:>6}  {}",
            kind.name(),
            if ok { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        out,
        "level-set identities: {} points, max relative residual {:.3e} (tolerance 1e-11) {}",
        report.level_set_count,
        report.level_set_max,
        if report.level_sets_ok() { "ok" } else { "FAIL" }
    );
    let _ = writeln!(out, "gamma roots (exact):");
    for (n, g1, g2, c1, c2) in &report.gamma_table {
        let _ = writeln!(out, "  n={n:<2} gamma1={g1:<4} gamma2={g2:<5} coefficient(gamma1)={c1} coefficient(gamma2)={c2}");
    }
    let _ = writeln!(out, "boundary fluxes on the ball oracle:");
    for (n, rows) in &report.boundary_limits {
        for r in rows {
            let _ = writeln!(
                out,
                "  n={n} R={:<6} flux(gamma1)={:+.3e} flux(gamma2)={:.10} limit={:.10} rel.err={:.2e}",
                r.radius,
                r.flux_gamma1,
                r.flux_gamma2,
                r.limit_gamma2,
                r.gamma2_relative_error()
            );
        }
    }
    let _ = writeln!(
        out,
        "{}",
        if report.passed() {
            "all checks passed"
        } else {
            "SOME CHECKS FAILED"
        }
    );
    out
}

fn suite_json(cfg: &IdentityConfig, report: &SuiteReport) -> Value {
    let groups: Vec<Value> = suite_groups(report)
        .into_iter()
        .map(|((n, kind, f, _), (lo, hi, count, exact, gamma))| {
            json!({
                "n": n,
                "identity": kind.key(),
                "function": f,
                "gamma": num(gamma),
                "order_min": if lo.is_finite() { num(lo) } else { Value::Null },
                "order_max": if hi.is_finite() { num(hi) } else { Value::Null },
                "points": count,
                "exact": exact,
            })
        })
        .collect();
    json!({
        "command": "identity-check",
        "config": {
            "dims": cfg.suite.dims,
            "points": cfg.suite.points_per_function,
            "seed": cfg.suite.seed,
            "inject_fault": cfg.suite.fault.map(|k| k.key()),
        },
        "passed": report.passed(),
        "order_range": [num(ORDER_RANGE.0), num(ORDER_RANGE.1)],
        "checks": groups,
        "failed": report.failed_checks().count(),
        "level_set": { "points": report.level_set_count, "max_residual": num(report.level_set_max) },
        "gamma_roots": report.gamma_table.iter().map(|(n, g1, g2, c1, c2)| json!({
            "n": n, "gamma1": g1.to_string(), "gamma2": g2.to_string(),
            "coefficient_gamma1": c1.to_string(), "coefficient_gamma2": c2.to_string(),
        })).collect::<Vec<_>>(),
        "boundary_limits": report.boundary_limits.iter().flat_map(|(n, rows)| rows.iter().map(move |r| json!({
            "n": n, "radius": num(r.radius), "flux_gamma1": num(r.flux_gamma1),
            "flux_gamma2": num(r.flux_gamma2), "limit_gamma2": num(r.limit_gamma2),
        }))).collect::<Vec<_>>(),
    })
}

fn suite_csv(report: &SuiteReport) -> String {
    let mut out =
        String::from("n,identity,function,gamma,residual_h,residual_h2,residual_h4,order\n");
    for c in &report.checks {
        let [a, b, d] = c.estimate.residuals;
        let _ = writeln!(
            out,
            "{},{},\"{}\",{},{},{},{},{}",
            c.n,
            c.kind.key(),
            c.function,
            fmt17(c.gamma),
            fmt17(a),
            fmt17(b),
            fmt17(d),
            c.estimate.order.map_or("exact".to_string(), fmt17)
        );
    }
    out
}

/// One level of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: u32,
    pub panels: usize,
    pub capacity: f64,
    pub cap_error: Option<f64>,
    pub f1: f64,
    pub f2_gap: f64,
    pub newton_deficit: f64,
    pub wall_time_s: f64,
}

/// Settings of the refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub run: RunConfig,
    pub levels: Vec<u32>,
    pub timing: bool,
}

pub fn convergence_rows(
    cfg: &ConvergenceConfig,
) -> Result<(Vec<ConvergenceRow>, ShapeSpec), CliError> {
    let spec = match input_of(&cfg.run)? {
        Input::Shape(s) => s.clone(),
        Input::Mesh(_) => {
            return Err(CliError::Usage(
                "convergence needs a --shape spec, not a mesh file".into(),
            ))
        }
    };
    let oracle = spec.oracle_capacity();
    let mut rows = Vec::with_capacity(cfg.levels.len());
    for &level in &cfg.levels {
        let mesh = validated(spec.mesh_at(level)?)?;
        let start = Instant::now();
        let sol = solve(&mesh, cfg.run.quad_order)?;
        let rep =
            TheoremReport::from_solution(&sol, Thresholds::exact(), cfg.run.samples, cfg.run.seed)
                .map_err(CliError::Solver)?;
        let wall = if cfg.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        rows.push(ConvergenceRow {
            level,
            panels: mesh.num_panels(),
            capacity: rep.capacity,
            cap_error: oracle.map(|o| (rep.capacity - o).abs() / o),
            f1: rep.f1,
            f2_gap: rep.f2_relative_gap(),
            newton_deficit: rep.newton_sup_deficit,
            wall_time_s: wall,
        });
    }
    Ok((rows, spec))
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = format!("{CONVERGENCE_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.level,
            r.panels,
            fmt17(r.capacity),
            r.cap_error.map_or(String::new(), fmt17),
            fmt17(r.f1),
            fmt17(r.f2_gap),
            fmt17(r.newton_deficit),
            fmt17(r.wall_time_s),
        );
    }
    out
}

pub fn convergence(cfg: &ConvergenceConfig) -> Result<Outcome, CliError> {
    let (rows, spec) = convergence_rows(cfg)?;
    let text = match cfg.run.format {
        Format::Csv => convergence_csv(&rows),
        Format::Json => to_text(&json!({
            "command": "convergence",
            "config": cfg.run.echo(),
            "levels": cfg.levels,
            "rows": rows.iter().map(|r| json!({
                "level": r.level, "panels": r.panels, "capacity": num(r.capacity),
                "cap_error": opt(r.cap_error), "f1": num(r.f1), "f2_gap": num(r.f2_gap),
                "newton_deficit": num(r.newton_deficit), "wall_time_s": num(r.wall_time_s),
            })).collect::<Vec<_>>(),
        })),
    };
    let mut status = Ok(());
    if spec.is_sphere() {
        let errors: Vec<f64> = rows.iter().filter_map(|r| r.cap_error).collect();
        if let Some(w) = errors.windows(2).position(|w| !(w[1] < w[0])) {
            status = Err(CliError::Check(format!(
                "sphere capacity error does not decrease from level {} to level {}",
                rows[w].level,
                rows[w + 1].level
            )));
        }
    }
    Ok(Outcome { text, status })
}

pub fn oracle(spec: &ShapeSpec, n: usize, format: Format) -> Result<Outcome, CliError> {
    if n < 3 {
        return Err(CliError::Usage(format!(
            "--dim must be at least 3, got {n}"
        )));
    }
    let mut fields: Vec<(&str, Value)> = vec![("dim", json!(n))];
    match spec.shape {
        Shape::Sphere { radius } => {
            let omega = unit_sphere_area(n).map_err(CliError::Solver)?;
            let rep = TheoremReport::for_ball(n, radius, 64, 1).map_err(CliError::Solver)?;
            let nf = n as f64;
            fields.extend([
                ("shape", json!("sphere")),
                ("radius", num(radius)),
                ("omega_n", num(omega)),
                ("capacity", num(rep.capacity)),
                ("boundary_gradient", num((nf - 2.0) / radius)),
                ("boundary_mean_curvature", num(1.0 / radius)),
                ("boundary_area", num(omega * radius.powi(n as i32 - 1))),
                ("f1", num(rep.f1)),
                ("f2_lhs", num(rep.f2_lhs)),
                ("f2_rhs", num(rep.f2_rhs)),
                ("lb_product", opt(rep.lower_bound.map(|l| l.product))),
                ("lb_rhs", opt(rep.lower_bound.map(|l| l.rhs))),
                ("newton_deficit", num(rep.newton_sup_deficit)),
                ("pbv_residual", num(rep.pbv_max_residual)),
            ]);
        }
        Shape::Ellipsoid { a, b, c } => {
            if n != 3 {
                return Err(CliError::Unsupported(format!(
                    "ellipsoid oracle in dimension {n}"
                )));
            }
            let cap = spec.oracle_capacity().ok_or_else(|| {
                CliError::Unsupported("ellipsoid capacity quadrature did not converge".into())
            })?;
            fields.extend([
                ("shape", json!("ellipsoid")),
                ("a", num(a)),
                ("b", num(b)),
                ("c", num(c)),
                ("omega_n", num(4.0 * PI)),
                ("capacity", num(cap)),
            ]);
        }
        Shape::Bumpy { .. } => {
            return Err(CliError::Unsupported(
                "shape without a closed-form oracle: bumpy".into(),
            ))
        }
    }
    let text = match format {
        Format::Json => {
            let mut map = serde_json::Map::new();
            map.insert("command".into(), json!("oracle"));
            for (k, v) in fields {
                map.insert(k.into(), v);
            }
            to_text(&Value::Object(map))
        }
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in fields {
                let _ = writeln!(
                    out,
                    "{k},{}",
                    v.as_str().map_or(v.to_string(), String::from)
                );
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}
