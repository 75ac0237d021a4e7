//! Scenario execution: each scenario builds its operators, runs the checks,
//! and writes CSV/JSON artifacts into `<outdir>/<scenario>/<config-hash>/`.
//!
//! Checks never abort the run: a failed inequality is recorded in the run
//! record and reflected in the exit code by the caller.

use std::path::Path;
use std::sync::Arc;

use anyhow::Result;
use serde_json::{json, Value};

use fujita_core::contraction::{contraction_experiment, ContractionVerdict};
use fujita_core::data::{ball_mass, baras_pierre_report_with, tau_series, DataSpec, MassVerdict};
use fujita_core::duhamel::HeatPropagator;
use fujita_core::grid::RadialGrid;
use fujita_core::gweight::{check_g_properties, jensen_check, GParams, SampleSpec};
use fujita_core::iterate::{
    build_supersolution, monotone_iterate, picard_iterate, verify_supersolution, IterationOptions,
};
use fujita_core::kernel::HeatKernel;
use fujita_core::mesh::TimeMesh;
use fujita_core::semigroup::{lp_norm, smoothing_kernel_bound, smoothing_report};
use fujita_core::trajectory::weighted_supnorm_track;

use crate::config::{ExperimentConfig, Scenario};
use crate::output::{config_hash, format_float, run_dir, write_csv, write_json};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn le(name: &str, measured: f64, threshold: f64, detail: &str) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            threshold,
            detail: detail.into(),
        }
    }

    fn ge(name: &str, measured: f64, threshold: f64, detail: &str) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured >= threshold,
            measured,
            threshold,
            detail: detail.into(),
        }
    }

    fn flag(name: &str, passed: bool, detail: &str) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            measured: if passed { 1.0 } else { 0.0 },
            threshold: 1.0,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: String,
    pub config_hash: String,
    pub checks: Vec<CheckResult>,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunRecord {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format!("{x}"))
    }
}

fn checks_json(checks: &[CheckResult]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "passed": c.passed,
                    "measured": num(c.measured),
                    "threshold": num(c.threshold),
                    "detail": c.detail,
                })
            })
            .collect(),
    )
}

struct Workspace {
    grid: Arc<RadialGrid>,
    kernel: HeatKernel,
    params: GParams,
    opts: IterationOptions,
}

fn workspace(config: &ExperimentConfig, tolerance_scale: f64) -> Result<Workspace> {
    let grid = Arc::new(RadialGrid::new(
        config.dim,
        config.grid.r_min,
        config.grid.r_max,
        config.grid.nodes,
        config.grid.split,
    )?);
    Ok(Workspace {
        kernel: HeatKernel::new(config.dim)?,
        params: config.gparams(),
        opts: IterationOptions {
            tol: config.tolerances.iteration_tol,
            slack: config.tolerances.slack * tolerance_scale,
            n_max: 50,
        },
        grid,
    })
}

/// Execute one validated configuration; writes artifacts and returns the
/// per-check outcomes.
pub fn run_scenario(
    config: &ExperimentConfig,
    warnings: &[String],
    outdir: &Path,
    tolerance_scale: f64,
) -> Result<RunRecord> {
    let hash = config_hash(config);
    let dir = run_dir(outdir, config.scenario.name(), &hash)?;
    let ws = workspace(config, tolerance_scale)?;

    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let mut payload = serde_json::Map::new();

    match config.scenario {
        Scenario::Existence => run_existence(config, &ws, &dir, &mut checks, &mut artifacts, &mut payload)?,
        Scenario::Nonexistence => {
            run_nonexistence(config, &ws, &dir, tolerance_scale, &mut checks, &mut artifacts, &mut payload)?
        }
        Scenario::Uniqueness => run_uniqueness(config, &ws, &mut checks, &mut payload)?,
        Scenario::Smoothing => run_smoothing(config, &ws, &dir, tolerance_scale, &mut checks, &mut artifacts, &mut payload)?,
        Scenario::Gprops => run_gprops(config, &ws, tolerance_scale, &mut checks, &mut payload)?,
        Scenario::Scaling => run_scaling(config, &ws, &dir, tolerance_scale, &mut checks, &mut artifacts, &mut payload)?,
    }

    payload.insert("scenario".into(), json!(config.scenario.name()));
    payload.insert("config_hash".into(), json!(hash));
    payload.insert("checks".into(), checks_json(&checks));
    payload.insert(
        "warnings".into(),
        Value::Array(warnings.iter().map(|w| json!(w)).collect()),
    );
    write_json(&dir.join("report.json"), &Value::Object(payload))?;
    artifacts.push(dir.join("report.json").display().to_string());

    Ok(RunRecord {
        scenario: config.scenario.name().into(),
        config_hash: hash,
        checks,
        artifacts,
        warnings: warnings.to_vec(),
    })
}

fn mesh_and_propagator(config: &ExperimentConfig, ws: &Workspace) -> Result<HeatPropagator> {
    let mesh = Arc::new(TimeMesh::log_graded(
        config.mesh.t1,
        config.mesh.horizon,
        config.mesh.nodes,
    )?);
    Ok(HeatPropagator::new(ws.grid.clone(), mesh, ws.kernel)?)
}

fn run_existence(
    config: &ExperimentConfig,
    ws: &Workspace,
    dir: &Path,
    checks: &mut Vec<CheckResult>,
    artifacts: &mut Vec<String>,
    payload: &mut serde_json::Map<String, Value>,
) -> Result<()> {
    let prop = mesh_and_propagator(config, ws)?;
    let phi = config.data_spec().materialize(&ws.grid)?;
    let slack = ws.opts.slack;

    let ubar = build_supersolution(&prop, &phi, &ws.params)?;
    let sup = verify_supersolution(&prop, &ubar, &phi, &ws.params, &ws.opts)?;
    let worst_residual = sup.residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    checks.push(CheckResult::le(
        "supersolution_residual",
        worst_residual,
        slack,
        "max (F[ubar] - ubar)/sup ubar over the mesh",
    ));

    let (mono, w) = monotone_iterate(&prop, &phi, &ubar, &ws.params, &ws.opts)?;
    checks.push(CheckResult::flag(
        "monotone_converged",
        mono.converged,
        &format!("{} sweeps", mono.iterations),
    ));
    checks.push(CheckResult::ge(
        "monotone_margin",
        mono.monotone_margin,
        -slack,
        "min (u_{n+1} - u_n) / scale",
    ));
    checks.push(CheckResult::ge(
        "domination_margin",
        mono.domination_margin,
        -slack,
        "min (ubar - u_n) / scale",
    ));
    checks.push(CheckResult::le(
        "fixed_point_residual",
        mono.fixed_point_residual,
        2.0 * ws.opts.tol,
        "weighted distance of one extra sweep",
    ));

    let (pic, solution) = picard_iterate(&prop, &phi, &w, &ws.params, &ws.opts)?;
    checks.push(CheckResult::flag(
        "picard_converged",
        pic.converged,
        &format!("{} sweeps", pic.iterations),
    ));
    checks.push(CheckResult::ge(
        "envelope_margin",
        pic.envelope_margin,
        -slack,
        "min (w - |u_n|) / scale",
    ));

    let track = weighted_supnorm_track(&solution, ws.params.q());
    checks.push(CheckResult::flag(
        "weighted_track_bounded",
        track.max.is_finite(),
        "sup_k t^{N/2} (-log t)^q ||u||_inf",
    ));

    // artifacts: weighted track and the trajectory matrix
    let rows: Vec<Vec<f64>> = track.series.iter().map(|&(t, m)| vec![t, m]).collect();
    write_csv(&dir.join("mtrack.csv"), &["t", "m"], &rows)?;
    artifacts.push(dir.join("mtrack.csv").display().to_string());
    let mut srows = Vec::with_capacity(solution.len());
    for (k, field) in solution.fields().iter().enumerate() {
        let mut row = Vec::with_capacity(field.len() + 1);
        row.push(solution.mesh().nodes()[k]);
        row.extend_from_slice(field.values());
        srows.push(row);
    }
    let mut header: Vec<String> = vec!["t".into()];
    header.extend(ws.grid.nodes().iter().map(|&r| format_float(r)));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(&dir.join("solution.csv"), &header_refs, &srows)?;
    artifacts.push(dir.join("solution.csv").display().to_string());

    payload.insert(
        "iteration".into(),
        json!({
            "monotone": iteration_json(&mono),
            "picard": iteration_json(&pic),
            "supersolution": {
                "confirmed_horizon": sup.confirmed_horizon.map(num),
                "confirmed_all": sup.confirmed_all,
                "c0_measured": num(sup.c0_measured),
                "c_hat": num(sup.c_hat),
                "tail_bound": num(sup.tail_bound),
            },
            "weighted_track_max": num(track.max),
        }),
    );
    Ok(())
}

fn iteration_json(rep: &fujita_core::iterate::IterationReport) -> Value {
    json!({
        "scheme": rep.scheme,
        "iterations": rep.iterations,
        "converged": rep.converged,
        "distances": rep.distances.iter().map(|&d| num(d)).collect::<Vec<_>>(),
        "monotone_margin": num(rep.monotone_margin),
        "domination_margin": num(rep.domination_margin),
        "envelope_margin": num(rep.envelope_margin),
        "fixed_point_residual": num(rep.fixed_point_residual),
        "tail_bound": num(rep.tail_bound),
        "weighted_max": num(rep.weighted_max),
    })
}

fn run_nonexistence(
    config: &ExperimentConfig,
    ws: &Workspace,
    dir: &Path,
    tolerance_scale: f64,
    checks: &mut Vec<CheckResult>,
    artifacts: &mut Vec<String>,
    payload: &mut serde_json::Map<String, Value>,
) -> Result<()> {
    let taus = tau_series(3.0, 30.0, 1.5);
    let slope_min = config.tolerances.slope_min;
    let eps = config.data.eps;
    let nf = config.dim as f64;

    let mut summary = serde_json::Map::new();
    for (label, spec) in [
        ("phi0", DataSpec::Phi0 { eps }),
        ("psi", DataSpec::Psi),
        (
            "gaussian",
            DataSpec::Gaussian {
                t0: config.data.t0,
                amplitude: config.data.amplitude.abs().max(1e-12),
            },
        ),
    ] {
        let field = spec.materialize(&ws.grid)?;
        let rep = baras_pierre_report_with(&field, &taus, slope_min)?;
        let rows: Vec<Vec<f64>> = rep
            .series
            .iter()
            .map(|p| vec![p.tau, p.mass, p.ratio])
            .collect();
        let file = dir.join(format!("baras_pierre_{label}.csv"));
        write_csv(&file, &["tau", "mass", "ratio"], &rows)?;
        artifacts.push(file.display().to_string());
        summary.insert(
            label.into(),
            json!({
                "slope": num(rep.slope),
                "verdict": match rep.verdict { MassVerdict::Diverging => "diverging", MassVerdict::Bounded => "bounded" },
                "gamma0_empirical": num(rep.gamma0_empirical),
                "monotone_tail": rep.monotone_tail,
            }),
        );
        match label {
            "phi0" => {
                checks.push(CheckResult::flag(
                    "phi0_diverging",
                    matches!(rep.verdict, MassVerdict::Diverging),
                    "mass ratio must grow without bound",
                ));
                checks.push(CheckResult::le(
                    "phi0_slope_matches_eps",
                    (rep.slope - eps).abs(),
                    0.05 * tolerance_scale,
                    "fitted growth exponent vs eps",
                ));
            }
            "psi" => {
                checks.push(CheckResult::flag(
                    "psi_bounded",
                    matches!(rep.verdict, MassVerdict::Bounded),
                    "borderline profile stays bounded",
                ));
                let expect = ws.grid.surface_area() * 2.0 / nf;
                checks.push(CheckResult::le(
                    "psi_gamma0",
                    (rep.gamma0_empirical - expect).abs() / expect,
                    0.01 * tolerance_scale,
                    "empirical gamma0 vs omega 2/N",
                ));
            }
            _ => {
                checks.push(CheckResult::flag(
                    "gaussian_bounded",
                    matches!(rep.verdict, MassVerdict::Bounded),
                    "bounded data control",
                ));
                let last = rep.series.last().unwrap().ratio;
                checks.push(CheckResult::le(
                    "gaussian_ratio_collapses",
                    last / rep.gamma0_empirical.max(1e-300),
                    1e-3 * tolerance_scale,
                    "ratio at the smallest radius",
                ));
            }
        }
    }
    payload.insert("baras_pierre".into(), Value::Object(summary));
    Ok(())
}

fn run_uniqueness(
    config: &ExperimentConfig,
    ws: &Workspace,
    checks: &mut Vec<CheckResult>,
    payload: &mut serde_json::Map<String, Value>,
) -> Result<()> {
    let prop = mesh_and_propagator(config, ws)?;
    let phi = config.data_spec().materialize(&ws.grid)?;
    let rep = contraction_experiment(&prop, &phi, config.perturbation, &ws.params, &ws.opts)?;

    checks.push(CheckResult::flag(
        "contractive",
        matches!(
            rep.verdict,
            ContractionVerdict::Contractive | ContractionVerdict::IdenticalTrajectories
        ),
        "one-sweep factor at most 1/2",
    ));
    checks.push(CheckResult::le(
        "measured_factor",
        rep.measured_factor,
        0.5 + ws.opts.slack,
        "sup_t ||D[u]-D[v]||_1 / sup_t ||u-v||_1",
    ));
    checks.push(CheckResult::flag(
        "class_membership",
        rep.class_bound_u.is_finite() && rep.class_bound_v.is_finite(),
        "both trajectories in the weighted uniqueness class",
    ));

    payload.insert(
        "contraction".into(),
        json!({
            "horizon": num(rep.horizon),
            "theoretical_integral": num(rep.theoretical_integral),
            "weight_constant": num(rep.weight_constant),
            "theoretical_factor": num(rep.theoretical_factor),
            "measured_factor": num(rep.measured_factor),
            "distance_sup": num(rep.distance_sup),
            "class_bound_u": num(rep.class_bound_u),
            "class_bound_v": num(rep.class_bound_v),
            "iteration_factors": rep.iteration_factors.iter().map(|&f| num(f)).collect::<Vec<_>>(),
            "verdict": match rep.verdict {
                ContractionVerdict::Contractive => "contractive",
                ContractionVerdict::NotContractive => "not-contractive",
                ContractionVerdict::IdenticalTrajectories => "identical-trajectories",
            },
        }),
    );
    Ok(())
}

fn run_smoothing(
    config: &ExperimentConfig,
    ws: &Workspace,
    dir: &Path,
    tolerance_scale: f64,
    checks: &mut Vec<CheckResult>,
    artifacts: &mut Vec<String>,
    payload: &mut serde_json::Map<String, Value>,
) -> Result<()> {
    let mesh = TimeMesh::log_graded(config.mesh.t1, config.mesh.horizon, config.mesh.nodes)?;
    let phi = config.data_spec().materialize(&ws.grid)?;
    let alpha = config.smoothing.alpha;
    let beta = config.smoothing.beta.unwrap_or(f64::INFINITY);

    let rep = smoothing_report(&phi, alpha, beta, &mesh, config.smoothing.c0, &ws.kernel)?;
    let rows: Vec<Vec<f64>> = rep
        .series
        .iter()
        .map(|&(t, nb, ratio)| vec![t, nb, ratio])
        .collect();
    write_csv(&dir.join("smoothing.csv"), &["t", "norm_beta", "ratio"], &rows)?;
    artifacts.push(dir.join("smoothing.csv").display().to_string());

    checks.push(CheckResult::flag(
        "constant_finite",
        rep.constant.is_finite(),
        "sup of the weighted ratio",
    ));
    if alpha == 1.0 && beta.is_infinite() {
        checks.push(CheckResult::le(
            "kernel_bound",
            rep.constant,
            smoothing_kernel_bound(config.dim) * (1.0 + 1e-10 * tolerance_scale),
            "(4 pi)^{-N/2} bound on the (1, inf) constant",
        ));
    }
    checks.push(CheckResult::flag(
        "short_time_threshold",
        rep.t0.is_some(),
        "t0 for the requested C0 exists on the mesh",
    ));

    payload.insert(
        "smoothing".into(),
        json!({
            "alpha": num(alpha),
            "beta": if beta.is_infinite() { json!("inf") } else { num(beta) },
            "constant": num(rep.constant),
            "c0": num(rep.c0),
            "t0": rep.t0.map(num),
            "edge_max_count": rep.edge_max_count,
        }),
    );
    Ok(())
}

fn run_gprops(
    config: &ExperimentConfig,
    ws: &Workspace,
    tolerance_scale: f64,
    checks: &mut Vec<CheckResult>,
    payload: &mut serde_json::Map<String, Value>,
) -> Result<()> {
    let spec = SampleSpec {
        s_min: config.samples.s_min,
        s_max: config.samples.s_max,
        count: config.samples.count,
    };
    let rep = check_g_properties(&ws.params, config.dim, &spec);
    for p in rep.properties.iter() {
        if p.checked {
            checks.push(CheckResult::ge(
                &format!("property_{}", p.name),
                p.worst,
                -1e-10 * tolerance_scale,
                &format!("worst normalized slack at s = {}", p.worst_at),
            ));
        }
    }
    checks.push(CheckResult::flag(
        "c1_finite",
        rep.c1_empirical.is_finite(),
        "empirical C1 for the inverse bound",
    ));

    // convexity inequality on canonical data
    let mut worst_jensen = f64::INFINITY;
    for spec in [
        DataSpec::Gaussian { t0: config.data.t0, amplitude: config.data.amplitude.abs().max(1e-12) },
        DataSpec::truncated(DataSpec::Phi0 { eps: config.data.eps }, 1e4),
        DataSpec::truncated(DataSpec::Psi, 1e4),
    ] {
        let field = spec.materialize(&ws.grid)?;
        for t in [1e-4, 1e-3, 1e-2] {
            worst_jensen = worst_jensen.min(jensen_check(&field, t, &ws.params, &ws.kernel)?);
        }
    }
    checks.push(CheckResult::ge(
        "convexity_inequality",
        worst_jensen,
        -1e-8 * tolerance_scale,
        "min margin of S(t)phi <= g^{-1}(S(t) g(phi))",
    ));

    payload.insert(
        "g_properties".into(),
        json!({
            "q": num(rep.q),
            "rho": num(rep.rho),
            "convex": rep.convex,
            "power_monotone": rep.power_monotone,
            "sample_count": rep.sample_count,
            "c1_empirical": num(rep.c1_empirical),
            "margins": rep.properties.iter().map(|p| json!({
                "name": p.name,
                "checked": p.checked,
                "worst": num(p.worst),
                "worst_at": num(p.worst_at),
            })).collect::<Vec<_>>(),
            "convexity_inequality_margin": num(worst_jensen),
        }),
    );
    Ok(())
}

fn run_scaling(
    config: &ExperimentConfig,
    ws: &Workspace,
    dir: &Path,
    tolerance_scale: f64,
    checks: &mut Vec<CheckResult>,
    artifacts: &mut Vec<String>,
    payload: &mut serde_json::Map<String, Value>,
) -> Result<()> {
    let lambdas = [0.5, 2.0, 8.0];
    let base = DataSpec::Gaussian {
        t0: config.data.t0,
        amplitude: config.data.amplitude,
    };
    let m0 = lp_norm(&base.materialize(&ws.grid)?, 1.0)?;
    let mut worst_mass = 0.0_f64;
    let mut rows = Vec::new();
    for &lambda in &lambdas {
        let scaled = DataSpec::scaled(base.clone(), lambda).materialize(&ws.grid)?;
        let mass = lp_norm(&scaled, 1.0)?;
        worst_mass = worst_mass.max((mass - m0).abs() / m0);
        rows.push(vec![lambda, mass, (mass - m0).abs() / m0]);
    }
    write_csv(&dir.join("scaling.csv"), &["lambda", "mass", "mass_rel_error"], &rows)?;
    artifacts.push(dir.join("scaling.csv").display().to_string());
    checks.push(CheckResult::le(
        "l1_invariance",
        worst_mass,
        1e-8 * tolerance_scale,
        "||phi_lambda||_1 = ||phi||_1 at q_c = 1",
    ));

    // ball-mass covariance on the singular family
    let eps = if config.data.kind == "phi0" { config.data.eps } else { 0.5 * config.dim as f64 / 2.0 };
    let phi0 = DataSpec::Phi0 { eps };
    let phi = phi0.materialize(&ws.grid)?;
    let mut worst_cov = 0.0_f64;
    for &lambda in &lambdas {
        let scaled = DataSpec::scaled(phi0.clone(), lambda).materialize(&ws.grid)?;
        for tau in [0.01, 0.03] {
            let a = ball_mass(&scaled, tau)?;
            let b = ball_mass(&phi, lambda * tau)?;
            worst_cov = worst_cov.max((a - b).abs() / b.abs().max(1e-300));
        }
    }
    checks.push(CheckResult::le(
        "ball_mass_covariance",
        worst_cov,
        1e-6 * tolerance_scale,
        "ball_mass(phi_lambda, tau) = ball_mass(phi, lambda tau)",
    ));

    payload.insert(
        "scaling".into(),
        json!({
            "lambdas": lambdas,
            "mass_invariance_worst": num(worst_mass),
            "covariance_worst": num(worst_cov),
        }),
    );
    Ok(())
}
