//! Experiment configuration: JSON document in, validated typed config out.
//!
//! Validation is exhaustive: every violation in the document is reported,
//! not just the first. Scenario-specific defaults fill the gaps (canonical
//! rho, the eps midpoint rule, lab-scale grids and meshes).

use serde::{Deserialize, Serialize};

use fujita_core::data::DataSpec;
use fujita_core::gweight::GParams;

pub const E: f64 = std::f64::consts::E;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Existence,
    Nonexistence,
    Uniqueness,
    Smoothing,
    Gprops,
    Scaling,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Existence,
        Scenario::Nonexistence,
        Scenario::Uniqueness,
        Scenario::Smoothing,
        Scenario::Gprops,
        Scenario::Scaling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Existence => "existence",
            Scenario::Nonexistence => "nonexistence",
            Scenario::Uniqueness => "uniqueness",
            Scenario::Smoothing => "smoothing",
            Scenario::Gprops => "gprops",
            Scenario::Scaling => "scaling",
        }
    }
}

/// Raw document shape: everything beyond the scenario is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Option<String>,
    pub dim: Option<u32>,
    pub grid: Option<RawGrid>,
    pub mesh: Option<RawMesh>,
    pub data: Option<RawData>,
    pub q: Option<f64>,
    pub rho: Option<f64>,
    /// Relative perturbation of the datum in the uniqueness experiment.
    pub perturbation: Option<f64>,
    pub smoothing: Option<RawSmoothing>,
    pub tolerances: Option<RawTolerances>,
    /// Sampling plan for the weight-function property suite.
    pub samples: Option<RawSamples>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSamples {
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub nodes: Option<usize>,
    pub split: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMesh {
    pub t1: Option<f64>,
    pub horizon: Option<f64>,
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawData {
    /// "phi0" | "psi" | "gaussian"
    pub kind: Option<String>,
    pub eps: Option<f64>,
    pub t0: Option<f64>,
    pub amplitude: Option<f64>,
    /// Pointwise cap applied on top of the base kind.
    pub cap: Option<f64>,
    /// Parabolic rescaling applied on top of the base kind.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSmoothing {
    pub alpha: Option<f64>,
    /// Absent means beta = infinity.
    pub beta: Option<f64>,
    pub c0: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    pub iteration_tol: Option<f64>,
    pub slack: Option<f64>,
    pub slope_min: Option<f64>,
}

/// Fully resolved configuration; serialized form is the determinism/hash key.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub dim: u32,
    pub grid: GridSpec,
    pub mesh: MeshSpec,
    pub data: ResolvedData,
    pub q: f64,
    pub rho: f64,
    pub perturbation: f64,
    pub smoothing: SmoothingSpec,
    pub tolerances: ToleranceSpec,
    pub samples: SamplesSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplesSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
    pub split: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub t1: f64,
    pub horizon: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedData {
    pub kind: String,
    pub eps: f64,
    pub t0: f64,
    pub amplitude: f64,
    pub cap: Option<f64>,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothingSpec {
    pub alpha: f64,
    /// None encodes beta = infinity.
    pub beta: Option<f64>,
    pub c0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceSpec {
    pub iteration_tol: f64,
    pub slack: f64,
    pub slope_min: f64,
}

impl ExperimentConfig {
    pub fn gparams(&self) -> GParams {
        GParams::new(self.q, self.rho).expect("validated")
    }

    pub fn data_spec(&self) -> DataSpec {
        let base = match self.data.kind.as_str() {
            "phi0" => DataSpec::Phi0 { eps: self.data.eps },
            "psi" => DataSpec::Psi,
            _ => DataSpec::Gaussian {
                t0: self.data.t0,
                amplitude: self.data.amplitude,
            },
        };
        let capped = match self.data.cap {
            Some(cap) => DataSpec::truncated(base, cap),
            None => base,
        };
        match self.data.lambda {
            Some(lambda) => DataSpec::scaled(capped, lambda),
            None => capped,
        }
    }
}

/// Outcome of validation: the typed config plus non-fatal warnings.
pub struct Validated {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

/// Parse and validate a JSON document. Returns every violation found.
pub fn validate_config(document: &str) -> Result<Validated, Vec<String>> {
    let raw: RawConfig = match serde_json::from_str(document) {
        Ok(raw) => raw,
        Err(err) => return Err(vec![format!("document does not parse: {err}")]),
    };
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let scenario = match raw.scenario.as_deref() {
        None => {
            violations.push("missing required field: scenario".into());
            None
        }
        Some(name) => match Scenario::ALL.iter().find(|s| s.name() == name) {
            Some(s) => Some(*s),
            None => {
                violations.push(format!(
                    "unknown scenario {name:?}; expected one of existence, nonexistence, \
                     uniqueness, smoothing, gprops, scaling"
                ));
                None
            }
        },
    };

    let dim = raw.dim.unwrap_or(2);
    if dim < 1 {
        violations.push(format!("dim must be >= 1, got {dim}"));
    }
    let half_n = dim as f64 / 2.0;

    // weight exponent: existence-style scenarios default to the borderline
    // q = N/2; uniqueness needs q > N/2; nonexistence needs q < N/2
    let q = raw.q.unwrap_or(match scenario {
        Some(Scenario::Uniqueness) => half_n + 0.5,
        Some(Scenario::Nonexistence) => 0.5 * half_n,
        _ => half_n,
    });
    if !(q >= 0.0) || !q.is_finite() {
        violations.push(format!("q must be a finite number >= 0, got {q}"));
    }
    let rho = raw.rho.unwrap_or_else(|| E.max((q * half_n).exp()));
    if !(rho > 1.0) {
        violations.push(format!("rho must exceed 1, got {rho}"));
    }

    match scenario {
        Some(Scenario::Uniqueness) if q <= half_n => violations.push(format!(
            "uniqueness requires q > N/2 (got q = {q}, N/2 = {half_n}); the contraction \
             estimate does not cover q <= N/2"
        )),
        Some(Scenario::Nonexistence) if q >= half_n => violations.push(format!(
            "nonexistence requires q < N/2 (got q = {q}, N/2 = {half_n}); at q >= N/2 the \
             datum family is solvable"
        )),
        _ => {}
    }

    // grid
    let g = raw.grid.unwrap_or_default();
    let r_max = g.r_max.unwrap_or(20.0);
    let r_min = g.r_min.unwrap_or(r_max * (-40.0_f64).exp());
    let nodes = g.nodes.unwrap_or(768);
    let split = g.split.unwrap_or(0.8);
    if let Err(err) = fujita_core::grid::RadialGrid::new(dim.max(1), r_min, r_max, nodes, split) {
        violations.push(format!("grid: {err}"));
    }

    // mesh
    let m = raw.mesh.unwrap_or_default();
    let horizon = m.horizon.unwrap_or((-8.0_f64).exp());
    let t1 = m.t1.unwrap_or(horizon * (-12.0_f64).exp());
    let mesh_nodes = m.nodes.unwrap_or(48);
    if let Err(err) = fujita_core::mesh::TimeMesh::log_graded(t1, horizon, mesh_nodes) {
        violations.push(format!("mesh: {err}"));
    }

    // datum
    let d = raw.data.unwrap_or_default();
    let default_kind = match scenario {
        Some(Scenario::Nonexistence) => "phi0",
        Some(Scenario::Existence) => "phi0",
        _ => "gaussian",
    };
    let kind = d.kind.unwrap_or_else(|| default_kind.to_string());
    if !["phi0", "psi", "gaussian"].contains(&kind.as_str()) {
        violations.push(format!(
            "data.kind must be phi0, psi or gaussian, got {kind:?}"
        ));
    }
    // the eps midpoint rule: half the admissible X_q gap when it exists
    let eps = d.eps.unwrap_or(if q < half_n {
        0.5 * (half_n - q)
    } else {
        0.5 * half_n
    });
    let t0 = d.t0.unwrap_or(1e-3);
    if !(t0 > 0.0) {
        violations.push(format!("data.t0 must be positive, got {t0}"));
    }
    let amplitude = d.amplitude.unwrap_or(1e-3);
    if !amplitude.is_finite() {
        violations.push("data.amplitude must be finite".into());
    }
    if let Some(cap) = d.cap {
        if !(cap > 0.0) {
            violations.push(format!("data.cap must be positive, got {cap}"));
        }
    }
    if let Some(lambda) = d.lambda {
        if !(lambda > 0.0) {
            violations.push(format!("data.lambda must be positive, got {lambda}"));
        }
    }
    // the iteration engines need bounded data; cap singular kinds by default
    let cap = match (scenario, kind.as_str()) {
        (Some(Scenario::Existence | Scenario::Uniqueness), "phi0" | "psi") => {
            Some(d.cap.unwrap_or(1e4))
        }
        _ => d.cap,
    };
    if kind == "phi0" {
        if !(eps > 0.0 && eps < half_n) {
            violations.push(format!(
                "phi0 requires 0 < eps < N/2 = {half_n} for integrability, got eps = {eps}"
            ));
        } else if eps >= half_n - q && cap.is_none() {
            // a capped datum is bounded and lies in every X_q
            let msg = format!(
                "phi0 with eps = {eps} lies outside X_q for q = {q} (needs eps < N/2 - q = {})",
                half_n - q
            );
            if matches!(scenario, Some(Scenario::Nonexistence)) {
                violations.push(msg + "; the nonexistence certificate requires X_q membership");
            } else {
                warnings.push(msg);
            }
        }
    }

    let s = raw.smoothing.unwrap_or_default();
    let alpha = s.alpha.unwrap_or(1.0);
    let beta = s.beta;
    if alpha < 1.0 {
        violations.push(format!("smoothing.alpha must be >= 1, got {alpha}"));
    }
    if let Some(b) = beta {
        if b < alpha {
            violations.push(format!(
                "smoothing requires alpha <= beta, got ({alpha}, {b})"
            ));
        }
    }
    let c0 = s.c0.unwrap_or(0.01);
    if !(c0 > 0.0) {
        violations.push(format!("smoothing.c0 must be positive, got {c0}"));
    }

    let t = raw.tolerances.unwrap_or_default();
    let tolerances = ToleranceSpec {
        iteration_tol: t.iteration_tol.unwrap_or(1e-8),
        slack: t.slack.unwrap_or(1e-6),
        slope_min: t.slope_min.unwrap_or(0.02),
    };
    if !(tolerances.iteration_tol > 0.0) || !(tolerances.slack > 0.0) {
        violations.push("tolerances must be positive".into());
    }

    let sm = raw.samples.unwrap_or_default();
    let samples = SamplesSpec {
        s_min: sm.s_min.unwrap_or(1e-8),
        s_max: sm.s_max.unwrap_or(1e8),
        count: sm.count.unwrap_or(10_000),
    };
    if !(samples.s_min > 0.0 && samples.s_max > samples.s_min) || samples.count < 16 {
        violations.push(format!(
            "samples require 0 < s_min < s_max and count >= 16, got ({}, {}, {})",
            samples.s_min, samples.s_max, samples.count
        ));
    }

    let perturbation = raw.perturbation.unwrap_or(0.01);
    if !perturbation.is_finite() || perturbation < 0.0 {
        violations.push(format!(
            "perturbation must be a finite number >= 0, got {perturbation}"
        ));
    }

    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(Validated {
        config: ExperimentConfig {
            scenario: scenario.expect("validated"),
            dim,
            grid: GridSpec {
                r_min,
                r_max,
                nodes,
                split,
            },
            mesh: MeshSpec {
                t1,
                horizon,
                nodes: mesh_nodes,
            },
            data: ResolvedData {
                kind,
                eps,
                t0,
                amplitude,
                cap,
                lambda: d.lambda,
            },
            q,
            rho,
            perturbation,
            smoothing: SmoothingSpec { alpha, beta, c0 },
            tolerances,
            samples,
        },
        warnings,
    })
}
