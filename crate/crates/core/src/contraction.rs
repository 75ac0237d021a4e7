//! The L¹ contraction experiment behind the uniqueness class
//! `sup_t t^{N/2} (-log t)^q ||u(t)||_inf < inf` for `q > N/2`.
//!
//! Two fixed points are evolved from `phi` and `(1 + delta) phi`; one
//! Duhamel-difference sweep then measures
//! `sup_t ||D[u] - D[v]||_1 / sup_t ||u - v||_1`, the discrete analogue of
//! the kernel bound whose time integral is
//! `N (-log T)^{1 - 2q/N} / (2q - N)`. For `q <= N/2` that integral
//! diverges and the experiment refuses to run.

use alloc::vec::Vec;

use crate::duhamel::{fujita_power, HeatPropagator};
use crate::error::{Error, Result};
use crate::grid::RadialField;
use crate::gweight::GParams;
use crate::iterate::{
    build_supersolution, monotone_iterate, picard_iterate, verify_supersolution, IterationOptions,
};
use crate::math;
use crate::semigroup::lp_norm;
use crate::trajectory::{weighted_supnorm_track, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionVerdict {
    /// Measured one-sweep factor at most 1/2 (plus slack).
    Contractive,
    NotContractive,
    /// `delta = 0`: the trajectories coincide and no factor is defined.
    IdenticalTrajectories,
}

/// Outcome of the contraction experiment.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub dim: u32,
    pub q: f64,
    pub horizon: f64,
    /// `N (-log T)^{1-2q/N} / (2q - N)`, the closed-form time integral.
    pub theoretical_integral: f64,
    /// Measured `sup_s s (-log s)^{2q/N} (||u||_inf^{p-1} + ||v||_inf^{p-1})`.
    pub weight_constant: f64,
    /// `p * weight_constant * theoretical_integral`: the bound on the sweep factor.
    pub theoretical_factor: f64,
    /// `sup_t ||D[u] - D[v]||_1 / sup_t ||u - v||_1` from one sweep.
    pub measured_factor: f64,
    /// `sup_t ||u - v||_1`.
    pub distance_sup: f64,
    /// Weighted-class maxima of the two trajectories (finiteness is the
    /// uniqueness-class membership check).
    pub class_bound_u: f64,
    pub class_bound_v: f64,
    /// Distance ratios d_{n+1}/d_n recorded while iterating the perturbed datum.
    pub iteration_factors: Vec<f64>,
    pub verdict: ContractionVerdict,
}

/// Closed-form value of `∫_0^T s^{-1} (-log s)^{-2q/N} ds` scaled by N,
/// i.e. `N (-log T)^{1-2q/N} / (2q - N)`; requires q > N/2.
pub fn uniqueness_time_integral(dim: u32, q: f64, horizon: f64) -> Result<f64> {
    let nf = dim as f64;
    if q <= 0.5 * nf {
        return Err(Error::UniquenessExponent { q, dim });
    }
    let sigma = -math::ln(horizon);
    Ok(nf * math::powf(sigma, 1.0 - 2.0 * q / nf) / (2.0 * q - nf))
}

fn fixed_point(
    prop: &HeatPropagator,
    phi: &RadialField,
    params: &GParams,
    opts: &IterationOptions,
) -> Result<(Trajectory, Vec<f64>)> {
    let phi_abs = phi.map(math::abs);
    let ubar = build_supersolution(prop, &phi_abs, params)?;
    let sup = verify_supersolution(prop, &ubar, &phi_abs, params, opts)?;
    if !sup.confirmed_all {
        return Err(Error::NonConvergence(alloc::format!(
            "supersolution not confirmed on the whole mesh (largest good horizon {:?})",
            sup.confirmed_horizon
        )));
    }
    let (mono, w) = monotone_iterate(prop, &phi_abs, &ubar, params, opts)?;
    if !mono.converged {
        return Err(Error::NonConvergence(
            "monotone run for |phi| did not converge".into(),
        ));
    }
    let (pic, u) = picard_iterate(prop, phi, &w, params, opts)?;
    if !pic.converged {
        return Err(Error::NonConvergence("picard run did not converge".into()));
    }
    let ratios = pic
        .distances
        .windows(2)
        .map(|w| w[1] / w[0].max(1e-300))
        .collect();
    Ok((u, ratios))
}

/// Evolve fixed points from `phi` and `(1+delta) phi` and measure the
/// one-sweep Duhamel contraction factor against the closed-form bound.
pub fn contraction_experiment(
    prop: &HeatPropagator,
    phi: &RadialField,
    delta: f64,
    params: &GParams,
    opts: &IterationOptions,
) -> Result<ContractionReport> {
    let dim = prop.grid().dim();
    let q = params.q();
    let horizon = prop.mesh().horizon();
    let theoretical_integral = uniqueness_time_integral(dim, q, horizon)?;
    let nf = dim as f64;
    let p = 1.0 + 2.0 / nf;

    let (u, _) = fixed_point(prop, phi, params, opts)?;
    let track_u = weighted_supnorm_track(&u, q);

    if delta == 0.0 {
        return Ok(ContractionReport {
            dim,
            q,
            horizon,
            theoretical_integral,
            weight_constant: 0.0,
            theoretical_factor: 0.0,
            measured_factor: 0.0,
            distance_sup: 0.0,
            class_bound_u: track_u.max,
            class_bound_v: track_u.max,
            iteration_factors: Vec::new(),
            verdict: ContractionVerdict::IdenticalTrajectories,
        });
    }

    let phi_v = phi.map(|x| (1.0 + delta) * x);
    let (v, iteration_factors) = fixed_point(prop, &phi_v, params, opts)?;
    let track_v = weighted_supnorm_track(&v, q);

    // sup_t ||u - v||_1 and the one-sweep Duhamel difference
    let mut distance_sup = 0.0_f64;
    for k in 0..u.len() {
        let diff = u.field(k).zip_with(v.field(k), |a, b| a - b)?;
        distance_sup = distance_sup.max(lp_norm(&diff, 1.0)?);
    }
    let du = prop.duhamel_all(&u.map(move |x| fujita_power(dim, x), "f(u)"))?;
    let dv = prop.duhamel_all(&v.map(move |x| fujita_power(dim, x), "f(v)"))?;
    let mut sweep_sup = 0.0_f64;
    for k in 0..du.len() {
        let diff = du.field(k).zip_with(dv.field(k), |a, b| a - b)?;
        sweep_sup = sweep_sup.max(lp_norm(&diff, 1.0)?);
    }

    if distance_sup <= 1e-300 {
        return Ok(ContractionReport {
            dim,
            q,
            horizon,
            theoretical_integral,
            weight_constant: 0.0,
            theoretical_factor: 0.0,
            measured_factor: 0.0,
            distance_sup,
            class_bound_u: track_u.max,
            class_bound_v: track_v.max,
            iteration_factors,
            verdict: ContractionVerdict::IdenticalTrajectories,
        });
    }
    let measured_factor = sweep_sup / distance_sup;

    // measured sup of s (-log s)^{2q/N} (||u||^{p-1} + ||v||^{p-1})
    let mut weight_constant = 0.0_f64;
    for k in 0..u.len() {
        let s = prop.mesh().nodes()[k];
        let sigma = prop.mesh().sigmas()[k];
        let a = math::powf(u.field(k).sup_norm().0, p - 1.0);
        let b = math::powf(v.field(k).sup_norm().0, p - 1.0);
        weight_constant =
            weight_constant.max(s * math::powf(sigma, 2.0 * q / nf) * (a + b));
    }
    let theoretical_factor = p * weight_constant * theoretical_integral;

    let verdict = if measured_factor <= 0.5 + opts.slack {
        ContractionVerdict::Contractive
    } else {
        ContractionVerdict::NotContractive
    };
    Ok(ContractionReport {
        dim,
        q,
        horizon,
        theoretical_integral,
        weight_constant,
        theoretical_factor,
        measured_factor,
        distance_sup,
        class_bound_u: track_u.max,
        class_bound_v: track_v.max,
        iteration_factors,
        verdict,
    })
}
