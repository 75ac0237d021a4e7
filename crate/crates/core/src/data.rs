//! The explicit initial-data family, parabolic rescaling, and the
//! mass-concentration necessary-condition test.
//!
//! `phi0(r) = r^{-N}(-log r)^{-(N/2+1-eps)}` on `r < 1/e` concentrates just
//! enough mass near the origin to violate the necessary bound
//! `∫_{B(tau)} phi <= gamma_0 |log tau|^{-N/2}` while staying in `X_q` for
//! `q < N/2 - eps`; `psi` is the borderline profile (`eps = 0`). The report
//! fits the growth exponent of the mass ratio and returns a
//! bounded/diverging verdict.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{InnerTail, RadialField, RadialGrid, DATA_SUPPORT_RADIUS};
use crate::math;

/// Default divergence threshold for the fitted ratio slope.
pub const DEFAULT_SLOPE_MIN: f64 = 0.02;

/// Closed-form initial datum, possibly capped or parabolically rescaled.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    /// `r^{-N} (-log r)^{-(N/2+1-eps)}` for r < 1/e, zero outside.
    Phi0 { eps: f64 },
    /// `r^{-N} (-log r)^{-(N/2+1)}` for r < 1/e, zero outside.
    Psi,
    /// `amplitude * G_{t0}`, the unit-mass heat kernel at time t0.
    Gaussian { t0: f64, amplitude: f64 },
    /// Pointwise cap: `min(inner, cap)`.
    Truncated { inner: Box<DataSpec>, cap: f64 },
    /// Parabolic rescaling `lambda^{2/(p-1)} f(lambda r) = lambda^N f(lambda r)`
    /// at `p = 1 + 2/N` (mass-invariant, the scale-critical exponent).
    Scaled { inner: Box<DataSpec>, lambda: f64 },
}

impl DataSpec {
    pub fn truncated(inner: DataSpec, cap: f64) -> DataSpec {
        DataSpec::Truncated {
            inner: Box::new(inner),
            cap,
        }
    }

    pub fn scaled(inner: DataSpec, lambda: f64) -> DataSpec {
        DataSpec::Scaled {
            inner: Box::new(inner),
            lambda,
        }
    }

    /// Parameter validity for dimension `dim`. For `Phi0` integrability
    /// requires `0 < eps < N/2`; membership in a given `X_q` additionally
    /// needs `eps < N/2 - q` (checked by [`DataSpec::xq_admissible`]).
    pub fn validate(&self, dim: u32) -> Result<()> {
        match self {
            DataSpec::Phi0 { eps } => {
                let half_n = dim as f64 / 2.0;
                if !(*eps > 0.0 && *eps < half_n) {
                    return Err(Error::InvalidParameter(format!(
                        "phi0 requires 0 < eps < N/2 = {half_n}, got eps = {eps}"
                    )));
                }
                Ok(())
            }
            DataSpec::Psi => Ok(()),
            DataSpec::Gaussian { t0, amplitude } => {
                if !(*t0 > 0.0) || !t0.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian requires t0 > 0, got {t0}"
                    )));
                }
                if !amplitude.is_finite() {
                    return Err(Error::NonFiniteValue("gaussian amplitude".into()));
                }
                Ok(())
            }
            DataSpec::Truncated { inner, cap } => {
                if !(*cap > 0.0) || !cap.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "cap must be positive, got {cap}"
                    )));
                }
                inner.validate(dim)
            }
            DataSpec::Scaled { inner, lambda } => {
                if !(*lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "scaling factor must be positive, got {lambda}"
                    )));
                }
                inner.validate(dim)
            }
        }
    }

    /// Whether the datum certifies membership in `X_q` by the closed-form
    /// tail criterion (only `Phi0` is restricted: `eps < N/2 - q`).
    pub fn xq_admissible(&self, dim: u32, q: f64) -> bool {
        match self {
            DataSpec::Phi0 { eps } => *eps < dim as f64 / 2.0 - q,
            DataSpec::Psi => q < 0.0, // psi is exactly the X_0 boundary case
            DataSpec::Gaussian { .. } => true,
            DataSpec::Truncated { .. } => true,
            DataSpec::Scaled { inner, .. } => inner.xq_admissible(dim, q),
        }
    }

    /// Pointwise evaluation at radius `r >= 0`.
    pub fn evaluate(&self, dim: u32, r: f64) -> f64 {
        let nf = dim as f64;
        match self {
            DataSpec::Phi0 { eps } => {
                if r >= DATA_SUPPORT_RADIUS || r <= 0.0 {
                    0.0
                } else {
                    let sigma = -math::ln(r);
                    math::powf(r, -nf) * math::powf(sigma, -(0.5 * nf + 1.0 - eps))
                }
            }
            DataSpec::Psi => {
                if r >= DATA_SUPPORT_RADIUS || r <= 0.0 {
                    0.0
                } else {
                    let sigma = -math::ln(r);
                    math::powf(r, -nf) * math::powf(sigma, -(0.5 * nf + 1.0))
                }
            }
            DataSpec::Gaussian { t0, amplitude } => {
                amplitude * math::powf(4.0 * crate::special::PI * t0, -0.5 * nf)
                    * math::exp(-r * r / (4.0 * t0))
            }
            DataSpec::Truncated { inner, cap } => inner.evaluate(dim, r).min(*cap),
            DataSpec::Scaled { inner, lambda } => {
                math::powf(*lambda, nf) * inner.evaluate(dim, lambda * r)
            }
        }
    }

    /// Analytic model of the datum below the grid cutoff.
    fn inner_tail(&self, dim: u32) -> InnerTail {
        let nf = dim as f64;
        match self {
            DataSpec::Phi0 { eps } => InnerTail::PowerLog {
                amp: 1.0,
                beta: 0.5 * nf + 1.0 - eps,
                log_offset: 0.0,
            },
            DataSpec::Psi => InnerTail::PowerLog {
                amp: 1.0,
                beta: 0.5 * nf + 1.0,
                log_offset: 0.0,
            },
            DataSpec::Gaussian { .. } => InnerTail::Negligible,
            // below the cutoff a capped singular profile is the constant cap;
            // its core mass is O(cap * r_min^N), negligible by construction
            DataSpec::Truncated { .. } => InnerTail::Negligible,
            DataSpec::Scaled { inner, lambda } => match inner.inner_tail(dim) {
                InnerTail::Negligible => InnerTail::Negligible,
                InnerTail::PowerLog {
                    amp,
                    beta,
                    log_offset,
                } => InnerTail::PowerLog {
                    amp,
                    beta,
                    log_offset: log_offset - math::ln(*lambda),
                },
            },
        }
    }

    /// Sample the datum on `grid`, attaching the analytic core model.
    pub fn materialize(&self, grid: &Arc<RadialGrid>) -> Result<RadialField> {
        self.validate(grid.dim())?;
        if let InnerTail::PowerLog { log_offset, .. } = self.inner_tail(grid.dim()) {
            // the singular model must still be inside its support at the cutoff
            let sigma_min = -math::ln(grid.r_min()) + log_offset;
            if sigma_min <= 1.0 {
                return Err(Error::InvalidParameter(
                    "grid cutoff does not resolve the support of the rescaled datum".into(),
                ));
            }
        }
        let values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| self.evaluate(grid.dim(), r))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue("materialized datum".into()));
        }
        Ok(RadialField::from_parts(
            grid.clone(),
            values,
            self.inner_tail(grid.dim()),
        ))
    }
}

/// `∫_{B(tau)} phi dx` for `0 < tau <= R`.
pub fn ball_mass(field: &RadialField, tau: f64) -> Result<f64> {
    if tau > field.grid().r_max() * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "ball radius {tau} exceeds the truncation radius {}",
            field.grid().r_max()
        )));
    }
    field.mass_within(tau)
}

/// One point of the mass-ratio series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMassPoint {
    pub tau: f64,
    pub mass: f64,
    /// `mass / (-log tau)^{-N/2}`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassVerdict {
    /// The ratio grows like a positive power of `-log tau`: the necessary
    /// condition fails and no nonnegative solution can exist.
    Diverging,
    /// The ratio stays bounded; `gamma0_empirical` is its least upper bound
    /// over the series.
    Bounded,
}

/// Mass-ratio series, fitted growth exponent and verdict.
#[derive(Debug, Clone)]
pub struct BarasPierreReport {
    pub series: Vec<BallMassPoint>,
    /// Least-squares slope of `log ratio` against `log(-log tau)` over the
    /// smallest-tau half of the series.
    pub slope: f64,
    /// Whether the ratio was nondecreasing across the fitted half.
    pub monotone_tail: bool,
    pub verdict: MassVerdict,
    /// Largest observed ratio (the empirical gamma_0 when bounded).
    pub gamma0_empirical: f64,
    /// Sigma = -log tau range used for the fit.
    pub fit_window: (f64, f64),
}

/// Default radii: `-log tau = 3 * 1.5^k` capped and closed at 30.
pub fn default_tau_series() -> Vec<f64> {
    tau_series(3.0, 30.0, 1.5)
}

/// Geometric ladder in `sigma = -log tau` from `sigma_min` to `sigma_max`.
pub fn tau_series(sigma_min: f64, sigma_max: f64, growth: f64) -> Vec<f64> {
    let mut sigmas = Vec::new();
    let mut s = sigma_min;
    while s < sigma_max * (1.0 - 1e-12) {
        sigmas.push(s);
        s *= growth;
    }
    sigmas.push(sigma_max);
    sigmas.iter().map(|&s| math::exp(-s)).collect()
}

/// Evaluate the mass-ratio test with the default slope threshold.
pub fn baras_pierre_report(field: &RadialField, taus: &[f64]) -> Result<BarasPierreReport> {
    baras_pierre_report_with(field, taus, DEFAULT_SLOPE_MIN)
}

/// Evaluate the mass-ratio test: verdict is `Diverging` iff the fitted slope
/// reaches `slope_min` and the ratio was nondecreasing over the fitted half.
pub fn baras_pierre_report_with(
    field: &RadialField,
    taus: &[f64],
    slope_min: f64,
) -> Result<BarasPierreReport> {
    if !field.is_nonnegative() {
        return Err(Error::SignedField("baras_pierre_report"));
    }
    if taus.len() < 4 {
        return Err(Error::InvalidParameter(
            "mass-ratio series needs at least 4 radii".into(),
        ));
    }
    if taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "tau series must be strictly decreasing".into(),
        ));
    }
    let half_n = field.grid().dim() as f64 / 2.0;
    let mut series = Vec::with_capacity(taus.len());
    let mut prev_mass = f64::INFINITY;
    for &tau in taus {
        let mass = field.mass_within(tau)?;
        // tau decreases along the series, so masses must shrink; a violation
        // beyond roundoff means the quadrature failed
        if mass < -1e-12 || mass > prev_mass * (1.0 + 1e-10) + 1e-300 {
            return Err(Error::NonFiniteValue(alloc::format!(
                "mass series not monotone at tau = {tau}"
            )));
        }
        prev_mass = mass;
        let sigma = -math::ln(tau);
        series.push(BallMassPoint {
            tau,
            mass,
            ratio: mass * math::powf(sigma, half_n),
        });
    }

    // fit on the smallest-tau half (largest sigma), where the asymptotic
    // regime lives
    let start = taus.len() / 2;
    let fitted = &series[start..];
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for p in fitted {
        let x = math::ln(-math::ln(p.tau));
        let y = math::ln(p.ratio.max(1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let m = fitted.len() as f64;
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let monotone_tail = fitted
        .windows(2)
        .all(|w| w[1].ratio >= w[0].ratio * (1.0 - 1e-12));
    let gamma0_empirical = series.iter().fold(0.0_f64, |a, p| a.max(p.ratio));
    let verdict = if slope >= slope_min && monotone_tail {
        MassVerdict::Diverging
    } else {
        MassVerdict::Bounded
    };
    Ok(BarasPierreReport {
        slope,
        monotone_tail,
        verdict,
        gamma0_empirical,
        fit_window: (-math::ln(fitted[0].tau), -math::ln(fitted[fitted.len() - 1].tau)),
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::integrate_radial;
    use crate::special::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn lab_grid(dim: u32) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::new(dim, 20.0 * (-40.0_f64).exp(), 20.0, 768, 0.8).unwrap())
    }

    #[test]
    fn phi0_boundary_values() {
        let spec = DataSpec::Phi0 { eps: 0.5 };
        // inside limit r -> (1/e)^-: r^{-N} * 1 = e^N; outside: 0
        let just_in = DATA_SUPPORT_RADIUS * (1.0 - 1e-9);
        assert!(rel(spec.evaluate(2, just_in), (2.0_f64).exp()) < 1e-6);
        assert_eq!(spec.evaluate(2, DATA_SUPPORT_RADIUS), 0.0);
        assert_eq!(spec.evaluate(2, 1.0), 0.0);
    }

    #[test]
    fn psi_is_phi0_without_eps() {
        // nodal ratio phi0 / psi = (-log r)^eps
        let eps = 0.25;
        let phi0 = DataSpec::Phi0 { eps };
        let psi = DataSpec::Psi;
        for &r in &[0.01_f64, 0.1, 0.3] {
            let expect = (-r.ln()).powf(eps);
            assert!(rel(phi0.evaluate(2, r) / psi.evaluate(2, r), expect) < 1e-12);
        }
    }

    #[test]
    fn phi0_l1_norm_closed_form() {
        // N=2, eps=0.5: ||phi0||_1 = omega (sigma^{-1/2}/(1/2)) at sigma=1 = 4 pi
        let g = lab_grid(2);
        let f = DataSpec::Phi0 { eps: 0.5 }.materialize(&g).unwrap();
        assert!(rel(integrate_radial(&f).unwrap(), 4.0 * PI) < 1e-8);
    }

    #[test]
    fn ball_mass_closed_forms() {
        let g = lab_grid(2);
        // phi0, N=2, eps=0.5, tau=1/e: full mass 4 pi
        let f = DataSpec::Phi0 { eps: 0.5 }.materialize(&g).unwrap();
        assert!(rel(ball_mass(&f, DATA_SUPPORT_RADIUS).unwrap(), 4.0 * PI) < 1e-8);
        // psi, N=2, tau=e^-4: 2 pi / 4
        let f = DataSpec::Psi.materialize(&g).unwrap();
        let tau = (-4.0_f64).exp();
        assert!(rel(ball_mass(&f, tau).unwrap(), 2.0 * PI / 4.0) < 1e-8);
        // closed form across the sweep: omega (-log tau)^{-(N/2-eps)} / (N/2-eps)
        let f = DataSpec::Phi0 { eps: 0.5 }.materialize(&g).unwrap();
        for &sigma in &[2.0, 5.0, 9.0, 13.8] {
            let tau = (-sigma_f(sigma)).exp();
            let exact = 2.0 * PI * sigma.powf(-0.5) / 0.5;
            assert!(
                rel(ball_mass(&f, tau).unwrap(), exact) < 1e-6,
                "sigma={sigma}"
            );
        }
    }

    fn sigma_f(s: f64) -> f64 {
        s
    }

    #[test]
    fn gaussian_small_ball_mass_vanishes() {
        let g = lab_grid(2);
        let f = DataSpec::Gaussian {
            t0: 1e-2,
            amplitude: 1.0,
        }
        .materialize(&g)
        .unwrap();
        let sup = f.sup_norm().0;
        let tau = 1e-4_f64;
        let approx = sup * g.surface_area() * tau.powi(2) / 2.0;
        let mass = ball_mass(&f, tau).unwrap();
        assert!(rel(mass, approx) < 1e-4);
    }

    #[test]
    fn scaled_gaussian_preserves_l1() {
        // lambda^N f(lambda r) has the same mass for every lambda (q_c = 1)
        let g = lab_grid(1);
        let base = DataSpec::Gaussian {
            t0: 4e-3,
            amplitude: 1.0,
        };
        let m0 = integrate_radial(&base.materialize(&g).unwrap()).unwrap();
        for &lambda in &[0.5, 2.0, 8.0] {
            let scaled = DataSpec::scaled(base.clone(), lambda).materialize(&g).unwrap();
            let m = integrate_radial(&scaled).unwrap();
            assert!(rel(m, m0) < 1e-8, "lambda={lambda}: {}", rel(m, m0));
        }
    }

    #[test]
    fn ball_mass_scaling_covariance() {
        // ball_mass(phi_lambda, tau) = ball_mass(phi, lambda tau)
        let g = lab_grid(2);
        let base = DataSpec::Phi0 { eps: 0.5 };
        let phi = base.materialize(&g).unwrap();
        for &lambda in &[0.5_f64, 2.0, 8.0] {
            let scaled = DataSpec::scaled(base.clone(), lambda).materialize(&g).unwrap();
            for &tau in &[0.01, 0.03] {
                if lambda * tau < DATA_SUPPORT_RADIUS {
                    let a = ball_mass(&scaled, tau).unwrap();
                    let b = ball_mass(&phi, lambda * tau).unwrap();
                    assert!(rel(a, b) < 1e-6, "lambda={lambda} tau={tau}");
                }
            }
        }
    }

    #[test]
    fn mass_monotone_in_radius() {
        let g = lab_grid(2);
        let f = DataSpec::Phi0 { eps: 0.25 }.materialize(&g).unwrap();
        let mut prev = 0.0;
        for k in 1..40 {
            let tau = (k as f64 / 40.0) * 0.36;
            let m = ball_mass(&f, tau).unwrap();
            assert!(m >= prev - 1e-12);
            prev = m;
        }
    }

    #[test]
    fn baras_pierre_verdicts() {
        let g = lab_grid(2);
        let taus = default_tau_series();
        // phi0 with eps = 0.25: slope ~ eps, diverging
        let phi0 = DataSpec::Phi0 { eps: 0.25 }.materialize(&g).unwrap();
        let rep = baras_pierre_report(&phi0, &taus).unwrap();
        assert!(matches!(rep.verdict, MassVerdict::Diverging));
        assert!((rep.slope - 0.25).abs() < 0.05, "slope {}", rep.slope);
        // psi: bounded with gamma0 ~ omega * 2/N = 2 pi
        let psi = DataSpec::Psi.materialize(&g).unwrap();
        let rep = baras_pierre_report(&psi, &taus).unwrap();
        assert!(matches!(rep.verdict, MassVerdict::Bounded));
        assert!(rep.slope.abs() < 0.02);
        assert!(rel(rep.gamma0_empirical, 2.0 * PI) < 0.01);
        // gaussian: ratio collapses to zero
        let gauss = DataSpec::Gaussian {
            t0: 1e-2,
            amplitude: 1.0,
        }
        .materialize(&g)
        .unwrap();
        let rep = baras_pierre_report(&gauss, &taus).unwrap();
        assert!(matches!(rep.verdict, MassVerdict::Bounded));
        let last = rep.series.last().unwrap().ratio;
        assert!(last < 1e-3 * rep.gamma0_empirical.max(1e-300));
    }

    #[test]
    fn verdict_stable_under_series_refinement() {
        let g = lab_grid(2);
        let coarse = default_tau_series();
        let fine = tau_series(3.0, 30.0, 1.5_f64.sqrt());
        for (spec, expect_diverging) in [
            (DataSpec::Phi0 { eps: 0.25 }, true),
            (DataSpec::Psi, false),
            (
                DataSpec::Gaussian {
                    t0: 1e-2,
                    amplitude: 1.0,
                },
                false,
            ),
        ] {
            let f = spec.materialize(&g).unwrap();
            for taus in [&coarse, &fine] {
                let rep = baras_pierre_report(&f, taus).unwrap();
                assert_eq!(
                    matches!(rep.verdict, MassVerdict::Diverging),
                    expect_diverging,
                    "{spec:?}"
                );
            }
        }
    }

    #[test]
    fn validation_errors() {
        assert!(DataSpec::Phi0 { eps: 1.0 }.validate(2).is_err()); // eps = N/2
        assert!(DataSpec::Phi0 { eps: 0.0 }.validate(2).is_err());
        assert!(DataSpec::Phi0 { eps: 0.5 }.validate(2).is_ok());
        assert!(!DataSpec::Phi0 { eps: 0.5 }.xq_admissible(2, 0.75));
        assert!(DataSpec::Phi0 { eps: 0.5 }.xq_admissible(2, 0.25));
        assert!(DataSpec::truncated(DataSpec::Psi, -1.0).validate(2).is_err());
        assert!(DataSpec::scaled(DataSpec::Psi, 0.0).validate(2).is_err());
    }

    #[test]
    fn signed_field_is_rejected() {
        let g = lab_grid(2);
        let f = DataSpec::Gaussian {
            t0: 1e-2,
            amplitude: -1.0,
        }
        .materialize(&g)
        .unwrap();
        assert!(matches!(
            baras_pierre_report(&f, &default_tau_series()),
            Err(Error::SignedField(_))
        ));
    }
}
