//! Scalar quadrature: the 8-point Gauss-Legendre panel rule used across the
//! crate, improper integrals in the sigma = -log s variable, and the
//! log-weight integrals with their closed forms.

use crate::error::{Error, Result};
use crate::math;

/// 8-point Gauss-Legendre nodes on [-1, 1] (positive half; rule is symmetric).
pub(crate) const GL8_NODES: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.5255324099163290,
    -0.1834346424956498,
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];

pub(crate) const GL8_WEIGHTS: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.3626837833783620,
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// One 8-point Gauss-Legendre panel over [a, b].
pub(crate) fn gl8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL8_WEIGHTS[i] * f(mid + half * GL8_NODES[i]);
    }
    acc * half
}

/// Improper integral `∫_{sigma_min}^∞ F(sigma) dsigma` for integrands decaying
/// at least like `sigma^{-(1+delta)}`. Geometric panels; returns +inf when the
/// panel contributions stop decaying (divergent tail).
pub(crate) fn improper_sigma_integral<F: FnMut(f64) -> f64>(
    mut f: F,
    sigma_min: f64,
    rel_tol: f64,
) -> f64 {
    const GROWTH: f64 = 1.4;
    const MAX_PANELS: usize = 420;
    let mut lo = sigma_min;
    let mut total = 0.0;
    let mut quiet = 0usize;
    let mut prev = f64::INFINITY;
    let mut stalled = 0usize;
    for _ in 0..MAX_PANELS {
        let hi = lo * GROWTH;
        let piece = gl8(&mut f, lo, hi);
        total += piece;
        let scale = total.abs().max(1e-300);
        if piece.abs() <= rel_tol * scale {
            quiet += 1;
            if quiet >= 3 {
                return total;
            }
        } else {
            quiet = 0;
        }
        // contributions must decay eventually; a long non-decreasing run on a
        // geometric ladder means the integral diverges
        if piece.abs() >= prev.abs() * 0.999 {
            stalled += 1;
            if stalled > 80 {
                return f64::INFINITY;
            }
        } else {
            stalled = 0;
        }
        prev = piece;
        lo = hi;
    }
    f64::INFINITY
}

/// Quadrature value and the antiderivative evaluation of a log-weight integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogWeightIntegral {
    /// Composite Gauss-Legendre value.
    pub quadrature: f64,
    /// Closed form `[(-log s)^{1-a}/(a-1)]` between the limits (log-log form
    /// for a = 1).
    pub closed_form: f64,
}

/// `∫_{t_floor}^{t} s^{-1} (-log s)^{-a} ds`, reported both as quadrature and
/// as the closed form. `t_floor = 0` is the improper case, which exists only
/// for a > 1.
///
/// In sigma = -log s the integrand is `sigma^{-a}`; the quadrature runs in
/// that variable (after `x = sigma_t / sigma`, `x = y^2` for the improper
/// case, which removes the endpoint singularity for a >= 1.5 entirely).
pub fn log_weight_integral(t: f64, a: f64, t_floor: f64) -> Result<LogWeightIntegral> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "log_weight_integral requires 0 < t < 1, got t = {t}"
        )));
    }
    if !(t_floor >= 0.0 && t_floor < t) {
        return Err(Error::InvalidParameter(alloc::format!(
            "log_weight_integral requires 0 <= t_floor < t, got t_floor = {t_floor}"
        )));
    }
    let sigma_t = -math::ln(t);
    if t_floor == 0.0 {
        if a <= 1.0 {
            return Err(Error::DivergentIntegral { exponent: a });
        }
        let closed_form = math::powf(sigma_t, 1.0 - a) / (a - 1.0);
        // x = sigma_t / sigma maps the tail to (0, 1]; x = y^2 then gives
        // integrand 2 y^{2a-3}, polynomial for a in {1.5, 2, 3}.
        let power = 2.0 * a - 3.0;
        let scale = math::powf(sigma_t, 1.0 - a);
        // geometric panels toward 0 until the omitted head is ~1e-18 relative
        let k_max = (60.0_f64.max(62.0 / (a - 1.0)).min(4000.0)) as usize;
        let mut acc = 0.0;
        let mut hi = 1.0_f64;
        for _ in 0..k_max {
            let lo = 0.5 * hi;
            acc += gl8(|y: f64| 2.0 * math::powf(y, power), lo, hi);
            hi = lo;
        }
        Ok(LogWeightIntegral {
            quadrature: scale * acc,
            closed_form,
        })
    } else {
        let sigma_floor = -math::ln(t_floor);
        let closed_form = if a == 1.0 {
            math::ln(sigma_floor / sigma_t)
        } else {
            (math::powf(sigma_floor, 1.0 - a) - math::powf(sigma_t, 1.0 - a)) / (1.0 - a)
        };
        // finite interval in sigma; geometric panels from sigma_t
        let mut acc = 0.0;
        let mut lo = sigma_t;
        while lo < sigma_floor {
            let hi = (lo * 1.5).min(sigma_floor);
            acc += gl8(|s: f64| math::powf(s, -a), lo, hi);
            lo = hi;
        }
        Ok(LogWeightIntegral {
            quadrature: acc,
            closed_form,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gl8_exact_for_degree_15() {
        // single panel integrates x^15 exactly over [0, 1]
        let v = gl8(|x| x.powi(15), 0.0, 1.0);
        assert!(rel(v, 1.0 / 16.0) < 1e-14);
        let v = gl8(|x| x.powi(16), 0.0, 1.0);
        assert!(rel(v, 1.0 / 17.0) > 1e-15); // degree 16 is not exact
    }

    #[test]
    fn improper_case_matches_antiderivative() {
        // a = 2, t = e^-10: value (-log t)^{-1}/(2-1) = 1/10
        let r = log_weight_integral((-10.0_f64).exp(), 2.0, 0.0).unwrap();
        assert!(rel(r.closed_form, 0.1) < 1e-14);
        assert!(rel(r.quadrature, 0.1) < 1e-10);
    }

    #[test]
    fn uniqueness_integral_closed_form() {
        // a = 2q/N with N=1, q=1: t = e^-4 gives N(-log t)^{1-2q/N}/(2q-N) = 1/4
        let r = log_weight_integral((-4.0_f64).exp(), 2.0, 0.0).unwrap();
        assert!(rel(r.closed_form, 0.25) < 1e-14);
        assert!(rel(r.quadrature, 0.25) < 1e-10);
    }

    #[test]
    fn plain_log_integral() {
        // a = 0 over [e^-2, e^-1]: plain ∫ s^-1 ds = 1
        let r = log_weight_integral((-1.0_f64).exp(), 0.0, (-2.0_f64).exp()).unwrap();
        assert!(rel(r.closed_form, 1.0) < 1e-14);
        assert!(rel(r.quadrature, 1.0) < 1e-12);
    }

    #[test]
    fn quadrature_tracks_closed_form() {
        for &a in &[1.5, 2.0, 3.0] {
            for &s in &[3.0, 10.0, 30.0] {
                let t = (-s_f64(s)).exp();
                let r = log_weight_integral(t, a, 0.0).unwrap();
                assert!(
                    rel(r.quadrature, r.closed_form) < 1e-8,
                    "a={a} sigma={s}: {} vs {}",
                    r.quadrature,
                    r.closed_form
                );
            }
        }
    }

    fn s_f64(s: f64) -> f64 {
        s
    }

    #[test]
    fn divergent_lower_limit_is_an_error() {
        let err = log_weight_integral(0.01, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral { .. }));
        let err = log_weight_integral(0.01, 0.5, 0.0).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral { .. }));
    }

    #[test]
    fn a_equal_one_with_floor_uses_log_log_form() {
        let r = log_weight_integral((-8.0_f64).exp(), 1.0, (-32.0_f64).exp()).unwrap();
        assert!(rel(r.closed_form, (32.0_f64 / 8.0).ln()) < 1e-14);
        assert!(rel(r.quadrature, r.closed_form) < 1e-10);
    }

    #[test]
    fn improper_sigma_integral_converges_and_diverges() {
        // ∫_2^∞ sigma^-2 = 1/2
        let v = improper_sigma_integral(|s| s.powi(-2), 2.0, 1e-12);
        assert!(rel(v, 0.5) < 1e-9);
        // ∫_2^∞ sigma^-1 diverges
        let v = improper_sigma_integral(|s| 1.0 / s, 2.0, 1e-12);
        assert!(v.is_infinite());
    }
}
