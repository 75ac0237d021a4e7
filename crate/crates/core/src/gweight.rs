//! The convex weight `g(u) = u [log(rho + |u|)]^q`, its relatives and the
//! `X_{q,rho}` integrability functionals.
//!
//! The toolkit is stated on `s >= 0`; signed arguments are handled by odd
//! extension at the call sites that need it.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{integrate_pointwise, InnerTail, RadialField};
use crate::kernel::HeatKernel;
use crate::math;
use crate::quadrature::improper_sigma_integral;
use crate::semigroup::apply_semigroup;

pub const E: f64 = core::f64::consts::E;

/// The pair (q, rho) defining the weight, with the derived regime flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GParams {
    q: f64,
    rho: f64,
}

impl GParams {
    pub fn new(q: f64, rho: f64) -> Result<Self> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponent q must be >= 0, got {q}"
            )));
        }
        if !(rho > 1.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "base rho must exceed 1, got {rho}"
            )));
        }
        Ok(GParams { q, rho })
    }

    /// The base used throughout the existence machinery:
    /// `rho = max(e, e^{q/(p-1)})` with `p = 1 + 2/N`.
    pub fn canonical(q: f64, dim: u32) -> Result<Self> {
        let rho = E.max(math::exp(q * dim as f64 / 2.0));
        Self::new(q, rho)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// g is convex on [0, inf) iff rho >= e.
    pub fn is_convex(&self) -> bool {
        self.rho >= E * (1.0 - 1e-12)
    }

    /// `g^{-1}(s)^p / s` is nondecreasing when `rho >= e^{q/(p-1)}`,
    /// `p = 1 + 2/N` (the derivative margin stays positive at equality).
    pub fn is_power_monotone(&self, dim: u32) -> bool {
        self.rho >= math::exp(self.q * dim as f64 / 2.0) * (1.0 - 1e-12)
    }

    /// `g(s) = s [log(rho + s)]^q` for s >= 0.
    pub fn g(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "g is defined on s >= 0");
        s * math::powf(math::ln(self.rho + s), self.q)
    }

    /// `g'(s) = [log(rho+s)]^{q-1} { log(rho+s) + q s/(s+rho) }`.
    pub fn g_prime(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "g' is defined on s >= 0");
        let l = math::ln(self.rho + s);
        math::powf(l, self.q - 1.0) * (l + self.q * s / (s + self.rho))
    }

    /// `g''(s) = q [log(s+rho)]^{q-2}/(s+rho)^2 [ s{log(rho+s)+q-1} + 2 rho log(rho+s) ]`.
    pub fn g_second(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "g'' is defined on s >= 0");
        let l = math::ln(self.rho + s);
        let d = s + self.rho;
        self.q * math::powf(l, self.q - 2.0) / (d * d) * (s * (l + self.q - 1.0) + 2.0 * self.rho * l)
    }

    /// `g_1(s) = s [log(rho + s)]^{-q}`, the explicit lower bound for g^{-1}.
    pub fn g1(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "g_1 is defined on s >= 0");
        s * math::powf(math::ln(self.rho + s), -self.q)
    }

    /// Safeguarded Newton inverse on the bracket `[g_1(s), s]` (valid for
    /// rho >= e, where g is convex increasing and g(u) >= u).
    pub fn inverse(&self, s: f64, tol: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "g^-1 is defined on s >= 0, got {s}"
            )));
        }
        if !self.is_convex() {
            return Err(Error::InvalidParameter(format!(
                "g^-1 bracket requires rho >= e, got rho = {}",
                self.rho
            )));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        // relative target; stricter than the tol * max(1, s) contract for
        // small s, where the absolute floor would lose all relative accuracy
        // (floored above the subnormal range, which f64 cannot resolve)
        let target_tol = (tol.max(1e-15) * s).max(1e-300);
        let mut lo = self.g1(s);
        let mut hi = s;
        let mut y = 0.5 * (lo + hi);
        for _ in 0..100 {
            let f = self.g(y) - s;
            if math::abs(f) <= target_tol {
                return Ok(y);
            }
            if f > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let d = self.g_prime(y);
            let newton = y - f / d;
            y = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::NonConvergence(format!(
            "g^-1 did not meet tolerance at s = {s}"
        )))
    }
}

/// Sampling plan for the property suite: `count` log-spaced points in
/// `[s_min, s_max]` plus s = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            s_min: 1e-8,
            s_max: 1e8,
            count: 10_000,
        }
    }
}

impl SampleSpec {
    pub fn samples(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.count + 1);
        out.push(0.0);
        let (la, lb) = (math::ln(self.s_min), math::ln(self.s_max));
        for k in 0..self.count {
            let x = if self.count == 1 {
                lb
            } else {
                la + (lb - la) * k as f64 / (self.count - 1) as f64
            };
            out.push(math::exp(x));
        }
        out
    }
}

/// One verified inequality of the weight-function lemma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    /// False when the hypothesis for the property does not hold for (q, rho).
    pub checked: bool,
    /// Worst normalized slack over the samples (>= 0 means the property held).
    pub worst: f64,
    /// Sample where the worst slack occurred.
    pub worst_at: f64,
}

/// Results of the five-point property suite plus the empirical C1.
#[derive(Debug, Clone)]
pub struct GPropertyReport {
    pub q: f64,
    pub rho: f64,
    pub dim: u32,
    pub sample_count: usize,
    pub convex: bool,
    pub power_monotone: bool,
    pub properties: [PropertyCheck; 5],
    /// Least empirical constant with `g^{-1}(s) <= g_1(C1 s)` over the samples.
    pub c1_empirical: f64,
}

impl GPropertyReport {
    /// All applicable properties hold within the normalized slack `-tol`.
    pub fn pass(&self, tol: f64) -> bool {
        self.c1_empirical.is_finite()
            && self
                .properties
                .iter()
                .all(|p| !p.checked || p.worst >= -tol)
    }
}

/// Verify the monotonicity, convexity, bracket, C1 and power-ratio
/// properties of g on a log-spaced sample.
pub fn check_g_properties(params: &GParams, dim: u32, spec: &SampleSpec) -> GPropertyReport {
    let samples = spec.samples();
    let q = params.q();
    let rho = params.rho();
    let p = 1.0 + 2.0 / dim as f64;

    let mut worst = [(f64::INFINITY, 0.0_f64); 5];
    let mut track = |idx: usize, slack: f64, s: f64| {
        if slack < worst[idx].0 {
            worst[idx] = (slack, s);
        }
    };

    // (i) g' > 0 for rho > 1, normalized by the leading log power
    for &s in &samples {
        if s > 0.0 {
            let scale = math::powf(math::ln(rho + s), q).max(1e-300);
            track(0, params.g_prime(s) / scale, s);
        }
    }

    // (ii) g'' > 0 for rho >= e; for q = 0 the second derivative vanishes
    // identically and the slack sits at the boundary 0
    for &s in &samples {
        if s > 0.0 {
            let l = math::ln(rho + s);
            let bracket = s * (l + q - 1.0) + 2.0 * rho * l;
            let slack = if q == 0.0 {
                0.0
            } else {
                bracket / ((s + rho) * (l + q))
            };
            track(1, slack, s);
        }
    }

    let convex = params.is_convex();
    let power_monotone = params.is_power_monotone(dim);
    let inv_tol = 1e-12;

    // (iii) g_1(s) <= g^{-1}(s), relative to g^{-1}
    let mut inverses: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
    if convex {
        for &s in &samples {
            let y = params.inverse(s, inv_tol).unwrap_or(f64::NAN);
            inverses.push((s, y));
            if s > 0.0 && y.is_finite() {
                track(2, (y - params.g1(s)) / y.max(1e-300), s);
            }
        }
        if samples.iter().all(|&s| s <= 0.0) {
            track(2, 0.0, 0.0);
        }
    }

    // (iv) least empirical C1 with g^{-1}(s) <= g_1(C1 s): per sample the
    // critical c solves g_1(c s) = g^{-1}(s), i.e. z = y [log(rho+z)]^q with
    // z = c s, a fast fixed point
    let mut c1 = 0.0_f64;
    if convex {
        for &(s, y) in &inverses {
            if s <= 0.0 || !y.is_finite() || y == 0.0 {
                continue;
            }
            let mut z = y;
            for _ in 0..200 {
                let next = y * math::powf(math::ln(rho + z), q);
                if math::abs(next - z) <= 1e-13 * next.max(1.0) {
                    z = next;
                    break;
                }
                z = next;
            }
            c1 = c1.max(z / s);
        }
        track(3, if c1.is_finite() { 1.0 } else { f64::NEG_INFINITY }, 0.0);
    }

    // (v) s -> g^{-1}(s)^p / s nondecreasing on consecutive samples, with the
    // right-limit 0 at s = 0
    if convex && power_monotone {
        let mut prev = 0.0_f64; // ratio at s = 0 by convention
        let mut have_prev = true;
        for &(s, y) in &inverses {
            if s <= 0.0 || !y.is_finite() {
                continue;
            }
            let ratio = math::powf(y, p) / s;
            if have_prev {
                track(4, (ratio - prev) / ratio.max(1e-300), s);
            }
            prev = ratio;
            have_prev = true;
        }
    }

    let named = ["g-increasing", "g-convex", "g1-below-inverse", "c1-finite", "power-ratio-monotone"];
    let checked = [
        true,
        true,
        convex,
        convex,
        convex && power_monotone,
    ];
    let mut properties = [PropertyCheck {
        name: "",
        checked: false,
        worst: f64::INFINITY,
        worst_at: 0.0,
    }; 5];
    for i in 0..5 {
        properties[i] = PropertyCheck {
            name: named[i],
            checked: checked[i],
            worst: if checked[i] { worst[i].0 } else { f64::INFINITY },
            worst_at: worst[i].1,
        };
    }

    GPropertyReport {
        q,
        rho,
        dim,
        sample_count: samples.len(),
        convex,
        power_monotone,
        properties,
        c1_empirical: if convex { c1 } else { f64::NAN },
    }
}

/// Normalized worst margin of the convexity inequality
/// `S(t) phi <= g^{-1}(S(t) g(phi))` on the grid:
/// `min_i [g^{-1}(S(t)g(phi))_i - (S(t)phi)_i] / sup S(t)phi`.
pub fn jensen_check(
    field: &RadialField,
    t: f64,
    params: &GParams,
    kernel: &HeatKernel,
) -> Result<f64> {
    if !field.is_nonnegative() {
        return Err(Error::SignedField("jensen_check"));
    }
    if !params.is_convex() {
        return Err(Error::InvalidParameter(
            "the convexity inequality requires rho >= e".into(),
        ));
    }
    let lhs = apply_semigroup(field, t, kernel)?;
    let weighted = field.map(|v| params.g(v));
    let evolved = apply_semigroup(&weighted, t, kernel)?;
    let mut margin = f64::INFINITY;
    for (i, (&a, &b)) in lhs.values().iter().zip(evolved.values()).enumerate() {
        let inv = params.inverse(b.max(0.0), 1e-12)?;
        let m = inv - a;
        if m < margin {
            margin = m;
        }
        let _ = i;
    }
    let scale = lhs.sup_norm().0.max(1e-300);
    Ok(margin / scale)
}

/// `∫ |phi| [log(rho + |phi|)]^q dx`: the X_{q,rho} functional (X_q is
/// rho = e). Fields with a singular power-log core model get the core's
/// contribution by an improper sigma-integral of the exact formula; the
/// result is +inf when that tail diverges (phi outside X_q).
pub fn xq_norm(field: &RadialField, q: f64, rho: f64) -> Result<f64> {
    let params = GParams::new(q, rho)?;
    let bulk = integrate_pointwise(field, |v, _| params.g(math::abs(v)));
    let tail = match field.inner_tail() {
        InnerTail::Negligible => 0.0,
        InnerTail::PowerLog {
            amp,
            beta,
            log_offset,
        } => {
            let grid = field.grid();
            let nf = grid.dim() as f64;
            let sigma_min = -math::ln(grid.r_min());
            let omega = grid.surface_area();
            let weight = move |sigma: f64| -> f64 {
                let sc = sigma + log_offset;
                // log(rho + f) with f = amp e^{N sigma} sc^{-beta}, kept in
                // log form so large sigma cannot overflow
                let ln_f = math::ln(amp) + nf * sigma - beta * math::ln(sc);
                let log_weight = if ln_f > 40.0 {
                    ln_f + math::ln_1p(rho * math::exp(-ln_f))
                } else {
                    math::ln(rho + math::exp(ln_f))
                };
                amp * math::powf(sc, -beta) * math::powf(log_weight, q)
            };
            omega * improper_sigma_integral(weight, sigma_min, 1e-10)
        }
    };
    Ok(bulk + tail)
}
