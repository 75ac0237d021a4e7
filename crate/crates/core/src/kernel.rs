//! The radial heat kernel and its matrix form on a grid.
//!
//! For radial data the Gaussian kernel reduces to
//! `k_N(r,s,t) = (4 pi t)^{-N/2} e^{-(r-s)^2/(4t)} A_N(rs/(2t))` with the
//! angular factor `A_N(a) = omega_{N-2} ∫_0^pi e^{a(cos th - 1)} sin^{N-2}th dth`
//! for N >= 2, and to the even-extension pair of Gaussians for N = 1. The
//! `e^{a(cos th - 1)}` normalization keeps every factor <= 1, so there is no
//! overflow for any (r, s, t).

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{InnerTail, RadialField, RadialGrid};
use crate::math;
use crate::quadrature::{GL8_NODES, GL8_WEIGHTS};
use crate::special;

/// Evaluation strategy for the sphere-averaged kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    /// Even-extension pair of 1-d Gaussians (N = 1 only).
    ClosedForm1d,
    /// `A_3(a) = 2 pi (1 - e^{-2a})/a` (N = 3 only).
    ClosedForm3d,
    /// Composite Gauss-Legendre in the polar angle, panels adapted to the
    /// peak width `a^{-1/2}`.
    AngularQuadrature,
}

/// Radial heat-kernel evaluator for a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeatKernel {
    dim: u32,
    method: KernelMethod,
}

impl HeatKernel {
    /// Default method for the dimension: closed forms for N in {1, 3},
    /// angular quadrature otherwise.
    pub fn new(dim: u32) -> Result<Self> {
        let method = match dim {
            0 => return Err(Error::InvalidParameter("dimension must be >= 1".into())),
            1 => KernelMethod::ClosedForm1d,
            3 => KernelMethod::ClosedForm3d,
            _ => KernelMethod::AngularQuadrature,
        };
        Ok(HeatKernel { dim, method })
    }

    /// Override the method (the quadrature path is valid for any N >= 2 and
    /// is used to cross-check the N = 3 closed form).
    pub fn with_method(dim: u32, method: KernelMethod) -> Result<Self> {
        match (dim, method) {
            (0, _) => Err(Error::InvalidParameter("dimension must be >= 1".into())),
            (1, KernelMethod::ClosedForm1d) => Ok(HeatKernel { dim, method }),
            (1, _) | (_, KernelMethod::ClosedForm1d) => Err(Error::InvalidParameter(
                "closed-form-1d applies exactly to N = 1".into(),
            )),
            (3, _) => Ok(HeatKernel { dim, method }),
            (_, KernelMethod::ClosedForm3d) => Err(Error::InvalidParameter(
                "closed-form-3d applies only to N = 3".into(),
            )),
            _ => Ok(HeatKernel { dim, method }),
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn method(&self) -> KernelMethod {
        self.method
    }

    /// Kernel value `k_N(r, s, t)`; symmetric in (r, s), nonnegative.
    pub fn eval(&self, r: f64, s: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        if r < 0.0 || s < 0.0 {
            return Err(Error::InvalidParameter("radii must be nonnegative".into()));
        }
        Ok(self.eval_unchecked(r, s, t))
    }

    pub(crate) fn eval_unchecked(&self, r: f64, s: f64, t: f64) -> f64 {
        let nf = self.dim as f64;
        let pref = math::powf(4.0 * special::PI * t, -0.5 * nf);
        match self.method {
            KernelMethod::ClosedForm1d => {
                let d = r - s;
                let p = r + s;
                pref * (math::exp(-d * d / (4.0 * t)) + math::exp(-p * p / (4.0 * t)))
            }
            KernelMethod::ClosedForm3d => {
                let d = r - s;
                let a = r * s / (2.0 * t);
                pref * math::exp(-d * d / (4.0 * t)) * angular_factor_3d(a)
            }
            KernelMethod::AngularQuadrature => {
                let d = r - s;
                let a = r * s / (2.0 * t);
                pref * math::exp(-d * d / (4.0 * t)) * angular_factor(self.dim, a)
            }
        }
    }

    /// Kernel value against a point mass at the origin:
    /// `(4 pi t)^{-N/2} e^{-r^2/(4t)}` (used for the unresolved-core term).
    pub(crate) fn origin_value(&self, r: f64, t: f64) -> f64 {
        let nf = self.dim as f64;
        math::powf(4.0 * special::PI * t, -0.5 * nf) * math::exp(-r * r / (4.0 * t))
    }
}

/// `A_3(a) = 2 pi (1 - e^{-2a})/a`, with the `a -> 0` limit `4 pi`.
pub(crate) fn angular_factor_3d(a: f64) -> f64 {
    if a < 1e-300 {
        4.0 * special::PI
    } else {
        -2.0 * special::PI * math::exp_m1(-2.0 * a) / a
    }
}

/// `A_N(a) = omega_{N-2} ∫_0^pi e^{a(cos th - 1)} sin^{N-2} th dth` by
/// composite Gauss-Legendre with panels concentrated on the peak.
///
/// For large `a` the integrand lives on `th ~ a^{-1/2}`; the rule integrates
/// `[0, th_c]` with `th_c = acos(1 - 80/a)`, and the discarded tail is below
/// `e^{-80}` relative to the peak contribution.
pub(crate) fn angular_factor(dim: u32, a: f64) -> f64 {
    debug_assert!(dim >= 2);
    let omega = special::unit_sphere_area(dim - 1);
    let k = dim as i32 - 2;
    let mut acc = 0.0;
    let panel = |lo: f64, hi: f64| {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut s_acc = 0.0;
        for i in 0..8 {
            let th = mid + half * GL8_NODES[i];
            // cos(th) - 1 = -2 sin^2(th/2), free of cancellation for small th
            let half_sin = math::sin(0.5 * th);
            let cos_m1 = -2.0 * half_sin * half_sin;
            s_acc += GL8_WEIGHTS[i] * math::exp(a * cos_m1) * math::powi(math::sin(th), k);
        }
        s_acc * half
    };
    // the integrand peaks at theta ~ a^{-1/2}; put ten panels on the peak
    // zone and four on the remainder (which only matters for small a)
    let theta_p = (14.0 / math::sqrt(a.max(1.0))).min(special::PI);
    for p in 0..10 {
        acc += panel(theta_p * p as f64 / 10.0, theta_p * (p + 1) as f64 / 10.0);
    }
    if theta_p < special::PI {
        let h = (special::PI - theta_p) / 4.0;
        for p in 0..4 {
            acc += panel(theta_p + h * p as f64, theta_p + h * (p + 1) as f64);
        }
    }
    omega * acc
}

/// Dense kernel matrix for a fixed `(grid, t)`: row `i` holds
/// `k_N(r_i, s_j, t) w_j`, plus the origin column for the core-mass term.
///
/// Immutable after construction; safe to share across threads. The
/// propagator caches one matrix per mesh step (write-once, then read-only).
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    grid: Arc<RadialGrid>,
    t: f64,
    rows: Vec<f64>,
    origin: Vec<f64>,
}

impl KernelMatrix {
    pub fn build(grid: &Arc<RadialGrid>, t: f64, kernel: &HeatKernel) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        if kernel.dim() != grid.dim() {
            return Err(Error::GridMismatch);
        }
        let n = grid.len();
        let nodes = grid.nodes();
        let w = grid.weights();
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let k = kernel.eval_unchecked(nodes[i], nodes[j], t);
                rows[i * n + j] = k * w[j];
                rows[j * n + i] = k * w[i];
            }
        }
        // The exact operator has unit kernel mass away from the truncation
        // boundary. Rows are renormalized to that target: this removes the
        // common-mode quadrature error that would otherwise compound across
        // marched steps, and a fully unresolved row (kernel width below the
        // local node spacing) degenerates to the exact identity row, keeping
        // very small steps stable. Rows near the boundary, where real mass
        // leaves the domain, are only capped at 1.
        let interior = grid.r_max() - 10.0 * math::sqrt(4.0 * t);
        for i in 0..n {
            let row = &mut rows[i * n..(i + 1) * n];
            let mass: f64 = row.iter().sum();
            let scale = if nodes[i] <= interior && mass > 0.0 {
                1.0 / mass
            } else if mass > 1.0 {
                1.0 / mass
            } else {
                1.0
            };
            if scale != 1.0 {
                for v in row.iter_mut() {
                    *v *= scale;
                }
            }
        }
        let origin = nodes.iter().map(|&r| kernel.origin_value(r, t)).collect();
        Ok(KernelMatrix {
            grid: grid.clone(),
            t,
            rows,
            origin,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// `S(t) phi` on the grid: quadrature rows against the samples plus the
    /// closed-form core mass against the origin column.
    pub fn apply(&self, field: &RadialField) -> Result<RadialField> {
        if !Arc::ptr_eq(&self.grid, field.grid()) && !self.grid.same_layout(field.grid()) {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.len();
        let v = field.values();
        let core = field.core_mass();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let row = &self.rows[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * v[j];
            }
            out.push(acc + core * self.origin[i]);
        }
        Ok(RadialField::from_parts(
            self.grid.clone(),
            out,
            InnerTail::Negligible,
        ))
    }
}

/// Fast path for N = 1 on a uniform midpoint grid `r_i = (i + 1/2) h`:
/// the even-extension kernel application reduces to Toeplitz-plus-Hankel
/// sums over `2n` precomputed kernel samples, so applying `S(t)` costs one
/// multiply-add per pair instead of one `exp` per pair.
///
/// This is a performance companion to the panel-quadrature path, which
/// remains the trusted reference; the two are cross-checked in the tests.
pub struct UniformConvolution1d {
    n: usize,
    h: f64,
    t: f64,
    /// `k[d] = (4 pi t)^{-1/2} e^{-(d h)^2 / (4t)}` for d = 0 .. 2n-1.
    kernel: Vec<f64>,
}

impl UniformConvolution1d {
    pub fn new(n: usize, h: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        if n == 0 || !(h > 0.0) {
            return Err(Error::InvalidParameter(
                "uniform convolution needs n >= 1 and h > 0".into(),
            ));
        }
        let pref = math::powf(4.0 * special::PI * t, -0.5);
        let kernel = (0..2 * n)
            .map(|d| {
                let x = d as f64 * h;
                pref * math::exp(-x * x / (4.0 * t))
            })
            .collect();
        Ok(UniformConvolution1d { n, h, t, kernel })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Midpoint node positions `(i + 1/2) h`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| (i as f64 + 0.5) * self.h).collect()
    }

    /// `S(t)` applied to samples on the midpoint grid (midpoint-rule weights).
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.n {
            return Err(Error::InvalidParameter(alloc::format!(
                "expected {} samples, got {}",
                self.n,
                values.len()
            )));
        }
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = 0.0;
            for (j, &v) in values.iter().enumerate() {
                // |r_i - s_j| = |i-j| h and r_i + s_j = (i + j + 1) h
                let d = i.abs_diff(j);
                acc += (self.kernel[d] + self.kernel[i + j + 1]) * v;
            }
            out.push(acc * self.h);
        }
        Ok(out)
    }
}
