//! Graded time meshes on (0, T].

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Horizons must stay below e^-2 so that -log t >= 2 on the whole mesh,
/// which every log-weight formula downstream presumes.
pub const MAX_HORIZON: f64 = 0.1353352832366127; // e^-2

/// Time nodes `0 < t_1 < ... < t_m = T`, geometric in `-log t`
/// (equivalently uniform in `sigma = -log t`).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    nodes: Vec<f64>,
    sigmas: Vec<f64>,
}

impl TimeMesh {
    /// `-log t_k` linearly spaced from `-log t1` down to `-log T`.
    pub fn log_graded(t1: f64, horizon: f64, m: usize) -> Result<Self> {
        if !(t1 > 0.0) || !t1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "first node must be positive, got t1 = {t1}"
            )));
        }
        if horizon >= MAX_HORIZON {
            return Err(Error::InvalidParameter(format!(
                "horizon must satisfy T < e^-2 so that -log t >= 2 on the mesh, got T = {horizon}"
            )));
        }
        if t1 >= horizon {
            return Err(Error::InvalidParameter(format!(
                "need t1 < T, got t1 = {t1}, T = {horizon}"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 time nodes, got m = {m}"
            )));
        }
        let s1 = -math::ln(t1);
        let s_end = -math::ln(horizon);
        let mut nodes = Vec::with_capacity(m);
        let mut sigmas = Vec::with_capacity(m);
        for k in 0..m {
            let s = s1 + (s_end - s1) * k as f64 / (m - 1) as f64;
            sigmas.push(s);
            nodes.push(math::exp(-s));
        }
        nodes[0] = t1;
        nodes[m - 1] = horizon;
        Ok(TimeMesh { nodes, sigmas })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `sigma_k = -log t_k`, decreasing.
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// A mesh over the same interval with `factor` times as many nodes.
    pub fn refined(&self, factor: usize) -> Result<TimeMesh> {
        TimeMesh::log_graded(self.first(), self.horizon(), (self.len() - 1) * factor + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grading_is_uniform_in_sigma() {
        // t1 = e^-20, T = e^-4, m = 17: -log t_k = 20, 19, ..., 4
        let mesh = TimeMesh::log_graded((-20.0_f64).exp(), (-4.0_f64).exp(), 17).unwrap();
        for (k, s) in mesh.sigmas().iter().enumerate() {
            assert!((s - (20.0 - k as f64)).abs() < 1e-12);
        }
        assert!(mesh.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn two_nodes_are_the_endpoints() {
        let mesh = TimeMesh::log_graded(1e-6, 1e-3, 2).unwrap();
        assert_eq!(mesh.nodes(), &[1e-6, 1e-3]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TimeMesh::log_graded(1e-3, 1e-6, 8).is_err()); // t1 >= T
        assert!(TimeMesh::log_graded(1e-3, 1e-3, 8).is_err());
        assert!(TimeMesh::log_graded(0.0, 1e-3, 8).is_err());
        assert!(TimeMesh::log_graded(1e-6, 0.2, 8).is_err()); // T >= e^-2
        assert!(TimeMesh::log_graded(1e-6, 1e-3, 1).is_err());
    }
}
