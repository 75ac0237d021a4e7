//! Time-indexed families of radial fields and the weighted sup-norm track.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::math;
use crate::mesh::TimeMesh;

/// One field per mesh node; the discrete carrier of `u(t)` on `(0, T]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    mesh: Arc<TimeMesh>,
    fields: Vec<RadialField>,
    label: String,
}

impl Trajectory {
    pub fn new(mesh: Arc<TimeMesh>, fields: Vec<RadialField>, label: &str) -> Result<Self> {
        if fields.len() != mesh.len() {
            return Err(Error::InvalidParameter(format!(
                "{} fields for a {}-node mesh",
                fields.len(),
                mesh.len()
            )));
        }
        if let Some(first) = fields.first() {
            let g = first.grid();
            if fields.iter().any(|f| !Arc::ptr_eq(f.grid(), g) && !f.grid().same_layout(g)) {
                return Err(Error::GridMismatch);
            }
        }
        Ok(Trajectory {
            mesh,
            fields,
            label: label.into(),
        })
    }

    pub fn mesh(&self) -> &Arc<TimeMesh> {
        &self.mesh
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.fields[0].grid()
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn field(&self, k: usize) -> &RadialField {
        &self.fields[k]
    }

    pub fn fields(&self) -> &[RadialField] {
        &self.fields
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    /// Nodewise transform of every field.
    pub fn map<F: Fn(f64) -> f64 + Copy>(&self, f: F, label: &str) -> Trajectory {
        Trajectory {
            mesh: self.mesh.clone(),
            fields: self.fields.iter().map(|fl| fl.map(f)).collect(),
            label: label.into(),
        }
    }

    /// Largest pointwise difference against another trajectory, weighted by
    /// `m(t) = t^{N/2} (-log t)^q` per node.
    pub fn weighted_linf_distance(&self, other: &Trajectory, q: f64) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::InvalidParameter("trajectory length mismatch".into()));
        }
        let nf = self.grid().dim() as f64;
        let mut worst = 0.0_f64;
        for (k, (a, b)) in self.fields.iter().zip(&other.fields).enumerate() {
            let t = self.mesh.nodes()[k];
            let sigma = self.mesh.sigmas()[k];
            let w = math::powf(t, 0.5 * nf) * math::powf(sigma, q);
            let mut diff = 0.0_f64;
            for (x, y) in a.values().iter().zip(b.values()) {
                diff = diff.max(math::abs(x - y));
            }
            worst = worst.max(w * diff);
        }
        Ok(worst)
    }
}

/// The weighted sup-norm series `m(t_k) = t_k^{N/2} (-log t_k)^q ||u(t_k)||_inf`.
#[derive(Debug, Clone)]
pub struct WeightedTrack {
    pub q: f64,
    /// (t, m(t)) per mesh node.
    pub series: Vec<(f64, f64)>,
    pub max: f64,
    pub first: f64,
    pub last: f64,
}

impl WeightedTrack {
    /// Crude trend indicator: last value over the running maximum.
    pub fn trend(&self) -> f64 {
        self.last / self.max.max(1e-300)
    }
}

/// Evaluate the weighted sup-norm track of a trajectory.
pub fn weighted_supnorm_track(traj: &Trajectory, q: f64) -> WeightedTrack {
    let nf = traj.grid().dim() as f64;
    let mut series = Vec::with_capacity(traj.len());
    let mut max = 0.0_f64;
    for (k, field) in traj.fields().iter().enumerate() {
        let t = traj.mesh().nodes()[k];
        let sigma = traj.mesh().sigmas()[k];
        let m = math::powf(t, 0.5 * nf) * math::powf(sigma, q) * field.sup_norm().0;
        max = max.max(m);
        series.push((t, m));
    }
    WeightedTrack {
        q,
        max,
        first: series.first().map(|p| p.1).unwrap_or(0.0),
        last: series.last().map(|p| p.1).unwrap_or(0.0),
        series,
    }
}
