//! Trajectory containers: physical-time paths on geometric grids and
//! T-periodic similarity-variable paths on uniform s-grids.

use crate::error::{DssError, Result};
use crate::field::SpectralField;
use crate::grid::BoxGrid;

/// Snapshots on a strictly increasing time grid (geometric in the mild
/// pipeline, with an optional leading t = 0 snapshot for the data).
#[derive(Debug, Clone)]
pub struct TimePath {
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
}

impl TimePath {
    pub fn new(times: Vec<f64>, snapshots: Vec<SpectralField>) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(DssError::InvalidArgument(
                "times and snapshots length mismatch".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DssError::InvalidArgument(
                "times must be strictly increasing".into(),
            ));
        }
        if let Some(first) = snapshots.first() {
            let grid = first.grid;
            for s in &snapshots {
                grid.same_as(&s.grid)?;
            }
        }
        Ok(TimePath { times, snapshots })
    }

    /// Geometric time grid `t_lo * q^m` up to `t_hi`, with a leading zero
    /// slot for initial data.
    pub fn geometric_times(t_lo: f64, t_hi: f64, q: f64) -> Vec<f64> {
        let mut ts = vec![0.0];
        let mut t = t_lo;
        while t < t_hi * (1.0 + 1e-12) {
            ts.push(t);
            t *= q;
        }
        ts
    }

    pub fn grid(&self) -> BoxGrid {
        self.snapshots[0].grid
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of a time value, if it is (almost exactly) on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times
            .iter()
            .position(|&v| (v - t).abs() <= 1e-10 * t.abs().max(1e-300))
    }
}

/// T-periodic trajectory in similarity variables, sampled at
/// `s_m = T m / M`, m = 0..=M (both endpoints stored; the last snapshot
/// measures the periodicity residual).
#[derive(Debug, Clone)]
pub struct SimilarityPath {
    pub period: f64,
    pub snapshots: Vec<SpectralField>,
}

impl SimilarityPath {
    pub fn steps(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn s_value(&self, m: usize) -> f64 {
        self.period * m as f64 / self.steps() as f64
    }

    pub fn grid(&self) -> BoxGrid {
        self.snapshots[0].grid
    }

    /// Relative L2 distance between the first and last snapshot.
    pub fn periodicity_residual(&self) -> f64 {
        let first = &self.snapshots[0];
        let last = &self.snapshots[self.snapshots.len() - 1];
        let denom = first.l2_norm();
        if denom == 0.0 {
            0.0
        } else {
            last.sub(first).l2_norm() / denom
        }
    }

    /// Max over snapshots of the sup norm.
    pub fn sup_norm(&self) -> f64 {
        self.snapshots
            .iter()
            .take(self.steps())
            .map(|f| crate::norms::lebesgue_norm(f, f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Snapshot at arbitrary s by periodic trigonometric interpolation
    /// over the M distinct snapshots (exact on resolved s-harmonics).
    pub fn interpolate(&self, s: f64) -> SpectralField {
        let m = self.steps();
        let grid = self.grid();
        let ncomp = self.snapshots[0].ncomp();
        let mut out = SpectralField::zeros(grid, ncomp);
        for (idx, w) in trig_weights(s / self.period, m).into_iter().enumerate() {
            if w.abs() > 1e-15 {
                out.add_assign_scaled(&self.snapshots[idx], w);
            }
        }
        out
    }
}

/// Weights of periodic trigonometric interpolation at fraction `frac` of
/// the period, over `m` uniform nodes (Dirichlet kernel).
pub fn trig_weights(frac: f64, m: usize) -> Vec<f64> {
    let mf = m as f64;
    let x = frac.rem_euclid(1.0) * mf; // in node units
    (0..m)
        .map(|j| {
            let d = x - j as f64;
            let wrapped = d.rem_euclid(mf);
            if wrapped.abs() < 1e-13 || (mf - wrapped).abs() < 1e-13 {
                1.0
            } else {
                let t = std::f64::consts::PI * d / mf;
                if m % 2 == 0 {
                    (std::f64::consts::PI * d).sin() / (mf * t.tan())
                } else {
                    (std::f64::consts::PI * d).sin() / (mf * t.sin())
                }
            }
        })
        .collect()
}

/// Physical-variable counterpart of a similarity path: snapshots `v(.,t)`
/// on a geometric t-grid locked to the s-grid, `t_m = exp(s_m)`.
#[derive(Debug, Clone)]
pub struct PhysicalPath {
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
}

impl PhysicalPath {
    pub fn grid(&self) -> BoxGrid {
        self.snapshots[0].grid
    }
}
