//! Periodic computational box approximating R^3.

use crate::error::{DssError, Result};
use serde::{Deserialize, Serialize};

/// Uniform periodic grid on the box `[-L, L]^3` with `N` samples per axis.
///
/// Wavenumbers are integer multiples of `pi / L`; the grid carries all
/// index/frequency bookkeeping used by the spectral operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    /// Half-width `L` of the box.
    pub half_width: f64,
    /// Samples per axis (even, >= 16).
    pub resolution: usize,
}

impl BoxGrid {
    pub fn new(half_width: f64, resolution: usize) -> Result<Self> {
        if resolution < 16 || resolution % 2 != 0 {
            return Err(DssError::InvalidArgument(format!(
                "resolution must be even and >= 16, got {resolution}"
            )));
        }
        if half_width <= 0.0 {
            return Err(DssError::InvalidArgument(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        Ok(BoxGrid {
            half_width,
            resolution,
        })
    }

    /// Grid spacing `h = 2L / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    /// Physical coordinate of sample `i` along one axis: `-L + i h`.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    /// Fundamental wavenumber `pi / L`.
    pub fn dk(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Signed integer frequency of spectral index `i` (FFT storage order).
    pub fn freq_index(&self, i: usize) -> i64 {
        let n = self.resolution as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber of spectral index `i` along one axis.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.freq_index(i) as f64 * self.dk()
    }

    /// Wavevector of a spectral index triple.
    pub fn wavevector(&self, idx: [usize; 3]) -> [f64; 3] {
        [
            self.wavenumber(idx[0]),
            self.wavenumber(idx[1]),
            self.wavenumber(idx[2]),
        ]
    }

    /// Largest resolvable wavenumber magnitude per axis, `pi N / (2L)`.
    pub fn max_wavenumber(&self) -> f64 {
        self.dk() * (self.resolution as f64 / 2.0)
    }

    /// Volume element `h^3` of the box quadrature.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Total box volume `(2L)^3`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(3)
    }

    /// Number of samples `N^3`.
    pub fn len(&self) -> usize {
        self.resolution.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True if the integer frequency survives the 2/3 dealiasing rule.
    pub fn dealias_keep(&self, m: i64) -> bool {
        3 * m.abs() <= self.resolution as i64
    }

    pub fn same_as(&self, other: &BoxGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(DssError::GridMismatch(format!(
                "expected N={} L={}, got N={} L={}",
                self.resolution, self.half_width, other.resolution, other.half_width
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(BoxGrid::new(16.0, 15).is_err());
        assert!(BoxGrid::new(16.0, 14).is_err());
        assert!(BoxGrid::new(-1.0, 16).is_err());
        assert!(BoxGrid::new(16.0, 48).is_ok());
    }

    #[test]
    fn frequency_layout_matches_fft_order() {
        let g = BoxGrid::new(8.0, 16).unwrap();
        assert_eq!(g.freq_index(0), 0);
        assert_eq!(g.freq_index(7), 7);
        assert_eq!(g.freq_index(8), -8);
        assert_eq!(g.freq_index(15), -1);
        let dk = std::f64::consts::PI / 8.0;
        assert!((g.wavenumber(1) - dk).abs() < 1e-15);
        assert!((g.wavenumber(15) + dk).abs() < 1e-15);
    }

    #[test]
    fn coords_span_box() {
        let g = BoxGrid::new(4.0, 16).unwrap();
        assert_eq!(g.coord(0), -4.0);
        assert!((g.coord(8) - 0.0).abs() < 1e-15);
        assert!((g.spacing() - 0.5).abs() < 1e-15);
    }
}
