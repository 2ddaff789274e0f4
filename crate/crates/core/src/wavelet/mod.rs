//! Wavelet-coefficient machinery: exact DSS coefficient sets, the explicit
//! example fields living in (or outside) the critical Besov spaces, their
//! membership diagnostics, and synthesis onto the periodic grid.
//!
//! The basis is a compactly supported orthonormal tensor-product family
//! `psi_(eps,j,k)(x) = 2^(3j/2) psi_eps(2^j x - k)` built from a Daubechies
//! scaling/wavelet pair with 6 vanishing moments (regularity above 2). The
//! nominal dyadic cube of an index `(j,k)` is `2^-j (k + [0,1]^3)`; the
//! actual support is the enlarged cube `2^-j (k + [0, 11]^3)`. Coefficient
//! diagnostics use only the index bookkeeping; synthesis uses the real
//! functions.

pub mod daubechies;
pub mod diagnostics;
pub mod examples;
pub mod synthesis;

use crate::error::{DssError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use daubechies::{daubechies_filter, ScalingPair};

/// 3-D tensor-product wavelet family. `eps` in 1..=7 selects which axes
/// carry the wavelet factor (bit set) versus the scaling factor.
#[derive(Debug, Clone)]
pub struct WaveletBasis {
    pub pair: ScalingPair,
}

impl WaveletBasis {
    pub fn new() -> Self {
        WaveletBasis {
            pair: ScalingPair::new(6, 12),
        }
    }

    /// Support width of the generators in units of 2^-j.
    pub fn support_width(&self) -> f64 {
        self.pair.support_width()
    }

    /// `psi_eps(x)` for `eps` in 1..=7.
    pub fn generator(&self, eps: u8, x: [f64; 3]) -> f64 {
        debug_assert!((1..=7).contains(&eps));
        let mut v = 1.0;
        for (axis, &xi) in x.iter().enumerate() {
            let use_psi = (eps >> axis) & 1 == 1;
            v *= if use_psi {
                self.pair.psi(xi)
            } else {
                self.pair.phi(xi)
            };
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }

    /// `psi_(eps,j,k)(x) = 2^(3j/2) psi_eps(2^j x - k)`.
    pub fn member(&self, eps: u8, j: i32, k: [i32; 3], x: [f64; 3]) -> f64 {
        let s = 2.0f64.powi(j);
        let arg = [
            s * x[0] - k[0] as f64,
            s * x[1] - k[1] as f64,
            s * x[2] - k[2] as f64,
        ];
        2.0f64.powf(1.5 * j as f64) * self.generator(eps, arg)
    }
}

impl Default for WaveletBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Level-0 coefficient rule, kept alongside the stored window so
/// diagnostics can extend sums past it analytically.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum Level0Rule {
    /// `alpha_(0,(n,0,0)) = n^(-1/q)` on the positive axis.
    AxisPower { q: f64 },
    /// `alpha_(0,k) = |k|^-1` for `|k| >= 2`.
    InverseRadius,
    /// `alpha_(0,k) = sqrt(2)` on the translate sets touching
    /// `(3 2^(i-1), 0, 0)`.
    AxisClusters,
}

/// Sparse wavelet coefficient set `(eps, j, k) -> alpha` with one fixed
/// generator type and an optional exact 2-DSS law anchored at level 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveletCoeffs {
    pub eps: u8,
    /// Stored entries `(j, k) -> alpha`.
    pub entries: BTreeMap<(i32, [i32; 3]), f64>,
    /// Set when the stored entries obey `alpha_(j,k) = 2^(-j/2) alpha_(0,k)`
    /// exactly.
    pub dss: bool,
    pub rule: Option<Level0Rule>,
}

impl WaveletCoeffs {
    pub fn empty(eps: u8) -> Self {
        WaveletCoeffs {
            eps,
            entries: BTreeMap::new(),
            dss: false,
            rule: None,
        }
    }

    pub fn coefficient(&self, j: i32, k: [i32; 3]) -> f64 {
        if let Some(&a) = self.entries.get(&(j, k)) {
            return a;
        }
        if self.dss {
            if let Some(&a0) = self.entries.get(&(0, k)) {
                return 2.0f64.powf(-0.5 * j as f64) * a0;
            }
        }
        0.0
    }

    /// Stored levels, ascending.
    pub fn levels(&self) -> Vec<i32> {
        let mut ls: Vec<i32> = self.entries.keys().map(|(j, _)| *j).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    /// Entries of one level.
    pub fn level_entries(&self, j: i32) -> impl Iterator<Item = ([i32; 3], f64)> + '_ {
        self.entries
            .range((j, [i32::MIN; 3])..=(j, [i32::MAX; 3]))
            .map(|(&(_, k), &a)| (k, a))
    }

    /// Max deviation from the level-0 law over stored entries, relative to
    /// the largest coefficient magnitude.
    pub fn dss_law_residual(&self) -> f64 {
        let mut max_dev = 0.0f64;
        let mut max_mag = 0.0f64;
        for (&(j, k), &a) in &self.entries {
            max_mag = max_mag.max(a.abs());
            let a0 = match self.entries.get(&(0, k)) {
                Some(&v) => v,
                None => continue,
            };
            let expect = 2.0f64.powf(-0.5 * j as f64) * a0;
            max_dev = max_dev.max((a - expect).abs());
        }
        if max_mag == 0.0 {
            0.0
        } else {
            max_dev / max_mag
        }
    }
}

/// Extend level-0 coefficients to all levels in `j_range` by the exact
/// scale-to-scale law `alpha_(j,k) = 2^(-j/2) alpha_(0,k)`.
pub fn dss_extend_coeffs(
    eps: u8,
    level0: &BTreeMap<[i32; 3], f64>,
    j_range: (i32, i32),
) -> Result<WaveletCoeffs> {
    let (j_lo, j_hi) = j_range;
    if j_lo > j_hi {
        return Err(DssError::InvalidArgument(format!(
            "empty level range [{j_lo}, {j_hi}]"
        )));
    }
    let mut entries = BTreeMap::new();
    for j in j_lo..=j_hi {
        let w = 2.0f64.powf(-0.5 * j as f64);
        for (&k, &a0) in level0 {
            if a0 != 0.0 {
                entries.insert((j, k), w * a0);
            }
        }
    }
    if !level0.is_empty() && !(j_lo..=j_hi).contains(&0) {
        // anchor the law: always store level 0 so lookups can apply it
        for (&k, &a0) in level0 {
            if a0 != 0.0 {
                entries.insert((0, k), a0);
            }
        }
    }
    Ok(WaveletCoeffs {
        eps: if eps == 0 { 7 } else { eps },
        entries,
        dss: true,
        rule: None,
    })
}
