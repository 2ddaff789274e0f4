//! Synthesis of coefficient sets onto the periodic grid and quadrature
//! analysis back to coefficients.

use super::{WaveletBasis, WaveletCoeffs};
use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::BoxGrid;
use ndarray::Array3;
use rayon::prelude::*;

pub struct SynthesisResult {
    pub field: SpectralField,
    /// Levels finer than the grid spacing that were kept anyway; their
    /// synthesis is under-resolved.
    pub truncated_levels: Vec<i32>,
}

/// Evaluate `sum alpha_(j,k) psi_(eps,j,k)` on the grid for stored levels
/// inside `j_window`. Accumulation is restricted to each member's support.
pub fn synthesize(
    c: &WaveletCoeffs,
    basis: &WaveletBasis,
    grid: BoxGrid,
    j_window: (i32, i32),
) -> Result<SynthesisResult> {
    let n = grid.resolution;
    let h = grid.spacing();
    let width = basis.support_width();
    let entries: Vec<((i32, [i32; 3]), f64)> = c
        .entries
        .iter()
        .filter(|(&(j, _), _)| j >= j_window.0 && j <= j_window.1)
        .map(|(&key, &a)| (key, a))
        .collect();
    let mut truncated_levels: Vec<i32> = entries
        .iter()
        .map(|((j, _), _)| *j)
        .filter(|&j| 2.0f64.powi(-j) < h)
        .collect::<Vec<_>>();
    truncated_levels.sort_unstable();
    truncated_levels.dedup();

    let phys = entries
        .par_iter()
        .fold(
            || Array3::<f64>::zeros((n, n, n)),
            |mut acc, &((j, k), a)| {
                let s = 2.0f64.powi(-j);
                // support of the member: s*k <= x <= s*(k + width)
                let mut idx_lo = [0usize; 3];
                let mut idx_hi = [0usize; 3];
                let mut empty = false;
                for ax in 0..3 {
                    let lo = s * k[ax] as f64;
                    let hi = s * (k[ax] as f64 + width);
                    let i_lo = ((lo + grid.half_width) / h).ceil().max(0.0) as usize;
                    let i_hi = ((hi + grid.half_width) / h).floor() as isize;
                    if i_hi < 0 || i_lo >= n {
                        empty = true;
                        break;
                    }
                    idx_lo[ax] = i_lo;
                    idx_hi[ax] = (i_hi as usize).min(n - 1);
                }
                if !empty {
                    for i in idx_lo[0]..=idx_hi[0] {
                        for jj in idx_lo[1]..=idx_hi[1] {
                            for kk in idx_lo[2]..=idx_hi[2] {
                                let x = [grid.coord(i), grid.coord(jj), grid.coord(kk)];
                                let v = basis.member(c.eps, j, k, x);
                                if v != 0.0 {
                                    acc[(i, jj, kk)] += a * v;
                                }
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || Array3::<f64>::zeros((n, n, n)),
            |mut a, b| {
                a.zip_mut_with(&b, |x, y| *x += y);
                a
            },
        );

    let field = SpectralField::fft_forward(grid, &[phys])?;
    Ok(SynthesisResult {
        field,
        truncated_levels,
    })
}

/// Divergence-free vector synthesis: the scalar prototype times a constant
/// direction, Leray-projected.
pub fn synthesize_divfree(
    c: &WaveletCoeffs,
    basis: &WaveletBasis,
    grid: BoxGrid,
    j_window: (i32, i32),
    direction: [f64; 3],
) -> Result<SpectralField> {
    let scalar = synthesize(c, basis, grid, j_window)?.field;
    let zero = Array3::zeros((grid.resolution, grid.resolution, grid.resolution));
    let phys = scalar.physical(0);
    let comps = vec![
        phys.mapv(|v| v * direction[0]),
        if direction[1] == 0.0 {
            zero.clone()
        } else {
            phys.mapv(|v| v * direction[1])
        },
        if direction[2] == 0.0 {
            zero
        } else {
            phys.mapv(|v| v * direction[2])
        },
    ];
    let vector = SpectralField::fft_forward(grid, &comps)?;
    Ok(vector.helmholtz_project())
}

/// Fine-table 1-D quadrature of
/// `int 2^(j/2) g(2^j x - k) 2^(j'/2) g'(2^j' x - k') dx`
/// where each factor is the scaling function or the wavelet.
pub fn pair_inner_1d(
    basis: &WaveletBasis,
    f_psi: bool,
    j: i32,
    k: i32,
    g_psi: bool,
    jp: i32,
    kp: i32,
) -> f64 {
    let width = basis.support_width();
    // integrate on the support of the finer member at table resolution
    let (jf, kf) = if j >= jp { (j, k) } else { (jp, kp) };
    let sf = 2.0f64.powi(-jf);
    let lo = sf * kf as f64;
    let hi = sf * (kf as f64 + width);
    let steps = ((width * 2.0f64.powi(12)) as usize).min(1 << 18);
    let step = (hi - lo) / steps as f64;
    let wf = 2.0f64.powf(0.5 * j as f64);
    let wg = 2.0f64.powf(0.5 * jp as f64);
    let fval = |x: f64| {
        let arg = 2.0f64.powi(j) * x - k as f64;
        if f_psi {
            basis.pair.psi(arg)
        } else {
            basis.pair.phi(arg)
        }
    };
    let gval = |x: f64| {
        let arg = 2.0f64.powi(jp) * x - kp as f64;
        if g_psi {
            basis.pair.psi(arg)
        } else {
            basis.pair.phi(arg)
        }
    };
    let mut s = 0.0;
    for i in 0..steps {
        let x = lo + (i as f64 + 0.5) * step;
        s += fval(x) * gval(x);
    }
    s * step * wf * wg
}

/// Analysis oracle: `<psi_(eps,j,k), sum alpha' psi_(eps,j',k')>` computed
/// through the tensor factorization into 1-D fine-table quadratures. This
/// stays independent of the grid pipeline and resolves the inner products
/// to ~1e-8.
pub fn analyze_coefficient_tensor(
    c: &WaveletCoeffs,
    basis: &WaveletBasis,
    j: i32,
    k: [i32; 3],
) -> f64 {
    let eps = c.eps;
    let mut acc = 0.0;
    for (&(jp, kp), &a) in &c.entries {
        let mut prod = 1.0;
        for ax in 0..3 {
            let f_psi = (eps >> ax) & 1 == 1;
            let v = pair_inner_1d(basis, f_psi, j, k[ax], f_psi, jp, kp[ax]);
            prod *= v;
            if prod == 0.0 {
                break;
            }
        }
        acc += a * prod;
    }
    acc
}

/// Quadrature inner product `<psi_(eps,j,k), f>` over the member support
/// on the grid (grid-resolution accuracy only).
pub fn analyze_coefficient(
    f_phys: &Array3<f64>,
    basis: &WaveletBasis,
    grid: BoxGrid,
    eps: u8,
    j: i32,
    k: [i32; 3],
) -> f64 {
    let n = grid.resolution;
    let h = grid.spacing();
    let width = basis.support_width();
    let s = 2.0f64.powi(-j);
    let mut acc = 0.0;
    let mut idx_lo = [0usize; 3];
    let mut idx_hi = [0usize; 3];
    for ax in 0..3 {
        let lo = s * k[ax] as f64;
        let hi = s * (k[ax] as f64 + width);
        let i_lo = ((lo + grid.half_width) / h).ceil().max(0.0) as usize;
        let i_hi = ((hi + grid.half_width) / h).floor() as isize;
        if i_hi < 0 || i_lo >= n {
            return 0.0;
        }
        idx_lo[ax] = i_lo;
        idx_hi[ax] = (i_hi as usize).min(n - 1);
    }
    for i in idx_lo[0]..=idx_hi[0] {
        for jj in idx_lo[1]..=idx_hi[1] {
            for kk in idx_lo[2]..=idx_hi[2] {
                let x = [grid.coord(i), grid.coord(jj), grid.coord(kk)];
                acc += f_phys[(i, jj, kk)] * basis.member(eps, j, k, x);
            }
        }
    }
    acc * grid.cell_volume()
}
