//! Bluestein chirp-z transforms: exact evaluation of grid spectra at
//! uniformly *scaled* frequency grids, and of grid fields at uniformly
//! scaled physical points. These are the resampling primitives behind the
//! DSS rescalings `x -> lambda x` (which never land on grid points).

use crate::field::{C64, SpectralField};
use crate::grid::BoxGrid;
use ndarray::parallel::prelude::*;
use ndarray::{Array3, Axis};
use rustfft::FftPlanner;
use std::sync::Arc;

/// `out[p] = sum_m a[m] exp(i theta u[p] v[m])` for integer index maps
/// `u, v`, computed by Bluestein factorization in O((n+m) log) time.
fn chirp_sum(a: &[C64], v: &[i64], u: &[i64], theta: f64) -> Vec<C64> {
    assert_eq!(a.len(), v.len());
    let n_in = v.len();
    let n_out = u.len();
    let u_min = *u.iter().min().unwrap();
    let u_max = *u.iter().max().unwrap();
    let v_min = *v.iter().min().unwrap();
    let v_max = *v.iter().max().unwrap();
    let d_min = u_min - v_max;
    let d_max = u_max - v_min;
    let width = (d_max - d_min + 1) as usize;
    let m = width.max(n_in).max(n_out).next_power_of_two();

    let half = 0.5 * theta;
    let chirp = |q: i64| -> C64 {
        let ph = half * (q * q) as f64;
        C64::new(ph.cos(), ph.sin())
    };

    // A[v_m mod M] = a_m e^{i theta v_m^2 / 2}; the v values are distinct
    // mod M because their span is at most M.
    let mut a_arr = vec![C64::new(0.0, 0.0); m];
    for (&av, &vi) in a.iter().zip(v.iter()) {
        let slot = vi.rem_euclid(m as i64) as usize;
        a_arr[slot] += av * chirp(vi);
    }
    // B[d mod m] = e^{-i theta d^2 / 2} for all reachable d = u_p - v_m
    let mut b_arr = vec![C64::new(0.0, 0.0); m];
    for d in d_min..=d_max {
        let slot = d.rem_euclid(m as i64) as usize;
        b_arr[slot] = chirp(d).conj();
    }

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    fwd.process(&mut a_arr);
    fwd.process(&mut b_arr);
    for (x, y) in a_arr.iter_mut().zip(b_arr.iter()) {
        *x *= *y;
    }
    inv.process(&mut a_arr);
    let scale = 1.0 / m as f64;

    // out_p = e^{i theta u_p^2/2} * conv[u_p mod M]: every true difference
    // d = u_p - v_i lies in the width-M window covered by B, so the modular
    // lookup returns the correct chirp factor.
    (0..n_out)
        .map(|p| {
            let slot = u[p].rem_euclid(m as i64) as usize;
            a_arr[slot] * scale * chirp(u[p])
        })
        .collect()
}

fn signed_freqs(n: usize) -> Vec<i64> {
    (0..n)
        .map(|i| {
            let i = i as i64;
            let n = n as i64;
            if i < n / 2 {
                i
            } else {
                i - n
            }
        })
        .collect()
}

/// Apply a 1-D lane transform along each axis of a 3-D complex array.
fn lane_transform_axis<F>(data: &mut Array3<C64>, ax: usize, f: Arc<F>)
where
    F: Fn(&[C64]) -> Vec<C64> + Sync + Send,
{
    let outer = if ax == 0 { 1 } else { 0 };
    let plane_ax = if ax > outer { ax - 1 } else { ax };
    data.axis_iter_mut(Axis(outer))
        .into_par_iter()
        .for_each(|mut plane| {
            let mut buf: Vec<C64> = Vec::new();
            for mut lane in plane.lanes_mut(Axis(plane_ax)) {
                buf.clear();
                buf.extend(lane.iter().copied());
                let out = f(&buf);
                for (v, o) in lane.iter_mut().zip(out.iter()) {
                    *v = *o;
                }
            }
        });
}

/// Fourier coefficients of the grid data evaluated at the scaled
/// frequencies `s * k_m` for every grid frequency `k_m`:
/// `out[m] = (1/N^3) sum_x f(x) exp(-i s k_m . x)`.
///
/// At `s = 1` this is `fft_forward`. The result is returned in the same
/// FFT index layout as [`SpectralField`] coefficients.
pub fn scaled_spectrum(grid: BoxGrid, physical: &[Array3<f64>], s: f64) -> Vec<Array3<C64>> {
    let n = grid.resolution;
    let freqs = signed_freqs(n);
    let ramp: Vec<i64> = (0..n as i64).collect();
    let theta = -2.0 * std::f64::consts::PI * s / n as f64;
    let scale = 1.0 / n as f64;
    let freqs_c = freqs.clone();
    let lane_fn = Arc::new(move |lane: &[C64]| -> Vec<C64> {
        let mut out = chirp_sum(lane, &ramp, &freqs_c, theta);
        for (o, &q) in out.iter_mut().zip(freqs_c.iter()) {
            // phase from the physical offset x_0 = -L: e^{i s pi q}
            let ph = s * std::f64::consts::PI * q as f64;
            *o *= C64::new(ph.cos(), ph.sin()) * scale;
        }
        out
    });
    physical
        .iter()
        .map(|p| {
            let mut data = p.mapv(|v| C64::new(v, 0.0));
            for ax in 0..3 {
                lane_transform_axis(&mut data, ax, lane_fn.clone());
            }
            data
        })
        .collect()
}

/// Evaluate the trigonometric interpolant of `f` at the scaled points
/// `s * x_i` for every grid point `x_i`, i.e. return samples of
/// `g(x) = f(s x)`.
pub fn eval_scaled_physical(f: &SpectralField, s: f64) -> Vec<Array3<f64>> {
    let n = f.grid.resolution;
    let freqs = signed_freqs(n);
    let ramp: Vec<i64> = (0..n as i64).collect();
    let theta = 2.0 * std::f64::consts::PI * s / n as f64;
    let freqs_c = freqs.clone();
    let lane_fn = Arc::new(move |lane: &[C64]| -> Vec<C64> {
        let mut pre: Vec<C64> = lane.to_vec();
        for (v, &q) in pre.iter_mut().zip(freqs_c.iter()) {
            let ph = -s * std::f64::consts::PI * q as f64;
            *v *= C64::new(ph.cos(), ph.sin());
        }
        chirp_sum(&pre, &freqs_c, &ramp, theta)
    });
    f.comps()
        .iter()
        .map(|c| {
            let mut data = c.clone();
            for ax in 0..3 {
                lane_transform_axis(&mut data, ax, lane_fn.clone());
            }
            data.mapv(|v| v.re)
        })
        .collect()
}

/// `g(x) = f(s x)` as a new spectral field on the same grid (FFT of the
/// exactly evaluated samples; content pushed past the Nyquist band by
/// `s > 1` aliases and must be negligible in the caller's regime).
pub fn rescale_physical(f: &SpectralField, s: f64) -> SpectralField {
    let phys = eval_scaled_physical(f, s);
    SpectralField::fft_forward(f.grid, &phys).unwrap()
}

/// Refine physical samples by zero-padding the spectrum `factor`-fold.
pub fn refine_physical(f: &SpectralField, factor: usize) -> (BoxGrid, Vec<Array3<f64>>) {
    let n = f.grid.resolution;
    let nf = n * factor;
    let fine = BoxGrid::new(f.grid.half_width, nf).unwrap();
    let comps: Vec<Array3<C64>> = f
        .comps()
        .iter()
        .map(|c| {
            let mut big: Array3<C64> = Array3::zeros((nf, nf, nf));
            for ((i, j, k), v) in c.indexed_iter() {
                let map = |i: usize| -> usize {
                    let q = f.grid.freq_index(i);
                    q.rem_euclid(nf as i64) as usize
                };
                big[(map(i), map(j), map(k))] = *v;
            }
            big
        })
        .collect();
    let field = SpectralField::from_spectral(fine, comps);
    let phys = field.fft_inverse();
    (fine, phys)
}
