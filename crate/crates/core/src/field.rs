//! Truncated Fourier representation of scalar/vector fields on a periodic
//! box, with the multiplier calculus used throughout: Riesz transforms,
//! Helmholtz (Leray) projection, heat semigroup, derivatives, dealiased
//! products, advection and the similarity drift term.
//!
//! Coefficients are stored as true Fourier coefficients: a field
//! `u(x) = sum_m c_m exp(i k_m . x)` with `k_m = m pi / L` has `c_m` at FFT
//! index `m` (negative frequencies in the upper half of each axis).

use crate::error::{DssError, Result};
use crate::grid::BoxGrid;
use ndarray::parallel::prelude::*;
use ndarray::{Array3, Axis, Zip};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

pub type C64 = Complex<f64>;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// In-place complex FFT along one axis of a 3-D array.
fn fft_axis(data: &mut Array3<C64>, ax: usize, inverse: bool) {
    let n = data.shape()[ax];
    let fft = plan(n, inverse);
    let outer = if ax == 0 { 1 } else { 0 };
    // Axis of the 2-D plane that corresponds to the FFT axis after
    // removing `outer`.
    let plane_ax = if ax > outer { ax - 1 } else { ax };
    data.axis_iter_mut(Axis(outer))
        .into_par_iter()
        .for_each(|mut plane| {
            let fft = fft.clone();
            let mut buf = vec![C64::new(0.0, 0.0); n];
            let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for mut lane in plane.lanes_mut(Axis(plane_ax)) {
                for (b, v) in buf.iter_mut().zip(lane.iter()) {
                    *b = *v;
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for (v, b) in lane.iter_mut().zip(buf.iter()) {
                    *v = *b;
                }
            }
        });
}

fn fft3(data: &mut Array3<C64>, inverse: bool) {
    for ax in 0..3 {
        fft_axis(data, ax, inverse);
    }
}

/// Checkerboard sign `(-1)^(m1+m2+m3)`, the phase shift between FFT-index
/// order and coefficients relative to the box origin at the center.
fn apply_center_phase(data: &mut Array3<C64>) {
    Zip::indexed(data).par_for_each(|(i, j, k), v| {
        if (i + j + k) % 2 == 1 {
            *v = -*v;
        }
    });
}

/// Spectral field on a [`BoxGrid`]: 1 (scalar) or 3 (vector) components of
/// complex Fourier coefficients.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: BoxGrid,
    comps: Vec<Array3<C64>>,
}

impl SpectralField {
    pub fn zeros(grid: BoxGrid, ncomp: usize) -> Self {
        assert!(ncomp == 1 || ncomp == 3, "fields are scalar or 3-vector");
        let n = grid.resolution;
        SpectralField {
            grid,
            comps: (0..ncomp).map(|_| Array3::zeros((n, n, n))).collect(),
        }
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, c: usize) -> &Array3<C64> {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut Array3<C64> {
        &mut self.comps[c]
    }

    pub fn comps(&self) -> &[Array3<C64>] {
        &self.comps
    }

    pub fn from_spectral(grid: BoxGrid, comps: Vec<Array3<C64>>) -> Self {
        assert!(comps.len() == 1 || comps.len() == 3);
        let n = grid.resolution;
        for c in &comps {
            assert_eq!(c.shape(), [n, n, n]);
        }
        SpectralField { grid, comps }
    }

    /// Forward transform of physical samples (one array per component).
    pub fn fft_forward(grid: BoxGrid, physical: &[Array3<f64>]) -> Result<Self> {
        let n = grid.resolution;
        for p in physical {
            if p.shape() != [n, n, n] {
                return Err(DssError::GridMismatch(format!(
                    "physical samples {:?} do not match N={}",
                    p.shape(),
                    n
                )));
            }
        }
        let scale = 1.0 / grid.len() as f64;
        let comps = physical
            .iter()
            .map(|p| {
                let mut data = p.mapv(|v| C64::new(v, 0.0));
                fft3(&mut data, false);
                data.par_mapv_inplace(|v| v * scale);
                apply_center_phase(&mut data);
                data
            })
            .collect();
        Ok(SpectralField { grid, comps })
    }

    /// Inverse transform back to physical samples.
    pub fn fft_inverse(&self) -> Vec<Array3<f64>> {
        self.comps
            .iter()
            .map(|c| {
                let mut data = c.clone();
                apply_center_phase(&mut data);
                fft3(&mut data, true);
                data.mapv(|v| v.re)
            })
            .collect()
    }

    /// Physical samples of one component.
    pub fn physical(&self, c: usize) -> Array3<f64> {
        let mut data = self.comps[c].clone();
        apply_center_phase(&mut data);
        fft3(&mut data, true);
        data.mapv(|v| v.re)
    }

    /// Single Fourier mode `amp * exp(i k . x)` plus its conjugate so the
    /// field is real: `2 Re(amp exp(i k.x))`. `m` is the integer frequency.
    pub fn real_mode(grid: BoxGrid, ncomp: usize, m: [i64; 3], amps: &[C64]) -> Self {
        let mut f = SpectralField::zeros(grid, ncomp);
        let n = grid.resolution as i64;
        let wrap = |v: i64| -> usize { v.rem_euclid(n) as usize };
        let idx = (wrap(m[0]), wrap(m[1]), wrap(m[2]));
        let cidx = (wrap(-m[0]), wrap(-m[1]), wrap(-m[2]));
        for (c, amp) in amps.iter().enumerate() {
            f.comps[c][idx] += amp;
            if cidx != idx {
                f.comps[c][cidx] += amp.conj();
            }
        }
        f
    }

    /// Apply a scalar multiplier `sigma(k)` to every component.
    pub fn multiply<F>(&self, sigma: F) -> Self
    where
        F: Fn([f64; 3]) -> C64 + Sync,
    {
        let grid = self.grid;
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut out = c.clone();
                Zip::indexed(&mut out).par_for_each(|(i, j, k), v| {
                    *v *= sigma(grid.wavevector([i, j, k]));
                });
                out
            })
            .collect();
        SpectralField { grid, comps }
    }

    pub fn multiply_inplace<F>(&mut self, sigma: F)
    where
        F: Fn([f64; 3]) -> C64 + Sync,
    {
        let grid = self.grid;
        for c in &mut self.comps {
            Zip::indexed(c).par_for_each(|(i, j, k), v| {
                *v *= sigma(grid.wavevector([i, j, k]));
            });
        }
    }

    /// k-th Riesz transform, symbol `i k_x / |k|` (zero mode annihilated).
    /// Nyquist rows are zeroed: the odd symbol has no conjugate partner
    /// there and would break Hermitian symmetry.
    pub fn riesz_transform(&self, axis: usize) -> Self {
        let mut out = self.multiply(|k| {
            let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            if norm == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, k[axis] / norm)
            }
        });
        out.zero_nyquist();
        out
    }

    /// Partial derivative along `axis`, symbol `i k_axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = self.multiply(|k| C64::new(0.0, k[axis]));
        out.zero_nyquist();
        out
    }

    /// Heat semigroup `exp(t Laplacian)`, symbol `exp(-t |k|^2)`.
    pub fn heat_evolve(&self, t: f64) -> Result<Self> {
        if t < 0.0 {
            return Err(DssError::InvalidArgument(format!(
                "heat_evolve requires t >= 0, got {t}"
            )));
        }
        Ok(self.multiply(|k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            C64::new((-t * k2).exp(), 0.0)
        }))
    }

    /// Helmholtz (Leray) projection onto divergence-free fields:
    /// `(P g)_j = g_j - k_j (k . g) / |k|^2`, identity on the zero mode.
    pub fn helmholtz_project(&self) -> Self {
        assert_eq!(self.ncomp(), 3, "Helmholtz projection needs a vector field");
        let grid = self.grid;
        let mut out = self.clone();
        let n = grid.resolution;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let kv = grid.wavevector([i, j, k]);
                    let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
                    if k2 == 0.0 {
                        continue;
                    }
                    let g = [
                        self.comps[0][(i, j, k)],
                        self.comps[1][(i, j, k)],
                        self.comps[2][(i, j, k)],
                    ];
                    let kg = g[0] * kv[0] + g[1] * kv[1] + g[2] * kv[2];
                    for c in 0..3 {
                        out.comps[c][(i, j, k)] = g[c] - kg * (kv[c] / k2);
                    }
                }
            }
        }
        out
    }

    /// Divergence of a vector field (scalar output).
    pub fn divergence(&self) -> Self {
        assert_eq!(self.ncomp(), 3);
        let grid = self.grid;
        let mut out = SpectralField::zeros(grid, 1);
        let n = grid.resolution;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let kv = grid.wavevector([i, j, k]);
                    let mut s = C64::new(0.0, 0.0);
                    for c in 0..3 {
                        s += C64::new(0.0, kv[c]) * self.comps[c][(i, j, k)];
                    }
                    out.comps[0][(i, j, k)] = s;
                }
            }
        }
        out.zero_nyquist();
        out
    }

    /// Zero all modes removed by the 2/3 dealiasing rule.
    pub fn dealias(&mut self) {
        let grid = self.grid;
        for c in &mut self.comps {
            Zip::indexed(c).par_for_each(|(i, j, k), v| {
                if !(grid.dealias_keep(grid.freq_index(i))
                    && grid.dealias_keep(grid.freq_index(j))
                    && grid.dealias_keep(grid.freq_index(k)))
                {
                    *v = C64::new(0.0, 0.0);
                }
            });
        }
    }

    /// Zero the unpaired Nyquist planes `m = -N/2`.
    pub fn zero_nyquist(&mut self) {
        let n = self.grid.resolution;
        let ny = n / 2;
        for c in &mut self.comps {
            Zip::indexed(c).par_for_each(|(i, j, k), v| {
                if i == ny || j == ny || k == ny {
                    *v = C64::new(0.0, 0.0);
                }
            });
        }
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.comps {
            c.par_mapv_inplace(|v| v * s);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    pub fn add_assign_scaled(&mut self, other: &SpectralField, s: f64) {
        assert_eq!(self.ncomp(), other.ncomp());
        for (a, b) in self.comps.iter_mut().zip(other.comps.iter()) {
            Zip::from(a).and(b).par_for_each(|x, y| *x += *y * s);
        }
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, -1.0);
        out
    }

    pub fn add(&self, other: &SpectralField) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, 1.0);
        out
    }

    /// Spectral L2 norm: `sqrt(V * sum |c_m|^2)`, which equals the physical
    /// box-quadrature L2 norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let v = self.grid.volume();
        let s: f64 = self
            .comps
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        (v * s).sqrt()
    }

    /// L2 inner product of two real fields via the spectral sum.
    pub fn inner_product(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.ncomp(), other.ncomp());
        let v = self.grid.volume();
        let s: f64 = self
            .comps
            .iter()
            .zip(other.comps.iter())
            .map(|(a, b)| {
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| (x.conj() * y).re)
                    .sum::<f64>()
            })
            .sum();
        v * s
    }

    /// H1-seminorm squared: `sum |k|^2 |c|^2 * V`.
    pub fn h1_seminorm_sq(&self) -> f64 {
        let grid = self.grid;
        let v = grid.volume();
        let mut s = 0.0;
        for c in &self.comps {
            for ((i, j, k), z) in c.indexed_iter() {
                let kv = grid.wavevector([i, j, k]);
                s += (kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]) * z.norm_sqr();
            }
        }
        v * s
    }

    /// H^{-1} norm computed spectrally as `|| (1+|k|^2)^{-1/2} c ||_{L2}`.
    pub fn h_minus1_norm(&self) -> f64 {
        let grid = self.grid;
        let v = grid.volume();
        let mut s = 0.0;
        for c in &self.comps {
            for ((i, j, k), z) in c.indexed_iter() {
                let kv = grid.wavevector([i, j, k]);
                let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
                s += z.norm_sqr() / (1.0 + k2);
            }
        }
        (v * s).sqrt()
    }

    /// Max relative deviation from Hermitian symmetry (reality in physical
    /// space), `max |c(-m) - conj(c(m))| / max |c|`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.grid.resolution;
        let mut max_dev: f64 = 0.0;
        let mut max_mag: f64 = 0.0;
        for c in &self.comps {
            for ((i, j, k), z) in c.indexed_iter() {
                max_mag = max_mag.max(z.norm());
                let conj_idx = ((n - i) % n, (n - j) % n, (n - k) % n);
                let dev = (c[conj_idx] - z.conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_mag == 0.0 {
            0.0
        } else {
            max_dev / max_mag
        }
    }

    /// Relative spectral divergence `max |k.c| / max |k||c|` of a vector
    /// field; zero for divergence-free fields.
    pub fn divergence_residual(&self) -> f64 {
        assert_eq!(self.ncomp(), 3);
        let grid = self.grid;
        let n = grid.resolution;
        let mut max_div: f64 = 0.0;
        let mut max_ref: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let kv = grid.wavevector([i, j, k]);
                    let knorm = (kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]).sqrt();
                    let g = [
                        self.comps[0][(i, j, k)],
                        self.comps[1][(i, j, k)],
                        self.comps[2][(i, j, k)],
                    ];
                    let mag = (g[0].norm_sqr() + g[1].norm_sqr() + g[2].norm_sqr()).sqrt();
                    let div = (g[0] * kv[0] + g[1] * kv[1] + g[2] * kv[2]).norm();
                    max_div = max_div.max(div);
                    max_ref = max_ref.max(knorm * mag);
                }
            }
        }
        if max_ref == 0.0 {
            0.0
        } else {
            max_div / max_ref
        }
    }

    /// Fraction of L2 mass in the outer 10% radial shell of the box;
    /// fields fed to the drift term should keep this below ~1e-3.
    pub fn outer_shell_energy_fraction(&self) -> f64 {
        let grid = self.grid;
        let phys = self.fft_inverse();
        let r_inner = 0.9 * grid.half_width;
        let mut outer = 0.0;
        let mut total = 0.0;
        for c in &phys {
            for ((i, j, k), v) in c.indexed_iter() {
                let x = [grid.coord(i), grid.coord(j), grid.coord(k)];
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let m = v * v;
                total += m;
                if r > r_inner {
                    outer += m;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            (outer / total).sqrt()
        }
    }
}

/// Dealiased pointwise product of two scalar physical arrays, returned as
/// a spectral scalar. Inputs are already-dealiased physical samples.
fn product_to_spectral(grid: BoxGrid, a: &Array3<f64>, b: &Array3<f64>) -> Array3<C64> {
    let prod = Zip::from(a).and(b).par_map_collect(|x, y| x * y);
    let mut f = SpectralField::fft_forward(grid, std::slice::from_ref(&prod)).unwrap();
    f.dealias();
    f.comps.remove(0)
}

/// Physical samples of every component after dealias truncation.
fn dealiased_physical(f: &SpectralField) -> Vec<Array3<f64>> {
    let mut g = f.clone();
    g.dealias();
    g.fft_inverse()
}

/// Advection `(u . grad) v` with 2/3-rule dealiasing.
///
/// Gradients are spectral; products are formed in physical space on
/// dealiased fields and truncated again afterwards.
pub fn advect(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.grid.same_as(&v.grid)?;
    assert_eq!(u.ncomp(), 3, "advecting velocity must be a vector field");
    let grid = u.grid;
    let u_phys = dealiased_physical(u);
    let mut out = SpectralField::zeros(grid, v.ncomp());
    for c in 0..v.ncomp() {
        let mut acc: Option<Array3<f64>> = None;
        for ax in 0..3 {
            let dv = {
                let mut d = SpectralField {
                    grid,
                    comps: vec![v.comps[c].clone()],
                }
                .derivative(ax);
                d.dealias();
                d.physical(0)
            };
            let term = Zip::from(&u_phys[ax]).and(&dv).par_map_collect(|a, b| a * b);
            acc = Some(match acc {
                None => term,
                Some(mut s) => {
                    Zip::from(&mut s).and(&term).par_for_each(|x, y| *x += y);
                    s
                }
            });
        }
        let mut f = SpectralField::fft_forward(grid, &[acc.unwrap()])?;
        f.dealias();
        out.comps[c] = f.comps.remove(0);
    }
    Ok(out)
}

/// Similarity drift `u/2 + (y . grad u)/2`, with `y` the physical box
/// coordinate (bounded by the box; fields must be concentrated well inside,
/// see [`SpectralField::outer_shell_energy_fraction`]).
pub fn drift_term(u: &SpectralField) -> SpectralField {
    let grid = u.grid;
    let mut out = SpectralField::zeros(grid, u.ncomp());
    for c in 0..u.ncomp() {
        let mut acc = Array3::<f64>::zeros((grid.resolution, grid.resolution, grid.resolution));
        for ax in 0..3 {
            let du = SpectralField {
                grid,
                comps: vec![u.comps[c].clone()],
            }
            .derivative(ax)
            .physical(0);
            Zip::indexed(&mut acc).par_for_each(|(i, j, k), v| {
                let y = grid.coord([i, j, k][ax]);
                *v += y * du[(i, j, k)];
            });
        }
        let f = SpectralField::fft_forward(grid, &[acc]).unwrap();
        out.comps[c] = f.comps[0].clone();
        // u/2 + (y . grad u)/2
        let half = u.comps[c].mapv(|z| z * 0.5);
        Zip::from(&mut out.comps[c]).and(&half).par_for_each(|a, b| {
            *a = *a * 0.5 + b;
        });
    }
    out
}

/// Pressure from the Riesz formula `p = sum_ij R_i R_j (A_i A_j)` with
/// dealiased products; zero mean.
pub fn pressure_from_velocity(a: &SpectralField) -> SpectralField {
    assert_eq!(a.ncomp(), 3);
    let grid = a.grid;
    let phys = dealiased_physical(a);
    let mut p = SpectralField::zeros(grid, 1);
    for i in 0..3 {
        for j in i..3 {
            let spec = product_to_spectral(grid, &phys[i], &phys[j]);
            let factor = if i == j { 1.0 } else { 2.0 };
            // R_i R_j has symbol -k_i k_j / |k|^2
            let mut term = SpectralField {
                grid,
                comps: vec![spec],
            }
            .multiply(|k| {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if k2 == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(-k[i] * k[j] / k2, 0.0)
                }
            });
            term.scale(factor);
            p.add_assign_scaled(&term, 1.0);
        }
    }
    p
}

/// Divergence of the tensor product, `(div (u (x) v))_c = d_j (u_j v_c)`,
/// dealiased; this is the mild-formulation nonlinearity before projection.
pub fn tensor_divergence(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.grid.same_as(&v.grid)?;
    let grid = u.grid;
    let up = dealiased_physical(u);
    let vp = if std::ptr::eq(u, v) {
        up.clone()
    } else {
        dealiased_physical(v)
    };
    let mut out = SpectralField::zeros(grid, 3);
    for c in 0..3 {
        let mut div = SpectralField::zeros(grid, 1);
        for j in 0..3 {
            let spec = product_to_spectral(grid, &up[j], &vp[c]);
            let term = SpectralField {
                grid,
                comps: vec![spec],
            }
            .derivative(j);
            div.add_assign_scaled(&term, 1.0);
        }
        out.comps[c] = div.comps.remove(0);
    }
    Ok(out)
}

/// Smooth random real field, band-limited to `|m|_inf <= band`, seeded.
/// Used for probe sets and property tests.
pub fn random_smooth(grid: BoxGrid, ncomp: usize, band: i64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, ncomp);
    for c in 0..ncomp {
        for m1 in -band..=band {
            for m2 in -band..=band {
                for m3 in -band..=band {
                    if m1 == 0 && m2 == 0 && m3 == 0 {
                        continue;
                    }
                    let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    let decay = (-0.3 * ((m1 * m1 + m2 * m2 + m3 * m3) as f64)).exp();
                    let mode =
                        SpectralField::real_mode(grid, 1, [m1, m2, m3], &[amp * decay * 0.5]);
                    f.comps[c]
                        .iter_mut()
                        .zip(mode.comps[0].iter())
                        .for_each(|(a, b)| *a += b);
                }
            }
        }
    }
    f
}
