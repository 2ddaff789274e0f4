//! Daubechies filter construction and cascade evaluation of the scaling
//! function / wavelet pair.
//!
//! The filter is built numerically: spectral factorization of the
//! Daubechies polynomial with roots from a Durand-Kerner iteration, so no
//! tabulated constants enter. Tests pin the defining identities (sum,
//! shift-orthonormality, vanishing moments) instead.

use num_complex::Complex;

type C = Complex<f64>;

/// Binomial coefficient as f64.
fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// All complex roots of a polynomial (coefficients low-to-high) by the
/// Durand-Kerner iteration.
fn poly_roots(coeffs: &[f64]) -> Vec<C> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<C> = coeffs.iter().map(|&c| C::new(c / lead, 0.0)).collect();
    let eval = |z: C| -> C {
        let mut v = C::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            v = v * z + c;
        }
        v
    };
    let mut roots: Vec<C> = (0..n)
        .map(|k| C::new(0.4, 0.9).powu(k as u32 + 1))
        .collect();
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = C::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 {
            break;
        }
    }
    roots
}

/// Convolution of real coefficient sequences.
fn conv(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn conv_c(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Low-pass filter of the Daubechies wavelet with `k` vanishing moments
/// (2k taps), normalized so the coefficients sum to sqrt(2).
pub fn daubechies_filter(k: usize) -> Vec<f64> {
    assert!(k >= 1);
    // P(y) = sum_{m<k} C(k-1+m, m) y^m
    let p: Vec<f64> = (0..k).map(|m| binom(k - 1 + m, m)).collect();
    // R(z) = z^(k-1) P((1-z)(1-1/z)/4), a polynomial of degree 2(k-1);
    // build by Horner in y with Laurent steps folded into the z power.
    // y(z) * z = (-z^2 + 2z - 1)/4 as plain polynomial coefficients:
    let yz = [-0.25, 0.5, -0.25]; // coefficients of z^0, z^1, z^2, times z^-1
    // Horner: start from highest coefficient
    let mut r = vec![p[k - 1]];
    for m in (0..k - 1).rev() {
        // r <- r * y(z) + p[m], tracked with the z^(k-1) prefactor:
        // multiply by (yz as poly in z, with an implicit shift by -1 which
        // the final z^(k-1) absorbs level by level)
        let mut nr = conv(&r, &[yz[0], yz[1], yz[2]]);
        // add p[m] * z^(current offset): after this multiplication the
        // polynomial has picked up one factor of z; the constant term of
        // the Horner sum sits at the current center.
        let center = (nr.len() - 1) / 2;
        nr[center] += p[m];
        r = nr;
    }
    // roots of R come in (z, 1/z) pairs; keep the ones inside the circle
    let roots = poly_roots(&r);
    let inside: Vec<C> = roots.into_iter().filter(|z| z.norm() < 1.0).collect();
    assert_eq!(inside.len(), k - 1, "spectral factorization root count");
    // h(z) ~ ((1+z)/2)^k * prod (z - z_i)/(1 - z_i)
    let mut poly: Vec<C> = vec![C::new(1.0, 0.0)];
    for _ in 0..k {
        poly = conv_c(&poly, &[C::new(0.5, 0.0), C::new(0.5, 0.0)]);
    }
    for z in &inside {
        let scale = C::new(1.0, 0.0) - z;
        poly = conv_c(&poly, &[-z / scale, C::new(1.0, 0.0) / scale]);
    }
    let h: Vec<f64> = poly.iter().map(|c| c.re * std::f64::consts::SQRT_2).collect();
    debug_assert_eq!(h.len(), 2 * k);
    h
}

/// Scaling function and wavelet sampled on a dyadic grid via the cascade
/// algorithm.
#[derive(Debug, Clone)]
pub struct ScalingPair {
    /// Vanishing moments.
    pub k: usize,
    /// Low-pass filter (2k taps).
    pub h: Vec<f64>,
    /// High-pass filter, `g_n = (-1)^n h_{2k-1-n}`.
    pub g: Vec<f64>,
    /// Table resolution: values at spacing 2^-levels over [0, 2k-1].
    pub levels: u32,
    phi_table: Vec<f64>,
    psi_table: Vec<f64>,
}

impl ScalingPair {
    /// Support of both functions is `[0, 2k-1]`.
    pub fn support_width(&self) -> f64 {
        (2 * self.k - 1) as f64
    }

    pub fn new(k: usize, levels: u32) -> Self {
        let h = daubechies_filter(k);
        let n_taps = 2 * k;
        let g: Vec<f64> = (0..n_taps)
            .map(|n| {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                s * h[n_taps - 1 - n]
            })
            .collect();

        // phi at the integers: eigenvector of T[n][m] = sqrt(2) h[2n-m]
        // for eigenvalue 1, normalized to sum 1 (interior points only).
        let interior = n_taps - 2; // phi(0) = phi(2k-1) = 0
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut mat = nalgebra::DMatrix::<f64>::zeros(interior, interior);
        for n in 1..=interior {
            for m in 1..=interior {
                let idx = 2 * n as i64 - m as i64;
                if (0..n_taps as i64).contains(&idx) {
                    mat[(n - 1, m - 1)] = sqrt2 * h[idx as usize];
                }
            }
        }
        // solve (T - I) v = 0 with the normalization row sum(v) = 1
        let mut a = mat - nalgebra::DMatrix::<f64>::identity(interior, interior);
        let mut rhs = nalgebra::DVector::<f64>::zeros(interior);
        for m in 0..interior {
            a[(interior - 1, m)] = 1.0;
        }
        rhs[interior - 1] = 1.0;
        let v = a.lu().solve(&rhs).expect("integer values of phi");

        // cascade refinement to spacing 2^-levels
        let width = n_taps - 1;
        let mut step = 1.0f64;
        let mut table: Vec<f64> = std::iter::once(0.0)
            .chain(v.iter().copied())
            .chain(std::iter::once(0.0))
            .collect();
        for _ in 0..levels {
            step *= 0.5;
            let len = (width as f64 / step) as usize + 1;
            let mut next = vec![0.0; len];
            for (i, slot) in next.iter_mut().enumerate() {
                let x = i as f64 * step;
                if i % 2 == 0 {
                    *slot = table[i / 2];
                } else {
                    // phi(x) = sqrt(2) sum_k h_k phi(2x - k)
                    let mut s = 0.0;
                    for (kk, &hk) in h.iter().enumerate() {
                        let y = 2.0 * x - kk as f64;
                        if y >= 0.0 && y <= width as f64 {
                            let idx = (y / (2.0 * step)).round() as usize;
                            s += hk * table[idx];
                        }
                    }
                    *slot = sqrt2 * s;
                }
            }
            table = next;
        }
        let phi_table = table;

        // psi(x) = sqrt(2) sum_k g_k phi(2x - k); psi support [0, 2k-1]
        let step_f = 0.5f64.powi(levels as i32);
        let len = (width as f64 / step_f) as usize + 1;
        let mut psi_table = vec![0.0; len];
        for (i, slot) in psi_table.iter_mut().enumerate() {
            let x = i as f64 * step_f;
            let mut s = 0.0;
            for (kk, &gk) in g.iter().enumerate() {
                let y = 2.0 * x - kk as f64;
                if y >= 0.0 && y <= width as f64 {
                    let pos = y / step_f;
                    let idx = pos.round() as usize;
                    // 2x - k is on the half-step grid of the table
                    if (pos - idx as f64).abs() < 1e-9 {
                        s += gk * phi_table[idx];
                    } else {
                        let lo = pos.floor() as usize;
                        let w = pos - lo as f64;
                        s += gk * ((1.0 - w) * phi_table[lo] + w * phi_table[lo + 1]);
                    }
                }
            }
            *slot = sqrt2 * s;
        }

        ScalingPair {
            k,
            h,
            g,
            levels,
            phi_table,
            psi_table,
        }
    }

    fn table_value(table: &[f64], width: f64, step: f64, x: f64) -> f64 {
        if x <= 0.0 || x >= width {
            return 0.0;
        }
        let pos = x / step;
        let lo = pos.floor() as usize;
        let w = pos - lo as f64;
        if lo + 1 >= table.len() {
            return table[table.len() - 1] * (1.0 - w);
        }
        (1.0 - w) * table[lo] + w * table[lo + 1]
    }

    pub fn phi(&self, x: f64) -> f64 {
        let step = 0.5f64.powi(self.levels as i32);
        Self::table_value(&self.phi_table, self.support_width(), step, x)
    }

    pub fn psi(&self, x: f64) -> f64 {
        let step = 0.5f64.powi(self.levels as i32);
        Self::table_value(&self.psi_table, self.support_width(), step, x)
    }

    /// Quadrature inner product of two table-backed functions with integer
    /// shifts: `int f(x) g(x - shift) dx` at table resolution.
    pub fn shift_inner(&self, f_psi: bool, g_psi: bool, shift: f64, dilate_g: f64) -> f64 {
        let step = 0.5f64.powi(self.levels as i32);
        let width = self.support_width();
        let n = (width / step) as usize + 1;
        let fval = |x: f64| if f_psi { self.psi(x) } else { self.phi(x) };
        let gval = |x: f64| if g_psi { self.psi(x) } else { self.phi(x) };
        let mut s = 0.0;
        for i in 0..n {
            let x = i as f64 * step;
            s += fval(x) * gval(dilate_g * (x - shift)) * dilate_g.sqrt();
        }
        s * step
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_defining_identities() {
        for k in [2usize, 4, 6] {
            let h = daubechies_filter(k);
            assert_eq!(h.len(), 2 * k);
            // sum = sqrt(2)
            let sum: f64 = h.iter().sum();
            assert!(
                (sum - std::f64::consts::SQRT_2).abs() < 1e-12,
                "k={k}: sum {sum}"
            );
            // shift orthonormality: sum_n h_n h_{n+2m} = delta_m
            for m in 0..k {
                let mut s = 0.0;
                for n in 0..h.len() {
                    if n + 2 * m < h.len() {
                        s += h[n] * h[n + 2 * m];
                    }
                }
                let expect = if m == 0 { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12, "k={k} m={m}: {s}");
            }
            // vanishing moments of the high-pass filter:
            // sum_n g_n n^q = 0 for q < k
            let g: Vec<f64> = (0..2 * k)
                .map(|n| {
                    let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                    s * h[2 * k - 1 - n]
                })
                .collect();
            for q in 0..k {
                let s: f64 = g
                    .iter()
                    .enumerate()
                    .map(|(n, &gn)| gn * (n as f64).powi(q as i32))
                    .sum();
                assert!(s.abs() < 1e-9, "k={k} moment {q}: {s}");
            }
        }
    }

    #[test]
    fn cascade_satisfies_refinement_and_partition() {
        let sp = ScalingPair::new(6, 10);
        // partition of unity: sum_k phi(x - k) = 1
        for &x in &[0.3, 1.7, 2.25, 5.5] {
            let mut s = 0.0;
            for k in -12i32..12 {
                s += sp.phi(x - k as f64);
            }
            assert!((s - 1.0).abs() < 1e-7, "partition at {x}: {s}");
        }
        // two-scale relation at off-table points
        let sqrt2 = std::f64::consts::SQRT_2;
        for &x in &[0.777, 3.123, 7.5] {
            let direct = sp.phi(x);
            let mut s = 0.0;
            for (k, &hk) in sp.h.iter().enumerate() {
                s += hk * sp.phi(2.0 * x - k as f64);
            }
            assert!((direct - sqrt2 * s).abs() < 1e-5, "refinement at {x}");
        }
    }

    #[test]
    fn phi_psi_orthonormality_1d() {
        let sp = ScalingPair::new(6, 12);
        // same level: <phi, phi(.-m)> = delta, <psi, psi(.-m)> = delta,
        // <phi, psi(.-m)> = 0
        for m in 0..4i32 {
            let pp = sp.shift_inner(false, false, m as f64, 1.0);
            let ww = sp.shift_inner(true, true, m as f64, 1.0);
            let pw = sp.shift_inner(false, true, m as f64, 1.0);
            let d = if m == 0 { 1.0 } else { 0.0 };
            assert!((pp - d).abs() < 1e-6, "phi-phi m={m}: {pp}");
            assert!((ww - d).abs() < 1e-6, "psi-psi m={m}: {ww}");
            assert!(pw.abs() < 1e-6, "phi-psi m={m}: {pw}");
        }
        // across adjacent levels: <psi, sqrt(2) psi(2(. - m))> = 0
        for m in 0..3i32 {
            let v = sp.shift_inner(true, true, m as f64, 2.0);
            assert!(v.abs() < 1e-6, "psi level-cross m={m}: {v}");
        }
    }
}
