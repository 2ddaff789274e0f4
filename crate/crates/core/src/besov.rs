//! Lambda-adic Littlewood-Paley decomposition and critical Besov seminorm
//! estimation.
//!
//! The family is built from a concrete smooth radial cutoff `chi` equal to
//! 1 on the ball of radius `1/lambda` and supported in the unit ball;
//! `phi_j(xi) = chi(lambda^(-j-1) xi) - chi(lambda^(-j) xi)` is supported
//! in the shell `lambda^(j-1) <= |xi| <= lambda^(j+1)` and the family
//! telescopes to a partition of unity away from the origin.

use crate::dssfield::FourierEval;
use crate::error::{DssError, Result};
use crate::field::{C64, SpectralField};
use crate::grid::BoxGrid;
use crate::norms::lebesgue_norm;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// C-infinity step: 1 for t <= 0, 0 for t >= 1, built from exp(-1/x).
pub fn smooth_step(t: f64) -> f64 {
    fn g(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = g(1.0 - t);
        a / (a + g(t))
    }
}

/// Lambda-adic Littlewood-Paley family.
#[derive(Debug, Clone, Copy)]
pub struct LPFamily {
    pub lambda: f64,
}

impl LPFamily {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda <= 1.0 {
            return Err(DssError::InvalidArgument(format!(
                "LP family requires lambda > 1, got {lambda}"
            )));
        }
        Ok(LPFamily { lambda })
    }

    /// Radial cutoff: 1 on `B_{1/lambda}`, supported in `B_1`.
    pub fn chi(&self, r: f64) -> f64 {
        let inv = 1.0 / self.lambda;
        smooth_step((r - inv) / (1.0 - inv))
    }

    /// Shell multiplier `phi_j(r)`, supported in
    /// `[lambda^(j-1), lambda^(j+1)]`.
    pub fn phi_j(&self, j: i32, r: f64) -> f64 {
        self.chi(r * self.lambda.powi(-j - 1)) - self.chi(r * self.lambda.powi(-j))
    }

    /// `tilde phi = phi_{-1} + phi_0 + phi_1`, identically 1 on the support
    /// of `phi_0`.
    pub fn tilde_phi(&self, r: f64) -> f64 {
        self.phi_j(-1, r) + self.phi_j(0, r) + self.phi_j(1, r)
    }

    /// Blocks whose support intersects the grid's positive wavenumber band;
    /// outside this range a block is identically zero on the grid.
    pub fn supported_range(&self, grid: &BoxGrid) -> (i32, i32) {
        let r_min = grid.dk();
        let r_max = 3.0f64.sqrt() * grid.max_wavenumber();
        let ll = self.lambda.ln();
        let j_min = (r_min.ln() / ll - 1.0).ceil() as i32;
        let j_max = (r_max.ln() / ll + 1.0).floor() as i32;
        (j_min, j_max)
    }

    /// Truncation-honest range for seminorm sups: block support inside
    /// `[dk, (2/3) k_max]`.
    pub fn trusted_range(&self, grid: &BoxGrid) -> (i32, i32) {
        let ll = self.lambda.ln();
        let j_min = (grid.dk().ln() / ll + 1.0).ceil() as i32;
        let j_max = ((2.0 / 3.0 * grid.max_wavenumber()).ln() / ll - 1.0).floor() as i32;
        (j_min, j_max)
    }
}

/// One Littlewood-Paley block of a grid field; zero for out-of-range j.
pub fn lp_block(f: &SpectralField, j: i32, family: &LPFamily) -> SpectralField {
    let (j_min, j_max) = family.supported_range(&f.grid);
    if j < j_min || j > j_max {
        return SpectralField::zeros(f.grid, f.ncomp());
    }
    let fam = *family;
    f.multiply(move |k| {
        let r = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        C64::new(fam.phi_j(j, r), 0.0)
    })
}

/// Full decomposition over the supported range.
pub struct LPDecomposition {
    pub family: LPFamily,
    pub blocks: BTreeMap<i32, SpectralField>,
}

impl LPDecomposition {
    pub fn decompose(f: &SpectralField, family: &LPFamily) -> Self {
        let (j_min, j_max) = family.supported_range(&f.grid);
        let blocks = (j_min..=j_max)
            .map(|j| (j, lp_block(f, j, family)))
            .collect();
        LPDecomposition {
            family: *family,
            blocks,
        }
    }

    pub fn reconstruct(&self, grid: BoxGrid, ncomp: usize) -> SpectralField {
        let mut out = SpectralField::zeros(grid, ncomp);
        for b in self.blocks.values() {
            out.add_assign_scaled(b, 1.0);
        }
        out
    }
}

/// Besov seminorm measurement; the achieving block index is reported so
/// truncation-dominated answers are detectable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BesovReport {
    pub p: f64,
    pub lambda: f64,
    pub seminorm: f64,
    pub achieving_j: i32,
    pub per_block_norms: BTreeMap<i32, f64>,
}

/// `sup_j lambda^((3/p-1) j) || block_j f ||_Lp` over the trusted range.
pub fn besov_seminorm(f: &SpectralField, p: f64, family: &LPFamily) -> Result<BesovReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(DssError::InvalidArgument(format!(
            "besov_seminorm requires p in (1, inf), got {p}"
        )));
    }
    let sigma = 3.0 / p - 1.0;
    let (j_min, j_max) = family.trusted_range(&f.grid);
    let mut per_block_norms = BTreeMap::new();
    let mut best = 0.0f64;
    let mut best_j = j_min;
    for j in j_min..=j_max {
        let block = lp_block(f, j, family);
        let val = family.lambda.powf(sigma * j as f64) * lebesgue_norm(&block, p);
        per_block_norms.insert(j, val);
        if val > best {
            best = val;
            best_j = j;
        }
    }
    Ok(BesovReport {
        p,
        lambda: family.lambda,
        seminorm: best,
        achieving_j: best_j,
        per_block_norms,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub ratio: f64,
    pub lambda_adic: BesovReport,
    pub dyadic: BesovReport,
}

/// Ratio of the lambda-adic seminorm to the dyadic one; the empirical
/// equivalence constant for this field.
pub fn norm_equivalence_check(f: &SpectralField, lambda: f64, p: f64) -> Result<EquivalenceReport> {
    let lam = besov_seminorm(f, p, &LPFamily::new(lambda)?)?;
    let dy = besov_seminorm(f, p, &LPFamily::new(2.0)?)?;
    if dy.seminorm == 0.0 || lam.seminorm == 0.0 {
        return Err(DssError::DegenerateInput(
            "norm equivalence ratio undefined for the zero field".into(),
        ));
    }
    Ok(EquivalenceReport {
        ratio: lam.seminorm / dy.seminorm,
        lambda_adic: lam,
        dyadic: dy,
    })
}

/// Relative L2 residual (over grid wavevectors) of the DSS block relation
/// `block_j f(x) = lambda^(j-i) block_i f(lambda^(j-i) x)`, evaluated
/// spectrally: the right side has coefficients
/// `lambda^(-2m) phi_i(lambda^(-m) xi) fhat(lambda^(-m) xi)`, `m = j - i`.
pub fn dss_block_check(
    f: &dyn FourierEval,
    grid: BoxGrid,
    lambda: f64,
    i: i32,
    j: i32,
) -> Result<f64> {
    let family = LPFamily::new(lambda)?;
    let (j_min, j_max) = family.supported_range(&grid);
    for b in [i, j] {
        if b < j_min || b > j_max {
            return Err(DssError::ResolutionLimit(format!(
                "block {b} outside the resolvable range [{j_min}, {j_max}]"
            )));
        }
    }
    let m = j - i;
    let scale = lambda.powi(-m);
    let amp = lambda.powi(-2 * m);
    let n = grid.resolution;
    let ny = n / 2;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for ii in 0..n {
        for jj in 0..n {
            for kk in 0..n {
                if ii == ny || jj == ny || kk == ny {
                    continue;
                }
                let xi = grid.wavevector([ii, jj, kk]);
                let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                if r == 0.0 {
                    continue;
                }
                let w_l = family.phi_j(j, r);
                let w_r = family.phi_j(i, scale * r);
                if w_l == 0.0 && w_r == 0.0 {
                    continue;
                }
                let fv = f.eval(xi);
                let xs = [scale * xi[0], scale * xi[1], scale * xi[2]];
                let fs = f.eval(xs);
                for c in 0..f.ncomp() {
                    let lhs = fv[c] * w_l;
                    let rhs = fs[c] * (w_r * amp);
                    num += (lhs - rhs).norm_sqr();
                    den += lhs.norm_sqr();
                }
            }
        }
    }
    if den == 0.0 {
        return Err(DssError::DegenerateInput(
            "block j vanishes on the grid; residual undefined".into(),
        ));
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dssfield::{DSSField, FnField, ShellGrid};
    use crate::field::random_smooth;

    fn grid() -> BoxGrid {
        BoxGrid::new(16.0, 32).unwrap()
    }

    #[test]
    fn smooth_step_endpoints() {
        assert_eq!(smooth_step(-1.0), 1.0);
        assert_eq!(smooth_step(0.0), 1.0);
        assert_eq!(smooth_step(1.0), 0.0);
        assert_eq!(smooth_step(2.0), 0.0);
        let mid = smooth_step(0.5);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn partition_of_unity_on_grid() {
        let g = grid();
        for lambda in [2.0, 3.0, 1.5] {
            let fam = LPFamily::new(lambda).unwrap();
            let (j_min, j_max) = fam.supported_range(&g);
            let n = g.resolution;
            let mut max_dev: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let kv = g.wavevector([i, j, k]);
                        let r = (kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]).sqrt();
                        if r == 0.0 {
                            continue;
                        }
                        let s: f64 = (j_min..=j_max).map(|jj| fam.phi_j(jj, r)).sum();
                        max_dev = max_dev.max((s - 1.0).abs());
                    }
                }
            }
            assert!(max_dev < 1e-10, "lambda={lambda}: partition dev {max_dev}");
        }
    }

    #[test]
    fn block_support_is_the_shell() {
        let fam = LPFamily::new(2.0).unwrap();
        for j in [-1i32, 0, 2] {
            let lo = fam.lambda.powi(j - 1);
            let hi = fam.lambda.powi(j + 1);
            assert_eq!(fam.phi_j(j, lo * 0.99), 0.0);
            assert_eq!(fam.phi_j(j, hi * 1.01), 0.0);
            assert!(fam.phi_j(j, fam.lambda.powi(j)) > 0.9);
        }
    }

    #[test]
    fn single_mode_blocks_partition_the_mode() {
        let g = grid();
        let fam = LPFamily::new(2.0).unwrap();
        let f = SpectralField::real_mode(g, 1, [3, 2, 1], &[C64::new(1.0, 0.0)]);
        let kv = g.wavevector([3, 2, 1]);
        let r = (kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]).sqrt();
        let (j_min, j_max) = fam.supported_range(&g);
        let mut total = 0.0;
        for j in j_min..=j_max {
            let b = lp_block(&f, j, &fam);
            let w = b.comp(0)[(3, 2, 1)].re / f.comp(0)[(3, 2, 1)].re;
            assert!((w - fam.phi_j(j, r)).abs() < 1e-14);
            total += w;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_gives_zero_blocks_and_seminorm() {
        let g = grid();
        let fam = LPFamily::new(2.0).unwrap();
        let f = SpectralField::zeros(g, 1);
        assert_eq!(lp_block(&f, 0, &fam).l2_norm(), 0.0);
        let rep = besov_seminorm(&f, 4.0, &fam).unwrap();
        assert_eq!(rep.seminorm, 0.0);
    }

    #[test]
    fn reconstruction_of_mean_free_field() {
        let g = grid();
        for lambda in [2.0, 3.0] {
            let fam = LPFamily::new(lambda).unwrap();
            let mut f = random_smooth(g, 1, 4, 19);
            f.comp_mut(0)[(0, 0, 0)] = C64::new(0.0, 0.0);
            let dec = LPDecomposition::decompose(&f, &fam);
            let rec = dec.reconstruct(g, 1);
            let rel = rec.sub(&f).l2_norm() / f.l2_norm();
            assert!(rel < 1e-9, "lambda={lambda}: reconstruction {rel}");
        }
    }

    #[test]
    fn besov_seminorm_is_homogeneous() {
        let g = grid();
        let fam = LPFamily::new(2.0).unwrap();
        let f = random_smooth(g, 1, 4, 23);
        let r1 = besov_seminorm(&f, 4.0, &fam).unwrap();
        let r2 = besov_seminorm(&f.scaled(-2.5), 4.0, &fam).unwrap();
        assert!((r2.seminorm - 2.5 * r1.seminorm).abs() <= 1e-12 * r2.seminorm);
        assert_eq!(r1.achieving_j, r2.achieving_j);
    }

    #[test]
    fn single_mode_seminorm_matches_direct_block_evaluation() {
        let g = grid();
        let fam = LPFamily::new(2.0).unwrap();
        let f = SpectralField::real_mode(g, 1, [5, 0, 0], &[C64::new(0.5, 0.0)]);
        let p = 4.0;
        let rep = besov_seminorm(&f, p, &fam).unwrap();
        // oracle: each block is the mode scaled by phi_j(|k|); its Lp norm
        // is phi_j(|k|) times the mode's Lp norm
        let kv = g.wavevector([5, 0, 0]);
        let r = kv[0].abs();
        let base = lebesgue_norm(&f, p);
        let (j_min, j_max) = fam.trusted_range(&g);
        let mut expect = 0.0f64;
        for j in j_min..=j_max {
            let v = fam.lambda.powf((3.0 / p - 1.0) * j as f64) * fam.phi_j(j, r) * base;
            expect = expect.max(v);
        }
        assert!((rep.seminorm - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn equivalence_ratio_is_one_for_dyadic() {
        let g = grid();
        let f = random_smooth(g, 1, 4, 29);
        let rep = norm_equivalence_check(&f, 2.0, 4.0).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-14);
        let zero = SpectralField::zeros(g, 1);
        assert!(norm_equivalence_check(&zero, 3.0, 4.0).is_err());
    }

    #[test]
    fn dss_block_check_passes_for_shell_fields_and_fails_for_non_dss() {
        let g = grid();
        let dss = DSSField::shell_bump(2.0, ShellGrid::default(), 11, 0.4);
        let res = dss_block_check(&dss, g, 2.0, 0, 1).unwrap();
        assert!(res < 1e-10, "DSS residual {res}");
        let res_same = dss_block_check(&dss, g, 2.0, 1, 1).unwrap();
        assert_eq!(res_same, 0.0);

        // negative control: a radial Gaussian shell is not DSS
        let not_dss = FnField {
            ncomp: 1,
            f: |xi: [f64; 3]| {
                let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                vec![C64::new((-(r - 1.5) * (r - 1.5) / 0.2).exp(), 0.0)]
            },
        };
        let res = dss_block_check(&not_dss, g, 2.0, 0, 1).unwrap();
        assert!(res > 0.3, "non-DSS residual should be O(1), got {res}");
    }

    #[test]
    fn dss_block_check_rejects_unresolvable_scales() {
        let g = grid();
        let dss = DSSField::shell_bump(2.0, ShellGrid::default(), 11, 0.4);
        assert!(dss_block_check(&dss, g, 2.0, 0, 40).is_err());
    }

    #[test]
    fn bernstein_ratio_stable_across_blocks() {
        // || block_j f ||_inf <= C lambda^(3j/p) || block_j f ||_p with C
        // stable across j for a fixed family and a scale-uniform field
        let g = grid();
        let fam = LPFamily::new(2.0).unwrap();
        let p = 4.0;
        let dss = DSSField::shell_bump(2.0, ShellGrid::default(), 31, 0.2);
        let f = dss.project_to_grid(g);
        let (j_min, j_max) = fam.trusted_range(&g);
        let mut ratios = Vec::new();
        for j in j_min..=j_max {
            let b = lp_block(&f, j, &fam);
            let sup = lebesgue_norm(&b, f64::INFINITY);
            let lp = lebesgue_norm(&b, p);
            if lp > 1e-12 {
                ratios.push(sup / (fam.lambda.powf(3.0 * j as f64 / p) * lp));
            }
        }
        assert!(ratios.len() >= 2, "need at least two resolvable blocks");
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.5, "Bernstein constant drift: {ratios:?}");
    }

    #[test]
    fn dss_projection_has_j_independent_weighted_blocks() {
        let g = grid();
        let fam = LPFamily::new(2.0).unwrap();
        let p = 4.0;
        let dss = DSSField::shell_bump(2.0, ShellGrid::default(), 37, 0.3);
        let f = dss.project_to_grid(g);
        let rep = besov_seminorm(&f, p, &fam).unwrap();
        let vals: Vec<f64> = rep.per_block_norms.values().cloned().collect();
        assert!(vals.len() >= 2);
        for w in vals.windows(2) {
            let rel = (w[0] - w[1]).abs() / w[1];
            assert!(rel < 0.05, "weighted block norms not j-independent: {vals:?}");
        }
    }
}
