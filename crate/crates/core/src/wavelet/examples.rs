//! The explicit example coefficient sets: a DSS field in one critical
//! Besov space but not a smaller one, a DSS field that is not locally
//! square integrable, and a DSS field with finite Carleson sum that lies
//! outside every critical Besov space with finite integrability index.

use super::{dss_extend_coeffs, Level0Rule, WaveletCoeffs};
use crate::error::{DssError, Result};
use std::collections::BTreeMap;

/// Default stored level range for the example generators.
pub const DEFAULT_J_RANGE: (i32, i32) = (-2, 6);

/// Strict-embedding example: level-0 coefficients `n^(-1/q)` along the
/// positive axis, DSS-extended. Finite p-seminorm for p > q, divergent
/// q-sum. Requires `3 < q < p`.
pub fn example_strict_embedding(
    p: f64,
    q: f64,
    n_max: usize,
    j_range: (i32, i32),
) -> Result<WaveletCoeffs> {
    if !(3.0 < q && q < p && p.is_finite()) {
        return Err(DssError::InvalidArgument(format!(
            "strict embedding example requires 3 < q < p < inf, got p={p}, q={q}"
        )));
    }
    let mut level0 = BTreeMap::new();
    for n in 1..=n_max {
        level0.insert(
            [n as i32, 0, 0],
            (n as f64).powf(-1.0 / q),
        );
    }
    let mut c = dss_extend_coeffs(7, &level0, j_range)?;
    c.rule = Some(Level0Rule::AxisPower { q });
    Ok(c)
}

/// Not-locally-L2 example: level-0 coefficients `|k|^-1` for `|k| >= 2`
/// (zero closer in), DSS-extended. The stored window keeps `|k| <= k_store`;
/// the attached rule lets diagnostics sum past the window.
pub fn example_not_l2loc(k_store: i32, j_range: (i32, i32)) -> Result<WaveletCoeffs> {
    let mut level0 = BTreeMap::new();
    for k1 in -k_store..=k_store {
        for k2 in -k_store..=k_store {
            for k3 in -k_store..=k_store {
                let r2 = (k1 * k1 + k2 * k2 + k3 * k3) as f64;
                if r2 >= 4.0 && r2 <= (k_store * k_store) as f64 {
                    level0.insert([k1, k2, k3], 1.0 / r2.sqrt());
                }
            }
        }
    }
    let mut c = dss_extend_coeffs(7, &level0, j_range)?;
    c.rule = Some(Level0Rule::InverseRadius);
    Ok(c)
}

/// The 8 translates at level `j >= 1` whose nominal cubes touch the point
/// `(3 2^(j-1), 0, 0)`.
pub fn cluster_set(j: i32) -> [[i32; 3]; 8] {
    assert!(j >= 1);
    let m = 3 * (1i32 << (j - 1));
    [
        [m, 0, 0],
        [m, -1, 0],
        [m, 0, -1],
        [m, -1, -1],
        [m - 1, 0, 0],
        [m - 1, -1, 0],
        [m - 1, 0, -1],
        [m - 1, -1, -1],
    ]
}

/// BMO^-1-but-not-Besov example: coefficients `2^(-(j-1)/2)` on the
/// translate clusters `A_j`, then the 2-DSS closure. The closure is the
/// level-0 rule `alpha_0(k) = sqrt(2)` on the union of the clusters, so the
/// recurring singular points appear at every scale.
pub fn example_bmo_not_besov(i_max: i32, j_range: (i32, i32)) -> Result<WaveletCoeffs> {
    if i_max < 1 {
        return Err(DssError::InvalidArgument(
            "cluster example needs at least one level".into(),
        ));
    }
    let mut level0 = BTreeMap::new();
    for i in 1..=i_max {
        for k in cluster_set(i) {
            level0.insert(k, std::f64::consts::SQRT_2);
        }
    }
    let mut c = dss_extend_coeffs(7, &level0, j_range)?;
    c.rule = Some(Level0Rule::AxisClusters);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_embedding_values_and_preconditions() {
        let c = example_strict_embedding(5.0, 4.0, 100, DEFAULT_J_RANGE).unwrap();
        // n = 1 coefficient is exactly 1
        assert_eq!(c.coefficient(0, [1, 0, 0]), 1.0);
        // n = 16 coefficient is 16^(-1/4) = 1/2
        assert!((c.coefficient(0, [16, 0, 0]) - 0.5).abs() < 1e-15);
        // law across levels
        assert!((c.coefficient(2, [1, 0, 0]) - 0.5).abs() < 1e-15);
        assert!(c.dss);
        assert_eq!(c.dss_law_residual(), 0.0);
        // parameter order violations
        assert!(example_strict_embedding(4.0, 5.0, 10, DEFAULT_J_RANGE).is_err());
        assert!(example_strict_embedding(5.0, 3.0, 10, DEFAULT_J_RANGE).is_err());
    }

    #[test]
    fn not_l2loc_values() {
        let c = example_not_l2loc(8, DEFAULT_J_RANGE).unwrap();
        assert!((c.coefficient(0, [2, 0, 0]) - 0.5).abs() < 1e-15);
        assert_eq!(c.coefficient(0, [1, 0, 0]), 0.0);
        assert_eq!(c.coefficient(0, [0, 0, 0]), 0.0);
        let r5 = [3, 4, 0];
        assert!((c.coefficient(0, r5) - 0.2).abs() < 1e-15);
        assert_eq!(c.dss_law_residual(), 0.0);
    }

    #[test]
    fn bmo_cluster_contents() {
        let a1 = cluster_set(1);
        assert!(a1.contains(&[3, 0, 0]));
        assert!(a1.contains(&[2, -1, -1]));
        for j in 1..=6 {
            assert_eq!(cluster_set(j).len(), 8);
            // all 8 distinct
            let mut v = cluster_set(j).to_vec();
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 8);
        }
        let c = example_bmo_not_besov(6, (0, 8)).unwrap();
        // alpha_(j,k) = 2^(-(j-1)/2) for k in A_j
        for j in 1..=6 {
            for k in cluster_set(j) {
                let expect = 2.0f64.powf(-0.5 * (j - 1) as f64);
                assert!(
                    (c.coefficient(j, k) - expect).abs() < 1e-14,
                    "j={j} k={k:?}"
                );
            }
        }
        assert_eq!(c.dss_law_residual(), 0.0);
    }
}
