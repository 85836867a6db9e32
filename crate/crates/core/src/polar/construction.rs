//! Reliability ordering of the synthetic bit channels.
//!
//! Index `i` of a length-`2^n` code is reached from the root of the SC tree
//! by reading its bits from the most significant one down: a `0` selects the
//! check-node ("minus") combination, a `1` the variable-node ("plus") one.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::log2_exact;
use crate::{Error, Result};

/// How the reliability order is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Bhattacharyya,
    GaussianApproximation,
    FromFile(PathBuf),
}

/// Returns `0..len` sorted from least to most reliable.
///
/// `rate` enters the design noise variance through `Es/N0 = rate * Eb/N0`.
/// Equal metrics keep the lower index first.
pub fn construct_reliability(
    len: usize,
    design_ebn0_db: f64,
    rate: f64,
    method: &Construction,
) -> Result<Vec<usize>> {
    log2_exact(len)?;
    if let Construction::FromFile(path) = method {
        return read_reliability_file(path, len);
    }
    if !design_ebn0_db.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "design Eb/N0 must be finite, got {design_ebn0_db}"
        )));
    }
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "design rate must lie in (0, 1], got {rate}"
        )));
    }
    // larger is more reliable for both metrics
    let metric: Vec<f64> = match method {
        Construction::Bhattacharyya => bhattacharyya_log_z(len, design_ebn0_db, rate)?
            .into_iter()
            .map(|lz| -lz)
            .collect(),
        Construction::GaussianApproximation => {
            gaussian_approximation_means(len, design_ebn0_db, rate)?
        }
        Construction::FromFile(_) => unreachable!(),
    };
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| metric[a].total_cmp(&metric[b]));
    Ok(order)
}

fn es_n0(design_ebn0_db: f64, rate: f64) -> f64 {
    rate * 10f64.powf(design_ebn0_db / 10.0)
}

/// Natural logarithm of the Bhattacharyya parameter of every bit channel.
///
/// Works in the log domain: `Z^2` for the plus channel and `2Z - Z^2` for
/// the minus channel would otherwise underflow for `N` in the hundreds.
pub fn bhattacharyya_log_z(len: usize, design_ebn0_db: f64, rate: f64) -> Result<Vec<f64>> {
    let n = log2_exact(len)?;
    let ln_z0 = -es_n0(design_ebn0_db, rate);
    Ok((0..len)
        .map(|i| {
            (0..n).rev().fold(ln_z0, |ln_z, level| {
                if (i >> level) & 1 == 1 {
                    2.0 * ln_z
                } else {
                    ln_z + (-ln_z.exp_m1()).ln_1p()
                }
            })
        })
        .collect())
}

/// Mean LLR of every bit channel under the Gaussian approximation of
/// density evolution, starting from `2/sigma^2` at the channel.
pub fn gaussian_approximation_means(
    len: usize,
    design_ebn0_db: f64,
    rate: f64,
) -> Result<Vec<f64>> {
    let n = log2_exact(len)?;
    let m0 = 4.0 * es_n0(design_ebn0_db, rate);
    Ok((0..len)
        .map(|i| {
            (0..n).rev().fold(m0, |m, level| {
                if (i >> level) & 1 == 1 {
                    2.0 * m
                } else {
                    check_node_mean(m)
                }
            })
        })
        .collect())
}

/// `phi^-1(1 - (1 - phi(m))^2)`, evaluated through `ln phi`.
fn check_node_mean(m: f64) -> f64 {
    let ln_phi = ln_phi(m);
    // 1 - (1 - a)^2 = a (2 - a)
    let target = ln_phi + (-ln_phi.exp_m1()).ln_1p();
    inverse_ln_phi(target)
}

/// Logarithm of Chung's two-piece approximation of the `phi` function.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        (-0.4527 * x.powf(0.86) + 0.0218).min(0.0)
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

fn inverse_ln_phi(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Parses a reliability file: one decimal index per line, least reliable
/// first. Blank lines are ignored.
pub fn parse_reliability(text: &str, len: usize) -> Result<Vec<usize>> {
    let order = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(line, l)| {
            l.parse::<usize>().map_err(|e| {
                Error::InvalidReliability(format!("entry {}: {l:?}: {e}", line + 1))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    validate_permutation(&order, len)?;
    Ok(order)
}

pub fn read_reliability_file(path: &Path, len: usize) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_reliability(&text, len)
}

pub(crate) fn validate_permutation(order: &[usize], len: usize) -> Result<()> {
    if order.len() != len {
        return Err(Error::InvalidReliability(format!(
            "expected {len} indices, found {}",
            order.len()
        )));
    }
    let mut seen = vec![false; len];
    for &i in order {
        if i >= len || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidReliability(format!(
                "index {i} out of range or repeated"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bhattacharyya parameters by the doubling recursion: every channel of
    /// the previous level spawns its minus then its plus child, so the first
    /// transformation lands on the most significant index bit.
    fn doubling_oracle(len: usize, ebn0_db: f64, rate: f64) -> Vec<f64> {
        let mut z = vec![(-rate * 10f64.powf(ebn0_db / 10.0)).exp()];
        while z.len() < len {
            z = z.iter().flat_map(|&v| [2.0 * v - v * v, v * v]).collect();
        }
        z
    }

    #[test]
    fn two_channels_minus_is_worse() {
        for ebn0 in [-2.0, 0.0, 5.0] {
            let order =
                construct_reliability(2, ebn0, 0.5, &Construction::Bhattacharyya).unwrap();
            assert_eq!(order, vec![0, 1]);
        }
    }

    #[test]
    fn ga_length_eight_freezes_fig_one_set() {
        let order =
            construct_reliability(8, 2.0, 0.5, &Construction::GaussianApproximation).unwrap();
        let mut least: Vec<usize> = order[..4].to_vec();
        least.sort_unstable();
        assert_eq!(least, vec![0, 1, 2, 4]);
    }

    #[test]
    fn bhattacharyya_sixteen_matches_recursion_oracle() {
        let order = construct_reliability(16, 0.0, 0.5, &Construction::Bhattacharyya).unwrap();
        let z = doubling_oracle(16, 0.0, 0.5);
        let mut expected: Vec<usize> = (0..16).collect();
        expected.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
        assert_eq!(order, expected);
        // frozen from an offline evaluation of the same recursion
        assert_eq!(order, vec![0, 1, 2, 4, 8, 3, 5, 6, 9, 10, 12, 7, 11, 13, 14, 15]);
    }

    #[test]
    fn log_domain_agrees_with_direct_recursion() {
        let lz = bhattacharyya_log_z(64, 1.0, 0.5).unwrap();
        let z = doubling_oracle(64, 1.0, 0.5);
        for (a, b) in lz.iter().zip(&z) {
            assert!((a.exp() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ga_phi_inverse_round_trips() {
        for x in [0.1, 1.0, 5.0, 9.9, 10.5, 40.0, 800.0, 5000.0] {
            let back = inverse_ln_phi(ln_phi(x));
            assert!((back - x).abs() < 1e-6 * x.max(1.0), "{x} -> {back}");
        }
    }

    #[test]
    fn long_codes_stay_finite_and_bijective() {
        for method in [Construction::Bhattacharyya, Construction::GaussianApproximation] {
            let order = construct_reliability(1024, 2.0, 0.5, &method).unwrap();
            validate_permutation(&order, 1024).unwrap();
            assert_eq!(*order.last().unwrap(), 1023);
            assert_eq!(order[0], 0);
        }
        let m = gaussian_approximation_means(1024, 2.0, 0.5).unwrap();
        assert!(m.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(construct_reliability(12, 1.0, 0.5, &Construction::Bhattacharyya).is_err());
        assert!(construct_reliability(8, f64::NAN, 0.5, &Construction::Bhattacharyya).is_err());
        assert!(parse_reliability("0\n1\n1\n3\n", 4).is_err());
        assert!(parse_reliability("0\n1\n2\n", 4).is_err());
        assert!(parse_reliability("0\n1\nx\n3\n", 4).is_err());
        assert_eq!(parse_reliability("3\n0\n\n1\n2\n", 4).unwrap(), vec![3, 0, 1, 2]);
    }
}
