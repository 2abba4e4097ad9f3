//! Sub-channel reliability estimation.
//!
//! All estimators return one score per position in natural order, larger
//! meaning more reliable. Index bit `n-1` (MSB) corresponds to the first
//! polarization step on the channel side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionMethod {
    /// BEC Bhattacharyya recursion, design parameter is the erasure probability.
    Bhattacharyya,
    /// Gaussian approximation of density evolution, design parameter is Es/N0 in dB.
    GaussianApprox,
    /// Externally supplied reliability order (least reliable first).
    ExternalSequence,
}

impl ConstructionMethod {
    pub fn name(self) -> &'static str {
        match self {
            ConstructionMethod::Bhattacharyya => "bhattacharyya",
            ConstructionMethod::GaussianApprox => "gaussian_approx",
            ConstructionMethod::ExternalSequence => "external_sequence",
        }
    }
}

impl std::str::FromStr for ConstructionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bhattacharyya" => Ok(ConstructionMethod::Bhattacharyya),
            "gaussian_approx" | "ga" => Ok(ConstructionMethod::GaussianApprox),
            "external_sequence" | "external" => Ok(ConstructionMethod::ExternalSequence),
            other => Err(Error::invalid("method", format!("unknown method `{other}`"))),
        }
    }
}

/// Bhattacharyya parameters `z_i` for every position (smaller is better).
pub fn bhattacharyya(len: usize, erasure: f64) -> Vec<f64> {
    let mut z = vec![erasure];
    while z.len() < len {
        z = z
            .iter()
            .flat_map(|&v| [2.0 * v - v * v, v * v])
            .collect();
    }
    z
}

/// Log-odds reliability `ln((1-z)/z)` of the BEC recursion.
///
/// Both `ln z` and `ln(1-z)` are tracked so that neither end of the
/// spectrum collapses to exactly 0 or 1 for long codes.
pub fn bhattacharyya_log_odds(len: usize, erasure: f64) -> Vec<f64> {
    // (ln z, ln(1-z))
    let mut state = vec![(erasure.ln(), (1.0 - erasure).ln())];
    while state.len() < len {
        state = state
            .iter()
            .flat_map(|&(lz, lc)| {
                // z- = 1-(1-z)^2 = z(2-z), 1-z- = (1-z)^2
                let minus = (lz + lc.exp().ln_1p(), 2.0 * lc);
                // z+ = z^2, 1-z+ = (1-z)(1+z)
                let plus = (2.0 * lz, lc + lz.exp().ln_1p());
                [minus, plus]
            })
            .collect();
    }
    state.into_iter().map(|(lz, lc)| lc - lz).collect()
}

/// `ln φ(x)` for the Chung approximation of the Gaussian-approximation φ.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Solves `ln φ(x) = target` for `x ∈ [0, hi]` by bisection.
fn inv_ln_phi(target: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, hi.max(1e-12));
    // ln φ is decreasing; make sure the bracket covers the target.
    while ln_phi(hi) > target {
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

/// Mean LLR of every sub-channel under the Gaussian approximation.
pub fn gaussian_approx(len: usize, design_snr_db: f64) -> Vec<f64> {
    let snr = 10f64.powf(design_snr_db / 10.0);
    let mut m = vec![4.0 * snr];
    while m.len() < len {
        m = m
            .iter()
            .flat_map(|&v| {
                // φ(m-) = 1-(1-φ(m))^2 = φ(2-φ)
                let lp = ln_phi(v);
                let target = lp + (2.0 - lp.exp()).ln();
                [inv_ln_phi(target, v), 2.0 * v]
            })
            .collect();
    }
    m
}

/// Scores from an external order, least reliable first. Indices `>= len`
/// are dropped so a longer master sequence can be reused.
pub fn from_sequence(len: usize, sequence: &[usize]) -> Result<Vec<f64>> {
    let mut score = vec![f64::NAN; len];
    let mut rank = 0usize;
    for &idx in sequence.iter().filter(|&&i| i < len) {
        if !score[idx].is_nan() {
            return Err(Error::invalid(
                "sequence",
                format!("index {idx} appears twice"),
            ));
        }
        score[idx] = rank as f64;
        rank += 1;
    }
    if rank != len {
        return Err(Error::invalid(
            "sequence",
            format!("covers {rank} of {len} positions"),
        ));
    }
    Ok(score)
}

/// Positions sorted from least to most reliable; equal scores put the lower
/// index first so it is frozen first.
pub fn reliability_order(reliability: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..reliability.len()).collect();
    order.sort_by(|&a, &b| {
        reliability[a]
            .total_cmp(&reliability[b])
            .then(a.cmp(&b))
    });
    order
}
