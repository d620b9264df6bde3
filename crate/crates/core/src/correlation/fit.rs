use serde::Serialize;

use crate::error::{Error, Result};

/// Fewest nonzero blocks accepted by [`fit_decay_exponent`].
pub const MIN_FIT_BLOCKS: usize = 8;

/// Least-squares fit of `log |S_k|` against `k log φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// `1 - slope`.
    pub eta_hat: f64,
    /// Largest absolute deviation of a used point from the fitted line.
    pub residual: f64,
    pub used: usize,
    /// Block indices skipped because their sum was zero.
    pub zero_blocks: Vec<u32>,
}

pub fn fit_decay_exponent(blocks: &[(u32, f64)]) -> Result<DecayFit> {
    let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let zero_blocks: Vec<u32> = blocks.iter().filter(|b| b.1 == 0.0).map(|b| b.0).collect();
    let pts: Vec<(f64, f64)> = blocks
        .iter()
        .filter(|b| b.1 != 0.0)
        .map(|&(k, s)| (k as f64 * log_phi, s.abs().ln()))
        .collect();
    if pts.len() < MIN_FIT_BLOCKS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_BLOCKS,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        slope,
        intercept,
        eta_hat: 1.0 - slope,
        residual,
        used: pts.len(),
        zero_blocks,
    })
}
