//! Neighbor weights for kNN, interpolated-NN and rank-based OWNN.
//!
//! Interpolated weights are `W_i ∝ (R_i / R_{k+1})^{-γ}`. They are computed
//! in log space so large `γ` or tiny ratios never overflow.

use serde::{Deserialize, Serialize};

use crate::neighbors::NeighborList;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScheme {
    /// Plain kNN: every neighbor gets `1/k`.
    Uniform,
    /// `W_i ∝ R_i^{-γ}`; `γ = 0` is kNN, `γ → ∞` is 1-NN.
    Interpolated { gamma: f64 },
    /// Optimal rank weights for dimension `d`.
    OwnnRank { d: usize },
}

impl WeightScheme {
    /// Interpolation level, `0` for the non-interpolating schemes.
    pub fn gamma(&self) -> f64 {
        match *self {
            WeightScheme::Interpolated { gamma } => gamma,
            _ => 0.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            WeightScheme::Uniform => true,
            WeightScheme::Interpolated { gamma } => gamma.is_finite() && gamma >= 0.0,
            WeightScheme::OwnnRank { d } => d >= 1,
        }
    }
}

/// Nonnegative weights over the first `k` neighbors, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Weights for the first `nl.k` neighbors of `nl`.
///
/// Under `Interpolated` with `γ > 0`, a neighbor at distance zero absorbs all
/// mass (shared equally with any other zero-distance neighbors). This also
/// covers `R_{k+1} = 0`, where all `k` neighbors coincide with the query.
///
/// # Panics
///
/// If `nl.k == 0` or the scheme is invalid.
pub fn compute_weights(scheme: &WeightScheme, nl: &NeighborList) -> WeightVector {
    let k = nl.k;
    assert!(k >= 1, "weights need at least one neighbor");
    assert!(scheme.is_valid(), "invalid weight scheme {scheme:?}");
    match *scheme {
        WeightScheme::Uniform => uniform(k),
        WeightScheme::Interpolated { gamma: 0.0 } => uniform(k),
        WeightScheme::Interpolated { gamma } => interpolated(gamma, nl.inner_distances(), nl.radius()),
        WeightScheme::OwnnRank { d } => ownn_rank(k, d),
    }
}

fn uniform(k: usize) -> WeightVector {
    WeightVector(vec![1.0 / k as f64; k])
}

fn interpolated(gamma: f64, dists: &[f64], radius: f64) -> WeightVector {
    let zeros = dists.iter().filter(|&&r| r == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        return WeightVector(dists.iter().map(|&r| if r == 0.0 { share } else { 0.0 }).collect());
    }
    let log_radius = radius.ln();
    let logits: Vec<f64> = dists.iter().map(|&r| -gamma * (r.ln() - log_radius)).collect();
    WeightVector(softmax(&logits))
}

/// `exp(x_i - logsumexp(x))`, renormalized so the entries sum to one.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Rank weights `w_i = (1/k)[1 + d/2 - d/(2 k^{2/d}) (i^{1+2/d} - (i-1)^{1+2/d})]`,
/// negative entries clipped to zero and the rest renormalized.
pub fn ownn_rank(k: usize, d: usize) -> WeightVector {
    let d = d as f64;
    let kf = k as f64;
    let p = 1.0 + 2.0 / d;
    let scale = d / (2.0 * kf.powf(2.0 / d));
    let raw: Vec<f64> = (1..=k)
        .map(|i| {
            let i = i as f64;
            ((1.0 + d / 2.0 - scale * (i.powf(p) - (i - 1.0).powf(p))) / kf).max(0.0)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    WeightVector(raw.into_iter().map(|w| w / total).collect())
}
