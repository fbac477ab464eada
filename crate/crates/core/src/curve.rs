//! Scores for every `k = 1..=k_max` from a single neighbor query.
//!
//! For interpolated weights the normalizing radius cancels:
//! `Σ_{i<=k} R_i^{-γ} Y_i / Σ_{i<=k} R_i^{-γ}`, so one sorted neighbor list
//! yields all `k` through prefix sums. Terms are scaled by `R_1^{γ}` so
//! each lies in `(0, 1]` and nothing overflows.

use crate::neighbors::NeighborList;
use crate::weighting::{ownn_rank, WeightScheme};

/// One query's sorted neighbor distances (in log form) and labels.
#[derive(Debug, Clone)]
pub struct NeighborProfile {
    /// `ln R_i - ln R_1` for the first `k_max` neighbors; unused when `zeros > 0`.
    log_ratio: Vec<f64>,
    labels: Vec<f64>,
    /// Number of leading neighbors at distance zero.
    zeros: usize,
}

impl NeighborProfile {
    /// Profile over the first `nl.k` neighbors of `nl`; `labels` are the training labels.
    pub fn new(nl: &NeighborList, labels: &[f64]) -> Self {
        let k_max = nl.k;
        let dists = &nl.distances[..k_max];
        let zeros = dists.iter().take_while(|&&r| r == 0.0).count();
        let log_ratio = if zeros == 0 {
            let l1 = dists[0].ln();
            dists.iter().map(|r| r.ln() - l1).collect()
        } else {
            Vec::new()
        };
        let labels = nl.indices[..k_max].iter().map(|&i| labels[i]).collect();
        NeighborProfile { log_ratio, labels, zeros }
    }

    pub fn k_max(&self) -> usize {
        self.labels.len()
    }

    /// Writes the score for `k = j + 1` into `out[j]` for every `j < out.len()`.
    ///
    /// # Panics
    ///
    /// If `out` is longer than [`Self::k_max`].
    pub fn scores(&self, scheme: &WeightScheme, out: &mut [f64]) {
        assert!(out.len() <= self.k_max(), "profile holds only {} neighbors", self.k_max());
        match *scheme {
            WeightScheme::Uniform => self.prefix_mean(out),
            WeightScheme::Interpolated { gamma: 0.0 } => self.prefix_mean(out),
            WeightScheme::Interpolated { gamma } => {
                if self.zeros > 0 {
                    self.exact_match(out);
                } else {
                    self.weighted_prefix(gamma, out);
                }
            }
            WeightScheme::OwnnRank { d } => {
                for (j, slot) in out.iter_mut().enumerate() {
                    let w = ownn_rank(j + 1, d);
                    *slot = w.as_slice().iter().zip(&self.labels).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    fn prefix_mean(&self, out: &mut [f64]) {
        let mut s = 0.0;
        for (j, slot) in out.iter_mut().enumerate() {
            s += self.labels[j];
            *slot = s / (j + 1) as f64;
        }
    }

    fn exact_match(&self, out: &mut [f64]) {
        let mut s = 0.0;
        for (j, slot) in out.iter_mut().enumerate() {
            if j < self.zeros {
                s += self.labels[j];
                *slot = s / (j + 1) as f64;
            } else {
                *slot = s / self.zeros as f64;
            }
        }
    }

    fn weighted_prefix(&self, gamma: f64, out: &mut [f64]) {
        let (mut sw, mut swy) = (0.0, 0.0);
        for (j, slot) in out.iter_mut().enumerate() {
            let w = (-gamma * self.log_ratio[j]).exp();
            sw += w;
            swy += w * self.labels[j];
            *slot = swy / sw;
        }
    }
}

/// Index of the smallest value among `candidates` (0-based `k - 1`
/// positions); ties go to the earliest, i.e. the smaller `k`.
pub(crate) fn argmin_over(values: &[f64], candidates: &[usize]) -> usize {
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if values[c] < values[best] {
            best = c;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LabeledDataset, Task};
    use crate::estimator::FittedModel;
    use crate::neighbors::NeighborIndex;

    fn dataset() -> LabeledDataset {
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = i as f64;
                vec![(t * 1.7).sin() * 3.0, (t * 0.61).cos() * 2.0]
            })
            .collect();
        let ys = (0..40).map(|i| f64::from(i % 3 == 0)).collect();
        LabeledDataset::new(pts, ys, Task::Classification).unwrap()
    }

    #[test]
    fn curve_matches_per_k_predictions() {
        let ds = dataset();
        let idx = NeighborIndex::build(&ds).unwrap();
        let q = [0.3, -0.2];
        let k_max = 30;
        let prof = NeighborProfile::new(&idx.knn_query(&q, k_max).unwrap(), ds.labels());
        for scheme in [
            WeightScheme::Uniform,
            WeightScheme::Interpolated { gamma: 0.0 },
            WeightScheme::Interpolated { gamma: 0.7 },
            WeightScheme::Interpolated { gamma: 25.0 },
            WeightScheme::OwnnRank { d: 2 },
        ] {
            let mut out = vec![0.0; k_max];
            prof.scores(&scheme, &mut out);
            for k in 1..=k_max {
                let m = FittedModel::fit(ds.clone(), scheme, k).unwrap();
                let direct = m.score(&q).unwrap();
                assert!((out[k - 1] - direct).abs() < 1e-12, "{scheme:?} k={k}");
            }
        }
    }

    #[test]
    fn curve_handles_exact_matches() {
        let ds = dataset();
        let idx = NeighborIndex::build(&ds).unwrap();
        let q = ds.point(4).to_vec();
        let prof = NeighborProfile::new(&idx.knn_query(&q, 10).unwrap(), ds.labels());
        let mut out = vec![0.0; 10];
        prof.scores(&WeightScheme::Interpolated { gamma: 1.0 }, &mut out);
        assert!(out.iter().all(|&s| s == ds.label(4)));
    }

    #[test]
    fn argmin_prefers_smaller_k() {
        let v = [3.0, 1.0, 2.0, 1.0];
        assert_eq!(argmin_over(&v, &[0, 1, 2, 3]), 1);
        assert_eq!(argmin_over(&v, &[2, 3]), 3);
    }
}
