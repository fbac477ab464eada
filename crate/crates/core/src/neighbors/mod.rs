//! Exact k+1 nearest-neighbor search under the Euclidean metric.
//!
//! Two implementations share one contract: [`brute_knn`] scans every
//! training point, [`NeighborIndex`] prunes with a kd-tree. Both order
//! candidates by `(squared distance, training index)`, so ties go to the
//! lower index and the two return identical lists.

mod brute;
mod kdtree;

pub use brute::brute_knn;
pub use kdtree::NeighborIndex;

use std::cmp::Ordering;

/// The `k + 1` nearest training points of a query, closest first.
///
/// `distances[i]` is the true Euclidean distance to `indices[i]`; the last
/// entry is the normalizing radius used by the interpolated weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
    pub k: usize,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Distance to the (k+1)-th neighbor.
    pub fn radius(&self) -> f64 {
        self.distances[self.k]
    }

    /// Distances of the first `k` neighbors.
    pub fn inner_distances(&self) -> &[f64] {
        &self.distances[..self.k]
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Candidate ordered by squared distance, then training index.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub dist2: f64,
    pub index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2.total_cmp(&other.dist2).then(self.index.cmp(&other.index))
    }
}

pub(crate) fn into_list(mut cands: Vec<Candidate>, k: usize) -> NeighborList {
    cands.sort_unstable();
    let (indices, distances) = cands.into_iter().map(|c| (c.index, c.dist2.sqrt())).unzip();
    NeighborList { indices, distances, k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LabeledDataset, Task};

    fn line() -> LabeledDataset {
        let pts = (0..4).map(|i| vec![i as f64]).collect();
        LabeledDataset::new(pts, vec![0.0; 4], Task::Regression).unwrap()
    }

    #[test]
    fn collinear_hand_example() {
        let ds = line();
        let idx = NeighborIndex::build(&ds).unwrap();
        for nl in [brute_knn(&ds, &[0.9], 2).unwrap(), idx.knn_query(&[0.9], 2).unwrap()] {
            assert_eq!(nl.indices, vec![1, 0, 2]);
            let expected = [0.1, 0.9, 1.1];
            for (d, e) in nl.distances.iter().zip(expected) {
                assert!((d - e).abs() < 1e-12);
            }
            assert_eq!(nl.radius(), nl.distances[2]);
        }
    }

    #[test]
    fn query_on_training_point_has_zero_first_distance() {
        let ds = line();
        let idx = NeighborIndex::build(&ds).unwrap();
        let nl = idx.knn_query(&[2.0], 1).unwrap();
        assert_eq!(nl.indices[0], 2);
        assert_eq!(nl.distances[0], 0.0);
    }

    #[test]
    fn single_point_k_zero() {
        let ds = LabeledDataset::new(vec![vec![3.0, 4.0]], vec![1.0], Task::Regression).unwrap();
        let idx = NeighborIndex::build(&ds).unwrap();
        let nl = idx.knn_query(&[0.0, 0.0], 0).unwrap();
        assert_eq!(nl.indices, vec![0]);
        assert_eq!(nl.distances, vec![5.0]);
        assert_eq!(brute_knn(&ds, &[0.0, 0.0], 0).unwrap(), nl);
        assert!(matches!(idx.knn_query(&[0.0, 0.0], 1), Err(crate::Error::KTooLarge { .. })));
    }

    #[test]
    fn equidistant_tie_goes_to_lower_index() {
        let ds = LabeledDataset::new(vec![vec![1.0], vec![-1.0]], vec![0.0, 1.0], Task::Regression)
            .unwrap();
        let nl = brute_knn(&ds, &[0.0], 0).unwrap();
        assert_eq!(nl.indices, vec![0]);
        let ds = LabeledDataset::new(vec![vec![-1.0], vec![1.0]], vec![0.0, 1.0], Task::Regression)
            .unwrap();
        let nl = NeighborIndex::build(&ds).unwrap().knn_query(&[0.0], 1).unwrap();
        assert_eq!(nl.indices, vec![0, 1]);
    }

    #[test]
    fn duplicates_are_kept_as_distinct_indices() {
        let pts = vec![vec![1.0, 1.0]; 5];
        let ds = LabeledDataset::new(pts, vec![0.0; 5], Task::Regression).unwrap();
        let nl = NeighborIndex::build(&ds).unwrap().knn_query(&[1.0, 1.0], 4).unwrap();
        assert_eq!(nl.indices, vec![0, 1, 2, 3, 4]);
        assert!(nl.distances.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let ds = line();
        let idx = NeighborIndex::build(&ds).unwrap();
        assert!(matches!(
            idx.knn_query(&[0.0, 1.0], 1),
            Err(crate::Error::DimensionMismatch { expected: 1, found: 2 })
        ));
        assert!(matches!(
            brute_knn(&ds, &[0.0, 1.0], 1),
            Err(crate::Error::DimensionMismatch { .. })
        ));
    }
}
