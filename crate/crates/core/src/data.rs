//! Domain types shared by every other module: points, labeled datasets and
//! reproducible random streams.

use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorReport, Result, Violation};

/// A finite point in R^d, d >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteValue(format!("coordinate {i}")));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Regression => "regression",
            Task::Classification => "classification",
        }
    }
}

/// Points with real-valued labels. Classification labels are stored as
/// `0.0` / `1.0` so regression and classification share one estimator path.
///
/// Coordinates are stored row-major in a single buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    dim: usize,
    coords: Vec<f64>,
    labels: Vec<f64>,
    task: Task,
}

/// Checks every dataset invariant and reports all violations with their index.
pub fn validate_dataset(
    points: &[Vec<f64>],
    labels: &[f64],
    task: Task,
) -> std::result::Result<(), ErrorReport> {
    let mut violations = Vec::new();
    if points.is_empty() || labels.is_empty() {
        violations.push(Violation::EmptyDataset);
    }
    if points.len() != labels.len() {
        violations.push(Violation::LengthMismatch { points: points.len(), labels: labels.len() });
    }
    let expected = points.first().map_or(0, Vec::len);
    for (index, p) in points.iter().enumerate() {
        if p.len() != expected || p.is_empty() {
            violations.push(Violation::DimensionMismatch { index, expected, found: p.len() });
            continue;
        }
        for (c, v) in p.iter().enumerate() {
            if !v.is_finite() {
                violations.push(Violation::NonFiniteValue { index, coord: Some(c) });
            }
        }
    }
    for (index, &y) in labels.iter().enumerate() {
        if !y.is_finite() {
            violations.push(Violation::NonFiniteValue { index, coord: None });
        } else if task == Task::Classification && y != 0.0 && y != 1.0 {
            violations.push(Violation::NonBinaryLabel { index, value: y });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ErrorReport { violations })
    }
}

impl LabeledDataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<f64>, task: Task) -> Result<Self> {
        validate_dataset(&points, &labels, task).map_err(Error::InvalidDataset)?;
        let dim = points[0].len();
        let coords = points.into_iter().flatten().collect();
        Ok(LabeledDataset { dim, coords, labels, task })
    }

    /// Builds a dataset from a row-major coordinate buffer of `labels.len() * dim` values.
    pub fn from_flat(dim: usize, coords: Vec<f64>, labels: Vec<f64>, task: Task) -> Result<Self> {
        if dim == 0 || labels.is_empty() {
            return Err(Error::InvalidDataset(ErrorReport {
                violations: vec![Violation::EmptyDataset],
            }));
        }
        if coords.len() != dim * labels.len() {
            return Err(Error::InvalidDataset(ErrorReport {
                violations: vec![Violation::LengthMismatch {
                    points: coords.len() / dim,
                    labels: labels.len(),
                }],
            }));
        }
        let ds = LabeledDataset { dim, coords, labels, task };
        ds.validate()?;
        Ok(ds)
    }

    /// Re-checks the invariants; always `Ok` for a dataset built through the constructors.
    pub fn validate(&self) -> Result<()> {
        let points: Vec<Vec<f64>> = self.points().map(<[f64]>::to_vec).collect();
        validate_dataset(&points, &self.labels, self.task).map_err(Error::InvalidDataset)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat_coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            coords.extend_from_slice(self.point(i));
            labels.push(self.labels[i]);
        }
        Ok(LabeledDataset { dim: self.dim, coords, labels, task: self.task })
    }

    /// Same points and labels under a different task tag.
    pub fn with_task(self, task: Task) -> Result<Self> {
        let ds = LabeledDataset { task, ..self };
        ds.validate()?;
        Ok(ds)
    }
}

/// Seed plus stream id for a ChaCha8 generator. Each `(seed, stream)` pair is
/// an independent, reproducible sequence, so parallel workers never share state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub const fn new(seed: u64, stream: u64) -> Self {
        RngSeed { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A child stream identified by `tag`. Distinct tags give distinct streams.
    pub fn substream(&self, tag: u64) -> RngSeed {
        RngSeed { seed: self.seed, stream: splitmix64(self.stream ^ splitmix64(tag.wrapping_add(1))) }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Number of training rows for a split: nearest integer, ties toward train.
pub fn train_size(n: usize, train_fraction: f64) -> usize {
    (n as f64 * train_fraction).round() as usize
}

/// Uniform random partition of `0..n` into sorted (train, test) index sets.
pub fn split_indices(n: usize, train_fraction: f64, seed: RngSeed) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::DegenerateSplit { n, fraction: train_fraction });
    }
    let n_train = train_size(n, train_fraction);
    if n_train == 0 || n_train >= n {
        return Err(Error::DegenerateSplit { n, fraction: train_fraction });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed.rng());
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split_train_test(
    ds: &LabeledDataset,
    train_fraction: f64,
    seed: RngSeed,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = split_indices(ds.len(), train_fraction, seed)?;
    Ok((ds.subset(&train)?, ds.subset(&test)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_classification_set_validates() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(validate_dataset(&pts, &[0.0, 1.0, 1.0], Task::Classification).is_ok());
    }

    #[test]
    fn mixed_dimensions_are_reported_at_index() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0, 2.0]];
        let err = validate_dataset(&pts, &[0.0, 1.0], Task::Regression).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::DimensionMismatch { index: 1, expected: 2, found: 3 }]
        );
    }

    #[test]
    fn fractional_classification_label_is_rejected() {
        let err = validate_dataset(&[vec![1.0]], &[0.5], Task::Classification).unwrap_err();
        assert_eq!(err.violations, vec![Violation::NonBinaryLabel { index: 0, value: 0.5 }]);
        assert!(validate_dataset(&[vec![1.0]], &[0.5], Task::Regression).is_ok());
    }

    #[test]
    fn every_violation_is_listed() {
        let pts = vec![vec![f64::NAN], vec![1.0], vec![1.0, 2.0]];
        let err = validate_dataset(&pts, &[0.0, 3.0, 1.0], Task::Classification).unwrap_err();
        assert_eq!(err.violations.len(), 3);
        assert!(validate_dataset(&[], &[], Task::Regression)
            .unwrap_err()
            .violations
            .contains(&Violation::EmptyDataset));
    }

    fn toy(n: usize) -> LabeledDataset {
        let pts = (0..n).map(|i| vec![i as f64]).collect();
        LabeledDataset::new(pts, (0..n).map(|i| i as f64).collect(), Task::Regression).unwrap()
    }

    #[test]
    fn quarter_split_sizes() {
        let (tr, te) = split_train_test(&toy(100), 0.25, RngSeed::new(1, 0)).unwrap();
        assert_eq!((tr.len(), te.len()), (25, 75));
    }

    #[test]
    fn split_is_deterministic() {
        let a = split_indices(4, 0.25, RngSeed::new(42, 3)).unwrap();
        let b = split_indices(4, 0.25, RngSeed::new(42, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_split() {
        assert!(matches!(
            split_train_test(&toy(2), 0.001, RngSeed::new(0, 0)),
            Err(Error::DegenerateSplit { .. })
        ));
        assert!(matches!(
            split_train_test(&toy(2), 0.999, RngSeed::new(0, 0)),
            Err(Error::DegenerateSplit { .. })
        ));
    }

    #[test]
    fn rounding_ties_go_to_train() {
        assert_eq!(train_size(10, 0.25), 3);
        assert_eq!(train_size(6, 0.25), 2);
    }

    #[test]
    fn substreams_differ() {
        use rand::Rng;
        let s = RngSeed::new(9, 0);
        let a: u64 = s.substream(0).rng().random();
        let b: u64 = s.substream(1).rng().random();
        let c: u64 = s.substream(0).rng().random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
