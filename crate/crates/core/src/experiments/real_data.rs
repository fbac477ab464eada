use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, Study};
use crate::curve::{argmin_over, NeighborProfile};
use crate::data::{split_indices, LabeledDataset, RngSeed, Task};
use crate::error::{Error, Result};
use crate::neighbors::NeighborIndex;
use crate::simgen::threshold;
use crate::stats::MeanStd;
use crate::weighting::WeightScheme;

const TAG_VALIDATION: u64 = 1;

/// Rows sorted lexicographically by coordinates, then label.
pub fn canonicalize(ds: &LabeledDataset) -> LabeledDataset {
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_by(|&a, &b| {
        ds.point(a)
            .iter()
            .zip(ds.point(b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ds.label(a).total_cmp(&ds.label(b)))
    });
    ds.subset(&order).expect("permutation of valid rows")
}

/// First eight bytes of the SHA-256 digest of the canonical row sequence.
pub fn content_hash(ds: &LabeledDataset) -> u64 {
    let canon = canonicalize(ds);
    let mut h = Sha256::new();
    h.update((canon.dim() as u64).to_le_bytes());
    for (p, y) in canon.points().zip(canon.labels()) {
        for c in p {
            h.update(c.to_le_bytes());
        }
        h.update(y.to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Index sets of one repetition, all referring to rows of the canonical dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepSplit {
    pub train: Vec<usize>,
    /// Positions within `train` used to fit while choosing `k`.
    pub fit: Vec<usize>,
    /// Positions within `train` used to score each `k`.
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// The split used by repetition `rep` of [`run_real_data`] on `canonical`.
pub fn rep_split(canonical: &LabeledDataset, cfg: &ExperimentConfig, rep: usize) -> Result<RepSplit> {
    let base = RngSeed::new(cfg.seed, content_hash(canonical)).substream(rep as u64);
    let (train, test) = split_indices(canonical.len(), cfg.train_fraction, base)?;
    let (fit, validation) =
        split_indices(train.len(), 1.0 - cfg.validation_fraction, base.substream(TAG_VALIDATION))?;
    Ok(RepSplit { train, fit, validation, test })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealDataRow {
    pub dataset: String,
    pub d: usize,
    pub gamma_over_d: f64,
    /// Median over repetitions of the validation-chosen `k`.
    pub k_median: usize,
    pub mean_error: f64,
    pub stderr: f64,
    /// Set on the row with the lowest mean error.
    pub best_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealDataTable {
    pub rows: Vec<RealDataRow>,
}

/// Misclassification counts of `train` on `queries` for every `k` in `1..=k_max`, per scheme.
fn error_curves(
    train: &LabeledDataset,
    queries: &LabeledDataset,
    schemes: &[WeightScheme],
    k_max: usize,
) -> Result<Vec<Vec<f64>>> {
    let index = NeighborIndex::build(train)?;
    let mut errs = vec![vec![0.0; k_max]; schemes.len()];
    let mut scores = vec![0.0; k_max];
    for (q, &y) in queries.points().zip(queries.labels()) {
        let profile = NeighborProfile::new(&index.knn_query(q, k_max)?, train.labels());
        for (g, scheme) in schemes.iter().enumerate() {
            profile.scores(scheme, &mut scores);
            for (e, &s) in errs[g].iter_mut().zip(&scores) {
                *e += f64::from(f64::from(threshold(s)) != y);
            }
        }
    }
    Ok(errs)
}

/// Holdout sweep over `γ/d` on a binary classification dataset.
///
/// Each repetition splits the canonicalized rows into train and test, picks
/// `k` per `γ` on a validation part of the training rows, and reports test
/// error of the model refit on all training rows.
pub fn run_real_data(name: &str, ds: &LabeledDataset, cfg: &ExperimentConfig) -> Result<RealDataTable> {
    if cfg.study != Study::RealData {
        return Err(Error::ConfigInvalid(format!("expected a RealData config, got {:?}", cfg.study)));
    }
    cfg.validate()?;
    if ds.task() != Task::Classification {
        return Err(Error::TaskMismatch { expected: "classification" });
    }
    let canon = canonicalize(ds);
    let d = canon.dim();
    let gods = cfg.gamma_over_d_grid();
    let schemes: Vec<WeightScheme> =
        gods.iter().map(|&g| WeightScheme::Interpolated { gamma: g * d as f64 }).collect();

    let per_rep: Vec<Vec<(usize, f64)>> = (0..cfg.reps_classification)
        .into_par_iter()
        .map(|rep| {
            let split = rep_split(&canon, cfg, rep)?;
            let train = canon.subset(&split.train)?;
            let fit = train.subset(&split.fit)?;
            let validation = train.subset(&split.validation)?;
            let test = canon.subset(&split.test)?;

            let ks = cfg.k_grid.resolve(fit.len())?;
            let grid: Vec<usize> = ks.iter().map(|k| k - 1).collect();
            let val_errs = error_curves(&fit, &validation, &schemes, *ks.last().expect("nonempty grid"))?;
            let chosen: Vec<usize> = val_errs.iter().map(|c| argmin_over(c, &grid) + 1).collect();

            let k_test = *chosen.iter().max().expect("nonempty gamma grid");
            let test_errs = error_curves(&train, &test, &schemes, k_test)?;
            let m = test.len() as f64;
            Ok(chosen.iter().zip(&test_errs).map(|(&k, errs)| (k, errs[k - 1] / m)).collect())
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<RealDataRow> = gods
        .iter()
        .enumerate()
        .map(|(g, &god)| {
            let stats = MeanStd::from_iter(per_rep.iter().map(|r| r[g].1));
            let mut ks: Vec<usize> = per_rep.iter().map(|r| r[g].0).collect();
            ks.sort_unstable();
            RealDataRow {
                dataset: name.to_string(),
                d,
                gamma_over_d: god,
                k_median: ks[ks.len() / 2],
                mean_error: stats.mean,
                stderr: stats.stderr(),
                best_flag: false,
            }
        })
        .collect();
    let best = (1..rows.len()).fold(0, |b, i| if rows[i].mean_error < rows[b].mean_error { i } else { b });
    rows[best].best_flag = true;
    Ok(RealDataTable { rows })
}
