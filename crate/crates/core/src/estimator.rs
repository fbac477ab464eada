//! Interpolated-NN regression and classification plus the evaluation
//! functionals: MSE against the regression function, paired Regret against
//! a Bayes oracle, and empirical classification instability (CIS).

use std::sync::Arc;

use serde::Serialize;

use crate::data::{LabeledDataset, Task};
use crate::error::{Error, Result};
use crate::neighbors::NeighborIndex;
use crate::simgen::{threshold, BayesOracle};
use crate::stats::MeanStd;
use crate::weighting::{compute_weights, WeightScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Metric {
    Mse,
    MisclassRate,
    Regret,
    Cis,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Mse => "mse",
            Metric::MisclassRate => "misclass",
            Metric::Regret => "regret",
            Metric::Cis => "cis",
        }
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub metric: Metric,
    pub value: f64,
    pub stderr: f64,
    pub n_eval: usize,
}

impl EvalReport {
    fn from_stats(metric: Metric, s: MeanStd) -> Self {
        EvalReport { metric, value: s.mean, stderr: s.stderr(), n_eval: s.n }
    }
}

/// Training data, its search index, a weight scheme and `k`.
#[derive(Debug, Clone)]
pub struct FittedModel {
    train: Arc<LabeledDataset>,
    index: Arc<NeighborIndex>,
    scheme: WeightScheme,
    k: usize,
}

impl FittedModel {
    pub fn fit(train: LabeledDataset, scheme: WeightScheme, k: usize) -> Result<Self> {
        let index = NeighborIndex::build(&train)?;
        Self::with_index(Arc::new(train), Arc::new(index), scheme, k)
    }

    /// Reuses an index built over `train`, e.g. to try several `k` or schemes.
    pub fn with_index(
        train: Arc<LabeledDataset>,
        index: Arc<NeighborIndex>,
        scheme: WeightScheme,
        k: usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if k + 1 > train.len() {
            return Err(Error::KTooLarge { k, n: train.len() });
        }
        if !scheme.is_valid() {
            return Err(Error::ConfigInvalid(format!("invalid weight scheme {scheme:?}")));
        }
        if index.len() != train.len() || index.dim() != train.dim() {
            return Err(Error::ConfigInvalid("index was not built over this training set".into()));
        }
        Ok(FittedModel { train, index, scheme, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn train(&self) -> &LabeledDataset {
        &self.train
    }

    pub fn task(&self) -> Task {
        self.train.task()
    }

    /// `Σ W_i Y_i` over the `k` nearest neighbors.
    pub fn score(&self, q: &[f64]) -> Result<f64> {
        let nl = self.index.knn_query(q, self.k)?;
        let w = compute_weights(&self.scheme, &nl);
        Ok(w.as_slice().iter().zip(&nl.indices).map(|(wi, &i)| wi * self.train.label(i)).sum())
    }

    pub fn predict_regression(&self, q: &[f64]) -> Result<f64> {
        self.score(q)
    }

    /// `1` iff the weighted label average exceeds `1/2`.
    pub fn predict_class(&self, q: &[f64]) -> Result<u8> {
        self.require_classification()?;
        Ok(threshold(self.score(q)?))
    }

    fn require_classification(&self) -> Result<()> {
        if self.task() != Task::Classification {
            return Err(Error::TaskMismatch { expected: "classification" });
        }
        Ok(())
    }
}

/// Mean of `(prediction - truth(q))²` over `queries`.
pub fn eval_mse<Q, F>(m: &FittedModel, truth: F, queries: &[Q]) -> Result<EvalReport>
where
    Q: AsRef<[f64]>,
    F: Fn(&[f64]) -> f64,
{
    if queries.is_empty() {
        return Err(Error::EmptyQuerySet);
    }
    let errs = queries
        .iter()
        .map(|q| {
            let q = q.as_ref();
            Ok((m.predict_regression(q)? - truth(q)).powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvalReport::from_stats(Metric::Mse, MeanStd::from_slice(&errs)))
}

/// Misclassification rate on labeled draws.
pub fn eval_misclass(m: &FittedModel, draws: &LabeledDataset) -> Result<EvalReport> {
    m.require_classification()?;
    let errs = draws
        .points()
        .zip(draws.labels())
        .map(|(x, &y)| Ok(f64::from(f64::from(m.predict_class(x)?) != y)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvalReport::from_stats(Metric::MisclassRate, MeanStd::from_slice(&errs)))
}

/// Paired regret: `mean(1{ĝ(X) != Y} - 1{g(X) != Y})` over the same draws.
/// Can be slightly negative from sampling noise; it is not clamped.
pub fn eval_regret(m: &FittedModel, bayes: &BayesOracle, draws: &LabeledDataset) -> Result<EvalReport> {
    regret_with(|x| m.predict_class(x), m.task(), bayes, draws)
}

pub(crate) fn regret_with<G>(
    classify: G,
    task: Task,
    bayes: &BayesOracle,
    draws: &LabeledDataset,
) -> Result<EvalReport>
where
    G: Fn(&[f64]) -> Result<u8>,
{
    if task != Task::Classification || draws.task() != Task::Classification {
        return Err(Error::TaskMismatch { expected: "classification" });
    }
    if draws.dim() != bayes.dim() {
        return Err(Error::DimensionMismatch { expected: bayes.dim(), found: draws.dim() });
    }
    let diffs = draws
        .points()
        .zip(draws.labels())
        .map(|(x, &y)| {
            let model_wrong = f64::from(f64::from(classify(x)?) != y);
            let bayes_wrong = f64::from(f64::from(bayes.bayes_classify(x)?) != y);
            Ok(model_wrong - bayes_wrong)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvalReport::from_stats(Metric::Regret, MeanStd::from_slice(&diffs)))
}

/// Regret through its conditional form `E[|2η(X) - 1| 1{ĝ(X) != g(X)}]`,
/// which needs only feature draws and has lower variance than [`eval_regret`].
pub fn eval_regret_conditional<Q: AsRef<[f64]>>(
    m: &FittedModel,
    bayes: &BayesOracle,
    queries: &[Q],
) -> Result<EvalReport> {
    m.require_classification()?;
    if queries.is_empty() {
        return Err(Error::EmptyQuerySet);
    }
    let terms = queries
        .iter()
        .map(|q| {
            let q = q.as_ref();
            let eta = bayes.eta(q)?;
            let disagree = m.predict_class(q)? != threshold(eta);
            Ok(if disagree { (2.0 * eta - 1.0).abs() } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvalReport::from_stats(Metric::Regret, MeanStd::from_slice(&terms)))
}

/// Fraction of queries on which two models trained on different samples disagree.
pub fn eval_cis<Q: AsRef<[f64]>>(a: &FittedModel, b: &FittedModel, queries: &[Q]) -> Result<EvalReport> {
    if a.scheme != b.scheme || a.k != b.k {
        return Err(Error::SchemeMismatch);
    }
    a.require_classification()?;
    b.require_classification()?;
    if queries.is_empty() {
        return Err(Error::EmptyQuerySet);
    }
    let flags = queries
        .iter()
        .map(|q| {
            let q = q.as_ref();
            Ok(f64::from(a.predict_class(q)? != b.predict_class(q)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvalReport::from_stats(Metric::Cis, MeanStd::from_slice(&flags)))
}

/// What [`optimize_k`] minimizes, together with its evaluation draws.
pub enum Objective<'a> {
    /// MSE against `truth` on `queries`.
    Mse { truth: &'a dyn Fn(&[f64]) -> f64, queries: &'a [Vec<f64>] },
    /// Paired regret on labeled draws.
    Regret { oracle: &'a BayesOracle, draws: &'a LabeledDataset },
    /// Plain misclassification rate on labeled draws (held-out validation).
    Misclass { draws: &'a LabeledDataset },
}

/// The `k` in `k_grid` minimizing the objective; ties go to the smaller `k`.
pub fn optimize_k(
    train: &LabeledDataset,
    scheme: WeightScheme,
    k_grid: &[usize],
    objective: &Objective<'_>,
) -> Result<(usize, EvalReport)> {
    if k_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut grid = k_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let train = Arc::new(train.clone());
    let index = Arc::new(NeighborIndex::build(&train)?);
    let mut best: Option<(usize, EvalReport)> = None;
    for k in grid {
        let m = FittedModel::with_index(Arc::clone(&train), Arc::clone(&index), scheme, k)?;
        let report = match objective {
            Objective::Mse { truth, queries } => eval_mse(&m, truth, queries)?,
            Objective::Regret { oracle, draws } => eval_regret(&m, oracle, draws)?,
            Objective::Misclass { draws } => eval_misclass(&m, draws)?,
        };
        if best.as_ref().is_none_or(|(_, b)| report.value < b.value) {
            best = Some((k, report));
        }
    }
    Ok(best.expect("grid is nonempty"))
}
