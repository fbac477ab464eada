use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, KSelection, Study};
use super::{choose_k, ratio_rows, rep_seed, values_at, Choice, RatioCurve, RepCurves, Series, TAG_EVAL, TAG_TRAIN, TAG_TRAIN_B};
use crate::curve::{argmin_over, NeighborProfile};
use crate::data::{LabeledDataset, RngSeed};
use crate::error::{Error, Result};
use crate::neighbors::NeighborIndex;
use crate::simgen::{threshold, BayesOracle, MixtureModel};
use crate::stats::{linear_fit, MeanStd};

/// Per-scheme curves over k for a pair of quantities (one row per scheme).
type CurvePair = (Vec<Vec<f64>>, Vec<Vec<f64>>);
use crate::theory::{cis_ratio_same_k, pr, AsymptoticParams};
use crate::weighting::WeightScheme;

fn require(cfg: &ExperimentConfig, study: Study) -> Result<()> {
    if cfg.study != study {
        return Err(Error::ConfigInvalid(format!("expected a {study:?} config, got {:?}", cfg.study)));
    }
    cfg.validate()
}

fn schemes(gamma_over_d: &[f64], d: usize) -> Vec<WeightScheme> {
    gamma_over_d.iter().map(|&g| WeightScheme::Interpolated { gamma: g * d as f64 }).collect()
}

fn theory_pr(d: usize) -> impl Fn(f64) -> Option<f64> {
    move |gamma| AsymptoticParams::new(d, gamma).and_then(pr).ok()
}

/// Evaluation draws with their regression function and Bayes labels.
struct EvalSet {
    points: LabeledDataset,
    eta: Vec<f64>,
}

impl EvalSet {
    fn draw(oracle: &BayesOracle, n: usize, seed: RngSeed) -> Result<Self> {
        let points = oracle.model.sample(n, seed)?;
        let eta = points.points().map(|q| oracle.eta_unchecked(q)).collect();
        Ok(EvalSet { points, eta })
    }
}

/// Per-`γ` MSE and conditional-regret curves for one training set.
struct RiskCurves {
    mse: Vec<Vec<f64>>,
    regret: Vec<Vec<f64>>,
}

fn risk_curves(train: &LabeledDataset, eval: &EvalSet, schemes: &[WeightScheme], k_max: usize) -> Result<RiskCurves> {
    let index = NeighborIndex::build(train)?;
    let mut mse = vec![vec![0.0; k_max]; schemes.len()];
    let mut regret = vec![vec![0.0; k_max]; schemes.len()];
    let mut scores = vec![0.0; k_max];
    for (q, &eta) in eval.points.points().zip(&eval.eta) {
        let profile = NeighborProfile::new(&index.knn_query(q, k_max)?, train.labels());
        let bayes = threshold(eta);
        let margin = (2.0 * eta - 1.0).abs();
        for (g, scheme) in schemes.iter().enumerate() {
            profile.scores(scheme, &mut scores);
            for (j, &s) in scores.iter().enumerate() {
                mse[g][j] += (s - eta).powi(2);
                if threshold(s) != bayes {
                    regret[g][j] += margin;
                }
            }
        }
    }
    let m = eval.eta.len() as f64;
    for curve in mse.iter_mut().chain(regret.iter_mut()) {
        curve.iter_mut().for_each(|v| *v /= m);
    }
    Ok(RiskCurves { mse, regret })
}

fn select(curves: &RepCurves, n_gamma: usize, grid: &[usize], sel: KSelection) -> (Vec<Choice>, Vec<Vec<f64>>, Vec<usize>) {
    let choices: Vec<Choice> = (0..n_gamma).map(|g| choose_k(curves, g, grid, sel)).collect();
    let values = choices.iter().enumerate().map(|(g, c)| values_at(curves, g, c)).collect();
    let ks = choices.iter().map(Choice::report_k).collect();
    (choices, values, ks)
}

/// Optimal-`k` MSE and regret of interpolated-NN relative to kNN on the
/// mixture benchmark.
pub fn run_ratio_curve(cfg: &ExperimentConfig) -> Result<RatioCurve> {
    require(cfg, Study::RatioCurve)?;
    let d = cfg.d;
    let gods = cfg.gamma_over_d_grid();
    let schemes = schemes(&gods, d);
    let ks = cfg.k_grid.resolve(cfg.n)?;
    let k_max = *ks.last().expect("resolved grid is nonempty");
    let grid: Vec<usize> = ks.iter().map(|k| k - 1).collect();
    let oracle = BayesOracle::new(MixtureModel::benchmark(d));

    let reps: Vec<RiskCurves> = (0..cfg.reps())
        .into_par_iter()
        .map(|r| {
            let seed = rep_seed(cfg.seed, r);
            let train = oracle.model.sample(cfg.n, seed.substream(TAG_TRAIN))?;
            let eval = EvalSet::draw(&oracle, cfg.n_test, seed.substream(TAG_EVAL))?;
            risk_curves(&train, &eval, &schemes, k_max)
        })
        .collect::<Result<_>>()?;

    let mse: RepCurves = reps.iter().take(cfg.reps_regression).map(|c| c.mse.clone()).collect();
    let regret: RepCurves = reps.into_iter().take(cfg.reps_classification).map(|c| c.regret).collect();

    let mut rows = Vec::with_capacity(2 * gods.len());
    for (series, curves) in [(Series::Mse, &mse), (Series::Regret, &regret)] {
        let (_, values, chosen) = select(curves, gods.len(), &grid, cfg.k_selection);
        rows.extend(ratio_rows(series, &gods, d, &values, &chosen, theory_pr(d)));
    }
    Ok(RatioCurve { d, n: cfg.n, rows })
}

/// Classification instability of interpolated-NN relative to kNN, both at
/// each `γ`'s regret-optimal `k` and with `k` held at the kNN optimum.
pub fn run_cis_curve(cfg: &ExperimentConfig) -> Result<RatioCurve> {
    require(cfg, Study::CisCurve)?;
    let d = cfg.d;
    let gods = cfg.gamma_over_d_grid();
    let schemes = schemes(&gods, d);
    let ks = cfg.k_grid.resolve(cfg.n)?;
    let k_max = *ks.last().expect("resolved grid is nonempty");
    let grid: Vec<usize> = ks.iter().map(|k| k - 1).collect();
    let oracle = BayesOracle::new(MixtureModel::benchmark(d));
    let tag_b = if cfg.identical_trains { TAG_TRAIN } else { TAG_TRAIN_B };

    let reps: Vec<CurvePair> = (0..cfg.reps())
        .into_par_iter()
        .map(|r| {
            let seed = rep_seed(cfg.seed, r);
            let a = oracle.model.sample(cfg.n, seed.substream(TAG_TRAIN))?;
            let b = oracle.model.sample(cfg.n, seed.substream(tag_b))?;
            let eval = EvalSet::draw(&oracle, cfg.n_test, seed.substream(TAG_EVAL))?;
            cis_curves(&a, &b, &eval, &schemes, k_max)
        })
        .collect::<Result<_>>()?;

    let (cis, regret): (RepCurves, RepCurves) = reps.into_iter().unzip();
    let (choices, _, chosen) = select(&regret, gods.len(), &grid, cfg.k_selection);

    let optimal: Vec<Vec<f64>> = choices.iter().enumerate().map(|(g, c)| values_at(&cis, g, c)).collect();
    let mut rows = ratio_rows(Series::CisOptimalK, &gods, d, &optimal, &chosen, |gamma| {
        theory_pr(d)(gamma).map(f64::sqrt)
    });

    let fixed: Vec<Vec<f64>> = (0..gods.len()).map(|g| values_at(&cis, g, &choices[0])).collect();
    let k0 = vec![chosen[0]; gods.len()];
    rows.extend(ratio_rows(Series::CisFixedK, &gods, d, &fixed, &k0, |gamma| {
        AsymptoticParams::new(d, gamma).and_then(cis_ratio_same_k).ok()
    }));
    Ok(RatioCurve { d, n: cfg.n, rows })
}

/// Disagreement curves between two training sets, plus their averaged regret.
fn cis_curves(
    a: &LabeledDataset,
    b: &LabeledDataset,
    eval: &EvalSet,
    schemes: &[WeightScheme],
    k_max: usize,
) -> Result<CurvePair> {
    let (ia, ib) = (NeighborIndex::build(a)?, NeighborIndex::build(b)?);
    let mut cis = vec![vec![0.0; k_max]; schemes.len()];
    let mut regret = vec![vec![0.0; k_max]; schemes.len()];
    let (mut sa, mut sb) = (vec![0.0; k_max], vec![0.0; k_max]);
    for (q, &eta) in eval.points.points().zip(&eval.eta) {
        let pa = NeighborProfile::new(&ia.knn_query(q, k_max)?, a.labels());
        let pb = NeighborProfile::new(&ib.knn_query(q, k_max)?, b.labels());
        let bayes = threshold(eta);
        let half_margin = (2.0 * eta - 1.0).abs() / 2.0;
        for (g, scheme) in schemes.iter().enumerate() {
            pa.scores(scheme, &mut sa);
            pb.scores(scheme, &mut sb);
            for j in 0..k_max {
                let (ca, cb) = (threshold(sa[j]), threshold(sb[j]));
                if ca != cb {
                    cis[g][j] += 1.0;
                }
                regret[g][j] += half_margin * (f64::from(ca != bayes) + f64::from(cb != bayes));
            }
        }
    }
    let m = eval.eta.len() as f64;
    for curve in cis.iter_mut().chain(regret.iter_mut()) {
        curve.iter_mut().for_each(|v| *v /= m);
    }
    Ok((cis, regret))
}

/// Optimal `k` and optimal MSE for one `(n, γ)` cell of the rate study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub d: usize,
    pub gamma: f64,
    pub gamma_over_d: f64,
    pub n: usize,
    /// Minimizer of the repetition-averaged MSE curve.
    pub best_k: usize,
    pub best_mse: f64,
    pub stderr: f64,
    /// Minimizer of each repetition's own MSE curve.
    pub per_rep_best_k: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSlope {
    pub gamma: f64,
    pub gamma_over_d: f64,
    /// Least-squares slope of `ln best_mse` against `ln n`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCheck {
    pub d: usize,
    pub rows: Vec<RateRow>,
    pub slopes: Vec<RateSlope>,
}

impl RateCheck {
    pub fn row(&self, gamma_over_d: f64, n: usize) -> Option<&RateRow> {
        self.rows.iter().find(|r| r.n == n && (r.gamma_over_d - gamma_over_d).abs() < 1e-12)
    }

    pub fn slope(&self, gamma_over_d: f64) -> Option<f64> {
        self.slopes.iter().find(|s| (s.gamma_over_d - gamma_over_d).abs() < 1e-12).map(|s| s.slope)
    }
}

/// Optimal MSE and optimal `k` across training sizes, with the fitted
/// convergence slope per `γ`.
pub fn run_rate_check(cfg: &ExperimentConfig) -> Result<RateCheck> {
    require(cfg, Study::RateCheck)?;
    let d = cfg.d;
    let gods = cfg.gamma_over_d_grid();
    let schemes = schemes(&gods, d);
    let oracle = BayesOracle::new(MixtureModel::benchmark(d));
    let mut n_grid = cfg.n_grid.clone();
    n_grid.sort_unstable();
    n_grid.dedup();

    let mut rows = Vec::new();
    for &n in &n_grid {
        let ks = cfg.k_grid.resolve(n)?;
        let k_max = *ks.last().expect("resolved grid is nonempty");
        let grid: Vec<usize> = ks.iter().map(|k| k - 1).collect();
        let curves: RepCurves = (0..cfg.reps_regression)
            .into_par_iter()
            .map(|r| {
                let seed = rep_seed(cfg.seed, r);
                let train = oracle.model.sample(n, seed.substream(TAG_TRAIN).substream(n as u64))?;
                let eval = EvalSet::draw(&oracle, cfg.n_test, seed.substream(TAG_EVAL))?;
                Ok(risk_curves(&train, &eval, &schemes, k_max)?.mse)
            })
            .collect::<Result<_>>()?;
        for (g, &god) in gods.iter().enumerate() {
            let pooled = choose_k(&curves, g, &grid, KSelection::Pooled);
            let stats = MeanStd::from_slice(&values_at(&curves, g, &pooled));
            rows.push(RateRow {
                d,
                gamma: god * d as f64,
                gamma_over_d: god,
                n,
                best_k: pooled.report_k(),
                best_mse: stats.mean,
                stderr: stats.stderr(),
                per_rep_best_k: curves.iter().map(|rep| argmin_over(&rep[g], &grid) + 1).collect(),
            });
        }
    }

    let slopes = gods
        .iter()
        .map(|&god| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.gamma_over_d == god)
                .map(|r| ((r.n as f64).ln(), r.best_mse.ln()))
                .unzip();
            RateSlope { gamma: god * d as f64, gamma_over_d: god, slope: linear_fit(&x, &y).0 }
        })
        .collect();
    Ok(RateCheck { d, rows, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::KGrid;

    fn small(mut cfg: ExperimentConfig) -> ExperimentConfig {
        cfg.n = 64;
        cfg.n_test = 64;
        cfg.reps_regression = 3;
        cfg.reps_classification = 4;
        cfg.gamma_over_d = vec![0.0, 0.1, 0.35];
        cfg
    }

    #[test]
    fn ratio_at_zero_is_one_and_theory_is_absent_out_of_regime() {
        let curve = run_ratio_curve(&small(ExperimentConfig::ratio_curve(2))).unwrap();
        assert_eq!(curve.rows.len(), 6);
        for s in [Series::Mse, Series::Regret] {
            let rows: Vec<_> = curve.series(s).collect();
            assert_eq!(rows[0].sim_ratio, 1.0);
            assert_eq!(rows[0].theory, Some(1.0));
            assert!(rows[1].theory.is_some());
            assert!(rows[2].theory.is_none());
        }
    }

    #[test]
    fn zero_only_grid_gives_unit_ratio() {
        let mut cfg = small(ExperimentConfig::ratio_curve(2));
        cfg.gamma_over_d = vec![0.0];
        let curve = run_ratio_curve(&cfg).unwrap();
        assert!(curve.rows.iter().all(|r| r.sim_ratio == 1.0));
    }

    #[test]
    fn wrong_study_is_rejected() {
        let cfg = small(ExperimentConfig::cis_curve(2));
        assert!(matches!(run_ratio_curve(&cfg), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn identical_training_sets_never_disagree() {
        let mut cfg = small(ExperimentConfig::cis_curve(2));
        cfg.identical_trains = true;
        let curve = run_cis_curve(&cfg).unwrap();
        assert!(curve.rows.iter().all(|r| r.sim_value == 0.0));
    }

    #[test]
    fn studies_are_deterministic_across_thread_counts() {
        let cfg = small(ExperimentConfig::cis_curve(2));
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_cis_curve(&cfg))
        };
        let (a, b) = (run(1).unwrap(), run(3).unwrap());
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn rate_check_reports_every_cell() {
        let mut cfg = ExperimentConfig::rate_check(2);
        cfg.n_grid = vec![32, 64];
        cfg.n_test = 64;
        cfg.reps_regression = 2;
        cfg.k_grid = KGrid::All { k_max: Some(20) };
        let rc = run_rate_check(&cfg).unwrap();
        assert_eq!(rc.rows.len(), 4);
        assert!(rc.row(0.2, 64).unwrap().per_rep_best_k.len() == 2);
        assert!(rc.slope(0.0).unwrap().is_finite());
    }
}
