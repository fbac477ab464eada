//! Monte-Carlo studies comparing interpolated-NN with kNN, and a holdout
//! sweep over user-supplied classification data.
//!
//! Every repetition draws from its own RNG substream and runs as an
//! independent rayon task. Per-repetition results are collected in
//! repetition order and reduced sequentially, so outputs do not depend on
//! the number of worker threads.

mod config;
mod real_data;
mod simulate;

pub use config::{default_gamma_over_d_grid, ExperimentConfig, KGrid, KSelection, Study, GAMMA_OVER_D_CAP};
pub use real_data::{canonicalize, content_hash, rep_split, run_real_data, RealDataRow, RealDataTable, RepSplit};
pub use simulate::{run_cis_curve, run_rate_check, run_ratio_curve, RateCheck, RateRow, RateSlope};

use serde::Serialize;

use crate::curve::argmin_over;
use crate::data::RngSeed;
use crate::stats::{ratio_stderr, MeanStd};

/// Which quantity a [`RatioRow`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Mse,
    Regret,
    /// CIS with each `γ` at its own regret-optimal `k`.
    CisOptimalK,
    /// CIS with every `γ` at the kNN-optimal `k`.
    CisFixedK,
}

impl Series {
    /// Value of the `metric` / `k_policy` CSV column.
    pub fn label(self) -> &'static str {
        match self {
            Series::Mse => "mse",
            Series::Regret => "regret",
            Series::CisOptimalK => "optimal",
            Series::CisFixedK => "fixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub gamma: f64,
    pub gamma_over_d: f64,
    pub series: Series,
    /// Selected `k` (median over repetitions under per-repetition selection).
    pub k: usize,
    /// Mean metric at the selected `k`.
    pub sim_value: f64,
    /// `sim_value / sim_value(γ = 0)`; exactly `1` at `γ = 0`.
    pub sim_ratio: f64,
    pub stderr: f64,
    /// Asymptotic ratio, absent outside `γ < d/3`.
    pub theory: Option<f64>,
}

/// Per-`γ` simulated ratios against `γ = 0` with their theoretical counterparts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCurve {
    pub d: usize,
    pub n: usize,
    pub rows: Vec<RatioRow>,
}

impl RatioCurve {
    pub fn series(&self, s: Series) -> impl Iterator<Item = &RatioRow> + '_ {
        self.rows.iter().filter(move |r| r.series == s)
    }
}

const TAG_TRAIN: u64 = 1;
const TAG_TRAIN_B: u64 = 2;
const TAG_EVAL: u64 = 3;

fn rep_seed(seed: u64, rep: usize) -> RngSeed {
    RngSeed::new(seed, 0).substream(rep as u64)
}

/// `curves[r][g]` is repetition `r`'s risk at `γ` index `g`, indexed by `k - 1`.
type RepCurves = Vec<Vec<Vec<f64>>>;

/// The `k` chosen for one `γ`: one entry per repetition.
struct Choice {
    ks: Vec<usize>,
}

impl Choice {
    fn report_k(&self) -> usize {
        let mut ks = self.ks.clone();
        ks.sort_unstable();
        ks[ks.len() / 2]
    }
}

fn mean_curve(curves: &RepCurves, g: usize) -> Vec<f64> {
    let len = curves[0][g].len();
    let mut acc = vec![0.0; len];
    for rep in curves {
        for (a, v) in acc.iter_mut().zip(&rep[g]) {
            *a += v;
        }
    }
    let n = curves.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// `grid` holds 0-based positions (`k - 1`).
fn choose_k(curves: &RepCurves, g: usize, grid: &[usize], sel: KSelection) -> Choice {
    match sel {
        KSelection::Pooled => {
            let pos = argmin_over(&mean_curve(curves, g), grid);
            Choice { ks: vec![pos + 1; curves.len()] }
        }
        KSelection::PerRep => Choice { ks: curves.iter().map(|rep| argmin_over(&rep[g], grid) + 1).collect() },
    }
}

fn values_at(curves: &RepCurves, g: usize, choice: &Choice) -> Vec<f64> {
    curves.iter().zip(&choice.ks).map(|(rep, &k)| rep[g][k - 1]).collect()
}

/// Turns per-`γ` per-repetition values into ratio rows against `γ` index 0.
fn ratio_rows(
    series: Series,
    gamma_over_d: &[f64],
    d: usize,
    values: &[Vec<f64>],
    ks: &[usize],
    theory: impl Fn(f64) -> Option<f64>,
) -> Vec<RatioRow> {
    let base = MeanStd::from_slice(&values[0]).mean;
    gamma_over_d
        .iter()
        .enumerate()
        .map(|(g, &god)| {
            let gamma = god * d as f64;
            let value = MeanStd::from_slice(&values[g]).mean;
            let (sim_ratio, stderr) = if g == 0 {
                (1.0, 0.0)
            } else if base == 0.0 {
                (f64::NAN, f64::NAN)
            } else {
                (value / base, ratio_stderr(&values[g], &values[0]))
            };
            RatioRow {
                gamma,
                gamma_over_d: god,
                series,
                k: ks[g],
                sim_value: value,
                sim_ratio,
                stderr,
                theory: theory(gamma),
            }
        })
        .collect()
}
