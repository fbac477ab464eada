use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `γ/d` accepted unless out-of-regime runs are explicitly allowed.
pub const GAMMA_OVER_D_CAP: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    RatioCurve,
    CisCurve,
    RateCheck,
    RealData,
}

/// Candidate neighbor counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum KGrid {
    /// Every `k` in `1..=k_max`; `None` means `n - 1`.
    All { k_max: Option<usize> },
    /// An explicit list.
    List { ks: Vec<usize> },
}

impl KGrid {
    /// Sorted, deduplicated `k` values usable with `n` training points.
    pub fn resolve(&self, n: usize) -> Result<Vec<usize>> {
        let cap = n.saturating_sub(1);
        let ks: Vec<usize> = match self {
            KGrid::All { k_max } => (1..=k_max.unwrap_or(cap).min(cap)).collect(),
            KGrid::List { ks } => {
                let mut ks: Vec<usize> = ks.iter().copied().filter(|&k| k >= 1 && k <= cap).collect();
                ks.sort_unstable();
                ks.dedup();
                ks
            }
        };
        if ks.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(ks)
    }
}

/// How the optimal `k` for each `γ` is chosen from the per-repetition curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSelection {
    /// Average each `k`'s risk over repetitions, then minimize over `k`.
    Pooled,
    /// Minimize within every repetition, then average the minima.
    PerRep,
}

/// Full description of one study. Serializes to the resolved-config JSON the
/// CLI writes next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub study: Study,
    pub d: usize,
    pub n: usize,
    /// Training sizes for the rate check.
    pub n_grid: Vec<usize>,
    pub gamma_over_d: Vec<f64>,
    pub k_grid: KGrid,
    pub k_selection: KSelection,
    pub reps_regression: usize,
    pub reps_classification: usize,
    /// Evaluation draws per repetition.
    pub n_test: usize,
    pub seed: u64,
    pub allow_out_of_regime: bool,
    /// Real data: share of rows used for training.
    pub train_fraction: f64,
    /// Real data: share of the training part held out to choose `k`.
    pub validation_fraction: f64,
    /// CIS study smoke test: both training sets share one seed.
    pub identical_trains: bool,
}

pub fn default_gamma_over_d_grid() -> Vec<f64> {
    (0..=7).map(|i| i as f64 * 0.05).collect()
}

impl ExperimentConfig {
    fn base(study: Study, d: usize) -> Self {
        ExperimentConfig {
            study,
            d,
            n: 1024,
            n_grid: (6..=10).map(|i| 1usize << i).collect(),
            gamma_over_d: default_gamma_over_d_grid(),
            k_grid: KGrid::All { k_max: None },
            k_selection: KSelection::Pooled,
            reps_regression: 100,
            reps_classification: 500,
            n_test: 2048,
            seed: 0,
            allow_out_of_regime: false,
            train_fraction: 0.25,
            validation_fraction: 0.25,
            identical_trains: false,
        }
    }

    pub fn ratio_curve(d: usize) -> Self {
        Self::base(Study::RatioCurve, d)
    }

    pub fn cis_curve(d: usize) -> Self {
        Self::base(Study::CisCurve, d)
    }

    pub fn rate_check(d: usize) -> Self {
        ExperimentConfig {
            gamma_over_d: vec![0.0, 0.2],
            reps_regression: 30,
            ..Self::base(Study::RateCheck, d)
        }
    }

    pub fn real_data() -> Self {
        ExperimentConfig { reps_classification: 50, ..Self::base(Study::RealData, 1) }
    }

    /// Repetitions driving the study's main metric.
    pub fn reps(&self) -> usize {
        match self.study {
            Study::RatioCurve => self.reps_regression.max(self.reps_classification),
            Study::RateCheck => self.reps_regression,
            Study::CisCurve | Study::RealData => self.reps_classification,
        }
    }

    /// Sorted, deduplicated `γ/d` grid with `0` always first.
    pub fn gamma_over_d_grid(&self) -> Vec<f64> {
        let mut g = self.gamma_over_d.clone();
        g.push(0.0);
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigInvalid(msg));
        if self.d == 0 && self.study != Study::RealData {
            return bad("d must be positive".into());
        }
        if self.reps() == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.study == Study::RatioCurve && (self.reps_regression == 0 || self.reps_classification == 0) {
            return bad("both regression and classification reps must be at least 1".into());
        }
        for &g in &self.gamma_over_d {
            if !g.is_finite() || g < 0.0 {
                return bad(format!("gamma/d value {g} must be finite and nonnegative"));
            }
            if g > GAMMA_OVER_D_CAP + 1e-12 && !self.allow_out_of_regime {
                return bad(format!(
                    "gamma/d value {g} exceeds {GAMMA_OVER_D_CAP}; pass allow_out_of_regime to run it"
                ));
            }
        }
        match self.study {
            Study::RatioCurve | Study::CisCurve => {
                if self.n < 2 {
                    return bad("n must be at least 2".into());
                }
                if self.n_test == 0 {
                    return bad("n_test must be positive".into());
                }
                self.k_grid.resolve(self.n)?;
            }
            Study::RateCheck => {
                if self.n_grid.len() < 2 || self.n_grid.iter().any(|&n| n < 2) {
                    return bad("rate check needs at least two sizes, each >= 2".into());
                }
                if self.n_test == 0 {
                    return bad("n_test must be positive".into());
                }
            }
            Study::RealData => {
                for (name, f) in [("train", self.train_fraction), ("validation", self.validation_fraction)] {
                    if !(f > 0.0 && f < 1.0) {
                        return bad(format!("{name} fraction {f} must lie in (0, 1)"));
                    }
                }
            }
        }
        Ok(())
    }
}
