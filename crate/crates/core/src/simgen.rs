//! Synthetic two-class data with independent Gaussian-mixture coordinates
//! and its closed-form Bayes oracle.
//!
//! The benchmark model uses equal class priors and, per coordinate,
//!
//! * class 0: `0.5 N(0, 1) + 0.5 N(3, 2)`
//! * class 1: `0.5 N(1.5, 1) + 0.5 N(4.5, 2)`
//!
//! where the second parameter is the variance.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::data::{LabeledDataset, RngSeed, Task};
use crate::error::{Error, Result};
use crate::estimator::{EvalReport, Metric};
use crate::stats::MeanStd;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// One univariate normal component of a coordinate mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
    pub var: f64,
}

impl Component {
    pub const fn new(weight: f64, mean: f64, var: f64) -> Self {
        Component { weight, mean, var }
    }

    fn log_density(&self, x: f64) -> f64 {
        let z = x - self.mean;
        -0.5 * z * z / self.var - 0.5 * self.var.ln() - LN_SQRT_2PI
    }
}

/// Two classes whose coordinates are iid draws from a per-class mixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureModel {
    pub d: usize,
    /// `P(Y = 1)`.
    pub prior_one: f64,
    pub class0: Vec<Component>,
    pub class1: Vec<Component>,
}

impl MixtureModel {
    /// The benchmark model in dimension `d`.
    pub fn benchmark(d: usize) -> Self {
        MixtureModel {
            d,
            prior_one: 0.5,
            class0: vec![Component::new(0.5, 0.0, 1.0), Component::new(0.5, 3.0, 2.0)],
            class1: vec![Component::new(0.5, 1.5, 1.0), Component::new(0.5, 4.5, 2.0)],
        }
    }

    pub fn new(d: usize, prior_one: f64, class0: Vec<Component>, class1: Vec<Component>) -> Result<Self> {
        let ok_class = |c: &[Component]| {
            !c.is_empty()
                && c.iter().all(|m| m.weight > 0.0 && m.var > 0.0 && m.mean.is_finite())
                && (c.iter().map(|m| m.weight).sum::<f64>() - 1.0).abs() < 1e-12
        };
        if d == 0 || !(0.0..=1.0).contains(&prior_one) || !ok_class(&class0) || !ok_class(&class1) {
            return Err(Error::ConfigInvalid("malformed mixture model".into()));
        }
        Ok(MixtureModel { d, prior_one, class0, class1 })
    }

    fn components(&self, label: u8) -> &[Component] {
        if label == 1 {
            &self.class1
        } else {
            &self.class0
        }
    }

    /// `log f(x | Y = label)`, summed over coordinates.
    pub fn log_class_density(&self, x: &[f64], label: u8) -> f64 {
        let comps = self.components(label);
        x.iter().map(|&v| log_mixture(comps, v)).sum()
    }

    fn draw_coord<R: Rng>(comps: &[Component], rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = comps[comps.len() - 1];
        for c in comps {
            acc += c.weight;
            if u < acc {
                chosen = *c;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        chosen.mean + chosen.var.sqrt() * z
    }

    /// `n` iid labeled draws; labels are `0.0`/`1.0`.
    pub fn sample(&self, n: usize, seed: RngSeed) -> Result<LabeledDataset> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut rng = seed.rng();
        let mut coords = Vec::with_capacity(n * self.d);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let label = u8::from(rng.random::<f64>() < self.prior_one);
            let comps = self.components(label);
            for _ in 0..self.d {
                coords.push(Self::draw_coord(comps, &mut rng));
            }
            labels.push(f64::from(label));
        }
        LabeledDataset::from_flat(self.d, coords, labels, Task::Classification)
    }
}

fn log_mixture(comps: &[Component], x: f64) -> f64 {
    let logs: Vec<f64> = comps.iter().map(|c| c.weight.ln() + c.log_density(x)).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// Closed-form `η(x) = P(Y = 1 | X = x)` and Bayes rule for a [`MixtureModel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BayesOracle {
    pub model: MixtureModel,
}

impl BayesOracle {
    pub fn new(model: MixtureModel) -> Self {
        BayesOracle { model }
    }

    pub fn dim(&self) -> usize {
        self.model.d
    }

    /// Posterior probability of class 1, evaluated in log space.
    pub fn eta(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.model.d {
            return Err(Error::DimensionMismatch { expected: self.model.d, found: q.len() });
        }
        Ok(self.eta_unchecked(q))
    }

    pub(crate) fn eta_unchecked(&self, q: &[f64]) -> f64 {
        let m = &self.model;
        if m.prior_one == 0.0 {
            return 0.0;
        }
        if m.prior_one == 1.0 {
            return 1.0;
        }
        let l1 = m.prior_one.ln() + m.log_class_density(q, 1);
        let l0 = (1.0 - m.prior_one).ln() + m.log_class_density(q, 0);
        let t = l0 - l1;
        if t.is_nan() {
            // both densities underflowed to -inf
            return 0.5;
        }
        if t >= 0.0 {
            let e = (-t).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + t.exp())
        }
    }

    /// `1{η(q) > 1/2}`; `η = 1/2` maps to class 0.
    pub fn bayes_classify(&self, q: &[f64]) -> Result<u8> {
        Ok(threshold(self.eta(q)?))
    }

    /// `E[min(η, 1 - η)]` over `n_mc` fresh feature draws.
    pub fn bayes_risk(&self, n_mc: usize, seed: RngSeed) -> Result<EvalReport> {
        let draws = self.model.sample(n_mc, seed)?;
        let stats = MeanStd::from_iter(draws.points().map(|x| {
            let e = self.eta_unchecked(x);
            e.min(1.0 - e)
        }));
        Ok(EvalReport { metric: Metric::MisclassRate, value: stats.mean, stderr: stats.stderr(), n_eval: n_mc })
    }

    /// Bayes error estimated from sampled labels, `mean 1{g(X) != Y}`.
    pub fn bayes_risk_by_labels(&self, n_mc: usize, seed: RngSeed) -> Result<EvalReport> {
        let draws = self.model.sample(n_mc, seed)?;
        let stats = MeanStd::from_iter(
            draws
                .points()
                .zip(draws.labels())
                .map(|(x, &y)| f64::from(f64::from(threshold(self.eta_unchecked(x))) != y)),
        );
        Ok(EvalReport { metric: Metric::MisclassRate, value: stats.mean, stderr: stats.stderr(), n_eval: n_mc })
    }
}

pub(crate) fn threshold(score: f64) -> u8 {
    u8::from(score > 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(d: usize) -> BayesOracle {
        BayesOracle::new(MixtureModel::benchmark(d))
    }

    fn direct_density(comps: &[Component], x: &[f64]) -> f64 {
        x.iter()
            .map(|&v| {
                comps
                    .iter()
                    .map(|c| {
                        c.weight * (-(v - c.mean).powi(2) / (2.0 * c.var)).exp()
                            / (2.0 * std::f64::consts::PI * c.var).sqrt()
                    })
                    .sum::<f64>()
            })
            .product()
    }

    #[test]
    fn sample_is_deterministic_and_valid() {
        let m = MixtureModel::benchmark(3);
        let a = m.sample(50, RngSeed::new(5, 1)).unwrap();
        let b = m.sample(50, RngSeed::new(5, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 3);
        assert!(m.sample(0, RngSeed::new(5, 1)).is_err());
        assert_eq!(m.sample(1, RngSeed::new(5, 1)).unwrap().len(), 1);
    }

    #[test]
    fn class_frequency_and_class0_mean() {
        let n = 100_000;
        let ds = MixtureModel::benchmark(2).sample(n, RngSeed::new(11, 0)).unwrap();
        let ones: f64 = ds.labels().iter().sum();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones - n as f64 / 2.0).abs() < 3.0 * sigma);

        // class-0 coordinate: mean 1.5, variance 0.5*1 + 0.5*2 + 0.25*9 = 3.75
        let xs: Vec<f64> = ds
            .points()
            .zip(ds.labels())
            .filter(|(_, &y)| y == 0.0)
            .map(|(p, _)| p[0])
            .collect();
        let m = MeanStd::from_slice(&xs);
        assert!((m.mean - 1.5).abs() < 3.0 * (3.75 / xs.len() as f64).sqrt());
    }

    #[test]
    fn eta_is_a_probability() {
        let o = oracle(4);
        for q in [[0.0; 4], [1.0, 2.0, 3.0, 4.0], [-30.0, 0.0, 40.0, 2.0]] {
            let e = o.eta(&q).unwrap();
            assert!((0.0..=1.0).contains(&e));
        }
        assert!(o.eta(&[1.0]).is_err());
    }

    #[test]
    fn far_class1_tail() {
        assert!(oracle(3).eta(&[20.0; 3]).unwrap() > 0.99);
    }

    #[test]
    fn eta_half_at_density_crossing() {
        let m = MixtureModel::benchmark(1);
        // f0 - f1 changes sign between the two class-0/class-1 component means
        let f = |x: f64| direct_density(&m.class0, &[x]) - direct_density(&m.class1, &[x]);
        let (mut lo, mut hi) = (0.0, 1.5);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let e = oracle(1).eta(&[0.5 * (lo + hi)]).unwrap();
        assert!((e - 0.5).abs() < 1e-9, "eta = {e}");
    }

    #[test]
    fn log_space_matches_direct_density() {
        let m = MixtureModel::benchmark(3);
        for q in [[0.1, -2.0, 5.0], [9.5, -9.5, 0.0], [3.0, 3.0, 3.0]] {
            for (label, comps) in [(0u8, &m.class0), (1u8, &m.class1)] {
                let direct = direct_density(comps, &q);
                let logd = m.log_class_density(&q, label).exp();
                assert!(((logd - direct) / direct).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bayes_classify_tie_goes_to_zero() {
        assert_eq!(threshold(0.7), 1);
        assert_eq!(threshold(0.5), 0);
    }

    #[test]
    fn degenerate_models() {
        let same = MixtureModel::new(2, 0.5, vec![Component::new(1.0, 0.0, 1.0)], vec![Component::new(1.0, 0.0, 1.0)])
            .unwrap();
        let r = BayesOracle::new(same).bayes_risk(1000, RngSeed::new(0, 0)).unwrap();
        assert_eq!(r.value, 0.5);

        let apart = MixtureModel::new(
            2,
            0.5,
            vec![Component::new(1.0, -1000.0, 1.0)],
            vec![Component::new(1.0, 1000.0, 1.0)],
        )
        .unwrap();
        let r = BayesOracle::new(apart).bayes_risk(1000, RngSeed::new(0, 0)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn conditional_and_label_risk_agree() {
        let o = oracle(2);
        let a = o.bayes_risk(200_000, RngSeed::new(3, 0)).unwrap();
        let b = o.bayes_risk_by_labels(200_000, RngSeed::new(3, 1)).unwrap();
        let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!((a.value - b.value).abs() < 3.0 * se, "{a:?} vs {b:?}");
        assert!(a.stderr < b.stderr);
    }
}
