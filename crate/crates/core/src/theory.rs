//! Closed-form asymptotics of interpolated-NN relative to kNN.
//!
//! Everything here depends only on the dimension `d` and the interpolation
//! level `γ`. The risk-ratio formulas are valid for `0 <= γ < d/3`; calls
//! outside that range fail with [`Error::OutOfRegime`] instead of
//! extrapolating.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::RngSeed;
use crate::error::{Error, Result};
use crate::stats::MeanStd;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticParams {
    pub d: usize,
    pub gamma: f64,
}

impl AsymptoticParams {
    /// Parameters inside the risk-ratio regime `0 <= γ < d/3`.
    pub fn new(d: usize, gamma: f64) -> Result<Self> {
        let p = AsymptoticParams { d, gamma };
        p.check_below(3.0)?;
        Ok(p)
    }

    fn check_below(&self, divisor: f64) -> Result<()> {
        let bound = self.d as f64 / divisor;
        if self.d == 0 || !self.gamma.is_finite() || self.gamma < 0.0 || self.gamma >= bound {
            return Err(Error::OutOfRegime { d: self.d, gamma: self.gamma, bound });
        }
        Ok(())
    }

    fn df(&self) -> f64 {
        self.d as f64
    }
}

/// `1 + γ² / (d (d - 2γ))`: the variance inflation of interpolated weights.
fn variance_factor(d: f64, g: f64) -> f64 {
    1.0 + g * g / (d * (d - 2.0 * g))
}

/// `(d-γ)² (d+2)² / ((d+2-γ)² d²)`: the squared-bias reduction.
fn bias_factor(d: f64, g: f64) -> f64 {
    let r = ((d - g) * (d + 2.0)) / ((d + 2.0 - g) * d);
    r * r
}

/// Performance ratio `PR(d, γ)`: limiting optimal-k MSE (and Regret) of
/// interpolated-NN divided by that of kNN.
pub fn pr(p: AsymptoticParams) -> Result<f64> {
    p.check_below(3.0)?;
    let (d, g) = (p.df(), p.gamma);
    Ok(variance_factor(d, g).powf(4.0 / (d + 4.0)) * bias_factor(d, g).powf(d / (d + 4.0)))
}

fn pr_unchecked(d: usize, gamma: f64) -> f64 {
    pr(AsymptoticParams { d, gamma }).expect("gamma within regime")
}

/// Right edge of the window where `PR(d, γ) < 1`.
///
/// For `d <= 3` this is the root of `PR(d, γ) = 1` inside `(0, d/3)`, found by
/// bisection; for `d >= 4` the ratio stays below one on the whole regime and
/// `d/3` is returned.
pub fn gamma_d(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    let edge = d as f64 / 3.0;
    if d >= 4 {
        return edge;
    }
    let (mut lo, mut hi) = (1e-9, edge - 1e-9);
    debug_assert!(pr_unchecked(d, lo) < 1.0 && pr_unchecked(d, hi) > 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = pr_unchecked(d, mid) - 1.0;
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick whichever bracket end sits closer to PR = 1
    if (pr_unchecked(d, lo) - 1.0).abs() <= (pr_unchecked(d, hi) - 1.0).abs() {
        lo
    } else {
        hi
    }
}

/// Limit of `k_γ / k_0`, the ratio of optimal neighbor counts.
pub fn k_ratio(p: AsymptoticParams) -> Result<f64> {
    p.check_below(3.0)?;
    let (d, g) = (p.df(), p.gamma);
    let base = (d + 2.0 - g).powi(2) / (d * (d - 2.0 * g)) * d * d / (d + 2.0).powi(2);
    Ok(base.powf(d / (d + 4.0)))
}

/// CIS ratio at a common `k`: `sqrt(1 + γ²/(d(d-2γ)))`.
pub fn cis_ratio_same_k(p: AsymptoticParams) -> Result<f64> {
    p.check_below(3.0)?;
    Ok(variance_factor(p.df(), p.gamma).sqrt())
}

/// CIS ratio when each method uses its own optimal `k`: `sqrt(PR)`.
pub fn cis_ratio_opt_k(p: AsymptoticParams) -> Result<f64> {
    Ok(pr(p)?.sqrt())
}

/// Limiting risk of OWNN divided by that of interpolated-NN, both at their optimal `k`.
pub fn ownn_ratio(p: AsymptoticParams) -> Result<f64> {
    let pr = pr(p)?;
    let d = p.df();
    let ownn_vs_knn =
        2f64.powf(4.0 / (d + 4.0)) * ((d + 2.0) / (d + 4.0)).powf((2.0 * d + 4.0) / (d + 4.0));
    Ok(ownn_vs_knn / pr)
}

/// Limits of the neighbor-ratio moments for a uniformly placed neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentLimits {
    /// `E (R_1/R_{k+1})^{-γ} = d/(d-γ)`
    pub m1: f64,
    /// `E (R_1/R_{k+1})^{-2γ} = d/(d-2γ)`
    pub m2: f64,
    /// `d/(d+2-γ)`, the coefficient of `E (R_1/R_{k+1})^{-γ} R_1²` in front of `(k/(n f))^{2/d}`.
    pub m1r2_coeff: f64,
}

/// Requires only `γ < d/2` so that the second moment is finite.
pub fn moment_limits(p: AsymptoticParams) -> Result<MomentLimits> {
    p.check_below(2.0)?;
    let (d, g) = (p.df(), p.gamma);
    Ok(MomentLimits { m1: d / (d - g), m2: d / (d - 2.0 * g), m1r2_coeff: d / (d + 2.0 - g) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub m1_hat: f64,
    pub m1_stderr: f64,
    pub m2_hat: f64,
    pub m2_stderr: f64,
    pub reps: usize,
}

/// Monte-Carlo estimate of the ratio moments.
///
/// Each repetition draws `n` uniform points in the unit `d`-ball, takes the
/// `k + 1` nearest to the center and averages `(R_i/R_{k+1})^{-γ}` and
/// `(R_i/R_{k+1})^{-2γ}` over the inner `k`. Standard errors come from the
/// spread across repetitions. Repetition `r` uses substream `r` of `seed`.
pub fn empirical_moment_check(
    d: usize,
    gamma: f64,
    k: usize,
    n: usize,
    reps: usize,
    seed: RngSeed,
) -> Result<MomentEstimate> {
    AsymptoticParams { d, gamma }.check_below(3.0)?;
    if k == 0 || k + 1 > n {
        return Err(Error::KTooLarge { k, n });
    }
    if reps == 0 {
        return Err(Error::ConfigInvalid("reps must be positive".into()));
    }
    let per_rep: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed.substream(r as u64).rng();
            let mut radii: Vec<f64> = (0..n).map(|_| uniform_ball_norm(&mut rng, d)).collect();
            radii.select_nth_unstable_by(k, f64::total_cmp);
            let radius = radii[k];
            let (mut s1, mut s2) = (0.0, 0.0);
            for &r in &radii[..k] {
                let t = (-gamma * (r / radius).ln()).exp();
                s1 += t;
                s2 += t * t;
            }
            (s1 / k as f64, s2 / k as f64)
        })
        .collect();
    let m1 = MeanStd::from_iter(per_rep.iter().map(|p| p.0));
    let m2 = MeanStd::from_iter(per_rep.iter().map(|p| p.1));
    Ok(MomentEstimate {
        m1_hat: m1.mean,
        m1_stderr: m1.stderr(),
        m2_hat: m2.mean,
        m2_stderr: m2.stderr(),
        reps,
    })
}

/// Distance to the origin of a uniform draw from the unit `d`-ball
/// (Gaussian direction, radius `U^{1/d}`).
fn uniform_ball_norm<R: Rng>(rng: &mut R, d: usize) -> f64 {
    let mut dir2 = 0.0;
    let mut p = Vec::with_capacity(d);
    for _ in 0..d {
        let z: f64 = rng.sample(StandardNormal);
        dir2 += z * z;
        p.push(z);
    }
    let u: f64 = rng.random();
    let scale = u.powf(1.0 / d as f64) / dir2.sqrt();
    p.iter().map(|z| (z * scale) * (z * scale)).sum::<f64>().sqrt()
}

/// One row of the `theory` CSV sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryRow {
    pub d: usize,
    pub gamma: f64,
    pub pr: f64,
    pub k_ratio: f64,
    pub cis_ratio_same_k: f64,
    pub cis_ratio_opt_k: f64,
    pub ownn_ratio: f64,
}

pub fn theory_row(p: AsymptoticParams) -> Result<TheoryRow> {
    Ok(TheoryRow {
        d: p.d,
        gamma: p.gamma,
        pr: pr(p)?,
        k_ratio: k_ratio(p)?,
        cis_ratio_same_k: cis_ratio_same_k(p)?,
        cis_ratio_opt_k: cis_ratio_opt_k(p)?,
        ownn_ratio: ownn_ratio(p)?,
    })
}

/// Rows for `γ = 0, step, 2 step, ...` up to `gamma_max`, stopping before `d/3`.
pub fn theory_sweep(d: usize, gamma_max: f64, step: f64) -> Result<Vec<TheoryRow>> {
    if step.is_nan() || step <= 0.0 || !gamma_max.is_finite() {
        return Err(Error::ConfigInvalid(format!("bad sweep step {step} or max {gamma_max}")));
    }
    let edge = d as f64 / 3.0;
    let mut rows = Vec::new();
    for i in 0.. {
        let gamma = i as f64 * step;
        if gamma > gamma_max + 1e-12 || gamma >= edge {
            break;
        }
        rows.push(theory_row(AsymptoticParams::new(d, gamma)?)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: usize, g: f64) -> AsymptoticParams {
        AsymptoticParams::new(d, g).unwrap()
    }

    #[test]
    fn pr_is_one_at_zero() {
        for d in 1..=20 {
            assert_eq!(pr(p(d, 0.0)).unwrap(), 1.0);
        }
    }

    #[test]
    fn pr_reference_value() {
        // 1.125^(2/3) * (2.25/12.25 * 4)^(1/3), evaluated independently in high precision
        assert!((pr(p(2, 0.5)).unwrap() - 0.976_046_455_245_748_7).abs() < 1e-12);
        assert!(pr(p(2, 0.66)).unwrap() > pr(p(2, 0.4)).unwrap());
    }

    #[test]
    fn out_of_regime_is_rejected() {
        assert!(matches!(AsymptoticParams::new(2, 2.0 / 3.0), Err(Error::OutOfRegime { .. })));
        assert!(AsymptoticParams::new(2, -0.1).is_err());
        assert!(AsymptoticParams::new(0, 0.0).is_err());
        assert!(pr(AsymptoticParams { d: 3, gamma: 1.0 }).is_err());
    }

    #[test]
    fn gamma_d_values() {
        let g2 = gamma_d(2);
        assert!(g2 > 0.0 && g2 < 2.0 / 3.0);
        assert!((pr(p(2, g2)).unwrap() - 1.0).abs() <= 1e-12);
        // for d = 2 the root has the closed form 2 - sqrt(2)
        assert!((g2 - (2.0 - 2f64.sqrt())).abs() < 1e-9);
        assert_eq!(gamma_d(4), 4.0 / 3.0);
        let g3 = gamma_d(3);
        assert!(pr(p(3, 0.9 * g3)).unwrap() < 1.0);
        let above = (0.999 * 1.0f64).min(1.1 * g3);
        assert!(pr(p(3, above)).unwrap() > 1.0);
    }

    #[test]
    fn k_ratio_values() {
        assert_eq!(k_ratio(p(3, 0.0)).unwrap(), 1.0);
        // (3.6² / 2.4 * 4/16)^(1/3) = 1.35^(1/3)
        assert!((k_ratio(p(2, 0.4)).unwrap() - 1.35f64.cbrt()).abs() < 1e-14);
        assert!(k_ratio(p(5, 1.0)).unwrap() > 1.0);
    }

    #[test]
    fn cis_ratios() {
        assert_eq!(cis_ratio_same_k(p(2, 0.0)).unwrap(), 1.0);
        assert!((cis_ratio_same_k(p(2, 0.5)).unwrap() - 1.125f64.sqrt()).abs() < 1e-15);
        assert_eq!(cis_ratio_opt_k(p(7, 0.0)).unwrap(), 1.0);
        let opt = cis_ratio_opt_k(p(2, 0.5)).unwrap();
        assert!((opt - 0.976_046_455_245_748_7f64.sqrt()).abs() < 1e-12);
        assert!((opt - 0.9880).abs() < 1e-4);
    }

    #[test]
    fn ownn_values() {
        let expected = 2f64.powf(2.0 / 3.0) * (2.0f64 / 3.0).powf(4.0 / 3.0);
        assert!((ownn_ratio(p(2, 0.0)).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.9245).abs() < 1e-4);
        assert!((ownn_ratio(p(200, 0.0)).unwrap() - 1.0).abs() < 0.02);
        for d in 2..=50 {
            for i in 0..10 {
                let g = i as f64 * 0.1 * d as f64 / 3.0;
                assert!(ownn_ratio(p(d, g)).unwrap() < 1.0, "d={d} g={g}");
            }
        }
    }

    #[test]
    fn moment_limit_values() {
        let m = moment_limits(AsymptoticParams { d: 4, gamma: 0.0 }).unwrap();
        assert_eq!((m.m1, m.m2, m.m1r2_coeff), (1.0, 1.0, 4.0 / 6.0));
        let m = moment_limits(AsymptoticParams { d: 2, gamma: 0.5 }).unwrap();
        assert!((m.m1 - 4.0 / 3.0).abs() < 1e-15);
        assert!((m.m2 - 2.0).abs() < 1e-15);
        assert!((m.m1r2_coeff - 2.0 / 3.5).abs() < 1e-15);
        // allowed up to d/2
        assert!(moment_limits(AsymptoticParams { d: 2, gamma: 0.9 }).is_ok());
        assert!(moment_limits(AsymptoticParams { d: 2, gamma: 1.0 }).is_err());
    }

    #[test]
    fn empirical_moments_at_gamma_zero_are_exactly_one() {
        let est = empirical_moment_check(3, 0.0, 10, 200, 4, RngSeed::new(1, 0)).unwrap();
        assert_eq!(est.m1_hat, 1.0);
        assert_eq!(est.m2_hat, 1.0);
    }

    #[test]
    fn sweep_stops_before_regime_edge() {
        let rows = theory_sweep(2, 0.66, 0.01).unwrap();
        assert_eq!(rows.len(), 67);
        assert!(rows.last().unwrap().gamma < 2.0 / 3.0);
        let rows = theory_sweep(2, 0.4, 0.1).unwrap();
        assert_eq!(rows.len(), 5);
    }
}
