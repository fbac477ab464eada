//! Small summary-statistics helpers. Every reduction runs sequentially in
//! input order, so results never depend on how the inputs were produced.

/// Sample mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanStd {
    pub mean: f64,
    /// Unbiased (n - 1) standard deviation; zero when `n < 2`.
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn from_slice(xs: &[f64]) -> Self {
        Self::from_iter(xs.iter().copied())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_iter(xs: impl IntoIterator<Item = f64>) -> Self {
        // Welford
        let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for x in xs {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        let std = if n > 1 { (m2 / (n - 1) as f64).max(0.0).sqrt() } else { 0.0 };
        MeanStd { mean, std, n }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.std / (self.n as f64).sqrt()
        }
    }
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need two points for a fit");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Standard error of `a / b` by the delta method, for paired per-repetition
/// samples `a_i`, `b_i`.
pub fn ratio_stderr(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let ma = MeanStd::from_slice(a);
    let mb = MeanStd::from_slice(b);
    if mb.mean == 0.0 {
        return f64::NAN;
    }
    let r = ma.mean / mb.mean;
    // residuals a_i - r b_i carry the first-order error of the ratio
    let resid = MeanStd::from_iter(a.iter().zip(b).map(|(x, y)| x - r * y));
    resid.stderr() / mb.mean.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_basic() {
        let m = MeanStd::from_slice(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m.mean - 2.5).abs() < 1e-15);
        assert!((m.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((m.stderr() - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(MeanStd::from_slice(&[7.0]).std, 0.0);
    }

    #[test]
    fn exact_line_fit() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v + 2.0).collect();
        let (s, c) = linear_fit(&x, &y);
        assert!((s + 0.5).abs() < 1e-14 && (c - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ratio_stderr_zero_for_proportional_samples() {
        let a = [2.0, 4.0, 6.0];
        let b = [1.0, 2.0, 3.0];
        assert!(ratio_stderr(&a, &b).abs() < 1e-15);
    }
}
