//! Small statistics toolkit for the Monte Carlo experiments.

use rand::Rng;
use serde::Serialize;

/// Arithmetic mean; `NaN` for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; `NaN` below two samples.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean, assuming independent samples.
pub fn std_err(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Median of the means of `blocks` contiguous blocks. Falls back to the plain
/// mean when there are fewer samples than blocks.
pub fn median_of_means(xs: &[f64], blocks: usize) -> f64 {
    if blocks == 0 || xs.len() < blocks {
        return mean(xs);
    }
    let size = xs.len() / blocks;
    let mut means: Vec<f64> = (0..blocks).map(|b| mean(&xs[b * size..(b + 1) * size])).collect();
    median(&mut means)
}

/// Median, reordering the input.
pub fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// `q`-quantile by linear interpolation between order statistics.
pub fn quantile(xs: &mut [f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    xs[lo] + (pos - lo as f64) * (xs[hi] - xs[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn ols(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LinearFit { slope, intercept, slope_se }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction of the scaling factor).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    KsResult { statistic: d, p_value: kolmogorov_q(lambda) }
}

/// Tail of the Kolmogorov distribution, `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sided p-value of a difference of two independent means.
pub fn welch_p_value(a: &[f64], b: &[f64]) -> (f64, f64) {
    let se = (variance(a) / a.len() as f64 + variance(b) / b.len() as f64).sqrt();
    let z = (mean(a) - mean(b)) / se;
    (z, libm::erfc(z.abs() / std::f64::consts::SQRT_2))
}

/// Percentile bootstrap: resamples the rows `n_resamples` times, applies
/// `statistic` to each resample and returns the `(lo, hi)` quantiles of the
/// finite results at the given two-sided `level`.
pub fn bootstrap_interval<T, R, F>(rows: &[T], n_resamples: usize, level: f64, rng: &mut R, mut statistic: F) -> (f64, f64)
where
    T: Clone,
    R: Rng,
    F: FnMut(&[T]) -> f64,
{
    let mut stats = Vec::with_capacity(n_resamples);
    let mut sample = Vec::with_capacity(rows.len());
    for _ in 0..n_resamples {
        sample.clear();
        for _ in 0..rows.len() {
            sample.push(rows[rng.random_range(0..rows.len())].clone());
        }
        let s = statistic(&sample);
        if s.is_finite() {
            stats.push(s);
        }
    }
    let tail = 0.5 * (1.0 - level);
    (quantile(&mut stats, tail), quantile(&mut stats, 1.0 - tail))
}

/// First crossing of zero by the piecewise-linear curve through `(x, y)`,
/// from positive to non-positive.
pub fn zero_crossing(x: &[f64], y: &[f64]) -> Option<f64> {
    for i in 1..x.len() {
        if y[i - 1] > 0.0 && y[i] <= 0.0 {
            let w = y[i - 1] / (y[i - 1] - y[i]);
            return Some(x[i - 1] + w * (x[i] - x[i - 1]));
        }
    }
    None
}
