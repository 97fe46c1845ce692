//! Discrete seminorms of sampled planar paths: p-variation, α-Hölder and the
//! Besov (fractional Sobolev) seminorm `W^{δ,q}`, plus the check of the
//! Besov-variation embedding
//!
//! ```text
//! ‖x‖_{p-var;[s,t]} ≤ C |t−s|^{δ−1/q} ‖x‖_{W^{δ,q};[s,t]},   p = 1/δ.
//! ```
//!
//! All suprema run over the sample times only, so the p-variation and Hölder
//! values are lower bounds for any continuous path through the samples (and
//! exact for the piecewise-linear interpolant in the p-variation case).

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponents::BesovParams;
use crate::math::{abs_pow, hypot, powf};

/// Maximum length accepted by [`p_variation_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 20;

/// Relative tolerance for treating a time grid as uniform.
pub const UNIFORM_GRID_TOL: f64 = 1e-9;

/// Planar path sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    points: Vec<Complex64>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, points: Vec<Complex64>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::LengthMismatch { times: times.len(), points: points.len() });
        }
        if times.len() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: times.len() });
        }
        if let Some(i) = times.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::NonIncreasingTimes(i + 1));
        }
        Ok(Self { times, points })
    }

    /// Real-valued path embedded on the real axis.
    pub fn from_real(times: Vec<f64>, values: &[f64]) -> Result<Self> {
        Self::new(times, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples on the uniform grid `t_i = a + i (b−a)/(n−1)`.
    pub fn uniform(a: f64, b: f64, points: Vec<Complex64>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        let h = (b - a) / (n - 1) as f64;
        let times = (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect();
        Self::new(times, points)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(first time, last time)`.
    pub fn span(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Largest gap between consecutive times.
    pub fn mesh(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Samples with `a ≤ t ≤ b` (up to rounding of the grid).
    pub fn window(&self, a: f64, b: f64) -> Result<Self> {
        let eps = 1e-12 * (1.0 + a.abs().max(b.abs()));
        let lo = self.times.partition_point(|&t| t < a - eps);
        let hi = self.times.partition_point(|&t| t <= b + eps);
        if hi <= lo || hi - lo < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: hi.saturating_sub(lo) });
        }
        Ok(Self { times: self.times[lo..hi].to_vec(), points: self.points[lo..hi].to_vec() })
    }

    /// Every `stride`-th sample, keeping the last one.
    pub fn subsample(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let n = self.len();
        let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
        if *idx.last().unwrap() != n - 1 {
            idx.push(n - 1);
        }
        Self {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            points: idx.iter().map(|&i| self.points[i]).collect(),
        }
    }

    /// Common step of a uniform grid, or the first index where it breaks.
    pub fn uniform_step(&self) -> Result<f64> {
        let (a, b) = self.span();
        let h = (b - a) / (self.len() - 1) as f64;
        for (i, w) in self.times.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > UNIFORM_GRID_TOL * h.max(f64::MIN_POSITIVE) + 1e-15 * b.abs() {
                return Err(Error::NonUniformGrid { index: i + 1 });
            }
        }
        Ok(h)
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        let d = self.points[j] - self.points[i];
        hypot(d.re, d.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeminormKind {
    Pvar,
    Hoelder,
    Besov,
}

impl SeminormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pvar => "pvar",
            Self::Hoelder => "hoelder",
            Self::Besov => "besov",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeminormParams {
    P(f64),
    Alpha(f64),
    Besov { delta: f64, q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub samples: usize,
    pub mesh: f64,
    /// Diagonal cells left out of the Besov double sum.
    pub excluded_cells: usize,
    /// Lebesgue measure of those cells.
    pub excluded_measure: f64,
    /// Subsampling factor applied before the evaluation (1 = none).
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormResult {
    pub value: f64,
    pub kind: SeminormKind,
    pub params: SeminormParams,
    pub window: (f64, f64),
    pub diagnostics: Diagnostics,
}

impl SeminormResult {
    fn new(path: &SampledPath, kind: SeminormKind, params: SeminormParams, value: f64) -> Self {
        Self {
            value,
            kind,
            params,
            window: path.span(),
            diagnostics: Diagnostics { samples: path.len(), mesh: path.mesh(), stride: 1, ..Default::default() },
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "p-variation", detail: "need 1 <= p < inf" })
    }
}

/// p-variation over sub-partitions of the sample times, by the recursion
/// `V[j] = max_{i<j} V[i] + |x_j − x_i|^p`, answer `V[n−1]^{1/p}`. O(n²).
pub fn p_variation(path: &SampledPath, p: f64) -> Result<SeminormResult> {
    check_p(p)?;
    let n = path.len();
    let mut best = alloc::vec![0.0f64; n];
    for j in 1..n {
        let mut v = 0.0f64;
        for (i, &bi) in best[..j].iter().enumerate() {
            let d = path.dist(i, j);
            // x_j = x_i adds nothing beyond V[i], which is already reached through i's own predecessor
            if d == 0.0 {
                continue;
            }
            let cand = bi + abs_pow(d, p);
            if cand > v {
                v = cand;
            }
        }
        best[j] = v;
    }
    let value = powf(best[n - 1], 1.0 / p);
    Ok(SeminormResult::new(path, SeminormKind::Pvar, SeminormParams::P(p), value))
}

/// Exhaustive p-variation over all `2^(n−2)` endpoint-containing subsets.
pub fn p_variation_bruteforce(path: &SampledPath, p: f64) -> Result<SeminormResult> {
    check_p(p)?;
    let n = path.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooManySamples { limit: BRUTEFORCE_LIMIT, got: n });
    }
    let interior = n - 2;
    let mut top = 0.0f64;
    for mask in 0u32..(1u32 << interior) {
        let mut sum = 0.0;
        let mut prev = 0;
        for k in 0..interior {
            if mask & (1 << k) != 0 {
                let d = path.dist(prev, k + 1);
                if d != 0.0 {
                    sum += abs_pow(d, p);
                }
                prev = k + 1;
            }
        }
        let d = path.dist(prev, n - 1);
        if d != 0.0 {
            sum += abs_pow(d, p);
        }
        if sum > top {
            top = sum;
        }
    }
    let value = powf(top, 1.0 / p);
    Ok(SeminormResult::new(path, SeminormKind::Pvar, SeminormParams::P(p), value))
}

/// α-Hölder seminorm, the maximum of `|x_t − x_s|/|t−s|^α` over sample pairs.
pub fn hoelder_norm(path: &SampledPath, alpha: f64) -> Result<SeminormResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    let n = path.len();
    let t = path.times();
    let mut top = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let r = path.dist(i, j) / powf(t[j] - t[i], alpha);
            if r > top {
                top = r;
            }
        }
    }
    Ok(SeminormResult::new(path, SeminormKind::Hoelder, SeminormParams::Alpha(alpha), top))
}

/// [`hoelder_norm`] on every `stride`-th sample; the factor is recorded.
pub fn hoelder_norm_strided(path: &SampledPath, alpha: f64, stride: usize) -> Result<SeminormResult> {
    let sub = path.subsample(stride);
    let mut res = hoelder_norm(&sub, alpha)?;
    res.diagnostics.stride = stride.max(1);
    res.diagnostics.samples = path.len();
    res.diagnostics.mesh = path.mesh();
    Ok(res)
}

/// Besov seminorm `(∫∫ |x_t − x_s|^q / |t−s|^{1+δq} ds dt)^{1/q}` by the
/// midpoint rule on the cells of a uniform grid (end cells have half width).
/// The diagonal cells `i = j` are left out.
pub fn besov_seminorm(path: &SampledPath, params: BesovParams) -> Result<SeminormResult> {
    Ok(besov_seminorm_pow(path, params)?.map_value(|v| powf(v, 1.0 / params.q)))
}

/// [`besov_seminorm`] raised to the power `q`, i.e. the double sum itself.
pub fn besov_seminorm_pow(path: &SampledPath, params: BesovParams) -> Result<SeminormResult> {
    let h = path.uniform_step()?;
    let n = path.len();
    let BesovParams { delta, q } = params;
    let weight = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    let kernel_exp = -(1.0 + delta * q);
    let mut total = 0.0;
    for lag in 1..n {
        let kernel = powf(h * lag as f64, kernel_exp);
        let mut s = 0.0;
        for i in 0..n - lag {
            let d = path.dist(i, i + lag);
            if d != 0.0 {
                s += weight(i) * weight(i + lag) * abs_pow(d, q);
            }
        }
        total += 2.0 * kernel * s;
    }
    let mut res = SeminormResult::new(path, SeminormKind::Besov, SeminormParams::Besov { delta, q }, total);
    res.diagnostics.excluded_cells = n;
    res.diagnostics.excluded_measure = (0..n).map(|i| weight(i) * weight(i)).sum();
    Ok(res)
}

impl SeminormResult {
    fn map_value(mut self, f: impl FnOnce(f64) -> f64) -> Self {
        self.value = f(self.value);
        self
    }
}

/// `S_p(m) = Σ_k |x(t_{k+1}) − x(t_k)|^p` over the `2^m` dyadic pieces of the
/// index range, for `m = 1..=max_level`.
pub fn dyadic_variation_sums(path: &SampledPath, p: f64, max_level: u32) -> Result<Vec<f64>> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter { name: "p", value: p });
    }
    let n = path.len();
    let needed = (1usize << max_level) + 1;
    if max_level == 0 || n < needed {
        return Err(Error::TooFewSamples { needed, got: n });
    }
    let last = n - 1;
    Ok((1..=max_level)
        .map(|m| {
            let pieces = 1usize << m;
            (0..pieces)
                .map(|k| abs_pow(path.dist(k * last / pieces, (k + 1) * last / pieces), p))
                .sum()
        })
        .collect())
}

/// One window of [`embedding_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRow {
    pub window: (f64, f64),
    pub pvar: f64,
    pub hoelder: f64,
    pub besov: f64,
    /// `‖x‖_{p-var} / (|t−s|^α ‖x‖_W)`; `None` when both sides vanish.
    pub ratio: Option<f64>,
    /// `‖x‖_{α-Höl} / ‖x‖_W`; `None` when both sides vanish.
    pub hoelder_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingReport {
    pub rows: Vec<EmbeddingRow>,
    /// Empirical embedding constant: the largest finite ratio.
    pub max_ratio: f64,
    pub max_hoelder_ratio: f64,
    /// Windows where both sides are zero.
    pub vacuous: usize,
    /// Windows with zero Besov seminorm but positive variation.
    pub inconsistent: usize,
}

/// Evaluates both sides of the Besov-variation (and Besov-Hölder) embedding
/// on each window, with `p = 1/δ` and `α = δ − 1/q`.
pub fn embedding_check(path: &SampledPath, params: BesovParams, windows: &[(f64, f64)]) -> Result<EmbeddingReport> {
    let alpha = params.embedding_alpha();
    if !(alpha > 0.0) {
        return Err(Error::Domain { what: "embedding_check", detail: "need delta - 1/q > 0" });
    }
    let p = params.embedding_p();
    let mut report = EmbeddingReport::default();
    for &(s, t) in windows {
        let sub = path.window(s, t)?;
        let (a, b) = sub.span();
        let pvar = p_variation(&sub, p)?.value;
        let hoelder = hoelder_norm(&sub, alpha)?.value;
        let besov = besov_seminorm(&sub, params)?.value;
        let scale = powf(b - a, alpha);
        let ratio = match (pvar > 0.0, besov > 0.0) {
            (false, _) => None,
            (true, true) => Some(pvar / (scale * besov)),
            (true, false) => {
                report.inconsistent += 1;
                Some(f64::INFINITY)
            }
        };
        let hoelder_ratio = match (hoelder > 0.0, besov > 0.0) {
            (false, _) => None,
            (true, true) => Some(hoelder / besov),
            (true, false) => Some(f64::INFINITY),
        };
        if ratio.is_none() {
            report.vacuous += 1;
        }
        if let Some(r) = ratio.filter(|r| r.is_finite()) {
            report.max_ratio = report.max_ratio.max(r);
        }
        if let Some(r) = hoelder_ratio.filter(|r| r.is_finite()) {
            report.max_hoelder_ratio = report.max_hoelder_ratio.max(r);
        }
        report.rows.push(EmbeddingRow { window: (a, b), pvar, hoelder, besov, ratio, hoelder_ratio });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn real_path(values: &[f64]) -> SampledPath {
        let n = values.len();
        SampledPath::from_real((0..n).map(|i| i as f64 / (n - 1) as f64).collect(), values).unwrap()
    }

    fn linear(n: usize, slope: f64) -> SampledPath {
        let pts: Vec<Complex64> = (0..n).map(|i| Complex64::new(slope * i as f64 / (n - 1) as f64, 0.0)).collect();
        SampledPath::uniform(0.0, 1.0, pts).unwrap()
    }

    #[test]
    fn path_validation() {
        assert!(SampledPath::from_real(vec![0.0], &[1.0]).is_err());
        assert!(SampledPath::from_real(vec![0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(SampledPath::from_real(vec![0.0, 1.0], &[1.0]).is_err());
        let p = SampledPath::from_real(vec![0.0, 0.1, 0.3], &[0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(p.uniform_step(), Err(Error::NonUniformGrid { index: 1 })));
    }

    #[test]
    fn window_selects_inclusive_range() {
        let p = linear(11, 1.0);
        let w = p.window(0.2, 0.5).unwrap();
        assert_eq!(w.len(), 4);
        assert!(p.window(0.21, 0.29).is_err());
    }

    #[test]
    fn pvar_of_monotone_segment_is_endpoint_distance() {
        let p = linear(50, 3.0);
        for pp in [1.0, 1.5, 2.0, 4.0] {
            assert!((p_variation(&p, pp).unwrap().value - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pvar_of_zero_driving_trace_is_two() {
        let n = 400;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let pts = times.iter().map(|t| Complex64::new(0.0, 2.0 * t.sqrt())).collect();
        let p = SampledPath::new(times, pts).unwrap();
        for pp in [1.0, 1.25, 2.0] {
            assert!((p_variation(&p, pp).unwrap().value - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pvar_rejects_small_p() {
        assert!(p_variation(&linear(3, 1.0), 0.9).is_err());
        assert!(p_variation_bruteforce(&linear(3, 1.0), 0.5).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let two = real_path(&[0.0, -2.5]);
        assert_eq!(p_variation_bruteforce(&two, 1.7).unwrap().value, powf(powf(2.5, 1.7), 1.0 / 1.7));
        let three = real_path(&[0.0, 1.0, 2.0]);
        assert!((p_variation_bruteforce(&three, 2.0).unwrap().value - 2.0).abs() < 1e-15);
        let zig = real_path(&[0.0, 1.0, -1.0, 0.5]);
        assert!((p_variation_bruteforce(&zig, 1.0).unwrap().value - 4.5).abs() < 1e-15);
        assert!(p_variation_bruteforce(&linear(21, 1.0), 2.0).is_err());
    }

    #[test]
    fn hoelder_examples() {
        let p = linear(30, -2.5);
        assert!((hoelder_norm(&p, 1.0).unwrap().value - 2.5).abs() < 1e-12);
        assert_eq!(hoelder_norm(&real_path(&[1.0; 10]), 0.5).unwrap().value, 0.0);
        assert!(hoelder_norm(&p, 0.0).is_err());
        assert!(hoelder_norm(&p, 1.5).is_err());
        let s = hoelder_norm_strided(&p, 1.0, 4).unwrap();
        assert_eq!(s.diagnostics.stride, 4);
        assert!((s.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn hoelder_half_on_sqrt_trace() {
        // 2(√t − √s)/√(t−s) is maximal at s = ε, t = ε + … and tends to 2 as ε → 0.
        let oracle = |eps: f64| -> f64 {
            // ratio as a function of t at s = ε; maximize by dense search
            (1..200_000)
                .map(|k| {
                    let t = eps + (1.0 - eps) * k as f64 / 200_000.0;
                    2.0 * (t.sqrt() - eps.sqrt()) / (t - eps).sqrt()
                })
                .fold(0.0, f64::max)
        };
        let mut prev = 0.0;
        for eps in [0.1, 0.01, 0.001] {
            let n = 2000;
            let times: Vec<f64> = (0..n).map(|i| eps + (1.0 - eps) * i as f64 / (n - 1) as f64).collect();
            let pts = times.iter().map(|t| Complex64::new(0.0, 2.0 * t.sqrt())).collect();
            let v = hoelder_norm(&SampledPath::new(times, pts).unwrap(), 0.5).unwrap().value;
            assert!(v <= 2.0 + 1e-12);
            assert!((v - oracle(eps)).abs() < 2e-3, "{v} vs {}", oracle(eps));
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn besov_constant_and_linear() {
        let params = BesovParams::new(0.7, 2.0).unwrap();
        let flat = SampledPath::uniform(0.0, 1.0, vec![Complex64::new(1.0, 1.0); 64]).unwrap();
        assert_eq!(besov_seminorm(&flat, params).unwrap().value, 0.0);
        for (d, q) in [(0.7, 2.0), (0.55, 4.0)] {
            let a: f64 = q * (1.0 - d);
            let exact = powf(2.0 / (a * (a + 1.0)), 1.0 / q);
            let v = besov_seminorm(&linear(1 << 12, 1.0), BesovParams::new(d, q).unwrap()).unwrap();
            assert!(((v.value - exact) / exact).abs() < 0.01);
            assert_eq!(v.diagnostics.excluded_cells, 1 << 12);
        }
    }

    #[test]
    fn besov_rejects_nonuniform_grid() {
        let p = SampledPath::from_real(vec![0.0, 0.1, 0.3, 0.4], &[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            besov_seminorm(&p, BesovParams::new(0.5, 2.0).unwrap()),
            Err(Error::NonUniformGrid { .. })
        ));
    }

    #[test]
    fn besov_time_dilation_exponent() {
        // y(t) = x(t/λ) on [0, λ]: ∫∫ picks up λ² from ds dt and λ^{−1−δq}
        // from the kernel, so the seminorm scales by λ^{(1−δq)/q}.
        let params = BesovParams::new(0.6, 3.0).unwrap();
        let n = 1 << 9;
        let pts: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                Complex64::new((7.0 * t).sin(), t * t)
            })
            .collect();
        let x = SampledPath::uniform(0.0, 1.0, pts.clone()).unwrap();
        for lambda in [0.25, 3.0] {
            let y = SampledPath::uniform(0.0, lambda, pts.clone()).unwrap();
            let ratio = besov_seminorm(&y, params).unwrap().value / besov_seminorm(&x, params).unwrap().value;
            let expect = powf(lambda, (1.0 - params.delta * params.q) / params.q);
            assert!((ratio / expect - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn besov_refinement_converges() {
        let params = BesovParams::new(0.7, 2.0).unwrap();
        let f = |t: f64| Complex64::new((3.0 * t).sin(), (t - 0.4).abs());
        let est = |n: usize| {
            let pts = (0..n).map(|i| f(i as f64 / (n - 1) as f64)).collect();
            besov_seminorm(&SampledPath::uniform(0.0, 1.0, pts).unwrap(), params).unwrap().value
        };
        let (a, b) = (est(1 << 12), est(1 << 13));
        assert!(((a - b) / b).abs() < 0.005, "{a} {b}");
    }

    #[test]
    fn dyadic_sums_examples() {
        let p = linear(1 << 6 | 1, 2.0);
        let s = dyadic_variation_sums(&p, 1.5, 6).unwrap();
        for (m, v) in s.iter().enumerate() {
            let m = (m + 1) as f64;
            let want = powf(2.0, m * (1.0 - 1.5)) * powf(2.0, 1.5);
            assert!((v - want).abs() < 1e-12);
        }
        let mono = real_path(&(0..65).map(|i| (i as f64).sqrt()).collect::<Vec<_>>());
        let s1 = dyadic_variation_sums(&mono, 1.0, 6).unwrap();
        assert!(s1.iter().all(|v| (v - 8.0).abs() < 1e-12));
        assert!(dyadic_variation_sums(&p, 1.0, 7).is_err());
    }

    #[test]
    fn embedding_on_linear_path() {
        let params = BesovParams::for_embedding(0.75, 2.0).unwrap();
        let p = linear(1 << 10, 1.0);
        let rep = embedding_check(&p, params, &[(0.0, 1.0)]).unwrap();
        let a: f64 = 2.0 * 0.25;
        let besov = (2.0 / (a * (a + 1.0))).sqrt();
        let row = &rep.rows[0];
        assert!((row.pvar - 1.0).abs() < 1e-12);
        assert!((row.besov / besov - 1.0).abs() < 0.02);
        assert!((row.ratio.unwrap() - 1.0 / besov).abs() < 0.02);
        let flat = SampledPath::uniform(0.0, 1.0, vec![Complex64::new(0.0, 0.0); 32]).unwrap();
        let rep = embedding_check(&flat, params, &[(0.0, 1.0), (0.2, 0.6)]).unwrap();
        assert_eq!(rep.vacuous, 2);
        assert_eq!(rep.inconsistent, 0);
        assert!(embedding_check(&p, BesovParams::new(0.4, 2.0).unwrap(), &[(0.0, 1.0)]).is_err());
    }

    fn arb_path(max: usize) -> impl Strategy<Value = SampledPath> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..=max).prop_map(|v| {
            let pts: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            SampledPath::uniform(0.0, 1.0, pts).unwrap()
        })
    }

    proptest! {
        #[test]
        fn dp_equals_bruteforce(path in arb_path(12), k in 0usize..4) {
            let p = [1.0, 1.3, 2.0, 3.7][k];
            prop_assert_eq!(p_variation(&path, p).unwrap().value, p_variation_bruteforce(&path, p).unwrap().value);
        }

        #[test]
        fn pvar_monotone_in_p(path in arb_path(30), p1 in 1.0f64..3.0, dp in 0.0f64..2.0) {
            let a = p_variation(&path, p1).unwrap().value;
            let b = p_variation(&path, p1 + dp).unwrap().value;
            prop_assert!(b <= a * (1.0 + 1e-12));
        }

        #[test]
        fn lower_bounds_by_endpoint_increment(path in arb_path(30), p in 1.0f64..4.0, alpha in 0.05f64..1.0) {
            let n = path.len();
            let inc = path.dist(0, n - 1);
            prop_assert!(p_variation(&path, p).unwrap().value >= inc * (1.0 - 1e-12));
            let (a, b) = path.span();
            prop_assert!(hoelder_norm(&path, alpha).unwrap().value * powf(b - a, alpha) >= inc * (1.0 - 1e-12));
        }

        #[test]
        fn pvar_dominates_pieces(path in arb_path(30), p in 1.0f64..4.0, cut in 0.1f64..0.9) {
            let (a, b) = path.span();
            let c = a + cut * (b - a);
            let whole = p_variation(&path, p).unwrap().value;
            for piece in [path.window(a, c), path.window(c, b)].into_iter().flatten() {
                prop_assert!(whole >= p_variation(&piece, p).unwrap().value * (1.0 - 1e-12));
            }
        }

        #[test]
        fn bruteforce_p1_is_full_refinement(path in arb_path(12)) {
            let full: f64 = (1..path.len()).map(|i| path.dist(i - 1, i)).sum();
            let bf = p_variation_bruteforce(&path, 1.0).unwrap().value;
            prop_assert!((bf - full).abs() <= 1e-12 * (1.0 + full));
        }
    }
}
