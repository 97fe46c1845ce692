//! Chordal Loewner chains driven by `U_t = √κ B_t`, discretized as a
//! composition of vertical slit maps (the zipper scheme).
//!
//! On each capacity-time step `[t_j, t_j + dt]` the driving function is frozen
//! at `u_j = U_{t_j}`, and the Loewner equation `∂_t g_t = 2/(g_t − U_t)` is
//! solved exactly:
//!
//! ```text
//! forward   g ↦ u_j + √((g − u_j)² + 4dt)
//! inverse   w ↦ u_j + √((w − u_j)² − 4dt)
//! ```
//!
//! The inverse flow `f_{t_k} = g_{t_k}^{-1}` is obtained by applying the
//! inverse maps for `j = k−1, …, 0`. Every elementary map sends the upper
//! half-plane into itself, so half-plane preservation is structural. The
//! only way to leave it is an input point with negative imaginary part; such
//! points are clamped onto the real line and counted.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exponents::Kappa;
use crate::math::{slit_sqrt, sqrt};
use crate::regularity::SampledPath;
use crate::rng;

/// Below this modulus an elementary map is evaluated at the base of its slit,
/// where the derivative of the inverse map blows up.
pub const SINGULAR_MODULUS: f64 = 1e-14;

/// Sampled driving function on a uniform capacity-time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingPath {
    kappa: f64,
    dt: f64,
    values: Vec<f64>,
    seed: u64,
}

impl DrivingPath {
    /// `√κ B` on `n_steps` steps of length `horizon / n_steps`, drawn from
    /// stream 0 of `seed`.
    pub fn sample(kappa: Kappa, horizon: f64, n_steps: usize, seed: u64) -> Result<Self> {
        Self::sample_stream(kappa, horizon, n_steps, seed, 0)
    }

    /// As [`DrivingPath::sample`], drawing from stream `index` of `seed`.
    pub fn sample_stream(kappa: Kappa, horizon: f64, n_steps: usize, seed: u64, index: u64) -> Result<Self> {
        let mut path = Self::sample_with(kappa, horizon, n_steps, &mut rng::stream(seed, index))?;
        path.seed = seed;
        Ok(path)
    }

    /// Draws the Gaussian increments from a caller-supplied generator.
    pub fn sample_with<R: Rng + ?Sized>(kappa: Kappa, horizon: f64, n_steps: usize, rng: &mut R) -> Result<Self> {
        let dt = step_length(horizon, n_steps)?;
        let scale = sqrt(kappa.value() * dt);
        let mut values = Vec::with_capacity(n_steps + 1);
        let mut u = 0.0;
        values.push(u);
        for _ in 0..n_steps {
            let z: f64 = StandardNormal.sample(rng);
            u += scale * z;
            values.push(u);
        }
        Ok(Self { kappa: kappa.value(), dt, values, seed: 0 })
    }

    /// Identically zero driving (`κ = 0`), whose trace is `2i√t`.
    pub fn zero(horizon: f64, n_steps: usize) -> Result<Self> {
        let dt = step_length(horizon, n_steps)?;
        Ok(Self { kappa: 0.0, dt, values: alloc::vec![0.0; n_steps + 1], seed: 0 })
    }

    /// Wraps externally produced values; `values[0]` must be `0`.
    pub fn from_values(kappa: f64, dt: f64, values: Vec<f64>, seed: u64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidKappa(kappa));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter { name: "dt", value: dt });
        }
        if values.len() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: values.len() });
        }
        if values[0] != 0.0 {
            return Err(Error::DrivingNotAnchored(values[0]));
        }
        Ok(Self { kappa, dt, values, seed })
    }

    /// Brownian rescaling `U'(t) = λ U(t/λ²)`: values times `λ`, step times `λ²`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            kappa: self.kappa,
            dt: self.dt * lambda * lambda,
            values: self.values.iter().map(|u| u * lambda).collect(),
            seed: self.seed,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of steps (one less than the number of samples).
    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps() as f64
    }

    pub fn time(&self, index: usize) -> f64 {
        self.dt * index as f64
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.values.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.values.len() })
        }
    }

    /// `f_{t_k}(w)`: pull `w` back through the first `k` slit maps.
    pub fn inverse_flow(&self, k: usize, w: Complex64) -> Result<Evaluation> {
        self.check_index(k)?;
        let mut lane = [Lane::new(k, w)];
        let clamps = pull_back::<false>(&self.values, 4.0 * self.dt, &mut lane);
        Ok(Evaluation { point: Complex64::new(lane[0].x, lane[0].y), clamps })
    }

    /// `|f'_{t_k}(w)|` by the chain rule through the elementary maps.
    pub fn inverse_flow_derivative(&self, k: usize, w: Complex64) -> Result<DerivativeSample> {
        self.check_index(k)?;
        let mut lane = [Lane::new(k, w)];
        pull_back::<true>(&self.values, 4.0 * self.dt, &mut lane);
        Ok(lane[0].derivative())
    }

    /// `f̂_{t_k}(z) = f_{t_k}(z + U_{t_k})`.
    pub fn fhat(&self, k: usize, z: Complex64) -> Result<Evaluation> {
        self.check_index(k)?;
        self.inverse_flow(k, z + self.values[k])
    }

    /// `f̂_{t_k}(iy)`.
    pub fn fhat_eval(&self, k: usize, y: f64) -> Result<Evaluation> {
        check_height(y)?;
        self.fhat(k, Complex64::new(0.0, y))
    }

    /// `|f̂'_{t_k}(z)|`.
    pub fn fhat_derivative_at(&self, k: usize, z: Complex64) -> Result<DerivativeSample> {
        self.check_index(k)?;
        self.inverse_flow_derivative(k, z + self.values[k])
    }

    /// `|f̂'_{t_k}(iy)|`.
    pub fn fhat_derivative(&self, k: usize, y: f64) -> Result<DerivativeSample> {
        check_height(y)?;
        self.fhat_derivative_at(k, Complex64::new(0.0, y))
    }

    /// `|f̂'_{t_k}(z_k)|` for many `(k, z_k)` at once. Same values as
    /// [`DrivingPath::fhat_derivative_at`], evaluated with interleaved lanes.
    pub fn fhat_derivatives(&self, queries: &[(usize, Complex64)]) -> Result<Vec<DerivativeSample>> {
        let mut lanes = self.shifted_lanes(queries)?;
        pull_back::<true>(&self.values, 4.0 * self.dt, &mut lanes);
        Ok(lanes.iter().map(Lane::derivative).collect())
    }

    /// `f̂_{t_k}(z_k)` for many `(k, z_k)` at once.
    pub fn fhat_many(&self, queries: &[(usize, Complex64)]) -> Result<(Vec<Complex64>, u64)> {
        let mut lanes = self.shifted_lanes(queries)?;
        let clamps = pull_back::<false>(&self.values, 4.0 * self.dt, &mut lanes);
        Ok((lanes.iter().map(|l| Complex64::new(l.x, l.y)).collect(), clamps))
    }

    fn shifted_lanes(&self, queries: &[(usize, Complex64)]) -> Result<Vec<Lane>> {
        queries
            .iter()
            .map(|&(k, z)| {
                self.check_index(k)?;
                if !(z.im > 0.0) {
                    return Err(Error::InvalidParameter { name: "y", value: z.im });
                }
                Ok(Lane::new(k, z + self.values[k]))
            })
            .collect()
    }

    /// `g_{t_k}(z)` by composing the forward slit maps.
    pub fn forward_flow(&self, k: usize, z: Complex64) -> Result<Complex64> {
        self.check_index(k)?;
        let c = -4.0 * self.dt;
        let (mut x, mut y) = (z.re, z.im);
        for &u in &self.values[..k] {
            let (sr, si) = slit_sqrt(x - u, y, c);
            x = u + sr;
            y = si;
        }
        Ok(Complex64::new(x, y))
    }

    /// Trace at every grid time, `γ(t_k) ≈ f̂_{t_k}(i·y_eval)`.
    pub fn trace(&self, y_eval: f64) -> Result<TracePath> {
        let all: Vec<usize> = (0..self.values.len()).collect();
        self.trace_at(&all, y_eval)
    }

    /// Trace at every `stride`-th grid time (always including time 0).
    pub fn trace_strided(&self, stride: usize, y_eval: f64) -> Result<TracePath> {
        if stride == 0 {
            return Err(Error::InvalidParameter { name: "stride", value: 0.0 });
        }
        let idx: Vec<usize> = (0..self.values.len()).step_by(stride).collect();
        self.trace_at(&idx, y_eval)
    }

    /// Trace at the given grid indices.
    pub fn trace_at(&self, indices: &[usize], y_eval: f64) -> Result<TracePath> {
        check_height(y_eval)?;
        let queries: Vec<(usize, Complex64)> = indices.iter().map(|&k| (k, Complex64::new(0.0, y_eval))).collect();
        let (points, clamps) = self.fhat_many(&queries)?;
        let times = indices.iter().map(|&k| self.time(k)).collect();
        Ok(TracePath { times, points, clamps })
    }
}

/// Default evaluation height `√dt`.
pub fn default_height(dt: f64) -> f64 {
    sqrt(dt)
}

fn step_length(horizon: f64, n_steps: usize) -> Result<f64> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidParameter { name: "horizon", value: horizon });
    }
    if n_steps == 0 {
        return Err(Error::InvalidParameter { name: "n_steps", value: 0.0 });
    }
    Ok(horizon / n_steps as f64)
}

fn check_height(y: f64) -> Result<()> {
    if y > 0.0 && y.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "y", value: y })
    }
}

/// Points pulled back together in one sweep.
const LANES: usize = 16;

/// A point travelling backwards through the slit maps, starting after map `k`.
#[derive(Debug, Clone, Copy)]
struct Lane {
    k: usize,
    x: f64,
    y: f64,
    /// `|f'|²` accumulated so far.
    dsq: f64,
    flagged: bool,
}

impl Lane {
    fn new(k: usize, w: Complex64) -> Self {
        Self { k, x: w.re, y: w.im, dsq: 1.0, flagged: false }
    }

    fn derivative(&self) -> DerivativeSample {
        if self.flagged {
            DerivativeSample { value: f64::NAN, flagged: true }
        } else {
            DerivativeSample { value: sqrt(self.dsq), flagged: false }
        }
    }
}

/// Applies inverse map `j` (driving value `u`) to one point. Returns whether
/// the input had to be clamped onto the real axis.
#[inline(always)]
fn inverse_step<const DERIV: bool>(u: f64, c: f64, x: &mut f64, y: &mut f64, dsq: &mut f64, flagged: &mut bool) -> bool {
    let clamped = *y < 0.0;
    let yv = if clamped { 0.0 } else { *y };
    let xr = *x - u;
    let (sr, si) = slit_sqrt(xr, yv, c);
    if DERIV {
        let den = sr * sr + si * si;
        *flagged |= den < SINGULAR_MODULUS * SINGULAR_MODULUS;
        *dsq *= (xr * xr + yv * yv) / den;
    }
    *x = u + sr;
    *y = si;
    clamped
}

/// Pulls every lane back to time 0. Lanes are grouped by start index, largest
/// first; within a group a lane joins the shared sweep once the sweep reaches
/// its own start index. Per-lane arithmetic is identical to a lone
/// evaluation. Returns the number of clamps.
fn pull_back<const DERIV: bool>(drive: &[f64], c: f64, lanes: &mut [Lane]) -> u64 {
    let mut order: Vec<usize> = (0..lanes.len()).collect();
    order.sort_by_key(|&i| core::cmp::Reverse(lanes[i].k));
    let mut clamps = 0u64;
    for group in order.chunks(LANES) {
        let mut xs = [0.0f64; LANES];
        let mut ys = [1.0f64; LANES];
        let mut ds = [1.0f64; LANES];
        let mut fl = [false; LANES];
        for (slot, &i) in group.iter().enumerate() {
            xs[slot] = lanes[i].x;
            ys[slot] = lanes[i].y;
            ds[slot] = lanes[i].dsq;
            fl[slot] = lanes[i].flagged;
        }
        let mut cl = [0u64; LANES];
        for active in 1..=group.len() {
            let hi = lanes[group[active - 1]].k;
            let lo = if active < group.len() { lanes[group[active]].k } else { 0 };
            if active == LANES {
                for &u in drive[lo..hi].iter().rev() {
                    for s in 0..LANES {
                        cl[s] += inverse_step::<DERIV>(u, c, &mut xs[s], &mut ys[s], &mut ds[s], &mut fl[s]) as u64;
                    }
                }
            } else {
                for &u in drive[lo..hi].iter().rev() {
                    for s in 0..active {
                        cl[s] += inverse_step::<DERIV>(u, c, &mut xs[s], &mut ys[s], &mut ds[s], &mut fl[s]) as u64;
                    }
                }
            }
        }
        for (slot, &i) in group.iter().enumerate() {
            let l = &mut lanes[i];
            l.x = xs[slot];
            l.y = ys[slot];
            l.dsq = ds[slot];
            l.flagged = fl[slot];
            clamps += cl[slot];
        }
    }
    clamps
}

/// Result of pulling a point back through the slit maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub point: Complex64,
    /// Number of intermediate points clamped back onto the closed half-plane.
    pub clamps: u64,
}

/// `|f'|` at one point. Flagged samples hit a slit base and carry no value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeSample {
    pub value: f64,
    pub flagged: bool,
}

/// Sampled trace `γ(t_k)` in capacity parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePath {
    pub times: Vec<f64>,
    pub points: Vec<Complex64>,
    /// Half-plane clamps performed while building the trace.
    pub clamps: u64,
}

impl TracePath {
    pub fn new(times: Vec<f64>, points: Vec<Complex64>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::LengthMismatch { times: times.len(), points: points.len() });
        }
        Ok(Self { times, points, clamps: 0 })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn to_sampled(&self) -> Result<SampledPath> {
        SampledPath::new(self.times.clone(), self.points.clone())
    }
}
