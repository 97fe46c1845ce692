//! Closed-form exponents of SLE trace regularity.
//!
//! For a moment parameter `r` and SLE parameter `κ` the two basic exponents are
//!
//! ```text
//! q(r) = (1 + κ/4) r − κ r²/8        ζ(r) = r − κ r²/8
//! ```
//!
//! and everything else (the admissible sets `I`, `J₁`, `J₂`, the critical
//! variation index `p*`, the Hölder exponent `α*`) is derived from them. The
//! [`optimize_exponent`] routine recomputes `p*` and `α*` by brute numerical
//! optimization over the admissible sets, independently of the closed forms.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::intervals::{IntervalUnion, OpenInterval};
use crate::math::sqrt;

/// Offset used to stay strictly inside open intervals when evaluating the
/// objective at an endpoint.
pub const ENDPOINT_CLAMP: f64 = 1e-12;

/// Grid points per interval component in [`optimize_exponent`].
pub const OPTIMIZER_GRID: usize = 10_000;

/// Width at which the golden-section search stops.
pub const OPTIMIZER_TOL: f64 = 1e-10;

/// The SLE parameter `κ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Kappa(f64);

impl Kappa {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidKappa(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `false` only at `κ = 8`, where the variation and Hölder sets are empty.
    pub fn attainable(self) -> bool {
        self.0 != 8.0
    }
}

impl TryFrom<f64> for Kappa {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `r` together with `q(r)` and `ζ(r)` for a fixed `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RExponentSet {
    pub r: f64,
    pub q: f64,
    pub zeta: f64,
    pub kappa: Kappa,
}

impl RExponentSet {
    pub fn new(r: f64, kappa: Kappa) -> Self {
        Self { r, q: q_of_r(r, kappa), zeta: zeta_of_r(r, kappa), kappa }
    }
}

/// Smoothness and integrability parameters of a Besov space `W^{δ,q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovParams {
    pub delta: f64,
    pub q: f64,
}

impl BesovParams {
    pub fn new(delta: f64, q: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter { name: "delta", value: delta });
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter { name: "q", value: q });
        }
        Ok(Self { delta, q })
    }

    /// Parameters usable in the variation embedding need `δ − 1/q > 0`.
    pub fn for_embedding(delta: f64, q: f64) -> Result<Self> {
        let params = Self::new(delta, q)?;
        if params.embedding_alpha() <= 0.0 {
            return Err(Error::Domain { what: "besov params", detail: "need delta - 1/q > 0" });
        }
        Ok(params)
    }

    /// Variation index `p = 1/δ` of the embedding.
    pub fn embedding_p(&self) -> f64 {
        1.0 / self.delta
    }

    /// Hölder gain `α = δ − 1/q` of the embedding.
    pub fn embedding_alpha(&self) -> f64 {
        self.delta - 1.0 / self.q
    }
}

pub fn q_of_r(r: f64, kappa: Kappa) -> f64 {
    let k = kappa.0;
    (1.0 + k / 4.0) * r - k * r * r / 8.0
}

pub fn zeta_of_r(r: f64, kappa: Kappa) -> f64 {
    let k = kappa.0;
    r - k * r * r / 8.0
}

/// `r_c = 1/2 + 4/κ`.
pub fn r_critical(kappa: Kappa) -> f64 {
    0.5 + 4.0 / kappa.0
}

/// Roots `r₁± = ((4+κ) ± √(κ²+16))/κ` of `q(r) = 1`.
pub fn r1_pm(kappa: Kappa) -> (f64, f64) {
    let k = kappa.0;
    let disc = sqrt(k * k + 16.0);
    // r₁₋ via the product of roots, r₁₋·r₁₊ = 8/κ, avoids cancellation for small κ.
    let plus = ((4.0 + k) + disc) / k;
    (8.0 / (k * plus), plus)
}

/// Roots `j₁± = 4(1 ± √(1−κ))/κ` of `ζ(r) = 2`; real only for `κ ≤ 1`.
pub fn j1_pm(kappa: Kappa) -> Option<(f64, f64)> {
    let k = kappa.0;
    if k > 1.0 {
        return None;
    }
    let s = sqrt(1.0 - k);
    Some((4.0 * (1.0 - s) / k, 4.0 * (1.0 + s) / k))
}

/// `I = I₀ ∩ I₁ = (r₁₋, r_c)`.
pub fn interval_i(kappa: Kappa) -> IntervalUnion {
    IntervalUnion::single(r1_pm(kappa).0, r_critical(kappa))
}

/// `I₁ = {q > 1} = (r₁₋, r₁₊)`.
pub fn interval_i1(kappa: Kappa) -> IntervalUnion {
    let (lo, hi) = r1_pm(kappa);
    IntervalUnion::single(lo, hi)
}

/// `I₂ = {q + ζ > 0} = (0, 2 r_c)`.
pub fn interval_i2(kappa: Kappa) -> IntervalUnion {
    IntervalUnion::single(0.0, 2.0 * r_critical(kappa))
}

/// `J₁ = {ζ < 2}`: the whole line for `κ > 1`, otherwise the line minus `[j₁₋, j₁₊]`.
pub fn interval_j1(kappa: Kappa) -> IntervalUnion {
    match j1_pm(kappa) {
        None => IntervalUnion::full(),
        Some((lo, hi)) => IntervalUnion::from_pairs(&[(f64::NEG_INFINITY, lo), (hi, f64::INFINITY)]),
    }
}

/// `J₂ = {ζ + q > 2}`, the open interval with endpoints `1` and `8/κ`.
pub fn interval_j2(kappa: Kappa) -> IntervalUnion {
    let e = 8.0 / kappa.0;
    IntervalUnion::single(e.min(1.0), e.max(1.0))
}

/// `I ∩ J₁ ∩ J₂`, written out piecewise in `κ`.
pub fn admissible_pvar(kappa: Kappa) -> IntervalUnion {
    let k = kappa.0;
    let rc = r_critical(kappa);
    if k <= 1.0 {
        let (jm, jp) = j1_pm(kappa).expect("κ ≤ 1");
        IntervalUnion::from_pairs(&[(1.0, jm), (jp.min(rc), rc)])
    } else if k < 8.0 {
        IntervalUnion::single(1.0, rc)
    } else if k == 8.0 {
        IntervalUnion::empty()
    } else {
        IntervalUnion::single(8.0 / k, rc)
    }
}

/// `I ∩ J₁ ∩ J₂` by generic set intersection.
pub fn admissible_pvar_by_intersection(kappa: Kappa) -> IntervalUnion {
    interval_i(kappa).intersect(&interval_j1(kappa)).intersect(&interval_j2(kappa))
}

/// `I ∩ J₁`, the range of `r` giving Besov regularity on `[0,1]`.
pub fn admissible_besov(kappa: Kappa) -> IntervalUnion {
    interval_i(kappa).intersect(&interval_j1(kappa))
}

/// `I ∩ J₂`, the range of `r` for Hölder regularity away from `t = 0`.
pub fn admissible_hoelder(kappa: Kappa) -> IntervalUnion {
    interval_i(kappa).intersect(&interval_j2(kappa))
}

/// `p* = min(1 + κ/8, 2)`. Defined at `κ = 8` for display although not attained there.
pub fn p_star(kappa: Kappa) -> f64 {
    (1.0 + kappa.0 / 8.0).min(2.0)
}

/// `α*(κ) = 1 − κ/(24 + 2κ − 8√(κ+8))`.
pub fn alpha_star(kappa: Kappa) -> f64 {
    let k = kappa.0;
    1.0 - k / (24.0 + 2.0 * k - 8.0 * sqrt(k + 8.0))
}

/// `α₀(κ) = min(α*(κ), 1/2)`, the Hölder exponent up to `t = 0`.
pub fn alpha_zero(kappa: Kappa) -> f64 {
    alpha_star(kappa).min(0.5)
}

/// Upper bound `min(1 + κ/8, 2)` on the Hausdorff dimension of the trace.
pub fn hausdorff_upper(kappa: Kappa) -> f64 {
    p_star(kappa)
}

/// `2q/(ζ+q)`, the variation index reachable from `r`.
pub fn phi_pvar(r: f64, kappa: Kappa) -> Result<f64> {
    let q = q_of_r(r, kappa);
    let s = zeta_of_r(r, kappa) + q;
    if s == 0.0 {
        return Err(Error::Domain { what: "phi_pvar", detail: "zeta(r) + q(r) = 0" });
    }
    Ok(2.0 * q / s)
}

/// `(ζ+q−2)/(2q)`, the Hölder exponent reachable from `r`.
pub fn phi_hoelder(r: f64, kappa: Kappa) -> Result<f64> {
    let q = q_of_r(r, kappa);
    if q == 0.0 {
        return Err(Error::Domain { what: "phi_hoelder", detail: "q(r) = 0" });
    }
    Ok((zeta_of_r(r, kappa) + q - 2.0) / (2.0 * q))
}

/// Stationary points `r± = 4(−2 ± √(8+κ))/κ` of [`phi_hoelder`], returned as `(r₋, r₊)`.
pub fn r_plus_minus_hoelder(kappa: Kappa) -> (f64, f64) {
    let k = kappa.0;
    let s = sqrt(8.0 + k);
    (4.0 * (-2.0 - s) / k, 4.0 * (-2.0 + s) / k)
}

/// Inverse of [`phi_pvar`] on `I`: `((8+κ)p − (8+2κ)) / (κ(p−1))`.
pub fn phi_pvar_inverse(p: f64, kappa: Kappa) -> f64 {
    let k = kappa.0;
    ((8.0 + k) * p - (8.0 + 2.0 * k)) / (k * (p - 1.0))
}

/// Largest moment order `Q(p, κ)` such that the `p`-variation has finite
/// `q`-moments for all `q < Q`. Zero when no admissible `r` works.
pub fn moment_order_q(p: f64, kappa: Kappa) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain { what: "moment_order_q", detail: "need p > 1" });
    }
    let set = admissible_pvar(kappa);
    let (Some(r_min), Some(r_c)) = (set.inf(), set.sup()) else {
        return Ok(0.0);
    };
    let phi = |r| phi_pvar(r, kappa).expect("r inside I");
    if p <= phi(r_min) || p >= phi(r_c) {
        return Ok(0.0);
    }
    // sup{r ∈ set : φ(r) < p}; φ is increasing on I.
    let r_inv = phi_pvar_inverse(p, kappa);
    let r_hat = set
        .intervals()
        .iter()
        .filter(|iv| phi(iv.lo) < p)
        .map(|iv| iv.hi.min(r_inv))
        .fold(f64::NEG_INFINITY, f64::max);
    let q = q_of_r(r_hat, kappa);
    Ok(if q > p { q } else { 0.0 })
}

/// Which end of the Besov embedding a `δ`-window is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMode {
    /// `δ ∈ (0, (ζ+q)/(2q))`, Besov regularity.
    Besov,
    /// `δ ∈ (1/q, (ζ+q)/(2q))`, Besov regularity usable for the variation embedding.
    Pvar,
}

/// Open `δ`-window for `r`. Errors when `r` is not admissible for the mode or
/// the window is empty.
pub fn besov_window(r: f64, kappa: Kappa, mode: WindowMode) -> Result<(f64, f64)> {
    let (set, name) = match mode {
        WindowMode::Besov => (admissible_besov(kappa), "I ∩ J1"),
        WindowMode::Pvar => (admissible_hoelder(kappa), "I ∩ J2"),
    };
    let q = q_of_r(r, kappa);
    let hi = (zeta_of_r(r, kappa) + q) / (2.0 * q);
    let lo = match mode {
        WindowMode::Besov => 0.0,
        WindowMode::Pvar => 1.0 / q,
    };
    if !(lo < hi) {
        return Err(Error::EmptyWindow { lo, hi });
    }
    if !set.contains(r) {
        return Err(Error::NotAdmissible { r, set: name });
    }
    Ok((lo, hi))
}

/// Checks `δ` against the window of `r`, naming the violated bound.
pub fn check_delta(r: f64, kappa: Kappa, mode: WindowMode, delta: f64) -> Result<BesovParams> {
    let (lo, hi) = besov_window(r, kappa, mode)?;
    if !(delta > lo) {
        let bound = match mode {
            WindowMode::Besov => "0",
            WindowMode::Pvar => "1/q",
        };
        return Err(Error::DeltaOutsideWindow { delta, bound, value: lo });
    }
    if !(delta < hi) {
        return Err(Error::DeltaOutsideWindow { delta, bound: "(zeta+q)/(2q)", value: hi });
    }
    BesovParams::new(delta, q_of_r(r, kappa))
}

/// Objective of [`optimize_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Infimum of `2q/(ζ+q)`.
    Pvar,
    /// Supremum of `(ζ+q−2)/(2q)`.
    Hoelder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub r: f64,
    pub value: f64,
}

/// Numerical inf of [`phi_pvar`] (or sup of [`phi_hoelder`]) over a bounded
/// domain: a uniform grid per component, then golden-section refinement
/// around the best grid point. Open endpoints are approached at
/// [`ENDPOINT_CLAMP`] from the inside.
pub fn optimize_exponent(kappa: Kappa, objective: Objective, domain: &IntervalUnion) -> Result<Optimum> {
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    // Maximize `score`; for the p-variation objective it is the negated φ.
    let score = |r: f64| -> f64 {
        let v = match objective {
            Objective::Pvar => phi_pvar(r, kappa),
            Objective::Hoelder => phi_hoelder(r, kappa),
        };
        match (objective, v) {
            (Objective::Pvar, Ok(v)) => -v,
            (Objective::Hoelder, Ok(v)) => v,
            (_, Err(_)) => f64::NEG_INFINITY,
        }
    };
    let mut best: Option<Optimum> = None;
    for iv in domain.intervals() {
        if !iv.is_bounded() {
            return Err(Error::UnboundedDomain { lo: iv.lo, hi: iv.hi });
        }
        let lo = iv.lo + ENDPOINT_CLAMP;
        let hi = iv.hi - ENDPOINT_CLAMP;
        if !(lo < hi) {
            continue;
        }
        let n = OPTIMIZER_GRID;
        let step = (hi - lo) / (n - 1) as f64;
        let node = |i: usize| if i == n - 1 { hi } else { lo + step * i as f64 };
        let (mut arg, mut top) = (0, f64::NEG_INFINITY);
        for i in 0..n {
            let s = score(node(i));
            if s > top {
                top = s;
                arg = i;
            }
        }
        let a = node(arg.saturating_sub(1));
        let b = node((arg + 1).min(n - 1));
        let r = golden_section_max(&score, a, b, OPTIMIZER_TOL);
        let (r, s) = [(r, score(r)), (node(arg), top)]
            .into_iter()
            .fold((r, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
        let value = match objective {
            Objective::Pvar => -s,
            Objective::Hoelder => s,
        };
        let better = match best {
            None => true,
            Some(b) => match objective {
                Objective::Pvar => value < b.value,
                Objective::Hoelder => value > b.value,
            },
        };
        if better {
            best = Some(Optimum { r, value });
        }
    }
    best.ok_or(Error::EmptyDomain)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [a, b, mid].into_iter().fold(mid, |acc, x| if f(x) > f(acc) { x } else { acc })
}

/// One `κ` row of the admissible-region tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub kappa: f64,
    pub i: IntervalUnion,
    pub i_j1: IntervalUnion,
    pub i_j2: IntervalUnion,
    pub i_j1_j2: IntervalUnion,
    /// Maximizer of the Hölder exponent over `I ∩ J₂` (the `r₊` branch), when it exists.
    pub hoelder_argmax: Option<f64>,
}

impl RegionRow {
    pub fn new(kappa: Kappa) -> Self {
        let i_j2 = admissible_hoelder(kappa);
        let (_, r_plus) = r_plus_minus_hoelder(kappa);
        Self {
            kappa: kappa.value(),
            i: interval_i(kappa),
            i_j1: admissible_besov(kappa),
            hoelder_argmax: i_j2.contains(r_plus).then_some(r_plus),
            i_j2,
            i_j1_j2: admissible_pvar(kappa),
        }
    }

    /// `(name, set)` pairs in output order.
    pub fn sets(&self) -> [(&'static str, &IntervalUnion); 4] {
        [("I", &self.i), ("I_J1", &self.i_j1), ("I_J2", &self.i_j2), ("I_J1_J2", &self.i_j1_j2)]
    }
}

/// Admissible sets on `steps` equally spaced `κ` values in `[kappa_lo, kappa_hi]`.
pub fn region_scan(kappa_lo: f64, kappa_hi: f64, steps: usize) -> Result<Vec<RegionRow>> {
    if !(kappa_lo > 0.0) || !(kappa_hi > kappa_lo) || !kappa_hi.is_finite() {
        return Err(Error::InvalidParameter { name: "kappa range", value: kappa_lo });
    }
    if steps < 2 {
        return Err(Error::InvalidParameter { name: "steps", value: steps as f64 });
    }
    let h = (kappa_hi - kappa_lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            let k = if i == steps - 1 { kappa_hi } else { kappa_lo + h * i as f64 };
            Kappa::new(k).map(RegionRow::new)
        })
        .collect()
}

/// Convenience for call sites holding plain pairs.
pub fn interval_pairs(set: &IntervalUnion) -> Vec<(f64, f64)> {
    set.intervals().iter().map(|&OpenInterval { lo, hi }| (lo, hi)).collect()
}
