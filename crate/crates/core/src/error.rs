use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kappa must be a positive finite number, got {0}")]
    InvalidKappa(f64),
    #[error("{what} is outside its domain: {detail}")]
    Domain { what: &'static str, detail: &'static str },
    #[error("r = {r} is not in the admissible set {set}")]
    NotAdmissible { r: f64, set: &'static str },
    #[error("empty delta window ({lo}, {hi})")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("delta = {delta} violates the window bound {bound} = {value}")]
    DeltaOutsideWindow { delta: f64, bound: &'static str, value: f64 },
    #[error("path needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("path has {got} samples, exhaustive search is limited to {limit}")]
    TooManySamples { limit: usize, got: usize },
    #[error("times must be strictly increasing (index {0})")]
    NonIncreasingTimes(usize),
    #[error("time grid is not uniform at index {index}; resample onto a uniform grid first")]
    NonUniformGrid { index: usize },
    #[error("times and points differ in length ({times} vs {points})")]
    LengthMismatch { times: usize, points: usize },
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("driving path must start at 0, got {0}")]
    DrivingNotAnchored(f64),
    #[error("time index {index} out of range for a path with {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty domain: no admissible r")]
    EmptyDomain,
    #[error("unbounded domain component ({lo}, {hi})")]
    UnboundedDomain { lo: f64, hi: f64 },
}
