use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spin size must be a positive integer, got {0}")]
    InvalidSpin(f64),
    #[error("magnetic quantum number {m} out of range for j = {j}")]
    MOutOfRange { j: u32, m: i64 },
    #[error("no definite-parity state |j,0> with odd parity exists")]
    NoOddZeroState,
    #[error("state must be given in the {expected} basis")]
    WrongBasis { expected: &'static str },
    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("Hamiltonian does not commute with the parity operator (||[H, P]|| = {0:e})")]
    ParityViolation(f64),
    #[error("requested level index {index} but only {available} levels of that parity exist")]
    LevelOutOfRange { index: usize, available: usize },
    #[error("drive amplitude {amplitude_hz:.4e} Hz on transition {transition} exceeds the RWA limit {limit_hz:.4e} Hz")]
    RwaViolation {
        transition: usize,
        amplitude_hz: f64,
        limit_hz: f64,
    },
    #[error("sample rate {sample_rate:.4e} Hz is below the aliasing bound {required:.4e} Hz")]
    Aliasing { sample_rate: f64, required: f64 },
    #[error("time {t:e} s lies outside the schedule support [0, {duration:e}]")]
    OutsideSchedule { t: f64, duration: f64 },
    #[error("integration step underflow at t = {t:e} s (step {step:e} s)")]
    StepUnderflow { t: f64, step: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("ramp from h/gamma_x = {from} to {to} crosses the critical point h/gamma_x = 1")]
    RampCrossesCriticalPoint { from: f64, to: f64 },
    #[error("signal needs at least {required} uniformly spaced samples, got {got}")]
    TooFewSamples { required: usize, got: usize },
    #[error("samples are not uniformly spaced")]
    NonUniformSampling,
    #[error("no critical energy: h/gamma_x = {0} is in the normal phase")]
    NoTransition(f64),
    #[error("energy {energy} lies outside the classically allowed band [{low}, {high}]")]
    OutsideBand { energy: f64, low: f64, high: f64 },
    #[error("quadrature did not converge (estimated error {0:e})")]
    QuadratureFailed(f64),
    #[error("elliptic integral undefined: {0}")]
    EllipticDomain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
