use thiserror::Error;

/// Errors produced by the damped-search toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate search space: n = {n}, m = {m} (need n >= 2 and 1 <= m < n)")]
    DegenerateSpace { n: u64, m: u64 },

    #[error("damping angle {0} is outside [0, pi/2]")]
    PhiOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no discriminant sign change bracketed in ({lo}, {hi})")]
    NoBracket { lo: f64, hi: f64 },

    #[error("did not converge within {0} iterations")]
    NotConverged(u64),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if phi.is_finite() && (0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        Ok(())
    } else {
        Err(Error::PhiOutOfRange(phi))
    }
}

pub(crate) fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite, got {value}"
        )))
    }
}
