use std::fmt;

use thiserror::Error;

/// The three queue-stability constraints of the relaying system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityConstraint {
    /// λ_p < μ_p
    Primary,
    /// λ_ps < μ_ps
    Relay,
    /// λ_s < μ_s
    Secondary,
}

impl fmt::Display for StabilityConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StabilityConstraint::Primary => "primary queue (lambda_p < mu_p)",
            StabilityConstraint::Relay => "relay queue (lambda_ps < mu_ps)",
            StabilityConstraint::Secondary => "secondary queue (lambda_s < mu_s)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("unstable {constraint}: arrival rate {arrival} >= service rate {service}")]
    Unstable {
        constraint: StabilityConstraint,
        arrival: f64,
        service: f64,
    },

    #[error("service success probability is zero; service never completes")]
    ZeroSuccessProbability,

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
