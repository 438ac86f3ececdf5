//! Overflow probability of the infinite-buffer relay queue and the derived
//! blocking probability of a finite buffer of room `K`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result, StabilityConstraint};
use crate::queue::ServiceMoments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverflowMode {
    /// `1 − (K+1)·p_n`, clamped to [0, 1], with the occupancy quantity used
    /// as a state-independent `p_n`. Decreases in ρ, unlike the geometric mode.
    Literal,
    /// Geometric occupancy whose mean equals the occupancy quantity `L`:
    /// `Pr[N > K] = σ^{K+1}`, `σ = L/(1+L)`.
    #[default]
    GeometricMatched,
}

impl fmt::Display for OverflowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OverflowMode::Literal => "literal",
            OverflowMode::GeometricMatched => "geometric_matched",
        })
    }
}

impl FromStr for OverflowMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "literal" => Ok(OverflowMode::Literal),
            "geometric_matched" => Ok(OverflowMode::GeometricMatched),
            other => Err(format!("unknown mode `{other}`; expected literal | geometric_matched")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BufferMetrics {
    pub k: u32,
    pub p_n: f64,
    pub p_ov: f64,
    pub p_b: f64,
    pub mode: OverflowMode,
}

fn utilization(lambda: f64, moments: &ServiceMoments) -> Result<f64> {
    check("lambda", lambda, lambda >= 0.0 && lambda.is_finite(), "a rate >= 0")?;
    let rho = lambda * moments.e_s;
    if rho >= 1.0 {
        return Err(Error::Unstable {
            constraint: StabilityConstraint::Relay,
            arrival: lambda,
            service: 1.0 / moments.e_s,
        });
    }
    Ok(rho)
}

/// Pollaczek–Khinchin quantity `ρ + λ²E[S²] / (2(1−ρ))`, the mean number in
/// an M/G/1 system.
pub fn occupancy_quantity(lambda: f64, moments: &ServiceMoments) -> Result<f64> {
    let rho = utilization(lambda, moments)?;
    Ok(rho + lambda * lambda * moments.e_s2 / (2.0 * (1.0 - rho)))
}

pub fn overflow_probability(lambda: f64, moments: &ServiceMoments, k: u32, mode: OverflowMode) -> Result<f64> {
    let p_n = occupancy_quantity(lambda, moments)?;
    Ok(overflow_from_occupancy(p_n, k, mode))
}

fn overflow_from_occupancy(p_n: f64, k: u32, mode: OverflowMode) -> f64 {
    // no arrivals, nothing can overflow
    if p_n == 0.0 {
        return 0.0;
    }
    match mode {
        OverflowMode::Literal => (1.0 - (f64::from(k) + 1.0) * p_n).clamp(0.0, 1.0),
        OverflowMode::GeometricMatched => {
            let sigma = p_n / (1.0 + p_n);
            sigma.powi(k as i32 + 1)
        }
    }
}

/// `p_b = (1−ρ) p_ov / (1 − ρ p_ov)`.
pub fn blocking_probability(p_ov: f64, rho: f64) -> Result<f64> {
    check("p_ov", p_ov, (0.0..=1.0).contains(&p_ov), "a probability in [0, 1]")?;
    check("rho", rho, (0.0..1.0).contains(&rho), "a utilization in [0, 1)")?;
    Ok(((1.0 - rho) * p_ov / (1.0 - rho * p_ov)).clamp(0.0, p_ov))
}

/// `dp_ov/dρ = λ²E[S²]/(ρ−1)² + 1` on the open interval `0 < ρ < 1`.
pub fn overflow_derivative(lambda: f64, moments: &ServiceMoments, rho: f64) -> Result<f64> {
    check("rho", rho, rho > 0.0 && rho < 1.0, "a utilization in (0, 1)")?;
    Ok(lambda * lambda * moments.e_s2 / ((rho - 1.0) * (rho - 1.0)) + 1.0)
}

/// All buffer metrics of a queue with arrival rate `lambda`.
pub fn buffer_metrics(lambda: f64, moments: &ServiceMoments, k: u32, mode: OverflowMode) -> Result<BufferMetrics> {
    let rho = utilization(lambda, moments)?;
    let p_n = occupancy_quantity(lambda, moments)?;
    let p_ov = overflow_from_occupancy(p_n, k, mode);
    let p_b = blocking_probability(p_ov, rho)?;
    Ok(BufferMetrics { k, p_n, p_ov, p_b, mode })
}
