//! Link-level quantities under Rayleigh fading: outage probabilities, the
//! expected minimum relay transmit power, and the relay power-budget ratio Γ.
//!
//! Every link `i` has an SNR threshold `γ_th,i`, a channel-gain variance `σ_i²`
//! and a maximum transmit power `P_i`. The instantaneous SNR is `|g_i|²·P_i`
//! with `|g_i|²` exponential of mean `σ_i²`.

use serde::{Deserialize, Serialize};

use crate::error::{check, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Converts a decibel quantity to linear scale, `10^(x/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// SNR threshold, linear.
    pub gamma_th: f64,
    /// Channel-gain variance σ², linear.
    pub sigma2: f64,
    /// Maximum transmission power (normalized units).
    pub p_max: f64,
}

impl LinkParams {
    pub fn new(gamma_th: f64, sigma2: f64, p_max: f64) -> Result<Self> {
        let link = Self {
            gamma_th,
            sigma2,
            p_max,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn from_db(gamma_th_db: f64, sigma2_db: f64, p_max: f64) -> Result<Self> {
        Self::new(db_to_linear(gamma_th_db), db_to_linear(sigma2_db), p_max)
    }

    pub fn validate(&self) -> Result<()> {
        check("gamma_th", self.gamma_th, self.gamma_th >= 0.0 && self.gamma_th.is_finite(), "a finite value >= 0")?;
        check("sigma2", self.sigma2, self.sigma2 > 0.0 && self.sigma2.is_finite(), "a finite value > 0")?;
        check("p_max", self.p_max, self.p_max > 0.0 && self.p_max.is_finite(), "a finite value > 0")
    }

    /// `γ_th / (σ² P_max)`, the normalized threshold at full power.
    fn outage_exponent(&self) -> f64 {
        self.gamma_th / (self.sigma2 * self.p_max)
    }
}

/// Which algebraic form of the relay-queue rates to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateForm {
    /// Relay arrivals are the relayed share of the primary departures
    /// (`λ_ps = f P_out,p (1−P_out,ps) λ_p/μ_p`) and the relay queue is served
    /// over the secondary-to-primary link.
    #[default]
    FlowBalanced,
    /// The rate expressions exactly as printed, including the extra
    /// `f P_out,p` arrival term and the `(1−P_out,ps)` relay service factor.
    Printed,
}

/// The four links of the relaying scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Links {
    /// PU-Tx to PU-Rx.
    pub p: LinkParams,
    /// SU-Tx to SU-Rx.
    pub s: LinkParams,
    /// PU-Tx to SU-Tx (the relay overhears the primary).
    pub ps: LinkParams,
    /// SU-Tx to PU-Rx (relayed forwarding).
    pub sp: LinkParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub links: Links,
    /// Primary mean arrival rate, packets/slot.
    pub lambda_p: f64,
    /// Secondary mean arrival rate, packets/slot.
    pub lambda_s: f64,
    pub rate_form: RateForm,
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        for link in [self.links.p, self.links.s, self.links.ps, self.links.sp] {
            link.validate()?;
        }
        check("lambda_p", self.lambda_p, (0.0..1.0).contains(&self.lambda_p), "a rate in [0, 1)")?;
        check("lambda_s", self.lambda_s, (0.0..1.0).contains(&self.lambda_s), "a rate in [0, 1)")
    }

    pub fn with_rates(mut self, lambda_p: f64, lambda_s: f64) -> Self {
        self.lambda_p = lambda_p;
        self.lambda_s = lambda_s;
        self
    }

    pub fn outages(&self) -> Outages {
        Outages {
            p: outage_probability(&self.links.p),
            s: outage_probability(&self.links.s),
            ps: outage_probability(&self.links.ps),
            sp: outage_probability(&self.links.sp),
        }
    }
}

impl Default for NetworkParams {
    /// Thresholds 0 dB on every link; σ_p² = 4 dB, σ_ps² = 12 dB,
    /// σ_sp² = 8 dB, σ_s² = 12 dB; P_p = P_ps = P_s = 1, P_sp = 0.25;
    /// λ_p = 0.3, λ_s = 0.1.
    fn default() -> Self {
        let link = |sigma_db: f64, p_max: f64| LinkParams {
            gamma_th: 1.0,
            sigma2: db_to_linear(sigma_db),
            p_max,
        };
        Self {
            links: Links {
                p: link(4.0, 1.0),
                s: link(12.0, 1.0),
                ps: link(12.0, 1.0),
                sp: link(8.0, 0.25),
            },
            lambda_p: 0.3,
            lambda_s: 0.1,
            rate_form: RateForm::FlowBalanced,
        }
    }
}

/// Outage probabilities of the four links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outages {
    pub p: f64,
    pub s: f64,
    pub ps: f64,
    pub sp: f64,
}

/// Probability that `|g|² P_max < γ_th` on a Rayleigh link:
/// `1 − exp(−γ_th / (σ² P_max))`.
pub fn outage_probability(link: &LinkParams) -> f64 {
    -(-link.outage_exponent()).exp_m1()
}

/// Exponential integral `E₁(x) = ∫_x^∞ e^{−t}/t dt` for `x > 0`.
///
/// Power series below 1, modified-Lentz continued fraction above. Returns
/// `+∞` at `x = 0` and `NaN` for negative or NaN input.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x < 1.0 {
        e1_series(x)
    } else {
        e1_continued_fraction(x)
    }
}

fn e1_series(x: f64) -> f64 {
    // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= -x / k;
        let contrib = term / k;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h * (-x).exp()
}

/// Expected minimum transmit power per packet on a link,
/// `(γ_th/σ²)·E₁(γ_th/(σ² P_max))`.
///
/// Zero for a zero threshold. As `P_max → ∞` the E₁ argument goes to 0 and the
/// result grows like `(γ_th/σ²)·ln(σ² P_max/γ_th)`, finite for any finite `P_max`.
pub fn expected_relay_power(link: &LinkParams) -> f64 {
    exp_integral_factor(link) * link.gamma_th / link.sigma2
}

/// The factor `ε = E₁(γ_th/(σ² P_max))`, with `ε·γ_th = 0` taken at `γ_th = 0`.
pub fn exp_integral_factor(link: &LinkParams) -> f64 {
    if link.gamma_th == 0.0 {
        return 0.0;
    }
    // The argument can underflow to 0 for huge P_max; clamp to the smallest
    // normal so E1 stays finite.
    let arg = link.outage_exponent().max(f64::MIN_POSITIVE);
    exp_integral_e1(arg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBudgetReport {
    /// Relay share of the secondary node's average power, Γ.
    pub gamma: f64,
    /// E[P_sp]
    pub e_psp: f64,
    /// E[P_s]
    pub e_ps: f64,
    pub eps_sp: f64,
    pub eps_s: f64,
}

/// Relay power-budget ratio
/// `Γ = λ_ps γ_sp ε_sp σ_s² / (λ_ps γ_sp ε_sp σ_s² + λ_s γ_s ε_s σ_sp²)`.
///
/// `lambda_ps` is the relay arrival rate at the acceptance factor of interest.
/// When nothing is transmitted at all (both weighted rates zero) Γ is 0.
pub fn power_budget(params: &NetworkParams, lambda_ps: f64) -> PowerBudgetReport {
    let sp = &params.links.sp;
    let s = &params.links.s;
    let eps_sp = exp_integral_factor(sp);
    let eps_s = exp_integral_factor(s);
    let relay = lambda_ps * sp.gamma_th * eps_sp * s.sigma2;
    let own = params.lambda_s * s.gamma_th * eps_s * sp.sigma2;
    let denom = relay + own;
    let gamma = if denom > 0.0 { (relay / denom).clamp(0.0, 1.0) } else { 0.0 };
    PowerBudgetReport {
        gamma,
        e_psp: expected_relay_power(sp),
        e_ps: expected_relay_power(s),
        eps_sp,
        eps_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_threshold_never_in_outage() {
        let link = LinkParams::new(0.0, 2.512, 1.0).unwrap();
        assert_eq!(outage_probability(&link), 0.0);
        assert_eq!(expected_relay_power(&link), 0.0);
    }

    #[test]
    fn outage_at_four_db_variance() {
        let link = LinkParams::new(1.0, db_to_linear(4.0), 1.0).unwrap();
        let expected = 1.0 - (-1.0 / db_to_linear(4.0)).exp();
        assert_relative_eq!(outage_probability(&link), expected, max_relative = 1e-14);
        assert_relative_eq!(outage_probability(&link), 0.3284, epsilon = 1e-4);
    }

    #[test]
    fn outage_vanishes_for_large_variance() {
        let link = LinkParams::new(1.0, 1e12, 1.0).unwrap();
        assert!(outage_probability(&link) < 1e-11);
    }

    #[test]
    fn e1_reference_points() {
        // Abramowitz & Stegun table 5.1
        assert_relative_eq!(exp_integral_e1(1.0), 0.219_383_934_395_520_3, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(0.5), 0.559_773_594_776_160_8, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(2.0), 0.048_900_510_708_061_1, max_relative = 1e-13);
        assert!(exp_integral_e1(0.0).is_infinite());
        assert!(exp_integral_e1(-1.0).is_nan());
        assert_eq!(exp_integral_e1(800.0), 0.0);
    }

    #[test]
    fn e1_branches_agree_at_switch() {
        let x = 1.0;
        assert_relative_eq!(e1_series(x), e1_continued_fraction(x), max_relative = 1e-13);
    }

    #[test]
    fn relay_power_unit_link_is_e1_of_one() {
        let link = LinkParams::new(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(expected_relay_power(&link), 0.21938, epsilon = 1e-5);
    }

    #[test]
    fn relay_power_stays_finite_for_huge_power() {
        let link = LinkParams::new(1.0, 6.31, 1e300).unwrap();
        let p = expected_relay_power(&link);
        assert!(p.is_finite() && p > 0.0);
        // logarithmic growth
        let small = expected_relay_power(&LinkParams::new(1.0, 6.31, 1e10).unwrap());
        assert!(p > small);
    }

    #[test]
    fn budget_edge_cases() {
        let params = NetworkParams::default();
        assert_eq!(power_budget(&params, 0.0).gamma, 0.0);
        let silent = params.with_rates(0.3, 0.0);
        assert_eq!(power_budget(&silent, 0.05).gamma, 1.0);
        assert_eq!(power_budget(&silent, 0.0).gamma, 0.0);
    }

    #[test]
    fn rejects_invalid_links() {
        assert!(LinkParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(LinkParams::new(1.0, 0.0, 1.0).is_err());
        assert!(LinkParams::new(1.0, 1.0, 0.0).is_err());
        assert!(LinkParams::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_out_of_range_rates() {
        let mut params = NetworkParams {
            lambda_p: 1.0,
            ..NetworkParams::default()
        };
        assert!(params.validate().is_err());
        params.lambda_p = 0.3;
        params.lambda_s = -0.1;
        assert!(params.validate().is_err());
    }
}
