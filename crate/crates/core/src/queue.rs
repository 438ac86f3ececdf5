//! Closed-form queue rates, utilizations and delays as functions of the
//! acceptance factor `f`, together with the analytic slope `dD̄_s/df`.
//!
//! Service times of the relay and secondary queues are geometric with the
//! per-slot service rate as success probability; the primary queue is treated
//! in isolation (dominant-system argument).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;

use crate::channel::{power_budget, NetworkParams, Outages, PowerBudgetReport, RateForm};
use crate::error::{check, Error, Result, StabilityConstraint};

/// Failure probability of the link the relay queue is served over.
fn relay_service_outage(form: RateForm, out: &Outages) -> f64 {
    match form {
        RateForm::FlowBalanced => out.sp,
        RateForm::Printed => out.ps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSet {
    pub f: f64,
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub mu_p: f64,
    pub lambda_ps: f64,
    pub mu_ps: f64,
    pub mu_s: f64,
    pub rho_p: f64,
    pub rho_ps: f64,
    pub rho_s: f64,
}

impl RateSet {
    /// The first violated stability constraint, checked in the order
    /// primary, relay, secondary.
    pub fn violated(&self) -> Option<StabilityConstraint> {
        if !(self.lambda_p < self.mu_p) {
            Some(StabilityConstraint::Primary)
        } else if !(self.lambda_ps < self.mu_ps) {
            Some(StabilityConstraint::Relay)
        } else if !(self.lambda_s < self.mu_s) {
            Some(StabilityConstraint::Secondary)
        } else {
            None
        }
    }

    pub fn is_stable(&self) -> bool {
        self.violated().is_none()
    }

    pub fn require_stable(&self) -> Result<()> {
        match self.violated() {
            None => Ok(()),
            Some(c) => Err(self.instability(c)),
        }
    }

    pub fn instability(&self, constraint: StabilityConstraint) -> Error {
        let (arrival, service) = match constraint {
            StabilityConstraint::Primary => (self.lambda_p, self.mu_p),
            StabilityConstraint::Relay => (self.lambda_ps, self.mu_ps),
            StabilityConstraint::Secondary => (self.lambda_s, self.mu_s),
        };
        Error::Unstable {
            constraint,
            arrival,
            service,
        }
    }

    /// Constraint values `λ_ps − μ_ps` and `λ_s − μ_s` (negative when slack).
    pub fn relay_slack(&self) -> f64 {
        self.lambda_ps - self.mu_ps
    }

    pub fn secondary_slack(&self) -> f64 {
        self.lambda_s - self.mu_s
    }
}

/// Per-queue rates at acceptance factor `f`.
///
/// When the primary queue is unstable (`μ_p ≤ λ_p`) the downstream rates are
/// meaningless; they are reported as NaN and the set is flagged unstable.
pub fn rate_set(params: &NetworkParams, f: f64) -> Result<RateSet> {
    check("f", f, (0.0..=1.0).contains(&f), "an acceptance factor in [0, 1]")?;
    let out = params.outages();
    let lp = params.lambda_p;
    let ls = params.lambda_s;
    let relayable = out.p * (1.0 - out.ps);
    let mu_p = (1.0 - out.p) + f * relayable;
    let rho_p = lp / mu_p;

    if !(lp < mu_p) {
        return Ok(RateSet {
            f,
            lambda_p: lp,
            lambda_s: ls,
            mu_p,
            lambda_ps: f64::NAN,
            mu_ps: f64::NAN,
            mu_s: f64::NAN,
            rho_p,
            rho_ps: f64::NAN,
            rho_s: f64::NAN,
        });
    }

    let lambda_ps = match params.rate_form {
        RateForm::FlowBalanced => f * relayable * rho_p,
        RateForm::Printed => f * out.p + f * relayable * rho_p,
    };
    let idle = 1.0 - rho_p;
    let q_relay = 1.0 - relay_service_outage(params.rate_form, &out);
    let mu_ps = idle * q_relay;
    let rho_ps = if lambda_ps == 0.0 { 0.0 } else { lambda_ps / mu_ps };
    let mu_s = idle * (1.0 - out.s) * (1.0 - rho_ps * (1.0 - out.sp));
    let rho_s = if ls == 0.0 { 0.0 } else { ls / mu_s };

    Ok(RateSet {
        f,
        lambda_p: lp,
        lambda_s: ls,
        mu_p,
        lambda_ps,
        mu_ps,
        mu_s,
        rho_p,
        rho_ps,
        rho_s,
    })
}

/// Γ at acceptance factor `f`; needs only the primary queue to be stable.
pub fn power_budget_at(params: &NetworkParams, f: f64) -> Result<PowerBudgetReport> {
    let rates = rate_set(params, f)?;
    if rates.violated() == Some(StabilityConstraint::Primary) {
        return Err(rates.instability(StabilityConstraint::Primary));
    }
    Ok(power_budget(params, rates.lambda_ps))
}

/// First two moments of a geometric service time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ServiceMoments {
    pub e_s: f64,
    pub e_s2: f64,
}

impl ServiceMoments {
    /// Mean residual service `E[S²] / (2 E[S])`.
    pub fn residual(&self) -> f64 {
        self.e_s2 / (2.0 * self.e_s)
    }
}

/// `E[S] = 1/p`, `E[S²] = (1−p)/p²` for per-slot success probability `p`.
pub fn geometric_moments(p: f64) -> Result<ServiceMoments> {
    if p == 0.0 {
        return Err(Error::ZeroSuccessProbability);
    }
    check("p", p, p > 0.0 && p <= 1.0, "a success probability in (0, 1]")?;
    Ok(ServiceMoments {
        e_s: 1.0 / p,
        e_s2: (1.0 - p) / (p * p),
    })
}

/// Mean primary delay `(1−λ_p)/(μ_p−λ_p)`.
pub fn primary_delay(params: &NetworkParams, f: f64) -> Result<f64> {
    let rates = rate_set(params, f)?;
    if rates.violated() == Some(StabilityConstraint::Primary) {
        return Err(rates.instability(StabilityConstraint::Primary));
    }
    Ok((1.0 - rates.lambda_p) / (rates.mu_p - rates.lambda_p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBreakdown {
    pub d_p: f64,
    /// Residual-service component.
    pub d1: f64,
    /// Queued-ahead component, `ρ_p D̄_p + ρ_s D̄_s`, using the final `D̄_s`.
    pub d2: f64,
    /// Later-arriving primary work, `ρ_p D̄_p`.
    pub d3: f64,
    pub d_s: f64,
}

/// Mean secondary delay and its components.
///
/// The self-referential `ρ_s D̄_s` term of `D̄₂` is moved to the left-hand side,
/// giving `D̄_s = (D̄₁ + 2ρ_p D̄_p)/(1 − ρ_s)`.
pub fn secondary_delay(params: &NetworkParams, f: f64) -> Result<DelayBreakdown> {
    let rates = rate_set(params, f)?;
    rates.require_stable()?;
    Ok(delay_from_rates(&rates))
}

pub(crate) fn delay_from_rates(rates: &RateSet) -> DelayBreakdown {
    let d_p = (1.0 - rates.lambda_p) / (rates.mu_p - rates.lambda_p);
    let res_s = geometric_residual(rates.mu_s);
    let res_ps = geometric_residual(rates.mu_ps);
    let free = 1.0 - rates.rho_p;
    let d1 = rates.rho_s / free * res_s + rates.rho_ps / free * res_ps;
    let d3 = rates.rho_p * d_p;
    let d_s = (d1 + 2.0 * d3) / (1.0 - rates.rho_s);
    let d2 = d3 + rates.rho_s * d_s;
    DelayBreakdown { d_p, d1, d2, d3, d_s }
}

/// `E[S²]/(2E[S])` for geometric service with success probability `mu`,
/// which simplifies to `(1 − μ)/(2μ)`.
fn geometric_residual(mu: f64) -> f64 {
    (1.0 - mu) / (2.0 * mu)
}

/// `D̄_s'(f)` split as `A·ρ_ps'(f) + B·D̄_p'(f) + C`.
///
/// `A = ∂D̄_s/∂ρ_ps` and `B = ∂D̄_s/∂D̄_p` hold everything else fixed;
/// `C` collects the remaining dependence on `f` through `ρ_p`, `ρ_s` and the
/// two residual-service terms. Dropping `C` gives the slope obtained when
/// `ρ_p` and `ρ_s` are treated as constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelaySlope {
    pub a: f64,
    pub rho_ps_slope: f64,
    pub b: f64,
    pub d_p_slope: f64,
    pub c: f64,
    /// Full slope `A ρ_ps' + B D̄_p' + C`.
    pub total: f64,
}

impl DelaySlope {
    /// Slope with `ρ_p`, `ρ_s` frozen, i.e. without `C`.
    pub fn frozen_utilization(&self) -> f64 {
        self.a * self.rho_ps_slope + self.b * self.d_p_slope
    }
}

/// Analytic `dD̄_s/df` by the chain rule through every rate.
pub fn secondary_delay_derivative(params: &NetworkParams, f: f64) -> Result<DelaySlope> {
    let r = rate_set(params, f)?;
    r.require_stable()?;
    let out = params.outages();
    let lp = params.lambda_p;
    let ls = params.lambda_s;
    let relayable = out.p * (1.0 - out.ps);
    let q_relay = 1.0 - relay_service_outage(params.rate_form, &out);
    let q_sp = 1.0 - out.sp;
    let q_s = 1.0 - out.s;

    // d/df of each rate.
    let mu_p_d = relayable;
    let rho_p_d = -lp * mu_p_d / (r.mu_p * r.mu_p);
    let lambda_ps_d = match params.rate_form {
        RateForm::FlowBalanced => relayable * r.rho_p + f * relayable * rho_p_d,
        RateForm::Printed => out.p + relayable * r.rho_p + f * relayable * rho_p_d,
    };
    let mu_ps_d = -rho_p_d * q_relay;
    let rho_ps_d = (lambda_ps_d * r.mu_ps - r.lambda_ps * mu_ps_d) / (r.mu_ps * r.mu_ps);
    let idle = 1.0 - r.rho_p;
    let mu_s_d = -rho_p_d * q_s * (1.0 - r.rho_ps * q_sp) - idle * q_s * rho_ps_d * q_sp;
    let rho_s_d = -ls * mu_s_d / (r.mu_s * r.mu_s);
    let d_p = (1.0 - lp) / (r.mu_p - lp);
    let d_p_d = -(1.0 - lp) * mu_p_d / ((r.mu_p - lp) * (r.mu_p - lp));

    let res_s = geometric_residual(r.mu_s);
    let res_ps = geometric_residual(r.mu_ps);
    let res_s_d = -mu_s_d / (2.0 * r.mu_s * r.mu_s);
    let res_ps_d = -mu_ps_d / (2.0 * r.mu_ps * r.mu_ps);

    // D̄_s = N / (1 − ρ_s),  N = (ρ_s R_s + ρ_ps R_ps)/(1 − ρ_p) + 2 ρ_p D̄_p
    let free = 1.0 - r.rho_p;
    let busy_s = 1.0 - r.rho_s;
    let weighted = r.rho_s * res_s + r.rho_ps * res_ps;
    let n = weighted / free + 2.0 * r.rho_p * d_p;
    let n_d = (rho_s_d * res_s + r.rho_s * res_s_d + rho_ps_d * res_ps + r.rho_ps * res_ps_d) / free
        + weighted * rho_p_d / (free * free)
        + 2.0 * rho_p_d * d_p
        + 2.0 * r.rho_p * d_p_d;
    let total = n_d / busy_s + n * rho_s_d / (busy_s * busy_s);

    let a = res_ps / (free * busy_s);
    let b = 2.0 * r.rho_p / busy_s;
    let c = total - a * rho_ps_d - b * d_p_d;
    Ok(DelaySlope {
        a,
        rho_ps_slope: rho_ps_d,
        b,
        d_p_slope: d_p_d,
        c,
        total,
    })
}
