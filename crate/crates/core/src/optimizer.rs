//! Minimization of the secondary delay over the acceptance factor subject to
//! the three stability constraints and the relay power budget `Γ ≤ Γ_th`.
//!
//! The solver follows a hierarchical decomposition: an inner loop on the
//! secondary-stability multiplier `ξ`, a middle loop on the relay-stability
//! multiplier `ν₁`, and an outer loop on the power-budget multiplier `ν₂`, each
//! a projected subgradient ascent. Γ is concave in `f`, so the ordinary
//! Lagrangian has a duality gap (its minimizer jumps between `f = 0` and
//! `f = 1`); the solver therefore minimizes the augmented Lagrangian
//!
//! ```text
//! D̄_s(f) + Σ_i ([ν_i + c·g_i(f)]₊² − ν_i²) / (2c)
//! ```
//!
//! which coincides with the ordinary one at `c → 0` and keeps weak duality.
//! Setting `penalty = 0` in [`SolverConfig`] recovers the ordinary form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{power_budget, NetworkParams};
use crate::error::{check, Error, Result, StabilityConstraint};
use crate::queue::{delay_from_rates, rate_set, RateSet};
use crate::search::{golden_section, minimize_on_interval};

const XTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MultiplierState {
    pub nu1: f64,
    pub nu2: f64,
    pub xi: f64,
}

impl MultiplierState {
    pub fn new(nu1: f64, nu2: f64, xi: f64) -> Result<Self> {
        for (name, v) in [("nu1", nu1), ("nu2", nu2), ("xi", xi)] {
            check(name, v, v >= 0.0 && v.is_finite(), "a finite multiplier >= 0")?;
        }
        Ok(Self { nu1, nu2, xi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    #[default]
    Constant,
    /// `α / √k` at the k-th update of a loop.
    Diminishing,
}

/// How the outer loop moves `ν₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nu2Rule {
    /// `ν₂ ← [ν₂ + α(Γ(f) − Γ_th)]₊`
    #[default]
    Subgradient,
    /// `ν₂ ← ν₂ + α·ν₁*`, the update as written in the decomposition
    /// algorithm. Kept for comparison only; it ignores the power budget.
    LiteralNu1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Power budget threshold Γ_th.
    pub gamma_th: f64,
    pub step_alpha: f64,
    /// Augmented-Lagrangian penalty `c`; 0 gives the ordinary Lagrangian.
    pub penalty: f64,
    pub eps_conv: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Brute-force oracle granularity.
    pub f_grid_step: f64,
    pub schedule: StepSchedule,
    pub nu2_rule: Nu2Rule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma_th: 0.2,
            step_alpha: 1000.0,
            penalty: 1000.0,
            eps_conv: 1e-5,
            max_outer: 200,
            max_inner: 500,
            f_grid_step: 1e-3,
            schedule: StepSchedule::Constant,
            nu2_rule: Nu2Rule::Subgradient,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        check("gamma_th", self.gamma_th, self.gamma_th > 0.0 && self.gamma_th <= 1.0, "a threshold in (0, 1]")?;
        check("step_alpha", self.step_alpha, self.step_alpha > 0.0 && self.step_alpha.is_finite(), "a step > 0")?;
        check("penalty", self.penalty, self.penalty >= 0.0 && self.penalty.is_finite(), "a penalty >= 0")?;
        check("eps_conv", self.eps_conv, self.eps_conv > 0.0, "a tolerance > 0")?;
        check("max_outer", self.max_outer as f64, self.max_outer > 0, "an iteration cap > 0")?;
        check("max_inner", self.max_inner as f64, self.max_inner > 0, "an iteration cap > 0")?;
        check(
            "f_grid_step",
            self.f_grid_step,
            self.f_grid_step > 0.0 && self.f_grid_step <= 1.0,
            "a grid step in (0, 1]",
        )
    }

    fn step(&self, k: usize) -> f64 {
        match self.schedule {
            StepSchedule::Constant => self.step_alpha,
            StepSchedule::Diminishing => self.step_alpha / (k as f64).sqrt(),
        }
    }
}

/// Constraint values at one acceptance factor; each is `≤ 0` when satisfied
/// (stability ones strictly).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Evaluation {
    rates: RateSet,
    d_s: f64,
    gamma: f64,
}

impl Evaluation {
    fn at(params: &NetworkParams, f: f64) -> Option<Self> {
        let rates = rate_set(params, f).ok()?;
        if !rates.is_stable() {
            return None;
        }
        let d_s = delay_from_rates(&rates).d_s;
        let gamma = power_budget(params, rates.lambda_ps).gamma;
        Some(Self { rates, d_s, gamma })
    }

    fn feasible(&self, gamma_th: f64) -> bool {
        self.gamma <= gamma_th
    }

    fn lagrangian(&self, m: &MultiplierState, gamma_th: f64, penalty: f64) -> f64 {
        let terms = [
            (m.nu1, self.rates.relay_slack()),
            (m.nu2, self.gamma - gamma_th),
            (m.xi, self.rates.secondary_slack()),
        ];
        let mut value = self.d_s;
        for (nu, g) in terms {
            value += if penalty > 0.0 {
                let shifted = (nu + penalty * g).max(0.0);
                (shifted * shifted - nu * nu) / (2.0 * penalty)
            } else {
                nu * g
            };
        }
        value
    }
}

fn objective_or_inf(params: &NetworkParams, f: f64, m: &MultiplierState, gamma_th: f64, penalty: f64) -> f64 {
    match Evaluation::at(params, f) {
        Some(e) => e.lagrangian(m, gamma_th, penalty),
        None => f64::INFINITY,
    }
}

/// `D̄_s + ν₁(λ_ps−μ_ps) + ν₂(Γ−Γ_th)`; `+∞` where any queue is unstable.
pub fn lagrangian_l1(params: &NetworkParams, f: f64, nu1: f64, nu2: f64, gamma_th: f64) -> f64 {
    objective_or_inf(params, f, &MultiplierState { nu1, nu2, xi: 0.0 }, gamma_th, 0.0)
}

/// [`lagrangian_l1`] plus `ξ(λ_s−μ_s)`.
pub fn lagrangian_l2(params: &NetworkParams, f: f64, multipliers: &MultiplierState, gamma_th: f64) -> f64 {
    objective_or_inf(params, f, multipliers, gamma_th, 0.0)
}

fn primary_feasible_somewhere(params: &NetworkParams) -> Result<()> {
    // μ_p grows with f, so f = 1 is the most favourable point.
    let r = rate_set(params, 1.0)?;
    if r.violated() == Some(StabilityConstraint::Primary) {
        return Err(Error::Infeasible(format!(
            "primary queue unstable for every f: lambda_p = {} >= mu_p(1) = {}",
            r.lambda_p, r.mu_p
        )));
    }
    Ok(())
}

fn minimize_lagrangian(params: &NetworkParams, m: &MultiplierState, gamma_th: f64, penalty: f64) -> Result<(f64, f64)> {
    let fun = |f: f64| objective_or_inf(params, f, m, gamma_th, penalty);
    minimize_on_interval(&fun, 0.0, 1.0, XTOL)
        .map(|min| (min.x, min.value))
        .ok_or_else(|| Error::Infeasible("no acceptance factor in [0, 1] keeps every queue stable".into()))
}

/// `argmin_f L₂(f; ν₁, ν₂, ξ)` over `[0, 1]`, unstable points excluded.
pub fn inner_minimize_f(params: &NetworkParams, multipliers: &MultiplierState, gamma_th: f64) -> Result<f64> {
    primary_feasible_somewhere(params)?;
    minimize_lagrangian(params, multipliers, gamma_th, 0.0).map(|(f, _)| f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter_outer: usize,
    pub iter_mid: usize,
    pub iter_inner: usize,
    pub f: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub xi: f64,
    /// Dual value at this iterate: the minimized Lagrangian.
    pub objective: f64,
    pub gamma: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktResiduals {
    /// ν₁(λ_ps − μ_ps)
    pub relay: f64,
    /// ν₂(Γ − Γ_th)
    pub power: f64,
    /// ξ(λ_s − μ_s)
    pub secondary: f64,
}

impl KktResiduals {
    fn at(m: &MultiplierState, rates: &RateSet, gamma: f64, gamma_th: f64) -> Self {
        // + 0.0 keeps a zero multiplier from printing as -0
        Self {
            relay: m.nu1 * rates.relay_slack() + 0.0,
            power: m.nu2 * (gamma - gamma_th) + 0.0,
            secondary: m.xi * rates.secondary_slack() + 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverResult {
    pub f_star: f64,
    pub d_s_star: f64,
    pub gamma_star: f64,
    pub multipliers: MultiplierState,
    pub kkt: KktResiduals,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

impl SolverResult {
    /// Iteration trace as CSV with the fixed column order
    /// `iter_outer,iter_mid,iter_inner,f,nu1,nu2,xi,objective,gamma,feasible`.
    pub fn trace_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["iter_outer", "iter_mid", "iter_inner", "f", "nu1", "nu2", "xi", "objective", "gamma", "feasible"])
            .expect("in-memory csv");
        for r in &self.trace {
            w.write_record([
                r.iter_outer.to_string(),
                r.iter_mid.to_string(),
                r.iter_inner.to_string(),
                r.f.to_string(),
                r.nu1.to_string(),
                r.nu2.to_string(),
                r.xi.to_string(),
                r.objective.to_string(),
                r.gamma.to_string(),
                r.feasible.to_string(),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}

/// Largest `f ∈ [0, hi]` with `Γ(f) ≤ Γ_th`, by bisection (Γ is nondecreasing in `f`).
fn power_edge(params: &NetworkParams, hi: f64, gamma_th: f64) -> f64 {
    let ok = |f: f64| Evaluation::at(params, f).is_some_and(|e| e.feasible(gamma_th));
    let (mut lo, mut hi) = (0.0, hi);
    if ok(hi) {
        return hi;
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Default)]
struct Incumbent {
    best: Option<(f64, f64)>,
}

impl Incumbent {
    fn offer(&mut self, f: f64, d_s: f64) {
        let better = match self.best {
            None => true,
            Some((bf, bd)) => d_s < bd || (d_s == bd && f < bf),
        };
        if better {
            self.best = Some((f, d_s));
        }
    }
}

/// Nested projected-subgradient ascent on (ξ, ν₁, ν₂).
///
/// Every inner minimizer that satisfies all four constraints is kept as a
/// primal candidate; at the end the power-budget boundary below the last
/// iterate is added (complementary slackness with `ν₂ > 0` makes it active)
/// and the candidate with the smallest delay is returned.
pub fn solve(params: &NetworkParams, config: &SolverConfig) -> Result<SolverResult> {
    params.validate()?;
    config.validate()?;
    let gamma_th = config.gamma_th;
    let c = config.penalty;
    let start = Evaluation::at(params, 0.0).ok_or_else(|| {
        Error::Infeasible("queues are unstable without relaying (f = 0); no feasible acceptance factor".into())
    })?;

    let mut m = MultiplierState::default();
    let mut trace = Vec::new();
    let mut incumbent = Incumbent::default();
    incumbent.offer(0.0, start.d_s);
    let mut f = 0.0;
    let mut converged = false;

    'outer: for k in 1..=config.max_outer {
        let mut mid_done = false;
        for i in 1..=config.max_inner {
            let mut inner_done = false;
            for j in 1..=config.max_inner {
                let (fj, value) = minimize_lagrangian(params, &m, gamma_th, c)?;
                f = fj;
                let e = Evaluation::at(params, f).expect("minimizer is stable");
                let feasible = e.feasible(gamma_th);
                if feasible {
                    incumbent.offer(f, e.d_s);
                }
                trace.push(TraceRow {
                    iter_outer: k,
                    iter_mid: i,
                    iter_inner: j,
                    f,
                    nu1: m.nu1,
                    nu2: m.nu2,
                    xi: m.xi,
                    objective: value,
                    gamma: e.gamma,
                    feasible,
                });
                let xi_next = (m.xi + config.step(j) * e.rates.secondary_slack()).max(0.0);
                let delta = (xi_next - m.xi).abs();
                m.xi = xi_next;
                if delta <= config.eps_conv {
                    inner_done = true;
                    break;
                }
            }
            let e = Evaluation::at(params, f).expect("minimizer is stable");
            let nu1_next = (m.nu1 + config.step(i) * e.rates.relay_slack()).max(0.0);
            let delta = (nu1_next - m.nu1).abs();
            m.nu1 = nu1_next;
            if inner_done && delta <= config.eps_conv {
                mid_done = true;
                break;
            }
        }
        let e = Evaluation::at(params, f).expect("minimizer is stable");
        let nu2_next = match config.nu2_rule {
            Nu2Rule::Subgradient => (m.nu2 + config.step(k) * (e.gamma - gamma_th)).max(0.0),
            Nu2Rule::LiteralNu1 => m.nu2 + config.step(k) * m.nu1,
        };
        let delta = (nu2_next - m.nu2).abs();
        m.nu2 = nu2_next;
        if mid_done && delta <= config.eps_conv {
            converged = true;
            break 'outer;
        }
    }

    let edge = power_edge(params, f, gamma_th);
    if let Some(e) = Evaluation::at(params, edge) {
        if e.feasible(gamma_th) {
            incumbent.offer(edge, e.d_s);
        }
    }
    let (f_star, d_s_star) = incumbent.best.expect("f = 0 is always offered");
    let e = Evaluation::at(params, f_star).expect("incumbent is stable");
    Ok(SolverResult {
        f_star,
        d_s_star,
        gamma_star: e.gamma,
        multipliers: m,
        kkt: KktResiduals::at(&m, &e.rates, e.gamma, gamma_th),
        trace,
        converged,
    })
}

/// Exhaustive scan of `f ∈ {0, h, 2h, …, 1}`: the feasible point with the
/// smallest secondary delay, ties toward smaller `f`.
pub fn brute_force_optimal_f(params: &NetworkParams, gamma_th: f64, grid_step: f64) -> Result<f64> {
    check("grid_step", grid_step, grid_step > 0.0 && grid_step <= 1.0, "a grid step in (0, 1]")?;
    let n = (1.0 / grid_step).round() as usize;
    let best = (0..=n)
        .into_par_iter()
        .map(|i| if i == n { 1.0 } else { i as f64 * grid_step })
        .filter_map(|f| Evaluation::at(params, f).filter(|e| e.feasible(gamma_th)).map(|e| (f, e.d_s)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None::<(f64, f64)>, |acc, (f, d)| match acc {
            Some((_, bd)) if d >= bd => acc,
            _ => Some((f, d)),
        });
    best.map(|(f, _)| f)
        .ok_or_else(|| Error::Infeasible(format!("no grid point satisfies the constraints at Gamma_th = {gamma_th}")))
}

/// Secondary delay at the brute-force optimum.
pub fn brute_force_optimal_delay(params: &NetworkParams, gamma_th: f64, grid_step: f64) -> Result<(f64, f64)> {
    let f = brute_force_optimal_f(params, gamma_th, grid_step)?;
    let e = Evaluation::at(params, f).expect("oracle point is stable");
    Ok((f, e.d_s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierRanges {
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
    pub xi: Vec<f64>,
}

impl MultiplierRanges {
    /// `n` evenly spaced values on `[0, max]` for each multiplier.
    pub fn uniform(max: f64, n: usize) -> Self {
        let axis: Vec<f64> = (0..n).map(|i| if n == 1 { 0.0 } else { max * i as f64 / (n - 1) as f64 }).collect();
        Self {
            nu1: axis.clone(),
            nu2: axis.clone(),
            xi: axis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowPriceCell {
    pub multipliers: MultiplierState,
    /// `None` marks a cell with no stable acceptance factor.
    pub f: Option<f64>,
    pub kkt: KktResiduals,
    /// `L₂` at the minimizer: the value of the equivalent max–min problem for
    /// these multipliers.
    pub objective: f64,
    pub d_s: f64,
    pub gamma: f64,
    /// All four constraints hold at `f`.
    pub feasible: bool,
}

/// KKT residuals over a grid of multiplier tuples (ν₁ outermost, ξ innermost).
pub fn shadow_price_surface(params: &NetworkParams, gamma_th: f64, ranges: &MultiplierRanges) -> Vec<ShadowPriceCell> {
    let tuples: Vec<MultiplierState> = ranges
        .nu1
        .iter()
        .flat_map(|&nu1| {
            ranges
                .nu2
                .iter()
                .flat_map(move |&nu2| ranges.xi.iter().map(move |&xi| MultiplierState { nu1, nu2, xi }))
        })
        .collect();
    tuples
        .into_par_iter()
        .map(|m| {
            let cell = inner_minimize_f(params, &m, gamma_th)
                .ok()
                .and_then(|f| Evaluation::at(params, f).map(|e| (f, e)));
            match cell {
                Some((f, e)) => ShadowPriceCell {
                    multipliers: m,
                    f: Some(f),
                    kkt: KktResiduals::at(&m, &e.rates, e.gamma, gamma_th),
                    objective: e.lagrangian(&m, gamma_th, 0.0),
                    d_s: e.d_s,
                    gamma: e.gamma,
                    feasible: e.feasible(gamma_th),
                },
                None => ShadowPriceCell {
                    multipliers: m,
                    f: None,
                    kkt: KktResiduals {
                        relay: f64::NAN,
                        power: f64::NAN,
                        secondary: f64::NAN,
                    },
                    objective: f64::NAN,
                    d_s: f64::NAN,
                    gamma: f64::NAN,
                    feasible: false,
                },
            }
        })
        .collect()
}

/// Refines a bracketed minimum of `D̄_s` on `[lo, hi]`; exposed for the oracle
/// tests of the inner search.
pub fn delay_minimum_on(params: &NetworkParams, lo: f64, hi: f64) -> (f64, f64) {
    let fun = |f: f64| Evaluation::at(params, f).map_or(f64::INFINITY, |e| e.d_s);
    let m = golden_section(&fun, lo, hi, XTOL);
    (m.x, m.value)
}
