//! Plot-ready CSV tables for the tradeoff, optimum, shadow-price and buffer
//! figures.
//!
//! Link constants come from the configuration; the traffic anchors of each
//! sweep are fixed by the recipe:
//!
//! | table | sweep | fixed |
//! |-------|-------|-------|
//! | `fig2` | f ∈ [0, 1], step 0.01 | λ_p = 0.3, λ_s = 0.1 |
//! | `fig4a` | λ_p ∈ [0.05, 0.95] | λ_s = 0.1, Γ_th from the solver config |
//! | `fig4b` | λ_s ∈ [0.05, 0.95] | λ_p = 0.3, Γ_th from the solver config |
//! | `fig4c` | Γ_th ∈ [0.05, 1] | λ_p = 0.5, λ_s = 0.1 |
//! | `fig5a` | multipliers on [0, 10]³ | λ_p ∈ {0.1, 0.3, 0.5}, λ_s = 0.1 |
//! | `fig5b` | multipliers on [0, 10]³ | λ_s ∈ {0.1, 0.3, 0.5}, λ_p = 0.1 |
//! | `fig5c` | multipliers on [0, 10]³ | Γ_th ∈ {0.2, 0.4, 0.6}, λ_p = 0.5, λ_s = 0.1 |
//! | `fig6` | the three fig4 sweeps at their f* | buffer K and mode from the config |
//!
//! Cells without a feasible acceptance factor hold the string `infeasible`.

use rayon::prelude::*;

use crate::buffer::buffer_metrics;
use crate::channel::{power_budget, NetworkParams};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::optimizer::{brute_force_optimal_f, shadow_price_surface, solve, MultiplierRanges, SolverConfig};
use crate::queue::{geometric_moments, rate_set, secondary_delay};

pub const INFEASIBLE: &str = "infeasible";

const RATE_AXIS: (f64, f64, f64) = (0.05, 0.95, 0.05);
const BUDGET_AXIS: (f64, f64, f64) = (0.05, 1.0, 0.05);
const MULTIPLIER_MAX: f64 = 10.0;
const MULTIPLIER_POINTS: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// `lo, lo+step, …, hi` rounded to ten decimals so printed axes stay clean.
pub fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| ((lo + step * i as f64) * 1e10).round() / 1e10).collect()
}

fn num(x: f64) -> String {
    (x + 0.0).to_string()
}

/// D̄_s and Γ over the acceptance factor.
pub fn fig2(base: &NetworkParams) -> Table {
    let params = base.with_rates(0.3, 0.1);
    let rows = axis(0.0, 1.0, 0.01)
        .into_iter()
        .map(|f| match secondary_delay(&params, f) {
            Ok(d) => {
                let gamma = power_budget(&params, rate_set(&params, f).expect("f in range").lambda_ps).gamma;
                vec![num(f), num(d.d_s), num(gamma)]
            }
            Err(_) => vec![num(f), INFEASIBLE.into(), INFEASIBLE.into()],
        })
        .collect();
    Table {
        name: "fig2",
        header: vec!["f", "d_s", "gamma"],
        rows,
    }
}

/// Solver outcome of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub params: NetworkParams,
    pub gamma_th: f64,
    /// `None` when no acceptance factor is feasible.
    pub solved: Option<Solved>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solved {
    pub f_star: f64,
    pub d_s_star: f64,
    pub gamma_star: f64,
    pub f_oracle: f64,
    pub converged: bool,
}

fn optimum(params: NetworkParams, solver: &SolverConfig) -> Result<Optimum> {
    let solved = match solve(&params, solver) {
        Ok(r) => Some(Solved {
            f_star: r.f_star,
            d_s_star: r.d_s_star,
            gamma_star: r.gamma_star,
            f_oracle: brute_force_optimal_f(&params, solver.gamma_th, solver.f_grid_step)?,
            converged: r.converged,
        }),
        Err(Error::Infeasible(_)) | Err(Error::Unstable { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Optimum {
        params,
        gamma_th: solver.gamma_th,
        solved,
    })
}

/// One of the three optimum sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    PrimaryRate,
    SecondaryRate,
    Budget,
}

impl Sweep {
    pub fn label(self) -> &'static str {
        match self {
            Sweep::PrimaryRate => "lambda_p",
            Sweep::SecondaryRate => "lambda_s",
            Sweep::Budget => "gamma_th",
        }
    }

    fn table(self) -> &'static str {
        match self {
            Sweep::PrimaryRate => "fig4a",
            Sweep::SecondaryRate => "fig4b",
            Sweep::Budget => "fig4c",
        }
    }

    fn x(self, o: &Optimum) -> f64 {
        match self {
            Sweep::PrimaryRate => o.params.lambda_p,
            Sweep::SecondaryRate => o.params.lambda_s,
            Sweep::Budget => o.gamma_th,
        }
    }

    fn cells(self, base: &NetworkParams, solver: &SolverConfig) -> Vec<(NetworkParams, SolverConfig)> {
        match self {
            Sweep::PrimaryRate => axis(RATE_AXIS.0, RATE_AXIS.1, RATE_AXIS.2)
                .into_iter()
                .map(|lp| (base.with_rates(lp, 0.1), *solver))
                .collect(),
            Sweep::SecondaryRate => axis(RATE_AXIS.0, RATE_AXIS.1, RATE_AXIS.2)
                .into_iter()
                .map(|ls| (base.with_rates(0.3, ls), *solver))
                .collect(),
            Sweep::Budget => axis(BUDGET_AXIS.0, BUDGET_AXIS.1, BUDGET_AXIS.2)
                .into_iter()
                .map(|g| (base.with_rates(0.5, 0.1), SolverConfig { gamma_th: g, ..*solver }))
                .collect(),
        }
    }

    /// Solves every cell of the sweep, concurrently, in sweep order.
    pub fn run(self, base: &NetworkParams, solver: &SolverConfig) -> Result<Vec<Optimum>> {
        self.cells(base, solver)
            .into_par_iter()
            .map(|(p, s)| optimum(p, &s))
            .collect()
    }
}

pub fn optimum_table(sweep: Sweep, optima: &[Optimum]) -> Table {
    let rows = optima
        .iter()
        .map(|o| {
            let mut row = vec![num(sweep.x(o))];
            match o.solved {
                Some(s) => row.extend([
                    num(s.f_star),
                    num(s.d_s_star),
                    num(s.gamma_star),
                    num(s.f_oracle),
                    s.converged.to_string(),
                ]),
                None => row.extend(std::iter::repeat_n(INFEASIBLE.to_string(), 5)),
            }
            row
        })
        .collect();
    Table {
        name: sweep.table(),
        header: vec![sweep.label(), "f_star", "d_s_star", "gamma_star", "f_oracle", "converged"],
        rows,
    }
}

fn surface_table(name: &'static str, series: &[(NetworkParams, f64)]) -> Table {
    let ranges = MultiplierRanges::uniform(MULTIPLIER_MAX, MULTIPLIER_POINTS);
    let mut rows = Vec::new();
    for (params, gamma_th) in series {
        for c in shadow_price_surface(params, *gamma_th, &ranges) {
            let m = c.multipliers;
            let mut row = vec![num(params.lambda_p), num(params.lambda_s), num(*gamma_th), num(m.nu1), num(m.nu2), num(m.xi)];
            match c.f {
                Some(f) => row.extend([
                    num(f),
                    num(c.kkt.relay),
                    num(c.kkt.power),
                    num(c.kkt.secondary),
                    num(c.objective),
                    num(c.d_s),
                    num(c.gamma),
                    c.feasible.to_string(),
                ]),
                None => row.extend(std::iter::repeat_n(INFEASIBLE.to_string(), 8)),
            }
            rows.push(row);
        }
    }
    Table {
        name,
        header: vec![
            "lambda_p", "lambda_s", "gamma_th", "nu1", "nu2", "xi", "f", "kkt_nu1", "kkt_nu2", "kkt_xi", "objective", "d_s",
            "gamma", "feasible",
        ],
        rows,
    }
}

pub fn fig5a(base: &NetworkParams, solver: &SolverConfig) -> Table {
    let series: Vec<_> = [0.1, 0.3, 0.5].iter().map(|&lp| (base.with_rates(lp, 0.1), solver.gamma_th)).collect();
    surface_table("fig5a", &series)
}

pub fn fig5b(base: &NetworkParams, solver: &SolverConfig) -> Table {
    let series: Vec<_> = [0.1, 0.3, 0.5].iter().map(|&ls| (base.with_rates(0.1, ls), solver.gamma_th)).collect();
    surface_table("fig5b", &series)
}

pub fn fig5c(base: &NetworkParams) -> Table {
    let series: Vec<_> = [0.2, 0.4, 0.6].iter().map(|&g| (base.with_rates(0.5, 0.1), g)).collect();
    surface_table("fig5c", &series)
}

/// Overflow and blocking probability of the relay queue at each sweep optimum.
pub fn fig6(sweeps: &[(Sweep, Vec<Optimum>)], config: &Config) -> Result<Table> {
    let k = config.buffer.k;
    let mode = config.buffer.mode;
    let mut rows = Vec::new();
    for (sweep, optima) in sweeps {
        for o in optima {
            let mut row = vec![sweep.label().to_string(), num(sweep.x(o))];
            match o.solved {
                Some(s) => {
                    let r = rate_set(&o.params, s.f_star)?;
                    let moments = geometric_moments(r.mu_ps)?;
                    let m = buffer_metrics(r.lambda_ps, &moments, k, mode)?;
                    row.extend([num(s.f_star), num(r.rho_ps), num(m.p_ov), num(m.p_b)]);
                }
                None => row.extend(std::iter::repeat_n(INFEASIBLE.to_string(), 4)),
            }
            row.extend([k.to_string(), mode.to_string()]);
            rows.push(row);
        }
    }
    Ok(Table {
        name: "fig6",
        header: vec!["sweep", "x", "f_star", "rho_ps", "p_ov", "p_b", "k", "mode"],
        rows,
    })
}

/// Every table, in the order fig2, fig4a–c, fig5a–c, fig6.
pub fn all_figures(config: &Config) -> Result<Vec<Table>> {
    let base = &config.network;
    let solver = &config.solver;
    let mut tables = vec![fig2(base)];
    let mut sweeps = Vec::new();
    for sweep in [Sweep::PrimaryRate, Sweep::SecondaryRate, Sweep::Budget] {
        let optima = sweep.run(base, solver)?;
        tables.push(optimum_table(sweep, &optima));
        sweeps.push((sweep, optima));
    }
    tables.push(fig5a(base, solver));
    tables.push(fig5b(base, solver));
    tables.push(fig5c(base));
    tables.push(fig6(&sweeps, config)?);
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_is_clean() {
        let a = axis(0.05, 0.95, 0.05);
        assert_eq!(a.len(), 19);
        assert_eq!(a[2], 0.15);
        assert_eq!(a[18], 0.95);
        assert_eq!(axis(0.0, 1.0, 0.01).len(), 101);
    }

    #[test]
    fn fig2_shape() {
        let t = fig2(&NetworkParams::default());
        assert_eq!(t.rows.len(), 101);
        assert!(t.to_csv().starts_with("f,d_s,gamma\n0,"));
    }

    #[test]
    fn infeasible_cells_are_marked() {
        let optima = Sweep::PrimaryRate.run(&NetworkParams::default(), &SolverConfig::default()).unwrap();
        let t = optimum_table(Sweep::PrimaryRate, &optima);
        let f = t.column("f_star").unwrap();
        assert_eq!(f[0], "1");
        assert_eq!(*f.last().unwrap(), INFEASIBLE);
    }

    #[test]
    fn fig5_grid_size() {
        let t = fig5c(&NetworkParams::default());
        assert_eq!(t.rows.len(), 3 * MULTIPLIER_POINTS.pow(3));
        assert!(t.rows.iter().all(|r| r.len() == t.header.len()));
    }
}
