//! `relay-gate`: evaluate, sweep, optimize and simulate the relaying model and
//! emit plot-ready CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration error, 3 infeasible
//! problem, 4 non-convergence.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relay_gate::buffer::{buffer_metrics, OverflowMode};
use relay_gate::config::{parse_config, Config};
use relay_gate::figures::{all_figures, axis};
use relay_gate::optimizer::solve;
use relay_gate::queue::{geometric_moments, rate_set, secondary_delay, secondary_delay_derivative};
use relay_gate::simulator::{compare_with_analytics, run as simulate, RNG_NAME};
use relay_gate::{channel::power_budget, Error};

#[derive(Parser)]
#[command(name = "relay-gate", version, about = "Relaying tradeoff, acceptance-factor optimizer and protocol simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file (directory for `figures`); stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override a configuration key, e.g. `network.lambda_p=0.5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Simulator seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid step of the brute-force oracle and of `sweep`.
    #[arg(long, global = true, value_name = "X")]
    grid_step: Option<f64>,
    /// Overflow-probability model.
    #[arg(long, global = true, value_name = "literal|geometric_matched")]
    mode: Option<OverflowMode>,
}

#[derive(Subcommand)]
enum Command {
    /// Rates, delays, Γ and buffer metrics at one acceptance factor.
    Eval {
        /// Acceptance factor in [0, 1]
        #[arg(long)]
        f: f64,
    },
    /// `eval` over a grid of acceptance factors in [0, 1].
    Sweep,
    /// Optimal acceptance factor under the power budget.
    Solve {
        /// Also write the iteration trace here.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Monte-Carlo run compared against the closed forms.
    Simulate {
        /// Acceptance factor in [0, 1]
        #[arg(long)]
        f: f64,
        /// Per-replication rows go here.
        #[arg(long, value_name = "PATH")]
        replications: Option<PathBuf>,
        /// Slot-level trace of replication 0 goes here (enables tracing).
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Every figure table into the `--out` directory (default `figures`).
    Figures,
}

enum Failure {
    Usage(String),
    Config(String),
    Infeasible(String),
    NotConverged,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Config(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::NotConverged => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::InvalidParameter { .. } => Failure::Config(e.to_string()),
            Error::Infeasible(_) | Error::Unstable { .. } | Error::ZeroSuccessProbability => {
                Failure::Infeasible(e.to_string())
            }
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn load(common: &Common) -> Result<Config, Failure> {
    let text = match &common.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = common.overrides.clone();
    if let Some(seed) = common.seed {
        overrides.push(format!("sim.seed={seed}"));
    }
    if let Some(step) = common.grid_step {
        overrides.push(format!("solver.f_grid_step={step}"));
    }
    if let Some(mode) = common.mode {
        overrides.push(format!("buffer.mode=\"{mode}\""));
    }
    Ok(parse_config(&text, &overrides)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

const EVAL_HEADER: &str = "f,mu_p,lambda_ps,mu_ps,mu_s,rho_p,rho_ps,rho_s,d_p,d1,d2,d3,d_s,d_s_slope,gamma,k,p_ov,p_b\n";

fn eval_row(config: &Config, f: f64) -> Result<String, Error> {
    let p = &config.network;
    let r = rate_set(p, f)?;
    r.require_stable()?;
    let d = secondary_delay(p, f)?;
    let slope = secondary_delay_derivative(p, f)?.total;
    let gamma = power_budget(p, r.lambda_ps).gamma;
    let m = buffer_metrics(r.lambda_ps, &geometric_moments(r.mu_ps)?, config.buffer.k, config.buffer.mode)?;
    Ok(format!(
        "{f},{},{},{},{},{},{},{},{},{},{},{},{},{slope},{gamma},{},{},{}\n",
        r.mu_p, r.lambda_ps, r.mu_ps, r.mu_s, r.rho_p, r.rho_ps, r.rho_s, d.d_p, d.d1, d.d2, d.d3, d.d_s, m.k, m.p_ov, m.p_b
    ))
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let config = load(&cli.common)?;
    let out = cli.common.out.as_deref();
    match &cli.command {
        Command::Eval { f } => emit(out, &format!("{EVAL_HEADER}{}", eval_row(&config, *f)?)),
        Command::Sweep => {
            let step = cli.common.grid_step.unwrap_or(0.01);
            if !(step > 0.0 && step <= 1.0) {
                return Err(Failure::Usage(format!("--grid-step {step} must lie in (0, 1]")));
            }
            let mut text = EVAL_HEADER.to_string();
            for f in axis(0.0, 1.0, step) {
                match eval_row(&config, f) {
                    Ok(row) => text.push_str(&row),
                    Err(Error::Unstable { .. }) => {
                        text.push_str(&format!("{f}{}\n", ",infeasible".repeat(EVAL_HEADER.split(',').count() - 1)))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            emit(out, &text)
        }
        Command::Solve { trace } => {
            let r = solve(&config.network, &config.solver)?;
            let text = format!(
                "f_star,d_s_star,gamma_star,nu1,nu2,xi,kkt_nu1,kkt_nu2,kkt_xi,iterations,converged\n{},{},{},{},{},{},{},{},{},{},{}\n",
                r.f_star,
                r.d_s_star,
                r.gamma_star,
                r.multipliers.nu1,
                r.multipliers.nu2,
                r.multipliers.xi,
                r.kkt.relay,
                r.kkt.power,
                r.kkt.secondary,
                r.trace.len(),
                r.converged
            );
            emit(out, &text)?;
            if let Some(p) = trace {
                fs::write(p, r.trace_csv()).map_err(|e| io_failure(p, e))?;
            }
            if r.converged {
                Ok(())
            } else {
                Err(Failure::NotConverged)
            }
        }
        Command::Simulate { f, replications, trace } => {
            let mut sim = config.sim_config(*f);
            sim.trace |= trace.is_some();
            eprintln!("rng: {RNG_NAME}, seed {}", sim.seed);
            let stable = rate_set(&sim.params, *f)?.is_stable();
            let stats = if stable {
                let cmp = compare_with_analytics(&sim)?;
                emit(out, &cmp.to_csv())?;
                cmp.stats
            } else {
                let stats = simulate(&sim)?;
                emit(out, &stats.summary_csv())?;
                stats
            };
            if let Some(p) = replications {
                fs::write(p, stats.replications_csv()).map_err(|e| io_failure(p, e))?;
            }
            if let Some(p) = trace {
                fs::write(p, stats.trace_csv(0).unwrap_or_default()).map_err(|e| io_failure(p, e))?;
            }
            if stats.diverged {
                return Err(Failure::Infeasible("simulated secondary queue diverged".into()));
            }
            Ok(())
        }
        Command::Figures => {
            let dir = out.unwrap_or(Path::new("figures"));
            fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            for t in all_figures(&config)? {
                let path = dir.join(format!("{}.csv", t.name));
                fs::write(&path, t.to_csv()).map_err(|e| io_failure(&path, e))?;
            }
            Ok(())
        }
    }
}

fn limit_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("RELAY_GATE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("RELAY_GATE_THREADS={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match limit_threads().and_then(|()| execute(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Config(m) | Failure::Infeasible(m) => eprintln!("error: {m}"),
                Failure::NotConverged => eprintln!("error: solver reached its iteration cap without converging"),
            }
            ExitCode::from(f.code())
        }
    }
}
