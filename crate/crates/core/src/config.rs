//! JSON configuration bundle with dotted-path overrides.
//!
//! Thresholds and channel variances are given in dB, powers and rates
//! linearly. Every key is optional; an empty document yields the default
//! scenario (0 dB thresholds; σ_p² = 4, σ_ps² = 12, σ_sp² = 8, σ_s² = 12 dB;
//! P_p = P_ps = P_s = 1, P_sp = 0.25; λ_p = 0.3, λ_s = 0.1).
//!
//! ```json
//! {
//!   "network": { "lambda_p": 0.5, "sigma_sp_db": 8 },
//!   "solver": { "gamma_th": 0.2 },
//!   "sim": { "slots": 1000000, "replications": 10 },
//!   "buffer": { "k": 5, "mode": "geometric_matched" }
//! }
//! ```

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::buffer::OverflowMode;
use crate::channel::{db_to_linear, LinkParams, Links, NetworkParams, RateForm};
use crate::error::{Error, Result};
use crate::optimizer::SolverConfig;
use crate::simulator::{EnergyPolicy, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawNetwork {
    lambda_p: f64,
    lambda_s: f64,
    rate_form: RateForm,
    gamma_th_p_db: f64,
    gamma_th_s_db: f64,
    gamma_th_ps_db: f64,
    gamma_th_sp_db: f64,
    sigma_p_db: f64,
    sigma_s_db: f64,
    sigma_ps_db: f64,
    sigma_sp_db: f64,
    p_p: f64,
    p_s: f64,
    p_ps: f64,
    p_sp: f64,
}

impl Default for RawNetwork {
    fn default() -> Self {
        Self {
            lambda_p: 0.3,
            lambda_s: 0.1,
            rate_form: RateForm::default(),
            gamma_th_p_db: 0.0,
            gamma_th_s_db: 0.0,
            gamma_th_ps_db: 0.0,
            gamma_th_sp_db: 0.0,
            sigma_p_db: 4.0,
            sigma_s_db: 12.0,
            sigma_ps_db: 12.0,
            sigma_sp_db: 8.0,
            p_p: 1.0,
            p_s: 1.0,
            p_ps: 1.0,
            p_sp: 0.25,
        }
    }
}

/// Simulation settings; the acceptance factor comes from the command.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub slots: u64,
    pub warmup: u64,
    pub seed: u64,
    pub buffer_k: Option<u32>,
    pub replications: u32,
    pub energy: EnergyPolicy,
    pub trace: bool,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            slots: 1_000_000,
            warmup: 10_000,
            seed: 1,
            buffer_k: None,
            replications: 10,
            energy: EnergyPolicy::default(),
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BufferSettings {
    pub k: u32,
    pub mode: OverflowMode,
}

impl Default for BufferSettings {
    fn default() -> Self {
        Self {
            k: 5,
            mode: OverflowMode::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    network: RawNetwork,
    solver: SolverConfig,
    sim: SimSettings,
    buffer: BufferSettings,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub network: NetworkParams,
    pub solver: SolverConfig,
    pub sim: SimSettings,
    pub buffer: BufferSettings,
}

impl Default for Config {
    fn default() -> Self {
        parse_config("", &[]).expect("defaults are valid")
    }
}

impl Config {
    pub fn sim_config(&self, f: f64) -> SimConfig {
        SimConfig {
            params: self.network,
            f,
            slots: self.sim.slots,
            warmup: self.sim.warmup,
            seed: self.sim.seed,
            buffer_k: self.sim.buffer_k,
            replications: self.sim.replications,
            energy: self.sim.energy,
            trace: self.sim.trace,
        }
    }
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Writes `value` at the dotted `path`, creating intermediate objects.
/// The value is read as JSON when it parses, otherwise as a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_error(assignment, "override must look like key.path=value"))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(config_error(path, "empty key in override path"));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| config_error(keys[..i].join("."), "not an object; cannot descend"))?;
        if i + 1 == keys.len() {
            map.insert((*key).to_string(), value);
            return Ok(());
        }
        node = map.entry((*key).to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("path has at least one key")
}

fn link(path: &str, gamma_db: f64, sigma_db: f64, p_max: f64) -> Result<LinkParams> {
    for (key, v) in [("gamma_th", gamma_db), ("sigma", sigma_db)] {
        if !v.is_finite() {
            return Err(config_error(format!("network.{key}_{path}_db"), format!("{v} is not a finite dB value")));
        }
    }
    if !(p_max > 0.0 && p_max.is_finite()) {
        return Err(config_error(
            format!("network.p_{path}"),
            format!("{p_max} out of range; expected a power > 0"),
        ));
    }
    Ok(LinkParams {
        gamma_th: db_to_linear(gamma_db),
        sigma2: db_to_linear(sigma_db),
        p_max,
    })
}

fn rate(path: &str, v: f64) -> Result<f64> {
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(config_error(path, format!("{v} out of range; expected a rate in [0, 1)")))
    }
}

fn network(raw: &RawNetwork) -> Result<NetworkParams> {
    Ok(NetworkParams {
        links: Links {
            p: link("p", raw.gamma_th_p_db, raw.sigma_p_db, raw.p_p)?,
            s: link("s", raw.gamma_th_s_db, raw.sigma_s_db, raw.p_s)?,
            ps: link("ps", raw.gamma_th_ps_db, raw.sigma_ps_db, raw.p_ps)?,
            sp: link("sp", raw.gamma_th_sp_db, raw.sigma_sp_db, raw.p_sp)?,
        },
        lambda_p: rate("network.lambda_p", raw.lambda_p)?,
        lambda_s: rate("network.lambda_s", raw.lambda_s)?,
        rate_form: raw.rate_form,
    })
}

fn prefixed(section: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter { name, value, expected } => {
            config_error(format!("{section}.{name}"), format!("{value} out of range; expected {expected}"))
        }
        other => other,
    }
}

/// Parses a JSON document, applies `key.path=value` overrides in order, fills
/// defaults and validates every section.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<Config> {
    let mut doc = if text.trim().is_empty() {
        Value::Object(Map::new())
    } else {
        serde_json::from_str(text).map_err(|e| config_error("<document>", e.to_string()))?
    };
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let raw: RawConfig = serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        config_error(path, e.into_inner().to_string())
    })?;
    let network = network(&raw.network)?;
    raw.solver.validate().map_err(|e| prefixed("solver", e))?;
    let sim = raw.sim;
    if sim.slots <= sim.warmup {
        return Err(config_error(
            "sim.slots",
            format!("{} out of range; expected more slots than sim.warmup = {}", sim.slots, sim.warmup),
        ));
    }
    if sim.replications == 0 {
        return Err(config_error("sim.replications", "0 out of range; expected at least 1"));
    }
    Ok(Config {
        network,
        solver: raw.solver,
        sim,
        buffer: raw.buffer,
    })
}
