//! Slotted Monte-Carlo simulation of the relaying protocol with prioritized
//! relaying: relayed primary packets are served ahead of the secondary node's
//! own traffic in every slot the primary user leaves idle.
//!
//! Per slot: Bernoulli arrivals to `Q_p` and `Q_s` (a packet may be served in
//! the slot it arrives); if `Q_p` is busy the primary user transmits and, on
//! failure, the secondary node may overhear the packet and admit it to `Q_ps`
//! with probability `f`; otherwise the secondary node serves `Q_ps` when the
//! relay link is good and falls back to `Q_s` when it is not. Channel gains are
//! drawn independently per slot and link.
//!
//! Randomness is ChaCha8 seeded with `seed`, replication `r` on stream `r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::buffer::{buffer_metrics, OverflowMode};
use crate::channel::{power_budget, LinkParams, NetworkParams};
use crate::error::{check, Error, Result};
use crate::queue::{geometric_moments, rate_set, secondary_delay, RateSet};

pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), stream = replication index";

/// Largest `K` for which the occupancy tail `Pr[N_ps > K]` is tracked.
pub const TAIL_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyPolicy {
    /// Successful transmissions cost `γ_th/|g|²`; failed ones cost `P_max`.
    #[default]
    ChargeFailures,
    /// Only successful transmissions consume energy.
    SuccessOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: NetworkParams,
    pub f: f64,
    pub slots: u64,
    pub warmup: u64,
    pub seed: u64,
    /// Waiting room of `Q_ps`: an admission is blocked when it finds more
    /// than `K` packets present. `None` is an infinite buffer.
    pub buffer_k: Option<u32>,
    pub replications: u32,
    pub energy: EnergyPolicy,
    /// Keep a slot-level event trace per replication.
    pub trace: bool,
}

impl SimConfig {
    pub fn new(params: NetworkParams, f: f64) -> Self {
        Self {
            params,
            f,
            slots: 1_000_000,
            warmup: 10_000,
            seed: 1,
            buffer_k: None,
            replications: 10,
            energy: EnergyPolicy::default(),
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        check("f", self.f, (0.0..=1.0).contains(&self.f), "an acceptance factor in [0, 1]")?;
        check("slots", self.slots as f64, self.slots > self.warmup, "a horizon larger than warmup")?;
        check("replications", f64::from(self.replications), self.replications >= 1, "at least 1")
    }
}

/// Mean over replications and its standard error (NaN with one replication).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let se = if xs.len() < 2 {
            f64::NAN
        } else {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Self { mean, se }
    }

    /// `|mean − target| ≤ k·se`; an exact match passes even with zero spread.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se || self.mean == target
    }
}

/// Packet accounting of one queue over a whole run, warmup included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct QueueAccount {
    pub arrivals: u64,
    pub departures: u64,
    pub dropped: u64,
    pub remaining: u64,
}

impl QueueAccount {
    pub fn balanced(&self) -> bool {
        self.arrivals == self.departures + self.dropped + self.remaining
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationStats {
    pub replication: u32,
    pub d_p: f64,
    pub d_s: f64,
    pub gamma: f64,
    pub mu_p: f64,
    pub lambda_ps: f64,
    pub mu_ps: f64,
    pub mu_s: f64,
    pub blocking: f64,
    pub relay_energy: f64,
    pub own_energy: f64,
    pub mean_q_s: f64,
    pub diverged: bool,
    pub primary: QueueAccount,
    pub relay: QueueAccount,
    pub secondary: QueueAccount,
    #[serde(skip)]
    pub tail: [f64; TAIL_MAX + 1],
}

impl ReplicationStats {
    pub fn conserved(&self) -> bool {
        self.primary.balanced() && self.relay.balanced() && self.secondary.balanced()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalRates {
    /// Departures from `Q_p` per busy slot.
    pub mu_p: Estimate,
    /// Admissions to `Q_ps` per slot.
    pub lambda_ps: Estimate,
    /// Relay service opportunities (idle slot, relay link good) per slot.
    pub mu_ps: Estimate,
    /// Secondary service opportunities per slot.
    pub mu_s: Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotEvent {
    Idle,
    PrimaryDelivered,
    PrimaryRelayed,
    PrimaryBlocked,
    PrimaryFailed,
    RelayDelivered,
    SecondaryDelivered,
    SecondaryFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub slot: u64,
    pub event: SlotEvent,
    pub q_p: usize,
    pub q_ps: usize,
    pub q_s: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStats {
    pub mean_d_s: Estimate,
    pub mean_d_p: Estimate,
    pub empirical_gamma: Estimate,
    pub empirical_rates: EmpiricalRates,
    /// `Pr[N_ps > K]` seen by relay admissions, for `K = 0..=TAIL_MAX`.
    pub occupancy_tail: Vec<Estimate>,
    /// Fraction of relay admissions blocked by the finite buffer.
    pub blocking: Estimate,
    pub drop_count: u64,
    pub diverged: bool,
    pub replications: Vec<ReplicationStats>,
    #[serde(skip)]
    pub traces: Vec<Vec<TraceRecord>>,
}

impl SimStats {
    pub fn conserved(&self) -> bool {
        self.replications.iter().all(ReplicationStats::conserved)
    }

    /// One row per replication.
    pub fn replications_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.replications {
            w.serialize(Row::from(r)).expect("in-memory csv");
        }
        finish(w)
    }

    /// Mean and standard error of every estimate.
    pub fn summary_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["quantity", "mean", "se"]).expect("in-memory csv");
        let rates = &self.empirical_rates;
        let mut rows = vec![
            ("mu_p".to_string(), rates.mu_p),
            ("lambda_ps".into(), rates.lambda_ps),
            ("mu_ps".into(), rates.mu_ps),
            ("mu_s".into(), rates.mu_s),
            ("d_p".into(), self.mean_d_p),
            ("d_s".into(), self.mean_d_s),
            ("gamma".into(), self.empirical_gamma),
            ("blocking".into(), self.blocking),
        ];
        for (k, e) in self.occupancy_tail.iter().enumerate() {
            rows.push((format!("tail_gt_{k}"), *e));
        }
        for (name, e) in rows {
            w.write_record([name, e.mean.to_string(), e.se.to_string()]).expect("in-memory csv");
        }
        finish(w)
    }

    pub fn trace_csv(&self, replication: usize) -> Option<String> {
        let trace = self.traces.get(replication)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in trace {
            w.serialize(r).expect("in-memory csv");
        }
        Some(finish(w))
    }
}

#[derive(Serialize)]
struct Row {
    replication: u32,
    d_p: f64,
    d_s: f64,
    gamma: f64,
    mu_p: f64,
    lambda_ps: f64,
    mu_ps: f64,
    mu_s: f64,
    blocking: f64,
    relay_energy: f64,
    own_energy: f64,
    mean_q_s: f64,
    diverged: bool,
    conserved: bool,
}

impl From<&ReplicationStats> for Row {
    fn from(r: &ReplicationStats) -> Self {
        Self {
            replication: r.replication,
            d_p: r.d_p,
            d_s: r.d_s,
            gamma: r.gamma,
            mu_p: r.mu_p,
            lambda_ps: r.lambda_ps,
            mu_ps: r.mu_ps,
            mu_s: r.mu_s,
            blocking: r.blocking,
            relay_energy: r.relay_energy,
            own_energy: r.own_energy,
            mean_q_s: r.mean_q_s,
            diverged: r.diverged,
            conserved: r.conserved(),
        }
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

struct Channel<'a> {
    rng: &'a mut ChaCha8Rng,
}

impl Channel<'_> {
    fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    /// `|g|²` for a link, exponential with mean σ².
    fn gain(&mut self, link: &LinkParams) -> f64 {
        let e: f64 = Exp1.sample(self.rng);
        e * link.sigma2
    }
}

fn decodes(link: &LinkParams, gain: f64) -> bool {
    gain * link.p_max >= link.gamma_th
}

fn min_power(link: &LinkParams, gain: f64) -> f64 {
    if link.gamma_th == 0.0 {
        0.0
    } else {
        link.gamma_th / gain
    }
}

#[derive(Default)]
struct Counters {
    busy_slots: u64,
    p_departures: u64,
    admitted: u64,
    offered: u64,
    blocked: u64,
    relay_chances: u64,
    own_chances: u64,
    slots: u64,
    relay_energy: f64,
    own_energy: f64,
    d_p_sum: f64,
    d_p_n: u64,
    d_s_sum: f64,
    d_s_n: u64,
    q_s_area: f64,
    tail_hits: [u64; TAIL_MAX + 1],
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Final `Q_s` far above its time average, or holding a sizable share of
/// everything that ever arrived (linear growth keeps the final length near
/// twice the average, which the first test alone misses).
fn diverging(final_len: f64, mean_len: f64, arrivals: f64) -> bool {
    final_len > 10.0 * mean_len.max(1.0) || (final_len > 100.0 && final_len > 0.05 * arrivals)
}

fn replicate(config: &SimConfig, replication: u32) -> (ReplicationStats, Vec<TraceRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::from(replication));
    let mut ch = Channel { rng: &mut rng };
    let links = &config.params.links;
    let (lp, ls) = (config.params.lambda_p, config.params.lambda_s);
    let room = config.buffer_k.map(|k| k as usize + 1);

    // Arrival slots of queued packets.
    let mut q_p: VecDeque<u64> = VecDeque::new();
    let mut q_ps: VecDeque<u64> = VecDeque::new();
    let mut q_s: VecDeque<u64> = VecDeque::new();
    let mut acc = [QueueAccount::default(); 3];
    let mut c = Counters::default();
    let mut trace = Vec::new();

    for slot in 0..config.slots {
        let measure = slot >= config.warmup;
        if ch.bernoulli(lp) {
            q_p.push_back(slot);
            acc[0].arrivals += 1;
        }
        if ch.bernoulli(ls) {
            q_s.push_back(slot);
            acc[2].arrivals += 1;
        }
        let mut event = SlotEvent::Idle;
        let mut energy = 0.0;

        if let Some(&born) = q_p.front() {
            let g = ch.gain(&links.p);
            let departed = if decodes(&links.p, g) {
                event = SlotEvent::PrimaryDelivered;
                true
            } else {
                let overheard = decodes(&links.ps, ch.gain(&links.ps));
                if overheard && ch.bernoulli(config.f) {
                    acc[1].arrivals += 1;
                    let present = q_ps.len();
                    if measure {
                        c.offered += 1;
                        for (k, hit) in c.tail_hits.iter_mut().enumerate() {
                            if present > k {
                                *hit += 1;
                            }
                        }
                    }
                    if room.is_some_and(|r| present >= r) {
                        acc[1].dropped += 1;
                        if measure {
                            c.blocked += 1;
                        }
                        event = SlotEvent::PrimaryBlocked;
                        false
                    } else {
                        q_ps.push_back(slot);
                        if measure {
                            c.admitted += 1;
                        }
                        event = SlotEvent::PrimaryRelayed;
                        true
                    }
                } else {
                    event = SlotEvent::PrimaryFailed;
                    false
                }
            };
            if measure {
                c.busy_slots += 1;
            }
            if departed {
                q_p.pop_front();
                acc[0].departures += 1;
                if measure {
                    c.p_departures += 1;
                }
                if measure && born >= config.warmup {
                    c.d_p_sum += (slot - born + 1) as f64;
                    c.d_p_n += 1;
                }
            }
        } else {
            let g_sp = ch.gain(&links.sp);
            let relay_ok = decodes(&links.sp, g_sp);
            if measure && relay_ok {
                c.relay_chances += 1;
            }
            if relay_ok && !q_ps.is_empty() {
                q_ps.pop_front();
                acc[1].departures += 1;
                energy = min_power(&links.sp, g_sp);
                if measure {
                    c.relay_energy += energy;
                }
                event = SlotEvent::RelayDelivered;
            } else {
                let g_s = ch.gain(&links.s);
                let own_ok = decodes(&links.s, g_s);
                if measure && own_ok {
                    c.own_chances += 1;
                }
                if let Some(&born) = q_s.front() {
                    if own_ok {
                        q_s.pop_front();
                        acc[2].departures += 1;
                        energy = min_power(&links.s, g_s);
                        if measure && born >= config.warmup {
                            c.d_s_sum += (slot - born + 1) as f64;
                            c.d_s_n += 1;
                        }
                        event = SlotEvent::SecondaryDelivered;
                    } else {
                        if config.energy == EnergyPolicy::ChargeFailures {
                            energy = links.s.p_max;
                        }
                        event = SlotEvent::SecondaryFailed;
                    }
                    if measure {
                        c.own_energy += energy;
                    }
                }
            }
        }
        if measure {
            c.slots += 1;
            c.q_s_area += q_s.len() as f64;
        }
        if config.trace {
            trace.push(TraceRecord {
                slot,
                event,
                q_p: q_p.len(),
                q_ps: q_ps.len(),
                q_s: q_s.len(),
                energy,
            });
        }
    }

    acc[0].remaining = q_p.len() as u64;
    acc[1].remaining = q_ps.len() as u64;
    acc[2].remaining = q_s.len() as u64;
    let n = c.slots as f64;
    let mean_q_s = c.q_s_area / n;
    let mut tail = [0.0; TAIL_MAX + 1];
    for (t, hit) in tail.iter_mut().zip(c.tail_hits) {
        *t = ratio(hit as f64, c.offered as f64);
    }
    let stats = ReplicationStats {
        replication,
        d_p: ratio(c.d_p_sum, c.d_p_n as f64),
        d_s: ratio(c.d_s_sum, c.d_s_n as f64),
        gamma: ratio(c.relay_energy, c.relay_energy + c.own_energy),
        mu_p: ratio(c.p_departures as f64, c.busy_slots as f64),
        lambda_ps: c.admitted as f64 / n,
        mu_ps: c.relay_chances as f64 / n,
        mu_s: c.own_chances as f64 / n,
        blocking: ratio(c.blocked as f64, c.offered as f64),
        relay_energy: c.relay_energy,
        own_energy: c.own_energy,
        mean_q_s,
        diverged: diverging(q_s.len() as f64, mean_q_s, acc[2].arrivals as f64),
        primary: acc[0],
        relay: acc[1],
        secondary: acc[2],
        tail,
    };
    (stats, trace)
}

/// Runs all replications (concurrently) and merges them in replication order.
pub fn run(config: &SimConfig) -> Result<SimStats> {
    config.validate()?;
    let runs: Vec<(ReplicationStats, Vec<TraceRecord>)> =
        (0..config.replications).into_par_iter().map(|r| replicate(config, r)).collect();
    let (replications, traces): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let pick = |g: fn(&ReplicationStats) -> f64| Estimate::from_samples(&replications.iter().map(g).collect::<Vec<_>>());
    let occupancy_tail = (0..=TAIL_MAX)
        .map(|k| Estimate::from_samples(&replications.iter().map(|r| r.tail[k]).collect::<Vec<_>>()))
        .collect();
    Ok(SimStats {
        mean_d_s: pick(|r| r.d_s),
        mean_d_p: pick(|r| r.d_p),
        empirical_gamma: pick(|r| r.gamma),
        empirical_rates: EmpiricalRates {
            mu_p: pick(|r| r.mu_p),
            lambda_ps: pick(|r| r.lambda_ps),
            mu_ps: pick(|r| r.mu_ps),
            mu_s: pick(|r| r.mu_s),
        },
        occupancy_tail,
        blocking: pick(|r| r.blocking),
        drop_count: replications.iter().map(|r| r.relay.dropped).sum(),
        diverged: replications.iter().any(|r| r.diverged),
        replications,
        traces: if config.trace { traces } else { Vec::new() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub quantity: &'static str,
    pub analytic: f64,
    pub empirical: f64,
    /// `|empirical − analytic| / |analytic|`; 0 for an exact 0/0 match.
    pub rel_error: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub diverged: bool,
    pub stats: SimStats,
}

impl Comparison {
    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv");
        }
        finish(w)
    }
}

fn relative_error(analytic: f64, empirical: f64) -> f64 {
    if analytic == empirical {
        0.0
    } else {
        (empirical - analytic).abs() / analytic.abs()
    }
}

/// Γ computed from per-success energies: each link's expected minimum power
/// divided by its success probability.
pub fn success_weighted_gamma(params: &NetworkParams, rates: &RateSet) -> f64 {
    let out = params.outages();
    let report = power_budget(params, rates.lambda_ps);
    let relay = rates.lambda_ps * report.e_psp / (1.0 - out.sp);
    let own = params.lambda_s * report.e_ps / (1.0 - out.s);
    ratio(relay, relay + own)
}

/// Simulates `config` and tabulates every empirical quantity against its
/// closed-form counterpart.
pub fn compare_with_analytics(config: &SimConfig) -> Result<Comparison> {
    config.validate()?;
    let params = &config.params;
    let rates = rate_set(params, config.f)?;
    rates.require_stable()?;
    let delays = secondary_delay(params, config.f)?;
    let gamma = power_budget(params, rates.lambda_ps).gamma;
    let stats = run(config)?;
    let e = &stats.empirical_rates;

    let mut cells = vec![
        ("mu_p", rates.mu_p, e.mu_p),
        ("lambda_ps", rates.lambda_ps, e.lambda_ps),
        ("mu_ps", rates.mu_ps, e.mu_ps),
        ("mu_s", rates.mu_s, e.mu_s),
        ("d_p", delays.d_p, stats.mean_d_p),
        ("d_s", delays.d_s, stats.mean_d_s),
        ("gamma", gamma, stats.empirical_gamma),
        ("gamma_success_weighted", success_weighted_gamma(params, &rates), stats.empirical_gamma),
    ];
    if let Some(k) = config.buffer_k {
        let moments = geometric_moments(rates.mu_ps)?;
        for (name, mode) in [("p_b", OverflowMode::GeometricMatched), ("p_b_literal", OverflowMode::Literal)] {
            let m = buffer_metrics(rates.lambda_ps, &moments, k, mode)?;
            cells.push((name, m.p_b, stats.blocking));
        }
    }
    let rows = cells
        .into_iter()
        .map(|(quantity, analytic, est)| ComparisonRow {
            quantity,
            analytic,
            empirical: est.mean,
            rel_error: relative_error(analytic, est.mean),
            se: est.se,
        })
        .collect();
    let diverged = stats.diverged;
    if diverged {
        return Err(Error::Infeasible("simulated secondary queue diverged".into()));
    }
    Ok(Comparison { rows, diverged, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(f: f64) -> SimConfig {
        SimConfig {
            slots: 60_000,
            warmup: 1_000,
            replications: 4,
            ..SimConfig::new(NetworkParams::default(), f)
        }
    }

    #[test]
    fn no_relaying_without_acceptance() {
        let s = run(&short(0.0)).unwrap();
        assert_eq!(s.empirical_rates.lambda_ps.mean, 0.0);
        assert_eq!(s.empirical_gamma.mean, 0.0);
        assert!(s.conserved());
    }

    #[test]
    fn idle_primary_serves_secondary_at_link_rate() {
        let cfg = SimConfig {
            params: NetworkParams::default().with_rates(0.0, 0.1),
            ..short(0.5)
        };
        let s = run(&cfg).unwrap();
        let target = 1.0 - cfg.params.outages().s;
        assert!(s.empirical_rates.mu_s.within(target, 3.0), "{:?} vs {target}", s.empirical_rates.mu_s);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = run(&short(0.5)).unwrap();
        let b = run(&short(0.5)).unwrap();
        assert_eq!(a, b);
        let c = run(&SimConfig { seed: 2, ..short(0.5) }).unwrap();
        assert_ne!(a.mean_d_s, c.mean_d_s);
    }

    #[test]
    fn replications_differ() {
        let s = run(&short(0.5)).unwrap();
        assert_ne!(s.replications[0].d_s, s.replications[1].d_s);
    }

    #[test]
    fn delays_at_least_one_slot() {
        let s = run(&short(0.5)).unwrap();
        for r in &s.replications {
            assert!(r.d_p >= 1.0 && r.d_s >= 1.0);
        }
    }

    #[test]
    fn finite_buffer_drops_and_conserves() {
        let cfg = SimConfig {
            buffer_k: Some(0),
            params: NetworkParams::default().with_rates(0.5, 0.1),
            ..short(1.0)
        };
        let s = run(&cfg).unwrap();
        assert!(s.drop_count > 0);
        assert!(s.conserved());
        assert!(s.blocking.mean > 0.0 && s.blocking.mean <= 1.0);
    }

    #[test]
    fn overload_flags_divergence() {
        let cfg = SimConfig {
            params: NetworkParams::default().with_rates(0.3, 0.6),
            replications: 2,
            ..short(0.5)
        };
        assert!(run(&cfg).unwrap().diverged);
    }

    #[test]
    fn trace_records_every_slot() {
        let cfg = SimConfig {
            slots: 500,
            warmup: 0,
            replications: 2,
            trace: true,
            ..short(0.5)
        };
        let s = run(&cfg).unwrap();
        assert_eq!(s.traces.len(), 2);
        assert_eq!(s.traces[0].len(), 500);
        assert_eq!(s.trace_csv(0).unwrap().lines().count(), 501);
        assert!(s.trace_csv(2).is_none());
    }

    #[test]
    fn exact_zero_rows() {
        let cmp = compare_with_analytics(&short(0.0)).unwrap();
        for q in ["lambda_ps", "gamma"] {
            let r = cmp.row(q).unwrap();
            assert_eq!((r.analytic, r.empirical, r.rel_error), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn config_checks() {
        assert!(run(&SimConfig { warmup: 60_000, ..short(0.5) }).is_err());
        assert!(run(&SimConfig { replications: 0, ..short(0.5) }).is_err());
        assert!(run(&SimConfig { f: 1.5, ..short(0.5) }).is_err());
    }
}
