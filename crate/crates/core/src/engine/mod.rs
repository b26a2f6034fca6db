//! Simulation engines for the joint (graph, infection) evolution.
//!
//! Two exact engines with different cost profiles:
//!
//! * [`keyed::KeyedEngine`] realizes the full graphical construction from
//!   counter-based streams: every pair's update clock and infection clock,
//!   every vertex's recovery clock. Cost O(N²·(κ̄+λ)) per unit time, so it
//!   is limited to small N, but trajectories are bitwise reproducible,
//!   monotone-couplable across initial sets, and replayable backwards for
//!   duality checks.
//!
//! * [`tick::TickEngine`] realizes only the infection clocks and resolves
//!   edge presence at each clock tick from the exact two-state conditional
//!   given the pair's last observation. Edge updates are never simulated as
//!   events, so per-unit-time cost is O(λ·P + |infected|) independent of the
//!   update rates — the only option when hubs update quickly. Supports
//!   restriction to the strongest K vertices, which yields a pathwise lower
//!   bound of the full process (infection events outside the tracked set
//!   are ignored; the graph marginal is untouched).

pub mod keyed;
pub mod tick;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::RngPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    /// Tick engine on the full vertex set when affordable.
    #[default]
    Auto,
    Graphical,
    Tick,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub t_max: f64,
    pub sample_interval: f64,
    /// Vertices whose infected count is reported as the star-occupancy series.
    pub star_set: Option<Vec<u32>>,
    /// Restrict the infection to vertices 1..=tracked (tick engine only).
    pub tracked: Option<u32>,
    pub engine: EngineKind,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            t_max: 100.0,
            sample_interval: 0.5,
            star_set: None,
            tracked: None,
            engine: EngineKind::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct EventCounts {
    pub recoveries: u64,
    pub transmissions: u64,
    /// Infection-clock ticks on a present edge with both endpoints infected.
    pub noop_attempts: u64,
    /// Infection-clock ticks that found no eligible edge (absent, or skipped
    /// without observation in the tick engine).
    pub idle_ticks: u64,
    pub edge_updates: u64,
    /// Updates that turned an absent pair present.
    pub activations: u64,
}

/// One simulated trajectory: extinction time (None while censored at t_max),
/// sampled series and event counts.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryStats {
    pub n: u32,
    pub extinction_time: Option<f64>,
    /// (time, infected count)
    pub density_series: Vec<(f64, f64)>,
    /// (time, infected count within the configured star set)
    pub star_series: Vec<(f64, f64)>,
    /// (time, edge count) — exact for the graphical engine, conditional
    /// expectation over tracked pairs for the tick engine.
    pub edge_series: Vec<(f64, f64)>,
    pub event_counts: EventCounts,
    pub final_infected: u64,
}

impl TrajectoryStats {
    pub fn density_at_end(&self) -> f64 {
        self.final_infected as f64 / self.n as f64
    }

    /// CSV export: time, infected_count, star_infected_count, edge_count.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,infected_count,star_infected_count,edge_count\n");
        for (k, &(t, inf)) in self.density_series.iter().enumerate() {
            let star = self.star_series.get(k).map(|v| v.1).unwrap_or(0.0);
            let edges = self.edge_series.get(k).map(|v| v.1).unwrap_or(0.0);
            s.push_str(&format!("{t},{inf},{star},{edges}\n"));
        }
        s
    }
}

/// Run a single trajectory with the engine selected by the config.
pub fn run_until(
    params: &ModelParams,
    init: &[u32],
    cfg: &RunConfig,
    policy: &RngPolicy,
) -> Result<TrajectoryStats> {
    for &v in init {
        if v == 0 || v > params.n {
            return Err(Error::Index(format!("initial vertex {v} outside 1..={}", params.n)));
        }
    }
    match cfg.engine {
        EngineKind::Graphical => keyed::KeyedEngine::new(params, policy)?.run(init, cfg),
        EngineKind::Tick => tick::TickEngine::new(params, cfg.tracked, policy)?.run(init, cfg),
        EngineKind::Auto => {
            if cfg.tracked.is_some() || params.n > keyed::KEYED_MAX_N {
                tick::TickEngine::new(params, cfg.tracked, policy)?.run(init, cfg)
            } else {
                tick::TickEngine::new(params, None, policy)?.run(init, cfg)
            }
        }
    }
}

/// Monte Carlo estimate of I_N(t): mean density at time t from full
/// occupancy, with standard error.
pub fn density_at(
    params: &ModelParams,
    t: f64,
    reps: u64,
    cfg: &RunConfig,
    policy: &RngPolicy,
) -> Result<(f64, f64)> {
    if reps == 0 {
        return Err(Error::BadParameter("reps must be >= 1".into()));
    }
    let init: Vec<u32> = (1..=params.n).collect();
    let mut run_cfg = cfg.clone();
    run_cfg.t_max = t;
    run_cfg.sample_interval = f64::INFINITY;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for r in 0..reps {
        let stats = run_until(params, &init, &run_cfg, &policy.replica(r))?;
        let d = stats.final_infected as f64 / params.n as f64;
        sum += d;
        sumsq += d * d;
    }
    let mean = sum / reps as f64;
    let var = (sumsq / reps as f64 - mean * mean).max(0.0);
    Ok((mean, (var / reps as f64).sqrt()))
}

/// Censored-mean extinction time estimate: (mean, stderr, censored fraction).
/// Censored replicas contribute t_max to the mean, which therefore reads as
/// a lower bound whenever the censored fraction is nonzero.
pub fn extinction_time_mc(
    params: &ModelParams,
    init: &[u32],
    reps: u64,
    censor: f64,
    cfg: &RunConfig,
    policy: &RngPolicy,
) -> Result<(f64, f64, f64)> {
    if reps == 0 {
        return Err(Error::BadParameter("reps must be >= 1".into()));
    }
    let mut run_cfg = cfg.clone();
    run_cfg.t_max = censor;
    run_cfg.sample_interval = f64::INFINITY;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut censored = 0u64;
    for r in 0..reps {
        let stats = run_until(params, init, &run_cfg, &policy.replica(r))?;
        let t = match stats.extinction_time {
            Some(t) => t,
            None => {
                censored += 1;
                censor
            }
        };
        sum += t;
        sumsq += t * t;
    }
    let mean = sum / reps as f64;
    let var = (sumsq / reps as f64 - mean * mean).max(0.0);
    Ok((mean, (var / reps as f64).sqrt(), censored as f64 / reps as f64))
}
