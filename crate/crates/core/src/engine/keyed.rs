//! Graphical-construction engine: walks every keyed clock stream.
//!
//! Events are autonomous (clock times never depend on the state), so the
//! whole trajectory is a deterministic function of the streams. Two runs
//! sharing an `RngPolicy` see identical clocks, which gives the standard
//! monotone coupling across initial sets and lets the dual process be
//! replayed from the recorded event log.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{pair_id, Domain, RngPolicy};

use super::{EventCounts, RunConfig, TrajectoryStats};

pub const KEYED_MAX_N: u32 = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Clock {
    Update(u32),
    Tick(u32),
    Recovery(u32),
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    clock: Clock,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time.partial_cmp(&other.time).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// A fully materialized event, as recorded for replay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoggedEvent {
    /// Pair update with the redrawn presence.
    Update { t: f64, i: u32, j: u32, present: bool },
    /// Infection-clock point; `present` is the edge state at that instant.
    Tick { t: f64, i: u32, j: u32, present: bool },
    Recovery { t: f64, v: u32 },
}

impl LoggedEvent {
    pub fn time(&self) -> f64 {
        match *self {
            LoggedEvent::Update { t, .. } | LoggedEvent::Tick { t, .. } | LoggedEvent::Recovery { t, .. } => t,
        }
    }
}

/// Event log of one forward run, sufficient to reconstruct both the graph
/// trajectory and any contact process driven by the same clocks.
#[derive(Debug, Clone)]
pub struct ForwardRecord {
    pub n: u32,
    pub horizon: f64,
    pub initial_edges: Vec<(u32, u32)>,
    pub events: Vec<LoggedEvent>,
}

pub struct KeyedEngine {
    params: ModelParams,
    policy: RngPolicy,
    pairs: Vec<(u32, u32)>,
    /// edge presence per pair index
    edge: Vec<bool>,
    /// consumed stream counters
    update_idx: Vec<u64>,
    tick_idx: Vec<u64>,
    recovery_idx: Vec<u64>,
    pub infected: Vec<bool>,
    infected_count: u64,
    queue: BinaryHeap<Reverse<Pending>>,
    pub clock: f64,
    pub counts: EventCounts,
    record: Option<ForwardRecord>,
}

/// What one `step` did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepEvent {
    Recovery { t: f64, v: u32 },
    Transmission { t: f64, from: u32, to: u32 },
    NoopAttempt { t: f64, i: u32, j: u32 },
    EdgeUpdate { t: f64, i: u32, j: u32, present: bool },
    /// Infection-clock point on an absent pair (invisible to the trace).
    IdleTick { t: f64, i: u32, j: u32 },
}

impl KeyedEngine {
    pub fn new(params: &ModelParams, policy: &RngPolicy) -> Result<Self> {
        if params.n > KEYED_MAX_N {
            return Err(Error::SizeLimit(format!(
                "graphical engine realizes O(N^2) streams; N={} exceeds {}",
                params.n, KEYED_MAX_N
            )));
        }
        let n = params.n;
        let pairs: Vec<(u32, u32)> =
            (1..=n).flat_map(|i| ((i + 1)..=n).map(move |j| (i, j))).collect();
        let mut edge = vec![false; pairs.len()];
        let mut queue = BinaryHeap::with_capacity(2 * pairs.len() + n as usize);
        let mut update_idx = vec![0u64; pairs.len()];
        let mut tick_idx = vec![0u64; pairs.len()];
        for (e, &(i, j)) in pairs.iter().enumerate() {
            let id = pair_id(i, j);
            // stationary initial state
            edge[e] = policy.uniform(Domain::GraphInit, id, 0) < params.connection_prob_unchecked(i, j);
            let kappa = params.update_rate_unchecked(i, j);
            let t_upd = policy.exponential(Domain::UpdateTime, id, 1, kappa);
            update_idx[e] = 1;
            queue.push(Reverse(Pending { time: t_upd, clock: Clock::Update(e as u32) }));
            if params.lambda > 0.0 {
                let t_tick = policy.exponential(Domain::InfectionTime, id, 1, params.lambda);
                tick_idx[e] = 1;
                queue.push(Reverse(Pending { time: t_tick, clock: Clock::Tick(e as u32) }));
            }
        }
        let mut recovery_idx = vec![0u64; n as usize + 1];
        for v in 1..=n {
            let t = policy.exponential(Domain::Recovery, v as u64, 1, 1.0);
            recovery_idx[v as usize] = 1;
            queue.push(Reverse(Pending { time: t, clock: Clock::Recovery(v) }));
        }
        Ok(KeyedEngine {
            params: *params,
            policy: *policy,
            pairs,
            edge,
            update_idx,
            tick_idx,
            recovery_idx,
            infected: vec![false; n as usize + 1],
            infected_count: 0,
            queue,
            clock: 0.0,
            counts: EventCounts::default(),
            record: None,
        })
    }

    /// Record all events for later dual replay.
    pub fn enable_recording(&mut self, horizon: f64) {
        self.record = Some(ForwardRecord {
            n: self.params.n,
            horizon,
            initial_edges: self.present_edges(),
            events: Vec::new(),
        });
    }

    pub fn take_record(&mut self) -> Option<ForwardRecord> {
        self.record.take()
    }

    pub fn set_infected(&mut self, init: &[u32]) {
        for v in self.infected.iter_mut() {
            *v = false;
        }
        self.infected_count = 0;
        for &v in init {
            if !self.infected[v as usize] {
                self.infected[v as usize] = true;
                self.infected_count += 1;
            }
        }
    }

    pub fn infected_count(&self) -> u64 {
        self.infected_count
    }

    pub fn infected_set(&self) -> Vec<u32> {
        (1..=self.params.n).filter(|&v| self.infected[v as usize]).collect()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge.iter().filter(|&&e| e).count() as u64
    }

    pub fn present_edges(&self) -> Vec<(u32, u32)> {
        self.pairs
            .iter()
            .zip(self.edge.iter())
            .filter(|(_, &e)| e)
            .map(|(&(i, j), _)| (i, j))
            .collect()
    }

    pub fn contains_edge(&self, i: u32, j: u32) -> bool {
        let e = self.pair_index(i, j);
        self.edge[e]
    }

    fn pair_index(&self, i: u32, j: u32) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let n = self.params.n as u64;
        let a = a as u64;
        let b = b as u64;
        // row-major upper triangle
        ((a - 1) * (2 * n - a) / 2 + (b - a - 1)) as usize
    }

    pub fn next_event_time(&self) -> Option<f64> {
        self.queue.peek().map(|Reverse(p)| p.time)
    }

    /// Process the next clock point. Returns None if the queue is exhausted
    /// (cannot happen: clocks are unbounded).
    pub fn step(&mut self) -> Option<StepEvent> {
        let Reverse(next) = self.queue.pop()?;
        self.clock = next.time;
        let t = next.time;
        let out = match next.clock {
            Clock::Update(e) => {
                let (i, j) = self.pairs[e as usize];
                let id = pair_id(i, j);
                let idx = self.update_idx[e as usize];
                let p = self.params.connection_prob_unchecked(i, j);
                let was = self.edge[e as usize];
                let now = self.policy.uniform(Domain::UpdateCoin, id, idx) < p;
                self.edge[e as usize] = now;
                let kappa = self.params.update_rate_unchecked(i, j);
                self.update_idx[e as usize] = idx + 1;
                let dt = self.policy.exponential(Domain::UpdateTime, id, idx + 1, kappa);
                self.queue.push(Reverse(Pending { time: t + dt, clock: Clock::Update(e) }));
                self.counts.edge_updates += 1;
                if now && !was {
                    self.counts.activations += 1;
                }
                if let Some(rec) = self.record.as_mut() {
                    rec.events.push(LoggedEvent::Update { t, i, j, present: now });
                }
                StepEvent::EdgeUpdate { t, i, j, present: now }
            }
            Clock::Tick(e) => {
                let (i, j) = self.pairs[e as usize];
                let id = pair_id(i, j);
                let idx = self.tick_idx[e as usize];
                self.tick_idx[e as usize] = idx + 1;
                let dt = self.policy.exponential(Domain::InfectionTime, id, idx + 1, self.params.lambda);
                self.queue.push(Reverse(Pending { time: t + dt, clock: Clock::Tick(e) }));
                let present = self.edge[e as usize];
                if let Some(rec) = self.record.as_mut() {
                    rec.events.push(LoggedEvent::Tick { t, i, j, present });
                }
                if !present {
                    self.counts.idle_ticks += 1;
                    StepEvent::IdleTick { t, i, j }
                } else {
                    let ii = self.infected[i as usize];
                    let jj = self.infected[j as usize];
                    match (ii, jj) {
                        (true, false) => {
                            self.infected[j as usize] = true;
                            self.infected_count += 1;
                            self.counts.transmissions += 1;
                            StepEvent::Transmission { t, from: i, to: j }
                        }
                        (false, true) => {
                            self.infected[i as usize] = true;
                            self.infected_count += 1;
                            self.counts.transmissions += 1;
                            StepEvent::Transmission { t, from: j, to: i }
                        }
                        _ => {
                            self.counts.noop_attempts += 1;
                            StepEvent::NoopAttempt { t, i, j }
                        }
                    }
                }
            }
            Clock::Recovery(v) => {
                let idx = self.recovery_idx[v as usize];
                self.recovery_idx[v as usize] = idx + 1;
                let dt = self.policy.exponential(Domain::Recovery, v as u64, idx + 1, 1.0);
                self.queue.push(Reverse(Pending { time: t + dt, clock: Clock::Recovery(v) }));
                if let Some(rec) = self.record.as_mut() {
                    rec.events.push(LoggedEvent::Recovery { t, v });
                }
                if self.infected[v as usize] {
                    self.infected[v as usize] = false;
                    self.infected_count -= 1;
                    self.counts.recoveries += 1;
                }
                StepEvent::Recovery { t, v }
            }
        };
        Some(out)
    }

    pub fn run(mut self, init: &[u32], cfg: &RunConfig) -> Result<TrajectoryStats> {
        self.set_infected(init);
        let star_mask: Option<Vec<bool>> = cfg.star_set.as_ref().map(|set| {
            let mut m = vec![false; self.params.n as usize + 1];
            for &v in set {
                m[v as usize] = true;
            }
            m
        });
        let mut stats = TrajectoryStats {
            n: self.params.n,
            extinction_time: None,
            density_series: Vec::new(),
            star_series: Vec::new(),
            edge_series: Vec::new(),
            event_counts: EventCounts::default(),
            final_infected: 0,
        };
        let mut next_sample = 0.0;
        let sample = |eng: &KeyedEngine, stats: &mut TrajectoryStats, t: f64| {
            stats.density_series.push((t, eng.infected_count as f64));
            let star = star_mask
                .as_ref()
                .map(|m| (1..=eng.params.n).filter(|&v| m[v as usize] && eng.infected[v as usize]).count())
                .unwrap_or(0);
            stats.star_series.push((t, star as f64));
            stats.edge_series.push((t, eng.edge_count() as f64));
        };
        if self.infected_count == 0 {
            stats.extinction_time = Some(0.0);
            sample(&self, &mut stats, 0.0);
            stats.event_counts = self.counts;
            return Ok(stats);
        }
        loop {
            // emit samples up to the next event time
            while next_sample <= cfg.t_max
                && self
                    .queue
                    .peek()
                    .map(|Reverse(p)| p.time >= next_sample)
                    .unwrap_or(true)
            {
                sample(&self, &mut stats, next_sample);
                next_sample += cfg.sample_interval;
                if cfg.sample_interval.is_infinite() {
                    next_sample = f64::INFINITY;
                }
            }
            let upcoming = self.queue.peek().map(|Reverse(p)| p.time).unwrap_or(f64::INFINITY);
            if upcoming > cfg.t_max {
                self.clock = cfg.t_max;
                break;
            }
            self.step();
            if self.infected_count == 0 && stats.extinction_time.is_none() {
                stats.extinction_time = Some(self.clock);
                break;
            }
        }
        if stats.density_series.last().map(|&(t, _)| t < self.clock).unwrap_or(true) {
            sample(&self, &mut stats, self.clock);
        }
        stats.final_infected = self.infected_count;
        stats.event_counts = self.counts;
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::JointOracle;
    use crate::kernel::{KernelKind, KernelSpec};

    fn tiny(lambda: f64) -> ModelParams {
        let kernel = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        let mut p = ModelParams::new(3, kernel, 0.0, 1.0, 1.0).unwrap();
        p.lambda = lambda;
        p
    }

    #[test]
    fn single_vertex_mean_extinction() {
        let kernel = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        let params = ModelParams::new(1, kernel, 0.0, 1.0, 1.0).unwrap();
        let policy = RngPolicy::new(17);
        let reps = 40_000;
        let mut sum = 0.0;
        for r in 0..reps {
            let eng = KeyedEngine::new(&params, &policy.replica(r)).unwrap();
            let stats = eng.run(&[1], &RunConfig { t_max: 200.0, ..Default::default() }).unwrap();
            sum += stats.extinction_time.unwrap();
        }
        let mean = sum / reps as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn empty_init_is_absorbing() {
        let params = tiny(0.5);
        let eng = KeyedEngine::new(&params, &RngPolicy::new(1)).unwrap();
        let stats = eng.run(&[], &RunConfig::default()).unwrap();
        assert_eq!(stats.extinction_time, Some(0.0));
        assert_eq!(stats.final_infected, 0);
    }

    #[test]
    fn extinction_probability_matches_oracle() {
        let params = tiny(0.5);
        let oracle = JointOracle::new(&params).unwrap();
        let target = oracle.extinct_by(&oracle.full_occupancy(), 1.0);
        let policy = RngPolicy::new(99);
        let reps = 60_000u64;
        let mut extinct = 0u64;
        let cfg = RunConfig { t_max: 1.0, sample_interval: f64::INFINITY, ..Default::default() };
        for r in 0..reps {
            let eng = KeyedEngine::new(&params, &policy.replica(r)).unwrap();
            let stats = eng.run(&[1, 2, 3], &cfg).unwrap();
            if stats.extinction_time.is_some() {
                extinct += 1;
            }
        }
        let got = extinct as f64 / reps as f64;
        let sd = (target * (1.0 - target) / reps as f64).sqrt();
        assert!((got - target).abs() < 3.5 * sd, "got {got} target {target} sd {sd}");
    }

    #[test]
    fn monotone_coupling_in_initial_set() {
        let params = tiny(0.8);
        let cfg = RunConfig { t_max: 3.0, sample_interval: f64::INFINITY, ..Default::default() };
        for seed in 0..300u64 {
            let policy = RngPolicy::new(seed);
            let mut small = KeyedEngine::new(&params, &policy).unwrap();
            let mut large = KeyedEngine::new(&params, &policy).unwrap();
            small.set_infected(&[1]);
            large.set_infected(&[1, 2]);
            loop {
                let ts = small.queue.peek().map(|Reverse(p)| p.time).unwrap();
                if ts > cfg.t_max {
                    break;
                }
                small.step();
                large.step();
                for v in 1..=3u32 {
                    assert!(
                        !small.infected[v as usize] || large.infected[v as usize],
                        "seed {seed}: monotonicity violated at t={}",
                        small.clock
                    );
                }
            }
        }
    }

    #[test]
    fn rate_conservation_on_event_counts() {
        // over a long graph-heavy run, category counts concentrate around
        // their integrated rates
        let kernel = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        let mut params = ModelParams::new(30, kernel, 0.0, 1.0, 1.0).unwrap();
        params.lambda = 0.4;
        let policy = RngPolicy::new(5);
        let mut eng = KeyedEngine::new(&params, &policy).unwrap();
        eng.set_infected(&(1..=30).collect::<Vec<_>>());
        let t_end = 120.0;
        while let Some(StepEvent::Recovery { t, .. })
        | Some(StepEvent::Transmission { t, .. })
        | Some(StepEvent::NoopAttempt { t, .. })
        | Some(StepEvent::EdgeUpdate { t, .. })
        | Some(StepEvent::IdleTick { t, .. }) = eng.step()
        {
            if t > t_end {
                break;
            }
        }
        // update clocks: Σ κ_{ij} · t; κ = 2 for all pairs at η=0, ϰ=1
        let pairs = 30.0 * 29.0 / 2.0;
        let expect_updates = pairs * 2.0 * t_end;
        let got = eng.counts.edge_updates as f64;
        assert!(
            (got - expect_updates).abs() < 4.0 * expect_updates.sqrt(),
            "updates {got} expect {expect_updates}"
        );
        // infection clocks: λ per pair, idle+noop+transmission = all ticks
        let ticks = eng.counts.idle_ticks + eng.counts.noop_attempts + eng.counts.transmissions;
        let expect_ticks = pairs * params.lambda * t_end;
        assert!(
            (ticks as f64 - expect_ticks).abs() < 4.0 * expect_ticks.sqrt(),
            "ticks {ticks} expect {expect_ticks}"
        );
    }

    #[test]
    fn graph_marginal_unaffected_by_infection() {
        // identical policy with and without infection: edge trajectories equal
        let params = tiny(1.0);
        let policy = RngPolicy::new(31);
        let mut with = KeyedEngine::new(&params, &policy).unwrap();
        let mut without = KeyedEngine::new(&params, &policy).unwrap();
        with.set_infected(&[1, 2, 3]);
        for _ in 0..2000 {
            with.step();
        }
        while without.clock < with.clock {
            without.step();
        }
        // compare edge sets at matched times by walking to a common time
        let t = with.clock.max(without.clock) + 0.01;
        while with.queue.peek().map(|Reverse(p)| p.time < t).unwrap_or(false) {
            with.step();
        }
        while without.queue.peek().map(|Reverse(p)| p.time < t).unwrap_or(false) {
            without.step();
        }
        assert_eq!(with.present_edges(), without.present_edges());
    }
}
