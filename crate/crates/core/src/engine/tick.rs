//! Anchored-conditional engine: realizes every infection-clock tick on the
//! tracked pairs and resolves edge presence at tick time from the exact
//! two-state conditional given the pair's last observation.
//!
//! Between consecutive observations of a pair there is no transmission
//! opportunity left unrealized (ticks on pairs with zero or two infected
//! endpoints cannot change the state and carry no information about the
//! edge), so sequential conditional sampling reproduces the exact joint law
//! of the infection process. Edge updates never appear as events, which
//! makes the cost per unit time λ·P + |infected| regardless of how fast
//! hubs update.
//!
//! With `tracked = Some(K)` the infection is restricted to vertices 1..=K:
//! ticks outside the tracked block are ignored. By the usual monotonicity of
//! the graphical construction the restricted process is a pathwise lower
//! bound of the full one (the graph marginal is not affected).

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{Domain, RngPolicy, SeqRng};

use super::{EventCounts, RunConfig, TrajectoryStats};

pub const TICK_MAX_TRACKED: u32 = 2048;

const UNOBSERVED: u8 = 2;

#[derive(Clone, Copy)]
struct Anchor {
    state: u8,
    time: f64,
}

/// Per-vertex monomial tables so the hot path avoids powf.
struct PairTables {
    /// (i/N)^{-γ}
    pow_neg_g: Vec<f64>,
    /// (i/N)^{γ-1}
    pow_gm1: Vec<f64>,
    /// (i/N)^{-γ-1}
    pow_neg_g1: Vec<f64>,
    /// κ_i
    rate: Vec<f64>,
}

impl PairTables {
    fn build(params: &ModelParams, k: u32) -> Self {
        let n = params.n as f64;
        let g = params.kernel.gamma;
        let mut pow_neg_g = vec![0.0; k as usize + 1];
        let mut pow_gm1 = vec![0.0; k as usize + 1];
        let mut pow_neg_g1 = vec![0.0; k as usize + 1];
        let mut rate = vec![0.0; k as usize + 1];
        for i in 1..=k {
            let x = i as f64 / n;
            pow_neg_g[i as usize] = x.powf(-g);
            pow_gm1[i as usize] = x.powf(g - 1.0);
            pow_neg_g1[i as usize] = x.powf(-g - 1.0);
            rate[i as usize] = params.vertex_rate(i);
        }
        PairTables { pow_neg_g, pow_gm1, pow_neg_g1, rate }
    }
}

pub struct TickEngine {
    params: ModelParams,
    /// tracked prefix 1..=k
    k: u32,
    rng: SeqRng,
    tables: PairTables,
    anchors: Vec<Anchor>,
    infected: Vec<bool>,
    infected_list: Vec<u32>,
    list_pos: Vec<u32>,
    pub clock: f64,
    pub counts: EventCounts,
    tick_rate: f64,
}

impl TickEngine {
    pub fn new(params: &ModelParams, tracked: Option<u32>, policy: &RngPolicy) -> Result<Self> {
        let k = tracked.unwrap_or(params.n);
        if k == 0 || k > params.n {
            return Err(Error::BadParameter(format!(
                "tracked prefix {k} outside 1..={}",
                params.n
            )));
        }
        if k > TICK_MAX_TRACKED {
            return Err(Error::SizeLimit(format!(
                "tick engine stores O(K^2) anchors; K={k} exceeds {TICK_MAX_TRACKED} \
                 (restrict with `tracked`)"
            )));
        }
        let n_pairs = k as usize * (k as usize - 1) / 2;
        let tick_rate = params.lambda * n_pairs as f64;
        Ok(TickEngine {
            params: *params,
            k,
            rng: policy.stream(Domain::Sequential, 0),
            tables: PairTables::build(params, k),
            anchors: vec![Anchor { state: UNOBSERVED, time: 0.0 }; n_pairs],
            infected: vec![false; k as usize + 1],
            infected_list: Vec::new(),
            list_pos: vec![u32::MAX; k as usize + 1],
            clock: 0.0,
            counts: EventCounts::default(),
            tick_rate,
        })
    }

    pub fn tracked(&self) -> u32 {
        self.k
    }

    pub fn set_infected(&mut self, init: &[u32]) {
        for v in self.infected.iter_mut() {
            *v = false;
        }
        self.infected_list.clear();
        for p in self.list_pos.iter_mut() {
            *p = u32::MAX;
        }
        for &v in init {
            if v >= 1 && v <= self.k && !self.infected[v as usize] {
                self.infected[v as usize] = true;
                self.list_pos[v as usize] = self.infected_list.len() as u32;
                self.infected_list.push(v);
            }
        }
    }

    pub fn infected_count(&self) -> u64 {
        self.infected_list.len() as u64
    }

    pub fn infected_set(&self) -> Vec<u32> {
        let mut v = self.infected_list.clone();
        v.sort_unstable();
        v
    }

    #[inline]
    fn pair_index(&self, i: u32, j: u32) -> usize {
        let (a, b) = if i < j { (i as u64, j as u64) } else { (j as u64, i as u64) };
        let k = self.k as u64;
        ((a - 1) * (2 * k - a) / 2 + (b - a - 1)) as usize
    }

    #[inline]
    fn conn_prob(&self, i: u32, j: u32) -> f64 {
        use crate::kernel::KernelKind::*;
        let (lo, hi) = if i < j { (i as usize, j as usize) } else { (j as usize, i as usize) };
        let t = &self.tables;
        let raw = match self.params.kernel.kind {
            Factor => t.pow_neg_g[lo] * t.pow_neg_g[hi],
            PreferentialAttachment => t.pow_neg_g[lo] * t.pow_gm1[hi],
            Strong => t.pow_neg_g[lo],
            Weak => t.pow_neg_g1[hi],
        };
        (self.params.kernel.beta / self.params.n as f64 * raw).min(1.0)
    }

    #[inline]
    fn pair_rate(&self, i: u32, j: u32) -> f64 {
        use crate::params::UpdateRule::*;
        let a = self.tables.rate[i as usize];
        let b = self.tables.rate[j as usize];
        match self.params.update_rule {
            Sum => a + b,
            Max => a.max(b),
            MinIndex => self.tables.rate[i.min(j) as usize],
        }
    }

    /// Conditional presence probability of a pair at the current clock.
    #[inline]
    fn presence_prob(&self, i: u32, j: u32, anchor: Anchor) -> f64 {
        let p = self.conn_prob(i, j);
        if anchor.state == UNOBSERVED {
            return p;
        }
        let decay = (-self.pair_rate(i, j) * (self.clock - anchor.time)).exp();
        p + (anchor.state as f64 - p) * decay
    }

    fn recover(&mut self, v: u32) {
        let pos = self.list_pos[v as usize] as usize;
        let last = *self.infected_list.last().unwrap();
        self.infected_list.swap_remove(pos);
        if last != v {
            self.list_pos[last as usize] = pos as u32;
        }
        self.list_pos[v as usize] = u32::MAX;
        self.infected[v as usize] = false;
        self.counts.recoveries += 1;
    }

    /// Advance to the next event at or before `t_end`. Returns false when the
    /// next event falls beyond `t_end` (clock is then set to `t_end`).
    pub fn step_until(&mut self, t_end: f64) -> bool {
        let total = self.tick_rate + self.infected_list.len() as f64;
        if total <= 0.0 {
            self.clock = t_end;
            return false;
        }
        let dt = self.rng.exponential(total);
        if self.clock + dt > t_end {
            self.clock = t_end;
            return false;
        }
        self.clock += dt;
        if self.rng.uniform() * total < self.infected_list.len() as f64 {
            let v = self.infected_list[self.rng.below(self.infected_list.len())];
            self.recover(v);
            return true;
        }
        // infection-clock tick on a uniform tracked pair
        let i = 1 + self.rng.below(self.k as usize) as u32;
        let mut j = i;
        while j == i {
            j = 1 + self.rng.below(self.k as usize) as u32;
        }
        let ii = self.infected[i as usize];
        let jj = self.infected[j as usize];
        if ii == jj {
            // no transmission possible and nothing observed
            self.counts.idle_ticks += 1;
            return true;
        }
        let e = self.pair_index(i, j);
        let anchor = self.anchors[e];
        let pi = self.presence_prob(i, j, anchor);
        let present = self.rng.uniform() < pi;
        self.anchors[e] = Anchor { state: present as u8, time: self.clock };
        if present {
            let target = if ii { j } else { i };
            self.infected[target as usize] = true;
            self.list_pos[target as usize] = self.infected_list.len() as u32;
            self.infected_list.push(target);
            self.counts.transmissions += 1;
        } else {
            self.counts.idle_ticks += 1;
        }
        true
    }

    /// Conditional expected number of present edges among tracked pairs.
    pub fn expected_edge_count(&self) -> f64 {
        let mut sum = 0.0;
        for i in 1..self.k {
            for j in (i + 1)..=self.k {
                let e = self.pair_index(i, j);
                sum += self.presence_prob(i, j, self.anchors[e]);
            }
        }
        sum
    }

    pub fn run(mut self, init: &[u32], cfg: &RunConfig) -> Result<TrajectoryStats> {
        self.set_infected(init);
        let star_mask: Option<Vec<bool>> = cfg.star_set.as_ref().map(|set| {
            let mut m = vec![false; self.k as usize + 1];
            for &v in set {
                if (v as usize) < m.len() {
                    m[v as usize] = true;
                }
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
        macro_rules! sample {
            ($t:expr) => {{
                stats.density_series.push(($t, self.infected_list.len() as f64));
                let star = star_mask
                    .as_ref()
                    .map(|m| self.infected_list.iter().filter(|&&v| m[v as usize]).count())
                    .unwrap_or(0);
                stats.star_series.push(($t, star as f64));
                stats.edge_series.push(($t, self.expected_edge_count()));
            }};
        }
        if self.infected_list.is_empty() {
            stats.extinction_time = Some(0.0);
            sample!(0.0);
            stats.event_counts = self.counts;
            return Ok(stats);
        }
        if cfg.sample_interval.is_finite() {
            sample!(0.0);
            next_sample = cfg.sample_interval;
        }
        loop {
            let target = if cfg.sample_interval.is_finite() {
                next_sample.min(cfg.t_max)
            } else {
                cfg.t_max
            };
            let advanced = self.step_until(target);
            if !advanced {
                if cfg.sample_interval.is_finite() && next_sample <= cfg.t_max {
                    sample!(next_sample);
                    next_sample += cfg.sample_interval;
                    continue;
                }
                break;
            }
            if self.infected_list.is_empty() {
                stats.extinction_time = Some(self.clock);
                break;
            }
        }
        if stats
            .density_series
            .last()
            .map(|&(t, _)| t < self.clock)
            .unwrap_or(true)
        {
            sample!(self.clock);
        }
        stats.final_infected = self.infected_list.len() as u64;
        stats.event_counts = self.counts;
        Ok(stats)
    }
}
