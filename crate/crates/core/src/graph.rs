//! The evolving graph: stationary sampling, per-pair update clocks, the lazy
//! edge oracle, and the thinned sampler for absent-pair activations.
//!
//! Every pair {i,j} carries an independent Poisson update clock of rate
//! κ_{i,j}; at each update the edge is redrawn as Bernoulli(p_{i,j}). The
//! lazy oracle and the eager all-clocks evolution both realize the same
//! keyed clock streams, so their edge indicators agree bitwise under a
//! shared `RngPolicy`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::params::{ModelParams, VertexTables};
use crate::rng::{pair_id, Domain, RngPolicy, SeqRng};
use crate::sampling::{sample_row, AliasTable};

/// Cursor into one pair's update-clock stream.
#[derive(Debug, Clone, Copy)]
struct PairCursor {
    present: bool,
    observed_at: f64,
    /// Index of the next update not yet consumed (1-based in the stream).
    next_idx: u64,
    /// Absolute time of that update.
    next_time: f64,
}

/// Present-edge set with per-pair last-observation cursors.
#[derive(Debug, Clone)]
pub struct GraphState {
    pub n: u32,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
    pub clock: f64,
    cache: HashMap<u64, PairCursor>,
}

pub const EAGER_MAX_N: u32 = 512;

impl GraphState {
    pub fn empty(n: u32) -> Self {
        GraphState {
            n,
            adjacency: vec![Vec::new(); n as usize + 1],
            edge_count: 0,
            clock: 0.0,
            cache: HashMap::new(),
        }
    }

    /// Draw the stationary graph: each pair present independently with
    /// probability p_{i,j}, sampled row by row from the kernel envelope in
    /// expected O(N + |E|).
    pub fn sample_stationary(params: &ModelParams, tables: &VertexTables, rng: &mut SeqRng) -> Self {
        let mut g = GraphState::empty(params.n);
        let mut buf = Vec::new();
        for i in 1..params.n {
            buf.clear();
            sample_row(params, tables, i, i + 1, params.n, rng, &mut buf);
            for &j in &buf {
                g.set_edge(i, j, true);
            }
        }
        g
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, i: u32) -> usize {
        self.adjacency[i as usize].len()
    }

    pub fn neighbours(&self, i: u32) -> &[u32] {
        &self.adjacency[i as usize]
    }

    pub fn contains_edge(&self, i: u32, j: u32) -> bool {
        self.adjacency[i as usize].binary_search(&j).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (1..=self.n).flat_map(move |i| {
            self.adjacency[i as usize]
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    fn set_edge(&mut self, i: u32, j: u32, present: bool) {
        let (a, b) = (i as usize, j as usize);
        match (self.adjacency[a].binary_search(&j), present) {
            (Err(pos), true) => {
                self.adjacency[a].insert(pos, j);
                let pos_b = self.adjacency[b].binary_search(&i).unwrap_err();
                self.adjacency[b].insert(pos_b, i);
                self.edge_count += 1;
            }
            (Ok(pos), false) => {
                self.adjacency[a].remove(pos);
                let pos_b = self.adjacency[b].binary_search(&i).unwrap();
                self.adjacency[b].remove(pos_b);
                self.edge_count -= 1;
            }
            _ => {}
        }
    }

    fn cursor(&mut self, params: &ModelParams, policy: &RngPolicy, i: u32, j: u32) -> PairCursor {
        let id = pair_id(i, j);
        if let Some(c) = self.cache.get(&id) {
            return *c;
        }
        // Unobserved pair: its state at time 0 is the sampled stationary
        // adjacency, and its first update sits one exponential after 0.
        let rate = params.update_rate_unchecked(i, j);
        let c = PairCursor {
            present: self.contains_edge(i, j),
            observed_at: 0.0,
            next_idx: 1,
            next_time: policy.exponential(Domain::UpdateTime, id, 1, rate),
        };
        self.cache.insert(id, c);
        c
    }

    /// Exact state of edge {i,j} at time `t >= observed_at`, obtained by
    /// walking the pair's keyed update clock. Updates the cache and the
    /// adjacency, so repeated queries are monotone in time per pair.
    pub fn lazy_edge_query(
        &mut self,
        params: &ModelParams,
        i: u32,
        j: u32,
        t: f64,
        policy: &RngPolicy,
    ) -> Result<bool> {
        if i == j || i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(Error::Index(format!("pair ({i},{j}) invalid for N={}", self.n)));
        }
        let id = pair_id(i, j);
        let mut cur = self.cursor(params, policy, i, j);
        if t < cur.observed_at {
            return Err(Error::Time(format!(
                "query at {t} precedes last observation {} of pair ({i},{j})",
                cur.observed_at
            )));
        }
        let rate = params.update_rate_unchecked(i, j);
        let p = params.connection_prob_unchecked(i, j);
        while cur.next_time <= t {
            cur.present = policy.uniform(Domain::UpdateCoin, id, cur.next_idx) < p;
            cur.next_idx += 1;
            cur.next_time += policy.exponential(Domain::UpdateTime, id, cur.next_idx, rate);
        }
        cur.observed_at = t;
        self.cache.insert(id, cur);
        self.set_edge(i, j, cur.present);
        if t > self.clock {
            self.clock = t;
        }
        Ok(cur.present)
    }

    /// Advance every pair's clock by `dt`, realizing all updates. Refuses
    /// N > 512 to guard against the quadratic cost.
    pub fn evolve_eager(&mut self, params: &ModelParams, dt: f64, policy: &RngPolicy) -> Result<()> {
        if self.n > EAGER_MAX_N {
            return Err(Error::SizeLimit(format!(
                "eager evolution is O(N^2); N={} exceeds {}",
                self.n, EAGER_MAX_N
            )));
        }
        if dt < 0.0 {
            return Err(Error::Time(format!("negative dt {dt}")));
        }
        let target = self.clock + dt;
        for i in 1..self.n {
            for j in (i + 1)..=self.n {
                self.lazy_edge_query(params, i, j, target, policy)?;
            }
        }
        self.clock = target;
        Ok(())
    }

    /// Edge-list snapshot: header `N=<n> t=<time>`, then one `i j` line per
    /// present edge.
    pub fn export_snapshot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "N={} t={}", self.n, self.clock);
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Audit helper: recount edges from the adjacency.
    pub fn recount_edges(&self) -> usize {
        let total: usize = (1..=self.n).map(|i| self.adjacency[i as usize].len()).sum();
        total / 2
    }
}

/// Samples absent pairs with probability proportional to κ_{i,j}·p_{i,j} by
/// proposing from the separable kernel envelope (a two-stage alias/row draw)
/// and rejecting proposals that are currently present.
pub struct ActivationSampler {
    params: ModelParams,
    tables: VertexTables,
    /// alias over directed source i with weight κ_i · envelope-row-mass(i)
    source: AliasTable,
    /// alias over target j with weight envelope[j]
    target: AliasTable,
    /// Σ_{i<j} κ_{i,j} p̂_{i,j} over all pairs (exact)
    all_pairs_rate: f64,
    /// proposal mass of the envelope construction (for diagnostics)
    envelope_rate: f64,
}

pub const ACTIVATION_MAX_N: u32 = 8192;

impl ActivationSampler {
    pub fn new(params: &ModelParams, tables: &VertexTables) -> Result<Self> {
        if params.n > ACTIVATION_MAX_N {
            return Err(Error::SizeLimit(format!(
                "activation sampler precomputes O(N^2) pair rates; N={} exceeds {}",
                params.n, ACTIVATION_MAX_N
            )));
        }
        let n = params.n as usize;
        let env_total = tables.envelope_prefix[n];
        // Stage-1 weight must be ∝ κ_i·env_i so that the joint proposal is
        // exactly ∝ κ_i·q_{i,j}; self-pairs are thinned out in `sample`.
        let mut source_w = vec![0.0; n + 1];
        for i in 1..=n {
            source_w[i] = tables.vertex_rate[i] * tables.envelope[i];
        }
        let envelope_rate: f64 = source_w
            .iter()
            .sum::<f64>()
            * params.kernel.beta
            / params.n as f64
            * env_total;
        let mut all_pairs_rate = 0.0;
        for i in 1..params.n {
            for j in (i + 1)..=params.n {
                all_pairs_rate +=
                    params.update_rate_unchecked(i, j) * params.connection_prob_unchecked(i, j);
            }
        }
        Ok(ActivationSampler {
            params: *params,
            tables: tables.clone(),
            source: AliasTable::new(&source_w),
            target: AliasTable::new(&tables.envelope),
            all_pairs_rate,
            envelope_rate,
        })
    }

    /// Exact total rate of absent→present transitions given the present set.
    pub fn total_rate(&self, present: &GraphState) -> f64 {
        let mut present_rate = 0.0;
        for (i, j) in present.edges() {
            present_rate += self.params.update_rate_unchecked(i, j)
                * self.params.connection_prob_unchecked(i, j);
        }
        (self.all_pairs_rate - present_rate).max(0.0)
    }

    /// Draw an absent pair ∝ κ_{i,j}·p_{i,j}. Returns None when every pair is
    /// present (total rate zero).
    pub fn sample(&self, present: &GraphState, rng: &mut SeqRng) -> Option<(u32, u32)> {
        if present.edge_count() >= (self.params.n as usize * (self.params.n as usize - 1)) / 2 {
            return None;
        }
        loop {
            let i = self.source.sample(rng) as u32;
            let j = self.target.sample(rng) as u32;
            if i == j || i == 0 || j == 0 {
                continue;
            }
            // exact accept ratio: true directed weight κ_i·p̂ over envelope
            let q = self.tables.pair_envelope(&self.params, i, j);
            let p = self.params.connection_prob_unchecked(i, j);
            if rng.uniform() >= p / q {
                continue;
            }
            // rule variants are dominated by the Sum rate κ_i + κ_j
            let kappa_sum = self.tables.vertex_rate[i as usize] + self.tables.vertex_rate[j as usize];
            let kappa = self.params.update_rate_unchecked(i, j);
            if rng.uniform() >= kappa / kappa_sum {
                continue;
            }
            if present.contains_edge(i, j) {
                continue;
            }
            return Some((i.min(j), i.max(j)));
        }
    }

    pub fn all_pairs_rate(&self) -> f64 {
        self.all_pairs_rate
    }

    pub fn envelope_rate(&self) -> f64 {
        self.envelope_rate
    }
}
