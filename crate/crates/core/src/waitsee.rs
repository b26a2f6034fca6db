//! The wait-and-see process: a dominating auxiliary process that tracks
//! infected vertices and *revealed* edges. Updates unreveal a pair, revealed
//! edges transmit at rate λ, unrevealed pairs with an infected endpoint get
//! revealed at rate λ·p_{x,y} (simultaneously infecting the other endpoint),
//! and vertices recover at rate 1.
//!
//! Coupled over the shared graphical streams, an infected vertex of the true
//! process is infected here too and every revealed edge is present in the
//! graph; see [`coupled_domination_run`]. The standalone simulator below
//! realizes the exact marginal law and carries the supermartingale score.

use serde::Serialize;

use crate::engine::keyed::{KeyedEngine, StepEvent};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::{Domain, RngPolicy, SeqRng};
use crate::sampling::{AliasTable, Fenwick};
use crate::theory::martingale::{drift_rate, ScoringFunction};

/// Snapshot of a wait-and-see configuration.
#[derive(Debug, Clone, Serialize)]
pub struct WsState {
    pub n: u32,
    pub clock: f64,
    pub infected: Vec<u32>,
    pub revealed: Vec<(u32, u32)>,
}

struct WsTables {
    /// separable envelope weight per vertex
    env: Vec<f64>,
    pow_neg_g: Vec<f64>,
    pow_gm1: Vec<f64>,
    pow_neg_g1: Vec<f64>,
    kappa: Vec<f64>,
}

impl WsTables {
    fn build(params: &ModelParams) -> Self {
        let n = params.n as usize;
        let g = params.kernel.gamma;
        let s = params.kernel.envelope_exponent();
        let mut env = vec![0.0; n + 1];
        let mut pow_neg_g = vec![0.0; n + 1];
        let mut pow_gm1 = vec![0.0; n + 1];
        let mut pow_neg_g1 = vec![0.0; n + 1];
        let mut kappa = vec![0.0; n + 1];
        for i in 1..=n {
            let x = i as f64 / n as f64;
            env[i] = x.powf(-s);
            pow_neg_g[i] = x.powf(-g);
            pow_gm1[i] = x.powf(g - 1.0);
            pow_neg_g1[i] = x.powf(-g - 1.0);
            kappa[i] = params.vertex_rate(i as u32);
        }
        WsTables { env, pow_neg_g, pow_gm1, pow_neg_g1, kappa }
    }
}

#[derive(Debug, Clone, Copy)]
struct RevealedEntry {
    i: u32,
    j: u32,
    kappa: f64,
}

pub struct WsEngine {
    params: ModelParams,
    tables: WsTables,
    rng: SeqRng,
    pub clock: f64,
    infected: Vec<bool>,
    infected_list: Vec<u32>,
    list_pos: Vec<u32>,
    /// Fenwick over envelope weights of currently infected vertices
    inf_env: Fenwick,
    /// alias over all vertices ∝ envelope weight
    target: AliasTable,
    env_total: f64,
    revealed: Vec<RevealedEntry>,
    revealed_slot: std::collections::HashMap<u64, u32>,
    /// Fenwick over update rates of revealed slots
    upd_weights: Fenwick,
    pub reveals: u64,
    pub transmissions: u64,
    pub recoveries: u64,
    pub unreveals: u64,
}

const WS_MAX_N: u32 = 200_000;
const REVEAL_CAP: usize = 1 << 22;

impl WsEngine {
    pub fn new(params: &ModelParams, policy: &RngPolicy) -> Result<Self> {
        if params.n > WS_MAX_N {
            return Err(Error::SizeLimit(format!("wait-and-see engine caps N at {WS_MAX_N}")));
        }
        let tables = WsTables::build(params);
        let env_total: f64 = tables.env[1..].iter().sum();
        let target = AliasTable::new(&tables.env);
        Ok(WsEngine {
            params: *params,
            rng: policy.stream(Domain::Sequential, 7),
            clock: 0.0,
            infected: vec![false; params.n as usize + 1],
            infected_list: Vec::new(),
            list_pos: vec![u32::MAX; params.n as usize + 1],
            inf_env: Fenwick::new(params.n as usize),
            target,
            env_total,
            revealed: Vec::new(),
            revealed_slot: std::collections::HashMap::new(),
            upd_weights: Fenwick::new(64),
            tables,
            reveals: 0,
            transmissions: 0,
            recoveries: 0,
            unreveals: 0,
        })
    }

    pub fn set_infected(&mut self, init: &[u32]) {
        for v in 1..=self.params.n {
            if self.infected[v as usize] {
                self.heal(v);
            }
        }
        for &v in init {
            self.infect(v);
        }
    }

    /// Restore a frozen configuration (clocks restart, which is valid by the
    /// Markov property).
    pub fn load(&mut self, state: &WsState) {
        self.clock = state.clock;
        self.set_infected(&state.infected);
        // clear revealed set
        for slot in 0..self.revealed.len() {
            self.upd_weights.set(slot + 1, 0.0);
        }
        self.revealed.clear();
        self.revealed_slot.clear();
        for &(i, j) in &state.revealed {
            self.reveal(i, j);
        }
        self.reveals = 0;
        self.transmissions = 0;
        self.recoveries = 0;
        self.unreveals = 0;
    }

    pub fn snapshot(&self) -> WsState {
        WsState {
            n: self.params.n,
            clock: self.clock,
            infected: {
                let mut v = self.infected_list.clone();
                v.sort_unstable();
                v
            },
            revealed: self.revealed.iter().map(|e| (e.i, e.j)).collect(),
        }
    }

    pub fn infected_count(&self) -> usize {
        self.infected_list.len()
    }

    pub fn revealed_count(&self) -> usize {
        self.revealed.len()
    }

    fn infect(&mut self, v: u32) {
        if self.infected[v as usize] {
            return;
        }
        self.infected[v as usize] = true;
        self.list_pos[v as usize] = self.infected_list.len() as u32;
        self.infected_list.push(v);
        self.inf_env.set(v as usize, self.tables.env[v as usize]);
    }

    fn heal(&mut self, v: u32) {
        if !self.infected[v as usize] {
            return;
        }
        let pos = self.list_pos[v as usize] as usize;
        let last = *self.infected_list.last().unwrap();
        self.infected_list.swap_remove(pos);
        if last != v {
            self.list_pos[last as usize] = pos as u32;
        }
        self.list_pos[v as usize] = u32::MAX;
        self.infected[v as usize] = false;
        self.inf_env.set(v as usize, 0.0);
    }

    fn pair_key(i: u32, j: u32) -> u64 {
        crate::rng::pair_id(i, j)
    }

    fn is_revealed(&self, i: u32, j: u32) -> bool {
        self.revealed_slot.contains_key(&Self::pair_key(i, j))
    }

    fn reveal(&mut self, i: u32, j: u32) {
        let kappa = self.pair_rate(i, j);
        let slot = self.revealed.len();
        if slot + 1 >= self.upd_weights.len() {
            // grow the Fenwick by rebuilding at double capacity
            let mut bigger = Fenwick::new((self.upd_weights.len() * 2).max(64).min(REVEAL_CAP));
            for (k, e) in self.revealed.iter().enumerate() {
                bigger.set(k + 1, e.kappa);
            }
            self.upd_weights = bigger;
        }
        self.revealed.push(RevealedEntry { i, j, kappa });
        self.upd_weights.set(slot + 1, kappa);
        self.revealed_slot.insert(Self::pair_key(i, j), slot as u32);
    }

    fn unreveal_slot(&mut self, slot: usize) {
        let entry = self.revealed[slot];
        let last = self.revealed.len() - 1;
        self.revealed.swap_remove(slot);
        self.revealed_slot.remove(&Self::pair_key(entry.i, entry.j));
        if slot != last {
            let moved = self.revealed[slot];
            self.upd_weights.set(slot + 1, moved.kappa);
            self.revealed_slot.insert(Self::pair_key(moved.i, moved.j), slot as u32);
        }
        self.upd_weights.set(last + 1, 0.0);
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
        let a = self.tables.kappa[i as usize];
        let b = self.tables.kappa[j as usize];
        match self.params.update_rule {
            Sum => a + b,
            Max => a.max(b),
            MinIndex => self.tables.kappa[i.min(j) as usize],
        }
    }

    /// Envelope rate of reveal proposals: λ·(β/N)·Σ_{x∈I} env(x)·Σ_y env(y).
    fn reveal_envelope_rate(&self) -> f64 {
        self.params.lambda * self.params.kernel.beta / self.params.n as f64
            * self.inf_env.total()
            * self.env_total
    }

    /// Advance to the next event at or before `t_end`; false when none fires.
    pub fn step_until(&mut self, t_end: f64) -> bool {
        let r_recover = self.infected_list.len() as f64;
        let r_reveal = self.reveal_envelope_rate();
        let r_update = self.upd_weights.total();
        let r_transmit = self.params.lambda * self.revealed.len() as f64;
        let total = r_recover + r_reveal + r_update + r_transmit;
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
        let u = self.rng.uniform() * total;
        if u < r_recover {
            let v = self.infected_list[self.rng.below(self.infected_list.len())];
            self.heal(v);
            self.recoveries += 1;
        } else if u < r_recover + r_update {
            let slot = self.upd_weights.sample(&mut self.rng) - 1;
            if slot < self.revealed.len() {
                self.unreveal_slot(slot);
                self.unreveals += 1;
            }
        } else if u < r_recover + r_update + r_transmit {
            let e = self.revealed[self.rng.below(self.revealed.len())];
            let ii = self.infected[e.i as usize];
            let jj = self.infected[e.j as usize];
            if ii != jj {
                self.infect(if ii { e.j } else { e.i });
                self.transmissions += 1;
            }
        } else {
            // reveal proposal: x from the infected envelope, y from the
            // global envelope, thinned to the exact rate λ p̂ per unrevealed
            // pair with an infected endpoint
            let x = self.inf_env.sample(&mut self.rng) as u32;
            let y = self.target.sample(&mut self.rng) as u32;
            if y == 0 || y == x {
                return true;
            }
            let q = self.params.kernel.beta / self.params.n as f64
                * self.tables.env[x as usize]
                * self.tables.env[y as usize];
            let mut accept = self.conn_prob(x, y) / q;
            if self.infected[y as usize] {
                accept *= 0.5; // both-infected pairs are proposed from both rows
            }
            if self.rng.uniform() >= accept {
                return true;
            }
            if self.is_revealed(x, y) {
                return true;
            }
            self.reveal(x, y);
            self.reveals += 1;
            if !self.infected[y as usize] {
                self.infect(y);
                self.transmissions += 1;
            }
        }
        true
    }

    /// Run from the current configuration until extinction or `t_max`;
    /// returns the extinction time if reached.
    pub fn run_to_extinction(&mut self, t_max: f64) -> Option<f64> {
        while !self.infected_list.is_empty() {
            if !self.step_until(t_max) {
                return None;
            }
        }
        Some(self.clock)
    }
}

/// Exact score components of a configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreComponents {
    /// Q(x) = Σ_{revealed y~x} λ/κ²_{x,y}
    pub q: Vec<f64>,
    /// R(x) = Σ_{revealed y~x} λ/κ_{x,y}
    pub r: Vec<f64>,
    /// ν(x): 1+2Q if infected, R+2Q otherwise
    pub nu: Vec<f64>,
    pub m: f64,
    pub z: f64,
}

/// Evaluate the supermartingale score of a configuration. Requires η >= 0
/// (the R >= 2ϰQ comparison needs update rates bounded below by 2ϰ).
pub fn score(
    state: &WsState,
    params: &ModelParams,
    s: &ScoringFunction,
    floor: f64,
) -> Result<ScoreComponents> {
    if params.eta < 0.0 {
        return Err(Error::Regime(format!("score requires η >= 0, got {}", params.eta)));
    }
    let n = state.n as usize;
    let mut q = vec![0.0; n + 1];
    let mut r = vec![0.0; n + 1];
    for &(i, j) in &state.revealed {
        let kappa = params.update_rate_unchecked(i, j);
        q[i as usize] += params.lambda / (kappa * kappa);
        q[j as usize] += params.lambda / (kappa * kappa);
        r[i as usize] += params.lambda / kappa;
        r[j as usize] += params.lambda / kappa;
    }
    let mut infected = vec![false; n + 1];
    for &v in &state.infected {
        infected[v as usize] = true;
    }
    let mut nu = vec![0.0; n + 1];
    let mut m = 0.0;
    for v in 1..=n {
        nu[v] = if infected[v] { 1.0 + 2.0 * q[v] } else { r[v] + 2.0 * q[v] };
        if nu[v] != 0.0 {
            m += s.eval(v as f64 / n as f64, floor) * nu[v];
        }
    }
    let z = (1.0 + m).ln() + drift_rate(params.varkappa) / 2.0 * state.clock;
    Ok(ScoreComponents { q, r, nu, m, z })
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftEstimate {
    pub m0: f64,
    pub dm_mean: f64,
    pub dm_se: f64,
    pub dz_mean: f64,
    pub dz_se: f64,
    pub delta: f64,
    pub reps: u64,
}

/// Monte Carlo one-step drift of (M, Z) from a frozen configuration:
/// independent restarts of length δ (valid by the Markov property).
pub fn drift_estimate(
    state: &WsState,
    params: &ModelParams,
    s: &ScoringFunction,
    floor: f64,
    delta: f64,
    reps: u64,
    policy: &RngPolicy,
) -> Result<DriftEstimate> {
    let base = score(state, params, s, floor)?;
    let mut dm_sum = 0.0;
    let mut dm_sq = 0.0;
    let mut dz_sum = 0.0;
    let mut dz_sq = 0.0;
    let mut engine = WsEngine::new(params, policy)?;
    for rep in 0..reps {
        engine.rng = policy.replica(rep).stream(Domain::Sequential, 7);
        engine.load(state);
        let t_end = state.clock + delta;
        while engine.step_until(t_end) {}
        let after = score(&engine.snapshot(), params, s, floor)?;
        let dm = after.m - base.m;
        let dz = after.z - base.z;
        dm_sum += dm;
        dm_sq += dm * dm;
        dz_sum += dz;
        dz_sq += dz * dz;
    }
    let n = reps as f64;
    let dm_mean = dm_sum / n;
    let dz_mean = dz_sum / n;
    let dm_var = (dm_sq / n - dm_mean * dm_mean).max(0.0) / n;
    let dz_var = (dz_sq / n - dz_mean * dz_mean).max(0.0) / n;
    Ok(DriftEstimate {
        m0: base.m,
        dm_mean,
        dm_se: dm_var.sqrt(),
        dz_mean,
        dz_se: dz_var.sqrt(),
        delta,
        reps,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub events: u64,
    pub subset_violations: u64,
    pub revealed_violations: u64,
}

/// Joint replay of the true process and the coupled wait-and-see process on
/// shared graphical streams. The coupled reveal uses the graph's own coin,
/// so reveals only happen on present edges; the resulting auxiliary process
/// is a thinned (slower-revealing) version of the marginal wait-and-see
/// process and still dominates the true one pathwise.
pub fn coupled_domination_run(
    params: &ModelParams,
    init: &[u32],
    t_max: f64,
    policy: &RngPolicy,
) -> Result<CouplingReport> {
    let mut eng = KeyedEngine::new(params, policy)?;
    eng.set_infected(init);
    let n = params.n as usize;
    let mut y_infected = vec![false; n + 1];
    for &v in init {
        y_infected[v as usize] = true;
    }
    let mut revealed = std::collections::HashSet::<u64>::new();
    let mut report = CouplingReport { events: 0, subset_violations: 0, revealed_violations: 0 };
    while eng.next_event_time().map(|t| t <= t_max).unwrap_or(false) {
        let ev = eng.step().unwrap();
        report.events += 1;
        match ev {
            StepEvent::Recovery { v, .. } => {
                y_infected[v as usize] = false;
            }
            StepEvent::EdgeUpdate { i, j, .. } => {
                revealed.remove(&crate::rng::pair_id(i, j));
            }
            StepEvent::Transmission { from, to, .. } => {
                // tick on a present edge: reveal-or-transmit on the Y side
                couple_present_tick(&mut y_infected, &mut revealed, from, to);
            }
            StepEvent::NoopAttempt { i, j, .. } => {
                couple_present_tick(&mut y_infected, &mut revealed, i, j);
            }
            StepEvent::IdleTick { .. } => {}
        }
        // domination invariants
        for v in 1..=n {
            if eng.infected[v] && !y_infected[v] {
                report.subset_violations += 1;
            }
        }
        for &key in &revealed {
            let i = (key >> 32) as u32;
            let j = (key & 0xffff_ffff) as u32;
            if !eng.contains_edge(i, j) {
                report.revealed_violations += 1;
            }
        }
    }
    Ok(report)
}

fn couple_present_tick(
    y_infected: &mut [bool],
    revealed: &mut std::collections::HashSet<u64>,
    i: u32,
    j: u32,
) {
    let key = crate::rng::pair_id(i, j);
    let yi = y_infected[i as usize];
    let yj = y_infected[j as usize];
    if revealed.contains(&key) {
        if yi != yj {
            y_infected[i as usize] = true;
            y_infected[j as usize] = true;
        }
    } else if yi || yj {
        revealed.insert(key);
        y_infected[i as usize] = true;
        y_infected[j as usize] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{KernelKind, KernelSpec};
    use approx::assert_relative_eq;

    fn model(n: u32, lambda: f64) -> ModelParams {
        let kernel = KernelSpec::new(KernelKind::Factor, 1.0, 0.4).unwrap();
        let mut p = ModelParams::new(n, kernel, 1.0, 1.0, 1.0).unwrap();
        p.lambda = lambda;
        p
    }

    #[test]
    fn absorbing_without_infection() {
        let params = model(20, 0.1);
        let mut eng = WsEngine::new(&params, &RngPolicy::new(1)).unwrap();
        eng.set_infected(&[]);
        assert_eq!(eng.run_to_extinction(50.0), Some(0.0));
        assert_eq!(eng.reveals, 0);
    }

    #[test]
    fn single_infected_first_event_rates() {
        // from a single infected x with nothing revealed, the first event is
        // a recovery or a reveal toward some y: empirical reveal fraction
        // matches λΣp/(1+λΣp)
        let params = model(30, 0.5);
        let x = 3u32;
        let sum_p: f64 =
            (1..=30u32).filter(|&y| y != x).map(|y| params.connection_prob_unchecked(x, y)).sum();
        let expect = params.lambda * sum_p / (1.0 + params.lambda * sum_p);
        let reps = 40_000;
        let mut reveals = 0usize;
        for seed in 0..reps {
            let mut eng = WsEngine::new(&params, &RngPolicy::new(seed as u64)).unwrap();
            eng.set_infected(&[x]);
            // step until the first state-changing event
            let before = eng.snapshot();
            loop {
                assert!(eng.step_until(1e9));
                let now = eng.snapshot();
                if now.infected != before.infected || !now.revealed.is_empty() {
                    if !now.revealed.is_empty() {
                        reveals += 1;
                    }
                    break;
                }
            }
        }
        let got = reveals as f64 / reps as f64;
        let sd = (expect * (1.0 - expect) / reps as f64).sqrt();
        assert!((got - expect).abs() < 4.0 * sd, "got {got} expect {expect}");
    }

    #[test]
    fn score_worked_examples() {
        let params = model(100, 0.1);
        let s = ScoringFunction::Monomial { exponent: 0.0 };
        // single infected vertex, nothing revealed: M = s_x = 1
        let state = WsState { n: 100, clock: 0.0, infected: vec![5], revealed: vec![] };
        let sc = score(&state, &params, &s, 0.0).unwrap();
        assert_relative_eq!(sc.m, 1.0, max_relative = 1e-12);

        // engineered pair with κ=2, λ=0.1: ν(x)=1.05, ν(y)=0.1
        let kernel = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        let mut p2 = ModelParams::new(100, kernel, 0.0, 1.0, 1.0).unwrap();
        p2.lambda = 0.1;
        let state =
            WsState { n: 100, clock: 0.0, infected: vec![10], revealed: vec![(10, 20)] };
        let sc = score(&state, &p2, &s, 0.0).unwrap();
        assert_relative_eq!(sc.nu[10], 1.05, max_relative = 1e-12);
        assert_relative_eq!(sc.nu[20], 0.1, max_relative = 1e-12);
        assert_relative_eq!(sc.m, 1.15, max_relative = 1e-12);

        // R(y) = 2ϰ Q(y) exactly at η=0
        assert_relative_eq!(sc.r[20], 2.0 * sc.q[20], max_relative = 1e-12);
    }

    #[test]
    fn score_rejects_negative_eta() {
        let kernel = KernelSpec::new(KernelKind::Factor, 1.0, 0.4).unwrap();
        let p = ModelParams::new(10, kernel, -0.5, 1.0, 1.0).unwrap();
        let state = WsState { n: 10, clock: 0.0, infected: vec![1], revealed: vec![] };
        assert!(score(&state, &p, &ScoringFunction::Monomial { exponent: 0.0 }, 0.0).is_err());
    }

    #[test]
    fn r_dominates_q_after_events() {
        let params = model(60, 0.4);
        let mut eng = WsEngine::new(&params, &RngPolicy::new(9)).unwrap();
        eng.set_infected(&(1..=60).collect::<Vec<_>>());
        let s = ScoringFunction::Monomial { exponent: 0.2 };
        for _ in 0..2000 {
            if !eng.step_until(1e9) {
                break;
            }
            let sc = score(&eng.snapshot(), &params, &s, 0.0).unwrap();
            for v in 1..=60usize {
                assert!(
                    sc.r[v] >= 2.0 * params.varkappa * sc.q[v] - 1e-12,
                    "R >= 2ϰQ violated at {v}"
                );
            }
        }
    }

    #[test]
    fn drift_of_absorbing_state_is_zero() {
        let params = model(50, 0.05);
        let state = WsState { n: 50, clock: 0.0, infected: vec![], revealed: vec![] };
        let s = ScoringFunction::Monomial { exponent: 0.4 };
        let d = drift_estimate(&state, &params, &s, 0.0, 0.05, 200, &RngPolicy::new(3)).unwrap();
        assert_eq!(d.dm_mean, 0.0);
        assert_eq!(d.m0, 0.0);
    }

    #[test]
    fn negative_drift_in_certified_regime() {
        // factor γ=0.4, η=1, λ=0.05 passes both conditions with s=x^{-0.4}
        let params = model(100, 0.05);
        let s = ScoringFunction::Monomial { exponent: 0.4 };
        // build a nontrivial admissible state by running a little
        let mut eng = WsEngine::new(&params, &RngPolicy::new(11)).unwrap();
        eng.set_infected(&(1..=100).collect::<Vec<_>>());
        while eng.clock < 1.0 && eng.infected_count() > 0 {
            eng.step_until(1.0);
        }
        let state = eng.snapshot();
        assert!(!state.infected.is_empty());
        let d =
            drift_estimate(&state, &params, &s, 0.0, 0.01, 60_000, &RngPolicy::new(21)).unwrap();
        let rho = drift_rate(params.varkappa);
        // E[ΔM]/δ <= -ρ M (allow 3σ and the O(δ) curvature slack)
        let per_unit = d.dm_mean / d.delta;
        let se_unit = d.dm_se / d.delta;
        assert!(
            per_unit + 3.0 * se_unit <= -rho * d.m0 * 0.9,
            "drift {per_unit} ± {se_unit} vs -ρM = {}",
            -rho * d.m0
        );
        // E[ΔZ]/δ <= 0 within 3σ
        assert!(d.dz_mean / d.delta <= 3.0 * d.dz_se / d.delta);
    }

    #[test]
    fn coupling_domination_holds() {
        let kernel = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        let mut params = ModelParams::new(12, kernel, 0.5, 1.0, 1.0).unwrap();
        params.lambda = 0.6;
        for seed in 0..200u64 {
            let report =
                coupled_domination_run(&params, &[1, 2, 5], 4.0, &RngPolicy::new(seed)).unwrap();
            assert_eq!(report.subset_violations, 0, "seed {seed}");
            assert_eq!(report.revealed_violations, 0, "seed {seed}");
        }
    }

    #[test]
    fn extinction_time_logarithmic_in_certified_regime() {
        // E[T_ext] <= (2/ρ) log(1 + N ∫ s) in the fast phase
        let s = ScoringFunction::Monomial { exponent: 0.4 };
        let rho = drift_rate(1.0);
        for (n, reps) in [(100u32, 600u64), (1000, 300)] {
            let params = model(n, 0.05);
            let mut sum = 0.0;
            for r in 0..reps {
                let mut eng = WsEngine::new(&params, &RngPolicy::new(777).replica(r)).unwrap();
                eng.set_infected(&(1..=n).collect::<Vec<_>>());
                sum += eng.run_to_extinction(1e5).unwrap();
            }
            let mean = sum / reps as f64;
            let bound = 2.0 / rho * (1.0 + n as f64 * s.integral_above(0.0)).ln();
            assert!(mean <= bound, "N={n}: mean {mean} vs bound {bound}");
        }
    }
}
