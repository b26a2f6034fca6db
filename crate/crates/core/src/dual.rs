//! Time-reversal duality: replaying a recorded forward run backwards, and
//! the estimators it licenses (density-vs-survival checks, metastable
//! plateau probes).
//!
//! The network dynamics are stationary and reversible, so the reversed-time
//! network has the law of a forward run, and the contact process driven by
//! the reflected recovery and infection clocks has the law of the forward
//! contact process. Pathwise, survival from A to meet B forwards coincides
//! with survival from B to meet A backwards.

use serde::Serialize;

use crate::engine::keyed::{ForwardRecord, KeyedEngine, LoggedEvent};
use crate::engine::tick::TickEngine;
use crate::engine::{run_until, RunConfig};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::RngPolicy;

/// Contact-process replay over a recorded event log, forwards from `init`.
pub fn forward_run(record: &ForwardRecord, init: &[u32], t0: f64) -> Result<Vec<u32>> {
    if t0 > record.horizon {
        return Err(Error::IncompleteRecord(format!(
            "record covers [0,{}], requested horizon {t0}",
            record.horizon
        )));
    }
    let mut infected = vec![false; record.n as usize + 1];
    for &v in init {
        infected[v as usize] = true;
    }
    for ev in &record.events {
        if ev.time() > t0 {
            break;
        }
        apply(&mut infected, ev, false);
    }
    Ok(collect(&infected))
}

/// Dual contact process from initial set B, run over the reversed clocks of
/// the record, returning the dual infected set at dual time t0.
pub fn dual_run(record: &ForwardRecord, b: &[u32], t0: f64) -> Result<Vec<u32>> {
    if t0 > record.horizon {
        return Err(Error::IncompleteRecord(format!(
            "record covers [0,{}], requested horizon {t0}",
            record.horizon
        )));
    }
    let mut infected = vec![false; record.n as usize + 1];
    for &v in b {
        infected[v as usize] = true;
    }
    // reversed clocks: events at forward time t act at dual time t0 - t, so
    // we sweep the log backwards starting from forward time t0.
    for ev in record.events.iter().rev() {
        if ev.time() > t0 {
            continue;
        }
        apply(&mut infected, ev, true);
    }
    Ok(collect(&infected))
}

fn apply(infected: &mut [bool], ev: &LoggedEvent, reversed: bool) {
    match *ev {
        LoggedEvent::Recovery { v, .. } => infected[v as usize] = false,
        LoggedEvent::Tick { i, j, present, .. } => {
            // In the reversed run the edge state at dual time t0-t is the
            // forward state at t, which the log already carries.
            let _ = reversed;
            if present {
                let ii = infected[i as usize];
                let jj = infected[j as usize];
                if ii != jj {
                    infected[i as usize] = true;
                    infected[j as usize] = true;
                }
            }
        }
        LoggedEvent::Update { .. } => {}
    }
}

fn collect(infected: &[bool]) -> Vec<u32> {
    infected
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &x)| x)
        .map(|(v, _)| v as u32)
        .collect()
}

/// Record one forward run of the graphical construction over [0, t0].
pub fn record_run(params: &ModelParams, t0: f64, policy: &RngPolicy) -> Result<ForwardRecord> {
    let mut eng = KeyedEngine::new(params, policy)?;
    eng.enable_recording(t0);
    // drive all vertices infected so every clock is realized; the record is
    // state-independent anyway (clocks are autonomous).
    eng.set_infected(&[]);
    while eng.clock < t0 {
        if eng.step().is_none() {
            break;
        }
    }
    let mut rec = eng.take_record().expect("recording enabled");
    rec.events.retain(|e| e.time() <= t0);
    Ok(rec)
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityCheck {
    pub t: f64,
    pub lhs_density: f64,
    pub lhs_se: f64,
    pub rhs_survival: f64,
    pub rhs_se: f64,
    pub z: f64,
}

/// Two independent Monte Carlo estimates of I_N(t): the density from full
/// occupancy, and the mean single-start survival probability (self-duality
/// makes them equal in law). Reports the pooled z-score.
pub fn duality_check(
    params: &ModelParams,
    t: f64,
    reps: u64,
    policy: &RngPolicy,
) -> Result<DualityCheck> {
    if reps < 100 {
        return Err(Error::BadParameter("duality check needs reps >= 100".into()));
    }
    let cfg = RunConfig { t_max: t, sample_interval: f64::INFINITY, ..Default::default() };
    let full: Vec<u32> = (1..=params.n).collect();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for r in 0..reps {
        let stats = run_until(params, &full, &cfg, &policy.replica(r))?;
        let d = stats.final_infected as f64 / params.n as f64;
        sum += d;
        sumsq += d * d;
    }
    let lhs = sum / reps as f64;
    let lhs_var = (sumsq / reps as f64 - lhs * lhs).max(0.0) / reps as f64;

    let mut surv = 0u64;
    let mut pick = policy.replica(u64::MAX).stream(crate::rng::Domain::Sequential, 1);
    for r in 0..reps {
        let start = 1 + pick.below(params.n as usize) as u32;
        let stats = run_until(params, &[start], &cfg, &policy.replica(reps + r))?;
        if stats.extinction_time.is_none() {
            surv += 1;
        }
    }
    let rhs = surv as f64 / reps as f64;
    let rhs_var = rhs * (1.0 - rhs) / reps as f64;
    let z = (lhs - rhs) / (lhs_var + rhs_var).sqrt().max(1e-300);
    Ok(DualityCheck { t, lhs_density: lhs, lhs_se: lhs_var.sqrt(), rhs_survival: rhs, rhs_se: rhs_var.sqrt(), z })
}

/// Metastable-plateau probe report.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub times: Vec<f64>,
    pub densities: Vec<f64>,
    pub stderr: Vec<f64>,
    /// estimated density differences (j,k) with their standard errors
    pub max_abs_diff_sigmas: f64,
    pub plateau_pass: bool,
    /// densities decrease significantly across every consecutive window
    pub monotone_decay: bool,
    /// min/max probed density with standard errors: finite-N stand-ins for
    /// the lower/upper metastable densities
    pub rho_minus: (f64, f64),
    pub rho_plus: (f64, f64),
}

/// Estimate I_N(t) on a grid of times from shared full-occupancy runs and
/// test whether the values form a plateau within Monte Carlo error.
/// Differences are assessed per replica, which cancels the shared-run noise.
pub fn metastability_probe(
    params: &ModelParams,
    times: &[f64],
    reps: u64,
    tracked: Option<u32>,
    policy: &RngPolicy,
) -> Result<ProbeReport> {
    if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParameter("times must be strictly increasing".into()));
    }
    if reps == 0 {
        return Err(Error::BadParameter("reps must be >= 1".into()));
    }
    let m = times.len();
    let init: Vec<u32> = (1..=params.n).collect();
    let norm = params.n as f64;
    let mut per_rep: Vec<Vec<f64>> = Vec::with_capacity(reps as usize);
    for r in 0..reps {
        let mut eng = TickEngine::new(params, tracked, &policy.replica(r))?;
        eng.set_infected(&init);
        let mut row = Vec::with_capacity(m);
        for &t in times {
            while eng.infected_count() > 0 && eng.step_until(t) {}
            if eng.clock < t {
                eng.clock = t;
            }
            row.push(eng.infected_count() as f64 / norm);
        }
        per_rep.push(row);
    }
    let mean_se = |col: usize| -> (f64, f64) {
        let mut s = 0.0;
        let mut sq = 0.0;
        for row in &per_rep {
            s += row[col];
            sq += row[col] * row[col];
        }
        let mean = s / reps as f64;
        let var = (sq / reps as f64 - mean * mean).max(0.0) / reps as f64;
        (mean, var.sqrt())
    };
    let stats: Vec<(f64, f64)> = (0..m).map(mean_se).collect();
    let mut max_sig = 0.0f64;
    for a in 0..m {
        for b in (a + 1)..m {
            let mut s = 0.0;
            let mut sq = 0.0;
            for row in &per_rep {
                let d = row[a] - row[b];
                s += d;
                sq += d * d;
            }
            let mean = s / reps as f64;
            let var = (sq / reps as f64 - mean * mean).max(0.0) / reps as f64;
            let se = var.sqrt().max(1e-300);
            max_sig = max_sig.max(mean.abs() / se);
        }
    }
    let mut monotone = m > 1;
    for a in 0..m.saturating_sub(1) {
        let mut s = 0.0;
        let mut sq = 0.0;
        for row in &per_rep {
            let d = row[a + 1] - row[a];
            s += d;
            sq += d * d;
        }
        let mean = s / reps as f64;
        let var = (sq / reps as f64 - mean * mean).max(0.0) / reps as f64;
        if !(mean < -3.0 * var.sqrt()) {
            monotone = false;
        }
    }
    let lo = stats
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .map(|(_, &(m, s))| (m, s))
        .unwrap();
    let hi = stats
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .map(|(_, &(m, s))| (m, s))
        .unwrap();
    Ok(ProbeReport {
        times: times.to_vec(),
        densities: stats.iter().map(|s| s.0).collect(),
        stderr: stats.iter().map(|s| s.1).collect(),
        max_abs_diff_sigmas: max_sig,
        plateau_pass: max_sig <= 3.0,
        monotone_decay: monotone,
        rho_minus: lo,
        rho_plus: hi,
    })
}
