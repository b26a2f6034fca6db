//! Brute-force oracle for the joint (graph, infection) Markov chain.
//!
//! For N <= 4 the joint state space (2^{N(N-1)/2} graphs × 2^N infection
//! patterns) is small enough to build the full generator and compute
//! transient distributions by uniformization and absorption quantities by
//! dense elimination. Everything downstream is validated against this.

use crate::error::{Error, Result};
use crate::params::ModelParams;

pub const ORACLE_MAX_N: u32 = 4;

/// Dense generator over states `graph_bits * 2^N + infected_bits`.
pub struct JointOracle {
    n: usize,
    n_pairs: usize,
    dim: usize,
    /// off-diagonal rates, rows sum to `diag`
    rates: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    pair_probs: Vec<f64>,
}

impl JointOracle {
    pub fn new(params: &ModelParams) -> Result<Self> {
        if params.n > ORACLE_MAX_N {
            return Err(Error::SizeLimit(format!(
                "joint oracle builds 2^N·2^(N(N-1)/2) states; N={} exceeds {}",
                params.n, ORACLE_MAX_N
            )));
        }
        let n = params.n as usize;
        let pairs: Vec<(u32, u32)> = (1..=params.n)
            .flat_map(|i| ((i + 1)..=params.n).map(move |j| (i, j)))
            .collect();
        let n_pairs = pairs.len();
        let dim = (1usize << n_pairs) * (1usize << n);
        let mut rates: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        let mut diag = vec![0.0; dim];
        let pair_probs: Vec<f64> =
            pairs.iter().map(|&(i, j)| params.connection_prob_unchecked(i, j)).collect();
        let pair_rates: Vec<f64> =
            pairs.iter().map(|&(i, j)| params.update_rate_unchecked(i, j)).collect();

        let idx = |g: usize, x: usize| g * (1 << n) + x;
        for g in 0..(1usize << n_pairs) {
            for x in 0..(1usize << n) {
                let s = idx(g, x);
                let mut row: Vec<(usize, f64)> = Vec::new();
                let mut total = 0.0;
                let mut push = |t: usize, r: f64| {
                    if r > 0.0 && t != s {
                        row.push((t, r));
                        total += r;
                    }
                };
                // pair updates: resample the edge
                for (e, &kappa) in pair_rates.iter().enumerate() {
                    let p = pair_probs[e];
                    push(idx(g | (1 << e), x), kappa * p);
                    push(idx(g & !(1 << e), x), kappa * (1.0 - p));
                }
                // recoveries
                for v in 0..n {
                    if x & (1 << v) != 0 {
                        push(idx(g, x & !(1 << v)), 1.0);
                    }
                }
                // infections along present edges with exactly one endpoint infected
                for (e, &(i, j)) in pairs.iter().enumerate() {
                    if g & (1 << e) == 0 {
                        continue;
                    }
                    let bi = 1usize << (i - 1) as usize;
                    let bj = 1usize << (j - 1) as usize;
                    if (x & bi != 0) ^ (x & bj != 0) {
                        push(idx(g, x | bi | bj), params.lambda);
                    }
                }
                rates[s] = row;
                diag[s] = total;
            }
        }
        Ok(JointOracle { n, n_pairs, dim, rates, diag, pair_probs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Initial distribution: stationary graph, given infected bit pattern.
    pub fn initial(&self, infected_bits: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for g in 0..(1usize << self.n_pairs) {
            let mut w = 1.0;
            for (e, &p) in self.pair_probs.iter().enumerate() {
                w *= if g & (1 << e) != 0 { p } else { 1.0 - p };
            }
            v[g * (1 << self.n) + infected_bits] = w;
        }
        v
    }

    pub fn full_occupancy(&self) -> Vec<f64> {
        self.initial((1 << self.n) - 1)
    }

    /// Transient distribution at time t by uniformization.
    pub fn transient(&self, init: &[f64], t: f64) -> Vec<f64> {
        assert_eq!(init.len(), self.dim);
        let lam = self.diag.iter().cloned().fold(0.0f64, f64::max).max(1e-12);
        let mu = lam * t;
        let mut acc = vec![0.0; self.dim];
        let mut term: Vec<f64> = init.to_vec();
        let mut log_w = -mu;
        let mut covered = 0.0f64;
        let mut k = 0usize;
        loop {
            let w = log_w.exp();
            covered += w;
            for (a, b) in acc.iter_mut().zip(term.iter()) {
                *a += w * b;
            }
            if (1.0 - covered < 1e-13 && k as f64 > mu) || k > 200_000 {
                break;
            }
            // term <- term · P with P = I + Q/lam
            let mut next = vec![0.0; self.dim];
            for s in 0..self.dim {
                let stay = 1.0 - self.diag[s] / lam;
                if term[s] == 0.0 {
                    continue;
                }
                next[s] += term[s] * stay;
                for &(tgt, r) in &self.rates[s] {
                    next[tgt] += term[s] * r / lam;
                }
            }
            term = next;
            k += 1;
            log_w += mu.ln() - (k as f64).ln();
        }
        acc
    }

    /// Probability that the infection is extinct by time t.
    pub fn extinct_by(&self, init: &[f64], t: f64) -> f64 {
        let dist = self.transient(init, t);
        let mask = (1usize << self.n) - 1;
        dist.iter().enumerate().filter(|(s, _)| s & mask == 0).map(|(_, p)| p).sum()
    }

    /// Expected infected count at time t.
    pub fn expected_infected(&self, init: &[f64], t: f64) -> f64 {
        let dist = self.transient(init, t);
        let mask = (1usize << self.n) - 1;
        dist.iter().enumerate().map(|(s, p)| (s & mask).count_ones() as f64 * p).sum()
    }

    /// Expected extinction time from the given initial distribution, by
    /// dense elimination over the states that still carry infection.
    pub fn expected_extinction_time(&self, init: &[f64]) -> f64 {
        let mask = (1usize << self.n) - 1;
        let transient: Vec<usize> = (0..self.dim).filter(|s| s & mask != 0).collect();
        let pos: Vec<Option<usize>> = {
            let mut v = vec![None; self.dim];
            for (k, &s) in transient.iter().enumerate() {
                v[s] = Some(k);
            }
            v
        };
        let m = transient.len();
        // Solve (-Q_tt) h = 1 restricted to the transient block.
        let mut a = vec![0.0; m * m];
        let mut rhs = vec![1.0; m];
        for (row, &s) in transient.iter().enumerate() {
            a[row * m + row] = self.diag[s];
            for &(tgt, r) in &self.rates[s] {
                if let Some(col) = pos[tgt] {
                    a[row * m + col] -= r;
                }
            }
        }
        gauss_solve(&mut a, &mut rhs, m);
        transient.iter().enumerate().map(|(k, &s)| init[s] * rhs[k]).sum()
    }
}

fn gauss_solve(a: &mut [f64], b: &mut [f64], m: usize) {
    for col in 0..m {
        let mut piv = col;
        for r in (col + 1)..m {
            if a[r * m + col].abs() > a[piv * m + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..m {
                a.swap(col * m + c, piv * m + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * m + col];
        assert!(d.abs() > 1e-300, "singular transient block");
        for r in (col + 1)..m {
            let f = a[r * m + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..m {
                a[r * m + c] -= f * a[col * m + c];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..m).rev() {
        let mut s = b[col];
        for c in (col + 1)..m {
            s -= a[col * m + c] * b[c];
        }
        b[col] = s / a[col * m + col];
    }
}
