//! Full parameterization of one model instance and the derived per-vertex
//! tables used by samplers and engines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;

/// Update-rate variants. `Sum` is the baseline κ_{i,j} = κ_i + κ_j; `Max`
/// and `MinIndex` are the robustness variants driven by the more powerful
/// endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    #[default]
    Sum,
    Max,
    MinIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Vertex count.
    pub n: u32,
    pub kernel: KernelSpec,
    /// Update-speed exponent η; positive means the network is faster than
    /// the infection.
    pub eta: f64,
    /// Rate scale ϰ.
    pub varkappa: f64,
    /// Infection rate λ (recovery rate is 1).
    pub lambda: f64,
    pub update_rule: UpdateRule,
}

impl ModelParams {
    pub fn new(n: u32, kernel: KernelSpec, eta: f64, varkappa: f64, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParameter("vertex count must be positive".into()));
        }
        if !(varkappa > 0.0) {
            return Err(Error::BadParameter(format!("varkappa must be positive, got {varkappa}")));
        }
        if !(lambda >= 0.0) {
            return Err(Error::BadParameter(format!("lambda must be nonnegative, got {lambda}")));
        }
        Ok(ModelParams { n, kernel, eta, varkappa, lambda, update_rule: UpdateRule::Sum })
    }

    pub fn with_rule(mut self, rule: UpdateRule) -> Self {
        self.update_rule = rule;
        self
    }

    pub fn tau(&self) -> f64 {
        self.kernel.tau()
    }

    fn check_vertex(&self, i: u32) -> Result<()> {
        if i >= 1 && i <= self.n {
            Ok(())
        } else {
            Err(Error::Index(format!("vertex {i} outside 1..={}", self.n)))
        }
    }

    fn check_pair(&self, i: u32, j: u32) -> Result<()> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Err(Error::Index(format!("self-loop {i} is not a pair")));
        }
        Ok(())
    }

    /// Per-vertex rate κ_i = ϰ (N/i)^{γη}.
    #[inline]
    pub fn vertex_rate(&self, i: u32) -> f64 {
        self.varkappa * (self.n as f64 / i as f64).powf(self.kernel.gamma * self.eta)
    }

    /// Pair update rate under the configured rule.
    pub fn update_rate(&self, i: u32, j: u32) -> Result<f64> {
        self.check_pair(i, j)?;
        Ok(self.update_rate_unchecked(i, j))
    }

    #[inline]
    pub fn update_rate_unchecked(&self, i: u32, j: u32) -> f64 {
        match self.update_rule {
            UpdateRule::Sum => self.vertex_rate(i) + self.vertex_rate(j),
            UpdateRule::Max => {
                let a = (self.n as f64 / i as f64).powf(self.kernel.gamma * self.eta);
                let b = (self.n as f64 / j as f64).powf(self.kernel.gamma * self.eta);
                self.varkappa * a.max(b)
            }
            UpdateRule::MinIndex => self.vertex_rate(i.min(j)),
        }
    }

    /// Connection probability p_{i,j} = (1/N) p(i/N, j/N) ∧ 1.
    pub fn connection_prob(&self, i: u32, j: u32) -> Result<f64> {
        self.check_pair(i, j)?;
        Ok(self.connection_prob_unchecked(i, j))
    }

    #[inline]
    pub fn connection_prob_unchecked(&self, i: u32, j: u32) -> f64 {
        let n = self.n as f64;
        (self.kernel.eval_unchecked(i as f64 / n, j as f64 / n) / n).min(1.0)
    }

    /// Σ_{i<j} p_{i,j}, exact pair sum for N <= 10⁴, per-row closed-form
    /// integral approximation beyond that (error O(1) per row from the
    /// monotone sum/integral comparison; see `expected_edge_count_bounds`).
    pub fn expected_edge_count(&self) -> f64 {
        if self.n <= 10_000 {
            self.exact_edge_count()
        } else {
            self.expected_edge_count_bounds().0
        }
    }

    fn exact_edge_count(&self) -> f64 {
        let mut sum = 0.0;
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                sum += self.connection_prob_unchecked(i, j);
            }
        }
        sum
    }

    /// (estimate, half-width) for large N: the estimate replaces each row sum
    /// by N ∫ p(i/N, s) ds / 2 corrections; the half-width uses the kernels'
    /// monotonicity in the integrated argument.
    pub fn expected_edge_count_bounds(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mut lo = 0.0;
        let mut hi = 0.0;
        for i in 1..=self.n {
            let x = i as f64 / n;
            // Row sum over j != i of min(1, p(x, j/N)/N). p decreasing in j so
            // the integral comparison brackets the sum between the shifted
            // integrals; the cap keeps every term in [0,1].
            let full: f64 = self.kernel.row_integral(x).unwrap_or(0.0);
            let head = self.kernel.row_integral_to(x, 1.0 / n).unwrap_or(0.0);
            let upper = full.min(n); // N · ∫₀¹ ≥ Σ_{j≥1} uncapped terms
            let lower = (full - head).max(0.0).min(n);
            lo += lower;
            hi += upper;
        }
        // Each pair was counted twice (row of i and row of j).
        let mid = 0.25 * (lo + hi);
        (mid, 0.25 * (hi - lo))
    }
}

/// Precomputed per-vertex tables shared by samplers and engines. Building
/// one costs O(N); everything here is read-only afterwards.
#[derive(Debug, Clone)]
pub struct VertexTables {
    /// (i/N)^{-s} for the separable kernel envelope exponent s.
    pub envelope: Vec<f64>,
    /// κ_i.
    pub vertex_rate: Vec<f64>,
    /// Prefix sums of `envelope` (prefix[k] = Σ_{i<=k} envelope[i]).
    pub envelope_prefix: Vec<f64>,
}

impl VertexTables {
    pub fn build(params: &ModelParams) -> Self {
        let n = params.n as usize;
        let s = params.kernel.envelope_exponent();
        let mut envelope = Vec::with_capacity(n + 1);
        let mut vertex_rate = Vec::with_capacity(n + 1);
        envelope.push(0.0);
        vertex_rate.push(0.0);
        for i in 1..=n {
            let x = i as f64 / n as f64;
            envelope.push(x.powf(-s));
            vertex_rate.push(params.vertex_rate(i as u32));
        }
        let mut envelope_prefix = vec![0.0; n + 1];
        for i in 1..=n {
            envelope_prefix[i] = envelope_prefix[i - 1] + envelope[i];
        }
        VertexTables { envelope, vertex_rate, envelope_prefix }
    }

    /// Separable envelope of p_{i,j}: q = (β/N)·env(i)·env(j) >= p_{i,j}∧1 is
    /// not guaranteed (q can exceed 1 and p is capped), but q >= p∧1 always
    /// holds because q >= p.
    #[inline]
    pub fn pair_envelope(&self, params: &ModelParams, i: u32, j: u32) -> f64 {
        params.kernel.beta / params.n as f64 * self.envelope[i as usize] * self.envelope[j as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{KernelKind, KernelSpec};
    use approx::assert_relative_eq;

    fn model(kind: KernelKind, beta: f64, gamma: f64, n: u32, eta: f64, kappa: f64) -> ModelParams {
        ModelParams::new(n, KernelSpec::new(kind, beta, gamma).unwrap(), eta, kappa, 1.0).unwrap()
    }

    #[test]
    fn worked_connection_probs() {
        let m = model(KernelKind::Factor, 1.0, 0.5, 4, 0.0, 1.0);
        assert_relative_eq!(m.connection_prob(1, 2).unwrap(), 0.7071067811865476, max_relative = 1e-10);

        let m = model(KernelKind::Factor, 10.0, 0.5, 2, 0.0, 1.0);
        assert_relative_eq!(m.connection_prob(1, 2).unwrap(), 1.0, max_relative = 0.0);

        let m = model(KernelKind::Weak, 1.0, 0.5, 100, 0.0, 1.0);
        assert_relative_eq!(m.connection_prob(10, 50).unwrap(), 0.028284271247461904, max_relative = 1e-10);
    }

    #[test]
    fn connection_prob_errors() {
        let m = model(KernelKind::Factor, 1.0, 0.5, 4, 0.0, 1.0);
        assert!(m.connection_prob(2, 2).is_err());
        assert!(m.connection_prob(0, 1).is_err());
        assert!(m.connection_prob(1, 5).is_err());
    }

    #[test]
    fn worked_update_rates() {
        let m = model(KernelKind::Factor, 1.0, 0.5, 10, 0.0, 1.0);
        assert_relative_eq!(m.update_rate(3, 9).unwrap(), 2.0, max_relative = 1e-12);

        let m = model(KernelKind::Factor, 1.0, 0.5, 100, 1.0, 1.0);
        assert_relative_eq!(m.update_rate(1, 100).unwrap(), 11.0, max_relative = 1e-12);
        assert_relative_eq!(
            m.with_rule(UpdateRule::Max).update_rate(1, 100).unwrap(),
            10.0,
            max_relative = 1e-12
        );

        let m = model(KernelKind::Factor, 1.0, 0.5, 100, -1.0, 2.0);
        assert_relative_eq!(m.update_rate(4, 25).unwrap(), 1.4, max_relative = 1e-12);
    }

    #[test]
    fn min_index_rule() {
        let m = model(KernelKind::Factor, 1.0, 0.5, 100, 1.0, 1.0).with_rule(UpdateRule::MinIndex);
        assert_relative_eq!(m.update_rate(1, 100).unwrap(), 10.0, max_relative = 1e-12);
        assert_relative_eq!(m.update_rate(100, 1).unwrap(), 10.0, max_relative = 1e-12);
    }

    #[test]
    fn variants_dominated_by_sum() {
        let base = model(KernelKind::Factor, 1.0, 0.5, 50, 0.7, 1.3);
        for rule in [UpdateRule::Max, UpdateRule::MinIndex] {
            let m = base.with_rule(rule);
            for i in 1..=50u32 {
                for j in (i + 1)..=50 {
                    assert!(
                        m.update_rate_unchecked(i, j)
                            <= base.update_rate_unchecked(i, j) * (1.0 + 1e-12)
                    );
                }
            }
        }
    }

    #[test]
    fn worked_edge_counts() {
        let m = model(KernelKind::Factor, 1.0, 0.5, 4, 0.0, 1.0);
        assert_relative_eq!(m.expected_edge_count(), 2.8349338660281234, max_relative = 1e-10);

        let m = model(KernelKind::Factor, 1.0, 0.5, 1, 0.0, 1.0);
        assert_relative_eq!(m.expected_edge_count(), 0.0, max_relative = 0.0);

        let m = model(KernelKind::Factor, 100.0, 0.5, 4, 0.0, 1.0);
        assert_relative_eq!(m.expected_edge_count(), 6.0, max_relative = 1e-12);
    }

    #[test]
    fn large_n_bounds_bracket_exact() {
        // compare the interval construction against an exact sum at a size
        // where both are cheap
        let m = model(KernelKind::Factor, 1.0, 0.5, 2000, 0.0, 1.0);
        let exact = m.exact_edge_count();
        let (mid, half) = m.expected_edge_count_bounds();
        assert!((mid - exact).abs() <= half + 1e-9, "mid {mid} exact {exact} half {half}");
        assert!(half / exact < 0.05);
    }

    #[test]
    fn envelope_dominates_capped_prob() {
        for kind in KernelKind::ALL {
            let m = model(kind, 1.0, 0.6, 64, 0.5, 1.0);
            let t = VertexTables::build(&m);
            for i in 1..=64u32 {
                for j in (i + 1)..=64 {
                    assert!(
                        t.pair_envelope(&m, i, j) >= m.connection_prob_unchecked(i, j) * (1.0 - 1e-12)
                    );
                }
            }
        }
    }
}
