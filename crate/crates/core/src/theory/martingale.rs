//! The supermartingale route to upper bounds: the weight ψ, the two scalar
//! conditions a scoring function must satisfy, and the resulting density
//! bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::strategy::continuum_rate;
use crate::theory::quad::{integrate_de, integrate_split};

/// Scoring functions admitted by the bound: s >= 1 and non-increasing on
/// [a,1], extended constant below a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum ScoringFunction {
    /// s(x) = x^{-c}, c >= 0
    Monomial { exponent: f64 },
    /// s(x) = x^{γ-1} + (5λ/(2γ-1))·x^{-γ}, for γ > 1/2
    Composite { gamma: f64, lambda: f64 },
}

impl ScoringFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScoringFunction::Monomial { exponent } => {
                if exponent < 0.0 {
                    return Err(Error::BadParameter(format!(
                        "monomial score needs a nonnegative exponent, got {exponent}"
                    )));
                }
            }
            ScoringFunction::Composite { gamma, .. } => {
                if gamma <= 0.5 {
                    return Err(Error::BadParameter(format!(
                        "composite score needs γ > 1/2, got {gamma}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// s evaluated with the floor: s(x ∨ a).
    #[inline]
    pub fn eval(&self, x: f64, floor: f64) -> f64 {
        let x = x.max(floor).min(1.0).max(1e-300);
        match *self {
            ScoringFunction::Monomial { exponent } => x.powf(-exponent),
            ScoringFunction::Composite { gamma, lambda } => {
                x.powf(gamma - 1.0) + 5.0 * lambda / (2.0 * gamma - 1.0) * x.powf(-gamma)
            }
        }
    }

    /// ∫ₐ¹ s(y) dy in closed form.
    pub fn integral_above(&self, a: f64) -> f64 {
        match *self {
            ScoringFunction::Monomial { exponent } => {
                if (exponent - 1.0).abs() < 1e-12 {
                    (1.0 / a).ln()
                } else {
                    (1.0 - a.powf(1.0 - exponent)) / (1.0 - exponent)
                }
            }
            ScoringFunction::Composite { gamma, lambda } => {
                (1.0 - a.powf(gamma)) / gamma
                    + 5.0 * lambda / (2.0 * gamma - 1.0) * (1.0 - a.powf(1.0 - gamma))
                        / (1.0 - gamma)
            }
        }
    }

    /// ∫₀¹ s(y ∨ a) dy.
    pub fn integral_floored(&self, a: f64) -> f64 {
        a * self.eval(a, a) + self.integral_above(a)
    }
}

/// ψ(x) = ∫₀¹ p(x,y) / (κ(x)+κ(y))² dy with the continuum rate
/// κ(u) = ϰ u^{-γη}. Closed form at η = 0, adaptive quadrature otherwise.
pub fn psi(kernel: &KernelSpec, eta: f64, varkappa: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!("x={x} outside (0,1]")));
    }
    if eta == 0.0 {
        return Ok(kernel.row_integral(x)? / (4.0 * varkappa * varkappa));
    }
    let g = kernel.gamma;
    let kx = continuum_rate(varkappa, g, eta, x);
    let f = |y: f64| {
        let ky = continuum_rate(varkappa, g, eta, y.max(1e-300));
        kernel.eval_unchecked(x, y.max(1e-300)) / ((kx + ky) * (kx + ky))
    };
    // singular weight at 0, kernel kink on the diagonal
    Ok(integrate_de(&f, 0.0, x, 1e-11) + integrate_de(&f, x, 1.0, 1e-11))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// sup over the grid of 6λ²ψ(x); condition 1 requires <= 1
    pub cond1_sup: f64,
    pub cond1_pass: bool,
    /// argmax of ψ on the grid
    pub cond1_worst_x: f64,
    /// whether ψ was numerically non-increasing across the grid
    pub psi_nonincreasing: bool,
    /// sup of 3λ(1+λ/2ϰ²)·∫p(x,y)s(y∨a)dy / s(x); condition 2 requires <= 1
    pub cond2_sup: f64,
    pub cond2_pass: bool,
    pub cond2_worst_x: f64,
}

impl ConditionReport {
    pub fn both_pass(&self) -> bool {
        self.cond1_pass && self.cond2_pass
    }
}

/// Check both supermartingale conditions for (a, s) on a log grid of x with
/// the worst margins reported. `a = 0` probes down to x = 1e-9, which flags
/// the condition as failed whenever ψ diverges toward 0.
pub fn check_supermartingale_conditions(
    kernel: &KernelSpec,
    eta: f64,
    varkappa: f64,
    lambda: f64,
    a: f64,
    score: &ScoringFunction,
) -> Result<ConditionReport> {
    if eta < 0.0 {
        return Err(Error::Regime(format!("supermartingale conditions need η >= 0, got {eta}")));
    }
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Domain(format!("level a={a} outside [0,1)")));
    }
    score.validate()?;
    if lambda == 0.0 {
        return Ok(ConditionReport {
            cond1_sup: 0.0,
            cond1_pass: true,
            cond1_worst_x: a.max(1e-9),
            psi_nonincreasing: true,
            cond2_sup: 0.0,
            cond2_pass: true,
            cond2_worst_x: a.max(1e-9),
        });
    }
    let lo = if a > 0.0 { a } else { 1e-9 };
    let grid: Vec<f64> = {
        let m = 60;
        let mut v: Vec<f64> =
            (0..=m).map(|k| lo * (1.0f64 / lo).powf(k as f64 / m as f64)).collect();
        v.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        v
    };
    let mut cond1_sup = 0.0f64;
    let mut cond1_worst = lo;
    let mut nonincreasing = true;
    let mut prev = f64::INFINITY;
    for &x in &grid {
        let val = 6.0 * lambda * lambda * psi(kernel, eta, varkappa, x)?;
        if val > cond1_sup {
            cond1_sup = val;
            cond1_worst = x;
        }
        if val > prev * (1.0 + 1e-9) {
            nonincreasing = false;
        }
        prev = val;
    }
    let factor2 = 3.0 * lambda * (1.0 + lambda / (2.0 * varkappa * varkappa));
    let mut cond2_sup = 0.0f64;
    let mut cond2_worst = lo;
    for &x in &grid {
        let f = |y: f64| kernel.eval_unchecked(x, y.max(1e-300)) * score.eval(y, a);
        let integral = if a > 0.0 {
            integrate_split(&f, 0.0, 1.0, &[a, x], 1e-11)
        } else {
            integrate_de(&f, 0.0, x, 1e-11) + integrate_de(&f, x, 1.0, 1e-11)
        };
        let ratio = factor2 * integral / score.eval(x, a);
        if ratio > cond2_sup {
            cond2_sup = ratio;
            cond2_worst = x;
        }
    }
    Ok(ConditionReport {
        cond1_sup,
        cond1_pass: cond1_sup <= 1.0,
        cond1_worst_x: cond1_worst,
        psi_nonincreasing: nonincreasing,
        cond2_sup,
        cond2_pass: cond2_sup <= 1.0,
        cond2_worst_x: cond2_worst,
    })
}

/// ρ = min(1/3, ϰ, 2ϰ/(ϰ+1)): the drift rate of the supermartingale score.
pub fn drift_rate(varkappa: f64) -> f64 {
    (1.0f64 / 3.0).min(varkappa).min(2.0 * varkappa / (varkappa + 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ResDensBound {
    pub total: f64,
    pub level_term: f64,
    pub score_term: f64,
    pub time_term: f64,
    pub finite_size_term: f64,
    pub omega: f64,
}

/// Density bound I_N(t) <= a + (1/s(a))∫ₐ¹ s + ω/t + 1/N with
/// ω = (2/ρ)∫ₐ¹ log(1+s). Passing t = ∞ or N = ∞ drops the tail terms.
/// Errors if the supermartingale conditions fail for (a, s).
pub fn resdens_bound(
    kernel: &KernelSpec,
    eta: f64,
    varkappa: f64,
    lambda: f64,
    a: f64,
    score: &ScoringFunction,
    t: f64,
    n: f64,
) -> Result<ResDensBound> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("density bound needs a in (0,1), got {a}")));
    }
    let report = check_supermartingale_conditions(kernel, eta, varkappa, lambda, a, score)?;
    if !report.both_pass() {
        return Err(Error::ConditionFailed(format!(
            "supermartingale conditions fail: cond1 sup {:.4}, cond2 sup {:.4}",
            report.cond1_sup, report.cond2_sup
        )));
    }
    let rho = drift_rate(varkappa);
    let omega =
        2.0 / rho * integrate_split(&|y: f64| (1.0 + score.eval(y, a)).ln(), a, 1.0, &[], 1e-11);
    let level_term = a;
    let score_term = score.integral_above(a) / score.eval(a, a);
    let time_term = if t.is_infinite() { 0.0 } else { omega / t };
    let finite_size_term = if n.is_infinite() { 0.0 } else { 1.0 / n };
    Ok(ResDensBound {
        total: level_term + score_term + time_term + finite_size_term,
        level_term,
        score_term,
        time_term,
        finite_size_term,
        omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{KernelKind, KernelSpec};
    use approx::assert_relative_eq;

    #[test]
    fn psi_closed_form_at_eta_zero() {
        let k = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        assert_relative_eq!(psi(&k, 0.0, 1.0, 0.25).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(psi(&k, 0.0, 2.0, 1.0).unwrap(), 0.125, max_relative = 1e-12);
    }

    #[test]
    fn psi_quadrature_matches_closed_form() {
        // flat-rate quadrature against the η=0 closed form for all kernels
        for kind in KernelKind::ALL {
            let k = KernelSpec::new(kind, 1.3, 0.4).unwrap();
            for x in [0.05, 0.3, 0.9] {
                let closed = psi(&k, 0.0, 1.5, x).unwrap();
                let f = |y: f64| k.eval_unchecked(x, y.max(1e-300)) / (3.0 * 3.0);
                let quad = integrate_de(&f, 0.0, x, 1e-12) + integrate_de(&f, x, 1.0, 1e-12);
                assert_relative_eq!(closed, quad, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn psi_majorant_for_fast_eta() {
        // factor kernel, η >= 1/2: ψ(x) <= x^{-γ+2γη}/(1-γ) with ϰ=1
        let k = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        for eta in [0.5, 0.8, 1.0] {
            for x in [0.01, 0.1, 0.5, 1.0] {
                let v = psi(&k, eta, 1.0, x).unwrap();
                let majorant = x.powf(-0.5 + 1.0 * eta) / (1.0 - 0.5);
                assert!(v <= majorant * (1.0 + 1e-9), "eta={eta} x={x}: {v} > {majorant}");
            }
        }
    }

    #[test]
    fn cond1_fails_at_zero_level_for_slow_eta() {
        // η < 1/2 with an unbounded kernel: ψ diverges toward 0
        let k = KernelSpec::new(KernelKind::Factor, 1.0, 0.5).unwrap();
        let s = ScoringFunction::Monomial { exponent: 0.5 };
        let r = check_supermartingale_conditions(&k, 0.25, 1.0, 0.3, 0.0, &s).unwrap();
        assert!(!r.cond1_pass, "cond1 sup {}", r.cond1_sup);
    }

    #[test]
    fn certificate_point_passes_both_conditions() {
        // factor γ=0.4 (τ=3.5), η=1, λ=0.05, a=0, s=x^{-0.4}
        let k = KernelSpec::new(KernelKind::Factor, 1.0, 0.4).unwrap();
        let s = ScoringFunction::Monomial { exponent: 0.4 };
        let r = check_supermartingale_conditions(&k, 1.0, 1.0, 0.05, 0.0, &s).unwrap();
        assert!(r.cond1_pass, "cond1 sup {}", r.cond1_sup);
        assert!(r.cond2_pass, "cond2 sup {}", r.cond2_sup);
    }

    #[test]
    fn lambda_zero_trivially_passes() {
        let k = KernelSpec::new(KernelKind::Factor, 1.0, 0.4).unwrap();
        let s = ScoringFunction::Monomial { exponent: 0.4 };
        let r = check_supermartingale_conditions(&k, 0.5, 1.0, 0.0, 0.0, &s).unwrap();
        assert!(r.both_pass());
    }

    #[test]
    fn constant_score_gives_vacuous_but_wellformed_bound() {
        let k = KernelSpec::new(KernelKind::Factor, 1.0, 0.4).unwrap();
        let s = ScoringFunction::Monomial { exponent: 0.0 };
        // tiny λ so the conditions pass
        let b = resdens_bound(&k, 1.0, 1.0, 0.01, 0.5, &s, f64::INFINITY, f64::INFINITY).unwrap();
        assert_relative_eq!(b.level_term, 0.5, max_relative = 1e-12);
        assert_relative_eq!(b.score_term, 0.5, max_relative = 1e-12);
        assert_relative_eq!(b.total, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn tail_terms_drop_in_the_limit() {
        let k = KernelSpec::new(KernelKind::Factor, 1.0, 0.4).unwrap();
        let s = ScoringFunction::Monomial { exponent: 0.4 };
        let finite = resdens_bound(&k, 1.0, 1.0, 0.02, 0.3, &s, 50.0, 1e4).unwrap();
        let limit =
            resdens_bound(&k, 1.0, 1.0, 0.02, 0.3, &s, f64::INFINITY, f64::INFINITY).unwrap();
        assert!(finite.total > limit.total);
        assert_relative_eq!(
            finite.total - finite.time_term - finite.finite_size_term,
            limit.total,
            max_relative = 1e-12
        );
        assert!(resdens_bound(&k, 0.25, 1.0, 0.9, 1e-6, &s, 50.0, 1e4).is_err());
    }

    #[test]
    fn composite_score_validity() {
        assert!(ScoringFunction::Composite { gamma: 0.4, lambda: 0.1 }.validate().is_err());
        let s = ScoringFunction::Composite { gamma: 0.75, lambda: 0.1 };
        s.validate().unwrap();
        // s >= 1 and non-increasing on [a,1]
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let x = 0.01 + 0.99 * k as f64 / 100.0;
            let v = s.eval(x, 0.01);
            assert!(v >= 1.0 - 1e-12);
            assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn score_integrals_match_quadrature() {
        let s = ScoringFunction::Composite { gamma: 0.7, lambda: 0.2 };
        let a = 0.15;
        let q = integrate_split(&|y: f64| s.eval(y, a), a, 1.0, &[], 1e-12);
        assert_relative_eq!(s.integral_above(a), q, max_relative = 1e-9);
        let q = integrate_split(&|y: f64| s.eval(y, a), 0.0, 1.0, &[a], 1e-12);
        assert_relative_eq!(s.integral_floored(a), q, max_relative = 1e-9);
    }
}
