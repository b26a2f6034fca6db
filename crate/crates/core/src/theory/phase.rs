//! Closed-form phase classification: fast extinction vs slow extinction
//! with metastability, the metastable exponent ξ in every covered regime,
//! and the matching upper-bound exponents of the static and supermartingale
//! routes.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    FastExtinction,
    SlowMetastable,
    /// Regimes the classification leaves open (e.g. η >= 1/2 with τ = 3).
    BoundaryUnknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    QuickDirect,
    QuickIndirect,
    LocalSurvival,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseResult {
    pub verdict: Verdict,
    /// metastable exponent; present iff the verdict is SlowMetastable
    pub xi: Option<f64>,
    pub strategy: Option<Strategy>,
}

impl PhaseResult {
    fn fast() -> Self {
        PhaseResult { verdict: Verdict::FastExtinction, xi: None, strategy: None }
    }
    fn unknown() -> Self {
        PhaseResult { verdict: Verdict::BoundaryUnknown, xi: None, strategy: None }
    }
    fn slow(xi: f64, strategy: Strategy) -> Self {
        PhaseResult { verdict: Verdict::SlowMetastable, xi: Some(xi), strategy: Some(strategy) }
    }
}

/// Classify the phase at (kernel kind, τ, η).
pub fn classify_phase(kind: KernelKind, tau: f64, eta: f64) -> Result<PhaseResult> {
    if !(tau > 2.0) {
        return Err(Error::BadParameter(format!("tau must exceed 2, got {tau}")));
    }
    let slow = |xi: f64, s: Strategy| PhaseResult::slow(xi, s);
    let out = match kind {
        KernelKind::Weak => slow(tau - 1.0, Strategy::QuickDirect),
        KernelKind::Factor => {
            if eta >= 0.5 && tau > 3.0 {
                PhaseResult::fast()
            } else if eta >= 0.5 && tau == 3.0 {
                PhaseResult::unknown()
            } else if eta <= 0.0 {
                if tau <= 2.5 {
                    slow(1.0 / (3.0 - tau), Strategy::QuickDirect)
                } else {
                    slow(2.0 * tau - 3.0, Strategy::LocalSurvival)
                }
            } else if tau <= 2.5 + eta.min(0.5) {
                slow(1.0 / (3.0 - tau), Strategy::QuickDirect)
            } else {
                slow((2.0 * tau - 3.0 - 2.0 * eta) / (1.0 - 2.0 * eta), Strategy::LocalSurvival)
            }
        }
        KernelKind::PreferentialAttachment | KernelKind::Strong => {
            if eta >= 0.5 && tau > 3.0 {
                PhaseResult::fast()
            } else if eta >= 0.5 && tau == 3.0 {
                PhaseResult::unknown()
            } else if eta <= 0.0 {
                slow(2.0 * tau - 3.0, Strategy::LocalSurvival)
            } else if tau < 3.0 && eta > tau / 2.0 - 1.0 {
                slow((tau - 1.0) / (3.0 - tau), Strategy::QuickIndirect)
            } else {
                slow((2.0 * tau - 3.0 - 2.0 * eta) / (1.0 - 2.0 * eta), Strategy::LocalSurvival)
            }
        }
    };
    Ok(out)
}

/// Exact-rational phase result.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResultExact {
    pub verdict: Verdict,
    pub xi: Option<Ratio<i64>>,
    pub strategy: Option<Strategy>,
}

impl PhaseResultExact {
    pub fn xi_f64(&self) -> Option<f64> {
        self.xi.map(|x| *x.numer() as f64 / *x.denom() as f64)
    }
}

/// Rational-arithmetic classifier: all regime comparisons and exponent
/// formulas are evaluated exactly.
pub fn classify_rational(
    kind: KernelKind,
    tau: Ratio<i64>,
    eta: Ratio<i64>,
) -> Result<PhaseResultExact> {
    let two = Ratio::from_integer(2);
    let three = Ratio::from_integer(3);
    let half = Ratio::new(1, 2);
    if tau <= two {
        return Err(Error::BadParameter(format!("tau must exceed 2, got {tau}")));
    }
    let one = Ratio::from_integer(1);
    let slow = |xi: Ratio<i64>, s: Strategy| PhaseResultExact {
        verdict: Verdict::SlowMetastable,
        xi: Some(xi),
        strategy: Some(s),
    };
    let out = match kind {
        KernelKind::Weak => slow(tau - one, Strategy::QuickDirect),
        KernelKind::Factor => {
            if eta >= half && tau > three {
                PhaseResultExact { verdict: Verdict::FastExtinction, xi: None, strategy: None }
            } else if eta >= half && tau == three {
                PhaseResultExact { verdict: Verdict::BoundaryUnknown, xi: None, strategy: None }
            } else if eta <= Ratio::from_integer(0) {
                if tau <= Ratio::new(5, 2) {
                    slow(one / (three - tau), Strategy::QuickDirect)
                } else {
                    slow(two * tau - three, Strategy::LocalSurvival)
                }
            } else if tau <= Ratio::new(5, 2) + eta.min(half) {
                // quick direct region for 0 < η (τ <= 5/2 + η, and τ < 3 when η >= 1/2)
                slow(one / (three - tau), Strategy::QuickDirect)
            } else {
                // 0 < η < 1/2 and τ > 5/2 + η
                slow((two * tau - three - two * eta) / (one - two * eta), Strategy::LocalSurvival)
            }
        }
        KernelKind::PreferentialAttachment | KernelKind::Strong => {
            if eta >= half && tau > three {
                PhaseResultExact { verdict: Verdict::FastExtinction, xi: None, strategy: None }
            } else if eta >= half && tau == three {
                PhaseResultExact { verdict: Verdict::BoundaryUnknown, xi: None, strategy: None }
            } else if eta <= Ratio::from_integer(0) {
                slow(two * tau - three, Strategy::LocalSurvival)
            } else if tau < three && eta > tau / two - one {
                slow((tau - one) / (three - tau), Strategy::QuickIndirect)
            } else {
                // 0 < η < 1/2 and τ >= 2 + 2η
                slow((two * tau - three - two * eta) / (one - two * eta), Strategy::LocalSurvival)
            }
        }
    };
    Ok(out)
}

/// Exponent of the duality/static upper bound, valid in the η <= 0 regime.
/// The factor case is only covered for τ <= 5/2.
pub fn static_exponent(kind: KernelKind, tau: f64) -> Result<f64> {
    if !(tau > 2.0) {
        return Err(Error::BadParameter(format!("tau must exceed 2, got {tau}")));
    }
    match kind {
        KernelKind::Factor => {
            if tau > 2.5 {
                Err(Error::Regime(format!(
                    "static upper bound for the factor kernel covers tau <= 5/2, got {tau}"
                )))
            } else {
                Ok(1.0 / (3.0 - tau))
            }
        }
        KernelKind::PreferentialAttachment | KernelKind::Strong => Ok(2.0 * tau - 3.0),
        KernelKind::Weak => Ok(tau - 1.0),
    }
}

/// Upper bound delivered by the supermartingale route for η >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SuperBound {
    FastExtinction,
    /// ρ⁺(λ) <= e^{-r/λ}: decays faster than any power ("exponent ∞").
    StretchedExponential,
    Exponent {
        xi: f64,
        /// extra log(1/λ) power, where the bound carries one (weak kernel)
        log_power: Option<f64>,
    },
    BoundaryUnknown,
}

pub fn supermartingale_exponent(kind: KernelKind, tau: f64, eta: f64) -> Result<SuperBound> {
    if !(tau > 2.0) {
        return Err(Error::BadParameter(format!("tau must exceed 2, got {tau}")));
    }
    if eta < 0.0 {
        return Err(Error::Regime(format!("supermartingale route needs η >= 0, got {eta}")));
    }
    let out = match kind {
        KernelKind::Weak => SuperBound::Exponent { xi: tau - 1.0, log_power: Some(tau) },
        KernelKind::Factor => {
            if eta >= 0.5 && tau > 3.0 {
                SuperBound::FastExtinction
            } else if eta >= 0.5 && tau == 3.0 {
                SuperBound::StretchedExponential
            } else if tau < 3.0 && tau <= 2.5 + eta {
                SuperBound::Exponent { xi: 1.0 / (3.0 - tau), log_power: None }
            } else if eta < 0.5 {
                SuperBound::Exponent {
                    xi: (2.0 * tau - 3.0 - 2.0 * eta) / (1.0 - 2.0 * eta),
                    log_power: None,
                }
            } else {
                SuperBound::BoundaryUnknown
            }
        }
        KernelKind::PreferentialAttachment | KernelKind::Strong => {
            if eta >= 0.5 && tau > 3.0 {
                SuperBound::FastExtinction
            } else if eta >= 0.5 && tau == 3.0 {
                SuperBound::BoundaryUnknown
            } else if tau < 3.0 && tau <= 2.0 + 2.0 * eta {
                SuperBound::Exponent { xi: (tau - 1.0) / (3.0 - tau), log_power: None }
            } else if eta < 0.5 {
                SuperBound::Exponent {
                    xi: (2.0 * tau - 3.0 - 2.0 * eta) / (1.0 - 2.0 * eta),
                    log_power: None,
                }
            } else {
                SuperBound::BoundaryUnknown
            }
        }
    };
    Ok(out)
}
