//! Connection kernels on (0,1]² and their closed-form row integrals.
//!
//! All four kernels are symmetric, continuous and decreasing in both
//! arguments, and satisfy `p(a,1) <= ∫₀¹ p(a,s) ds <= c₂ a^{-γ}`. The factor,
//! preferential-attachment and strong kernels additionally satisfy
//! `c₁ a^{-γ} <= p(a,1)`; the weak kernel only bounds the row integral from
//! below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Factor,
    PreferentialAttachment,
    Strong,
    Weak,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::Factor,
        KernelKind::PreferentialAttachment,
        KernelKind::Strong,
        KernelKind::Weak,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Factor => "factor",
            KernelKind::PreferentialAttachment => "preferential_attachment",
            KernelKind::Strong => "strong",
            KernelKind::Weak => "weak",
        }
    }
}

/// Kernel kind plus the edge-density scale β and tail parameter γ.
///
/// The degree power-law exponent is τ = 1 + 1/γ, so γ ∈ (0,1) maps onto
/// τ ∈ (2,∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub beta: f64,
    pub gamma: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, beta: f64, gamma: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::BadParameter(format!("beta must be positive, got {beta}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::BadParameter(format!("gamma must lie in (0,1), got {gamma}")));
        }
        Ok(KernelSpec { kind, beta, gamma })
    }

    /// Construct from the degree exponent τ = 1 + 1/γ.
    pub fn from_tau(kind: KernelKind, beta: f64, tau: f64) -> Result<Self> {
        if !(tau > 2.0) {
            return Err(Error::BadParameter(format!("tau must exceed 2, got {tau}")));
        }
        KernelSpec::new(kind, beta, 1.0 / (tau - 1.0))
    }

    pub fn tau(&self) -> f64 {
        1.0 + 1.0 / self.gamma
    }

    /// Evaluate the kernel at interior points of (0,1]².
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit(x)?;
        check_unit(y)?;
        Ok(self.eval_unchecked(x, y))
    }

    #[inline]
    pub fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        let g = self.gamma;
        let b = self.beta;
        match self.kind {
            KernelKind::Factor => b * (x * y).powf(-g),
            KernelKind::PreferentialAttachment => {
                let (lo, hi) = minmax(x, y);
                b * lo.powf(-g) * hi.powf(g - 1.0)
            }
            KernelKind::Strong => b * minmax(x, y).0.powf(-g),
            KernelKind::Weak => b * minmax(x, y).1.powf(-g - 1.0),
        }
    }

    /// Closed form of ∫₀¹ p(a,s) ds.
    pub fn row_integral(&self, a: f64) -> Result<f64> {
        check_unit(a)?;
        let g = self.gamma;
        let b = self.beta;
        let v = match self.kind {
            KernelKind::Factor => b * a.powf(-g) / (1.0 - g),
            KernelKind::PreferentialAttachment => {
                // ∫₀ᵃ s^{-γ} a^{γ-1} ds + ∫ₐ¹ a^{-γ} s^{γ-1} ds
                b * (1.0 / (1.0 - g) + (a.powf(-g) - 1.0) / g)
            }
            KernelKind::Strong => {
                // ∫₀ᵃ s^{-γ} ds + (1-a) a^{-γ}
                b * (a.powf(1.0 - g) / (1.0 - g) + (1.0 - a) * a.powf(-g))
            }
            KernelKind::Weak => {
                // a ⋅ a^{-γ-1} + ∫ₐ¹ s^{-γ-1} ds
                b * (a.powf(-g) + (a.powf(-g) - 1.0) / g)
            }
        };
        Ok(v)
    }

    /// Partial row integral ∫₀ᵘ p(a,s) ds for u in [0,1].
    pub fn row_integral_to(&self, a: f64, u: f64) -> Result<f64> {
        check_unit(a)?;
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("upper limit {u} outside [0,1]")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let g = self.gamma;
        let b = self.beta;
        let m = u.min(a); // portion below a
        let v = match self.kind {
            KernelKind::Factor => b * a.powf(-g) * u.powf(1.0 - g) / (1.0 - g),
            KernelKind::PreferentialAttachment => {
                let below = a.powf(g - 1.0) * m.powf(1.0 - g) / (1.0 - g);
                let above = if u > a { a.powf(-g) * (u.powf(g) - a.powf(g)) / g } else { 0.0 };
                b * (below + above)
            }
            KernelKind::Strong => {
                let below = m.powf(1.0 - g) / (1.0 - g);
                let above = if u > a { (u - a) * a.powf(-g) } else { 0.0 };
                b * (below + above)
            }
            KernelKind::Weak => {
                let below = m * a.powf(-g - 1.0);
                let above = if u > a { (a.powf(-g) - u.powf(-g)) / g } else { 0.0 };
                b * (below + above)
            }
        };
        Ok(v)
    }

    /// Tightest constant c₂ with `∫₀¹ p(a,s) ds <= c₂ a^{-γ}` over a ∈ (0,1).
    ///
    /// The paper leaves c₁, c₂ existential; we report the sharp values. The
    /// suprema are attained at the endpoints because `row_integral(a)·a^γ`
    /// is monotone in `a^γ` for every kind.
    pub fn tight_c2(&self) -> f64 {
        let g = self.gamma;
        let b = self.beta;
        match self.kind {
            KernelKind::Factor => b / (1.0 - g),
            // β[u/(1-γ) + (1-u)/γ] with u = a^γ ∈ (0,1]
            KernelKind::PreferentialAttachment => b * (1.0 / g).max(1.0 / (1.0 - g)),
            // β[1 + a γ/(1-γ)], increasing in a
            KernelKind::Strong => b / (1.0 - g),
            // β[1 + (1-a^γ)/γ], decreasing in a^γ
            KernelKind::Weak => b * (1.0 + 1.0 / g),
        }
    }

    /// Tightest constant c₁ for the lower bound. For the factor, PA and
    /// strong kernels this bounds `p(a,1) >= c₁ a^{-γ}`; for the weak kernel
    /// only `∫₀¹ p(a,s) ds >= c₁ a^{-γ}` holds.
    pub fn tight_c1(&self) -> f64 {
        let b = self.beta;
        match self.kind {
            // p(a,1) = β a^{-γ} exactly for factor, PA (hi=1) and strong.
            KernelKind::Factor | KernelKind::PreferentialAttachment | KernelKind::Strong => b,
            // row_integral(a)·a^γ = β[1 + (1-a^γ)/γ] >= β at a=1.
            KernelKind::Weak => b,
        }
    }

    /// Whether `c₁ a^{-γ} <= p(a,1)` itself holds (all kinds but weak).
    pub fn pointwise_lower_bound(&self) -> bool {
        !matches!(self.kind, KernelKind::Weak)
    }

    /// Exponent s of the separable envelope p(x,y) <= β (xy)^{-s}.
    ///
    /// Factor is exact; for the others the envelope follows from x,y <= 1:
    /// PA with s = max(γ, 1-γ), strong with s = γ, weak with s = (γ+1)/2.
    pub fn envelope_exponent(&self) -> f64 {
        let g = self.gamma;
        match self.kind {
            KernelKind::Factor => g,
            KernelKind::PreferentialAttachment => g.max(1.0 - g),
            KernelKind::Strong => g,
            KernelKind::Weak => (g + 1.0) / 2.0,
        }
    }
}

#[inline]
fn minmax(x: f64, y: f64) -> (f64, f64) {
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

#[inline]
fn check_unit(x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("argument {x} outside (0,1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::quad::{integrate, integrate_de};
    use approx::assert_relative_eq;

    fn k(kind: KernelKind, beta: f64, gamma: f64) -> KernelSpec {
        KernelSpec::new(kind, beta, gamma).unwrap()
    }

    #[test]
    fn worked_kernel_values() {
        assert_relative_eq!(
            k(KernelKind::Factor, 1.0, 0.5).eval(0.25, 0.25).unwrap(),
            4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k(KernelKind::PreferentialAttachment, 1.0, 0.5).eval(0.25, 0.5).unwrap(),
            2.828427124746190,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k(KernelKind::Weak, 1.0, 0.5).eval(0.5, 0.25).unwrap(),
            2.828427124746190,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k(KernelKind::Strong, 2.0, 0.25).eval(0.0625, 0.9).unwrap(),
            4.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn domain_errors() {
        let spec = k(KernelKind::Factor, 1.0, 0.5);
        assert!(spec.eval(0.0, 0.5).is_err());
        assert!(spec.eval(0.5, 1.5).is_err());
        assert!(spec.row_integral(-0.1).is_err());
        assert!(KernelSpec::new(KernelKind::Factor, 1.0, 1.0).is_err());
        assert!(KernelSpec::new(KernelKind::Factor, 0.0, 0.5).is_err());
        assert!(KernelSpec::from_tau(KernelKind::Factor, 1.0, 2.0).is_err());
    }

    #[test]
    fn tau_round_trip() {
        let spec = KernelSpec::from_tau(KernelKind::Weak, 1.0, 2.5).unwrap();
        assert_relative_eq!(spec.gamma, 1.0 / 1.5, max_relative = 1e-15);
        assert_relative_eq!(spec.tau(), 2.5, max_relative = 1e-15);
    }

    #[test]
    fn worked_row_integrals() {
        assert_relative_eq!(
            k(KernelKind::Factor, 1.0, 0.5).row_integral(0.25).unwrap(),
            4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k(KernelKind::Weak, 1.0, 0.5).row_integral(0.25).unwrap(),
            4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            k(KernelKind::PreferentialAttachment, 1.0, 0.5).row_integral(0.25).unwrap(),
            4.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn row_integrals_match_quadrature() {
        for kind in KernelKind::ALL {
            for gamma in [0.2, 0.5, 0.8] {
                for a in [0.03, 0.25, 0.7, 1.0] {
                    let spec = k(kind, 1.3, gamma);
                    let closed = spec.row_integral(a).unwrap();
                    // split at s = a where min/max kernels have a kink
                    let f = |s: f64| spec.eval_unchecked(a, s.max(1e-300));
                    let q =
                        integrate_de(&f, 0.0, a.min(1.0), 1e-12) + integrate(&f, a.min(1.0), 1.0, 1e-11);
                    assert_relative_eq!(closed, q, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn partial_row_integral_consistent() {
        for kind in KernelKind::ALL {
            let spec = k(kind, 1.0, 0.4);
            let a = 0.2;
            assert_relative_eq!(
                spec.row_integral_to(a, 1.0).unwrap(),
                spec.row_integral(a).unwrap(),
                max_relative = 1e-12
            );
            let u = 0.45;
            let f = |s: f64| spec.eval_unchecked(a, s.max(1e-300));
            let q = integrate_de(&f, 0.0, a, 1e-13) + integrate(&f, a, u, 1e-12);
            assert_relative_eq!(spec.row_integral_to(a, u).unwrap(), q, max_relative = 1e-9);
        }
    }

    #[test]
    fn symmetry_and_monotonicity() {
        let mut rng = crate::rng::SeqRng::new(11);
        for kind in KernelKind::ALL {
            let spec = k(kind, 1.0, 0.6);
            for _ in 0..500 {
                let x = rng.uniform();
                let y = rng.uniform();
                let px = spec.eval(x, y).unwrap();
                assert_relative_eq!(px, spec.eval(y, x).unwrap(), max_relative = 1e-12);
                // decreasing in the first argument
                let x2 = x * rng.uniform();
                assert!(spec.eval(x2.max(1e-12), y).unwrap() >= px * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn pa_equals_factor_at_half() {
        let pa = k(KernelKind::PreferentialAttachment, 1.7, 0.5);
        let fa = k(KernelKind::Factor, 1.7, 0.5);
        let mut rng = crate::rng::SeqRng::new(5);
        for _ in 0..1000 {
            let x = rng.uniform();
            let y = rng.uniform();
            assert_relative_eq!(
                pa.eval(x, y).unwrap(),
                fa.eval(x, y).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn condp_bounds_with_tight_constants() {
        let mut rng = crate::rng::SeqRng::new(23);
        for kind in KernelKind::ALL {
            let spec = k(kind, 1.1, 0.45);
            let c1 = spec.tight_c1();
            let c2 = spec.tight_c2();
            for _ in 0..1000 {
                let a = rng.uniform().max(1e-9);
                let row = spec.row_integral(a).unwrap();
                let pa1 = spec.eval(a, 1.0).unwrap();
                let pow = a.powf(-spec.gamma);
                assert!(pa1 <= row * (1.0 + 1e-12), "p(a,1) <= row integral");
                assert!(row <= c2 * pow * (1.0 + 1e-12), "row integral <= c2 a^-g");
                if spec.pointwise_lower_bound() {
                    assert!(c1 * pow <= pa1 * (1.0 + 1e-12), "c1 a^-g <= p(a,1)");
                } else {
                    assert!(c1 * pow <= row * (1.0 + 1e-12), "c1 a^-g <= row integral");
                }
            }
        }
    }

    #[test]
    fn separable_envelope_dominates() {
        let mut rng = crate::rng::SeqRng::new(37);
        for kind in KernelKind::ALL {
            for gamma in [0.3, 0.5, 0.75] {
                let spec = k(kind, 1.0, gamma);
                let s = spec.envelope_exponent();
                for _ in 0..2000 {
                    let x = rng.uniform();
                    let y = rng.uniform();
                    let env = spec.beta * (x * y).powf(-s);
                    assert!(
                        spec.eval(x, y).unwrap() <= env * (1.0 + 1e-12),
                        "{kind:?} gamma={gamma} x={x} y={y}"
                    );
                }
            }
        }
    }
}
