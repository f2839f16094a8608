//! Weak-damping closed forms (adiabatic elimination) and the strong-damping
//! Zeno classifier.

use serde::Serialize;

use crate::quadrature;
use crate::{frame_at, AdiabaticFrame, Error, ModelKind, PulseConfig, Result, Sequence, C64};

/// Absolute tolerance of every time integral in this module.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Rate `A(t)` in `ȧ₀ = −A a₀` after eliminating `a₊` and `a₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EliminationCoefficient {
    pub value: C64,
    pub model: ModelKind,
    pub t: f64,
}

/// Evaluate `A(t)` for the counterintuitive dark-state passage.
///
/// `Ω₀cotφ` and `Ω₀tanφ` are taken as `ω₊` and `−ω₋`, and `2Ω₀cot2φ` as
/// `ω₊ + ω₋`, so the expression stays finite as the pulses vanish.
pub fn elimination_coefficient(
    frame: &AdiabaticFrame,
    gamma: f64,
    model: ModelKind,
) -> Result<EliminationCoefficient> {
    let (sp, cp) = frame.phi.sin_cos();
    let (s2, c2) = (sp * sp, cp * cp);
    let plus = C64::new(gamma * c2, frame.omega_plus);
    let minus = C64::new(gamma * s2, frame.omega_minus);
    let phi_dot2 = frame.phi_dot * frame.phi_dot;
    let splitting = frame.omega_plus + frame.omega_minus;
    let (weight, cross) = match model {
        ModelKind::Effective => (s2 * s2 + c2 * c2, 0.0),
        ModelKind::Phenomenological => (1.0, gamma * gamma * s2 * c2),
    };
    let denominator = plus * minus + phi_dot2 - cross;
    let scale = frame.omega0 * frame.omega0 + gamma * gamma;
    if denominator.norm() <= 1e-14 * scale {
        return Err(Error::DegenerateDenominator {
            t: frame.t,
            magnitude: denominator.norm(),
        });
    }
    let numerator = C64::new(gamma * weight, splitting) * (frame.theta_dot * frame.theta_dot);
    Ok(EliminationCoefficient {
        value: numerator / denominator,
        model,
        t: frame.t,
    })
}

/// Exponent integrand of the first-order weak-damping formulas, per unit `Γ`.
fn loss_density(cfg: &PulseConfig, model: ModelKind, t: f64) -> f64 {
    let f = frame_at(cfg, t);
    match cfg.sequence {
        Sequence::Intuitive => f.phi.sin().powi(2),
        Sequence::Counterintuitive => {
            let (sp, cp) = f.phi.sin_cos();
            let weight = match model {
                ModelKind::Effective => sp.powi(4) + cp.powi(4),
                ModelKind::Phenomenological => 1.0,
            };
            let den = f.omega0 * f.omega0 + f.phi_dot * f.phi_dot;
            if den == 0.0 {
                0.0
            } else {
                f.theta_dot * f.theta_dot * weight / den
            }
        }
    }
}

/// Post-pulse `P₃` in the weak-damping approximation.
///
/// Intuitive sequence: `exp[−2Γ∫sin²φ dt]` for either model.
/// Counterintuitive: `exp[−2Γ∫θ̇²w/(Ω₀²+φ̇²) dt]` with `w = 1`
/// (phenomenological) or `w = sin⁴φ + cos⁴φ` (effective).
pub fn weak_damping_p3(cfg: &PulseConfig, gamma: f64, model: ModelKind) -> Result<f64> {
    cfg.validate()?;
    crate::propagator::validate_gamma(gamma)?;
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let (a, b) = cfg.window();
    let integral = quadrature::integrate(|t| loss_density(cfg, model, t), a, b, QUADRATURE_TOL)?;
    Ok((-2.0 * gamma * integral).exp())
}

/// Dark-state population `exp[−2∫Re A dt']` from the window start to each
/// of `times` (ascending).
pub fn dark_state_population(
    cfg: &PulseConfig,
    gamma: f64,
    model: ModelKind,
    times: &[f64],
) -> Result<Vec<f64>> {
    cfg.validate()?;
    crate::propagator::validate_gamma(gamma)?;
    let (start, _) = cfg.window();
    let rate = |t: f64| -> Result<f64> {
        Ok(elimination_coefficient(&frame_at(cfg, t), gamma, model)?.value.re)
    };
    // Surface degenerate denominators before integrating.
    for &t in times {
        rate(t)?;
    }
    let density = |t: f64| rate(t).unwrap_or(f64::NAN);
    let mut out = Vec::with_capacity(times.len());
    let mut cumulative = 0.0;
    let mut prev = start;
    for &t in times {
        cumulative += quadrature::integrate(density, prev, t, QUADRATURE_TOL)?;
        out.push((-2.0 * cumulative).exp());
        prev = t;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ZenoOutcome {
    CompleteTransfer,
    RemainsInState1,
    TotalLoss,
}

impl ZenoOutcome {
    pub fn name(self) -> &'static str {
        match self {
            ZenoOutcome::CompleteTransfer => "CompleteTransfer",
            ZenoOutcome::RemainsInState1 => "RemainsInState1",
            ZenoOutcome::TotalLoss => "TotalLoss",
        }
    }
}

impl std::fmt::Display for ZenoOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZenoPrediction {
    pub outcome: ZenoOutcome,
    pub rationale: &'static str,
}

/// Strong-damping (`Γ ≫ Ω₀, θ̇, φ̇`) outcome of a run.
pub fn zeno_predict(model: ModelKind, sequence: Sequence) -> ZenoPrediction {
    use ModelKind::*;
    use Sequence::*;
    let (outcome, rationale) = match (model, sequence) {
        (Effective, Counterintuitive) => (
            ZenoOutcome::CompleteTransfer,
            "dark state |0> has a zero Zeno eigenvalue and decouples from the lossy |+>, |->",
        ),
        (Phenomenological, Counterintuitive) => (
            ZenoOutcome::RemainsInState1,
            "doublet {|0>, sin(phi)|+> + cos(phi)|->} is fully inverted; ends in |-> = |1>",
        ),
        (Phenomenological, Intuitive) => (
            ZenoOutcome::RemainsInState1,
            "starts in the doublet member |-> = |1>, inverted into |0> = |1> at the end",
        ),
        (Effective, Intuitive) => (
            ZenoOutcome::TotalLoss,
            "|+> and |-> mix near phi = pi/4 and the whole bright subspace decays",
        ),
    };
    ZenoPrediction { outcome, rationale }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn frame(t: f64) -> AdiabaticFrame {
        frame_at(&PulseConfig::new(10.0, 1.0, Sequence::Counterintuitive), t)
    }

    #[test]
    fn models_agree_without_loss() {
        for t in [-2.0, 0.0, 1.5] {
            let f = frame(t);
            let a = elimination_coefficient(&f, 0.0, ModelKind::Effective).unwrap();
            let b = elimination_coefficient(&f, 0.0, ModelKind::Phenomenological).unwrap();
            assert!((a.value - b.value).norm() <= 1e-15 * a.value.norm());
        }
    }

    #[test]
    fn resonant_closed_forms() {
        // Δ = 0 pins φ = π/4 and φ̇ = 0.
        let cfg = PulseConfig::new(10.0, 0.0, Sequence::Counterintuitive);
        let g = 0.3;
        for t in [-1.0, 0.0, 0.8] {
            let f = frame_at(&cfg, t);
            assert_eq!(f.phi, FRAC_PI_4);
            let td2 = f.theta_dot * f.theta_dot;
            let o2 = f.omega0 * f.omega0;
            let eff = elimination_coefficient(&f, g, ModelKind::Effective).unwrap().value;
            let want = 0.5 * g * td2 / (o2 + 0.25 * g * g);
            assert!((eff.re - want).abs() < 1e-14 * want && eff.im.abs() < 1e-15);
            let phen = elimination_coefficient(&f, g, ModelKind::Phenomenological).unwrap().value;
            let want = g * td2 / o2;
            assert!((phen.re - want).abs() < 1e-12 * want && phen.im.abs() < 1e-15);
        }
    }

    #[test]
    fn matches_printed_cot_tan_expression() {
        let g = 0.4;
        for t in [-1.2, 0.0, 0.9] {
            let f = frame(t);
            let (sp, cp) = f.phi.sin_cos();
            let cot = cp / sp;
            let tan = sp / cp;
            let i = C64::i();
            let p = i * f.omega0 * cot + g * cp * cp;
            let m = -i * f.omega0 * tan + g * sp * sp;
            let cot2 = (2.0 * f.phi).cos() / (2.0 * f.phi).sin();
            let td2 = f.theta_dot.powi(2);
            let eff = td2 * (g * (sp.powi(4) + cp.powi(4)) + 2.0 * i * f.omega0 * cot2)
                / (p * m + f.phi_dot.powi(2));
            let phen = td2 * (g + 2.0 * i * f.omega0 * cot2)
                / (p * m + f.phi_dot.powi(2) - 0.25 * g * g * (2.0 * f.phi).sin().powi(2));
            let a = elimination_coefficient(&f, g, ModelKind::Effective).unwrap().value;
            let b = elimination_coefficient(&f, g, ModelKind::Phenomenological).unwrap().value;
            assert!((a - eff).norm() < 1e-12 * eff.norm());
            assert!((b - phen).norm() < 1e-12 * phen.norm());
        }
    }

    #[test]
    fn degenerate_denominator_detected() {
        let mut f = frame(0.0);
        f.omega0 = 0.0;
        f.omega_plus = 0.0;
        f.omega_minus = 0.0;
        f.phi_dot = 0.0;
        let err = elimination_coefficient(&f, 0.0, ModelKind::Effective).unwrap_err();
        assert!(matches!(err, Error::DegenerateDenominator { .. }));
    }

    #[test]
    fn lossless_weak_damping_is_unity() {
        for seq in Sequence::ALL {
            for m in ModelKind::ALL {
                let cfg = PulseConfig::new(10.0, 1.0, seq);
                assert_eq!(weak_damping_p3(&cfg, 0.0, m).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn effective_weak_damping_dominates() {
        let cfg = PulseConfig::new(10.0, 1.0, Sequence::Counterintuitive);
        for g in [0.01, 0.1, 0.5, 2.0] {
            let e = weak_damping_p3(&cfg, g, ModelKind::Effective).unwrap();
            let p = weak_damping_p3(&cfg, g, ModelKind::Phenomenological).unwrap();
            assert!(e >= p, "Γ={g}: {e} < {p}");
        }
    }

    #[test]
    fn intuitive_formula_ignores_model() {
        let cfg = PulseConfig::new(10.0, 1.0, Sequence::Intuitive);
        let e = weak_damping_p3(&cfg, 0.2, ModelKind::Effective).unwrap();
        let p = weak_damping_p3(&cfg, 0.2, ModelKind::Phenomenological).unwrap();
        assert_eq!(e, p);
        assert!(e > 0.0 && e < 1.0);
    }

    #[test]
    fn zeno_table() {
        use ModelKind::*;
        use Sequence::*;
        assert_eq!(zeno_predict(Effective, Counterintuitive).outcome, ZenoOutcome::CompleteTransfer);
        assert_eq!(zeno_predict(Phenomenological, Counterintuitive).outcome, ZenoOutcome::RemainsInState1);
        assert_eq!(zeno_predict(Phenomenological, Intuitive).outcome, ZenoOutcome::RemainsInState1);
        assert_eq!(zeno_predict(Effective, Intuitive).outcome, ZenoOutcome::TotalLoss);
    }
}
