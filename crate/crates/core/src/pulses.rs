//! Pump/Stokes pulse pair, mixing angles and the instantaneous eigenbasis.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Ordering of the two pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sequence {
    /// Pump before Stokes; transfer rides the bright state `|−⟩`.
    Intuitive,
    /// Stokes before pump; transfer rides the dark state `|0⟩`.
    Counterintuitive,
}

impl Sequence {
    pub const ALL: [Sequence; 2] = [Sequence::Intuitive, Sequence::Counterintuitive];

    pub fn name(self) -> &'static str {
        match self {
            Sequence::Intuitive => "intuitive",
            Sequence::Counterintuitive => "counterintuitive",
        }
    }
}

impl std::fmt::Display for Sequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "intuitive" => Ok(Sequence::Intuitive),
            "counterintuitive" | "counter-intuitive" => Ok(Sequence::Counterintuitive),
            other => Err(Error::InvalidParameter(format!("unknown sequence `{other}`"))),
        }
    }
}

/// A pair of pump and Stokes Rabi frequencies with a fixed single-photon
/// detuning. Times in units of `T`, rates in `1/T`.
pub trait PulsePair {
    /// `(Ωp, Ωs)` at time `t`.
    fn rabi(&self, t: f64) -> (f64, f64);
    /// `(dΩp/dt, dΩs/dt)` at time `t`.
    fn rabi_rates(&self, t: f64) -> (f64, f64);
    /// Single-photon detuning `Δ`.
    fn detuning(&self) -> f64;
}

/// Parameters of the sech-shaped pulse family.
///
/// `alpha_t` and `delta_t` are the dimensionless products `αT` and `ΔT`;
/// since all internal times are in units of `T` they are also the numerical
/// values of `α` and `Δ`. `t_scale` only converts to physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseConfig {
    pub alpha_t: f64,
    pub t_scale: f64,
    pub delta_t: f64,
    pub sequence: Sequence,
    pub t_max_over_t: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig::new(10.0, 1.0, Sequence::Counterintuitive)
    }
}

impl PulseConfig {
    pub const DEFAULT_T_MAX: f64 = 10.0;

    pub fn new(alpha_t: f64, delta_t: f64, sequence: Sequence) -> Self {
        PulseConfig {
            alpha_t,
            t_scale: 1.0,
            delta_t,
            sequence,
            t_max_over_t: Self::DEFAULT_T_MAX,
        }
    }

    pub fn with_sequence(mut self, sequence: Sequence) -> Self {
        self.sequence = sequence;
        self
    }

    pub fn with_t_max(mut self, t_max_over_t: f64) -> Self {
        self.t_max_over_t = t_max_over_t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha_t.is_finite() && self.alpha_t > 0.0) {
            return bad(format!("alphaT must be positive, got {}", self.alpha_t));
        }
        if !(self.t_scale.is_finite() && self.t_scale > 0.0) {
            return bad(format!("T must be positive, got {}", self.t_scale));
        }
        if !(self.delta_t.is_finite() && self.delta_t >= 0.0) {
            return bad(format!("deltaT must be non-negative, got {}", self.delta_t));
        }
        if !(self.t_max_over_t.is_finite() && self.t_max_over_t >= 5.0) {
            return bad(format!("tmaxT must be at least 5, got {}", self.t_max_over_t));
        }
        Ok(())
    }

    /// Integration window `[−t_max, t_max]` in units of `T`.
    pub fn window(&self) -> (f64, f64) {
        (-self.t_max_over_t, self.t_max_over_t)
    }

    /// Peak amplitude `α/√2` of either pulse envelope.
    fn envelope_amplitude(&self) -> f64 {
        self.alpha_t / SQRT_2
    }

    /// Convert a dimensionless time `t/T` into physical units of `t_scale`.
    pub fn physical_time(&self, t_over_t: f64) -> f64 {
        t_over_t * self.t_scale
    }

    /// The leading (`Ω₁`) and trailing (`Ω₂`) pulses together with their
    /// derivatives.
    fn leading_trailing(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        let a = self.envelope_amplitude();
        let sech = 1.0 / t.cosh();
        let tanh = t.tanh();
        let x = FRAC_PI_4 * (tanh + 1.0);
        let dx = FRAC_PI_4 * sech * sech;
        let (sx, cx) = x.sin_cos();
        let first = a * sech * cx;
        let second = a * sech * sx;
        let d_first = a * (-sech * tanh * cx - sech * sx * dx);
        let d_second = a * (-sech * tanh * sx + sech * cx * dx);
        ([first, second], [d_first, d_second])
    }

    /// rms Rabi frequency `Ω₀(t)`.
    pub fn rms_rabi(&self, t: f64) -> f64 {
        self.envelope_amplitude() / t.cosh()
    }
}

impl PulsePair for PulseConfig {
    fn rabi(&self, t: f64) -> (f64, f64) {
        let ([first, second], _) = self.leading_trailing(t);
        match self.sequence {
            Sequence::Intuitive => (first, second),
            Sequence::Counterintuitive => (second, first),
        }
    }

    fn rabi_rates(&self, t: f64) -> (f64, f64) {
        let (_, [d_first, d_second]) = self.leading_trailing(t);
        match self.sequence {
            Sequence::Intuitive => (d_first, d_second),
            Sequence::Counterintuitive => (d_second, d_first),
        }
    }

    fn detuning(&self) -> f64 {
        self.delta_t
    }
}

/// Pump and Stokes Rabi frequencies at `t` (units of `T`).
pub fn eval_pulses(cfg: &PulseConfig, t: f64) -> (f64, f64) {
    cfg.rabi(t)
}

/// Snapshot of everything that parameterizes the instantaneous eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrame {
    pub t: f64,
    pub delta: f64,
    pub omega_p: f64,
    pub omega_s: f64,
    pub omega0: f64,
    pub theta: f64,
    pub phi: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

/// `ω± = (Δ ± √(Δ²+4Ω₀²))/2`, with the smaller root taken from the product
/// `ω₊ω₋ = −Ω₀²` to avoid cancellation.
fn eigenvalues(delta: f64, omega0: f64) -> (f64, f64) {
    let root = delta.hypot(2.0 * omega0);
    let (big, small_sign) = if delta >= 0.0 {
        (0.5 * (delta + root), -1.0)
    } else {
        (0.5 * (delta - root), 1.0)
    };
    let other = if big == 0.0 {
        0.0
    } else {
        -omega0 * omega0 / big
    };
    if small_sign < 0.0 {
        (big, other)
    } else {
        (other, big)
    }
}

/// `φ = ½·atan2(2Ω₀, Δ)`, pinned to `π/4` at zero detuning.
fn mixing_phi(delta: f64, omega0: f64) -> f64 {
    if delta == 0.0 {
        FRAC_PI_4
    } else {
        0.5 * (2.0 * omega0).atan2(delta)
    }
}

/// `dφ/dt` from `tan 2φ = 2Ω₀/Δ`.
fn mixing_phi_rate(delta: f64, omega0: f64, omega0_dot: f64) -> f64 {
    if delta == 0.0 {
        0.0
    } else {
        delta * omega0_dot / (delta * delta + 4.0 * omega0 * omega0)
    }
}

impl AdiabaticFrame {
    /// Build a frame for an arbitrary pulse pair, with angle rates obtained
    /// from the pulse derivatives.
    pub fn from_pulses<P: PulsePair + ?Sized>(pulses: &P, t: f64) -> Self {
        let (omega_p, omega_s) = pulses.rabi(t);
        let (dp, ds) = pulses.rabi_rates(t);
        let delta = pulses.detuning();
        let omega0 = omega_p.hypot(omega_s);
        let o2 = omega0 * omega0;
        let (theta_dot, omega0_dot) = if o2 > 0.0 {
            ((omega_s * dp - omega_p * ds) / o2, (omega_p * dp + omega_s * ds) / omega0)
        } else {
            (0.0, 0.0)
        };
        let (omega_plus, omega_minus) = eigenvalues(delta, omega0);
        AdiabaticFrame {
            t,
            delta,
            omega_p,
            omega_s,
            omega0,
            theta: omega_p.atan2(omega_s),
            phi: mixing_phi(delta, omega0),
            theta_dot,
            phi_dot: mixing_phi_rate(delta, omega0, omega0_dot),
            omega_plus,
            omega_minus,
        }
    }

    /// Eigenvector matrix `U(t)`: bare rows `|1⟩,|2⟩,|3⟩`, columns
    /// `|+⟩, |0⟩, |−⟩`.
    pub fn eigenvectors(&self) -> Matrix3<C64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Matrix3::new(
            sp * st, ct, cp * st,
            cp, 0.0, -sp,
            sp * ct, -st, cp * ct,
        )
        .map(C64::from)
    }

    /// Time derivative `dU/dt`.
    pub fn eigenvector_rates(&self) -> Matrix3<C64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let (td, pd) = (self.theta_dot, self.phi_dot);
        Matrix3::new(
            pd * cp * st + td * sp * ct, -td * st, -pd * sp * st + td * cp * ct,
            -pd * sp, 0.0, -pd * cp,
            pd * cp * ct - td * sp * st, -td * ct, -pd * sp * ct - td * cp * st,
        )
        .map(C64::from)
    }
}

/// Frame of the sech pulse family, with closed-form angle rates.
pub fn frame_at(cfg: &PulseConfig, t: f64) -> AdiabaticFrame {
    let (omega_p, omega_s) = cfg.rabi(t);
    let delta = cfg.delta_t;
    let sech = 1.0 / t.cosh();
    let omega0 = cfg.envelope_amplitude() * sech;
    let omega0_dot = -omega0 * t.tanh();
    let sweep = FRAC_PI_4 * sech * sech;
    let theta_dot = match cfg.sequence {
        Sequence::Counterintuitive => sweep,
        Sequence::Intuitive => -sweep,
    };
    let (omega_plus, omega_minus) = eigenvalues(delta, omega0);
    AdiabaticFrame {
        t,
        delta,
        omega_p,
        omega_s,
        omega0,
        theta: omega_p.atan2(omega_s).clamp(0.0, FRAC_PI_2),
        phi: mixing_phi(delta, omega0),
        theta_dot,
        phi_dot: mixing_phi_rate(delta, omega0, omega0_dot),
        omega_plus,
        omega_minus,
    }
}
