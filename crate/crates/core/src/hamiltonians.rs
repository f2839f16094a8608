//! 3×3 non-Hermitian generators of the two loss models.
//!
//! Adiabatic-basis ordering is `(|+⟩, |0⟩, |−⟩)`, bare ordering is
//! `(|1⟩, |2⟩, |3⟩)`. Every generator is written `H = H_h − iK` with `H_h`
//! Hermitian and `K` (the decay part) positive semidefinite.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{AdiabaticFrame, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Derived from the master equation: decay only on the diagonal of the
    /// adiabatic basis.
    Effective,
    /// Imaginary shift of the intermediate level in the bare basis.
    Phenomenological,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Effective, ModelKind::Phenomenological];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Effective => "effective",
            ModelKind::Phenomenological => "phenomenological",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "effective" | "eff" => Ok(ModelKind::Effective),
            "phenomenological" | "phen" => Ok(ModelKind::Phenomenological),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Adiabatic,
    Bare,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Adiabatic => "adiabatic",
            BasisKind::Bare => "bare",
        }
    }
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adiabatic" => Ok(BasisKind::Adiabatic),
            "bare" => Ok(BasisKind::Bare),
            other => Err(Error::InvalidParameter(format!("unknown basis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMatrix {
    pub entries: Matrix3<C64>,
    pub basis: BasisKind,
    pub model: ModelKind,
    pub t: f64,
}

impl GeneratorMatrix {
    /// `(H + H†)/2`.
    pub fn hermitian_part(&self) -> Matrix3<C64> {
        (self.entries + self.entries.adjoint()) * C64::from(0.5)
    }

    /// `K = (i/2)(H − H†)`, so that `H = H_h − iK`.
    pub fn decay_part(&self) -> Matrix3<C64> {
        (self.entries - self.entries.adjoint()) * C64::new(0.0, 0.5)
    }

    /// Eigenvalues of the decay part in ascending order.
    pub fn decay_eigenvalues(&self) -> [f64; 3] {
        let k = self.decay_part();
        let k = (k + k.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(k).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }
}

/// The bare-basis correction `(|+⟩⟨−| + |−⟩⟨+|)` relating the two models.
fn bright_exchange_bare(frame: &AdiabaticFrame) -> Matrix3<C64> {
    let (st, ct) = frame.theta.sin_cos();
    let (sp, cp) = frame.phi.sin_cos();
    let s2p = 2.0 * sp * cp;
    let c2p = cp * cp - sp * sp;
    Matrix3::new(
        s2p * st * st, c2p * st, s2p * st * ct,
        c2p * st, -s2p, c2p * ct,
        s2p * st * ct, c2p * ct, s2p * ct * ct,
    )
    .map(C64::from)
}

fn adiabatic_entries(frame: &AdiabaticFrame, gamma: f64, model: ModelKind) -> Matrix3<C64> {
    let (sp, cp) = frame.phi.sin_cos();
    let i = C64::i();
    let td = frame.theta_dot;
    let pd = frame.phi_dot;
    let corner = match model {
        ModelKind::Effective => 0.0,
        ModelKind::Phenomenological => gamma * sp * cp,
    };
    Matrix3::new(
        C64::new(frame.omega_plus, -gamma * cp * cp),
        i * (td * sp),
        C64::new(0.0, pd + corner),
        -i * (td * sp),
        C64::from(0.0),
        -i * (td * cp),
        C64::new(0.0, -pd + corner),
        i * (td * cp),
        C64::new(frame.omega_minus, -gamma * sp * sp),
    )
}

fn bare_entries(frame: &AdiabaticFrame, gamma: f64, model: ModelKind) -> Matrix3<C64> {
    let p = C64::from(frame.omega_p);
    let s = C64::from(frame.omega_s);
    let z = C64::from(0.0);
    let phen = Matrix3::new(
        z, p, z,
        p, C64::new(frame.delta, -gamma), s,
        z, s, z,
    );
    match model {
        ModelKind::Phenomenological => phen,
        ModelKind::Effective => {
            let weight = C64::new(0.0, -0.5 * gamma * (2.0 * frame.phi).sin());
            phen + bright_exchange_bare(frame) * weight
        }
    }
}

/// Generator `H(t)` of `i da/dt = H a` for the given model and basis.
pub fn build_generator(
    frame: &AdiabaticFrame,
    gamma: f64,
    model: ModelKind,
    basis: BasisKind,
) -> GeneratorMatrix {
    let entries = match basis {
        BasisKind::Adiabatic => adiabatic_entries(frame, gamma, model),
        BasisKind::Bare => bare_entries(frame, gamma, model),
    };
    GeneratorMatrix {
        entries,
        basis,
        model,
        t: frame.t,
    }
}

/// Split the adiabatic-basis generator into its `Γ`-proportional part and
/// the remainder.
pub fn zeno_split(
    frame: &AdiabaticFrame,
    gamma: f64,
    model: ModelKind,
    basis: BasisKind,
) -> Result<(GeneratorMatrix, GeneratorMatrix)> {
    if basis != BasisKind::Adiabatic {
        return Err(Error::BareBasisSplit);
    }
    let full = adiabatic_entries(frame, gamma, model);
    let rest = adiabatic_entries(frame, 0.0, model);
    let wrap = |entries| GeneratorMatrix {
        entries,
        basis,
        model,
        t: frame.t,
    };
    Ok((wrap(full - rest), wrap(rest)))
}

/// Zero-eigenvalue doublet `{|0⟩, sinφ|+⟩ + cosφ|−⟩}` of the
/// phenomenological Γ-part, and the decaying state `cosφ|+⟩ − sinφ|−⟩`, as
/// adiabatic-basis column vectors.
pub fn phenomenological_zeno_states(frame: &AdiabaticFrame) -> [nalgebra::Vector3<C64>; 3] {
    let (sp, cp) = frame.phi.sin_cos();
    let v = |a: f64, b: f64, c: f64| nalgebra::Vector3::new(a, b, c).map(C64::from);
    [v(0.0, 1.0, 0.0), v(sp, 0.0, cp), v(cp, 0.0, -sp)]
}

/// Restriction of the Zeno perturbation to the phenomenological doublet.
pub fn doublet_restriction(frame: &AdiabaticFrame) -> Matrix2<C64> {
    let td = frame.theta_dot;
    Matrix2::new(
        C64::from(0.0),
        C64::new(0.0, -td),
        C64::new(0.0, td),
        C64::from(0.0),
    )
}
