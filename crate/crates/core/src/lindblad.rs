//! Four-level master equation with jumps between the instantaneous
//! eigenstates `|±(t)⟩` and the sink level `|4⟩`.
//!
//! The density matrix is propagated in the fixed bare basis
//! `(|1⟩, |2⟩, |3⟩, |4⟩)`; eigenvectors enter only through the jump
//! operators.
//!
//! `ReservoirSpec::gamma` is the same `Γ` that appears in the non-Hermitian
//! generators, where `|a₊|²` decays at `2Γcos²φ`. The Lindblad rates are
//! therefore `γ₊ = 2Γcos²φ(N₊+1)` and `γ₋ = 2Γsin²φ(N₋+1)`, which makes
//! the zero-temperature populations of levels 1–3 coincide with the
//! effective model.

use std::io::Write;
use std::path::Path;

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use crate::format::num;
use crate::integrator::{self, OdeSystem};
use crate::propagator::validate_gamma;
use crate::{frame_at, AdiabaticFrame, Error, PulseConfig, Result, SimOptions, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub gamma: f64,
    #[serde(default)]
    pub n_plus: f64,
    #[serde(default)]
    pub n_minus: f64,
    #[serde(default)]
    pub omega4: f64,
}

impl ReservoirSpec {
    pub fn zero_temperature(gamma: f64) -> Self {
        ReservoirSpec {
            gamma,
            n_plus: 0.0,
            n_minus: 0.0,
            omega4: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_gamma(self.gamma)?;
        for (name, n) in [("n_plus", self.n_plus), ("n_minus", self.n_minus)] {
            if !(n.is_finite() && n >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {n}")));
            }
        }
        if !self.omega4.is_finite() {
            return Err(Error::InvalidParameter("omega4 must be finite".into()));
        }
        Ok(())
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.n_plus == 0.0 && self.n_minus == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub plus: f64,
    pub minus: f64,
    pub plus_exc: f64,
    pub minus_exc: f64,
}

/// Decay and excitation rates between `|±(t)⟩` and `|4⟩`.
pub fn rates_at(frame: &AdiabaticFrame, res: &ReservoirSpec) -> DecayRates {
    let (sp, cp) = frame.phi.sin_cos();
    let coupling = 2.0 * res.gamma;
    let plus = coupling * cp * cp * (res.n_plus + 1.0);
    let minus = coupling * sp * sp * (res.n_minus + 1.0);
    DecayRates {
        plus,
        minus,
        plus_exc: plus * res.n_plus / (res.n_plus + 1.0),
        minus_exc: minus * res.n_minus / (res.n_minus + 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    pub entries: Matrix4<C64>,
}

impl DensityMatrix4 {
    /// Pure state `|k⟩⟨k|` for bare level `k ∈ 0..4`.
    pub fn bare_projector(k: usize) -> Self {
        let mut entries = Matrix4::zeros();
        entries[(k, k)] = C64::from(1.0);
        DensityMatrix4 { entries }
    }

    pub fn from_pure(psi: &Vector4<C64>) -> Self {
        DensityMatrix4 {
            entries: psi * psi.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.entries[(k, k)].re)
    }

    /// Largest entry of `|ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.entries + self.entries.adjoint()) * C64::from(0.5);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn bright_states(frame: &AdiabaticFrame) -> (Vector4<C64>, Vector4<C64>) {
    let (st, ct) = frame.theta.sin_cos();
    let (sp, cp) = frame.phi.sin_cos();
    let plus = Vector4::new(sp * st, cp, sp * ct, 0.0).map(C64::from);
    let minus = Vector4::new(cp * st, -sp, cp * ct, 0.0).map(C64::from);
    (plus, minus)
}

fn system_hamiltonian(frame: &AdiabaticFrame, omega4: f64) -> Matrix4<C64> {
    let (p, s) = (frame.omega_p, frame.omega_s);
    Matrix4::new(
        0.0, p, 0.0, 0.0,
        p, frame.delta, s, 0.0,
        0.0, s, 0.0, 0.0,
        0.0, 0.0, 0.0, omega4,
    )
    .map(C64::from)
}

/// `rate·(LρL† − ½{L†L, ρ})`.
fn dissipator(rho: &Matrix4<C64>, jump: &Matrix4<C64>, rate: f64) -> Matrix4<C64> {
    if rate == 0.0 {
        return Matrix4::zeros();
    }
    let ldag = jump.adjoint();
    let ll = ldag * jump;
    (jump * rho * ldag - (ll * rho + rho * ll) * C64::from(0.5)) * C64::from(rate)
}

fn rhs_at(rho: &Matrix4<C64>, frame: &AdiabaticFrame, res: &ReservoirSpec) -> Matrix4<C64> {
    let h = system_hamiltonian(frame, res.omega4);
    let mut d = (h * rho - rho * h) * C64::new(0.0, -1.0);
    let rates = rates_at(frame, res);
    let (plus, minus) = bright_states(frame);
    let sink = Vector4::new(0.0, 0.0, 0.0, 1.0).map(C64::from);
    let down_plus = sink * plus.adjoint();
    let down_minus = sink * minus.adjoint();
    d += dissipator(rho, &down_plus, rates.plus);
    d += dissipator(rho, &down_minus, rates.minus);
    d += dissipator(rho, &down_plus.adjoint(), rates.plus_exc);
    d += dissipator(rho, &down_minus.adjoint(), rates.minus_exc);
    d
}

/// Time derivative of `ρ` under the full four-level master equation.
pub fn master_rhs(
    rho: &DensityMatrix4,
    t: f64,
    cfg: &PulseConfig,
    res: &ReservoirSpec,
) -> DensityMatrix4 {
    DensityMatrix4 {
        entries: rhs_at(&rho.entries, &frame_at(cfg, t), res),
    }
}

fn pack(m: &Matrix4<C64>) -> [f64; 32] {
    let mut out = [0.0; 32];
    for (k, z) in m.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
    out
}

fn unpack(y: &[f64]) -> Matrix4<C64> {
    Matrix4::from_iterator((0..16).map(|k| C64::new(y[2 * k], y[2 * k + 1])))
}

struct MasterSystem<'a> {
    cfg: &'a PulseConfig,
    res: ReservoirSpec,
}

impl OdeSystem for MasterSystem<'_> {
    fn dim(&self) -> usize {
        32
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let frame = frame_at(self.cfg, t);
        dy.copy_from_slice(&pack(&rhs_at(&unpack(y), &frame, &self.res)));
    }
}

/// Four-level populations and diagnostics along a master-equation run.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterTrajectory {
    pub times: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub p3: Vec<f64>,
    pub p4: Vec<f64>,
    pub trace: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    pub hermiticity_defect: Vec<f64>,
    pub final_state: DensityMatrix4,
}

impl MasterTrajectory {
    pub const CSV_HEADER: &'static str = "t_over_T,p1,p2,p3,p4,trace";

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn p1_final(&self) -> f64 {
        *self.p1.last().expect("non-empty trajectory")
    }

    pub fn p3_final(&self) -> f64 {
        *self.p3.last().expect("non-empty trajectory")
    }

    pub fn p4_final(&self) -> f64 {
        *self.p4.last().expect("non-empty trajectory")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                num(self.times[i]),
                num(self.p1[i]),
                num(self.p2[i]),
                num(self.p3[i]),
                num(self.p4[i]),
                num(self.trace[i])
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        crate::experiments::write_atomically(path, |f| self.write_csv(f))
    }
}

/// Integrate the master equation from `ρ = |1⟩⟨1|` over the pulse window.
pub fn propagate_master(
    cfg: &PulseConfig,
    res: &ReservoirSpec,
    opts: &SimOptions,
) -> Result<MasterTrajectory> {
    cfg.validate()?;
    res.validate()?;
    opts.validate()?;
    let sys = MasterSystem {
        cfg,
        res: *res,
    };
    let (t0, t1) = cfg.window();
    let samples = opts.sample_times(cfg);
    let n = samples.len();
    let mut out = MasterTrajectory {
        times: Vec::with_capacity(n),
        p1: Vec::with_capacity(n),
        p2: Vec::with_capacity(n),
        p3: Vec::with_capacity(n),
        p4: Vec::with_capacity(n),
        trace: Vec::with_capacity(n),
        min_eigenvalue: Vec::with_capacity(n),
        hermiticity_defect: Vec::with_capacity(n),
        final_state: DensityMatrix4::bare_projector(0),
    };
    let rho0 = DensityMatrix4::bare_projector(0);
    integrator::integrate(
        &sys,
        t0,
        &pack(&rho0.entries),
        t1,
        &samples,
        &opts.step_control(res.gamma),
        |t, y| {
            let rho = DensityMatrix4 { entries: unpack(y) };
            let [p1, p2, p3, p4] = rho.populations();
            out.times.push(t);
            out.p1.push(p1);
            out.p2.push(p2);
            out.p3.push(p3);
            out.p4.push(p4);
            out.trace.push(rho.trace().re);
            out.min_eigenvalue.push(rho.min_eigenvalue());
            out.hermiticity_defect.push(rho.hermiticity_defect());
            out.final_state = rho;
        },
    )?;
    Ok(out)
}

/// Right-hand side of the zero-temperature rate equations for the
/// adiabatic-basis coefficients `ρ̄ᵢⱼ` (ordering `+, 0, −`).
///
/// Written out element by element; the lower triangle follows from the
/// upper one by swapping indices and conjugating the coefficients, so the
/// map is valid for non-Hermitian `ρ̄` too.
pub fn adiabatic_rate_rhs(
    coeffs: &Matrix3<C64>,
    frame: &AdiabaticFrame,
    res: &ReservoirSpec,
) -> Result<Matrix3<C64>> {
    if !res.is_zero_temperature() {
        return Err(Error::InvalidParameter(
            "the adiabatic rate equations assume zero temperature".into(),
        ));
    }
    let r = |i: usize, j: usize| coeffs[(i, j)];
    let (p, z, m) = (0, 1, 2);
    let rates = rates_at(frame, res);
    let (gp, gm) = (rates.plus, rates.minus);
    let (sp, cp) = frame.phi.sin_cos();
    let ts = C64::from(frame.theta_dot * sp);
    let tc = C64::from(frame.theta_dot * cp);
    let pd = C64::from(frame.phi_dot);
    let (wp, wm) = (frame.omega_plus, frame.omega_minus);

    let mut d = Matrix3::zeros();
    d[(z, z)] = -ts * (r(p, z) + r(z, p)) - tc * (r(m, z) + r(z, m));
    d[(p, p)] = -gp * r(p, p) + ts * (r(z, p) + r(p, z)) + pd * (r(m, p) + r(p, m));
    d[(m, m)] = -gm * r(m, m) - pd * (r(p, m) + r(m, p)) + tc * (r(z, m) + r(m, z));

    d[(p, z)] = C64::new(-0.5 * gp, -wp) * r(p, z) + ts * r(z, z) + pd * r(m, z)
        - ts * r(p, p)
        - tc * r(p, m);
    d[(z, p)] = C64::new(-0.5 * gp, wp) * r(z, p) + ts * r(z, z) + pd * r(z, m)
        - ts * r(p, p)
        - tc * r(m, p);

    d[(p, m)] = C64::new(-0.5 * (gp + gm), -(wp - wm)) * r(p, m) + ts * r(z, m) + pd * r(m, m)
        - pd * r(p, p)
        + tc * r(p, z);
    d[(m, p)] = C64::new(-0.5 * (gp + gm), wp - wm) * r(m, p) + ts * r(m, z) + pd * r(m, m)
        - pd * r(p, p)
        + tc * r(z, p);

    d[(z, m)] = C64::new(-0.5 * gm, wm) * r(z, m) - ts * r(p, m) - tc * r(m, m) - pd * r(z, p)
        + tc * r(z, z);
    d[(m, z)] = C64::new(-0.5 * gm, -wm) * r(m, z) - ts * r(m, p) - tc * r(m, m) - pd * r(p, z)
        + tc * r(z, z);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{build_generator, BasisKind, ModelKind, Sequence};
    use std::f64::consts::FRAC_PI_4;

    fn cfg() -> PulseConfig {
        PulseConfig::new(10.0, 1.0, Sequence::Counterintuitive)
    }

    #[test]
    fn zero_temperature_rates_sum() {
        let res = ReservoirSpec::zero_temperature(0.8);
        for t in [-3.0, 0.0, 2.0] {
            let r = rates_at(&frame_at(&cfg(), t), &res);
            assert!((r.plus + r.minus - 2.0 * res.gamma).abs() < 1e-15);
            assert_eq!(r.plus_exc, 0.0);
            assert_eq!(r.minus_exc, 0.0);
        }
        let mut f = frame_at(&cfg(), 0.0);
        f.phi = FRAC_PI_4;
        let r = rates_at(&f, &res);
        assert!((r.plus - r.minus).abs() < 1e-15);
        assert!((r.plus - res.gamma).abs() < 1e-15);
    }

    #[test]
    fn excitation_rate_at_unit_occupation() {
        let res = ReservoirSpec {
            n_plus: 1.0,
            ..ReservoirSpec::zero_temperature(1.0)
        };
        let r = rates_at(&frame_at(&cfg(), 0.3), &res);
        assert!((r.plus_exc - r.plus / 2.0).abs() < 1e-15);
    }

    #[test]
    fn sink_level_has_only_coherent_motion_at_zero_temperature() {
        let res = ReservoirSpec {
            omega4: -3.0,
            ..ReservoirSpec::zero_temperature(2.0)
        };
        let rho = DensityMatrix4::bare_projector(3);
        let d = master_rhs(&rho, 0.1, &cfg(), &res);
        // [H_s, |4⟩⟨4|] vanishes because |4⟩ is an eigenstate.
        assert!(d.entries.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn dark_state_feels_no_dissipator() {
        let c = cfg();
        let res = ReservoirSpec::zero_temperature(5.0);
        for t in [-1.0, 0.0, 0.6] {
            let f = frame_at(&c, t);
            let (st, ct) = f.theta.sin_cos();
            let dark = Vector4::new(ct, 0.0, -st, 0.0).map(C64::from);
            let rho = DensityMatrix4::from_pure(&dark);
            let full = master_rhs(&rho, t, &c, &res);
            let coherent = master_rhs(&rho, t, &c, &ReservoirSpec::zero_temperature(0.0));
            let diff = full.entries - coherent.entries;
            assert!(diff.iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn derivative_is_traceless() {
        let c = cfg();
        let res = ReservoirSpec {
            n_plus: 0.4,
            n_minus: 1.1,
            omega4: -2.0,
            gamma: 3.0,
        };
        let a = Matrix4::from_fn(|i, j| C64::new((i as f64 + 1.0) * 0.1, (j as f64 - i as f64) * 0.05));
        let rho = DensityMatrix4 {
            entries: (a + a.adjoint()) * C64::from(0.5),
        };
        let d = master_rhs(&rho, 0.4, &c, &res);
        assert!(d.trace().norm() < 1e-12);
    }

    #[test]
    fn rate_equation_spot_checks() {
        let c = cfg();
        let f = frame_at(&c, 0.2);
        let res = ReservoirSpec::zero_temperature(0.7);
        let mut rho = Matrix3::zeros();
        rho[(1, 1)] = C64::from(1.0);
        let d = adiabatic_rate_rhs(&rho, &f, &res).unwrap();
        assert_eq!(d[(1, 1)], C64::from(0.0));
        let mut rho = Matrix3::zeros();
        rho[(0, 0)] = C64::from(1.0);
        let d = adiabatic_rate_rhs(&rho, &f, &res).unwrap();
        let gp = rates_at(&f, &res).plus;
        assert!((d[(0, 0)] + gp).norm() < 1e-15);
    }

    #[test]
    fn rate_equations_match_pseudo_liouville() {
        let c = cfg();
        let f = frame_at(&c, -0.35);
        let res = ReservoirSpec::zero_temperature(1.3);
        let rho = Matrix3::from_fn(|i, j| C64::new(0.3 * i as f64 - 0.1 * j as f64, 0.2 + 0.1 * (i * j) as f64));
        let h = build_generator(&f, res.gamma, ModelKind::Effective, BasisKind::Adiabatic).entries;
        let want = (h * rho - rho * h.adjoint()) * C64::new(0.0, -1.0);
        let got = adiabatic_rate_rhs(&rho, &f, &res).unwrap();
        assert!((got - want).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn finite_temperature_rate_equations_rejected() {
        let res = ReservoirSpec {
            n_minus: 0.5,
            ..ReservoirSpec::zero_temperature(1.0)
        };
        assert!(adiabatic_rate_rhs(&Matrix3::zeros(), &frame_at(&cfg(), 0.0), &res).is_err());
    }

    #[test]
    fn reservoir_validation() {
        assert!(ReservoirSpec::zero_temperature(-1.0).validate().is_err());
        let r = ReservoirSpec {
            n_plus: -0.1,
            ..ReservoirSpec::zero_temperature(1.0)
        };
        assert!(r.validate().is_err());
    }
}
