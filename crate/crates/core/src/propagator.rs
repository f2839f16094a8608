//! Amplitude propagation `i da/dt = H(t) a` for either model in either basis.

use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::format::num;
use crate::integrator::{self, OdeSystem, StepControl};
use crate::{
    build_generator, frame_at, AdiabaticFrame, BasisKind, Error, ModelKind, PulseConfig, Result,
    C64,
};

/// `ΓT` above which the integrator starts from a damping-limited step.
pub const STIFF_GAMMA: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub components: Vector3<C64>,
    pub t: f64,
    pub basis: BasisKind,
}

impl AmplitudeState {
    pub fn norm_sqr(&self) -> f64 {
        self.components.norm_squared()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub sampling: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.1,
            sampling: 2001,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1e-3], got {tol}")));
            }
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return Err(Error::InvalidParameter(format!("max_step must be positive, got {}", self.max_step)));
        }
        if self.sampling < 2 {
            return Err(Error::InvalidParameter("sampling needs at least 2 points".into()));
        }
        Ok(())
    }

    /// Step controller for a run with loss rate `gamma`.
    pub(crate) fn step_control(&self, gamma: f64) -> StepControl {
        let mut ctl = StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            ..StepControl::default()
        };
        if gamma >= STIFF_GAMMA {
            ctl.initial_step = Some(0.1 / gamma);
            ctl.max_growth = 2.0;
        }
        ctl
    }

    /// Uniform sample grid over the pulse window.
    pub fn sample_times(&self, cfg: &PulseConfig) -> Vec<f64> {
        let (a, b) = cfg.window();
        let n = self.sampling;
        let mut times: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        times[n - 1] = b;
        times
    }
}

/// Bare-basis populations along a run, plus the post-pulse values.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub p3: Vec<f64>,
    pub norm: Vec<f64>,
    pub p3_final: f64,
    pub p1_final: f64,
    pub norm_final: f64,
}

impl Trajectory {
    pub const CSV_HEADER: &'static str = "t_over_T,p1,p2,p3,norm";

    fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            p1: Vec::with_capacity(n),
            p2: Vec::with_capacity(n),
            p3: Vec::with_capacity(n),
            norm: Vec::with_capacity(n),
            p3_final: f64::NAN,
            p1_final: f64::NAN,
            norm_final: f64::NAN,
        }
    }

    fn push(&mut self, t: f64, [p1, p2, p3]: [f64; 3]) {
        self.times.push(t);
        self.p1.push(p1);
        self.p2.push(p2);
        self.p3.push(p3);
        self.norm.push(p1 + p2 + p3);
    }

    fn finish(mut self) -> Self {
        let last = self.times.len() - 1;
        self.p1_final = self.p1[last];
        self.p3_final = self.p3[last];
        self.norm_final = self.norm[last];
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                num(self.times[i]),
                num(self.p1[i]),
                num(self.p2[i]),
                num(self.p3[i]),
                num(self.norm[i])
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        crate::experiments::write_atomically(path, |f| self.write_csv(f))
    }
}

/// Bare `|1⟩` at the start of the window, expressed in `basis`.
pub fn initial_state(cfg: &PulseConfig, basis: BasisKind) -> AmplitudeState {
    let (t0, _) = cfg.window();
    let components = match basis {
        BasisKind::Bare => Vector3::new(C64::from(1.0), C64::from(0.0), C64::from(0.0)),
        BasisKind::Adiabatic => {
            let u = frame_at(cfg, t0).eigenvectors();
            u.row(0).adjoint()
        }
    };
    AmplitudeState {
        components,
        t: t0,
        basis,
    }
}

/// Populations of `|1⟩, |2⟩, |3⟩` for an adiabatic-basis state.
pub fn bare_populations(frame: &AdiabaticFrame, state: &AmplitudeState) -> [f64; 3] {
    let psi = match state.basis {
        BasisKind::Adiabatic => frame.eigenvectors() * state.components,
        BasisKind::Bare => state.components,
    };
    [psi[0].norm_sqr(), psi[1].norm_sqr(), psi[2].norm_sqr()]
}

pub(crate) fn pack(v: &Vector3<C64>) -> [f64; 6] {
    [v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im]
}

pub(crate) fn unpack(y: &[f64]) -> Vector3<C64> {
    Vector3::new(
        C64::new(y[0], y[1]),
        C64::new(y[2], y[3]),
        C64::new(y[4], y[5]),
    )
}

/// `da/dt = −i H(t) a` as a real system of dimension 6.
pub struct AmplitudeSystem {
    pub cfg: PulseConfig,
    pub gamma: f64,
    pub model: ModelKind,
    pub basis: BasisKind,
}

impl OdeSystem for AmplitudeSystem {
    fn dim(&self) -> usize {
        6
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let frame = frame_at(&self.cfg, t);
        let h = build_generator(&frame, self.gamma, self.model, self.basis).entries;
        let d = (h * unpack(y)) * C64::new(0.0, -1.0);
        dy.copy_from_slice(&pack(&d));
    }
}

pub(crate) fn validate_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gammaT must be non-negative, got {gamma}")))
    }
}

/// Amplitude vectors at the uniform sample times, in the propagation basis.
pub fn propagate_states(
    cfg: &PulseConfig,
    gamma: f64,
    model: ModelKind,
    basis: BasisKind,
    opts: &SimOptions,
) -> Result<Vec<AmplitudeState>> {
    let mut states = Vec::with_capacity(opts.sampling);
    run(cfg, gamma, model, basis, opts, |s| states.push(s))?;
    Ok(states)
}

fn run<F: FnMut(AmplitudeState)>(
    cfg: &PulseConfig,
    gamma: f64,
    model: ModelKind,
    basis: BasisKind,
    opts: &SimOptions,
    mut on_sample: F,
) -> Result<()> {
    cfg.validate()?;
    validate_gamma(gamma)?;
    opts.validate()?;

    let sys = AmplitudeSystem {
        cfg: *cfg,
        gamma,
        model,
        basis,
    };
    let start = initial_state(cfg, basis);
    let (t0, t1) = cfg.window();
    let samples = opts.sample_times(cfg);
    integrator::integrate(
        &sys,
        t0,
        &pack(&start.components),
        t1,
        &samples,
        &opts.step_control(gamma),
        |t, y| {
            on_sample(AmplitudeState {
                components: unpack(y),
                t,
                basis,
            })
        },
    )?;
    Ok(())
}

/// Integrate the amplitude equations over the pulse window and report
/// bare-basis populations.
pub fn propagate(
    cfg: &PulseConfig,
    gamma: f64,
    model: ModelKind,
    basis: BasisKind,
    opts: &SimOptions,
) -> Result<Trajectory> {
    let mut traj = Trajectory::with_capacity(opts.sampling);
    run(cfg, gamma, model, basis, opts, |state| {
        let pops = match basis {
            BasisKind::Bare => state.components.map(|z| z.norm_sqr()).into(),
            BasisKind::Adiabatic => bare_populations(&frame_at(cfg, state.t), &state),
        };
        traj.push(state.t, pops);
    })?;
    Ok(traj.finish())
}
