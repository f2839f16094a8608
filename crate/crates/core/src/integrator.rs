//! Dormand–Prince 5(4) integrator with PI step control and dense output.
//!
//! States are flat real slices; complex systems interleave `(re, im)`.

use crate::{Error, Result};

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Upper bound on the first trial step; `None` lets the heuristic pick.
    pub initial_step: Option<f64>,
    /// Largest allowed ratio `h_new / h`.
    pub max_growth: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.1,
            initial_step: None,
            max_growth: 10.0,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const MIN_SHRINK: f64 = 0.2;

struct Work {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    cont: [Vec<f64>; 5],
}

impl Work {
    fn new(n: usize) -> Self {
        Work {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
            cont: std::array::from_fn(|_| vec![0.0; n]),
        }
    }
}

fn rms_norm(v: &[f64], scale: &[f64]) -> f64 {
    let s: f64 = v.iter().zip(scale).map(|(a, b)| (a / b).powi(2)).sum();
    (s / v.len() as f64).sqrt()
}

/// Starting-step heuristic (Hairer, Nørsett & Wanner, II.4).
fn initial_step<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    span: f64,
    ctl: &StepControl,
    work: &mut Work,
) -> f64 {
    let scale: Vec<f64> = y0.iter().map(|y| ctl.abs_tol + ctl.rel_tol * y.abs()).collect();
    let d0 = rms_norm(y0, &scale);
    let d1 = rms_norm(f0, &scale);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(ctl.max_step).min(span);
    for (i, t) in work.tmp.iter_mut().enumerate() {
        *t = y0[i] + h0 * f0[i];
    }
    let mut f1 = vec![0.0; y0.len()];
    sys.rhs(t0 + h0, &work.tmp, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms_norm(&diff, &scale) / h0;
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 {
        (1e-6f64).max(h0 * 1e-3)
    } else {
        (0.01 / m).powf(0.2)
    };
    (100.0 * h0).min(h1).min(ctl.max_step).min(span)
}

/// Integrate `sys` from `t0` to `t_end`, calling `on_sample(t, y)` at each
/// entry of `samples` (ascending, inside `[t0, t_end]`) using the dense
/// output of the step that covers it.
pub fn integrate<S, F>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    samples: &[f64],
    ctl: &StepControl,
    mut on_sample: F,
) -> Result<Stats>
where
    S: OdeSystem,
    F: FnMut(f64, &[f64]),
{
    let n = sys.dim();
    assert_eq!(y0.len(), n, "state length does not match system dimension");
    assert!(t_end > t0, "integration interval must be forward in time");

    let mut stats = Stats::default();
    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] <= t0 {
        on_sample(samples[next_sample], y0);
        next_sample += 1;
    }

    let mut w = Work::new(n);
    let mut y = y0.to_vec();
    let mut t = t0;
    sys.rhs(t, &y, &mut w.k[0]);
    stats.rhs_evals += 1;

    let span = t_end - t0;
    let mut h = initial_step(sys, t, &y, &w.k[0].clone(), span, ctl, &mut w);
    stats.rhs_evals += 1;
    if let Some(cap) = ctl.initial_step {
        h = h.min(cap);
    }
    let expo = 0.2 - BETA * 0.75;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut interp = vec![0.0; n];

    loop {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let min_step = 1e-14 * t.abs().max(1.0);
        if h < min_step {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let last = t + h >= t_end - 1e-12 * span;
        if last {
            h = t_end - t;
        }

        {
            let Work { k, tmp, y_new, .. } = &mut w;
            let [k1, k2, k3, k4, k5, k6, k7] = k;
            for i in 0..n {
                tmp[i] = y[i] + h * A21 * k1[i];
            }
            sys.rhs(t + C2 * h, tmp, k2);
            for i in 0..n {
                tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            sys.rhs(t + C3 * h, tmp, k3);
            for i in 0..n {
                tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            sys.rhs(t + C4 * h, tmp, k4);
            for i in 0..n {
                tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            sys.rhs(t + C5 * h, tmp, k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            sys.rhs(t + h, tmp, k6);
            for i in 0..n {
                y_new[i] = y[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            sys.rhs(t + h, y_new, k7);
        }
        stats.rhs_evals += 6;

        let err = {
            let k = &w.k;
            let mut acc = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i]
                        + E6 * k[5][i]
                        + E7 * k[6][i]);
                let sk = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(w.y_new[i].abs());
                acc += (e / sk).powi(2);
            }
            (acc / n as f64).sqrt()
        };

        let fac11 = err.powf(expo);
        if err <= 1.0 {
            let fac = fac11 / fac_old.powf(BETA) / SAFETY;
            let fac = fac.clamp(1.0 / ctl.max_growth, 1.0 / MIN_SHRINK);
            let mut h_new = (h / fac).min(ctl.max_step);
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = err.max(1e-4);
            stats.accepted += 1;
            let t_new = if last { t_end } else { t + h };

            if next_sample < samples.len() && samples[next_sample] <= t_new {
                let Work { k, y_new, cont, .. } = &mut w;
                for i in 0..n {
                    let dy = y_new[i] - y[i];
                    let bspl = h * k[0][i] - dy;
                    cont[0][i] = y[i];
                    cont[1][i] = dy;
                    cont[2][i] = bspl;
                    cont[3][i] = dy - h * k[6][i] - bspl;
                    cont[4][i] = h
                        * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i]
                            + D6 * k[5][i]
                            + D7 * k[6][i]);
                }
                while next_sample < samples.len() && samples[next_sample] <= t_new {
                    let ts = samples[next_sample];
                    if ts == t_new {
                        on_sample(ts, y_new);
                    } else {
                        let s = (ts - t) / h;
                        let s1 = 1.0 - s;
                        for (i, v) in interp.iter_mut().enumerate() {
                            *v = cont[0][i]
                                + s * (cont[1][i]
                                    + s1 * (cont[2][i] + s * (cont[3][i] + s1 * cont[4][i])));
                        }
                        on_sample(ts, &interp);
                    }
                    next_sample += 1;
                }
            }

            y.copy_from_slice(&w.y_new);
            let (head, tail) = w.k.split_at_mut(6);
            head[0].copy_from_slice(&tail[0]);
            t = t_new;
            if last {
                return Ok(stats);
            }
            h = h_new;
            last_rejected = false;
        } else {
            h /= (fac11 / SAFETY).min(1.0 / MIN_SHRINK);
            stats.rejected += 1;
            last_rejected = true;
        }
    }
}
