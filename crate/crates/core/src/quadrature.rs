//! Adaptive Simpson quadrature.

use crate::{Error, Result};

const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 16;

struct Acc {
    residual: f64,
    exhausted: bool,
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Acc,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 || !delta.is_finite() {
        acc.residual += delta.abs() / 15.0;
        acc.exhausted = true;
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc)
}

/// `∫ₐᵇ f` to absolute tolerance `abs_tol`.
///
/// Fails with [`Error::QuadratureNonConvergence`] when the recursion limit is
/// hit and the accumulated residual exceeds `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut acc = Acc {
        residual: 0.0,
        exhausted: false,
    };
    let h = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = abs_tol / INITIAL_PANELS as f64;
    let mut total = 0.0;
    let mut fa = f(a);
    for k in 0..INITIAL_PANELS {
        let lo = a + h * k as f64;
        let hi = if k + 1 == INITIAL_PANELS { b } else { lo + h };
        let fm = f(0.5 * (lo + hi));
        let fb = f(hi);
        let whole = simpson(fa, fm, fb, hi - lo);
        total += refine(&f, lo, hi, fa, fm, fb, whole, panel_tol, MAX_DEPTH, &mut acc);
        fa = fb;
    }
    if !total.is_finite() || (acc.exhausted && acc.residual > abs_tol) {
        return Err(Error::QuadratureNonConvergence {
            residual: if total.is_finite() { acc.residual } else { f64::INFINITY },
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, 1e-12).unwrap();
        assert!((v - (9.0 - 1.5 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn sech_squared() {
        let v = integrate(|x: f64| 1.0 / x.cosh().powi(2), -10.0, 10.0, 1e-10).unwrap();
        assert!((v - 2.0 * 10f64.tanh()).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-10).unwrap(), 0.0);
        let v = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn singular_integrand_reports_residual() {
        let err = integrate(|x: f64| 1.0 / x.abs(), -1.0, 1.0, 1e-12);
        assert!(matches!(err, Err(Error::QuadratureNonConvergence { .. })));
    }
}
