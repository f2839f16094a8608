use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The step-size controller could not meet the requested tolerance.
    #[error("step size underflow at t/T = {t:.6} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// The adiabatic-elimination denominator vanished.
    #[error("degenerate elimination denominator at t/T = {t:.6} (|D| = {magnitude:e})")]
    DegenerateDenominator { t: f64, magnitude: f64 },

    #[error("quadrature did not converge (residual estimate {residual:e})")]
    QuadratureNonConvergence { residual: f64 },

    #[error("the Zeno splitting is only defined in the adiabatic basis")]
    BareBasisSplit,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
