use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("white noise correlator is a Dirac delta and has no pointwise value")]
    WhiteNotPointwise,

    #[error("white noise fluctuation measures diverge at t = 0 and cannot be normalized")]
    WhiteNotNormalizable,

    #[error("white noise has unbounded spectral mass and cannot be synthesized")]
    WhiteNotSamplable,

    #[error("quadrature did not converge: estimated error {error:.3e} after {evaluations} evaluations")]
    QuadratureNonConvergence { error: f64, evaluations: usize },

    #[error("displacement {displacement:.3e} m of species `{species}` is not small against r_C/10 = {limit:.3e} m")]
    DisplacementTooLarge {
        species: String,
        displacement: f64,
        limit: f64,
    },

    #[error("no root below the bracket ceiling {ceiling:.3e}: target reaches only {value:.3e}")]
    NoRootInBudget { ceiling: f64, value: f64 },

    #[error("collapse already completes before t_M = {t_m:.3e} s at the smallest admissible cutoff {omega_floor:.3e} 1/s")]
    AlreadyCollapsing { t_m: f64, omega_floor: f64 },

    #[error("even white noise does not collapse before t_M = {t_m:.3e} s (white t_C = {t_c_white:.3e} s)")]
    NeverCollapsing { t_m: f64, t_c_white: f64 },

    #[error("target function is not monotone on the bracket: f({x_prev:.6e}) = {f_prev:.6e} but f({x:.6e}) = {f:.6e}")]
    NotMonotone {
        x_prev: f64,
        f_prev: f64,
        x: f64,
        f: f64,
    },

    #[error("bisection did not reach the tolerance within {iterations} iterations")]
    MaxIterations { iterations: usize },

    #[error("time step too coarse: omega_m * dt = {product:.3e} exceeds 0.1")]
    ResolutionTooCoarse { product: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
