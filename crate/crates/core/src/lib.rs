//! Collapse rates for colored (non-white) CSL noise and the lower bounds on
//! the noise frequency cutoff `ω_M` that follow from requiring a measurement
//! to finish collapsing within its measurement time.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`] and [`quadrature`]: sine integral, error function and an
//!   adaptive Gauss–Kronrod integrator.
//! * [`spectral`]: cutoff kernels `γ(ω)`, time correlators `δ_γ(τ)` and the
//!   accumulated collapse factor `Λ(t)`.
//! * [`collapse`]: the decay exponent `Γ(t)` for point-like, current-driven
//!   and spherical mass displacements.
//! * [`scenarios`]: the minimal detector/amplifier/recorder setup and the
//!   copper-wire heating chain.
//! * [`fluctuations`]: the device-independent measures `I(t)` and `J(t)`.
//! * [`bounds`]: root finders turning all of the above into collapse times
//!   and cutoff bounds.
//! * [`noise_mc`]: a Monte-Carlo noise sampler used as an independent oracle.
//! * [`reference`]: every quoted number of the analysis recomputed in one table.
//!
//! All quantities are SI (s, m, kg, A, K).

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod collapse;
pub mod constants;
pub mod error;
pub mod fluctuations;
pub mod noise_mc;
pub mod quadrature;
pub mod reference;
pub mod scenarios;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{CutoffKind, CutoffSpec};
