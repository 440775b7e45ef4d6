//! Physical constants (CODATA 2018, exact where the SI defines them).

/// Elementary charge [C].
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant [J/K].
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Nucleon mass reference `m₀` [kg] (atomic mass unit).
pub const NUCLEON_MASS: f64 = 1.660_539_066_60e-27;
