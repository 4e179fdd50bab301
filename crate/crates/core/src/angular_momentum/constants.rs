//! CODATA 2018 values used by the coupling-constant evaluation.

/// Reduced Planck constant, J s (exact since the 2019 SI redefinition).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity, F/m (CODATA 2018, relative uncertainty 1.5e-10).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
