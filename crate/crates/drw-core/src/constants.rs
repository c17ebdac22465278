//! Physical constants (SI units throughout the crate: meters, Hz, radians).

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_8128e-12;

/// Vacuum permeability, H/m (derived so that c² = 1/(μ0·ε0) holds exactly).
pub const MU0: f64 = 1.0 / (EPS0 * C0 * C0);

/// Free-space wave impedance, Ω.
pub const ETA0: f64 = 376.730_313_668;

/// Conversion from an amplitude (field) rate in nepers to decibels: 20/ln 10.
pub const DB_PER_NEPER: f64 = 8.685_889_638_065_035;

/// Angular frequency for a frequency in Hz.
#[inline]
pub fn omega(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}

/// Free-space wavenumber k0 = ω/c, rad/m.
#[inline]
pub fn k0(f: f64) -> f64 {
    omega(f) / C0
}
