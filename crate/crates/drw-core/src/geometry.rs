//! Waveguide cross-section and frequency-band types.

use crate::constants;
use crate::error::{Error, Result};
use crate::material::Material;

/// Rectangular dielectric rod cross-section: core `a × b` (meters) embedded in
/// an unbounded cladding. `a` is the transverse width along x, `b` the height
/// along y (the nominal geometry has a ≥ b, but stretched variants are legal).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub a: f64,
    pub b: f64,
    pub core: Material,
    pub clad: Material,
}

impl CrossSection {
    pub fn new(a: f64, b: f64, core: Material, clad: Material) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cross-section dimensions must be positive, got a={a}, b={b}"
            )));
        }
        if core.eps_r <= clad.eps_r {
            return Err(Error::InvalidInput(format!(
                "guiding requires core eps_r > clad eps_r, got {} vs {}",
                core.eps_r, clad.eps_r
            )));
        }
        Ok(Self { a, b, core, clad })
    }

    /// Wavelength inside the core at `f`, m.
    pub fn core_wavelength(&self, f: f64) -> f64 {
        constants::C0 / (f * self.core.eps_r.sqrt())
    }

    /// Cladding decay rate γ_clad = k0·√(ε_core − ε_clad), 1/m — the scale
    /// that sets how much padding a discretized domain needs.
    pub fn clad_decay_rate(&self, f: f64) -> f64 {
        constants::k0(f) * (self.core.eps_r - self.clad.eps_r).sqrt()
    }
}

/// Default band of interest, Hz.
pub const DEFAULT_BAND_START: f64 = 80e9;
pub const DEFAULT_BAND_STOP: f64 = 160e9;

/// Strictly increasing list of frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    frequencies: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::InvalidInput("empty frequency grid".into()));
        }
        for (i, &f) in frequencies.iter().enumerate() {
            if !(f > 0.0) || !f.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "frequency #{i} must be positive, got {f}"
                )));
            }
            if i > 0 && f <= frequencies[i - 1] {
                return Err(Error::InvalidInput(format!(
                    "frequencies must be strictly increasing at #{i}: {} then {f}",
                    frequencies[i - 1]
                )));
            }
        }
        Ok(Self { frequencies })
    }

    /// Evenly spaced grid over the default 80–160 GHz band (inclusive).
    pub fn default_band(points: usize) -> Result<Self> {
        Self::linspace(DEFAULT_BAND_START, DEFAULT_BAND_STOP, points)
    }

    /// Evenly spaced inclusive grid.
    pub fn linspace(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points < 1 {
            return Err(Error::InvalidInput("need at least one point".into()));
        }
        if points == 1 {
            return Self::new(vec![start]);
        }
        let step = (stop - start) / (points - 1) as f64;
        Self::new((0..points).map(|i| start + step * i as f64).collect())
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.frequencies.last().unwrap()
    }
}
