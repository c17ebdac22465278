//! Dielectric materials and the named preset catalog.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Largest loss tangent the lossy-dielectric model accepts.
pub const MAX_TAN_DELTA: f64 = 0.1;

/// Permittivity-vs-frequency model. Only the constant model ships; the enum
/// is the extension point for dispersive fits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DispersionModel {
    #[default]
    Constant,
}

/// An isotropic, non-magnetic dielectric.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Relative permittivity (dimensionless), ≥ 1.
    pub eps_r: f64,
    /// Loss tangent (dimensionless), in [0, 0.1].
    pub tan_delta: f64,
    pub model: DispersionModel,
}

impl Material {
    pub fn new(name: &str, eps_r: f64, tan_delta: f64) -> Result<Self> {
        if !eps_r.is_finite() || eps_r < 1.0 {
            return Err(Error::InvalidInput(format!(
                "material '{name}': eps_r must be ≥ 1, got {eps_r}"
            )));
        }
        if !tan_delta.is_finite() || tan_delta < 0.0 {
            return Err(Error::InvalidInput(format!(
                "material '{name}': tan_delta must be ≥ 0, got {tan_delta}"
            )));
        }
        if tan_delta > MAX_TAN_DELTA {
            return Err(Error::InvalidInput(format!(
                "material '{name}': tan_delta {tan_delta} exceeds model range (> {MAX_TAN_DELTA})"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            eps_r,
            tan_delta,
            model: DispersionModel::Constant,
        })
    }

    /// Complex relative permittivity ε_r·(1 − j·tanδ) at frequency `f` (Hz).
    /// The constant model ignores `f` (material dispersion is out of scope).
    pub fn complex_permittivity(&self, f: f64) -> Complex64 {
        let _ = f;
        match self.model {
            DispersionModel::Constant => Complex64::new(self.eps_r, -self.eps_r * self.tan_delta),
        }
    }
}

/// Named material presets. User configs may add entries on top.
pub fn material_catalog() -> Vec<Material> {
    vec![
        Material::new("paper-core-lossless", 1000.0, 0.0).unwrap(),
        Material::new("paper-core-realistic", 1000.0, 0.0005).unwrap(),
        Material::new("paper-core-worst", 1000.0, 0.002).unwrap(),
        Material::new("paper-clad", 12.0, 0.0).unwrap(),
    ]
}

/// Look up a preset by name.
pub fn catalog_lookup(name: &str) -> Result<Material> {
    material_catalog()
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| Error::NotFound(name.to_string()))
}
