//! Physics and numerics for high-permittivity rectangular dielectric rod
//! waveguide (DRW) channels in the mm-wave band: closed-form and full-vector
//! mode solvers, dielectric attenuation, dispersion, bend loss, parallel-guide
//! crosstalk, and taper mode conversion.
//!
//! Layering:
//! - [`constants`], [`material`], [`geometry`], [`grid`]: shared model types.
//! - [`linalg`]: banded LU and the small dense helpers the eigensolver needs.
//! - [`marcatili`]: closed-form approximate mode solver (fast path + oracle).
//! - [`fdfd`]: full-vector finite-difference frequency-domain eigensolver.
//! - [`channel`], [`bend`], [`crosstalk`], [`taper`]: channel characterization
//!   built on the solvers.
//! - [`sparams`]: S-parameter container with passivity/reciprocity checks.

pub mod bend;
pub mod channel;
pub mod constants;
pub mod crosstalk;
pub mod error;
pub mod fdfd;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod marcatili;
pub mod material;
pub mod sparams;
pub mod taper;

pub use error::{Error, Result};
pub use geometry::{CrossSection, FrequencyGrid};
pub use grid::Grid2D;
pub use material::Material;
