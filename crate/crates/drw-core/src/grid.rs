//! Cross-section discretization: a uniform 2-D cell grid with per-cell
//! complex permittivity and a Yee-style staggering convention.
//!
//! Staggering (cell (i, j) spans [x_i, x_{i+1}] × [y_j, y_{j+1}]):
//! - Ex and Hy sampled at (i+½, j) — x mid-cell, y on the lower node;
//! - Ey and Hx sampled at (i, j+½);
//! - Ez at nodes (i, j); Hz at cell centers (i+½, j+½).
//!
//! Arrays are stored row-major with y fastest: `index = i·ny + j`.

use crate::error::{Error, Result};
use crate::geometry::CrossSection;
use num_complex::Complex64;

/// Default cap on nx·ny before `build_grid` refuses.
pub const DEFAULT_CELL_CAP: usize = 2_000_000;

/// Padding between the core edge and the outer boundary, in cladding decay
/// lengths 1/γ_clad.
pub const PAD_DECAY_LENGTHS: f64 = 5.0;

/// Uniform 2-D grid of permittivity cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    /// Cell sizes, m.
    pub dx: f64,
    pub dy: f64,
    /// Per-cell complex relative permittivity, len nx·ny, y-fastest.
    pub eps: Vec<Complex64>,
    /// Per-cell core-region flag (loss bookkeeping), len nx·ny.
    pub is_core: Vec<bool>,
    /// Coordinate of the low-x domain edge (node 0), m.
    pub x_min: f64,
    /// Coordinate of the low-y domain edge, m.
    pub y_min: f64,
}

impl Grid2D {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Cell-center x coordinate.
    #[inline]
    pub fn xc(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    /// Cell-center y coordinate.
    #[inline]
    pub fn yc(&self, j: usize) -> f64 {
        self.y_min + (j as f64 + 0.5) * self.dy
    }

    /// ∫ Re(ε) dA over the core-flagged cells (rasterization check).
    pub fn eps_integral_over_core(&self) -> f64 {
        let da = self.dx * self.dy;
        self.eps
            .iter()
            .zip(&self.is_core)
            .filter(|(_, &c)| c)
            .map(|(e, _)| e.re * da)
            .sum()
    }

    /// True when both grids share shape and spacing (fields can be combined).
    pub fn compatible(&self, other: &Grid2D) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && (self.dx - other.dx).abs() <= 1e-15 * self.dx.abs()
            && (self.dy - other.dy).abs() <= 1e-15 * self.dy.abs()
    }

    /// Returns the grid with the two axes swapped (a 90° relabeling of the
    /// cross-section). The mode solver uses this to keep the fast storage
    /// axis on the smaller dimension, which minimizes matrix bandwidth.
    pub fn transposed(&self) -> Grid2D {
        let mut eps = Vec::with_capacity(self.cells());
        let mut is_core = Vec::with_capacity(self.cells());
        for j in 0..self.ny {
            for i in 0..self.nx {
                eps.push(self.eps[self.idx(i, j)]);
                is_core.push(self.is_core[self.idx(i, j)]);
            }
        }
        Grid2D {
            nx: self.ny,
            ny: self.nx,
            dx: self.dy,
            dy: self.dx,
            eps,
            is_core,
            x_min: self.y_min,
            y_min: self.x_min,
        }
    }
}

/// Discretize `cs` for frequencies up to `f_max` with at least
/// `cells_per_wavelength` cells per core wavelength (λ_core = c/(f√ε_core)).
///
/// Cell sizes are adjusted downward so the core boundary coincides with cell
/// edges exactly; padding of [`PAD_DECAY_LENGTHS`]/γ_clad of cladding is added
/// on every side. Deterministic: identical inputs give bit-identical grids.
pub fn build_grid(cs: &CrossSection, f_max: f64, cells_per_wavelength: u32) -> Result<Grid2D> {
    build_band_grid_with_cap(cs, f_max, f_max, cells_per_wavelength, DEFAULT_CELL_CAP)
}

/// [`build_grid`] with an explicit cell-count cap.
pub fn build_grid_with_cap(
    cs: &CrossSection,
    f_max: f64,
    cells_per_wavelength: u32,
    cap: usize,
) -> Result<Grid2D> {
    build_band_grid_with_cap(cs, f_max, f_max, cells_per_wavelength, cap)
}

/// Discretization valid across a whole frequency band: cell size resolves
/// the shortest core wavelength (at `f_hi`) while the cladding padding
/// covers the longest decay length (at `f_lo`). Sweeps that difference
/// β(f) — group velocity, dispersion — should solve every frequency on one
/// band grid; rebuilding per frequency leaves cell-quantization steps in
/// the samples.
pub fn build_band_grid(
    cs: &CrossSection,
    f_lo: f64,
    f_hi: f64,
    cells_per_wavelength: u32,
) -> Result<Grid2D> {
    build_band_grid_with_cap(cs, f_lo, f_hi, cells_per_wavelength, DEFAULT_CELL_CAP)
}

/// [`build_band_grid`] with an explicit cell-count cap.
pub fn build_band_grid_with_cap(
    cs: &CrossSection,
    f_lo: f64,
    f_hi: f64,
    cells_per_wavelength: u32,
    cap: usize,
) -> Result<Grid2D> {
    if cells_per_wavelength < 20 {
        return Err(Error::InvalidInput(format!(
            "cells_per_wavelength must be ≥ 20, got {cells_per_wavelength}"
        )));
    }
    if !(f_lo > 0.0) || !(f_hi >= f_lo) {
        return Err(Error::InvalidInput(format!(
            "need 0 < f_lo ≤ f_hi, got f_lo={f_lo}, f_hi={f_hi}"
        )));
    }
    let target = cs.core_wavelength(f_hi) / cells_per_wavelength as f64;
    let ncx = (cs.a / target).ceil() as usize;
    let dx = cs.a / ncx as f64;
    let ncy = (cs.b / target).ceil() as usize;
    let dy = cs.b / ncy as f64;
    let pad = PAD_DECAY_LENGTHS / cs.clad_decay_rate(f_lo);
    let npx = (pad / dx).ceil() as usize;
    let npy = (pad / dy).ceil() as usize;
    let nx = ncx + 2 * npx;
    let ny = ncy + 2 * npy;
    if nx * ny > cap {
        return Err(Error::GridTooLarge {
            cells: nx * ny,
            cap,
        });
    }
    let eps_clad = cs.clad.complex_permittivity(f_hi);
    let eps_core = cs.core.complex_permittivity(f_hi);
    let mut eps = vec![eps_clad; nx * ny];
    let mut is_core = vec![false; nx * ny];
    for i in npx..npx + ncx {
        for j in npy..npy + ncy {
            eps[i * ny + j] = eps_core;
            is_core[i * ny + j] = true;
        }
    }
    Ok(Grid2D {
        nx,
        ny,
        dx,
        dy,
        eps,
        is_core,
        x_min: -(nx as f64) * dx / 2.0,
        y_min: -(ny as f64) * dy / 2.0,
    })
}
