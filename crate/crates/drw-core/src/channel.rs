//! Straight-channel propagation: perturbative dielectric attenuation,
//! parametric loss tables, group-velocity dispersion, and the end-to-end
//! complex transfer of a uniform run of waveguide.

use num_complex::Complex64;

use crate::constants::{omega, C0, DB_PER_NEPER, EPS0};
use crate::error::{Error, Result};
use crate::fdfd::{solve_modes, ModeSolution};
use crate::geometry::{CrossSection, FrequencyGrid};
use crate::grid::{build_band_grid, build_grid, Grid2D};

/// Region-split weighted field integrals behind the perturbative loss
/// formula. `core` and `clad` hold Σ Re(ε)·|E|²·ΔA over the cells of each
/// region (so attenuation is strictly linear in the loss tangents applied
/// to them); `own_imag` holds Σ (−Im ε)·|E|²·ΔA — the loss profile already
/// baked into the grid, whatever its spatial shape. `power` is the axial
/// Poynting flux of the mode (≈ 1 after normalization).
#[derive(Debug, Clone, Copy)]
pub struct LossIntegrals {
    pub core: f64,
    pub clad: f64,
    pub own_imag: f64,
    pub power: f64,
    /// Frequency the mode was solved at, Hz.
    pub frequency: f64,
}

impl LossIntegrals {
    /// Amplitude attenuation (Np/m) when the core and cladding regions are
    /// given the stated loss tangents. Exactly linear in both arguments.
    pub fn attenuation(&self, tan_core: f64, tan_clad: f64) -> f64 {
        (omega(self.frequency) * EPS0 / 2.0) * (tan_core * self.core + tan_clad * self.clad)
            / (2.0 * self.power)
    }

    /// Amplitude attenuation (Np/m) from the grid's own complex
    /// permittivity. This is the route that handles arbitrary loss
    /// profiles — e.g. conformally scaled equivalents of curved guides —
    /// where Im ε varies cell by cell.
    pub fn own_attenuation(&self) -> f64 {
        (omega(self.frequency) * EPS0 / 2.0) * self.own_imag / (2.0 * self.power)
    }
}

fn same_spacing(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Compute the loss integrals of `mode` over `grid`.
///
/// Every staggered field sample is assigned to its containing cell, so the
/// three E components at cell (i, j) share that cell's permittivity and
/// region flag, and |E|² = ex² + ey² + ez² includes the axial part.
pub fn perturbation_integrals(mode: &ModeSolution, grid: &Grid2D) -> Result<LossIntegrals> {
    if mode.nx != grid.nx
        || mode.ny != grid.ny
        || !same_spacing(mode.dx, grid.dx)
        || !same_spacing(mode.dy, grid.dy)
    {
        return Err(Error::IncompatibleGrids);
    }
    let da = grid.dx * grid.dy;
    let mut core = 0.0;
    let mut clad = 0.0;
    let mut own = 0.0;
    for k in 0..grid.cells() {
        let e2 = mode.ex[k] * mode.ex[k] + mode.ey[k] * mode.ey[k] + mode.ez[k] * mode.ez[k];
        let w = e2 * da;
        if grid.is_core[k] {
            core += grid.eps[k].re * w;
        } else {
            clad += grid.eps[k].re * w;
        }
        own -= grid.eps[k].im * w;
    }
    Ok(LossIntegrals {
        core,
        clad,
        own_imag: own,
        power: mode.power(),
        frequency: mode.frequency,
    })
}

/// Amplitude attenuation (Np/m) of `mode` due to the dielectric loss
/// already present in `grid`'s complex permittivity.
pub fn dielectric_attenuation(mode: &ModeSolution, grid: &Grid2D) -> Result<f64> {
    Ok(perturbation_integrals(mode, grid)?.own_attenuation())
}

/// Amplitude attenuation (Np/m) of a plane wave in a uniform lossy
/// dielectric: πf√ε·tanδ/c. The bulk reference scale for judging
/// guided-mode loss (strongly confined slow modes may exceed it).
pub fn plane_wave_attenuation(f: f64, eps_r: f64, tan_delta: f64) -> f64 {
    std::f64::consts::PI * f * eps_r.sqrt() * tan_delta / C0
}

/// Fundamental-mode attenuation tabulated over frequency × core loss
/// tangent. One eigensolve per frequency; every loss-tangent column is then
/// exact linear scaling of that solve's integrals.
#[derive(Debug, Clone)]
pub struct LossTable {
    /// Hz, strictly increasing.
    pub frequencies: Vec<f64>,
    /// Core loss tangents swept (the cladding keeps its material value).
    pub tan_deltas: Vec<f64>,
    /// `alpha[fi][ti]`: amplitude attenuation, Np/m.
    pub alpha: Vec<Vec<f64>>,
    /// Effective index of the fundamental at each frequency.
    pub neff: Vec<f64>,
}

impl LossTable {
    /// Attenuation expressed in dB/mm (power decibels per millimeter).
    pub fn db_per_mm(&self, fi: usize, ti: usize) -> f64 {
        self.alpha[fi][ti] * DB_PER_NEPER / 1000.0
    }

    /// Insertion loss in dB of a straight run of `length` meters.
    pub fn insertion_loss_db(&self, fi: usize, ti: usize, length: f64) -> f64 {
        self.alpha[fi][ti] * DB_PER_NEPER * length
    }
}

/// Tabulate fundamental-mode dielectric attenuation over `freqs` ×
/// `tan_deltas`. The listed loss tangents apply to the core; the cladding
/// contributes with its own material loss tangent from `cs`. The grid is
/// rebuilt per frequency so every row is resolved identically relative to
/// its own wavelength.
pub fn loss_table(
    cs: &CrossSection,
    freqs: &FrequencyGrid,
    tan_deltas: &[f64],
    cells_per_wavelength: u32,
) -> Result<LossTable> {
    if tan_deltas.is_empty() {
        return Err(Error::InvalidInput(
            "loss table needs at least one loss tangent".into(),
        ));
    }
    if tan_deltas.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput(
            "loss tangents must be finite and ≥ 0".into(),
        ));
    }
    let mut alpha = Vec::with_capacity(freqs.len());
    let mut neff = Vec::with_capacity(freqs.len());
    for &f in freqs.frequencies() {
        let grid = build_grid(cs, f, cells_per_wavelength)?;
        let modes = solve_modes(&grid, f, 1)?;
        let m0 = modes.first().ok_or(Error::NoGuidedMode { f_ghz: f / 1e9 })?;
        let li = perturbation_integrals(m0, &grid)?;
        alpha.push(
            tan_deltas
                .iter()
                .map(|&td| li.attenuation(td, cs.clad.tan_delta))
                .collect(),
        );
        neff.push(m0.neff());
    }
    Ok(LossTable {
        frequencies: freqs.frequencies().to_vec(),
        tan_deltas: tan_deltas.to_vec(),
        alpha,
        neff,
    })
}

/// Minimum number of frequency samples a dispersion profile accepts.
pub const MIN_DISPERSION_POINTS: usize = 5;

/// One row of a dispersion profile. `endpoint` marks rows whose
/// derivatives came from one-sided stencils (first/last sample — one order
/// lower accuracy than the interior).
#[derive(Debug, Clone, Copy)]
pub struct DispersionPoint {
    /// Hz.
    pub frequency: f64,
    /// Phase constant, rad/m.
    pub beta: f64,
    /// Effective index βc/ω.
    pub neff: f64,
    /// Group velocity dω/dβ, m/s.
    pub vg: f64,
    /// Group index c/vg.
    pub group_index: f64,
    /// Group-velocity dispersion d²β/dω², s²/m (multiply by 1e24 for ps²/m).
    pub beta2: f64,
    pub endpoint: bool,
}

/// First and second derivative at `at` of the quadratic through
/// (x[0..3], y[0..3]).
fn quadratic_derivatives(x: &[f64], y: &[f64], at: f64) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let dd = (d12 - d01) / (x[2] - x[0]);
    (d01 + dd * (2.0 * at - x[0] - x[1]), 2.0 * dd)
}

/// Differentiate β(ω) samples into group velocity, group index, and GVD
/// using nonuniform 3-point stencils (central in the interior, one-sided at
/// the ends). `frequencies` must be strictly increasing, positive, and at
/// least [`MIN_DISPERSION_POINTS`] long.
pub fn dispersion_from_beta_samples(
    frequencies: &[f64],
    betas: &[f64],
) -> Result<Vec<DispersionPoint>> {
    let n = frequencies.len();
    if betas.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} frequencies vs {} beta samples",
            n,
            betas.len()
        )));
    }
    if n < MIN_DISPERSION_POINTS {
        return Err(Error::InsufficientGrid {
            points: n,
            needed: MIN_DISPERSION_POINTS,
        });
    }
    if !(frequencies[0] > 0.0) {
        return Err(Error::InvalidInput(
            "frequencies must be positive".into(),
        ));
    }
    if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "frequencies must be strictly increasing".into(),
        ));
    }
    if betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput("beta samples must be finite".into()));
    }

    let om: Vec<f64> = frequencies.iter().map(|&f| omega(f)).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, endpoint) = if i == 0 {
            (0, true)
        } else if i == n - 1 {
            (n - 3, true)
        } else {
            (i - 1, false)
        };
        let (d1, d2) = quadratic_derivatives(&om[lo..lo + 3], &betas[lo..lo + 3], om[i]);
        out.push(DispersionPoint {
            frequency: frequencies[i],
            beta: betas[i],
            neff: betas[i] * C0 / om[i],
            vg: 1.0 / d1,
            group_index: C0 * d1,
            beta2: d2,
            endpoint,
        });
    }
    Ok(out)
}

/// Solve the fundamental across `freqs` and differentiate the resulting
/// β(ω). All frequencies are solved on one shared band grid so the samples
/// are free of cell-quantization steps.
pub fn dispersion_profile(
    cs: &CrossSection,
    freqs: &FrequencyGrid,
    cells_per_wavelength: u32,
) -> Result<Vec<DispersionPoint>> {
    let fs = freqs.frequencies();
    if fs.len() < MIN_DISPERSION_POINTS {
        return Err(Error::InsufficientGrid {
            points: fs.len(),
            needed: MIN_DISPERSION_POINTS,
        });
    }
    let grid = build_band_grid(cs, fs[0], fs[fs.len() - 1], cells_per_wavelength)?;
    let mut betas = Vec::with_capacity(fs.len());
    for &f in fs {
        let modes = solve_modes(&grid, f, 1)?;
        let m0 = modes.first().ok_or(Error::NoGuidedMode { f_ghz: f / 1e9 })?;
        betas.push(m0.beta);
    }
    dispersion_from_beta_samples(fs, &betas)
}

/// Complex fundamental-mode transfer of a straight channel of fixed length.
#[derive(Debug, Clone)]
pub struct ChannelResponse {
    /// Hz.
    pub frequencies: Vec<f64>,
    /// Physical length, m.
    pub length: f64,
    /// Through transfer exp(−(α + jβ)L) at each frequency.
    pub s21: Vec<Complex64>,
    /// Amplitude attenuation at each frequency, Np/m.
    pub alpha: Vec<f64>,
    /// Phase constant at each frequency, rad/m.
    pub beta: Vec<f64>,
}

impl ChannelResponse {
    /// Insertion loss −20·log₁₀|S21| at frequency index `fi`, dB.
    pub fn insertion_loss_db(&self, fi: usize) -> f64 {
        -20.0 * self.s21[fi].norm().log10()
    }
}

/// End-to-end transfer of a straight run of `length` meters: one shared
/// band grid, one eigensolve per frequency; attenuation comes from the
/// cross-section's own material loss tangents.
pub fn straight_channel(
    cs: &CrossSection,
    freqs: &FrequencyGrid,
    length: f64,
    cells_per_wavelength: u32,
) -> Result<ChannelResponse> {
    if !length.is_finite() || length < 0.0 {
        return Err(Error::InvalidInput(format!(
            "channel length must be ≥ 0, got {length}"
        )));
    }
    let fs = freqs.frequencies();
    if fs.is_empty() {
        return Err(Error::InvalidInput("empty frequency grid".into()));
    }
    let grid = build_band_grid(cs, fs[0], fs[fs.len() - 1], cells_per_wavelength)?;
    let mut s21 = Vec::with_capacity(fs.len());
    let mut alpha = Vec::with_capacity(fs.len());
    let mut beta = Vec::with_capacity(fs.len());
    for &f in fs {
        let modes = solve_modes(&grid, f, 1)?;
        let m0 = modes.first().ok_or(Error::NoGuidedMode { f_ghz: f / 1e9 })?;
        let al = dielectric_attenuation(m0, &grid)?;
        s21.push(Complex64::from_polar(
            (-al * length).exp(),
            -m0.beta * length,
        ));
        alpha.push(al);
        beta.push(m0.beta);
    }
    Ok(ChannelResponse {
        frequencies: fs.to_vec(),
        length,
        s21,
        alpha,
        beta,
    })
}
