//! Curved-guide analysis via the conformal equivalent-profile method: a
//! bend of radius R maps onto a straight guide whose permittivity is
//! scaled by (1 + c/R)², where c is the transverse coordinate lying in the
//! bend plane. The dominant penalty of an abrupt 90° bend is modal
//! mismatch at its two junctions; the curved run itself adds (or removes)
//! dielectric attenuation through the scaled profile's own loss integral.

use std::f64::consts::FRAC_PI_2;

use crate::channel::dielectric_attenuation;
use crate::constants::DB_PER_NEPER;
use crate::error::{Error, Result};
use crate::fdfd::{mode_overlap, solve_modes, solve_modes_opt, ModeSolution, SolverOptions};
use crate::geometry::CrossSection;
use crate::grid::{build_grid, Grid2D};

/// Straight modes solved for the conversion breakdown.
pub const DEFAULT_STRAIGHT_MODES: usize = 6;

/// Bent-profile modes searched when tracking the deformed fundamental.
/// Curvature reorders the spectrum (steeply bent profiles put gallery-type
/// modes on top), so the tracked mode is found by field overlap, not rank.
pub const DEFAULT_BEND_MODES: usize = 12;

/// Which transverse dimension lies in the bend plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BendPlane {
    /// Curvature along the wide (a) dimension.
    InPlaneOfA,
    /// Curvature along the narrow (b) dimension — the default: routing
    /// bends this way costs far less mismatch loss.
    #[default]
    InPlaneOfB,
}

/// A circular bend of the guide axis.
#[derive(Debug, Clone, Copy)]
pub struct BendSpec {
    /// Centerline bend radius, m.
    pub radius: f64,
    pub plane: BendPlane,
}

impl BendSpec {
    pub fn new(radius: f64, plane: BendPlane) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "bend radius must be > 0, got {radius}"
            )));
        }
        Ok(Self { radius, plane })
    }
}

/// True when the centerline radius is at most half the in-plane guide
/// dimension: the inner wall would sit on or behind the center of
/// curvature. Results are still computed, but flagged.
pub fn is_self_intersecting(cs: &CrossSection, spec: &BendSpec) -> bool {
    let in_plane = match spec.plane {
        BendPlane::InPlaneOfA => cs.a,
        BendPlane::InPlaneOfB => cs.b,
    };
    spec.radius <= in_plane / 2.0
}

/// The conformal equivalent of `grid` seen by a mode riding the bend:
/// every cell's complex permittivity scaled by (1 + c/R)² with c its
/// center coordinate along the bend plane. Geometry and region flags are
/// untouched.
pub fn bent_grid(grid: &Grid2D, spec: &BendSpec) -> Grid2D {
    let mut g = grid.clone();
    match spec.plane {
        BendPlane::InPlaneOfA => {
            for i in 0..g.nx {
                let t = 1.0 + grid.xc(i) / spec.radius;
                let fac = t * t;
                for j in 0..g.ny {
                    let k = i * g.ny + j;
                    g.eps[k] *= fac;
                }
            }
        }
        BendPlane::InPlaneOfB => {
            for j in 0..g.ny {
                let t = 1.0 + grid.yc(j) / spec.radius;
                let fac = t * t;
                for i in 0..g.nx {
                    let k = i * g.ny + j;
                    g.eps[k] *= fac;
                }
            }
        }
    }
    g
}

/// Everything a 90° bend costs, split by mechanism.
#[derive(Debug, Clone)]
pub struct BendAnalysis {
    /// Hz.
    pub frequency: f64,
    /// m.
    pub radius: f64,
    pub plane: BendPlane,
    /// |⟨straight fundamental | tracked bend mode⟩| (power-normalized).
    pub overlap: f64,
    /// Mismatch loss of the two junctions, dB: 2 × (−10·log₁₀|o|²).
    pub junction_loss_db: f64,
    /// Dielectric-loss difference along the 90° arc, dB:
    /// 8.686·(α_bend − α_straight)·(π/2)·R. Zero for lossless materials.
    pub attenuation_excess_db: f64,
    /// Total 90° bend penalty, dB.
    pub loss_db: f64,
    /// Effective index of the tracked bend mode.
    pub neff_bend: f64,
    /// Rank of the tracked mode in the bent profile's β-sorted spectrum.
    pub tracked_index: usize,
    /// Power fractions |⟨straight mode i | tracked bend mode⟩|²;
    /// entry 0 is the retained fundamental fraction.
    pub conversion: Vec<f64>,
    /// Power missing from `conversion` — radiated or converted past the
    /// solved straight modes.
    pub unaccounted: f64,
    /// See [`is_self_intersecting`].
    pub self_intersecting: bool,
}

/// A straight-guide solution cached so a radius sweep solves the straight
/// problem once.
#[derive(Debug)]
pub struct BendContext {
    cs: CrossSection,
    frequency: f64,
    grid: Grid2D,
    straight: Vec<ModeSolution>,
    n_bend_modes: usize,
}

impl BendContext {
    pub fn new(cs: &CrossSection, f: f64, cells_per_wavelength: u32) -> Result<Self> {
        let grid = build_grid(cs, f, cells_per_wavelength)?;
        let straight = solve_modes(&grid, f, DEFAULT_STRAIGHT_MODES)?;
        if straight.is_empty() {
            return Err(Error::NoGuidedMode { f_ghz: f / 1e9 });
        }
        Ok(Self {
            cs: cs.clone(),
            frequency: f,
            grid,
            straight,
            n_bend_modes: DEFAULT_BEND_MODES,
        })
    }

    pub fn straight_modes(&self) -> &[ModeSolution] {
        &self.straight
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Solve the bent profile and price one 90° bend.
    pub fn analyze(&self, spec: &BendSpec) -> Result<BendAnalysis> {
        BendSpec::new(spec.radius, spec.plane)?;
        let gb = bent_grid(&self.grid, spec);

        // Shift and guidedness window use the *unbent* core/cladding
        // permittivities: the scaled profile exceeds the core value on its
        // outer side, which would otherwise push the search window away
        // from the deformed fundamental.
        let opts = SolverOptions {
            n_modes: self.n_bend_modes,
            eps_shift_ref: Some(self.cs.core.eps_r),
            guided_floor_eps: Some(self.cs.clad.eps_r),
            ..SolverOptions::default()
        };
        let bend_modes = solve_modes_opt(&gb, self.frequency, &opts)?;
        if bend_modes.is_empty() {
            return Err(Error::NoGuidedMode {
                f_ghz: self.frequency / 1e9,
            });
        }

        let s0 = &self.straight[0];
        let mut tracked_index = 0;
        let mut best = -1.0;
        for (i, m) in bend_modes.iter().enumerate() {
            let o = mode_overlap(s0, m)?.abs();
            if o > best {
                best = o;
                tracked_index = i;
            }
        }
        let tracked = &bend_modes[tracked_index];

        let o2 = (best * best).min(1.0);
        let junction_loss_db = 2.0 * (-10.0 * o2.log10());

        let arc = FRAC_PI_2 * spec.radius;
        let alpha_s = dielectric_attenuation(s0, &self.grid)?;
        let alpha_b = dielectric_attenuation(tracked, &gb)?;
        let attenuation_excess_db = DB_PER_NEPER * (alpha_b - alpha_s) * arc;

        let mut conversion = Vec::with_capacity(self.straight.len());
        for s in &self.straight {
            let o = mode_overlap(s, tracked)?;
            conversion.push(o * o);
        }
        let unaccounted = (1.0 - conversion.iter().sum::<f64>()).max(0.0);

        Ok(BendAnalysis {
            frequency: self.frequency,
            radius: spec.radius,
            plane: spec.plane,
            overlap: best,
            junction_loss_db,
            attenuation_excess_db,
            loss_db: junction_loss_db + attenuation_excess_db,
            neff_bend: tracked.neff(),
            tracked_index,
            conversion,
            unaccounted,
            self_intersecting: is_self_intersecting(&self.cs, spec),
        })
    }
}

/// Price a 90° bend at each radius (one straight solve shared).
pub fn bend_sweep(
    cs: &CrossSection,
    f: f64,
    radii: &[f64],
    plane: BendPlane,
    cells_per_wavelength: u32,
) -> Result<Vec<BendAnalysis>> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("empty radius list".into()));
    }
    let ctx = BendContext::new(cs, f, cells_per_wavelength)?;
    radii
        .iter()
        .map(|&r| ctx.analyze(&BendSpec { radius: r, plane }))
        .collect()
}
