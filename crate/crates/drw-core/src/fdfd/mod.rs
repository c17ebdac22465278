//! Full-vector finite-difference frequency-domain (FDFD) mode solver.
//!
//! Solves the transverse-E eigenproblem `A e = β² e` on a staggered grid with
//! a perfectly conducting outer box (see [`operators`] for layout). Fields use
//! a real-valued substitution: the stored arrays are real, with physical
//! components `Ex = ex`, `Ey = ey`, `Ez = -j·ez`, `H = (hx, hy, j·hz) / η0`.
//! This keeps the eigenproblem real while representing the physical 90°
//! phase of the axial components.
//!
//! Modes are normalized to unit axial power `(1/2)∫ Re(E×H*)·ẑ dA = 1 W` and
//! carry a deterministic sign convention, so repeated solves are
//! bit-identical.

pub mod eigen;
pub mod operators;

use crate::constants::ETA0;
use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// How the solver labels a computed mode.
///
/// The labels follow standard guided-wave usage: `Lse`/`Lsm` for modes whose
/// electric (respectively magnetic) field is polarized along a single
/// transverse axis, `Te`/`Tm`/`Tem` when an axial component is negligible,
/// and `Hem` for fully hybrid modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeClass {
    Lse,
    Lsm,
    Hem,
    Te,
    Tm,
    Tem,
}

impl std::fmt::Display for ModeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModeClass::Lse => "LSE",
            ModeClass::Lsm => "LSM",
            ModeClass::Hem => "HEM",
            ModeClass::Te => "TE",
            ModeClass::Tm => "TM",
            ModeClass::Tem => "TEM",
        };
        write!(f, "{s}")
    }
}

/// Options for [`solve_modes_opt`].
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Maximum number of guided modes to return.
    pub n_modes: usize,
    /// Seed for the deterministic starting vector.
    pub seed: u64,
    /// Relative permittivity defining the shift `σ = 0.99·k0²·eps_shift_ref`.
    /// Defaults to the maximum Re(ε) over core cells.
    pub eps_shift_ref: Option<f64>,
    /// Modes must satisfy `β² > k0²·guided_floor_eps·(1 + 1e-6)`.
    /// Defaults to the minimum Re(ε) over non-core cells.
    pub guided_floor_eps: Option<f64>,
    /// Override for the Krylov subspace dimension.
    pub subspace: Option<usize>,
    /// Suppression threshold θ used by the mode classifier.
    pub class_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            n_modes: 6,
            seed: eigen::DEFAULT_SEED,
            eps_shift_ref: None,
            guided_floor_eps: None,
            subspace: None,
            class_threshold: 0.02,
        }
    }
}

/// A guided mode: phase constant plus the six field components on the grid.
///
/// Field arrays are cell-indexed (`i * ny + j`) in the real-substitution
/// convention described at the module level, normalized to unit axial power.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub frequency: f64,
    pub k0: f64,
    /// Axial phase constant (rad/m).
    pub beta: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    /// Axial E: physical `Ez = -j·ez`.
    pub ez: Vec<f64>,
    pub hx: Vec<f64>,
    pub hy: Vec<f64>,
    /// Axial H: physical `Hz = j·hz/η0`.
    pub hz: Vec<f64>,
    /// Fraction of transverse E energy in the x component.
    pub rho_x: f64,
    /// Fraction of transverse H energy in the x component.
    pub sigma_x: f64,
    pub class: ModeClass,
    /// Eigenpair residual achieved by the solver.
    pub residual: f64,
}

impl ModeSolution {
    /// Effective index `β/k0`.
    pub fn neff(&self) -> f64 {
        self.beta / self.k0
    }

    /// Number of grid cells.
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Axial power `(1/2)∫(ex·hy - ey·hx) dA / η0`; 1 after normalization.
    pub fn power(&self) -> f64 {
        let mut s = 0.0;
        for k in 0..self.cells() {
            s += self.ex[k] * self.hy[k] - self.ey[k] * self.hx[k];
        }
        0.5 * s * self.dx * self.dy / ETA0
    }
}

/// Solves up to `n_modes` guided modes with default options.
pub fn solve_modes(grid: &Grid2D, f: f64, n_modes: usize) -> Result<Vec<ModeSolution>> {
    let opts = SolverOptions {
        n_modes,
        ..SolverOptions::default()
    };
    solve_modes_opt(grid, f, &opts)
}

/// Solves guided modes, sorted by descending phase constant.
///
/// Returns fewer than `n_modes` entries (possibly none) when the structure
/// supports fewer guided modes at this frequency.
pub fn solve_modes_opt(grid: &Grid2D, f: f64, opts: &SolverOptions) -> Result<Vec<ModeSolution>> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::InvalidInput(format!("invalid frequency {f}")));
    }

    // Keep the fast storage axis on the smaller dimension: solve the
    // axis-swapped problem when needed and map the fields back. The swap is
    // a reflection, an exact symmetry of the waveguide problem.
    let swapped = grid.ny > grid.nx;
    let solver_grid;
    let gs = if swapped {
        solver_grid = grid.transposed();
        &solver_grid
    } else {
        grid
    };

    let raw = solve_canonical(gs, f, opts)?;
    let k0 = crate::constants::k0(f);

    let mut out: Vec<ModeSolution> = raw
        .into_iter()
        .map(|m| {
            let m = if swapped { swap_axes(m, grid) } else { m };
            finalize(m, grid, f, k0, opts.class_threshold)
        })
        .collect();

    // Descending β; ties (degenerate pairs) broken by x-polarized first.
    out.sort_by(|m1, m2| {
        let near = (m1.beta - m2.beta).abs() <= 1e-9 * m1.beta.abs().max(m2.beta.abs());
        if near {
            m2.rho_x.partial_cmp(&m1.rho_x).unwrap()
        } else {
            m2.beta.partial_cmp(&m1.beta).unwrap()
        }
    });
    Ok(out)
}

/// Cross-power overlap of two unit-power modes on the same grid:
/// `(1/4)∫(e1×h2* + e2*×h1)·ẑ dA`. Equals 1 for identical modes and 0 for
/// distinct nondegenerate ones (exactly, thanks to the co-located pairing).
pub fn mode_overlap(m1: &ModeSolution, m2: &ModeSolution) -> Result<f64> {
    if m1.nx != m2.nx
        || m1.ny != m2.ny
        || (m1.dx - m2.dx).abs() > 1e-15 * m1.dx
        || (m1.dy - m2.dy).abs() > 1e-15 * m1.dy
    {
        return Err(Error::IncompatibleGrids);
    }
    let mut s = 0.0;
    for k in 0..m1.cells() {
        s += m1.ex[k] * m2.hy[k] - m1.ey[k] * m2.hx[k] + m2.ex[k] * m1.hy[k]
            - m2.ey[k] * m1.hx[k];
    }
    Ok(0.25 * s * m1.dx * m1.dy / ETA0)
}

/// A solved mode before classification, in solver-frame coordinates.
struct RawMode {
    beta: f64,
    residual: f64,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    ex: Vec<f64>,
    ey: Vec<f64>,
    ez: Vec<f64>,
    hx: Vec<f64>,
    hy: Vec<f64>,
    hz: Vec<f64>,
}

fn solve_canonical(grid: &Grid2D, f: f64, opts: &SolverOptions) -> Result<Vec<RawMode>> {
    let asm = operators::assemble(grid, f);
    let k0 = asm.k0;
    let n = grid.cells();

    let eps_ref = opts.eps_shift_ref.unwrap_or_else(|| {
        let core_max = grid
            .eps
            .iter()
            .zip(&grid.is_core)
            .filter(|(_, &c)| c)
            .map(|(e, _)| e.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if core_max.is_finite() {
            core_max
        } else {
            grid.eps.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
        }
    });
    let floor_eps = opts.guided_floor_eps.unwrap_or_else(|| {
        let clad_min = grid
            .eps
            .iter()
            .zip(&grid.is_core)
            .filter(|(_, &c)| !c)
            .map(|(e, _)| e.re)
            .fold(f64::INFINITY, f64::min);
        if clad_min.is_finite() {
            clad_min
        } else {
            grid.eps.iter().map(|e| e.re).fold(f64::INFINITY, f64::min)
        }
    });

    let sigma = 0.99 * eps_ref * k0 * k0;
    let window_min = floor_eps * k0 * k0 * (1.0 + 1e-6);

    let pairs = eigen::shift_invert_real(
        &asm.a,
        sigma,
        window_min,
        opts.n_modes + 4,
        k0 * k0,
        opts.seed,
        opts.subspace,
    )?;

    let mut modes = Vec::new();
    for pair in pairs.iter().take(opts.n_modes) {
        let beta = pair.value.sqrt();

        // De-interleave e; h = Q e / β.
        let mut hfull = vec![0.0; 2 * n];
        asm.q.matvec(&pair.vector, &mut hfull);
        let mut ex = vec![0.0; n];
        let mut ey = vec![0.0; n];
        let mut hx = vec![0.0; n];
        let mut hy = vec![0.0; n];
        let inv_beta = 1.0 / beta;
        for c in 0..n {
            ex[c] = pair.vector[2 * c];
            ey[c] = pair.vector[2 * c + 1];
            hx[c] = hfull[2 * c] * inv_beta;
            hy[c] = hfull[2 * c + 1] * inv_beta;
        }

        // Normalize to +1 W axial power.
        let mut p = 0.0;
        for k in 0..n {
            p += ex[k] * hy[k] - ey[k] * hx[k];
        }
        p *= 0.5 * grid.dx * grid.dy / ETA0;
        if p < 0.0 {
            // Backward-normalized eigenvector: flip H.
            for k in 0..n {
                hx[k] = -hx[k];
                hy[k] = -hy[k];
            }
            p = -p;
        }
        let s = 1.0 / p.sqrt();
        for k in 0..n {
            ex[k] *= s;
            ey[k] *= s;
            hx[k] *= s;
            hy[k] *= s;
        }

        let (ez, hz) = reconstruct_axial(grid, k0, &ex, &ey, &hx, &hy);

        modes.push(RawMode {
            beta,
            residual: pair.residual,
            nx: grid.nx,
            ny: grid.ny,
            dx: grid.dx,
            dy: grid.dy,
            ex,
            ey,
            ez,
            hx,
            hy,
            hz,
        });
    }
    Ok(modes)
}

/// Reconstructs the axial components from the transverse ones:
/// `ez = (D̂x hy - D̂y hx)/(k0 ezz)` with backward differences, and
/// `hz = (Dx ey - Dy ex)/k0` with forward differences.
fn reconstruct_axial(
    grid: &Grid2D,
    k0: f64,
    ex: &[f64],
    ey: &[f64],
    hx: &[f64],
    hy: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (grid.nx, grid.ny);
    let samples = operators::sample_eps(grid);
    let mut ez = vec![0.0; nx * ny];
    let mut hz = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            let k = i * ny + j;
            // Backward differences with zero ghosts at the near boundary.
            let dhx = if i >= 1 {
                (hy[k] - hy[k - ny]) / grid.dx
            } else {
                hy[k] / grid.dx
            };
            let dhy = if j >= 1 {
                (hx[k] - hx[k - 1]) / grid.dy
            } else {
                hx[k] / grid.dy
            };
            ez[k] = (dhx - dhy) / (k0 * samples.ezz[k]);

            // Forward differences with zero ghosts at the far boundary.
            let dex = if i + 1 < nx {
                (ey[k + ny] - ey[k]) / grid.dx
            } else {
                -ey[k] / grid.dx
            };
            let dey = if j + 1 < ny {
                (ex[k + 1] - ex[k]) / grid.dy
            } else {
                -ex[k] / grid.dy
            };
            hz[k] = (dex - dey) / k0;
        }
    }
    (ez, hz)
}

/// Maps a mode solved on the axis-swapped grid back to physical axes.
/// E maps as a vector, H as a pseudovector (sign flip), preserving power.
fn swap_axes(m: RawMode, phys: &Grid2D) -> RawMode {
    let (nx, ny) = (phys.nx, phys.ny);
    debug_assert_eq!(m.nx, ny);
    debug_assert_eq!(m.ny, nx);
    let n = nx * ny;
    let mut ex = vec![0.0; n];
    let mut ey = vec![0.0; n];
    let mut ez = vec![0.0; n];
    let mut hx = vec![0.0; n];
    let mut hy = vec![0.0; n];
    let mut hz = vec![0.0; n];
    for i in 0..nx {
        for j in 0..ny {
            let k = i * ny + j;
            let kt = j * nx + i;
            ex[k] = m.ey[kt];
            ey[k] = m.ex[kt];
            ez[k] = m.ez[kt];
            hx[k] = -m.hy[kt];
            hy[k] = -m.hx[kt];
            hz[k] = -m.hz[kt];
        }
    }
    RawMode {
        beta: m.beta,
        residual: m.residual,
        nx,
        ny,
        dx: phys.dx,
        dy: phys.dy,
        ex,
        ey,
        ez,
        hx,
        hy,
        hz,
    }
}

fn finalize(mut m: RawMode, _grid: &Grid2D, f: f64, k0: f64, theta: f64) -> ModeSolution {
    // Deterministic sign: make the dominant transverse E component sum
    // positive (flipping E and H together keeps the mode physical).
    let sum_ex2: f64 = m.ex.iter().map(|v| v * v).sum();
    let sum_ey2: f64 = m.ey.iter().map(|v| v * v).sum();
    let dom_sum: f64 = if sum_ex2 > sum_ey2 {
        m.ex.iter().sum()
    } else {
        m.ey.iter().sum()
    };
    if dom_sum < 0.0 {
        for arr in [&mut m.ex, &mut m.ey, &mut m.ez, &mut m.hx, &mut m.hy, &mut m.hz] {
            for v in arr.iter_mut() {
                *v = -*v;
            }
        }
    }

    let (rho_x, sigma_x, class) = classify_fields(
        &m.ex, &m.ey, &m.ez, &m.hx, &m.hy, &m.hz, theta,
    );

    ModeSolution {
        frequency: f,
        k0,
        beta: m.beta,
        nx: m.nx,
        ny: m.ny,
        dx: m.dx,
        dy: m.dy,
        ex: m.ex,
        ey: m.ey,
        ez: m.ez,
        hx: m.hx,
        hy: m.hy,
        hz: m.hz,
        rho_x,
        sigma_x,
        class,
        residual: m.residual,
    }
}

/// Polarization fractions and classification from the six field arrays.
///
/// `rho_x`/`sigma_x` are the transverse energy fractions in the x component
/// of E/H. A mode is `Lse` when one transverse E component is suppressed
/// below `theta` while the axial H carries weight, `Lsm` for the magnetic
/// mirror image; when both fire, the cleaner suppression wins. Negligible
/// axial components (energy fraction below `theta`) yield `Te`/`Tm`/`Tem`.
pub fn classify_fields(
    ex: &[f64],
    ey: &[f64],
    ez: &[f64],
    hx: &[f64],
    hy: &[f64],
    hz: &[f64],
    theta: f64,
) -> (f64, f64, ModeClass) {
    let e2 = |v: &[f64]| -> f64 { v.iter().map(|x| x * x).sum() };
    let (ex2, ey2, ez2) = (e2(ex), e2(ey), e2(ez));
    let (hx2, hy2, hz2) = (e2(hx), e2(hy), e2(hz));

    let et2 = ex2 + ey2;
    let ht2 = hx2 + hy2;
    let rho_x = if et2 > 0.0 { ex2 / et2 } else { 0.5 };
    let sigma_x = if ht2 > 0.0 { hx2 / ht2 } else { 0.5 };

    let ez_frac = if et2 + ez2 > 0.0 { ez2 / (et2 + ez2) } else { 0.0 };
    let hz_frac = if ht2 + hz2 > 0.0 { hz2 / (ht2 + hz2) } else { 0.0 };

    let class = if ez_frac < theta && hz_frac < theta {
        ModeClass::Tem
    } else if ez_frac < theta {
        ModeClass::Te
    } else if hz_frac < theta {
        ModeClass::Tm
    } else {
        let min_e = rho_x.min(1.0 - rho_x);
        let min_h = sigma_x.min(1.0 - sigma_x);
        let lse = min_e < theta;
        let lsm = min_h < theta;
        match (lse, lsm) {
            (true, true) => {
                if min_e <= min_h {
                    ModeClass::Lse
                } else {
                    ModeClass::Lsm
                }
            }
            (true, false) => ModeClass::Lse,
            (false, true) => ModeClass::Lsm,
            (false, false) => ModeClass::Hem,
        }
    };

    (rho_x, sigma_x, class)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier_labels_synthetic_fields() {
        let n = 16;
        let big = vec![1.0; n];
        let mid = vec![0.4; n];
        let tiny = vec![1e-3; n];
        let zero = vec![0.0; n];

        // x-polarized E with axial E and H both present -> LSE.
        let (rho, _, class) =
            classify_fields(&big, &tiny, &mid, &mid, &big, &mid, 0.02);
        assert!(rho > 0.99);
        assert_eq!(class, ModeClass::Lse);

        // Magnetic mirror image -> LSM.
        let (_, sigma, class) =
            classify_fields(&mid, &big, &mid, &big, &tiny, &mid, 0.02);
        assert!(sigma > 0.99);
        assert_eq!(class, ModeClass::Lsm);

        // Both transverse components comparable, both axial present -> HEM.
        let (_, _, class) = classify_fields(&big, &big, &big, &big, &big, &big, 0.02);
        assert_eq!(class, ModeClass::Hem);

        // No axial E -> TE; no axial H -> TM; neither -> TEM.
        let (_, _, class) = classify_fields(&big, &big, &zero, &big, &big, &big, 0.02);
        assert_eq!(class, ModeClass::Te);
        let (_, _, class) = classify_fields(&big, &big, &big, &big, &big, &zero, 0.02);
        assert_eq!(class, ModeClass::Tm);
        let (_, _, class) = classify_fields(&big, &big, &zero, &big, &big, &zero, 0.02);
        assert_eq!(class, ModeClass::Tem);
    }

    #[test]
    fn lse_beats_lsm_when_e_suppression_is_cleaner() {
        let n = 8;
        let big = vec![1.0; n];
        let small = vec![0.05; n]; // 0.25% energy: below θ
        let smaller = vec![0.02; n]; // 0.04% energy: even cleaner
        // Both E and H singly polarized; E side cleaner.
        let (_, _, class) =
            classify_fields(&big, &smaller, &big, &small, &big, &big, 0.02);
        assert_eq!(class, ModeClass::Lse);
        // H side cleaner.
        let (_, _, class) =
            classify_fields(&big, &small, &big, &smaller, &big, &big, 0.02);
        assert_eq!(class, ModeClass::Lsm);
    }
}
