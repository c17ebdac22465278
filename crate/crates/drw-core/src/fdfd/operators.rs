//! Finite-difference operators and permittivity sampling on the staggered
//! transverse grid.
//!
//! Layout and staggering (cell index = `i * ny + j`, y fastest):
//! - `ex`, `hy` live at `(i + 1/2, j)`;
//! - `ey`, `hx` live at `(i, j + 1/2)`;
//! - `ez` lives at nodes `(i, j)`; `hz` at `(i + 1/2, j + 1/2)`.
//!
//! `DEX`/`DEY` are forward differences acting on E samples with zero ghost
//! values outside the far boundary; `DHX = -DEXᵀ` and `DHY = -DEYᵀ` are the
//! adjoint backward differences (zero ghost at the near boundary). The
//! enclosing domain therefore behaves as a perfectly conducting box, which is
//! transparent in practice because the padding keeps guided fields
//! exponentially small at the walls.

use crate::grid::Grid2D;
use crate::linalg::RowMat;

/// The four first-difference operators on a `nx * ny` grid.
pub struct DiffOps {
    pub dex: RowMat,
    pub dey: RowMat,
    pub dhx: RowMat,
    pub dhy: RowMat,
}

/// Builds forward/backward difference operators for the given grid shape.
pub fn diff_ops(nx: usize, ny: usize, dx: f64, dy: f64) -> DiffOps {
    let n = nx * ny;
    let (rx, ry) = (1.0 / dx, 1.0 / dy);

    // DEY: (f[i, j+1] - f[i, j]) / dy, zero ghost at j = ny - 1.
    let mut dey = RowMat::zeros(n, n);
    for i in 0..nx {
        for j in 0..ny {
            let k = i * ny + j;
            dey.insert_add(k, k, -ry);
            if j + 1 < ny {
                dey.insert_add(k, k + 1, ry);
            }
        }
    }

    // DEX: (f[i+1, j] - f[i, j]) / dx, zero ghost at i = nx - 1.
    let mut dex = RowMat::zeros(n, n);
    for i in 0..nx {
        for j in 0..ny {
            let k = i * ny + j;
            dex.insert_add(k, k, -rx);
            if i + 1 < nx {
                dex.insert_add(k, k + ny, rx);
            }
        }
    }

    let mut dhx = dex.transpose();
    dhx.scale(-1.0);
    let mut dhy = dey.transpose();
    dhy.scale(-1.0);

    DiffOps { dex, dey, dhx, dhy }
}

/// Permittivity samples at the staggered field points, by arithmetic average
/// of the adjacent cell values (real part only; the loss tangent enters as a
/// perturbation after the real eigensolve).
pub struct EpsSamples {
    /// At `ex` points `(i + 1/2, j)`.
    pub exx: Vec<f64>,
    /// At `ey` points `(i, j + 1/2)`.
    pub eyy: Vec<f64>,
    /// At nodes `(i, j)`.
    pub ezz: Vec<f64>,
}

/// Samples the cell-centered permittivity onto the staggered points.
pub fn sample_eps(grid: &Grid2D) -> EpsSamples {
    let (nx, ny) = (grid.nx, grid.ny);
    let ec = |i: usize, j: usize| grid.eps[i * ny + j].re;
    let mut exx = vec![0.0; nx * ny];
    let mut eyy = vec![0.0; nx * ny];
    let mut ezz = vec![0.0; nx * ny];

    for i in 0..nx {
        for j in 0..ny {
            let k = i * ny + j;
            // exx at (i + 1/2, j): cells (i, j-1) and (i, j).
            exx[k] = if j >= 1 {
                0.5 * (ec(i, j - 1) + ec(i, j))
            } else {
                ec(i, 0)
            };
            // eyy at (i, j + 1/2): cells (i-1, j) and (i, j).
            eyy[k] = if i >= 1 {
                0.5 * (ec(i - 1, j) + ec(i, j))
            } else {
                ec(0, j)
            };
            // ezz at node (i, j): the four surrounding cells, with two- and
            // one-cell fallbacks along the near edges.
            ezz[k] = match (i >= 1, j >= 1) {
                (true, true) => {
                    0.25 * (ec(i - 1, j - 1) + ec(i, j - 1) + ec(i - 1, j) + ec(i, j))
                }
                (false, true) => 0.5 * (ec(0, j - 1) + ec(0, j)),
                (true, false) => 0.5 * (ec(i - 1, 0) + ec(i, 0)),
                (false, false) => ec(0, 0),
            };
        }
    }

    EpsSamples { exx, eyy, ezz }
}

/// The interleaved eigenproblem operators: `A e = β² e` with `A = P·Q`,
/// where `e` interleaves `(ex, ey)` per cell and `h = Q·e / β` interleaves
/// `(hx, hy)`.
pub struct Assembled {
    /// System matrix `P·Q` in interleaved ordering `u = 2·cell + comp`.
    pub a: RowMat,
    /// Maps interleaved `e` to interleaved `β·h`.
    pub q: RowMat,
    pub k0: f64,
}

/// Assembles the transverse-E eigenproblem for `grid` at frequency `f`.
pub fn assemble(grid: &Grid2D, f: f64) -> Assembled {
    let (nx, ny) = (grid.nx, grid.ny);
    let n = nx * ny;
    let k0 = crate::constants::k0(f);
    let ops = diff_ops(nx, ny, grid.dx, grid.dy);
    let eps = sample_eps(grid);

    // 1 / (k0 * ezz), applied as a row scaling of DHY / DHX.
    let zi: Vec<f64> = eps.ezz.iter().map(|&e| 1.0 / (k0 * e)).collect();
    let mut dhy_z = ops.dhy.clone();
    dhy_z.scale_rows(&zi);
    let mut dhx_z = ops.dhx.clone();
    dhx_z.scale_rows(&zi);

    // P = [ -DEX·Zi·DHY        DEX·Zi·DHX + k0·I ]
    //     [ -DEY·Zi·DHY - k0·I DEY·Zi·DHX        ]
    let mut p11 = ops.dex.mul(&dhy_z);
    p11.scale(-1.0);
    let mut p12 = ops.dex.mul(&dhx_z);
    p12.add_diag(k0);
    let mut p21 = ops.dey.mul(&dhy_z);
    p21.scale(-1.0);
    p21.add_diag(-k0);
    let p22 = ops.dey.mul(&dhx_z);

    // Q = [ (DHX·DEY)/k0            -(DHX·DEX)/k0 - k0·Eyy ]
    //     [ k0·Exx + (DHY·DEY)/k0   -(DHY·DEX)/k0          ]
    let rk0 = 1.0 / k0;
    let mut q11 = ops.dhx.mul(&ops.dey);
    q11.scale(rk0);
    let mut q12 = ops.dhx.mul(&ops.dex);
    q12.scale(-rk0);
    for (i, &e) in eps.eyy.iter().enumerate() {
        q12.insert_add(i, i, -k0 * e);
    }
    let mut q21 = ops.dhy.mul(&ops.dey);
    q21.scale(rk0);
    for (i, &e) in eps.exx.iter().enumerate() {
        q21.insert_add(i, i, k0 * e);
    }
    let mut q22 = ops.dhy.mul(&ops.dex);
    q22.scale(-rk0);

    let p = RowMat::interleave2([[Some(&p11), Some(&p12)], [Some(&p21), Some(&p22)]]);
    let q = RowMat::interleave2([[Some(&q11), Some(&q12)], [Some(&q21), Some(&q22)]]);
    debug_assert_eq!(p.n_rows(), 2 * n);
    let a = p.mul(&q);

    Assembled { a, q, k0 }
}
