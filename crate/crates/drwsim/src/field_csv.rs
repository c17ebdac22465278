//! Mode-field CSV export: one row per grid cell with the six complex field
//! components and the electric-field magnitude.
//!
//! The solver stores fields in a real-valued substitution (transverse E and
//! H real, axial components carrying a ±90° phase); this module converts
//! back to physical complex amplitudes so the CSV columns mean what they
//! say: Ez = −j·ez_stored, H = h_stored/η₀, Hz = +j·hz_stored/η₀.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use drw_core::constants::ETA0;
use drw_core::fdfd::ModeSolution;
use drw_core::grid::Grid2D;

use crate::error::CliError;

pub const FIELD_CSV_HEADER: &str = "x_um,y_um,re_Ex,im_Ex,re_Ey,im_Ey,re_Ez,im_Ez,\
                                    re_Hx,im_Hx,re_Hy,im_Hy,re_Hz,im_Hz,abs_E";

/// Render a mode's fields as CSV text (header + nx·ny rows, y fastest).
pub fn format_field_csv(mode: &ModeSolution, grid: &Grid2D) -> Result<String, CliError> {
    if mode.nx != grid.nx || mode.ny != grid.ny {
        return Err(CliError::Runtime(format!(
            "mode grid {}×{} does not match the discretization {}×{}",
            mode.nx, mode.ny, grid.nx, grid.ny
        )));
    }
    let mut out = String::with_capacity(64 * mode.nx * mode.ny);
    out.push_str(FIELD_CSV_HEADER);
    out.push('\n');
    for i in 0..mode.nx {
        for j in 0..mode.ny {
            let k = i * mode.ny + j;
            let (ex, ey, ez) = (mode.ex[k], mode.ey[k], mode.ez[k]);
            let (hx, hy, hz) = (
                mode.hx[k] / ETA0,
                mode.hy[k] / ETA0,
                mode.hz[k] / ETA0,
            );
            let abs_e = (ex * ex + ey * ey + ez * ez).sqrt();
            let cells: [f64; 15] = [
                grid.xc(i) / 1e-6,
                grid.yc(j) / 1e-6,
                ex,
                0.0,
                ey,
                0.0,
                0.0,
                -ez,
                hx,
                0.0,
                hy,
                0.0,
                0.0,
                hz,
                abs_e,
            ];
            let mut first = true;
            for v in cells {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{v}").expect("writing to a String cannot fail");
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Write a mode's fields to `path` as CSV.
pub fn export_field_csv(
    mode: &ModeSolution,
    grid: &Grid2D,
    path: &Path,
) -> Result<(), CliError> {
    let text = format_field_csv(mode, grid)?;
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    Ok(())
}
