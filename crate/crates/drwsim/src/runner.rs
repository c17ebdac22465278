//! Scenario execution: maps a validated config onto the physics pipelines,
//! dispatches sweep points to a worker pool, writes artifacts in a fixed
//! order, and records everything in the run manifest.
//!
//! Determinism: every sweep point is an independent computation; results
//! are collected back in input order and all files are written serially
//! from the coordinating thread, so artifact bytes do not depend on the
//! worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use drw_core::bend::{bend_sweep, BendAnalysis};
use drw_core::channel::{loss_table, straight_channel, ChannelResponse};
use drw_core::constants::{C0, DB_PER_NEPER};
use drw_core::crosstalk::{
    crosstalk_sweep, fext_db, isolated_decay_rate, log_kappa_fit, next_bound_db,
    SupermodePair, DEFAULT_GAPS,
};
use drw_core::fdfd::solve_modes;
use drw_core::geometry::{CrossSection, FrequencyGrid};
use drw_core::grid::build_grid;
use drw_core::material::Material;
use drw_core::sparams::SParameterSet;
use drw_core::taper::{
    taper_transfer, TaperProfile, TaperTransfer, DEFAULT_BASIS_MODES, DEFAULT_SEGMENTS,
};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::field_csv::export_field_csv;
use crate::manifest::{sha256_hex, RunManifest, SettingsEcho, StageClock};

/// Co-propagation length used for the far-end crosstalk figure when the
/// config does not override it, m.
pub const DEFAULT_COUPLING_LENGTH: f64 = 1e-3;

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Shortest decimal representation that round-trips to the same f64; keeps
/// exported tables stable against incidental formatting changes.
fn csv_num(v: f64) -> String {
    format!("{v}")
}

fn csv_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Run `f` over `items` on a pool of `workers` threads, preserving input
/// order in the result.
fn par_points<T, U, F>(workers: usize, items: &[T], f: F) -> Result<Vec<U>, CliError>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, CliError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Runtime(format!("worker pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

fn write_artifact(
    out_dir: &Path,
    name: &str,
    text: &str,
    manifest: &mut RunManifest,
) -> Result<(), CliError> {
    let path = out_dir.join(name);
    fs::write(&path, text)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    manifest.add_artifact(out_dir, name)?;
    println!("wrote {name}");
    Ok(())
}

/// Comment block for Touchstone exports: identifies the run and documents
/// the reference-resistance convention.
fn s2p_comments(manifest: &RunManifest) -> Vec<String> {
    vec![
        format!(
            "drwsim {} | scenario {}",
            manifest.tool_version, manifest.scenario
        ),
        format!("config sha256: {}", manifest.config_sha256),
        "R 50 is a nominal port tag; waves are unit-power guided-mode waves".into(),
    ]
}

/// Execute a validated config: compute, write artifacts into `out_dir`,
/// and return the manifest (also written there as `manifest.toml`).
pub fn run_scenario(
    cfg: &ScenarioConfig,
    config_bytes: &[u8],
    out_dir: &Path,
    workers: usize,
    seed_metadata: bool,
) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", out_dir.display())))?;

    let cs = cfg.cross_section()?;
    let mut manifest = RunManifest::new(
        cfg.scenario.name(),
        sha256_hex(config_bytes),
        workers.max(1),
        SettingsEcho {
            cells_per_wavelength: cfg.solver.cells_per_wavelength,
            n_modes: cfg.solver.n_modes,
        },
    );
    let mut clock = StageClock::start(seed_metadata);

    match cfg.scenario {
        Scenario::Modes => run_modes(cfg, &cs, out_dir, &mut manifest, &mut clock)?,
        Scenario::Straight => run_straight(cfg, &cs, out_dir, &mut manifest, &mut clock)?,
        Scenario::LossTable => run_loss_table(cfg, &cs, out_dir, &mut manifest, &mut clock)?,
        Scenario::BendSweep => run_bend_sweep(cfg, &cs, out_dir, &mut manifest, &mut clock)?,
        Scenario::CrosstalkSweep => {
            run_crosstalk_sweep(cfg, &cs, out_dir, &mut manifest, &mut clock)?
        }
        Scenario::Taper => run_taper(cfg, &cs, out_dir, &mut manifest, &mut clock)?,
        Scenario::Link => run_link(cfg, &cs, out_dir, &mut manifest, &mut clock)?,
    }

    manifest.verify_artifacts(out_dir)?;
    manifest.write(out_dir)?;
    Ok(manifest)
}

fn band_grid(cfg: &ScenarioConfig) -> Result<FrequencyGrid, CliError> {
    cfg.band
        .as_ref()
        .expect("validated configs have a band for sweeping scenarios")
        .frequency_grid()
}

// ---------------------------------------------------------------- modes --

fn run_modes(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
    out_dir: &Path,
    manifest: &mut RunManifest,
    clock: &mut StageClock,
) -> Result<(), CliError> {
    let params = cfg.modes.as_ref().expect("validated");
    let f = params.frequency.hz();
    let grid = build_grid(cs, f, cfg.solver.cells_per_wavelength).map_err(runtime)?;
    let modes = solve_modes(&grid, f, cfg.solver.n_modes).map_err(runtime)?;
    if modes.is_empty() {
        return Err(CliError::Runtime(format!(
            "no guided modes at {}",
            params.frequency
        )));
    }
    manifest.add_stage("solve", clock.lap());

    let mut table = String::from("index,class,neff,beta_rad_per_m,major_x_fraction,residual\n");
    for (i, m) in modes.iter().enumerate() {
        csv_row(
            &mut table,
            &[
                i.to_string(),
                m.class.to_string(),
                csv_num(m.neff()),
                csv_num(m.beta),
                csv_num(m.rho_x),
                csv_num(m.residual),
            ],
        );
    }
    write_artifact(out_dir, "modes.csv", &table, manifest)?;
    for (i, m) in modes.iter().enumerate() {
        let name = format!("mode_{i:02}.csv");
        export_field_csv(m, &grid, &out_dir.join(&name))?;
        manifest.add_artifact(out_dir, &name)?;
        println!("wrote {name}");
    }
    manifest.add_stage("export", clock.lap());
    Ok(())
}

// ------------------------------------------------------------- straight --

fn run_straight(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
    out_dir: &Path,
    manifest: &mut RunManifest,
    clock: &mut StageClock,
) -> Result<(), CliError> {
    let params = cfg.straight.as_ref().expect("validated");
    let freqs = band_grid(cfg)?;
    let mut cs_run = cs.clone();
    if let Some(t) = params.tan_delta {
        cs_run.core =
            Material::new(&cs.core.name, cs.core.eps_r, t).map_err(runtime)?;
    }
    let resp = straight_channel(
        &cs_run,
        &freqs,
        params.length.meters(),
        cfg.solver.cells_per_wavelength,
    )
    .map_err(runtime)?;
    manifest.add_stage("solve", clock.lap());

    let sp = SParameterSet::from_transfer(resp.frequencies.clone(), resp.s21.clone())
        .map_err(runtime)?;
    let s2p = crate::touchstone::format_two_port(&sp, &s2p_comments(manifest))?;
    write_artifact(out_dir, "straight.s2p", &s2p, manifest)?;

    let mut table =
        String::from("f_ghz,neff,alpha_np_per_m,loss_db_per_mm,insertion_loss_db\n");
    for (fi, &f) in resp.frequencies.iter().enumerate() {
        let neff = resp.beta[fi] * C0 / (2.0 * std::f64::consts::PI * f);
        csv_row(
            &mut table,
            &[
                csv_num(f / 1e9),
                csv_num(neff),
                csv_num(resp.alpha[fi]),
                csv_num(resp.alpha[fi] * DB_PER_NEPER / 1000.0),
                csv_num(resp.insertion_loss_db(fi)),
            ],
        );
    }
    write_artifact(out_dir, "straight.csv", &table, manifest)?;
    manifest.add_stage("export", clock.lap());
    Ok(())
}

// ----------------------------------------------------------- loss table --

fn run_loss_table(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
    out_dir: &Path,
    manifest: &mut RunManifest,
    clock: &mut StageClock,
) -> Result<(), CliError> {
    let params = cfg.loss_table.as_ref().expect("validated");
    let freqs = band_grid(cfg)?;
    let fs: Vec<f64> = freqs.frequencies().to_vec();

    // one eigensolve per frequency, dispatched to the pool; the upstream
    // tabulator rebuilds its grid per frequency, so per-point calls yield
    // bit-identical columns
    let columns = par_points(manifest.workers, &fs, |&f| {
        let single = FrequencyGrid::new(vec![f]).map_err(runtime)?;
        loss_table(
            cs,
            &single,
            &params.tan_deltas,
            cfg.solver.cells_per_wavelength,
        )
        .map_err(runtime)
    })?;
    manifest.add_stage("solve", clock.lap());

    // Table layout: one row per loss tangent, one loss column per frequency.
    let mut header = String::from("tan_delta");
    for &f in &fs {
        write!(header, ",db_per_mm_{}GHz", csv_num(f / 1e9))
            .expect("writing to a String cannot fail");
    }
    header.push('\n');
    let mut table = header;
    for (ti, &t) in params.tan_deltas.iter().enumerate() {
        let mut cells = vec![csv_num(t)];
        for col in &columns {
            cells.push(csv_num(col.db_per_mm(0, ti)));
        }
        csv_row(&mut table, &cells);
    }
    write_artifact(out_dir, "loss_table.csv", &table, manifest)?;

    let mut disp = String::from("f_ghz,neff\n");
    for (fi, &f) in fs.iter().enumerate() {
        csv_row(
            &mut disp,
            &[csv_num(f / 1e9), csv_num(columns[fi].neff[0])],
        );
    }
    write_artifact(out_dir, "loss_table_neff.csv", &disp, manifest)?;
    manifest.add_stage("export", clock.lap());
    Ok(())
}

// ----------------------------------------------------------- bend sweep --

fn run_bend_sweep(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
    out_dir: &Path,
    manifest: &mut RunManifest,
    clock: &mut StageClock,
) -> Result<(), CliError> {
    let params = cfg.bend_sweep.as_ref().expect("validated");
    let freqs = band_grid(cfg)?;
    let fs: Vec<f64> = freqs.frequencies().to_vec();
    let radii: Vec<f64> = params.radii.iter().map(|r| r.meters()).collect();
    let plane = params.plane.into();

    let per_freq: Vec<Vec<BendAnalysis>> = par_points(manifest.workers, &fs, |&f| {
        bend_sweep(cs, f, &radii, plane, cfg.solver.cells_per_wavelength).map_err(runtime)
    })?;
    manifest.add_stage("solve", clock.lap());

    // one CSV of loss vs radius per frequency
    for (fi, rows) in per_freq.iter().enumerate() {
        let mut table = String::from(
            "f_ghz,radius_um,loss_90deg_db,junction_db,attenuation_excess_db,\
             overlap,fundamental_fraction,unaccounted,self_intersecting\n",
        );
        for r in rows {
            csv_row(
                &mut table,
                &[
                    csv_num(r.frequency / 1e9),
                    csv_num(r.radius / 1e-6),
                    csv_num(r.loss_db),
                    csv_num(r.junction_loss_db),
                    csv_num(r.attenuation_excess_db),
                    csv_num(r.overlap),
                    csv_num(r.conversion[0]),
                    csv_num(r.unaccounted),
                    r.self_intersecting.to_string(),
                ],
            );
        }
        write_artifact(out_dir, &format!("bend_{fi:02}.csv"), &table, manifest)?;
    }
    manifest.add_stage("export", clock.lap());
    Ok(())
}

// ------------------------------------------------------ crosstalk sweep --

struct CrosstalkPoint {
    pairs: Vec<SupermodePair>,
    beta_iso: f64,
    gamma_clad: f64,
}

fn run_crosstalk_sweep(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
    out_dir: &Path,
    manifest: &mut RunManifest,
    clock: &mut StageClock,
) -> Result<(), CliError> {
    let (gaps, coupling_length) = match cfg.crosstalk_sweep.as_ref() {
        Some(p) => (
            p.gaps
                .as_ref()
                .map(|g| g.iter().map(|l| l.meters()).collect())
                .unwrap_or_else(|| DEFAULT_GAPS.to_vec()),
            p.coupling_length
                .as_ref()
                .map(|l| l.meters())
                .unwrap_or(DEFAULT_COUPLING_LENGTH),
        ),
        None => (DEFAULT_GAPS.to_vec(), DEFAULT_COUPLING_LENGTH),
    };
    let freqs = band_grid(cfg)?;
    let fs: Vec<f64> = freqs.frequencies().to_vec();
    let cpw = cfg.solver.cells_per_wavelength;

    let points: Vec<CrosstalkPoint> = par_points(manifest.workers, &fs, |&f| {
        let pairs = crosstalk_sweep(cs, &gaps, f, cpw).map_err(runtime)?;
        let (beta_iso, gamma_clad) = isolated_decay_rate(cs, f, cpw).map_err(runtime)?;
        Ok(CrosstalkPoint {
            pairs,
            beta_iso,
            gamma_clad,
        })
    })?;
    manifest.add_stage("solve", clock.lap());

    let mut table = String::from(
        "f_ghz,gap_um,gap_eff_um,kappa_rad_per_m,leading_parity,beat_length_m,\
         fext_db,next_bound_db\n",
    );
    for (fi, &f) in fs.iter().enumerate() {
        for p in &points[fi].pairs {
            csv_row(
                &mut table,
                &[
                    csv_num(f / 1e9),
                    csv_num(p.gap_requested / 1e-6),
                    csv_num(p.gap / 1e-6),
                    csv_num(p.kappa),
                    p.leading_parity.to_string(),
                    csv_num(p.beat_length()),
                    csv_num(fext_db(p.kappa, coupling_length)),
                    csv_num(next_bound_db(p.kappa, p.beta_mean())),
                ],
            );
        }
    }
    write_artifact(out_dir, "crosstalk.csv", &table, manifest)?;

    // exponential-decay fit needs at least three gaps
    if gaps.len() >= 3 {
        let mut fit_table = String::from(
            "f_ghz,slope_per_m,intercept,r_squared,beta_isolated_rad_per_m,\
             gamma_clad_per_m,slope_ratio\n",
        );
        for (fi, &f) in fs.iter().enumerate() {
            let pt = &points[fi];
            let eff_gaps: Vec<f64> = pt.pairs.iter().map(|p| p.gap).collect();
            let kappas: Vec<f64> = pt.pairs.iter().map(|p| p.kappa).collect();
            let fit = log_kappa_fit(&eff_gaps, &kappas).map_err(runtime)?;
            csv_row(
                &mut fit_table,
                &[
                    csv_num(f / 1e9),
                    csv_num(fit.slope),
                    csv_num(fit.intercept),
                    csv_num(fit.r_squared),
                    csv_num(pt.beta_iso),
                    csv_num(pt.gamma_clad),
                    csv_num(fit.slope.abs() / pt.gamma_clad),
                ],
            );
        }
        write_artifact(out_dir, "crosstalk_fit.csv", &fit_table, manifest)?;
    }
    manifest.add_stage("export", clock.lap());
    Ok(())
}

// ---------------------------------------------------------------- taper --

fn taper_profile_from(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
) -> Result<(TaperProfile, usize, usize), CliError> {
    let params = cfg.taper.as_ref().expect("validated");
    let profile = match (&params.a_in, &params.b_in) {
        (Some(a), Some(b)) => {
            let cs_in =
                CrossSection::new(a.meters(), b.meters(), cs.core.clone(), cs.clad.clone())
                    .map_err(|e| CliError::Config(format!("taper launch: {e}")))?;
            TaperProfile::new(cs_in, cs.clone(), params.length.meters()).map_err(runtime)?
        }
        _ => TaperProfile::launch_into(cs, params.length.meters()).map_err(runtime)?,
    };
    Ok((
        profile,
        params.segments.unwrap_or(DEFAULT_SEGMENTS),
        params.basis_modes.unwrap_or(DEFAULT_BASIS_MODES),
    ))
}

/// The fundamental-to-fundamental 2×2 of a multimode taper block.
fn fundamental_two_port(t: &TaperTransfer) -> [[Complex64; 2]; 2] {
    [
        [t.s.s11[(0, 0)], t.s.s12[(0, 0)]],
        [t.s.s21[(0, 0)], t.s.s22[(0, 0)]],
    ]
}

fn run_taper(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
    out_dir: &Path,
    manifest: &mut RunManifest,
    clock: &mut StageClock,
) -> Result<(), CliError> {
    let (profile, segments, basis_modes) = taper_profile_from(cfg, cs)?;
    let freqs = band_grid(cfg)?;
    let fs: Vec<f64> = freqs.frequencies().to_vec();

    let transfers: Vec<TaperTransfer> = par_points(manifest.workers, &fs, |&f| {
        taper_transfer(&profile, f, segments, basis_modes).map_err(runtime)
    })?;
    manifest.add_stage("solve", clock.lap());

    let matrices: Vec<_> = transfers.iter().map(fundamental_two_port).collect();
    let sp = SParameterSet::new(fs.clone(), matrices, 50.0).map_err(runtime)?;
    let s2p = crate::touchstone::format_two_port(&sp, &s2p_comments(manifest))?;
    write_artifact(out_dir, "taper.s2p", &s2p, manifest)?;

    let mut table = String::from("f_ghz,s11_db,s21_db,n_modes_in,n_modes_out\n");
    for (fi, t) in transfers.iter().enumerate() {
        csv_row(
            &mut table,
            &[
                csv_num(fs[fi] / 1e9),
                csv_num(t.s11_db()),
                csv_num(t.s21_db()),
                t.n_modes_in.to_string(),
                t.n_modes_out.to_string(),
            ],
        );
    }
    write_artifact(out_dir, "taper.csv", &table, manifest)?;
    manifest.add_stage("export", clock.lap());
    Ok(())
}

// ----------------------------------------------------------------- link --

fn run_link(
    cfg: &ScenarioConfig,
    cs: &CrossSection,
    out_dir: &Path,
    manifest: &mut RunManifest,
    clock: &mut StageClock,
) -> Result<(), CliError> {
    let params = cfg.link.as_ref().expect("validated");
    let freqs = band_grid(cfg)?;
    let fs: Vec<f64> = freqs.frequencies().to_vec();
    let segments = params.segments.unwrap_or(DEFAULT_SEGMENTS);
    let basis_modes = params.basis_modes.unwrap_or(DEFAULT_BASIS_MODES);
    let profile =
        TaperProfile::launch_into(cs, params.taper_length.meters()).map_err(runtime)?;

    let transfers: Vec<TaperTransfer> = par_points(manifest.workers, &fs, |&f| {
        taper_transfer(&profile, f, segments, basis_modes).map_err(runtime)
    })?;
    let channel: ChannelResponse = straight_channel(
        cs,
        &freqs,
        params.channel_length.meters(),
        cfg.solver.cells_per_wavelength,
    )
    .map_err(runtime)?;
    manifest.add_stage("solve", clock.lap());

    // launch taper → channel → mirror-image taper back out
    let taper_in = SParameterSet::new(
        fs.clone(),
        transfers.iter().map(fundamental_two_port).collect(),
        50.0,
    )
    .map_err(runtime)?;
    let taper_out = SParameterSet::new(
        fs.clone(),
        transfers
            .iter()
            .map(|t| {
                let m = fundamental_two_port(t);
                // reversed two-port: port labels swapped
                [[m[1][1], m[1][0]], [m[0][1], m[0][0]]]
            })
            .collect(),
        50.0,
    )
    .map_err(runtime)?;
    let channel_sp =
        SParameterSet::from_transfer(channel.frequencies.clone(), channel.s21.clone())
            .map_err(runtime)?;
    let link = taper_in
        .cascade(&channel_sp)
        .and_then(|s| s.cascade(&taper_out))
        .map_err(runtime)?;

    let s2p = crate::touchstone::format_two_port(&link, &s2p_comments(manifest))?;
    write_artifact(out_dir, "link.s2p", &s2p, manifest)?;

    let mut table =
        String::from("f_ghz,insertion_loss_db,return_loss_db,channel_loss_db,taper_s21_db\n");
    for (fi, &f) in fs.iter().enumerate() {
        csv_row(
            &mut table,
            &[
                csv_num(f / 1e9),
                csv_num(link.insertion_loss_db(fi)),
                csv_num(link.return_loss_db(fi)),
                csv_num(channel.insertion_loss_db(fi)),
                csv_num(transfers[fi].s21_db()),
            ],
        );
    }
    write_artifact(out_dir, "link.csv", &table, manifest)?;
    manifest.add_stage("export", clock.lap());
    Ok(())
}
