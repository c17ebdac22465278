//! `drwsim` — characterize rectangular dielectric rod waveguide channels:
//! guided modes, dielectric loss, bends, crosstalk, tapers, full links.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use drwsim::config::{
    BandConfig, GeometryConfig, MaterialRef, MaterialsConfig, ModesParams, ScenarioConfig,
    SolverConfig,
};
use drwsim::error::CliError;
use drwsim::units::{Frequency, Length};
use drwsim::{parse_config, run_scenario, Scenario};

#[derive(Parser)]
#[command(
    name = "drwsim",
    version,
    about = "Dielectric rod waveguide channel characterization",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario described by a TOML config file.
    Run {
        /// Path to the scenario config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's [output] table).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweep points.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Zero wall-clock fields in the manifest so repeated runs produce
        /// byte-identical metadata.
        #[arg(long)]
        seed_metadata: bool,
    },
    /// Shorthand: solve guided modes of a rectangular guide and dump fields.
    Modes {
        /// Core width, e.g. "160 um".
        #[arg(long, default_value = "160 um")]
        a: String,
        /// Core height, e.g. "80 um".
        #[arg(long, default_value = "80 um")]
        b: String,
        /// Solve frequency, e.g. "110 GHz".
        #[arg(long, default_value = "110 GHz")]
        frequency: String,
        /// Number of modes to search for.
        #[arg(long, default_value_t = 3)]
        n_modes: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Shorthand: run a canned sweep on the reference 160×80 µm guide.
    Sweep {
        /// Which sweep to run.
        kind: SweepKind,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for sweep points.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Zero wall-clock fields in the manifest.
        #[arg(long)]
        seed_metadata: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepKind {
    LossTable,
    BendSweep,
    CrosstalkSweep,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("drwsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn real_main() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            workers,
            seed_metadata,
        } => {
            check_workers(workers)?;
            let bytes = fs::read(&config).map_err(|e| {
                CliError::Config(format!("reading {}: {e}", config.display()))
            })?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| CliError::Config("config is not valid UTF-8".into()))?;
            let cfg = parse_config(&text)?;
            let out_dir = match (out, &cfg.output) {
                (Some(dir), _) => dir,
                (None, Some(o)) => PathBuf::from(&o.directory),
                (None, None) => {
                    return Err(CliError::Config(
                        "no output directory: pass --out or set [output] directory".into(),
                    ))
                }
            };
            run_scenario(&cfg, &bytes, &out_dir, workers, seed_metadata)?;
            Ok(())
        }
        Command::Modes {
            a,
            b,
            frequency,
            n_modes,
            out,
        } => {
            let cfg = ScenarioConfig {
                schema_version: 1,
                scenario: Scenario::Modes,
                geometry: GeometryConfig {
                    a: parse_arg::<Length>("--a", &a)?,
                    b: parse_arg::<Length>("--b", &b)?,
                },
                materials: reference_materials("paper-core-realistic"),
                band: None,
                solver: SolverConfig {
                    n_modes,
                    ..SolverConfig::default()
                },
                output: None,
                modes: Some(ModesParams {
                    frequency: parse_arg::<Frequency>("--frequency", &frequency)?,
                }),
                straight: None,
                loss_table: None,
                bend_sweep: None,
                crosstalk_sweep: None,
                taper: None,
                link: None,
            };
            run_synthesized(cfg, &out, 1, false)
        }
        Command::Sweep {
            kind,
            out,
            workers,
            seed_metadata,
        } => {
            check_workers(workers)?;
            run_synthesized(canned_sweep(kind)?, &out, workers, seed_metadata)
        }
    }
}

fn check_workers(workers: usize) -> Result<(), CliError> {
    if workers == 0 {
        return Err(CliError::Config("--workers must be ≥ 1".into()));
    }
    Ok(())
}

fn parse_arg<T: std::str::FromStr<Err = String>>(flag: &str, text: &str) -> Result<T, CliError> {
    text.parse()
        .map_err(|e| CliError::Config(format!("{flag}: {e}")))
}

fn reference_materials(core: &str) -> MaterialsConfig {
    MaterialsConfig {
        core: MaterialRef::Catalog(core.into()),
        clad: MaterialRef::Catalog("paper-clad".into()),
    }
}

/// Serialize a synthesized config so the manifest hashes the effective
/// document, then run it.
fn run_synthesized(
    cfg: ScenarioConfig,
    out: &PathBuf,
    workers: usize,
    seed_metadata: bool,
) -> Result<(), CliError> {
    cfg.validate()?;
    let text = toml::to_string(&cfg)
        .map_err(|e| CliError::Runtime(format!("serializing config: {e}")))?;
    run_scenario(&cfg, text.as_bytes(), out, workers, seed_metadata)?;
    Ok(())
}

fn canned_sweep(kind: SweepKind) -> Result<ScenarioConfig, CliError> {
    use drwsim::config::{BendSweepParams, CrosstalkSweepParams, LossTableParams, PlaneName};
    let band = |start: f64, stop: f64, points: usize| {
        Some(BandConfig {
            start: Frequency { ghz: start },
            stop: Frequency { ghz: stop },
            points,
        })
    };
    let geometry = GeometryConfig {
        a: "160 um".parse().expect("literal"),
        b: "80 um".parse().expect("literal"),
    };
    let mut cfg = ScenarioConfig {
        schema_version: 1,
        scenario: Scenario::LossTable,
        geometry,
        materials: reference_materials("paper-core-lossless"),
        band: band(90.0, 150.0, 4),
        solver: SolverConfig::default(),
        output: None,
        modes: None,
        straight: None,
        loss_table: None,
        bend_sweep: None,
        crosstalk_sweep: None,
        taper: None,
        link: None,
    };
    match kind {
        SweepKind::LossTable => {
            cfg.loss_table = Some(LossTableParams {
                tan_deltas: vec![0.0, 0.0005, 0.001, 0.002],
            });
        }
        SweepKind::BendSweep => {
            cfg.scenario = Scenario::BendSweep;
            cfg.materials = reference_materials("paper-core-worst");
            cfg.bend_sweep = Some(BendSweepParams {
                radii: ["25 um", "50 um", "100 um", "200 um", "400 um", "1 mm"]
                    .iter()
                    .map(|s| s.parse().expect("literal"))
                    .collect(),
                plane: PlaneName::B,
            });
        }
        SweepKind::CrosstalkSweep => {
            cfg.scenario = Scenario::CrosstalkSweep;
            cfg.band = band(100.0, 150.0, 2);
            cfg.crosstalk_sweep = Some(CrosstalkSweepParams {
                gaps: None,
                coupling_length: None,
            });
        }
    }
    Ok(cfg)
}
