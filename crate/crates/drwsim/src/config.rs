//! Scenario configuration: a strict TOML schema with unit-suffixed
//! quantities. Unknown keys are rejected with their location, every length
//! and frequency carries an explicit unit, and each scenario admits exactly
//! one sweep definition.

use serde::{Deserialize, Serialize};

use drw_core::bend::BendPlane;
use drw_core::geometry::{CrossSection, FrequencyGrid};
use drw_core::material::{catalog_lookup, Material};

use crate::error::CliError;
use crate::units::{Frequency, Length};

/// The one config schema revision this build understands.
pub const SUPPORTED_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Modes,
    Straight,
    LossTable,
    BendSweep,
    CrosstalkSweep,
    Taper,
    Link,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Modes => "modes",
            Scenario::Straight => "straight",
            Scenario::LossTable => "loss-table",
            Scenario::BendSweep => "bend-sweep",
            Scenario::CrosstalkSweep => "crosstalk-sweep",
            Scenario::Taper => "taper",
            Scenario::Link => "link",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Core width (the wide transverse axis).
    pub a: Length,
    /// Core height (the narrow transverse axis).
    pub b: Length,
}

/// A material is either a catalog name or an inline definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialRef {
    Catalog(String),
    Inline {
        eps_r: f64,
        #[serde(default)]
        tan_delta: f64,
    },
}

impl MaterialRef {
    pub fn resolve(&self, fallback_name: &str) -> Result<Material, CliError> {
        match self {
            MaterialRef::Catalog(name) => catalog_lookup(name)
                .map_err(|e| CliError::Config(format!("material \"{name}\": {e}"))),
            MaterialRef::Inline { eps_r, tan_delta } => {
                Material::new(fallback_name, *eps_r, *tan_delta)
                    .map_err(|e| CliError::Config(format!("material {fallback_name}: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsConfig {
    pub core: MaterialRef,
    pub clad: MaterialRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub start: Frequency,
    pub stop: Frequency,
    pub points: usize,
}

impl BandConfig {
    pub fn frequency_grid(&self) -> Result<FrequencyGrid, CliError> {
        FrequencyGrid::linspace(self.start.hz(), self.stop.hz(), self.points)
            .map_err(|e| CliError::Config(format!("band: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Cells per in-core wavelength of the discretization.
    pub cells_per_wavelength: u32,
    /// Modes requested where a scenario solves a spectrum of them.
    pub n_modes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cells_per_wavelength: 20,
            n_modes: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesParams {
    pub frequency: Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StraightParams {
    pub length: Length,
    /// Core loss tangent override; defaults to the core material's value.
    #[serde(default)]
    pub tan_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossTableParams {
    /// Core loss tangents, one table row each.
    pub tan_deltas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneName {
    /// Bend in the plane of the wide axis.
    A,
    /// Bend in the plane of the narrow axis (the natural routing plane).
    B,
}

impl From<PlaneName> for BendPlane {
    fn from(p: PlaneName) -> BendPlane {
        match p {
            PlaneName::A => BendPlane::InPlaneOfA,
            PlaneName::B => BendPlane::InPlaneOfB,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BendSweepParams {
    pub radii: Vec<Length>,
    #[serde(default = "default_plane")]
    pub plane: PlaneName,
}

fn default_plane() -> PlaneName {
    PlaneName::B
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkSweepParams {
    /// Edge-to-edge gaps; defaults to {10, 20, 40, 60, 80, 100} µm.
    #[serde(default)]
    pub gaps: Option<Vec<Length>>,
    /// Co-propagation length for the far-end crosstalk figure.
    #[serde(default)]
    pub coupling_length: Option<Length>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaperParams {
    pub length: Length,
    /// Launch cross-section; defaults to 3× the channel geometry.
    #[serde(default)]
    pub a_in: Option<Length>,
    #[serde(default)]
    pub b_in: Option<Length>,
    #[serde(default)]
    pub segments: Option<usize>,
    #[serde(default)]
    pub basis_modes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkParams {
    pub channel_length: Length,
    pub taper_length: Length,
    #[serde(default)]
    pub segments: Option<usize>,
    #[serde(default)]
    pub basis_modes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub geometry: GeometryConfig,
    pub materials: MaterialsConfig,
    #[serde(default)]
    pub band: Option<BandConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: Option<OutputConfig>,

    // scenario parameter tables — exactly the one matching `scenario`
    #[serde(default)]
    pub modes: Option<ModesParams>,
    #[serde(default)]
    pub straight: Option<StraightParams>,
    #[serde(default)]
    pub loss_table: Option<LossTableParams>,
    #[serde(default)]
    pub bend_sweep: Option<BendSweepParams>,
    #[serde(default)]
    pub crosstalk_sweep: Option<CrosstalkSweepParams>,
    #[serde(default)]
    pub taper: Option<TaperParams>,
    #[serde(default)]
    pub link: Option<LinkParams>,
}

/// Parse and validate a config document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Config("config document is empty".into()));
    }
    let cfg: ScenarioConfig =
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SUPPORTED_SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (this build supports {})",
                self.schema_version, SUPPORTED_SCHEMA_VERSION
            )));
        }

        // exactly one scenario parameter table, and it must match `scenario`
        let tables: [(&str, bool); 7] = [
            ("modes", self.modes.is_some()),
            ("straight", self.straight.is_some()),
            ("loss_table", self.loss_table.is_some()),
            ("bend_sweep", self.bend_sweep.is_some()),
            ("crosstalk_sweep", self.crosstalk_sweep.is_some()),
            ("taper", self.taper.is_some()),
            ("link", self.link.is_some()),
        ];
        let present: Vec<&str> = tables
            .iter()
            .filter_map(|&(n, p)| if p { Some(n) } else { None })
            .collect();
        let want = match self.scenario {
            Scenario::Modes => "modes",
            Scenario::Straight => "straight",
            Scenario::LossTable => "loss_table",
            Scenario::BendSweep => "bend_sweep",
            Scenario::CrosstalkSweep => "crosstalk_sweep",
            Scenario::Taper => "taper",
            Scenario::Link => "link",
        };
        match present.as_slice() {
            [one] if *one == want => {}
            [] if self.scenario == Scenario::CrosstalkSweep => {
                // all crosstalk parameters have defaults
            }
            [] => {
                return Err(CliError::Config(format!(
                    "scenario \"{}\" needs a [{}] parameter table",
                    self.scenario.name(),
                    want
                )))
            }
            more => {
                return Err(CliError::Config(format!(
                    "exactly one scenario parameter table is allowed: scenario \"{}\" \
                     takes [{}], found [{}]",
                    self.scenario.name(),
                    want,
                    more.join("], [")
                )))
            }
        }

        // the frequency axis: the modes scenario names its single frequency
        // inline; every other scenario sweeps the band
        match self.scenario {
            Scenario::Modes => {
                if self.band.is_some() {
                    return Err(CliError::Config(
                        "the modes scenario solves at [modes].frequency; remove [band]"
                            .into(),
                    ));
                }
            }
            _ => {
                let band = self.band.as_ref().ok_or_else(|| {
                    CliError::Config(format!(
                        "scenario \"{}\" sweeps frequency and needs a [band] table",
                        self.scenario.name()
                    ))
                })?;
                if !(band.start.ghz <= band.stop.ghz) {
                    return Err(CliError::Config(format!(
                        "band start {} exceeds stop {}",
                        band.start, band.stop
                    )));
                }
                if band.points == 0 {
                    return Err(CliError::Config("band.points must be ≥ 1".into()));
                }
                if band.points == 1 && band.start != band.stop {
                    return Err(CliError::Config(
                        "band.points = 1 requires start = stop".into(),
                    ));
                }
                if band.points > 1 && band.start == band.stop {
                    return Err(CliError::Config(
                        "band.points > 1 requires start < stop".into(),
                    ));
                }
            }
        }

        if let Some(lt) = &self.loss_table {
            if lt.tan_deltas.is_empty() {
                return Err(CliError::Config("loss_table.tan_deltas is empty".into()));
            }
            if lt.tan_deltas.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
                return Err(CliError::Config(
                    "loss_table.tan_deltas must be finite and ≥ 0".into(),
                ));
            }
        }
        if let Some(bs) = &self.bend_sweep {
            if bs.radii.is_empty() {
                return Err(CliError::Config("bend_sweep.radii is empty".into()));
            }
        }
        if let Some(ct) = &self.crosstalk_sweep {
            if matches!(&ct.gaps, Some(g) if g.is_empty()) {
                return Err(CliError::Config("crosstalk_sweep.gaps is empty".into()));
            }
        }
        if let Some(sp) = &self.straight {
            if let Some(t) = sp.tan_delta {
                if !(t >= 0.0) || !t.is_finite() {
                    return Err(CliError::Config(
                        "straight.tan_delta must be finite and ≥ 0".into(),
                    ));
                }
            }
        }
        if matches!(&self.taper, Some(t) if t.a_in.is_some() != t.b_in.is_some()) {
            return Err(CliError::Config(
                "taper launch overrides a_in and b_in must be given together".into(),
            ));
        }

        self.cross_section()?;
        Ok(())
    }

    /// The channel cross-section this config describes.
    pub fn cross_section(&self) -> Result<CrossSection, CliError> {
        let core = self.materials.core.resolve("core")?;
        let clad = self.materials.clad.resolve("clad")?;
        CrossSection::new(
            self.geometry.a.meters(),
            self.geometry.b.meters(),
            core,
            clad,
        )
        .map_err(|e| CliError::Config(format!("geometry: {e}")))
    }
}
