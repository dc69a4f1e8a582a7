//! Run configuration: TOML with named blocks.

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use sonohbt::correlator::{Engine, EnergyMode, ScanKind, ScanModel};
use sonohbt::filter::{FilterSpec, WidthConvention};
use sonohbt::io::{embedded_config, CSV_MAGIC};
use sonohbt::moments::{radii_for, HbtRadii};
use sonohbt::source::{EmissionFunction, FlowBoost, FlowProfile, GaussianSource};
use sonohbt::spectrum::Spectrum;
use sonohbt::units::{energy_from_wavelength, wavelength_from_energy, TransparencyWindow, C_LIGHT};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub source: SourceBlock,
    pub flow: FlowBlock,
    pub spectrum: SpectrumBlock,
    pub detector: DetectorBlock,
    pub filter: FilterBlock,
    pub scan: ScanBlock,
    pub engine: EngineBlock,
    pub output: OutputBlock,
}

/// Either a Gaussian source (`sigma_r_nm`, `delta_tau_fs`) or HBT radii
/// (`r_perp_nm`, `r_par_nm`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_r_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_tau_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_perp_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_par_nm: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    #[default]
    None,
    LinearRadial,
    ReversingRadial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowBlock {
    pub profile: FlowKind,
    pub v_over_c: f64,
    pub temperature_ev: f64,
}

impl Default for FlowBlock {
    fn default() -> Self {
        Self {
            profile: FlowKind::None,
            v_over_c: 0.0,
            temperature_ev: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    #[default]
    Exponential,
    PowerLaw,
    Blackbody,
    Tabulated,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumBlock {
    pub kind: SpectrumKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Two-column table (energy eV, intensity) for `tabulated`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_ev: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorBlock {
    /// Pair energy E; alternatively `lambda_nm`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_nm: Option<f64>,
    pub window_ev: [f64; 2],
    pub angular_resolution_deg: f64,
    pub aperture_deg: f64,
}

impl Default for DetectorBlock {
    fn default() -> Self {
        Self {
            energy_ev: None,
            lambda_nm: None,
            window_ev: [1.5, 6.0],
            angular_resolution_deg: 1.0,
            aperture_deg: 1.0,
        }
    }
}

/// Filter band width, as `width_ev` or as `dlambda_nm` around `lambda_nm`
/// (default: the detector wavelength).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dlambda_nm: Option<f64>,
    pub convention: WidthConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanBlock {
    pub kind: ScanKind,
    pub points: usize,
    /// Transverse upper limit in ξ; default: the window edge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_max_ev: Option<f64>,
    /// Longitudinal upper limit in q0.
    pub q0_max_mev: f64,
    /// Explicit abscissae (φ rad, q0 eV or δτ fs), overriding the ranges.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub clip_to_window: bool,
    pub lambda: f64,
    pub tau_min_fs: f64,
    pub tau_max_fs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Default for ScanBlock {
    fn default() -> Self {
        Self {
            kind: ScanKind::Transverse,
            points: 101,
            xi_max_ev: None,
            q0_max_mev: 10.0,
            values: None,
            clip_to_window: true,
            lambda: sonohbt::LAMBDA_CHAOTIC,
            tau_min_fs: 1.0,
            tau_max_fs: 1e5,
            label: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EnginePath {
    #[default]
    Analytic,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineBlock {
    pub path: EnginePath,
    pub mode: EnergyMode,
    pub with_corrections: bool,
    pub n_pairs: u64,
    pub seed: u64,
}

impl Default for EngineBlock {
    fn default() -> Self {
        Self {
            path: EnginePath::Analytic,
            mode: EnergyMode::OnShell,
            with_corrections: false,
            n_pairs: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    /// Output directory; not embedded in emitted files.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// File stem of the emitted CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub format: Format,
    pub deterministic: bool,
}

pub const DEFAULT_ENERGY: f64 = 3.0;
pub const DEFAULT_SIGMA_R: f64 = 100.0;
pub const DEFAULT_DLAMBDA: f64 = 1.0;

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Reads a TOML file, or the configuration embedded in a scan CSV.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        if text.starts_with(CSV_MAGIC) {
            let cfg = embedded_config(&text).ok_or_else(|| {
                CliError::Config(format!("{} carries no embedded configuration", path.display()))
            })?;
            return Self::parse(&cfg);
        }
        Self::parse(&text)
    }

    /// The configuration as embedded in output files.
    pub fn to_embedded(&self) -> String {
        let mut c = self.clone();
        c.output.dir = None;
        c.output.deterministic = false;
        toml::to_string(&c).expect("configuration serializes")
    }

    pub fn energy(&self) -> Result<f64, CliError> {
        match (self.detector.energy_ev, self.detector.lambda_nm) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "detector: give either energy_ev or lambda_nm, not both".into(),
            )),
            (Some(e), None) => Ok(e),
            (None, Some(l)) => Ok(energy_from_wavelength(l)),
            (None, None) => Ok(DEFAULT_ENERGY),
        }
    }

    pub fn window(&self) -> Result<TransparencyWindow, CliError> {
        Ok(TransparencyWindow::new(self.detector.window_ev[0], self.detector.window_ev[1])?)
    }

    pub fn spectrum(&self) -> Result<Spectrum, CliError> {
        let b = &self.spectrum;
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Config(format!("spectrum: `{key}` is required for this kind")))
        };
        let s = match b.kind {
            SpectrumKind::Exponential => Spectrum::exponential(b.temperature_ev.unwrap_or(1.0))?,
            SpectrumKind::Blackbody => Spectrum::blackbody(b.temperature_ev.unwrap_or(1.0))?,
            SpectrumKind::PowerLaw => Spectrum::power_law(need(b.alpha, "alpha")?)?,
            SpectrumKind::Tabulated => {
                let path = b
                    .path
                    .as_ref()
                    .ok_or_else(|| CliError::Config("spectrum: `path` is required for tabulated".into()))?;
                Spectrum::from_table_file(path)?
            }
        };
        match b.domain_ev {
            Some([lo, hi]) => Ok(s.with_domain(lo, hi)?),
            None => Ok(s),
        }
    }

    fn uses_radii(&self) -> Result<bool, CliError> {
        let s = &self.source;
        let radii = s.r_perp_nm.is_some() || s.r_par_nm.is_some();
        let gaussian = s.sigma_r_nm.is_some() || s.delta_tau_fs.is_some();
        if radii && gaussian {
            return Err(CliError::Config(
                "source: give radii (r_perp_nm, r_par_nm) or a Gaussian source (sigma_r_nm, delta_tau_fs), not both"
                    .into(),
            ));
        }
        Ok(radii)
    }

    /// Gaussian source; radii translate to `sigma_r = R_perp`,
    /// `c δτ = √(R_par² − R_perp²)`.
    pub fn gaussian_source(&self) -> Result<GaussianSource, CliError> {
        let s = &self.source;
        if self.uses_radii()? {
            let r_perp = s.r_perp_nm.unwrap_or(0.0);
            let r_par = s.r_par_nm.unwrap_or(r_perp);
            if r_par < r_perp {
                return Err(CliError::Config(format!(
                    "source: R_par = {r_par} nm below R_perp = {r_perp} nm has no Gaussian source equivalent"
                )));
            }
            let tau = (r_par * r_par - r_perp * r_perp).sqrt() / C_LIGHT;
            return Ok(GaussianSource::new(r_perp, tau)?);
        }
        Ok(GaussianSource::new(
            s.sigma_r_nm.unwrap_or(DEFAULT_SIGMA_R),
            s.delta_tau_fs.unwrap_or(0.0),
        )?)
    }

    pub fn emission(&self) -> Result<EmissionFunction, CliError> {
        let profile = match self.flow.profile {
            FlowKind::None => FlowProfile::None,
            FlowKind::LinearRadial => FlowProfile::LinearRadial,
            FlowKind::ReversingRadial => FlowProfile::ReversingRadial,
        };
        let flow = if profile == FlowProfile::None {
            FlowBoost::none()
        } else {
            FlowBoost::new(profile, self.flow.v_over_c, self.flow.temperature_ev)?
        };
        Ok(EmissionFunction::new(self.gaussian_source()?, self.spectrum()?, flow)?)
    }

    /// HBT radii, directly or from the source's variances.
    pub fn radii(&self) -> Result<HbtRadii, CliError> {
        if self.uses_radii()? {
            let r_perp = self.source.r_perp_nm.unwrap_or(0.0);
            let r_par = self.source.r_par_nm.unwrap_or(r_perp);
            return Ok(HbtRadii::from_radii(r_perp, r_par)?);
        }
        Ok(radii_for(&self.emission()?, self.energy()?, self.engine.with_corrections, false)?)
    }

    pub fn model(&self) -> Result<ScanModel, CliError> {
        match self.engine.path {
            EnginePath::Analytic if self.uses_radii()? => Ok(ScanModel::Radii(self.radii()?)),
            _ => Ok(ScanModel::Emission(self.emission()?)),
        }
    }

    pub fn engine(&self) -> Engine {
        let e = &self.engine;
        match e.path {
            EnginePath::Analytic => Engine::Analytic {
                with_corrections: e.with_corrections,
            },
            EnginePath::Quadrature => Engine::Quadrature { mode: e.mode },
            EnginePath::Mc => Engine::MonteCarlo {
                mode: e.mode,
                n_pairs: e.n_pairs,
                seed: e.seed,
            },
        }
    }

    /// Filter rms band width δω (eV).
    pub fn delta_omega(&self) -> Result<f64, CliError> {
        let f = &self.filter;
        if let Some(w) = f.width_ev {
            if f.dlambda_nm.is_some() {
                return Err(CliError::Config("filter: give width_ev or dlambda_nm, not both".into()));
            }
            return Ok(match f.convention {
                WidthConvention::Rms => w,
                WidthConvention::Fwhm => w / sonohbt::filter::FWHM_PER_RMS,
            });
        }
        let dlambda = f.dlambda_nm.unwrap_or(DEFAULT_DLAMBDA);
        let lambda = self.filter_wavelength()?;
        if dlambda == 0.0 {
            return Ok(0.0);
        }
        Ok(FilterSpec::from_wavelength(lambda, dlambda, f.convention)?.width)
    }

    pub fn filter_wavelength(&self) -> Result<f64, CliError> {
        let f = &self.filter;
        Ok(match (f.lambda_nm, f.center_ev) {
            (Some(l), _) => l,
            (None, Some(c)) => wavelength_from_energy(c),
            (None, None) => wavelength_from_energy(self.energy()?),
        })
    }
}
