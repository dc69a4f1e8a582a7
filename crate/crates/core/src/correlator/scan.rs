//! Transverse and longitudinal scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::monte_carlo::mc_scan;
use super::numeric::numeric_correlator_with;
use super::{gaussian_correlator_with, CorrelatorPoint, EnergyMode};
use crate::kinematics::{longitudinal_pair, transverse_pair, PairKinematics};
use crate::moments::{radii_for, HbtRadii};
use crate::source::EmissionFunction;
use crate::units::{TransparencyWindow, LAMBDA_CHAOTIC};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// q0 = 0, abscissa φ (rad).
    Transverse,
    /// φ = 0, abscissa q0 (eV).
    Longitudinal,
    /// q = 0 with band-pass filters, abscissa flash duration (fs).
    Intercept,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Transverse => "transverse",
            ScanKind::Longitudinal => "longitudinal",
            ScanKind::Intercept => "intercept",
        }
    }

    pub fn abscissa_name(self) -> &'static str {
        match self {
            ScanKind::Transverse => "phi_rad",
            ScanKind::Longitudinal => "q0_eV",
            ScanKind::Intercept => "delta_tau_fs",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "transverse" => Ok(ScanKind::Transverse),
            "longitudinal" => Ok(ScanKind::Longitudinal),
            "intercept" => Ok(ScanKind::Intercept),
            other => Err(Error::Domain(format!("unknown scan kind `{other}`"))),
        }
    }

    /// Pair kinematics at one abscissa value.
    pub fn kinematics(self, energy: f64, abscissa: f64) -> Result<PairKinematics> {
        match self {
            ScanKind::Transverse => transverse_pair(energy, abscissa),
            ScanKind::Longitudinal => longitudinal_pair(energy, abscissa),
            ScanKind::Intercept => transverse_pair(energy, 0.0),
        }
    }
}

const WINDOW_SLACK: f64 = 1e-12;

/// What to scan and where.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRequest {
    pub kind: ScanKind,
    /// Pair energy E (eV).
    pub energy: f64,
    /// Abscissa values, strictly increasing.
    pub grid: Vec<f64>,
    /// Drop grid points whose photon energies leave this window.
    pub window: Option<TransparencyWindow>,
    pub lambda: f64,
}

impl ScanRequest {
    pub fn new(kind: ScanKind, energy: f64, grid: Vec<f64>) -> Self {
        Self {
            kind,
            energy,
            grid,
            window: None,
            lambda: LAMBDA_CHAOTIC,
        }
    }

    pub fn with_window(mut self, window: TransparencyWindow) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// `(abscissa, kinematics)` for each accessible grid point.
    pub fn points(&self) -> Result<Vec<(f64, PairKinematics)>> {
        if self.kind == ScanKind::Intercept {
            return Err(Error::Unsupported(
                "intercept curves come from the filter model, not a momentum scan".into(),
            ));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::Domain(format!("chaoticity {} outside (0, 1]", self.lambda)));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("scan abscissae must be strictly increasing".into()));
        }
        let mut out = Vec::with_capacity(self.grid.len());
        for &x in &self.grid {
            if let Some(w) = &self.window {
                let k = match self.kind.kinematics(self.energy, x) {
                    Ok(k) => k,
                    Err(_) => continue,
                };
                // Grid points placed exactly on the window edge round either way.
                let inside = |om: f64| om >= w.min * (1.0 - WINDOW_SLACK) && om <= w.max * (1.0 + WINDOW_SLACK);
                if inside(k.omega_a) && inside(k.omega_b) {
                    out.push((x, k));
                }
            } else {
                out.push((x, self.kind.kinematics(self.energy, x)?));
            }
        }
        if out.is_empty() {
            return Err(Error::Domain(format!(
                "no {} scan point at E = {} eV lies inside the accessible window",
                self.kind.name(),
                self.energy
            )));
        }
        Ok(out)
    }
}

/// Evenly spaced grid of `n` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Logarithmically spaced grid of `n` points on `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

/// Source of the correlator.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanModel {
    Radii(HbtRadii),
    Emission(EmissionFunction),
}

/// How to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "path")]
pub enum Engine {
    /// Closed-form Gaussian; for an emission function the radii come from
    /// its variances, with or without the spectral corrections.
    Analytic { with_corrections: bool },
    Quadrature { mode: EnergyMode },
    MonteCarlo { mode: EnergyMode, n_pairs: u64, seed: u64 },
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Analytic { .. } => "analytic",
            Engine::Quadrature { .. } => "quadrature",
            Engine::MonteCarlo { .. } => "mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub kind: ScanKind,
    pub energy: f64,
    pub lambda: f64,
    pub points: Vec<CorrelatorPoint>,
    pub label: String,
    /// Extra `key=value` provenance carried into the CSV header.
    pub provenance: Vec<(String, String)>,
}

impl ScanResult {
    pub fn abscissae(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.abscissa).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// ξ = 2E tan(φ/2) for each point of a transverse scan (equal to q_perp).
    pub fn xi(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.kinematics.q_perp).collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Evaluates the correlator over the request's grid.
pub fn scan(model: &ScanModel, request: &ScanRequest, engine: Engine) -> Result<ScanResult> {
    let pts = request.points()?;
    let lambda = request.lambda;
    let mut provenance = vec![("engine".to_string(), engine.name().to_string())];
    let points = match (model, engine) {
        (ScanModel::Radii(r), Engine::Analytic { .. }) => analytic_points(r, &pts, lambda),
        (ScanModel::Emission(e), Engine::Analytic { with_corrections }) => {
            let r = radii_for(e, request.energy, with_corrections, false)?;
            provenance.push(("with_corrections".into(), with_corrections.to_string()));
            analytic_points(&r, &pts, lambda)
        }
        (ScanModel::Emission(e), Engine::Quadrature { mode }) => {
            provenance.push(("mode".into(), mode_name(mode).into()));
            pts.par_iter()
                .map(|&(x, k)| {
                    let (a, b) = k.momenta();
                    numeric_correlator_with(e, &a, &b, mode, lambda).map(|p| CorrelatorPoint {
                        abscissa: x,
                        kinematics: k,
                        ..p
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        (ScanModel::Emission(e), Engine::MonteCarlo { mode, n_pairs, seed }) => {
            provenance.push(("mode".into(), mode_name(mode).into()));
            provenance.push(("n_pairs".into(), n_pairs.to_string()));
            provenance.push(("seed".into(), seed.to_string()));
            mc_scan(e, &pts, mode, lambda, n_pairs, seed)?
        }
        (ScanModel::Radii(_), _) => {
            return Err(Error::Unsupported(
                "quadrature and Monte Carlo engines need an emission function, not radii".into(),
            ))
        }
    };
    Ok(ScanResult {
        kind: request.kind,
        energy: request.energy,
        lambda,
        points,
        label: String::new(),
        provenance,
    })
}

pub(crate) fn mode_name(mode: EnergyMode) -> &'static str {
    match mode {
        EnergyMode::OnShell => "on_shell",
        EnergyMode::Exact => "exact",
    }
}

fn analytic_points(r: &HbtRadii, pts: &[(f64, PairKinematics)], lambda: f64) -> Vec<CorrelatorPoint> {
    pts.iter()
        .map(|&(x, k)| CorrelatorPoint {
            abscissa: x,
            ..gaussian_correlator_with(r, &k, lambda)
        })
        .collect()
}
