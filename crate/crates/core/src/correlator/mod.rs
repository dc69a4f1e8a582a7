//! Two-photon correlation function.
//!
//! Three independent routes are provided: the closed-form Gaussian
//! correlator parameterized by HBT radii, direct quadrature of the Fourier
//! transform of the emission function, and Monte Carlo sampling of emission
//! point pairs.

mod monte_carlo;
mod numeric;
mod scan;

pub use monte_carlo::{mc_correlator, MC_BATCH_SIZE, MC_MIN_PAIRS};
pub use numeric::{numeric_correlator, MAX_QUADRATURE_PHASE, QUADRATURE_TOLERANCE};
pub use scan::{linspace, logspace, scan, Engine, ScanKind, ScanModel, ScanRequest, ScanResult};

use serde::{Deserialize, Serialize};

use crate::kinematics::PairKinematics;
use crate::moments::HbtRadii;
use crate::source::GaussianSource;
use crate::spectrum::Spectrum;
use crate::units::{C_LIGHT, HBAR_C, LAMBDA_CHAOTIC};
use crate::Result;

/// One sampled value of the correlator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorPoint {
    /// Scan coordinate (φ in rad, q0 in eV, or flash duration in fs).
    pub abscissa: f64,
    pub kinematics: PairKinematics,
    pub value: f64,
    /// Standard error; zero for deterministic routes.
    pub stat_error: f64,
}

/// Which photon energies enter the spectra of the correlator ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    /// Numerator and denominator both at the on-shell pair energy `E = |K|`.
    OnShell,
    /// Numerator at `K0 = (ω_a + ω_b)/2`, denominator spectra at `ω_a`, `ω_b`.
    Exact,
}

/// `1 + λ exp(−(R_perp² q_perp² + R_par² q_par²)/(ħc)²)` with λ = ½.
pub fn gaussian_correlator(radii: &HbtRadii, k: &PairKinematics) -> CorrelatorPoint {
    gaussian_correlator_with(radii, k, LAMBDA_CHAOTIC)
}

pub fn gaussian_correlator_with(radii: &HbtRadii, k: &PairKinematics, lambda: f64) -> CorrelatorPoint {
    let exponent = (radii.r_perp_sq * k.q_perp * k.q_perp + radii.r_par_sq * k.q_par * k.q_par)
        / (HBAR_C * HBAR_C);
    CorrelatorPoint {
        abscissa: 0.0,
        kinematics: *k,
        value: 1.0 + lambda * (-exponent).exp(),
        stat_error: 0.0,
    }
}

/// Ratio of spectra by which the exact-energy correlator differs from the
/// on-shell one for a factorized source: `s(K0)² / (s(ω_a) s(ω_b))`.
pub fn spectral_ratio(spectrum: &Spectrum, k: &PairKinematics, mode: EnergyMode) -> Result<f64> {
    match mode {
        EnergyMode::OnShell => {
            spectrum.value(k.energy)?;
            Ok(1.0)
        }
        EnergyMode::Exact => {
            let k0 = 0.5 * (k.omega_a + k.omega_b);
            let ln = 2.0 * spectrum.ln_value(k0)?
                - spectrum.ln_value(k.omega_a)?
                - spectrum.ln_value(k.omega_b)?;
            Ok(ln.exp())
        }
    }
}

/// Closed form for a static Gaussian source: its Fourier transform is
/// Gaussian, `|X̃(q)|² = exp(−(σ_r²|q|² + c²δτ² q0²)/(ħc)²)`, times the
/// mode's spectral ratio.
pub fn static_source_correlator(
    source: &GaussianSource,
    spectrum: &Spectrum,
    k: &PairKinematics,
    mode: EnergyMode,
    lambda: f64,
) -> Result<CorrelatorPoint> {
    let ratio = spectral_ratio(spectrum, k, mode)?;
    let ct = C_LIGHT * source.delta_tau;
    let exponent = (source.sigma_r * source.sigma_r * k.q_sq() + ct * ct * k.q0 * k.q0)
        / (HBAR_C * HBAR_C);
    Ok(CorrelatorPoint {
        abscissa: 0.0,
        kinematics: *k,
        value: 1.0 + lambda * ratio * (-exponent).exp(),
        stat_error: 0.0,
    })
}
