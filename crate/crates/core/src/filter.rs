//! Gaussian band-pass filters and the band-width averaged correlator.
//!
//! A filter is the normalized profile
//! `f(ω) = exp(−(ω − ω̄)²/2δω²) / √(2π δω²)` with `δω` its rms width.

use serde::{Deserialize, Serialize};

use crate::correlator::{CorrelatorPoint, ScanKind, ScanResult};
use crate::kinematics::pair_from_detector;
use crate::quadrature::{GaussHermite, GaussLegendre};
use crate::source::GaussianSource;
use crate::spectrum::Spectrum;
use crate::units::{energy_from_wavelength, energy_width_from_wavelength, C_LIGHT, HBAR_C, LAMBDA_CHAOTIC};
use crate::{Error, Result};

/// Profiles are integrated over `±FILTER_SUPPORT` standard deviations.
pub const FILTER_SUPPORT: f64 = 5.0;

/// Largest `width / center` accepted (narrow-band filters only).
pub const MAX_RELATIVE_WIDTH: f64 = 0.1;

/// FWHM / rms for a Gaussian, `2√(2 ln 2)`.
pub const FWHM_PER_RMS: f64 = 2.354_820_045_030_949_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    #[default]
    Rms,
    Fwhm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterSpec {
    /// Central photon energy ω̄ (eV).
    pub center: f64,
    /// rms width δω (eV).
    pub width: f64,
}

impl FilterSpec {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(center > 0.0 && center.is_finite()) {
            return Err(Error::Domain(format!("filter center {center} eV must be positive")));
        }
        if !(width > 0.0 && width / center < MAX_RELATIVE_WIDTH) {
            return Err(Error::Domain(format!(
                "filter width {width} eV must be positive and below {MAX_RELATIVE_WIDTH} of the center {center} eV"
            )));
        }
        Ok(Self { center, width })
    }

    pub fn from_fwhm(center: f64, fwhm: f64) -> Result<Self> {
        Self::new(center, fwhm / FWHM_PER_RMS)
    }

    /// Filter given by its central wavelength and band width (nm).
    pub fn from_wavelength(lambda_nm: f64, dlambda_nm: f64, convention: WidthConvention) -> Result<Self> {
        if !(lambda_nm > 0.0) {
            return Err(Error::Domain(format!("wavelength {lambda_nm} nm must be positive")));
        }
        let width = energy_width_from_wavelength(lambda_nm, dlambda_nm);
        let center = energy_from_wavelength(lambda_nm);
        match convention {
            WidthConvention::Rms => Self::new(center, width),
            WidthConvention::Fwhm => Self::from_fwhm(center, width),
        }
    }

    /// Normalized profile `f(ω)`, eV⁻¹.
    pub fn density(&self, omega: f64) -> f64 {
        gaussian_density(omega, self.center, self.width)
    }

    /// Peak-normalized transmission, 1 at the center.
    pub fn transmission(&self, omega: f64) -> f64 {
        let u = (omega - self.center) / self.width;
        (-0.5 * u * u).exp()
    }

    /// Fraction of a spectrum passed by the filter, `∫ T(ω) s(ω) dω`.
    pub fn acceptance(&self, spectrum: &Spectrum) -> Result<f64> {
        check_support(spectrum, self.center, self.width)?;
        let rule = GaussLegendre::new(8);
        let lo = self.center - FILTER_SUPPORT * self.width;
        let hi = self.center + FILTER_SUPPORT * self.width;
        // Inside the checked support the spectrum is defined.
        let v = rule.integrate_composite(lo, hi, 16, |w| {
            self.transmission(w) * spectrum.value(w).unwrap_or(f64::NAN)
        });
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("spectrum undefined inside the filter at {} eV", self.center)))
        }
    }
}

fn gaussian_density(x: f64, mean: f64, sigma: f64) -> f64 {
    let u = (x - mean) / sigma;
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt()
}

fn check_support(spectrum: &Spectrum, center: f64, width: f64) -> Result<()> {
    let lo = center - FILTER_SUPPORT * width;
    let hi = center + FILTER_SUPPORT * width;
    if !(spectrum.contains(lo) && spectrum.contains(hi)) {
        return Err(Error::Domain(format!(
            "filter support [{lo}, {hi}] eV leaves the spectrum domain"
        )));
    }
    Ok(())
}

/// Both sides of `f_a(ω₁) f_b(ω₂) = f_{K0,δω'}(ω̄) f_{q0,2δω'}(Δω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

pub fn filter_product_identity_check(
    fa: &FilterSpec,
    fb: &FilterSpec,
    omega_1: f64,
    omega_2: f64,
) -> Result<IdentityCheck> {
    if (fa.width - fb.width).abs() > 1e-12 * fa.width.max(fb.width) {
        return Err(Error::Unsupported(format!(
            "product identity needs equal filter widths ({} vs {} eV)",
            fa.width, fb.width
        )));
    }
    let dw = fa.width / std::f64::consts::SQRT_2;
    let k0 = 0.5 * (fa.center + fb.center);
    let q0 = fa.center - fb.center;
    let mean = 0.5 * (omega_1 + omega_2);
    let diff = omega_1 - omega_2;
    Ok(IdentityCheck {
        lhs: fa.density(omega_1) * fb.density(omega_2),
        rhs: gaussian_density(mean, k0, dw) * gaussian_density(diff, q0, 2.0 * dw),
    })
}

/// `1 + ½ / √(1 + 4 δω² R_par² / (ħc)²)`.
pub fn effective_intercept(delta_omega: f64, r_par: f64) -> f64 {
    let x = delta_omega * r_par / HBAR_C;
    1.0 + LAMBDA_CHAOTIC / (1.0 + 4.0 * x * x).sqrt()
}

/// Flash duration (fs) at which `δω · c δτ / ħc = 1`.
pub fn knee_duration(delta_omega: f64) -> f64 {
    HBAR_C / (C_LIGHT * delta_omega)
}

/// How the single-photon spectra in the denominator are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// Full double integral over both filter profiles.
    #[default]
    Full,
    /// Spectrum taken constant across the filter gap.
    Smoothness,
}

/// Gauss–Hermite nodes of `N(mean, sigma²)` inside `±FILTER_SUPPORT·sigma`,
/// renormalized to unit total weight.
fn truncated_normal(rule: &GaussHermite, mean: f64, sigma: f64) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = rule
        .normal_points(mean, sigma)
        .into_iter()
        .filter(|(x, _)| (x - mean).abs() <= FILTER_SUPPORT * sigma)
        .collect();
    let total: f64 = pts.iter().map(|p| p.1).sum();
    pts.into_iter().map(|(x, w)| (x, w / total)).collect()
}

/// Correlator seen through the two filters: numerator and denominator are
/// convolved with the filter profiles, with the photon energy mean ω̄ on a
/// Gauss–Hermite grid of `n_quad` nodes and the energy difference Δω on a
/// composite Gauss–Legendre grid fine enough to resolve the source.
pub fn averaged_correlator(
    source: &GaussianSource,
    spectrum: &Spectrum,
    fa: &FilterSpec,
    fb: &FilterSpec,
    phi: f64,
    n_quad: usize,
    denominator: Denominator,
) -> Result<CorrelatorPoint> {
    if (fa.width - fb.width).abs() > 1e-12 * fa.width.max(fb.width) {
        return Err(Error::Unsupported("averaging assumes equal filter widths".into()));
    }
    if n_quad == 0 {
        return Err(Error::Domain("n_quad must be positive".into()));
    }
    let kin = pair_from_detector(fa.center, fb.center, phi)?;
    check_support(spectrum, fa.center, fa.width)?;
    check_support(spectrum, fb.center, fb.width)?;

    let dw = fa.width / std::f64::consts::SQRT_2;
    let diff_sigma = 2.0 * dw;
    let (sh, ch) = (0.5 * phi).sin_cos();
    let ct = C_LIGHT * source.delta_tau;
    let hc2 = HBAR_C * HBAR_C;
    let s2 = source.sigma_r * source.sigma_r;

    // Δω grid: panels no wider than a quarter of the narrower scale.
    let r_max = (s2 + ct * ct).sqrt();
    let scale = if r_max > 0.0 { diff_sigma.min(HBAR_C / r_max) } else { diff_sigma };
    let half = FILTER_SUPPORT * diff_sigma;
    let panels = ((2.0 * half) / (0.25 * scale)).ceil().max(4.0) as usize;
    let gl = GaussLegendre::new(8);

    let gh = GaussHermite::new(n_quad);
    let k0 = 0.5 * (kin.omega_a + kin.omega_b);
    let outer = truncated_normal(&gh, k0, dw);

    let mut num = 0.0;
    for &(w_bar, weight) in &outer {
        let s = spectrum.value(w_bar)?;
        // |q|² = 4ω̄² sin²(φ/2) + Δω² cos²(φ/2) for unit e_a, e_b.
        let transverse = 4.0 * w_bar * w_bar * sh * sh;
        let inner = gl.integrate_composite(kin.q0 - half, kin.q0 + half, panels, |d| {
            let q_sq = transverse + d * d * ch * ch;
            gaussian_density(d, kin.q0, diff_sigma) * (-(s2 * q_sq + ct * ct * d * d) / hc2).exp()
        });
        num += weight * s * s * inner;
    }

    let den = match denominator {
        Denominator::Smoothness => {
            let mut d = 0.0;
            for &(w_bar, weight) in &outer {
                let s = spectrum.value(w_bar)?;
                d += weight * s * s;
            }
            d
        }
        Denominator::Full => {
            let diffs = truncated_normal(&gh, kin.q0, diff_sigma);
            let mut d = 0.0;
            for &(w_bar, wo) in &outer {
                for &(delta, wi) in &diffs {
                    d += wo * wi * spectrum.value(w_bar + 0.5 * delta)? * spectrum.value(w_bar - 0.5 * delta)?;
                }
            }
            d
        }
    };

    Ok(CorrelatorPoint {
        abscissa: phi,
        kinematics: kin,
        value: 1.0 + LAMBDA_CHAOTIC * num / den,
        stat_error: 0.0,
    })
}

/// Effective intercept tabulated against flash duration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterceptCurve {
    pub scan: ScanResult,
    pub delta_omega: f64,
    /// δτ* (fs) where `δω · c δτ / ħc = 1`; infinite for a zero band width.
    pub knee_fs: f64,
}

/// `effective_intercept(δω, c δτ)` for each flash duration (fs) in the grid.
pub fn intercept_curve(delta_lambda: f64, lambda_center: f64, tau_grid_fs: &[f64]) -> Result<InterceptCurve> {
    if !(delta_lambda >= 0.0 && lambda_center > 0.0) {
        return Err(Error::Domain(format!(
            "invalid filter: δλ = {delta_lambda} nm at λ = {lambda_center} nm"
        )));
    }
    if tau_grid_fs.is_empty() {
        return Err(Error::Domain("empty flash-duration grid".into()));
    }
    if tau_grid_fs.windows(2).any(|w| !(w[1] > w[0])) || tau_grid_fs[0] < 0.0 {
        return Err(Error::Domain("flash durations must be non-negative and strictly increasing".into()));
    }
    let energy = energy_from_wavelength(lambda_center);
    let delta_omega = energy_width_from_wavelength(lambda_center, delta_lambda);
    let kin = ScanKind::Intercept.kinematics(energy, 0.0)?;
    let points = tau_grid_fs
        .iter()
        .map(|&tau| CorrelatorPoint {
            abscissa: tau,
            kinematics: kin,
            value: effective_intercept(delta_omega, C_LIGHT * tau),
            stat_error: 0.0,
        })
        .collect();
    let knee_fs = if delta_omega > 0.0 { knee_duration(delta_omega) } else { f64::INFINITY };
    Ok(InterceptCurve {
        scan: ScanResult {
            kind: ScanKind::Intercept,
            energy,
            lambda: LAMBDA_CHAOTIC,
            points,
            label: String::new(),
            provenance: vec![
                ("dlambda_nm".into(), delta_lambda.to_string()),
                ("lambda_nm".into(), lambda_center.to_string()),
                ("delta_omega_eV".into(), delta_omega.to_string()),
                ("knee_fs".into(), knee_fs.to_string()),
            ],
        },
        delta_omega,
        knee_fs,
    })
}
