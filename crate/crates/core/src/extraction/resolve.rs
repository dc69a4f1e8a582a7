//! Whether an instrument can resolve a source scale.

use serde::{Deserialize, Serialize};

use super::KeyValue;
use crate::kinematics::{max_accessible_xi, phi_from_xi};
use crate::units::{energy_width_from_wavelength, TransparencyWindow, C_LIGHT, HBAR_C};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instrument {
    /// Smallest opening angle that can be set, degrees.
    pub angular_resolution_deg: f64,
    /// Angular acceptance of each detector, degrees.
    pub aperture_deg: f64,
    /// Filter rms band width δω, eV.
    pub delta_omega: f64,
}

impl Default for Instrument {
    fn default() -> Self {
        Self {
            angular_resolution_deg: 1.0,
            aperture_deg: 1.0,
            delta_omega: energy_width_from_wavelength(413.28, 1.0),
        }
    }
}

impl Instrument {
    pub fn validate(&self) -> Result<()> {
        if !(self.angular_resolution_deg >= 0.0 && self.aperture_deg >= 0.0 && self.delta_omega >= 0.0) {
            return Err(Error::Domain("instrument settings must be non-negative".into()));
        }
        Ok(())
    }
}

/// Verdict thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Relative drop of `C − 1` that counts as a resolved fall-off (1 − 1/e).
    pub resolved_suppression: f64,
    /// Smallest drop at the window edge still called marginal.
    pub marginal_suppression: f64,
    /// `δω R_par/ħc` up to which the longitudinal fall-off is resolved.
    pub longitudinal_resolvable: f64,
    /// `δω R_par/ħc` up to which it is marginal.
    pub longitudinal_marginal: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            resolved_suppression: 1.0 - (-1f64).exp(),
            marginal_suppression: 0.2,
            longitudinal_resolvable: 0.5,
            longitudinal_marginal: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    TransverseRadius,
    PulseLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Resolvable,
    Marginal,
    Unresolvable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitingFactor {
    WindowEdge,
    AngularResolution,
    FilterBandwidth,
}

/// Instrument setting needed to see the 1/e fall-off.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequiredSetting {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvabilityReport {
    pub target: Target,
    pub verdict: Verdict,
    /// What prevents a clean measurement; `None` when resolvable.
    pub limiting_factor: Option<LimitingFactor>,
    pub required_setting: RequiredSetting,
    /// Relative drop of `C − 1` at the edge of the accessible range.
    pub edge_suppression: f64,
}

fn snake<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

impl KeyValue for ResolvabilityReport {
    fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("target".into(), snake(&self.target)),
            ("verdict".into(), snake(&self.verdict)),
            (
                "limiting_factor".into(),
                self.limiting_factor.as_ref().map_or_else(|| "none".into(), snake),
            ),
            ("required_setting".into(), self.required_setting.name.clone()),
            ("required_value".into(), crate::io::format_f64(self.required_setting.value)),
            ("required_unit".into(), self.required_setting.unit.clone()),
            ("edge_suppression".into(), crate::io::format_f64(self.edge_suppression)),
        ]
    }
}

/// Transverse radius `r_perp` (nm) scanned at pair energy `energy`.
///
/// The 1/e point of `C − 1` sits at `ξ_e = ħc/R_perp`, reached at opening
/// angle `φ_e = 2 atan(ξ_e/2E)`. Resolvable when `ξ_e` fits in the window and
/// `φ_e` exceeds the instrument's angular limits; marginal when only the
/// window edge is short but the drop there reaches the marginal threshold.
pub fn resolve_transverse(
    r_perp: f64,
    energy: f64,
    window: &TransparencyWindow,
    instrument: &Instrument,
    thresholds: &Thresholds,
) -> Result<ResolvabilityReport> {
    instrument.validate()?;
    if !(r_perp > 0.0) {
        return Err(Error::Domain(format!("R_perp = {r_perp} nm must be positive")));
    }
    let xi_max = max_accessible_xi(energy, window)?;
    let edge_suppression = 1.0 - (-(r_perp * xi_max / HBAR_C).powi(2)).exp();
    // Point where the drop reaches the resolved threshold.
    let xi_e = HBAR_C / r_perp * (-(1.0 - thresholds.resolved_suppression).ln()).sqrt();
    let phi_e_deg = phi_from_xi(energy, xi_e).to_degrees();
    let angular_limit = instrument.angular_resolution_deg.max(instrument.aperture_deg);

    let (verdict, limiting_factor, required_setting) = if xi_e > xi_max {
        let verdict = if edge_suppression >= thresholds.marginal_suppression {
            Verdict::Marginal
        } else {
            Verdict::Unresolvable
        };
        let req = RequiredSetting {
            name: "xi".into(),
            value: xi_e,
            unit: "eV".into(),
        };
        (verdict, Some(LimitingFactor::WindowEdge), req)
    } else {
        let req = RequiredSetting {
            name: "opening_angle".into(),
            value: phi_e_deg,
            unit: "deg".into(),
        };
        if phi_e_deg > angular_limit {
            (Verdict::Resolvable, None, req)
        } else {
            (Verdict::Unresolvable, Some(LimitingFactor::AngularResolution), req)
        }
    };
    Ok(ResolvabilityReport {
        target: Target::TransverseRadius,
        verdict,
        limiting_factor,
        required_setting,
        edge_suppression,
    })
}

/// Flash duration `delta_tau` (fs), taking `R_par = c δτ`. The longitudinal
/// correlator falls to 1/e at `q0 = ħc/R_par`; the filter band width must
/// stay below that scale.
pub fn resolve_pulse_length(
    delta_tau: f64,
    instrument: &Instrument,
    thresholds: &Thresholds,
) -> Result<ResolvabilityReport> {
    instrument.validate()?;
    if !(delta_tau > 0.0) {
        return Err(Error::Domain(format!("flash duration {delta_tau} fs must be positive")));
    }
    let r_par = C_LIGHT * delta_tau;
    let scale = HBAR_C / r_par;
    let x = instrument.delta_omega / scale;
    let verdict = if x <= thresholds.longitudinal_resolvable {
        Verdict::Resolvable
    } else if x <= thresholds.longitudinal_marginal {
        Verdict::Marginal
    } else {
        Verdict::Unresolvable
    };
    Ok(ResolvabilityReport {
        target: Target::PulseLength,
        verdict,
        limiting_factor: (verdict != Verdict::Resolvable).then_some(LimitingFactor::FilterBandwidth),
        required_setting: RequiredSetting {
            name: "delta_omega".into(),
            value: scale,
            unit: "eV".into(),
        },
        // Band-width dilution of the intercept.
        edge_suppression: 1.0 - 1.0 / (1.0 + 4.0 * x * x).sqrt(),
    })
}
