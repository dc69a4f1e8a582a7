//! Recovering source parameters from correlator data.

mod fit;
mod resolve;

pub use fit::{fit_scan, fit_scan_with, FitMethod, FitOptions, FitResult};
pub use resolve::{
    resolve_pulse_length, resolve_transverse, Instrument, LimitingFactor, RequiredSetting,
    ResolvabilityReport, Target, Thresholds, Verdict,
};

use serde::Serialize;

use crate::units::{C_LIGHT, HBAR_C, LAMBDA_CHAOTIC};
use crate::{Error, Result};

/// Flash duration (fs) from the band-width diluted intercept
/// `C(0) = 1 + ½/√(1 + 4δω²R_par²/(ħc)²)`, taking `R_par = c δτ`.
pub fn pulse_length_from_intercept(measured_intercept: f64, delta_omega: f64) -> Result<f64> {
    let c = measured_intercept;
    let full = 1.0 + LAMBDA_CHAOTIC;
    if !c.is_finite() || c <= 1.0 {
        return Err(Error::ChaoticityViolation(c));
    }
    if (c - full).abs() <= 4.0 * f64::EPSILON {
        return Ok(0.0);
    }
    if c > full {
        return Err(Error::Domain(format!(
            "intercept {c} exceeds the chaotic limit {full}; no duration reproduces it"
        )));
    }
    if !(delta_omega > 0.0) {
        return Err(Error::Domain(format!(
            "band width {delta_omega} eV cannot dilute the intercept"
        )));
    }
    let a = LAMBDA_CHAOTIC / (c - 1.0);
    let r_par = HBAR_C / (2.0 * delta_omega) * (a * a - 1.0).sqrt();
    Ok(r_par / C_LIGHT)
}

/// Flat `key=value` lines, one per field.
pub trait KeyValue {
    fn key_values(&self) -> Vec<(String, String)>;

    fn to_key_value_text(&self) -> String {
        self.key_values()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    fn to_json(&self) -> String
    where
        Self: Serialize,
    {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
