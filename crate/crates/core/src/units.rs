//! Unit system: energies in eV, lengths in nm, times in fs.
//!
//! Correlator exponents are products of a relative momentum (eV) and a length
//! (nm); they become dimensionless only after division by [`HBAR_C`].

use std::f64::consts::PI;

/// ħc in eV·nm.
pub const HBAR_C: f64 = 197.326_980_4;

/// Speed of light in nm/fs.
pub const C_LIGHT: f64 = 299.792_458;

/// Fraction of pairs subject to Bose symmetrization for unpolarized light
/// (only equal-helicity photon pairs interfere).
pub const LAMBDA_CHAOTIC: f64 = 0.5;

/// The constants as a value, for reports that embed them.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub hbar_c: f64,
    pub c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar_c: HBAR_C,
            c: C_LIGHT,
        }
    }
}

/// Photon energy (eV) of a vacuum wavelength (nm).
pub fn energy_from_wavelength(lambda_nm: f64) -> f64 {
    2.0 * PI * HBAR_C / lambda_nm
}

/// Vacuum wavelength (nm) of a photon energy (eV).
pub fn wavelength_from_energy(energy_ev: f64) -> f64 {
    2.0 * PI * HBAR_C / energy_ev
}

/// Energy width corresponding to a wavelength width at `lambda_nm`: |dω/dλ|·δλ.
pub fn energy_width_from_wavelength(lambda_nm: f64, dlambda_nm: f64) -> f64 {
    2.0 * PI * HBAR_C / (lambda_nm * lambda_nm) * dlambda_nm
}

/// Length scale (nm) of a flash lasting `tau_fs`.
pub fn length_from_duration(tau_fs: f64) -> f64 {
    C_LIGHT * tau_fs
}

pub fn duration_from_length(length_nm: f64) -> f64 {
    length_nm / C_LIGHT
}

/// Range of photon energies over which water is transparent enough to measure.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TransparencyWindow {
    pub min: f64,
    pub max: f64,
}

impl Default for TransparencyWindow {
    fn default() -> Self {
        Self { min: 1.5, max: 6.0 }
    }
}

impl TransparencyWindow {
    pub fn new(min: f64, max: f64) -> crate::Result<Self> {
        if !(min > 0.0 && max > min && max.is_finite()) {
            return Err(crate::Error::Domain(format!(
                "transparency window [{min}, {max}] eV is not a positive interval"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.min && omega <= self.max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_ev_is_413_nm() {
        let lambda = wavelength_from_energy(3.0);
        assert!((lambda - 413.280_7).abs() < 1e-3, "{lambda}");
    }

    #[test]
    fn one_nm_at_413_nm_is_7_26_mev() {
        let dw = energy_width_from_wavelength(413.28, 1.0);
        assert!((dw - 7.259_012_777e-3).abs() < 1e-12, "{dw}");
    }

    proptest! {
        #[test]
        fn wavelength_round_trip(lambda in 100.0f64..2000.0) {
            let back = wavelength_from_energy(energy_from_wavelength(lambda));
            prop_assert!((back - lambda).abs() <= 1e-12 * lambda);
        }
    }
}
