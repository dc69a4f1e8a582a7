//! Emission functions `S(x; K)`.
//!
//! The source factorizes into a normalized Gaussian space-time profile `X(x)`
//! and an energy spectrum `s(E)`. An optional flow multiplies this by the
//! first-order boosted Boltzmann factor `exp(K·v(x)/T)`, which couples the
//! emission point to the pair momentum.

use std::f64::consts::PI;

use serde::Serialize;

use crate::kinematics::{dot, Vec3};
use crate::quadrature::GaussHermite;
use crate::spectrum::Spectrum;
use crate::{Error, Result};

/// Spherical Gaussian in space (rms `sigma_r` per axis, nm) times a Gaussian
/// flash in time (rms `delta_tau`, fs, centered at `center_t`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianSource {
    pub sigma_r: f64,
    pub delta_tau: f64,
    pub center_t: f64,
}

impl GaussianSource {
    pub fn new(sigma_r: f64, delta_tau: f64) -> Result<Self> {
        if !(sigma_r >= 0.0 && delta_tau >= 0.0 && sigma_r.is_finite() && delta_tau.is_finite()) {
            return Err(Error::Domain(format!(
                "source widths must be non-negative (sigma_r = {sigma_r}, delta_tau = {delta_tau})"
            )));
        }
        if sigma_r == 0.0 && delta_tau == 0.0 {
            return Err(Error::Domain("source must have nonzero size or duration".into()));
        }
        Ok(Self {
            sigma_r,
            delta_tau,
            center_t: 0.0,
        })
    }

    pub fn with_center_t(mut self, center_t: f64) -> Self {
        self.center_t = center_t;
        self
    }

    /// Density `X(x)` of the normalized profile. Undefined (an error) when an
    /// axis has zero width, since the profile is then a distribution.
    pub fn density(&self, x: &SpaceTimePoint) -> Result<f64> {
        if self.sigma_r == 0.0 || self.delta_tau == 0.0 {
            return Err(Error::Unsupported(
                "profile with a zero-width axis has no pointwise density".into(),
            ));
        }
        let s2 = self.sigma_r * self.sigma_r;
        let r2 = dot(x.r, x.r);
        let dt = x.t - self.center_t;
        let t2 = self.delta_tau * self.delta_tau;
        let spatial = (-r2 / (2.0 * s2)).exp() / (2.0 * PI * s2).powf(1.5);
        let temporal = (-dt * dt / (2.0 * t2)).exp() / (2.0 * PI * t2).sqrt();
        Ok(spatial * temporal)
    }

    /// Gauss–Hermite points `(coordinate, probability weight)` for the three
    /// spatial axes and time. Zero-width axes collapse to one node.
    pub fn axis_points(&self, rule: &GaussHermite) -> [Vec<(f64, f64)>; 4] {
        let s = rule.normal_points(0.0, self.sigma_r);
        [
            s.clone(),
            s.clone(),
            s,
            rule.normal_points(self.center_t, self.delta_tau),
        ]
    }
}

/// A space-time point: position in nm, time in fs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpaceTimePoint {
    pub r: Vec3,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { r: [x, y, z], t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowProfile {
    None,
    /// `v(r) = v_max · r / sigma_r`, radially outward.
    LinearRadial,
    /// Linear radial profile whose sign follows `(t - center_t) / delta_tau`:
    /// collapse before the flash centroid, re-expansion after it.
    ReversingRadial,
}

/// Collective expansion of the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowBoost {
    pub v_over_c: f64,
    pub profile: FlowProfile,
    /// Local temperature (eV) of the boosted Boltzmann factor.
    pub temperature: f64,
}

impl FlowBoost {
    pub fn none() -> Self {
        Self {
            v_over_c: 0.0,
            profile: FlowProfile::None,
            temperature: 1.0,
        }
    }

    pub fn new(profile: FlowProfile, v_over_c: f64, temperature: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&v_over_c) {
            return Err(Error::Domain(format!("v/c = {v_over_c} must lie in [0, 1)")));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::Domain(format!("flow temperature {temperature} must be positive")));
        }
        Ok(Self {
            v_over_c,
            profile,
            temperature,
        })
    }

    pub fn is_static(&self) -> bool {
        self.profile == FlowProfile::None || self.v_over_c == 0.0
    }
}

impl Default for FlowBoost {
    fn default() -> Self {
        Self::none()
    }
}

/// The full emission function: profile, spectrum and flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmissionFunction {
    pub source: GaussianSource,
    pub spectrum: Spectrum,
    pub flow: FlowBoost,
}

impl EmissionFunction {
    pub fn new(source: GaussianSource, spectrum: Spectrum, flow: FlowBoost) -> Result<Self> {
        if !flow.is_static() {
            if source.sigma_r == 0.0 {
                return Err(Error::Unsupported(
                    "radial flow needs a source of nonzero size".into(),
                ));
            }
            if flow.profile == FlowProfile::ReversingRadial && source.delta_tau == 0.0 {
                return Err(Error::Unsupported(
                    "reversing flow needs a flash of nonzero duration".into(),
                ));
            }
        }
        Ok(Self {
            source,
            spectrum,
            flow,
        })
    }

    pub fn without_flow(source: GaussianSource, spectrum: Spectrum) -> Self {
        Self {
            source,
            spectrum,
            flow: FlowBoost::none(),
        }
    }

    /// Logarithm of the flow factor at `x` for pair momentum `k` (eV):
    /// `k·β(x) / T` to first order in v/c.
    pub fn ln_flow_weight(&self, x: &SpaceTimePoint, k: Vec3) -> f64 {
        if self.flow.is_static() {
            return 0.0;
        }
        let mut beta = self.flow.v_over_c / self.source.sigma_r;
        if self.flow.profile == FlowProfile::ReversingRadial {
            beta *= (x.t - self.source.center_t) / self.source.delta_tau;
        }
        beta * dot(k, x.r) / self.flow.temperature
    }

    /// `S(x; k, energy) = X(x) · s(energy) · exp(k·β(x)/T)`.
    pub fn evaluate(&self, x: &SpaceTimePoint, k: Vec3, energy: f64) -> Result<f64> {
        let s = self.spectrum.value(energy)?;
        Ok(self.source.density(x)? * s * self.ln_flow_weight(x, k).exp())
    }
}
