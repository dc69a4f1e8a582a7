//! Single-photon and pair kinematics.
//!
//! A detector pair is described by the two photon energies and the opening
//! angle φ between the detectors. The correlator depends on the pair through
//! the average momentum magnitude `E = |k_a + k_b| / 2`, the energy difference
//! `q0`, and the components of `q = k_a - k_b` perpendicular and parallel to
//! the pair momentum.

use serde::Serialize;

use crate::units::TransparencyWindow;
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// An on-shell photon: energy ω (eV) and unit propagation direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonMomentum {
    omega: f64,
    direction: Vec3,
}

impl PhotonMomentum {
    /// Builds a photon from its energy and a direction. The direction is
    /// normalized; it must not be the zero vector.
    pub fn new(omega: f64, direction: Vec3) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("photon energy {omega} eV must be positive")));
        }
        let n = norm(direction);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("photon direction must be a nonzero vector".into()));
        }
        Ok(Self {
            omega,
            direction: scale(direction, 1.0 / n),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    /// Three-momentum in eV (ħ = c = 1 for momenta).
    pub fn vector(&self) -> Vec3 {
        scale(self.direction, self.omega)
    }
}

/// Pair-level kinematic variables.
///
/// `q0` is signed (`ω_a − ω_b`); `q_perp` and `q_par` are magnitudes, since
/// the correlator depends only on their squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairKinematics {
    pub energy: f64,
    pub q0: f64,
    pub q_perp: f64,
    pub q_par: f64,
    pub phi: f64,
    pub omega_a: f64,
    pub omega_b: f64,
}

impl PairKinematics {
    /// Photon momenta in a frame where both directions lie in the x–y plane,
    /// symmetric about the x axis.
    pub fn momenta(&self) -> (PhotonMomentum, PhotonMomentum) {
        let (s, c) = (0.5 * self.phi).sin_cos();
        let a = PhotonMomentum {
            omega: self.omega_a,
            direction: [c, s, 0.0],
        };
        let b = PhotonMomentum {
            omega: self.omega_b,
            direction: [c, -s, 0.0],
        };
        (a, b)
    }

    /// Parallel component carrying the sign of `q0`.
    pub fn q_par_signed(&self) -> f64 {
        self.q_par.copysign(self.q0)
    }

    /// |q|² = q⊥² + q∥².
    pub fn q_sq(&self) -> f64 {
        self.q_perp * self.q_perp + self.q_par * self.q_par
    }

    /// `q_par − |q0|`: the error made by identifying the energy difference
    /// with the longitudinal momentum difference.
    pub fn longitudinal_identification_error(&self) -> f64 {
        self.q_par - self.q0.abs()
    }
}

fn check_energy(omega: f64, which: &str) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{which} = {omega} eV must be positive")))
    }
}

fn check_angle(phi: f64) -> Result<()> {
    if (0.0..std::f64::consts::PI).contains(&phi) {
        Ok(())
    } else {
        Err(Error::Domain(format!("opening angle {phi} rad outside [0, π)")))
    }
}

/// Pair variables from the detector settings (two energies, opening angle),
/// using the closed-form relations between (q0, φ) and (q⊥, q∥).
pub fn pair_from_detector(omega_a: f64, omega_b: f64, phi: f64) -> Result<PairKinematics> {
    check_energy(omega_a, "omega_a")?;
    check_energy(omega_b, "omega_b")?;
    if phi == std::f64::consts::PI && omega_a == omega_b {
        return Err(Error::DegenerateGeometry(
            "back-to-back photons of equal energy have zero pair momentum".into(),
        ));
    }
    check_angle(phi)?;

    let energy = 0.5
        * (omega_a * omega_a + omega_b * omega_b + 2.0 * omega_a * omega_b * phi.cos()).sqrt();
    let q0 = omega_a - omega_b;
    let t = (0.5 * phi).tan();
    let two_e = 2.0 * energy;
    // 4E² + q0⁴/4E² − 2q0² is the perfect square (2E − q0²/2E)².
    let q_perp = (two_e - q0 * q0 / two_e).abs() * t;
    let q_par = q0.abs() * (1.0 + (1.0 - q0 * q0 / (two_e * two_e)) * t * t).sqrt();

    Ok(PairKinematics {
        energy,
        q0,
        q_perp,
        q_par,
        phi,
        omega_a,
        omega_b,
    })
}

/// Pair variables from explicit photon three-momenta, by projecting
/// `q = k_a − k_b` onto the pair direction.
pub fn pair_from_vectors(a: &PhotonMomentum, b: &PhotonMomentum) -> Result<PairKinematics> {
    let ka = a.vector();
    let kb = b.vector();
    let sum = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
    let sum_norm = norm(sum);
    if sum_norm <= 1e-12 * (a.omega + b.omega) {
        return Err(Error::DegenerateGeometry(
            "photon momenta sum to zero; pair direction undefined".into(),
        ));
    }
    let k_hat = scale(sum, 1.0 / sum_norm);
    let q = [ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]];
    let q_par = dot(q, k_hat).abs();
    let q_perp = norm(cross(q, k_hat));
    let phi = norm(cross(a.direction, b.direction)).atan2(dot(a.direction, b.direction));

    Ok(PairKinematics {
        energy: 0.5 * sum_norm,
        q0: a.omega - b.omega,
        q_perp,
        q_par,
        phi,
        omega_a: a.omega,
        omega_b: b.omega,
    })
}

/// ξ = 2E·tan(φ/2), the transverse relative momentum of an equal-energy pair.
pub fn xi_variable(energy: f64, phi: f64) -> Result<f64> {
    check_angle(phi)?;
    Ok(2.0 * energy * (0.5 * phi).tan())
}

/// Opening angle at which an equal-energy pair of pair energy `energy`
/// reaches the transverse momentum `xi`.
pub fn phi_from_xi(energy: f64, xi: f64) -> f64 {
    2.0 * (xi / (2.0 * energy)).atan()
}

/// Largest opening angle for equal-energy photons whose individual energies
/// `E / cos(φ/2)` stay inside the window.
pub fn max_opening_angle(energy: f64, window: &TransparencyWindow) -> Result<f64> {
    if !(energy > window.min && energy < window.max) {
        return Err(Error::Domain(format!(
            "pair energy {energy} eV has no accessible opening angle in [{}, {}] eV",
            window.min, window.max
        )));
    }
    Ok(2.0 * (energy / window.max).acos())
}

/// Largest ξ reachable at fixed `energy` inside the window.
pub fn max_accessible_xi(energy: f64, window: &TransparencyWindow) -> Result<f64> {
    let phi_max = max_opening_angle(energy, window)?;
    xi_variable(energy, phi_max)
}

/// Equal-energy pair at opening angle `phi` with pair energy `energy`.
pub fn transverse_pair(energy: f64, phi: f64) -> Result<PairKinematics> {
    check_angle(phi)?;
    let omega = energy / (0.5 * phi).cos();
    pair_from_detector(omega, omega, phi)
}

/// Collinear pair with pair energy `energy` and energy difference `q0`.
pub fn longitudinal_pair(energy: f64, q0: f64) -> Result<PairKinematics> {
    pair_from_detector(energy + 0.5 * q0, energy - 0.5 * q0, 0.0)
}
