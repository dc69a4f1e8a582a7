//! Correlator by direct quadrature of the emission function's Fourier
//! transform.

use rayon::prelude::*;

use super::{CorrelatorPoint, EnergyMode};
use crate::kinematics::{norm, pair_from_vectors, PhotonMomentum, Vec3};
use crate::quadrature::GaussHermite;
use crate::source::{EmissionFunction, SpaceTimePoint};
use crate::units::{C_LIGHT, HBAR_C, LAMBDA_CHAOTIC};
use crate::{Error, Result};

/// Largest `|q|·R/ħc` the Gauss–Hermite grid (at most 64 nodes per axis)
/// resolves; beyond it the transform is refused.
pub const MAX_QUADRATURE_PHASE: f64 = 10.0;

/// Convergence target on `|∫S e^{iqx}|² / (∫S)²` between successive orders.
pub const QUADRATURE_TOLERANCE: f64 = 1e-7;

const ORDERS: [usize; 3] = [16, 32, 64];

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    re: f64,
    im: f64,
    weight: f64,
}

/// `∫d⁴x S(x; k) e^{iq·x}` up to the constant spectrum factor, with the
/// Gaussian profile absorbed into the quadrature weights. Returns the complex
/// transform and the plain integral `∫d⁴x S(x; k)`.
fn transform(emission: &EmissionFunction, k: Vec3, q0: f64, q: Vec3, rule: &GaussHermite) -> Sums {
    let [xs, ys, zs, ts] = emission.source.axis_points(rule);
    // e^{iq·x} with q·x = q0 c t − q⃗·x⃗, all over ħc; factorizes per axis.
    let phases = |pts: &[(f64, f64)], f: f64| -> Vec<(f64, f64, f64, f64)> {
        pts.iter()
            .map(|&(x, w)| {
                let (s, c) = (f * x / HBAR_C).sin_cos();
                (x, w, c, s)
            })
            .collect()
    };
    let px = phases(&xs, -q[0]);
    let py = phases(&ys, -q[1]);
    let pz = phases(&zs, -q[2]);
    let pt = phases(&ts, q0 * C_LIGHT);
    let flowing = !emission.flow.is_static();

    let slabs: Vec<Sums> = px
        .par_iter()
        .map(|&(x, wx, cx, sx)| {
            let mut acc = Sums::default();
            for &(y, wy, cy, sy) in &py {
                let (cxy, sxy) = (cx * cy - sx * sy, cx * sy + sx * cy);
                for &(z, wz, cz, sz) in &pz {
                    let (cxyz, sxyz) = (cxy * cz - sxy * sz, cxy * sz + sxy * cz);
                    let wxyz = wx * wy * wz;
                    for &(t, wt, ct, st) in &pt {
                        let mut w = wxyz * wt;
                        if flowing {
                            let p = SpaceTimePoint::new(x, y, z, t);
                            w *= emission.ln_flow_weight(&p, k).exp();
                        }
                        acc.re += w * (cxyz * ct - sxyz * st);
                        acc.im += w * (cxyz * st + sxyz * ct);
                        acc.weight += w;
                    }
                }
            }
            acc
        })
        .collect();
    slabs.into_iter().fold(Sums::default(), |a, b| Sums {
        re: a.re + b.re,
        im: a.im + b.im,
        weight: a.weight + b.weight,
    })
}

/// `1 + ½ |∫S e^{iqx}|² / normalization` evaluated by tensor-product
/// Gauss–Hermite quadrature, escalating the order 16 → 32 → 64 until the
/// ratio changes by less than [`QUADRATURE_TOLERANCE`].
pub fn numeric_correlator(
    emission: &EmissionFunction,
    a: &PhotonMomentum,
    b: &PhotonMomentum,
    mode: EnergyMode,
) -> Result<CorrelatorPoint> {
    numeric_correlator_with(emission, a, b, mode, LAMBDA_CHAOTIC)
}

pub(crate) fn numeric_correlator_with(
    emission: &EmissionFunction,
    a: &PhotonMomentum,
    b: &PhotonMomentum,
    mode: EnergyMode,
    lambda: f64,
) -> Result<CorrelatorPoint> {
    let kin = pair_from_vectors(a, b)?;
    let spectrum = &emission.spectrum;
    let ka = a.vector();
    let kb = b.vector();
    let k_pair = [
        0.5 * (ka[0] + kb[0]),
        0.5 * (ka[1] + kb[1]),
        0.5 * (ka[2] + kb[2]),
    ];
    let q = [ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]];
    let q0 = kin.q0;

    let src = &emission.source;
    let ct = C_LIGHT * src.delta_tau;
    let phase = (src.sigma_r * src.sigma_r * norm(q).powi(2) + ct * ct * q0 * q0).sqrt() / HBAR_C;
    if phase > MAX_QUADRATURE_PHASE {
        return Err(Error::OscillatoryPhase {
            phase,
            limit: MAX_QUADRATURE_PHASE,
        });
    }

    // Spectrum factors; the on-shell ratio is spectrum-free.
    let ln_spectra = match mode {
        EnergyMode::OnShell => {
            spectrum.value(kin.energy)?;
            0.0
        }
        EnergyMode::Exact => {
            let k0 = 0.5 * (a.omega() + b.omega());
            2.0 * spectrum.ln_value(k0)? - spectrum.ln_value(a.omega())? - spectrum.ln_value(b.omega())?
        }
    };

    let ratio_at = |order: usize| -> f64 {
        let rule = GaussHermite::new(order);
        let num = transform(emission, k_pair, q0, q, &rule);
        let modulus = num.re * num.re + num.im * num.im;
        let norm = match mode {
            EnergyMode::OnShell => num.weight * num.weight,
            EnergyMode::Exact => {
                if emission.flow.is_static() {
                    num.weight * num.weight
                } else {
                    let zero = [0.0; 3];
                    let da = transform(emission, ka, 0.0, zero, &rule).weight;
                    let db = transform(emission, kb, 0.0, zero, &rule).weight;
                    da * db
                }
            }
        };
        modulus / norm * ln_spectra.exp()
    };

    let mut prev = ratio_at(ORDERS[0]);
    let mut change = f64::INFINITY;
    for &order in &ORDERS[1..] {
        let cur = ratio_at(order);
        change = (cur - prev).abs();
        if change <= QUADRATURE_TOLERANCE * cur.abs() + 1e-12 {
            return Ok(CorrelatorPoint {
                abscissa: 0.0,
                kinematics: kin,
                value: 1.0 + lambda * cur,
                stat_error: 0.0,
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: format!("Fourier transform at |q| = {:.4e} eV, q0 = {q0:.4e} eV", norm(q)),
        order: ORDERS[ORDERS.len() - 1],
        change: change / prev.abs().max(1e-300),
    })
}
