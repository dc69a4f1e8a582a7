//! Space-time variances of the emission function and the HBT radii built
//! from them.
//!
//! Moments are taken in the frame where the pair momentum points along the
//! first axis, so `x_par` is the coordinate along `K` and `x_perp` one of the
//! two transverse coordinates.

use rayon::prelude::*;
use serde::Serialize;

use crate::quadrature::GaussHermite;
use crate::source::{EmissionFunction, SpaceTimePoint};
use crate::spectrum::Spectrum;
use crate::units::{C_LIGHT, HBAR_C};
use crate::{Error, Result};

/// Relative accuracy required from the moment quadrature.
pub const MOMENT_TOLERANCE: f64 = 1e-7;

const QUADRATURE_ORDERS: [usize; 3] = [16, 32, 64];

/// Second central moments of `S(x; E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceTimeVariances {
    /// nm²
    pub var_x_perp: f64,
    /// nm²
    pub var_x_par: f64,
    /// fs²
    pub var_t: f64,
    /// ⟨x̃_par t̃⟩ in nm·fs
    pub cross_x_par_t: f64,
    /// ⟨x_par⟩ in nm; reported for diagnostics, it cancels in the radii.
    pub mean_x_par: f64,
}

impl SpaceTimeVariances {
    /// |cross| / sqrt(var_x_par · var_t), zero when either variance vanishes.
    pub fn cross_correlation(&self) -> f64 {
        let d = (self.var_x_par * self.var_t).sqrt();
        if d == 0.0 {
            0.0
        } else {
            self.cross_x_par_t.abs() / d
        }
    }
}

/// Variances: closed form for static Gaussian sources, quadrature otherwise.
pub fn variances(emission: &EmissionFunction, energy: f64) -> Result<SpaceTimeVariances> {
    emission.spectrum.value(energy)?;
    if emission.flow.is_static() {
        let s = emission.source;
        Ok(SpaceTimeVariances {
            var_x_perp: s.sigma_r * s.sigma_r,
            var_x_par: s.sigma_r * s.sigma_r,
            var_t: s.delta_tau * s.delta_tau,
            cross_x_par_t: 0.0,
            mean_x_par: 0.0,
        })
    } else {
        variances_by_quadrature(emission, energy)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct RawMoments {
    w: f64,
    x: f64,
    t: f64,
    xx: f64,
    yy: f64,
    zz: f64,
    tt: f64,
    xt: f64,
}

impl std::ops::Add for RawMoments {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            w: self.w + o.w,
            x: self.x + o.x,
            t: self.t + o.t,
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            zz: self.zz + o.zz,
            tt: self.tt + o.tt,
            xt: self.xt + o.xt,
        }
    }
}

fn raw_moments(emission: &EmissionFunction, energy: f64, rule: &GaussHermite) -> RawMoments {
    let [xs, ys, zs, ts] = emission.source.axis_points(rule);
    let k = [energy, 0.0, 0.0];
    let t0 = emission.source.center_t;
    // Per-slab partial sums in a fixed order keep the result independent of
    // the thread count.
    let slabs: Vec<RawMoments> = xs
        .par_iter()
        .map(|&(x, wx)| {
            let mut m = RawMoments::default();
            for &(y, wy) in &ys {
                for &(z, wz) in &zs {
                    for &(t, wt) in &ts {
                        let p = SpaceTimePoint::new(x, y, z, t);
                        let w = wx * wy * wz * wt * emission.ln_flow_weight(&p, k).exp();
                        let dt = t - t0;
                        m.w += w;
                        m.x += w * x;
                        m.t += w * dt;
                        m.xx += w * x * x;
                        m.yy += w * y * y;
                        m.zz += w * z * z;
                        m.tt += w * dt * dt;
                        m.xt += w * x * dt;
                    }
                }
            }
            m
        })
        .collect();
    slabs.into_iter().fold(RawMoments::default(), |a, b| a + b)
}

fn central(m: RawMoments) -> SpaceTimeVariances {
    let mx = m.x / m.w;
    let mt = m.t / m.w;
    SpaceTimeVariances {
        var_x_perp: 0.5 * (m.yy + m.zz) / m.w,
        var_x_par: m.xx / m.w - mx * mx,
        var_t: m.tt / m.w - mt * mt,
        cross_x_par_t: m.xt / m.w - mx * mt,
        mean_x_par: mx,
    }
}

/// Variances by tensor-product Gauss–Hermite quadrature with order
/// escalation 16 → 32 → 64, for any flow profile.
pub fn variances_by_quadrature(emission: &EmissionFunction, energy: f64) -> Result<SpaceTimeVariances> {
    emission.spectrum.value(energy)?;
    let mut prev: Option<SpaceTimeVariances> = None;
    let mut change = f64::INFINITY;
    for order in QUADRATURE_ORDERS {
        let cur = central(raw_moments(emission, energy, &GaussHermite::new(order)));
        if let Some(p) = prev {
            change = moment_change(&p, &cur);
            if change <= MOMENT_TOLERANCE {
                return Ok(cur);
            }
        }
        prev = Some(cur);
    }
    Err(Error::NonConvergence {
        what: "space-time moments".into(),
        order: *QUADRATURE_ORDERS.last().unwrap(),
        change,
    })
}

fn moment_change(a: &SpaceTimeVariances, b: &SpaceTimeVariances) -> f64 {
    let rel = |x: f64, y: f64, scale: f64| {
        if scale == 0.0 {
            0.0
        } else {
            (x - y).abs() / scale
        }
    };
    let sx = b.var_x_par.abs().sqrt();
    let st = b.var_t.abs().sqrt();
    [
        rel(a.var_x_perp, b.var_x_perp, b.var_x_perp.abs()),
        rel(a.var_x_par, b.var_x_par, b.var_x_par.abs()),
        rel(a.var_t, b.var_t, b.var_t.abs()),
        rel(a.cross_x_par_t, b.cross_x_par_t, sx * st),
        rel(a.mean_x_par, b.mean_x_par, sx),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Corrections to the squared radii from the slope and curvature of the
/// log spectrum, in nm²: `(ħc)²/(8E) · d ln s/dE` and `(ħc)²/4 · d² ln s/dE²`.
pub fn correction_terms(spectrum: &Spectrum, energy: f64) -> Result<(f64, f64)> {
    let (d1, d2) = spectrum.log_derivs(energy)?;
    let hc2 = HBAR_C * HBAR_C;
    Ok((hc2 / (8.0 * energy) * d1, hc2 / 4.0 * d2))
}

/// Squared HBT radii (nm²) and the corrections folded into them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HbtRadii {
    pub r_perp_sq: f64,
    pub r_par_sq: f64,
    pub delta_r_perp_sq: f64,
    pub delta_r_par_sq: f64,
}

impl HbtRadii {
    /// Radii given directly (nm), without corrections.
    pub fn from_radii(r_perp: f64, r_par: f64) -> Result<Self> {
        if !(r_perp >= 0.0 && r_par >= 0.0 && r_perp.is_finite() && r_par.is_finite()) {
            return Err(Error::Domain(format!(
                "radii must be non-negative (R_perp = {r_perp}, R_par = {r_par})"
            )));
        }
        Ok(Self {
            r_perp_sq: r_perp * r_perp,
            r_par_sq: r_par * r_par,
            delta_r_perp_sq: 0.0,
            delta_r_par_sq: 0.0,
        })
    }

    pub fn r_perp(&self) -> f64 {
        self.r_perp_sq.sqrt()
    }

    pub fn r_par(&self) -> f64 {
        self.r_par_sq.sqrt()
    }
}

/// `R_perp² = ⟨x_perp²⟩ + ΔR_perp²` and
/// `R_par² = ⟨x_par²⟩ + c²⟨t̃²⟩ + ΔR_par²`; with `include_cross_term` the
/// longitudinal variance is the full `⟨(x̃_par − c t̃)²⟩`.
pub fn compose_radii(
    v: &SpaceTimeVariances,
    corrections: (f64, f64),
    include_cross_term: bool,
) -> Result<HbtRadii> {
    let (d_perp, d_par) = corrections;
    let r_perp_sq = v.var_x_perp + d_perp;
    let mut r_par_sq = v.var_x_par + C_LIGHT * C_LIGHT * v.var_t + d_par;
    if include_cross_term {
        r_par_sq -= 2.0 * C_LIGHT * v.cross_x_par_t;
    }
    if r_perp_sq <= 0.0 {
        return Err(Error::ApproximationBreakdown(format!(
            "R_perp² = {r_perp_sq:.4} nm²: correction {d_perp:.4} nm² overwhelms variance {:.4} nm²",
            v.var_x_perp
        )));
    }
    if r_par_sq <= 0.0 {
        return Err(Error::ApproximationBreakdown(format!(
            "R_par² = {r_par_sq:.4} nm²: correction {d_par:.4} nm² overwhelms the longitudinal variance"
        )));
    }
    Ok(HbtRadii {
        r_perp_sq,
        r_par_sq,
        delta_r_perp_sq: d_perp,
        delta_r_par_sq: d_par,
    })
}

/// Variances, corrections and composition in one step.
pub fn radii_for(
    emission: &EmissionFunction,
    energy: f64,
    with_corrections: bool,
    include_cross_term: bool,
) -> Result<HbtRadii> {
    let v = variances(emission, energy)?;
    let c = if with_corrections {
        correction_terms(&emission.spectrum, energy)?
    } else {
        (0.0, 0.0)
    };
    compose_radii(&v, c, include_cross_term)
}
