//! Gaussian fits `C = 1 + A exp(−R² q²/(ħc)²)` to scans.

use serde::{Deserialize, Serialize};

use super::KeyValue;
use crate::correlator::{ScanKind, ScanResult};
use crate::units::HBAR_C;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Weighted linear regression of `ln(2(C − 1))` on `q²`.
    LinearizedLog,
    /// Levenberg–Marquardt on `(A, R²)`, started from the linearized fit.
    NonlinearLs,
}

impl FitMethod {
    pub fn name(self) -> &'static str {
        match self {
            FitMethod::LinearizedLog => "linearized_log",
            FitMethod::NonlinearLs => "nonlinear_ls",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "linearized_log" | "log" => Ok(FitMethod::LinearizedLog),
            "nonlinear_ls" | "nonlinear" | "lm" => Ok(FitMethod::NonlinearLs),
            other => Err(Error::Domain(format!("unknown fit method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Deterministic points with `C − 1` below this are left out of the fit.
    pub noise_floor: f64,
    /// Smallest `(max − min)/max` of `C − 1` over the usable points.
    pub min_relative_suppression: f64,
    pub min_points: usize,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            noise_floor: 1e-6,
            min_relative_suppression: 0.01,
            min_points: 5,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// R (nm).
    pub radius: f64,
    pub radius_err: f64,
    /// Fitted `C(q = 0)`.
    pub intercept: f64,
    pub intercept_err: f64,
    pub chi2_per_dof: f64,
    pub method: FitMethod,
    pub n_points: usize,
}

impl KeyValue for FitResult {
    fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("method".into(), self.method.name().into()),
            ("radius_nm".into(), crate::io::format_f64(self.radius)),
            ("radius_err_nm".into(), crate::io::format_f64(self.radius_err)),
            ("intercept".into(), crate::io::format_f64(self.intercept)),
            ("intercept_err".into(), crate::io::format_f64(self.intercept_err)),
            ("chi2_per_dof".into(), crate::io::format_f64(self.chi2_per_dof)),
            ("n_points".into(), self.n_points.to_string()),
        ]
    }
}

struct Datum {
    /// q²/(ħc)², nm⁻².
    u: f64,
    y: f64,
    sigma: Option<f64>,
}

pub fn fit_scan(scan: &ScanResult, method: FitMethod) -> Result<FitResult> {
    fit_scan_with(scan, method, &FitOptions::default())
}

pub fn fit_scan_with(scan: &ScanResult, method: FitMethod, opts: &FitOptions) -> Result<FitResult> {
    if scan.kind == ScanKind::Intercept {
        return Err(Error::Unsupported("intercept curves carry no momentum dependence to fit".into()));
    }
    let hc2 = HBAR_C * HBAR_C;
    let weighted = scan.points.iter().any(|p| p.stat_error > 0.0);
    let data: Vec<Datum> = scan
        .points
        .iter()
        .filter(|p| {
            let excess = p.value - 1.0;
            if weighted {
                p.stat_error > 0.0 && excess > p.stat_error
            } else {
                excess > opts.noise_floor
            }
        })
        .map(|p| Datum {
            u: p.kinematics.q_sq() / hc2,
            y: p.value - 1.0,
            sigma: weighted.then_some(p.stat_error),
        })
        .collect();
    if data.len() < opts.min_points {
        return Err(Error::Unfittable(format!(
            "{} of {} points rise above the noise floor; at least {} are needed",
            data.len(),
            scan.points.len(),
            opts.min_points
        )));
    }
    let max = data.iter().map(|d| d.y).fold(f64::MIN, f64::max);
    let min = data.iter().map(|d| d.y).fold(f64::MAX, f64::min);
    if weighted {
        let mut errs: Vec<f64> = data.iter().map(|d| d.sigma.unwrap_or(0.0)).collect();
        errs.sort_by(f64::total_cmp);
        let median = errs[errs.len() / 2];
        if max - min < 3.0 * median {
            return Err(Error::Unfittable(format!(
                "C − 1 varies by {:.3e}, within three standard errors ({:.3e})",
                max - min,
                3.0 * median
            )));
        }
    } else if (max - min) / max < opts.min_relative_suppression {
        return Err(Error::Unfittable(format!(
            "C − 1 varies by only {:.3e} relative across the scan",
            (max - min) / max
        )));
    }

    let lin = linearized(&data)?;
    let (amp, r_sq, cov, chi2) = match method {
        FitMethod::LinearizedLog => lin,
        FitMethod::NonlinearLs => levenberg_marquardt(&data, lin.0, lin.1, opts.max_iterations)?,
    };
    if r_sq < 0.0 {
        return Err(Error::ApproximationBreakdown(format!(
            "fitted R² = {r_sq:.4e} nm² is negative"
        )));
    }
    let dof = data.len() - 2;
    let scale = if weighted { 1.0 } else { chi2 / dof as f64 };
    let var_amp = cov[0][0] * scale;
    let var_rsq = cov[1][1] * scale;
    let radius = r_sq.sqrt();
    let radius_err = if radius > 0.0 {
        var_rsq.max(0.0).sqrt() / (2.0 * radius)
    } else {
        var_rsq.max(0.0).sqrt().sqrt()
    };
    Ok(FitResult {
        radius,
        radius_err,
        intercept: 1.0 + amp,
        intercept_err: var_amp.max(0.0).sqrt(),
        chi2_per_dof: chi2 / dof as f64,
        method,
        n_points: data.len(),
    })
}

type Fit = (f64, f64, [[f64; 2]; 2], f64);

fn invert(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(det.abs() > 0.0) || !det.is_finite() {
        return Err(Error::Unfittable("fit normal equations are singular".into()));
    }
    Ok([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

/// `ln y = ln A − R² u`; returns `(A, R²)` with the covariance propagated to
/// `(A, R²)` and the χ² of the log residuals.
fn linearized(data: &[Datum]) -> Result<Fit> {
    let mut m = [[0.0; 2]; 2];
    let mut b = [0.0; 2];
    for d in data {
        // σ_ln y = σ_y / y.
        let w = d.sigma.map_or(1.0, |s| (d.y / s).powi(2));
        let ly = d.y.ln();
        m[0][0] += w;
        m[0][1] += w * d.u;
        m[1][1] += w * d.u * d.u;
        b[0] += w * ly;
        b[1] += w * d.u * ly;
    }
    m[1][0] = m[0][1];
    let inv = invert(m)?;
    let c0 = inv[0][0] * b[0] + inv[0][1] * b[1];
    let c1 = inv[1][0] * b[0] + inv[1][1] * b[1];
    let amp = c0.exp();
    let r_sq = -c1;
    let chi2: f64 = data
        .iter()
        .map(|d| {
            let w = d.sigma.map_or(1.0, |s| (d.y / s).powi(2));
            w * (d.y.ln() - c0 - c1 * d.u).powi(2)
        })
        .sum();
    // (ln A, −R²) → (A, R²).
    let cov = [
        [amp * amp * inv[0][0], -amp * inv[0][1]],
        [-amp * inv[1][0], inv[1][1]],
    ];
    Ok((amp, r_sq, cov, chi2))
}

fn residuals(data: &[Datum], amp: f64, r_sq: f64) -> f64 {
    data.iter()
        .map(|d| {
            let w = d.sigma.map_or(1.0, |s| 1.0 / (s * s));
            w * (d.y - amp * (-r_sq * d.u).exp()).powi(2)
        })
        .sum()
}

fn levenberg_marquardt(data: &[Datum], amp0: f64, rsq0: f64, max_iter: usize) -> Result<Fit> {
    let (mut amp, mut r_sq) = (amp0, rsq0);
    let mut chi2 = residuals(data, amp, r_sq);
    let mut mu = 1e-3;
    let normal = |amp: f64, r_sq: f64| {
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for d in data {
            let w = d.sigma.map_or(1.0, |s| 1.0 / (s * s));
            let e = (-r_sq * d.u).exp();
            let j = [e, -amp * d.u * e];
            let r = d.y - amp * e;
            for a in 0..2 {
                jtr[a] += w * j[a] * r;
                for b in 0..2 {
                    jtj[a][b] += w * j[a] * j[b];
                }
            }
        }
        (jtj, jtr)
    };
    for _ in 0..max_iter {
        let (jtj, jtr) = normal(amp, r_sq);
        let mut improved = false;
        while mu < 1e16 {
            let mut a = jtj;
            a[0][0] *= 1.0 + mu;
            a[1][1] *= 1.0 + mu;
            let inv = invert(a)?;
            let da = inv[0][0] * jtr[0] + inv[0][1] * jtr[1];
            let dr = inv[1][0] * jtr[0] + inv[1][1] * jtr[1];
            let trial = residuals(data, amp + da, r_sq + dr);
            if trial <= chi2 {
                let done = da.abs() <= 1e-14 * amp.abs().max(1e-300)
                    && dr.abs() <= 1e-14 * r_sq.abs().max(1e-300);
                amp += da;
                r_sq += dr;
                let drop = chi2 - trial;
                chi2 = trial;
                mu = (mu * 0.1).max(1e-12);
                improved = !done && drop > 1e-15 * chi2.max(f64::MIN_POSITIVE);
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let (jtj, _) = normal(amp, r_sq);
    Ok((amp, r_sq, invert(jtj)?, chi2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlator::{linspace, scan, Engine, EnergyMode, ScanModel, ScanRequest};
    use crate::kinematics::max_opening_angle;
    use crate::moments::HbtRadii;
    use crate::source::{EmissionFunction, GaussianSource};
    use crate::spectrum::Spectrum;
    use crate::units::{TransparencyWindow, C_LIGHT};

    fn transverse(r: f64, lambda: f64) -> ScanResult {
        let w = TransparencyWindow::default();
        let phi_max = max_opening_angle(3.0, &w).unwrap();
        let req = ScanRequest::new(crate::correlator::ScanKind::Transverse, 3.0, linspace(0.0, phi_max, 60))
            .with_window(w)
            .with_lambda(lambda);
        let model = ScanModel::Radii(HbtRadii::from_radii(r, 0.0).unwrap());
        scan(&model, &req, Engine::Analytic { with_corrections: false }).unwrap()
    }

    #[test]
    fn noiseless_round_trip() {
        for method in [FitMethod::LinearizedLog, FitMethod::NonlinearLs] {
            let f = fit_scan(&transverse(100.0, 0.5), method).unwrap();
            assert!((f.radius / 100.0 - 1.0).abs() < 1e-6, "{f:?}");
            assert!((f.intercept - 1.5).abs() < 1e-9, "{f:?}");
        }
    }

    #[test]
    fn free_intercept() {
        let f = fit_scan(&transverse(40.0, 0.3), FitMethod::NonlinearLs).unwrap();
        assert!((f.intercept - 1.3).abs() < 1e-9);
        assert!((f.radius - 40.0).abs() < 1e-6);
    }

    #[test]
    fn longitudinal_round_trip() {
        let r_par = C_LIGHT * 100.0;
        let model = ScanModel::Radii(HbtRadii::from_radii(0.0, r_par).unwrap());
        let req = ScanRequest::new(ScanKind::Longitudinal, 3.0, linspace(0.0, 3.0 * HBAR_C / r_par, 40));
        let s = scan(&model, &req, Engine::Analytic { with_corrections: false }).unwrap();
        let f = fit_scan(&s, FitMethod::NonlinearLs).unwrap();
        assert!((f.radius / r_par - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_scan_is_unfittable() {
        for method in [FitMethod::LinearizedLog, FitMethod::NonlinearLs] {
            assert!(matches!(fit_scan(&transverse(1.0, 0.5), method), Err(Error::Unfittable(_))));
        }
    }

    #[test]
    fn too_few_points() {
        let mut s = transverse(100.0, 0.5);
        s.points.truncate(4);
        assert!(matches!(fit_scan(&s, FitMethod::LinearizedLog), Err(Error::Unfittable(_))));
    }

    #[test]
    fn monte_carlo_scan_within_three_sigma() {
        let w = TransparencyWindow::default();
        let phi_max = max_opening_angle(3.0, &w).unwrap();
        let req = ScanRequest::new(ScanKind::Transverse, 3.0, linspace(0.0, 0.4 * phi_max, 20));
        let e = EmissionFunction::without_flow(
            GaussianSource::new(100.0, 0.0).unwrap(),
            Spectrum::exponential(1.0).unwrap(),
        );
        let s = scan(
            &ScanModel::Emission(e),
            &req,
            Engine::MonteCarlo { mode: EnergyMode::OnShell, n_pairs: 200_000, seed: 11 },
        )
        .unwrap();
        for method in [FitMethod::LinearizedLog, FitMethod::NonlinearLs] {
            let f = fit_scan(&s, method).unwrap();
            assert!((f.radius - 100.0).abs() <= 3.0 * f.radius_err, "{f:?}");
            assert!(f.radius_err > 0.0 && f.radius_err < 5.0);
        }
    }

    #[test]
    fn negative_width_breaks_down() {
        let mut s = transverse(100.0, 0.5);
        for p in &mut s.points {
            let u = p.kinematics.q_sq() / (HBAR_C * HBAR_C);
            p.value = 1.0 + 0.1 * (1e2 * u).exp();
        }
        assert!(matches!(
            fit_scan(&s, FitMethod::LinearizedLog),
            Err(Error::ApproximationBreakdown(_))
        ));
    }
}
