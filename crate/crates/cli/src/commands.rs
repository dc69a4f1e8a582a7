//! Subcommand implementations. Each returns the text printed on stdout.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use sonohbt::correlator::{linspace, logspace, scan, ScanKind, ScanRequest, ScanResult};
use sonohbt::extraction::{
    fit_scan, resolve_pulse_length, resolve_transverse, FitMethod, Instrument, KeyValue, Target, Thresholds,
};
use sonohbt::filter::{effective_intercept, intercept_curve, WidthConvention, FWHM_PER_RMS};
use sonohbt::io::{format_f64, read_scan_file, write_scan_csv, CsvOptions};
use sonohbt::kinematics::{max_accessible_xi, phi_from_xi};
use sonohbt::units::C_LIGHT;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub struct Emitted {
    pub path: PathBuf,
    pub label: String,
    pub points: usize,
}

fn timestamp(cfg: &RunConfig) -> Option<u64> {
    if cfg.output.deterministic {
        None
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
    }
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    PathBuf::from(cfg.output.dir.as_deref().unwrap_or("."))
}

fn write(cfg: &RunConfig, result: &ScanResult, default_name: &str) -> Result<Emitted, CliError> {
    let dir = out_dir(cfg);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let name = cfg.output.name.clone().unwrap_or_else(|| default_name.to_string());
    let path = dir.join(format!("{name}.csv"));
    let text = write_scan_csv(
        result,
        &CsvOptions {
            timestamp: timestamp(cfg),
            config: Some(cfg.to_embedded()),
        },
    );
    std::fs::write(&path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(Emitted {
        path,
        label: result.label.clone(),
        points: result.points.len(),
    })
}

fn source_provenance(cfg: &RunConfig) -> Vec<(String, String)> {
    let s = &cfg.source;
    let mut p = Vec::new();
    for (k, v) in [
        ("sigma_r_nm", s.sigma_r_nm),
        ("delta_tau_fs", s.delta_tau_fs),
        ("r_perp_nm", s.r_perp_nm),
        ("r_par_nm", s.r_par_nm),
    ] {
        if let Some(v) = v {
            p.push((k.to_string(), format_f64(v)));
        }
    }
    p
}

/// One scan per configuration.
pub fn run_scan(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let energy = cfg.energy()?;
    let kind = cfg.scan.kind;
    let window = cfg.window()?;
    let grid = match (&cfg.scan.values, kind) {
        (_, ScanKind::Intercept) => {
            return Err(CliError::Config("intercept curves are produced by the `intercept` command".into()))
        }
        (Some(v), _) => v.clone(),
        (None, ScanKind::Transverse) => {
            let xi_hi = match cfg.scan.xi_max_ev {
                Some(x) => x,
                None => max_accessible_xi(energy, &window)?,
            };
            linspace(0.0, xi_hi, cfg.scan.points)
                .into_iter()
                .map(|xi| phi_from_xi(energy, xi))
                .collect()
        }
        (None, ScanKind::Longitudinal) => linspace(0.0, cfg.scan.q0_max_mev * 1e-3, cfg.scan.points),
    };
    let mut request = ScanRequest::new(kind, energy, grid).with_lambda(cfg.scan.lambda);
    if cfg.scan.clip_to_window {
        request = request.with_window(window);
    }
    let mut result = scan(&cfg.model()?, &request, cfg.engine())?;
    result.label = cfg.scan.label.clone().unwrap_or_default();
    let mut provenance = source_provenance(cfg);
    provenance.append(&mut result.provenance);
    result.provenance = provenance;
    Ok(result)
}

pub fn cmd_scan(configs: &[RunConfig]) -> Result<Vec<Emitted>, CliError> {
    configs
        .iter()
        .map(|cfg| {
            let result = run_scan(cfg)?;
            write(cfg, &result, &format!("scan_{}", cfg.scan.kind.name()))
        })
        .collect()
}

pub fn render_emitted(files: &[Emitted], format: Format, extra: &[(String, String)]) -> String {
    match format {
        Format::Text => {
            let mut s = String::new();
            for f in files {
                s.push_str(&format!("file={}\n", f.path.display()));
                s.push_str(&format!("points={}\n", f.points));
            }
            for (k, v) in extra {
                s.push_str(&format!("{k}={v}\n"));
            }
            s
        }
        Format::Json => {
            let files: Vec<_> = files
                .iter()
                .map(|f| json!({"path": f.path.display().to_string(), "label": f.label, "points": f.points}))
                .collect();
            let mut obj = serde_json::Map::new();
            obj.insert("files".into(), json!(files));
            for (k, v) in extra {
                obj.insert(k.clone(), json!(v));
            }
            serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("json") + "\n"
        }
    }
}

pub fn cmd_intercept(cfg: &RunConfig) -> Result<(Emitted, Vec<(String, String)>), CliError> {
    if cfg.filter.width_ev.is_some() {
        return Err(CliError::Config(
            "intercept: give the filter as dlambda_nm around lambda_nm".into(),
        ));
    }
    let mut dlambda = cfg.filter.dlambda_nm.unwrap_or(crate::config::DEFAULT_DLAMBDA);
    if cfg.filter.convention == WidthConvention::Fwhm {
        dlambda /= FWHM_PER_RMS;
    }
    let lambda = cfg.filter_wavelength()?;
    let grid = match &cfg.scan.values {
        Some(v) => v.clone(),
        None => {
            if !(cfg.scan.tau_min_fs > 0.0 && cfg.scan.tau_max_fs > cfg.scan.tau_min_fs) {
                return Err(CliError::Config(format!(
                    "scan: need 0 < tau_min_fs < tau_max_fs (got {} and {})",
                    cfg.scan.tau_min_fs, cfg.scan.tau_max_fs
                )));
            }
            logspace(cfg.scan.tau_min_fs, cfg.scan.tau_max_fs, cfg.scan.points)
        }
    };
    let curve = intercept_curve(dlambda, lambda, &grid)?;
    let mut result = curve.scan;
    result.label = cfg.scan.label.clone().unwrap_or_default();
    let emitted = write(cfg, &result, "intercept")?;
    let at_knee = if curve.knee_fs.is_finite() {
        effective_intercept(curve.delta_omega, C_LIGHT * curve.knee_fs)
    } else {
        1.5
    };
    let extra = vec![
        ("delta_omega_eV".to_string(), format_f64(curve.delta_omega)),
        ("knee_fs".to_string(), format_f64(curve.knee_fs)),
        ("intercept_at_knee".to_string(), format_f64(at_knee)),
    ];
    Ok((emitted, extra))
}

pub fn cmd_fit(path: &Path, method: FitMethod, format: Format) -> Result<String, CliError> {
    let scan = read_scan_file(path)?;
    let fit = fit_scan(&scan, method)?;
    Ok(match format {
        Format::Text => fit.to_key_value_text(),
        Format::Json => fit.to_json() + "\n",
    })
}

pub fn cmd_resolve(cfg: &RunConfig, target: Target, format: Format) -> Result<String, CliError> {
    let instrument = Instrument {
        angular_resolution_deg: cfg.detector.angular_resolution_deg,
        aperture_deg: cfg.detector.aperture_deg,
        delta_omega: cfg.delta_omega()?,
    };
    let thresholds = Thresholds::default();
    let s = &cfg.source;
    let report = match target {
        Target::TransverseRadius => {
            let r = s
                .r_perp_nm
                .or(s.sigma_r_nm)
                .unwrap_or(crate::config::DEFAULT_SIGMA_R);
            resolve_transverse(r, cfg.energy()?, &cfg.window()?, &instrument, &thresholds)?
        }
        Target::PulseLength => {
            let tau = match (s.delta_tau_fs, s.r_par_nm) {
                (Some(t), _) => t,
                (None, Some(r)) => r / C_LIGHT,
                (None, None) => {
                    return Err(CliError::Config(
                        "resolve: pulse_length needs source.delta_tau_fs or source.r_par_nm".into(),
                    ))
                }
            };
            resolve_pulse_length(tau, &instrument, &thresholds)?
        }
    };
    Ok(match format {
        Format::Text => report.to_key_value_text(),
        Format::Json => report.to_json() + "\n",
    })
}
