//! Scan CSV format.
//!
//! ```text
//! # sonohbt scan v1
//! # generated_unix=1700000000        (optional)
//! # kind=transverse
//! # energy_eV=3
//! # abscissa=phi_rad
//! # lambda=0.5
//! # label=R_perp=100nm
//! # engine=analytic                  (further provenance, any number)
//! #@ [source]                        (embedded configuration, any number)
//! abscissa,value,stat_error
//! 0,1.5,0
//! ```
//!
//! Numbers use the shortest representation that parses back to the same
//! `f64`, in exponent form outside `[1e-5, 1e16)`.

use std::fmt::Write as _;
use std::path::Path;

use crate::correlator::{CorrelatorPoint, ScanKind, ScanResult};
use crate::units::LAMBDA_CHAOTIC;
use crate::{Error, Result};

pub const CSV_MAGIC: &str = "# sonohbt scan v1";
pub const CONFIG_PREFIX: &str = "#@ ";

/// Exact, compact text form of a float.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Unix time written as `# generated_unix=`; `None` for reproducible files.
    pub timestamp: Option<u64>,
    /// Configuration text embedded line by line after `#@ `.
    pub config: Option<String>,
}

pub fn write_scan_csv(scan: &ScanResult, opts: &CsvOptions) -> String {
    let mut s = String::new();
    s.push_str(CSV_MAGIC);
    s.push('\n');
    if let Some(t) = opts.timestamp {
        let _ = writeln!(s, "# generated_unix={t}");
    }
    let _ = writeln!(s, "# kind={}", scan.kind.name());
    let _ = writeln!(s, "# energy_eV={}", format_f64(scan.energy));
    let _ = writeln!(s, "# abscissa={}", scan.kind.abscissa_name());
    let _ = writeln!(s, "# lambda={}", format_f64(scan.lambda));
    if !scan.label.is_empty() {
        let _ = writeln!(s, "# label={}", one_line(&scan.label));
    }
    for (k, v) in &scan.provenance {
        let _ = writeln!(s, "# {}={}", one_line(k), one_line(v));
    }
    if let Some(cfg) = &opts.config {
        for line in cfg.lines() {
            let _ = writeln!(s, "{CONFIG_PREFIX}{line}");
        }
    }
    s.push_str("abscissa,value,stat_error\n");
    for p in &scan.points {
        let _ = writeln!(
            s,
            "{},{},{}",
            format_f64(p.abscissa),
            format_f64(p.value),
            format_f64(p.stat_error)
        );
    }
    s
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

/// Configuration embedded in a scan file, if any.
pub fn embedded_config(text: &str) -> Option<String> {
    let lines: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix(CONFIG_PREFIX).or_else(|| (l == "#@").then_some("")))
        .collect();
    (!lines.is_empty()).then(|| lines.join("\n") + "\n")
}

pub fn read_scan_csv(text: &str) -> Result<ScanResult> {
    let mut kind = None;
    let mut energy = None;
    let mut lambda = LAMBDA_CHAOTIC;
    let mut label = String::new();
    let mut provenance = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with("#@") || line == CSV_MAGIC {
            continue;
        }
        let Some(rest) = line.strip_prefix('#') else {
            continue;
        };
        let Some((k, v)) = rest.trim().split_once('=') else {
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        let parse = |v: &str| {
            v.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("{k}: {e}"),
            })
        };
        match k {
            "kind" => kind = Some(ScanKind::from_name(v).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?),
            "energy_eV" => energy = Some(parse(v)?),
            "lambda" => lambda = parse(v)?,
            "label" => label = v.to_string(),
            "abscissa" | "generated_unix" => {}
            _ => provenance.push((k.to_string(), v.to_string())),
        }
    }
    let kind = kind.ok_or(Error::Parse {
        line: 0,
        msg: "missing `# kind=` header".into(),
    })?;
    let energy = energy.ok_or(Error::Parse {
        line: 0,
        msg: "missing `# energy_eV=` header".into(),
    })?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (ca, cv) = match (col("abscissa"), col("value")) {
        (Some(a), Some(v)) => (a, v),
        _ => {
            return Err(Error::Parse {
                line: 0,
                msg: "columns `abscissa` and `value` are required".into(),
            })
        }
    };
    let ce = col("stat_error");
    let mut points = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |c: usize| -> Result<f64> {
            rec.get(c)
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: "missing field".into(),
                })?
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    line,
                    msg: e.to_string(),
                })
        };
        let abscissa = field(ca)?;
        let kinematics = kind.kinematics(energy, abscissa).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        points.push(CorrelatorPoint {
            abscissa,
            kinematics,
            value: field(cv)?,
            stat_error: ce.map(field).transpose()?.unwrap_or(0.0),
        });
    }
    Ok(ScanResult {
        kind,
        energy,
        lambda,
        points,
        label,
        provenance,
    })
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        msg: e.to_string(),
    }
}

pub fn read_scan_file(path: impl AsRef<Path>) -> Result<ScanResult> {
    read_scan_csv(&std::fs::read_to_string(path)?)
}
