//! `sonohbt`: correlator scans, intercept curves, fits and resolvability
//! verdicts from the command line.

mod commands;
mod config;
mod error;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sonohbt::correlator::{EnergyMode, ScanKind};
use sonohbt::extraction::{FitMethod, Target};
use sonohbt::units::C_LIGHT;

use config::{EnginePath, Format, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "sonohbt", version, about = "Two-photon intensity interferometry of sonoluminescence flashes")]
struct Cli {
    /// TOML run configuration, or a scan CSV carrying one.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for emitted files.
    #[arg(long, global = true, env = "SONOHBT_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Omit timestamps so output is byte-reproducible.
    #[arg(long, global = true)]
    deterministic: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlator scan(s) written as CSV.
    Scan(ScanArgs),
    /// Effective intercept against flash duration for a filter band.
    Intercept(InterceptArgs),
    /// Fit R and the intercept to a scan CSV.
    Fit(FitArgs),
    /// Can this instrument resolve the source scale?
    Resolve(ResolveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    Fig1,
    Fig2,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Transverse,
    Longitudinal,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    OnShell,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    LinearizedLog,
    NonlinearLs,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    TransverseRadius,
    PulseLength,
}

#[derive(Args, Default)]
struct SourceArgs {
    #[arg(long)]
    energy_ev: Option<f64>,
    #[arg(long)]
    rperp_nm: Option<f64>,
    #[arg(long)]
    rpar_nm: Option<f64>,
    /// R_par given as c times a duration in ps.
    #[arg(long, conflicts_with = "rpar_nm")]
    rpar_ps: Option<f64>,
    #[arg(long)]
    sigma_r_nm: Option<f64>,
    #[arg(long)]
    delta_tau_fs: Option<f64>,
}

#[derive(Args)]
struct ScanArgs {
    /// Preset parameter family.
    #[arg(long, value_enum, conflicts_with = "config")]
    figure: Option<Figure>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    xi_max_ev: Option<f64>,
    #[arg(long = "q0-max-meV")]
    q0_max_mev: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Explicit abscissae (φ rad or q0 eV), comma separated.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    engine: Option<EnginePath>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    n_pairs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// File stem; with several curves, used as a prefix.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct InterceptArgs {
    #[arg(long)]
    dlambda_nm: Option<f64>,
    #[arg(long)]
    lambda_nm: Option<f64>,
    #[arg(long)]
    tau_min_fs: Option<f64>,
    #[arg(long)]
    tau_max_fs: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    csv: PathBuf,
    #[arg(long, value_enum, default_value = "nonlinear-ls")]
    method: MethodArg,
}

#[derive(Args)]
struct ResolveArgs {
    #[arg(long, value_enum)]
    target: TargetArg,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    angular_resolution_deg: Option<f64>,
    #[arg(long)]
    aperture_deg: Option<f64>,
    /// Filter rms band width, eV.
    #[arg(long, conflicts_with = "dlambda_nm")]
    delta_omega_ev: Option<f64>,
    #[arg(long)]
    dlambda_nm: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

impl SourceArgs {
    fn apply(&self, c: &mut RunConfig) {
        set_opt(&mut c.detector.energy_ev, self.energy_ev);
        if self.energy_ev.is_some() {
            c.detector.lambda_nm = None;
        }
        set_opt(&mut c.source.r_perp_nm, self.rperp_nm);
        set_opt(&mut c.source.r_par_nm, self.rpar_nm.or(self.rpar_ps.map(|t| C_LIGHT * t * 1000.0)));
        set_opt(&mut c.source.sigma_r_nm, self.sigma_r_nm);
        set_opt(&mut c.source.delta_tau_fs, self.delta_tau_fs);
    }
}

impl ScanArgs {
    fn apply(&self, c: &mut RunConfig) {
        self.source.apply(c);
        if let Some(k) = self.kind {
            c.scan.kind = match k {
                KindArg::Transverse => ScanKind::Transverse,
                KindArg::Longitudinal => ScanKind::Longitudinal,
            };
        }
        set_opt(&mut c.scan.xi_max_ev, self.xi_max_ev);
        set(&mut c.scan.q0_max_mev, self.q0_max_mev);
        set(&mut c.scan.points, self.points);
        set_opt(&mut c.scan.values, self.grid.clone());
        set(&mut c.engine.path, self.engine);
        set(
            &mut c.engine.mode,
            self.mode.map(|m| match m {
                ModeArg::OnShell => EnergyMode::OnShell,
                ModeArg::Exact => EnergyMode::Exact,
            }),
        );
        set(&mut c.engine.n_pairs, self.n_pairs);
        set(&mut c.engine.seed, self.seed);
        set(&mut c.scan.lambda, self.lambda);
    }
}

struct Globals {
    config: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    deterministic: bool,
    format: Option<Format>,
}

impl Globals {
    fn base(&self) -> Result<Option<RunConfig>, CliError> {
        self.config.as_deref().map(RunConfig::load).transpose()
    }

    fn finish(&self, c: &mut RunConfig) {
        if let Some(d) = &self.out_dir {
            c.output.dir = Some(d.display().to_string());
        }
        c.output.deterministic |= self.deterministic;
        set(&mut c.output.format, self.format);
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let g = Globals {
        config: cli.config,
        out_dir: cli.out_dir,
        deterministic: cli.deterministic,
        format: cli.format,
    };
    match cli.command {
        Command::Scan(a) => {
            let mut configs = match (a.figure, g.base()?) {
                (Some(Figure::Fig1), _) => presets::fig1(),
                (Some(Figure::Fig2), _) => presets::fig2(),
                (None, Some(c)) => vec![c],
                (None, None) => vec![RunConfig::default()],
            };
            let several = configs.len() > 1;
            for c in &mut configs {
                a.apply(c);
                if let Some(n) = &a.name {
                    c.output.name = Some(match (&c.output.name, several) {
                        (Some(stem), true) => format!("{n}_{stem}"),
                        _ => n.clone(),
                    });
                }
                g.finish(c);
            }
            let files = commands::cmd_scan(&configs)?;
            Ok(commands::render_emitted(&files, configs[0].output.format, &[]))
        }
        Command::Intercept(a) => {
            let mut c = g.base()?.unwrap_or_else(presets::fig3);
            c.scan.kind = ScanKind::Intercept;
            set_opt(&mut c.filter.dlambda_nm, a.dlambda_nm);
            set_opt(&mut c.filter.lambda_nm, a.lambda_nm);
            set(&mut c.scan.tau_min_fs, a.tau_min_fs);
            set(&mut c.scan.tau_max_fs, a.tau_max_fs);
            set(&mut c.scan.points, a.points);
            set_opt(&mut c.output.name, a.name);
            g.finish(&mut c);
            let (file, extra) = commands::cmd_intercept(&c)?;
            Ok(commands::render_emitted(&[file], c.output.format, &extra))
        }
        Command::Fit(a) => {
            let method = match a.method {
                MethodArg::LinearizedLog => FitMethod::LinearizedLog,
                MethodArg::NonlinearLs => FitMethod::NonlinearLs,
            };
            commands::cmd_fit(&a.csv, method, g.format.unwrap_or_default())
        }
        Command::Resolve(a) => {
            let mut c = g.base()?.unwrap_or_default();
            a.source.apply(&mut c);
            set(&mut c.detector.angular_resolution_deg, a.angular_resolution_deg);
            set(&mut c.detector.aperture_deg, a.aperture_deg);
            if let Some(w) = a.delta_omega_ev {
                c.filter.width_ev = Some(w);
                c.filter.dlambda_nm = None;
            }
            set_opt(&mut c.filter.dlambda_nm, a.dlambda_nm);
            g.finish(&mut c);
            let target = match a.target {
                TargetArg::TransverseRadius => Target::TransverseRadius,
                TargetArg::PulseLength => Target::PulseLength,
            };
            commands::cmd_resolve(&c, target, c.output.format)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sonohbt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
