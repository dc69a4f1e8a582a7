//! Preset parameter families.

use sonohbt::correlator::ScanKind;
use sonohbt::units::C_LIGHT;

use crate::config::RunConfig;

/// Transverse radii of the transverse-correlator figure, nm.
pub const FIG1_R_PERP_NM: [f64; 4] = [10.0, 100.0, 1000.0, 3000.0];
/// Flash durations of the longitudinal-correlator figure, ps.
pub const FIG2_TAU_PS: [f64; 3] = [0.1, 1.0, 10.0];
/// Filter of the intercept figure: 1 nm rms at 413.28 nm (E = 3 eV).
pub const FIG3_LAMBDA_NM: f64 = 413.28;
pub const FIG3_DLAMBDA_NM: f64 = 1.0;

/// `C(E = 3 eV, q0 = 0, φ)` out to the window edge, one curve per R_perp.
pub fn fig1() -> Vec<RunConfig> {
    FIG1_R_PERP_NM
        .iter()
        .map(|&r| {
            let mut c = RunConfig::default();
            c.source.r_perp_nm = Some(r);
            c.detector.energy_ev = Some(3.0);
            c.scan.kind = ScanKind::Transverse;
            c.scan.label = Some(format!("R_perp={r}nm"));
            c.output.name = Some(format!("fig1_rperp_{r}nm"));
            c
        })
        .collect()
}

/// `C(E = 3 eV, q0, φ = 0)` for q0 up to 10 meV, one curve per R_par = c δτ.
pub fn fig2() -> Vec<RunConfig> {
    FIG2_TAU_PS
        .iter()
        .map(|&tau| {
            let mut c = RunConfig::default();
            c.source.r_par_nm = Some(C_LIGHT * tau * 1000.0);
            c.detector.energy_ev = Some(3.0);
            c.scan.kind = ScanKind::Longitudinal;
            c.scan.q0_max_mev = 10.0;
            c.scan.label = Some(format!("R_par=c*{tau}ps"));
            c.output.name = Some(format!("fig2_rpar_{tau}ps"));
            c
        })
        .collect()
}

/// Effective intercept against flash duration, 1 fs to 100 ps.
pub fn fig3() -> RunConfig {
    let mut c = RunConfig::default();
    c.filter.lambda_nm = Some(FIG3_LAMBDA_NM);
    c.filter.dlambda_nm = Some(FIG3_DLAMBDA_NM);
    c.scan.kind = ScanKind::Intercept;
    c.scan.tau_min_fs = 1.0;
    c.scan.tau_max_fs = 1e5;
    c.scan.points = 101;
    c.scan.label = Some(format!("dlambda={FIG3_DLAMBDA_NM}nm@{FIG3_LAMBDA_NM}nm"));
    c.output.name = Some("fig3_intercept".into());
    c
}
