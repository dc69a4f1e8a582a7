//! Fixtures shared by the benchmarks.

use sonohbt::correlator::{linspace, ScanKind, ScanRequest};
use sonohbt::filter::{FilterSpec, WidthConvention};
use sonohbt::kinematics::{phi_from_xi, transverse_pair};
use sonohbt::{EmissionFunction, FlowBoost, GaussianSource, PairKinematics, Spectrum};

pub const ENERGY: f64 = 3.0;

/// 100 nm, 0.2 fs source with an exponential spectrum and no flow.
pub fn emission() -> EmissionFunction {
    EmissionFunction::new(source(), Spectrum::exponential(1.0).unwrap(), FlowBoost::none()).unwrap()
}

pub fn source() -> GaussianSource {
    GaussianSource::new(100.0, 0.2).unwrap()
}

/// Pair at ξ = 1 eV, where `C − 1` has dropped to about a quarter.
pub fn pair() -> PairKinematics {
    transverse_pair(ENERGY, phi_from_xi(ENERGY, 1.0)).unwrap()
}

/// Transverse scan of `n` points out to ξ = 3 eV.
pub fn transverse_request(n: usize) -> ScanRequest {
    let grid = linspace(0.0, 3.0, n).into_iter().map(|xi| phi_from_xi(ENERGY, xi)).collect();
    ScanRequest::new(ScanKind::Transverse, ENERGY, grid)
}

/// 1 nm rms filter at 413.28 nm.
pub fn filter() -> FilterSpec {
    FilterSpec::from_wavelength(413.28, 1.0, WidthConvention::Rms).unwrap()
}
