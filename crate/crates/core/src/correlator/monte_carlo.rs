//! Monte Carlo estimate of the correlator from sampled emission-point pairs.
//!
//! Points `x`, `y` are drawn from the normalized space-time profile; each
//! pair contributes `cos(q·(x − y)/ħc)` weighted by the flow factors, and the
//! correlator is `1 + λ · Σ w cos / Σ w`. Every (grid point, batch) has its
//! own ChaCha stream derived from the master seed, so the result does not
//! depend on how batches are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::scan::{scan, Engine, ScanRequest, ScanResult};
use super::{spectral_ratio, CorrelatorPoint, EnergyMode};
use crate::kinematics::{PairKinematics, Vec3};
use crate::source::{EmissionFunction, SpaceTimePoint};
use crate::units::{C_LIGHT, HBAR_C};
use crate::{Error, Result};

/// Pairs per independently seeded batch.
pub const MC_BATCH_SIZE: u64 = 1 << 14;

/// Smallest accepted sample size.
pub const MC_MIN_PAIRS: u64 = 10_000;

/// Monte Carlo scan; see [`scan`] with [`Engine::MonteCarlo`].
pub fn mc_correlator(
    emission: &EmissionFunction,
    request: &ScanRequest,
    mode: EnergyMode,
    n_pairs: u64,
    seed: u64,
) -> Result<ScanResult> {
    scan(
        &super::ScanModel::Emission(emission.clone()),
        request,
        Engine::MonteCarlo { mode, n_pairs, seed },
    )
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    num: f64,
    den: f64,
    num2: f64,
    den2: f64,
    num_den: f64,
}

impl Sums {
    fn add(self, o: Sums) -> Sums {
        Sums {
            num: self.num + o.num,
            den: self.den + o.den,
            num2: self.num2 + o.num2,
            den2: self.den2 + o.den2,
            num_den: self.num_den + o.num_den,
        }
    }
}

struct PointSetup {
    q0: f64,
    q: Vec3,
    k: Vec3,
    ka: Vec3,
    kb: Vec3,
    exact: bool,
}

fn sample(rng: &mut ChaCha8Rng, emission: &EmissionFunction) -> SpaceTimePoint {
    let src = &emission.source;
    let mut g = || -> f64 { rng.sample(StandardNormal) };
    let (x, y, z, t) = (g(), g(), g(), g());
    SpaceTimePoint::new(
        src.sigma_r * x,
        src.sigma_r * y,
        src.sigma_r * z,
        src.center_t + src.delta_tau * t,
    )
}

fn run_batch(emission: &EmissionFunction, p: &PointSetup, stream: u64, seed: u64, n: u64) -> Sums {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let flowing = !emission.flow.is_static();
    let mut acc = Sums::default();
    for _ in 0..n {
        let x = sample(&mut rng, emission);
        let y = sample(&mut rng, emission);
        let dr = [x.r[0] - y.r[0], x.r[1] - y.r[1], x.r[2] - y.r[2]];
        let phase =
            (p.q0 * C_LIGHT * (x.t - y.t) - (p.q[0] * dr[0] + p.q[1] * dr[1] + p.q[2] * dr[2])) / HBAR_C;
        let (wn, wd) = if flowing {
            let wn = (emission.ln_flow_weight(&x, p.k) + emission.ln_flow_weight(&y, p.k)).exp();
            let wd = if p.exact {
                (emission.ln_flow_weight(&x, p.ka) + emission.ln_flow_weight(&y, p.kb)).exp()
            } else {
                wn
            };
            (wn, wd)
        } else {
            (1.0, 1.0)
        };
        let num = wn * phase.cos();
        acc.num += num;
        acc.den += wd;
        acc.num2 += num * num;
        acc.den2 += wd * wd;
        acc.num_den += num * wd;
    }
    acc
}

pub(crate) fn mc_scan(
    emission: &EmissionFunction,
    pts: &[(f64, PairKinematics)],
    mode: EnergyMode,
    lambda: f64,
    n_pairs: u64,
    seed: u64,
) -> Result<Vec<CorrelatorPoint>> {
    if n_pairs < MC_MIN_PAIRS {
        return Err(Error::Domain(format!(
            "n_pairs = {n_pairs} is below the minimum of {MC_MIN_PAIRS}"
        )));
    }
    let setups = pts
        .iter()
        .map(|(_, k)| {
            let (a, b) = k.momenta();
            let (ka, kb) = (a.vector(), b.vector());
            Ok(PointSetup {
                q0: k.q0,
                q: [ka[0] - kb[0], ka[1] - kb[1], ka[2] - kb[2]],
                k: [
                    0.5 * (ka[0] + kb[0]),
                    0.5 * (ka[1] + kb[1]),
                    0.5 * (ka[2] + kb[2]),
                ],
                ka,
                kb,
                exact: mode == EnergyMode::Exact,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = pts
        .iter()
        .map(|(_, k)| spectral_ratio(&emission.spectrum, k, mode))
        .collect::<Result<Vec<_>>>()?;

    let n_batches = n_pairs.div_ceil(MC_BATCH_SIZE);
    let jobs: Vec<(usize, u64)> = (0..pts.len())
        .flat_map(|i| (0..n_batches).map(move |b| (i, b)))
        .collect();
    let sums: Vec<Sums> = jobs
        .par_iter()
        .map(|&(i, b)| {
            let n = MC_BATCH_SIZE.min(n_pairs - b * MC_BATCH_SIZE);
            let stream = ((i as u64) << 32) | b;
            run_batch(emission, &setups[i], stream, seed, n)
        })
        .collect();

    let mut out = Vec::with_capacity(pts.len());
    for (i, &(x, k)) in pts.iter().enumerate() {
        let s = sums[i * n_batches as usize..(i + 1) * n_batches as usize]
            .iter()
            .fold(Sums::default(), |a, &b| a.add(b));
        let r = s.num / s.den;
        // Delta-method variance of the ratio estimator.
        let var = ((s.num2 - 2.0 * r * s.num_den + r * r * s.den2) / (s.den * s.den)).max(0.0);
        let scale = lambda * ratios[i];
        out.push(CorrelatorPoint {
            abscissa: x,
            kinematics: k,
            value: 1.0 + scale * r,
            stat_error: scale * var.sqrt(),
        });
    }
    Ok(out)
}
