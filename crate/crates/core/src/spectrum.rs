//! Single-photon energy spectra `s(E)`.
//!
//! Closed-form kinds carry analytic log-derivatives. Tabulated spectra are
//! interpolated with a natural cubic spline in `ln s`, which keeps them
//! positive and reproduces pure exponentials exactly; their log-derivatives
//! come from central finite differences.

use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

/// Relative step of the finite-difference stencils.
pub const FD_RELATIVE_STEP: f64 = 1e-3;

/// Closed-form spectra are defined on this interval unless overridden.
pub const DEFAULT_DOMAIN: (f64, f64) = (0.1, 20.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumKind {
    /// `exp(-E/T)`
    Exponential { temperature: f64 },
    /// `E^alpha`
    PowerLaw { alpha: f64 },
    /// Bose–Einstein occupation `1 / (exp(E/T) - 1)`.
    Blackbody { temperature: f64 },
    Tabulated(Tabulated),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub domain: (f64, f64),
}

impl Spectrum {
    pub fn exponential(temperature: f64) -> Result<Self> {
        positive(temperature, "temperature")?;
        Ok(Self {
            kind: SpectrumKind::Exponential { temperature },
            domain: DEFAULT_DOMAIN,
        })
    }

    pub fn power_law(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("power-law exponent {alpha} is not finite")));
        }
        Ok(Self {
            kind: SpectrumKind::PowerLaw { alpha },
            domain: DEFAULT_DOMAIN,
        })
    }

    pub fn blackbody(temperature: f64) -> Result<Self> {
        positive(temperature, "temperature")?;
        Ok(Self {
            kind: SpectrumKind::Blackbody { temperature },
            domain: DEFAULT_DOMAIN,
        })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        let table = Tabulated::new(points)?;
        let domain = (table.energies[0], *table.energies.last().unwrap());
        Ok(Self {
            kind: SpectrumKind::Tabulated(table),
            domain,
        })
    }

    /// Reads a two-column `(E_eV, intensity)` table; `#` starts a comment and
    /// columns may be separated by whitespace or commas.
    pub fn from_table_text(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 2 columns, found {}", cols.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("{s:?}: {e}"),
                })
            };
            points.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::tabulated(points)
    }

    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_table_text(&std::fs::read_to_string(path)?)
    }

    /// Restricts (or widens, for closed forms) the domain.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Domain(format!("spectrum domain [{lo}, {hi}] is empty")));
        }
        if let SpectrumKind::Tabulated(t) = &self.kind {
            if lo < t.energies[0] || hi > *t.energies.last().unwrap() {
                return Err(Error::Domain("tabulated spectra cannot be extrapolated".into()));
            }
        }
        self.domain = (lo, hi);
        Ok(self)
    }

    /// Samples the spectrum on `grid` into a tabulated spectrum.
    pub fn tabulate(&self, grid: &[f64]) -> Result<Self> {
        let points = grid
            .iter()
            .map(|&e| self.value(e).map(|v| (e, v)))
            .collect::<Result<Vec<_>>>()?;
        Self::tabulated(points)
    }

    pub fn contains(&self, energy: f64) -> bool {
        energy >= self.domain.0 && energy <= self.domain.1
    }

    fn check(&self, energy: f64) -> Result<()> {
        if self.contains(energy) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "E = {energy} eV outside spectrum domain [{}, {}] eV",
                self.domain.0, self.domain.1
            )))
        }
    }

    /// `ln s(E)`.
    pub fn ln_value(&self, energy: f64) -> Result<f64> {
        self.check(energy)?;
        Ok(self.ln_unchecked(energy))
    }

    pub fn value(&self, energy: f64) -> Result<f64> {
        self.ln_value(energy).map(f64::exp)
    }

    fn ln_unchecked(&self, e: f64) -> f64 {
        match &self.kind {
            SpectrumKind::Exponential { temperature } => -e / temperature,
            SpectrumKind::PowerLaw { alpha } => alpha * e.ln(),
            SpectrumKind::Blackbody { temperature } => -(e / temperature).exp_m1().ln(),
            SpectrumKind::Tabulated(t) => t.eval(e),
        }
    }

    fn check_margin(&self, energy: f64) -> Result<f64> {
        self.check(energy)?;
        let h = FD_RELATIVE_STEP * energy;
        let needed = 2.0 * h;
        if energy - needed < self.domain.0 || energy + needed > self.domain.1 {
            return Err(Error::InsufficientMargin {
                energy,
                needed,
                lo: self.domain.0,
                hi: self.domain.1,
            });
        }
        Ok(h)
    }

    /// `(d ln s/dE, d² ln s/dE²)`: analytic for closed forms, central
    /// differences for tabulated spectra.
    pub fn log_derivs(&self, energy: f64) -> Result<(f64, f64)> {
        self.check_margin(energy)?;
        let e = energy;
        Ok(match &self.kind {
            SpectrumKind::Exponential { temperature } => (-1.0 / temperature, 0.0),
            SpectrumKind::PowerLaw { alpha } => (alpha / e, -alpha / (e * e)),
            SpectrumKind::Blackbody { temperature } => {
                let t = *temperature;
                let x = e / t;
                // d/dE of -ln(e^x - 1) = -(1/T)/(1 - e^-x); second derivative
                // (1/T²)·e^x/(e^x - 1)².
                let em1 = x.exp_m1();
                let d1 = -1.0 / (t * (-(-x).exp_m1()));
                let d2 = x.exp() / (em1 * em1 * t * t);
                (d1, d2)
            }
            SpectrumKind::Tabulated(_) => return self.log_derivs_fd(energy),
        })
    }

    /// Second-order central finite differences with step `1e-3·E`, for any kind.
    pub fn log_derivs_fd(&self, energy: f64) -> Result<(f64, f64)> {
        let h = self.check_margin(energy)?;
        let fm = self.ln_unchecked(energy - h);
        let f0 = self.ln_unchecked(energy);
        let fp = self.ln_unchecked(energy + h);
        Ok(((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)))
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} {v} must be positive")))
    }
}

/// Natural cubic spline through `(E_i, ln s_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tabulated {
    energies: Vec<f64>,
    ln_values: Vec<f64>,
    #[serde(skip)]
    second: Vec<f64>,
}

impl Tabulated {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::Domain(format!(
                "tabulated spectrum needs at least 4 points, got {}",
                points.len()
            )));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Domain(format!(
                    "tabulated energies must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(e, v)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::Domain(format!("intensity {v} at {e} eV must be positive")));
        }
        if points[0].0 <= 0.0 {
            return Err(Error::Domain("tabulated energies must be positive".into()));
        }
        let energies: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ln_values: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        let second = natural_spline_second_derivs(&energies, &ln_values);
        Ok(Self {
            energies,
            ln_values,
            second,
        })
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.energies
            .iter()
            .zip(&self.ln_values)
            .map(|(&e, &l)| (e, l.exp()))
    }

    fn eval(&self, e: f64) -> f64 {
        let n = self.energies.len();
        let hi = self.energies.partition_point(|&x| x < e).clamp(1, n - 1);
        let lo = hi - 1;
        let h = self.energies[hi] - self.energies[lo];
        let a = (self.energies[hi] - e) / h;
        let b = 1.0 - a;
        a * self.ln_values[lo]
            + b * self.ln_values[hi]
            + ((a * a * a - a) * self.second[lo] + (b * b * b - b) * self.second[hi]) * h * h / 6.0
    }
}

fn natural_spline_second_derivs(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut y2 = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        let p = sig * y2[i - 1] + 2.0;
        y2[i] = (sig - 1.0) / p;
        let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    y2[n - 1] = 0.0;
    for k in (0..n - 1).rev() {
        y2[k] = y2[k] * y2[k + 1] + u[k];
    }
    y2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exponential_derivs() {
        let s = Spectrum::exponential(1.0).unwrap();
        assert_eq!(s.log_derivs(3.0).unwrap(), (-1.0, 0.0));
    }

    #[test]
    fn power_law_derivs() {
        let s = Spectrum::power_law(2.0).unwrap();
        let (d1, d2) = s.log_derivs(3.0).unwrap();
        assert!((d1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((d2 + 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_derivs_match_finite_differences() {
        for s in [
            Spectrum::exponential(0.7).unwrap(),
            Spectrum::power_law(-1.5).unwrap(),
            Spectrum::blackbody(0.5).unwrap(),
            Spectrum::blackbody(3.0).unwrap(),
        ] {
            for e in [1.5, 3.0, 6.0] {
                let (a1, a2) = s.log_derivs(e).unwrap();
                let (f1, f2) = s.log_derivs_fd(e).unwrap();
                assert!((a1 - f1).abs() <= 1e-6 * a1.abs(), "{s:?} E={e}: {a1} {f1}");
                assert!((a2 - f2).abs() <= 1e-5 * a2.abs().max(1e-3), "{s:?} E={e}: {a2} {f2}");
            }
        }
    }

    #[test]
    fn tabulated_exponential_agrees_with_analytic() {
        let exact = Spectrum::exponential(1.0).unwrap();
        let tab = exact.tabulate(&grid(1.0, 7.0, 61)).unwrap();
        let (d1, d2) = tab.log_derivs(3.0).unwrap();
        assert!((d1 + 1.0).abs() <= 1e-6, "{d1}");
        assert!(d2.abs() <= 1e-6, "{d2}");
    }

    #[test]
    fn tabulated_power_law_is_close() {
        let exact = Spectrum::power_law(2.0).unwrap();
        let tab = exact.tabulate(&grid(1.0, 7.0, 241)).unwrap();
        let (d1, d2) = tab.log_derivs(3.0).unwrap();
        assert!((d1 - 2.0 / 3.0).abs() <= 1e-5, "{d1}");
        assert!((d2 + 2.0 / 9.0).abs() <= 1e-3, "{d2}");
    }

    #[test]
    fn margins_and_domain() {
        let tab = Spectrum::exponential(1.0)
            .unwrap()
            .tabulate(&grid(1.0, 7.0, 13))
            .unwrap();
        assert!(matches!(tab.log_derivs(1.001), Err(Error::InsufficientMargin { .. })));
        assert!(matches!(tab.value(0.5), Err(Error::Domain(_))));
        assert!(matches!(tab.value(7.5), Err(Error::Domain(_))));
        assert!(tab.value(7.0).is_ok());
    }

    #[test]
    fn table_text_parsing() {
        let text = "# E intensity\n1.0 2.0\n2.0, 1.5  # inline\n\n3.0\t1.0\n4.0 0.5\n";
        let s = Spectrum::from_table_text(text).unwrap();
        assert_eq!(s.domain, (1.0, 4.0));
        assert!((s.value(2.0).unwrap() - 1.5).abs() < 1e-14);

        let err = Spectrum::from_table_text("1 2\n2 x\n3 4\n4 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(Spectrum::from_table_text("1 1\n2 1\n3 1\n").is_err());
        assert!(Spectrum::from_table_text("1 1\n3 1\n2 1\n4 1\n").is_err());
        assert!(Spectrum::from_table_text("1 1\n2 0\n3 1\n4 1\n").is_err());
    }

    proptest! {
        #[test]
        fn tabulation_stays_positive(t in 0.3f64..4.0, alpha in -3.0f64..3.0, e in 1.0f64..7.0) {
            let g = grid(1.0, 7.0, 25);
            for s in [Spectrum::blackbody(t).unwrap(), Spectrum::power_law(alpha).unwrap()] {
                let tab = s.tabulate(&g).unwrap();
                let v = tab.value(e).unwrap();
                prop_assert!(v > 0.0 && v.is_finite());
            }
        }
    }
}
