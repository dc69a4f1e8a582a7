use thiserror::Error;

/// Errors raised by the interferometry toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain on which the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Pair geometry with vanishing total momentum (back-to-back equal energies).
    #[error("degenerate pair geometry: {0}")]
    DegenerateGeometry(String),

    /// A finite-difference stencil would leave the spectrum domain.
    #[error("insufficient margin: E = {energy} eV needs {needed} eV clearance inside [{lo}, {hi}] eV")]
    InsufficientMargin {
        energy: f64,
        needed: f64,
        lo: f64,
        hi: f64,
    },

    /// Spectrum-slope corrections exceed the geometric variance they correct.
    #[error("approximation breakdown: {0}")]
    ApproximationBreakdown(String),

    /// A quadrature did not reach the requested accuracy.
    #[error("quadrature did not converge: {what} (order {order}, relative change {change:.3e})")]
    NonConvergence {
        what: String,
        order: usize,
        change: f64,
    },

    /// The integrand oscillates too fast for the quadrature grid.
    #[error("oscillatory phase {phase:.2} exceeds quadrature limit {limit}")]
    OscillatoryPhase { phase: f64, limit: f64 },

    /// A configuration the operation does not support.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Scan data carry no usable correlation signal.
    #[error("unfittable scan: {0}")]
    Unfittable(String),

    /// A measured intercept at or below one, outside the chaotic-source model.
    #[error("chaoticity violation: intercept {0} <= 1")]
    ChaoticityViolation(f64),

    /// Malformed input text (CSV or tabulated spectra).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
