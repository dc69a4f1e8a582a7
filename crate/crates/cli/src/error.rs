use std::fmt;

/// Process exit codes.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_UNFITTABLE: i32 = 5;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(sonohbt::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sonohbt::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                E::Parse { .. } | E::Io(_) | E::Unsupported(_) => EXIT_CONFIG,
                E::Domain(_) | E::DegenerateGeometry(_) | E::InsufficientMargin { .. } | E::ChaoticityViolation(_) => {
                    EXIT_DOMAIN
                }
                E::ApproximationBreakdown(_) | E::NonConvergence { .. } | E::OscillatoryPhase { .. } => EXIT_NUMERICAL,
                E::Unfittable(_) => EXIT_UNFITTABLE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<sonohbt::Error> for CliError {
    fn from(e: sonohbt::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
