use thiserror::Error;

pub type Result<T, E = EvasionError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvasionError {
    #[error("malformed scenario document: {0}")]
    Malformed(String),

    #[error("{path}: {message}")]
    Invalid { path: String, message: String },

    #[error("unknown builtin scenario `{0}`")]
    UnknownScenario(String),

    #[error("time {t} outside the time base")]
    TimeOutOfRange { t: f64 },

    #[error("degenerate interval [{t_a}, {t_b}]")]
    DegenerateInterval { t_a: f64, t_b: f64 },

    #[error(
        "simultaneous events near t = {t}: signature changes cannot be separated at width {tol}"
    )]
    SimultaneousEvents { t: f64, tol: f64 },

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("locus does not transition: {0}")]
    NotCoverageEvent(String),

    #[error("incompatible diagram: {0}")]
    IncompatibleDiagram(String),

    #[error("no monotone lift at this resolution: {0}")]
    NoMonotoneLift(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0}")]
    Io(String),
}

impl EvasionError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        EvasionError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            EvasionError::Malformed(_) => "malformed_document",
            EvasionError::Invalid { .. } => "invalid_scenario",
            EvasionError::UnknownScenario(_) => "unknown_scenario",
            EvasionError::TimeOutOfRange { .. } => "time_out_of_range",
            EvasionError::DegenerateInterval { .. } => "degenerate_interval",
            EvasionError::SimultaneousEvents { .. } => "simultaneous_events",
            EvasionError::ResolutionTooCoarse(_) => "resolution_too_coarse",
            EvasionError::NotCoverageEvent(_) => "not_a_coverage_event",
            EvasionError::IncompatibleDiagram(_) => "incompatible_diagram",
            EvasionError::NoMonotoneLift(_) => "no_monotone_lift",
            EvasionError::Precondition(_) => "precondition",
            EvasionError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for EvasionError {
    fn from(e: std::io::Error) -> Self {
        EvasionError::Io(e.to_string())
    }
}
