use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VisionError {
    /// The drogue is at or behind the image plane; the camera has lost it.
    #[error("point is behind the camera (depth {depth})")]
    BehindCamera { depth: f64 },
    #[error("depth must be strictly positive, got {depth}")]
    NonPositiveDepth { depth: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("matrix dimensions do not agree: {0}")]
    Dimension(String),
    #[error("weight matrix {name} is not {requirement}: {detail}")]
    InvalidWeight {
        name: &'static str,
        requirement: &'static str,
        detail: String,
    },
    #[error("pair is not stabilizable: mode {re:.6}{im:+.6}i is uncontrollable")]
    Unstabilizable { re: f64, im: f64 },
    #[error(
        "Riccati solver did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("closed loop is not Hurwitz; offending eigenvalues: {}", format_eigs(.eigenvalues))]
    NotHurwitz { eigenvalues: Vec<(f64, f64)> },
    #[error("singular matrix encountered in {0}")]
    Singular(&'static str),
}

fn format_eigs(eigs: &[(f64, f64)]) -> String {
    eigs.iter()
        .map(|(re, im)| format!("{re:.6}{im:+.6}i"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    /// A field is present but its value violates the schema.
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

impl ConfigError {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error("integration diverged at t = {time:.3} s")]
    Diverged { time: f64 },
    #[error("simulation log is empty")]
    EmptyLog,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// A plant step produced a non-finite state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("integration diverged: state is no longer finite")]
pub struct IntegrationDiverged;
