use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("topology error: {0}")]
    Topology(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("mesh tangling: element {element} has signed area {area:e}")]
    MeshTangling { element: usize, area: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("labeling error: {0}")]
    Labeling(String),

    #[error("singular local block on element {element} (smallest pivot {pivot:e})")]
    SingularLocalBlock { element: usize, pivot: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("time stepping needs {needed} previous states, history holds {available}")]
    Startup { needed: usize, available: usize },

    #[error("nonlinear iteration did not converge after {iterations} iterations (last update {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("interface self-intersection between segments {first} and {second}")]
    SelfIntersection { first: usize, second: usize },

    #[error("instability detected at step {step}: {reason}")]
    Instability { step: usize, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Topology(_) => "topology",
            Error::Geometry(_) => "geometry",
            Error::MeshTangling { .. } => "mesh_tangling",
            Error::Parameter(_) => "parameter",
            Error::Labeling(_) => "labeling",
            Error::SingularLocalBlock { .. } => "singular_local_block",
            Error::Numeric(_) => "numeric",
            Error::Startup { .. } => "startup",
            Error::NonConvergence { .. } => "nonconvergence",
            Error::SelfIntersection { .. } => "self_intersection",
            Error::Instability { .. } => "instability",
            Error::Domain(_) => "domain",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
