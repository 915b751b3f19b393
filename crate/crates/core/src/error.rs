use thiserror::Error;

/// Library-wide error type. Variants are grouped by the exit-code class the
/// CLI maps them to: input/validation problems (2), numerical failures (3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds tol {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("matrix B is not positive semi-definite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },

    #[error("eigenvalue solver did not converge{}", node.map(|z| format!(" at node zeta = {z}")).unwrap_or_default())]
    EigenSolver { node: Option<num_complex::Complex64> },

    #[error("radius search failed after {steps} steps (last radius {last_radius:.3e}): {diagnostics}")]
    RadiusSearch {
        steps: usize,
        last_radius: f64,
        diagnostics: String,
    },

    #[error("branch tracking failed on arc [{theta_from:.6}, {theta_to:.6}]: refinement exhausted")]
    Tracking { theta_from: f64, theta_to: f64 },

    #[error("branch monodromy is not closed: residual {residual:.3e} exceeds tol {tol:.3e} (radius too small)")]
    Monodromy { residual: f64, tol: f64 },

    #[error("branch labeling {reason} (radius too small)")]
    Labeling { reason: String },

    #[error("density argument s = {s} outside open support ({lo}, {hi})")]
    Domain { s: f64, lo: f64, hi: f64 },

    #[error("accuracy failure: {reason}")]
    Accuracy { reason: String },

    #[error("quadrature did not converge at max nodes {max_nodes}; trace: {trace:?}")]
    Convergence {
        max_nodes: usize,
        trace: Vec<(usize, f64)>,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach a pipeline stage name for error reports.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// CLI exit-code class: 2 = input/validation, 3 = numerical/convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotSquare { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotHermitian { .. }
            | Error::Parameter { .. }
            | Error::NotPsd { .. }
            | Error::Domain { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
