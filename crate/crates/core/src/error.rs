use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Hypothesis violations (a theorem does not apply) are kept distinct from
/// numeric domain errors (a formula was evaluated outside its range).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no admissible radius: {0}")]
    NoAdmissibleRadius(String),

    #[error("radius {radius} is not admissible (supremum {supremum})")]
    InadmissibleRadius { radius: f64, supremum: f64 },

    #[error("point outside the chart domain: {0}")]
    ChartDomain(String),

    #[error("the selected component is empty")]
    EmptyComponent,

    #[error("the component touches the chart boundary; enlarge the chart")]
    ComponentTouchesChartBoundary,

    #[error("immersion is degenerate at ({0}, {1})")]
    ImmersionDegenerate(f64, f64),

    #[error("distance function evaluated at its pole")]
    EvaluationAtPole,

    #[error("degenerate element {0}")]
    DegenerateElement(usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("Dirichlet boundary is empty")]
    EmptyBoundary,

    #[error("no interior unknowns remain after removing the boundary")]
    NoInteriorUnknowns,

    #[error("operator is not positive definite: {0}")]
    Indefinite(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<crate::spectral::EigenResult>,
    },

    #[error("linear solver did not converge after {0} iterations (relative residual {1:e})")]
    LinearSolver(usize, f64),

    #[error("field is identically zero")]
    ZeroField,

    #[error("Main Lemma does not apply: {0}")]
    LemmaInapplicable(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
