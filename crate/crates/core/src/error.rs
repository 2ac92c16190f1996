use thiserror::Error;

/// Every failure the engine can report.
///
/// Node indices are row-major grid indices (`j * nx + i`).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate tangent plane{}: Gram eigenvalue {min_eig:.3e} (plane not spacelike)", at(*node))]
    DegeneratePlane { node: Option<usize>, min_eig: f64 },

    #[error("embedding is not long at node {node}: isometric default eigenvalue {min_eig:.3e}")]
    NotLong { node: usize, min_eig: f64 },

    #[error("metric is singular{}", at(*node))]
    SingularMetric { node: Option<usize> },

    #[error("grid mismatch: {0}x{1} vs {2}x{3}")]
    GridMismatch(usize, usize, usize, usize),

    #[error("invalid grid {0}x{1}: need at least 3 nodes per axis")]
    InvalidGrid(usize, usize),

    #[error(
        "no nonnegative decomposition at node {node} for [[{e}, {f}], [{f}, {g}]] (residual {residual:.3e}); try a larger dictionary"
    )]
    ConeViolation { node: usize, e: f64, f: f64, g: f64, residual: f64 },

    #[error("field is not positive semi-definite at node {node}: eigenvalue {min_eig:.3e}")]
    NotPsd { node: usize, min_eig: f64 },

    #[error("a form dictionary needs at least 3 directions, got {0}")]
    InvalidDictionary(usize),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("primitive metric is not Riemannian at node {node}: eta*dl(u)^2 = {value}")]
    NotRiemannian { node: usize, value: f64 },

    #[error("corrugated map lost spacelikeness at node {node} (corrugation number {n})")]
    LostSpacelike { node: usize, n: u64 },

    #[error("no corrugation number up to {cap} met the tolerance (best error {best:.3e})")]
    BudgetExceeded { cap: u64, best: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

fn at(node: Option<usize>) -> String {
    node.map(|n| format!(" at node {n}")).unwrap_or_default()
}

impl Error {
    /// True for errors caused by bad user input rather than by the mathematics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownScenario(_) | Error::Config(_) | Error::Parse(_) | Error::InvalidGrid(..)
        )
    }

    pub(crate) fn at_node(self, node: usize) -> Self {
        match self {
            Error::DegeneratePlane { min_eig, .. } => Error::DegeneratePlane { node: Some(node), min_eig },
            Error::SingularMetric { .. } => Error::SingularMetric { node: Some(node) },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
