use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix has {rows} rows (or a ragged row) but {labels} labels were given")]
    DimensionMismatch { rows: usize, labels: usize },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("{0} labels exceed the supported maximum of {max}", max = crate::MAX_LABELS)]
    TooManyLabels(usize),
    #[error("ground set needs at least {min} elements, got {got}")]
    TooFewLabels { min: usize, got: usize },
    #[error("matrix is not symmetric at ({0}, {1})")]
    AsymmetricMatrix(String, String),
    #[error("nonzero diagonal entry at `{0}`")]
    NonzeroDiagonal(String),
    #[error("negative distance between `{0}` and `{1}`")]
    NegativeDistance(String, String),
    #[error("distinct elements `{0}` and `{1}` are at distance zero")]
    ZeroOffDiagonal(String, String),
    #[error("triangle inequality violated: d({x},{z}) > d({x},{y}) + d({y},{z})")]
    TriangleViolation { x: String, y: String, z: String },
    #[error("split has an empty side")]
    EmptySplitSide,
    #[error("duplicate split {0}")]
    DuplicateSplit(String),
    #[error("point {index} ({x}, {y}) repeats an earlier point")]
    DuplicatePoint { index: usize, x: String, y: String },
    #[error("points live on ground sets of different size ({0} vs {1})")]
    GroundSetMismatch(usize, usize),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("element `{0}` is not mapped to any vertex")]
    UnlabeledElement(String),
    #[error("non-positive edge weight {0}")]
    NonPositiveWeight(String),
    #[error("point violates the constraint on ({0}, {1})")]
    NotInPolyhedron(String, String),
    #[error("point is not a vertex of the polyhedron")]
    NotAVertex,
    #[error("point is not in the tight span")]
    NotInTightSpan,
    #[error("no geodesic neighbour from {vertex} towards `{target}`")]
    StepFailure { vertex: String, target: String },
    #[error("generation stalled after {0} consecutive rejections")]
    GenerationStall(usize),
    #[error("graph is not a realization of the metric: {0}")]
    NotARealization(String),
    #[error("assignment is missing variable `{0}`")]
    MissingVariable(String),
    #[error("instance too large: {what} = {size} exceeds bound {bound}")]
    InstanceTooLarge { what: &'static str, size: usize, bound: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
