use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("edge {0} has non-positive length {1}")]
    NonPositiveLength(usize, f64),
    #[error("edge {edge} references unknown vertex {vertex}")]
    DanglingEdge { edge: usize, vertex: u32 },
    #[error("vertex {0} has no incident edge")]
    IsolatedVertex(u32),
    #[error("duplicate id {0}")]
    DuplicateId(u32),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("not a circle of the graph: {0}")]
    NotACircle(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("scale error: need 0 < delta ({delta}) < r ({r})")]
    ScaleError { r: f64, delta: f64 },
    #[error("map is not an orientation-preserving self-map of the circle: {0}")]
    NotCircleSelfMap(String),
    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("blow-up center is an endpoint code at precision {0}")]
    BadBlowupCenter(u32),
    #[error("precision exceeded: {0}")]
    Precision(String),
    #[error("wrong input: {0}")]
    WrongInput(String),
    #[error("no candidate reached discrepancy {tol} within a budget of {budget}")]
    SearchExhausted { tol: f64, budget: usize },
    #[error("gluing map is not a homeomorphism: {0}")]
    NotHomeomorphism(String),
    #[error("circles {0} and {1} intersect")]
    CirclesIntersect(usize, usize),
    #[error("bad pattern: {0}")]
    BadPattern(String),
    #[error("no probes left after filtering")]
    NoProbes,
    #[error("fibres are not circles on a majority of probes")]
    NotCircleCase,
    #[error("open set G contains no sample point")]
    EmptyG,
    #[error("empty input")]
    EmptyInput,
    #[error("map is not continuous: {0}")]
    Discontinuous(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
