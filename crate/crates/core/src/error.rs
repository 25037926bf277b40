use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: VertexId },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("{{{u}, {v}}} is not an edge of the parent graph")]
    NotAnEdge { u: VertexId, v: VertexId },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("generator `{kind}` needs n >= {min}, got {n}")]
    TooSmall { kind: &'static str, min: usize, n: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("invalid generator parameter: {0}")]
    BadParameter(String),
    #[error("cannot parse generator spec `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError { line, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("expected {expected} processes, got {got}")]
    ProcessCount { expected: usize, got: usize },
    #[error("round {round}: vertex {from} sent to non-neighbour {to}")]
    NotAdjacent { round: u64, from: VertexId, to: VertexId },
    #[error("bandwidth violation in round {round} on edge {from} -> {to}: {units} units, limit {limit}")]
    BandwidthViolation {
        round: u64,
        from: VertexId,
        to: VertexId,
        units: usize,
        limit: usize,
    },
    #[error("round {round}: message from {from} has {bits} payload bits, exceeds {units} x {bandwidth_bits}")]
    PayloadTooWide {
        round: u64,
        from: VertexId,
        bits: usize,
        units: usize,
        bandwidth_bits: usize,
    },
    #[error("no termination within {max_rounds} rounds")]
    NonTermination { max_rounds: u64 },
    #[error("graph is disconnected: vertex {unreached} unreachable from root {root}")]
    Disconnected { root: VertexId, unreached: VertexId },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error("empty graph")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("contract not met: {0}")]
    ContractFailure(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("vertex {0} has zero degree")]
    ZeroDegree(VertexId),
    #[error("input graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoutingError {
    #[error("request {index}: source equals destination ({vertex})")]
    Loop { index: usize, vertex: VertexId },
    #[error("request {index}: vertex {vertex} outside the subnetwork")]
    OutsideSubnetwork { index: usize, vertex: VertexId },
    #[error("load violation at vertex {vertex}: {role} count {count} exceeds bound {bound}")]
    LoadViolation {
        vertex: VertexId,
        role: &'static str,
        count: usize,
        bound: usize,
    },
    #[error("routing subnetwork disconnected")]
    Disconnected,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("edge {{{u}, {v}}} of Eout does not have exactly one endpoint in Vin")]
    EoutEndpoints { u: VertexId, v: VertexId },
    #[error("edge {{{u}, {v}}} of Ein leaves Vin")]
    EinEndpoints { u: VertexId, v: VertexId },
    #[error("Ein and Eout share edge {{{u}, {v}}}")]
    Overlap { u: VertexId, v: VertexId },
    #[error("promise (ii) fails at {vertex}: deg_in {deg_in} < deg_out {deg_out}")]
    OutDegree {
        vertex: VertexId,
        deg_in: usize,
        deg_out: usize,
    },
    #[error("Gin is disconnected")]
    Disconnected,
    #[error("Gin fails the mixing threshold: bound {bound} > {threshold}")]
    Mixing { bound: f64, threshold: f64 },
    #[error("Vin is empty")]
    Empty,
    #[error("m_bar = {m_bar} < n_bar / 2 = {half}", half = *n_bar as f64 / 2.0)]
    TooSparse { m_bar: usize, n_bar: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Id(#[from] IdError),
    #[error("quota shortfall: sum q_u = {sum} < t^2 = {needed}")]
    QuotaShortfall { sum: u64, needed: u64 },
    #[error("recursion did not finish within {0} levels")]
    RecursionDepth(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("constant `{0}` must be positive")]
    NonPositive(String),
    #[error("size sweep is empty")]
    EmptySweep,
    #[error(transparent)]
    Generator(#[from] GenerateError),
}
