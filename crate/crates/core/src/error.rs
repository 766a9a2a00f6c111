use std::io;

use thiserror::Error;

use crate::network::{EdgeId, VertexId};

/// Problems with a network description, either from the builder or the text format.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("edge {edge}: vertex {vertex} out of range (vertex_count {vertex_count})")]
    VertexOutOfRange {
        edge: EdgeId,
        vertex: VertexId,
        vertex_count: usize,
    },
    #[error("terminal {vertex} out of range (vertex_count {vertex_count})")]
    TerminalOutOfRange {
        vertex: VertexId,
        vertex_count: usize,
    },
    #[error("edge {edge}: negative capacity {capacity}")]
    NegativeCapacity { edge: EdgeId, capacity: i64 },
    #[error("source and sink are both vertex {0}")]
    SourceIsSink(VertexId),
    #[error("edge {edge}: self-loop at vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("network needs at least two vertices")]
    TooFewVertices,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Why a flow assignment is not feasible on its network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("flow has {got} entries, network has {expected} edges")]
    Length { expected: usize, got: usize },
    #[error("capacity violated at edge {edge}: flow {flow}, capacity {capacity}")]
    Capacity {
        edge: EdgeId,
        flow: i64,
        capacity: i64,
    },
    #[error("negative flow {flow} at edge {edge}")]
    Negative { edge: EdgeId, flow: i64 },
    #[error("conservation violated at vertex {vertex}: inflow {inflow}, outflow {outflow}")]
    Conservation {
        vertex: VertexId,
        inflow: i64,
        outflow: i64,
    },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("infeasible initial flow: {0}")]
    Infeasible(Violation),
    #[error("flow not maximal: sink reachable in residual graph")]
    NotMaximal,
    #[error(transparent)]
    Scores(#[from] ScoreError),
}

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("scores cover {got} edges, network has {expected}")]
    NotTotal { expected: usize, got: usize },
    #[error("no score for edge {0}")]
    Missing(EdgeId),
    #[error("duplicate entry for edge {0}")]
    Duplicate(EdgeId),
    #[error("edge {edge}: score {score} outside [0, 1]")]
    OutOfRange { edge: EdgeId, score: f64 },
    #[error("edge id {edge} out of range ({edge_count} edges)")]
    UnknownEdge { edge: EdgeId, edge_count: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("bad magic number {0:?}: expected P2 or P5")]
    BadMagic(String),
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("bad dimensions {width}x{height}")]
    BadDimensions { width: usize, height: usize },
    #[error("unsupported depth: maxval {0} exceeds 255")]
    UnsupportedDepth(u32),
    #[error("truncated payload: expected {expected} pixels, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("pixel value {value} at index {index} exceeds maxval {maxval}")]
    BadPixel {
        index: usize,
        value: u32,
        maxval: u32,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum ImageError {
    #[error(
        "dimension mismatch: image {image_width}x{image_height}, seeds {seed_width}x{seed_height}"
    )]
    DimensionMismatch {
        image_width: usize,
        image_height: usize,
        seed_width: usize,
        seed_height: usize,
    },
    #[error("no seeds")]
    NoSeeds,
    #[error("no source seed")]
    NoSourceSeed,
    #[error("no sink seed")]
    NoSinkSeed,
    #[error("seed value {value} at pixel {index} is not 0, 128 or 255")]
    BadSeedValue { index: usize, value: u8 },
    #[error("invalid graph parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("model has dimension {model}, feature extractor produces {features}")]
    DimensionMismatch { model: usize, features: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum PermError {
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("exact weighted distance supports n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid weights: {0}")]
    BadWeights(String),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(
        "instance {instance}: solver {solver} returned {got}, reference {expected} (reproduction in {repro})"
    )]
    NonOptimal {
        instance: usize,
        solver: String,
        expected: i64,
        got: i64,
        repro: String,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}
