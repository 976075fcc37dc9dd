//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown layout `{0}` (expected one of: single, pair, triple, hex)")]
    UnknownLayout(String),

    #[error("qubit count must be at least 1")]
    NoQubits,

    #[error("vertex {0} does not exist in the routing graph")]
    UnknownVertex(u32),

    #[error("qubit label {0} is not mapped")]
    UnknownLabel(u32),

    #[error("teleport destination {dest} is already occupied by qubit {occupant}")]
    DestinationOccupied { dest: u32, occupant: u32 },

    #[error("a layer of {g} gates needs {needed} distinct qubits but the circuit has only {q}")]
    LayerTooDense { g: u32, needed: u32, q: u32 },

    #[error("circuit line {line}: {msg}")]
    CircuitParse { line: usize, msg: String },

    #[error("gate {0} not found in the given layer")]
    GateNotFound(u32),

    #[error("gate {gate} has control and target on the same vertex {vertex}")]
    CoincidentEndpoints { gate: u32, vertex: u32 },

    #[error("mapping covers {mapped} qubits but the circuit uses {required}")]
    UnmappedQubits { mapped: u32, required: u32 },

    #[error(
        "no gate of a layer could be routed (routed layer {routed_layers}); \
         stuck gates: {diagnostic}"
    )]
    UnroutableLayer {
        routed_layers: usize,
        diagnostic: String,
    },

    #[error("path endpoints coincide (vertex {0})")]
    DegeneratePath(u32),

    #[error("invalid annealing configuration: {0}")]
    InvalidConfig(String),

    #[error("input state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("linear fit needs at least two distinct abscissae")]
    DegenerateFit,

    #[error("benchmark cell {cell}: {source}")]
    BenchCell {
        cell: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
