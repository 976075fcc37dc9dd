//! Compiler toolkit for logical CNOT circuits executed with lattice surgery
//! on a 2D grid of code patches.
//!
//! The crate routes layered CNOT circuits onto a honeycomb routing graph of
//! data and ancilla patches, both with static data positions (`router`) and
//! with a sliding-window optimizer that folds "free" qubit teleportations
//! into CNOT gates to cut the routed depth (`optimizer`). A brute-force
//! state-vector verifier certifies the measurement-based protocols behind
//! both gate flavors (`protocol`), and `bench` reproduces the evaluation
//! grids comparing the two compilers.

pub mod bench;
pub mod circuit;
pub mod error;
pub mod graph;
pub mod optimizer;
pub mod protocol;
pub mod router;
pub mod validate;

pub use circuit::{Gate, GateId, LayeredCircuit};
pub use error::{Error, Result};
pub use graph::{
    build_layout, LayoutName, LayoutSpec, Mapping, PatchVertex, QubitLabel, Role, RoutingGraph,
    VertexId,
};
pub use optimizer::{
    anneal, compile_optimized, idle_restore, initial_candidate, neighbor, AnnealConfig, Candidate,
    MovedQubit, TreeExtension,
};
pub use protocol::{simulate_branches, verify_protocol, OutcomeBranch, ProtocolKind, ProtocolSpec};
pub use router::{
    route_layer, route_static, route_window, shortest_free_path, Route, RouteKind, RoutedLayer,
    Schedule,
};
