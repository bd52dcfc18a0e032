//! Menger path systems in acyclic graphs and the minimization of their
//! mergings.
//!
//! A merging is an edge that two paths from different systems enter through
//! different predecessor edges. In network coding each merging marks a node
//! that has to combine incoming data, so fewer mergings means fewer encoding
//! nodes.

pub mod bounds;
pub mod error;
pub mod generators;
pub mod graph;
pub mod menger;
pub mod merging;
pub mod oracle;
pub mod reachability;
pub mod rerouting;

pub use error::{Error, Result};
pub use graph::{Dag, DagBuilder, EdgeId, Network, PairLayout, PairSpec, Path, VertexId};
pub use menger::PathSystem;
pub use merging::{MergedSubpath, PathRef};
pub use bounds::{BoundReport, Variant};
pub use generators::Instance;
pub use reachability::{AuxGraph, ReachWitness};
pub use rerouting::{PlanKind, ReroutePlan, Trace};
