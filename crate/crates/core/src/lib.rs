//! Testers for small set expansion in bounded-degree and general graphs.
//!
//! Graphs are accessed through a query-counted [`oracle::OracleHandle`].
//! The general-graph tester walks a non-uniform replacement product that is
//! never materialized. [`exact`] holds dense reference computations used to
//! check the sampled machinery on small graphs.

pub mod calibrate;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod local;
pub mod oracle;
pub mod product;
pub mod rng;
pub mod tester;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{conductance, CutReport, Graph, GraphBuilder, Port};
pub use oracle::{OracleHandle, OracleMode, QueryCounts};
