//! Query-counted access to a [`Graph`].
//!
//! Testers only see a graph through an [`OracleHandle`]. The adjacency-list
//! model allows degree and neighbor queries; the rotation-map model
//! additionally answers neighbor & index queries. The vertex count and the
//! volume are treated as known and cost nothing.

use std::ops::AddAssign;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Port};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    AdjacencyList,
    RotationMap,
}

impl OracleMode {
    fn name(self) -> &'static str {
        match self {
            OracleMode::AdjacencyList => "adjacency-list",
            OracleMode::RotationMap => "rotation-map",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub degree: u64,
    pub neighbor: u64,
    pub neighbor_index: u64,
    pub edge_samples: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.degree + self.neighbor + self.neighbor_index + self.edge_samples
    }
}

impl AddAssign for QueryCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.degree += rhs.degree;
        self.neighbor += rhs.neighbor;
        self.neighbor_index += rhs.neighbor_index;
        self.edge_samples += rhs.edge_samples;
    }
}

/// Counters are per handle. Parallel workers each take a [`fork`] and the
/// owner folds them back with [`absorb`], which keeps totals exact without
/// shared mutable state.
///
/// [`fork`]: OracleHandle::fork
/// [`absorb`]: OracleHandle::absorb
#[derive(Debug)]
pub struct OracleHandle<'g> {
    graph: &'g Graph,
    mode: OracleMode,
    counts: QueryCounts,
}

impl<'g> OracleHandle<'g> {
    pub fn new(graph: &'g Graph, mode: OracleMode) -> Self {
        Self {
            graph,
            mode,
            counts: QueryCounts::default(),
        }
    }

    pub fn adjacency_list(graph: &'g Graph) -> Self {
        Self::new(graph, OracleMode::AdjacencyList)
    }

    pub fn rotation_map(graph: &'g Graph) -> Self {
        Self::new(graph, OracleMode::RotationMap)
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    pub fn counts(&self) -> QueryCounts {
        self.counts
    }

    /// A handle on the same graph and mode with zeroed counters.
    pub fn fork(&self) -> Self {
        Self::new(self.graph, self.mode)
    }

    pub fn absorb(&mut self, counts: QueryCounts) {
        self.counts += counts;
    }

    /// Vertex count, assumed known to the tester.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// vol(V) = 2m, assumed known to the tester.
    pub fn volume(&self) -> u64 {
        self.graph.volume()
    }

    /// Uncounted access to the underlying graph. Only for verifying
    /// certificates and for oracles outside the query model.
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.graph.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.graph.n(),
            });
        }
        Ok(())
    }

    fn check_port(&self, v: usize, i: usize) -> Result<()> {
        self.check_vertex(v)?;
        let degree = self.graph.degree(v);
        if i >= degree {
            return Err(Error::PortOutOfRange {
                vertex: v,
                port: i,
                degree,
            });
        }
        Ok(())
    }

    pub fn degree(&mut self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        self.counts.degree += 1;
        Ok(self.graph.degree(v))
    }

    /// The `i`-th neighbor of `v` (0-based port).
    pub fn neighbor(&mut self, v: usize, i: usize) -> Result<usize> {
        self.check_port(v, i)?;
        self.counts.neighbor += 1;
        Ok(self.graph.rotate(v, i).vertex)
    }

    /// The rotation map entry `(u, j)` for port `i` of `v`.
    pub fn neighbor_index(&mut self, v: usize, i: usize) -> Result<Port> {
        if self.mode == OracleMode::AdjacencyList {
            return Err(Error::ForbiddenQuery {
                query: "neighbor & index",
                mode: self.mode.name(),
            });
        }
        self.check_port(v, i)?;
        self.counts.neighbor_index += 1;
        Ok(self.graph.rotate(v, i))
    }

    /// Returns `v` with probability deg(v)/vol(V): a uniform edge, then a
    /// uniform endpoint of it. Drawing a uniform port does both at once.
    pub fn sample_vertex_by_degree<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let vol = self.graph.volume();
        if vol == 0 {
            return Err(Error::EmptyGraph);
        }
        self.counts.edge_samples += 1;
        let id = rng.random_range(0..vol) as usize;
        Ok(self.graph.port_of_id(id).vertex)
    }
}
