//! The non-uniform replacement product G (r) H.
//!
//! Vertex u of G becomes a cloud of deg(u) product vertices (u, i), wired
//! together by a d-regular inner graph H(deg(u)). Port i of u in G becomes d
//! parallel edges from (u, i) to (v, j), where (v, j) is the rotation map
//! entry of (u, i). The result is 2d-regular on vol(G) vertices. Walks and
//! sampling go through the oracle of G; the product is never built except by
//! [`materialize_product`] for checks.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::oracle::{OracleHandle, OracleMode};
use crate::rng::{derive_seed, StreamRng};
use crate::walk::{StepKernel, VirtualGraph};

pub const DEFAULT_INNER_DEGREE: usize = 8;
pub const DEFAULT_INNER_GAP: f64 = 0.05;
const STRIDE_SEARCH_ROUNDS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum InnerShape {
    /// One vertex carrying `d` half-loops.
    Loops,
    /// Every pair joined by `multiplicity` parallel edges, plus `loops`
    /// half-loops per vertex.
    Dense { multiplicity: usize, loops: usize },
    /// i ~ i +- g (mod s) for each stride g.
    Circulant { strides: Vec<usize> },
}

/// A d-regular multigraph on `size` vertices with neighbors computed on the
/// fly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerGraph {
    size: usize,
    degree: usize,
    shape: InnerShape,
    /// Second largest eigenvalue of the lazy walk; `None` for one vertex.
    eta2: Option<f64>,
}

impl InnerGraph {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn shape(&self) -> &InnerShape {
        &self.shape
    }

    pub fn eta2(&self) -> Option<f64> {
        self.eta2
    }

    /// Endpoint of port `port` of inner vertex `i`.
    pub fn neighbor(&self, i: usize, port: usize) -> usize {
        debug_assert!(i < self.size && port < self.degree);
        match &self.shape {
            InnerShape::Loops => i,
            InnerShape::Dense {
                multiplicity,
                loops,
            } => {
                if port < *loops {
                    return i;
                }
                let other = (port - loops) / multiplicity;
                if other < i {
                    other
                } else {
                    other + 1
                }
            }
            InnerShape::Circulant { strides } => {
                let g = strides[port / 2];
                if port % 2 == 0 {
                    (i + g) % self.size
                } else {
                    (i + self.size - g) % self.size
                }
            }
        }
    }

    pub fn to_graph(&self) -> Graph {
        let s = self.size;
        let mut b = GraphBuilder::new(s);
        match &self.shape {
            InnerShape::Loops => {
                b.add_half_loops(0, self.degree).expect("vertex 0 exists");
            }
            InnerShape::Dense {
                multiplicity,
                loops,
            } => {
                for a in 0..s {
                    b.add_half_loops(a, *loops).expect("in range");
                    for c in a + 1..s {
                        for _ in 0..*multiplicity {
                            b.add_edge(a, c).expect("in range");
                        }
                    }
                }
            }
            InnerShape::Circulant { strides } => {
                for &g in strides {
                    for a in 0..s {
                        b.add_edge(a, (a + g) % s).expect("in range");
                    }
                }
            }
        }
        b.build()
    }
}

/// eta_2 of the lazy walk on the circulant with the given strides: the
/// adjacency eigenvalues are sum_g 2 cos(2 pi j g / s) for j = 0..s-1.
fn circulant_eta2(s: usize, d: usize, strides: &[usize], cos: &[f64]) -> f64 {
    (1..s)
        .map(|j| {
            let a: f64 = strides.iter().map(|&g| 2.0 * cos[(j * g) % s]).sum();
            (1.0 + a / d as f64) / 2.0
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn circulant_strides(s: usize, d: usize) -> (Vec<usize>, f64) {
    let half = d / 2;
    let max_stride = s / 2;
    let mut strides: Vec<usize> = Vec::with_capacity(half);
    let mut g = 1;
    while strides.len() < half && g <= max_stride {
        strides.push(g);
        g *= 2;
    }
    let mut fill = 1;
    while strides.len() < half {
        if !strides.contains(&fill) {
            strides.push(fill);
        }
        fill += 1;
    }
    let cos: Vec<f64> = (0..s).map(|m| (2.0 * PI * m as f64 / s as f64).cos()).collect();
    let mut best = circulant_eta2(s, d, &strides, &cos);
    if max_stride > half {
        let mut rng = StreamRng::seed_from_u64(derive_seed(s as u64, &[d as u64]));
        for _ in 0..STRIDE_SEARCH_ROUNDS {
            let slot = rng.random_range(0..half);
            let candidate = rng.random_range(1..=max_stride);
            if strides.contains(&candidate) {
                continue;
            }
            let old = strides[slot];
            strides[slot] = candidate;
            let eta = circulant_eta2(s, d, &strides, &cos);
            if eta < best {
                best = eta;
            } else {
                strides[slot] = old;
            }
        }
    }
    strides.sort_unstable();
    (strides, best)
}

/// Builds the inner graph for cloud size `s` and inner degree `d`.
///
/// Sizes up to `d` use a dense multigraph padded with half-loops. Larger
/// sizes use a circulant whose `d/2` strides start from 1, 2, 4, ... and are
/// then improved by a short deterministic local search on the closed-form
/// spectrum.
pub fn make_inner(s: usize, d: usize) -> Result<InnerGraph> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::param(format!("inner degree must be even and at least 4, got {d}")));
    }
    if s == 0 {
        return Err(Error::param("inner graph size must be at least 1"));
    }
    let (shape, eta2) = if s == 1 {
        (InnerShape::Loops, None)
    } else if s <= d {
        let multiplicity = d / (s - 1);
        let loops = d - multiplicity * (s - 1);
        let eta2 = (1.0 + (loops as f64 - multiplicity as f64) / d as f64) / 2.0;
        (
            InnerShape::Dense {
                multiplicity,
                loops,
            },
            Some(eta2),
        )
    } else {
        let (strides, eta2) = circulant_strides(s, d);
        (InnerShape::Circulant { strides }, Some(eta2))
    };
    Ok(InnerGraph {
        size: s,
        degree: d,
        shape,
        eta2,
    })
}

/// One inner graph per distinct degree of G, each with eta_2 <= 1 - gap.
#[derive(Clone, Debug, Serialize)]
pub struct InnerFamily {
    degree: usize,
    gap: f64,
    graphs: Vec<InnerGraph>,
}

impl InnerFamily {
    pub fn for_graph(g: &Graph, d: usize, gap: f64) -> Result<Self> {
        let mut sizes: Vec<usize> = g.degrees().into_iter().filter(|&x| x > 0).collect();
        sizes.sort_unstable();
        sizes.dedup();
        Self::for_sizes(&sizes, d, gap)
    }

    pub fn for_sizes(sizes: &[usize], d: usize, gap: f64) -> Result<Self> {
        if !(gap > 0.0 && gap <= 1.0) {
            return Err(Error::param(format!("inner gap must lie in (0, 1], got {gap}")));
        }
        let mut sizes = sizes.to_vec();
        sizes.sort_unstable();
        sizes.dedup();
        let mut graphs = Vec::with_capacity(sizes.len());
        for s in sizes {
            let h = make_inner(s, d)?;
            if let Some(eta2) = h.eta2 {
                if eta2 > 1.0 - gap + 1e-12 {
                    return Err(Error::InnerGapTooSmall {
                        size: s,
                        eta2,
                        limit: 1.0 - gap,
                    });
                }
            }
            graphs.push(h);
        }
        Ok(Self {
            degree: d,
            gap,
            graphs,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn graphs(&self) -> &[InnerGraph] {
        &self.graphs
    }

    pub fn get(&self, size: usize) -> Option<&InnerGraph> {
        self.graphs
            .binary_search_by_key(&size, |h| h.size)
            .ok()
            .map(|i| &self.graphs[i])
    }

    fn require(&self, size: usize) -> Result<&InnerGraph> {
        self.get(size)
            .ok_or_else(|| Error::param(format!("inner family has no graph for degree {size}")))
    }
}

/// Product vertex (u, i): the i-th port of u, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductVertex {
    pub u: usize,
    pub i: usize,
}

/// Lazy walk on G (r) H through a rotation-map oracle of G.
#[derive(Clone, Copy, Debug)]
pub struct ReplacementProduct<'f> {
    family: &'f InnerFamily,
}

impl<'f> ReplacementProduct<'f> {
    pub fn new(family: &'f InnerFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &'f InnerFamily {
        self.family
    }

    // Choices 0..4d: below 2d hold, below 3d take inner port c - 2d, the
    // rest take one of the d parallel outer edges.
    fn transition(
        &self,
        oracle: &mut OracleHandle<'_>,
        x: ProductVertex,
        choice: usize,
    ) -> Result<ProductVertex> {
        let d = self.family.degree;
        if choice < 2 * d {
            Ok(x)
        } else if choice < 3 * d {
            let deg = oracle.degree(x.u)?;
            let h = self.family.require(deg)?;
            if x.i >= deg {
                return Err(Error::PortOutOfRange {
                    vertex: x.u,
                    port: x.i,
                    degree: deg,
                });
            }
            Ok(ProductVertex {
                u: x.u,
                i: h.neighbor(x.i, choice - 2 * d),
            })
        } else {
            let p = oracle.neighbor_index(x.u, x.i)?;
            Ok(ProductVertex {
                u: p.vertex,
                i: p.index,
            })
        }
    }
}

fn require_rotation_map(oracle: &OracleHandle<'_>) -> Result<()> {
    if oracle.mode() != OracleMode::RotationMap {
        return Err(Error::ForbiddenQuery {
            query: "neighbor & index",
            mode: "adjacency-list",
        });
    }
    Ok(())
}

/// One lazy step of G (r) H: hold with probability 1/2, move inside the
/// cloud with probability 1/4, cross to the rotation-map partner with
/// probability 1/4.
pub fn product_lazy_step<R: Rng + ?Sized>(
    oracle: &mut OracleHandle<'_>,
    family: &InnerFamily,
    x: ProductVertex,
    rng: &mut R,
) -> Result<ProductVertex> {
    ReplacementProduct::new(family).step(oracle, x, rng)
}

impl StepKernel for ReplacementProduct<'_> {
    type Vertex = ProductVertex;

    fn step<R: Rng + ?Sized>(
        &self,
        oracle: &mut OracleHandle<'_>,
        x: ProductVertex,
        rng: &mut R,
    ) -> Result<ProductVertex> {
        require_rotation_map(oracle)?;
        let choice = rng.random_range(0..4 * self.family.degree);
        self.transition(oracle, x, choice)
    }

    fn outcomes(&self, oracle: &mut OracleHandle<'_>, x: ProductVertex) -> Result<Vec<ProductVertex>> {
        require_rotation_map(oracle)?;
        (0..4 * self.family.degree)
            .map(|c| self.transition(oracle, x, c))
            .collect()
    }
}

impl VirtualGraph for ReplacementProduct<'_> {
    fn vertex_count(&self, oracle: &OracleHandle<'_>) -> u64 {
        oracle.volume()
    }

    /// A degree-proportional vertex of G, then a uniform port of it.
    fn sample_uniform<R: Rng + ?Sized>(
        &self,
        oracle: &mut OracleHandle<'_>,
        rng: &mut R,
    ) -> Result<ProductVertex> {
        let u = oracle.sample_vertex_by_degree(rng)?;
        let deg = oracle.degree(u)?;
        Ok(ProductVertex {
            u,
            i: rng.random_range(0..deg),
        })
    }
}

/// S' = {(u, i) : u in S, i < deg(u)}.
pub fn lift_set(g: &Graph, set: &[usize]) -> Result<Vec<ProductVertex>> {
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    let mut out = Vec::new();
    for u in set {
        if u >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: u, n: g.n() });
        }
        out.extend((0..g.degree(u)).map(|i| ProductVertex { u, i }));
    }
    Ok(out)
}

/// Index of (u, i) in [`materialize_product`]'s vertex numbering.
pub fn product_index(g: &Graph, x: ProductVertex) -> usize {
    g.port_id(x.u, x.i)
}

/// Builds G (r) H explicitly. Product vertex (u, i) gets index
/// `g.port_id(u, i)`. A half-loop port of G becomes d half-loops.
pub fn materialize_product(g: &Graph, family: &InnerFamily) -> Result<Graph> {
    let d = family.degree;
    let order = g.volume() as usize;
    let mut b = GraphBuilder::with_capacity(order, order * d);
    for u in 0..g.n() {
        let deg = g.degree(u);
        if deg == 0 {
            continue;
        }
        let h = family.require(deg)?.to_graph();
        for &(a, c) in h.edges() {
            b.add_edge(g.port_id(u, a), g.port_id(u, c))?;
        }
    }
    for id in 0..order {
        let p = g.port_of_id(id);
        let q = g.rotate(p.vertex, p.index);
        let other = g.port_id(q.vertex, q.index);
        if other == id {
            b.add_half_loops(id, d)?;
        } else if id < other {
            for _ in 0..d {
                b.add_edge(id, other)?;
            }
        }
    }
    Ok(b.build())
}
