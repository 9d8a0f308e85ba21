//! Deterministic instance generators.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::rng::{substream, tag, StreamRng};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphKind {
    /// Uniform-ish simple d-regular graph via incremental pairing.
    RandomRegular { n: usize, d: usize },
    /// `count` cliques of size `clique`, joined in a cycle by single bridges.
    CliqueChain { clique: usize, count: usize },
    /// Center 0 with leaves 1..n.
    Star { n: usize },
    /// Two cliques joined by one bridge.
    Barbell { clique: usize },
    /// A clique attached by `bridges` edges to a random `d`-regular graph
    /// on `n` vertices.
    PlantedCut {
        clique: usize,
        bridges: usize,
        n: usize,
        d: usize,
    },
    Complete { n: usize },
    DisjointCliques { clique: usize, count: usize },
    /// Random multigraph with parallel edges and half-loops; every vertex
    /// ends up with degree at least 1.
    RandomMultigraph {
        n: usize,
        edges: usize,
        half_loops: usize,
    },
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::RandomRegular { n, d } => write!(f, "random-regular n={n} d={d}"),
            GraphKind::CliqueChain { clique, count } => {
                write!(f, "clique-chain clique={clique} count={count}")
            }
            GraphKind::Star { n } => write!(f, "star n={n}"),
            GraphKind::Barbell { clique } => write!(f, "barbell clique={clique}"),
            GraphKind::PlantedCut {
                clique,
                bridges,
                n,
                d,
            } => write!(
                f,
                "planted-cut clique={clique} bridges={bridges} n={n} d={d}"
            ),
            GraphKind::Complete { n } => write!(f, "complete n={n}"),
            GraphKind::DisjointCliques { clique, count } => {
                write!(f, "disjoint-cliques clique={clique} count={count}")
            }
            GraphKind::RandomMultigraph {
                n,
                edges,
                half_loops,
            } => write!(
                f,
                "random-multigraph n={n} edges={edges} half-loops={half_loops}"
            ),
        }
    }
}

pub fn generate(kind: &GraphKind, seed: u64) -> Result<Graph> {
    let mut rng = substream(seed, &[tag::GENERATE]);
    match *kind {
        GraphKind::RandomRegular { n, d } => random_regular(n, d, &mut rng),
        GraphKind::CliqueChain { clique, count } => clique_chain(clique, count),
        GraphKind::Star { n } => star(n),
        GraphKind::Barbell { clique } => barbell(clique),
        GraphKind::PlantedCut {
            clique,
            bridges,
            n,
            d,
        } => planted_cut(clique, bridges, n, d, &mut rng),
        GraphKind::Complete { n } => {
            if n == 0 {
                return Err(Error::param("complete graph needs n >= 1"));
            }
            Ok(disjoint_cliques(n, 1))
        }
        GraphKind::DisjointCliques { clique, count } => {
            if clique == 0 || count == 0 {
                return Err(Error::param("disjoint cliques need clique >= 1 and count >= 1"));
            }
            Ok(disjoint_cliques(clique, count))
        }
        GraphKind::RandomMultigraph {
            n,
            edges,
            half_loops,
        } => random_multigraph(n, edges, half_loops, &mut rng),
    }
}

fn add_clique(b: &mut GraphBuilder, base: usize, size: usize) {
    for i in 0..size {
        for j in i + 1..size {
            b.add_edge(base + i, base + j).expect("clique ids in range");
        }
    }
}

fn disjoint_cliques(clique: usize, count: usize) -> Graph {
    let mut b = GraphBuilder::new(clique * count);
    for c in 0..count {
        add_clique(&mut b, c * clique, clique);
    }
    b.build()
}

pub fn clique_chain(clique: usize, count: usize) -> Result<Graph> {
    if clique == 0 || count == 0 {
        return Err(Error::param("clique chain needs clique >= 1 and count >= 1"));
    }
    let mut b = GraphBuilder::new(clique * count);
    for c in 0..count {
        add_clique(&mut b, c * clique, clique);
    }
    if count >= 2 {
        for c in 0..count {
            let next = (c + 1) % count;
            b.add_edge(c * clique + clique - 1, next * clique)?;
        }
    }
    Ok(b.build())
}

pub fn star(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("star needs n >= 2"));
    }
    Graph::from_edges(n, (1..n).map(|leaf| (0, leaf)))
}

pub fn barbell(clique: usize) -> Result<Graph> {
    if clique == 0 {
        return Err(Error::param("barbell needs clique >= 1"));
    }
    let mut b = GraphBuilder::new(2 * clique);
    add_clique(&mut b, 0, clique);
    add_clique(&mut b, clique, clique);
    b.add_edge(clique - 1, clique)?;
    Ok(b.build())
}

const PAIRING_RESTARTS: usize = 1000;
const PAIRING_TRIES: usize = 200;

fn random_regular_edges(n: usize, d: usize, rng: &mut StreamRng) -> Result<Vec<(usize, usize)>> {
    if (n * d) % 2 != 0 {
        return Err(Error::param(format!("n*d must be even (n={n}, d={d})")));
    }
    if d >= n && d > 0 {
        return Err(Error::param(format!(
            "a simple {d}-regular graph needs more than {d} vertices (n={n})"
        )));
    }
    'restart: for _ in 0..PAIRING_RESTARTS {
        let mut points: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
        let mut seen = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        while !points.is_empty() {
            let mut paired = false;
            for _ in 0..PAIRING_TRIES {
                let i = rng.random_range(0..points.len());
                let j = rng.random_range(0..points.len());
                let (u, v) = (points[i], points[j]);
                let key = (u.min(v), u.max(v));
                if i == j || u == v || seen.contains(&key) {
                    continue;
                }
                seen.insert(key);
                edges.push(key);
                let (hi, lo) = (i.max(j), i.min(j));
                points.swap_remove(hi);
                points.swap_remove(lo);
                paired = true;
                break;
            }
            if !paired {
                continue 'restart;
            }
        }
        return Ok(edges);
    }
    Err(Error::param(format!(
        "failed to pair a simple {d}-regular graph on {n} vertices"
    )))
}

fn random_regular(n: usize, d: usize, rng: &mut StreamRng) -> Result<Graph> {
    Graph::from_edges(n, random_regular_edges(n, d, rng)?)
}

fn planted_cut(
    clique: usize,
    bridges: usize,
    n: usize,
    d: usize,
    rng: &mut StreamRng,
) -> Result<Graph> {
    if clique == 0 || n == 0 {
        return Err(Error::param("planted cut needs a nonempty clique and expander"));
    }
    let mut b = GraphBuilder::new(clique + n);
    add_clique(&mut b, 0, clique);
    for (u, v) in random_regular_edges(n, d, rng)? {
        b.add_edge(clique + u, clique + v)?;
    }
    for i in 0..bridges {
        let target = clique + rng.random_range(0..n);
        b.add_edge(i % clique, target)?;
    }
    Ok(b.build())
}

fn random_multigraph(n: usize, edges: usize, half_loops: usize, rng: &mut StreamRng) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("random multigraph needs n >= 1"));
    }
    let mut b = GraphBuilder::new(n);
    let mut degree = vec![0usize; n];
    for _ in 0..edges {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            // Full self-loops are written as two half-loops.
            b.add_half_loops(u, 2)?;
            degree[u] += 2;
        } else {
            b.add_edge(u, v)?;
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    for _ in 0..half_loops {
        let u = rng.random_range(0..n);
        b.add_edge(u, u)?;
        degree[u] += 1;
    }
    for u in 0..n {
        if degree[u] == 0 {
            if n == 1 {
                b.add_edge(u, u)?;
            } else {
                let v = (u + 1 + rng.random_range(0..n - 1)) % n;
                b.add_edge(u, v)?;
                degree[v] += 1;
            }
            degree[u] += 1;
        }
    }
    Ok(b.build())
}
