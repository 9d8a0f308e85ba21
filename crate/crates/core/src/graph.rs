//! Multigraph storage with an explicit rotation map.
//!
//! Every vertex owns an ordered list of ports. Port `i` of `u` stores the
//! pair `(v, j)` such that `v` is the `i`-th neighbor of `u` and `u` is the
//! `j`-th neighbor of `v`. Parallel edges get distinct ports. A half-loop is
//! a single port that points back at itself; it adds 1 to the degree and is
//! never part of a cut.

use std::fmt::Write as _;
use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One endpoint of the rotation map: the `index`-th port of `vertex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Port {
    pub vertex: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    rotation: Vec<Port>,
    edges: Vec<(usize, usize)>,
}

/// Collects edges in order; ports are assigned by order of appearance.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, edges: usize) -> Self {
        Self {
            n,
            edges: Vec::with_capacity(edges),
        }
    }

    /// Adds an edge; `u == v` adds a half-loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<&mut Self> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        self.edges.push((u, v));
        Ok(self)
    }

    pub fn add_half_loops(&mut self, u: usize, count: usize) -> Result<&mut Self> {
        for _ in 0..count {
            self.add_edge(u, u)?;
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn build(self) -> Graph {
        let n = self.n;
        let mut degree = vec![0usize; n];
        for &(u, v) in &self.edges {
            degree[u] += 1;
            if u != v {
                degree[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = vec![0usize; n];
        let placeholder = Port { vertex: 0, index: 0 };
        let mut rotation = vec![placeholder; offsets[n]];
        for &(u, v) in &self.edges {
            let i = fill[u];
            fill[u] += 1;
            if u == v {
                rotation[offsets[u] + i] = Port { vertex: u, index: i };
            } else {
                let j = fill[v];
                fill[v] += 1;
                rotation[offsets[u] + i] = Port { vertex: v, index: j };
                rotation[offsets[v] + j] = Port { vertex: u, index: i };
            }
        }
        Graph {
            offsets,
            rotation,
            edges: self.edges,
        }
    }
}

impl Graph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for (u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// vol(V) = sum of degrees. Each non-loop edge contributes 2 and each
    /// half-loop 1.
    pub fn volume(&self) -> u64 {
        self.rotation.len() as u64
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|u| self.degree(u)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn ports(&self, u: usize) -> &[Port] {
        &self.rotation[self.offsets[u]..self.offsets[u + 1]]
    }

    /// The rotation map entry for port `i` of `u`.
    pub fn rotate(&self, u: usize, i: usize) -> Port {
        self.rotation[self.offsets[u] + i]
    }

    /// Global index of port `(u, i)` in `0..vol(V)`.
    pub fn port_id(&self, u: usize, i: usize) -> usize {
        self.offsets[u] + i
    }

    /// Inverse of [`Graph::port_id`].
    pub fn port_of_id(&self, id: usize) -> Port {
        // partition_point gives the first offset strictly above `id`.
        let vertex = self.offsets.partition_point(|&o| o <= id) - 1;
        Port {
            vertex,
            index: id - self.offsets[vertex],
        }
    }

    pub fn half_loops(&self, u: usize) -> usize {
        self.ports(u)
            .iter()
            .enumerate()
            .filter(|(i, p)| p.vertex == u && p.index == *i)
            .count()
    }

    /// Edges in insertion order; `(u, u)` is a half-loop.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn volume_of(&self, set: &[usize]) -> u64 {
        set.iter().map(|&u| self.degree(u) as u64).sum()
    }

    pub fn is_regular(&self) -> bool {
        let n = self.n();
        n == 0 || (1..n).all(|u| self.degree(u) == self.degree(0))
    }

    /// Exhaustive check that the rotation map is an involution.
    pub fn check_involution(&self) -> Result<()> {
        for u in 0..self.n() {
            for (i, p) in self.ports(u).iter().enumerate() {
                if p.vertex >= self.n() || p.index >= self.degree(p.vertex) {
                    return Err(Error::Invariant(format!(
                        "port ({u},{i}) points outside the graph"
                    )));
                }
                let back = self.rotate(p.vertex, p.index);
                if back.vertex != u || back.index != i {
                    return Err(Error::Invariant(format!(
                        "rotation map is not an involution at ({u},{i})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Subgraph induced on `keep`, relabelled in the given order. Edges to
    /// removed vertices disappear; half-loops survive.
    pub fn induced(&self, keep: &[usize]) -> Result<Graph> {
        let mut relabel = vec![usize::MAX; self.n()];
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.n() {
                return Err(Error::VertexOutOfRange { vertex: old, n: self.n() });
            }
            relabel[old] = new;
        }
        let edges = self.edges.iter().filter_map(|&(u, v)| {
            let (a, b) = (relabel[u], relabel[v]);
            (a != usize::MAX && b != usize::MAX).then_some((a, b))
        });
        Graph::from_edges(keep.len(), edges)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph::from_edges(shift + other.n(), edges).expect("shifted ids are in range")
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for p in self.ports(u) {
                    if !seen[p.vertex] {
                        seen[p.vertex] = true;
                        comp.push(p.vertex);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Serializes to the edge-list text format read by [`parse_edge_list`].
    /// Edges are written in insertion order, so the rotation map survives a
    /// round trip.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(8 * self.edges.len() + 16);
        writeln!(out, "{} {}", self.n(), self.volume()).unwrap();
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }
}

/// Parses the edge-list format: a header line `n vol`, then one `u v` line
/// per edge (`u u` is a half-loop). Blank lines and lines starting with `#`
/// are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header line `n vol`".into(),
    })?;
    let (n, declared) = parse_pair::<u64>(hline, header)?;
    let n = usize::try_from(n).map_err(|_| Error::Parse {
        line: hline,
        message: "vertex count too large".into(),
    })?;

    let mut builder = GraphBuilder::new(n);
    for (line, text) in lines {
        let (u, v) = parse_pair::<usize>(line, text)?;
        builder.add_edge(u, v).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    let g = builder.build();
    if g.volume() != declared {
        return Err(Error::VolumeMismatch {
            declared,
            actual: g.volume(),
        });
    }
    Ok(g)
}

fn parse_pair<T: std::str::FromStr>(line: usize, text: &str) -> Result<(T, T)> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<T> {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line,
            message: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse {what} from `{tok}`"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if let Some(extra) = it.next() {
        return Err(Error::Parse {
            line,
            message: format!("unexpected trailing token `{extra}`"),
        });
    }
    Ok((a, b))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &Graph, comment: Option<&str>) -> Result<()> {
    let mut text = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(text, "# {line}").unwrap();
        }
    }
    text.push_str(&g.to_edge_list());
    std::fs::write(path, text)?;
    Ok(())
}

/// A vertex set with its exact volume, cut size and conductance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    pub vertices: Vec<usize>,
    pub volume: u64,
    pub cut_size: u64,
    #[serde(with = "ratio_string")]
    pub conductance: Ratio<u64>,
}

impl CutReport {
    pub fn conductance_f64(&self) -> f64 {
        *self.conductance.numer() as f64 / *self.conductance.denom() as f64
    }
}

/// phi(S) = e(S, V \ S) / vol(S), computed exactly.
pub fn conductance(g: &Graph, set: &[usize]) -> Result<CutReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut vertices = set.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    let n = g.n();
    let mut member = vec![false; n];
    for &u in &vertices {
        if u >= n {
            return Err(Error::VertexOutOfRange { vertex: u, n });
        }
        member[u] = true;
    }
    let mut volume = 0u64;
    let mut cut_size = 0u64;
    for &u in &vertices {
        volume += g.degree(u) as u64;
        cut_size += g.ports(u).iter().filter(|p| !member[p.vertex]).count() as u64;
    }
    if volume == 0 {
        return Err(Error::ZeroVolume);
    }
    Ok(CutReport {
        vertices,
        volume,
        cut_size,
        conductance: Ratio::new(cut_size, volume),
    })
}

/// Serde adapter writing exact rationals as `"num/den"`.
pub mod ratio_string {
    use num_rational::Ratio;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        let (a, b) = text
            .split_once('/')
            .ok_or_else(|| D::Error::custom("expected `num/den`"))?;
        let num: u64 = a.trim().parse().map_err(D::Error::custom)?;
        let den: u64 = b.trim().parse().map_err(D::Error::custom)?;
        if den == 0 {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(num, den))
    }
}
