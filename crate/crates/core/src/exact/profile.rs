use std::cmp::Ordering;

use num_rational::Ratio;
use serde::Serialize;

use super::dense::symmetrized_walk_matrix;
use super::eigen::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::graph::{conductance, CutReport, Graph};

/// Largest connected component the enumeration will walk through.
pub const MAX_COMPONENT_SIZE: usize = 24;

/// phi(k) with a witness. `minimum` is `None` when no nonempty set has
/// volume at most `k`, which reads as +infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionProfile {
    pub k: u64,
    pub minimum: Option<CutReport>,
}

impl ExpansionProfile {
    pub fn value(&self) -> Option<Ratio<u64>> {
        self.minimum.as_ref().map(|r| r.conductance)
    }

    /// True when the graph is a (k, phi)-expander for this `phi`.
    pub fn certifies(&self, phi: f64) -> bool {
        match &self.minimum {
            None => true,
            Some(r) => r.conductance_f64() >= phi,
        }
    }
}

struct Best {
    cut: u64,
    volume: u64,
    vertices: Vec<usize>,
}

impl Best {
    /// Smaller conductance, then fewer vertices, then lexicographically
    /// smaller vertex list.
    fn beats(&self, cut: u64, volume: u64, vertices: &[usize]) -> bool {
        let lhs = cut as u128 * self.volume as u128;
        let rhs = self.cut as u128 * volume as u128;
        match lhs.cmp(&rhs) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match vertices.len().cmp(&self.vertices.len()) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => vertices < self.vertices.as_slice(),
            },
        }
    }
}

struct Search<'a> {
    g: &'a Graph,
    k: u64,
    comp: Vec<usize>,
    member: Vec<bool>,
    stack: Vec<usize>,
    volume: u64,
    cut: i64,
    best: Option<Best>,
}

impl Search<'_> {
    fn toggle(&mut self, u: usize, on: bool) {
        let sign = if on { 1 } else { -1 };
        let mut delta = 0i64;
        for p in self.g.ports(u) {
            if p.vertex == u {
                continue;
            }
            delta += if self.member[p.vertex] { -1 } else { 1 };
        }
        self.cut += sign * delta;
        self.member[u] = on;
        let deg = self.g.degree(u) as u64;
        if on {
            self.volume += deg;
        } else {
            self.volume -= deg;
        }
    }

    fn run(&mut self, start: usize) {
        for idx in start..self.comp.len() {
            let u = self.comp[idx];
            if self.volume + self.g.degree(u) as u64 > self.k {
                continue;
            }
            self.toggle(u, true);
            self.stack.push(u);
            let cut = self.cut as u64;
            let better = match &self.best {
                None => true,
                Some(b) => b.beats(cut, self.volume, &self.stack),
            };
            if better {
                self.best = Some(Best {
                    cut,
                    volume: self.volume,
                    vertices: self.stack.clone(),
                });
            }
            self.run(idx + 1);
            self.stack.pop();
            self.toggle(u, false);
        }
    }
}

/// Exhaustive phi(k) = min { phi(S) : 0 < vol(S) <= k }.
///
/// A minimizer can always be taken inside one connected component (the
/// conductance of a union is a mediant of its parts), so each component is
/// enumerated separately with volume pruning.
pub fn expansion_profile(g: &Graph, k: u64) -> Result<ExpansionProfile> {
    let components: Vec<Vec<usize>> = g
        .components()
        .into_iter()
        .map(|c| c.into_iter().filter(|&u| g.degree(u) > 0).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect();
    if components.iter().any(|c| c.len() > MAX_COMPONENT_SIZE) {
        return Err(Error::CapExceeded {
            what: "connected component size for exhaustive enumeration",
            limit: MAX_COMPONENT_SIZE,
        });
    }
    let mut search = Search {
        g,
        k,
        comp: Vec::new(),
        member: vec![false; g.n()],
        stack: Vec::new(),
        volume: 0,
        cut: 0,
        best: None,
    };
    for comp in components {
        search.comp = comp;
        search.run(0);
    }
    let minimum = match search.best {
        None => None,
        Some(b) => Some(conductance(g, &b.vertices)?),
    };
    Ok(ExpansionProfile { k, minimum })
}

/// phi(G) = phi(vol(V)/2).
pub fn graph_conductance(g: &Graph) -> Result<ExpansionProfile> {
    expansion_profile(g, g.volume() / 2)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralBound {
    /// Second smallest eigenvalue of the normalized Laplacian.
    pub lambda2: f64,
    /// Lower bound on phi(k): every S has e(S, V \ S) >= lambda2 vol(S) vol(V \ S) / vol(V).
    pub bound: f64,
}

/// Spectral certificate for graphs too large to enumerate.
pub fn spectral_profile_bound(g: &Graph, k: u64) -> Result<SpectralBound> {
    let report = symmetric_eigenvalues(&symmetrized_walk_matrix(g)?)?;
    let eta2 = report.eta2().unwrap_or(0.0);
    let lambda2 = (2.0 * (1.0 - eta2)).max(0.0);
    let vol = g.volume() as f64;
    let bound = lambda2 * (1.0 - (k as f64).min(vol) / vol);
    Ok(SpectralBound { lambda2, bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct PeeledSet {
    pub in_residual: CutReport,
    pub in_graph: CutReport,
    pub kept: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FarDecomposition {
    pub peeled: Vec<PeeledSet>,
    pub kept_volume: u64,
}

/// Greedy peeling: while the residual graph has a set of volume at most
/// `k_star` with conductance below `phi_star`, remove its optimal one. Sets
/// are then kept when their conductance in `g` is below `11 c2 phi_star`
/// and their volume at most `2 k_star`.
pub fn far_decomposition(g: &Graph, k_star: u64, phi_star: f64, c2: f64) -> Result<FarDecomposition> {
    if !(phi_star > 0.0 && c2 > 0.0) {
        return Err(Error::param("phi* and c2 must be positive"));
    }
    if phi_star > 1.0 / (20.0 * c2) + 1e-12 {
        return Err(Error::param(format!(
            "phi* = {phi_star} exceeds 1/(20 c2) = {}",
            1.0 / (20.0 * c2)
        )));
    }
    let mut residual: Vec<usize> = (0..g.n()).collect();
    let mut peeled = Vec::new();
    let mut kept_volume = 0;
    loop {
        let h = g.induced(&residual)?;
        let Some(w) = expansion_profile(&h, k_star)?.minimum else {
            break;
        };
        if w.conductance_f64() >= phi_star {
            break;
        }
        let original: Vec<usize> = w.vertices.iter().map(|&i| residual[i]).collect();
        let in_graph = conductance(g, &original)?;
        let kept = in_graph.conductance_f64() < 11.0 * c2 * phi_star && in_graph.volume <= 2 * k_star;
        if kept {
            kept_volume += in_graph.volume;
        }
        let in_residual = CutReport {
            vertices: original.clone(),
            ..w
        };
        residual.retain(|u| original.binary_search(u).is_err());
        peeled.push(PeeledSet {
            in_residual,
            in_graph,
            kept,
        });
    }
    Ok(FarDecomposition {
        peeled,
        kept_volume,
    })
}
