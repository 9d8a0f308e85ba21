//! Two-sided collision testers: the regular-graph tester and the general
//! tester that runs it on the replacement product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CutReport;
use crate::oracle::{OracleHandle, OracleMode, QueryCounts};
use crate::product::{InnerFamily, ProductVertex, ReplacementProduct};
use crate::rng::{derive_seed, substream, tag};
use crate::walk::{pairs, run_walks, VirtualGraph, WalkConfig};

/// Constants in s = c_s / eps, r = c_r s sqrt(n'), l = c_l log2(n') ln(k) / phi^2
/// and sigma = C(r, 2) c_sigma / (k eps).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedConstants {
    pub c_s: f64,
    pub c_r: f64,
    pub c_l: f64,
    pub c_sigma: f64,
}

impl TwoSidedConstants {
    /// The threshold constant used in the original analysis.
    pub const ANALYSIS_SIGMA: f64 = 60.0;

    /// All O-constants 1 and the analysis threshold.
    pub fn unit() -> Self {
        Self {
            c_s: 1.0,
            c_r: 1.0,
            c_l: 1.0,
            c_sigma: Self::ANALYSIS_SIGMA,
        }
    }

    /// Defaults fitted by `ssexp calibrate` on the bundled gallery.
    pub fn calibrated() -> Self {
        Self {
            c_s: 2.0,
            c_r: 1.0,
            c_l: 0.015,
            c_sigma: 0.7552809477417902,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_s", self.c_s),
            ("c_r", self.c_r),
            ("c_l", self.c_l),
            ("c_sigma", self.c_sigma),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for TwoSidedConstants {
    fn default() -> Self {
        Self::calibrated()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedParams {
    /// Vertex count of the graph being walked on.
    pub n_prime: u64,
    pub s: usize,
    pub r: usize,
    pub length: usize,
    pub sigma: f64,
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::param(format!("{name} must lie in (0, 1], got {x}")));
    }
    Ok(())
}

pub fn derive_params(n_prime: u64, k: u64, eps: f64, phi: f64, c: &TwoSidedConstants) -> Result<TwoSidedParams> {
    check_unit("eps", eps)?;
    check_unit("phi", phi)?;
    c.validate()?;
    if n_prime == 0 {
        return Err(Error::EmptyGraph);
    }
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let n = n_prime as f64;
    let s = (c.c_s / eps).ceil() as usize;
    let floor = 16 * n.sqrt().ceil() as usize;
    let r = floor.max((c.c_r * s as f64 * n.sqrt()).ceil() as usize);
    let length = (c.c_l * n.log2() * (k as f64).ln() / (phi * phi)).ceil() as usize;
    let sigma = pairs(r) as f64 * c.c_sigma / (k as f64 * eps);
    Ok(TwoSidedParams {
        n_prime,
        s: s.max(1),
        r,
        length,
        sigma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Trigger<V> {
    /// Sample `sample` started at `vertex` and its walks collided `z` times.
    Collision {
        sample: usize,
        vertex: V,
        z: u64,
        sigma: f64,
    },
    Certificate(CutReport),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub queries: QueryCounts,
    pub samples: u64,
    pub walks: u64,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict<V> {
    pub decision: Decision,
    pub trigger: Option<Trigger<V>>,
    pub stats: RunStats,
}

/// Walk seed for the sample with index `sample` in a run seeded `seed`.
fn sample_walk_seed(seed: u64, sample: usize) -> u64 {
    derive_seed(seed, &[tag::SAMPLE, sample as u64, tag::WALK])
}

/// Draws sample `j` and counts the collisions of its `r` walks.
fn sample_collisions<K: VirtualGraph>(
    kernel: &K,
    oracle: &mut OracleHandle<'_>,
    p: &TwoSidedParams,
    seed: u64,
    j: usize,
) -> Result<(K::Vertex, u64)> {
    let mut rng = substream(seed, &[tag::SAMPLE, j as u64]);
    let v = kernel.sample_uniform(oracle, &mut rng)?;
    let cfg = WalkConfig::new(p.length, p.r, sample_walk_seed(seed, j))?;
    let stat = run_walks(kernel, oracle, v, &cfg)?;
    Ok((v, stat.collisions))
}

/// Collision counts of all `s` samples, without early abort. The tester
/// with threshold sigma rejects on this seed iff the maximum exceeds sigma.
pub fn collision_profile<K: VirtualGraph>(
    kernel: &K,
    oracle: &mut OracleHandle<'_>,
    p: &TwoSidedParams,
    seed: u64,
) -> Result<Vec<(K::Vertex, u64)>> {
    (0..p.s)
        .map(|j| sample_collisions(kernel, oracle, p, seed, j))
        .collect()
}

/// Samples `s` uniform vertices of the regular graph behind `kernel`, runs
/// `r` lazy walks of length `l` from each, and rejects as soon as one
/// sample's collision count exceeds sigma.
pub fn sse_test_regular<K: VirtualGraph>(
    kernel: &K,
    oracle: &mut OracleHandle<'_>,
    p: &TwoSidedParams,
    seed: u64,
) -> Result<Verdict<K::Vertex>> {
    let before = oracle.counts();
    let mut stats = RunStats::default();
    let mut trigger = None;
    for j in 0..p.s {
        let (v, z) = sample_collisions(kernel, oracle, p, seed, j)?;
        stats.samples += 1;
        stats.walks += p.r as u64;
        stats.steps += (p.r * p.length) as u64;
        if z as f64 > p.sigma {
            trigger = Some(Trigger::Collision {
                sample: j,
                vertex: v,
                z,
                sigma: p.sigma,
            });
            break;
        }
    }
    let after = oracle.counts();
    stats.queries = QueryCounts {
        degree: after.degree - before.degree,
        neighbor: after.neighbor - before.neighbor,
        neighbor_index: after.neighbor_index - before.neighbor_index,
        edge_samples: after.edge_samples - before.edge_samples,
    };
    let decision = if trigger.is_some() {
        Decision::Reject
    } else {
        Decision::Accept
    };
    Ok(Verdict {
        decision,
        trigger,
        stats,
    })
}

/// Parameters of the general tester for a graph of volume `volume`.
pub fn general_params(volume: u64, k: u64, eps: f64, phi: f64, c: &TwoSidedConstants) -> Result<TwoSidedParams> {
    if k > volume {
        return Err(Error::param(format!("k = {k} exceeds vol(V) = {volume}")));
    }
    derive_params(volume, k, eps, phi, c)
}

/// The regular tester run on G (r) H with n' = vol(G).
pub fn sse_test_general(
    oracle: &mut OracleHandle<'_>,
    family: &InnerFamily,
    k: u64,
    eps: f64,
    phi: f64,
    c: &TwoSidedConstants,
    seed: u64,
) -> Result<Verdict<ProductVertex>> {
    if oracle.mode() != OracleMode::RotationMap {
        return Err(Error::ForbiddenQuery {
            query: "neighbor & index",
            mode: "adjacency-list",
        });
    }
    let p = general_params(oracle.volume(), k, eps, phi, c)?;
    sse_test_regular(&ReplacementProduct::new(family), oracle, &p, seed)
}
