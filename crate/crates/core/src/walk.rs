//! Lazy random walks driven through an oracle, and collision counting over
//! walk endpoints.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleHandle;
use crate::rng::{substream, tag};

/// One step of a lazy walk, with the outcome enumerable for exact checks.
pub trait StepKernel: Sync {
    type Vertex: Copy + Eq + Hash + Ord + Debug + Send + Sync + Serialize;

    fn step<R: Rng + ?Sized>(
        &self,
        oracle: &mut OracleHandle<'_>,
        v: Self::Vertex,
        rng: &mut R,
    ) -> Result<Self::Vertex>;

    /// All equally likely outcomes of one step from `v`, one per value of
    /// the step's random choice.
    fn outcomes(&self, oracle: &mut OracleHandle<'_>, v: Self::Vertex) -> Result<Vec<Self::Vertex>>;
}

/// A regular graph, possibly only virtual, that supports uniform vertex
/// sampling as well as lazy steps.
pub trait VirtualGraph: StepKernel {
    fn vertex_count(&self, oracle: &OracleHandle<'_>) -> u64;

    fn sample_uniform<R: Rng + ?Sized>(
        &self,
        oracle: &mut OracleHandle<'_>,
        rng: &mut R,
    ) -> Result<Self::Vertex>;
}

// Choice encoding for the plain lazy walk: even choices hold, odd choice
// 2i+1 follows port i. An isolated vertex has the single choice 0.
fn lazy_transition(oracle: &mut OracleHandle<'_>, v: usize, choice: usize) -> Result<usize> {
    if choice % 2 == 0 {
        Ok(v)
    } else {
        oracle.neighbor(v, choice / 2)
    }
}

/// One lazy step: hold with probability 1/2, otherwise follow a uniform
/// port. Costs one degree query and at most one neighbor query.
pub fn lazy_step<R: Rng + ?Sized>(oracle: &mut OracleHandle<'_>, v: usize, rng: &mut R) -> Result<usize> {
    let deg = oracle.degree(v)?;
    if deg == 0 {
        return Ok(v);
    }
    let choice = rng.random_range(0..2 * deg);
    lazy_transition(oracle, v, choice)
}

/// Lazy step on the virtual `bound`-regular graph that pads every vertex
/// with `bound - deg(v)` half-loops: move along each real port with
/// probability `1 / (2 bound)`, hold otherwise.
pub fn lazy_step_bounded<R: Rng + ?Sized>(
    oracle: &mut OracleHandle<'_>,
    bound: usize,
    v: usize,
    rng: &mut R,
) -> Result<usize> {
    let deg = checked_degree(oracle, bound, v)?;
    if deg == 0 {
        return Ok(v);
    }
    let choice = rng.random_range(0..2 * bound);
    if choice < deg {
        oracle.neighbor(v, choice)
    } else {
        Ok(v)
    }
}

fn checked_degree(oracle: &mut OracleHandle<'_>, bound: usize, v: usize) -> Result<usize> {
    let deg = oracle.degree(v)?;
    if deg > bound {
        return Err(Error::DegreeBoundExceeded {
            vertex: v,
            degree: deg,
            bound,
        });
    }
    Ok(deg)
}

/// Plain lazy walk, W = (I + D^-1 A) / 2.
#[derive(Clone, Copy, Debug, Default)]
pub struct LazyWalk;

impl StepKernel for LazyWalk {
    type Vertex = usize;

    fn step<R: Rng + ?Sized>(&self, oracle: &mut OracleHandle<'_>, v: usize, rng: &mut R) -> Result<usize> {
        lazy_step(oracle, v, rng)
    }

    fn outcomes(&self, oracle: &mut OracleHandle<'_>, v: usize) -> Result<Vec<usize>> {
        let deg = oracle.degree(v)?;
        let choices = if deg == 0 { 1 } else { 2 * deg };
        (0..choices).map(|c| lazy_transition(oracle, v, c)).collect()
    }
}

/// The graph padded with half-loops to exact `bound`-regularity, walked
/// without materializing the padding.
#[derive(Clone, Copy, Debug)]
pub struct PaddedGraph {
    pub bound: usize,
}

impl PaddedGraph {
    pub fn new(bound: usize) -> Result<Self> {
        if bound == 0 {
            return Err(Error::param("degree bound must be positive"));
        }
        Ok(Self { bound })
    }
}

impl StepKernel for PaddedGraph {
    type Vertex = usize;

    fn step<R: Rng + ?Sized>(&self, oracle: &mut OracleHandle<'_>, v: usize, rng: &mut R) -> Result<usize> {
        lazy_step_bounded(oracle, self.bound, v, rng)
    }

    fn outcomes(&self, oracle: &mut OracleHandle<'_>, v: usize) -> Result<Vec<usize>> {
        let deg = checked_degree(oracle, self.bound, v)?;
        (0..2 * self.bound)
            .map(|c| if c < deg { oracle.neighbor(v, c) } else { Ok(v) })
            .collect()
    }
}

impl VirtualGraph for PaddedGraph {
    fn vertex_count(&self, oracle: &OracleHandle<'_>) -> u64 {
        oracle.n() as u64
    }

    fn sample_uniform<R: Rng + ?Sized>(&self, oracle: &mut OracleHandle<'_>, rng: &mut R) -> Result<usize> {
        if oracle.n() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(rng.random_range(0..oracle.n()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub length: usize,
    pub walks: usize,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(length: usize, walks: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            length,
            walks,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.walks < 2 {
            return Err(Error::param(format!(
                "need at least 2 walks to count collisions, got {}",
                self.walks
            )));
        }
        Ok(())
    }
}

/// Endpoints of `r` walks and their pairwise collision count Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionStat<V> {
    pub endpoints: Vec<V>,
    pub collisions: u64,
}

impl<V: Copy + Eq + Hash> CollisionStat<V> {
    /// Z = sum over distinct endpoints of C(multiplicity, 2).
    pub fn from_endpoints(endpoints: Vec<V>) -> Self {
        let mut mult: HashMap<V, u64> = HashMap::with_capacity(endpoints.len());
        for &v in &endpoints {
            *mult.entry(v).or_insert(0) += 1;
        }
        let collisions = mult.values().map(|&m| m * (m - 1) / 2).sum();
        Self {
            endpoints,
            collisions,
        }
    }

    pub fn walks(&self) -> usize {
        self.endpoints.len()
    }
}

pub fn pairs(r: usize) -> u64 {
    let r = r as u64;
    r * r.saturating_sub(1) / 2
}

/// Runs `cfg.walks` independent walks of `cfg.length` steps from `start`.
/// Walk `w` draws from the substream `(cfg.seed, w)`, so the endpoints do
/// not depend on how the walks are scheduled.
pub fn run_walks<K: StepKernel>(
    kernel: &K,
    oracle: &mut OracleHandle<'_>,
    start: K::Vertex,
    cfg: &WalkConfig,
) -> Result<CollisionStat<K::Vertex>> {
    cfg.validate()?;
    let mut endpoints = Vec::with_capacity(cfg.walks);
    for w in 0..cfg.walks {
        let mut rng = substream(cfg.seed, &[tag::WALK, w as u64]);
        let mut v = start;
        for _ in 0..cfg.length {
            v = kernel.step(oracle, v, &mut rng)?;
        }
        endpoints.push(v);
    }
    Ok(CollisionStat::from_endpoints(endpoints))
}
