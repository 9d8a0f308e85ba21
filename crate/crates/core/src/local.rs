//! LocalSS: truncated lazy walks with sweep cuts, and the one-sided tester
//! built on it.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{conductance, CutReport};
use crate::oracle::{OracleHandle, QueryCounts};
use crate::rng::{substream, tag};
use crate::tester::{Decision, RunStats, Trigger, Verdict};

const MASS_TOLERANCE: f64 = 1e-12;

/// Compensated sum.
fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Nonnegative masses on finitely many vertices; zero entries are never
/// stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseDistribution {
    entries: BTreeMap<usize, f64>,
    total: f64,
}

impl SparseDistribution {
    pub fn point(v: usize) -> Self {
        Self {
            entries: BTreeMap::from([(v, 1.0)]),
            total: 1.0,
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (v, m) in entries {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::param(format!("mass at {v} must be finite and nonnegative")));
            }
            if m > 0.0 {
                *map.entry(v).or_insert(0.0) += m;
            }
        }
        Ok(Self::from_map(map))
    }

    fn from_map(entries: BTreeMap<usize, f64>) -> Self {
        let total = kahan_sum(entries.values().copied());
        Self { entries, total }
    }

    pub fn get(&self, v: usize) -> f64 {
        self.entries.get(&v).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Entries in ascending vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&v, &m)| (v, m))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationRule {
    /// Drop q(u) below delta * deg(u).
    #[default]
    PerVertex,
    /// Drop q(u) below delta * deg(seed).
    SeedDegree,
}

/// Degree lookups through the oracle, each vertex queried once.
struct Degrees<'a, 'g> {
    oracle: &'a mut OracleHandle<'g>,
    cache: HashMap<usize, usize>,
}

impl<'a, 'g> Degrees<'a, 'g> {
    fn new(oracle: &'a mut OracleHandle<'g>) -> Self {
        Self {
            oracle,
            cache: HashMap::new(),
        }
    }

    fn of(&mut self, v: usize) -> Result<usize> {
        if let Some(&d) = self.cache.get(&v) {
            return Ok(d);
        }
        let d = self.oracle.degree(v)?;
        self.cache.insert(v, d);
        Ok(d)
    }
}

/// Keeps the entries with q(u) >= delta * deg, where deg is deg(u) or the
/// seed's degree depending on `rule`.
pub fn truncate(
    q: &SparseDistribution,
    delta: f64,
    rule: TruncationRule,
    seed_degree: usize,
    mut degree: impl FnMut(usize) -> Result<usize>,
) -> Result<SparseDistribution> {
    let mut kept = BTreeMap::new();
    for (u, m) in q.iter() {
        let deg = match rule {
            TruncationRule::PerVertex => degree(u)?,
            TruncationRule::SeedDegree => seed_degree,
        };
        if m >= delta * deg as f64 {
            kept.insert(u, m);
        }
    }
    Ok(SparseDistribution::from_map(kept))
}

fn walk_step(degrees: &mut Degrees<'_, '_>, p: &SparseDistribution) -> Result<SparseDistribution> {
    let mut q: BTreeMap<usize, f64> = BTreeMap::new();
    for (u, m) in p.iter() {
        let deg = degrees.of(u)?;
        if deg == 0 {
            *q.entry(u).or_insert(0.0) += m;
            continue;
        }
        *q.entry(u).or_insert(0.0) += m / 2.0;
        let share = m / (2.0 * deg as f64);
        for i in 0..deg {
            let w = degrees.oracle.neighbor(u, i)?;
            *q.entry(w).or_insert(0.0) += share;
        }
    }
    q.retain(|_, m| *m > 0.0);
    let q = SparseDistribution::from_map(q);
    if (q.total - p.total).abs() > MASS_TOLERANCE * p.total {
        return Err(Error::Invariant(format!(
            "walk step changed the mass from {} to {}",
            p.total, q.total
        )));
    }
    Ok(q)
}

/// q = p W, touching only the support of p and its neighbors.
pub fn sparse_walk_step(oracle: &mut OracleHandle<'_>, p: &SparseDistribution) -> Result<SparseDistribution> {
    walk_step(&mut Degrees::new(oracle), p)
}

/// Prefix sets of the support ordered by p(u)/deg(u), descending, ties by
/// ascending vertex id. Keys are compared at 40-bit precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub order: Vec<usize>,
    /// volumes[i] and cuts[i] describe the first i + 1 vertices.
    pub volumes: Vec<u64>,
    pub cuts: Vec<u64>,
}

impl Sweep {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn report(&self, i: usize) -> CutReport {
        let mut vertices = self.order[..=i].to_vec();
        vertices.sort_unstable();
        CutReport {
            vertices,
            volume: self.volumes[i],
            cut_size: self.cuts[i],
            conductance: Ratio::new(self.cuts[i], self.volumes[i].max(1)),
        }
    }

    /// Index of the minimum-conductance prefix with 0 < vol <= `k_cap`;
    /// the shortest wins ties.
    pub fn best(&self, k_cap: u64) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.len() {
            let vol = self.volumes[i];
            if vol == 0 || vol > k_cap {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => (self.cuts[i] as u128) * (self.volumes[b] as u128)
                    < (self.cuts[b] as u128) * (vol as u128),
            };
            if better {
                best = Some(i);
            }
        }
        best
    }
}

/// Rounds to 40 mantissa bits so that values equal in exact arithmetic but
/// apart by rounding noise compare equal and fall back to the id order.
fn sweep_key(m: f64, deg: usize) -> f64 {
    if deg == 0 {
        return f64::INFINITY;
    }
    let bits = (m / deg as f64).to_bits();
    f64::from_bits((bits + (1 << 11)) & !((1 << 12) - 1))
}

fn sweep(degrees: &mut Degrees<'_, '_>, p: &SparseDistribution) -> Result<Sweep> {
    let mut keyed = Vec::with_capacity(p.len());
    for (u, m) in p.iter() {
        let deg = degrees.of(u)?;
        let key = sweep_key(m, deg);
        keyed.push((key, u));
    }
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = keyed.into_iter().map(|(_, u)| u).collect();

    let mut member = HashMap::with_capacity(order.len());
    let mut volumes = Vec::with_capacity(order.len());
    let mut cuts = Vec::with_capacity(order.len());
    let (mut vol, mut cut) = (0u64, 0i64);
    for &u in &order {
        let deg = degrees.of(u)?;
        for i in 0..deg {
            let w = degrees.oracle.neighbor(u, i)?;
            if w == u {
                continue;
            }
            cut += if member.contains_key(&w) { -1 } else { 1 };
        }
        member.insert(u, ());
        vol += deg as u64;
        volumes.push(vol);
        cuts.push(cut as u64);
    }
    Ok(Sweep {
        order,
        volumes,
        cuts,
    })
}

/// Sweep cuts of `p`, maintained incrementally with one neighbor query per
/// port of the support.
pub fn sweep_cuts(oracle: &mut OracleHandle<'_>, p: &SparseDistribution) -> Result<Sweep> {
    if p.is_empty() {
        return Err(Error::EmptySet);
    }
    sweep(&mut Degrees::new(oracle), p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSsParams {
    pub rounds: usize,
    pub delta: f64,
    pub rule: TruncationRule,
}

impl LocalSsParams {
    /// T = c_t zeta log k / psi and delta = c_delta k^(-1-zeta) / T.
    pub fn for_target(k: u64, psi: f64, zeta: f64, c_t: f64, c_delta: f64) -> Result<Self> {
        if !(psi > 0.0 && zeta > 0.0 && c_t > 0.0 && c_delta > 0.0) || k == 0 {
            return Err(Error::param("psi, zeta, c_t, c_delta and k must be positive"));
        }
        let k = k as f64;
        let rounds = ((c_t * zeta * k.ln() / psi).ceil() as usize).max(1);
        let delta = c_delta * k.powf(-1.0 - zeta) / rounds as f64;
        Ok(Self {
            rounds,
            delta,
            rule: TruncationRule::PerVertex,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::param(format!("truncation delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalSsOutcome {
    /// Best prefix with volume at most the cap, if any.
    pub best: Option<CutReport>,
    pub best_round: Option<usize>,
    /// Rounds whose truncated vector was swept, including round 0.
    pub rounds_swept: usize,
}

/// Runs LocalSS from `v`: p_0 = 1_v, p_t = trunc(p_(t-1) W), sweeping every
/// p_t for t = 0..=T. Returns the lowest-conductance prefix of volume at
/// most `k_cap`; earlier rounds and shorter prefixes win ties. Stops early
/// if truncation empties the vector.
pub fn local_ss(
    oracle: &mut OracleHandle<'_>,
    v: usize,
    params: &LocalSsParams,
    k_cap: u64,
) -> Result<LocalSsOutcome> {
    params.validate()?;
    let mut degrees = Degrees::new(oracle);
    let seed_degree = degrees.of(v)?;
    let mut p = SparseDistribution::point(v);
    let mut best: Option<(CutReport, usize)> = None;
    let mut rounds_swept = 0;
    for t in 0..=params.rounds {
        if t > 0 {
            let q = walk_step(&mut degrees, &p)?;
            let mut lookup = |u: usize| degrees.of(u);
            p = truncate(&q, params.delta, params.rule, seed_degree, &mut lookup)?;
            if p.is_empty() {
                break;
            }
        }
        let s = sweep(&mut degrees, &p)?;
        rounds_swept += 1;
        if let Some(i) = s.best(k_cap) {
            let cand = s.report(i);
            let better = match &best {
                None => true,
                Some((b, _)) => cand.conductance < b.conductance,
            };
            if better {
                best = Some((cand, t));
            }
        }
    }
    let (best, best_round) = match best {
        Some((c, t)) => (Some(c), Some(t)),
        None => (None, None),
    };
    Ok(LocalSsOutcome {
        best,
        best_round,
        rounds_swept,
    })
}

/// Constants in s = c_s / eps, T = c_t ln k / phi^2 and
/// delta = c_delta k^(-1 + xi/2) / T.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSidedConstants {
    pub c_s: f64,
    pub c_t: f64,
    pub c_delta: f64,
    #[serde(default)]
    pub rule: TruncationRule,
}

impl OneSidedConstants {
    pub fn calibrated() -> Self {
        Self {
            c_s: 1.0,
            c_t: 0.5,
            c_delta: 10.0,
            rule: TruncationRule::PerVertex,
        }
    }
}

impl Default for OneSidedConstants {
    fn default() -> Self {
        Self::calibrated()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSidedParams {
    pub s: usize,
    pub local: LocalSsParams,
}

pub fn one_sided_params(k: u64, phi: f64, eps: f64, xi: f64, c: &OneSidedConstants) -> Result<OneSidedParams> {
    for (name, x) in [("eps", eps), ("phi", phi)] {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::param(format!("{name} must lie in (0, 1], got {x}")));
        }
    }
    if !(xi > 0.0 && xi < 0.5) {
        return Err(Error::param(format!("xi must lie in (0, 1/2), got {xi}")));
    }
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if !(c.c_s > 0.0 && c.c_t > 0.0 && c.c_delta > 0.0) {
        return Err(Error::param("one-sided constants must be positive"));
    }
    let kf = k as f64;
    let rounds = ((c.c_t * kf.ln() / (phi * phi)).ceil() as usize).max(1);
    let delta = c.c_delta * kf.powf(-1.0 + xi / 2.0) / rounds as f64;
    Ok(OneSidedParams {
        s: ((c.c_s / eps).ceil() as usize).max(1),
        local: LocalSsParams {
            rounds,
            delta,
            rule: c.rule,
        },
    })
}

/// Samples `s` degree-proportional seeds and runs LocalSS from each. Rejects
/// only when a set X with vol(X) <= k and phi(X) < phi is found; X is
/// recomputed exactly on the graph before it is returned.
pub fn sse_test_one_sided(
    oracle: &mut OracleHandle<'_>,
    k: u64,
    phi: f64,
    eps: f64,
    xi: f64,
    c: &OneSidedConstants,
    seed: u64,
) -> Result<Verdict<usize>> {
    let p = one_sided_params(k, phi, eps, xi, c)?;
    let before = oracle.counts();
    let mut stats = RunStats::default();
    let mut trigger = None;
    for j in 0..p.s {
        let mut rng = substream(seed, &[tag::SAMPLE, j as u64]);
        let v = oracle.sample_vertex_by_degree(&mut rng)?;
        stats.samples += 1;
        let out = local_ss(oracle, v, &p.local, k)?;
        stats.steps += out.rounds_swept.saturating_sub(1) as u64;
        let Some(x) = out.best else { continue };
        if x.conductance_f64() >= phi {
            continue;
        }
        let cert = conductance(oracle.graph(), &x.vertices)?;
        if cert != x || cert.volume > k || (cert.cut_size as f64) >= phi * cert.volume as f64 {
            return Err(Error::Invariant(format!(
                "certificate failed exact re-verification: reported {x:?}, recomputed {cert:?}"
            )));
        }
        trigger = Some(Trigger::Certificate(cert));
        break;
    }
    let after = oracle.counts();
    stats.queries = QueryCounts {
        degree: after.degree - before.degree,
        neighbor: after.neighbor - before.neighbor,
        neighbor_index: after.neighbor_index - before.neighbor_index,
        edge_samples: after.edge_samples - before.edge_samples,
    };
    Ok(Verdict {
        decision: if trigger.is_some() {
            Decision::Reject
        } else {
            Decision::Accept
        },
        trigger,
        stats,
    })
}
