//! Desk-scale acceptance suite. Prints one line per criterion and exits
//! non-zero if any criterion fails. Tolerances and trial counts are pinned
//! below.

mod common;

use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;

use common::{naive_cut, naive_degrees, subsets};
use ssexp::calibrate::{default_gallery, GalleryEntry, Instance, TesterSpec};
use ssexp::exact::{
    cheeger_check, eta_lambda_gap, exact_distribution, expansion_profile, spectral_profile_bound, trace_identity_gap,
    verify_decomposition, verify_p_matrix, walk_matrix,
};
use ssexp::generate::{barbell, clique_chain, generate, GraphKind};
use ssexp::local::{local_ss, sse_test_one_sided, LocalSsParams, OneSidedConstants, TruncationRule};
use ssexp::product::{lift_set, make_inner, materialize_product, product_index, InnerFamily};
use ssexp::rng::{derive_seed, trial_seed};
use ssexp::tester::{general_params, sse_test_general, Decision, Trigger, TwoSidedConstants};
use ssexp::walk::{pairs, run_walks, LazyWalk, PaddedGraph, WalkConfig};
use ssexp::{conductance, Graph, OracleHandle};

/// Master seed for all trials here; calibration used the gallery seed 1.
const SEED: u64 = 2;
const TRIALS: usize = 100;
/// At least 2/3 of 100 trials.
const MIN_SUCCESSES: usize = 67;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_graph(seed: u64, max_n: usize, max_vol: u64) -> Graph {
    let mut s = seed;
    loop {
        let n = 2 + (s % (max_n as u64 - 1)) as usize;
        let loops = (s / 7 % 4) as usize;
        let edges = 1 + (s / 29 % (max_vol / 2)) as usize;
        let g = generate(&GraphKind::RandomMultigraph { n, edges, half_loops: loops }, s).unwrap();
        if g.volume() <= max_vol && g.volume() > 0 {
            return g;
        }
        s = derive_seed(s, &[1]);
    }
}

fn has_parallel_edge(g: &Graph) -> bool {
    let mut e: Vec<(usize, usize)> = g.edges().iter().filter(|(u, v)| u != v).map(|&(u, v)| (u.min(v), u.max(v))).collect();
    e.sort_unstable();
    e.windows(2).any(|w| w[0] == w[1])
}

fn lift_identity() -> Outcome {
    let mut graphs: Vec<Graph> = (0..120).map(|i| random_graph(derive_seed(SEED, &[1, i]), 10, 16)).collect();
    graphs.push(barbell(3).unwrap());
    graphs.push(generate(&GraphKind::Star { n: 8 }, 0).unwrap());
    graphs.push(generate(&GraphKind::Complete { n: 4 }, 0).unwrap());
    graphs.push(Graph::from_edges(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap());
    let checked: Result<usize, String> = graphs
        .par_iter()
        .map(|g| {
            let mut count = 0;
            for d in [4, 8] {
                let fam = InnerFamily::for_graph(g, d, 1e-3).unwrap();
                let big = materialize_product(g, &fam).unwrap();
                for s in subsets(g.n()).filter(|s| s.len() < g.n()) {
                    let (cut, vol) = naive_cut(g.n(), g.edges(), &s);
                    if vol == 0 {
                        continue;
                    }
                    let lifted: Vec<usize> = lift_set(g, &s).unwrap().into_iter().map(|x| product_index(g, x)).collect();
                    let r = conductance(&big, &lifted).unwrap();
                    if lifted.len() as u64 != vol || r.conductance != Ratio::new(cut, 2 * vol) {
                        return Err(format!("S = {s:?}: {} vs {cut}/(2*{vol})", r.conductance));
                    }
                    count += 1;
                }
            }
            Ok(count)
        })
        .sum();
    match checked {
        Ok(n) => outcome(true, format!("{} graphs, {n} (graph, d, S) triples exact", graphs.len())),
        Err(e) => outcome(false, e),
    }
}

fn p_matrix() -> Outcome {
    let graphs: Vec<Graph> = (0..50)
        .map(|i| {
            let g = random_graph(derive_seed(SEED, &[2, i]), 8, 40);
            // Cover isolated vertices with a path edge.
            let mut e = g.edges().to_vec();
            let deg = naive_degrees(g.n(), &e);
            for u in 0..g.n() {
                if deg[u] == 0 {
                    e.push((u, (u + 1) % g.n()));
                }
            }
            Graph::from_edges(g.n(), e).unwrap()
        })
        .collect();
    let loops = graphs.iter().filter(|g| (0..g.n()).any(|u| g.half_loops(u) > 0)).count();
    let parallel = graphs.iter().filter(|g| has_parallel_edge(g)).count();
    let mut worst: f64 = 0.0;
    for g in &graphs {
        match verify_p_matrix(g) {
            Ok(c) => worst = worst.max(c.max_spectral_gap),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(
        loops > 0 && parallel > 0 && worst <= 1e-9,
        format!("50 graphs ({loops} with half-loops, {parallel} with parallel edges), max spectral gap {worst:.1e}"),
    )
}

fn decomposition() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [4, 8] {
        for s in 1..=64 {
            let h = make_inner(s, d).unwrap();
            let delta = h.eta2().map_or(1.0 - 1e-6, |e| (1.0 - e).min(1.0 - 1e-6));
            let w = walk_matrix(&h.to_graph()).unwrap();
            match verify_decomposition(&w, delta) {
                Ok(c) if c.passed => worst = worst.max(c.eta1_b),
                Ok(c) => return outcome(false, format!("s={s} d={d}: eta_1(B) = {}", c.eta1_b)),
                Err(e) => return outcome(false, format!("s={s} d={d}: {e}")),
            }
        }
    }
    outcome(worst <= 1.0 + 1e-9, format!("128 inner graphs, max eta_1(B) = {worst:.12}"))
}

fn walks_and_collisions() -> Outcome {
    const WALKS: usize = 100_000;
    const REPS: u64 = 10_000;
    let graphs = [
        barbell(3).unwrap(),
        clique_chain(3, 4).unwrap(),
        generate(&GraphKind::Star { n: 10 }, 0).unwrap(),
        random_graph(derive_seed(SEED, &[4]), 12, 40),
    ];
    let mut worst_tv: f64 = 0.0;
    for (gi, g) in graphs.iter().enumerate() {
        let w = walk_matrix(g).unwrap();
        let mut o = OracleHandle::adjacency_list(g);
        for v in [0, g.n() - 1] {
            for t in 1..=6 {
                let cfg = WalkConfig::new(t, WALKS, derive_seed(SEED, &[4, gi as u64, v as u64, t as u64])).unwrap();
                let stat = run_walks(&LazyWalk, &mut o, v, &cfg).unwrap();
                let mut emp = vec![0.0; g.n()];
                for &e in &stat.endpoints {
                    emp[e] += 1.0 / WALKS as f64;
                }
                let (p, _) = exact_distribution(&w, v, t);
                let tv = 0.5 * p.iter().zip(&emp).map(|(a, b)| (a - b).abs()).sum::<f64>();
                worst_tv = worst_tv.max(tv);
            }
        }
    }
    // Padded walks against the explicitly padded graph.
    let g = &graphs[1];
    let bound = g.max_degree() + 2;
    let mut padded = g.edges().to_vec();
    for u in 0..g.n() {
        padded.extend(std::iter::repeat_n((u, u), bound - g.degree(u)));
    }
    let explicit = Graph::from_edges(g.n(), padded).unwrap();
    let w = walk_matrix(&explicit).unwrap();
    let kernel = PaddedGraph::new(bound).unwrap();
    let mut o = OracleHandle::adjacency_list(g);
    for t in 1..=6 {
        let cfg = WalkConfig::new(t, WALKS, derive_seed(SEED, &[5, t as u64])).unwrap();
        let stat = run_walks(&kernel, &mut o, 0, &cfg).unwrap();
        let mut emp = vec![0.0; g.n()];
        for &e in &stat.endpoints {
            emp[e] += 1.0 / WALKS as f64;
        }
        let (p, _) = exact_distribution(&w, 0, t);
        worst_tv = worst_tv.max(0.5 * p.iter().zip(&emp).map(|(a, b)| (a - b).abs()).sum::<f64>());
    }

    let mut worst_rel: f64 = 0.0;
    for (gi, g) in graphs.iter().enumerate() {
        let w = walk_matrix(g).unwrap();
        let t = 4;
        let (_, norm) = exact_distribution(&w, 0, t);
        for r in [2usize, 16] {
            let mut o = OracleHandle::adjacency_list(g);
            let total: u64 = (0..REPS)
                .map(|rep| {
                    let cfg = WalkConfig::new(t, r, derive_seed(SEED, &[6, gi as u64, r as u64, rep])).unwrap();
                    run_walks(&LazyWalk, &mut o, 0, &cfg).unwrap().collisions
                })
                .sum();
            let mean = total as f64 / REPS as f64;
            let expect = pairs(r) as f64 * norm;
            worst_rel = worst_rel.max((mean - expect).abs() / expect);
        }
    }
    outcome(
        worst_tv <= 0.02 && worst_rel <= 0.10,
        format!("max TV {worst_tv:.4} (limit 0.02), max relative error of E[Z] {worst_rel:.4} (limit 0.10)"),
    )
}

fn gallery_entries(filter: impl Fn(&GalleryEntry) -> bool) -> Vec<Instance> {
    default_gallery()
        .entries
        .iter()
        .filter(|e| filter(e))
        .map(|e| Instance::build(e).unwrap())
        .collect()
}

/// Number of trials on which the entry's tester returned its expected answer.
fn successes(inst: &Instance, two: &TwoSidedConstants, one: &OneSidedConstants) -> usize {
    (0..TRIALS as u64)
        .into_par_iter()
        .filter(|&t| {
            let out = inst.run_trial(two, one, trial_seed(SEED, t)).unwrap();
            out.decision() == inst.entry.expect
        })
        .count()
}

/// Certifies each accept entry: exhaustively for small graphs, spectrally
/// for the large ones.
fn certify(inst: &Instance) -> Result<f64, String> {
    let (g, k) = (&inst.graph, inst.entry.k);
    let certified = if g.n() <= 14 {
        let v = expansion_profile(g, k).map_err(|e| e.to_string())?.value().ok_or("no feasible set")?;
        *v.numer() as f64 / *v.denom() as f64
    } else {
        spectral_profile_bound(g, k).map_err(|e| e.to_string())?.bound
    };
    if certified >= inst.entry.phi {
        Ok(certified)
    } else {
        Err(format!("{}: certified phi {certified} < {}", inst.entry.name, inst.entry.phi))
    }
}

fn two_sided_completeness() -> Outcome {
    let insts = gallery_entries(|e| e.expect == Decision::Accept && matches!(e.tester, TesterSpec::General { .. }));
    let (two, one) = (TwoSidedConstants::calibrated(), OneSidedConstants::calibrated());
    let small = insts.iter().filter(|i| i.graph.n() <= 14).count();
    let large = insts.iter().filter(|i| i.graph.n() == 1000).count();
    let mut lines = Vec::new();
    let mut pass = small == 10 && large >= 1;
    for inst in &insts {
        let cert = match certify(inst) {
            Ok(c) => c,
            Err(e) => return outcome(false, e),
        };
        let ok = successes(inst, &two, &one);
        pass &= ok >= MIN_SUCCESSES;
        lines.push(format!("{} {ok}/{TRIALS} (phi {} <= {cert:.4})", inst.entry.name, inst.entry.phi));
    }
    outcome(pass, format!("accepts: {}", lines.join(", ")))
}

fn two_sided_soundness() -> Outcome {
    let insts = gallery_entries(|e| e.expect == Decision::Reject && !matches!(e.tester, TesterSpec::OneSided { .. }));
    let (two, one) = (TwoSidedConstants::calibrated(), OneSidedConstants::calibrated());
    let mut pass = insts.len() >= 2;
    let mut lines = Vec::new();
    for inst in &insts {
        let ok = successes(inst, &two, &one);
        pass &= ok >= MIN_SUCCESSES && inst.entry.eps == 0.3;
        lines.push(format!("{} (k={}) {ok}/{TRIALS}", inst.entry.name, inst.entry.k));
    }
    outcome(pass, format!("rejects: {}", lines.join(", ")))
}

fn check_certificate(g: &Graph, k: u64, phi: f64, x: &ssexp::CutReport) -> bool {
    let fresh = conductance(g, &x.vertices).unwrap();
    &fresh == x && fresh.volume <= k && (fresh.cut_size as f64) <= phi * fresh.volume as f64
}

fn one_sided() -> Outcome {
    let c = OneSidedConstants::calibrated();
    // (a) Small certified expanders, tested at their exact phi(k).
    let experts = gallery_entries(|e| e.expect == Decision::Accept && matches!(e.tester, TesterSpec::General { .. }));
    let mut runs = 0;
    let mut false_rejects = 0;
    let mut index_queries = 0;
    for inst in experts.iter().filter(|i| i.graph.n() <= 14) {
        let v = expansion_profile(&inst.graph, inst.entry.k).unwrap().value().unwrap();
        let phi = *v.numer() as f64 / *v.denom() as f64;
        let mut o = OracleHandle::adjacency_list(&inst.graph);
        for t in 0..TRIALS as u64 {
            let verdict = sse_test_one_sided(&mut o, inst.entry.k, phi, inst.entry.eps, 0.25, &c, trial_seed(SEED, t)).unwrap();
            runs += 1;
            false_rejects += usize::from(verdict.decision == Decision::Reject);
        }
        index_queries += o.counts().neighbor_index;
    }
    // (b) and (c) Far clique chains; every certificate is re-verified.
    let far = gallery_entries(|e| matches!(e.tester, TesterSpec::OneSided { .. }));
    let mut lines = Vec::new();
    let mut pass_b = !far.is_empty();
    let mut certificates = 0;
    let mut bad_certificates = 0;
    for inst in &far {
        let TesterSpec::OneSided { xi } = inst.entry.tester else { unreachable!() };
        let mut o = OracleHandle::adjacency_list(&inst.graph);
        let mut rejects = 0;
        for t in 0..TRIALS as u64 {
            let e = &inst.entry;
            let verdict = sse_test_one_sided(&mut o, e.k, e.phi, e.eps, xi, &c, trial_seed(SEED, t)).unwrap();
            if let Some(Trigger::Certificate(x)) = &verdict.trigger {
                certificates += 1;
                bad_certificates += usize::from(!check_certificate(&inst.graph, e.k, e.phi, x));
            }
            rejects += usize::from(verdict.decision == Decision::Reject);
        }
        index_queries += o.counts().neighbor_index;
        pass_b &= rejects >= MIN_SUCCESSES;
        lines.push(format!("{} {rejects}/{TRIALS}", inst.entry.name));
    }
    outcome(
        runs == 1000 && false_rejects == 0 && pass_b && bad_certificates == 0 && index_queries == 0,
        format!(
            "(a) {false_rejects} rejects in {runs} runs on certified expanders; (b) rejects: {}; (c) {certificates} certificates, {bad_certificates} failed re-verification",
            lines.join(", ")
        ),
    )
}

type Q = Ratio<i128>;

/// Minimum conductance over all sweep prefixes (volume at most k) of the
/// truncated distributions p_0 .. p_T, computed in exact rational
/// arithmetic by dense matrix-vector products. `delta` is 1/delta_inv.
fn exhaustive_sweep_minimum(g: &Graph, v: usize, rounds: usize, delta_inv: i128, k: u64) -> Option<Ratio<u64>> {
    let n = g.n();
    let deg: Vec<i128> = naive_degrees(n, g.edges()).into_iter().map(i128::from).collect();
    let mut w = vec![vec![Q::from_integer(0); n]; n];
    for u in 0..n {
        w[u][u] = Q::new(1, 2);
    }
    for &(a, b) in g.edges() {
        w[a][b] += Q::new(1, 2 * deg[a]);
        if a != b {
            w[b][a] += Q::new(1, 2 * deg[b]);
        }
    }
    let zero = Q::from_integer(0);
    let mut p = vec![zero; n];
    p[v] = Q::from_integer(1);
    let mut best: Option<Ratio<u64>> = None;
    for t in 0..=rounds {
        if t > 0 {
            let mut q = vec![zero; n];
            for a in 0..n {
                if p[a] == zero {
                    continue;
                }
                for b in 0..n {
                    q[b] += p[a] * w[a][b];
                }
            }
            for (u, x) in q.iter_mut().enumerate() {
                if *x < Q::new(deg[u], delta_inv) {
                    *x = zero;
                }
            }
            p = q;
            if p.iter().all(|x| *x == zero) {
                break;
            }
        }
        let mut order: Vec<usize> = (0..n).filter(|&u| p[u] > zero).collect();
        order.sort_by(|&a, &b| (p[b] / deg[b]).cmp(&(p[a] / deg[a])).then(a.cmp(&b)));
        for i in 0..order.len() {
            let (cut, vol) = naive_cut(n, g.edges(), &order[..=i]);
            if vol > 0 && vol <= k {
                let r = Ratio::new(cut, vol);
                best = Some(best.map_or(r, |b| b.min(r)));
            }
        }
    }
    best
}

fn local_agreement() -> Outcome {
    let graphs = [
        ("barbell-6", barbell(3).unwrap()),
        ("triangle-chain-3", clique_chain(3, 3).unwrap()),
        ("triangle-chain-4", clique_chain(3, 4).unwrap()),
    ];
    let mut cases = 0;
    for (name, g) in &graphs {
        for k in [7, g.volume() / 2] {
            let global = expansion_profile(g, k).unwrap().value().unwrap();
            for v in 0..g.n() {
                for rounds in [0, 1, 2, 3, 5, 8, 15, 25] {
                    for delta_inv in [10_000, 1_000, 100, 30] {
                        let delta = 1.0 / delta_inv as f64;
                        let params = LocalSsParams { rounds, delta, rule: TruncationRule::PerVertex };
                        let mut o = OracleHandle::adjacency_list(g);
                        let got = local_ss(&mut o, v, &params, k).unwrap().best.map(|b| b.conductance);
                        let want = exhaustive_sweep_minimum(g, v, rounds, delta_inv, k);
                        if got != want || got.is_some_and(|x| x < global) {
                            return outcome(
                                false,
                                format!("{name} v={v} T={rounds} delta={delta} k={k}: {got:?} vs {want:?}, phi(k) = {global}"),
                            );
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    outcome(true, format!("{cases} (graph, k, v, T, delta) cases agree and respect phi(k)"))
}

fn spectral_sanity() -> Outcome {
    let mut graphs: Vec<(String, Graph)> = gallery_entries(|_| true)
        .into_iter()
        .filter(|i| i.graph.volume() <= 32)
        .map(|i| (i.entry.name.clone(), i.graph))
        .collect();
    graphs.push(("barbell-6".into(), barbell(3).unwrap()));
    graphs.push(("triangle-chain-3".into(), clique_chain(3, 3).unwrap()));
    let gallery_count = graphs.len() - 2;
    let mut worst_eta: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut trace_graphs = 0;
    for (name, g) in &graphs {
        let c = cheeger_check(g).unwrap();
        if !c.holds {
            return outcome(false, format!("{name}: Cheeger fails, {c:?}"));
        }
        worst_eta = worst_eta.max(eta_lambda_gap(g).unwrap());
        let fam = InnerFamily::for_graph(g, 4, 1e-3).unwrap();
        let product = materialize_product(g, &fam).unwrap();
        for h in [g, &product] {
            if !h.is_regular() || h.n() > 256 {
                continue;
            }
            trace_graphs += 1;
            for t in 0..=6 {
                worst_trace = worst_trace.max(trace_identity_gap(h, t).unwrap());
            }
        }
    }
    outcome(
        worst_eta < 1e-9 && worst_trace <= 1e-10 && gallery_count > 0,
        format!(
            "{} graphs ({gallery_count} from the gallery), max |eta - (1 - lambda/2)| {worst_eta:.1e}, trace identity on {trace_graphs} regular graphs max gap {worst_trace:.1e}",
            graphs.len()
        ),
    )
}

fn query_accounting() -> Outcome {
    let c = TwoSidedConstants::calibrated();
    let mut lines = Vec::new();
    let mut pass = true;
    for kind in [GraphKind::RandomRegular { n: 1000, d: 3 }, GraphKind::CliqueChain { clique: 10, count: 100 }] {
        let g = generate(&kind, 0).unwrap();
        let (k, phi) = if g.n() == 1000 && g.is_regular() { (750, 0.042) } else { (368, 0.1) };
        let fam = InnerFamily::for_graph(&g, 8, 0.05).unwrap();
        let p = general_params(g.volume(), k, 0.3, phi, &c).unwrap();
        let budget = (p.s * p.r * p.length) as u64;
        let (mut worst, mut aborted): (f64, usize) = (0.0, 0);
        for t in 0..5 {
            let mut o = OracleHandle::rotation_map(&g);
            let v = sse_test_general(&mut o, &fam, k, 0.3, phi, &c, trial_seed(SEED, t)).unwrap();
            let q = o.counts();
            let full = v.stats.walks == (p.s * p.r) as u64;
            let last_sample = matches!(&v.trigger, Some(Trigger::Collision { sample, .. }) if *sample + 1 == p.s);
            pass &= g.n() == 1000
                && q.neighbor_index <= budget
                && q == v.stats.queries
                && q.neighbor == 0
                && full == (v.decision == Decision::Accept || last_sample)
                && (full || q.neighbor_index < budget);
            worst = worst.max(q.neighbor_index as f64 / budget as f64);
            aborted += usize::from(!full);
        }
        lines.push(format!("{kind}: max neighbor&index / (s r l) = {worst:.3}, {aborted}/5 early aborts"));
    }
    // One-sided runs on the same chain never use the rotation map.
    let g = generate(&GraphKind::CliqueChain { clique: 10, count: 100 }, 0).unwrap();
    let mut o = OracleHandle::adjacency_list(&g);
    for t in 0..5 {
        sse_test_one_sided(&mut o, 368, 0.1, 0.3, 0.25, &OneSidedConstants::calibrated(), trial_seed(SEED, t)).unwrap();
    }
    pass &= o.counts().neighbor_index == 0;
    lines.push(format!("one-sided neighbor&index queries {}", o.counts().neighbor_index));
    outcome(pass, lines.join("; "))
}

/// Informational: the analysis threshold constant with the calibrated walk
/// parameters on the clique chain.
fn analysis_sigma_note() -> String {
    let inst = &gallery_entries(|e| e.name == "clique-chain-10x100")[0];
    let two = TwoSidedConstants {
        c_sigma: TwoSidedConstants::ANALYSIS_SIGMA,
        ..TwoSidedConstants::calibrated()
    };
    let rejects = successes(inst, &two, &OneSidedConstants::calibrated());
    format!(
        "info: with c_sigma = {} the clique chain is rejected in {rejects}/{TRIALS} trials",
        TwoSidedConstants::ANALYSIS_SIGMA
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    type Criterion = (usize, &'static str, Option<Duration>, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "lift identity", Some(Duration::from_secs(60)), lift_identity),
        (2, "P-matrix claims", Some(Duration::from_secs(60)), p_matrix),
        (3, "decomposition of inner graphs", None, decomposition),
        (4, "walk and collision statistics", None, walks_and_collisions),
        (5, "two-sided completeness", Some(Duration::from_secs(600)), two_sided_completeness),
        (6, "two-sided soundness", Some(Duration::from_secs(600)), two_sided_soundness),
        (7, "one-sided guarantees", None, one_sided),
        (8, "LocalSS against exhaustive sweeps", None, local_agreement),
        (9, "spectral sanity", None, spectral_sanity),
        (10, "query accounting", None, query_accounting),
    ];
    let mut failed = 0;
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let mut o = run();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > limit {
                o.pass = false;
                o.detail.push_str(&format!("; over the {}s limit", limit.as_secs()));
            }
        }
        failed += usize::from(!o.pass);
        println!(
            "criterion {id:>2} {}: {title} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
    }
    println!("{}", analysis_sigma_note());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
