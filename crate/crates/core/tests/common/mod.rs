#![allow(dead_code)]

use proptest::prelude::*;
use ssexp::Graph;

/// Raw edge lists: (n, edges) with `u == v` meaning a half-loop.
pub fn edge_lists(max_n: usize, max_edges: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(move |n| {
        let edge = (0..n, 0..n);
        (Just(n), prop::collection::vec(edge, 0..=max_edges))
    })
}

pub fn graphs(max_n: usize, max_edges: usize) -> impl Strategy<Value = Graph> {
    edge_lists(max_n, max_edges).prop_map(|(n, e)| Graph::from_edges(n, e).unwrap())
}

/// Graphs with every vertex of positive degree.
pub fn covered_graphs(max_n: usize, max_edges: usize) -> impl Strategy<Value = Graph> {
    edge_lists(max_n, max_edges).prop_map(|(n, mut e)| {
        let mut deg = vec![0; n];
        for &(u, v) in &e {
            deg[u] += 1;
            deg[v] += 1;
        }
        for (u, d) in deg.iter().enumerate() {
            if *d == 0 {
                e.push((u, (u + 1) % n));
            }
        }
        Graph::from_edges(n, e).unwrap()
    })
}

pub fn naive_degrees(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let mut deg = vec![0; n];
    for &(u, v) in edges {
        deg[u] += 1;
        if u != v {
            deg[v] += 1;
        }
    }
    deg
}

/// (cut, volume) straight from the edge list.
pub fn naive_cut(n: usize, edges: &[(usize, usize)], set: &[usize]) -> (u64, u64) {
    let mut member = vec![false; n];
    for &u in set {
        member[u] = true;
    }
    let deg = naive_degrees(n, edges);
    let vol = (0..n).filter(|&u| member[u]).map(|u| deg[u]).sum();
    let cut = edges.iter().filter(|&&(u, v)| member[u] != member[v]).count() as u64;
    (cut, vol)
}

/// Lazy walk matrix (I + D^-1 A)/2 from the edge list; isolated vertices
/// stay put.
pub fn naive_walk(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let deg = naive_degrees(n, edges);
    let mut w = vec![vec![0.0; n]; n];
    for (u, row) in w.iter_mut().enumerate() {
        row[u] = if deg[u] == 0 { 1.0 } else { 0.5 };
    }
    for &(u, v) in edges {
        w[u][v] += 0.5 / deg[u] as f64;
        if u != v {
            w[v][u] += 0.5 / deg[v] as f64;
        }
    }
    w
}

pub fn naive_power(w: &[Vec<f64>], v: usize, t: usize) -> Vec<f64> {
    let n = w.len();
    let mut p = vec![0.0; n];
    p[v] = 1.0;
    for _ in 0..t {
        let mut q = vec![0.0; n];
        for (a, pa) in p.iter().enumerate() {
            for b in 0..n {
                q[b] += pa * w[a][b];
            }
        }
        p = q;
    }
    p
}

/// Empirical distribution of equally likely outcomes.
pub fn outcome_distribution(outcomes: &[usize], n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    for &v in outcomes {
        p[v] += 1.0 / outcomes.len() as f64;
    }
    p
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Subsets of 0..n as bitmasks, skipping the empty set.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}
