use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use super::dense::{adjacency_counts, normalized_laplacian, symmetrized_walk_matrix, walk_matrix, DenseMatrix};
use super::eigen::symmetric_eigenvalues;
use super::profile::graph_conductance;
use crate::error::{Error, Result};
use crate::graph::Graph;

type Q = Ratio<i64>;

pub const DECOMPOSITION_TOLERANCE: f64 = 1e-9;
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;
/// Eigenvalues below this magnitude count as zero when pairing spectra.
pub const ZERO_EIGENVALUE: f64 = 1e-8;
pub const P_MATRIX_VOLUME_CAP: u64 = 64;

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCheck {
    pub eta2: Option<f64>,
    pub eta1_b: f64,
    pub passed: bool,
}

/// Splits W = delta J + (1 - delta) B and checks eta_1(B) <= 1.
///
/// `w` must be the walk matrix of a regular graph (hence symmetric) whose
/// second eigenvalue is at most `1 - delta`.
pub fn verify_decomposition(w: &DenseMatrix, delta: f64) -> Result<DecompositionCheck> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::param(format!("delta must lie in [0, 1), got {delta}")));
    }
    let spectrum = symmetric_eigenvalues(w)?;
    let eta2 = spectrum.eta2();
    if let Some(e) = eta2 {
        if e > 1.0 - delta + DECOMPOSITION_TOLERANCE {
            return Err(Error::param(format!(
                "eta_2 = {e} exceeds 1 - delta = {}",
                1.0 - delta
            )));
        }
    }
    let n = w.order();
    let j = 1.0 / n as f64;
    let mut b = DenseMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            b[(r, c)] = (w[(r, c)] - delta * j) / (1.0 - delta);
        }
    }
    let eta1_b = symmetric_eigenvalues(&b)?.eigenvalues[0];
    Ok(DecompositionCheck {
        eta2,
        eta1_b,
        passed: eta1_b <= 1.0 + DECOMPOSITION_TOLERANCE,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PMatrixCheck {
    pub order: usize,
    /// Nonzero eigenvalues of P, descending.
    pub nonzero_spectrum: Vec<f64>,
    pub max_spectral_gap: f64,
}

fn q_matmul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let mut out = vec![vec![Q::zero(); n]; n];
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, y) in out[i].iter_mut().zip(&b[k]) {
                if !y.is_zero() {
                    *o += x * y;
                }
            }
        }
    }
    out
}

fn nonzero_descending(mut xs: Vec<f64>) -> Vec<f64> {
    xs.retain(|x| x.abs() > ZERO_EIGENVALUE);
    xs.sort_by(|a, b| b.total_cmp(a));
    xs
}

/// Builds P = J_H (I + R_G) J_H / 2 over the ports of `g`, where R_G is the
/// rotation map as a permutation matrix and J_H averages within each
/// vertex's block of ports. Checks, in exact arithmetic, that
/// P[(u,i),(v,j)] = W_G(u,v) / deg(v) and that rows sum to 1; then checks
/// that the nonzero spectra of P and (I + A D^-1)/2 agree.
pub fn verify_p_matrix(g: &Graph) -> Result<PMatrixCheck> {
    if g.volume() > P_MATRIX_VOLUME_CAP {
        return Err(Error::CapExceeded {
            what: "volume for the P-matrix check",
            limit: P_MATRIX_VOLUME_CAP as usize,
        });
    }
    if let Some(u) = (0..g.n()).find(|&u| g.degree(u) == 0) {
        return Err(Error::param(format!("vertex {u} is isolated")));
    }
    let order = g.volume() as usize;
    let owner: Vec<usize> = (0..order).map(|id| g.port_of_id(id).vertex).collect();

    let mut jh = vec![vec![Q::zero(); order]; order];
    for a in 0..order {
        for b in 0..order {
            if owner[a] == owner[b] {
                jh[a][b] = Q::new(1, g.degree(owner[a]) as i64);
            }
        }
    }
    let mut i_plus_r = vec![vec![Q::zero(); order]; order];
    for (a, row) in i_plus_r.iter_mut().enumerate() {
        let p = g.port_of_id(a);
        let target = g.rotate(p.vertex, p.index);
        row[a] += Q::from_integer(1);
        row[g.port_id(target.vertex, target.index)] += Q::from_integer(1);
    }
    let half = Q::new(1, 2);
    let mut p = q_matmul(&q_matmul(&jh, &i_plus_r), &jh);
    for row in p.iter_mut() {
        for x in row.iter_mut() {
            *x *= half;
        }
    }

    let adj = adjacency_counts(g);
    for a in 0..order {
        let u = owner[a];
        let du = g.degree(u) as i64;
        let mut sum = Q::zero();
        for b in 0..order {
            let v = owner[b];
            let dv = g.degree(v) as i64;
            let w_uv = Q::new(if u == v { 1 } else { 0 }, 2) + Q::new(adj[u][v] as i64, 2 * du);
            let expected = w_uv / Q::from_integer(dv);
            if p[a][b] != expected {
                let (pa, pb) = (g.port_of_id(a), g.port_of_id(b));
                return Err(Error::IdentityViolation(format!(
                    "P[({},{}),({},{})] = {} but W(u,v)/deg(v) = {}",
                    pa.vertex, pa.index, pb.vertex, pb.index, p[a][b], expected
                )));
            }
            sum += p[a][b];
        }
        if sum != Q::from_integer(1) {
            return Err(Error::IdentityViolation(format!("row {a} of P sums to {sum}")));
        }
    }

    let pf: Vec<Vec<f64>> = p
        .iter()
        .map(|row| row.iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect())
        .collect();
    let sp = nonzero_descending(symmetric_eigenvalues(&DenseMatrix::from_rows(&pf)?)?.eigenvalues);
    // (I + A D^-1)/2 is similar to the symmetrized walk matrix.
    let sm = nonzero_descending(symmetric_eigenvalues(&symmetrized_walk_matrix(g)?)?.eigenvalues);
    if sp.len() != sm.len() {
        return Err(Error::IdentityViolation(format!(
            "P has {} nonzero eigenvalues, M_G has {}",
            sp.len(),
            sm.len()
        )));
    }
    let mut max_gap: f64 = 0.0;
    for (i, (a, b)) in sp.iter().zip(&sm).enumerate() {
        let gap = (a - b).abs();
        if gap > SPECTRUM_TOLERANCE {
            return Err(Error::IdentityViolation(format!(
                "eigenvalue {i}: P has {a}, M_G has {b}"
            )));
        }
        max_gap = max_gap.max(gap);
    }
    Ok(PMatrixCheck {
        order,
        nonzero_spectrum: sp,
        max_spectral_gap: max_gap,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CheegerCheck {
    pub lambda2: f64,
    /// None when no set fits in half the volume.
    pub phi: Option<f64>,
    pub holds: bool,
}

/// lambda_2 / 2 <= phi(G) <= sqrt(2 lambda_2) with exact phi(G).
pub fn cheeger_check(g: &Graph) -> Result<CheegerCheck> {
    let report = symmetric_eigenvalues(&symmetrized_walk_matrix(g)?)?;
    let lambda2 = 2.0 * (1.0 - report.eta2().unwrap_or(0.0));
    let phi = graph_conductance(g)?.minimum.map(|r| r.conductance_f64());
    let holds = match phi {
        None => true,
        Some(p) => lambda2 / 2.0 <= p + 1e-9 && p <= (2.0 * lambda2.max(0.0)).sqrt() + 1e-9,
    };
    Ok(CheegerCheck { lambda2, phi, holds })
}

/// Largest |eta_i - (1 - lambda_i / 2)| pairing the walk spectrum
/// (descending) with the normalized Laplacian spectrum (ascending).
pub fn eta_lambda_gap(g: &Graph) -> Result<f64> {
    let eta = symmetric_eigenvalues(&symmetrized_walk_matrix(g)?)?.eigenvalues;
    let mut lambda = symmetric_eigenvalues(&normalized_laplacian(g)?)?.eigenvalues;
    lambda.reverse();
    Ok(eta
        .iter()
        .zip(&lambda)
        .map(|(e, l)| (e - (1.0 - l / 2.0)).abs())
        .fold(0.0, f64::max))
}

/// |Tr(W^2t) - sum_v ||1_v W^t||^2|. The two agree when W is symmetric,
/// which for a lazy walk means the graph is regular.
pub fn trace_identity_gap(g: &Graph, t: usize) -> Result<f64> {
    if !g.is_regular() {
        return Err(Error::param("the trace identity needs a regular graph"));
    }
    let w = walk_matrix(g)?;
    let wt = w.pow(t);
    let trace = wt.matmul(&wt).trace();
    let sum: f64 = wt.as_slice().iter().map(|x| x * x).sum();
    Ok((trace - sum).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{barbell, star};

    #[test]
    fn decomposition_examples() {
        let w = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let c = verify_decomposition(&w, 0.5).unwrap();
        assert!(c.passed);
        assert!((c.eta1_b - 1.0).abs() < 1e-12);
        let c = verify_decomposition(&w, 0.0).unwrap();
        assert!((c.eta1_b - 1.0).abs() < 1e-12);
        assert!(verify_decomposition(&w, 1.0).is_err());
    }

    #[test]
    fn decomposition_precondition() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let w = walk_matrix(&g).unwrap();
        assert!(verify_decomposition(&w, 0.1).is_err());
    }

    #[test]
    fn p_matrix_small_cases() {
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        let c = verify_p_matrix(&edge).unwrap();
        assert_eq!(c.order, 2);
        assert_eq!(c.nonzero_spectrum.len(), 1);
        assert!((c.nonzero_spectrum[0] - 1.0).abs() < 1e-12);

        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        verify_p_matrix(&tri).unwrap();
        verify_p_matrix(&barbell(3).unwrap()).unwrap();
        verify_p_matrix(&Graph::from_edges(2, [(0, 0), (0, 1), (0, 1), (1, 1)]).unwrap()).unwrap();
    }

    #[test]
    fn p_matrix_rejects_isolated_vertices() {
        assert!(verify_p_matrix(&Graph::from_edges(3, [(0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn cheeger_on_small_graphs() {
        for g in [barbell(3).unwrap(), star(5).unwrap()] {
            let c = cheeger_check(&g).unwrap();
            assert!(c.holds, "{c:?}");
            assert!(eta_lambda_gap(&g).unwrap() < 1e-10);
        }
    }

    #[test]
    fn trace_identity_on_cycle() {
        let g = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        for t in 0..=5 {
            assert!(trace_identity_gap(&g, t).unwrap() < 1e-10);
        }
        assert!(trace_identity_gap(&star(4).unwrap(), 1).is_err());
    }
}
