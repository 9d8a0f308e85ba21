use serde::Serialize;

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// max_i ||M x_i - eta_i x_i||_inf over the computed pairs.
    pub residual: f64,
    pub sweeps: usize,
}

impl SpectralReport {
    /// Second largest eigenvalue, if the order is at least 2.
    pub fn eta2(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }
}

fn off_norm(a: &DenseMatrix) -> f64 {
    let n = a.order();
    let mut s = 0.0;
    for i in 0..n {
        for (j, x) in a.row(i).iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvectors are accumulated as the rows of `v` so that every rotation
/// touches contiguous memory except for the column write-back into `a`.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<SpectralReport> {
    let (row, col, gap) = m.max_asymmetry();
    if gap > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { row, col, gap });
    }
    let n = m.order();
    let mut a = m.clone();
    // Make it exactly symmetric so the row/column bookkeeping stays valid.
    for i in 0..n {
        for j in i + 1..n {
            let mean = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = mean;
            a[(j, i)] = mean;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let mut sweeps = 0;
    let mut rp = vec![0.0; n];
    let mut rq = vec![0.0; n];
    loop {
        let off = off_norm(&a);
        if off <= OFF_DIAGONAL_TOLERANCE {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                rp.copy_from_slice(a.row(p));
                rq.copy_from_slice(a.row(q));
                for r in 0..n {
                    let (x, y) = (rp[r], rq[r]);
                    rp[r] = c * x - s * y;
                    rq[r] = s * x + c * y;
                }
                rp[p] = app - t * apq;
                rq[q] = aqq + t * apq;
                rp[q] = 0.0;
                rq[p] = 0.0;
                a.row_mut(p).copy_from_slice(&rp);
                a.row_mut(q).copy_from_slice(&rq);
                for r in 0..n {
                    a[(r, p)] = rp[r];
                    a[(r, q)] = rq[r];
                }

                rp.copy_from_slice(v.row(p));
                rq.copy_from_slice(v.row(q));
                for r in 0..n {
                    let (x, y) = (rp[r], rq[r]);
                    rp[r] = c * x - s * y;
                    rq[r] = s * x + c * y;
                }
                v.row_mut(p).copy_from_slice(&rp);
                v.row_mut(q).copy_from_slice(&rq);
            }
        }
    }

    let mut residual: f64 = 0.0;
    for i in 0..n {
        let x = v.row(i);
        let mx = m.right_mul(x);
        let eta = a[(i, i)];
        for (mxr, xr) in mx.iter().zip(x) {
            residual = residual.max((mxr - eta * xr).abs());
        }
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    Ok(SpectralReport {
        eigenvalues,
        residual,
        sweeps,
    })
}
