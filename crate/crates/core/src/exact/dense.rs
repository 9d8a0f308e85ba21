use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_DENSE_CAP: usize = 2048;

/// Square row-major matrix of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    order: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        let mut m = Self::zeros(order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::param("matrix rows must all have the matrix order"));
            }
            m.row_mut(i).copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.order, rhs.order);
        let n = self.order;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order);
        let mut out = vec![0.0; self.order];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += xi * m;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.order)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, t: usize) -> DenseMatrix {
        let mut out = DenseMatrix::identity(self.order);
        for _ in 0..t {
            out = out.matmul(self);
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self[(i, i)]).sum()
    }

    pub fn max_asymmetry(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.order {
            for j in i + 1..self.order {
                let gap = (self[(i, j)] - self[(j, i)]).abs();
                if gap > worst.2 {
                    worst = (i, j, gap);
                }
            }
        }
        worst
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.row(i).iter().sum()).collect()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.order + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.order + j]
    }
}

fn check_cap(g: &Graph, cap: usize) -> Result<()> {
    if g.n() > cap {
        return Err(Error::CapExceeded {
            what: "vertex count for a dense matrix",
            limit: cap,
        });
    }
    Ok(())
}

/// Adjacency counts: A[u][v] = number of ports of u leading to v. A
/// half-loop adds 1 to A[u][u].
pub fn adjacency_counts(g: &Graph) -> Vec<Vec<u64>> {
    let n = g.n();
    let mut a = vec![vec![0u64; n]; n];
    for (u, row) in a.iter_mut().enumerate() {
        for p in g.ports(u) {
            row[p.vertex] += 1;
        }
    }
    a
}

/// Lazy walk matrix W = (I + D^-1 A) / 2. An isolated vertex holds with
/// probability 1.
pub fn walk_matrix(g: &Graph) -> Result<DenseMatrix> {
    walk_matrix_capped(g, DEFAULT_DENSE_CAP)
}

pub fn walk_matrix_capped(g: &Graph, cap: usize) -> Result<DenseMatrix> {
    check_cap(g, cap)?;
    let n = g.n();
    let mut w = DenseMatrix::zeros(n);
    for u in 0..n {
        let deg = g.degree(u);
        if deg == 0 {
            w[(u, u)] = 1.0;
            continue;
        }
        w[(u, u)] += 0.5;
        let share = 0.5 / deg as f64;
        for p in g.ports(u) {
            w[(u, p.vertex)] += share;
        }
    }
    Ok(w)
}

/// (I + D^-1/2 A D^-1/2) / 2, similar to W and symmetric.
pub fn symmetrized_walk_matrix(g: &Graph) -> Result<DenseMatrix> {
    check_cap(g, DEFAULT_DENSE_CAP)?;
    let n = g.n();
    let mut s = DenseMatrix::zeros(n);
    for u in 0..n {
        let du = g.degree(u);
        if du == 0 {
            s[(u, u)] = 1.0;
            continue;
        }
        s[(u, u)] += 0.5;
        for p in g.ports(u) {
            let dv = g.degree(p.vertex);
            s[(u, p.vertex)] += 0.5 / ((du * dv) as f64).sqrt();
        }
    }
    Ok(s)
}

/// I - D^-1/2 A D^-1/2. Isolated vertices contribute a zero row.
pub fn normalized_laplacian(g: &Graph) -> Result<DenseMatrix> {
    check_cap(g, DEFAULT_DENSE_CAP)?;
    let n = g.n();
    let mut l = DenseMatrix::zeros(n);
    for u in 0..n {
        let du = g.degree(u);
        if du == 0 {
            continue;
        }
        l[(u, u)] += 1.0;
        for p in g.ports(u) {
            let dv = g.degree(p.vertex);
            l[(u, p.vertex)] -= 1.0 / ((du * dv) as f64).sqrt();
        }
    }
    Ok(l)
}

/// p = 1_v W^t and its collision probability ||p||^2.
pub fn exact_distribution(w: &DenseMatrix, v: usize, t: usize) -> (Vec<f64>, f64) {
    let mut p = vec![0.0; w.order()];
    p[v] = 1.0;
    for _ in 0..t {
        p = w.left_mul(&p);
    }
    let norm2 = p.iter().map(|x| x * x).sum();
    (p, norm2)
}
