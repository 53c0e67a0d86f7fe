//! Dense matrices over the polynomial ring and over Q.

use crate::poly::{Poly, PolyRing, Q};
use num::{One, Zero};
use std::sync::Arc;

/// Dense matrix of polynomials; all entries share one ring.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub ring: Arc<PolyRing>,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Poly>, // row-major
}

impl PolyMatrix {
    pub fn zero(ring: &Arc<PolyRing>, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![Poly::zero(ring); rows * cols],
        }
    }

    pub fn identity(ring: &Arc<PolyRing>, n: usize) -> Self {
        let mut m = PolyMatrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, Poly::one(ring));
        }
        m
    }

    pub fn from_rows(ring: &Arc<PolyRing>, rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        PolyMatrix { ring: ring.clone(), rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_cols(ring: &Arc<PolyRing>, rows: usize, cols: Vec<Vec<Poly>>) -> Self {
        let c = cols.len();
        let mut m = PolyMatrix::zero(ring, rows, c);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, p) in col.into_iter().enumerate() {
                m.set(i, j, p);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn col(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut m = PolyMatrix::zero(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let mut m = PolyMatrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero(&self.ring);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(other.get(k, j)));
                }
                m.set(i, j, acc);
            }
        }
        m
    }

    pub fn map<F: Fn(&Poly) -> Poly>(&self, f: F) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> PolyMatrix {
        self.map(|p| p.mul_q(c))
    }

    pub fn hstack(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = PolyMatrix::zero(&self.ring, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn eval(&self, point: &[Q]) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| p.eval(point)).collect(),
        }
    }

    /// Determinant by cofactor expansion; intended for small matrices.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => Poly::one(&self.ring),
            1 => self.get(0, 0).clone(),
            _ => {
                let mut acc = Poly::zero(&self.ring);
                for i in 0..n {
                    let a = self.get(i, 0);
                    if a.is_zero() {
                        continue;
                    }
                    let minor = self.submatrix(
                        &(0..n).filter(|&r| r != i).collect::<Vec<_>>(),
                        &(1..n).collect::<Vec<_>>(),
                    );
                    let term = a.mul(&minor.det());
                    acc = if i % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut m = PolyMatrix::zero(&self.ring, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c).clone());
            }
        }
        m
    }
}

/// All k-subsets of {0..n-1} in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return vec![];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact rational matrix; used for derived fibers and numeric Koszul data.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Q>, // row-major
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        QMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut m = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Q::zero();
                for k in 0..self.cols {
                    if self.get(i, k).is_zero() {
                        continue;
                    }
                    acc += self.get(i, k) * other.get(k, j);
                }
                m.set(i, j, acc);
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            // find pivot
            let pivot = (row..m.rows).find(|&r| !m.get(r, col).is_zero());
            let Some(p) = pivot else { continue };
            // swap
            if p != row {
                for j in 0..m.cols {
                    let a = m.get(row, j).clone();
                    let b = m.get(p, j).clone();
                    m.set(row, j, b);
                    m.set(p, j, a);
                }
            }
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col).clone();
                    for j in col..m.cols {
                        let v = m.get(r, j) - &factor * m.get(row, j);
                        m.set(r, j, v);
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> QMatrix {
        let mut m = QMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    /// Gauss-Jordan inverse; None when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !m.get(r, col).is_zero())?;
            if p != col {
                for j in 0..n {
                    let (a, b) = (m.get(col, j).clone(), m.get(p, j).clone());
                    m.set(col, j, b);
                    m.set(p, j, a);
                    let (a, b) = (inv.get(col, j).clone(), inv.get(p, j).clone());
                    inv.set(col, j, b);
                    inv.set(p, j, a);
                }
            }
            let scale = m.get(col, col).recip();
            for j in 0..n {
                let v = m.get(col, j) * &scale;
                m.set(col, j, v);
                let v = inv.get(col, j) * &scale;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                for j in 0..n {
                    let v = m.get(r, j) - &f * m.get(col, j);
                    m.set(r, j, v);
                    let v = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }

    /// Solves M x = 0; returns whether any nonzero solution exists.
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Determinant by elimination; exact.
    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Q::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.get(r, col).is_zero());
            let Some(p) = pivot else { return Q::zero() };
            if p != col {
                det = -det;
                for j in 0..n {
                    let a = m.get(col, j).clone();
                    let b = m.get(p, j).clone();
                    m.set(col, j, b);
                    m.set(p, j, a);
                }
            }
            det *= m.get(col, col);
            let inv = m.get(col, col).recip();
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col) * &inv;
                for j in col..n {
                    let v = m.get(r, j) - &factor * m.get(col, j);
                    m.set(r, j, v);
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q_int, MonomialOrder};

    #[test]
    fn rank_and_det() {
        let m = QMatrix::from_rows(vec![
            vec![q_int(1), q_int(2)],
            vec![q_int(2), q_int(4)],
        ]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.det(), q_int(0));
        let id = QMatrix::identity(3);
        assert_eq!(id.rank(), 3);
        assert_eq!(id.det(), q_int(1));
    }

    #[test]
    fn poly_det() {
        let ring = PolyRing::standard(2, MonomialOrder::GrevLex);
        let x = Poly::var(&ring, 0);
        let y = Poly::var(&ring, 1);
        // [[x, y], [0, x]] -> x^2
        let m = PolyMatrix::from_rows(&ring, vec![
            vec![x.clone(), y.clone()],
            vec![Poly::zero(&ring), x.clone()],
        ]);
        assert_eq!(m.det(), x.mul(&x));
    }

    #[test]
    fn combinations_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).len(), 0);
    }
}
