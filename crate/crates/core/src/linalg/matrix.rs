use crate::field::Field;

use super::sparse::SparseVec;

/// Dense row-major matrix. Columns are images of source basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn from_rows<F: Field<Elem = E>>(f: &F, cols: usize, rows: &[Vec<E>]) -> Self {
        let mut m = Self::zeros(f, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {r} has wrong length");
            for (c, x) in row.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        m
    }

    /// Builds a `rows x columns.len()` matrix from sparse columns.
    pub fn from_sparse_columns<F: Field<Elem = E>>(f: &F, rows: usize, columns: &[SparseVec<E>]) -> Self {
        let mut m = Self::zeros(f, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (r, x) in col {
                m.set(*r, c, x.clone());
            }
        }
        m
    }

    /// Builds a `rows.len() x cols` matrix from sparse rows.
    pub fn from_sparse_rows<F: Field<Elem = E>>(f: &F, cols: usize, rows: &[SparseVec<E>]) -> Self {
        let mut m = Self::zeros(f, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, x) in row {
                m.set(r, *c, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: E) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, rhs: &Matrix<E>) -> Matrix<E> {
        assert_eq!(self.cols, rhs.rows, "incompatible matrix product");
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = r * out.cols + c;
                    f.add_mul_assign(&mut out.data[idx], a, b);
                }
            }
        }
        out
    }

    pub fn apply<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = f.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        f.add_mul_assign(&mut acc, a, b);
                    }
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduces in place to reduced row echelon form; returns the pivot columns.
    pub fn rref<F: Field<Elem = E>>(&mut self, f: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(found) = (pivot_row..self.rows).find(|&r| !f.is_zero(self.get(r, col))) else {
                continue;
            };
            self.swap_rows(found, pivot_row);
            let inv = f.inv(self.get(pivot_row, col)).expect("nonzero pivot");
            for c in col..self.cols {
                let idx = pivot_row * self.cols + c;
                if !f.is_zero(&self.data[idx]) {
                    self.data[idx] = f.mul(&self.data[idx], &inv);
                }
            }
            let pivot: Vec<E> = self.row(pivot_row)[col..].to_vec();
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                let neg = f.neg(&factor);
                for (k, p) in pivot.iter().enumerate() {
                    if f.is_zero(p) {
                        continue;
                    }
                    let idx = r * self.cols + col + k;
                    f.add_mul_assign(&mut self.data[idx], &neg, p);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rank<F: Field<Elem = E>>(&self, f: &F) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // eliminate along the shorter side
        let mut m = if self.rows > self.cols { self.transpose() } else { self.clone() };
        m.rref(f).len()
    }

    /// Basis of `{ v : M v = 0 }`, one vector per free column.
    pub fn kernel<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &p) in pivots.iter().enumerate() {
                let x = m.get(r, free);
                if !f.is_zero(x) {
                    v[p] = f.neg(x);
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// A subspace of `F^n`, kept as an RREF basis so membership tests and
/// coordinates are read directly off pivot positions.
#[derive(Clone, Debug)]
pub struct Subspace<E> {
    ambient: usize,
    basis: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone> Subspace<E> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full<F: Field<Elem = E>>(f: &F, ambient: usize) -> Self {
        let m = Matrix::identity(f, ambient);
        Subspace { ambient, basis: (0..ambient).map(|r| m.row(r).to_vec()).collect(), pivots: (0..ambient).collect() }
    }

    pub fn span<F: Field<Elem = E>>(f: &F, ambient: usize, vectors: &[Vec<E>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let mut m = Matrix::from_rows(f, ambient, vectors);
        let pivots = m.rref(f);
        let basis = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<E>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// `v` minus its component along the subspace (w.r.t. the pivot complement).
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        let mut out = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = out[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            let neg = f.neg(&c);
            for (k, x) in b.iter().enumerate() {
                if !f.is_zero(x) {
                    f.add_mul_assign(&mut out[k], &neg, x);
                }
            }
        }
        out
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> bool {
        self.reduce(f, v).iter().all(|x| f.is_zero(x))
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Option<Vec<E>> {
        if !self.contains(f, v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn sum<F: Field<Elem = E>>(&self, f: &F, other: &Subspace<E>) -> Subspace<E> {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(f, self.ambient, &all)
    }

    /// Vectors from `candidates` (in order) that extend this subspace to the
    /// span of itself plus the candidates.
    pub fn extend_with<F: Field<Elem = E>>(&self, f: &F, candidates: &[Vec<E>]) -> Vec<Vec<E>> {
        let mut current = self.clone();
        let mut chosen = Vec::new();
        for v in candidates {
            if !current.contains(f, v) {
                chosen.push(v.clone());
                let mut all = current.basis.clone();
                all.push(v.clone());
                current = Subspace::span(f, self.ambient, &all);
            }
        }
        chosen
    }

    /// Standard basis indices not used as pivots: a complement.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut used = vec![false; self.ambient];
        for &p in &self.pivots {
            used[p] = true;
        }
        (0..self.ambient).filter(|&i| !used[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn rank_of_proportional_rows() {
        let q = Rationals;
        let m = Matrix::from_rows(&q, 2, &[vec![q.from_i64(1), q.from_i64(2)], vec![q.from_i64(2), q.from_i64(4)]]);
        assert_eq!(m.rank(&q), 1);
        let ker = m.kernel(&q);
        assert_eq!(ker.len(), 1);
        assert!(m.apply(&q, &ker[0]).iter().all(|x| q.is_zero(x)));
    }

    #[test]
    fn subspace_coordinates() {
        let f = PrimeField::new(5);
        let s = Subspace::span(&f, 3, &[vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(s.dim(), 2);
        let v = vec![1, 2, 1];
        let coords = s.coordinates(&f, &v).unwrap();
        let mut back = vec![0u32; 3];
        for (c, b) in coords.iter().zip(s.basis()) {
            for k in 0..3 {
                f.add_mul_assign(&mut back[k], c, &b[k]);
            }
        }
        assert_eq!(back, v);
        assert!(!s.contains(&f, &[1, 0, 0]));
        assert_eq!(s.free_columns().len(), 1);
    }
}
