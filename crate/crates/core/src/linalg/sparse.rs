use std::collections::BTreeMap;

use crate::field::Field;

/// Sorted `(index, coefficient)` pairs with no stored zeros.
pub type SparseVec<E> = Vec<(usize, E)>;

/// Accumulates scaled sparse vectors; collapses to a [`SparseVec`].
#[derive(Clone, Debug)]
pub struct Accumulator<E> {
    entries: BTreeMap<usize, E>,
}

impl<E: Clone> Default for Accumulator<E> {
    fn default() -> Self {
        Accumulator { entries: BTreeMap::new() }
    }
}

impl<E: Clone + PartialEq> Accumulator<E> {
    pub fn new() -> Self {
        Accumulator { entries: BTreeMap::new() }
    }

    pub fn add<F: Field<Elem = E>>(&mut self, f: &F, index: usize, c: &E) {
        if f.is_zero(c) {
            return;
        }
        match self.entries.get_mut(&index) {
            Some(slot) => *slot = f.add(slot, c),
            None => {
                self.entries.insert(index, c.clone());
            }
        }
    }

    pub fn add_scaled<F: Field<Elem = E>>(&mut self, f: &F, scale: &E, v: &[(usize, E)]) {
        if f.is_zero(scale) {
            return;
        }
        for (i, c) in v {
            self.add(f, *i, &f.mul(scale, c));
        }
    }

    pub fn finish<F: Field<Elem = E>>(self, f: &F) -> SparseVec<E> {
        self.entries.into_iter().filter(|(_, c)| !f.is_zero(c)).collect()
    }
}

pub fn scale<F: Field>(f: &F, s: &F::Elem, v: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    if f.is_zero(s) {
        return Vec::new();
    }
    v.iter().map(|(i, c)| (*i, f.mul(s, c))).filter(|(_, c)| !f.is_zero(c)).collect()
}

pub fn add<F: Field>(f: &F, a: &[(usize, F::Elem)], b: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    let mut acc = Accumulator::new();
    acc.add_scaled(f, &f.one(), a);
    acc.add_scaled(f, &f.one(), b);
    acc.finish(f)
}

/// Applies a linear map given by the images of basis vectors.
pub fn apply<F: Field>(f: &F, images: &[SparseVec<F::Elem>], v: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    let mut acc = Accumulator::new();
    for (i, c) in v {
        acc.add_scaled(f, c, &images[*i]);
    }
    acc.finish(f)
}

pub fn to_dense<F: Field>(f: &F, v: &[(usize, F::Elem)], len: usize) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); len];
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

pub fn from_dense<F: Field>(f: &F, v: &[F::Elem]) -> SparseVec<F::Elem> {
    v.iter().enumerate().filter(|(_, c)| !f.is_zero(c)).map(|(i, c)| (i, c.clone())).collect()
}

/// `a + s·b` for sorted sparse vectors.
pub fn axpy<F: Field>(f: &F, a: &[(usize, F::Elem)], s: &F::Elem, b: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let c = f.mul(s, &b[j].1);
            if !f.is_zero(&c) {
                out.push((b[j].0, c));
            }
            j += 1;
        } else {
            let c = f.add(&a[i].1, &f.mul(s, &b[j].1));
            if !f.is_zero(&c) {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental row echelon form over sparse rows, for ranks of large sparse matrices.
#[derive(Clone, Debug)]
pub struct Echelon<E> {
    /// leading column -> row with leading coefficient 1
    pivots: std::collections::HashMap<usize, SparseVec<E>>,
}

impl<E: Clone + PartialEq> Default for Echelon<E> {
    fn default() -> Self {
        Echelon { pivots: std::collections::HashMap::new() }
    }
}

impl<E: Clone + PartialEq> Echelon<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the stored rows; the result has no stored leading column.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, mut v: SparseVec<E>) -> SparseVec<E> {
        let mut start = 0;
        while start < v.len() {
            let (col, c) = v[start].clone();
            match self.pivots.get(&col) {
                Some(row) => v = axpy(f, &v, &f.neg(&c), row),
                None => start += 1,
            }
        }
        v
    }

    /// Adds a row; returns whether it was independent of the previous rows.
    pub fn insert<F: Field<Elem = E>>(&mut self, f: &F, v: SparseVec<E>) -> bool {
        let v = self.reduce(f, v);
        match v.first() {
            None => false,
            Some((col, lead)) => {
                let inv = f.inv(lead).expect("nonzero leading coefficient");
                let col = *col;
                self.pivots.insert(col, scale(f, &inv, &v));
                true
            }
        }
    }
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank<F: Field>(f: &F, rows: impl IntoIterator<Item = SparseVec<F::Elem>>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(f, r);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn echelon_rank() {
        let f = PrimeField::new(5);
        let rows = vec![vec![(0, 1), (2, 1)], vec![(1, 1), (2, 1)], vec![(0, 1), (1, 1), (2, 2)], vec![(3, 4)]];
        assert_eq!(rank(&f, rows), 3);
        assert_eq!(axpy(&f, &[(0, 1), (1, 2)], &3, &[(1, 1), (4, 1)]), vec![(0, 1), (4, 3)]);
    }
}
