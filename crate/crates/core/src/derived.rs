//! Ext groups and derived tensor products through the bar construction relative
//! to the semisimple base `S = kQ_0`.
//!
//! A bar word `[a_1|…|a_w]` has letters in the augmentation ideal `Ā`, composable
//! left to right, and degree `Σ(|a_j| - 1)`. Writing `η_i = Σ_{j<=i}(|a_j| - 1)`,
//! the twisted differential on `m[a_1|…|a_w]` (plus a trailing factor in the
//! tensor case) is
//!
//! * `(dm)[W]`
//! * `(-1)^{|m|} (m a_1)[a_2|…]`
//! * `-(-1)^{|m| + η_{i-1}} m[…|d a_i|…]`
//! * `(-1)^{|m| + η_i} m[…|a_i a_{i+1}|…]`
//! * `-(-1)^{|m| + η_{w-1}} m[a_1|…|a_{w-1}] a_w`, the last letter acting on the trailing factor.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{sign, DgAlgebra};
use crate::bimodule::DgBimodule;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::sparse::{self, Accumulator, SparseVec};
use crate::module::{DgModule, ModuleBasisElem};

/// Cap on the number of cells in a single cohomological degree.
pub const MAX_CELLS: usize = 400_000;

/// Words from `start` to `end` of exact weight `w`, keyed by `(start, end, w)`.
pub type WordMemo = HashMap<(usize, usize, usize), Arc<Vec<Vec<usize>>>>;

#[derive(Clone, Copy, Debug)]
pub(crate) struct BarSigns {
    pub left: i64,
    pub merge: i64,
    pub right: i64,
}

pub(crate) const SIGNS: BarSigns = BarSigns { left: 1, merge: 1, right: -1 };

/// The letters of bar words: the positive-length basis classes of `A`.
pub(crate) struct Letters<F: Field> {
    algebra: Arc<DgAlgebra<F>>,
    /// algebra basis index of each letter
    pub index: Vec<usize>,
    /// letter of each algebra basis index
    of_basis: HashMap<usize, usize>,
    /// `1 - |a|`, always at least 1
    pub weight: Vec<usize>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub degree: Vec<i64>,
    /// `d(a)` in letter coordinates
    pub d: Vec<SparseVec<F::Elem>>,
    /// `a b` in letter coordinates, for composable pairs
    products: HashMap<(usize, usize), SparseVec<F::Elem>>,
    by_source: Vec<Vec<usize>>,
}

impl<F: Field> Letters<F> {
    pub fn new(algebra: Arc<DgAlgebra<F>>) -> Self {
        let index = algebra.augmentation_basis();
        let of_basis: HashMap<usize, usize> = index.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let to_letters = |v: &[(usize, F::Elem)]| -> SparseVec<F::Elem> {
            let mut out: SparseVec<F::Elem> = v.iter().map(|(i, c)| (of_basis[i], c.clone())).collect();
            out.sort_by_key(|(i, _)| *i);
            out
        };
        let b = algebra.basis();
        let weight = index.iter().map(|&i| (1 - b[i].degree) as usize).collect();
        let source: Vec<usize> = index.iter().map(|&i| b[i].source).collect();
        let target: Vec<usize> = index.iter().map(|&i| b[i].target).collect();
        let degree = index.iter().map(|&i| b[i].degree).collect();
        let d = index.iter().map(|&i| to_letters(algebra.d_basis(i))).collect();
        let mut products = HashMap::new();
        for (x, &i) in index.iter().enumerate() {
            for (y, &j) in index.iter().enumerate() {
                if target[x] == source[y] {
                    let p = algebra.mul_basis(i, j);
                    if !p.is_empty() {
                        products.insert((x, y), to_letters(p));
                    }
                }
            }
        }
        let mut by_source = vec![Vec::new(); algebra.vertices().len()];
        for (x, &s) in source.iter().enumerate() {
            by_source[s].push(x);
        }
        Letters { algebra, index, of_basis, weight, source, target, degree, d, products, by_source }
    }

    pub fn product(&self, x: usize, y: usize) -> &[(usize, F::Elem)] {
        self.products.get(&(x, y)).map_or(&[], Vec::as_slice)
    }

    #[allow(dead_code)]
    pub fn letter_of(&self, basis_index: usize) -> Option<usize> {
        self.of_basis.get(&basis_index).copied()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.algebra.basis()[self.index[x]].label
    }

    /// Words from `start` to `end` of total weight exactly `w` (all words when `exact` is false: weight at most `w`).
    pub fn words(&self, start: usize, end: usize, w: usize, memo: &mut WordMemo) -> Arc<Vec<Vec<usize>>> {
        if let Some(r) = memo.get(&(start, end, w)) {
            return r.clone();
        }
        let mut out = Vec::new();
        if w == 0 {
            if start == end {
                out.push(Vec::new());
            }
        } else {
            for &x in &self.by_source[start] {
                if self.weight[x] <= w {
                    let rest = self.words(self.target[x], end, w - self.weight[x], memo);
                    for r in rest.iter() {
                        let mut word = Vec::with_capacity(r.len() + 1);
                        word.push(x);
                        word.extend_from_slice(r);
                        out.push(word);
                    }
                }
            }
        }
        let r = Arc::new(out);
        memo.insert((start, end, w), r.clone());
        r
    }

    /// `η_i` for `i = 0..=w`.
    fn etas(&self, word: &[usize]) -> Vec<i64> {
        let mut out = Vec::with_capacity(word.len() + 1);
        let mut acc = 0;
        out.push(0);
        for &x in word {
            acc += self.degree[x] - 1;
            out.push(acc);
        }
        out
    }
}

type Cell = (usize, Vec<usize>, usize);

/// Dimensions of `Ext^n(x, y)` over a window of cohomological degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtTable {
    pub window: (i64, i64),
    pub dims: BTreeMap<i64, usize>,
    /// Dimensions of the bar cochain spaces `C^n`.
    pub cochain_dims: BTreeMap<i64, usize>,
}

impl ExtTable {
    pub fn dim(&self, n: i64) -> Option<usize> {
        self.dims.get(&n).copied()
    }

    pub fn nonzero_degrees(&self) -> Vec<i64> {
        self.dims.iter().filter(|(_, &d)| d > 0).map(|(&n, _)| n).collect()
    }
}

fn check_same_algebra<F: Field>(a: &Arc<DgAlgebra<F>>, b: &Arc<DgAlgebra<F>>) -> Result<()> {
    if Arc::ptr_eq(a, b) {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch)
    }
}

/// The bar Hom complex `Hom_S(x ⊗_S B(Ā), y)`.
struct HomComplex<'a, F: Field> {
    x: &'a DgModule<F>,
    y: &'a DgModule<F>,
    letters: Letters<F>,
    signs: BarSigns,
    /// `d_y` transposed: target -> [(source, c)]
    dy_rev: Vec<Vec<(usize, F::Elem)>>,
}

impl<'a, F: Field> HomComplex<'a, F> {
    fn new(x: &'a DgModule<F>, y: &'a DgModule<F>, signs: BarSigns) -> Self {
        let mut dy_rev = vec![Vec::new(); y.dim()];
        for (t, img) in y.differential().iter().enumerate() {
            for (u, c) in img {
                dy_rev[*u].push((t, c.clone()));
            }
        }
        HomComplex { x, y, letters: Letters::new(x.algebra().clone()), signs, dy_rev }
    }

    /// Cells `(m, W, t)` of `C^n`: `|t| = |m| + Σ(|a_j| - 1) + n`.
    fn cells(&self, n: i64) -> Result<Vec<Cell>> {
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        for (m, mb) in self.x.basis().iter().enumerate() {
            for (t, tb) in self.y.basis().iter().enumerate() {
                let budget = n + mb.degree - tb.degree;
                if budget < 0 {
                    continue;
                }
                for w in self.letters.words(mb.vertex, tb.vertex, budget as usize, &mut memo).iter() {
                    out.push((m, w.clone(), t));
                }
                if out.len() > MAX_CELLS {
                    return Err(Error::TooLarge(format!("more than {MAX_CELLS} bar cochains in degree {n}")));
                }
            }
        }
        Ok(out)
    }

    /// Rows of `D^n: C^n -> C^{n+1}`, one per cell of `C^{n+1}`, over the columns `C^n`.
    fn differential_rows(&self, n: i64, cols: &[Cell], rows: &[Cell]) -> Result<Vec<SparseVec<F::Elem>>> {
        let f = self.x.field();
        let index: HashMap<&Cell, usize> = cols.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let lt = &self.letters;
        let kappa = -sign(n);
        let col = |m: usize, w: &[usize], t: usize| -> Result<usize> {
            index
                .get(&(m, w.to_vec(), t))
                .copied()
                .ok_or_else(|| Error::Consistency("bar cochain outside the enumerated degree".into()))
        };
        rows.par_iter()
            .map(|(m, word, t)| {
                let (m, t) = (*m, *t);
                let mut acc = Accumulator::new();
                let sm = sign(self.x.basis()[m].degree);
                let eta = lt.etas(word);
                let wl = word.len();
                // d_y f
                for (u, c) in &self.dy_rev[t] {
                    acc.add(f, col(m, word, *u)?, c);
                }
                // f((dm)[W])
                let k = f.from_i64(kappa);
                for (mk, c) in &self.x.differential()[m] {
                    acc.add(f, col(*mk, word, t)?, &f.mul(&k, c));
                }
                if wl > 0 {
                    // f((m a_1)[W'])
                    let k = f.from_i64(kappa * self.signs.left * sm);
                    for (mk, c) in self.x.act_basis(m, lt.index[word[0]]) {
                        acc.add(f, col(*mk, &word[1..], t)?, &f.mul(&k, c));
                    }
                    // f(m[W']) a_w
                    let k = f.from_i64(kappa * self.signs.right * sm * sign(eta[wl - 1]));
                    let last = lt.index[word[wl - 1]];
                    for (u, _) in self.y.basis().iter().enumerate().filter(|(_, ub)| ub.vertex == lt.source[word[wl - 1]]) {
                        for (v, c) in self.y.act_basis(u, last) {
                            if *v == t {
                                acc.add(f, col(m, &word[..wl - 1], u)?, &f.mul(&k, c));
                            }
                        }
                    }
                }
                let mut w2 = word.clone();
                for i in 0..wl {
                    // f(m[…|d a_i|…])
                    let k = f.from_i64(-kappa * sm * sign(eta[i]));
                    for (b, c) in &lt.d[word[i]] {
                        w2[i] = *b;
                        acc.add(f, col(m, &w2, t)?, &f.mul(&k, c));
                    }
                    w2[i] = word[i];
                }
                for i in 0..wl.saturating_sub(1) {
                    // f(m[…|a_i a_{i+1}|…])
                    let k = f.from_i64(kappa * self.signs.merge * sm * sign(eta[i + 1]));
                    let mut merged = word[..i].to_vec();
                    merged.push(0);
                    merged.extend_from_slice(&word[i + 2..]);
                    for (b, c) in lt.product(word[i], word[i + 1]) {
                        merged[i] = *b;
                        acc.add(f, col(m, &merged, t)?, &f.mul(&k, c));
                    }
                }
                Ok(acc.finish(f))
            })
            .collect()
    }
}

fn check_square_zero<F: Field>(f: &F, upper: &[SparseVec<F::Elem>], lower: &[SparseVec<F::Elem>]) -> bool {
    upper.par_iter().all(|row| {
        let mut acc = Accumulator::new();
        for (k, c) in row {
            acc.add_scaled(f, c, &lower[*k]);
        }
        acc.finish(f).is_empty()
    })
}

/// `dim Ext^n(x, y)` for `n_min <= n <= n_max`.
pub fn ext_window<F: Field>(x: &DgModule<F>, y: &DgModule<F>, n_min: i64, n_max: i64) -> Result<ExtTable> {
    ext_window_with(x, y, n_min, n_max, SIGNS)
}

pub(crate) fn ext_window_with<F: Field>(x: &DgModule<F>, y: &DgModule<F>, n_min: i64, n_max: i64, signs: BarSigns) -> Result<ExtTable> {
    check_same_algebra(x.algebra(), y.algebra())?;
    if n_min > n_max {
        return Err(Error::InvalidWindow(n_min, n_max));
    }
    let f = x.field();
    let hc = HomComplex::new(x, y, signs);
    let degrees: Vec<i64> = (n_min - 1..=n_max + 1).collect();
    let cells: Vec<Vec<Cell>> = degrees.iter().map(|&n| hc.cells(n)).collect::<Result<_>>()?;
    // D^n for n in n_min-1 ..= n_max
    let diffs: Vec<Vec<SparseVec<F::Elem>>> =
        (0..degrees.len() - 1).map(|k| hc.differential_rows(degrees[k], &cells[k], &cells[k + 1])).collect::<Result<_>>()?;
    for k in 1..diffs.len() {
        if !check_square_zero(f, &diffs[k], &diffs[k - 1]) {
            return Err(Error::Consistency(format!("bar differential does not square to zero at degree {}", degrees[k])));
        }
    }
    let ranks: Vec<usize> = diffs.par_iter().map(|rows| sparse::rank(f, rows.iter().cloned())).collect();
    let mut dims = BTreeMap::new();
    let mut cochain_dims = BTreeMap::new();
    for k in 1..degrees.len() - 1 {
        let n = degrees[k];
        let c = cells[k].len();
        cochain_dims.insert(n, c);
        dims.insert(n, c - ranks[k] - ranks[k - 1]);
    }
    Ok(ExtTable { window: (n_min, n_max), dims, cochain_dims })
}

/// Cohomology of `x ⊗^L_A y` over a window of degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedTensor {
    pub window: (i64, i64),
    pub dims: BTreeMap<i64, usize>,
    pub chain_dims: BTreeMap<i64, usize>,
}

/// The complex `x ⊗_S B(Ā) ⊗_S y` with cells `(m, W, t)`.
struct TensorComplex<'a, F: Field> {
    x: &'a DgModule<F>,
    y: &'a DgBimodule<F>,
    letters: Letters<F>,
    signs: BarSigns,
}

impl<'a, F: Field> TensorComplex<'a, F> {
    /// Cells of total degree `D = |m| + Σ(|a_j| - 1) + |t|`; with `max_len`, only words of at most that length.
    fn cells(&self, degree: i64, max_len: Option<usize>) -> Result<Vec<Cell>> {
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        for (m, mb) in self.x.basis().iter().enumerate() {
            for (t, tb) in self.y.basis().iter().enumerate() {
                let budget = mb.degree + tb.degree - degree;
                if budget < 0 {
                    continue;
                }
                for w in self.letters.words(mb.vertex, tb.left, budget as usize, &mut memo).iter() {
                    if max_len.is_none_or(|l| w.len() <= l) {
                        out.push((m, w.clone(), t));
                    }
                }
                if out.len() > MAX_CELLS {
                    return Err(Error::TooLarge(format!("more than {MAX_CELLS} bar chains in degree {degree}")));
                }
            }
        }
        Ok(out)
    }

    /// The differential of one cell, as a combination of cells.
    fn d_cell(&self, cell: &Cell) -> Vec<(Cell, F::Elem)> {
        let f = self.x.field();
        let lt = &self.letters;
        let (m, word, t) = (cell.0, &cell.1, cell.2);
        let sm = sign(self.x.basis()[m].degree);
        let eta = lt.etas(word);
        let wl = word.len();
        let mut out: Vec<(Cell, F::Elem)> = Vec::new();
        for (mk, c) in &self.x.differential()[m] {
            out.push(((*mk, word.clone(), t), c.clone()));
        }
        if wl > 0 {
            let k = f.from_i64(self.signs.left * sm);
            for (mk, c) in self.x.act_basis(m, lt.index[word[0]]) {
                out.push(((*mk, word[1..].to_vec(), t), f.mul(&k, c)));
            }
            let k = f.from_i64(self.signs.right * sm * sign(eta[wl - 1]));
            for (u, c) in self.y.left_act_basis(lt.index[word[wl - 1]], t) {
                out.push(((m, word[..wl - 1].to_vec(), *u), f.mul(&k, c)));
            }
        }
        for i in 0..wl {
            let k = f.from_i64(-sm * sign(eta[i]));
            for (b, c) in &lt.d[word[i]] {
                let mut w2 = word.clone();
                w2[i] = *b;
                out.push(((m, w2, t), f.mul(&k, c)));
            }
        }
        for i in 0..wl.saturating_sub(1) {
            let k = f.from_i64(self.signs.merge * sm * sign(eta[i + 1]));
            for (b, c) in lt.product(word[i], word[i + 1]) {
                let mut merged = word[..i].to_vec();
                merged.push(*b);
                merged.extend_from_slice(&word[i + 2..]);
                out.push(((m, merged, t), f.mul(&k, c)));
            }
        }
        let k = f.from_i64(sm * sign(eta[wl]));
        for (u, c) in &self.y.differential()[t] {
            out.push(((m, word.clone(), *u), f.mul(&k, c)));
        }
        out
    }

    fn d_columns(&self, cols: &[Cell], rows: &[Cell]) -> Result<Vec<SparseVec<F::Elem>>> {
        let f = self.x.field();
        let index: HashMap<&Cell, usize> = rows.iter().enumerate().map(|(i, c)| (c, i)).collect();
        cols.par_iter()
            .map(|c| {
                let mut acc = Accumulator::new();
                for (cell, e) in self.d_cell(c) {
                    let i = index.get(&cell).ok_or_else(|| Error::Consistency("bar chain outside the enumerated degree".into()))?;
                    acc.add(f, *i, &e);
                }
                Ok(acc.finish(f))
            })
            .collect()
    }
}

/// `H^D(x ⊗^L_A y)` for `D` in the window.
pub fn tensor_window<F: Field>(x: &DgModule<F>, y: &DgBimodule<F>, m_min: i64, m_max: i64) -> Result<WindowedTensor> {
    tensor_window_with(x, y, m_min, m_max, SIGNS)
}

pub(crate) fn tensor_window_with<F: Field>(x: &DgModule<F>, y: &DgBimodule<F>, m_min: i64, m_max: i64, signs: BarSigns) -> Result<WindowedTensor> {
    check_same_algebra(x.algebra(), y.algebra())?;
    if m_min > m_max {
        return Err(Error::InvalidWindow(m_min, m_max));
    }
    let f = x.field();
    let tc = TensorComplex { x, y, letters: Letters::new(x.algebra().clone()), signs };
    let degrees: Vec<i64> = (m_min - 1..=m_max + 1).collect();
    let cells: Vec<Vec<Cell>> = degrees.iter().map(|&n| tc.cells(n, None)).collect::<Result<_>>()?;
    let diffs: Vec<Vec<SparseVec<F::Elem>>> =
        (0..degrees.len() - 1).map(|k| tc.d_columns(&cells[k], &cells[k + 1])).collect::<Result<_>>()?;
    for k in 1..diffs.len() {
        if !check_square_zero(f, &diffs[k - 1], &diffs[k]) {
            return Err(Error::Consistency(format!("tensor differential does not square to zero at degree {}", degrees[k])));
        }
    }
    let ranks: Vec<usize> = diffs.par_iter().map(|cols| sparse::rank(f, cols.iter().cloned())).collect();
    let mut dims = BTreeMap::new();
    let mut chain_dims = BTreeMap::new();
    for k in 1..degrees.len() - 1 {
        let c = cells[k].len();
        chain_dims.insert(degrees[k], c);
        dims.insert(degrees[k], c - ranks[k] - ranks[k - 1]);
    }
    Ok(WindowedTensor { window: (m_min, m_max), dims, chain_dims })
}

/// A finite dg module model of `τ^{≥low}(x ⊗^L_A y)`.
///
/// Words longer than `max_x + max_y - low + 1` only contribute in degrees below
/// `low`, so the subcomplex of shorter words has the same cohomology in degrees `>= low`.
pub fn tensor_module<F: Field>(x: &DgModule<F>, y: &DgBimodule<F>, low: i64) -> Result<DgModule<F>> {
    check_same_algebra(x.algebra(), y.algebra())?;
    let alg = x.algebra().clone();
    if x.is_zero() || y.dim() == 0 {
        return Ok(DgModule::zero(alg));
    }
    let f = x.field().clone();
    let tc = TensorComplex { x, y, letters: Letters::new(alg.clone()), signs: SIGNS };
    let top = x.max_degree().unwrap_or(0) + y.basis().iter().map(|b| b.degree).max().unwrap_or(0);
    let max_len = (top - low + 2).max(0) as usize;
    // the lowest degree reachable with words of at most max_len letters
    let max_weight = tc.letters.weight.iter().copied().max().unwrap_or(1);
    let bottom = x.min_degree().unwrap_or(0) + y.basis().iter().map(|b| b.degree).min().unwrap_or(0) - (max_len * max_weight) as i64;
    let mut cells: Vec<Cell> = Vec::new();
    for deg in bottom..=top {
        cells.extend(tc.cells(deg, Some(max_len))?);
        if cells.len() > MAX_CELLS {
            return Err(Error::TooLarge(format!("tensor model exceeds {MAX_CELLS} cells")));
        }
    }
    let index: HashMap<&Cell, usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let to_sparse = |terms: Vec<(Cell, F::Elem)>| -> Result<SparseVec<F::Elem>> {
        let mut acc = Accumulator::new();
        for (c, e) in terms {
            let i = index.get(&c).ok_or_else(|| Error::Consistency("tensor model is not closed under d".into()))?;
            acc.add(&f, *i, &e);
        }
        Ok(acc.finish(&f))
    };
    let differential = cells.iter().map(|c| to_sparse(tc.d_cell(c))).collect::<Result<Vec<_>>>()?;
    let arrow_action = (0..alg.arrows().len())
        .map(|a| {
            let b = alg.arrow_element(a);
            cells
                .iter()
                .map(|(m, w, t)| {
                    let mut terms = Vec::new();
                    for (bi, bc) in b {
                        for (u, c) in y.right_act_basis(*t, *bi) {
                            terms.push(((*m, w.clone(), *u), f.mul(bc, c)));
                        }
                    }
                    to_sparse(terms)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = cells
        .iter()
        .map(|(m, w, t)| {
            let word: Vec<&str> = w.iter().map(|&l| tc.letters.label(l)).collect();
            let yb = &y.basis()[*t];
            ModuleBasisElem {
                label: format!("{}[{}]{}", x.basis()[*m].label, word.join("|"), yb.label),
                vertex: yb.right,
                degree: x.basis()[*m].degree + yb.degree + w.iter().map(|&l| tc.letters.degree[l] - 1).sum::<i64>(),
            }
        })
        .collect();
    let full = DgModule::from_parts(alg, basis, arrow_action, differential);
    Ok(full.truncate_below(low))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::presentation::{normalize, parse_algebra};

    fn alg<F: Field>(src: &str, f: F) -> Arc<DgAlgebra<F>> {
        Arc::new(normalize(&parse_algebra(src).unwrap(), f).unwrap())
    }

    const RICH: &str = "vertices 1 2 3 4\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 4 deg -1\narrow p : 1 -> 3 deg -1\narrow q : 3 -> 4 deg 0\narrow c : 1 -> 4 deg -2\narrow u : 2 -> 3 deg -1\ndiff c = a*b - p*q\n";

    fn test_modules<F: Field>(a: &Arc<DgAlgebra<F>>) -> Vec<DgModule<F>> {
        let s = DgModule::simples_sum(a.clone());
        let t = DgModule::truncated_free(a.clone(), 0, 2);
        vec![s.clone(), DgModule::regular(a.clone(), 0), DgModule::free(a.clone(), 0, 1), t.clone(), s.direct_sum(&t.shift(2))]
    }

    #[test]
    fn only_one_sign_class_is_consistent() {
        let a = alg(RICH, PrimeField::new(101));
        let mods = test_modules(&a);
        let y = DgBimodule::regular(a.clone());
        let mut good = Vec::new();
        for left in [1, -1] {
            for merge in [1, -1] {
                for right in [1, -1] {
                    let signs = BarSigns { left, merge, right };
                    let ok = mods.iter().all(|x| {
                        mods.iter().all(|z| ext_window_with(x, z, -3, 5, signs).is_ok())
                            && tensor_window_with(x, &y, -8, 2, signs).is_ok_and(|w| {
                                (-8..=2).all(|n| w.dims[&n] == x.cohomology_dims().get(&n).copied().unwrap_or(0))
                            })
                    });
                    if ok {
                        good.push((left, merge, right));
                    }
                }
            }
        }
        assert_eq!(good, vec![(1, 1, -1), (-1, -1, 1)]);
    }

    #[test]
    fn free_module_reduction() {
        let a = alg(RICH, Rationals);
        for y in test_modules(&a) {
            for v in 0..4 {
                for k in [-1, 0, 2] {
                    let p = DgModule::free(a.clone(), v, k);
                    let e = ext_window(&p, &y, -4, 5).unwrap();
                    let h = y.cohomology_by_vertex();
                    for n in -4..=5 {
                        assert_eq!(e.dims[&n], h.get(&(n - k, v)).copied().unwrap_or(0), "vertex {v} shift {k} degree {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn one_arrow_ext_of_simples() {
        for d in 0..4 {
            let a = alg(&format!("vertices 1 2\narrow a : 1 -> 2 deg {}\n", -d), Rationals);
            let s = DgModule::simples_sum(a.clone());
            let e = ext_window(&s, &s, 0, 2 * (d + 1)).unwrap();
            for n in 0..=2 * (d + 1) {
                let expected = match n {
                    0 => 2,
                    n if n == d + 1 => 1,
                    _ => 0,
                };
                assert_eq!(e.dims[&n], expected, "d = {d}, n = {n}");
            }
        }
    }

    #[test]
    fn dual_numbers_have_ext_in_every_degree() {
        let a = alg("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n", Rationals);
        let s = DgModule::simples_sum(a.clone());
        let e = ext_window(&s, &s, 0, 12).unwrap();
        assert!(e.dims.values().all(|&d| d == 1));
    }

    #[test]
    fn shift_and_additivity() {
        let a = alg(RICH, PrimeField::new(101));
        let mods = test_modules(&a);
        let (x, y) = (&mods[0], &mods[3]);
        let e = ext_window(x, y, -2, 6).unwrap();
        let e2 = ext_window(x, &y.shift(2), -4, 4).unwrap();
        for n in -4..=4 {
            assert_eq!(e2.dims[&n], e.dims[&(n + 2)]);
        }
        let sum = ext_window(&x.direct_sum(&mods[2]), y, -2, 6).unwrap();
        let part = ext_window(&mods[2], y, -2, 6).unwrap();
        for n in -2..=6 {
            assert_eq!(sum.dims[&n], e.dims[&n] + part.dims[&n]);
        }
        assert!(matches!(ext_window(x, y, 3, 2), Err(Error::InvalidWindow(3, 2))));
        let other = alg(RICH, PrimeField::new(101));
        assert!(matches!(ext_window(x, &DgModule::simples_sum(other), 0, 1), Err(Error::AlgebraMismatch)));
    }

    #[test]
    fn tensor_with_regular_and_semisimple() {
        let a = alg(RICH, Rationals);
        let y = DgBimodule::regular(a.clone());
        for x in test_modules(&a) {
            let w = tensor_window(&x, &y, -8, 2).unwrap();
            for n in -8..=2 {
                assert_eq!(w.dims[&n], x.cohomology_dims().get(&n).copied().unwrap_or(0));
            }
            let low = x.bottom_cohomology().unwrap();
            let m = tensor_module(&x, &y, low).unwrap();
            m.validate().unwrap();
            assert_eq!(m.cohomology_dims(), x.cohomology_dims());
        }
        let s = Arc::new(DgAlgebra::semisimple(Rationals, vec!["1".into(), "2".into()]));
        let x = DgModule::direct_sum_of(s.clone(), &[DgModule::simple(s.clone(), 0), DgModule::simple(s.clone(), 0).shift(1), DgModule::simple(s.clone(), 1)]);
        let yb = DgBimodule::regular(s.clone());
        let w = tensor_window(&x, &yb.shift(-1).clone(), -3, 3).unwrap();
        assert_eq!(w.dims.iter().filter(|(_, &d)| d > 0).map(|(&n, &d)| (n, d)).collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
