//! Finite-dimensional right dg modules over a [`DgAlgebra`].

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::algebra::{sign, DgAlgebra};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::sparse::{self, Accumulator, SparseVec};
use crate::linalg::{Matrix, Subspace};
use crate::presentation::{ModuleDesignator, ModulePresentation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleBasisElem {
    pub label: String,
    pub vertex: usize,
    pub degree: i64,
}

/// A right dg module `M = ⊕ M e_v`, with `M e_i · a ⊆ M e_j` for an arrow `a: i -> j`.
#[derive(Clone, Debug)]
pub struct DgModule<F: Field> {
    algebra: Arc<DgAlgebra<F>>,
    basis: Vec<ModuleBasisElem>,
    /// `arrow_action[a][m] = m · a`
    arrow_action: Vec<Vec<SparseVec<F::Elem>>>,
    differential: Vec<SparseVec<F::Elem>>,
    /// `table[b][m] = m · b` for every algebra basis class `b`
    table: Vec<Vec<SparseVec<F::Elem>>>,
}

/// `(degree, vertex)` pieces of a module, listing basis indices.
pub type Blocks = BTreeMap<(i64, usize), Vec<usize>>;

impl<F: Field> DgModule<F> {
    /// Builds and validates a module from arrow actions and a differential.
    pub fn new(
        algebra: Arc<DgAlgebra<F>>,
        basis: Vec<ModuleBasisElem>,
        arrow_action: Vec<Vec<SparseVec<F::Elem>>>,
        differential: Vec<SparseVec<F::Elem>>,
    ) -> Result<Self> {
        if arrow_action.len() != algebra.arrows().len() || arrow_action.iter().any(|v| v.len() != basis.len()) {
            return Err(Error::InvalidModule("action table has the wrong shape".into()));
        }
        if differential.len() != basis.len() {
            return Err(Error::InvalidModule("differential has the wrong shape".into()));
        }
        for (m, b) in basis.iter().enumerate() {
            if b.vertex >= algebra.vertices().len() {
                return Err(Error::InvalidModule(format!("basis element {} has an unknown vertex", b.label)));
            }
            let _ = m;
        }
        let m = Self::from_parts(algebra, basis, arrow_action, differential);
        m.validate()?;
        Ok(m)
    }

    /// Builds a module without validation; used by internal constructions that are correct by design.
    pub(crate) fn from_parts(
        algebra: Arc<DgAlgebra<F>>,
        basis: Vec<ModuleBasisElem>,
        arrow_action: Vec<Vec<SparseVec<F::Elem>>>,
        differential: Vec<SparseVec<F::Elem>>,
    ) -> Self {
        let f = algebra.field().clone();
        let n = basis.len();
        let table = algebra
            .basis()
            .iter()
            .map(|b| {
                if b.is_idempotent() {
                    (0..n).map(|m| if basis[m].vertex == b.source { vec![(m, f.one())] } else { Vec::new() }).collect()
                } else {
                    (0..n)
                        .map(|m| {
                            let mut v: SparseVec<F::Elem> = vec![(m, f.one())];
                            for &a in &b.path {
                                v = sparse::apply(&f, &arrow_action[a], &v);
                                if v.is_empty() {
                                    break;
                                }
                            }
                            v
                        })
                        .collect()
                }
            })
            .collect();
        DgModule { algebra, basis, arrow_action, differential, table }
    }

    pub fn zero(algebra: Arc<DgAlgebra<F>>) -> Self {
        let arrows = algebra.arrows().len();
        Self::from_parts(algebra, Vec::new(), vec![Vec::new(); arrows], Vec::new())
    }

    /// The summand `e_v A[k]` of the regular module.
    pub fn free(algebra: Arc<DgAlgebra<F>>, vertex: usize, shift: i64) -> Self {
        let f = algebra.field().clone();
        let idx: Vec<usize> = (0..algebra.dim()).filter(|&b| algebra.basis()[b].source == vertex).collect();
        let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        let local = |v: &[(usize, F::Elem)]| -> SparseVec<F::Elem> { v.iter().map(|(b, c)| (pos[b], c.clone())).collect() };
        let basis = idx
            .iter()
            .map(|&b| {
                let pc = &algebra.basis()[b];
                ModuleBasisElem { label: pc.label.clone(), vertex: pc.target, degree: pc.degree }
            })
            .collect();
        let arrow_action = (0..algebra.arrows().len())
            .map(|a| idx.iter().map(|&b| local(&algebra.mul(&[(b, f.one())], algebra.arrow_element(a)))).collect())
            .collect();
        let differential = idx.iter().map(|&b| local(algebra.d_basis(b))).collect();
        Self::from_parts(algebra, basis, arrow_action, differential).shift(shift)
    }

    /// The regular module `A[k] = ⊕_v e_v A[k]`.
    pub fn regular(algebra: Arc<DgAlgebra<F>>, shift: i64) -> Self {
        let parts: Vec<Self> = (0..algebra.vertices().len()).map(|v| Self::free(algebra.clone(), v, shift)).collect();
        Self::direct_sum_of(algebra, &parts)
    }

    /// The simple module at a vertex: one basis vector in degree 0, killed by all arrows.
    pub fn simple(algebra: Arc<DgAlgebra<F>>, vertex: usize) -> Self {
        let label = format!("s_{}", algebra.vertices()[vertex]);
        let arrows = algebra.arrows().len();
        Self::from_parts(algebra, vec![ModuleBasisElem { label, vertex, degree: 0 }], vec![vec![Vec::new()]; arrows], vec![Vec::new()])
    }

    /// `s = ⊕_v S_v`.
    pub fn simples_sum(algebra: Arc<DgAlgebra<F>>) -> Self {
        let parts: Vec<Self> = (0..algebra.vertices().len()).map(|v| Self::simple(algebra.clone(), v)).collect();
        Self::direct_sum_of(algebra, &parts)
    }

    pub fn from_designator(algebra: Arc<DgAlgebra<F>>, d: &ModuleDesignator) -> Result<Self> {
        let vertex = |v: &str| algebra.vertex_index(v).ok_or_else(|| Error::InvalidModule(format!("unknown vertex `{v}`")));
        Ok(match d {
            ModuleDesignator::Simple(v) => Self::simple(algebra.clone(), vertex(v)?),
            ModuleDesignator::Free(v, k) => Self::free(algebra.clone(), vertex(v)?, *k),
            ModuleDesignator::SimplesSum => Self::simples_sum(algebra),
            ModuleDesignator::Regular(k) => Self::regular(algebra, *k),
        })
    }

    /// `e_v A / e_v Ā^m`, the free module modulo paths of length at least `m`.
    pub fn truncated_free(algebra: Arc<DgAlgebra<F>>, vertex: usize, m: usize) -> Self {
        let p = Self::free(algebra.clone(), vertex, 0);
        let f = algebra.field().clone();
        let filt = algebra.length_filtration(m);
        let idx: Vec<usize> = (0..algebra.dim()).filter(|&b| algebra.basis()[b].source == vertex).collect();
        let gens: Vec<SparseVec<F::Elem>> = filt
            .basis()
            .iter()
            .filter_map(|v| {
                // keep the e_v-component of each filtration vector, in local coordinates
                let local: SparseVec<F::Elem> =
                    idx.iter().enumerate().filter(|(_, &b)| !f.is_zero(&v[b])).map(|(k, &b)| (k, v[b].clone())).collect();
                (!local.is_empty()).then_some(local)
            })
            .collect();
        p.quotient(&gens)
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra<F>> {
        &self.algebra
    }

    pub fn field(&self) -> &F {
        self.algebra.field()
    }

    pub fn basis(&self) -> &[ModuleBasisElem] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn arrow_action(&self, arrow: usize) -> &[SparseVec<F::Elem>] {
        &self.arrow_action[arrow]
    }

    pub fn differential(&self) -> &[SparseVec<F::Elem>] {
        &self.differential
    }

    /// `m · b` for a module basis element and an algebra basis class.
    pub fn act_basis(&self, m: usize, b: usize) -> &[(usize, F::Elem)] {
        &self.table[b][m]
    }

    /// `v · x` for sparse `v ∈ M`, `x ∈ A`.
    pub fn act(&self, v: &[(usize, F::Elem)], x: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        let f = self.field();
        let mut acc = Accumulator::new();
        for (m, c) in v {
            for (b, e) in x {
                let img = &self.table[*b][*m];
                if !img.is_empty() {
                    acc.add_scaled(f, &f.mul(c, e), img);
                }
            }
        }
        acc.finish(f)
    }

    pub fn d(&self, v: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        sparse::apply(self.field(), &self.differential, v)
    }

    pub fn blocks(&self) -> Blocks {
        let mut out: Blocks = BTreeMap::new();
        for (i, b) in self.basis.iter().enumerate() {
            out.entry((b.degree, b.vertex)).or_default().push(i);
        }
        out
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.basis.iter().map(|b| b.degree).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.basis.iter().map(|b| b.degree).max()
    }

    /// Checks degrees, vertices, `d² = 0`, relations, and the module Leibniz rule on all (basis, arrow) pairs.
    pub fn validate(&self) -> Result<()> {
        let f = self.field();
        let alg = &self.algebra;
        for (m, b) in self.basis.iter().enumerate() {
            for (k, _) in &self.differential[m] {
                let t = &self.basis[*k];
                if t.degree != b.degree + 1 || t.vertex != b.vertex {
                    return Err(Error::InvalidModule(format!("d({}) is not homogeneous of degree {}", b.label, b.degree + 1)));
                }
            }
            if !self.d(&self.differential[m]).is_empty() {
                return Err(Error::InvalidModule(format!("d^2({}) != 0", b.label)));
            }
            for (a, arrow) in alg.arrows().iter().enumerate() {
                let img = &self.arrow_action[a][m];
                if b.vertex != arrow.source && !img.is_empty() {
                    return Err(Error::InvalidModule(format!("{} acts on {} from the wrong vertex", arrow.name, b.label)));
                }
                for (k, _) in img {
                    let t = &self.basis[*k];
                    if t.vertex != arrow.target || t.degree != b.degree + arrow.degree {
                        return Err(Error::InvalidModule(format!("{}·{} is not homogeneous", b.label, arrow.name)));
                    }
                }
                // d(m·a) = d(m)·a + (-1)^{|m|} m·d(a)
                let lhs = self.d(img);
                let one = [(m, f.one())];
                let t1 = self.act(&self.differential[m], alg.arrow_element(a));
                let t2 = self.act(&one, &alg.d(alg.arrow_element(a)));
                let rhs = sparse::add(f, &t1, &sparse::scale(f, &f.from_i64(sign(b.degree)), &t2));
                if lhs != rhs {
                    return Err(Error::InvalidModule(format!("Leibniz rule fails on ({}, {})", b.label, arrow.name)));
                }
            }
            for r in alg.relations() {
                let mut acc = Accumulator::new();
                for (path, c) in r {
                    let mut v: SparseVec<F::Elem> = vec![(m, f.one())];
                    for &a in path {
                        v = sparse::apply(f, &self.arrow_action[a], &v);
                    }
                    acc.add_scaled(f, c, &v);
                }
                if !acc.finish(f).is_empty() {
                    return Err(Error::InvalidModule(format!("a relation does not annihilate {}", b.label)));
                }
            }
        }
        Ok(())
    }

    /// Matrix of `d: M^{deg} e_v -> M^{deg+1} e_v` in block-local coordinates.
    fn block_differential(&self, blocks: &Blocks, degree: i64, vertex: usize) -> Matrix<F::Elem> {
        let f = self.field();
        let src = blocks.get(&(degree, vertex)).map_or(&[][..], Vec::as_slice);
        let tgt = blocks.get(&(degree + 1, vertex)).map_or(&[][..], Vec::as_slice);
        let pos: HashMap<usize, usize> = tgt.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let cols: Vec<SparseVec<F::Elem>> =
            src.iter().map(|&m| self.differential[m].iter().map(|(i, c)| (pos[i], c.clone())).collect()).collect();
        Matrix::from_sparse_columns(f, tgt.len(), &cols)
    }

    /// Cycles of `M^{deg} e_v` in block-local coordinates.
    pub fn cycles(&self, blocks: &Blocks, degree: i64, vertex: usize) -> Subspace<F::Elem> {
        let f = self.field();
        let n = blocks.get(&(degree, vertex)).map_or(0, Vec::len);
        let d = self.block_differential(blocks, degree, vertex);
        Subspace::span(f, n, &d.kernel(f))
    }

    /// Boundaries in `M^{deg} e_v` in block-local coordinates.
    pub fn boundaries(&self, blocks: &Blocks, degree: i64, vertex: usize) -> Subspace<F::Elem> {
        let f = self.field();
        let n = blocks.get(&(degree, vertex)).map_or(0, Vec::len);
        let d = self.block_differential(blocks, degree - 1, vertex);
        let cols: Vec<Vec<F::Elem>> = (0..d.cols()).map(|c| d.column(c)).collect();
        Subspace::span(f, n, &cols)
    }

    /// `dim H^n(M e_v)` for every `(n, v)` with nonzero cohomology.
    pub fn cohomology_by_vertex(&self) -> BTreeMap<(i64, usize), usize> {
        let f = self.field();
        let blocks = self.blocks();
        let mut ranks: HashMap<(i64, usize), usize> = HashMap::new();
        for &(deg, v) in blocks.keys() {
            ranks.insert((deg, v), self.block_differential(&blocks, deg, v).rank(f));
        }
        let mut out = BTreeMap::new();
        for (&(deg, v), idx) in &blocks {
            let h = idx.len() - ranks[&(deg, v)] - ranks.get(&(deg - 1, v)).copied().unwrap_or(0);
            if h > 0 {
                out.insert((deg, v), h);
            }
        }
        out
    }

    /// `dim H^n(M)` for every `n` with nonzero cohomology.
    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for ((deg, _), h) in self.cohomology_by_vertex() {
            *out.entry(deg).or_insert(0) += h;
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_by_vertex().is_empty()
    }

    /// Largest `n` with `H^n != 0`.
    pub fn top_cohomology(&self) -> Option<i64> {
        self.cohomology_dims().keys().next_back().copied()
    }

    /// Smallest `n` with `H^n != 0`.
    pub fn bottom_cohomology(&self) -> Option<i64> {
        self.cohomology_dims().keys().next().copied()
    }

    /// Reads a module file against an algebra.
    pub fn from_presentation(algebra: Arc<DgAlgebra<F>>, p: &ModulePresentation) -> Result<Self> {
        let f = algebra.field().clone();
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for b in &p.basis {
            let vertex = algebra
                .vertex_index(&b.vertex)
                .ok_or_else(|| Error::InvalidModule(format!("unknown vertex {} for {}", b.vertex, b.label)))?;
            index.insert(b.label.clone(), basis.len());
            basis.push(ModuleBasisElem { label: b.label.clone(), vertex, degree: b.degree });
        }
        let comb = |c: &crate::presentation::LinearCombination| -> Result<SparseVec<F::Elem>> {
            let mut acc = Accumulator::new();
            for t in &c.terms {
                if t.path.len() != 1 {
                    return Err(Error::InvalidModule(format!("expected a basis label, found {}", t.path.join("*"))));
                }
                let k = *index.get(&t.path[0]).ok_or_else(|| Error::InvalidModule(format!("unknown basis label {}", t.path[0])))?;
                let c = f
                    .from_ratio(t.coeff.numer(), t.coeff.denom())
                    .ok_or_else(|| Error::InvalidModule(format!("coefficient {} is undefined over {}", t.coeff.0, f.spec())))?;
                acc.add(&f, k, &c);
            }
            Ok(acc.finish(&f))
        };
        let mut arrow_action = vec![vec![Vec::new(); basis.len()]; algebra.arrows().len()];
        for a in &p.actions {
            let arrow = algebra.arrow_index(&a.arrow).ok_or_else(|| Error::InvalidModule(format!("unknown arrow {}", a.arrow)))?;
            let m = *index.get(&a.source).ok_or_else(|| Error::InvalidModule(format!("unknown basis label {}", a.source)))?;
            arrow_action[arrow][m] = comb(&a.image)?;
        }
        let mut differential = vec![Vec::new(); basis.len()];
        for (l, c) in &p.differentials {
            let m = *index.get(l).ok_or_else(|| Error::InvalidModule(format!("unknown basis label {l}")))?;
            differential[m] = comb(c)?;
        }
        Self::new(algebra, basis, arrow_action, differential)
    }
}

/// A graded submodule recorded per `(degree, vertex)` block in block-local coordinates.
struct BlockSubspaces<E> {
    blocks: Blocks,
    spaces: BTreeMap<(i64, usize), Subspace<E>>,
}

impl<E: Clone + PartialEq> BlockSubspaces<E> {
    fn local<F: Field<Elem = E>>(&self, f: &F, key: (i64, usize), v: &[(usize, E)]) -> Vec<E> {
        let idx = &self.blocks[&key];
        let mut out = vec![f.zero(); idx.len()];
        for (i, c) in v {
            let k = idx.binary_search(i).expect("vector lies in its block");
            out[k] = c.clone();
        }
        out
    }

    fn space(&self, key: (i64, usize)) -> Option<&Subspace<E>> {
        self.spaces.get(&key)
    }
}

impl<F: Field> DgModule<F> {
    /// `M[k]`: degrees lowered by `k`, differential multiplied by `(-1)^k`, action unchanged.
    pub fn shift(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let f = self.field();
        let s = f.from_i64(sign(k));
        let basis = self.basis.iter().map(|b| ModuleBasisElem { degree: b.degree - k, ..b.clone() }).collect();
        let differential = self.differential.iter().map(|v| sparse::scale(f, &s, v)).collect();
        DgModule { algebra: self.algebra.clone(), basis, arrow_action: self.arrow_action.clone(), differential, table: self.table.clone() }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::direct_sum_of(self.algebra.clone(), &[self.clone(), other.clone()])
    }

    pub fn direct_sum_of(algebra: Arc<DgAlgebra<F>>, parts: &[Self]) -> Self {
        let mut basis = Vec::new();
        let mut arrow_action = vec![Vec::new(); algebra.arrows().len()];
        let mut differential = Vec::new();
        for p in parts {
            let off = basis.len();
            let shift = |v: &SparseVec<F::Elem>| -> SparseVec<F::Elem> { v.iter().map(|(i, c)| (i + off, c.clone())).collect() };
            basis.extend(p.basis.iter().cloned());
            for (a, acts) in arrow_action.iter_mut().enumerate() {
                acts.extend(p.arrow_action[a].iter().map(shift));
            }
            differential.extend(p.differential.iter().map(shift));
        }
        Self::from_parts(algebra, basis, arrow_action, differential)
    }

    /// The graded dg submodule generated by the homogeneous components of `gens`.
    fn closure(&self, gens: &[SparseVec<F::Elem>]) -> BlockSubspaces<F::Elem> {
        let f = self.field().clone();
        let blocks = self.blocks();
        let mut out = BlockSubspaces { blocks, spaces: BTreeMap::new() };
        let key_of = |i: usize| (self.basis[i].degree, self.basis[i].vertex);
        let mut work: Vec<SparseVec<F::Elem>> = Vec::new();
        for g in gens {
            let mut parts: BTreeMap<(i64, usize), SparseVec<F::Elem>> = BTreeMap::new();
            for (i, c) in g {
                parts.entry(key_of(*i)).or_default().push((*i, c.clone()));
            }
            work.extend(parts.into_values());
        }
        while let Some(v) = work.pop() {
            if v.is_empty() {
                continue;
            }
            let key = key_of(v[0].0);
            let local = out.local(&f, key, &v);
            let n = local.len();
            let space = out.spaces.entry(key).or_insert_with(|| Subspace::zero(n));
            if space.contains(&f, &local) {
                continue;
            }
            let mut vecs = space.basis().to_vec();
            vecs.push(local);
            *space = Subspace::span(&f, n, &vecs);
            work.push(self.d(&v));
            for a in 0..self.arrow_action.len() {
                work.push(sparse::apply(&f, &self.arrow_action[a], &v));
            }
        }
        out
    }

    /// The dg submodule generated by `gens`, with basis the row-reduced spanning vectors.
    /// Also returns the inclusion as images in `self`.
    pub fn submodule(&self, gens: &[SparseVec<F::Elem>]) -> (Self, Vec<SparseVec<F::Elem>>) {
        let f = self.field().clone();
        let sub = self.closure(gens);
        let mut basis = Vec::new();
        let mut inclusion: Vec<SparseVec<F::Elem>> = Vec::new();
        // (block, pivot column) -> new index
        let mut index: HashMap<((i64, usize), usize), usize> = HashMap::new();
        for (key, space) in &sub.spaces {
            let idx = &sub.blocks[key];
            for (row, &p) in space.basis().iter().zip(space.pivots()) {
                index.insert((*key, p), basis.len());
                let orig = &self.basis[idx[p]];
                basis.push(orig.clone());
                inclusion.push(row.iter().enumerate().filter(|(_, c)| !f.is_zero(c)).map(|(k, c)| (idx[k], c.clone())).collect());
            }
        }
        let key_of = |i: usize| (self.basis[i].degree, self.basis[i].vertex);
        let coords = |v: &SparseVec<F::Elem>| -> SparseVec<F::Elem> {
            // v lies in the submodule; its coordinates are its entries at the pivot columns
            let mut out = Vec::new();
            let mut parts: BTreeMap<(i64, usize), SparseVec<F::Elem>> = BTreeMap::new();
            for (i, c) in v {
                parts.entry(key_of(*i)).or_default().push((*i, c.clone()));
            }
            for (key, part) in parts {
                let local = sub.local(&f, key, &part);
                let space = sub.space(key).expect("closed under the structure maps");
                for &p in space.pivots() {
                    if !f.is_zero(&local[p]) {
                        out.push((index[&(key, p)], local[p].clone()));
                    }
                }
            }
            out.sort_by_key(|(i, _)| *i);
            out
        };
        let arrow_action =
            (0..self.arrow_action.len()).map(|a| inclusion.iter().map(|u| coords(&sparse::apply(&f, &self.arrow_action[a], u))).collect()).collect();
        let differential = inclusion.iter().map(|u| coords(&self.d(u))).collect();
        (Self::from_parts(self.algebra.clone(), basis, arrow_action, differential), inclusion)
    }

    /// `M / N` for the dg submodule `N` generated by `gens`.
    pub fn quotient(&self, gens: &[SparseVec<F::Elem>]) -> Self {
        self.quotient_with_projection(gens).0
    }

    /// `M / N` with the projection `M -> M/N` given on the basis of `M`.
    pub fn quotient_with_projection(&self, gens: &[SparseVec<F::Elem>]) -> (Self, Vec<SparseVec<F::Elem>>) {
        let f = self.field().clone();
        let sub = self.closure(gens);
        let mut keep = Vec::new();
        let mut new_index: HashMap<usize, usize> = HashMap::new();
        for (key, idx) in &sub.blocks {
            let free: Vec<usize> = match sub.space(*key) {
                Some(s) => s.free_columns(),
                None => (0..idx.len()).collect(),
            };
            for k in free {
                new_index.insert(idx[k], keep.len());
                keep.push(idx[k]);
            }
        }
        let key_of = |i: usize| (self.basis[i].degree, self.basis[i].vertex);
        let project = |v: &[(usize, F::Elem)]| -> SparseVec<F::Elem> {
            let mut parts: BTreeMap<(i64, usize), SparseVec<F::Elem>> = BTreeMap::new();
            for (i, c) in v {
                parts.entry(key_of(*i)).or_default().push((*i, c.clone()));
            }
            let mut out = Vec::new();
            for (key, part) in parts {
                let idx = &sub.blocks[&key];
                match sub.space(key) {
                    None => out.extend(part.into_iter().map(|(i, c)| (new_index[&i], c))),
                    Some(space) => {
                        let local = space.reduce(&f, &sub.local(&f, key, &part));
                        for (k, c) in local.into_iter().enumerate() {
                            if !f.is_zero(&c) {
                                out.push((new_index[&idx[k]], c));
                            }
                        }
                    }
                }
            }
            out.sort_by_key(|(i, _)| *i);
            out
        };
        let basis = keep.iter().map(|&i| self.basis[i].clone()).collect();
        let arrow_action = (0..self.arrow_action.len()).map(|a| keep.iter().map(|&i| project(&self.arrow_action[a][i])).collect()).collect();
        let differential = keep.iter().map(|&i| project(&self.differential[i])).collect();
        let projection = (0..self.dim()).map(|i| project(&[(i, f.one())])).collect();
        (Self::from_parts(self.algebra.clone(), basis, arrow_action, differential), projection)
    }

    fn local_to_global(idx: &[usize], v: &[F::Elem], f: &F) -> SparseVec<F::Elem> {
        v.iter().enumerate().filter(|(_, c)| !f.is_zero(c)).map(|(k, c)| (idx[k], c.clone())).collect()
    }

    /// `τ^{≤t} M = M^{<t} ⊕ Z^t`, a dg submodule quasi-isomorphic to the truncation.
    pub fn truncate_above(&self, t: i64) -> Self {
        let f = self.field();
        let blocks = self.blocks();
        let mut gens: Vec<SparseVec<F::Elem>> =
            (0..self.dim()).filter(|&i| self.basis[i].degree < t).map(|i| vec![(i, f.one())]).collect();
        for (&(deg, v), idx) in blocks.range((t, 0)..(t + 1, 0)) {
            for z in self.cycles(&blocks, deg, v).basis() {
                gens.push(Self::local_to_global(idx, z, f));
            }
        }
        self.submodule(&gens).0
    }

    /// `τ^{≥b} M = M / (M^{<b} ⊕ B^b)`.
    pub fn truncate_below(&self, b: i64) -> Self {
        let f = self.field();
        let blocks = self.blocks();
        let mut gens: Vec<SparseVec<F::Elem>> =
            (0..self.dim()).filter(|&i| self.basis[i].degree < b).map(|i| vec![(i, f.one())]).collect();
        for (&(deg, v), idx) in blocks.range((b, 0)..(b + 1, 0)) {
            for z in self.boundaries(&blocks, deg, v).basis() {
                gens.push(Self::local_to_global(idx, z, f));
            }
        }
        self.quotient(&gens)
    }

    /// A quasi-isomorphic module supported between the extreme cohomology degrees.
    pub fn minimize(&self) -> Self {
        match (self.bottom_cohomology(), self.top_cohomology()) {
            (Some(b), Some(t)) => self.truncate_above(t).truncate_below(b),
            _ => Self::zero(self.algebra.clone()),
        }
    }
}

/// A degree-0 morphism of right dg modules.
#[derive(Clone, Debug)]
pub struct ModuleMap<F: Field> {
    pub source: DgModule<F>,
    pub target: DgModule<F>,
    /// Image of each source basis element.
    pub images: Vec<SparseVec<F::Elem>>,
}

impl<F: Field> ModuleMap<F> {
    /// Validates that `images` define an `A`-linear chain map.
    pub fn new(source: DgModule<F>, target: DgModule<F>, images: Vec<SparseVec<F::Elem>>) -> Result<Self> {
        if !Arc::ptr_eq(&source.algebra, &target.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let m = ModuleMap { source, target, images };
        m.validate()?;
        Ok(m)
    }

    pub fn zero(source: DgModule<F>, target: DgModule<F>) -> Self {
        let images = vec![Vec::new(); source.dim()];
        ModuleMap { source, target, images }
    }

    pub fn identity(x: DgModule<F>) -> Self {
        let f = x.field().clone();
        let images = (0..x.dim()).map(|i| vec![(i, f.one())]).collect();
        ModuleMap { source: x.clone(), target: x, images }
    }

    pub fn apply(&self, v: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        sparse::apply(self.source.field(), &self.images, v)
    }

    pub fn validate(&self) -> Result<()> {
        let (x, y) = (&self.source, &self.target);
        if self.images.len() != x.dim() {
            return Err(Error::NotChainMap("wrong number of images".into()));
        }
        let f = x.field();
        for (m, b) in x.basis.iter().enumerate() {
            for (k, _) in &self.images[m] {
                let t = y.basis.get(*k).ok_or_else(|| Error::NotChainMap("image index out of range".into()))?;
                if t.degree != b.degree || t.vertex != b.vertex {
                    return Err(Error::NotChainMap(format!("image of {} is not homogeneous", b.label)));
                }
            }
            if y.d(&self.images[m]) != self.apply(&x.differential[m]) {
                return Err(Error::NotChainMap(format!("map does not commute with d on {}", b.label)));
            }
            for a in 0..x.arrow_action.len() {
                if self.apply(&x.arrow_action[a][m]) != sparse::apply(f, &y.arrow_action[a], &self.images[m]) {
                    return Err(Error::NotChainMap(format!("map is not A-linear on {}", b.label)));
                }
            }
        }
        Ok(())
    }

    /// `cone(f) = x[1] ⊕ y` with `d(sm, n) = (-s dm, f(m) + dn)`.
    pub fn cone(&self) -> DgModule<F> {
        let sx = self.source.shift(1);
        let mut c = DgModule::direct_sum_of(self.source.algebra.clone(), &[sx, self.target.clone()]);
        let off = self.source.dim();
        let f = self.source.field().clone();
        for (m, img) in self.images.iter().enumerate() {
            let shifted: SparseVec<F::Elem> = img.iter().map(|(i, c)| (i + off, c.clone())).collect();
            c.differential[m] = sparse::add(&f, &c.differential[m], &shifted);
        }
        c
    }

    /// `cocone(f) = cone(f)[-1]`.
    pub fn cocone(&self) -> DgModule<F> {
        self.cone().shift(-1)
    }

    /// A map from a direct sum of free modules `⊕_k e_{v_k} A` sending the generator `e_{v_k}` to `z_k`.
    /// Each `z_k` must be a degree-0 cycle in `target e_{v_k}`.
    pub fn from_free_generators(target: &DgModule<F>, generators: &[(usize, SparseVec<F::Elem>)]) -> Self {
        let alg = target.algebra.clone();
        let f = alg.field().clone();
        let parts: Vec<DgModule<F>> = generators.iter().map(|(v, _)| DgModule::free(alg.clone(), *v, 0)).collect();
        let source = DgModule::direct_sum_of(alg.clone(), &parts);
        let mut images = Vec::with_capacity(source.dim());
        for (v, z) in generators {
            for b in (0..alg.dim()).filter(|&b| alg.basis()[b].source == *v) {
                images.push(target.act(z, &[(b, f.one())]));
            }
        }
        ModuleMap { source, target: target.clone(), images }
    }
}

/// A basis of the space of degree-0 chain maps `x -> y` that are `A`-linear.
pub fn hom_space<F: Field>(x: &DgModule<F>, y: &DgModule<F>) -> Result<Vec<ModuleMap<F>>> {
    if !Arc::ptr_eq(&x.algebra, &y.algebra) {
        return Err(Error::AlgebraMismatch);
    }
    let f = x.field().clone();
    let yblocks = y.blocks();
    // unknown (m, n) for m in x, n in y sharing (degree, vertex)
    let mut unknowns: Vec<(usize, usize)> = Vec::new();
    let mut var: HashMap<(usize, usize), usize> = HashMap::new();
    for (m, b) in x.basis.iter().enumerate() {
        for &n in yblocks.get(&(b.degree, b.vertex)).map_or(&[][..], Vec::as_slice) {
            var.insert((m, n), unknowns.len());
            unknowns.push((m, n));
        }
    }
    if unknowns.is_empty() {
        return Ok(Vec::new());
    }
    let nv = unknowns.len();
    // Each equation is indexed by (source element, target coordinate); collect coefficient rows.
    let mut rows: Vec<SparseVec<F::Elem>> = Vec::new();
    let mut push_eq = |eqs: BTreeMap<usize, Accumulator<F::Elem>>| {
        for (_, acc) in eqs {
            let r = acc.finish(&f);
            if !r.is_empty() {
                rows.push(r);
            }
        }
    };
    let ycols = |m: usize| yblocks.get(&(x.basis[m].degree, x.basis[m].vertex)).map_or(&[][..], Vec::as_slice);
    for m in 0..x.dim() {
        // f(d m) - d f(m) = 0
        let mut eqs: BTreeMap<usize, Accumulator<F::Elem>> = BTreeMap::new();
        for (k, c) in &x.differential[m] {
            for &n in ycols(*k) {
                eqs.entry(n).or_default().add(&f, var[&(*k, n)], c);
            }
        }
        for &n in ycols(m) {
            for (t, c) in &y.differential[n] {
                eqs.entry(*t).or_default().add(&f, var[&(m, n)], &f.neg(c));
            }
        }
        push_eq(eqs);
        // f(m a) - f(m) a = 0
        for a in 0..x.arrow_action.len() {
            let mut eqs: BTreeMap<usize, Accumulator<F::Elem>> = BTreeMap::new();
            for (k, c) in &x.arrow_action[a][m] {
                for &n in ycols(*k) {
                    eqs.entry(n).or_default().add(&f, var[&(*k, n)], c);
                }
            }
            for &n in ycols(m) {
                for (t, c) in &y.arrow_action[a][n] {
                    eqs.entry(*t).or_default().add(&f, var[&(m, n)], &f.neg(c));
                }
            }
            push_eq(eqs);
        }
    }
    let mat = Matrix::from_sparse_rows(&f, nv, &rows);
    let kernel = mat.kernel(&f);
    Ok(kernel
        .into_iter()
        .map(|v| {
            let mut images = vec![Vec::new(); x.dim()];
            for (k, c) in v.into_iter().enumerate() {
                if !f.is_zero(&c) {
                    let (m, n) = unknowns[k];
                    images[m].push((n, c));
                }
            }
            for img in &mut images {
                img.sort_by_key(|(i, _)| *i);
            }
            ModuleMap { source: x.clone(), target: y.clone(), images }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::presentation::{normalize, parse_algebra, parse_module};

    fn alg(src: &str) -> Arc<DgAlgebra<Rationals>> {
        Arc::new(normalize(&parse_algebra(src).unwrap(), Rationals).unwrap())
    }

    fn square() -> Arc<DgAlgebra<Rationals>> {
        alg("vertices 1 2 3 4\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 4 deg 0\narrow p : 1 -> 3 deg 0\narrow q : 3 -> 4 deg 0\narrow c : 1 -> 4 deg -1\ndiff c = a*b - p*q\n")
    }

    #[test]
    fn free_modules_are_valid_and_sum_to_regular() {
        let a = square();
        let mut total = 0;
        for v in 0..4 {
            let p = DgModule::free(a.clone(), v, 0);
            p.validate().unwrap();
            total += p.dim();
        }
        let r = DgModule::regular(a.clone(), 2);
        r.validate().unwrap();
        assert_eq!(r.dim(), total);
        assert_eq!(total, a.dim());
        // e_1 A has H^0 spanned by e_1, a, p, ab (= pq) and no other cohomology
        let p1 = DgModule::free(a.clone(), 0, 0);
        assert_eq!(p1.cohomology_dims(), BTreeMap::from([(0, 4)]));
    }

    #[test]
    fn shifts_move_cohomology() {
        let a = alg("vertices 1 2\narrow a : 1 -> 2 deg -2\n");
        let p = DgModule::free(a.clone(), 0, 0);
        assert_eq!(p.cohomology_dims(), BTreeMap::from([(-2, 1), (0, 1)]));
        let p3 = p.shift(3);
        p3.validate().unwrap();
        assert_eq!(p3.cohomology_dims(), BTreeMap::from([(-5, 1), (-3, 1)]));
        let back = p3.shift(-3);
        assert_eq!(back.basis(), p.basis());
        assert_eq!(back.differential(), p.differential());
    }

    #[test]
    fn cones() {
        let a = square();
        let p = DgModule::free(a.clone(), 0, 0);
        let c = ModuleMap::identity(p.clone()).cone();
        c.validate().unwrap();
        assert!(c.is_acyclic());
        let z = DgModule::zero(a.clone());
        let c0 = ModuleMap::zero(z.clone(), p.clone()).cone();
        assert_eq!(c0.cohomology_dims(), p.cohomology_dims());
        let c1 = ModuleMap::zero(p.clone(), p.clone()).cone();
        assert_eq!(c1.cohomology_dims(), BTreeMap::from([(-1, 4), (0, 4)]));
        assert!(ModuleMap::new(p.clone(), DgModule::free(a.clone(), 1, 0), vec![Vec::new(); p.dim()]).is_ok());
    }

    #[test]
    fn hom_space_of_simples_and_cover() {
        let a = square();
        let s = DgModule::simple(a.clone(), 0);
        assert_eq!(hom_space(&s, &s).unwrap().len(), 1);
        let p = DgModule::free(a.clone(), 0, 0);
        let maps = hom_space(&p, &s).unwrap();
        assert_eq!(maps.len(), 1);
        maps[0].validate().unwrap();
        let cocone = maps[0].cocone();
        cocone.validate().unwrap();
        // kernel of e_1A -> S_1 is the radical: H^0 of dimension 3
        assert_eq!(cocone.cohomology_dims(), BTreeMap::from([(0, 3)]));
    }

    #[test]
    fn truncations_and_minimize() {
        let a = alg("vertices 1 2 3\narrow a : 1 -> 2 deg -1\narrow b : 2 -> 3 deg -2\n");
        let r = DgModule::regular(a.clone(), 0);
        let dims = r.cohomology_dims();
        assert_eq!(dims, BTreeMap::from([(-3, 1), (-2, 1), (-1, 1), (0, 3)]));
        let lo = r.truncate_above(-1);
        lo.validate().unwrap();
        assert_eq!(lo.cohomology_dims(), BTreeMap::from([(-3, 1), (-2, 1), (-1, 1)]));
        let hi = r.truncate_below(-1);
        hi.validate().unwrap();
        assert_eq!(hi.cohomology_dims(), BTreeMap::from([(-1, 1), (0, 3)]));
        let c = ModuleMap::zero(r.clone(), r.clone()).cone();
        let m = c.minimize();
        m.validate().unwrap();
        assert_eq!(m.cohomology_dims(), c.cohomology_dims());
        assert!(ModuleMap::identity(r).cone().minimize().is_zero());
    }

    #[test]
    fn truncated_free_modules() {
        let a = alg("vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg -1\n");
        let q = DgModule::truncated_free(a.clone(), 0, 1);
        q.validate().unwrap();
        assert_eq!(q.dim(), 1);
        let q2 = DgModule::truncated_free(a.clone(), 0, 2);
        q2.validate().unwrap();
        assert_eq!(q2.dim(), 2);
    }

    #[test]
    fn module_files() {
        let a = alg("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n");
        let src = "module k2\nbasis u vertex 1 deg 0\nbasis v vertex 1 deg 0\nact x : u -> v\n";
        let m = DgModule::from_presentation(a.clone(), &parse_module(src).unwrap()).unwrap();
        assert_eq!(m.dim(), 2);
        let bad = "module k2\nbasis u vertex 1 deg 0\nact x : u -> u\n";
        assert!(DgModule::from_presentation(a, &parse_module(bad).unwrap()).is_err());
    }
}
