//! Finite-dimensional dg bimodules, as needed for derived tensor products.

use std::sync::Arc;

use crate::algebra::{sign, AlgebraMap, DgAlgebra};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::sparse::{self, SparseVec};
use crate::linalg::Subspace;
use crate::module::{DgModule, ModuleBasisElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleBasisElem {
    pub label: String,
    /// `e_left · t = t`
    pub left: usize,
    /// `t · e_right = t`
    pub right: usize,
    pub degree: i64,
}

/// A dg `A`-bimodule `Y = ⊕ e_i Y e_j`. For an arrow `a: i -> j`, `a · e_j Y ⊆ e_i Y` and `Y e_i · a ⊆ Y e_j`.
#[derive(Clone, Debug)]
pub struct DgBimodule<F: Field> {
    algebra: Arc<DgAlgebra<F>>,
    basis: Vec<BimoduleBasisElem>,
    left_arrow: Vec<Vec<SparseVec<F::Elem>>>,
    right_arrow: Vec<Vec<SparseVec<F::Elem>>>,
    differential: Vec<SparseVec<F::Elem>>,
    left_table: Vec<Vec<SparseVec<F::Elem>>>,
    right_table: Vec<Vec<SparseVec<F::Elem>>>,
}

impl<F: Field> DgBimodule<F> {
    fn from_parts(
        algebra: Arc<DgAlgebra<F>>,
        basis: Vec<BimoduleBasisElem>,
        left_arrow: Vec<Vec<SparseVec<F::Elem>>>,
        right_arrow: Vec<Vec<SparseVec<F::Elem>>>,
        differential: Vec<SparseVec<F::Elem>>,
    ) -> Self {
        let f = algebra.field().clone();
        let n = basis.len();
        let mut left_table = Vec::with_capacity(algebra.dim());
        let mut right_table = Vec::with_capacity(algebra.dim());
        for b in algebra.basis() {
            if b.is_idempotent() {
                left_table.push((0..n).map(|t| if basis[t].left == b.source { vec![(t, f.one())] } else { Vec::new() }).collect());
                right_table.push((0..n).map(|t| if basis[t].right == b.source { vec![(t, f.one())] } else { Vec::new() }).collect());
                continue;
            }
            let mut lt = Vec::with_capacity(n);
            let mut rt = Vec::with_capacity(n);
            for t in 0..n {
                let mut v: SparseVec<F::Elem> = vec![(t, f.one())];
                for &a in b.path.iter().rev() {
                    v = sparse::apply(&f, &left_arrow[a], &v);
                }
                lt.push(v);
                let mut v: SparseVec<F::Elem> = vec![(t, f.one())];
                for &a in &b.path {
                    v = sparse::apply(&f, &right_arrow[a], &v);
                }
                rt.push(v);
            }
            left_table.push(lt);
            right_table.push(rt);
        }
        DgBimodule { algebra, basis, left_arrow, right_arrow, differential, left_table, right_table }
    }

    /// `A` as a bimodule over itself.
    pub fn regular(algebra: Arc<DgAlgebra<F>>) -> Self {
        let n = algebra.dim();
        Self::regular_subquotient(algebra.clone(), &Subspace::full(algebra.field(), n), &Subspace::zero(n))
    }

    /// `Ā^m / Ā^{m'}` for `m <= m'`, where `Ā^m` is spanned by the classes of paths of length at least `m`.
    pub fn ideal_quotient(algebra: Arc<DgAlgebra<F>>, m: usize, m2: usize) -> Self {
        let big = algebra.length_filtration(m);
        let small = algebra.length_filtration(m2.max(m));
        Self::regular_subquotient(algebra, &big, &small)
    }

    /// `big / small` for dg ideals `small ⊆ big` of `A`, in basis coordinates of `A`.
    fn regular_subquotient(algebra: Arc<DgAlgebra<F>>, big: &Subspace<F::Elem>, small: &Subspace<F::Elem>) -> Self {
        let f = algebra.field().clone();
        let n = algebra.dim();
        let free = small.free_columns();
        let project = |v: &[F::Elem]| -> Vec<F::Elem> {
            let r = small.reduce(&f, v);
            free.iter().map(|&c| r[c].clone()).collect()
        };
        let images: Vec<Vec<F::Elem>> = big.basis().iter().map(|v| project(v)).collect();
        let sub = Subspace::span(&f, free.len(), &images);
        // basis element k lifts to A with entries at the free columns
        let lifts: Vec<SparseVec<F::Elem>> = sub
            .basis()
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, c)| !f.is_zero(c)).map(|(j, c)| (free[j], c.clone())).collect())
            .collect();
        let basis: Vec<BimoduleBasisElem> = sub
            .pivots()
            .iter()
            .map(|&p| {
                let pc = &algebra.basis()[free[p]];
                BimoduleBasisElem { label: pc.label.clone(), left: pc.source, right: pc.target, degree: pc.degree }
            })
            .collect();
        let coords = |v: &SparseVec<F::Elem>| -> SparseVec<F::Elem> {
            let dense = project(&sparse::to_dense(&f, v, n));
            sub.pivots().iter().enumerate().filter(|(_, &p)| !f.is_zero(&dense[p])).map(|(k, &p)| (k, dense[p].clone())).collect()
        };
        let left_arrow = (0..algebra.arrows().len())
            .map(|a| lifts.iter().map(|t| coords(&algebra.mul(algebra.arrow_element(a), t))).collect())
            .collect();
        let right_arrow = (0..algebra.arrows().len())
            .map(|a| lifts.iter().map(|t| coords(&algebra.mul(t, algebra.arrow_element(a)))).collect())
            .collect();
        let differential = lifts.iter().map(|t| coords(&algebra.d(t))).collect();
        Self::from_parts(algebra, basis, left_arrow, right_arrow, differential)
    }

    /// `T_h = cone(h) = A[1] ⊕ B` as an `A`-bimodule, `d(sa, b) = (-s da, h(a) + db)`.
    pub fn cone_of_algebra_map(h: &AlgebraMap<F>) -> Self {
        let (a, b) = (&h.source, &h.target);
        let f = a.field().clone();
        let na = a.dim();
        let mut basis: Vec<BimoduleBasisElem> = a
            .basis()
            .iter()
            .map(|pc| BimoduleBasisElem { label: format!("s{}", pc.label), left: pc.source, right: pc.target, degree: pc.degree - 1 })
            .collect();
        basis.extend(
            b.basis()
                .iter()
                .map(|pc| BimoduleBasisElem { label: pc.label.clone(), left: h.owner(pc.source), right: h.owner(pc.target), degree: pc.degree }),
        );
        let off = |v: SparseVec<F::Elem>| -> SparseVec<F::Elem> { v.into_iter().map(|(i, c)| (i + na, c)).collect() };
        let mut left_arrow = Vec::new();
        let mut right_arrow = Vec::new();
        for (k, arrow) in a.arrows().iter().enumerate() {
            let x = a.arrow_element(k);
            let hx = h.apply(x);
            let s = f.from_i64(sign(arrow.degree));
            let mut l: Vec<SparseVec<F::Elem>> =
                (0..na).map(|i| sparse::scale(&f, &s, &a.mul(x, &[(i, f.one())]))).collect();
            let mut r: Vec<SparseVec<F::Elem>> = (0..na).map(|i| a.mul(&[(i, f.one())], x)).collect();
            for j in 0..b.dim() {
                l.push(off(b.mul(&hx, &[(j, f.one())])));
                r.push(off(b.mul(&[(j, f.one())], &hx)));
            }
            left_arrow.push(l);
            right_arrow.push(r);
        }
        let minus = f.neg(&f.one());
        let mut differential: Vec<SparseVec<F::Elem>> = (0..na)
            .map(|i| {
                let mut v = sparse::scale(&f, &minus, a.d_basis(i));
                v.extend(off(h.images[i].clone()));
                v
            })
            .collect();
        differential.extend((0..b.dim()).map(|j| off(b.d_basis(j).to_vec())));
        Self::from_parts(a.clone(), basis, left_arrow, right_arrow, differential)
    }

    /// The quotient model `B / h(A)` of `T_h`, available when `h` is injective.
    pub fn algebra_map_cokernel(h: &AlgebraMap<F>) -> Result<Self> {
        if !h.is_injective() {
            return Err(Error::Unsupported("the quotient model needs an injective algebra map".into()));
        }
        let (a, b) = (&h.source, &h.target);
        let f = b.field().clone();
        let nb = b.dim();
        let image = Subspace::span(&f, nb, &h.images.iter().map(|v| sparse::to_dense(&f, v, nb)).collect::<Vec<_>>());
        let free = image.free_columns();
        let project = |v: &SparseVec<F::Elem>| -> SparseVec<F::Elem> {
            let r = image.reduce(&f, &sparse::to_dense(&f, v, nb));
            free.iter().enumerate().filter(|(_, &c)| !f.is_zero(&r[c])).map(|(k, &c)| (k, r[c].clone())).collect()
        };
        let basis = free
            .iter()
            .map(|&c| {
                let pc = &b.basis()[c];
                BimoduleBasisElem { label: pc.label.clone(), left: h.owner(pc.source), right: h.owner(pc.target), degree: pc.degree }
            })
            .collect();
        let mut left_arrow = Vec::new();
        let mut right_arrow = Vec::new();
        for k in 0..a.arrows().len() {
            let hx = h.apply(a.arrow_element(k));
            left_arrow.push(free.iter().map(|&c| project(&b.mul(&hx, &[(c, f.one())]))).collect());
            right_arrow.push(free.iter().map(|&c| project(&b.mul(&[(c, f.one())], &hx))).collect());
        }
        let differential = free.iter().map(|&c| project(&b.d_basis(c).to_vec())).collect();
        Ok(Self::from_parts(a.clone(), basis, left_arrow, right_arrow, differential))
    }

    /// `Y[k]`: degrees lowered by `k`, `d` scaled by `(-1)^k`, left action twisted by `(-1)^{k|a|}`.
    pub fn shift(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let f = self.algebra.field().clone();
        let s = f.from_i64(sign(k));
        let basis = self.basis.iter().map(|b| BimoduleBasisElem { degree: b.degree - k, ..b.clone() }).collect();
        let left_arrow = self
            .algebra
            .arrows()
            .iter()
            .zip(&self.left_arrow)
            .map(|(arrow, acts)| {
                let t = f.from_i64(sign(k * arrow.degree));
                acts.iter().map(|v| sparse::scale(&f, &t, v)).collect()
            })
            .collect();
        let differential = self.differential.iter().map(|v| sparse::scale(&f, &s, v)).collect();
        Self::from_parts(self.algebra.clone(), basis, left_arrow, self.right_arrow.clone(), differential)
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra<F>> {
        &self.algebra
    }

    pub fn basis(&self) -> &[BimoduleBasisElem] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn differential(&self) -> &[SparseVec<F::Elem>] {
        &self.differential
    }

    /// `b · t` for an algebra basis class `b`.
    pub fn left_act_basis(&self, b: usize, t: usize) -> &[(usize, F::Elem)] {
        &self.left_table[b][t]
    }

    /// `t · b` for an algebra basis class `b`.
    pub fn right_act_basis(&self, t: usize, b: usize) -> &[(usize, F::Elem)] {
        &self.right_table[b][t]
    }

    /// The underlying right dg module (forgetting the left action).
    pub fn as_right_module(&self) -> DgModule<F> {
        let basis = self.basis.iter().map(|b| ModuleBasisElem { label: b.label.clone(), vertex: b.right, degree: b.degree }).collect();
        DgModule::from_parts(self.algebra.clone(), basis, self.right_arrow.clone(), self.differential.clone())
    }

    /// Checks `d² = 0`, both Leibniz rules, the bimodule identity `(a t) b = a (t b)`, relations, and homogeneity.
    pub fn validate(&self) -> Result<()> {
        let f = self.algebra.field();
        let alg = &self.algebra;
        let bad = |m: String| Err(Error::InvalidModule(m));
        let d = |v: &[(usize, F::Elem)]| sparse::apply(f, &self.differential, v);
        let left = |x: &[(usize, F::Elem)], v: &[(usize, F::Elem)]| -> SparseVec<F::Elem> {
            let mut acc = sparse::Accumulator::new();
            for (b, c) in x {
                for (t, e) in v {
                    acc.add_scaled(f, &f.mul(c, e), &self.left_table[*b][*t]);
                }
            }
            acc.finish(f)
        };
        let right = |v: &[(usize, F::Elem)], x: &[(usize, F::Elem)]| -> SparseVec<F::Elem> {
            let mut acc = sparse::Accumulator::new();
            for (b, c) in x {
                for (t, e) in v {
                    acc.add_scaled(f, &f.mul(c, e), &self.right_table[*b][*t]);
                }
            }
            acc.finish(f)
        };
        for (t, tb) in self.basis.iter().enumerate() {
            let one = vec![(t, f.one())];
            for (k, _) in &self.differential[t] {
                let u = &self.basis[*k];
                if u.degree != tb.degree + 1 || u.left != tb.left || u.right != tb.right {
                    return bad(format!("d({}) is not homogeneous", tb.label));
                }
            }
            if !d(&self.differential[t]).is_empty() {
                return bad(format!("d^2({}) != 0", tb.label));
            }
            for (a, arrow) in alg.arrows().iter().enumerate() {
                let x = alg.arrow_element(a);
                let dx = alg.d(x);
                // d(t a) = d(t) a + (-1)^{|t|} t d(a)
                let lhs = d(&right(&one, x));
                let rhs = sparse::axpy(f, &right(&self.differential[t], x), &f.from_i64(sign(tb.degree)), &right(&one, &dx));
                if lhs != rhs {
                    return bad(format!("right Leibniz rule fails on ({}, {})", tb.label, arrow.name));
                }
                // d(a t) = d(a) t + (-1)^{|a|} a d(t)
                let lhs = d(&left(x, &one));
                let rhs = sparse::axpy(f, &left(&dx, &one), &f.from_i64(sign(arrow.degree)), &left(x, &self.differential[t]));
                if lhs != rhs {
                    return bad(format!("left Leibniz rule fails on ({}, {})", arrow.name, tb.label));
                }
                for b in 0..alg.arrows().len() {
                    let y = alg.arrow_element(b);
                    if right(&left(x, &one), y) != left(x, &right(&one, y)) {
                        return bad(format!("actions do not commute on {}", tb.label));
                    }
                }
            }
            for r in alg.relations() {
                let x = alg.reduce_combination(r);
                let _ = x;
                let mut lacc = sparse::Accumulator::new();
                let mut racc = sparse::Accumulator::new();
                for (path, c) in r {
                    let mut v = one.clone();
                    for &a in path {
                        v = sparse::apply(f, &self.right_arrow[a], &v);
                    }
                    racc.add_scaled(f, c, &v);
                    let mut v = one.clone();
                    for &a in path.iter().rev() {
                        v = sparse::apply(f, &self.left_arrow[a], &v);
                    }
                    lacc.add_scaled(f, c, &v);
                }
                if !lacc.finish(f).is_empty() || !racc.finish(f).is_empty() {
                    return bad(format!("a relation does not annihilate {}", tb.label));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::presentation::{normalize, parse_algebra};

    fn alg(src: &str) -> Arc<DgAlgebra<Rationals>> {
        Arc::new(normalize(&parse_algebra(src).unwrap(), Rationals).unwrap())
    }

    #[test]
    fn bimodules_validate() {
        let a = alg("vertices 1 2 3 4\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 4 deg -1\narrow p : 1 -> 3 deg -1\narrow q : 3 -> 4 deg 0\narrow c : 1 -> 4 deg -2\ndiff c = a*b - p*q\n");
        let r = DgBimodule::regular(a.clone());
        r.validate().unwrap();
        assert_eq!(r.dim(), a.dim());
        r.shift(1).validate().unwrap();
        r.shift(-3).validate().unwrap();
        let q = DgBimodule::ideal_quotient(a.clone(), 1, 2);
        q.validate().unwrap();
        assert_eq!(q.dim(), 5);
        let h = AlgebraMap::vertex_inclusion(a.clone());
        let t = DgBimodule::cone_of_algebra_map(&h);
        t.validate().unwrap();
        let cok = DgBimodule::algebra_map_cokernel(&h).unwrap();
        cok.validate().unwrap();
        assert_eq!(t.as_right_module().cohomology_dims(), cok.as_right_module().cohomology_dims());
        let id = DgBimodule::cone_of_algebra_map(&AlgebraMap::identity(a.clone()));
        id.validate().unwrap();
        assert!(id.as_right_module().is_acyclic());
        let z = DgBimodule::cone_of_algebra_map(&AlgebraMap::to_zero(a.clone()));
        assert_eq!(z.as_right_module().cohomology_dims(), DgModule::regular(a, 1).cohomology_dims());
    }
}
