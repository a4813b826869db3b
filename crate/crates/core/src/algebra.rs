//! Finite-dimensional connective dg quiver algebras `kQ/I`.
//!
//! Paths compose left to right: for arrows `a: i -> j` and `b: j -> k` the
//! product `a*b` is a path `i -> k`, so `e_i A` is spanned by the paths
//! starting at `i` and right modules split as `M = ⊕ M e_i`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::sparse::{self, Accumulator, SparseVec};
use crate::linalg::Subspace;
use crate::presentation::AlgebraPresentation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
}

/// A basis element of `kQ/I`: the class of a path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathClass {
    /// Arrow indices; empty for a vertex idempotent.
    pub path: Vec<usize>,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
    pub label: String,
}

impl PathClass {
    pub fn length(&self) -> usize {
        self.path.len()
    }

    pub fn is_idempotent(&self) -> bool {
        self.path.is_empty()
    }
}

/// A normalized dg quiver algebra with explicit structure constants.
#[derive(Clone, Debug)]
pub struct DgAlgebra<F: Field> {
    pub(crate) field: F,
    pub(crate) vertices: Vec<String>,
    pub(crate) arrows: Vec<Arrow>,
    pub(crate) basis: Vec<PathClass>,
    pub(crate) idempotents: Vec<usize>,
    pub(crate) arrow_elements: Vec<SparseVec<F::Elem>>,
    pub(crate) products: HashMap<(usize, usize), SparseVec<F::Elem>>,
    pub(crate) differential: Vec<SparseVec<F::Elem>>,
    /// Generators of `I` as combinations of arrow paths.
    pub(crate) relations: Vec<Vec<(Vec<usize>, F::Elem)>>,
    /// Paths longer than this vanish.
    pub(crate) truncation: usize,
    pub(crate) quiver_max_path_length: Option<usize>,
    pub(crate) presentation: Option<AlgebraPresentation>,
    pub(crate) reductions: HashMap<Vec<usize>, SparseVec<F::Elem>>,
}

impl<F: Field> DgAlgebra<F> {
    /// The semisimple algebra `kQ_0` on the given vertices, concentrated in degree 0.
    pub fn semisimple(field: F, vertices: Vec<String>) -> Self {
        let basis: Vec<PathClass> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| PathClass { path: vec![], source: i, target: i, degree: 0, label: idempotent_label(v) })
            .collect();
        let one = field.one();
        let products = (0..basis.len()).map(|i| ((i, i), vec![(i, one.clone())])).collect();
        DgAlgebra {
            idempotents: (0..vertices.len()).collect(),
            differential: vec![Vec::new(); basis.len()],
            field,
            vertices,
            arrows: Vec::new(),
            basis,
            arrow_elements: Vec::new(),
            products,
            relations: Vec::new(),
            truncation: 0,
            quiver_max_path_length: Some(0),
            presentation: None,
            reductions: HashMap::new(),
        }
    }

    /// The zero algebra (no vertices).
    pub fn zero(field: F) -> Self {
        Self::semisimple(field, Vec::new())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn basis(&self) -> &[PathClass] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn idempotent(&self, vertex: usize) -> usize {
        self.idempotents[vertex]
    }

    /// The element of `A` represented by an arrow.
    pub fn arrow_element(&self, arrow: usize) -> &SparseVec<F::Elem> {
        &self.arrow_elements[arrow]
    }

    pub fn presentation(&self) -> Option<&AlgebraPresentation> {
        self.presentation.as_ref()
    }

    pub fn relations(&self) -> &[Vec<(Vec<usize>, F::Elem)>] {
        &self.relations
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Indices of the positive-length basis classes (a basis of the augmentation ideal).
    pub fn augmentation_basis(&self) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| !self.basis[i].is_idempotent()).collect()
    }

    /// Largest `n` with `A^{-n} != 0`.
    pub fn amplitude(&self) -> i64 {
        self.basis.iter().map(|b| -b.degree).max().unwrap_or(0)
    }

    pub fn quiver_is_acyclic(&self) -> bool {
        self.quiver_max_path_length.is_some()
    }

    /// Longest path in the quiver `Q` (ignoring relations); `None` when `Q` has oriented cycles.
    pub fn quiver_max_path_length(&self) -> Option<usize> {
        self.quiver_max_path_length
    }

    /// Longest path class surviving in `kQ/I`.
    pub fn max_basis_length(&self) -> usize {
        self.basis.iter().map(PathClass::length).max().unwrap_or(0)
    }

    pub fn is_semisimple(&self) -> bool {
        self.basis.iter().all(PathClass::is_idempotent)
    }

    /// Product of two basis classes.
    pub fn mul_basis(&self, a: usize, b: usize) -> &[(usize, F::Elem)] {
        self.products.get(&(a, b)).map_or(&[], Vec::as_slice)
    }

    pub fn mul(&self, a: &[(usize, F::Elem)], b: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut acc = Accumulator::new();
        for (i, x) in a {
            for (j, y) in b {
                let p = self.mul_basis(*i, *j);
                if !p.is_empty() {
                    acc.add_scaled(f, &f.mul(x, y), p);
                }
            }
        }
        acc.finish(f)
    }

    pub fn d_basis(&self, i: usize) -> &[(usize, F::Elem)] {
        &self.differential[i]
    }

    pub fn d(&self, a: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        sparse::apply(&self.field, &self.differential, a)
    }

    /// The class of a path of arrows (zero when it is too long or not composable).
    pub fn reduce_path(&self, path: &[usize]) -> SparseVec<F::Elem> {
        if path.is_empty() {
            return Vec::new();
        }
        for w in path.windows(2) {
            if self.arrows[w[0]].target != self.arrows[w[1]].source {
                return Vec::new();
            }
        }
        if path.len() > self.truncation {
            return Vec::new();
        }
        self.reductions.get(path).cloned().unwrap_or_default()
    }

    /// The class of an arbitrary combination of arrow paths.
    pub fn reduce_combination(&self, comb: &[(Vec<usize>, F::Elem)]) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut acc = Accumulator::new();
        for (p, c) in comb {
            acc.add_scaled(f, c, &self.reduce_path(p));
        }
        acc.finish(f)
    }

    /// The unit `Σ e_i`.
    pub fn unit(&self) -> SparseVec<F::Elem> {
        self.idempotents.iter().map(|&i| (i, self.field.one())).collect()
    }

    /// Basis indices of a given degree.
    pub fn basis_in_degree(&self, degree: i64) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| self.basis[i].degree == degree).collect()
    }

    /// The two-sided ideal spanned by the classes of all paths of length `>= m`,
    /// one subspace of `A` (in basis coordinates).
    pub fn length_filtration(&self, m: usize) -> Subspace<F::Elem> {
        let f = &self.field;
        let n = self.basis.len();
        if m == 0 {
            return Subspace::full(f, n);
        }
        let mut vectors = Vec::new();
        for (path, red) in &self.reductions {
            if path.len() >= m && !red.is_empty() {
                vectors.push(sparse::to_dense(f, red, n));
            }
        }
        Subspace::span(f, n, &vectors)
    }

    /// Associativity of the structure constants on all basis triples.
    pub fn check_associative(&self) -> bool {
        let n = self.basis.len();
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul_basis(a, b);
                if ab.is_empty() && self.basis[a].target != self.basis[b].source {
                    continue;
                }
                for c in 0..n {
                    let left = self.mul(ab, &[(c, self.field.one())]);
                    let right = self.mul(&[(a, self.field.one())], self.mul_basis(b, c));
                    if left != right {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `e_i e_j = δ_ij e_i`, `Σ e_i` is a two-sided unit and `d(e_i) = 0`.
    pub fn check_idempotents(&self) -> bool {
        let f = &self.field;
        let one = f.one();
        for (i, &ei) in self.idempotents.iter().enumerate() {
            if !self.differential[ei].is_empty() {
                return false;
            }
            for (j, &ej) in self.idempotents.iter().enumerate() {
                let expected = if i == j { vec![(ei, one.clone())] } else { Vec::new() };
                if self.mul_basis(ei, ej) != expected.as_slice() {
                    return false;
                }
            }
        }
        let unit = self.unit();
        (0..self.basis.len()).all(|b| {
            let x = vec![(b, one.clone())];
            self.mul(&unit, &x) == x && self.mul(&x, &unit) == x
        })
    }

    /// `d(uv) = d(u)v + (-1)^{|u|} u d(v)` on all basis pairs, and `d² = 0`.
    pub fn check_leibniz(&self) -> bool {
        let f = &self.field;
        let n = self.basis.len();
        let one = f.one();
        for u in 0..n {
            if !self.d(self.d_basis(u)).is_empty() {
                return false;
            }
            for v in 0..n {
                let uv = self.mul_basis(u, v);
                let lhs = self.d(uv);
                let t1 = self.mul(self.d_basis(u), &[(v, one.clone())]);
                let t2 = self.mul(&[(u, one.clone())], self.d_basis(v));
                let t2 = sparse::scale(f, &f.from_i64(sign(self.basis[u].degree)), &t2);
                if lhs != sparse::add(f, &t1, &t2) {
                    return false;
                }
            }
        }
        true
    }

    /// The augmentation ideal is nilpotent: `Ā^{k} = 0` for some `k <= dim A`.
    pub fn augmentation_is_nilpotent(&self) -> bool {
        let f = &self.field;
        let n = self.basis.len();
        let aug = self.augmentation_basis();
        let mut power: Vec<Vec<F::Elem>> = aug.iter().map(|&i| sparse::to_dense(f, &[(i, f.one())], n)).collect();
        for _ in 0..=n {
            if Subspace::span(f, n, &power).dim() == 0 {
                return true;
            }
            let mut next = Vec::new();
            for p in &power {
                let ps = sparse::from_dense(f, p);
                for &a in &aug {
                    let prod = self.mul(&ps, &[(a, f.one())]);
                    if !prod.is_empty() {
                        next.push(sparse::to_dense(f, &prod, n));
                    }
                }
            }
            power = Subspace::span(f, n, &next).basis().to_vec();
        }
        false
    }
}

pub(crate) fn idempotent_label(vertex: &str) -> String {
    format!("e_{vertex}")
}

/// `(-1)^k` as an integer.
pub(crate) fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A degree-0 dg algebra homomorphism given on bases.
#[derive(Clone, Debug)]
pub struct AlgebraMap<F: Field> {
    pub source: std::sync::Arc<DgAlgebra<F>>,
    pub target: std::sync::Arc<DgAlgebra<F>>,
    /// Image of each source basis element.
    pub images: Vec<SparseVec<F::Elem>>,
    /// For each target vertex, the source vertex whose idempotent covers it.
    pub(crate) vertex_owner: Vec<usize>,
}

impl<F: Field> AlgebraMap<F> {
    /// Validates multiplicativity, unitality, degree, compatibility with `d`,
    /// and that each `h(e_i)` is a sum of target idempotents partitioning `Q_0` of the target.
    pub fn new(
        source: std::sync::Arc<DgAlgebra<F>>,
        target: std::sync::Arc<DgAlgebra<F>>,
        images: Vec<SparseVec<F::Elem>>,
    ) -> Result<Self> {
        let f = source.field().clone();
        if images.len() != source.dim() {
            return Err(Error::NotHomomorphism("wrong number of basis images".into()));
        }
        for (i, img) in images.iter().enumerate() {
            for (j, _) in img {
                if *j >= target.dim() || target.basis[*j].degree != source.basis[i].degree {
                    return Err(Error::NotHomomorphism(format!("image of {} is not homogeneous of degree {}", source.basis[i].label, source.basis[i].degree)));
                }
            }
        }
        let apply = |x: &[(usize, F::Elem)]| sparse::apply(&f, &images, x);
        let one = f.one();
        for a in 0..source.dim() {
            if apply(source.d_basis(a)) != target.d(&images[a]) {
                return Err(Error::NotHomomorphism(format!("h does not commute with d on {}", source.basis[a].label)));
            }
            for b in 0..source.dim() {
                let lhs = apply(source.mul_basis(a, b));
                let rhs = target.mul(&images[a], &images[b]);
                if lhs != rhs {
                    return Err(Error::NotHomomorphism(format!(
                        "h({}*{}) != h({})h({})",
                        source.basis[a].label, source.basis[b].label, source.basis[a].label, source.basis[b].label
                    )));
                }
            }
        }
        if apply(&source.unit()) != target.unit() {
            return Err(Error::NotHomomorphism("h is not unital".into()));
        }
        let mut vertex_owner = vec![usize::MAX; target.vertices.len()];
        for (v, &e) in source.idempotents.iter().enumerate() {
            for (j, c) in &images[e] {
                let pc = &target.basis[*j];
                if !pc.is_idempotent() || *c != one {
                    return Err(Error::Unsupported(format!("h(e_{}) is not a sum of vertex idempotents", source.vertices[v])));
                }
                vertex_owner[pc.source] = v;
            }
        }
        if vertex_owner.contains(&usize::MAX) {
            return Err(Error::NotHomomorphism("h is not unital".into()));
        }
        Ok(AlgebraMap { source, target, images, vertex_owner })
    }

    pub fn identity(a: std::sync::Arc<DgAlgebra<F>>) -> Self {
        let one = a.field().one();
        let images = (0..a.dim()).map(|i| vec![(i, one.clone())]).collect();
        let vertex_owner = (0..a.vertices.len()).collect();
        AlgebraMap { source: a.clone(), target: a, images, vertex_owner }
    }

    /// The inclusion `kQ_0 -> kQ/I`.
    pub fn vertex_inclusion(a: std::sync::Arc<DgAlgebra<F>>) -> Self {
        let s = std::sync::Arc::new(DgAlgebra::semisimple(a.field().clone(), a.vertices.clone()));
        let one = a.field().one();
        let images = a.idempotents.iter().map(|&e| vec![(e, one.clone())]).collect();
        let vertex_owner = (0..a.vertices.len()).collect();
        AlgebraMap { source: s, target: a, images, vertex_owner }
    }

    /// The map `A -> 0`.
    pub fn to_zero(a: std::sync::Arc<DgAlgebra<F>>) -> Self {
        let z = std::sync::Arc::new(DgAlgebra::zero(a.field().clone()));
        AlgebraMap { images: vec![Vec::new(); a.dim()], source: a, target: z, vertex_owner: Vec::new() }
    }

    pub fn apply(&self, x: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
        sparse::apply(self.source.field(), &self.images, x)
    }

    /// Source vertex owning a target vertex.
    pub fn owner(&self, target_vertex: usize) -> usize {
        self.vertex_owner[target_vertex]
    }

    pub fn is_injective(&self) -> bool {
        let f = self.source.field();
        let n = self.target.dim();
        let rows: Vec<Vec<F::Elem>> = self.images.iter().map(|v| sparse::to_dense(f, v, n)).collect();
        Subspace::span(f, n, &rows).dim() == self.images.len()
    }
}

/// `H⁰(A)` with its radical and simple modules.
#[derive(Clone, Debug)]
pub struct H0Algebra<F: Field> {
    /// Basis of `H⁰(A)`: classes of these degree-0 basis elements of `A`.
    pub basis_labels: Vec<String>,
    /// Structure constants `products[i][j]` in the `H⁰` basis.
    pub products: Vec<Vec<SparseVec<F::Elem>>>,
    /// Indices (into the `H⁰` basis) spanning the radical.
    pub radical_dim: usize,
    /// Smallest `m` with `rad^m = 0`.
    pub nilpotency_index: usize,
    /// Vertices whose simples survive (all vertices for a validated presentation).
    pub simples: Vec<String>,
}

impl<F: Field> H0Algebra<F> {
    pub fn dim(&self) -> usize {
        self.basis_labels.len()
    }
}

/// Computes `H⁰(A) = A⁰ / d(A^{-1})` with its induced product, and validates
/// that the image of the positive-length classes is a nilpotent ideal with
/// semisimple quotient `k^{Q_0}`.
pub fn h0_algebra<F: Field>(a: &DgAlgebra<F>) -> Result<H0Algebra<F>> {
    let f = a.field();
    let deg0 = a.basis_in_degree(0);
    let pos: HashMap<usize, usize> = deg0.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let n0 = deg0.len();
    let boundaries: Vec<Vec<F::Elem>> = a
        .basis_in_degree(-1)
        .iter()
        .map(|&i| {
            let mut v = vec![f.zero(); n0];
            for (j, c) in a.d_basis(i) {
                v[pos[j]] = c.clone();
            }
            v
        })
        .collect();
    let b0 = Subspace::span(f, n0, &boundaries);
    // complement: non-pivot standard vectors; ordering keeps idempotents first within blocks
    let free = b0.free_columns();
    let h_index: HashMap<usize, usize> = free.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let to_h = |v: &[(usize, F::Elem)]| -> SparseVec<F::Elem> {
        let mut dense = vec![f.zero(); n0];
        for (j, c) in v {
            dense[pos[j]] = c.clone();
        }
        let r = b0.reduce(f, &dense);
        r.iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(k, c)| (*h_index.get(&k).expect("reduced vector lies on free columns"), c.clone()))
            .collect()
    };
    let basis_labels: Vec<String> = free.iter().map(|&c| a.basis[deg0[c]].label.clone()).collect();
    let products: Vec<Vec<SparseVec<F::Elem>>> = free
        .iter()
        .map(|&x| free.iter().map(|&y| to_h(a.mul_basis(deg0[x], deg0[y]))).collect())
        .collect();
    for (v, &e) in a.idempotents.iter().enumerate() {
        if to_h(&[(e, f.one())]).is_empty() {
            return Err(Error::Unsupported(format!("idempotent of vertex {} vanishes in H0", a.vertices[v])));
        }
    }
    // radical: image of positive-length degree-0 classes
    let m = free.len();
    let rad_vectors: Vec<Vec<F::Elem>> = deg0
        .iter()
        .filter(|&&i| !a.basis[i].is_idempotent())
        .map(|&i| sparse::to_dense(f, &to_h(&[(i, f.one())]), m))
        .collect();
    let rad = Subspace::span(f, m, &rad_vectors);
    if m - rad.dim() != a.vertices.len() {
        return Err(Error::Unsupported("H0(A)/rad is not k^{Q0}".into()));
    }
    let mul_h = |x: &[F::Elem], y: &[F::Elem]| -> Vec<F::Elem> {
        let mut out = vec![f.zero(); m];
        for (i, xi) in x.iter().enumerate() {
            if f.is_zero(xi) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if f.is_zero(yj) {
                    continue;
                }
                let c = f.mul(xi, yj);
                for (k, z) in &products[i][j] {
                    f.add_mul_assign(&mut out[*k], &c, z);
                }
            }
        }
        out
    };
    // rad must be an ideal and nilpotent
    let mut power = rad.clone();
    let mut index = 1;
    while power.dim() > 0 {
        if index > m + 1 {
            return Err(Error::Unsupported("radical of H0(A) is not nilpotent".into()));
        }
        let mut next = Vec::new();
        for p in power.basis() {
            for r in rad.basis() {
                next.push(mul_h(p, r));
            }
        }
        power = Subspace::span(f, m, &next);
        index += 1;
    }
    Ok(H0Algebra { basis_labels, products, radical_dim: rad.dim(), nilpotency_index: index, simples: a.vertices.clone() })
}
