//! Graded vector spaces, graded maps and cochain complexes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;

use super::matrix::{Matrix, Subspace};

/// Finite-dimensional Z-graded space with ordered basis labels per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedVectorSpace {
    components: BTreeMap<i64, Vec<String>>,
}

impl GradedVectorSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty components are dropped so the support stays honest.
    pub fn from_components(components: BTreeMap<i64, Vec<String>>) -> Self {
        GradedVectorSpace { components: components.into_iter().filter(|(_, v)| !v.is_empty()).collect() }
    }

    /// A space with `dim` anonymous basis vectors `"<prefix><i>"` in `degree`.
    pub fn with_dim(degree: i64, dim: usize, prefix: &str) -> Self {
        let mut c = BTreeMap::new();
        c.insert(degree, (0..dim).map(|i| format!("{prefix}{i}")).collect());
        Self::from_components(c)
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.components.get(&degree).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    pub fn labels(&self, degree: i64) -> &[String] {
        self.components.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.components.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.components.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.components.keys().next_back().copied()
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.components.iter().map(|(&d, v)| (d, v.len())).collect()
    }
}

/// A map raising degree by `shift`, stored as one matrix per source degree.
#[derive(Clone, Debug)]
pub struct GradedLinearMap<E> {
    pub source: GradedVectorSpace,
    pub target: GradedVectorSpace,
    pub shift: i64,
    blocks: BTreeMap<i64, Matrix<E>>,
}

/// Per-degree output of [`GradedLinearMap::rank_kernel_image`].
#[derive(Clone, Debug)]
pub struct BlockDecomposition<E> {
    pub rank: usize,
    pub kernel: Vec<Vec<E>>,
    pub image: Vec<Vec<E>>,
}

impl<E: Clone + PartialEq> GradedLinearMap<E> {
    /// Missing blocks are zero; present blocks must be `dim target(n+shift) x dim source(n)`.
    pub fn new(
        source: GradedVectorSpace,
        target: GradedVectorSpace,
        shift: i64,
        blocks: BTreeMap<i64, Matrix<E>>,
    ) -> Result<Self> {
        for (&n, m) in &blocks {
            let (r, c) = (target.dim(n + shift), source.dim(n));
            if m.rows() != r || m.cols() != c {
                return Err(Error::DimensionMismatch(format!(
                    "block at degree {n} is {}x{}, expected {r}x{c}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(GradedLinearMap { source, target, shift, blocks })
    }

    pub fn zero(source: GradedVectorSpace, target: GradedVectorSpace, shift: i64) -> Self {
        GradedLinearMap { source, target, shift, blocks: BTreeMap::new() }
    }

    /// The block at source degree `n`, materialising zeros when absent.
    pub fn block<F: Field<Elem = E>>(&self, f: &F, n: i64) -> Matrix<E> {
        match self.blocks.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(f, self.target.dim(n + self.shift), self.source.dim(n)),
        }
    }

    pub fn block_ref(&self, n: i64) -> Option<&Matrix<E>> {
        self.blocks.get(&n)
    }

    /// Rank, kernel basis and image basis for every degree of the source.
    pub fn rank_kernel_image<F: Field<Elem = E>>(&self, f: &F) -> BTreeMap<i64, BlockDecomposition<E>> {
        self.source
            .support()
            .map(|n| {
                let m = self.block(f, n);
                let kernel = m.kernel(f);
                let cols: Vec<Vec<E>> = (0..m.cols()).map(|c| m.column(c)).collect();
                let image = Subspace::span(f, m.rows(), &cols).basis().to_vec();
                (n, BlockDecomposition { rank: image.len(), kernel, image })
            })
            .collect()
    }

    /// `self ∘ other`
    pub fn compose<F: Field<Elem = E>>(&self, f: &F, other: &GradedLinearMap<E>) -> Result<GradedLinearMap<E>> {
        if other.target != self.source {
            return Err(Error::DimensionMismatch("composition of incompatible graded maps".into()));
        }
        let mut blocks = BTreeMap::new();
        for n in other.source.support() {
            let mid = n + other.shift;
            if self.source.dim(mid) == 0 {
                continue;
            }
            blocks.insert(n, self.block(f, mid).mul(f, &other.block(f, n)));
        }
        GradedLinearMap::new(other.source.clone(), self.target.clone(), self.shift + other.shift, blocks)
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.blocks.values().all(|m| m.is_zero(f))
    }
}

/// Graded space with a degree +1 differential.
#[derive(Clone, Debug)]
pub struct CochainComplex<E> {
    pub underlying: GradedVectorSpace,
    pub differential: GradedLinearMap<E>,
}

/// `H^n` of a complex: its dimension and representative cycles.
#[derive(Clone, Debug)]
pub struct CohomologyGroup<E> {
    pub degree: i64,
    pub representatives: Vec<Vec<E>>,
}

impl<E> CohomologyGroup<E> {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }
}

impl<E: Clone + PartialEq> CochainComplex<E> {
    pub fn new(underlying: GradedVectorSpace, differential: GradedLinearMap<E>) -> Result<Self> {
        if differential.shift != 1 {
            return Err(Error::InvalidComplex(format!("differential has degree {}", differential.shift)));
        }
        if differential.source != underlying || differential.target != underlying {
            return Err(Error::InvalidComplex("differential does not act on the underlying space".into()));
        }
        Ok(CochainComplex { underlying, differential })
    }

    /// `d^{n+1} d^n = 0`
    pub fn squares_to_zero_at<F: Field<Elem = E>>(&self, f: &F, n: i64) -> bool {
        if self.underlying.dim(n) == 0 || self.underlying.dim(n + 2) == 0 || self.underlying.dim(n + 1) == 0 {
            return true;
        }
        let d0 = self.differential.block(f, n);
        let d1 = self.differential.block(f, n + 1);
        d1.mul(f, &d0).is_zero(f)
    }

    pub fn squares_to_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.underlying.support().all(|n| self.squares_to_zero_at(f, n))
    }

    fn rank_at<F: Field<Elem = E>>(&self, f: &F, n: i64) -> usize {
        if self.underlying.dim(n) == 0 || self.underlying.dim(n + 1) == 0 {
            return 0;
        }
        match self.differential.block_ref(n) {
            Some(m) => m.rank(f),
            None => 0,
        }
    }

    /// `H^n` with a basis of representative cycles complementing the boundaries.
    pub fn cohomology<F: Field<Elem = E>>(&self, f: &F, n: i64) -> Result<CohomologyGroup<E>> {
        if !self.squares_to_zero_at(f, n - 1) {
            return Err(Error::InvalidComplex(format!("d^2 != 0 starting in degree {}", n - 1)));
        }
        if !self.squares_to_zero_at(f, n) {
            return Err(Error::InvalidComplex(format!("d^2 != 0 starting in degree {n}")));
        }
        let dim = self.underlying.dim(n);
        if dim == 0 {
            return Ok(CohomologyGroup { degree: n, representatives: Vec::new() });
        }
        let cycles = self.differential.block(f, n).kernel(f);
        let incoming = self.differential.block(f, n - 1);
        let boundaries: Vec<Vec<E>> = (0..incoming.cols()).map(|c| incoming.column(c)).collect();
        let boundary_space = Subspace::span(f, dim, &boundaries);
        let representatives = boundary_space.extend_with(f, &cycles);
        Ok(CohomologyGroup { degree: n, representatives })
    }

    /// `dim H^n` for every degree of the support (zeros included).
    pub fn cohomology_dims<F: Field<Elem = E>>(&self, f: &F) -> BTreeMap<i64, usize> {
        let ranks: BTreeMap<i64, usize> = self.underlying.support().map(|n| (n, self.rank_at(f, n))).collect();
        self.underlying
            .support()
            .map(|n| {
                let out = ranks.get(&n).copied().unwrap_or(0);
                let inc = ranks.get(&(n - 1)).copied().unwrap_or(0);
                (n, self.underlying.dim(n) - out - inc)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    fn complex(dims: &[(i64, usize)], blocks: Vec<(i64, Matrix<num_rational::BigRational>)>) -> CochainComplex<num_rational::BigRational> {
        let mut comps = BTreeMap::new();
        for &(d, n) in dims {
            comps.insert(d, (0..n).map(|i| format!("v{d}_{i}")).collect());
        }
        let space = GradedVectorSpace::from_components(comps);
        let map = GradedLinearMap::new(space.clone(), space.clone(), 1, blocks.into_iter().collect()).unwrap();
        CochainComplex::new(space, map).unwrap()
    }

    #[test]
    fn zero_map_has_full_kernel() {
        let q = Rationals;
        let space = GradedVectorSpace::with_dim(0, 3, "x");
        let m = GradedLinearMap::<num_rational::BigRational>::zero(space.clone(), space, 0);
        let rki = m.rank_kernel_image(&q);
        assert_eq!(rki[&0].rank, 0);
        assert_eq!(rki[&0].kernel.len(), 3);
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let q = Rationals;
        let space = GradedVectorSpace::with_dim(0, 2, "x");
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::identity(&q, 2));
        let m = GradedLinearMap::new(space.clone(), space, 0, blocks).unwrap();
        let rki = m.rank_kernel_image(&q);
        assert_eq!(rki[&0].rank, 2);
        assert!(rki[&0].kernel.is_empty());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let q = Rationals;
        let space = GradedVectorSpace::with_dim(0, 2, "x");
        let mut blocks = BTreeMap::new();
        blocks.insert(0, Matrix::identity(&q, 3));
        assert!(matches!(GradedLinearMap::new(space.clone(), space, 0, blocks), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn exact_complex_has_no_cohomology() {
        let q = Rationals;
        let c = complex(&[(0, 1), (1, 1)], vec![(0, Matrix::identity(&q, 1))]);
        for n in -1..=2 {
            assert_eq!(c.cohomology(&q, n).unwrap().dim(), 0);
        }
    }

    #[test]
    fn zero_differential_returns_underlying_space() {
        let q = Rationals;
        let c = complex(&[(-1, 1), (0, 2), (1, 1)], vec![]);
        let dims: Vec<usize> = (-1..=1).map(|n| c.cohomology(&q, n).unwrap().dim()).collect();
        assert_eq!(dims, vec![1, 2, 1]);
    }

    #[test]
    fn zero_map_between_lines() {
        let q = Rationals;
        let c = complex(&[(0, 1), (1, 1)], vec![(0, Matrix::zeros(&q, 1, 1))]);
        assert_eq!(c.cohomology(&q, 0).unwrap().dim(), 1);
        assert_eq!(c.cohomology(&q, 1).unwrap().dim(), 1);
    }

    #[test]
    fn non_complex_is_rejected() {
        let q = Rationals;
        let c = complex(&[(0, 1), (1, 1), (2, 1)], vec![(0, Matrix::identity(&q, 1)), (1, Matrix::identity(&q, 1))]);
        assert!(matches!(c.cohomology(&q, 1), Err(Error::InvalidComplex(_))));
    }
}
