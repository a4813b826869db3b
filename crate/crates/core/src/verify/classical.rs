//! Minimal projective resolutions over ungraded finite-dimensional quiver
//! algebras, computed with plain linear algebra on free modules.
//!
//! This is deliberately independent of the dg machinery: it never builds a
//! bar complex or a cone, so agreement with `ext_window` and `pd` is a real
//! cross-check rather than a tautology.

use crate::algebra::DgAlgebra;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};

/// A free right module `⊕_k e_{v_k} A` with explicit coordinates.
#[derive(Clone, Debug)]
struct Free {
    gens: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

/// Result of resolving `s = A / rad A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalResolution {
    /// `multiplicities[i][v]` is the multiplicity of `P_v` in the `i`-th term.
    pub multiplicities: Vec<Vec<usize>>,
    /// The resolution reached a zero syzygy.
    pub terminated: bool,
}

impl ClassicalResolution {
    /// `dim Ext^i(s, s)` for each computed `i`.
    pub fn ext_dims(&self) -> Vec<usize> {
        self.multiplicities.iter().map(|m| m.iter().sum()).collect()
    }

    /// Projective (= global) dimension, when the resolution terminated.
    pub fn global_dimension(&self) -> Option<usize> {
        self.terminated.then(|| self.multiplicities.len() - 1)
    }
}

pub struct ClassicalOracle<'a, F: Field> {
    alg: &'a DgAlgebra<F>,
    /// Basis indices of `e_v A`, per vertex.
    paths_from: Vec<Vec<usize>>,
    /// Position of a basis index inside `paths_from[source]`.
    local: Vec<usize>,
}

impl<'a, F: Field> ClassicalOracle<'a, F> {
    /// Requires an ungraded algebra with zero differential.
    pub fn new(alg: &'a DgAlgebra<F>) -> Result<Self> {
        if alg.arrows().iter().any(|a| a.degree != 0) {
            return Err(Error::Unsupported("classical oracle needs all arrows in degree 0".into()));
        }
        if (0..alg.dim()).any(|i| !alg.d_basis(i).is_empty()) {
            return Err(Error::Unsupported("classical oracle needs a zero differential".into()));
        }
        let mut paths_from = vec![Vec::new(); alg.vertices().len()];
        let mut local = vec![0; alg.dim()];
        for (i, p) in alg.basis().iter().enumerate() {
            local[i] = paths_from[p.source].len();
            paths_from[p.source].push(i);
        }
        Ok(ClassicalOracle { alg, paths_from, local })
    }

    fn free(&self, gens: Vec<usize>) -> Free {
        let mut offsets = Vec::with_capacity(gens.len());
        let mut dim = 0;
        for &v in &gens {
            offsets.push(dim);
            dim += self.paths_from[v].len();
        }
        Free { gens, offsets, dim }
    }

    /// `x · b` for a basis element `b` of `A`.
    fn act(&self, m: &Free, x: &[F::Elem], b: usize) -> Vec<F::Elem> {
        let f = self.alg.field();
        let mut out = vec![f.zero(); m.dim];
        for (k, &v) in m.gens.iter().enumerate() {
            for (p, &i) in self.paths_from[v].iter().enumerate() {
                let c = &x[m.offsets[k] + p];
                if f.is_zero(c) {
                    continue;
                }
                for (j, coef) in self.alg.mul_basis(i, b) {
                    f.add_mul_assign(&mut out[m.offsets[k] + self.local[*j]], c, coef);
                }
            }
        }
        out
    }

    fn act_element(&self, m: &Free, x: &[F::Elem], a: &[(usize, F::Elem)]) -> Vec<F::Elem> {
        let f = self.alg.field();
        let mut out = vec![f.zero(); m.dim];
        for (b, c) in a {
            for (o, y) in out.iter_mut().zip(self.act(m, x, *b)) {
                if !f.is_zero(&y) {
                    f.add_mul_assign(o, c, &y);
                }
            }
        }
        out
    }

    /// Resolves `s` for at most `max_steps` terms; free modules larger than
    /// `max_dim` abort with `TooLarge`.
    pub fn resolve(&self, max_steps: usize, max_dim: usize) -> Result<ClassicalResolution> {
        let f = self.alg.field();
        let nv = self.alg.vertices().len();
        let mut current = self.free((0..nv).collect());
        let radical: Vec<Vec<F::Elem>> = (0..current.dim)
            .filter(|&i| !self.alg.basis()[self.alg_index(&current, i)].is_idempotent())
            .map(|i| unit_vector(f, current.dim, i))
            .collect();
        let mut syzygy = Subspace::span(f, current.dim, &radical);
        let mut multiplicities = vec![vec![1; nv]];
        while multiplicities.len() <= max_steps {
            if syzygy.dim() == 0 {
                return Ok(ClassicalResolution { multiplicities, terminated: true });
            }
            let (gens, vectors) = self.top(&current, &syzygy);
            let next = self.free(gens);
            if next.dim > max_dim {
                return Err(Error::TooLarge(format!("free module of dimension {} in the resolution", next.dim)));
            }
            let mut counts = vec![0; nv];
            for &v in &next.gens {
                counts[v] += 1;
            }
            // columns: images of the basis of `next` in `current`
            let mut cols = Vec::with_capacity(next.dim);
            for (k, &v) in next.gens.iter().enumerate() {
                for &b in &self.paths_from[v] {
                    cols.push(self.act(&current, &vectors[k], b));
                }
            }
            let map = Matrix::from_rows(f, current.dim, &cols).transpose();
            let rank = map.rank(f);
            if rank != syzygy.dim() {
                return Err(Error::Consistency(format!(
                    "cover has image of dimension {rank}, expected {}",
                    syzygy.dim()
                )));
            }
            let kernel = map.kernel(f);
            if kernel.len() + rank != next.dim {
                return Err(Error::Consistency("rank-nullity failed in the resolution".into()));
            }
            for z in &kernel {
                let in_radical = (0..next.dim)
                    .all(|i| f.is_zero(&z[i]) || !self.alg.basis()[self.alg_index(&next, i)].is_idempotent());
                if !in_radical {
                    return Err(Error::Consistency("resolution is not minimal".into()));
                }
            }
            multiplicities.push(counts);
            syzygy = Subspace::span(f, next.dim, &kernel);
            current = next;
        }
        Ok(ClassicalResolution { multiplicities, terminated: syzygy.dim() == 0 })
    }

    fn alg_index(&self, m: &Free, coord: usize) -> usize {
        let k = m.offsets.partition_point(|&o| o <= coord) - 1;
        self.paths_from[m.gens[k]][coord - m.offsets[k]]
    }

    /// Generators of `K / K·rad`, each concentrated at one vertex.
    fn top(&self, m: &Free, k: &Subspace<F::Elem>) -> (Vec<usize>, Vec<Vec<F::Elem>>) {
        let f = self.alg.field();
        let mut rad = Vec::new();
        for x in k.basis() {
            for a in 0..self.alg.arrows().len() {
                rad.push(self.act_element(m, x, self.alg.arrow_element(a)));
            }
        }
        let mut span = Subspace::span(f, m.dim, &rad);
        let mut gens = Vec::new();
        let mut vectors = Vec::new();
        for v in 0..self.alg.vertices().len() {
            let e = self.alg.idempotent(v);
            let candidates: Vec<_> = k.basis().iter().map(|x| self.act(m, x, e)).collect();
            let chosen = span.extend_with(f, &candidates);
            if !chosen.is_empty() {
                let mut all = span.basis().to_vec();
                all.extend(chosen.iter().cloned());
                span = Subspace::span(f, m.dim, &all);
            }
            for c in chosen {
                gens.push(v);
                vectors.push(c);
            }
        }
        (gens, vectors)
    }
}

fn unit_vector<F: Field>(f: &F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::presentation::{normalize, parse_algebra};

    fn resolve(src: &str) -> ClassicalResolution {
        let a = normalize(&parse_algebra(src).unwrap(), Rationals).unwrap();
        ClassicalOracle::new(&a).unwrap().resolve(10, 2000).unwrap()
    }

    #[test]
    fn linear_quiver() {
        let r = resolve("vertices 1 2 3\narrow a: 1 -> 2 deg 0\narrow b: 2 -> 3 deg 0\n");
        assert_eq!(r.global_dimension(), Some(1));
        assert_eq!(r.ext_dims(), vec![3, 2]);
    }

    #[test]
    fn radical_square_zero() {
        let r = resolve("vertices 1 2 3\narrow a: 1 -> 2 deg 0\narrow b: 2 -> 3 deg 0\nrel a*b\n");
        assert_eq!(r.global_dimension(), Some(2));
        assert_eq!(r.ext_dims(), vec![3, 2, 1]);
    }

    #[test]
    fn dual_numbers_never_terminate() {
        let r = resolve("vertices 1\narrow x: 1 -> 1 deg 0\nrel x*x\n");
        assert!(!r.terminated);
        assert!(r.ext_dims().iter().all(|&d| d == 1));
    }
}
