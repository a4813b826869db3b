//! Normalization: from a parsed presentation to explicit structure constants.
//!
//! The ideal is handled by plain linear algebra. Paths of length at most `N`
//! are enumerated, the span of all `u r v` (truncated at `N`) is row reduced
//! per `(source, target, degree)` block with the longest paths as leading
//! columns, and the non-pivot paths become the basis of `kQ/I`.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::ast::{AlgebraPresentation, LinearCombination};
use crate::algebra::{idempotent_label, Arrow, DgAlgebra, PathClass};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::sparse::{Accumulator, SparseVec};
use crate::linalg::Matrix;

/// Cap on the number of enumerated paths.
pub const MAX_PATHS: usize = 20_000;
/// Largest truncation length tried for cyclic quivers without `max_path_length`.
pub const MAX_AUTO_LENGTH: usize = 64;

type PathComb<E> = Vec<(Vec<usize>, E)>;

/// Normalizes a presentation over the given field.
pub fn normalize<F: Field>(p: &AlgebraPresentation, field: F) -> Result<DgAlgebra<F>> {
    let vertices = p.vertices.clone();
    let vindex: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut arrows = Vec::with_capacity(p.arrows.len());
    for a in &p.arrows {
        let source = *vindex.get(a.source.as_str()).ok_or_else(|| Error::Presentation(format!("unknown vertex {}", a.source)))?;
        let target = *vindex.get(a.target.as_str()).ok_or_else(|| Error::Presentation(format!("unknown vertex {}", a.target)))?;
        if a.degree > 0 {
            return Err(Error::Presentation(format!("arrow {} has positive degree", a.name)));
        }
        arrows.push(Arrow { name: a.name.clone(), source, target, degree: a.degree });
    }
    let aindex: HashMap<&str, usize> = arrows.iter().enumerate().map(|(i, a)| (a.name.as_str(), i)).collect();
    let convert = |c: &LinearCombination| -> Result<PathComb<F::Elem>> {
        let mut out = Vec::new();
        for t in &c.terms {
            if t.path.is_empty() {
                return Err(Error::Presentation("length-0 terms are not allowed".into()));
            }
            let path = t
                .path
                .iter()
                .map(|n| aindex.get(n.as_str()).copied().ok_or_else(|| Error::Presentation(format!("unknown arrow {n}"))))
                .collect::<Result<Vec<_>>>()?;
            let coeff = field
                .from_ratio(t.coeff.numer(), t.coeff.denom())
                .ok_or_else(|| Error::Presentation(format!("coefficient {} is undefined over {}", t.coeff.0, field.spec())))?;
            if !field.is_zero(&coeff) {
                out.push((path, coeff));
            }
        }
        Ok(out)
    };
    let mut relations = p.relations.iter().map(&convert).collect::<Result<Vec<_>>>()?;
    let mut arrow_diffs: Vec<PathComb<F::Elem>> = vec![Vec::new(); arrows.len()];
    for (name, comb) in &p.differentials {
        let a = *aindex.get(name.as_str()).ok_or_else(|| Error::Presentation(format!("unknown arrow {name}")))?;
        arrow_diffs[a] = convert(comb)?;
    }

    let longest = longest_path(vertices.len(), &arrows);
    let truncation = match (p.max_path_length, longest) {
        (Some(n), _) => {
            let paths = enumerate_paths(vertices.len(), &arrows, n)?;
            let ideal = IdealReduction::new(&field, &arrows, &paths, &relations, n);
            if let Some(bad) = paths.iter().find(|q| q.len() == n && !ideal.is_zero(&field, q)) {
                return Err(not_finite(&arrows, bad));
            }
            n
        }
        (None, Some(l)) => l,
        (None, None) => auto_truncation(&field, vertices.len(), &arrows, &relations)?,
    };
    let paths = enumerate_paths(vertices.len(), &arrows, truncation)?;
    if longest.is_none() {
        // paths of length N lie in I; keep them as generators for module validation
        for q in paths.iter().filter(|q| q.len() == truncation) {
            relations.push(vec![(q.clone(), field.one())]);
        }
    }
    let ideal = IdealReduction::new(&field, &arrows, &paths, &relations, truncation);

    // basis: vertex idempotents plus surviving paths, in deterministic order
    let mut classes: Vec<PathClass> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| PathClass { path: vec![], source: i, target: i, degree: 0, label: idempotent_label(v) })
        .collect();
    for q in &paths {
        if ideal.is_basis(q) {
            classes.push(path_class(&arrows, q));
        }
    }
    classes.sort_by(|x, y| basis_order(&arrows, x, y));
    let idempotents: Vec<usize> = (0..vertices.len())
        .map(|v| classes.iter().position(|c| c.is_idempotent() && c.source == v).expect("every vertex has an idempotent"))
        .collect();
    let position: HashMap<&[usize], usize> =
        classes.iter().enumerate().filter(|(_, c)| !c.is_idempotent()).map(|(i, c)| (c.path.as_slice(), i)).collect();
    let mut reductions: HashMap<Vec<usize>, SparseVec<F::Elem>> = HashMap::new();
    for q in &paths {
        let coords: SparseVec<F::Elem> = ideal.reduce(&field, q).into_iter().map(|(r, c)| (position[r.as_slice()], c)).collect();
        let mut coords = coords;
        coords.sort_by_key(|(i, _)| *i);
        reductions.insert(q.clone(), coords);
    }
    let reduce_comb = |comb: &[(Vec<usize>, F::Elem)]| -> SparseVec<F::Elem> {
        let mut acc = Accumulator::new();
        for (q, c) in comb {
            if let Some(r) = reductions.get(q) {
                acc.add_scaled(&field, c, r);
            }
        }
        acc.finish(&field)
    };

    let one = field.one();
    let mut products = HashMap::new();
    for (i, x) in classes.iter().enumerate() {
        for (j, y) in classes.iter().enumerate() {
            if x.target != y.source {
                continue;
            }
            let prod = if x.is_idempotent() {
                vec![(j, one.clone())]
            } else if y.is_idempotent() {
                vec![(i, one.clone())]
            } else {
                let mut q = x.path.clone();
                q.extend_from_slice(&y.path);
                reductions.get(&q).cloned().unwrap_or_default()
            };
            if !prod.is_empty() {
                products.insert((i, j), prod);
            }
        }
    }

    // d(I) ⊆ I on generators
    for (k, r) in relations.iter().enumerate() {
        let dr = leibniz(&field, &arrows, &arrow_diffs, r);
        if !reduce_comb(&dr).is_empty() {
            let shown = p.relations.get(k).map_or_else(|| "a maximal-length path".to_string(), ToString::to_string);
            return Err(Error::Presentation(format!("d(I) is not contained in I: d({shown}) does not vanish in the quotient")));
        }
    }
    let differential: Vec<SparseVec<F::Elem>> = classes
        .iter()
        .map(|c| {
            if c.is_idempotent() {
                Vec::new()
            } else {
                reduce_comb(&leibniz(&field, &arrows, &arrow_diffs, &[(c.path.clone(), one.clone())]))
            }
        })
        .collect();
    let arrow_elements: Vec<SparseVec<F::Elem>> = (0..arrows.len()).map(|a| reductions.get(&vec![a]).cloned().unwrap_or_default()).collect();
    for (a, arrow) in arrows.iter().enumerate() {
        if arrow.degree == 0 && !reduce_comb(&arrow_diffs[a]).is_empty() {
            return Err(Error::Presentation(format!("degree-0 arrow {} has a nonzero differential", arrow.name)));
        }
        let da = reduce_comb(&arrow_diffs[a]);
        let dda = crate::linalg::sparse::apply(&field, &differential, &da);
        if !dda.is_empty() {
            return Err(Error::Presentation(format!("d^2({}) != 0", arrow.name)));
        }
    }

    let algebra = DgAlgebra {
        field: field.clone(),
        vertices,
        arrows,
        basis: classes,
        idempotents,
        arrow_elements,
        products,
        differential,
        relations,
        truncation,
        quiver_max_path_length: longest,
        presentation: Some(p.clone()),
        reductions,
    };
    if !algebra.augmentation_is_nilpotent() {
        return Err(Error::Unsupported("the positive-length classes do not form a nilpotent ideal".into()));
    }
    Ok(algebra)
}

fn not_finite(arrows: &[Arrow], path: &[usize]) -> Error {
    let name = path_label(arrows, path);
    let cycle_deg0 = path.iter().all(|&a| arrows[a].degree == 0);
    if cycle_deg0 {
        Error::NotFiniteDimensional(format!("path {name} of degree 0 survives the ideal (non-nilpotent augmentation ideal)"))
    } else {
        Error::NotFiniteDimensional(format!("path {name} of maximal length is not in the ideal"))
    }
}

/// Smallest `N` such that every path of length `N` lies in the ideal.
fn auto_truncation<F: Field>(field: &F, nv: usize, arrows: &[Arrow], relations: &[PathComb<F::Elem>]) -> Result<usize> {
    let mut last_bad = None;
    for n in 1..=MAX_AUTO_LENGTH {
        let paths = match enumerate_paths(nv, arrows, n) {
            Ok(p) => p,
            Err(_) => break,
        };
        let ideal = IdealReduction::new(field, arrows, &paths, relations, n);
        match paths.iter().find(|q| q.len() == n && !ideal.is_zero(field, q)) {
            None => return Ok(n),
            Some(bad) => last_bad = Some(bad.clone()),
        }
    }
    let detail = last_bad.map(|q| path_label(arrows, &q)).unwrap_or_default();
    Err(Error::NotFiniteDimensional(format!(
        "the quiver has oriented cycles and no max_path_length bound was found; path {detail} survives"
    )))
}

/// Longest path in an acyclic quiver; `None` when there is an oriented cycle.
pub(crate) fn longest_path(nv: usize, arrows: &[Arrow]) -> Option<usize> {
    // Kahn's algorithm
    let mut indeg = vec![0usize; nv];
    for a in arrows {
        indeg[a.target] += 1;
    }
    let mut stack: Vec<usize> = (0..nv).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(nv);
    while let Some(v) = stack.pop() {
        order.push(v);
        for a in arrows.iter().filter(|a| a.source == v) {
            indeg[a.target] -= 1;
            if indeg[a.target] == 0 {
                stack.push(a.target);
            }
        }
    }
    if order.len() < nv {
        return None;
    }
    let mut dist = vec![0usize; nv];
    for &v in &order {
        for a in arrows.iter().filter(|a| a.source == v) {
            dist[a.target] = dist[a.target].max(dist[v] + 1);
        }
    }
    Some(dist.into_iter().max().unwrap_or(0))
}

/// All composable arrow paths of length `1..=n`, shortest first.
fn enumerate_paths(nv: usize, arrows: &[Arrow], n: usize) -> Result<Vec<Vec<usize>>> {
    let mut all: Vec<Vec<usize>> = (0..arrows.len()).map(|a| vec![a]).collect();
    let mut frontier = all.clone();
    let _ = nv;
    for _ in 1..n {
        let mut next = Vec::new();
        for q in &frontier {
            let end = arrows[*q.last().expect("nonempty path")].target;
            for (b, arrow) in arrows.iter().enumerate() {
                if arrow.source == end {
                    let mut r = q.clone();
                    r.push(b);
                    next.push(r);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        if all.len() > MAX_PATHS {
            return Err(Error::TooLarge(format!("more than {MAX_PATHS} paths of length <= {n}")));
        }
        frontier = next;
    }
    Ok(all)
}

fn path_label(arrows: &[Arrow], path: &[usize]) -> String {
    path.iter().map(|&a| arrows[a].name.as_str()).collect::<Vec<_>>().join("*")
}

fn path_class(arrows: &[Arrow], path: &[usize]) -> PathClass {
    PathClass {
        path: path.to_vec(),
        source: arrows[path[0]].source,
        target: arrows[*path.last().expect("nonempty path")].target,
        degree: path.iter().map(|&a| arrows[a].degree).sum(),
        label: path_label(arrows, path),
    }
}

fn name_key<'a>(arrows: &'a [Arrow], path: &[usize]) -> Vec<&'a str> {
    path.iter().map(|&a| arrows[a].name.as_str()).collect()
}

fn basis_order(arrows: &[Arrow], x: &PathClass, y: &PathClass) -> Ordering {
    (x.source, x.target, -x.degree, x.path.len())
        .cmp(&(y.source, y.target, -y.degree, y.path.len()))
        .then_with(|| name_key(arrows, &x.path).cmp(&name_key(arrows, &y.path)))
}

/// Row-reduced spans of the truncated ideal, one per `(source, target, degree)` block.
struct IdealReduction<E> {
    /// path -> (block, column)
    location: HashMap<Vec<usize>, (usize, usize)>,
    /// block columns, longest and lexicographically largest first
    columns: Vec<Vec<Vec<usize>>>,
    /// reduced rows and their pivots, per block
    rows: Vec<Vec<(usize, Vec<E>)>>,
}

impl<E: Clone + PartialEq> IdealReduction<E> {
    fn new<F: Field<Elem = E>>(f: &F, arrows: &[Arrow], paths: &[Vec<usize>], relations: &[PathComb<E>], n: usize) -> Self {
        let mut block_of: HashMap<(usize, usize, i64), usize> = HashMap::new();
        let mut columns: Vec<Vec<Vec<usize>>> = Vec::new();
        for q in paths {
            let c = path_class(arrows, q);
            let key = (c.source, c.target, c.degree);
            let b = *block_of.entry(key).or_insert_with(|| {
                columns.push(Vec::new());
                columns.len() - 1
            });
            columns[b].push(q.clone());
        }
        for cols in &mut columns {
            cols.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| name_key(arrows, y).cmp(&name_key(arrows, x))));
        }
        let mut location = HashMap::new();
        for (b, cols) in columns.iter().enumerate() {
            for (k, q) in cols.iter().enumerate() {
                location.insert(q.clone(), (b, k));
            }
        }
        // prefixes u (ending at a vertex) and suffixes v (starting at a vertex), with the empty path
        let mut ending: Vec<Vec<&[usize]>> = vec![Vec::new(); arrows.iter().map(|a| a.source.max(a.target) + 1).max().unwrap_or(0)];
        let mut starting = ending.clone();
        for q in paths {
            ending[arrows[*q.last().expect("nonempty")].target].push(q);
            starting[arrows[q[0]].source].push(q);
        }
        let mut generators: Vec<Vec<SparseVec<E>>> = vec![Vec::new(); columns.len()];
        for r in relations {
            if r.is_empty() {
                continue;
            }
            let first = &r[0].0;
            let (src, tgt) = (arrows[first[0]].source, arrows[*first.last().expect("nonempty")].target);
            let min_len = r.iter().map(|(q, _)| q.len()).min().unwrap_or(0);
            if min_len > n {
                continue;
            }
            let empty: &[usize] = &[];
            let us: Vec<&[usize]> = std::iter::once(empty).chain(ending.get(src).into_iter().flatten().copied()).collect();
            let vs: Vec<&[usize]> = std::iter::once(empty).chain(starting.get(tgt).into_iter().flatten().copied()).collect();
            for u in &us {
                if u.len() + min_len > n {
                    continue;
                }
                for v in &vs {
                    if u.len() + min_len + v.len() > n {
                        continue;
                    }
                    let mut acc = Accumulator::new();
                    let mut block = None;
                    for (q, c) in r {
                        let mut w = u.to_vec();
                        w.extend_from_slice(q);
                        w.extend_from_slice(v);
                        if let Some(&(b, k)) = location.get(&w) {
                            block = Some(b);
                            acc.add(f, k, c);
                        }
                    }
                    let vec = acc.finish(f);
                    if let (Some(b), false) = (block, vec.is_empty()) {
                        generators[b].push(vec);
                    }
                }
            }
        }
        let rows = generators
            .iter()
            .zip(&columns)
            .map(|(gens, cols)| {
                if gens.is_empty() {
                    return Vec::new();
                }
                let mut m = Matrix::from_sparse_rows(f, cols.len(), gens);
                let pivots = m.rref(f);
                pivots.iter().enumerate().map(|(r, &p)| (p, m.row(r).to_vec())).collect()
            })
            .collect();
        IdealReduction { location, columns, rows }
    }

    fn pivot_row(&self, q: &[usize]) -> Option<&Vec<E>> {
        let (b, k) = self.location[q];
        self.rows[b].iter().find(|(p, _)| *p == k).map(|(_, r)| r)
    }

    /// The path is a leading term of the ideal and reduces to zero.
    fn is_zero<F: Field<Elem = E>>(&self, f: &F, q: &[usize]) -> bool {
        let (_, k) = self.location[q];
        self.pivot_row(q).is_some_and(|row| row.iter().enumerate().all(|(j, c)| j == k || f.is_zero(c)))
    }

    fn is_basis(&self, q: &[usize]) -> bool {
        self.pivot_row(q).is_none()
    }

    /// Normal form of a path as a combination of basis paths.
    fn reduce<F: Field<Elem = E>>(&self, f: &F, q: &[usize]) -> Vec<(Vec<usize>, E)> {
        let (b, k) = self.location[q];
        match self.pivot_row(q) {
            None => vec![(q.to_vec(), f.one())],
            Some(row) => row
                .iter()
                .enumerate()
                .filter(|(j, c)| *j != k && !f.is_zero(c))
                .map(|(j, c)| (self.columns[b][j].clone(), f.neg(c)))
                .collect(),
        }
    }
}

/// Extends `d` from arrows to paths by the graded Leibniz rule.
fn leibniz<F: Field>(f: &F, arrows: &[Arrow], diffs: &[PathComb<F::Elem>], comb: &[(Vec<usize>, F::Elem)]) -> PathComb<F::Elem> {
    let mut out = Vec::new();
    for (q, c) in comb {
        let mut prefix_degree = 0i64;
        for (i, &a) in q.iter().enumerate() {
            let negate = prefix_degree.rem_euclid(2) == 1;
            for (dp, dc) in &diffs[a] {
                let mut w = q[..i].to_vec();
                w.extend_from_slice(dp);
                w.extend_from_slice(&q[i + 1..]);
                out.push((w, f.signed(&f.mul(c, dc), negate)));
            }
            prefix_degree += arrows[a].degree;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::presentation::parse_algebra;

    fn alg(src: &str) -> Result<DgAlgebra<Rationals>> {
        normalize(&parse_algebra(src).unwrap(), Rationals)
    }

    #[test]
    fn one_arrow() {
        let a = alg("vertices 1 2; arrow a: 1 -> 2 deg -3").unwrap();
        assert_eq!(a.dim(), 3);
        let degrees: Vec<i64> = a.basis().iter().map(|b| b.degree).collect();
        assert_eq!(degrees, vec![0, -3, 0]);
        assert_eq!(a.amplitude(), 3);
        assert_eq!(a.quiver_max_path_length(), Some(1));
    }

    #[test]
    fn dual_numbers() {
        let a = alg("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n").unwrap();
        assert_eq!(a.dim(), 2);
        let x = a.arrow_element(0).clone();
        assert!(a.mul(&x, &x).is_empty());
        assert!(!a.quiver_is_acyclic());
        assert!(a.check_associative() && a.check_idempotents() && a.check_leibniz());
    }

    #[test]
    fn free_loop_is_infinite() {
        let e = alg("vertices 1\narrow x : 1 -> 1 deg 0\n").unwrap_err();
        assert!(matches!(e, Error::NotFiniteDimensional(_)), "{e}");
    }

    #[test]
    fn explicit_bound_must_kill_long_paths() {
        let e = alg("vertices 1\narrow x : 1 -> 1 deg -1\nmax_path_length 3\n").unwrap_err();
        assert!(matches!(e, Error::NotFiniteDimensional(_)));
        let a = alg("vertices 1\narrow x : 1 -> 1 deg -1\nrel x*x*x\nmax_path_length 3\n").unwrap();
        assert_eq!(a.dim(), 3);
    }

    #[test]
    fn commutative_square_with_homotopy() {
        // c is a homotopy between the two paths of the square
        let src = "vertices 1 2 3 4\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 4 deg 0\narrow p : 1 -> 3 deg 0\narrow q : 3 -> 4 deg 0\narrow c : 1 -> 4 deg -1\ndiff c = a*b - p*q\n";
        let a = alg(src).unwrap();
        assert_eq!(a.dim(), 4 + 5 + 2);
        assert!(a.check_associative() && a.check_idempotents() && a.check_leibniz());
        let c = a.arrow_index("c").unwrap();
        assert_eq!(a.d(a.arrow_element(c)).len(), 2);
    }

    #[test]
    fn relation_reduces_parallel_path() {
        let src = "vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg 0\narrow c : 1 -> 3 deg 0\nrel a*b - 2*c\n";
        let a = alg(src).unwrap();
        assert_eq!(a.dim(), 6);
        let ab = a.reduce_path(&[0, 1]);
        assert_eq!(ab, vec![(a.basis().iter().position(|b| b.label == "c").unwrap(), num_rational::BigRational::from_integer(2.into()))]);
    }

    #[test]
    fn rejects_bad_differentials() {
        // d(c) = a*b is not a cycle when d(b) = e
        let src = "vertices 1 2 3\narrow a : 1 -> 2 deg -1\narrow b : 2 -> 3 deg -1\narrow e : 2 -> 3 deg 0\narrow c : 1 -> 3 deg -3\ndiff b = e\n";
        assert!(alg(src).is_ok());
        let src = "vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg -1\narrow e : 2 -> 3 deg 0\narrow c : 1 -> 3 deg -2\ndiff b = e\ndiff c = a*b\n";
        let e = alg(src).unwrap_err();
        assert!(e.to_string().contains("d^2"), "{e}");
        let src = "vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg -1\narrow e : 2 -> 3 deg 0\ndiff b = e\nrel a*b\n";
        let e = alg(src).unwrap_err();
        assert!(e.to_string().contains("d(I)"), "{e}");
    }

    #[test]
    fn prime_field_coefficients() {
        let p = parse_algebra("vertices 1 2\narrow a : 1 -> 2 deg 0\narrow b : 1 -> 2 deg 0\nrel a - 1/7*b\n").unwrap();
        assert!(normalize(&p, PrimeField::new(7)).is_err());
        assert_eq!(normalize(&p, PrimeField::new(5)).unwrap().dim(), 3);
    }
}
