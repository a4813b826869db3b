//! Seeded random dg bound quiver algebras and modules.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::DgAlgebra;
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::module::{hom_space, DgModule, ModuleMap};
use crate::presentation::{normalize, parse_algebra, AlgebraPresentation, ArrowDecl, Coefficient, LinearCombination, Term};

/// Parameters of the random instance generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandomSpec {
    pub seed: u64,
    /// At most 5.
    pub max_vertices: usize,
    /// At most 6.
    pub max_arrows: usize,
    /// Arrow degrees are drawn from `[-d_max, 0]`; at most 3.
    pub d_max: i64,
    /// Chance (percent) of adding a relation per candidate block.
    pub relation_density: u8,
    /// Chance (percent) of proposing a differential per arrow.
    pub differential_density: u8,
    pub acyclic: bool,
    /// All arrows in degree 0 with zero differential.
    pub trivial_grading: bool,
    pub field: FieldSpec,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            seed: 0,
            max_vertices: 5,
            max_arrows: 6,
            d_max: 3,
            relation_density: 40,
            differential_density: 60,
            acyclic: true,
            trivial_grading: false,
            field: FieldSpec::Rational,
        }
    }
}

impl RandomSpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_vertices == 0 || self.max_vertices > 5 || self.max_arrows > 6 || !(0..=3).contains(&self.d_max) {
            return Err(Error::Presentation("random spec out of range (vertices 1..=5, arrows <= 6, d_max <= 3)".into()));
        }
        if self.relation_density > 100 || self.differential_density > 100 {
            return Err(Error::Presentation("densities are percentages".into()));
        }
        Ok(())
    }

    /// The generator for one trial; independent of how many other trials run.
    pub fn rng(&self, trial: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9))
    }
}

const ARROW_NAMES: [&str; 6] = ["a", "b", "c", "e", "f", "g"];
const MAX_ATTEMPTS: usize = 200;

fn paths_up_to(arrows: &[ArrowDecl], max_len: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0..arrows.len()).map(|a| vec![a]).collect();
    let mut frontier = all.clone();
    for _ in 1..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            let end = &arrows[*p.last().expect("nonempty")].target;
            for (b, arrow) in arrows.iter().enumerate() {
                if &arrow.source == end {
                    let mut q = p.clone();
                    q.push(b);
                    next.push(q);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Coefficient {
    let c = *[1i64, 1, -1, 2, -2, 3].choose(rng).expect("nonempty");
    Coefficient::from_i64(c)
}

fn combination(rng: &mut ChaCha8Rng, arrows: &[ArrowDecl], candidates: &[&Vec<usize>], max_terms: usize) -> LinearCombination {
    let k = rng.gen_range(1..=max_terms.min(candidates.len()));
    let mut picked: Vec<&Vec<usize>> = candidates.choose_multiple(rng, k).copied().collect();
    picked.sort();
    LinearCombination {
        terms: picked
            .into_iter()
            .map(|p| Term { coeff: random_coeff(rng), path: p.iter().map(|&a| arrows[a].name.clone()).collect() })
            .collect(),
    }
}

fn endpoints(arrows: &[ArrowDecl], p: &[usize]) -> (String, String, i64) {
    (arrows[p[0]].source.clone(), arrows[*p.last().expect("nonempty")].target.clone(), p.iter().map(|&a| arrows[a].degree).sum())
}

/// A random presentation that normalizes over `field`, with its normalized algebra.
pub fn random_algebra<F: Field>(spec: &RandomSpec, trial: u64, field: F) -> Result<(AlgebraPresentation, Arc<DgAlgebra<F>>)> {
    spec.validate()?;
    let mut rng = spec.rng(trial);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(found) = attempt(spec, &mut rng, &field)? {
            return Ok(found);
        }
    }
    Err(Error::Consistency(format!("no valid random algebra after {MAX_ATTEMPTS} attempts")))
}

fn attempt<F: Field>(spec: &RandomSpec, rng: &mut ChaCha8Rng, field: &F) -> Result<Option<(AlgebraPresentation, Arc<DgAlgebra<F>>)>> {
    let nv = rng.gen_range(1..=spec.max_vertices);
    let vertices: Vec<String> = (1..=nv).map(|i| i.to_string()).collect();
    let na = if spec.acyclic && nv == 1 { 0 } else { rng.gen_range(0..=spec.max_arrows) };
    let mut arrows = Vec::new();
    for name in ARROW_NAMES.iter().take(na) {
        let (s, t) = if spec.acyclic {
            let s = rng.gen_range(0..nv - 1);
            (s, rng.gen_range(s + 1..nv))
        } else {
            (rng.gen_range(0..nv), rng.gen_range(0..nv))
        };
        let degree = if spec.trivial_grading { 0 } else { -rng.gen_range(0..=spec.d_max) };
        arrows.push(ArrowDecl { name: name.to_string(), source: vertices[s].clone(), target: vertices[t].clone(), degree });
    }
    let max_path_length = if spec.acyclic { None } else { Some(rng.gen_range(2..=3usize)) };
    let bound = max_path_length.unwrap_or(nv);
    let paths = paths_up_to(&arrows, bound);
    // relations among parallel paths of length >= 2, grouped by endpoints and degree
    let mut groups: BTreeMap<(String, String, i64), Vec<&Vec<usize>>> = BTreeMap::new();
    for p in paths.iter().filter(|p| p.len() >= 2 && max_path_length.is_none_or(|n| p.len() < n)) {
        groups.entry(endpoints(&arrows, p)).or_default().push(p);
    }
    let mut relations = Vec::new();
    for cands in groups.values() {
        if relations.len() < 3 && rng.gen_range(0..100) < spec.relation_density {
            relations.push(combination(rng, &arrows, cands, 2));
        }
    }
    if let Some(n) = max_path_length {
        for p in paths.iter().filter(|p| p.len() == n) {
            relations.push(LinearCombination { terms: vec![Term { coeff: Coefficient::one(), path: p.iter().map(|&a| arrows[a].name.clone()).collect() }] });
        }
    }
    let mut pres = AlgebraPresentation { field: spec.field, vertices, arrows: arrows.clone(), relations, differentials: Vec::new(), max_path_length };
    let base = match normalize(&pres, field.clone()) {
        Ok(a) => a,
        Err(Error::TooLarge(_)) | Err(Error::NotFiniteDimensional(_)) | Err(Error::Unsupported(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut algebra = base;
    if !spec.trivial_grading {
        for (k, arrow) in arrows.iter().enumerate() {
            if arrow.degree >= 0 || rng.gen_range(0..100) >= spec.differential_density {
                continue;
            }
            let target = (arrow.source.clone(), arrow.target.clone(), arrow.degree + 1);
            let cands: Vec<&Vec<usize>> = paths.iter().filter(|p| p.as_slice() != [k] && endpoints(&arrows, p) == target).collect();
            if cands.is_empty() {
                continue;
            }
            let d = combination(rng, &arrows, &cands, 2);
            pres.differentials.push((arrow.name.clone(), d));
            match normalize(&pres, field.clone()) {
                Ok(a) => algebra = a,
                Err(_) => {
                    pres.differentials.pop();
                }
            }
        }
    }
    // serialization round trip
    let text = pres.to_string();
    let reparsed = parse_algebra(&text).map_err(|e| Error::Consistency(format!("generated presentation does not reparse: {e}\n{text}")))?;
    if reparsed != pres {
        return Err(Error::Consistency(format!("presentation changed under print/parse:\n{text}")));
    }
    let again = normalize(&reparsed, field.clone())?;
    if again.dim() != algebra.dim() {
        return Err(Error::Consistency("normalization is not deterministic".into()));
    }
    Ok(Some((pres, Arc::new(algebra))))
}

/// A random finite-dimensional module: a sum of shifted free, simple and truncated free modules.
pub fn random_module<F: Field>(a: &Arc<DgAlgebra<F>>, rng: &mut ChaCha8Rng, max_shift: i64) -> DgModule<F> {
    let nv = a.vertices().len();
    let parts = rng.gen_range(1..=2);
    let mut out = Vec::new();
    for _ in 0..parts {
        let v = rng.gen_range(0..nv);
        let k = rng.gen_range(0..=max_shift);
        let m = match rng.gen_range(0..3) {
            0 => DgModule::free(a.clone(), v, k),
            1 => DgModule::simple(a.clone(), v).shift(k),
            _ => DgModule::truncated_free(a.clone(), v, rng.gen_range(1..=2)).shift(k),
        };
        out.push(m);
    }
    DgModule::direct_sum_of(a.clone(), &out)
}

/// A random chain map `x -> y`: a combination of a basis of the Hom space with small coefficients.
pub fn random_map<F: Field>(x: &DgModule<F>, y: &DgModule<F>, rng: &mut ChaCha8Rng) -> Result<ModuleMap<F>> {
    let basis = hom_space(x, y)?;
    let f = x.field().clone();
    let mut acc: Vec<crate::linalg::SparseVec<F::Elem>> = vec![Vec::new(); x.dim()];
    for m in &basis {
        let c = f.from_i64(rng.gen_range(-2..=2));
        for (i, img) in m.images.iter().enumerate() {
            acc[i] = crate::linalg::sparse::axpy(&f, &acc[i], &c, img);
        }
    }
    ModuleMap::new(x.clone(), y.clone(), acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn generated_algebras_validate_and_are_deterministic() {
        for acyclic in [true, false] {
            let spec = RandomSpec { seed: 7, acyclic, ..RandomSpec::default() };
            for trial in 0..25 {
                let (p, a) = random_algebra(&spec, trial, Rationals).unwrap();
                let (q, _) = random_algebra(&spec, trial, Rationals).unwrap();
                assert_eq!(p, q);
                assert!(a.check_associative() && a.check_idempotents() && a.check_leibniz());
                assert_eq!(a.quiver_is_acyclic(), acyclic || a.arrows().is_empty() || a.quiver_is_acyclic());
            }
        }
    }

    #[test]
    fn some_differentials_survive() {
        let spec = RandomSpec { seed: 3, ..RandomSpec::default() };
        let with_d = (0..40).filter(|&t| !random_algebra(&spec, t, PrimeField::new(101)).unwrap().0.differentials.is_empty()).count();
        assert!(with_d > 0);
    }

    #[test]
    fn random_maps_are_chain_maps() {
        let spec = RandomSpec { seed: 11, ..RandomSpec::default() };
        for trial in 0..10 {
            let (_, a) = random_algebra(&spec, trial, Rationals).unwrap();
            let mut rng = spec.rng(1000 + trial);
            let x = random_module(&a, &mut rng, 2);
            let y = random_module(&a, &mut rng, 2);
            x.validate().unwrap();
            random_map(&x, &y, &mut rng).unwrap().cone().validate().unwrap();
        }
    }
}
