//! Projective and global dimension through minimal approximation triangles.
//!
//! A module `y` with top cohomology in degree 0 is covered by a sum of
//! indecomposable projectives `M = ⊕ e_i A` mapping onto the top of `H⁰(y)`.
//! The cocone `y'` of `M -> y` sits in the triangle `y' -> M -> y`, and if the
//! top cohomology of `y'` is in degree `t'` then `pd y = pd y'[t'] + 1 - t'`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::DgAlgebra;
use crate::derived::{ext_window, ExtTable};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::sparse::SparseVec;
use crate::linalg::Subspace;
use crate::module::{DgModule, ModuleMap};

/// Default cutoff for quivers with oriented cycles.
pub const DEFAULT_CUTOFF: i64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum PdValue {
    Exact(i64),
    AtLeast(i64),
    MinusInfinity,
}

impl fmt::Display for PdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdValue::Exact(n) => write!(f, "{n}"),
            PdValue::AtLeast(n) => write!(f, ">= {n}"),
            PdValue::MinusInfinity => write!(f, "-inf"),
        }
    }
}

/// One free layer `⊕ (e_v A)^{m_v}[shift]` of the filtration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub shift: i64,
    /// `multiplicities[v]` copies of `e_v A`
    pub multiplicities: Vec<usize>,
    /// Dimension of the stage being covered (0 for a layer skipped by a degree jump).
    pub stage_dim: usize,
}

impl Layer {
    pub fn rank(&self) -> usize {
        self.multiplicities.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PdResult {
    pub value: PdValue,
    /// Layers at shifts `-t, …, n`; empty layers fill degree jumps.
    pub witness: Vec<Layer>,
    /// The shift `t` that moved the top cohomology of the input to degree 0.
    pub normalization_shift: i64,
    pub cutoff: i64,
}

/// Projective dimension of `x`, giving up once the running bound exceeds `cutoff`.
pub fn pd<F: Field>(x: &DgModule<F>, cutoff: i64) -> Result<PdResult> {
    if cutoff < 0 {
        return Err(Error::InvalidCutoff(cutoff));
    }
    let Some(t) = x.top_cohomology() else {
        return Ok(PdResult { value: PdValue::MinusInfinity, witness: Vec::new(), normalization_shift: 0, cutoff });
    };
    let alg = x.algebra().clone();
    let nv = alg.vertices().len();
    let mut offset = -t;
    let mut y = x.shift(t).minimize();
    let mut witness = Vec::new();
    loop {
        if offset > cutoff {
            return Ok(PdResult { value: PdValue::AtLeast(cutoff), witness, normalization_shift: t, cutoff });
        }
        let gens = top_generators(&y);
        let mut multiplicities = vec![0; nv];
        for (v, _) in &gens {
            multiplicities[*v] += 1;
        }
        witness.push(Layer { shift: offset, multiplicities, stage_dim: y.dim() });
        let phi = ModuleMap::from_free_generators(&y, &gens);
        let next = phi.cocone();
        let Some(top) = next.top_cohomology() else {
            let value = PdValue::Exact(offset);
            let result = PdResult { value, witness, normalization_shift: t, cutoff };
            check_against_ext(x, &result)?;
            return Ok(result);
        };
        if top > 0 {
            return Err(Error::Consistency(format!("cover at shift {offset} is not surjective on H^0")));
        }
        for k in 1..(1 - top) {
            witness.push(Layer { shift: offset + k, multiplicities: vec![0; nv], stage_dim: 0 });
        }
        offset += 1 - top;
        y = next.shift(top).minimize();
    }
}

/// Cycle representatives in `y^0` whose classes span the top `H⁰(y) / H⁰(y)·rad`.
/// Expects `y^{>0} = 0` and the top cohomology in degree 0.
fn top_generators<F: Field>(y: &DgModule<F>) -> Vec<(usize, SparseVec<F::Elem>)> {
    let f = y.field();
    let alg = y.algebra();
    let blocks = y.blocks();
    let mut out = Vec::new();
    for v in 0..alg.vertices().len() {
        let Some(idx) = blocks.get(&(0, v)) else { continue };
        let pos = |i: usize| idx.binary_search(&i).expect("element of the block");
        let mut vectors: Vec<Vec<F::Elem>> = y.boundaries(&blocks, 0, v).basis().to_vec();
        for (a, arrow) in alg.arrows().iter().enumerate() {
            if arrow.degree != 0 || arrow.target != v {
                continue;
            }
            for &m in blocks.get(&(0, arrow.source)).map_or(&[][..], Vec::as_slice) {
                let img = &y.arrow_action(a)[m];
                if !img.is_empty() {
                    let mut dense = vec![f.zero(); idx.len()];
                    for (i, c) in img {
                        dense[pos(*i)] = c.clone();
                    }
                    vectors.push(dense);
                }
            }
        }
        let r = Subspace::span(f, idx.len(), &vectors);
        for k in r.free_columns() {
            out.push((v, vec![(idx[k], f.one())]));
        }
    }
    out
}

/// Two-oracle agreement: an exact answer `n` must be the top nonzero degree of `Ext^*(x, s)` on `[min(0, n), n + 1]`.
fn check_against_ext<F: Field>(x: &DgModule<F>, r: &PdResult) -> Result<()> {
    let PdValue::Exact(n) = r.value else { return Ok(()) };
    let s = DgModule::simples_sum(x.algebra().clone());
    let e = ext_window(x, &s, n.min(0), n + 1)?;
    let top = e.nonzero_degrees().last().copied();
    if top != Some(n) {
        return Err(Error::Consistency(format!(
            "pd = {n} from the approximation chain, but the top nonzero Ext^m(x, s) with m <= {} is {}",
            n + 1,
            top.map_or("none".to_string(), |m| m.to_string())
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffProvenance {
    /// `l(d+1)` for an acyclic quiver
    AcyclicBound,
    User,
    Default,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GdResult {
    pub value: PdValue,
    pub pd_of_simples: PdResult,
    pub ext_diagnostic: ExtTable,
    pub cutoff: i64,
    pub provenance: CutoffProvenance,
    pub warnings: Vec<String>,
}

/// Chooses the cutoff for `gd`: `l(d+1)` when the quiver is acyclic, otherwise the user's or the default.
pub fn gd_cutoff<F: Field>(a: &DgAlgebra<F>, user: Option<i64>) -> (i64, CutoffProvenance, Vec<String>) {
    match (a.quiver_max_path_length(), user) {
        (Some(l), _) => (l as i64 * (a.amplitude() + 1), CutoffProvenance::AcyclicBound, Vec::new()),
        (None, Some(c)) => (c, CutoffProvenance::User, Vec::new()),
        (None, None) => (
            DEFAULT_CUTOFF,
            CutoffProvenance::Default,
            vec![format!("quiver has oriented cycles and no cutoff was given; answers above {DEFAULT_CUTOFF} are reported as lower bounds")],
        ),
    }
}

/// Global dimension as `pd` of the sum of simples.
pub fn gd<F: Field>(a: &Arc<DgAlgebra<F>>, cutoff: Option<i64>) -> Result<GdResult> {
    if let Some(c) = cutoff {
        if c < 0 {
            return Err(Error::InvalidCutoff(c));
        }
    }
    let (c, provenance, warnings) = gd_cutoff(a, cutoff);
    let s = DgModule::simples_sum(a.clone());
    let p = pd(&s, c)?;
    let ext_diagnostic = ext_window(&s, &s, 0, c + 1)?;
    if let PdValue::Exact(n) = p.value {
        let nonzero = ext_diagnostic.nonzero_degrees();
        if nonzero.iter().any(|&m| m > n) || (n > 0 && !nonzero.contains(&n)) {
            return Err(Error::Consistency(format!("gd = {n} disagrees with Ext^*(s, s) on [0, {}]", c + 1)));
        }
    }
    Ok(GdResult { value: p.value, pd_of_simples: p, ext_diagnostic, cutoff: c, provenance, warnings })
}

/// Whether `x` is perfect: `Some(true)` with an exact pd, `None` when the cutoff was reached.
pub fn per_membership<F: Field>(x: &DgModule<F>, cutoff: i64) -> Result<Option<bool>> {
    Ok(match pd(x, cutoff)?.value {
        PdValue::Exact(_) | PdValue::MinusInfinity => Some(true),
        PdValue::AtLeast(_) => None,
    })
}

/// Layer ranks indexed by shift, for comparison with `Ext^*(x, S_v)`.
pub fn layer_table(r: &PdResult) -> BTreeMap<i64, Vec<usize>> {
    r.witness.iter().map(|l| (l.shift, l.multiplicities.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::presentation::{normalize, parse_algebra};

    fn alg<F: Field>(src: &str, f: F) -> Arc<DgAlgebra<F>> {
        Arc::new(normalize(&parse_algebra(src).unwrap(), f).unwrap())
    }

    #[test]
    fn one_arrow_closed_form() {
        for d in 0..=5 {
            let a = alg(&format!("vertices 1 2\narrow a : 1 -> 2 deg {}\n", -d), Rationals);
            let g = gd(&a, None).unwrap();
            assert_eq!(g.value, PdValue::Exact(d + 1));
            assert_eq!(g.cutoff, d + 1);
            assert_eq!(g.pd_of_simples.witness.len() as i64, d + 2);
            assert_eq!(per_membership(&DgModule::simples_sum(a.clone()), 10).unwrap(), Some(true));
        }
    }

    #[test]
    fn shifted_regular_modules() {
        let a = alg("vertices 1 2 3\narrow a : 1 -> 2 deg -1\narrow b : 2 -> 3 deg 0\narrow c : 1 -> 3 deg -2\n", Rationals);
        for n in 0..=8 {
            let r = pd(&DgModule::regular(a.clone(), n), 20).unwrap();
            assert_eq!(r.value, PdValue::Exact(n));
        }
        assert_eq!(pd(&DgModule::zero(a.clone()), 3).unwrap().value, PdValue::MinusInfinity);
        assert!(matches!(pd(&DgModule::zero(a), -1), Err(Error::InvalidCutoff(-1))));
    }

    #[test]
    fn dual_numbers_never_terminate() {
        let a = alg("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n", PrimeField::new(2));
        let g = gd(&a, None).unwrap();
        assert_eq!(g.value, PdValue::AtLeast(32));
        assert_eq!(g.provenance, CutoffProvenance::Default);
        assert_eq!(g.warnings.len(), 1);
        assert!((0..=33).all(|n| g.ext_diagnostic.dims[&n] == 1));
        assert_eq!(per_membership(&DgModule::simples_sum(a), 5).unwrap(), None);
    }

    #[test]
    fn semisimple_is_zero() {
        let a = Arc::new(DgAlgebra::semisimple(Rationals, vec!["1".into(), "2".into()]));
        assert_eq!(gd(&a, None).unwrap().value, PdValue::Exact(0));
    }

    #[test]
    fn layers_match_ext_against_simples() {
        let a = alg("vertices 1 2 3 4\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 4 deg -1\narrow p : 1 -> 3 deg -1\narrow q : 3 -> 4 deg 0\narrow c : 1 -> 4 deg -2\ndiff c = a*b - p*q\n", Rationals);
        let s = DgModule::simples_sum(a.clone());
        let r = pd(&s, 20).unwrap();
        let PdValue::Exact(n) = r.value else { panic!() };
        for v in 0..4 {
            let e = ext_window(&s, &DgModule::simple(a.clone(), v), 0, n).unwrap();
            for layer in &r.witness {
                assert_eq!(layer.multiplicities[v], e.dims[&layer.shift]);
            }
        }
    }
}
