//! The property checks. Each trial is independent, trials run in parallel and
//! the report is assembled in trial order, so reports are reproducible from
//! `(spec, trials)` alone.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{AlgebraMap, DgAlgebra};
use crate::bimodule::DgBimodule;
use crate::derived::{ext_window, tensor_module};
use crate::dimension::{gd, gd_cutoff, pd, per_membership, PdValue};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::module::{DgModule, ModuleMap};

use super::classical::ClassicalOracle;
use super::random::{random_algebra, random_map, random_module, RandomSpec};

/// Window of the classical regression.
pub const CLASSICAL_WINDOW: i64 = 12;
/// Free modules larger than this make a classical trial inconclusive.
pub const CLASSICAL_MAX_DIM: usize = 600;
/// Tensor powers tried before the nilpotency of `T_h` is declared uncertified.
pub const MAX_TENSOR_POWER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub outcome: Outcome,
    /// Computed dimensions and bounds.
    pub data: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A failed trial, replayable from the embedded presentation and seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub trial: u64,
    pub seed: u64,
    pub message: String,
    pub presentation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub spec: RandomSpec,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub inconclusive: u64,
    pub failures: Vec<Failure>,
    pub per_trial: Vec<TrialRecord>,
}

impl CheckReport {
    pub fn conclusive(&self) -> u64 {
        self.passed + self.failed
    }

    pub fn is_success(&self) -> bool {
        self.failed == 0
    }
}

/// What one trial produced before it is filed into the report.
struct TrialResult {
    outcome: Outcome,
    data: BTreeMap<String, Value>,
    note: Option<String>,
    presentation: String,
}

impl TrialResult {
    fn new(presentation: String) -> Self {
        TrialResult { outcome: Outcome::Pass, data: BTreeMap::new(), note: None, presentation }
    }

    fn set(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
    }

    /// Records a violated assertion; the first message wins.
    fn require(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok && self.outcome != Outcome::Fail {
            self.outcome = Outcome::Fail;
            self.note = Some(message());
        }
    }

    fn inconclusive(mut self, why: impl Into<String>) -> Self {
        if self.outcome == Outcome::Pass {
            self.outcome = Outcome::Inconclusive;
            self.note = Some(why.into());
        }
        self
    }
}

fn run_trials<F, T>(name: &str, spec: &RandomSpec, trials: u64, field: F, trial: T) -> Result<CheckReport>
where
    F: Field,
    T: Fn(u64, &F, &mut String) -> Result<TrialResult> + Sync,
{
    spec.validate()?;
    // the presentation text survives a trial that errors out part way
    let results: Vec<(Result<TrialResult>, String)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut text = String::new();
            (trial(i, &field, &mut text), text)
        })
        .collect();
    let mut report = CheckReport {
        check: name.to_string(),
        spec: spec.clone(),
        trials,
        passed: 0,
        failed: 0,
        inconclusive: 0,
        failures: Vec::new(),
        per_trial: Vec::new(),
    };
    for (i, (r, text)) in results.into_iter().enumerate() {
        let i = i as u64;
        let r = match r {
            Ok(r) => r,
            // a disagreement between independent computations aborts the whole check
            Err(e @ Error::Consistency(_)) => return Err(e),
            Err(Error::TooLarge(msg)) => TrialResult::new(text).inconclusive(format!("size limit: {msg}")),
            Err(e) => {
                let mut r = TrialResult::new(text);
                r.require(false, || format!("error: {e}"));
                r
            }
        };
        match r.outcome {
            Outcome::Pass => report.passed += 1,
            Outcome::Inconclusive => report.inconclusive += 1,
            Outcome::Fail => {
                report.failed += 1;
                report.failures.push(Failure {
                    trial: i,
                    seed: spec.seed,
                    message: r.note.clone().unwrap_or_default(),
                    presentation: r.presentation.clone(),
                });
            }
        }
        report.per_trial.push(TrialRecord { trial: i, outcome: r.outcome, data: r.data, note: r.note });
    }
    Ok(report)
}

/// A second stream of the trial generator, for modules and maps.
fn module_rng(spec: &RandomSpec, trial: u64) -> ChaCha8Rng {
    let mut rng = spec.rng(trial);
    rng.set_stream(1);
    rng
}

/// Projective dimension with `-inf` for zero objects, ordered accordingly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
enum Pd {
    MinusInfinity,
    Finite(i64),
}

impl Pd {
    fn plus(self, k: i64) -> Pd {
        match self {
            Pd::MinusInfinity => Pd::MinusInfinity,
            Pd::Finite(n) => Pd::Finite(n + k),
        }
    }

    fn show(self) -> String {
        match self {
            Pd::MinusInfinity => "-inf".into(),
            Pd::Finite(n) => n.to_string(),
        }
    }
}

/// A cutoff no exact pd of `x` can exceed, given a bound `g` on `gd A`.
fn module_cutoff<F: Field>(x: &DgModule<F>, g: i64) -> i64 {
    (g - x.bottom_cohomology().unwrap_or(0)).max(0) + 1
}

fn exact_pd<F: Field>(x: &DgModule<F>, cutoff: i64) -> Result<Option<Pd>> {
    Ok(match pd(x, cutoff)?.value {
        PdValue::Exact(n) => Some(Pd::Finite(n)),
        PdValue::MinusInfinity => Some(Pd::MinusInfinity),
        PdValue::AtLeast(_) => None,
    })
}

/// Bound on `gd A` used for cutoffs: `l(d+1)` when acyclic, `None` otherwise.
fn acyclic_bound<F: Field>(a: &DgAlgebra<F>) -> Option<i64> {
    a.quiver_max_path_length().map(|l| l as i64 * (a.amplitude() + 1))
}

/// `pd y <= max(pd x, pd z)` on the triangle `x -> y -> cone(f) -> x[1]` and its rotations.
pub fn check_triangle_bound<F: Field>(spec: &RandomSpec, trials: u64, field: F) -> Result<CheckReport> {
    run_trials("triangle_bound", spec, trials, field, |i, f, text| {
        let (pres, a) = random_algebra(spec, i, f.clone())?;
        *text = pres.to_string();
        let mut r = TrialResult::new(text.clone());
        let Some(g) = acyclic_bound(&a) else {
            return Ok(r.inconclusive("quiver has oriented cycles"));
        };
        let mut rng = module_rng(spec, i);
        let x = random_module(&a, &mut rng, 2);
        let y = random_module(&a, &mut rng, 2);
        let map = match rng.gen_range(0..4) {
            0 => ModuleMap::zero(x.clone(), y.clone()),
            _ => random_map(&x, &y, &mut rng)?,
        };
        let z = map.cone();
        let cutoff = [&x, &y, &z].iter().map(|m| module_cutoff(m, g)).max().unwrap_or(1);
        let (Some(px), Some(py), Some(pz)) = (exact_pd(&x, cutoff)?, exact_pd(&y, cutoff)?, exact_pd(&z, cutoff)?) else {
            return Ok(r.inconclusive("a pd reached the cutoff"));
        };
        r.set("dims", [x.dim(), y.dim(), z.dim()]);
        r.set("pd_x", px.show());
        r.set("pd_y", py.show());
        r.set("pd_cone", pz.show());
        // x -> y -> z,  y -> z -> x[1],  z -> x[1] -> y[1]
        r.require(py <= px.max(pz), || format!("pd y = {} > max(pd x, pd cone)", py.show()));
        r.require(pz <= py.max(px.plus(1)), || format!("pd cone = {} > max(pd y, pd x + 1)", pz.show()));
        r.require(px.plus(1) <= pz.max(py.plus(1)), || format!("pd x + 1 = {} > max(pd cone, pd y + 1)", px.plus(1).show()));
        Ok(r)
    })
}

/// `pd (x ⊗ y) <= pd x + pd y` for bimodules `y = A[k]` and `A / J^m`.
pub fn check_tensor_bound<F: Field>(spec: &RandomSpec, trials: u64, field: F) -> Result<CheckReport> {
    run_trials("tensor_bound", spec, trials, field, |i, f, text| {
        let (pres, a) = random_algebra(spec, i, f.clone())?;
        *text = pres.to_string();
        let mut r = TrialResult::new(text.clone());
        let Some(g) = acyclic_bound(&a) else {
            return Ok(r.inconclusive("quiver has oriented cycles"));
        };
        let mut rng = module_rng(spec, i);
        let x = random_module(&a, &mut rng, 2);
        let (y, kind) = if rng.gen_bool(0.5) {
            let k = rng.gen_range(0..=2);
            (DgBimodule::regular(a.clone()).shift(k), format!("A[{k}]"))
        } else {
            let m = rng.gen_range(1..=2);
            (DgBimodule::ideal_quotient(a.clone(), 0, m), format!("A/J^{m}"))
        };
        r.set("y", kind);
        let y_right = y.as_right_module();
        let (Some(px), Some(py)) = (exact_pd(&x, module_cutoff(&x, g))?, exact_pd(&y_right, module_cutoff(&y_right, g))?) else {
            return Ok(r.inconclusive("a factor has pd at the cutoff"));
        };
        r.set("pd_x", px.show());
        r.set("pd_y", py.show());
        let (Pd::Finite(dx), Pd::Finite(dy)) = (px, py) else {
            // a zero factor makes the product zero
            r.set("pd_tensor", "-inf");
            return Ok(r);
        };
        // x lies in the span of A[j] for -top(x) <= j <= dx, so H(x ⊗ y) sits at or above bottom(y) - dx
        let low = y_right.bottom_cohomology().unwrap_or(0) - dx - 1;
        let t = tensor_module(&x, &y, low)?;
        let bound = dx + dy;
        let pt = match pd(&t, bound.max(0) + 1)?.value {
            PdValue::Exact(n) => Pd::Finite(n),
            PdValue::MinusInfinity => Pd::MinusInfinity,
            PdValue::AtLeast(n) => Pd::Finite(n + 1),
        };
        r.set("pd_tensor", pt.show());
        r.set("bound", bound);
        r.require(pt <= Pd::Finite(bound), || format!("pd(x ⊗ y) = {} > pd x + pd y = {bound}", pt.show()));
        Ok(r)
    })
}

/// Quantities of the homomorphism bound for `h: kQ₀ -> B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomBound {
    pub gd_a: i64,
    pub gd_b: PdValue,
    /// `pd_A T_h`
    pub d: i64,
    /// Least `n` with `T_h^{⊗n}` acyclic.
    pub n: usize,
    pub bound: i64,
}

/// `gd B <= gd A + (n-1)(d+1)` for the vertex inclusion `h: kQ₀ -> B`.
pub fn hom_bound<F: Field>(b: &Arc<DgAlgebra<F>>, cutoff: Option<i64>) -> Result<Option<HomBound>> {
    let h = AlgebraMap::vertex_inclusion(b.clone());
    let a = h.source.clone();
    let gd_a = match gd(&a, Some(0))?.value {
        PdValue::Exact(n) => n,
        PdValue::MinusInfinity => 0,
        PdValue::AtLeast(_) => return Ok(None),
    };
    let t = DgBimodule::algebra_map_cokernel(&h)?;
    let t_right = t.as_right_module();
    let d = match exact_pd(&t_right, module_cutoff(&t_right, gd_a))? {
        Some(Pd::Finite(n)) => n.max(0),
        Some(Pd::MinusInfinity) => 0,
        None => return Ok(None),
    };
    let mut power = t_right.clone();
    let mut n = 1;
    while !power.is_acyclic() {
        if n >= MAX_TENSOR_POWER {
            return Ok(None);
        }
        let low = power.min_degree().unwrap_or(0) + t_right.min_degree().unwrap_or(0) - 1;
        power = tensor_module(&power, &t, low)?.minimize();
        n += 1;
    }
    let gd_b = gd(b, cutoff)?.value;
    Ok(Some(HomBound { gd_a, gd_b, d, n, bound: gd_a + (n as i64 - 1) * (d + 1) }))
}

pub fn check_hom_theorem<F: Field>(spec: &RandomSpec, trials: u64, field: F, cutoff: Option<i64>) -> Result<CheckReport> {
    run_trials("hom_theorem", spec, trials, field, |i, f, text| {
        let (pres, b) = random_algebra(spec, i, f.clone())?;
        *text = pres.to_string();
        let mut r = TrialResult::new(text.clone());
        let Some(q) = hom_bound(&b, cutoff)? else {
            return Ok(r.inconclusive("hypotheses not certified within the cutoff"));
        };
        r.set("quantities", &q);
        match q.gd_b {
            PdValue::Exact(g) => r.require(g <= q.bound, || format!("gd B = {g} > gd A + (n-1)(d+1) = {}", q.bound)),
            PdValue::MinusInfinity => {}
            PdValue::AtLeast(_) => return Ok(r.inconclusive("gd B reached the cutoff")),
        }
        Ok(r)
    })
}

/// Checks `gd <= l(d+1)`, the path-length converse, and that the three
/// finiteness criteria for `gd` agree.
pub fn check_acyclic_bound<F: Field>(spec: &RandomSpec, trials: u64, field: F) -> Result<CheckReport> {
    run_trials("acyclic_bound", spec, trials, field, |i, f, text| {
        let (pres, a) = random_algebra(spec, i, f.clone())?;
        *text = pres.to_string();
        let mut r = TrialResult::new(text.clone());
        let Some(l) = a.quiver_max_path_length() else {
            return Ok(r.inconclusive("quiver has oriented cycles"));
        };
        let (l, d) = (l as i64, a.amplitude());
        let g = gd(&a, None)?;
        r.set("l", l);
        r.set("d", d);
        r.set("gd", g.value);
        let n = match g.value {
            PdValue::Exact(n) => n,
            PdValue::MinusInfinity => 0,
            PdValue::AtLeast(c) => {
                r.require(false, || format!("gd is not exact at the cutoff {c}"));
                return Ok(r);
            }
        };
        r.require(n <= l * (d + 1), || format!("gd = {n} > l(d+1) = {}", l * (d + 1)));
        r.require(n / (d + 1) <= l, || format!("no path of length {} although gd = {n}", n / (d + 1)));
        // the finiteness criteria, each computed separately
        let (cutoff, _, _) = gd_cutoff(&a, None);
        let mut simples_finite = true;
        for v in 0..a.vertices().len() {
            let s = DgModule::simple(a.clone(), v);
            simples_finite &= exact_pd(&s, cutoff)?.is_some();
        }
        let per = per_membership(&DgModule::simples_sum(a.clone()), cutoff)?.unwrap_or(false);
        r.set("simples_finite", simples_finite);
        r.set("simples_perfect", per);
        r.require(simples_finite && per, || "gd is finite but the finiteness criteria disagree".to_string());
        Ok(r)
    })
}

/// Ext of the simples and gd against the classical minimal resolution on trivially graded instances.
pub fn classical_regression<F: Field>(spec: &RandomSpec, trials: u64, field: F) -> Result<CheckReport> {
    let mut spec = spec.clone();
    spec.trivial_grading = true;
    let spec = &spec;
    run_trials("classical_regression", spec, trials, field, |i, f, text| {
        let (pres, a) = random_algebra(spec, i, f.clone())?;
        *text = pres.to_string();
        let r = TrialResult::new(text.clone());
        compare_with_classical(&a, CLASSICAL_WINDOW, r)
    })
}

fn compare_with_classical<F: Field>(a: &Arc<DgAlgebra<F>>, window: i64, mut r: TrialResult) -> Result<TrialResult> {
    let oracle = ClassicalOracle::new(a)?;
    let classical = oracle.resolve(window as usize, CLASSICAL_MAX_DIM)?;
    let mut expected = classical.ext_dims();
    expected.resize(window as usize + 1, 0);
    let s = DgModule::simples_sum(a.clone());
    let table = ext_window(&s, &s, 0, window)?;
    let computed: Vec<usize> = (0..=window).map(|n| table.dim(n).unwrap_or(0)).collect();
    r.set("ext_classical", &expected);
    r.set("ext_bar", &computed);
    r.require(computed == expected, || format!("Ext(s, s) = {computed:?}, classical {expected:?}"));
    let g = gd(a, Some(window))?.value;
    r.set("gd", g);
    r.set("gd_classical", classical.global_dimension());
    match classical.global_dimension() {
        Some(c) => r.require(
            g == PdValue::Exact(c as i64) || (c == 0 && g == PdValue::MinusInfinity),
            || format!("gd = {g}, classical {c}"),
        ),
        None => r.require(matches!(g, PdValue::AtLeast(_)), || format!("gd = {g} but the classical resolution does not stop")),
    }
    Ok(r)
}

/// The classical comparison for a single algebra, outside the random suites.
pub fn classical_comparison<F: Field>(a: &Arc<DgAlgebra<F>>, window: i64) -> Result<(Outcome, BTreeMap<String, Value>)> {
    let r = compare_with_classical(a, window, TrialResult::new(String::new()))?;
    let mut data = r.data;
    if let Some(n) = r.note {
        data.insert("note".into(), json!(n));
    }
    Ok((r.outcome, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::presentation::{normalize, parse_algebra};

    fn small() -> RandomSpec {
        RandomSpec { seed: 11, max_vertices: 3, max_arrows: 3, d_max: 2, ..RandomSpec::default() }
    }

    #[test]
    fn triangle_bound_small_run() {
        let r = check_triangle_bound(&small(), 8, Rationals).unwrap();
        assert_eq!(r.failed, 0, "{:#?}", r.failures);
        assert_eq!(r.trials, 8);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = check_acyclic_bound(&small(), 6, PrimeField::new(101)).unwrap();
        let b = check_acyclic_bound(&small(), 6, PrimeField::new(101)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.failed, 0, "{:#?}", a.failures);
    }

    #[test]
    fn hom_bound_one_arrow() {
        for d in 0..=3 {
            let p = parse_algebra(&format!("vertices 1 2\narrow a : 1 -> 2 deg {}\n", -d)).unwrap();
            let b = Arc::new(normalize(&p, Rationals).unwrap());
            let q = hom_bound(&b, None).unwrap().unwrap();
            assert_eq!((q.gd_a, q.d, q.n), (0, d, 2));
            assert_eq!(q.gd_b, PdValue::Exact(d + 1));
            assert_eq!(q.bound, d + 1);
        }
    }

    #[test]
    fn classical_agreement_on_dual_numbers() {
        let p = parse_algebra("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n").unwrap();
        let a = Arc::new(normalize(&p, Rationals).unwrap());
        let (outcome, data) = classical_comparison(&a, 8).unwrap();
        assert_eq!(outcome, Outcome::Pass, "{data:?}");
    }
}
