//! Acceptance suite: one line per criterion, all criteria evaluated before
//! the test asserts.
//!
//! Tolerances: every dimension and bound is an exact integer, compared with
//! `==` or `<=`. Time limits: 1 s per `dga gd` run (criterion 1) and 300 s for
//! the acyclic suite (criterion 2).

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dga_core::derived::ext_window;
use dga_core::dimension::{gd, pd, PdValue, DEFAULT_CUTOFF};
use dga_core::module::DgModule;
use dga_core::presentation::{normalize, parse_algebra};
use dga_core::verify::{self, CheckReport, ClassicalOracle, Outcome, RandomSpec};
use dga_core::{DgAlgebra, Error, Rationals};
use serde_json::Value;

const GD_TIME_LIMIT: Duration = Duration::from_secs(1);
const ACYCLIC_SUITE_LIMIT: Duration = Duration::from_secs(300);

struct Ledger {
    lines: Vec<(u32, bool, String)>,
    /// Any disagreement between independent computations, across all criteria.
    consistency_aborts: Vec<String>,
}

impl Ledger {
    fn record(&mut self, criterion: u32, ok: bool, detail: String) {
        println!("criterion {criterion}: {} | {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((criterion, ok, detail));
    }

    /// Unwraps a check, noting consistency aborts for criterion 8.
    fn check(&mut self, label: &str, r: dga_core::Result<CheckReport>) -> Option<CheckReport> {
        match r {
            Ok(r) => Some(r),
            Err(e) => {
                if matches!(e, Error::Consistency(_)) {
                    self.consistency_aborts.push(format!("{label}: {e}"));
                }
                println!("  {label}: error {e}");
                None
            }
        }
    }
}

fn alg(src: &str) -> Arc<DgAlgebra<Rationals>> {
    Arc::new(normalize(&parse_algebra(src).expect("parses"), Rationals).expect("normalizes"))
}

fn summary(r: &CheckReport) -> String {
    format!("{} trials, {} passed, {} failed, {} inconclusive", r.trials, r.passed, r.failed, r.inconclusive)
}

fn print_failures(r: &CheckReport) {
    for f in r.failures.iter().take(3) {
        println!("  trial {} (seed {}): {}\n{}", f.trial, f.seed, f.message, f.presentation);
    }
}

fn criterion_1(ledger: &mut Ledger) {
    let dir = std::env::temp_dir().join(format!("dga-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut ok = true;
    let mut seen = Vec::new();
    let mut slowest = Duration::ZERO;
    for d in 0..=5i64 {
        let file: PathBuf = dir.join(format!("arrow_d{d}.dga"));
        std::fs::write(&file, format!("vertices 1 2\narrow a : 1 -> 2 deg {}\n", -d)).unwrap();
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_dga")).arg("gd").arg(&file).output().expect("dga runs");
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        if out.status.code() == Some(2) {
            ledger.consistency_aborts.push(format!("dga gd with d = {d}"));
        }
        let report: Option<Value> = serde_json::from_slice(&out.stdout).ok();
        let value = report.as_ref().map(|r| r["result"]["value"].clone());
        let exact = value.as_ref().is_some_and(|v| v["kind"] == "Exact" && v["value"] == d + 1);
        ok &= out.status.success() && exact && elapsed < GD_TIME_LIMIT;
        seen.push(value.map_or("error".to_string(), |v| format!("{}", v["value"])));
    }
    std::fs::remove_dir_all(dir).unwrap();
    ledger.record(1, ok, format!("gd for d = 0..5: [{}], expected d+1 exactly; slowest run {slowest:?} < {GD_TIME_LIMIT:?}", seen.join(", ")));
}

fn criterion_2(ledger: &mut Ledger) {
    let spec = RandomSpec { seed: 2, ..RandomSpec::default() };
    let start = Instant::now();
    let r = ledger.check("acyclic bound", verify::check_acyclic_bound(&spec, 100, Rationals));
    let elapsed = start.elapsed();
    match r {
        Some(r) => {
            print_failures(&r);
            let ok = r.trials == 100 && r.passed == 100 && elapsed < ACYCLIC_SUITE_LIMIT;
            ledger.record(2, ok, format!("{}; every gd Exact and <= l(d+1), floor(gd/(d+1)) <= l; {elapsed:?} < {ACYCLIC_SUITE_LIMIT:?}", summary(&r)));
        }
        None => ledger.record(2, false, "suite aborted".into()),
    }
}

fn criterion_3(ledger: &mut Ledger) {
    let algebras = [
        "vertices 1 2\narrow a : 1 -> 2 deg -1\n",
        "vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n",
        "vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg -2\nrel a*b\n",
    ];
    let mut ok = true;
    let mut bad = Vec::new();
    for (i, src) in algebras.iter().enumerate() {
        let a = alg(src);
        for n in 0..=8 {
            match pd(&DgModule::regular(a.clone(), n), n + 1) {
                Ok(r) if r.value == PdValue::Exact(n) => {}
                Ok(r) => {
                    ok = false;
                    bad.push(format!("algebra {i}, n = {n}: {}", r.value));
                }
                Err(e) => {
                    ok = false;
                    if matches!(e, Error::Consistency(_)) {
                        ledger.consistency_aborts.push(format!("pd(A[{n}]) on algebra {i}: {e}"));
                    }
                    bad.push(format!("algebra {i}, n = {n}: {e}"));
                }
            }
        }
    }
    ledger.record(3, ok, format!("pd(A[n]) == n for n = 0..8 on 3 algebras; mismatches: {bad:?}"));
}

fn criterion_4(ledger: &mut Ledger) {
    let spec = RandomSpec { seed: 4, ..RandomSpec::default() };
    match ledger.check("triangle bound", verify::check_triangle_bound(&spec, 100, Rationals)) {
        Some(r) => {
            print_failures(&r);
            ledger.record(4, r.passed == 100 && r.failed == 0, format!("{}; all rotations checked", summary(&r)));
        }
        None => ledger.record(4, false, "suite aborted".into()),
    }
}

fn criterion_5(ledger: &mut Ledger) {
    let spec = RandomSpec { seed: 5, ..RandomSpec::default() };
    match ledger.check("tensor bound", verify::check_tensor_bound(&spec, 50, Rationals)) {
        Some(r) => {
            print_failures(&r);
            ledger.record(5, r.failed == 0 && r.conclusive() >= 40, format!("{}; need 0 failed and >= 40 conclusive", summary(&r)));
        }
        None => ledger.record(5, false, "suite aborted".into()),
    }
}

fn criterion_6(ledger: &mut Ledger) {
    let spec = RandomSpec { seed: 6, ..RandomSpec::default() };
    match ledger.check("hom theorem", verify::check_hom_theorem(&spec, 20, Rationals, None)) {
        Some(r) => {
            print_failures(&r);
            let gd_a_zero = r.per_trial.iter().all(|t| t.data.get("quantities").is_some_and(|q| q["gd_a"] == 0));
            ledger.record(
                6,
                r.passed == 20 && r.failed == 0 && gd_a_zero,
                format!("{}; gd A == 0 on every trial: {gd_a_zero}", summary(&r)),
            );
        }
        None => ledger.record(6, false, "suite aborted".into()),
    }
}

fn criterion_7(ledger: &mut Ledger) {
    let spec = RandomSpec { seed: 7, trivial_grading: true, relation_density: 100, ..RandomSpec::default() };
    let random = ledger.check("classical regression", verify::classical_regression(&spec, 20, Rationals));
    let mut ok = random.as_ref().is_some_and(|r| r.passed == 20);
    let mut detail = random.as_ref().map_or("suite aborted".to_string(), summary);
    if let Some(r) = &random {
        print_failures(r);
    }
    // algebras with oriented cycles, where the classical resolution never stops
    let fixed = [
        "vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n",
        "vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x*x\n",
        "vertices 1 2\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 1 deg 0\nrel a*b\nrel b*a\n",
    ];
    let mut fixed_ok = 0;
    for src in fixed {
        match verify::classical_comparison(&alg(src), verify::checks::CLASSICAL_WINDOW) {
            Ok((Outcome::Pass, _)) => fixed_ok += 1,
            Ok((_, data)) => println!("  cyclic instance disagrees: {data:?}"),
            Err(e) => {
                if matches!(e, Error::Consistency(_)) {
                    ledger.consistency_aborts.push(format!("classical comparison: {e}"));
                }
                println!("  cyclic instance error: {e}");
            }
        }
    }
    ok &= fixed_ok == fixed.len();
    detail.push_str(&format!("; plus {fixed_ok}/{} cyclic algebras; Ext(s,s) equal in degrees 0..12, gd equal when finite", fixed.len()));
    ledger.record(7, ok, detail);
}

fn criterion_9(ledger: &mut Ledger) {
    let a = alg("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n");
    let c = DEFAULT_CUTOFF;
    let result = gd(&a, None);
    let classical = ClassicalOracle::new(&a).and_then(|o| o.resolve((c + 1) as usize, 10_000));
    let s = DgModule::simples_sum(a.clone());
    let table = ext_window(&s, &s, 0, c + 1);
    match (result, classical, table) {
        (Ok(g), Ok(cl), Ok(t)) => {
            let bar: Vec<usize> = (0..=c + 1).map(|n| t.dim(n).unwrap_or(0)).collect();
            let ok = g.value == PdValue::AtLeast(c) && bar.iter().all(|&d| d > 0) && bar == cl.ext_dims() && !cl.terminated;
            ledger.record(9, ok, format!("gd = {}, expected >= {c}; Ext^n(s,s) for n = 0..{}: {bar:?}, classical {:?}", g.value, c + 1, cl.ext_dims()));
        }
        (g, cl, t) => {
            for e in [g.err(), cl.err(), t.err()].into_iter().flatten() {
                if matches!(e, Error::Consistency(_)) {
                    ledger.consistency_aborts.push(format!("dual numbers: {e}"));
                }
                println!("  error {e}");
            }
            ledger.record(9, false, "computation failed".into());
        }
    }
}

#[test]
fn acceptance() {
    let mut ledger = Ledger { lines: Vec::new(), consistency_aborts: Vec::new() };
    criterion_1(&mut ledger);
    criterion_2(&mut ledger);
    criterion_3(&mut ledger);
    criterion_4(&mut ledger);
    criterion_5(&mut ledger);
    criterion_6(&mut ledger);
    criterion_7(&mut ledger);
    criterion_9(&mut ledger);
    let aborts = ledger.consistency_aborts.clone();
    ledger.record(8, aborts.is_empty(), format!("consistency aborts across criteria 1-7 and 9: {aborts:?}"));
    let failed: Vec<u32> = ledger.lines.iter().filter(|(_, ok, _)| !ok).map(|(c, _, _)| *c).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
