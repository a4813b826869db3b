//! Known values, each obtained independently of the code under test.

use std::sync::Arc;

use dga_core::derived::ext_window;
use dga_core::dimension::{gd, pd, PdValue};
use dga_core::module::DgModule;
use dga_core::presentation::{normalize, parse_algebra};
use dga_core::verify::{classical_comparison, ClassicalOracle, Outcome};
use dga_core::{DgAlgebra, Rationals};

fn alg(src: &str) -> Arc<DgAlgebra<Rationals>> {
    Arc::new(normalize(&parse_algebra(src).unwrap(), Rationals).unwrap())
}

#[test]
fn one_arrow_ext_table() {
    // the bar complex of s has the single letter `a` in Ext degree 0 + 1 + 2
    let a = alg("vertices 1 2\narrow a : 1 -> 2 deg -2\n");
    let s = DgModule::simples_sum(a.clone());
    let t = ext_window(&s, &s, 0, 8).unwrap();
    let dims: Vec<usize> = (0..=8).map(|n| t.dim(n).unwrap()).collect();
    assert_eq!(dims, vec![2, 0, 0, 1, 0, 0, 0, 0, 0]);
}

#[test]
fn path_algebra_of_a3_is_hereditary() {
    let a = alg("vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg 0\n");
    assert_eq!(gd(&a, None).unwrap().value, PdValue::Exact(1));
    let r = ClassicalOracle::new(&a).unwrap().resolve(5, 100).unwrap();
    assert_eq!(r.global_dimension(), Some(1));
}

#[test]
fn kronecker_ext() {
    // 0 -> P2^2 -> P1 -> S1: Ext^1(s, s) has dimension 2
    let a = alg("vertices 1 2\narrow a : 1 -> 2 deg 0\narrow b : 1 -> 2 deg 0\n");
    let s = DgModule::simples_sum(a.clone());
    let t = ext_window(&s, &s, 0, 4).unwrap();
    assert_eq!((0..=4).map(|n| t.dim(n).unwrap()).collect::<Vec<_>>(), vec![2, 2, 0, 0, 0]);
}

#[test]
fn radical_square_zero_cycle() {
    // two-cycle with both composites zero: each simple has a periodic resolution P_v <- P_w <- P_v ...
    let a = alg("vertices 1 2\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 1 deg 0\nrel a*b\nrel b*a\n");
    let s = DgModule::simples_sum(a.clone());
    let t = ext_window(&s, &s, 0, 6).unwrap();
    assert!((0..=6).all(|n| t.dim(n) == Some(2)));
    let (outcome, data) = classical_comparison(&a, 8).unwrap();
    assert_eq!(outcome, Outcome::Pass, "{data:?}");
}

#[test]
fn truncated_polynomial_ring() {
    // k[x]/(x^3): the resolution alternates x and x^2, one copy in every degree
    let a = alg("vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x*x\n");
    let (outcome, data) = classical_comparison(&a, 10).unwrap();
    assert_eq!(outcome, Outcome::Pass, "{data:?}");
    assert_eq!(gd(&a, Some(10)).unwrap().value, PdValue::AtLeast(10));
}

#[test]
fn shifted_free_modules() {
    for src in [
        "vertices 1 2\narrow a : 1 -> 2 deg -1\n",
        "vertices 1\narrow x : 1 -> 1 deg 0\nrel x*x\n",
        "vertices 1 2 3\narrow a : 1 -> 2 deg 0\narrow b : 2 -> 3 deg -2\nrel a*b\n",
    ] {
        let a = alg(src);
        for n in 0..=8 {
            assert_eq!(pd(&DgModule::regular(a.clone(), n), 40).unwrap().value, PdValue::Exact(n));
        }
    }
}
