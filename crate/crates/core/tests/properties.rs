use std::sync::Arc;

use dga_core::derived::ext_window;
use dga_core::dimension::{pd, PdValue};
use dga_core::module::{DgModule, ModuleMap};
use dga_core::presentation::{normalize, parse_algebra};
use dga_core::verify::{random_algebra, random_map, random_module, RandomSpec};
use dga_core::{DgAlgebra, PrimeField, Rationals};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(seed: u64) -> RandomSpec {
    RandomSpec { seed, max_vertices: 3, max_arrows: 4, d_max: 2, ..RandomSpec::default() }
}

fn instance(seed: u64) -> (Arc<DgAlgebra<PrimeField>>, ChaCha8Rng) {
    let (_, a) = random_algebra(&spec(seed), 0, PrimeField::new(101)).unwrap();
    (a, ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn presentations_survive_print_and_parse(seed in any::<u64>()) {
        let (p, a) = random_algebra(&spec(seed), 0, Rationals).unwrap();
        let again = parse_algebra(&p.to_string()).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(normalize(&again, Rationals).unwrap().dim(), a.dim());
    }

    #[test]
    fn normalized_algebras_are_dg_algebras(seed in any::<u64>()) {
        let (a, _) = instance(seed);
        prop_assert!(a.check_associative());
        prop_assert!(a.check_idempotents());
        prop_assert!(a.check_leibniz());
        prop_assert!(a.augmentation_is_nilpotent());
    }

    #[test]
    fn shift_moves_cohomology(seed in any::<u64>(), k in -3i64..=3) {
        let (a, mut rng) = instance(seed);
        let x = random_module(&a, &mut rng, 2);
        let moved: Vec<(i64, usize)> = x.shift(k).cohomology_dims().into_iter().collect();
        let expected: Vec<(i64, usize)> = x.cohomology_dims().into_iter().map(|(d, n)| (d - k, n)).collect();
        prop_assert_eq!(moved, expected);
        prop_assert!(x.shift(k).shift(-k).validate().is_ok());
    }

    #[test]
    fn cone_of_identity_is_acyclic(seed in any::<u64>()) {
        let (a, mut rng) = instance(seed);
        let x = random_module(&a, &mut rng, 2);
        prop_assert!(ModuleMap::identity(x).cone().is_acyclic());
    }

    #[test]
    fn cone_cohomology_is_exact(seed in any::<u64>()) {
        // Euler characteristics add along x -> y -> cone(f)
        let (a, mut rng) = instance(seed);
        let x = random_module(&a, &mut rng, 2);
        let y = random_module(&a, &mut rng, 2);
        let f = random_map(&x, &y, &mut rng).unwrap();
        let z = f.cone();
        prop_assert!(z.validate().is_ok());
        let chi = |m: &DgModule<PrimeField>| m.cohomology_dims().iter().map(|(d, n)| if d % 2 == 0 { *n as i64 } else { -(*n as i64) }).sum::<i64>();
        prop_assert_eq!(chi(&z), chi(&y) - chi(&x));
    }

    #[test]
    fn ext_is_additive(seed in any::<u64>()) {
        let (a, mut rng) = instance(seed);
        let x = random_module(&a, &mut rng, 1);
        let y = random_module(&a, &mut rng, 1);
        let s = DgModule::simples_sum(a.clone());
        let sum = ext_window(&x.direct_sum(&y), &s, -1, 4).unwrap();
        let ex = ext_window(&x, &s, -1, 4).unwrap();
        let ey = ext_window(&y, &s, -1, 4).unwrap();
        for n in -1..=4 {
            prop_assert_eq!(sum.dim(n), Some(ex.dim(n).unwrap() + ey.dim(n).unwrap()));
        }
    }

    #[test]
    fn pd_shifts_with_the_module(seed in any::<u64>(), k in 0i64..=3) {
        let (a, mut rng) = instance(seed);
        let x = random_module(&a, &mut rng, 1);
        let cutoff = 40;
        match (pd(&x, cutoff).unwrap().value, pd(&x.shift(k), cutoff).unwrap().value) {
            (PdValue::Exact(n), PdValue::Exact(m)) => prop_assert_eq!(m, n + k),
            (PdValue::MinusInfinity, PdValue::MinusInfinity) => {}
            (p, q) => prop_assert!(false, "pd {} and {} after shift {}", p, q, k),
        }
    }
}

#[test]
fn minimize_keeps_cohomology() {
    let (a, mut rng) = instance(7);
    for _ in 0..10 {
        let x = random_module(&a, &mut rng, 2);
        assert_eq!(x.minimize().cohomology_dims(), x.cohomology_dims());
    }
}
