use std::sync::Arc;

use proptest::prelude::*;

use finitetc_core::complexity::{cat, cc_n, SearchOptions};
use finitetc_core::corpus::canonical_code;
use finitetc_core::homotopy::{core, is_contractible};
use finitetc_core::io::{parse_poset, poset_to_json};
use finitetc_core::poset::{barycentric_subdivision, build_poset, index_of_tuple, power, tuple_of, FinitePoset};
use finitetc_core::report::Value;
use finitetc_core::simplicial::{order_complex, SimplicialComplex};

/// A poset on `0..n` from a choice of relations `i < j` (transitively closed
/// by the builder).
fn arb_poset(max: usize) -> impl Strategy<Value = FinitePoset> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            let edges: Vec<(usize, usize)> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            build_poset((0..n).map(|i| format!("x{}", i)).collect(), &edges).expect("edges follow the natural order")
        })
    })
}

fn arb_connected(max: usize) -> impl Strategy<Value = FinitePoset> {
    arb_poset(max).prop_filter("connected", FinitePoset::is_connected)
}

fn le(a: Value, b: Value) -> bool {
    match (a, b) {
        (_, Value::Infinite) => true,
        (Value::Finite(x), Value::Finite(y)) => x <= y,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_axioms(p in arb_poset(7)) {
        let n = p.len();
        for x in 0..n {
            prop_assert!(p.leq(x, x));
            for y in 0..n {
                if x != y {
                    prop_assert!(!(p.leq(x, y) && p.leq(y, x)));
                }
                for z in 0..n {
                    if p.leq(x, y) && p.leq(y, z) {
                        prop_assert!(p.leq(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip(p in arb_poset(7)) {
        let q = parse_poset(&poset_to_json(&p).to_string()).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn core_is_idempotent_and_decides_contractibility(p in arb_connected(7)) {
        let c = core(&p);
        prop_assert!(c.len() <= p.len());
        prop_assert_eq!(canonical_code(&core(&c)), canonical_code(&c));
        prop_assert_eq!(is_contractible(&p), c.len() == 1);
    }

    #[test]
    fn tuple_indexing_is_bijective(base in 1usize..5, n in 1usize..4) {
        let total = base.pow(n as u32);
        for i in 0..total {
            let t = tuple_of(i, base, n);
            prop_assert_eq!(t.len(), n);
            prop_assert_eq!(index_of_tuple(&t, base), i);
        }
    }

    #[test]
    fn power_has_product_order(p in arb_poset(4)) {
        let sq = power(&p, 2, 1000).unwrap();
        let b = p.len();
        prop_assert_eq!(sq.len(), b * b);
        for i in 0..sq.len() {
            for j in 0..sq.len() {
                let (s, t) = (tuple_of(i, b, 2), tuple_of(j, b, 2));
                prop_assert_eq!(sq.leq(i, j), p.leq(s[0], t[0]) && p.leq(s[1], t[1]));
            }
        }
    }

    #[test]
    fn subdivision_elements_are_chains(p in arb_poset(5)) {
        let sd = barycentric_subdivision(&Arc::new(p.clone()), 10_000).unwrap();
        prop_assert_eq!(sd.poset.len() as u128, p.chain_count());
        prop_assert_eq!(order_complex(&p).simplex_count() as u128, p.chain_count());
    }

    #[test]
    fn complex_normalization_is_stable(facets in prop::collection::vec(prop::collection::btree_set(0usize..6, 1..4), 1..6)) {
        let facets: Vec<Vec<usize>> = facets.into_iter().map(|f| f.into_iter().collect()).collect();
        let used = facets.iter().flatten().max().unwrap() + 1;
        let labels: Vec<String> = (0..used).map(|i| i.to_string()).collect();
        let k = SimplicialComplex::new(labels.clone(), facets.clone()).unwrap();
        for f in &facets {
            prop_assert!(k.is_simplex(f));
        }
        let again = SimplicialComplex::new(labels, k.facets().to_vec()).unwrap();
        prop_assert_eq!(again.facets(), k.facets());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cat_bounds_cc2(p in arb_connected(4)) {
        let p = Arc::new(p);
        let opts = SearchOptions::default();
        let c = cat(&p, &opts).unwrap();
        let cc = cc_n(&p, 2, &opts).unwrap();
        prop_assert!(c.is_exact() && cc.is_exact());
        prop_assert!(le(c.value, cc.value));
        prop_assert_eq!(cc.value == Value::Finite(1), is_contractible(&p));
    }
}
