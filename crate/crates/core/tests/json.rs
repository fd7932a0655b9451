use std::sync::OnceLock;

use mkr_core::chow::{chow_ring, ChowRing};
use mkr_core::fy::{Flavor, FlatMultiIndex};
use mkr_core::json::{
    class_from_json, class_to_json, int_from_json, int_to_json, matroid_from_json, matroid_to_json,
    multi_index_from_json, snapper_from_json, snapper_to_json, zeta_matrix_from_json, zeta_to_json, ClassRing,
};
use mkr_core::kring::{k_ring, KRing, MatroidRings};
use mkr_core::matroid::{boolean, graphic, graphic_k4, uniform, Matroid};
use mkr_core::snapper::{snap_fy, SnapperPoly};
use num_bigint::BigInt;
use proptest::prelude::*;
use serde_json::json;

fn rings() -> &'static Vec<(ChowRing, KRing)> {
    static R: OnceLock<Vec<(ChowRing, KRing)>> = OnceLock::new();
    R.get_or_init(|| {
        let mut out = Vec::new();
        for m in [uniform(2, 3).unwrap(), uniform(3, 4).unwrap(), boolean(3).unwrap()] {
            for flavor in [Flavor::Plain, Flavor::Augmented] {
                out.push((chow_ring(&m, flavor).unwrap(), k_ring(&m, flavor).unwrap()));
            }
        }
        out
    })
}

fn small_matroid() -> impl Strategy<Value = Matroid> {
    prop_oneof![
        (1usize..=6).prop_flat_map(|n| (0..=n, Just(n))).prop_map(|(r, n)| uniform(r, n).unwrap()),
        prop::collection::vec(any::<bool>(), 6).prop_map(|keep| {
            let all = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let edges: Vec<_> = all.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
            if edges.is_empty() {
                uniform(0, 1).unwrap()
            } else {
                graphic(4, &edges).unwrap()
            }
        }),
    ]
}

proptest! {
    #[test]
    fn matroid_round_trip(m in small_matroid()) {
        let v = matroid_to_json(&m);
        let text = serde_json::to_string(&v).unwrap();
        let back = matroid_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn integer_round_trip(x in any::<i128>()) {
        let c = BigInt::from(x) * BigInt::from(x);
        prop_assert_eq!(int_from_json(&int_to_json(&c)).unwrap(), c.clone());
        prop_assert_eq!(int_from_json(&int_to_json(&-&c)).unwrap(), -c);
    }

    #[test]
    fn class_round_trip(which in 0usize..6, k in any::<bool>(), seed in prop::collection::vec(-50i64..50, 32)) {
        let (chow, kr) = &rings()[which];
        let ring = if k { ClassRing::K(kr) } else { ClassRing::Chow(chow) };
        let q = if k { kr.ring() } else { chow.ring() };
        let coords = (0..q.rank()).map(|i| BigInt::from(seed[i % seed.len()] * (i as i64 + 1))).collect();
        let x = q.from_coords(coords).unwrap();
        let text = serde_json::to_string(&class_to_json(ring, &x)).unwrap();
        let back = class_from_json(ring, &serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back.coords(), x.coords());
    }

    #[test]
    fn snapper_round_trip(entries in prop::collection::vec((0u32..16, 0u32..4, 0u32..16, 0u32..3, -9i64..9), 0..12)) {
        let mut p = SnapperPoly::default();
        for (f, a, g, b, c) in entries {
            if c != 0 {
                p.terms.insert(FlatMultiIndex::from_pairs([(f, a), (g, b)]), BigInt::from(c));
            }
        }
        let back = snapper_from_json(&snapper_to_json(&p), 4).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn class_accepts_documented_example() {
    // -3 x_{01}^2 in A(U34), written with a bare [generator, exponent] pair.
    let chow = chow_ring(&uniform(3, 4).unwrap(), Flavor::Plain).unwrap();
    let v = json!({"ring": "chow", "terms": [{"monomial": [["flat", [0, 1]], 2], "coeff": -3}]});
    let x = class_from_json(ClassRing::Chow(&chow), &v).unwrap();
    let t = chow.t_class(0b0011).unwrap();
    assert_eq!(x.coords(), (&t * &t).scale(&BigInt::from(-3)).coords());
}

#[test]
fn class_shorthands_and_simplicial_generators() {
    let m = uniform(2, 3).unwrap();
    let chow = chow_ring(&m, Flavor::Plain).unwrap();
    let k = k_ring(&m, Flavor::Plain).unwrap();
    let h = json!({"terms": [{"monomial": [[["h", "E"], 1]], "coeff": 1}]});
    let x = class_from_json(ClassRing::Chow(&chow), &h).unwrap();
    assert_eq!(x.coords(), chow.h_class(0b111).unwrap().coords());
    let y = class_from_json(ClassRing::K(&k), &h).unwrap();
    assert_eq!(y.coords(), k.eta_class(0b111).unwrap().coords());
    let one = json!({"terms": [{"monomial": [], "coeff": 1}]});
    assert_eq!(class_from_json(ClassRing::K(&k), &one).unwrap().coords(), k.ring().one().coords());
    let wrong = json!({"ring": "chow_aug", "terms": []});
    assert!(class_from_json(ClassRing::Chow(&chow), &wrong).is_err());
    let empty = json!({"terms": [{"monomial": [[["flat", "empty"], 1]], "coeff": 1}]});
    assert_eq!(class_from_json(ClassRing::Chow(&chow), &empty).unwrap().coords(), chow.t_class(0).unwrap().coords());
}

#[test]
fn augmented_classes_carry_y() {
    let m = uniform(2, 3).unwrap();
    let chow = chow_ring(&m, Flavor::Augmented).unwrap();
    let v = json!({"ring": "chow_aug", "terms": [{"monomial": [[["y", 2], 1]], "coeff": 5}]});
    let x = class_from_json(ClassRing::Chow(&chow), &v).unwrap();
    assert_eq!(x.coords(), chow.y_class(2).unwrap().scale(&BigInt::from(5)).coords());
    let back = class_from_json(ClassRing::Chow(&chow), &class_to_json(ClassRing::Chow(&chow), &x)).unwrap();
    assert_eq!(back.coords(), x.coords());
}

#[test]
fn matroid_schemas() {
    let k4 = json!({"family": "graphic", "vertices": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]});
    assert_eq!(matroid_from_json(&k4).unwrap(), graphic_k4());
    assert_eq!(matroid_from_json(&json!({"family": "uniform", "r": 2, "n": 4})).unwrap(), uniform(2, 4).unwrap());
    assert_eq!(matroid_from_json(&json!({"family": "boolean", "n": 3})).unwrap(), boolean(3).unwrap());
    let explicit = json!({"n": 3, "bases": [[0, 1], [0, 2], [1, 2]]});
    assert_eq!(matroid_from_json(&explicit).unwrap(), uniform(2, 3).unwrap());
    assert!(matroid_from_json(&json!({"n": 3, "bases": [[0, 1], [2]]})).is_err());
    assert!(matroid_from_json(&json!({"family": "torus"})).is_err());
}

#[test]
fn multi_index_forms_agree() {
    let pairs = multi_index_from_json(&json!([[["flat", [0, 1]], 2], [["flat", "E"], 1]]), 3).unwrap();
    let object = multi_index_from_json(&json!({"0,1": 2, "E": 1}), 3).unwrap();
    let bare = multi_index_from_json(&json!([["flat", [0, 1]], 2]), 3).unwrap();
    assert_eq!(pairs, object);
    assert_eq!(pairs, FlatMultiIndex::from_pairs([(0b011, 2), (0b111, 1)]));
    assert_eq!(bare, FlatMultiIndex::single(0b011, 2));
    assert!(multi_index_from_json(&json!({"0,7": 1}), 3).is_err());
}

#[test]
fn snapper_json_round_trips_real_polynomial() {
    let m = uniform(2, 3).unwrap();
    let p = snap_fy(&m).unwrap();
    let v = snapper_to_json(&p);
    assert_eq!(v["basis"], "rising");
    assert_eq!(snapper_from_json(&v, 3).unwrap(), p);
}

#[test]
fn zeta_matrix_round_trips() {
    let rings = MatroidRings::new(&uniform(2, 3).unwrap(), Flavor::Augmented).unwrap();
    let v = zeta_to_json(&rings);
    let (matrix, inverse) = zeta_matrix_from_json(&v).unwrap();
    assert_eq!(matrix, rings.zeta.matrix);
    assert_eq!(inverse, rings.zeta.inverse);
    assert_eq!(v["k_basis"].as_array().unwrap().len(), rings.k.rank());
}
