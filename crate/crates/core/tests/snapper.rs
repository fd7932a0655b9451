use std::collections::BTreeMap;

use mkr_core::chow::chow_ring;
use mkr_core::fy::{Flavor, FlatMultiIndex};
use mkr_core::kring::MatroidRings;
use mkr_core::matroid::{boolean, graphic_k4, uniform, Matroid, Subset};
use mkr_core::snapper::{
    all_flags, c_flag, flag_degree, flag_volume, recursion_check, rising_binom, snap_fy, snap_fy_from_ring,
    snap_fy_twovar, snap_simplicial,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

fn fy_set() -> Vec<(&'static str, Matroid)> {
    vec![
        ("U23", uniform(2, 3).unwrap()),
        ("U34", uniform(3, 4).unwrap()),
        ("B3", boolean(3).unwrap()),
        ("K4", graphic_k4()),
    ]
}

#[test]
fn rising_binomials() {
    assert_eq!(rising_binom(7, 0), BigInt::one());
    assert_eq!(rising_binom(-1, 2), BigInt::zero());
    assert_eq!(rising_binom(2, 3), BigInt::from(4));
    // x^{(d)} = (−1)^d C(−x, d), checked by the falling product
    for x in -6i64..6 {
        for d in 0u32..5 {
            let mut falling = BigInt::one();
            for i in 0..d as i64 {
                falling *= -x - i;
            }
            let fact: BigInt = (1..=d as i64).map(BigInt::from).product();
            let sign = if d % 2 == 0 { 1 } else { -1 };
            assert_eq!(rising_binom(x, d), falling / fact * sign);
        }
    }
}

#[test]
fn fy_coefficients_match_ring() {
    for (name, m) in fy_set() {
        let rings = MatroidRings::new(&m, Flavor::Plain).unwrap();
        let from_ring = snap_fy_from_ring(&rings).unwrap();
        let formula = snap_fy(&m).unwrap();
        assert_eq!(formula, from_ring, "{name}");
        assert_eq!(formula.coeff(&FlatMultiIndex::new()), BigInt::one());
    }
}

#[test]
fn fy_coefficients_vanish_past_truncation() {
    let m = uniform(3, 4).unwrap();
    let r = m.rank();
    for flag in all_flags(&m).unwrap() {
        let k = flag.len();
        if k > r {
            continue;
        }
        let extra = r - k + 1;
        // every tuple of total r − k + 1
        let mut stack = vec![vec![]];
        while let Some(t) = stack.pop() {
            let used: u32 = t.iter().sum();
            if t.len() == k + 1 {
                if used as usize == extra {
                    assert!(c_flag(&flag, &t).unwrap().is_zero());
                }
                continue;
            }
            for e in 0..=(extra as u32 - used) {
                let mut n = t.clone();
                n.push(e);
                stack.push(n);
            }
        }
    }
}

fn line_bundle_chi(rings: &MatroidRings, a: &BTreeMap<Subset, i64>) -> BigInt {
    rings.euler_char(&rings.k.line_bundle_class(a).unwrap()).unwrap()
}

#[test]
fn two_variable_specialization() {
    let mut ms = fy_set();
    ms.push(("B2", boolean(2).unwrap()));
    for (name, m) in ms {
        let rings = MatroidRings::new(&m, Flavor::Plain).unwrap();
        let snap = snap_fy(&m).unwrap();
        let e = m.ground();
        for a0 in -3i64..=3 {
            for ae in -3i64..=3 {
                let closed = snap_fy_twovar(&m, a0, ae).unwrap();
                let poly = snap.eval(|f| if f == 0 { a0 } else if f == e { ae } else { 0 });
                assert_eq!(closed, poly, "{name} {a0} {ae}");
                let a: BTreeMap<Subset, i64> = [(0, a0), (e, ae)].into_iter().collect();
                assert_eq!(closed, line_bundle_chi(&rings, &a), "{name} {a0} {ae}");
            }
        }
        assert_eq!(snap_fy_twovar(&m, 0, 0).unwrap(), BigInt::one());
    }
}

#[test]
fn fy_snapper_is_euler_characteristic_of_line_bundles() {
    let m = graphic_k4();
    let rings = MatroidRings::new(&m, Flavor::Plain).unwrap();
    let snap = snap_fy(&m).unwrap();
    let flats = m.lattice().unwrap().flats().to_vec();
    for s in 0..10i64 {
        let a: BTreeMap<Subset, i64> = flats.iter().enumerate().map(|(i, &f)| (f, (i as i64 * 7 + s * 3) % 5 - 2)).collect();
        assert_eq!(snap.eval(|f| a[&f]), line_bundle_chi(&rings, &a));
    }
}

#[test]
fn simplicial_snapper_is_euler_characteristic() {
    for m in [uniform(2, 3).unwrap(), uniform(3, 4).unwrap(), boolean(3).unwrap()] {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let rings = MatroidRings::new(&m, flavor).unwrap();
            let snap = snap_simplicial(&m, flavor).unwrap();
            assert!(snap.terms.values().all(|c| c.is_one()));
            assert_eq!(snap.coeff(&FlatMultiIndex::new()), BigInt::one());
            assert_eq!(snap.eval(|_| 0), BigInt::one());
            let flats = m.lattice().unwrap().flats()[1..].to_vec();
            let one = rings.k.ring().one();
            for s in 0..6i64 {
                let a: Vec<i64> = (0..flats.len()).map(|i| (i as i64 * 5 + s * 2) % 7 - 3).collect();
                let mut class = one.clone();
                for (i, &f) in flats.iter().enumerate() {
                    let l_inv = &one - &rings.k.eta_class(f).unwrap();
                    class = &class * &l_inv.powi(-a[i]).unwrap();
                }
                let by_poly = snap.eval(|f| a[flats.iter().position(|&g| g == f).unwrap()]);
                assert_eq!(by_poly, rings.euler_char(&class).unwrap());
            }
            // closed under restriction to sub-supports
            for idx in snap.terms.keys() {
                let pairs = idx.pairs();
                for mask in 0u32..(1 << pairs.len()) {
                    let sub = FlatMultiIndex::from_pairs(
                        pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p),
                    );
                    assert!(snap.terms.contains_key(&sub));
                }
            }
        }
    }
    assert_eq!(snap_simplicial(&boolean(1).unwrap(), Flavor::Plain).unwrap().terms.len(), 1);
}

#[test]
fn flag_degrees_match_ring() {
    for m in [graphic_k4(), uniform(3, 4).unwrap()] {
        let a = chow_ring(&m, Flavor::Plain).unwrap();
        let r = m.rank();
        let mut checked = 0;
        for flag in all_flags(&m).unwrap() {
            let k = flag.len();
            if k > r {
                continue;
            }
            let mut stack = vec![vec![]];
            while let Some(t) = stack.pop() {
                let used: u32 = t.iter().sum();
                if t.len() == k + 1 {
                    if used as usize == r - k {
                        let idx = flag.index(&t);
                        let ring = a.degree(&a.t_monomial(&idx).unwrap()).unwrap();
                        assert_eq!(flag_degree(&m, &flag, &t).unwrap(), ring);
                        if t[0] == 0 && t[k] == 0 {
                            assert_eq!(flag_volume(&m, &flag, &t[1..k]).unwrap(), ring);
                        }
                        checked += 1;
                    }
                    continue;
                }
                for e in 0..=((r - k) as u32 - used) {
                    let mut n = t.clone();
                    n.push(e);
                    stack.push(n);
                }
            }
        }
        assert!(checked > 0);
    }
    // single-step flag on U34 with m = (0, r − 1)
    let m = uniform(3, 4).unwrap();
    let flag = all_flags(&m).unwrap().into_iter().find(|f| f.len() == 1).unwrap();
    assert_eq!(flag_degree(&m, &flag, &[0, 2]).unwrap(), BigInt::one());
    assert!(flag_degree(&m, &flag, &[0, 1]).is_err());
}

#[test]
fn recursion_holds_at_sampled_points() {
    for m in [uniform(2, 3).unwrap(), boolean(3).unwrap(), graphic_k4()] {
        for g in 1..m.ground() {
            let rep = recursion_check(&m, g, 20, 7).unwrap();
            assert_eq!(rep.failures, 0, "G = {g:b}");
        }
    }
}
