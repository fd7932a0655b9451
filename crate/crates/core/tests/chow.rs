use mkr_core::chow::{bergman_class, chow_ring, degree_simplicial, dhr_check, hr_check, all_multi_indices, restrict_from_boolean};
use mkr_core::fy::{Flavor, FlatMultiIndex};
use mkr_core::matroid::{boolean, fano, graphic_k4, uniform, Matroid, Subset};
use num_bigint::BigInt;

/// Graded ranks counted from the nested-chain monomial basis:
/// chains ∅ ⊊ F1 ⊊ ... ⊊ Fk of flats with exponents
/// 1 ≤ a_i ≤ rk F_i − rk F_{i−1} − 1, except that in the augmented case
/// the first exponent may reach rk F_1.
fn chain_basis_ranks(m: &Matroid, flavor: Flavor) -> Vec<usize> {
    let lat = m.lattice().unwrap();
    let top = match flavor {
        Flavor::Plain => m.rank() - 1,
        Flavor::Augmented => m.rank(),
    };
    let mut counts = vec![0usize; top + 1];
    fn go(lat: &mkr_core::matroid::FlatLattice, last: usize, first: bool, deg: usize, flavor: Flavor, counts: &mut Vec<usize>) {
        counts[deg] += 1;
        for next in 0..lat.len() {
            if next == last || !lat.leq(last, next) {
                continue;
            }
            let gap = lat.rank_of_flat(next) - lat.rank_of_flat(last);
            let max = if first && flavor == Flavor::Augmented { gap } else { gap - 1 };
            for a in 1..=max {
                if deg + a < counts.len() {
                    go(lat, next, false, deg + a, flavor, counts);
                }
            }
        }
    }
    go(&lat, lat.bottom(), true, 0, flavor, &mut counts);
    counts
}

fn test_set() -> Vec<(&'static str, Matroid)> {
    vec![
        ("U12", uniform(1, 2).unwrap()),
        ("U23", uniform(2, 3).unwrap()),
        ("U24", uniform(2, 4).unwrap()),
        ("U34", uniform(3, 4).unwrap()),
        ("B2", boolean(2).unwrap()),
        ("B3", boolean(3).unwrap()),
        ("K4", graphic_k4()),
    ]
}

#[test]
fn graded_ranks_match_chain_basis() {
    for (name, m) in test_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let a = chow_ring(&m, flavor).unwrap();
            assert_eq!(a.graded_ranks(), chain_basis_ranks(&m, flavor), "{name} {flavor}");
        }
    }
}

#[test]
fn small_graded_ranks() {
    assert_eq!(chow_ring(&uniform(2, 3).unwrap(), Flavor::Plain).unwrap().graded_ranks(), vec![1, 1]);
    assert_eq!(chow_ring(&boolean(2).unwrap(), Flavor::Plain).unwrap().graded_ranks(), vec![1, 1]);
    assert_eq!(chain_basis_ranks(&uniform(2, 3).unwrap(), Flavor::Augmented), vec![1, 4, 1]);
}

#[test]
fn point_class_has_degree_one() {
    for (name, m) in test_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let a = chow_ring(&m, flavor).unwrap();
            let p = a.h_class(m.ground()).unwrap().pow(a.top_degree() as u32);
            assert_eq!(a.degree(&p).unwrap(), BigInt::from(1), "{name}");
            assert_eq!(a.h_class(m.ground()).unwrap(), -&a.t_class(m.ground()).unwrap());
        }
    }
}

#[test]
fn degree_of_bottom_top_monomials_is_signed_mu() {
    for (name, m) in test_set() {
        let a = chow_ring(&m, Flavor::Plain).unwrap();
        let mu = mkr_core::matroid::char_poly_mu(&m).unwrap();
        let r = m.rank();
        for e in 0..r {
            let l = r - 1 - e;
            let mut idx = FlatMultiIndex::new();
            idx.add(0, e as u32);
            idx.add(m.ground(), l as u32);
            let d = a.degree(&a.t_monomial(&idx).unwrap()).unwrap();
            let sign = if (r - 1) % 2 == 0 { 1i64 } else { -1 };
            assert_eq!(d, BigInt::from(sign * mu.mu[e] as i64), "{name} e={e}");
        }
    }
}

#[test]
fn incomparable_products_vanish() {
    let m = graphic_k4();
    for flavor in [Flavor::Plain, Flavor::Augmented] {
        let a = chow_ring(&m, flavor).unwrap();
        let lat = m.lattice().unwrap();
        for i in 0..lat.len() {
            for j in 0..lat.len() {
                let p = &a.t_class(lat.flat(i)).unwrap() * &a.t_class(lat.flat(j)).unwrap();
                if !lat.comparable(i, j) {
                    assert!(p.is_zero());
                }
            }
        }
        if flavor == Flavor::Augmented {
            for e in 0..m.ground_size() {
                for i in 0..lat.len() {
                    let f = lat.flat(i);
                    if f >> e & 1 == 0 {
                        assert!((&a.y_class(e).unwrap() * &a.t_class(f).unwrap()).is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn simplicial_relations() {
    let m = graphic_k4();
    let lat = m.lattice().unwrap();
    let a = chow_ring(&m, Flavor::Plain).unwrap();
    for i in lat.by_rank(1) {
        assert!(a.h_class(lat.flat(*i)).unwrap().is_zero());
    }
    for i in 1..lat.len() {
        for j in 1..lat.len() {
            let (f, g) = (lat.flat(i), lat.flat(j));
            let fg = lat.flat(lat.join(i, j));
            let hfg = a.h_class(fg).unwrap();
            let p = &(&a.h_class(f).unwrap() - &hfg) * &(&a.h_class(g).unwrap() - &hfg);
            assert!(p.is_zero());
        }
    }
}

#[test]
fn simplicial_degrees_match_hall_rado() {
    for (name, m) in test_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let a = chow_ring(&m, flavor).unwrap();
            let flats: Vec<Subset> = m.lattice().unwrap().flats()[1..].to_vec();
            let top = a.top_degree();
            for idx in all_multi_indices(&flats, top, top) {
                let ring = a.degree(&a.h_monomial(&idx).unwrap()).unwrap();
                let comb = degree_simplicial(&m, &idx, flavor).unwrap();
                assert_eq!(ring, BigInt::from(comb), "{name} {flavor} {idx:?}");
            }
        }
    }
}

#[test]
fn hall_rado_examples() {
    let m = uniform(2, 3).unwrap();
    assert!(dhr_check(&m, &FlatMultiIndex::new()));
    assert!(!dhr_check(&m, &FlatMultiIndex::single(0b001, 1)));
    assert!(hr_check(&m, &FlatMultiIndex::single(0b001, 1)));
    assert!(dhr_check(&m, &FlatMultiIndex::single(0b111, 1)));
    assert!(degree_simplicial(&m, &FlatMultiIndex::single(0b111, 2), Flavor::Plain).is_err());
    let b = boolean(2).unwrap();
    assert_eq!(degree_simplicial(&b, &FlatMultiIndex::single(0b11, 2), Flavor::Augmented).unwrap(), 1);
}

#[test]
fn poincare_pairing_is_unimodular() {
    let mut ms = test_set();
    ms.push(("F7", fano()));
    for (name, m) in ms {
        let a = chow_ring(&m, Flavor::Plain).unwrap();
        assert!(a.poincare_unimodular(), "{name}");
        let ranks = a.graded_ranks();
        let rev: Vec<usize> = ranks.iter().rev().copied().collect();
        assert_eq!(ranks, rev);
    }
    let a = chow_ring(&boolean(3).unwrap(), Flavor::Augmented).unwrap();
    assert!(a.poincare_unimodular());
}

#[test]
fn restriction_and_bergman_class() {
    for flavor in [Flavor::Plain, Flavor::Augmented] {
        let b = chow_ring(&boolean(3).unwrap(), flavor).unwrap();
        let m = uniform(2, 3).unwrap();
        let a = chow_ring(&m, flavor).unwrap();
        // ι^* h_S = h_{cl S}
        for s in 1u32..8 {
            let h = restrict_from_boolean(&b, &a, &b.h_class(s).unwrap()).unwrap();
            let cl = m.closure_of(s);
            assert_eq!(h, a.h_class(cl).unwrap());
            if !m.is_flat(s) {
                assert!(restrict_from_boolean(&b, &a, &b.t_class(s).unwrap()).unwrap().is_zero());
            }
        }
        let one = restrict_from_boolean(&b, &a, &b.ring().one()).unwrap();
        assert_eq!(one, a.ring().one());
        let delta = bergman_class(&b, &a).unwrap();
        for j in 0..b.rank() {
            let xi = b.ring().basis_element(j);
            let lhs = a.degree(&restrict_from_boolean(&b, &a, &xi).unwrap()).unwrap();
            let rhs = b.degree(&(&xi * &delta)).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert_eq!(bergman_class(&b, &b).unwrap(), b.ring().one());
    }
}
