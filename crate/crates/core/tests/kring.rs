use mkr_core::chow::chain_multi_indices;
use mkr_core::chow::all_multi_indices;
use mkr_core::fy::{Flavor, FlatMultiIndex};
use mkr_core::kring::{
    compatibility_check, euler_simplicial, k_ring, omega_class, polytope_coeffs, restrict_k, serre_check,
    simplicial_flats, structure_sheaf_class, MatroidRings, RayLabel,
};
use mkr_core::matroid::{boolean, fano, graphic_k4, uniform, Matroid, Subset};
use mkr_core::zring::determinant;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

fn small_set() -> Vec<(&'static str, Matroid)> {
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
fn k_ring_ranks_match_chow() {
    assert_eq!(k_ring(&uniform(2, 3).unwrap(), Flavor::Plain).unwrap().rank(), 2);
    assert_eq!(k_ring(&boolean(2).unwrap(), Flavor::Plain).unwrap().rank(), 2);
    for (name, m) in small_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let k = k_ring(&m, flavor).unwrap();
            let a = mkr_core::chow::chow_ring(&m, flavor).unwrap();
            assert_eq!(k.rank(), a.rank(), "{name} {flavor}");
        }
    }
}

#[test]
fn k_relations_hold() {
    let m = graphic_k4();
    let lat = m.lattice().unwrap();
    let k = k_ring(&m, Flavor::Plain).unwrap();
    let one = k.ring().one();
    let mut prod = one.clone();
    for &f in lat.flats() {
        prod = &prod * &(&one - &k.tau_class(f).unwrap());
    }
    assert_eq!(prod, one);
    for i in lat.by_rank(1) {
        assert!(k.eta_class(lat.flat(*i)).unwrap().is_zero());
    }
    for i in 0..lat.len() {
        for j in 0..lat.len() {
            if !lat.comparable(i, j) {
                assert!((&k.tau_class(lat.flat(i)).unwrap() * &k.tau_class(lat.flat(j)).unwrap()).is_zero());
            }
        }
    }
}

#[test]
fn line_bundles() {
    let m = uniform(2, 3).unwrap();
    let k = k_ring(&m, Flavor::Plain).unwrap();
    let one = k.ring().one();
    let t = k.tau_class(7).unwrap();
    assert_eq!(k.line_bundle_class(&Default::default()).unwrap(), one);
    assert_eq!(k.line_bundle_class(&[(7, -1)].into_iter().collect()).unwrap(), &one - &t);
    let geometric = &(&one + &t) + &(&t * &t);
    assert_eq!(k.line_bundle_class(&[(7, 1)].into_iter().collect()).unwrap(), geometric);
}

#[test]
fn zeta_is_unimodular_and_sends_eta_to_h() {
    for (name, m) in small_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let rings = MatroidRings::new(&m, flavor).unwrap();
            assert!(rings.zeta.determinant().abs().is_one(), "{name}");
            let flats = simplicial_flats(rings.k.fy());
            let trunc = rings.k.ring().truncation();
            for idx in chain_multi_indices(rings.k.fy(), &flats, 0, trunc) {
                let z = rings.zeta_apply(&rings.k.eta_monomial(&idx).unwrap()).unwrap();
                assert_eq!(z, rings.chow.h_monomial(&idx).unwrap(), "{name} {flavor} {idx:?}");
            }
            // ζ(τ_∅) = t_∅ and ζ(τ_E) = t_E / (1 + t_E)
            let a1 = rings.chow.ring().one();
            let t0 = rings.chow.t_class(0).unwrap();
            assert_eq!(rings.zeta_apply(&rings.k.tau_class(0).unwrap()).unwrap(), t0);
            let te = rings.chow.t_class(m.ground()).unwrap();
            let expect = &te * &(&a1 + &te).inverse_unipotent().unwrap();
            assert_eq!(rings.zeta_apply(&rings.k.tau_class(m.ground()).unwrap()).unwrap(), expect);
            // ring homomorphism on basis pairs
            let kb = rings.k.ring();
            for i in 0..kb.rank() {
                for j in 0..kb.rank() {
                    let (x, y) = (kb.basis_element(i), kb.basis_element(j));
                    let lhs = rings.zeta_apply(&(&x * &y)).unwrap();
                    let rhs = &rings.zeta_apply(&x).unwrap() * &rings.zeta_apply(&y).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn euler_characteristic_matches_hall_rado() {
    for (name, m) in small_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let rings = MatroidRings::new(&m, flavor).unwrap();
            assert_eq!(rings.euler_char(&rings.k.ring().one()).unwrap(), BigInt::one());
            let flats: Vec<Subset> = m.lattice().unwrap().flats()[1..].to_vec();
            let hi = if m.ground_size() > 4 { 2 } else { m.rank() };
            for idx in all_multi_indices(&flats, 0, hi) {
                let chi = rings.euler_char(&rings.k.eta_monomial(&idx).unwrap()).unwrap();
                assert_eq!(chi, BigInt::from(euler_simplicial(&m, &idx, flavor)), "{name} {flavor} {idx:?}");
            }
        }
    }
    let rings = MatroidRings::new(&uniform(2, 3).unwrap(), Flavor::Plain).unwrap();
    let eta_e = rings.k.eta_class(7).unwrap();
    assert_eq!(rings.euler_char(&eta_e).unwrap(), BigInt::one());
}

#[test]
fn euler_pairing_is_unimodular() {
    for (name, m) in small_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let rings = MatroidRings::new(&m, flavor).unwrap();
            let kb = rings.k.ring();
            let p: Vec<Vec<BigInt>> = (0..kb.rank())
                .map(|i| {
                    (0..kb.rank())
                        .map(|j| rings.euler_char(&(&kb.basis_element(i) * &kb.basis_element(j))).unwrap())
                        .collect()
                })
                .collect();
            assert!(determinant(&p).abs().is_one(), "{name} {flavor}");
        }
    }
}

#[test]
fn adams_and_duality() {
    for (name, m) in small_set() {
        for flavor in [Flavor::Plain, Flavor::Augmented] {
            let k = k_ring(&m, flavor).unwrap();
            let kb = k.ring();
            let psi1 = k.adams_operator(1).unwrap();
            let psi2 = k.adams_operator(2).unwrap();
            let psi3 = k.adams_operator(3).unwrap();
            let psi6 = k.adams_operator(6).unwrap();
            let d = k.duality_operator().unwrap();
            for i in 0..kb.rank() {
                let x = kb.basis_element(i);
                assert_eq!(psi1.apply(&x), x);
                assert_eq!(psi2.apply(&psi3.apply(&x)), psi6.apply(&x), "{name}");
                assert_eq!(d.apply(&d.apply(&x)), x);
                assert_eq!(k.epsilon(&d.apply(&x)), k.epsilon(&x));
                assert_eq!(k.epsilon(&psi3.apply(&x)), k.epsilon(&x));
                for j in 0..kb.rank() {
                    let y = kb.basis_element(j);
                    assert_eq!(psi2.apply(&(&x * &y)), &psi2.apply(&x) * &psi2.apply(&y));
                    assert_eq!(d.apply(&(&x * &y)), &d.apply(&x) * &d.apply(&y));
                    assert_eq!(k.epsilon(&(&x * &y)), k.epsilon(&x) * k.epsilon(&y));
                }
            }
            // Ψ^k(η_F) = Σ (−1)^{i+1} C(k,i) η_F^i and D(η_F) = −η_F/(1−η_F)
            let lat = m.lattice().unwrap();
            let one = kb.one();
            for &f in &lat.flats()[1..] {
                let eta = k.eta_class(f).unwrap();
                let mut expect = kb.zero();
                let mut binom = BigInt::one();
                for i in 1..=3u32 {
                    binom = binom * BigInt::from(3 - i + 1) / BigInt::from(i);
                    let term = eta.pow(i).scale(&binom);
                    expect = if i % 2 == 1 { &expect + &term } else { &expect - &term };
                }
                assert_eq!(psi3.apply(&eta), expect);
                let dual = -&(&eta * &(&one - &eta).inverse_unipotent().unwrap());
                assert_eq!(d.apply(&eta), dual);
                assert!(k.epsilon(&eta).is_zero());
            }
            // Π_{j=0}^{dim} (Ψ² − 2^j) = 0
            let dim = match flavor {
                Flavor::Plain => m.rank() - 1,
                Flavor::Augmented => m.rank(),
            };
            for i in 0..kb.rank() {
                let mut x = kb.basis_element(i);
                for j in 0..=dim {
                    x = &psi2.apply(&x) - &x.scale(&BigInt::from(1u64 << j));
                }
                assert!(x.is_zero(), "{name} {flavor}");
            }
        }
    }
}

#[test]
fn lambda_operations() {
    let k = k_ring(&graphic_k4(), Flavor::Plain).unwrap();
    let kb = k.ring();
    for i in 0..kb.rank() {
        let x = kb.basis_element(i);
        assert_eq!(k.lambda(1, &x).unwrap(), x);
        let l2 = k.lambda(2, &x).unwrap();
        let twice = &(&x * &x) - &k.adams(2, &x).unwrap();
        assert_eq!(l2.scale(&BigInt::from(2)), twice);
    }
    assert!(k.lambda(3, &kb.zero()).unwrap().is_zero());
    assert_eq!(k.lambda(0, &kb.basis_element(0)).unwrap(), kb.one());
}

#[test]
fn polytope_coefficients() {
    let b = boolean(3).unwrap();
    assert!(polytope_coeffs(&b, Flavor::Plain).a.values().all(|&a| a == 0));
    let u12 = uniform(1, 2).unwrap();
    assert_eq!(polytope_coeffs(&u12, Flavor::Plain).a[&RayLabel::Subset(1)], 0);
    let aug = polytope_coeffs(&uniform(2, 4).unwrap(), Flavor::Augmented);
    for e in 0..4 {
        assert_eq!(aug.a[&RayLabel::Element(e)], 0);
    }
}

#[test]
fn serre_duality_plain() {
    let mut ms = small_set();
    ms.push(("F7", fano()));
    for (name, m) in ms {
        let rings = MatroidRings::new(&m, Flavor::Plain).unwrap();
        let omega = omega_class(&rings.k).unwrap();
        assert_eq!(rings.k.epsilon(&omega), BigInt::one());
        let d = rings.k.duality_operator().unwrap();
        for j in 0..rings.k.rank() {
            let xi = rings.k.ring().basis_element(j);
            let rep = serre_check(&rings, &xi, &omega, &d).unwrap();
            assert!(rep.holds_with_omega(), "{name} basis {j}: {rep:?}");
        }
        let r = m.rank() as i64;
        let f = |l: i64| rings.euler_char(&omega.powi(l).unwrap()).unwrap();
        for l in -2..=3 {
            let sign = if (r - 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(f(l), f(1 - l) * sign, "{name} l={l}");
        }
    }
    let u11 = uniform(1, 1).unwrap();
    let k = k_ring(&u11, Flavor::Plain).unwrap();
    assert_eq!(omega_class(&k).unwrap(), k.ring().one());
}

#[test]
fn serre_duality_augmented_needs_omega() {
    for m in [uniform(1, 2).unwrap(), uniform(2, 3).unwrap(), boolean(2).unwrap()] {
        let rings = MatroidRings::new(&m, Flavor::Augmented).unwrap();
        let omega = omega_class(&rings.k).unwrap();
        let d = rings.k.duality_operator().unwrap();
        let mut without = 0;
        for j in 0..rings.k.rank() {
            let rep = serre_check(&rings, &rings.k.ring().basis_element(j), &omega, &d).unwrap();
            assert!(rep.holds_with_omega());
            without += usize::from(rep.holds_without_omega());
        }
        assert!(without < rings.k.rank());
    }
    let rings = MatroidRings::new(&uniform(1, 2).unwrap(), Flavor::Augmented).unwrap();
    let omega = omega_class(&rings.k).unwrap();
    let d = rings.k.duality_operator().unwrap();
    let rep = serre_check(&rings, &rings.k.ring().one(), &omega, &d).unwrap();
    assert_eq!(rep.lhs, BigInt::one());
    assert!(rep.holds_with_omega());
}

#[test]
fn restriction_and_structure_sheaf() {
    for flavor in [Flavor::Plain, Flavor::Augmented] {
        let b = MatroidRings::new(&boolean(3).unwrap(), flavor).unwrap();
        let m = uniform(2, 3).unwrap();
        let t = MatroidRings::new(&m, flavor).unwrap();
        for s in 1u32..8 {
            let r = restrict_k(&b.k, &t.k, &b.k.eta_class(s).unwrap()).unwrap();
            let cl = m.closure_of(s);
            if flavor == Flavor::Augmented || m.rank_of(cl) >= 2 {
                assert_eq!(r, t.k.eta_class(cl).unwrap());
            } else {
                assert!(r.is_zero());
            }
        }
        assert_eq!(structure_sheaf_class(&b, &b).unwrap(), b.k.ring().one());
        let rep = compatibility_check(&b, &t).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}

#[test]
fn eta_monomial_zero_index() {
    let k = k_ring(&uniform(2, 3).unwrap(), Flavor::Plain).unwrap();
    assert_eq!(k.eta_monomial(&FlatMultiIndex::new()).unwrap(), k.ring().one());
}
