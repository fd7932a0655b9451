use mkr_core::appendix::{appendix_report, check_appendix_presentation, simplicial_quotient};
use mkr_core::chow::chow_ring;
use mkr_core::fy::Flavor;
use mkr_core::matroid::{boolean, graphic_k4, uniform, Matroid};

fn small() -> Vec<(&'static str, Matroid)> {
    vec![
        ("U12", uniform(1, 2).unwrap()),
        ("U23", uniform(2, 3).unwrap()),
        ("U24", uniform(2, 4).unwrap()),
        ("U34", uniform(3, 4).unwrap()),
        ("U25", uniform(2, 5).unwrap()),
        ("B2", boolean(2).unwrap()),
        ("B3", boolean(3).unwrap()),
        ("B4", boolean(4).unwrap()),
    ]
}

#[test]
fn presentation_holds_for_small_matroids() {
    for (name, m) in small() {
        let rep = appendix_report(&m).unwrap();
        assert!(rep.passed(), "{name}: {rep:?}");
    }
}

#[test]
fn presentation_holds_for_k4() {
    assert!(check_appendix_presentation(&graphic_k4()).unwrap());
}

#[test]
fn atom_squares_vanish_augmented() {
    let m = uniform(2, 3).unwrap();
    let chow = chow_ring(&m, Flavor::Augmented).unwrap();
    for e in 0..3 {
        let h = chow.h_class(1 << e).unwrap();
        assert!((&h * &h).is_zero());
    }
}

#[test]
fn quotient_ranks_match_rings() {
    // Graded ranks of A(U23) are 1,1 and of A^aug(U23) are 1,4,1.
    let lat = uniform(2, 3).unwrap().lattice().unwrap();
    let (q, _) = simplicial_quotient(&lat, Flavor::Plain).unwrap();
    assert_eq!(q.graded_ranks(), vec![1, 1]);
    let (q, _) = simplicial_quotient(&lat, Flavor::Augmented).unwrap();
    assert_eq!(q.graded_ranks(), vec![1, 4, 1]);
}

#[test]
fn plain_quotient_is_smaller_than_augmented() {
    // Plain kills atoms outright; augmented only their squares.
    let lat = boolean(2).unwrap().lattice().unwrap();
    let (plain, flats) = simplicial_quotient(&lat, Flavor::Plain).unwrap();
    let (aug, _) = simplicial_quotient(&lat, Flavor::Augmented).unwrap();
    assert_eq!(flats.len(), 3);
    assert_eq!(plain.graded_ranks(), vec![1, 1]);
    assert_eq!(aug.graded_ranks(), vec![1, 3, 1]);
}
