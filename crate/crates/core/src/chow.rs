//! Chow rings A(M) and augmented Chow rings A^aug(M) of loopless matroids.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fy::{Flavor, FlatMultiIndex, FyRing, Theory};
use crate::matroid::{elements, Matroid, Subset};
use crate::zring::{determinant, inverse_unimodular, Matrix, QuotientRing, RingElement};

/// A(M) or A^aug(M) with its degree normalization.
#[derive(Clone, Debug)]
pub struct ChowRing {
    fy: FyRing,
    top: usize,
    top_pos: usize,
    /// Coordinate of h_E^top on the top basis element (±1).
    point_sign: BigInt,
}

pub fn chow_ring(m: &Matroid, flavor: Flavor) -> Result<ChowRing> {
    let fy = FyRing::build(m, flavor, Theory::Chow)?;
    let top = match flavor {
        Flavor::Plain => m.rank() - 1,
        Flavor::Augmented => m.rank(),
    };
    let ring = fy.ring().clone();
    let tops: Vec<usize> = (0..ring.rank()).filter(|&p| ring.basis_degree(p) == top).collect();
    if tops.len() != 1 {
        return Err(Error::InvalidParameters(format!(
            "top degree {top} has rank {}",
            tops.len()
        )));
    }
    let mut chow = ChowRing {
        fy,
        top,
        top_pos: tops[0],
        point_sign: BigInt::one(),
    };
    let point = chow.h_class(m.ground())?.pow(top as u32);
    let c = point.coords()[chow.top_pos].clone();
    if !c.abs().is_one() {
        return Err(Error::InvalidParameters(format!("h_E^{top} has coordinate {c}")));
    }
    chow.point_sign = c;
    Ok(chow)
}

impl ChowRing {
    pub fn fy(&self) -> &FyRing {
        &self.fy
    }

    pub fn matroid(&self) -> &Matroid {
        self.fy.matroid()
    }

    pub fn flavor(&self) -> Flavor {
        self.fy.flavor()
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        self.fy.ring()
    }

    pub fn rank(&self) -> usize {
        self.fy.rank()
    }

    /// Degree of the point class: r−1 (plain) or r (augmented).
    pub fn top_degree(&self) -> usize {
        self.top
    }

    pub fn graded_ranks(&self) -> Vec<usize> {
        self.ring().graded_ranks()
    }

    /// The class t_F of the generator x_F.
    pub fn t_class(&self, f: Subset) -> Result<RingElement> {
        self.fy.generator(f)
    }

    pub fn y_class(&self, e: usize) -> Result<RingElement> {
        self.fy.y_generator(e)
    }

    /// h_F = −Σ_{G ⊇ F} t_G for a nonempty flat F.
    pub fn h_class(&self, f: Subset) -> Result<RingElement> {
        let i = self.fy.flat_index(f)?;
        if f == 0 {
            return Err(Error::InvalidParameters("h is indexed by nonempty flats".into()));
        }
        let lattice = self.fy.lattice();
        let ring = self.ring();
        let mut out = ring.zero();
        for j in lattice.above(i) {
            out = &out - &ring.var(j);
        }
        Ok(out)
    }

    /// Π h_F^{m_F}.
    pub fn h_monomial(&self, m: &FlatMultiIndex) -> Result<RingElement> {
        let mut out = self.ring().one();
        for (f, e) in m.pairs() {
            out = &out * &self.h_class(f)?.pow(e);
        }
        Ok(out)
    }

    /// Π t_F^{m_F} (flats may include ∅ and E).
    pub fn t_monomial(&self, m: &FlatMultiIndex) -> Result<RingElement> {
        Ok(self.ring().monomial(&self.fy.x_monomial(m)?))
    }

    /// Degree of the top-degree part, normalized so that the point class
    /// h_E^{top} has degree 1.
    pub fn degree(&self, class: &RingElement) -> Result<BigInt> {
        if class.ring().id() != self.ring().id() {
            return Err(Error::RingMismatch);
        }
        Ok(&class.coords()[self.top_pos] * &self.point_sign)
    }

    /// Basis positions of degree `j`.
    pub fn positions_of_degree(&self, j: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&p| self.ring().basis_degree(p) == j).collect()
    }

    /// Matrix of deg(b·b') for b of degree j and b' of degree top−j.
    pub fn pairing_matrix(&self, j: usize) -> Matrix {
        let ring = self.ring();
        let rows = self.positions_of_degree(j);
        let cols = self.positions_of_degree(self.top - j);
        rows.iter()
            .map(|&a| {
                cols.iter()
                    .map(|&b| self.degree(&(&ring.basis_element(a) * &ring.basis_element(b))).unwrap())
                    .collect()
            })
            .collect()
    }

    /// Whether every graded pairing A^j × A^{top−j} → Z is unimodular.
    pub fn poincare_unimodular(&self) -> bool {
        (0..=self.top).all(|j| {
            let p = self.pairing_matrix(j);
            p.iter().all(|r| r.len() == p.len()) && determinant(&p).abs().is_one()
        })
    }

    /// Full pairing matrix deg(b_i b_j) over all basis elements.
    pub fn full_pairing(&self) -> Matrix {
        let ring = self.ring();
        (0..self.rank())
            .map(|a| {
                (0..self.rank())
                    .map(|b| self.degree(&(&ring.basis_element(a) * &ring.basis_element(b))).unwrap())
                    .collect()
            })
            .collect()
    }
}

/// Whether every nonempty support-restriction m' of m satisfies
/// rk(∪ supp m') ≥ Σ m' (or > when `strict`).
fn rank_condition(m: &Matroid, idx: &FlatMultiIndex, strict: bool) -> bool {
    let pairs = idx.pairs();
    let k = pairs.len();
    for mask in 1u64..(1u64 << k) {
        let mut union: Subset = 0;
        let mut total = 0usize;
        for (i, &(f, e)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                union |= f;
                total += e as usize;
            }
        }
        let r = m.rank_of(union);
        if r < total || (strict && r == total) {
            return false;
        }
    }
    true
}

/// The Hall–Rado condition.
pub fn hr_check(m: &Matroid, idx: &FlatMultiIndex) -> bool {
    rank_condition(m, idx, false)
}

/// The dragon Hall–Rado condition (strict inequalities).
pub fn dhr_check(m: &Matroid, idx: &FlatMultiIndex) -> bool {
    rank_condition(m, idx, true)
}

/// Condition matching the flavor: dragon Hall–Rado for plain, Hall–Rado
/// for augmented.
pub fn simplicial_condition(m: &Matroid, idx: &FlatMultiIndex, flavor: Flavor) -> bool {
    match flavor {
        Flavor::Plain => dhr_check(m, idx),
        Flavor::Augmented => hr_check(m, idx),
    }
}

/// Combinatorial degree of Π h_F^{m_F}: 1 if the flavor's Hall–Rado
/// condition holds, 0 otherwise.
pub fn degree_simplicial(m: &Matroid, idx: &FlatMultiIndex, flavor: Flavor) -> Result<u8> {
    let expected = match flavor {
        Flavor::Plain => m.rank() - 1,
        Flavor::Augmented => m.rank(),
    };
    if idx.total() != expected {
        return Err(Error::WrongTotalDegree {
            expected,
            found: idx.total(),
        });
    }
    Ok(u8::from(simplicial_condition(m, idx, flavor)))
}

/// Every multi-index on nonempty flats with total between `lo` and `hi`
/// whose support is a chain. Each is listed once.
pub fn chain_multi_indices(chow_or_k: &FyRing, flats: &[usize], lo: usize, hi: usize) -> Vec<FlatMultiIndex> {
    let lattice = chow_or_k.lattice();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<(usize, u32)>, usize)> = vec![(Vec::new(), 0)];
    while let Some((cur, start)) = stack.pop() {
        let total: usize = cur.iter().map(|&(_, e)| e as usize).sum();
        if total >= lo {
            out.push(FlatMultiIndex::from_pairs(cur.iter().map(|&(i, e)| (lattice.flat(flats[i]), e))));
        }
        if total == hi {
            continue;
        }
        for i in start..flats.len() {
            if cur.iter().any(|&(j, _)| !lattice.comparable(flats[i], flats[j])) {
                continue;
            }
            for e in 1..=(hi - total) as u32 {
                let mut next = cur.clone();
                next.push((i, e));
                stack.push((next, i + 1));
            }
        }
    }
    out.sort();
    out
}

/// Every multi-index on the given flats with total in `lo..=hi`.
pub fn all_multi_indices(flats: &[Subset], lo: usize, hi: usize) -> Vec<FlatMultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; flats.len()];
    fn rec(i: usize, left: usize, flats: &[Subset], cur: &mut Vec<u32>, lo: usize, hi: usize, out: &mut Vec<FlatMultiIndex>) {
        if i == flats.len() {
            let total = hi - left;
            if total >= lo {
                out.push(FlatMultiIndex::from_pairs(flats.iter().copied().zip(cur.iter().copied())));
            }
            return;
        }
        for e in 0..=left {
            cur[i] = e as u32;
            rec(i + 1, left - e, flats, cur, lo, hi, out);
        }
        cur[i] = 0;
    }
    rec(0, hi, flats, &mut cur, lo, hi, &mut out);
    out
}

/// ι^*: restrict a class on the Boolean ring of the same ground set and
/// flavor to A(M): t_S ↦ t_S for flats S of M, 0 otherwise.
pub fn restrict_from_boolean(boolean: &ChowRing, target: &ChowRing, class: &RingElement) -> Result<RingElement> {
    if boolean.matroid().rank() != boolean.matroid().ground_size() {
        return Err(Error::InvalidParameters("source ring is not Boolean".into()));
    }
    let images = boolean.fy().restriction_images(target.fy())?;
    boolean.fy().map_class(class, &images, target.ring())
}

/// The Bergman class Δ_M in the Boolean ring: the unique class with
/// deg_M(ι^* ξ) = deg_{U_E}(ξ · Δ_M) for all ξ.
pub fn bergman_class(boolean: &ChowRing, target: &ChowRing) -> Result<RingElement> {
    let ring = boolean.ring();
    let n = ring.rank();
    let images = boolean.fy().restriction_images(target.fy())?;
    let cols = ring.substitution_matrix(&images, target.ring());
    let v: Vec<BigInt> = cols.iter().map(|c| target.degree(c).unwrap()).collect();
    let pairing = boolean.full_pairing();
    let inv = inverse_unimodular(&pairing).ok_or(Error::SingularPairing)?;
    let coords: Vec<BigInt> = (0..n)
        .map(|i| (0..n).map(|j| &inv[i][j] * &v[j]).fold(BigInt::zero(), |a, b| a + b))
        .collect();
    ring.from_coords(coords)
}

/// Human-readable name for a flat: `∅`, `E`, or its element list.
pub fn flat_label(m: &Matroid, f: Subset) -> String {
    if f == 0 {
        "empty".into()
    } else if f == m.ground() {
        "E".into()
    } else {
        format!("{:?}", elements(f))
    }
}
