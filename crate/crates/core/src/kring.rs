//! K-rings K(M) and K^aug(M), the isomorphism ζ to the Chow ring, Euler
//! characteristics, Adams operations, duality and the canonical class.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::chow::{chain_multi_indices, chow_ring, ChowRing};
use crate::error::{Error, Result};
use crate::fy::{apply_columns, Flavor, FlatMultiIndex, FyRing, Theory};
use crate::matroid::{elements, Matroid, Subset};
use crate::zring::linalg::{Echelon, Reduced};
use crate::zring::{determinant, inverse_unimodular, mat_vec, Matrix, QuotientRing, RingElement};

/// K(M) or K^aug(M).
#[derive(Clone, Debug)]
pub struct KRing {
    fy: FyRing,
}

/// Build the K-ring and check that its rank equals the Chow ring's.
pub fn k_ring(m: &Matroid, flavor: Flavor) -> Result<KRing> {
    let k = KRing::build(m, flavor)?;
    let chow = chow_ring(m, flavor)?;
    if k.rank() != chow.rank() {
        return Err(Error::RankMismatch {
            k: k.rank(),
            chow: chow.rank(),
        });
    }
    Ok(k)
}

impl KRing {
    /// Build without the rank comparison.
    pub fn build(m: &Matroid, flavor: Flavor) -> Result<KRing> {
        Ok(KRing {
            fy: FyRing::build(m, flavor, Theory::K)?,
        })
    }

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

    pub fn tau_class(&self, f: Subset) -> Result<RingElement> {
        self.fy.generator(f)
    }

    pub fn y_class(&self, e: usize) -> Result<RingElement> {
        self.fy.y_generator(e)
    }

    /// η_F = 1 − Π_{G ⊇ F} (1 − τ_G)^{-1} for a nonempty flat F.
    pub fn eta_class(&self, f: Subset) -> Result<RingElement> {
        let i = self.fy.flat_index(f)?;
        if f == 0 {
            return Err(Error::InvalidParameters("η is indexed by nonempty flats".into()));
        }
        let ring = self.ring();
        let one = ring.one();
        let mut prod = one.clone();
        for j in self.fy.lattice().above(i) {
            prod = &prod * &(&one - &ring.var(j)).inverse_unipotent()?;
        }
        Ok(&one - &prod)
    }

    pub fn eta_monomial(&self, m: &FlatMultiIndex) -> Result<RingElement> {
        let mut out = self.ring().one();
        for (f, e) in m.pairs() {
            out = &out * &self.eta_class(f)?.pow(e);
        }
        Ok(out)
    }

    /// Π τ_F^{m_F}.
    pub fn tau_monomial(&self, m: &FlatMultiIndex) -> Result<RingElement> {
        Ok(self.ring().monomial(&self.fy.x_monomial(m)?))
    }

    /// Π_F ((1 − τ_F)^{-1})^{a_F}.
    pub fn line_bundle_class(&self, a: &BTreeMap<Subset, i64>) -> Result<RingElement> {
        let ring = self.ring();
        let one = ring.one();
        let mut out = one.clone();
        for (&f, &k) in a {
            if k == 0 {
                continue;
            }
            let base = &one - &self.tau_class(f)?;
            out = &out * &base.powi(-k)?;
        }
        Ok(out)
    }

    /// The rank function: coefficient of the basis element 1.
    pub fn epsilon(&self, xi: &RingElement) -> BigInt {
        xi.constant_coeff()
    }

    /// Ring endomorphism given by τ ↦ f(τ) on every generator, with the
    /// relation certificate checked.
    fn generator_substitution(&self, f: impl Fn(&RingElement) -> Result<RingElement>) -> Result<LinearOp> {
        let ring = self.ring();
        let images: Vec<RingElement> = (0..ring.vars().len())
            .map(|v| f(&ring.var(v)))
            .collect::<Result<_>>()?;
        self.fy.check_substitution(&images, ring)?;
        Ok(LinearOp {
            columns: ring.substitution_matrix(&images, ring),
        })
    }

    /// Ψ^k: τ ↦ 1 − (1 − τ)^k on every generator.
    pub fn adams_operator(&self, k: u32) -> Result<LinearOp> {
        if k == 0 {
            return Err(Error::InvalidParameters("Adams operations need k ≥ 1".into()));
        }
        let one = self.ring().one();
        self.generator_substitution(|t| Ok(&one - &(&one - t).pow(k)))
    }

    pub fn adams(&self, k: u32, xi: &RingElement) -> Result<RingElement> {
        Ok(self.adams_operator(k)?.apply(xi))
    }

    /// D: τ ↦ 1 − (1 − τ)^{-1} on every generator.
    pub fn duality_operator(&self) -> Result<LinearOp> {
        let one = self.ring().one();
        self.generator_substitution(|t| Ok(&one - &(&one - t).inverse_unipotent()?))
    }

    pub fn duality(&self, xi: &RingElement) -> Result<RingElement> {
        Ok(self.duality_operator()?.apply(xi))
    }

    /// λ^k through k·λ^k = Σ_{i=1}^{k} (−1)^{i−1} Ψ^i(ξ) λ^{k−i}(ξ).
    pub fn lambda(&self, k: u32, xi: &RingElement) -> Result<RingElement> {
        let psi: Vec<RingElement> = (1..=k)
            .map(|i| self.adams(i, xi))
            .collect::<Result<_>>()?;
        let mut lambdas = vec![self.ring().one()];
        for j in 1..=k {
            let mut acc = self.ring().zero();
            for i in 1..=j {
                let term = &psi[i as usize - 1] * &lambdas[(j - i) as usize];
                acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
            }
            let d = BigInt::from(j);
            let mut coords = Vec::with_capacity(acc.coords().len());
            for c in acc.coords() {
                let (q, r) = c.div_rem(&d);
                if !r.is_zero() {
                    return Err(Error::NonIntegralLambda(j));
                }
                coords.push(q);
            }
            lambdas.push(self.ring().from_coords(coords)?);
        }
        Ok(lambdas.pop().unwrap())
    }
}

/// A linear endomorphism stored by the images of the basis.
#[derive(Clone, Debug)]
pub struct LinearOp {
    columns: Vec<RingElement>,
}

impl LinearOp {
    pub fn apply(&self, xi: &RingElement) -> RingElement {
        let ring = self.columns[0].ring().clone();
        apply_columns(&self.columns, xi.coords(), &ring)
    }

    /// Square integer matrix, column j = image of basis element j.
    pub fn matrix(&self) -> Matrix {
        let n = self.columns.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.columns[j].coords()[i].clone()).collect())
            .collect()
    }
}

/// Flats carrying simplicial generators: nonempty flats, and in the plain
/// flavor only those of rank at least 2 (h_F = η_F = 0 in rank 1).
pub fn simplicial_flats(fy: &FyRing) -> Vec<usize> {
    let lattice = fy.lattice();
    (1..lattice.len())
        .filter(|&i| fy.flavor() == Flavor::Augmented || lattice.rank_of_flat(i) >= 2)
        .collect()
}

/// The isomorphism ζ: K → A as an integer matrix on basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaMap {
    /// matrix[i][j] = coordinate i in A of ζ(K-basis element j).
    pub matrix: Matrix,
    pub inverse: Matrix,
}

/// Outcome of the ζ construction and its audits.
#[derive(Clone, Debug)]
pub struct ZetaReport {
    pub zeta: ZetaMap,
    /// Number of chain-supported simplicial monomials used.
    pub monomials: usize,
}

impl ZetaMap {
    pub fn apply(&self, chow: &ChowRing, xi: &RingElement) -> Result<RingElement> {
        chow.ring().from_coords(mat_vec(&self.matrix, xi.coords()))
    }

    pub fn apply_inverse(&self, k: &KRing, a: &RingElement) -> Result<RingElement> {
        k.ring().from_coords(mat_vec(&self.inverse, a.coords()))
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.matrix)
    }
}

/// Build ζ from the pairs (η^m, h^m) over every chain-supported monomial
/// in the simplicial generators; any inconsistency among the pairs or a
/// failure of the η^m to span K unimodularly is reported.
pub fn zeta(k: &KRing, chow: &ChowRing) -> Result<ZetaReport> {
    let n = k.rank();
    if chow.rank() != n {
        return Err(Error::RankMismatch { k: n, chow: chow.rank() });
    }
    let flats = simplicial_flats(k.fy());
    let trunc = k.ring().truncation();
    let indices = chain_multi_indices(k.fy(), &flats, 0, trunc.saturating_sub(1));
    let mut eta_cache: HashMap<FlatMultiIndex, RingElement> = HashMap::new();
    let mut h_cache: HashMap<FlatMultiIndex, RingElement> = HashMap::new();
    let mut eta_gen: HashMap<Subset, RingElement> = HashMap::new();
    let mut h_gen: HashMap<Subset, RingElement> = HashMap::new();
    for &i in &flats {
        let f = k.fy().lattice().flat(i);
        eta_gen.insert(f, k.eta_class(f)?);
        h_gen.insert(f, chow.h_class(f)?);
    }
    let mut ech: Echelon<BigInt> = Echelon::new(2 * n);
    let mut sorted = indices.clone();
    sorted.sort_by_key(FlatMultiIndex::total);
    for m in &sorted {
        let (eta, h) = if m.is_zero() {
            (k.ring().one(), chow.ring().one())
        } else {
            // peel off one factor from the largest flat in the support
            let (f, _) = *m.pairs().last().unwrap();
            let mut rest = m.clone();
            let mut pairs: BTreeMap<Subset, u32> = rest.pairs().into_iter().collect();
            *pairs.get_mut(&f).unwrap() -= 1;
            rest = FlatMultiIndex::from_pairs(pairs);
            (&eta_cache[&rest] * &eta_gen[&f], &h_cache[&rest] * &h_gen[&f])
        };
        let row: Vec<(u32, BigInt)> = eta
            .coords()
            .iter()
            .enumerate()
            .chain(h.coords().iter().enumerate().map(|(j, c)| (j + n, c)))
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as u32, c.clone()))
            .collect();
        ech.insert(row).expect("big integers do not overflow");
        eta_cache.insert(m.clone(), eta);
        h_cache.insert(m.clone(), h);
    }
    if (n..2 * n).any(|c| ech.is_pivot(c)) {
        return Err(Error::InconsistentPairs);
    }
    if (0..n).any(|c| !ech.is_pivot(c)) {
        return Err(Error::SpanDeficit);
    }
    let rows = match ech.reduce().expect("big integers do not overflow") {
        Reduced::Unit(rows) => rows,
        Reduced::NonUnit(_) => return Err(Error::SpanDeficit),
    };
    let mut matrix = vec![vec![BigInt::zero(); n]; n];
    for (j, row) in rows.iter().take(n).enumerate() {
        for (c, v) in &row.as_ref().unwrap()[1..] {
            matrix[*c as usize - n][j] = v.clone();
        }
    }
    let inverse = inverse_unimodular(&matrix).ok_or(Error::SpanDeficit)?;
    Ok(ZetaReport {
        zeta: ZetaMap { matrix, inverse },
        monomials: sorted.len(),
    })
}

/// Everything attached to one matroid and flavor: both rings, ζ and the
/// Euler characteristic functional.
#[derive(Clone, Debug)]
pub struct MatroidRings {
    pub chow: ChowRing,
    pub k: KRing,
    pub zeta: ZetaMap,
    /// χ(e_j) for the K-basis elements e_j.
    pub chi: Vec<BigInt>,
    pub zeta_monomials: usize,
}

impl MatroidRings {
    pub fn new(m: &Matroid, flavor: Flavor) -> Result<MatroidRings> {
        let chow = chow_ring(m, flavor)?;
        let k = KRing::build(m, flavor)?;
        if k.rank() != chow.rank() {
            return Err(Error::RankMismatch {
                k: k.rank(),
                chow: chow.rank(),
            });
        }
        let report = zeta(&k, &chow)?;
        let todd_inv = (&chow.ring().one() - &chow.h_class(m.ground())?).inverse_unipotent()?;
        let chi = (0..k.rank())
            .map(|j| {
                let a = report.zeta.apply(&chow, &k.ring().basis_element(j))?;
                chow.degree(&(&a * &todd_inv))
            })
            .collect::<Result<_>>()?;
        Ok(MatroidRings {
            chow,
            k,
            zeta: report.zeta,
            chi,
            zeta_monomials: report.monomials,
        })
    }

    pub fn matroid(&self) -> &Matroid {
        self.k.matroid()
    }

    pub fn flavor(&self) -> Flavor {
        self.k.flavor()
    }

    /// χ(M, ξ) = deg(ζ(ξ) / (1 − h_E)).
    pub fn euler_char(&self, xi: &RingElement) -> Result<BigInt> {
        if xi.ring().id() != self.k.ring().id() {
            return Err(Error::RingMismatch);
        }
        Ok(self
            .chi
            .iter()
            .zip(xi.coords())
            .map(|(a, b)| a * b)
            .fold(BigInt::zero(), |x, y| x + y))
    }

    pub fn zeta_apply(&self, xi: &RingElement) -> Result<RingElement> {
        self.zeta.apply(&self.chow, xi)
    }

    pub fn zeta_inverse(&self, a: &RingElement) -> Result<RingElement> {
        self.zeta.apply_inverse(&self.k, a)
    }

    /// The canonical class ω_M (plain) or ω^aug_M (augmented).
    pub fn omega(&self) -> Result<RingElement> {
        omega_class(&self.k)
    }
}

/// Combinatorial value of χ(M, η^m): 1 iff the flavor's Hall–Rado
/// condition holds (no restriction on the total degree).
pub fn euler_simplicial(m: &Matroid, idx: &FlatMultiIndex, flavor: Flavor) -> u8 {
    u8::from(crate::chow::simplicial_condition(m, idx, flavor))
}

/// Label of a ray of the plain or augmented fan of the Boolean matroid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RayLabel {
    Subset(Subset),
    Element(usize),
}

/// Support numbers of the dual matroid polytope (plain) or independence
/// polytope (augmented) on the rays of the Boolean fan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeCoeffs {
    pub fan: Flavor,
    pub a: BTreeMap<RayLabel, i64>,
}

/// Plain: a_S = −min over bases B of M^⊥ of |B ∩ S| for every nonempty S
/// (including S = E, the x_E term). Augmented: a_S = max over independent
/// sets I of M^⊥ of |I ∩ (E∖S)| for proper S, and a_e = 0.
pub fn polytope_coeffs(m: &Matroid, fan: Flavor) -> PolytopeCoeffs {
    let dual = m.dual();
    let ground = m.ground();
    let mut a = BTreeMap::new();
    match fan {
        Flavor::Plain => {
            for s in 1..=ground {
                let min = dual.bases().iter().map(|&b| (b & s).count_ones()).min().unwrap();
                a.insert(RayLabel::Subset(s), -(min as i64));
            }
        }
        Flavor::Augmented => {
            let indep = dual.independent_sets();
            for s in 0..ground {
                let comp = ground & !s;
                let max = indep.iter().map(|&i| (i & comp).count_ones()).max().unwrap();
                a.insert(RayLabel::Subset(s), max as i64);
            }
            for e in 0..m.ground_size() {
                let min = indep.iter().map(|&i| (i >> e & 1) as i64).min().unwrap();
                a.insert(RayLabel::Element(e), -min);
            }
        }
    }
    PolytopeCoeffs { fan, a }
}

/// ω restricted from the Boolean ring: the line bundle
/// Π_rays O(D_ray)^{a_ray − 1} (no −1 on the x_E term), where rays
/// indexed by non-flats restrict to the trivial bundle.
pub fn omega_class(k: &KRing) -> Result<RingElement> {
    let m = k.matroid();
    let coeffs = polytope_coeffs(m, k.flavor());
    let ring = k.ring();
    let one = ring.one();
    let mut out = one.clone();
    for (label, &a) in &coeffs.a {
        let (gen, exp) = match *label {
            RayLabel::Subset(s) => {
                if !m.is_flat(s) {
                    continue;
                }
                let exp = if k.flavor() == Flavor::Plain && s == m.ground() { -a } else { 1 - a };
                (k.tau_class(s)?, exp)
            }
            RayLabel::Element(e) => (k.y_class(e)?, 1 - a),
        };
        out = &out * &(&one - &gen).powi(exp)?;
    }
    Ok(out)
}

/// Serre duality evaluation for one class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreReport {
    pub flavor: Flavor,
    pub lhs: BigInt,
    /// (−1)^{dim} χ(ω · D ξ).
    pub with_omega: BigInt,
    /// (−1)^{dim} χ(D ξ).
    pub without_omega: BigInt,
}

impl SerreReport {
    pub fn holds_with_omega(&self) -> bool {
        self.lhs == self.with_omega
    }

    pub fn holds_without_omega(&self) -> bool {
        self.lhs == self.without_omega
    }
}

/// Evaluate χ(ξ) against (−1)^{dim} χ(ω·Dξ) and (−1)^{dim} χ(Dξ), with
/// dim = r − 1 (plain) or r (augmented).
pub fn serre_check(rings: &MatroidRings, xi: &RingElement, omega: &RingElement, d: &LinearOp) -> Result<SerreReport> {
    let dim = rings.chow.top_degree();
    let sign = if dim.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let dxi = d.apply(xi);
    Ok(SerreReport {
        flavor: rings.flavor(),
        lhs: rings.euler_char(xi)?,
        with_omega: &sign * rings.euler_char(&(omega * &dxi))?,
        without_omega: &sign * rings.euler_char(&dxi)?,
    })
}

/// ι^* on K-rings: τ_S ↦ τ_S for flats of M, 0 otherwise.
pub fn restrict_k(boolean: &KRing, target: &KRing, xi: &RingElement) -> Result<RingElement> {
    let images = boolean.fy().restriction_images(target.fy())?;
    boolean.fy().map_class(xi, &images, target.ring())
}

/// [O_M] = ζ_{U_E}^{-1}(Δ_M) in the Boolean K-ring.
pub fn structure_sheaf_class(boolean: &MatroidRings, target: &MatroidRings) -> Result<RingElement> {
    let delta = crate::chow::bergman_class(&boolean.chow, &target.chow)?;
    boolean.zeta_inverse(&delta)
}

/// Outcome of the restriction compatibility checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub basis_size: usize,
    /// ι^* ∘ ζ_{U_E} = ζ_M ∘ ι^* on every Boolean K-basis element.
    pub square_failures: usize,
    /// χ(M, ι^* ξ) = χ(U_E, ξ·[O_M]) on every Boolean K-basis element.
    pub projection_failures: usize,
    /// Restricted Chow and K-theoretic simplicial generators agree with
    /// the generators of the closure.
    pub generator_failures: usize,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.square_failures == 0 && self.projection_failures == 0 && self.generator_failures == 0
    }
}

pub fn compatibility_check(boolean: &MatroidRings, target: &MatroidRings) -> Result<CompatibilityReport> {
    let o_m = structure_sheaf_class(boolean, target)?;
    let kb = boolean.k.ring();
    let a_images = boolean.chow.fy().restriction_images(target.chow.fy())?;
    let a_cols = boolean.chow.ring().substitution_matrix(&a_images, target.chow.ring());
    let k_images = boolean.k.fy().restriction_images(target.k.fy())?;
    let k_cols = kb.substitution_matrix(&k_images, target.k.ring());
    let mut report = CompatibilityReport {
        basis_size: kb.rank(),
        square_failures: 0,
        projection_failures: 0,
        generator_failures: 0,
    };
    for j in 0..kb.rank() {
        let xi = kb.basis_element(j);
        let restricted = &k_cols[j];
        let left = apply_columns(&a_cols, boolean.zeta_apply(&xi)?.coords(), target.chow.ring());
        if left != target.zeta_apply(restricted)? {
            report.square_failures += 1;
        }
        if target.euler_char(restricted)? != boolean.euler_char(&(&xi * &o_m))? {
            report.projection_failures += 1;
        }
    }
    let m = target.matroid();
    for s in 1..=m.ground() {
        let cl = m.closure_of(s);
        let h = boolean.chow.h_class(s)?;
        let h_r = apply_columns(&a_cols, h.coords(), target.chow.ring());
        let eta = boolean.k.eta_class(s)?;
        let eta_r = apply_columns(&k_cols, eta.coords(), target.k.ring());
        let plain_rank_one = target.flavor() == Flavor::Plain && m.rank_of(cl) == 0;
        if plain_rank_one {
            continue;
        }
        if h_r != target.chow.h_class(cl)? || eta_r != target.k.eta_class(cl)? {
            report.generator_failures += 1;
        }
    }
    Ok(report)
}

/// Name for a ray label.
pub fn ray_name(label: &RayLabel) -> String {
    match label {
        RayLabel::Subset(s) => format!("{:?}", elements(*s)),
        RayLabel::Element(e) => format!("e{e}"),
    }
}

/// Sign (−1)^k as a big integer.
pub fn sign_pow(k: usize) -> BigInt {
    if k.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}
