//! M̄₀,ₙ through the braid matroid: the Cerberus condition, Snapper
//! polynomials for the bundles L_S and for the cotangent lines, and the
//! presentation of its Chow and K-rings on the classes u_S.
//!
//! The points 1..n−1 are labeled 0..n−2; the last point n is implicit.
//! Subsets S ⊆ [n−1] are bitmasks over these labels.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chow::{all_multi_indices, ChowRing};
use crate::error::{Error, Result};
use crate::fy::FlatMultiIndex;
use crate::kring::{KRing, MatroidRings};
use crate::matroid::{complete_graph_edges, elements, graphic, Matroid, Subset};
use crate::snapper::SnapperPoly;
use crate::zring::linalg::Echelon;
use crate::zring::{build_quotient, Monomial, Poly, QuotientRing, QuotientSpec, RingElement, Var, VarSet, VarTag, DEFAULT_MONOMIAL_CAP};

pub const MAX_N: usize = 6;

/// A multi-index over subsets S ⊆ [n−1] with |S| ≥ 3.
pub type CerberusIndex = FlatMultiIndex;

#[derive(Clone, Debug)]
pub struct M0nContext {
    n: usize,
    braid: Matroid,
    edges: Vec<(usize, usize)>,
}

pub fn m0n_context(n: usize) -> Result<M0nContext> {
    M0nContext::new(n)
}

impl M0nContext {
    pub fn new(n: usize) -> Result<M0nContext> {
        if n < 3 {
            return Err(Error::InvalidParameters("M̄₀,ₙ needs n ≥ 3".into()));
        }
        if n > MAX_N {
            return Err(Error::TooLarge { n, max: MAX_N });
        }
        let edges = complete_graph_edges(n - 1);
        let braid = graphic(n - 1, &edges)?;
        Ok(M0nContext { n, braid, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn braid(&self) -> &Matroid {
        &self.braid
    }

    /// The edge {i, j} of K_{n−1} for each braid element.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// F_S: the edges with both endpoints in S.
    pub fn flat_of(&self, s: Subset) -> Subset {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| s >> i & 1 == 1 && s >> j & 1 == 1)
            .fold(0, |acc, (e, _)| acc | 1 << e)
    }

    /// Subsets of [n−1] of size at least `min`, ordered by size then elements.
    pub fn subsets(&self, min: usize) -> Vec<Subset> {
        let mut out: Vec<Subset> = (0..(1u32 << (self.n - 1)))
            .filter(|s| s.count_ones() as usize >= min)
            .collect();
        out.sort_by_key(|&s| (s.count_ones(), elements(s)));
        out
    }

    /// m̃ with m̃_{F_S} = m_S.
    pub fn to_flat_index(&self, m: &CerberusIndex) -> FlatMultiIndex {
        FlatMultiIndex::from_pairs(m.pairs().into_iter().map(|(s, e)| (self.flat_of(s), e)))
    }
}

/// |⋃ supp m′ ∪ {n}| − 3 ≥ Σ m′ for every support restriction m′ of m.
pub fn cerberus_check(m: &CerberusIndex) -> bool {
    let pairs = m.pairs();
    (1u64..(1u64 << pairs.len())).all(|mask| {
        let mut union: Subset = 0;
        let mut total = 0i64;
        for (i, &(s, e)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                union |= s;
                total += i64::from(e);
            }
        }
        i64::from(union.count_ones()) + 1 - 3 >= total
    })
}

/// Σ a^{(m)} over Cerberus indices m.
pub fn snap_m0n(ctx: &M0nContext) -> SnapperPoly {
    let mut out = SnapperPoly::default();
    for m in all_multi_indices(&ctx.subsets(3), 0, ctx.n - 3) {
        if cerberus_check(&m) {
            out.terms.insert(m, BigInt::one());
        }
    }
    out
}

/// χ(braid, η^{m̃}) computed in the K-ring of the braid matroid.
pub fn m0n_euler_oracle(ctx: &M0nContext, rings: &MatroidRings, m: &CerberusIndex) -> Result<BigInt> {
    if rings.matroid() != ctx.braid() {
        return Err(Error::GroundSetMismatch);
    }
    rings.euler_char(&rings.k.eta_monomial(&ctx.to_flat_index(m))?)
}

/// Outcome of the presentation check on u_S for |S| ≥ 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationReport {
    pub n: usize,
    /// Rank of R_n/(K_1 + K_2) truncated above dimension n − 3.
    pub quotient_rank: usize,
    pub quotient_graded_ranks: Vec<usize>,
    /// Generators of K_1 + K_2 not sent to 0 (Chow, K).
    pub chow_relation_failures: usize,
    pub k_relation_failures: usize,
    /// Rank of the image of the quotient basis (Chow, K).
    pub chow_image_rank: usize,
    pub k_image_rank: usize,
}

impl PresentationReport {
    /// Relations vanish and the quotient maps injectively in both theories.
    pub fn passed(&self) -> bool {
        self.chow_relation_failures == 0
            && self.k_relation_failures == 0
            && self.chow_image_rank == self.quotient_rank
            && self.k_image_rank == self.quotient_rank
    }
}

/// R_n/(K_1 + K_2) built directly from its generators.
pub fn presentation_quotient(ctx: &M0nContext) -> Result<(Arc<QuotientRing>, Vec<Subset>)> {
    let labels = ctx.subsets(2);
    let vars = VarSet::new(
        labels
            .iter()
            .map(|&s| Var {
                name: format!("u{:?}", elements(s)),
                tag: VarTag::Label(s),
            })
            .collect(),
    )?;
    let nv = labels.len();
    let pos = |s: Subset| labels.iter().position(|&t| t == s).unwrap();
    let monomial_relations: Vec<Monomial> = labels
        .iter()
        .enumerate()
        .filter(|(_, s)| s.count_ones() == 2)
        .map(|(i, _)| Monomial::var(nv, i))
        .collect();
    let mut relations = Vec::new();
    for (i, &s) in labels.iter().enumerate() {
        for &t in &labels[i + 1..] {
            if s & t == 0 {
                continue;
            }
            let u = pos(s | t);
            let a = &Poly::var(&vars, pos(s)) - &Poly::var(&vars, u);
            let b = &Poly::var(&vars, pos(t)) - &Poly::var(&vars, u);
            let p = &a * &b;
            if !p.is_zero() {
                relations.push(p);
            }
        }
    }
    let ring = build_quotient(QuotientSpec {
        vars,
        monomial_relations,
        relations,
        truncation: ctx.n - 2,
        graded: true,
        monomial_cap: DEFAULT_MONOMIAL_CAP,
    })?;
    Ok((ring, labels))
}

pub(crate) fn relation_failures(q: &QuotientRing, images: &[RingElement], target: &Arc<QuotientRing>) -> usize {
    let rel = q
        .relations()
        .iter()
        .filter(|r| !QuotientRing::evaluate(r, images, target).is_zero())
        .count();
    let mono = q
        .monomial_relations()
        .iter()
        .filter(|m| {
            let p = Poly::monomial(q.vars(), (*m).clone(), 1);
            !QuotientRing::evaluate(&p, images, target).is_zero()
        })
        .count();
    rel + mono
}

pub(crate) fn span_rank(classes: &[RingElement]) -> usize {
    let Some(first) = classes.first() else { return 0 };
    let mut ech: Echelon<BigInt> = Echelon::new(first.coords().len());
    for c in classes {
        let row: Vec<(u32, BigInt)> = c
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j as u32, v.clone()))
            .collect();
        ech.insert(row).expect("big integers do not overflow");
    }
    ech.rank()
}

/// Send u_S ↦ h_{F_S} and u_S ↦ η_{F_S}, check that K_1 and K_2 die and that
/// the quotient by them embeds in both braid rings.
pub fn presentation_check(ctx: &M0nContext, chow: &ChowRing, k: &KRing) -> Result<PresentationReport> {
    if chow.matroid() != ctx.braid() || k.matroid() != ctx.braid() {
        return Err(Error::GroundSetMismatch);
    }
    let (q, labels) = presentation_quotient(ctx)?;
    let h: Vec<RingElement> = labels.iter().map(|&s| chow.h_class(ctx.flat_of(s))).collect::<Result<_>>()?;
    let eta: Vec<RingElement> = labels.iter().map(|&s| k.eta_class(ctx.flat_of(s))).collect::<Result<_>>()?;
    let h_cols = q.substitution_matrix(&h, chow.ring());
    let eta_cols = q.substitution_matrix(&eta, k.ring());
    Ok(PresentationReport {
        n: ctx.n,
        quotient_rank: q.rank(),
        quotient_graded_ranks: q.graded_ranks(),
        chow_relation_failures: relation_failures(&q, &h, chow.ring()),
        k_relation_failures: relation_failures(&q, &eta, k.ring()),
        chow_image_rank: span_rank(&h_cols),
        k_image_rank: span_rank(&eta_cols),
    })
}

/// C(a, d) for any integer a.
pub fn binom_int(a: i64, d: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..i64::from(d) {
        num *= a - i;
        den *= i + 1;
    }
    num / den
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Σ_{|d| ≤ n−3} Π C(a_i, d_i) · (n−3)! / ((n−3−|d|)! Π d_i!).
pub fn snap_psi(n: usize, a: &[i64]) -> Result<BigInt> {
    if n < 3 {
        return Err(Error::InvalidParameters("M̄₀,ₙ needs n ≥ 3".into()));
    }
    if a.len() != n {
        return Err(Error::InvalidParameters(format!("expected {n} exponents, got {}", a.len())));
    }
    let top = (n - 3) as u32;
    let top_fact = factorial(top);
    let mut out = BigInt::zero();
    let mut d = vec![0u32; n];
    fn rec(i: usize, left: u32, d: &mut Vec<u32>, a: &[i64], top_fact: &BigInt, out: &mut BigInt) {
        if i == d.len() {
            let mut term = top_fact / factorial(left);
            for (&di, &ai) in d.iter().zip(a) {
                term = term / factorial(di) * binom_int(ai, di);
            }
            *out += term;
            return;
        }
        for e in 0..=left {
            d[i] = e;
            rec(i + 1, left - e, d, a, top_fact, out);
        }
        d[i] = 0;
    }
    rec(0, top, &mut d, a, &top_fact, &mut out);
    Ok(out)
}

/// (t, Snap_𝕃(0,…,0,t), Snap_L at a_{[n−1]} = t and 0 elsewhere).
pub fn psi_specialization(ctx: &M0nContext, ts: &[i64]) -> Result<Vec<(i64, BigInt, BigInt)>> {
    let snap = snap_m0n(ctx);
    let full: Subset = (1 << (ctx.n - 1)) - 1;
    ts.iter()
        .map(|&t| {
            let mut a = vec![0i64; ctx.n];
            a[ctx.n - 1] = t;
            let psi = snap_psi(ctx.n, &a)?;
            let cer = snap.eval(|s| if s == full { t } else { 0 });
            Ok((t, psi, cer))
        })
        .collect()
}

pub fn psi_specialization_check(ctx: &M0nContext, ts: &[i64]) -> Result<bool> {
    Ok(psi_specialization(ctx, ts)?.iter().all(|(_, a, b)| a == b))
}
