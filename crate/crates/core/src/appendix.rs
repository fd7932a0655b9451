//! The simplicial presentation on u_F ↦ h_F (Chow) and u_F ↦ η_F (K) for
//! both flavors, and the change of generators for I_3 and I_2 + I_4^aug.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::chow::{chow_ring, ChowRing};
use crate::error::Result;
use crate::fy::{fy_vars, Flavor};
use crate::kring::{k_ring, KRing};
use crate::m0n::{relation_failures, span_rank};
use crate::matroid::{elements, FlatLattice, Matroid, Subset};
use crate::zring::{build_quotient, determinant, hnf, Matrix, Monomial, Poly, QuotientRing, QuotientSpec, RingElement, Var, VarSet, VarTag, DEFAULT_MONOMIAL_CAP};

/// S_M/(J_1 + J_2) or S_M/(J_1 + J_2^aug), truncated above the top degree.
/// Variables are the nonempty flats in lattice order.
pub fn simplicial_quotient(lattice: &FlatLattice, flavor: Flavor) -> Result<(Arc<QuotientRing>, Vec<Subset>)> {
    let flats: Vec<Subset> = lattice.flats().iter().copied().filter(|&f| f != 0).collect();
    let vars = VarSet::new(
        flats
            .iter()
            .map(|&f| Var {
                name: format!("u{:?}", elements(f)),
                tag: VarTag::Flat(f),
            })
            .collect(),
    )?;
    let nv = flats.len();
    let pos = |f: Subset| flats.iter().position(|&g| g == f).expect("joins of flats are flats");
    let join = |f: Subset, g: Subset| -> Subset {
        let i = lattice.index_of(f).expect("flat");
        let j = lattice.index_of(g).expect("flat");
        lattice.flat(lattice.join(i, j))
    };
    let u = |f: Subset| Poly::var(&vars, pos(f));
    let atoms: Vec<Subset> = flats.iter().copied().filter(|&f| lattice.rank_of_flat(lattice.index_of(f).unwrap()) == 1).collect();

    let mut relations = Vec::new();
    for (i, &f) in flats.iter().enumerate() {
        for &g in &flats[i + 1..] {
            let fg = join(f, g);
            let p = &(&u(f) - &u(fg)) * &(&u(g) - &u(fg));
            if !p.is_zero() {
                relations.push(p);
            }
        }
    }
    let mut monomial_relations = Vec::new();
    let r = lattice.matroid().rank();
    match flavor {
        Flavor::Plain => monomial_relations.extend(atoms.iter().map(|&a| Monomial::var(nv, pos(a)))),
        Flavor::Augmented => {
            for &a in &atoms {
                monomial_relations.push(Monomial::var(nv, pos(a)).times_var(pos(a)));
                for &g in &flats {
                    let p = &u(a) * &(&u(g) - &u(join(a, g)));
                    if !p.is_zero() {
                        relations.push(p);
                    }
                }
            }
        }
    }
    let truncation = match flavor {
        Flavor::Plain => r,
        Flavor::Augmented => r + 1,
    };
    let ring = build_quotient(QuotientSpec {
        vars,
        monomial_relations,
        relations,
        truncation,
        graded: true,
        monomial_cap: DEFAULT_MONOMIAL_CAP,
    })?;
    Ok((ring, flats))
}

/// Outcome of the simplicial presentation check in one flavor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicialPresentation {
    pub flavor: Flavor,
    pub quotient_rank: usize,
    pub ring_rank: usize,
    /// Generators of the J ideals not sent to 0 (Chow, K).
    pub chow_relation_failures: usize,
    pub k_relation_failures: usize,
    /// Determinant of the images of the quotient basis in the ring basis;
    /// zero when the ranks differ.
    pub chow_determinant: BigInt,
    pub k_determinant: BigInt,
}

impl SimplicialPresentation {
    pub fn passed(&self) -> bool {
        let unit = |d: &BigInt| d.magnitude() == &num_bigint::BigUint::from(1u8);
        self.chow_relation_failures == 0
            && self.k_relation_failures == 0
            && self.quotient_rank == self.ring_rank
            && unit(&self.chow_determinant)
            && unit(&self.k_determinant)
    }
}

fn image_determinant(q: &QuotientRing, images: &[RingElement], target: &Arc<QuotientRing>) -> BigInt {
    let cols = q.substitution_matrix(images, target);
    if cols.len() != target.rank() || span_rank(&cols) != cols.len() {
        return BigInt::zero();
    }
    let m: Matrix = cols.iter().map(|c| c.coords().to_vec()).collect();
    determinant(&m)
}

pub fn simplicial_presentation(chow: &ChowRing, k: &KRing) -> Result<SimplicialPresentation> {
    let flavor = chow.flavor();
    let (q, flats) = simplicial_quotient(chow.fy().lattice(), flavor)?;
    let h: Vec<RingElement> = flats.iter().map(|&f| chow.h_class(f)).collect::<Result<_>>()?;
    let eta: Vec<RingElement> = flats.iter().map(|&f| k.eta_class(f)).collect::<Result<_>>()?;
    Ok(SimplicialPresentation {
        flavor,
        quotient_rank: q.rank(),
        ring_rank: chow.rank(),
        chow_relation_failures: relation_failures(&q, &h, chow.ring()),
        k_relation_failures: relation_failures(&q, &eta, k.ring()),
        chow_determinant: image_determinant(&q, &h, chow.ring()),
        k_determinant: image_determinant(&q, &eta, k.ring()),
    })
}

/// Degree ≤ 2 parts of two ideals generated in degrees 1 and 2, each as a
/// Hermite normal form over the monomials of T_M.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TruncatedIdeal {
    degree1: Matrix,
    degree2: Matrix,
}

struct TmParts {
    vars: Arc<VarSet>,
    lin: BTreeMap<Monomial, usize>,
    quad: BTreeMap<Monomial, usize>,
}

impl TmParts {
    fn new(lattice: &FlatLattice) -> TmParts {
        let vars = fy_vars(lattice, Flavor::Augmented);
        let nv = vars.len();
        let lin = (0..nv).map(|i| (Monomial::var(nv, i), i)).collect();
        let mut quad = BTreeMap::new();
        for i in 0..nv {
            for j in i..nv {
                let len = quad.len();
                quad.insert(Monomial::var(nv, i).times_var(j), len);
            }
        }
        TmParts { vars, lin, quad }
    }

    fn row(index: &BTreeMap<Monomial, usize>, p: &Poly) -> Vec<BigInt> {
        let mut row = vec![BigInt::zero(); index.len()];
        for (m, c) in p.terms() {
            row[index[m]] += c;
        }
        row
    }

    /// ⟨gens1⟩ + ⟨gens2⟩ with gens1 linear and gens2 quadratic.
    fn ideal(&self, gens1: &[Poly], gens2: &[Poly]) -> TruncatedIdeal {
        let d1: Matrix = gens1.iter().map(|g| Self::row(&self.lin, g)).collect();
        let mut d2: Matrix = gens2.iter().map(|g| Self::row(&self.quad, g)).collect();
        for g in gens1 {
            for v in 0..self.vars.len() {
                d2.push(Self::row(&self.quad, &(g * &Poly::var(&self.vars, v))));
            }
        }
        TruncatedIdeal {
            degree1: normal_form(&d1, self.lin.len()),
            degree2: normal_form(&d2, self.quad.len()),
        }
    }
}

fn normal_form(a: &Matrix, ncols: usize) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let (h, _) = hnf(a);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).map(|mut r| {
        r.resize(ncols, BigInt::zero());
        r
    }).collect()
}

/// I_3 = ⟨z_{F,G}⟩ and I_2 + I_4^aug = I_2 + ⟨y_e²⟩ + ⟨w_{e,F}⟩ in T_M.
pub fn change_of_generators(lattice: &FlatLattice) -> (bool, bool) {
    let parts = TmParts::new(lattice);
    let vars = &parts.vars;
    let nf = lattice.len();
    let n = lattice.matroid().ground_size();
    let x = |i: usize| Poly::var(vars, i);
    let y = |e: usize| Poly::var(vars, nf + e);
    let contains = |a: Subset, b: Subset| a & b == a;

    let mut incomparable = Vec::new();
    let mut z = Vec::new();
    for i in 0..nf {
        for j in 0..nf {
            if i < j && !lattice.comparable(i, j) {
                incomparable.push(&x(i) * &x(j));
            }
            let (f, g) = (lattice.flat(i), lattice.flat(j));
            let top = lattice.flat(lattice.join(i, j));
            let mut zfg = Poly::zero(vars);
            for a in 0..nf {
                let fa = lattice.flat(a);
                if !contains(f, fa) || !contains(fa, top) || fa == top {
                    continue;
                }
                for b in 0..nf {
                    let gb = lattice.flat(b);
                    if contains(g, gb) && contains(gb, top) && gb != top {
                        zfg = &zfg + &(&x(a) * &x(b));
                    }
                }
            }
            if !zfg.is_zero() {
                z.push(zfg);
            }
        }
    }
    let first = parts.ideal(&[], &incomparable) == parts.ideal(&[], &z);

    let i2: Vec<Poly> = (0..n)
        .map(|e| {
            (0..nf)
                .filter(|&i| lattice.flat(i) >> e & 1 == 0)
                .fold(y(e), |acc, i| &acc - &x(i))
        })
        .collect();
    let mut i4 = Vec::new();
    let mut rhs = Vec::new();
    for e in 0..n {
        rhs.push(&y(e) * &y(e));
        for i in 0..nf {
            let f = lattice.flat(i);
            if f >> e & 1 == 0 {
                i4.push(&y(e) * &x(i));
            }
            if f != 0 {
                let w = (0..nf)
                    .filter(|&g| contains(f, lattice.flat(g)) && lattice.flat(g) >> e & 1 == 0)
                    .fold(Poly::zero(vars), |acc, g| &acc + &(&y(e) * &x(g)));
                if !w.is_zero() {
                    rhs.push(w);
                }
            }
        }
    }
    let second = parts.ideal(&i2, &i4) == parts.ideal(&i2, &rhs);
    (first, second)
}

/// Both simplicial presentations and the change of generators for M.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub plain: SimplicialPresentation,
    pub augmented: SimplicialPresentation,
    pub incomparable_ideal_equal: bool,
    pub augmented_ideal_equal: bool,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.plain.passed() && self.augmented.passed() && self.incomparable_ideal_equal && self.augmented_ideal_equal
    }
}

pub fn appendix_report(m: &Matroid) -> Result<AppendixReport> {
    let mut pres = Vec::new();
    for flavor in [Flavor::Plain, Flavor::Augmented] {
        let chow = chow_ring(m, flavor)?;
        let k = k_ring(m, flavor)?;
        pres.push(simplicial_presentation(&chow, &k)?);
    }
    let augmented = pres.pop().expect("two flavors");
    let plain = pres.pop().expect("two flavors");
    let (first, second) = change_of_generators(&m.lattice()?);
    Ok(AppendixReport {
        plain,
        augmented,
        incomparable_ideal_equal: first,
        augmented_ideal_equal: second,
    })
}

pub fn check_appendix_presentation(m: &Matroid) -> Result<bool> {
    Ok(appendix_report(m)?.passed())
}
