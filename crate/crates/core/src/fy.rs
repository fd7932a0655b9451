//! The Feichtner–Yuzvinsky variable layout shared by the Chow and K-rings
//! of a matroid: one generator x_F per flat (including ∅ and E) and, in
//! the augmented flavor, one generator y_e per element.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::{elements, FlatLattice, Matroid, Subset};
use crate::zring::{
    build_quotient, Monomial, MonomialFilter, Poly, QuotientRing, QuotientSpec, RingElement, Var, VarSet, VarTag,
    DEFAULT_MONOMIAL_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "plain")]
    Plain,
    #[serde(rename = "aug")]
    Augmented,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Plain => "plain",
            Flavor::Augmented => "aug",
        })
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Flavor> {
        match s {
            "plain" => Ok(Flavor::Plain),
            "aug" | "augmented" => Ok(Flavor::Augmented),
            _ => Err(Error::Parse(format!("unknown flavor {s:?}"))),
        }
    }
}

/// Exponents indexed by flats; zero exponents are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatMultiIndex(BTreeMap<Subset, u32>);

impl FlatMultiIndex {
    pub fn new() -> Self {
        FlatMultiIndex(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Subset, u32)>) -> Self {
        let mut m = FlatMultiIndex::new();
        for (f, e) in pairs {
            m.add(f, e);
        }
        m
    }

    pub fn single(f: Subset, e: u32) -> Self {
        FlatMultiIndex::from_pairs([(f, e)])
    }

    pub fn add(&mut self, f: Subset, e: u32) {
        if e > 0 {
            *self.0.entry(f).or_insert(0) += e;
        }
    }

    pub fn get(&self, f: Subset) -> u32 {
        self.0.get(&f).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// (flat, exponent) pairs ordered by the flats' sorted element lists.
    pub fn pairs(&self) -> Vec<(Subset, u32)> {
        let mut v: Vec<(Subset, u32)> = self.0.iter().map(|(&f, &e)| (f, e)).collect();
        v.sort_by_key(|&(f, _)| elements(f));
        v
    }

    pub fn support(&self) -> Vec<Subset> {
        self.pairs().into_iter().map(|(f, _)| f).collect()
    }
}

/// Render a subset as `{0,1}`.
pub fn subset_name(s: Subset) -> String {
    let parts: Vec<String> = elements(s).iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// A quotient presented on FY generators of a loopless matroid.
#[derive(Clone, Debug)]
pub struct FyRing {
    matroid: Matroid,
    lattice: Arc<FlatLattice>,
    flavor: Flavor,
    ring: Arc<QuotientRing>,
}

/// Which family of relations to impose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Theory {
    Chow,
    K,
}

pub(crate) fn fy_vars(lattice: &FlatLattice, flavor: Flavor) -> Arc<VarSet> {
    let n = lattice.matroid().ground_size();
    let mut vars: Vec<Var> = lattice
        .flats()
        .iter()
        .map(|&f| Var {
            name: format!("x{}", subset_name(f)),
            tag: VarTag::Flat(f),
        })
        .collect();
    if flavor == Flavor::Augmented {
        vars.extend((0..n).map(|e| Var {
            name: format!("y{e}"),
            tag: VarTag::Element(e),
        }));
    }
    VarSet::new(vars).expect("flat names are distinct")
}

/// Incomparable pairs x_F x_G and, augmented, y_e x_F with e ∉ F.
pub(crate) fn fy_monomial_relations(lattice: &FlatLattice, flavor: Flavor) -> Vec<Monomial> {
    let nf = lattice.len();
    let n = lattice.matroid().ground_size();
    let nvars = nf + if flavor == Flavor::Augmented { n } else { 0 };
    let mut out = Vec::new();
    for i in 0..nf {
        for j in i + 1..nf {
            if !lattice.comparable(i, j) {
                out.push(Monomial::var(nvars, i).mul(&Monomial::var(nvars, j)));
            }
        }
    }
    if flavor == Flavor::Augmented {
        for e in 0..n {
            for i in 0..nf {
                if lattice.flat(i) >> e & 1 == 0 {
                    out.push(Monomial::var(nvars, nf + e).mul(&Monomial::var(nvars, i)));
                }
            }
        }
    }
    out
}

/// Product of `(1 - x_v)` over `vs`, keeping only admissible terms of
/// degree below `trunc`.
fn product_one_minus(vars: &Arc<VarSet>, vs: &[usize], filter: &MonomialFilter, trunc: usize) -> Poly {
    let mut acc = Poly::one(vars);
    for &v in vs {
        let factor = &Poly::one(vars) - &Poly::var(vars, v);
        let prod = acc.mul_truncated(&factor, trunc.saturating_sub(1)).expect("same variables");
        acc = prod.map_monomials(vars, |m| filter.admits(m.exps()).then(|| m.clone()));
    }
    acc
}

pub(crate) fn fy_relations(lattice: &FlatLattice, flavor: Flavor, theory: Theory, vars: &Arc<VarSet>, filter: &MonomialFilter, trunc: usize) -> Vec<Poly> {
    let nf = lattice.len();
    let n = lattice.matroid().ground_size();
    let all: Vec<usize> = (0..nf).collect();
    let missing = |e: usize| -> Vec<usize> { (0..nf).filter(|&i| lattice.flat(i) >> e & 1 == 0).collect() };
    let sum = |vs: &[usize]| -> Poly {
        vs.iter().fold(Poly::zero(vars), |acc, &v| &acc + &Poly::var(vars, v))
    };
    let one = Poly::one(vars);
    let mut rels = Vec::new();
    match theory {
        Theory::Chow => {
            rels.push(sum(&all));
            for e in 0..n {
                let s = sum(&missing(e));
                rels.push(match flavor {
                    Flavor::Plain => s,
                    Flavor::Augmented => &Poly::var(vars, nf + e) - &s,
                });
            }
        }
        Theory::K => {
            rels.push(&one - &product_one_minus(vars, &all, filter, trunc));
            for e in 0..n {
                let p = product_one_minus(vars, &missing(e), filter, trunc);
                let lhs = match flavor {
                    Flavor::Plain => one.clone(),
                    Flavor::Augmented => &one - &Poly::var(vars, nf + e),
                };
                rels.push(&p - &lhs);
            }
        }
    }
    rels.retain(|r| !r.is_zero());
    rels
}

impl FyRing {
    pub(crate) fn build(m: &Matroid, flavor: Flavor, theory: Theory) -> Result<FyRing> {
        let lattice = Arc::new(m.lattice()?);
        let vars = fy_vars(&lattice, flavor);
        let monos = fy_monomial_relations(&lattice, flavor);
        let filter = MonomialFilter::new(vars.len(), monos.clone());
        let trunc = match flavor {
            Flavor::Plain => m.rank(),
            Flavor::Augmented => m.rank() + 1,
        };
        let relations = fy_relations(&lattice, flavor, theory, &vars, &filter, trunc);
        let ring = build_quotient(QuotientSpec {
            vars,
            monomial_relations: monos,
            relations,
            truncation: trunc,
            graded: theory == Theory::Chow,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
        })?;
        Ok(FyRing {
            matroid: m.clone(),
            lattice,
            flavor,
            ring,
        })
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn lattice(&self) -> &Arc<FlatLattice> {
        &self.lattice
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.ring.rank()
    }

    pub fn flat_index(&self, f: Subset) -> Result<usize> {
        self.lattice.index_of(f).ok_or_else(|| Error::NotAFlat(elements(f)))
    }

    /// Variable index of x_F.
    pub fn x_var(&self, f: Subset) -> Result<usize> {
        self.flat_index(f)
    }

    /// Variable index of y_e (augmented only).
    pub fn y_var(&self, e: usize) -> Result<usize> {
        if self.flavor != Flavor::Augmented || e >= self.matroid.ground_size() {
            return Err(Error::InvalidParameters(format!("no generator y{e}")));
        }
        Ok(self.lattice.len() + e)
    }

    /// Class of the generator x_F.
    pub fn generator(&self, f: Subset) -> Result<RingElement> {
        Ok(self.ring.var(self.x_var(f)?))
    }

    pub fn y_generator(&self, e: usize) -> Result<RingElement> {
        Ok(self.ring.var(self.y_var(e)?))
    }

    /// Monomial x^m for a multi-index over flats.
    pub fn x_monomial(&self, m: &FlatMultiIndex) -> Result<Monomial> {
        let mut exps = vec![0u8; self.ring.vars().len()];
        for (f, e) in m.pairs() {
            exps[self.x_var(f)?] = u8::try_from(e).map_err(|_| Error::InvalidParameters("exponent too large".into()))?;
        }
        Ok(Monomial::from_exps(exps))
    }

    /// Images of this ring's generators under the restriction to `target`
    /// (same ground set and flavor): x_S ↦ x_S for flats of the target,
    /// 0 otherwise; y_e ↦ y_e.
    pub fn restriction_images(&self, target: &FyRing) -> Result<Vec<RingElement>> {
        if self.matroid.ground_size() != target.matroid.ground_size() || self.flavor != target.flavor {
            return Err(Error::GroundSetMismatch);
        }
        let mut images: Vec<RingElement> = self
            .lattice
            .flats()
            .iter()
            .map(|&s| match target.lattice.index_of(s) {
                Some(i) => target.ring.var(i),
                None => target.ring.zero(),
            })
            .collect();
        if self.flavor == Flavor::Augmented {
            for e in 0..self.matroid.ground_size() {
                images.push(target.ring.var(target.lattice.len() + e));
            }
        }
        Ok(images)
    }

    /// Check that every defining relation maps to zero under the
    /// substitution `images` (a certificate that it defines a ring map).
    pub fn check_substitution(&self, images: &[RingElement], target: &Arc<QuotientRing>) -> Result<()> {
        for rel in self.ring.relations() {
            if !QuotientRing::evaluate(rel, images, target).is_zero() {
                return Err(Error::CertificateFailed(rel.to_string()));
            }
        }
        for m in self.ring.monomial_relations() {
            let p = Poly::monomial(self.ring.vars(), m.clone(), 1);
            if !QuotientRing::evaluate(&p, images, target).is_zero() {
                return Err(Error::CertificateFailed(p.to_string()));
            }
        }
        Ok(())
    }

    /// Apply a ring map given by generator images to a class.
    pub fn map_class(&self, xi: &RingElement, images: &[RingElement], target: &Arc<QuotientRing>) -> Result<RingElement> {
        if xi.ring().id() != self.ring.id() {
            return Err(Error::RingMismatch);
        }
        let cols = self.ring.substitution_matrix(images, target);
        Ok(apply_columns(&cols, xi.coords(), target))
    }
}

/// Σ_j c_j · cols[j].
pub(crate) fn apply_columns(cols: &[RingElement], coords: &[BigInt], target: &Arc<QuotientRing>) -> RingElement {
    let mut out = target.zero();
    for (c, col) in coords.iter().zip(cols) {
        if !num_traits::Zero::is_zero(c) {
            out = &out + &col.scale(c);
        }
    }
    out
}
