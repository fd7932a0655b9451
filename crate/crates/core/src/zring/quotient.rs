//! Finite-rank quotients `Z[vars] / (monomial relations + relations +
//! truncation)` with a monomial basis and a normal-form table.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::linalg::{Coef, Echelon, Overflow, Reduced, SparseRow};
use super::poly::{same_vars, Monomial, Poly, VarSet};
use crate::error::{Error, Result};

/// Default cap on the number of admissible monomials.
pub const DEFAULT_MONOMIAL_CAP: usize = 400_000;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Complement of a monomial ideal, tested quickly for generators of
/// degree at most two.
#[derive(Clone, Debug)]
pub struct MonomialFilter {
    nvars: usize,
    single: Vec<bool>,
    square: Vec<bool>,
    pair: Vec<bool>,
    higher: Vec<Monomial>,
    generators: Vec<Monomial>,
}

impl MonomialFilter {
    pub fn new(nvars: usize, generators: Vec<Monomial>) -> MonomialFilter {
        let mut f = MonomialFilter {
            nvars,
            single: vec![false; nvars],
            square: vec![false; nvars],
            pair: vec![false; nvars * nvars],
            higher: Vec::new(),
            generators: Vec::new(),
        };
        for g in generators {
            let factors = g.factors();
            match (g.degree(), factors.as_slice()) {
                (1, [(v, _)]) => f.single[*v] = true,
                (2, [(v, 2)]) => f.square[*v] = true,
                (2, [(v, _), (w, _)]) => {
                    f.pair[v * nvars + w] = true;
                    f.pair[w * nvars + v] = true;
                }
                _ => f.higher.push(g.clone()),
            }
            f.generators.push(g);
        }
        f
    }

    /// Whether no generator divides the monomial with these exponents.
    pub fn admits(&self, exps: &[u8]) -> bool {
        let mut support = [0usize; 64];
        let mut len = 0;
        for (v, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if self.single[v] || (e >= 2 && self.square[v]) {
                return false;
            }
            if len < support.len() {
                for &w in &support[..len] {
                    if self.pair[v * self.nvars + w] {
                        return false;
                    }
                }
                support[len] = v;
                len += 1;
            } else {
                let others: Vec<usize> = (0..v).filter(|&w| exps[w] > 0).collect();
                if others.iter().any(|&w| self.pair[v * self.nvars + w]) {
                    return false;
                }
            }
        }
        self.higher
            .iter()
            .all(|g| !g.exps().iter().zip(exps).all(|(a, b)| a <= b))
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.generators
    }
}

/// Everything needed to build a quotient.
#[derive(Clone, Debug)]
pub struct QuotientSpec {
    pub vars: Arc<VarSet>,
    /// Monomial generators of the ideal, removed before linear algebra.
    pub monomial_relations: Vec<Monomial>,
    pub relations: Vec<Poly>,
    /// Monomials of degree at least this vanish.
    pub truncation: usize,
    pub graded: bool,
    pub monomial_cap: usize,
}

/// A free quotient ring of finite rank with a monomial basis.
pub struct QuotientRing {
    id: u64,
    vars: Arc<VarSet>,
    filter: MonomialFilter,
    relations: Vec<Poly>,
    truncation: usize,
    graded: bool,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    basis: Vec<usize>,
    basis_pos: Vec<Option<usize>>,
    nf: Vec<Vec<(usize, BigInt)>>,
    table: OnceLock<Vec<Vec<(usize, BigInt)>>>,
}

impl fmt::Debug for QuotientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientRing")
            .field("id", &self.id)
            .field("vars", &self.vars.len())
            .field("truncation", &self.truncation)
            .field("rank", &self.basis.len())
            .finish()
    }
}

/// Admissible monomials of degree below `truncation`, in column order:
/// by degree, then exponent vectors in decreasing lexicographic order.
fn admissible_monomials(filter: &MonomialFilter, nvars: usize, truncation: usize, cap: usize) -> Result<Vec<Monomial>> {
    let mut out = Vec::new();
    if truncation == 0 {
        return Ok(out);
    }
    let mut level = vec![Monomial::one(nvars)];
    // `last[i]` is the largest variable occurring in `level[i]`
    let mut last = vec![0usize];
    for d in 0..truncation {
        let mut next = Vec::new();
        let mut next_last = Vec::new();
        if d + 1 < truncation {
            for (m, &l) in level.iter().zip(&last) {
                let start = if m.is_one() { 0 } else { l };
                for v in start..nvars {
                    let cand = m.times_var(v);
                    if filter.admits(cand.exps()) {
                        next.push(cand);
                        next_last.push(v);
                    }
                }
            }
        }
        out.extend(level);
        if out.len() + next.len() > cap {
            return Err(Error::CombinatorialExplosion {
                count: out.len() + next.len(),
                cap,
            });
        }
        level = next;
        last = next_last;
        if level.is_empty() {
            break;
        }
    }
    out.sort_by(|a, b| (a.degree(), Reverse(a)).cmp(&(b.degree(), Reverse(b))));
    Ok(out)
}

fn relation_rows(spec: &QuotientSpec, monomials: &[Monomial], index: &HashMap<Monomial, usize>) -> Vec<SparseRow<i64>> {
    let mut rows = Vec::new();
    for rel in &spec.relations {
        let terms: Vec<(Monomial, i64)> = rel
            .terms()
            .filter(|(m, _)| m.degree() < spec.truncation)
            .map(|(m, c)| {
                let c: i64 = i64::from_big(c).expect("relation coefficients fit in 64 bits");
                (m.clone(), c)
            })
            .collect();
        let low = rel.min_degree();
        for m in monomials {
            if m.degree() + low >= spec.truncation {
                break;
            }
            let mut row: SparseRow<i64> = terms
                .iter()
                .filter(|(t, _)| t.degree() + m.degree() < spec.truncation)
                .filter_map(|(t, c)| index.get(&t.mul(m)).map(|&i| (i as u32, *c)))
                .collect();
            if row.is_empty() {
                continue;
            }
            row.sort_unstable_by_key(|e| e.0);
            rows.push(row);
        }
    }
    rows
}

fn eliminate<T: Coef>(ncols: usize, rows: &[SparseRow<i64>]) -> std::result::Result<Reduced<T>, Overflow> {
    let mut ech: Echelon<T> = Echelon::new(ncols);
    for r in rows {
        ech.insert(r.iter().map(|(c, v)| (*c, T::from_i64(*v))).collect())?;
    }
    ech.reduce()
}

fn to_big_rows<T: Coef>(rows: Vec<Option<SparseRow<T>>>) -> Vec<Option<Vec<(u32, BigInt)>>> {
    rows.into_iter()
        .map(|r| r.map(|r| r.into_iter().map(|(c, v)| (c, v.to_big())).collect()))
        .collect()
}

/// Build the quotient ring; fails on torsion, on a quotient without a
/// monomial complement, or when the monomial cap is exceeded.
pub fn build_quotient(spec: QuotientSpec) -> Result<Arc<QuotientRing>> {
    let nvars = spec.vars.len();
    for rel in &spec.relations {
        if !same_vars(rel.vars(), &spec.vars) {
            return Err(Error::VarSetMismatch);
        }
        if spec.graded && !rel.is_homogeneous() {
            return Err(Error::InvalidParameters(
                "graded quotient with inhomogeneous relation".into(),
            ));
        }
    }
    let filter = MonomialFilter::new(nvars, spec.monomial_relations.clone());
    let monomials = admissible_monomials(&filter, nvars, spec.truncation, spec.monomial_cap)?;
    let index: HashMap<Monomial, usize> = monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let rows = relation_rows(&spec, &monomials, &index);
    let ncols = monomials.len();
    let reduced = match eliminate::<i64>(ncols, &rows) {
        Ok(Reduced::Unit(r)) => Ok(to_big_rows(r)),
        Ok(Reduced::NonUnit(d)) => Err(d),
        Err(Overflow) => match eliminate::<BigInt>(ncols, &rows).expect("big integers do not overflow") {
            Reduced::Unit(r) => Ok(to_big_rows(r)),
            Reduced::NonUnit(d) => Err(d),
        },
    };
    let reduced = match reduced {
        Ok(r) => r,
        Err(divisors) => {
            let torsion: Vec<String> = divisors
                .iter()
                .filter(|d| !d.is_one())
                .map(|d| d.to_string())
                .collect();
            return Err(if torsion.is_empty() {
                Error::NonMonomialBasis
            } else {
                Error::TorsionDetected(torsion)
            });
        }
    };
    let basis: Vec<usize> = (0..ncols).filter(|&c| reduced[c].is_none()).collect();
    let mut basis_pos = vec![None; ncols];
    for (p, &c) in basis.iter().enumerate() {
        basis_pos[c] = Some(p);
    }
    let nf = (0..ncols)
        .map(|c| match &reduced[c] {
            None => vec![(basis_pos[c].unwrap(), BigInt::one())],
            Some(row) => row[1..]
                .iter()
                .map(|(j, v)| (basis_pos[*j as usize].unwrap(), -v))
                .collect(),
        })
        .collect();
    Ok(Arc::new(QuotientRing {
        id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
        vars: spec.vars,
        filter,
        relations: spec.relations,
        truncation: spec.truncation,
        graded: spec.graded,
        monomials,
        index,
        basis,
        basis_pos,
        nf,
        table: OnceLock::new(),
    }))
}

impl QuotientRing {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn monomial_relations(&self) -> &[Monomial] {
        self.filter.generators()
    }

    /// Number of admissible monomials of degree below the truncation.
    pub fn admissible_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_admissible(&self, m: &Monomial) -> bool {
        m.degree() < self.truncation && self.filter.admits(m.exps())
    }

    pub fn basis_monomial(&self, pos: usize) -> &Monomial {
        &self.monomials[self.basis[pos]]
    }

    pub fn basis_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().map(|&c| self.monomials[c].clone()).collect()
    }

    pub fn basis_degree(&self, pos: usize) -> usize {
        self.basis_monomial(pos).degree()
    }

    /// Basis size in each degree.
    pub fn graded_ranks(&self) -> Vec<usize> {
        let top = (0..self.rank()).map(|p| self.basis_degree(p)).max().unwrap_or(0);
        let mut out = vec![0; top + 1];
        for p in 0..self.rank() {
            out[self.basis_degree(p)] += 1;
        }
        out
    }

    /// Position of the basis element 1, if the ring is nonzero.
    pub fn unit_position(&self) -> Option<usize> {
        self.basis_pos.first().copied().flatten()
    }

    /// Normal form of a monomial as sparse basis coordinates.
    pub fn reduce_monomial(&self, m: &Monomial) -> &[(usize, BigInt)] {
        match self.index.get(m) {
            Some(&c) => &self.nf[c],
            None => &[],
        }
    }

    fn product_table(&self) -> &Vec<Vec<(usize, BigInt)>> {
        self.table.get_or_init(|| {
            let n = self.rank();
            let mut t = Vec::with_capacity(n * (n + 1) / 2);
            for i in 0..n {
                for j in i..n {
                    let m = self.basis_monomial(i).mul(self.basis_monomial(j));
                    t.push(self.reduce_monomial(&m).to_vec());
                }
            }
            t
        })
    }

    fn product_entry(&self, i: usize, j: usize) -> &[(usize, BigInt)] {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let n = self.rank();
        let k = i * n - i * (i + 1) / 2 + j;
        &self.product_table()[k]
    }

    pub fn zero(self: &Arc<Self>) -> RingElement {
        RingElement {
            ring: self.clone(),
            coords: vec![BigInt::zero(); self.rank()],
        }
    }

    pub fn one(self: &Arc<Self>) -> RingElement {
        self.normal_form(&Poly::one(&self.vars)).expect("same variables")
    }

    pub fn basis_element(self: &Arc<Self>, pos: usize) -> RingElement {
        let mut e = self.zero();
        e.coords[pos] = BigInt::one();
        e
    }

    pub fn from_coords(self: &Arc<Self>, coords: Vec<BigInt>) -> Result<RingElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidParameters(format!(
                "{} coordinates for a ring of rank {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(RingElement {
            ring: self.clone(),
            coords,
        })
    }

    pub fn var(self: &Arc<Self>, i: usize) -> RingElement {
        self.normal_form(&Poly::var(&self.vars, i)).expect("same variables")
    }

    pub fn monomial(self: &Arc<Self>, m: &Monomial) -> RingElement {
        let mut e = self.zero();
        for (p, c) in self.reduce_monomial(m) {
            e.coords[*p] += c;
        }
        e
    }

    pub fn normal_form(self: &Arc<Self>, p: &Poly) -> Result<RingElement> {
        if !same_vars(p.vars(), &self.vars) {
            return Err(Error::VarSetMismatch);
        }
        let mut e = self.zero();
        for (m, c) in p.terms() {
            for (pos, v) in self.reduce_monomial(m) {
                e.coords[*pos] += c * v;
            }
        }
        Ok(e)
    }

    /// Image of a polynomial under the ring map sending variable `i` to
    /// `images[i]`.
    pub fn evaluate(p: &Poly, images: &[RingElement], target: &Arc<QuotientRing>) -> RingElement {
        let mut powers: HashMap<(usize, u32), RingElement> = HashMap::new();
        let mut out = target.zero();
        for (m, c) in p.terms() {
            let mut t = target.one();
            for (v, e) in m.factors() {
                let pw = powers.entry((v, e)).or_insert_with(|| images[v].pow(e));
                t = &t * &*pw;
            }
            out = &out + &t.scale(c);
        }
        out
    }

    /// Matrix (columns = images of basis monomials) of the ring map that
    /// sends variable `i` of `self` to `images[i]` in `target`.
    pub fn substitution_matrix(&self, images: &[RingElement], target: &Arc<QuotientRing>) -> Vec<RingElement> {
        let mut cache: HashMap<Monomial, RingElement> = HashMap::new();
        let mut out = Vec::with_capacity(self.rank());
        for pos in 0..self.rank() {
            let m = self.basis_monomial(pos).clone();
            out.push(image_of_monomial(&m, images, target, &mut cache));
        }
        out
    }
}

fn image_of_monomial(
    m: &Monomial,
    images: &[RingElement],
    target: &Arc<QuotientRing>,
    cache: &mut HashMap<Monomial, RingElement>,
) -> RingElement {
    if let Some(e) = cache.get(m) {
        return e.clone();
    }
    let out = match m.support().last() {
        None => target.one(),
        Some(&v) => {
            let mut exps = m.exps().to_vec();
            exps[v] -= 1;
            let rest = image_of_monomial(&Monomial::from_exps(exps), images, target, cache);
            &rest * &images[v]
        }
    };
    cache.insert(m.clone(), out.clone());
    out
}

/// A class in a [`QuotientRing`], stored by its basis coordinates.
#[derive(Clone)]
pub struct RingElement {
    ring: Arc<QuotientRing>,
    coords: Vec<BigInt>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement(ring {}, {:?})", self.ring.id, self.coords)
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring.id == other.ring.id && self.coords == other.coords
    }
}

impl Eq for RingElement {}

impl RingElement {
    pub fn ring(&self) -> &Arc<QuotientRing> {
        &self.ring
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &RingElement) -> Result<()> {
        if self.ring.id == other.ring.id {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn checked_add(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        Ok(RingElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        Ok(RingElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        let ring = &self.ring;
        let mut coords = vec![BigInt::zero(); ring.rank()];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (p, v) in ring.product_entry(i, j) {
                    coords[*p] += &ab * v;
                }
            }
        }
        Ok(RingElement {
            ring: ring.clone(),
            coords,
        })
    }

    pub fn scale(&self, c: &BigInt) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> RingElement {
        let mut out = self.ring.one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Coefficient of the basis element 1.
    pub fn constant_coeff(&self) -> BigInt {
        match self.ring.unit_position() {
            Some(p) => self.coords[p].clone(),
            None => BigInt::zero(),
        }
    }

    /// Inverse of an element whose constant coefficient is ±1 (every
    /// non-constant basis monomial is nilpotent).
    pub fn inverse_unipotent(&self) -> Result<RingElement> {
        let c = self.constant_coeff();
        if !c.abs().is_one() {
            return Err(Error::NonUnitConstantTerm(c.to_string()));
        }
        let one = self.ring.one();
        let q = &one - &self.scale(&c);
        let mut out = one.clone();
        let mut power = one;
        for _ in 0..self.ring.truncation {
            power = &power * &q;
            if power.is_zero() {
                break;
            }
            out = &out + &power;
        }
        Ok(out.scale(&c))
    }

    /// Integer power, negative exponents via [`Self::inverse_unipotent`].
    pub fn powi(&self, k: i64) -> Result<RingElement> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inverse_unipotent()?.pow(k.unsigned_abs() as u32))
        }
    }

    /// Part of the element supported on basis monomials of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            coords: self
                .coords
                .iter()
                .enumerate()
                .map(|(p, c)| if self.ring.basis_degree(p) == d { c.clone() } else { BigInt::zero() })
                .collect(),
        }
    }

    /// Polynomial in the basis monomials representing this class.
    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            &self.ring.vars,
            self.coords
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(p, c)| (self.ring.basis_monomial(p).clone(), c.clone())),
        )
    }
}

impl<'a> Add<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.checked_add(rhs).expect("elements of different rings")
    }
}

impl<'a> Sub<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self.checked_sub(rhs).expect("elements of different rings")
    }
}

impl<'a> Mul<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        self.checked_mul(rhs).expect("elements of different rings")
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn univariate(rel_deg: u8, trunc: usize) -> Arc<QuotientRing> {
        let v = VarSet::plain(1);
        build_quotient(QuotientSpec {
            vars: v.clone(),
            monomial_relations: vec![],
            relations: vec![Poly::monomial(&v, Monomial::from_exps(vec![rel_deg]), 1)],
            truncation: trunc,
            graded: true,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
        })
        .unwrap()
    }

    #[test]
    fn square_zero() {
        let q = univariate(2, 3);
        assert_eq!(q.rank(), 2);
        assert_eq!(q.basis_monomials(), vec![Monomial::from_exps(vec![0]), Monomial::from_exps(vec![1])]);
        let x = q.var(0);
        assert!(x.pow(3).is_zero());
        assert!(q.normal_form(&Poly::var(q.vars(), 0).pow(3)).unwrap().is_zero());
        assert_eq!(q.monomial(q.basis_monomial(1)), q.basis_element(1));
    }

    #[test]
    fn torsion_is_reported() {
        let v = VarSet::plain(1);
        let err = build_quotient(QuotientSpec {
            vars: v.clone(),
            monomial_relations: vec![],
            relations: vec![Poly::monomial(&v, Monomial::var(1, 0), 2)],
            truncation: 2,
            graded: true,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
        })
        .unwrap_err();
        assert_eq!(err, Error::TorsionDetected(vec!["2".into()]));
    }

    #[test]
    fn cap_is_enforced() {
        let v = VarSet::plain(6);
        let err = build_quotient(QuotientSpec {
            vars: v,
            monomial_relations: vec![],
            relations: vec![],
            truncation: 6,
            graded: true,
            monomial_cap: 100,
        })
        .unwrap_err();
        assert!(matches!(err, Error::CombinatorialExplosion { .. }));
    }

    #[test]
    fn mixed_ring_operations_fail() {
        let a = univariate(2, 3);
        let b = univariate(2, 3);
        assert_eq!(a.one().checked_add(&b.one()), Err(Error::RingMismatch));
    }

    #[test]
    fn unipotent_inverse_in_ring() {
        let q = univariate(4, 5);
        let x = q.var(0);
        let u = &q.one() - &x;
        let inv = u.inverse_unipotent().unwrap();
        assert_eq!(&u * &inv, q.one());
        assert_eq!(inv, &(&(&q.one() + &x) + &x.pow(2)) + &x.pow(3));
    }
}
