//! Exact integer linear algebra: sparse echelon forms for the quotient
//! engine, plus dense Hermite and Smith normal forms and determinants.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dense::smith_invariants;

/// Integer coefficient types usable by [`Echelon`]. Every operation
/// returns `None` on overflow.
pub trait Coef: Clone + PartialEq + Debug + Send + Sync {
    fn c_zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn c_is_zero(&self) -> bool;
    fn c_is_one(&self) -> bool;
    fn c_is_negative(&self) -> bool;
    fn c_neg(&self) -> Option<Self>;
    fn c_add(&self, o: &Self) -> Option<Self>;
    fn c_mul(&self, o: &Self) -> Option<Self>;
    /// Floor division and remainder.
    fn div_rem_floor(&self, o: &Self) -> Option<(Self, Self)>;
    /// (g, s, t) with s·self + t·o = g = gcd ≥ 0.
    fn ext_gcd(&self, o: &Self) -> Option<(Self, Self, Self)>;
}

impl Coef for i64 {
    fn c_zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn c_is_zero(&self) -> bool {
        *self == 0
    }
    fn c_is_one(&self) -> bool {
        *self == 1
    }
    fn c_is_negative(&self) -> bool {
        *self < 0
    }
    fn c_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn div_rem_floor(&self, o: &Self) -> Option<(Self, Self)> {
        if *self == i64::MIN || *o == i64::MIN {
            return None;
        }
        Some(self.div_mod_floor(o))
    }
    fn ext_gcd(&self, o: &Self) -> Option<(Self, Self, Self)> {
        let e = BigInt::from(*self).extended_gcd(&BigInt::from(*o));
        let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
        if Signed::is_negative(&g) {
            g = -g;
            s = -s;
            t = -t;
        }
        Some((g.to_i64()?, s.to_i64()?, t.to_i64()?))
    }
}

impl Coef for BigInt {
    fn c_zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn c_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn c_is_one(&self) -> bool {
        One::is_one(self)
    }
    fn c_is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn c_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_rem_floor(&self, o: &Self) -> Option<(Self, Self)> {
        Some(self.div_mod_floor(o))
    }
    fn ext_gcd(&self, o: &Self) -> Option<(Self, Self, Self)> {
        let e = self.extended_gcd(o);
        if Signed::is_negative(&e.gcd) {
            Some((-e.gcd, -e.x, -e.y))
        } else {
            Some((e.gcd, e.x, e.y))
        }
    }
}

/// A sparse row: strictly increasing column indices, nonzero values.
pub type SparseRow<T> = Vec<(u32, T)>;

/// `a·x + b·y` for sparse rows.
fn combine<T: Coef>(a: &T, x: &[(u32, T)], b: &T, y: &[(u32, T)]) -> Option<SparseRow<T>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (col, v) = if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            let r = (x[i].0, a.c_mul(&x[i].1)?);
            i += 1;
            r
        } else if i == x.len() || y[j].0 < x[i].0 {
            let r = (y[j].0, b.c_mul(&y[j].1)?);
            j += 1;
            r
        } else {
            let r = (x[i].0, a.c_mul(&x[i].1)?.c_add(&b.c_mul(&y[j].1)?)?);
            i += 1;
            j += 1;
            r
        };
        if !v.c_is_zero() {
            out.push((col, v));
        }
    }
    Some(out)
}

fn negate_row<T: Coef>(row: &mut SparseRow<T>) -> Option<()> {
    for e in row.iter_mut() {
        e.1 = e.1.c_neg()?;
    }
    Some(())
}

/// Overflow marker for the fixed-width coefficient path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

/// Incremental row echelon form of an integer lattice. Rows are keyed by
/// their leading column; leading entries are positive. The leftmost
/// columns are eliminated first.
#[derive(Clone, Debug)]
pub struct Echelon<T: Coef> {
    ncols: usize,
    pivots: Vec<Option<SparseRow<T>>>,
}

/// Outcome of [`Echelon::reduce`].
#[derive(Clone, Debug)]
pub enum Reduced<T: Coef> {
    /// Every pivot is 1; each stored row is `e_c + Σ r_j e_j` with `j`
    /// ranging over non-pivot columns.
    Unit(Vec<Option<SparseRow<T>>>),
    /// Some pivot is not a unit; the Smith invariants of the residual
    /// block after eliminating unit pivots.
    NonUnit(Vec<BigInt>),
}

impl<T: Coef> Echelon<T> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: vec![None; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.iter().filter(|p| p.is_some()).count()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivots[c].is_some()
    }

    /// Add a row to the lattice.
    pub fn insert(&mut self, mut row: SparseRow<T>) -> Result<(), Overflow> {
        loop {
            let Some(&(c, ref lead)) = row.first() else {
                return Ok(());
            };
            let c = c as usize;
            let lead = lead.clone();
            match self.pivots[c].take() {
                None => {
                    if lead.c_is_negative() {
                        negate_row(&mut row).ok_or(Overflow)?;
                    }
                    self.pivots[c] = Some(row);
                    return Ok(());
                }
                Some(p) => {
                    let plead = p[0].1.clone();
                    let (q, r) = lead.div_rem_floor(&plead).ok_or(Overflow)?;
                    if r.c_is_zero() {
                        let nq = q.c_neg().ok_or(Overflow)?;
                        row = combine(&T::from_i64(1), &row, &nq, &p).ok_or(Overflow)?;
                        self.pivots[c] = Some(p);
                    } else {
                        let (g, s, t) = plead.ext_gcd(&lead).ok_or(Overflow)?;
                        let new_p = combine(&s, &p, &t, &row).ok_or(Overflow)?;
                        let a = lead.div_rem_floor(&g).ok_or(Overflow)?.0.c_neg().ok_or(Overflow)?;
                        let b = plead.div_rem_floor(&g).ok_or(Overflow)?.0;
                        row = combine(&a, &p, &b, &row).ok_or(Overflow)?;
                        debug_assert!(new_p[0].0 as usize == c && new_p[0].1 == g);
                        self.pivots[c] = Some(new_p);
                    }
                }
            }
        }
    }

    /// Back-substitute to the reduced form, or report the Smith invariants
    /// of the non-unit part.
    pub fn reduce(self) -> Result<Reduced<T>, Overflow> {
        let ncols = self.ncols;
        let unit: Vec<bool> = self
            .pivots
            .iter()
            .map(|p| p.as_ref().is_some_and(|r| r[0].1.c_is_one()))
            .collect();
        let all_unit = self
            .pivots
            .iter()
            .all(|p| p.as_ref().is_none_or(|r| r[0].1.c_is_one()));
        // Reduce unit rows first (descending), then use them on the others.
        let mut reduced: Vec<Option<SparseRow<T>>> = vec![None; ncols];
        for c in (0..ncols).rev() {
            if !unit[c] {
                continue;
            }
            let row = self.pivots[c].as_ref().unwrap();
            reduced[c] = Some(eliminate(row, &reduced, &unit, true)?);
        }
        if all_unit {
            return Ok(Reduced::Unit(reduced));
        }
        let residual: Vec<SparseRow<T>> = (0..ncols)
            .filter(|&c| self.pivots[c].is_some() && !unit[c])
            .map(|c| eliminate(self.pivots[c].as_ref().unwrap(), &reduced, &unit, false))
            .collect::<Result<_, _>>()?;
        let mut cols: Vec<u32> = residual.iter().flat_map(|r| r.iter().map(|e| e.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        let dense: Vec<Vec<BigInt>> = residual
            .iter()
            .map(|r| {
                let mut v = vec![BigInt::zero(); cols.len()];
                for (c, x) in r {
                    v[cols.binary_search(c).unwrap()] = x.to_big();
                }
                v
            })
            .collect();
        Ok(Reduced::NonUnit(smith_invariants(&dense)))
    }
}

/// Clear every unit-pivot column of `row` (except its own leading entry
/// when `keep_lead`) using already reduced rows.
fn eliminate<T: Coef>(
    row: &[(u32, T)],
    reduced: &[Option<SparseRow<T>>],
    unit: &[bool],
    keep_lead: bool,
) -> Result<SparseRow<T>, Overflow> {
    let mut acc: BTreeMap<u32, T> = BTreeMap::new();
    let skip = usize::from(keep_lead);
    for (c, v) in &row[skip..] {
        let c = *c as usize;
        if unit[c] {
            let r = reduced[c].as_ref().expect("reduced in order");
            for (j, w) in &r[1..] {
                let delta = v.c_mul(w).ok_or(Overflow)?.c_neg().ok_or(Overflow)?;
                let slot = acc.entry(*j).or_insert_with(T::c_zero);
                *slot = slot.c_add(&delta).ok_or(Overflow)?;
            }
        } else {
            let slot = acc.entry(c as u32).or_insert_with(T::c_zero);
            *slot = slot.c_add(v).ok_or(Overflow)?;
        }
    }
    let mut out: SparseRow<T> = Vec::with_capacity(acc.len() + 1);
    if keep_lead {
        out.push(row[0].clone());
    }
    out.extend(acc.into_iter().filter(|(_, v)| !v.c_is_zero()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_unit_and_torsion() {
        let mut e: Echelon<i64> = Echelon::new(3);
        e.insert(vec![(0, 1), (1, 2)]).unwrap();
        e.insert(vec![(0, 2), (1, 5), (2, 5)]).unwrap();
        match e.reduce().unwrap() {
            Reduced::Unit(rows) => {
                assert_eq!(rows[0], Some(vec![(0, 1), (2, -10)]));
                assert_eq!(rows[1], Some(vec![(1, 1), (2, 5)]));
                assert!(rows[2].is_none());
            }
            Reduced::NonUnit(_) => panic!("expected unit pivots"),
        }
        // (2,1,0), (3,0,1) span a saturated lattice, but no coordinate
        // complement exists once column 0 is eliminated first
        let mut f: Echelon<i64> = Echelon::new(3);
        f.insert(vec![(0, 2), (1, 1)]).unwrap();
        f.insert(vec![(0, 3), (2, 1)]).unwrap();
        match f.reduce().unwrap() {
            Reduced::NonUnit(d) => assert_eq!(d, vec![BigInt::one()]),
            Reduced::Unit(_) => panic!("expected a non-unit pivot"),
        }
        let mut t: Echelon<BigInt> = Echelon::new(2);
        t.insert(vec![(0, BigInt::from(2))]).unwrap();
        match t.reduce().unwrap() {
            Reduced::NonUnit(d) => assert_eq!(d, vec![BigInt::from(2)]),
            Reduced::Unit(_) => panic!("expected torsion"),
        }
    }
}
