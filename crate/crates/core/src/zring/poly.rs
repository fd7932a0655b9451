//! Sparse multivariate polynomials with big-integer coefficients.

use std::cmp::Reverse;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matroid::Subset;

/// What a generator stands for.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarTag {
    /// x_F for a flat F.
    Flat(Subset),
    /// y_e for a ground-set element.
    Element(usize),
    /// u_S for a flat or subset label in a simplicial presentation.
    Label(Subset),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub tag: VarTag,
}

/// An ordered list of degree-one generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    vars: Vec<Var>,
}

impl VarSet {
    pub fn new(vars: Vec<Var>) -> Result<Arc<VarSet>> {
        let mut names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameters("duplicate variable name".into()));
        }
        if vars.len() > u16::MAX as usize {
            return Err(Error::InvalidParameters("too many variables".into()));
        }
        Ok(Arc::new(VarSet { vars }))
    }

    /// Variables named `x0, x1, ...` with label tags.
    pub fn plain(n: usize) -> Arc<VarSet> {
        let vars = (0..n)
            .map(|i| Var {
                name: format!("x{i}"),
                tag: VarTag::Label(i as Subset),
            })
            .collect();
        Arc::new(VarSet { vars })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn position(&self, tag: &VarTag) -> Option<usize> {
        self.vars.iter().position(|v| &v.tag == tag)
    }
}

pub(crate) fn same_vars(a: &Arc<VarSet>, b: &Arc<VarSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A monomial as a dense exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Box<[u8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exps(exps: Vec<u8>) -> Monomial {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exps(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn times_var(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e[i] = e[i].checked_add(1).expect("exponent overflow");
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Indices of variables with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0).collect()
    }

    /// (variable, exponent) pairs for the support.
    pub fn factors(&self) -> Vec<(usize, u32)> {
        (0..self.0.len())
            .filter(|&i| self.0[i] > 0)
            .map(|i| (i, self.0[i] as u32))
            .collect()
    }
}

/// A polynomial over a fixed [`VarSet`]; zero coefficients are never
/// stored.
#[derive(Clone, Debug)]
pub struct Poly {
    vars: Arc<VarSet>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(vars: &Arc<VarSet>) -> Poly {
        Poly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<VarSet>, c: impl Into<BigInt>) -> Poly {
        let mut p = Poly::zero(vars);
        p.add_term(Monomial::one(vars.len()), c.into());
        p
    }

    pub fn one(vars: &Arc<VarSet>) -> Poly {
        Poly::constant(vars, 1)
    }

    pub fn var(vars: &Arc<VarSet>, i: usize) -> Poly {
        Poly::monomial(vars, Monomial::var(vars.len(), i), 1)
    }

    pub fn monomial(vars: &Arc<VarSet>, m: Monomial, c: impl Into<BigInt>) -> Poly {
        let mut p = Poly::zero(vars);
        p.add_term(m, c.into());
        p
    }

    pub fn from_terms(vars: &Arc<VarSet>, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Poly {
        let mut p = Poly::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&Monomial::one(self.vars.len()))
    }

    /// Largest total degree of a term; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Smallest total degree of a term; zero for the zero polynomial.
    pub fn min_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).min().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        assert_eq!(m.exps().len(), self.vars.len(), "monomial arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(Error::VarSetMismatch)
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.mul_truncated(other, usize::MAX)
    }

    /// Product with all terms of degree above `maxdeg` dropped.
    pub fn mul_truncated(&self, other: &Poly, maxdeg: usize) -> Result<Poly> {
        self.check(other)?;
        let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            for (m2, c2) in &other.terms {
                if d1 + m2.degree() > maxdeg {
                    continue;
                }
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Poly {
            vars: self.vars.clone(),
            terms: acc,
        })
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        self.pow_truncated(k, usize::MAX)
    }

    pub fn pow_truncated(&self, k: u32, maxdeg: usize) -> Poly {
        let mut out = Poly::one(&self.vars).truncate(maxdeg);
        for _ in 0..k {
            out = out.mul_truncated(self, maxdeg).unwrap();
        }
        out
    }

    /// Drop every term of degree greater than `maxdeg`.
    pub fn truncate(&self, maxdeg: usize) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= maxdeg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Inverse of a polynomial with constant term ±1, modulo terms of
    /// degree greater than `maxdeg`.
    pub fn invert_unipotent(&self, maxdeg: usize) -> Result<Poly> {
        let c = self.constant_term();
        if !c.abs().is_one() {
            return Err(Error::NonUnitConstantTerm(c.to_string()));
        }
        // self = c (1 - q) with q free of constant term
        let q = Poly::one(&self.vars).try_sub(&self.scale(&c))?;
        let mut out = Poly::one(&self.vars);
        let mut power = Poly::one(&self.vars);
        for _ in 0..maxdeg {
            power = power.mul_truncated(&q, maxdeg)?;
            if power.is_zero() {
                break;
            }
            out = out.try_add(&power)?;
        }
        Ok(out.scale(&c))
    }

    /// Apply `f` to every term's monomial, accumulating the results.
    pub fn map_monomials(&self, vars: &Arc<VarSet>, f: impl Fn(&Monomial) -> Option<Monomial>) -> Poly {
        let mut out = Poly::zero(vars);
        for (m, c) in &self.terms {
            if let Some(m2) = f(m) {
                out.add_term(m2, c.clone());
            }
        }
        out
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("variable sets differ")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("variable sets differ")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("variable sets differ")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (m.degree(), Reverse(*m)));
        let mut first = true;
        for (m, c) in terms {
            let body: Vec<String> = m
                .factors()
                .into_iter()
                .map(|(v, e)| {
                    let name = &self.vars.var(v).name;
                    if e == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if body.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", body.join("*"))?;
            } else {
                write!(f, "{mag}*{}", body.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Arc<VarSet>, Poly, Poly) {
        let v = VarSet::plain(2);
        let x = Poly::var(&v, 0);
        let y = Poly::var(&v, 1);
        (v, x, y)
    }

    #[test]
    fn basic_identities() {
        let (v, x, y) = xy();
        let one = Poly::one(&v);
        assert_eq!(&(&one - &x) * &(&one + &x), &one - &(&x * &x));
        let t = &(&one + &x) + &(&x * &x);
        assert_eq!(t.truncate(1), &one + &x);
        let s = &x + &y;
        let expect = &(&(&x * &x) + &(&x * &y).scale(&BigInt::from(2))) + &(&y * &y);
        assert_eq!(s.pow(2), expect);
    }

    #[test]
    fn unipotent_inverse() {
        let (v, x, _) = xy();
        let one = Poly::one(&v);
        let inv = (&one - &x).invert_unipotent(2).unwrap();
        assert_eq!(inv, &(&one + &x) + &(&x * &x));
        assert_eq!(one.invert_unipotent(5).unwrap(), one);
        let inv2 = (&one + &x).invert_unipotent(2).unwrap();
        assert_eq!(inv2, &(&one - &x) + &(&x * &x));
        let minus = Poly::constant(&v, -1);
        assert_eq!(minus.invert_unipotent(3).unwrap(), minus);
        assert!(matches!(
            Poly::constant(&v, 2).invert_unipotent(1),
            Err(Error::NonUnitConstantTerm(_))
        ));
    }

    #[test]
    fn mismatched_vars() {
        let (_, x, _) = xy();
        let w = VarSet::plain(3);
        assert_eq!(x.try_add(&Poly::var(&w, 0)), Err(Error::VarSetMismatch));
    }

    #[test]
    fn display() {
        let (v, x, y) = xy();
        let p = &(&Poly::constant(&v, 3) - &(&x * &y).scale(&BigInt::from(2))) + &x.pow(2);
        assert_eq!(p.to_string(), "3 + x0^2 - 2*x0*x1");
    }
}
