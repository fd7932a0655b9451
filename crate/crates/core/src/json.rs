//! JSON encodings for matroids, multi-indices, ring classes, Snapper
//! polynomials and the ζ matrix.
//!
//! Flats are sorted element lists; "E" and "empty" are accepted on input.
//! Integers are JSON numbers when they fit in i64 and decimal strings
//! otherwise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chow::ChowRing;
use crate::error::{Error, Result};
use crate::fy::{Flavor, FlatMultiIndex, FyRing};
use crate::kring::{KRing, MatroidRings};
use crate::matroid::{elements, matroid_from_bases, named_matroid, subset_of, Family, Matroid, Subset};
use crate::snapper::SnapperPoly;
use crate::zring::{Matrix, Monomial, RingElement, VarTag};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Explicit basis list or a named family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatroidJson {
    Bases { n: usize, bases: Vec<Vec<usize>> },
    Family(Family),
}

impl MatroidJson {
    pub fn build(&self) -> Result<Matroid> {
        match self {
            MatroidJson::Bases { n, bases } => matroid_from_bases(*n, bases),
            MatroidJson::Family(f) => named_matroid(f),
        }
    }
}

pub fn matroid_to_json(m: &Matroid) -> Value {
    json!({
        "n": m.ground_size(),
        "bases": m.bases().iter().map(|&b| elements(b)).collect::<Vec<_>>(),
    })
}

pub fn matroid_from_json(v: &Value) -> Result<Matroid> {
    serde_json::from_value::<MatroidJson>(v.clone())
        .map_err(|e| parse_err(format!("matroid: {e}")))?
        .build()
}

pub fn int_to_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(x) => json!(x),
        None => json!(c.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| parse_err(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(|_| parse_err(format!("not an integer: {s}"))),
        other => Err(parse_err(format!("not an integer: {other}"))),
    }
}

pub fn flat_to_json(f: Subset) -> Value {
    json!(elements(f))
}

/// An element list, "E", "empty", or a string such as "0,1".
pub fn flat_from_json(v: &Value, n: usize) -> Result<Subset> {
    let check = |elems: Vec<usize>| -> Result<Subset> {
        if let Some(&e) = elems.iter().find(|&&e| e >= n) {
            return Err(parse_err(format!("element {e} outside ground set of size {n}")));
        }
        Ok(subset_of(&elems))
    };
    match v {
        Value::Array(xs) => check(
            xs.iter()
                .map(|x| x.as_u64().map(|e| e as usize).ok_or_else(|| parse_err(format!("bad element {x}"))))
                .collect::<Result<_>>()?,
        ),
        Value::String(s) => flat_from_str(s, n),
        other => Err(parse_err(format!("bad flat {other}"))),
    }
}

fn flat_from_str(s: &str, n: usize) -> Result<Subset> {
    let s = s.trim();
    match s {
        "E" => Ok(if n == 32 { u32::MAX } else { (1 << n) - 1 }),
        "empty" | "" | "[]" => Ok(0),
        _ => {
            let inner = s.trim_start_matches('[').trim_end_matches(']');
            let elems: Vec<usize> = inner
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| parse_err(format!("bad flat {s:?}"))))
                .collect::<Result<_>>()?;
            if let Some(&e) = elems.iter().find(|&&e| e >= n) {
                return Err(parse_err(format!("element {e} outside ground set of size {n}")));
            }
            Ok(subset_of(&elems))
        }
    }
}

/// A generator of a ring presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// x_F (Chow) or τ_F (K).
    Flat(Subset),
    /// y_e, augmented only.
    Y(usize),
    /// h_F (Chow) or η_F (K).
    Simplicial(Subset),
}

fn generator_to_json(g: Generator) -> Value {
    match g {
        Generator::Flat(f) => json!(["flat", elements(f)]),
        Generator::Y(e) => json!(["y", e]),
        Generator::Simplicial(f) => json!(["h", elements(f)]),
    }
}

fn generator_from_json(v: &Value, n: usize) -> Result<Generator> {
    let xs = v.as_array().filter(|xs| xs.len() == 2).ok_or_else(|| parse_err(format!("bad generator {v}")))?;
    let tag = xs[0].as_str().ok_or_else(|| parse_err(format!("bad generator {v}")))?;
    match tag {
        "flat" | "x" | "t" | "tau" => Ok(Generator::Flat(flat_from_json(&xs[1], n)?)),
        "h" | "eta" => Ok(Generator::Simplicial(flat_from_json(&xs[1], n)?)),
        "y" => {
            let e = xs[1].as_u64().map(|e| e as usize).filter(|&e| e < n);
            e.map(Generator::Y).ok_or_else(|| parse_err(format!("bad element in {v}")))
        }
        _ => Err(parse_err(format!("unknown generator {tag:?}"))),
    }
}

fn is_generator(v: &Value) -> bool {
    v.as_array().is_some_and(|xs| xs.len() == 2 && xs[0].is_string())
}

fn exponent(v: &Value) -> Result<u32> {
    v.as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(|| parse_err(format!("bad exponent {v}")))
}

/// A list of [generator, exponent] pairs; a bare pair is also accepted.
fn power_product_from_json(v: &Value, n: usize) -> Result<Vec<(Generator, u32)>> {
    let xs = v.as_array().ok_or_else(|| parse_err(format!("expected a list of pairs, got {v}")))?;
    if xs.len() == 2 && is_generator(&xs[0]) && xs[1].is_number() {
        return Ok(vec![(generator_from_json(&xs[0], n)?, exponent(&xs[1])?)]);
    }
    xs.iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([g, e]) => Ok((generator_from_json(g, n)?, exponent(e)?)),
            _ => Err(parse_err(format!("bad pair {p}"))),
        })
        .collect()
}

pub fn multi_index_to_json(m: &FlatMultiIndex) -> Value {
    Value::Array(m.pairs().into_iter().map(|(f, e)| json!([generator_to_json(Generator::Flat(f)), e])).collect())
}

/// Pairs [["flat",[0,1]],2], a bare pair, or an object {"E": 1, "0,1": 2}.
pub fn multi_index_from_json(v: &Value, n: usize) -> Result<FlatMultiIndex> {
    let mut out = FlatMultiIndex::new();
    if let Value::Object(map) = v {
        for (k, e) in map {
            out.add(flat_from_str(k, n)?, exponent(e)?);
        }
        return Ok(out);
    }
    for (g, e) in power_product_from_json(v, n)? {
        match g {
            Generator::Flat(f) | Generator::Simplicial(f) => out.add(f, e),
            Generator::Y(_) => return Err(parse_err("multi-indices range over flats")),
        }
    }
    Ok(out)
}

pub fn snapper_to_json(p: &SnapperPoly) -> Value {
    json!({
        "basis": "rising",
        "terms": p.terms.iter().map(|(m, c)| json!({"index": multi_index_to_json(m), "coeff": int_to_json(c)})).collect::<Vec<_>>(),
    })
}

pub fn snapper_from_json(v: &Value, n: usize) -> Result<SnapperPoly> {
    if v.get("basis").and_then(Value::as_str).is_some_and(|b| b != "rising") {
        return Err(parse_err("only the rising basis is supported"));
    }
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| parse_err("missing terms"))?;
    let mut out = SnapperPoly::default();
    for t in terms {
        let m = multi_index_from_json(t.get("index").ok_or_else(|| parse_err("missing index"))?, n)?;
        let c = int_from_json(t.get("coeff").ok_or_else(|| parse_err("missing coeff"))?)?;
        let slot = out.terms.entry(m).or_default();
        *slot += c;
    }
    out.terms.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// The ring a class lives in.
#[derive(Clone, Copy, Debug)]
pub enum ClassRing<'a> {
    Chow(&'a ChowRing),
    K(&'a KRing),
}

impl ClassRing<'_> {
    fn fy(&self) -> &FyRing {
        match self {
            ClassRing::Chow(c) => c.fy(),
            ClassRing::K(k) => k.fy(),
        }
    }

    pub fn name(&self) -> &'static str {
        match (self, self.fy().flavor()) {
            (ClassRing::Chow(_), Flavor::Plain) => "chow",
            (ClassRing::Chow(_), Flavor::Augmented) => "chow_aug",
            (ClassRing::K(_), Flavor::Plain) => "k",
            (ClassRing::K(_), Flavor::Augmented) => "k_aug",
        }
    }

    fn generator(&self, g: Generator) -> Result<RingElement> {
        match (self, g) {
            (_, Generator::Flat(f)) => self.fy().generator(f),
            (_, Generator::Y(e)) => self.fy().y_generator(e),
            (ClassRing::Chow(c), Generator::Simplicial(f)) => c.h_class(f),
            (ClassRing::K(k), Generator::Simplicial(f)) => k.eta_class(f),
        }
    }
}

fn monomial_to_json(fy: &FyRing, m: &Monomial) -> Value {
    let vars = fy.ring().vars();
    Value::Array(
        m.factors()
            .into_iter()
            .map(|(v, e)| {
                let g = match vars.var(v).tag {
                    VarTag::Element(x) => Generator::Y(x),
                    VarTag::Flat(f) | VarTag::Label(f) => Generator::Flat(f),
                };
                json!([generator_to_json(g), e])
            })
            .collect(),
    )
}

/// Coordinates in the standard monomial basis of the FY presentation.
pub fn class_to_json(ring: ClassRing<'_>, x: &RingElement) -> Value {
    let fy = ring.fy();
    let q = fy.ring();
    let terms: Vec<Value> = x
        .coords()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| json!({"monomial": monomial_to_json(fy, q.basis_monomial(i)), "coeff": int_to_json(c)}))
        .collect();
    json!({"ring": ring.name(), "terms": terms})
}

pub fn class_from_json(ring: ClassRing<'_>, v: &Value) -> Result<RingElement> {
    if let Some(name) = v.get("ring").and_then(Value::as_str) {
        if name != ring.name() {
            return Err(parse_err(format!("class lives in {name}, expected {}", ring.name())));
        }
    }
    let n = ring.fy().matroid().ground_size();
    let q = ring.fy().ring();
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| parse_err("missing terms"))?;
    let mut acc = q.zero();
    for t in terms {
        let factors = power_product_from_json(t.get("monomial").ok_or_else(|| parse_err("missing monomial"))?, n)?;
        let c = int_from_json(t.get("coeff").ok_or_else(|| parse_err("missing coeff"))?)?;
        let mut term = q.one().scale(&c);
        for (g, e) in factors {
            term = term.checked_mul(&ring.generator(g)?.pow(e))?;
        }
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

/// ζ as an integer matrix with the K and Chow basis monomials.
pub fn zeta_to_json(rings: &MatroidRings) -> Value {
    let basis = |fy: &FyRing| -> Vec<Value> {
        fy.ring().basis_monomials().iter().map(|m| monomial_to_json(fy, m)).collect()
    };
    let matrix = |m: &[Vec<BigInt>]| -> Vec<Vec<Value>> {
        m.iter().map(|row| row.iter().map(int_to_json).collect()).collect()
    };
    json!({
        "flavor": rings.flavor(),
        "k_basis": basis(rings.k.fy()),
        "chow_basis": basis(rings.chow.fy()),
        "matrix": matrix(&rings.zeta.matrix),
        "inverse": matrix(&rings.zeta.inverse),
    })
}

/// Parse the matrix part of `zeta_to_json`.
pub fn zeta_matrix_from_json(v: &Value) -> Result<(Matrix, Matrix)> {
    let matrix = |key: &str| -> Result<Matrix> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err(format!("missing {key}")))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| parse_err("matrix rows must be lists"))?
                    .iter()
                    .map(int_from_json)
                    .collect()
            })
            .collect()
    };
    Ok((matrix("matrix")?, matrix("inverse")?))
}

/// Line-bundle exponents {flat: a_F} as JSON.
pub fn exponents_from_json(v: &Value, n: usize) -> Result<BTreeMap<Subset, i64>> {
    let map = v.as_object().ok_or_else(|| parse_err("expected an object of flat exponents"))?;
    map.iter()
        .map(|(k, a)| Ok((flat_from_str(k, n)?, a.as_i64().ok_or_else(|| parse_err(format!("bad exponent {a}")))?)))
        .collect()
}
