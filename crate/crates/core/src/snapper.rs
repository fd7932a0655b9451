//! Snapper polynomials in the simplicial and FY generators.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chow::{all_multi_indices, chain_multi_indices, simplicial_condition};
use crate::error::{Error, Result};
use crate::fy::{Flavor, FlatMultiIndex};
use crate::kring::MatroidRings;
use crate::matroid::{char_poly_mu, CharPolyCoeffs, Matroid, Subset};

/// x^{(d)} = x(x+1)⋯(x+d−1)/d!.
pub fn rising_binom(x: i64, d: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..d as i64 {
        num *= x + i;
        den *= i + 1;
    }
    num / den
}

/// C(n, k), zero when k < 0 or k > n or n < 0.
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// n!/(x! y! z!) when x + y + z = n and all parts are nonnegative, else 0.
pub fn trinomial(n: i64, x: i64, y: i64, z: i64) -> BigInt {
    if x < 0 || y < 0 || z < 0 || x + y + z != n {
        return BigInt::zero();
    }
    binom(n, x) * binom(n - x, y)
}

/// Σ c_m a^{(m)} over flat multi-indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SnapperPoly {
    pub terms: BTreeMap<FlatMultiIndex, BigInt>,
}

impl SnapperPoly {
    pub fn coeff(&self, m: &FlatMultiIndex) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn add(&mut self, m: FlatMultiIndex, c: BigInt) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Evaluate with a_F = a(F); variables absent from a term are ignored.
    pub fn eval(&self, a: impl Fn(Subset) -> i64) -> BigInt {
        self.terms
            .iter()
            .map(|(m, c)| m.pairs().into_iter().fold(c.clone(), |acc, (f, e)| acc * rising_binom(a(f), e)))
            .sum()
    }
}

/// Σ a^{(m)} over m satisfying dragon Hall–Rado (plain) or Hall–Rado
/// (augmented).
pub fn snap_simplicial(m: &Matroid, flavor: Flavor) -> Result<SnapperPoly> {
    let lattice = m.lattice()?;
    let flats: Vec<Subset> = lattice.flats()[1..].to_vec();
    let hi = match flavor {
        Flavor::Plain => m.rank() - 1,
        Flavor::Augmented => m.rank(),
    };
    let mut out = SnapperPoly::default();
    for idx in all_multi_indices(&flats, 0, hi) {
        if simplicial_condition(m, &idx, flavor) {
            out.add(idx, BigInt::one());
        }
    }
    Ok(out)
}

/// A flag ∅ = F_0 ⊊ ⋯ ⊊ F_k = E with the data of its interval minors.
#[derive(Clone, Debug)]
pub struct Flag {
    pub flats: Vec<Subset>,
    /// d_i = rk F_i − rk F_{i−1} − 1 for i = 1..k.
    pub d: Vec<i64>,
    /// Characteristic coefficients of M^{F_i}_{F_{i−1}}.
    pub mu: Vec<CharPolyCoeffs>,
}

impl Flag {
    pub fn new(m: &Matroid, flats: Vec<Subset>) -> Result<Flag> {
        if flats.len() < 2 || flats[0] != 0 || *flats.last().unwrap() != m.ground() {
            return Err(Error::InvalidParameters("a flag runs from ∅ to E".into()));
        }
        let mut d = Vec::new();
        let mut mu = Vec::new();
        for w in flats.windows(2) {
            if w[0] & !w[1] != 0 || w[0] == w[1] || !m.is_flat(w[1]) {
                return Err(Error::InvalidParameters("not a strict chain of flats".into()));
            }
            let minor = m.minor(w[0], w[1])?;
            d.push(minor.matroid.rank() as i64 - 1);
            mu.push(char_poly_mu(&minor.matroid)?);
        }
        Ok(Flag { flats, d, mu })
    }

    /// k, the number of steps.
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// The multi-index {F_0: m_0, F_i: m_i + 1 (0<i<k), F_k: m_k}.
    pub fn index(&self, m: &[u32]) -> FlatMultiIndex {
        let k = self.len();
        FlatMultiIndex::from_pairs(
            m.iter()
                .enumerate()
                .map(|(i, &e)| (self.flats[i], if i == 0 || i == k { e } else { e + 1 })),
        )
    }
}

pub fn all_flags(m: &Matroid) -> Result<Vec<Flag>> {
    let lattice = m.lattice()?;
    lattice
        .flags()
        .into_iter()
        .map(|chain| Flag::new(m, chain.into_iter().map(|i| lattice.flat(i)).collect()))
        .collect()
}

fn mu_at(c: &CharPolyCoeffs, e: i64) -> BigInt {
    BigInt::from(c.get(e))
}

/// c(F, m) as the double sum over e, f ∈ N^k with e_1 = m_0.
pub fn c_flag(flag: &Flag, m: &[u32]) -> Result<BigInt> {
    let k = flag.len();
    if m.len() != k + 1 {
        return Err(Error::InvalidParameters(format!("expected {} exponents", k + 1)));
    }
    let m: Vec<i64> = m.iter().map(|&x| x as i64).collect();
    // Walk i = 1..k choosing e_{i+1} and f_i; e_1 is fixed.
    fn go(flag: &Flag, m: &[i64], i: usize, e_i: i64, sign: bool, acc: BigInt, out: &mut BigInt) {
        let k = flag.len();
        if i > k {
            *out += if sign { -acc } else { acc };
            return;
        }
        let d = flag.d[i - 1];
        let mu = mu_at(&flag.mu[i - 1], e_i);
        if mu.is_zero() || e_i > d {
            return;
        }
        let next_range: Vec<i64> = if i == k { vec![0] } else { (0..=flag.d[i]).collect() };
        for f in 0..=(d - e_i) {
            let b = binom(d - e_i, f);
            for &e_next in &next_range {
                let t = trinomial(m[i], e_next + f - m[i], m[i] - f, m[i] - e_next);
                if t.is_zero() {
                    continue;
                }
                let flip = (e_i + f) % 2 == 1;
                go(flag, m, i + 1, e_next, sign ^ flip, &acc * &b * &mu * t, out);
            }
        }
    }
    let mut out = BigInt::zero();
    go(flag, &m, 1, m[0], false, BigInt::one(), &mut out);
    Ok(out)
}

/// Tuples (m_0..m_k) of natural numbers with Σ m_i ≤ budget.
fn tuples(len: usize, budget: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    fn rec(i: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e as u32;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, budget, &mut cur, &mut out);
    out
}

/// Snap^FY assembled flag by flag from c(F, m). Terms with
/// Σ m_i + k − 1 ≥ rk M are omitted (their Euler characteristics vanish).
pub fn snap_fy(m: &Matroid) -> Result<SnapperPoly> {
    let r = m.rank();
    let mut out = SnapperPoly::default();
    for flag in all_flags(m)? {
        let k = flag.len();
        if k > r {
            continue;
        }
        for mm in tuples(k + 1, r - k) {
            let c = c_flag(&flag, &mm)?;
            out.add(flag.index(&mm), c);
        }
    }
    Ok(out)
}

/// χ(M, τ^m) from the ring.
pub fn chi_fy_monomial(rings: &MatroidRings, m: &FlatMultiIndex) -> Result<BigInt> {
    let tau = rings.k.tau_monomial(m)?;
    rings.euler_char(&tau)
}

/// Snap^FY with every coefficient computed in the ring: all chain-supported
/// multi-indices on flats (∅ and E included) below the truncation degree.
pub fn snap_fy_from_ring(rings: &MatroidRings) -> Result<SnapperPoly> {
    if rings.flavor() != Flavor::Plain {
        return Err(Error::InvalidParameters("Snap^FY is defined for the plain rings".into()));
    }
    let fy = rings.k.fy();
    let all: Vec<usize> = (0..fy.lattice().len()).collect();
    let hi = rings.matroid().rank() - 1;
    let mut out = SnapperPoly::default();
    for idx in chain_multi_indices(fy, &all, 0, hi) {
        let c = chi_fy_monomial(rings, &idx)?;
        out.add(idx, c);
    }
    Ok(out)
}

/// Two-variable specialization Snap^FY(a_∅, 0, a_E) in closed form.
pub fn snap_fy_twovar(m: &Matroid, a0: i64, ae: i64) -> Result<BigInt> {
    let mu = char_poly_mu(m)?;
    let r = m.rank() as i64;
    let mut out = BigInt::zero();
    for e in 0..r {
        for f in 0..=(r - 1 - e) {
            let term = binom(r - 1 - e, f) * mu_at(&mu, e) * rising_binom(a0, e as u32) * rising_binom(ae, f as u32);
            if (e + f) % 2 == 0 {
                out += term;
            } else {
                out -= term;
            }
        }
    }
    Ok(out)
}

/// deg(t_{F_0}^{m_0} t_{F_1}^{m_1+1} ⋯ t_{F_k}^{m_k}) by the single sum over
/// e with e_1 = m_0, for Σ m_i = rk M − k.
pub fn flag_degree(m: &Matroid, flag: &Flag, mm: &[u32]) -> Result<BigInt> {
    let k = flag.len();
    let r = m.rank();
    let total: usize = mm.iter().map(|&x| x as usize).sum();
    if mm.len() != k + 1 {
        return Err(Error::InvalidParameters(format!("expected {} exponents", k + 1)));
    }
    if total + k != r {
        return Err(Error::WrongTotalDegree {
            expected: r.saturating_sub(k),
            found: total,
        });
    }
    let m64: Vec<i64> = mm.iter().map(|&x| x as i64).collect();
    fn go(flag: &Flag, m: &[i64], i: usize, e_i: i64, acc: BigInt, out: &mut BigInt) {
        let k = flag.len();
        if i > k {
            *out += acc;
            return;
        }
        let d = flag.d[i - 1];
        let mu = mu_at(&flag.mu[i - 1], e_i);
        if mu.is_zero() {
            return;
        }
        let next_range: Vec<i64> = if i == k { vec![0] } else { (0..=flag.d[i]).collect() };
        for &e_next in &next_range {
            let t = trinomial(m[i], e_next - e_i + d - m[i], m[i] - d + e_i, m[i] - e_next);
            if !t.is_zero() {
                go(flag, m, i + 1, e_next, &acc * &mu * t, out);
            }
        }
    }
    let mut out = BigInt::zero();
    go(flag, &m64, 1, m64[0], BigInt::one(), &mut out);
    Ok(if (r - k).is_multiple_of(2) { out } else { -out })
}

/// deg(t_{F_1}^{m_1+1} ⋯ t_{F_{k−1}}^{m_{k−1}+1}) in product form, for
/// Σ (m_i + 1) = rk M − 1. `mid` lists m_1..m_{k−1}.
pub fn flag_volume(m: &Matroid, flag: &Flag, mid: &[u32]) -> Result<BigInt> {
    let k = flag.len();
    let r = m.rank();
    if mid.len() + 1 != k {
        return Err(Error::InvalidParameters(format!("expected {} exponents", k - 1)));
    }
    let total: usize = mid.iter().map(|&x| x as usize + 1).sum();
    if total + 1 != r {
        return Err(Error::WrongTotalDegree {
            expected: r - 1,
            found: total,
        });
    }
    // m_0 = m_k = 0
    let mut full = vec![0i64];
    full.extend(mid.iter().map(|&x| x as i64));
    full.push(0);
    let mut e = vec![0i64; k + 2];
    for i in 2..=k {
        e[i] = e[i - 1] + full[i - 1] - flag.d[i - 2];
    }
    let mut out = BigInt::one();
    for i in 1..=k {
        if e[i] < 0 {
            return Ok(BigInt::zero());
        }
        out = out * mu_at(&flag.mu[i - 1], e[i]) * binom(full[i], e[i + 1]);
    }
    Ok(if (r - k).is_multiple_of(2) { out } else { -out })
}

/// Snap^FY of a possibly loopy matroid evaluated at a(S) for subsets S of
/// its ground set; loopy matroids give 0.
pub fn snap_fy_at(m: &Matroid, a: &dyn Fn(Subset) -> i64) -> Result<BigInt> {
    if !m.is_loopless() {
        return Ok(BigInt::zero());
    }
    Ok(snap_fy(m)?.eval(a))
}

/// Outcome of the deletion–contraction recursion at sampled points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionReport {
    pub subset: Subset,
    pub points: usize,
    pub failures: usize,
}

/// Check ∂_G Snap^FY_M(a) = Snap^FY_{M_∅^G}(a|[∅,G]) · Snap^FY_{M_G^E}(a|[G,E])
/// at `points` random integer points a ∈ [−4, 4]^{2^E}.
pub fn recursion_check(m: &Matroid, g: Subset, points: usize, seed: u64) -> Result<RecursionReport> {
    let ground = m.ground();
    if g == 0 || g == ground || g & !ground != 0 {
        return Err(Error::InvalidParameters("G must be a proper nonempty subset".into()));
    }
    let snap = snap_fy(m)?;
    let lower = m.minor(0, g)?;
    let upper = m.minor(g, ground)?;
    let lower_snap = if lower.matroid.is_loopless() { Some(snap_fy(&lower.matroid)?) } else { None };
    let upper_snap = if upper.matroid.is_loopless() { Some(snap_fy(&upper.matroid)?) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(g));
    let mut failures = 0;
    for _ in 0..points {
        let a: Vec<i64> = (0..=ground).map(|_| rng.gen_range(-4..=4)).collect();
        let lhs = snap.eval(|f| a[f as usize]) - snap.eval(|f| a[f as usize] - i64::from(f == g));
        let left = lower_snap.as_ref().map_or_else(BigInt::zero, |s| s.eval(|t| a[lower.push(t) as usize]));
        let right = upper_snap
            .as_ref()
            .map_or_else(BigInt::zero, |s| s.eval(|t| a[(g | upper.push(t)) as usize]));
        if lhs != left * right {
            failures += 1;
        }
    }
    Ok(RecursionReport {
        subset: g,
        points,
        failures,
    })
}
