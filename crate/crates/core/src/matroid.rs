//! Matroids on small ground sets, stored by their bases.
//!
//! Subsets of the ground set `{0, .., n-1}` are `u32` bitmasks, so `n` is
//! limited to [`MAX_GROUND`]. Rank queries are answered from a memoized
//! table when the ground set is small enough.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subset of the ground set, bit `e` set iff `e` is a member.
pub type Subset = u32;

/// Largest supported ground set.
pub const MAX_GROUND: usize = 24;

const TABLE_LIMIT: usize = 14;

/// Sorted list of the members of `s`.
pub fn elements(s: Subset) -> Vec<usize> {
    (0..32).filter(|&e| s >> e & 1 == 1).collect()
}

/// Bitmask of the given elements.
pub fn subset_of(elems: &[usize]) -> Subset {
    elems.iter().fold(0, |acc, &e| acc | 1 << e)
}

fn full(n: usize) -> Subset {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

#[derive(Clone, Debug)]
pub struct Matroid {
    n: usize,
    rank: usize,
    bases: Vec<Subset>,
    rank_table: OnceLock<Vec<u8>>,
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bases == other.bases
    }
}

impl Eq for Matroid {}

/// Validate a basis list and build the matroid.
pub fn matroid_from_bases(n: usize, bases: &[Vec<usize>]) -> Result<Matroid> {
    if n == 0 || n > MAX_GROUND {
        return Err(Error::InvalidParameters(format!(
            "ground set size {n} outside 1..={MAX_GROUND}"
        )));
    }
    if bases.is_empty() {
        return Err(Error::EmptyBasisSet);
    }
    let mut masks = Vec::with_capacity(bases.len());
    for b in bases {
        if let Some(&e) = b.iter().find(|&&e| e >= n) {
            return Err(Error::InvalidParameters(format!(
                "element {e} outside ground set of size {n}"
            )));
        }
        let mask = subset_of(b);
        if mask.count_ones() as usize != b.len() {
            return Err(Error::InvalidParameters(format!(
                "basis {b:?} repeats an element"
            )));
        }
        masks.push(mask);
    }
    let r = masks[0].count_ones() as usize;
    if let Some(m) = masks.iter().find(|m| m.count_ones() as usize != r) {
        return Err(Error::UnequalBasisSizes {
            expected: r,
            found: m.count_ones() as usize,
        });
    }
    masks.sort_unstable();
    masks.dedup();
    let set: HashSet<Subset> = masks.iter().copied().collect();
    for &b1 in &masks {
        for &b2 in &masks {
            for x in elements(b1 & !b2) {
                let ok = elements(b2 & !b1)
                    .into_iter()
                    .any(|y| set.contains(&((b1 & !(1 << x)) | 1 << y)));
                if !ok {
                    return Err(Error::ExchangeAxiomViolation {
                        first: elements(b1),
                        second: elements(b2),
                        removed: x,
                    });
                }
            }
        }
    }
    Ok(Matroid::from_masks(n, masks))
}

/// Named families of matroids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Uniform { r: usize, n: usize },
    Boolean { n: usize },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
}

pub fn named_matroid(kind: &Family) -> Result<Matroid> {
    match kind {
        Family::Uniform { r, n } => uniform(*r, *n),
        Family::Boolean { n } => uniform(*n, *n),
        Family::Graphic { vertices, edges } => graphic(*vertices, edges),
    }
}

/// The uniform matroid U_{r,n}.
pub fn uniform(r: usize, n: usize) -> Result<Matroid> {
    if n == 0 || n > MAX_GROUND || r > n {
        return Err(Error::InvalidParameters(format!("uniform({r}, {n})")));
    }
    let bases = (0..=full(n))
        .filter(|s| s.count_ones() as usize == r)
        .collect();
    Ok(Matroid::from_masks(n, bases))
}

/// The Boolean matroid U_{n,n}.
pub fn boolean(n: usize) -> Result<Matroid> {
    uniform(n, n)
}

/// Cycle matroid of a multigraph; element `i` is `edges[i]`.
pub fn graphic(vertices: usize, edges: &[(usize, usize)]) -> Result<Matroid> {
    let m = edges.len();
    if m == 0 || m > MAX_GROUND {
        return Err(Error::InvalidParameters(format!("{m} edges")));
    }
    if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
        return Err(Error::InvalidParameters(format!(
            "edge ({u}, {v}) outside {vertices} vertices"
        )));
    }
    let forest_rank = |s: Subset| -> usize {
        let mut parent: Vec<usize> = (0..vertices).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut rank = 0;
        for e in elements(s) {
            let (a, b) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
            if a != b {
                parent[a] = b;
                rank += 1;
            }
        }
        rank
    };
    let r = forest_rank(full(m));
    let bases = (0..=full(m))
        .filter(|&s| s.count_ones() as usize == r && forest_rank(s) == r)
        .collect();
    Ok(Matroid::from_masks(m, bases))
}

/// Edges of the complete graph on `k` vertices, lexicographic.
pub fn complete_graph_edges(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            out.push((i, j));
        }
    }
    out
}

/// Cycle matroid of K4 (rank 3 on 6 edges).
pub fn graphic_k4() -> Matroid {
    graphic(4, &complete_graph_edges(4)).expect("K4 is a valid graph")
}

/// The lines of the Fano plane on points 0..7.
pub const FANO_LINES: [[usize; 3]; 7] = [
    [0, 1, 2],
    [0, 3, 4],
    [0, 5, 6],
    [1, 3, 5],
    [1, 4, 6],
    [2, 3, 6],
    [2, 4, 5],
];

/// The Fano matroid: bases are the non-collinear triples.
pub fn fano() -> Matroid {
    let lines: HashSet<Subset> = FANO_LINES.iter().map(|l| subset_of(l)).collect();
    let bases = (0..=full(7))
        .filter(|s| s.count_ones() == 3 && !lines.contains(s))
        .collect();
    Matroid::from_masks(7, bases)
}

impl Matroid {
    fn from_masks(n: usize, mut bases: Vec<Subset>) -> Matroid {
        bases.sort_unstable();
        bases.dedup();
        let rank = bases[0].count_ones() as usize;
        Matroid {
            n,
            rank,
            bases,
            rank_table: OnceLock::new(),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> Subset {
        full(self.n)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bases(&self) -> &[Subset] {
        &self.bases
    }

    pub fn bases_lists(&self) -> Vec<Vec<usize>> {
        self.bases.iter().map(|&b| elements(b)).collect()
    }

    /// Elements lying in no basis.
    pub fn loop_set(&self) -> Subset {
        let covered = self.bases.iter().fold(0, |acc, &b| acc | b);
        self.ground() & !covered
    }

    pub fn is_loopless(&self) -> bool {
        self.loop_set() == 0
    }

    pub(crate) fn require_loopless(&self) -> Result<()> {
        match self.loop_set() {
            0 => Ok(()),
            l => Err(Error::LoopyMatroid(elements(l))),
        }
    }

    fn direct_rank(&self, s: Subset) -> usize {
        self.bases
            .iter()
            .map(|&b| (b & s).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn rank_of(&self, s: Subset) -> usize {
        let s = s & self.ground();
        if self.n > TABLE_LIMIT {
            return self.direct_rank(s);
        }
        let table = self.rank_table.get_or_init(|| {
            (0..=self.ground())
                .map(|t| self.direct_rank(t) as u8)
                .collect()
        });
        table[s as usize] as usize
    }

    pub fn closure_of(&self, s: Subset) -> Subset {
        let r = self.rank_of(s);
        (0..self.n)
            .filter(|&e| s >> e & 1 == 1 || self.rank_of(s | 1 << e) == r)
            .fold(0, |acc, e| acc | 1 << e)
    }

    pub fn is_flat(&self, s: Subset) -> bool {
        self.closure_of(s) == s
    }

    pub fn is_independent(&self, s: Subset) -> bool {
        self.rank_of(s) == s.count_ones() as usize
    }

    /// Matroid whose bases are the complements of the bases of `self`.
    pub fn dual(&self) -> Matroid {
        let g = self.ground();
        Matroid::from_masks(self.n, self.bases.iter().map(|&b| g & !b).collect())
    }

    /// All independent sets, sorted as bitmasks.
    pub fn independent_sets(&self) -> Vec<Subset> {
        (0..=self.ground()).filter(|&s| self.is_independent(s)).collect()
    }

    /// The minor obtained by contracting `f` and deleting the complement of
    /// `g`; elements of `g \ f` are relabeled in increasing order.
    pub fn minor(&self, f: Subset, g: Subset) -> Result<Minor> {
        if f & !g != 0 || g & !self.ground() != 0 {
            return Err(Error::NotNested);
        }
        let labels = elements(g & !f);
        let k = labels.len();
        let rf = self.rank_of(f);
        let target = self.rank_of(g) - rf;
        let lift = |t: Subset| -> Subset {
            elements(t).iter().fold(0, |acc, &i| acc | 1 << labels[i])
        };
        let bases = (0..=full(k))
            .filter(|&t| t.count_ones() as usize == target && self.rank_of(lift(t) | f) - rf == target)
            .collect();
        Ok(Minor {
            matroid: Matroid::from_masks(k, bases),
            labels,
        })
    }

    /// Flats of the matroid (requires loopless).
    pub fn lattice(&self) -> Result<FlatLattice> {
        flats_lattice(self)
    }
}

/// A minor together with the original label of each of its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub matroid: Matroid,
    pub labels: Vec<usize>,
}

impl Minor {
    /// Translate a subset of the original ground set into minor labels,
    /// dropping elements outside the minor.
    pub fn pull(&self, s: Subset) -> Subset {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &e)| s >> e & 1 == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Translate a subset of the minor back to original labels.
    pub fn push(&self, t: Subset) -> Subset {
        elements(t).iter().fold(0, |acc, &i| acc | 1 << self.labels[i])
    }
}

/// The lattice of flats with join, Möbius and cover tables.
#[derive(Clone, Debug)]
pub struct FlatLattice {
    matroid: Matroid,
    flats: Vec<Subset>,
    ranks: Vec<usize>,
    index: HashMap<Subset, usize>,
    by_rank: Vec<Vec<usize>>,
    join: Vec<usize>,
    mobius: Vec<i64>,
    covers: Vec<Vec<usize>>,
}

pub fn flats_lattice(m: &Matroid) -> Result<FlatLattice> {
    m.require_loopless()?;
    let mut seen: HashSet<Subset> = HashSet::new();
    let mut queue = vec![m.closure_of(0)];
    seen.insert(queue[0]);
    while let Some(f) = queue.pop() {
        for e in elements(m.ground() & !f) {
            let g = m.closure_of(f | 1 << e);
            if seen.insert(g) {
                queue.push(g);
            }
        }
    }
    let mut flats: Vec<Subset> = seen.into_iter().collect();
    flats.sort_by_key(|&f| (m.rank_of(f), elements(f)));
    let nf = flats.len();
    let ranks: Vec<usize> = flats.iter().map(|&f| m.rank_of(f)).collect();
    let index: HashMap<Subset, usize> = flats.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut by_rank = vec![Vec::new(); m.rank() + 1];
    for (i, &r) in ranks.iter().enumerate() {
        by_rank[r].push(i);
    }
    let mut join = vec![0; nf * nf];
    for i in 0..nf {
        for j in 0..nf {
            join[i * nf + j] = index[&m.closure_of(flats[i] | flats[j])];
        }
    }
    let sub = |a: usize, b: usize| flats[a] & !flats[b] == 0;
    let mut mobius = vec![0i64; nf * nf];
    for i in 0..nf {
        mobius[i * nf + i] = 1;
        for j in i + 1..nf {
            if !sub(i, j) || i == j {
                continue;
            }
            let s: i64 = (i..j)
                .filter(|&k| sub(i, k) && sub(k, j) && k != j)
                .map(|k| mobius[i * nf + k])
                .sum();
            mobius[i * nf + j] = -s;
        }
    }
    let covers = (0..nf)
        .map(|i| {
            (0..nf)
                .filter(|&j| ranks[j] == ranks[i] + 1 && sub(i, j))
                .collect()
        })
        .collect();
    Ok(FlatLattice {
        matroid: m.clone(),
        flats,
        ranks,
        index,
        by_rank,
        join,
        mobius,
        covers,
    })
}

impl FlatLattice {
    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn flats(&self) -> &[Subset] {
        &self.flats
    }

    pub fn flat(&self, i: usize) -> Subset {
        self.flats[i]
    }

    pub fn rank_of_flat(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.index.get(&s).copied()
    }

    /// Index of the closure of an arbitrary subset.
    pub fn closure_index(&self, s: Subset) -> usize {
        self.index[&self.matroid.closure_of(s)]
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.flats.len() - 1
    }

    pub fn by_rank(&self, r: usize) -> &[usize] {
        &self.by_rank[r]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.flats[i] & !self.flats[j] == 0
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.flats.len() + j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index[&(self.flats[i] & self.flats[j])]
    }

    /// μ(F_i, F_j), zero unless F_i ⊆ F_j.
    pub fn mobius(&self, i: usize, j: usize) -> i64 {
        self.mobius[i * self.flats.len() + j]
    }

    /// Flats covering `F_i`.
    pub fn covers(&self, i: usize) -> &[usize] {
        &self.covers[i]
    }

    /// Flats containing `F_i`, in lattice order.
    pub fn above(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (i..self.flats.len()).filter(move |&j| self.leq(i, j))
    }

    /// Every flag ∅ = F_0 ⊊ … ⊊ F_k = E (k ≥ 1), as lists of flat indices.
    pub fn flags(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![self.bottom()]];
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap();
            if last == self.top() {
                out.push(chain);
                continue;
            }
            for j in self.above(last).filter(|&j| j != last) {
                let mut next = chain.clone();
                next.push(j);
                stack.push(next);
            }
        }
        out.sort();
        out
    }
}

/// Absolute coefficients μ^0, …, μ^{r-1} of the reduced characteristic
/// polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPolyCoeffs {
    pub mu: Vec<u64>,
}

/// Signed coefficients of the reduced characteristic polynomial, highest
/// power first.
pub fn reduced_char_poly(m: &Matroid) -> Result<Vec<i64>> {
    let lattice = flats_lattice(m)?;
    let r = m.rank();
    if r == 0 {
        return Err(Error::NonExactDivision);
    }
    let mut chi = vec![0i64; r + 1];
    for i in 0..lattice.len() {
        chi[r - lattice.rank_of_flat(i)] += lattice.mobius(0, i);
    }
    let mut q = vec![0i64; r];
    q[r - 1] = chi[r];
    for k in (1..r).rev() {
        q[k - 1] = chi[k] + q[k];
    }
    if chi[0] + q[0] != 0 {
        return Err(Error::NonExactDivision);
    }
    q.reverse();
    Ok(q)
}

pub fn char_poly_mu(m: &Matroid) -> Result<CharPolyCoeffs> {
    let q = reduced_char_poly(m)?;
    Ok(CharPolyCoeffs {
        mu: q.iter().map(|c| c.unsigned_abs()).collect(),
    })
}

impl CharPolyCoeffs {
    /// μ^j, zero outside 0..r.
    pub fn get(&self, j: i64) -> u64 {
        if j < 0 {
            0
        } else {
            self.mu.get(j as usize).copied().unwrap_or(0)
        }
    }
}
