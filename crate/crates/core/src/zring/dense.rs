//! Dense integer matrices: Hermite and Smith normal forms, determinants
//! and unimodular inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
pub type Matrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .map(|(x, y)| x * y)
                .sum()
        })
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Row-style Hermite normal form: returns `(h, u)` with `u` unimodular,
/// `u·a = h`, `h` in row echelon form with positive pivots, entries above
/// each pivot reduced into `[0, pivot)`, and zero rows at the bottom.
pub fn hnf(a: &Matrix) -> (Matrix, Matrix) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u = identity(m);
    let mut p = 0;
    for c in 0..n {
        if p == m {
            break;
        }
        loop {
            let best = (p..m)
                .filter(|&i| !h[i][c].is_zero())
                .min_by_key(|&i| h[i][c].abs());
            let Some(best) = best else { break };
            h.swap(p, best);
            u.swap(p, best);
            let mut done = true;
            for i in p + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[p][c]);
                sub_row(&mut h, i, p, &q);
                sub_row(&mut u, i, p, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[p][c].is_zero() {
            continue;
        }
        if h[p][c].is_negative() {
            for x in h[p].iter_mut().chain(u[p].iter_mut()) {
                *x = -&*x;
            }
        }
        for i in 0..p {
            let q = h[i][c].div_floor(&h[p][c]);
            if !q.is_zero() {
                sub_row(&mut h, i, p, &q);
                sub_row(&mut u, i, p, &q);
            }
        }
        p += 1;
    }
    (h, u)
}

fn sub_row(m: &mut Matrix, i: usize, p: usize, q: &BigInt) {
    let src = m[p].clone();
    for (x, y) in m[i].iter_mut().zip(src.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Nonzero invariant factors of the Smith normal form, in divisibility
/// order.
pub fn smith_invariants(a: &Matrix) -> Vec<BigInt> {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let pos = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !m[i][j].is_zero())
            .min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = pos else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t].div_floor(&m[t][t]);
            if !q.is_zero() {
                sub_row(&mut m, i, t, &q);
            }
            if !m[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = m[t][j].div_floor(&m[t][t]);
            if !q.is_zero() {
                for i in t..rows {
                    let d = &q * &m[i][t];
                    m[i][j] -= d;
                }
            }
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        let bad = (t + 1..rows)
            .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !m[i][j].is_multiple_of(&m[t][t]));
        if let Some((i, _)) = bad {
            let src = m[i].clone();
            for (x, y) in m[t].iter_mut().zip(src.iter()) {
                *x += y;
            }
            continue;
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

/// Exact determinant by fraction-free elimination.
pub fn determinant(a: &Matrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Inverse of a square matrix with determinant ±1.
pub fn inverse_unimodular(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return None;
    }
    let (h, u) = hnf(a);
    if h == identity(n) {
        Some(u)
    } else {
        None
    }
}
