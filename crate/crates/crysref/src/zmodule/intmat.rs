//! Hermite and Smith normal forms over ℤ.
//!
//! Matrices are `Vec<Vec<BigInt>>` in row-major order. The row Hermite form
//! `H = U·M` is echelon with positive pivots and entries above each pivot
//! reduced into `[0, pivot)`; it is unique for the row lattice of `M`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn transpose(m: &IntMat, cols: usize) -> IntMat {
    (0..cols).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect()
}

pub fn mat_mul(a: &IntMat, b: &IntMat, inner: usize, cols: usize) -> IntMat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn combine_rows(m: &mut IntMat, r: usize, i: usize, c: usize) {
    // Replace rows r, i by unimodular combinations so that m[i][c] becomes 0.
    let a = m[r][c].clone();
    let b = m[i][c].clone();
    if b.is_zero() {
        return;
    }
    let eg = a.extended_gcd(&b);
    let (g, s, t) = (eg.gcd, eg.x, eg.y);
    let (ag, bg) = (&a / &g, &b / &g);
    let cols = m[r].len();
    for k in 0..cols {
        let x = m[r][k].clone();
        let y = m[i][k].clone();
        if x.is_zero() && y.is_zero() {
            continue;
        }
        m[r][k] = &s * &x + &t * &y;
        m[i][k] = &ag * &y - &bg * &x;
    }
}

fn sub_multiple(m: &mut IntMat, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (s, d) = if src < dst {
        let (a, b) = m.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = m.split_at_mut(src);
        (&b[0], &mut a[dst])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Row Hermite normal form.
#[derive(Clone, Debug)]
pub struct RowHnf {
    /// `U·M`; the first `rank` rows are the echelon basis, the rest are zero.
    pub h: IntMat,
    /// Unimodular transform; its rows past `rank` span the left kernel of `M`.
    pub u: IntMat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Row HNF of an `rows × cols` matrix.
pub fn row_hnf(m: &IntMat, cols: usize) -> RowHnf {
    let rows = m.len();
    // Work on [M | I] so the transform rides along.
    let mut w: IntMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            v
        })
        .collect();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        // bring a nonzero entry with smallest magnitude to row r
        let best = (r..rows).filter(|&i| !w[i][c].is_zero()).min_by(|&a, &b| {
            w[a][c].abs().cmp(&w[b][c].abs())
        });
        let Some(p) = best else { continue };
        w.swap(r, p);
        for i in r + 1..rows {
            if !w[i][c].is_zero() {
                combine_rows(&mut w, r, i, c);
            }
        }
        if w[r][c].is_negative() {
            for x in w[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let piv = w[r][c].clone();
        for i in 0..r {
            let q = w[i][c].div_floor(&piv);
            sub_multiple(&mut w, i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    let h = w.iter().map(|row| row[..cols].to_vec()).collect();
    let u = w.iter().map(|row| row[cols..].to_vec()).collect();
    RowHnf { h, u, rank: r, pivots }
}

/// Column Hermite form `H = M·U` with `U` unimodular.
pub fn hnf(m: &IntMat, cols: usize) -> (IntMat, IntMat) {
    let rows = m.len();
    let t = transpose(m, cols);
    let res = row_hnf(&t, rows);
    (transpose(&res.h, rows), transpose(&res.u, cols))
}

/// Basis of the integer left kernel `{x ∈ ℤ^rows : x·M = 0}`.
pub fn left_kernel(m: &IntMat, cols: usize) -> IntMat {
    let res = row_hnf(m, cols);
    res.u[res.rank..].to_vec()
}

/// Smith normal form `D = U·M·V`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
    /// Nonzero diagonal entries, each dividing the next.
    pub diagonal: Vec<BigInt>,
}

pub fn snf(m: &IntMat, cols: usize) -> Snf {
    let rows = m.len();
    let mut d = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let n = rows.min(cols);
    let swap_cols = |x: &mut IntMat, a: usize, b: usize| {
        for row in x.iter_mut() {
            row.swap(a, b);
        }
    };
    let col_sub = |x: &mut IntMat, dst: usize, src: usize, q: &BigInt| {
        for row in x.iter_mut() {
            let s = row[src].clone();
            if !s.is_zero() {
                row[dst] -= q * &s;
            }
        }
    };
    let mut t = 0;
    while t < n {
        // pivot: smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        let mut clean = true;
        for i in t + 1..rows {
            if d[i][t].is_zero() {
                continue;
            }
            let q = d[i][t].div_floor(&d[t][t]);
            sub_multiple(&mut d, i, t, &q);
            sub_multiple(&mut u, i, t, &q);
            if !d[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            if d[t][j].is_zero() {
                continue;
            }
            let q = d[t][j].div_floor(&d[t][t]);
            col_sub(&mut d, j, t, &q);
            col_sub(&mut v, j, t, &q);
            if !d[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into row t and retry
        let piv = d[t][t].clone();
        let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[i][j] % &piv).is_zero()));
        if let Some(i) = bad {
            let neg_one = -BigInt::one();
            sub_multiple(&mut d, t, i, &neg_one);
            sub_multiple(&mut u, t, i, &neg_one);
            continue;
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let diagonal = (0..n).map(|k| d[k][k].clone()).filter(|x| !x.is_zero()).collect();
    Snf { d, u, v, diagonal }
}

/// Determinant of a square integer matrix (fraction-free elimination).
pub fn det(m: &IntMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(m: &IntMat) -> IntMat {
    let n = m.len();
    let res = row_hnf(m, n);
    debug_assert_eq!(res.rank, n);
    debug_assert!(res.h.iter().enumerate().all(|(i, r)| r[i].is_one()));
    // U·M = H = I for unimodular M
    res.u
}

pub fn from_i64(rows: &[Vec<i64>]) -> IntMat {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}
