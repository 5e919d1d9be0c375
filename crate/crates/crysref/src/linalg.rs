//! Vectors and matrices over ℚ(ζ_N) with the standard Hermitian form,
//! reflections, and exact Gaussian elimination shared with the rational code.

use std::fmt;

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Field operations needed by the elimination routines.
pub trait Scalar: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Scalar for Rational {
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for CycloNum {
    fn is_zero(&self) -> bool {
        CycloNum::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<T: Scalar>(m: &mut [Vec<T>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x = x.div(&piv);
            }
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let (src, dst) = if i < r {
                let (a, b) = m.split_at_mut(r);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = m.split_at_mut(i);
                (&a[r], &mut b[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d = d.sub(&f.mul(s));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(m: &[Vec<T>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn kernel<T: Scalar>(m: &[Vec<T>], cols: usize, zero: &T, one: &T) -> Vec<Vec<T>> {
    let mut w = m.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero.clone(); cols];
            v[f] = one.clone();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = w[r][f].neg();
            }
            v
        })
        .collect()
}

/// Solves `M x = b` for square nonsingular `M`.
pub fn solve_square<T: Scalar>(m: Vec<Vec<T>>, b: Vec<T>) -> Option<Vec<T>> {
    let n = m.len();
    let mut aug: Vec<Vec<T>> = m
        .into_iter()
        .zip(b)
        .map(|(mut row, x)| {
            row.push(x);
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Determinant by elimination.
pub fn determinant<T: Scalar>(m: &[Vec<T>], one: &T) -> T {
    let n = m.len();
    let mut w = m.to_vec();
    let mut det = one.clone();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !w[i][c].is_zero()) else {
            return one.sub(one);
        };
        if p != c {
            w.swap(p, c);
            det = det.neg();
        }
        let piv = w[c][c].clone();
        det = det.mul(&piv);
        for i in c + 1..n {
            if w[i][c].is_zero() {
                continue;
            }
            let f = w[i][c].div(&piv);
            let (a, b) = w.split_at_mut(i);
            for (d, s) in b[0][c..].iter_mut().zip(a[c][c..].iter()) {
                if !s.is_zero() {
                    *d = d.sub(&f.mul(s));
                }
            }
        }
    }
    det
}

/// A column vector over ℚ(ζ_N).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CVec(pub Vec<CycloNum>);

impl CVec {
    pub fn zeros(dim: usize, order: u32) -> Self {
        CVec(vec![CycloNum::zero(order); dim])
    }

    /// The standard basis vector `ε_k` (zero-based).
    pub fn unit(dim: usize, k: usize, order: u32) -> Self {
        let mut v = Self::zeros(dim, order);
        v.0[k] = CycloNum::one(order);
        v
    }

    pub fn from_ints(xs: &[i64], order: u32) -> Self {
        CVec(xs.iter().map(|&x| CycloNum::from_int(x, order)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.first().map_or(1, CycloNum::order)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(CycloNum::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        CVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        CVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        CVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, z: &CycloNum) -> Self {
        CVec(self.0.iter().map(|a| a * z).collect())
    }

    pub fn scale_q(&self, q: &Rational) -> Self {
        CVec(self.0.iter().map(|a| a.scale(q)).collect())
    }

    pub fn lift(&self, order: u32) -> Result<Self> {
        Ok(CVec(self.0.iter().map(|a| a.lift(order)).collect::<Result<_>>()?))
    }

    pub fn conj(&self) -> Self {
        CVec(self.0.iter().map(CycloNum::conj).collect())
    }
}

impl fmt::Debug for CVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for CVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `⟨u|v⟩ = Σ u_k·conj(v_k)`, linear in the first argument.
pub fn inner(u: &CVec, v: &CVec) -> Result<CycloNum> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    let mut acc = CycloNum::zero(u.order());
    for (a, b) in u.0.iter().zip(&v.0) {
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + &(a * &b.conj());
        }
    }
    Ok(acc)
}

/// Dense row-major matrix over ℚ(ζ_N).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<CycloNum>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize, order: u32) -> Self {
        CMat { rows, cols, data: vec![CycloNum::zero(order); rows * cols] }
    }

    pub fn identity(n: usize, order: u32) -> Self {
        let mut m = Self::zeros(n, n, order);
        for k in 0..n {
            m.data[k * n + k] = CycloNum::one(order);
        }
        m
    }

    pub fn diag(entries: &[CycloNum]) -> Self {
        let n = entries.len();
        let order = entries.first().map_or(1, CycloNum::order);
        let mut m = Self::zeros(n, n, order);
        for (k, e) in entries.iter().enumerate() {
            m.data[k * n + k] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycloNum>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix".into()));
        }
        Ok(CMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[CVec]) -> Self {
        let r = cols.first().map_or(0, CVec::dim);
        let c = cols.len();
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in cols {
                data.push(col.0[i].clone());
            }
        }
        CMat { rows: r, cols: c, data }
    }

    pub fn order(&self) -> u32 {
        self.data.first().map_or(1, CycloNum::order)
    }

    pub fn get(&self, r: usize, c: usize) -> &CycloNum {
        &self.data[r * self.cols + c]
    }

    pub fn row_vecs(&self) -> Vec<Vec<CycloNum>> {
        self.data.chunks(self.cols.max(1)).map(<[CycloNum]>::to_vec).collect()
    }

    pub fn column(&self, c: usize) -> CVec {
        CVec((0..self.rows).map(|r| self.get(r, c).clone()).collect())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let order = self.order();
        let mut data = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = CycloNum::zero(order);
                for k in 0..self.cols {
                    let a = &self.data[i * self.cols + k];
                    let b = &o.data[k * o.cols + j];
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                data.push(acc);
            }
        }
        CMat { rows: self.rows, cols: o.cols, data }
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        assert_eq!(self.cols, v.dim(), "matrix-vector shape mismatch");
        let order = self.order();
        CVec(
            (0..self.rows)
                .map(|i| {
                    let mut acc = CycloNum::zero(order);
                    for (k, x) in v.0.iter().enumerate() {
                        let a = &self.data[i * self.cols + k];
                        if !a.is_zero() && !x.is_zero() {
                            acc = &acc + &(a * x);
                        }
                    }
                    acc
                })
                .collect(),
        )
    }

    pub fn add(&self, o: &CMat) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, z: &CycloNum) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * z).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        CMat { rows: self.cols, cols: self.rows, data }
    }

    pub fn trace(&self) -> CycloNum {
        let mut acc = CycloNum::zero(self.order());
        for k in 0..self.rows.min(self.cols) {
            acc = &acc + self.get(k, k);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == CMat::identity(self.rows, self.order())
    }

    pub fn rank(&self) -> usize {
        rank(&self.row_vecs())
    }

    pub fn determinant(&self) -> CycloNum {
        determinant(&self.row_vecs(), &CycloNum::one(self.order()))
    }

    pub fn inverse(&self) -> Result<CMat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let order = self.order();
        let mut aug: Vec<Vec<CycloNum>> = self
            .row_vecs()
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..n).map(|j| CycloNum::from_int((i == j) as i64, order)));
                row
            })
            .collect();
        let piv = rref(&mut aug);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::DivisionByZero);
        }
        CMat::from_rows(aug.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    pub fn pow(&self, e: u32) -> CMat {
        let mut acc = CMat::identity(self.rows, self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn lift(&self, order: u32) -> Result<CMat> {
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.lift(order)).collect::<Result<_>>()?,
        })
    }

    /// Basis of `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<CVec> {
        let order = self.order();
        kernel(&self.row_vecs(), self.cols, &CycloNum::zero(order), &CycloNum::one(order))
            .into_iter()
            .map(CVec)
            .collect()
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{:>12} ", self.get(r, c).to_string())?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Default cap for the finite-order search.
pub const ORDER_CAP: usize = 10_000;

/// A linear reflection `R_{e,θ}` with a non-normalized root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Reflection {
    pub root: CVec,
    pub theta: CycloNum,
    pub order: u32,
}

impl Reflection {
    /// Validates that `θ` is a primitive `m`-th root of unity and the root is nonzero.
    pub fn new(root: CVec, theta: CycloNum, order: u32) -> Result<Self> {
        if order < 2 || theta.multiplicative_order(order) != Some(order) {
            return Err(Error::BadEigenvalue(theta.to_string(), order));
        }
        if inner(&root, &root)?.is_zero() {
            return Err(Error::ZeroRoot);
        }
        let l = num_integer::lcm(root.order(), theta.order());
        Ok(Reflection { root: root.lift(l)?, theta: theta.lift(l)?, order })
    }

    /// Reflection with eigenvalue `e^{2πi/m}` in `ℚ(ζ_N)`, `N` the root's field order.
    pub fn with_order(root: CVec, m: u32) -> Result<Self> {
        let n = root.order();
        if !n.is_multiple_of(m) {
            return Err(Error::BadEigenvalue(format!("e^(2 pi i/{m})"), m));
        }
        Self::new(root, CycloNum::root_of_unity(n, m), m)
    }

    pub fn dim(&self) -> usize {
        self.root.dim()
    }

    /// `⟨e|e⟩`.
    pub fn norm(&self) -> CycloNum {
        inner(&self.root, &self.root).expect("root dimension")
    }

    /// `(I−R)v = (1−θ)(⟨v|e⟩/⟨e|e⟩)e`.
    pub fn apply_i_minus(&self, v: &CVec) -> CVec {
        let c = &(&CycloNum::one(self.theta.order()) - &self.theta)
            * &(&inner(v, &self.root).expect("dimension") / &self.norm());
        self.root.scale(&c)
    }

    pub fn matrix(&self) -> CMat {
        reflection_matrix(self).expect("validated reflection")
    }
}

/// `Rv = v − (1−θ)(⟨v|e⟩/⟨e|e⟩)e` as a matrix.
pub fn reflection_matrix(r: &Reflection) -> Result<CMat> {
    let n = r.dim();
    let order = r.root.order();
    let ee = inner(&r.root, &r.root)?;
    if ee.is_zero() {
        return Err(Error::ZeroRoot);
    }
    let k = &(&CycloNum::one(order) - &r.theta) / &ee;
    let mut m = CMat::identity(n, order);
    for i in 0..n {
        for j in 0..n {
            let t = &(&k * &r.root.0[i]) * &r.root.0[j].conj();
            if !t.is_zero() {
                m.data[i * n + j] = &m.data[i * n + j] - &t;
            }
        }
    }
    Ok(m)
}

pub fn is_unitary(p: &CMat) -> bool {
    p.is_square() && p.mul(&p.adjoint()).is_identity()
}

/// `rank(I − P)`.
pub fn fixed_codim(p: &CMat) -> usize {
    CMat::identity(p.rows, p.order()).sub(p).rank()
}

/// Smallest `k ≥ 1` with `P^k = I`.
pub fn matrix_order(p: &CMat, cap: usize) -> Result<usize> {
    let mut acc = p.clone();
    for k in 1..=cap {
        if acc.is_identity() {
            return Ok(k);
        }
        acc = acc.mul(p);
    }
    Err(Error::OrderCapExceeded(cap))
}

/// Unitary, of finite order, and `rank(I−P) = 1`.
pub fn is_reflection_matrix(p: &CMat, cap: usize) -> Result<bool> {
    if !is_unitary(p) || fixed_codim(p) != 1 {
        return Ok(false);
    }
    matrix_order(p, cap).map(|_| true)
}
