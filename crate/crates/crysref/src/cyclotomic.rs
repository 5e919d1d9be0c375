//! Exact arithmetic in cyclotomic fields ℚ(ζ_N).
//!
//! An element is stored by its coordinates in the power basis
//! `1, ζ, …, ζ^{φ(N)−1}` after reduction modulo the N-th cyclotomic
//! polynomial. Field tables are built once per order and shared.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest order that mixed-order arithmetic will lift into.
pub const MAX_LIFT_ORDER: u32 = 840;

pub type Coeffs = SmallVec<[Rational; 4]>;

/// Precomputed reduction data for one field order.
#[derive(Debug)]
pub struct FieldData {
    pub order: u32,
    pub phi: usize,
    /// Monic cyclotomic polynomial, low degree first, length φ+1.
    pub poly: Vec<i64>,
    /// `x^k mod Φ_N` for `k < 2φ−1`.
    reduce: Vec<Vec<i64>>,
    /// `ζ^k` for `k < N`.
    powers: Vec<Vec<i64>>,
}

pub type Field = Arc<FieldData>;

fn poly_divexact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; num.len() - dd];
    for k in (0..q.len()).rev() {
        let c = rem[k + dd];
        q[k] = c;
        for (t, &d) in den.iter().enumerate() {
            rem[k + t] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Coefficients of Φ_N, low degree first.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_divexact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

pub fn euler_phi(n: u32) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

impl FieldData {
    fn build(order: u32) -> FieldData {
        assert!(order >= 1, "field order must be positive");
        let poly = cyclotomic_poly(order);
        let phi = poly.len() - 1;
        let step = |v: &Vec<i64>| -> Vec<i64> {
            // multiply by x, then reduce the top coefficient
            let mut w = vec![0i64; phi];
            let top = v[phi - 1];
            for k in (1..phi).rev() {
                w[k] = v[k - 1];
            }
            for (k, wk) in w.iter_mut().enumerate() {
                *wk -= top * poly[k];
            }
            w
        };
        let mut one = vec![0i64; phi];
        one[0] = 1;
        let upto = (2 * phi).max(order as usize + 1);
        let mut seq = Vec::with_capacity(upto);
        seq.push(one);
        for k in 1..upto {
            let next = step(&seq[k - 1]);
            seq.push(next);
        }
        FieldData {
            order,
            phi,
            poly,
            reduce: seq[..2 * phi - 1].to_vec(),
            powers: seq[..order as usize].to_vec(),
        }
    }

    /// Power basis coordinates of `ζ^k`.
    pub fn power(&self, k: i64) -> &[i64] {
        &self.powers[k.rem_euclid(self.order as i64) as usize]
    }
}

/// Shared tables for `ℚ(ζ_order)`.
pub fn field(order: u32) -> Field {
    static CACHE: OnceLock<Mutex<HashMap<u32, Field>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("field cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| Arc::new(FieldData::build(order)))
        .clone()
}

/// An element of `ℚ(ζ_N)`.
#[derive(Clone)]
pub struct CycloNum {
    field: Field,
    coeffs: Coeffs,
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.coeffs == other.coeffs
    }
}

impl Eq for CycloNum {}

impl Hash for CycloNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.order.hash(state);
        self.coeffs.hash(state);
    }
}

impl Ord for CycloNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .order
            .cmp(&other.field.order)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for CycloNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl CycloNum {
    pub fn zero(order: u32) -> Self {
        let f = field(order);
        let coeffs = std::iter::repeat_n(Rational::zero(), f.phi).collect();
        CycloNum { field: f, coeffs }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(Rational::one(), order)
    }

    pub fn from_int(n: i64, order: u32) -> Self {
        Self::from_rational(Rational::from_int(n), order)
    }

    pub fn from_rational(q: Rational, order: u32) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = q;
        z
    }

    /// `ζ_N^k`.
    pub fn zeta_pow(order: u32, k: i64) -> Self {
        let f = field(order);
        let coeffs = f.power(k).iter().map(|&c| Rational::from_int(c)).collect();
        CycloNum { field: f, coeffs }
    }

    /// Builds `Σ q_k ζ^k` from arbitrary exponents.
    pub fn from_terms(order: u32, terms: &[(i64, Rational)]) -> Self {
        let f = field(order);
        let mut acc: Coeffs = std::iter::repeat_n(Rational::zero(), f.phi).collect();
        for (e, q) in terms {
            for (slot, &c) in acc.iter_mut().zip(f.power(*e)) {
                if c != 0 {
                    *slot += &(q * &Rational::from_int(c));
                }
            }
        }
        CycloNum { field: f, coeffs: acc }
    }

    /// Coordinates in the power basis; errors unless the length is φ(N).
    pub fn from_coeffs(order: u32, coeffs: Vec<Rational>) -> Result<Self> {
        let f = field(order);
        if coeffs.len() != f.phi {
            return Err(Error::DimensionMismatch(coeffs.len(), f.phi));
        }
        Ok(CycloNum { field: f, coeffs: coeffs.into_iter().collect() })
    }

    /// The imaginary unit; requires `4 | N`.
    pub fn i(order: u32) -> Self {
        assert!(order.is_multiple_of(4), "i is not in Q(zeta_{order})");
        Self::zeta_pow(order, order as i64 / 4)
    }

    /// `e^{2πi/m}` inside `ℚ(ζ_N)`; requires `m | N`, or `m | 2N` for odd `N`.
    pub fn root_of_unity(order: u32, m: u32) -> Self {
        if m >= 1 && order.is_multiple_of(m) {
            return Self::zeta_pow(order, (order / m) as i64);
        }
        assert!(m >= 1 && order % 2 == 1 && (2 * order).is_multiple_of(m), "zeta_{m} is not in Q(zeta_{order})");
        // ζ_{2N} = −ζ_N^{(N+1)/2}
        let k = (2 * order / m) as i64;
        let z = Self::zeta_pow(order, k * (order as i64 + 1) / 2);
        if k % 2 == 1 {
            -z
        } else {
            z
        }
    }

    pub fn order(&self) -> u32 {
        self.field.order
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Rational::is_zero)
    }

    /// The value as a rational, if it is one.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Rational::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Embeds into `ℚ(ζ_M)` for a multiple `M` of the current order.
    pub fn lift(&self, target: u32) -> Result<Self> {
        let n = self.field.order;
        if target == n {
            return Ok(self.clone());
        }
        if !target.is_multiple_of(n) {
            return Err(Error::IncompatibleFieldOrders(n, target));
        }
        let step = (target / n) as i64;
        let terms: Vec<(i64, Rational)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64 * step, c.clone()))
            .collect();
        Ok(Self::from_terms(target, &terms))
    }

    /// Brings two operands into a common field.
    pub fn unify(a: &Self, b: &Self) -> Result<(Self, Self)> {
        let (n, m) = (a.order(), b.order());
        if n == m {
            return Ok((a.clone(), b.clone()));
        }
        let l = n.lcm(&m);
        if l > MAX_LIFT_ORDER {
            return Err(Error::IncompatibleFieldOrders(n, m));
        }
        Ok((a.lift(l)?, b.lift(l)?))
    }

    fn same_field_add(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        CycloNum { field: self.field.clone(), coeffs }
    }

    fn same_field_sub(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        CycloNum { field: self.field.clone(), coeffs }
    }

    fn same_field_mul(&self, rhs: &Self) -> Self {
        let f = &self.field;
        let phi = f.phi;
        if phi == 1 {
            let c = &self.coeffs[0] * &rhs.coeffs[0];
            return CycloNum { field: f.clone(), coeffs: smallvec::smallvec![c] };
        }
        let mut prod: SmallVec<[Rational; 8]> =
            std::iter::repeat_n(Rational::zero(), 2 * phi - 1).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += &(a * b);
                }
            }
        }
        let mut out: Coeffs = prod[..phi].iter().cloned().collect();
        for k in phi..2 * phi - 1 {
            if prod[k].is_zero() {
                continue;
            }
            for (slot, &c) in out.iter_mut().zip(&f.reduce[k]) {
                if c != 0 {
                    *slot += &(&prod[k] * &Rational::from_int(c));
                }
            }
        }
        CycloNum { field: f.clone(), coeffs: out }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let (a, b) = Self::unify(self, rhs)?;
        Ok(a.same_field_add(&b))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let (a, b) = Self::unify(self, rhs)?;
        Ok(a.same_field_sub(&b))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let (a, b) = Self::unify(self, rhs)?;
        Ok(a.same_field_mul(&b))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        let (a, b) = Self::unify(self, rhs)?;
        Ok(a.same_field_mul(&b.inv()?))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * q).collect();
        CycloNum { field: self.field.clone(), coeffs }
    }

    /// The φ×φ rational matrix of multiplication by `self`; column `t` holds `self·ζ^t`.
    pub fn mult_matrix(&self) -> Vec<Vec<Rational>> {
        let phi = self.field.phi;
        let n = self.field.order;
        let mut cols = Vec::with_capacity(phi);
        for t in 0..phi {
            cols.push(self.same_field_mul(&Self::zeta_pow(n, t as i64)).coeffs.to_vec());
        }
        (0..phi).map(|r| (0..phi).map(|c| cols[c][r].clone()).collect()).collect()
    }

    /// Multiplicative inverse, found by solving `self·x = 1` over ℚ.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(q.recip()?, self.order()));
        }
        let m = self.mult_matrix();
        let mut rhs = vec![Rational::zero(); m.len()];
        rhs[0] = Rational::one();
        let x = crate::linalg::solve_square(m, rhs).ok_or(Error::DivisionByZero)?;
        Self::from_coeffs(self.order(), x)
    }

    /// Complex conjugation, `ζ ↦ ζ⁻¹`.
    pub fn conj(&self) -> Self {
        let f = &self.field;
        let mut out: Coeffs = std::iter::repeat_n(Rational::zero(), f.phi).collect();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, &t) in out.iter_mut().zip(f.power(-(k as i64))) {
                if t != 0 {
                    *slot += &(c * &Rational::from_int(t));
                }
            }
        }
        CycloNum { field: f.clone(), coeffs: out }
    }

    /// `z·conj(z)`.
    pub fn norm_sq(&self) -> Self {
        self.same_field_mul(&self.conj())
    }

    /// `|z|²` as a rational when it is one.
    pub fn norm_sq_rational(&self) -> Option<Rational> {
        self.norm_sq().as_rational()
    }

    /// `z + conj(z)`, i.e. twice the real part.
    pub fn twice_re(&self) -> Self {
        self.same_field_add(&self.conj())
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// True iff `|z|² ∈ ℤ` and `2·Re z ∈ ℤ`, decided symbolically.
    pub fn is_imag_quadratic_integer(&self) -> bool {
        let n_ok = self.norm_sq_rational().is_some_and(|q| q.is_integer());
        let t_ok = self.twice_re().as_rational().is_some_and(|q| q.is_integer());
        n_ok && t_ok
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.same_field_mul(self);
        }
        acc
    }

    /// Smallest `k ≥ 1` with `z^k = 1`, if one exists below `cap`.
    pub fn multiplicative_order(&self, cap: u32) -> Option<u32> {
        let one = Self::one(self.order());
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc == one {
                return Some(k);
            }
            acc = acc.same_field_mul(self);
        }
        None
    }

    /// Floating-point value under `ζ_N ↦ e^{2πi/N}`; used only for display and ordering heuristics.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let n = self.field.order as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n;
            let v = c.to_f64();
            re += v * a.cos();
            im += v * a.sin();
        }
        (re, im)
    }

    /// Sum of absolute coefficient values, a bound on the float evaluation error scale.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).sum()
    }

    /// Sparse `(exponent, coefficient)` encoding of the nonzero coordinates.
    pub fn terms(&self) -> Vec<(i64, Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64, c.clone()))
            .collect()
    }
}

fn unit_name(order: u32, k: usize) -> String {
    match (order, k) {
        (4, 1) => "i".to_string(),
        (3, 1) => "w".to_string(),
        (_, 1) => format!("z{order}"),
        _ => format!("z{order}^{k}"),
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, c)) in terms.iter().enumerate() {
            let neg = c.signum() < 0;
            let mag = c.abs();
            if idx > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if *k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", unit_name(self.order(), *k as usize))?;
            } else {
                write!(f, "{mag}*{}", unit_name(self.order(), *k as usize))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})@Q(z{})", self.order())
    }
}

macro_rules! lifting_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a CycloNum> for &'a CycloNum {
            type Output = CycloNum;
            /// Panics when the orders have no common embedding below [`MAX_LIFT_ORDER`].
            fn $m(self, rhs: &CycloNum) -> CycloNum {
                self.$checked(rhs).expect("cyclotomic operation failed")
            }
        }
        impl $tr<CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                (&self).$m(&rhs)
            }
        }
    };
}
lifting_op!(Add, add, checked_add);
lifting_op!(Sub, sub, checked_sub);
lifting_op!(Mul, mul, checked_mul);
lifting_op!(Div, div, checked_div);

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        CycloNum { field: self.field.clone(), coeffs }
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

/// Parses `[[exp, "p/q"], …]` pairs.
pub fn from_json_terms(order: u32, value: &serde_json::Value) -> Result<CycloNum> {
    let bad = |m: &str| Error::Parse(format!("{m}: {value}"));
    let arr = value.as_array().ok_or_else(|| bad("expected a list of [exponent, \"p/q\"] pairs"))?;
    let mut terms = Vec::with_capacity(arr.len());
    for pair in arr {
        let p = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("malformed term"))?;
        let e = p[0].as_i64().ok_or_else(|| bad("exponent must be an integer"))?;
        let q: Rational = match &p[1] {
            serde_json::Value::String(s) => s.parse()?,
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Rational::from_int)
                .ok_or_else(|| bad("coefficient must be an integer or \"p/q\""))?,
            _ => return Err(bad("coefficient must be a string")),
        };
        terms.push((e, q));
    }
    Ok(CycloNum::from_terms(order, &terms))
}

pub fn to_json_terms(z: &CycloNum) -> serde_json::Value {
    serde_json::Value::Array(
        z.terms()
            .into_iter()
            .map(|(k, c)| serde_json::json!([k, c.to_string()]))
            .collect(),
    )
}

/// Parses short scalar text such as `3/2`, `1+2i`, `-1/2+w`, `i/2`.
///
/// `i` needs `4 | N`; `w` (ω) needs `3 | N`.
pub fn parse_scalar(order: u32, text: &str) -> Result<CycloNum> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    if let Some(rest) = s.strip_prefix('(') {
        let close = rest.rfind(')').ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {text:?}")))?;
        let inner = parse_scalar(order, &rest[..close])?;
        let tail = &rest[close + 1..];
        return match tail.strip_prefix('/') {
            None if tail.is_empty() => Ok(inner),
            Some(d) => Ok(inner.scale(&d.parse::<Rational>()?.recip()?)),
            None => Err(Error::Parse(format!("unexpected {tail:?} after parentheses"))),
        };
    }
    let mut acc = CycloNum::zero(order);
    let mut pieces = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for k in 1..bytes.len() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'^' {
            pieces.push(&s[start..k]);
            start = k;
        }
    }
    pieces.push(&s[start..]);
    for piece in pieces {
        let (sign, body) = match piece.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, piece.strip_prefix('+').unwrap_or(piece)),
        };
        let (unit, rest) = if let Some(pos) = body.find(['i', 'w']) {
            let u = match &body[pos..pos + 1] {
                "i" if order.is_multiple_of(4) => CycloNum::i(order),
                "w" if order.is_multiple_of(3) => CycloNum::root_of_unity(order, 3),
                other => {
                    return Err(Error::Parse(format!("unit {other:?} is not in Q(zeta_{order})")))
                }
            };
            let coef = format!("{}{}", &body[..pos], &body[pos + 1..]);
            let coef = coef.trim_matches('*').to_string();
            let coef = if coef.is_empty() {
                "1".to_string()
            } else if let Some(d) = coef.strip_prefix('/') {
                format!("1/{d}")
            } else {
                coef
            };
            (u, coef)
        } else {
            (CycloNum::one(order), body.to_string())
        };
        let q: Rational = rest.parse()?;
        acc = &acc + &unit.scale(&(q * Rational::from_int(sign)));
    }
    Ok(acc)
}
