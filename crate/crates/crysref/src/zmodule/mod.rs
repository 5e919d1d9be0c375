//! Lattices in the rational realification of ℚ(ζ_N)^n.
//!
//! A vector of ℚ(ζ_N)^n is stored as its `n·φ(N)` rational power-basis
//! coordinates. Any finitely generated subgroup of ℚ^d has bounded
//! denominators, so every lattice is kept as `(1/den)·H` with `H` an integer
//! row-HNF and `den` minimal; equal lattices have equal representations.

pub mod intmat;
pub mod modular;

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::rational::{common_denominator, Rational};
use intmat::IntMat;

pub use modular::{modular_reduce, reduce_tau, ModularPoint};

/// Rational matrix, row-major.
pub type QMat = Vec<Vec<Rational>>;

/// Default bound on quotient sizes for intermediate-lattice enumeration.
pub const QUOTIENT_BOUND: usize = 10_000;

/// Coordinates of ℚ(ζ_N)^n as ℚ^{n·φ(N)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RealStructure {
    pub dim: usize,
    pub order: u32,
    pub phi: usize,
}

impl RealStructure {
    pub fn new(dim: usize, order: u32) -> Self {
        let phi = crate::cyclotomic::field(order).phi;
        RealStructure { dim, order, phi }
    }

    pub fn real_dim(&self) -> usize {
        self.dim * self.phi
    }

    pub fn realify(&self, v: &CVec) -> Result<Vec<Rational>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch(v.dim(), self.dim));
        }
        let mut out = Vec::with_capacity(self.real_dim());
        for x in &v.0 {
            let y = x.lift(self.order)?;
            out.extend(y.coeffs().iter().cloned());
        }
        Ok(out)
    }

    pub fn complexify(&self, x: &[Rational]) -> CVec {
        CVec(
            x.chunks(self.phi)
                .map(|c| CycloNum::from_coeffs(self.order, c.to_vec()).expect("phi"))
                .collect(),
        )
    }

    /// The `d×d` rational matrix of `M` acting on column coordinates.
    pub fn realify_matrix(&self, m: &CMat) -> Result<QMat> {
        if m.cols != self.dim || m.rows != self.dim {
            return Err(Error::DimensionMismatch(m.rows, self.dim));
        }
        let d = self.real_dim();
        let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(d);
        for k in 0..self.dim {
            let col = m.column(k).lift(self.order)?;
            for t in 0..self.phi {
                let z = CycloNum::zeta_pow(self.order, t as i64);
                cols.push(self.realify(&col.scale(&z))?);
            }
        }
        Ok((0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect())
    }

    /// Multiplication by a scalar as a `d×d` column-convention matrix.
    pub fn scalar_matrix(&self, z: &CycloNum) -> Result<QMat> {
        let zl = z.lift(self.order)?;
        self.realify_matrix(&CMat::identity(self.dim, self.order).scale(&zl))
    }

    /// Rational basis of the ℚ-span of `ℚ(ζ_N)·e`.
    pub fn line_span(&self, e: &CVec) -> Result<QMat> {
        (0..self.phi)
            .map(|t| self.realify(&e.scale(&CycloNum::zeta_pow(self.order, t as i64))))
            .collect()
    }
}

/// Applies a column-convention matrix to a row vector: `(A·xᵀ)ᵀ`.
pub fn apply_q(a: &QMat, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            let mut acc = Rational::zero();
            for (p, q) in row.iter().zip(x) {
                if !p.is_zero() && !q.is_zero() {
                    acc += &(p * q);
                }
            }
            acc
        })
        .collect()
}

/// A canonical lattice in ℚ^d, independent of any complex structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QLattice {
    pub d: usize,
    pub den: BigInt,
    /// Row HNF with exactly `rank` rows.
    pub basis: IntMat,
}

impl QLattice {
    pub fn zero(d: usize) -> Self {
        QLattice { d, den: BigInt::one(), basis: Vec::new() }
    }

    /// The ℤ-span of arbitrary (possibly dependent) rational generators.
    pub fn from_rows(d: usize, rows: &[Vec<Rational>]) -> Self {
        if rows.is_empty() {
            return Self::zero(d);
        }
        let den = common_denominator(rows.iter().flatten());
        let ints: IntMat = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.numer() * (&den / x.denom()))
                    .collect()
            })
            .collect();
        Self::from_scaled(d, den, &ints)
    }

    fn from_scaled(d: usize, den: BigInt, ints: &IntMat) -> Self {
        let res = intmat::row_hnf(ints, d);
        let mut basis: IntMat = res.h[..res.rank].to_vec();
        let mut g = den.clone();
        for row in &basis {
            for x in row {
                if !x.is_zero() {
                    g = g.gcd(x);
                }
            }
        }
        let mut den = den;
        if !g.is_one() && !g.is_zero() {
            den /= &g;
            for row in basis.iter_mut() {
                for x in row.iter_mut() {
                    *x /= &g;
                }
            }
        }
        if basis.is_empty() {
            den = BigInt::one();
        }
        QLattice { d, den, basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn rows(&self) -> QMat {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_bigints(x.clone(), self.den.clone())).collect())
            .collect()
    }

    /// Integer coordinates of `x` in the HNF basis, if `x` lies in the lattice.
    pub fn coords(&self, x: &[Rational]) -> Option<Vec<BigInt>> {
        let scaled: Vec<Rational> =
            x.iter().map(|v| v * &Rational::from(self.den.clone())).collect();
        if scaled.iter().any(|v| !v.is_integer()) {
            return None;
        }
        let mut rest: Vec<BigInt> = scaled.iter().map(Rational::numer).collect();
        let mut out = Vec::with_capacity(self.rank());
        for row in &self.basis {
            let p = row.iter().position(|v| !v.is_zero()).expect("nonzero row");
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (a, b) in rest.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &q * b;
                }
            }
            out.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(out)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, o: &QLattice) -> bool {
        o.rows().iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, o: &QLattice) -> QLattice {
        let mut rows = self.rows();
        rows.extend(o.rows());
        QLattice::from_rows(self.d, &rows)
    }

    /// Reduces `x` modulo the lattice for a full-rank lattice; canonical representative.
    pub fn reduce(&self, x: &[Rational]) -> Vec<Rational> {
        debug_assert_eq!(self.rank(), self.d);
        let den = Rational::from(self.den.clone());
        let mut rest: Vec<Rational> = x.iter().map(|v| v * &den).collect();
        for row in &self.basis {
            let p = row.iter().position(|v| !v.is_zero()).expect("nonzero row");
            let q = (&rest[p] / &Rational::from(row[p].clone())).floor();
            if q.is_zero() {
                continue;
            }
            for (a, b) in rest.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &Rational::from(&q * b);
                }
            }
        }
        rest.iter().map(|v| v / &den).collect()
    }

    /// Intersection with another lattice of the same ambient space.
    pub fn intersect(&self, o: &QLattice) -> QLattice {
        if self.rank() == 0 || o.rank() == 0 {
            return QLattice::zero(self.d);
        }
        // x·(H1/d1) = y·(H2/d2)  ⇔  [d2·H1; −d1·H2] has (x, y) in its left kernel
        let mut stacked: IntMat = self.basis.iter().map(|r| r.iter().map(|v| v * &o.den).collect()).collect();
        stacked.extend(o.basis.iter().map(|r| r.iter().map(|v| -(v * &self.den)).collect::<Vec<_>>()));
        let ker = intmat::left_kernel(&stacked, self.d);
        let r1 = self.rank();
        let rows: IntMat = ker
            .iter()
            .map(|k| {
                let mut v = vec![BigInt::zero(); self.d];
                for (c, row) in k[..r1].iter().zip(&self.basis) {
                    if !c.is_zero() {
                        for (a, b) in v.iter_mut().zip(row) {
                            *a += c * b;
                        }
                    }
                }
                v
            })
            .collect();
        QLattice::from_scaled(self.d, self.den.clone(), &rows)
    }

    /// Intersection with the rational subspace spanned by `span` rows.
    pub fn intersect_subspace(&self, span: &QMat) -> QLattice {
        if self.rank() == 0 {
            return self.clone();
        }
        // annihilator: columns p with w·p = 0 for all w in span
        let ann = linalg::kernel(span, self.d, &Rational::zero(), &Rational::one());
        if ann.is_empty() {
            return self.clone();
        }
        // integer matrix B·P (rank × |ann|), scaled to integers
        let prod: QMat = self
            .basis
            .iter()
            .map(|row| {
                ann.iter()
                    .map(|p| {
                        let mut acc = Rational::zero();
                        for (a, b) in row.iter().zip(p) {
                            if !a.is_zero() && !b.is_zero() {
                                acc += &(&Rational::from(a.clone()) * b);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let den = common_denominator(prod.iter().flatten());
        let ints: IntMat = prod
            .iter()
            .map(|r| r.iter().map(|x| x.numer() * (&den / x.denom())).collect())
            .collect();
        let ker = intmat::left_kernel(&ints, ann.len());
        let rows: IntMat = ker
            .iter()
            .map(|k| {
                let mut v = vec![BigInt::zero(); self.d];
                for (c, row) in k.iter().zip(&self.basis) {
                    if !c.is_zero() {
                        for (a, b) in v.iter_mut().zip(row) {
                            *a += c * b;
                        }
                    }
                }
                v
            })
            .collect();
        QLattice::from_scaled(self.d, self.den.clone(), &rows)
    }

    /// Image under a column-convention linear map into ℚ^{d_out}.
    pub fn map(&self, a: &QMat) -> QLattice {
        let rows: QMat = self.rows().iter().map(|r| apply_q(a, r)).collect();
        QLattice::from_rows(a.len(), &rows)
    }

    /// Index `[self : sub]` when both have equal rank and `sub ⊆ self`.
    pub fn index_of_sub(&self, sub: &QLattice) -> Result<Option<BigInt>> {
        let coords = sub
            .rows()
            .iter()
            .map(|r| self.coords(r))
            .collect::<Option<IntMat>>()
            .ok_or(Error::NotASublattice)?;
        if sub.rank() != self.rank() {
            return Ok(None);
        }
        Ok(Some(intmat::det(&coords).abs()))
    }
}

/// Solves `y·M = w` for `M` of full row rank; `y` is unique.
struct RowSolver {
    pivots: Vec<usize>,
    inv: QMat,
}

impl RowSolver {
    fn new(m: &QMat, cols: usize) -> Result<Self> {
        let k = m.len();
        // choose k independent columns of M
        let mt: QMat = (0..cols).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect();
        let mut w = mt.clone();
        let _ = linalg::rref(&mut w);
        let mut cols_chosen = Vec::new();
        let mut acc: QMat = Vec::new();
        for c in 0..cols {
            let mut trial = acc.clone();
            trial.push(mt[c].clone());
            if linalg::rank(&trial) > acc.len() {
                acc = trial;
                cols_chosen.push(c);
                if acc.len() == k {
                    break;
                }
            }
        }
        if cols_chosen.len() < k {
            return Err(Error::NotDiscrete);
        }
        // M_sub = columns chosen, k×k; y = w_sub · M_sub⁻¹
        let sub: QMat = m.iter().map(|r| cols_chosen.iter().map(|&c| r[c].clone()).collect()).collect();
        let inv = invert_q(&sub).ok_or(Error::NotDiscrete)?;
        Ok(RowSolver { pivots: cols_chosen, inv })
    }

    fn solve(&self, w: &[Rational]) -> Vec<Rational> {
        let ws: Vec<Rational> = self.pivots.iter().map(|&c| w[c].clone()).collect();
        let k = self.inv.len();
        (0..k)
            .map(|j| {
                let mut acc = Rational::zero();
                for (i, x) in ws.iter().enumerate() {
                    if !x.is_zero() && !self.inv[i][j].is_zero() {
                        acc += &(x * &self.inv[i][j]);
                    }
                }
                acc
            })
            .collect()
    }
}

pub fn invert_q(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            v
        })
        .collect();
    let piv = linalg::rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul_q(a: &QMat, b: &QMat) -> QMat {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rational::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            acc += &(x * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// A lattice in the realification of ℚ(ζ_N)^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZLattice {
    pub structure: RealStructure,
    pub lat: QLattice,
}

impl ZLattice {
    pub fn zero(st: &RealStructure) -> Self {
        ZLattice { structure: *st, lat: QLattice::zero(st.real_dim()) }
    }

    pub fn from_rows(st: &RealStructure, rows: &[Vec<Rational>]) -> Self {
        ZLattice { structure: *st, lat: QLattice::from_rows(st.real_dim(), rows) }
    }

    /// ℤ-span of complex vectors.
    pub fn from_cvecs(st: &RealStructure, vs: &[CVec]) -> Result<Self> {
        let rows = vs.iter().map(|v| st.realify(v)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows(st, &rows))
    }

    /// `Σ_j Δ_j·v_j` where each `Δ_j` is given by scalar generators.
    pub fn span_over(st: &RealStructure, parts: &[(Vec<CycloNum>, CVec)]) -> Result<Self> {
        let mut vs = Vec::new();
        for (scalars, v) in parts {
            for z in scalars {
                vs.push(v.scale(&z.lift(st.order)?));
            }
        }
        Self::from_cvecs(st, &vs)
    }

    pub fn rank(&self) -> usize {
        self.lat.rank()
    }

    pub fn basis_rows(&self) -> QMat {
        self.lat.rows()
    }

    pub fn basis_cvecs(&self) -> Vec<CVec> {
        self.lat.rows().iter().map(|r| self.structure.complexify(r)).collect()
    }

    fn check(&self, o: &ZLattice) -> Result<()> {
        if self.structure != o.structure {
            Err(Error::StructureMismatch)
        } else {
            Ok(())
        }
    }

    pub fn member(&self, v: &CVec) -> Result<bool> {
        Ok(self.lat.contains(&self.structure.realify(v)?))
    }

    pub fn contains_cvec(&self, v: &CVec) -> bool {
        self.member(v).unwrap_or(false)
    }

    pub fn contains_lattice(&self, o: &ZLattice) -> Result<bool> {
        self.check(o)?;
        Ok(self.lat.contains_lattice(&o.lat))
    }

    pub fn sum(&self, o: &ZLattice) -> Result<ZLattice> {
        self.check(o)?;
        Ok(ZLattice { structure: self.structure, lat: self.lat.sum(&o.lat) })
    }

    pub fn intersect(&self, o: &ZLattice) -> Result<ZLattice> {
        self.check(o)?;
        Ok(ZLattice { structure: self.structure, lat: self.lat.intersect(&o.lat) })
    }

    /// `[self : small]`, or `None` when the ranks differ (infinite index).
    pub fn index(&self, small: &ZLattice) -> Result<Option<BigInt>> {
        self.check(small)?;
        self.lat.index_of_sub(&small.lat)
    }

    /// `L ∩ ℂe`, the lattice points on the complex line through `e`.
    pub fn intersect_with_complex_line(&self, e: &CVec) -> Result<ZLattice> {
        let span = self.structure.line_span(e)?;
        Ok(ZLattice { structure: self.structure, lat: self.lat.intersect_subspace(&span) })
    }

    /// Image under a complex matrix.
    pub fn apply(&self, m: &CMat) -> Result<ZLattice> {
        let a = self.structure.realify_matrix(m)?;
        Ok(ZLattice { structure: self.structure, lat: self.lat.map(&a) })
    }

    /// `z·L`.
    pub fn scale(&self, z: &CycloNum) -> Result<ZLattice> {
        let a = self.structure.scalar_matrix(z)?;
        Ok(ZLattice { structure: self.structure, lat: self.lat.map(&a) })
    }

    /// True iff `P·L ⊆ L` (equivalently `= L` for finite-order `P`).
    pub fn is_stable_under(&self, m: &CMat) -> Result<bool> {
        let a = self.structure.realify_matrix(m)?;
        Ok(self.lat.rows().iter().all(|r| self.lat.contains(&apply_q(&a, r))))
    }

    /// True iff `z·L ⊆ L`.
    pub fn is_stable_under_scalar(&self, z: &CycloNum) -> Result<bool> {
        let a = self.structure.scalar_matrix(z)?;
        Ok(self.lat.rows().iter().all(|r| self.lat.contains(&apply_q(&a, r))))
    }

    /// ℚ-span of the lattice as a row basis.
    pub fn rational_span(&self) -> QMat {
        let mut rows = self.lat.rows();
        let piv = linalg::rref(&mut rows);
        rows.truncate(piv.len());
        rows
    }
}

/// One linear constraint `A·v ∈ T` of a preimage problem.
pub struct Constraint<'a> {
    /// Column-convention map from the domain coordinates to the target's coordinates.
    pub map: QMat,
    pub target: &'a QLattice,
}

/// `{v ∈ domain : A_j v ∈ T_j for all j}`.
///
/// `domain` is a row basis of a rational subspace of the source space; the
/// constraints must be injective on it, otherwise the solution is not discrete.
pub fn preimage_raw(d_in: usize, domain: Option<&QMat>, cons: &[Constraint<'_>]) -> Result<QLattice> {
    if cons.is_empty() {
        return Err(Error::EmptyConstraintSet);
    }
    let ident: QMat;
    let u = match domain {
        Some(u) => u,
        None => {
            ident = (0..d_in)
                .map(|i| (0..d_in).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                .collect();
            &ident
        }
    };
    if u.is_empty() {
        return Ok(QLattice::zero(d_in));
    }
    // M = [U·A_1ᵀ | U·A_2ᵀ | …]  (k × Σ d_out)
    let mut m: QMat = vec![Vec::new(); u.len()];
    let mut target_rows: Vec<(usize, QMat)> = Vec::new();
    let mut offset = 0;
    for c in cons {
        for (i, row) in u.iter().enumerate() {
            m[i].extend(apply_q(&c.map, row));
        }
        target_rows.push((offset, c.target.rows()));
        offset += c.map.len();
    }
    let total = offset;
    let mut t_rows: QMat = Vec::new();
    for (off, rows) in &target_rows {
        for r in rows {
            let mut v = vec![Rational::zero(); total];
            for (k, x) in r.iter().enumerate() {
                v[off + k] = x.clone();
            }
            t_rows.push(v);
        }
    }
    let solver = RowSolver::new(&m, total)?;
    let t = QLattice::from_rows(total, &t_rows);
    let mut span = m.clone();
    let piv = linalg::rref(&mut span);
    span.truncate(piv.len());
    let inter = t.intersect_subspace(&span);
    let rows: QMat = inter
        .rows()
        .iter()
        .map(|w| {
            let y = solver.solve(w);
            let mut v = vec![Rational::zero(); d_in];
            for (c, row) in y.iter().zip(u) {
                if !c.is_zero() {
                    for (a, b) in v.iter_mut().zip(row) {
                        *a += &(c * b);
                    }
                }
            }
            v
        })
        .collect();
    Ok(QLattice::from_rows(d_in, &rows))
}

/// Preimage over complex matrices with lattice targets in the same structure.
pub fn preimage(
    st: &RealStructure,
    domain: Option<&QMat>,
    ops: &[(CMat, &ZLattice)],
) -> Result<ZLattice> {
    let cons: Vec<Constraint<'_>> = ops
        .iter()
        .map(|(a, t)| Ok(Constraint { map: st.realify_matrix(a)?, target: &t.lat }))
        .collect::<Result<_>>()?;
    Ok(ZLattice { structure: *st, lat: preimage_raw(st.real_dim(), domain, &cons)? })
}

/// Finite quotient `L_big / L_small` in Smith form.
#[derive(Clone, Debug)]
pub struct AbelianQuotient {
    /// Invariant factors `d₁ | d₂ | …`, all greater than one.
    pub invariant_factors: Vec<BigInt>,
    /// Generators of the cyclic factors, as ambient rational rows.
    pub generators: QMat,
    /// One representative per coset.
    pub coset_reps: QMat,
}

impl AbelianQuotient {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

fn coset_reps(gens: &QMat, factors: &[usize], d: usize) -> QMat {
    let mut reps = vec![vec![Rational::zero(); d]];
    for (g, &f) in gens.iter().zip(factors) {
        let mut next = Vec::with_capacity(reps.len() * f);
        for r in &reps {
            for a in 0..f {
                let c = Rational::from_int(a as i64);
                next.push(r.iter().zip(g).map(|(x, y)| x + &(&c * y)).collect());
            }
        }
        reps = next;
    }
    reps
}

/// `big / small` for `small ⊆ big` of equal rank.
pub fn quotient(big: &QLattice, small: &QLattice, bound: usize) -> Result<AbelianQuotient> {
    let coords = small
        .rows()
        .iter()
        .map(|r| big.coords(r))
        .collect::<Option<IntMat>>()
        .ok_or(Error::NotASublattice)?;
    if small.rank() != big.rank() {
        return Err(Error::Precondition("quotient of lattices of different rank is infinite".into()));
    }
    let r = big.rank();
    let s = intmat::snf(&coords, r);
    let vinv = intmat::unimodular_inverse(&s.v);
    let brows = big.rows();
    let mut factors = Vec::new();
    let mut gens = Vec::new();
    for k in 0..r {
        let dk = s.d[k][k].abs();
        if dk.is_one() {
            continue;
        }
        let g: Vec<Rational> = (0..big.d)
            .map(|c| {
                let mut acc = Rational::zero();
                for j in 0..r {
                    if !vinv[k][j].is_zero() {
                        acc += &(&Rational::from(vinv[k][j].clone()) * &brows[j][c]);
                    }
                }
                acc
            })
            .collect();
        factors.push(dk);
        gens.push(g);
    }
    let order: BigInt = factors.iter().product();
    let size = order.to_usize().filter(|&n| n <= bound);
    let reps = match size {
        Some(_) => {
            let f: Vec<usize> = factors.iter().map(|x| x.to_usize().expect("bounded")).collect();
            coset_reps(&gens, &f, big.d)
        }
        None => Vec::new(),
    };
    Ok(AbelianQuotient { invariant_factors: factors, generators: gens, coset_reps: reps })
}

/// Subgroups of `⊕ ℤ/f_i`, each as a sorted list of mixed-radix element codes.
pub fn subgroups(factors: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = factors.iter().product();
    let decode = |mut x: usize| -> Vec<usize> {
        let mut out = vec![0; factors.len()];
        for (k, &f) in factors.iter().enumerate().rev() {
            out[k] = x % f;
            x /= f;
        }
        out
    };
    let encode = |v: &[usize]| -> usize { v.iter().zip(factors).fold(0, |acc, (&x, &f)| acc * f + x) };
    let add = |a: usize, b: usize| -> usize {
        let (va, vb) = (decode(a), decode(b));
        let s: Vec<usize> = va.iter().zip(&vb).zip(factors).map(|((x, y), f)| (x + y) % f).collect();
        encode(&s)
    };
    let join = |h: &BTreeSet<usize>, g: usize| -> BTreeSet<usize> {
        let mut out = h.clone();
        let mut frontier: VecDeque<usize> = h.iter().copied().collect();
        while let Some(x) = frontier.pop_front() {
            let y = add(x, g);
            if out.insert(y) {
                frontier.push_back(y);
            }
        }
        out
    };
    let start: BTreeSet<usize> = [0].into_iter().collect();
    let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(h) = queue.pop_front() {
        for g in 0..total {
            if h.contains(&g) {
                continue;
            }
            let j = join(&h, g);
            if seen.insert(j.clone()) {
                queue.push_back(j);
            }
        }
        out.push(h.into_iter().collect::<Vec<_>>());
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// All lattices `small ⊆ Γ ⊆ big` satisfying `keep`, in a deterministic order.
pub fn enumerate_between(
    small: &ZLattice,
    big: &ZLattice,
    bound: usize,
    mut keep: impl FnMut(&ZLattice) -> bool,
) -> Result<Vec<ZLattice>> {
    small.check(big)?;
    let q = quotient(&big.lat, &small.lat, bound)?;
    let order = q.order();
    if order.to_usize().is_none_or(|n| n > bound) {
        return Err(Error::QuotientTooLarge(order.to_string(), bound));
    }
    let factors: Vec<usize> = q.invariant_factors.iter().map(|x| x.to_usize().expect("bounded")).collect();
    let mut out = Vec::new();
    for h in subgroups(&factors) {
        let mut rows = small.lat.rows();
        for code in h {
            let mut x = code;
            let mut coef = vec![0usize; factors.len()];
            for (k, &f) in factors.iter().enumerate().rev() {
                coef[k] = x % f;
                x /= f;
            }
            let mut v = vec![Rational::zero(); big.lat.d];
            for (c, g) in coef.iter().zip(&q.generators) {
                let c = Rational::from_int(*c as i64);
                for (a, b) in v.iter_mut().zip(g) {
                    *a += &(&c * b);
                }
            }
            rows.push(v);
        }
        let l = ZLattice::from_rows(&small.structure, &rows);
        if keep(&l) {
            out.push(l);
        }
    }
    Ok(out)
}

/// Checks `|d| · x` style scaling helper: `q·L`.
pub fn scale_rational(l: &ZLattice, q: &Rational) -> ZLattice {
    let rows: QMat = l.basis_rows().iter().map(|r| r.iter().map(|x| x * q).collect()).collect();
    ZLattice::from_rows(&l.structure, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_line(a: &[(i64, i64)]) -> ZLattice {
        let st = RealStructure::new(1, 4);
        let vs: Vec<CVec> = a
            .iter()
            .map(|&(x, y)| {
                CVec(vec![&CycloNum::from_int(x, 4) + &CycloNum::i(4).scale(&Rational::from_int(y))])
            })
            .collect();
        ZLattice::from_cvecs(&st, &vs).unwrap()
    }

    #[test]
    fn membership_and_index() {
        let big = gauss_line(&[(1, 0), (0, 1)]);
        let small = gauss_line(&[(2, 0), (0, 2)]);
        assert_eq!(big.index(&small).unwrap(), Some(BigInt::from(4)));
        assert!(big.contains_lattice(&small).unwrap());
        assert_eq!(small.index(&big), Err(Error::NotASublattice));
        let v = CVec(vec![&CycloNum::from_int(3, 4) + &CycloNum::i(4)]);
        let l = ZLattice::from_cvecs(&big.structure, std::slice::from_ref(&v)).unwrap();
        assert!(l.member(&v).unwrap());
    }

    #[test]
    fn canonical_equality() {
        let a = gauss_line(&[(1, 0), (0, 1)]);
        let b = gauss_line(&[(1, 1), (3, 2), (5, 5)]);
        assert_eq!(a, b);
    }

    #[test]
    fn complex_line_intersection() {
        let st = RealStructure::new(2, 4);
        let i = CycloNum::i(4);
        let e1 = CVec::unit(2, 0, 4);
        let e2 = CVec::unit(2, 1, 4);
        let l = ZLattice::from_cvecs(&st, &[e1.clone(), e1.scale(&i), e2.clone(), e2.scale(&i)]).unwrap();
        let c = l.intersect_with_complex_line(&e1).unwrap();
        assert_eq!(c, ZLattice::from_cvecs(&st, &[e1.clone(), e1.scale(&i)]).unwrap());
        let skew = ZLattice::from_cvecs(&st, &[e1.add(&e2)]).unwrap();
        assert_eq!(skew.intersect_with_complex_line(&e1).unwrap().rank(), 0);
    }

    #[test]
    fn preimage_scaling() {
        let l = gauss_line(&[(1, 0), (0, 1)]);
        let st = l.structure;
        let id = CMat::identity(1, 4);
        assert_eq!(preimage(&st, None, &[(id.clone(), &l)]).unwrap(), l);
        let two = id.scale(&CycloNum::from_int(2, 4));
        let half = scale_rational(&l, &Rational::new(1, 2));
        assert_eq!(preimage(&st, None, &[(two, &l)]).unwrap(), half);
        assert_eq!(preimage(&st, None, &[]), Err(Error::EmptyConstraintSet));
    }

    #[test]
    fn klein_quotient_has_five_intermediates() {
        let big = gauss_line(&[(1, 0), (0, 1)]);
        let small = gauss_line(&[(2, 0), (0, 2)]);
        let all = enumerate_between(&small, &big, QUOTIENT_BOUND, |_| true).unwrap();
        assert_eq!(all.len(), 5);
        let one = enumerate_between(&big, &big, QUOTIENT_BOUND, |_| true).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(
            enumerate_between(&small, &big, 3, |_| true),
            Err(Error::QuotientTooLarge(..))
        ));
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(subgroups(&[2, 2]).len(), 5);
        assert_eq!(subgroups(&[4]).len(), 3);
        assert_eq!(subgroups(&[2, 4]).len(), 8);
        assert_eq!(subgroups(&[]).len(), 1);
    }

    #[test]
    fn reduction_mod_full_lattice() {
        let l = gauss_line(&[(2, 0), (1, 3)]);
        let x = vec![Rational::new(7, 2), Rational::from_int(-5)];
        let r = l.lat.reduce(&x);
        let diff: Vec<Rational> = x.iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(l.lat.contains(&diff));
        assert_eq!(l.lat.reduce(&r), r);
    }
}
