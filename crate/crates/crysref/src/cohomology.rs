//! `H¹(K,Λ)`, cocycles on the free group over the generating reflections,
//! well-definedness modulo a lattice and the coboundary test.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::lattice_theory::{operator_s, root_component, root_sublattice, ReflectionSystem};
use crate::linalg::{kernel, CMat, CVec};
use crate::rational::Rational;
use crate::zmodule::intmat::snf;
use crate::zmodule::{apply_q, preimage_raw, Constraint, QLattice, QMat, RealStructure, ZLattice};

/// Invariant factors of `H¹(K,Λ) ≅ Λ*/Λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Result {
    /// Factors greater than one, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
    pub order: BigInt,
}

/// Smith form of `S` acting on a ℤ-basis of a root lattice.
pub fn h1_root_lattice(sys: &ReflectionSystem, lambda: &ZLattice) -> Result<H1Result> {
    if sys.s() != sys.n() {
        return Err(Error::WrongGeneratorCount { expected: sys.n(), found: sys.s() });
    }
    if root_sublattice(lambda, sys)? != *lambda {
        return Err(Error::NotRootLattice);
    }
    let s = operator_s(sys)?;
    let a = lambda.structure.realify_matrix(&s.ambient)?;
    let rows = lambda.basis_rows();
    let mut m = Vec::with_capacity(rows.len());
    for b in &rows {
        let image = apply_q(&a, b);
        m.push(lambda.lat.coords(&image).ok_or(Error::NotInvariant)?);
    }
    let diag = snf(&m, rows.len()).diagonal;
    let invariant_factors: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_one()).collect();
    let order = invariant_factors.iter().product();
    Ok(H1Result { invariant_factors, order })
}

/// An element of the free group on `r₁,…,r_s`, as letters `(index, ±1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<(usize, i32)>);

impl Word {
    pub fn letter(g: usize) -> Self {
        Word(vec![(g, 1)])
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::with_capacity(base.0.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            out.extend_from_slice(&base.0);
        }
        Word(out)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().map(|l| l.0).max()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, e)| if e == 1 { format!("r{}", g + 1) } else { format!("r{}^-1", g + 1) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

struct WordParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl WordParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} of word", self.pos))
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected integer"))
    }

    fn seq(&mut self) -> Result<Word> {
        let mut w = Word::default();
        while let Some(c) = self.peek() {
            if c == b')' {
                break;
            }
            w = w.concat(&self.item()?);
        }
        Ok(w)
    }

    fn item(&mut self) -> Result<Word> {
        let atom = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.seq()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("unbalanced parenthesis"));
                }
                self.pos += 1;
                w
            }
            Some(b'r' | b'R') => {
                self.pos += 1;
                let k = self.int()?;
                if k < 1 {
                    return Err(self.err("generator indices start at 1"));
                }
                Word::letter(k as usize - 1)
            }
            _ => return Err(self.err("expected generator or parenthesis")),
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.int()?;
            return Ok(atom.pow(e));
        }
        Ok(atom)
    }
}

/// Parses words such as `r1 r2 r1^-1 (r4 r5)^3`.
pub fn parse_word(text: &str) -> Result<Word> {
    let mut p = WordParser { s: text.as_bytes(), pos: 0 };
    let w = p.seq()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(w)
}

/// Linear part of a word.
pub fn word_matrix(sys: &ReflectionSystem, w: &Word) -> Result<CMat> {
    let n = sys.n();
    let mut m = CMat::identity(n, sys.order());
    for &(g, e) in &w.0 {
        let r = sys.gens.get(g).ok_or(Error::IndexOutOfRange(g))?.matrix();
        m = m.mul(&if e > 0 { r } else { r.inverse()? });
    }
    Ok(m)
}

/// Values `c(r₁),…,c(r_s)` of a cocycle on the free group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    pub values: Vec<CVec>,
}

impl Cocycle {
    pub fn zero(sys: &ReflectionSystem) -> Self {
        Cocycle { values: vec![CVec::zeros(sys.n(), sys.order()); sys.s()] }
    }

    /// `c(r₁) = ⋯ = c(r_n) = 0`, `c(r_{n+1}) = λe_{n+1}`.
    pub fn last_root(sys: &ReflectionSystem, lambda: &CycloNum) -> Result<Self> {
        let mut c = Self::zero(sys);
        let last = sys.s() - 1;
        c.values[last] = sys.gens[last].root.scale(&lambda.lift(sys.order())?);
        Ok(c)
    }

    /// The coboundary `c(r_j) = (I−R_j)v`.
    pub fn coboundary(sys: &ReflectionSystem, v: &CVec) -> Self {
        Cocycle { values: sys.gens.iter().map(|r| r.apply_i_minus(v)).collect() }
    }

    pub fn sub(&self, o: &Cocycle) -> Cocycle {
        Cocycle { values: self.values.iter().zip(&o.values).map(|(a, b)| a.sub(b)).collect() }
    }
}

/// `c(w)` by the rules `c(uv) = c(u) + Lin(u)·c(v)` and `c(r⁻¹) = −R⁻¹c(r)`.
pub fn evaluate_word(c: &Cocycle, sys: &ReflectionSystem, w: &Word) -> Result<CVec> {
    let n = sys.n();
    let o = sys.order();
    let mut lin = CMat::identity(n, o);
    let mut acc = CVec::zeros(n, o);
    for &(g, e) in &w.0 {
        let r = sys.gens.get(g).ok_or(Error::IndexOutOfRange(g))?.matrix();
        let val = c.values.get(g).ok_or(Error::IndexOutOfRange(g))?;
        if e > 0 {
            acc = acc.add(&lin.mul_vec(val));
            lin = lin.mul(&r);
        } else {
            let ri = r.inverse()?;
            acc = acc.sub(&lin.mul_vec(&ri.mul_vec(val)));
            lin = lin.mul(&ri);
        }
    }
    Ok(acc)
}

/// Relators of the group on its generating reflections.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub relators: Vec<Word>,
}

impl Presentation {
    /// Parses relators and checks each one maps to the identity.
    pub fn parse(sys: &ReflectionSystem, texts: &[String]) -> Result<Self> {
        let mut relators = Vec::with_capacity(texts.len());
        for t in texts {
            let w = parse_word(t)?;
            if w.max_index().is_some_and(|k| k >= sys.s()) {
                return Err(Error::IndexOutOfRange(w.max_index().unwrap_or(0)));
            }
            if !word_matrix(sys, &w)?.is_identity() {
                return Err(Error::BadRelator(t.clone()));
            }
            relators.push(w);
        }
        Ok(Presentation { relators })
    }
}

/// True iff `c` descends to a map on `K` modulo `Γ`.
///
/// With a presentation every relator is evaluated. Without one, values are
/// propagated along the closure's spanning tree and every edge `P → P·R_g`
/// is checked for agreement modulo `Γ`.
pub fn cocycle_well_defined(
    sys: &ReflectionSystem,
    c: &Cocycle,
    gamma: &ZLattice,
    pres: Option<&Presentation>,
) -> Result<bool> {
    if c.values.len() != sys.s() {
        return Err(Error::WrongGeneratorCount { expected: sys.s(), found: c.values.len() });
    }
    if let Some(p) = pres {
        for f in &p.relators {
            if !gamma.member(&evaluate_word(c, sys, f)?)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let g = &sys.group;
    let st = gamma.structure;
    let vals_r: Vec<Vec<Rational>> = c.values.iter().map(|v| st.realify(v)).collect::<Result<_>>()?;
    let mut values: Vec<Option<Vec<Rational>>> = vec![None; g.order()];
    values[g.identity_index()] = Some(vec![Rational::zero(); st.real_dim()]);
    for p in g.bfs_order() {
        let vp = values[p].clone().expect("parent before child");
        let pm = st.realify_matrix(&g.elements[p])?;
        for (k, &q) in g.right_mul[p].iter().enumerate() {
            let pc = apply_q(&pm, &vals_r[k]);
            let cand: Vec<Rational> = vp.iter().zip(&pc).map(|(a, b)| a + b).collect();
            match &values[q] {
                None => values[q] = Some(cand),
                Some(old) => {
                    let diff: Vec<Rational> = cand.iter().zip(old).map(|(a, b)| a - b).collect();
                    if !gamma.lat.contains(&diff) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// True iff `c(r_j) ≡ (I−R_j)v (mod Γ)` for some `v` and every `j`.
///
/// With `A: v ↦ ((I−R_j)v)_j` and rows `Q` spanning the left kernel of `A`,
/// this holds iff `Q·c ∈ Q(Γ^s)`.
pub fn is_coboundary(sys: &ReflectionSystem, c: &Cocycle, gamma: &ZLattice) -> Result<bool> {
    if c.values.len() != sys.s() {
        return Err(Error::WrongGeneratorCount { expected: sys.s(), found: c.values.len() });
    }
    let st = gamma.structure;
    let d = st.real_dim();
    let s = sys.s();
    let blocks: Vec<QMat> = (0..s).map(|j| st.realify_matrix(&sys.i_minus(j))).collect::<Result<_>>()?;
    // columns of A^T are rows of A; A^T is d × ds
    let at: QMat = (0..d).map(|col| blocks.iter().flat_map(|b| b.iter().map(move |row| row[col].clone())).collect()).collect();
    let q = kernel(&at, d * s, &Rational::zero(), &Rational::one());
    if q.is_empty() {
        return Ok(true);
    }
    let apply_block = |j: usize, x: &[Rational]| -> Vec<Rational> {
        q.iter().map(|row| row[j * d..(j + 1) * d].iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    };
    let mut gens = Vec::new();
    for j in 0..s {
        for b in gamma.basis_rows() {
            gens.push(apply_block(j, &b));
        }
    }
    let image = QLattice::from_rows(q.len(), &gens);
    let mut qc = vec![Rational::zero(); q.len()];
    for (j, v) in c.values.iter().enumerate() {
        for (a, b) in qc.iter_mut().zip(apply_block(j, &st.realify(v)?)) {
            *a += &b;
        }
    }
    Ok(image.contains(&qc))
}

/// Scalars `λ` with `λ(I − R_{n+1}PR_{n+1}⁻¹)e_{n+1} ∈ Γ` for every `P` of the
/// subgroup on the first `n` reflections whose conjugate stays in that
/// subgroup, as a lattice in `ℂ`. `None` means no condition arises.
pub fn lamb_constraints(sys: &ReflectionSystem, gamma: &ZLattice, cap: usize) -> Result<Option<ZLattice>> {
    let n = sys.n();
    if sys.s() != n + 1 {
        return Err(Error::WrongGeneratorCount { expected: n + 1, found: sys.s() });
    }
    let sub = sys.prefix(n, cap)?;
    let r = sys.gens[n].matrix();
    let ri = r.inverse()?;
    let e = &sys.gens[n].root;
    let o = sys.order();
    let id = CMat::identity(n, o);
    let mut seen: HashSet<CVec> = HashSet::new();
    let line = RealStructure::new(1, o);
    let st = gamma.structure;
    let mut allowed: Option<ZLattice> = None;
    for p in &sub.group.elements {
        let qm = r.mul(p).mul(&ri);
        if !sub.group.contains(&qm) {
            continue;
        }
        let w = id.sub(&qm).mul_vec(e);
        if w.is_zero() || !seen.insert(w.clone()) {
            continue;
        }
        if let Some(a) = &allowed {
            let implied = a.basis_cvecs().iter().all(|l| gamma.contains_cvec(&w.scale(&l.0[0])));
            if implied {
                continue;
            }
        }
        // column k is the realification of ζ^k·w
        let cols: Vec<Vec<Rational>> = (0..line.phi)
            .map(|k| st.realify(&w.scale(&CycloNum::zeta_pow(o, k as i64))))
            .collect::<Result<_>>()?;
        let map: QMat = (0..st.real_dim()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let sol = preimage_raw(line.phi, None, &[Constraint { map, target: &gamma.lat }])?;
        let sol = ZLattice { structure: line, lat: sol };
        allowed = Some(match allowed {
            None => sol,
            Some(a) => a.intersect(&sol)?,
        });
    }
    Ok(allowed)
}

/// Membership of `λ` in the output of [`lamb_constraints`].
pub fn lamb_allows(allowed: &Option<ZLattice>, lambda: &CycloNum) -> Result<bool> {
    match allowed {
        None => Ok(true),
        Some(a) => a.member(&CVec(vec![lambda.lift(a.structure.order)?])),
    }
}

/// Outcome of a scan over `λ ∈ (1/D)Δ / Δ`, `Δ = {μ : μe_{n+1} ∈ Γ}`.
#[derive(Clone, Debug)]
pub struct ClassScan {
    pub candidates: usize,
    pub well_defined: Vec<CycloNum>,
    /// One representative per class modulo coboundaries, zero first.
    pub classes: Vec<CycloNum>,
}

pub fn valid_classes(sys: &ReflectionSystem, gamma: &ZLattice, denominator: u32) -> Result<ClassScan> {
    let n = sys.n();
    if sys.s() != n + 1 {
        return Err(Error::WrongGeneratorCount { expected: n + 1, found: sys.s() });
    }
    if denominator == 0 {
        return Err(Error::Precondition("denominator must be positive".into()));
    }
    let e = &sys.gens[n].root;
    let t = e.0.iter().position(|x| !x.is_zero()).expect("nonzero root");
    let delta: Vec<CycloNum> =
        root_component(gamma, e)?.basis_cvecs().iter().map(|v| &v.0[t] / &e.0[t]).collect();
    let dq = Rational::new(1, denominator as i64);
    let d = denominator as usize;
    let total = d.pow(delta.len() as u32);
    let mut well_defined = Vec::new();
    for code in 0..total {
        let mut x = code;
        let mut lambda = CycloNum::zero(sys.order());
        for mu in &delta {
            let a = (x % d) as i64;
            x /= d;
            lambda = &lambda + &mu.scale(&(&dq * &Rational::from_int(a)));
        }
        if cocycle_well_defined(sys, &Cocycle::last_root(sys, &lambda)?, gamma, None)? {
            well_defined.push(lambda);
        }
    }
    let mut classes: Vec<CycloNum> = Vec::new();
    for l in &well_defined {
        let mut fresh = true;
        for rep in &classes {
            if is_coboundary(sys, &Cocycle::last_root(sys, &(l - rep))?, gamma)? {
                fresh = false;
                break;
            }
        }
        if fresh {
            classes.push(l.clone());
        }
    }
    Ok(ClassScan { candidates: total, well_defined, classes })
}
