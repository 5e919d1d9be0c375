//! Affine unitary maps `(P, v): x ↦ Px + v`, affine groups given by a finite
//! linear part, a lattice and a cocycle, and the one-dimensional examples.

use std::collections::BTreeSet;
use std::fmt;

use crate::cohomology::{cocycle_well_defined, is_coboundary, Cocycle};
use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::group::{closure, MatrixGroup};
use crate::lattice_theory::{is_invariant, root_sublattice_all_lines, ReflectionSystem};
use crate::linalg::{matrix_order, CMat, CVec, ORDER_CAP};
use crate::zmodule::{reduce_tau, RealStructure, ZLattice};

/// `x ↦ linear·x + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineElement {
    pub linear: CMat,
    pub translation: CVec,
}

impl AffineElement {
    pub fn new(linear: CMat, translation: CVec) -> Result<Self> {
        if !linear.is_square() || linear.rows != translation.dim() {
            return Err(Error::DimensionMismatch(linear.rows, translation.dim()));
        }
        let o = num_integer::lcm(linear.order(), translation.order());
        Ok(AffineElement { linear: linear.lift(o)?, translation: translation.lift(o)? })
    }

    pub fn identity(dim: usize, order: u32) -> Self {
        AffineElement { linear: CMat::identity(dim, order), translation: CVec::zeros(dim, order) }
    }

    pub fn translation(t: CVec) -> Self {
        AffineElement { linear: CMat::identity(t.dim(), t.order()), translation: t }
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    /// `(P,v)(Q,w) = (PQ, Pw + v)`.
    pub fn compose(&self, o: &AffineElement) -> Result<AffineElement> {
        if self.dim() != o.dim() {
            return Err(Error::DimensionMismatch(self.dim(), o.dim()));
        }
        let ord = num_integer::lcm(self.linear.order(), o.linear.order());
        let (p, v) = (self.linear.lift(ord)?, self.translation.lift(ord)?);
        let (q, w) = (o.linear.lift(ord)?, o.translation.lift(ord)?);
        Ok(AffineElement { linear: p.mul(&q), translation: p.mul_vec(&w).add(&v) })
    }

    /// `(P⁻¹, −P⁻¹v)`.
    pub fn inverse(&self) -> Result<AffineElement> {
        let pi = self.linear.inverse()?;
        let t = pi.mul_vec(&self.translation).neg();
        Ok(AffineElement { linear: pi, translation: t })
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        self.linear.mul_vec(x).add(&self.translation)
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && self.translation.is_zero()
    }
}

/// An affine reflection with a point of its mirror.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineReflection {
    pub theta: CycloNum,
    pub order: u32,
    /// Root of the linear part.
    pub root: CVec,
    /// `(1−θ)⁻¹v`, fixed by the map.
    pub mirror_point: CVec,
}

/// Detects `(R, v)` with `R` a reflection and `v` on its root line.
pub fn is_affine_reflection(a: &AffineElement) -> Result<Option<AffineReflection>> {
    let n = a.dim();
    let o = a.linear.order();
    let d = CMat::identity(n, o).sub(&a.linear);
    if d.rank() != 1 {
        return Ok(None);
    }
    let Ok(order) = matrix_order(&a.linear, ORDER_CAP) else {
        return Ok(None);
    };
    let root = (0..n).map(|c| d.column(c)).find(|v| !v.is_zero()).expect("rank one");
    let k = root.0.iter().position(|x| !x.is_zero()).expect("nonzero");
    let theta = &a.linear.mul_vec(&root).0[k] / &root.0[k];
    let one = CycloNum::one(o);
    // v must lie in the image of I − R, which is the root line
    let v = &a.translation;
    let mu = &v.0[k] / &root.0[k];
    if root.scale(&mu) != *v {
        return Ok(None);
    }
    let mirror_point = v.scale(&(&one - &theta).inv()?);
    Ok(Some(AffineReflection { theta, order: order as u32, root, mirror_point }))
}

/// `W` with `Lin W` finite, `Tran W = Γ` and a cocycle on the generators.
#[derive(Clone, Debug)]
pub struct AffineGroupSpec {
    pub linear_part: MatrixGroup,
    pub lattice: ZLattice,
    /// Cocycle on the generating reflections; `None` for a semidirect product.
    pub cocycle: Option<(ReflectionSystem, Cocycle)>,
}

/// The semidirect product `K ⋉ Γ`.
pub fn semidirect(k: &MatrixGroup, gamma: &ZLattice) -> Result<AffineGroupSpec> {
    if !is_invariant(gamma, k)? {
        return Err(Error::NotInvariant);
    }
    Ok(AffineGroupSpec { linear_part: k.clone(), lattice: gamma.clone(), cocycle: None })
}

/// The extension defined by a cocycle, which must be well-defined modulo `Γ`.
pub fn extension(sys: &ReflectionSystem, gamma: &ZLattice, c: Cocycle) -> Result<AffineGroupSpec> {
    if !is_invariant(gamma, &sys.group)? {
        return Err(Error::NotInvariant);
    }
    if !cocycle_well_defined(sys, &c, gamma, None)? {
        return Err(Error::Precondition("cocycle is not well-defined modulo the lattice".into()));
    }
    Ok(AffineGroupSpec { linear_part: sys.group.clone(), lattice: gamma.clone(), cocycle: Some((sys.clone(), c)) })
}

/// The trivial linear group of a dimension.
pub fn trivial_group(dim: usize, order: u32) -> Result<MatrixGroup> {
    closure(&[CMat::identity(dim, order)], 1)
}

/// Three-valued verdict of a theorem-backed predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Undecided => "undecided",
        })
    }
}

/// Whether the group is generated by affine reflections.
///
/// Split extensions are decided by `Γ = Γ⁰`. A non-split extension over a
/// root lattice is an r-group; other non-split cases are left undecided.
pub fn is_r_group(spec: &AffineGroupSpec) -> Result<Verdict> {
    let root = root_sublattice_all_lines(&spec.lattice, &spec.linear_part)?;
    let is_root = root == spec.lattice;
    let split = match &spec.cocycle {
        None => true,
        Some((sys, c)) => is_coboundary(sys, c, &spec.lattice)?,
    };
    Ok(match (split, is_root) {
        (_, true) => Verdict::True,
        (true, false) => Verdict::False,
        (false, false) => Verdict::Undecided,
    })
}

pub fn rank_of_translations(spec: &AffineGroupSpec) -> usize {
    spec.lattice.rank()
}

/// Translation rank equals the real dimension `2n`.
pub fn is_crystallographic(spec: &AffineGroupSpec) -> bool {
    rank_of_translations(spec) == 2 * spec.lattice.structure.dim
}

/// A real affine Weyl group viewed over `ℂ`.
#[derive(Clone, Debug)]
pub struct ComplexifiedWeyl {
    pub spec: AffineGroupSpec,
    pub cartan: Vec<Vec<i64>>,
    /// Determinant of `S` in the root basis, which is the Cartan determinant.
    pub det_s: i64,
}

fn validate_cartan(a: &[Vec<i64>]) -> Result<()> {
    let n = a.len();
    let bad = |m: String| Err(Error::InvalidCartanData(m));
    if n == 0 || a.iter().any(|r| r.len() != n) {
        return bad("matrix must be square and nonempty".into());
    }
    for i in 0..n {
        if a[i][i] != 2 {
            return bad(format!("diagonal entry {i} is not 2"));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if a[i][j] > 0 || (a[i][j] == 0) != (a[j][i] == 0) || a[i][j] * a[j][i] > 3 {
                return bad(format!("entries ({i},{j}) and ({j},{i}) are not a finite-type pair"));
            }
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && a[i][j] != 0 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return bad("diagram is disconnected".into());
    }
    for k in 1..=n {
        let minor: Vec<Vec<i64>> = a[..k].iter().map(|r| r[..k].to_vec()).collect();
        if int_det(&minor) <= 0 {
            return bad("matrix is not of finite type".into());
        }
    }
    Ok(())
}

fn int_det(m: &[Vec<i64>]) -> i64 {
    let rows: Vec<Vec<num_bigint::BigInt>> =
        m.iter().map(|r| r.iter().map(|&x| num_bigint::BigInt::from(x)).collect()).collect();
    i64::try_from(crate::zmodule::intmat::det(&rows)).expect("small determinant")
}

/// The affine Weyl group of a Cartan matrix `a_{ij} = ⟨α_i^∨, α_j⟩`, acting on
/// `ℂⁿ` in coroot coordinates, with translations the coroot lattice `ℤⁿ`.
pub fn complexify_weyl(cartan: &[Vec<i64>], cap: usize) -> Result<ComplexifiedWeyl> {
    validate_cartan(cartan)?;
    let n = cartan.len();
    let o = 4;
    // s_i(α_j^∨) = α_j^∨ − a_{ji}α_i^∨
    let gens: Vec<CMat> = (0..n)
        .map(|i| {
            let rows = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| {
                            let id = i64::from(r == c);
                            let x = if r == i { id - cartan[c][i] } else { id };
                            CycloNum::from_int(x, o)
                        })
                        .collect()
                })
                .collect();
            CMat::from_rows(rows)
        })
        .collect::<Result<_>>()?;
    let k = closure(&gens, cap)?;
    let st = RealStructure::new(n, o);
    let basis: Vec<CVec> = (0..n).map(|i| CVec::unit(n, i, o)).collect();
    let lattice = ZLattice::from_cvecs(&st, &basis)?;
    let spec = semidirect(&k, &lattice)?;
    Ok(ComplexifiedWeyl { spec, cartan: cartan.to_vec(), det_s: int_det(cartan) })
}

/// The five kinds of infinite irreducible one-dimensional groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OneDimKind {
    /// `{(ω^l, t)}` over the triangular lattice.
    W3,
    /// `{(i^l, t)}` over the square lattice.
    W4,
    /// `{(±ω^l, t)}` over the triangular lattice.
    W6,
    /// `{(±1, t)}` over `(ℤ + λℤ)v`.
    W2Lambda,
    /// `{(±1, t)}` over `ℤv`.
    W2,
}

impl OneDimKind {
    pub const ALL: [OneDimKind; 5] =
        [OneDimKind::W3, OneDimKind::W4, OneDimKind::W6, OneDimKind::W2Lambda, OneDimKind::W2];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "W3" | "W(3,v)" => Ok(OneDimKind::W3),
            "W4" | "W(4,v)" => Ok(OneDimKind::W4),
            "W6" | "W(6,v)" => Ok(OneDimKind::W6),
            "W2l" | "W2L" | "W(2,v,l)" => Ok(OneDimKind::W2Lambda),
            "W2" | "W(2,v)" => Ok(OneDimKind::W2),
            other => Err(Error::Parse(format!("unknown one-dimensional kind {other:?}"))),
        }
    }

    /// Order of the rotation generating the linear part.
    pub fn rotation_order(self) -> u32 {
        match self {
            OneDimKind::W3 => 3,
            OneDimKind::W4 => 4,
            OneDimKind::W6 => 6,
            OneDimKind::W2Lambda | OneDimKind::W2 => 2,
        }
    }
}

impl fmt::Display for OneDimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OneDimKind::W3 => "W(3,v)",
            OneDimKind::W4 => "W(4,v)",
            OneDimKind::W6 => "W(6,v)",
            OneDimKind::W2Lambda => "W(2,v,l)",
            OneDimKind::W2 => "W(2,v)",
        })
    }
}

#[derive(Clone, Debug)]
pub struct OneDimGroup {
    pub kind: OneDimKind,
    pub v: CycloNum,
    /// Second lattice parameter, reduced into the fundamental domain.
    pub lambda: Option<CycloNum>,
    pub rotation: CycloNum,
    /// ℤ-basis of `Γ`.
    pub basis: Vec<CycloNum>,
}

pub fn one_dim(kind: OneDimKind, v: &CycloNum, lambda: Option<&CycloNum>) -> Result<OneDimGroup> {
    if v.is_zero() {
        return Err(Error::Precondition("v must be nonzero".into()));
    }
    let m = kind.rotation_order();
    let base = match kind {
        OneDimKind::W3 | OneDimKind::W6 => 3,
        OneDimKind::W4 => 4,
        _ => 1,
    };
    let mut o = num_integer::lcm(base, v.order());
    let lambda = match (kind, lambda) {
        (OneDimKind::W2Lambda, Some(l)) => {
            if l.is_real() {
                return Err(Error::Precondition("lambda must not be real".into()));
            }
            o = num_integer::lcm(o, l.order());
            Some(reduce_tau(&l.lift(o)?)?)
        }
        (OneDimKind::W2Lambda, None) => return Err(Error::Precondition("kind W(2,v,l) needs lambda".into())),
        (_, Some(_)) => return Err(Error::Precondition(format!("kind {kind} takes no lambda"))),
        (_, None) => None,
    };
    let v = v.lift(o)?;
    let second = match kind {
        OneDimKind::W3 | OneDimKind::W6 => Some(CycloNum::root_of_unity(o, 3)),
        OneDimKind::W4 => Some(CycloNum::i(o)),
        OneDimKind::W2Lambda => lambda.clone(),
        OneDimKind::W2 => None,
    };
    let mut basis = vec![v.clone()];
    if let Some(s) = second {
        basis.push(&s.lift(o)? * &v);
    }
    Ok(OneDimGroup { kind, v, lambda, rotation: CycloNum::root_of_unity(o, m), basis })
}

impl OneDimGroup {
    pub fn order(&self) -> u32 {
        self.v.order()
    }

    pub fn lattice(&self) -> Result<ZLattice> {
        let st = RealStructure::new(1, self.order());
        ZLattice::from_cvecs(&st, &self.basis.iter().map(|z| CVec(vec![z.clone()])).collect::<Vec<_>>())
    }

    pub fn affine_spec(&self) -> Result<AffineGroupSpec> {
        let k = closure(&[CMat::diag(std::slice::from_ref(&self.rotation))], 64)?;
        semidirect(&k, &self.lattice()?)
    }

    /// Reflections `(u, t)` with `t = Σ a_k b_k`, `|a_k| ≤ radius`.
    pub fn reflections(&self, radius: i64) -> Vec<(CycloNum, CycloNum)> {
        let m = self.kind.rotation_order();
        let mut out = Vec::new();
        let width = (2 * radius + 1) as usize;
        let total = width.pow(self.basis.len() as u32);
        for l in 1..m {
            let u = self.rotation.pow(l);
            for code in 0..total {
                let mut c = code;
                let mut t = CycloNum::zero(self.order());
                for b in &self.basis {
                    let a = (c % width) as i64 - radius;
                    c /= width;
                    t = &t + &b.scale(&a.into());
                }
                out.push((u.clone(), t));
            }
        }
        out
    }
}

/// A mirror point with the order of a reflection through it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MirrorEntry {
    pub point: CycloNum,
    pub order: u32,
}

/// Mirror points `t/(1−u)` of the reflections from a coefficient box, deduplicated.
pub fn one_dim_mirrors(g: &OneDimGroup, radius: i64) -> Result<Vec<MirrorEntry>> {
    if radius <= 0 {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    let one = CycloNum::one(g.order());
    let mut set = BTreeSet::new();
    for (u, t) in g.reflections(radius) {
        let order = u.multiplicative_order(64).expect("root of unity");
        let point = &t / &(&one - &u);
        set.insert(MirrorEntry { point, order });
    }
    Ok(set.into_iter().collect())
}

/// Distinct reflection orders occurring in the group.
pub fn reflection_orders(g: &OneDimGroup) -> BTreeSet<u32> {
    (1..g.kind.rotation_order())
        .filter_map(|l| g.rotation.pow(l).multiplicative_order(64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn c(order: u32, s: &str) -> CycloNum {
        crate::cyclotomic::parse_scalar(order, s).unwrap()
    }

    #[test]
    fn translations_compose_additively() {
        let a = AffineElement::translation(CVec::from_ints(&[1, 2], 4));
        let b = AffineElement::translation(CVec::from_ints(&[3, -1], 4));
        assert_eq!(a.compose(&b).unwrap(), AffineElement::translation(CVec::from_ints(&[4, 1], 4)));
    }

    #[test]
    fn half_turn_mirror() {
        let r = AffineElement::new(CMat::diag(&[c(2, "-1")]), CVec(vec![c(2, "3")])).unwrap();
        let info = is_affine_reflection(&r).unwrap().unwrap();
        assert_eq!(info.mirror_point, CVec(vec![CycloNum::from_rational(Rational::new(3, 2), 2)]));
        assert_eq!(r.apply(&info.mirror_point), info.mirror_point);
        let t = AffineElement::translation(CVec(vec![c(2, "1")]));
        assert!(is_affine_reflection(&t).unwrap().is_none());
    }

    #[test]
    fn weight_lattice_is_not_root_lattice() {
        let w = complexify_weyl(&[vec![2, -1], vec![-1, 2]], 100).unwrap();
        assert_eq!(w.det_s, 3);
        assert!(!is_crystallographic(&w.spec));
        assert_eq!(is_r_group(&w.spec).unwrap(), Verdict::True);
        assert_eq!(complexify_weyl(&[vec![2, -1], vec![-3, 2]], 100).unwrap().det_s, 1);
        assert!(complexify_weyl(&[vec![2, -2], vec![-2, 2]], 100).is_err());
    }

    #[test]
    fn one_dim_kinds() {
        let one = CycloNum::one(1);
        let w2 = one_dim(OneDimKind::W2, &one, None).unwrap();
        assert!(!is_crystallographic(&w2.affine_spec().unwrap()));
        let mirrors = one_dim_mirrors(&w2, 2).unwrap();
        assert!(mirrors.iter().all(|m| m.order == 2));
        assert!(mirrors.iter().any(|m| m.point == CycloNum::from_rational(Rational::new(1, 2), 1)));
        let w6 = one_dim(OneDimKind::W6, &one, None).unwrap();
        assert_eq!(reflection_orders(&w6), BTreeSet::from([2, 3, 6]));
        assert!(is_crystallographic(&w6.affine_spec().unwrap()));
        let l = one_dim(OneDimKind::W2Lambda, &c(4, "1"), Some(&c(4, "1+2i"))).unwrap();
        assert_eq!(l.lambda, Some(c(4, "2i")));
        assert_eq!(reflection_orders(&l), BTreeSet::from([2]));
    }
}
