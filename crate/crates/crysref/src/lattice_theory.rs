//! Invariant lattices of finite reflection groups: root sublattices, the dual
//! `Γ*`, the operator `S`, the root-lattice builders, similarity and the
//! admissibility test.

use std::collections::VecDeque;

use num_bigint::BigInt;

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::graph::{self, build_graph, cyclic_product, LineSystem};
use crate::group::{closure, is_irreducible, mirrors_of, ring_closure, trace_ring, MatrixGroup, TraceRing};
use crate::linalg::{inner, CMat, CVec, Reflection};
use crate::rational::Rational;
use crate::zmodule::{enumerate_between, preimage, RealStructure, ZLattice, QUOTIENT_BOUND};

/// Default box radius for the similarity search.
pub const SIMILARITY_RADIUS: i64 = 3;
/// Default number of candidates tried by the similarity search.
pub const SIMILARITY_BUDGET: usize = 100_000;

/// A generating system of reflections together with the group it generates.
#[derive(Clone, Debug)]
pub struct ReflectionSystem {
    pub group: MatrixGroup,
    pub gens: Vec<Reflection>,
    pub structure: RealStructure,
}

impl ReflectionSystem {
    pub fn new(gens: Vec<Reflection>, cap: usize) -> Result<Self> {
        let Some(dim) = gens.first().map(Reflection::dim) else {
            return Err(Error::Precondition("no generating reflections".into()));
        };
        let order = gens.iter().map(|r| r.root.order()).fold(1, num_integer::lcm);
        let gens: Vec<Reflection> = gens
            .into_iter()
            .map(|r| Reflection::new(r.root.lift(order)?, r.theta.lift(order)?, r.order))
            .collect::<Result<_>>()?;
        let structure = RealStructure::new(dim, order);
        let mats: Vec<CMat> = gens.iter().map(Reflection::matrix).collect();
        let group = closure(&mats, cap)?;
        Ok(ReflectionSystem { group, gens, structure })
    }

    /// Number of generators `s`.
    pub fn s(&self) -> usize {
        self.gens.len()
    }

    /// Complex dimension `n`.
    pub fn n(&self) -> usize {
        self.structure.dim
    }

    pub fn order(&self) -> u32 {
        self.structure.order
    }

    /// The system formed by the first `k` generators.
    pub fn prefix(&self, k: usize, cap: usize) -> Result<Self> {
        Self::new(self.gens[..k].to_vec(), cap)
    }

    pub fn line_system(&self) -> Result<LineSystem> {
        LineSystem::from_reflections(&self.gens)
    }

    /// `I − R_j`.
    pub fn i_minus(&self, j: usize) -> CMat {
        CMat::identity(self.n(), self.order()).sub(&self.gens[j].matrix())
    }

    /// `c_{jk}` with the actual eigenvalues of the generators.
    pub fn pair_product(&self, j: usize, k: usize) -> Result<CycloNum> {
        cyclic_product(&self.line_system()?, &[j, k])
    }
}

/// `Γ_ℓ = Γ ∩ ℂe`.
pub fn root_component(gamma: &ZLattice, e: &CVec) -> Result<ZLattice> {
    gamma.intersect_with_complex_line(e)
}

/// True iff every group generator maps `Γ` into itself.
pub fn is_invariant(gamma: &ZLattice, g: &MatrixGroup) -> Result<bool> {
    for p in &g.generators {
        if !gamma.is_stable_under(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn require_invariant(gamma: &ZLattice, sys: &ReflectionSystem) -> Result<()> {
    if is_invariant(gamma, &sys.group)? {
        Ok(())
    } else {
        Err(Error::NotInvariant)
    }
}

/// `Γ⁰ = Γ₁ + ⋯ + Γ_s` over the generating roots.
pub fn root_sublattice(gamma: &ZLattice, sys: &ReflectionSystem) -> Result<ZLattice> {
    require_invariant(gamma, sys)?;
    let mut acc = ZLattice::zero(&gamma.structure);
    for r in &sys.gens {
        acc = acc.sum(&root_component(gamma, &r.root)?)?;
    }
    Ok(acc)
}

/// `Σ_ℓ Γ ∩ ℓ` over every root line of the group.
pub fn root_sublattice_all_lines(gamma: &ZLattice, g: &MatrixGroup) -> Result<ZLattice> {
    let mut acc = ZLattice::zero(&gamma.structure);
    for m in mirrors_of(g) {
        acc = acc.sum(&root_component(gamma, &m.mirror)?)?;
    }
    Ok(acc)
}

/// `S = (I−R₁) + ⋯ + (I−R_n)`.
#[derive(Clone, Debug)]
pub struct OperatorS {
    /// Matrix in the root basis: entry `(j,k) = (1−μ_j)⟨e_k|e_j⟩/⟨e_j|e_j⟩`.
    pub matrix: CMat,
    /// The same operator in standard coordinates.
    pub ambient: CMat,
    pub det: CycloNum,
}

impl OperatorS {
    /// True iff `|det S|² ∈ ℤ` and `2·Re Tr S ∈ ℤ`.
    pub fn integrality(&self) -> bool {
        let n = self.det.norm_sq_rational();
        let t = self.matrix.trace().twice_re().as_rational();
        matches!((n, t), (Some(a), Some(b)) if a.is_integer() && b.is_integer())
    }
}

pub fn operator_s(sys: &ReflectionSystem) -> Result<OperatorS> {
    operator_s_from_reflections(&sys.gens)
}

/// `S` computed from the generating reflections alone, without the group closure.
pub fn operator_s_from_reflections(gens: &[Reflection]) -> Result<OperatorS> {
    let Some(n) = gens.first().map(Reflection::dim) else {
        return Err(Error::Precondition("no generating reflections".into()));
    };
    if gens.len() != n {
        return Err(Error::WrongGeneratorCount { expected: n, found: gens.len() });
    }
    let o = gens.iter().map(|r| r.root.order()).fold(1, num_integer::lcm);
    let gens: Vec<Reflection> = gens
        .iter()
        .map(|r| Reflection::new(r.root.lift(o)?, r.theta.lift(o)?, r.order))
        .collect::<Result<_>>()?;
    let mut ambient = CMat::zeros(n, n, o);
    for r in &gens {
        ambient = ambient.add(&CMat::identity(n, o).sub(&r.matrix()));
    }
    let mut rows = Vec::with_capacity(n);
    for rj in &gens {
        let f = &(&CycloNum::one(o) - &rj.theta) / &rj.norm();
        rows.push(gens.iter().map(|rk| &f * &inner(&rk.root, &rj.root).expect("dim")).collect());
    }
    let matrix = CMat::from_rows(rows)?;
    let det = matrix.determinant();
    if det.is_zero() {
        return Err(Error::SingularS);
    }
    Ok(OperatorS { matrix, ambient, det })
}

/// `Γ* = {v : (I−R_j)v ∈ Γ for every generator}`, by the constraint solver.
///
/// For a lattice of less than full rank the solution is taken inside its
/// rational span.
pub fn dual_star(gamma: &ZLattice, sys: &ReflectionSystem) -> Result<ZLattice> {
    require_invariant(gamma, sys)?;
    let st = gamma.structure;
    let ops: Vec<(CMat, &ZLattice)> = (0..sys.s()).map(|j| (sys.i_minus(j), gamma)).collect();
    if gamma.rank() == st.real_dim() {
        preimage(&st, None, &ops)
    } else {
        let span = gamma.rational_span();
        preimage(&st, Some(&span), &ops)
    }
}

/// `Λ* = S⁻¹Λ`, valid for root lattices of systems with `s = n`.
pub fn dual_star_via_s(lambda: &ZLattice, sys: &ReflectionSystem) -> Result<ZLattice> {
    let s = operator_s(sys)?;
    lambda.apply(&s.ambient.inverse()?)
}

/// Star components `Γ*_j = ⋂_{k : c_{jk} ≠ 0} c_{jk}⁻¹(I−R_j)Γ_k`, with `c_{jj} = (1−θ_j)²`.
pub fn star_components(gamma: &ZLattice, sys: &ReflectionSystem) -> Result<Vec<ZLattice>> {
    let comps: Vec<ZLattice> =
        sys.gens.iter().map(|r| root_component(gamma, &r.root)).collect::<Result<_>>()?;
    let o = sys.order();
    let mut out = Vec::with_capacity(sys.s());
    for j in 0..sys.s() {
        let imj = sys.i_minus(j);
        let mut acc: Option<ZLattice> = None;
        for (k, gk) in comps.iter().enumerate() {
            let c = if k == j {
                let f = &CycloNum::one(o) - &sys.gens[j].theta;
                &f * &f
            } else {
                sys.pair_product(j, k)?
            };
            if c.is_zero() {
                continue;
            }
            let part = gk.apply(&imj)?.scale(&c.inv()?)?;
            acc = Some(match acc {
                None => part,
                Some(a) => a.intersect(&part)?,
            });
        }
        out.push(acc.expect("diagonal term"));
    }
    Ok(out)
}

/// `Γ* ∩ ℓ_j` computed from the full dual.
pub fn star_components_direct(gamma: &ZLattice, sys: &ReflectionSystem) -> Result<Vec<ZLattice>> {
    let star = dual_star(gamma, sys)?;
    sys.gens.iter().map(|r| root_component(&star, &r.root)).collect()
}

/// A rank-`r` lattice in `ℂ` given by generators.
fn scalar_lattice(order: u32, gens: &[CycloNum]) -> Result<ZLattice> {
    let st = RealStructure::new(1, order);
    let vs: Vec<CVec> = gens.iter().map(|z| Ok(CVec(vec![z.lift(order)?]))).collect::<Result<_>>()?;
    ZLattice::from_cvecs(&st, &vs)
}

fn scalars_of(delta: &ZLattice) -> Vec<CycloNum> {
    delta.basis_cvecs().into_iter().map(|v| v.0[0].clone()).collect()
}

fn ring_stable(delta: &ZLattice, ring: &TraceRing) -> Result<bool> {
    for z in ring.basis() {
        if !delta.is_stable_under_scalar(&z)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A lattice built by one of the root-lattice algorithms, with its pieces.
#[derive(Clone, Debug)]
pub struct RootLatticeBuild {
    pub lattice: ZLattice,
    /// `Λ_l` per generator.
    pub components: Vec<ZLattice>,
}

/// Spanning tree over edges with `|c_{jk}| = 1`, rooted at node 0.
fn unit_edge_tree(sys: &ReflectionSystem) -> Result<Vec<Option<usize>>> {
    let n = sys.s();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(j) = queue.pop_front() {
        for k in 0..n {
            if seen[k] {
                continue;
            }
            let c = sys.pair_product(j, k)?;
            if c.norm_sq_rational().is_some_and(|x| x.is_one()) {
                seen[k] = true;
                parent[k] = Some(j);
                queue.push_back(k);
            }
        }
    }
    if let Some(bad) = seen.iter().position(|s| !s) {
        return Err(Error::PathConditionViolated(bad));
    }
    Ok(parent)
}

/// Propagates `Λ_{j₁}` along a path: `Λ_{j_r} = (I−R_{j_r})⋯(I−R_{j₂})Λ_{j₁}`.
pub fn propagate_along(sys: &ReflectionSystem, start: &ZLattice, path: &[usize]) -> Result<ZLattice> {
    let mut cur = start.clone();
    for &j in path.iter().skip(1) {
        cur = cur.apply(&sys.i_minus(j))?;
    }
    Ok(cur)
}

/// Case 1: every node is reached from node 1 through edges of weight of modulus one.
///
/// `delta` lists generators of `Δ ⊂ ℂ`; the result is `Σ Λ_l` with `Λ₁ = Δe₁`.
pub fn build_root_lattices_case1(sys: &ReflectionSystem, delta: &[CycloNum]) -> Result<RootLatticeBuild> {
    let parent = unit_edge_tree(sys)?;
    let o = sys.order();
    let dl = scalar_lattice(o, delta)?;
    let ring = trace_ring(&sys.group)?;
    if !ring_stable(&dl, &ring)? {
        return Err(Error::DeltaNotStable);
    }
    let st = sys.structure;
    let e1 = &sys.gens[0].root;
    let lambda1 = ZLattice::span_over(&st, &[(scalars_of(&dl), e1.clone())])?;
    let n = sys.s();
    let mut comps: Vec<Option<ZLattice>> = vec![None; n];
    comps[0] = Some(lambda1);
    // parents come before children in BFS order, so repeat until filled
    while comps.iter().any(Option::is_none) {
        for j in 0..n {
            if comps[j].is_some() {
                continue;
            }
            let p = parent[j].expect("tree");
            if let Some(lp) = comps[p].clone() {
                comps[j] = Some(lp.apply(&sys.i_minus(j))?);
            }
        }
    }
    let components: Vec<ZLattice> = comps.into_iter().map(|c| c.expect("filled")).collect();
    let mut lattice = ZLattice::zero(&st);
    for c in &components {
        lattice = lattice.sum(c)?;
    }
    Ok(RootLatticeBuild { lattice, components })
}

/// Case 2: the graph is a chain `1 − 2 − ⋯ − n`.
///
/// Enumerates towers `Δ_{l−1} ⊆ Δ_l ⊆ c_{l−1,l}⁻¹Δ_{l−1}` of `ℤ[Tr K]`-stable
/// lattices starting from `Δ₁` (default `ℤ[Tr K]`) and returns
/// `Σ Δ_l·(I−R_l)⋯(I−R₂)e₁` for each tower.
pub fn build_root_lattices_case2(
    sys: &ReflectionSystem,
    delta1: Option<&[CycloNum]>,
) -> Result<Vec<RootLatticeBuild>> {
    let ring = trace_ring(&sys.group)?;
    case2_over(sys, delta1, &ring)
}

/// Case 2 with every `Δ_l` required to be stable under `ring`.
fn case2_over(sys: &ReflectionSystem, delta1: Option<&[CycloNum]>, ring: &TraceRing) -> Result<Vec<RootLatticeBuild>> {
    let g = build_graph(&sys.line_system()?, graph::CYCLE_BOUND)?;
    if !g.is_chain() {
        return Err(Error::ChainConditionViolated);
    }
    let o = sys.order();
    let ring = ring.clone();
    let d1 = match delta1 {
        Some(d) => scalar_lattice(o, d)?,
        None => scalar_lattice(o, &ring.basis())?,
    };
    if !ring_stable(&d1, &ring)? {
        return Err(Error::DeltaNotStable);
    }
    let n = sys.s();
    // u_l = (I−R_l)⋯(I−R₂)e₁
    let mut dirs = vec![sys.gens[0].root.clone()];
    for l in 1..n {
        let next = sys.i_minus(l).mul_vec(&dirs[l - 1]);
        dirs.push(next);
    }
    let mut towers: Vec<Vec<ZLattice>> = vec![vec![d1]];
    for l in 1..n {
        let c = sys.pair_product(l - 1, l)?;
        let mut next = Vec::new();
        for t in &towers {
            let prev = t.last().expect("nonempty");
            let upper = prev.scale(&c.inv()?)?;
            let upper = upper.sum(prev)?;
            let mids = enumerate_between(prev, &upper, QUOTIENT_BOUND, |d| ring_stable(d, &ring).unwrap_or(false))?;
            for m in mids {
                if !upper.contains_lattice(&m)? {
                    continue;
                }
                let mut t2 = t.clone();
                t2.push(m);
                next.push(t2);
            }
        }
        towers = next;
    }
    let st = sys.structure;
    towers
        .into_iter()
        .map(|t| {
            let components: Vec<ZLattice> = t
                .iter()
                .zip(&dirs)
                .map(|(d, u)| ZLattice::span_over(&st, &[(scalars_of(d), u.clone())]))
                .collect::<Result<_>>()?;
            let mut lattice = ZLattice::zero(&st);
            for c in &components {
                lattice = lattice.sum(c)?;
            }
            Ok(RootLatticeBuild { lattice, components })
        })
        .collect()
}

/// Root lattices of a system with `s = n`, via Case 1 when its path condition
/// holds and Case 2 otherwise; `Δ` defaults to `ℤ[Tr K]`.
pub fn root_lattices(sys: &ReflectionSystem) -> Result<Vec<ZLattice>> {
    root_lattices_over(sys, &trace_ring(&sys.group)?)
}

/// As [`root_lattices`], with `Δ` and every tower step stable under a larger
/// ring, such as the trace ring of a group containing this system.
pub fn root_lattices_over(sys: &ReflectionSystem, ring: &TraceRing) -> Result<Vec<ZLattice>> {
    match unit_edge_tree(sys) {
        Ok(_) => Ok(vec![build_root_lattices_case1(sys, &ring.basis())?.lattice]),
        Err(Error::PathConditionViolated(_)) => {
            Ok(case2_over(sys, Some(&ring.basis()), ring)?.into_iter().map(|b| b.lattice).collect())
        }
        Err(e) => Err(e),
    }
}

/// Output of the `s = n + 1` procedure.
#[derive(Clone, Debug)]
pub struct ExtendedBuild {
    /// Root lattice of the subsystem `K′` the candidates were built from.
    pub base: ZLattice,
    /// `S′⁻¹Λ`.
    pub dual: ZLattice,
    pub lattices: Vec<ZLattice>,
}

/// Invariant lattices for `s = n + 1`: intermediate lattices `Λ ⊆ Γ ⊆ Λ*` of the
/// first `n` reflections with `Γ_j = Λ_j`, kept when `R_{n+1}`-invariant.
///
/// The root lattices `Λ` of the subsystem are built over `ℤ[Tr K]` of the
/// whole group.
pub fn build_lattices_s_n_plus_1(sys: &ReflectionSystem, cap: usize) -> Result<Vec<ExtendedBuild>> {
    let n = sys.n();
    if sys.s() != n + 1 {
        return Err(Error::WrongGeneratorCount { expected: n + 1, found: sys.s() });
    }
    let sub = sys.prefix(n, cap)?;
    if !is_irreducible(&sub.group) {
        return Err(Error::SubsystemReducible);
    }
    let last = sys.gens[n].matrix();
    let mut out = Vec::new();
    let ring = trace_ring(&sys.group)?;
    for base in root_lattices_over(&sub, &ring)? {
        let dual = dual_star_via_s(&base, &sub)?;
        let comps: Vec<ZLattice> =
            sub.gens.iter().map(|r| root_component(&base, &r.root)).collect::<Result<_>>()?;
        let lattices = enumerate_between(&base, &dual, QUOTIENT_BOUND, |g| {
            let same_components = sub
                .gens
                .iter()
                .zip(&comps)
                .all(|(r, c)| root_component(g, &r.root).map(|x| &x == c).unwrap_or(false));
            same_components && g.is_stable_under(&last).unwrap_or(false)
        })?;
        out.push(ExtendedBuild { base, dual, lattices });
    }
    Ok(out)
}

/// Searches `μ` with `μΓ = Γ′`.
///
/// Candidates are `μ = w/v`, with `v` a short vector of `Γ` on the line of its
/// first basis vector and `w` running over a coefficient box in `Γ′` on that
/// line. The candidate check is exact.
pub fn lattices_similar(
    a: &ZLattice,
    b: &ZLattice,
    radius: i64,
    budget: usize,
) -> Result<Option<CycloNum>> {
    if a.structure != b.structure {
        return Err(Error::StructureMismatch);
    }
    if a.rank() != b.rank() {
        return Ok(None);
    }
    if a.rank() == 0 {
        return Ok(Some(CycloNum::one(a.structure.order)));
    }
    let line = a.basis_cvecs()[0].clone();
    let la = root_component(a, &line)?;
    let lb = root_component(b, &line)?;
    if la.rank() != lb.rank() {
        return Ok(None);
    }
    let t = line.0.iter().position(|x| !x.is_zero()).expect("nonzero");
    let fnorm = |v: &CVec| -> f64 {
        v.0.iter()
            .map(|x| {
                let (re, im) = x.to_complex_f64();
                re * re + im * im
            })
            .sum()
    };
    let short = |l: &ZLattice| -> Vec<(f64, CVec)> {
        let basis = l.basis_cvecs();
        let mut out = Vec::new();
        let k = basis.len();
        let width = (2 * radius + 1) as usize;
        let total = width.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            let mut v = CVec::zeros(l.structure.dim, l.structure.order);
            for b in &basis {
                let coef = (c % width) as i64 - radius;
                c /= width;
                if coef != 0 {
                    v = v.add(&b.scale(&CycloNum::from_int(coef, l.structure.order)));
                }
            }
            if !v.is_zero() {
                out.push((fnorm(&v), v));
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    };
    let sa = short(&la);
    let sb = short(&lb);
    let v = &sa[0].1;
    let target = sa[0].0;
    let mut tried = 0;
    for (nw, w) in &sb {
        tried += 1;
        if tried > budget {
            return Err(Error::SearchBudgetExceeded);
        }
        if *nw > sb[0].0 * (1.0 + 1e-9) + 1e-12 && tried > 64 {
            break;
        }
        let mu = &w.0[t] / &v.0[t];
        let _ = target;
        if a.scale(&mu)? == *b {
            return Ok(Some(mu));
        }
    }
    Ok(None)
}

/// Result of the admissibility test.
#[derive(Clone, Debug)]
pub struct Admissibility {
    pub admissible: bool,
    /// Cyclic products generating the ring.
    pub generators: Vec<CycloNum>,
    pub ring: TraceRing,
    /// Products failing the integrality criterion.
    pub failures: Vec<CycloNum>,
}

/// The ring generated by all cyclic products of the generating system.
pub fn cyclic_product_ring(sys: &ReflectionSystem) -> Result<(Vec<CycloNum>, TraceRing)> {
    let ls = sys.line_system()?;
    let g = build_graph(&ls, sys.s().max(3))?;
    let mut gens: Vec<CycloNum> = graph::product_table(&g).into_values().collect();
    gens.sort();
    gens.dedup();
    let ring = ring_closure(sys.order(), &gens)?;
    Ok((gens, ring))
}

/// All cyclic products are integers of one purely imaginary quadratic field.
pub fn admissible(sys: &ReflectionSystem) -> Result<Admissibility> {
    let (generators, ring) = cyclic_product_ring(sys)?;
    let failures: Vec<CycloNum> =
        generators.iter().filter(|z| !z.is_imag_quadratic_integer()).cloned().collect();
    let admissible = failures.is_empty() && ring.rank() <= 2;
    Ok(Admissibility { admissible, generators, ring, failures })
}

/// Name of a ring of rank at most two by its discriminant, e.g. `Z[i]`.
pub fn ring_name(ring: &TraceRing) -> String {
    let basis = ring.basis();
    if ring.rank() == 1 {
        return "Z".into();
    }
    if ring.rank() > 2 {
        return format!("rank-{} order", ring.rank());
    }
    // the non-rational generator z satisfies z² − tz + m = 0
    let z = basis.iter().find(|z| z.as_rational().is_none()).cloned().expect("rank two");
    let t = z.twice_re().as_rational();
    let m = z.norm_sq_rational();
    let (Some(t), Some(m)) = (t, m) else {
        return "real quadratic order".into();
    };
    let disc = &(&t * &t) - &(&Rational::from_int(4) * &m);
    match disc.to_i64() {
        Some(-4) => "Z[i]".into(),
        Some(-3) => "Z[w]".into(),
        Some(-8) => "Z[sqrt-2]".into(),
        Some(-7) => "Z[(1+sqrt-7)/2]".into(),
        Some(d) => format!("order of discriminant {d}"),
        None => "quadratic order".into(),
    }
}

/// `[big : small]` as an integer, when finite.
pub fn lattice_index(big: &ZLattice, small: &ZLattice) -> Result<Option<BigInt>> {
    big.index(small)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_group;
    use crate::group::DEFAULT_CAP;

    fn sys(name: &str) -> ReflectionSystem {
        ReflectionSystem::new(get_group(name).unwrap().reflections().unwrap(), DEFAULT_CAP).unwrap()
    }

    #[test]
    fn det_s_examples() {
        assert_eq!(operator_s(&sys("A3")).unwrap().det, CycloNum::from_int(4, 4));
        assert_eq!(operator_s(&sys("G(6,6,3)")).unwrap().det, CycloNum::one(6));
        let s = sys("G(4,4,3)");
        let op = operator_s(&s).unwrap();
        let i = CycloNum::i(4);
        let one = CycloNum::one(4);
        assert_eq!(op.matrix.get(0, 0), &CycloNum::from_int(2, 4));
        assert_eq!(op.matrix.get(0, 1), &(&one - &i));
        assert_eq!(op.matrix.get(1, 0), &(&one + &i));
        assert_eq!(op.matrix.get(0, 2), &CycloNum::from_int(-1, 4));
        assert!(op.integrality());
    }

    #[test]
    fn case1_gaussian_lattice() {
        let s = sys("G(4,4,3)");
        let i = CycloNum::i(4);
        let b = build_root_lattices_case1(&s, &[CycloNum::one(4), i.clone()]).unwrap();
        let parts: Vec<(Vec<CycloNum>, CVec)> =
            s.gens.iter().map(|r| (vec![CycloNum::one(4), i.clone()], r.root.clone())).collect();
        let expect = ZLattice::span_over(&s.structure, &parts).unwrap();
        assert_eq!(b.lattice, expect);
        assert!(is_invariant(&b.lattice, &s.group).unwrap());
        assert_eq!(root_sublattice(&b.lattice, &s).unwrap(), b.lattice);
    }

    #[test]
    fn case2_eisenstein_chain() {
        let s = sys("G(3,1,3)");
        let out = build_root_lattices_case2(&s, None).unwrap();
        assert_eq!(out.len(), 2);
        for b in &out {
            assert!(is_invariant(&b.lattice, &s.group).unwrap());
        }
        assert!(lattices_similar(&out[0].lattice, &out[1].lattice, SIMILARITY_RADIUS, SIMILARITY_BUDGET)
            .unwrap()
            .is_none());
    }

    #[test]
    fn duals_agree() {
        let s = sys("G(4,4,3)");
        let l = root_lattices(&s).unwrap().remove(0);
        let a = dual_star(&l, &s).unwrap();
        let b = dual_star_via_s(&l, &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.index(&l).unwrap(), Some(BigInt::from(4)));
        assert_eq!(star_components(&l, &s).unwrap(), star_components_direct(&l, &s).unwrap());
    }

    #[test]
    fn similarity_of_scaled_lattice() {
        let s = sys("G(4,4,3)");
        let l = root_lattices(&s).unwrap().remove(0);
        let mu = &CycloNum::one(4) + &CycloNum::i(4);
        let m = l.scale(&mu).unwrap();
        let found = lattices_similar(&l, &m, SIMILARITY_RADIUS, SIMILARITY_BUDGET).unwrap().unwrap();
        assert_eq!(l.scale(&found).unwrap(), m);
        assert!(lattices_similar(&l, &l, 2, 1000).unwrap().is_some());
    }

    #[test]
    fn admissibility_gate() {
        assert!(!admissible(&sys("G(5,5,3)")).unwrap().admissible);
        let a = admissible(&sys("G(4,4,3)")).unwrap();
        assert!(a.admissible);
        assert_eq!(ring_name(&a.ring), "Z[i]");
        assert_eq!(ring_name(&admissible(&sys("A3")).unwrap().ring), "Z");
    }

    #[test]
    fn extended_builder_g423() {
        let s = sys("G(4,2,3)");
        let out = build_lattices_s_n_plus_1(&s, DEFAULT_CAP).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].lattices.len(), 5);
        for l in &out[0].lattices {
            assert!(is_invariant(l, &s.group).unwrap());
        }
    }
}
