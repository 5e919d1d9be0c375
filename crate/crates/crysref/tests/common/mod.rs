//! Shared fixtures and randomized suites for the integration tests.
#![allow(dead_code)]

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use crysref::affine::AffineElement;
use crysref::catalog::get_group;
use crysref::cohomology::{
    cocycle_well_defined, evaluate_word, h1_root_lattice, is_coboundary, word_matrix, Cocycle, Word,
};
use crysref::cyclotomic::euler_phi;
use crysref::graph::{cyclic_product, LineSystem};
use crysref::group::{reflections_of, DEFAULT_CAP};
use crysref::lattice_theory::{
    dual_star, dual_star_via_s, operator_s, root_component, root_lattices, root_sublattice,
    root_sublattice_all_lines, star_components, star_components_direct, ReflectionSystem,
};
use crysref::zmodule::{modular_reduce, reduce_tau, ZLattice};
use crysref::{CMat, CVec, CycloNum, Rational, Reflection};

pub const CASES: u32 = 200;

/// Groups used by the randomized suites: small enough to close quickly, and
/// covering the real, Eisenstein, Gaussian and mixed fields.
pub const FIXTURE_GROUPS: [&str; 10] =
    ["A2", "A3", "B3", "G2", "G(3,1,3)", "G(3,3,3)", "G(4,4,3)", "G(6,6,3)", "G(4,1,2)", "K4"];

pub struct Fixture {
    pub name: &'static str,
    pub sys: ReflectionSystem,
    pub roots: Vec<ZLattice>,
    /// Every reflection of the group, as a line system.
    pub all_lines: LineSystem,
}

pub fn system(name: &str) -> ReflectionSystem {
    ReflectionSystem::new(get_group(name).unwrap().reflections().unwrap(), DEFAULT_CAP).unwrap()
}

pub fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        FIXTURE_GROUPS
            .iter()
            .map(|&name| {
                let sys = system(name);
                let roots = root_lattices(&sys).unwrap();
                let refl: Vec<Reflection> = reflections_of(&sys.group).into_iter().map(|r| r.reflection).collect();
                let all_lines = LineSystem::from_reflections(&refl).unwrap();
                Fixture { name, sys, roots, all_lines }
            })
            .collect()
    })
}

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn ok<T>(r: crysref::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// Field element from small power-basis coefficients; `one` if they all vanish.
pub fn scalar_from(order: u32, coeffs: &[i64]) -> CycloNum {
    let phi = euler_phi(order);
    let terms: Vec<(i64, Rational)> =
        coeffs.iter().take(phi).enumerate().map(|(k, &c)| (k as i64, Rational::from_int(c))).collect();
    let z = CycloNum::from_terms(order, &terms);
    if z.is_zero() {
        CycloNum::one(order)
    } else {
        z
    }
}

pub fn vector_from(order: u32, dim: usize, coeffs: &[Vec<i64>]) -> CVec {
    let phi = euler_phi(order);
    CVec(
        (0..dim)
            .map(|j| {
                let terms: Vec<(i64, Rational)> = coeffs[j % coeffs.len()]
                    .iter()
                    .take(phi)
                    .enumerate()
                    .map(|(k, &c)| (k as i64, Rational::from_int(c)))
                    .collect();
                CycloNum::from_terms(order, &terms)
            })
            .collect(),
    )
}

fn small_coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 4)
}

fn small_vector() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(small_coeffs(), 4)
}

/// `ℤ`-span of the orbits of `v` and `ζv`: an invariant lattice of full rational span.
pub fn orbit_lattice(sys: &ReflectionSystem, v: &CVec) -> ZLattice {
    let zeta = CycloNum::zeta_pow(sys.order(), 1);
    let w = v.scale(&zeta);
    let mut vs = Vec::with_capacity(2 * sys.group.elements.len());
    for g in &sys.group.elements {
        vs.push(g.mul_vec(v));
        vs.push(g.mul_vec(&w));
    }
    ZLattice::from_cvecs(&sys.structure, &vs).unwrap()
}

fn permutation(keys: &[u32], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&i| (keys[i % keys.len()], i));
    idx
}

/// Cyclic products are unchanged by a unitary map applied to all roots and by
/// rescaling each root.
pub fn cyclic_product_invariance(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    let strategy = (
        0..fx.len(),
        prop::collection::vec(any::<u32>(), 4),
        prop::collection::vec(0i64..24, 4),
        any::<prop::sample::Index>(),
        prop::collection::vec(small_coeffs(), 4),
        prop::collection::vec(prop::collection::vec(0usize..8, 1..=5), 1..=3),
    );
    run(cases, strategy, |(f, keys, exps, elem, scales, tuples)| {
        let sys = &fx[f].sys;
        let (n, o) = (sys.n(), sys.order());
        let perm = permutation(&keys, n);
        let mut u = CMat::zeros(n, n, o);
        let mut rows = u.row_vecs();
        for (r, &c) in perm.iter().enumerate() {
            rows[r][c] = CycloNum::zeta_pow(o, exps[r % exps.len()]);
        }
        u = ok(CMat::from_rows(rows))?;
        let g = &sys.group.elements[elem.index(sys.group.elements.len())];
        let u = u.mul(g);
        let moved: Vec<Reflection> = sys
            .gens
            .iter()
            .enumerate()
            .map(|(j, r)| {
                let mu = scalar_from(o, &scales[j % scales.len()]);
                Reflection::new(u.mul_vec(&r.root).scale(&mu), r.theta.clone(), r.order)
            })
            .collect::<crysref::Result<_>>()
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let a = ok(sys.line_system())?;
        let b = ok(LineSystem::from_reflections(&moved))?;
        for t in &tuples {
            let idx: Vec<usize> = t.iter().map(|&j| j % sys.s()).collect();
            prop_assert_eq!(ok(cyclic_product(&a, &idx))?, ok(cyclic_product(&b, &idx))?, "{:?}", idx);
        }
        Ok(())
    })
}

/// Rotation invariance, `c_σ c_{σ⁻¹} = Π c_{j_l j_{l+1}}`, and the factorization
/// at a repeated index.
pub fn cyclic_product_identities(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    let strategy = (
        0..fx.len(),
        prop::collection::vec(any::<prop::sample::Index>(), 2..=5),
        any::<prop::sample::Index>(),
        prop::collection::vec(any::<prop::sample::Index>(), 0..=2),
        any::<prop::sample::Index>(),
        prop::collection::vec(any::<prop::sample::Index>(), 0..=2),
        prop::collection::vec(any::<prop::sample::Index>(), 0..=2),
    );
    run(cases, strategy, |(f, cyc, rot, a, l, b, c)| {
        let ls = &fx[f].all_lines;
        let pick = |v: &[prop::sample::Index]| -> Vec<usize> { v.iter().map(|i| i.index(ls.len())).collect() };
        let cp = |idx: &[usize]| ok(cyclic_product(ls, idx));
        let sigma = pick(&cyc);
        let mut rotated = sigma.clone();
        rotated.rotate_left(rot.index(sigma.len()));
        prop_assert_eq!(cp(&sigma)?, cp(&rotated)?);
        let reversed: Vec<usize> = sigma.iter().rev().copied().collect();
        let mut pairs = CycloNum::one(ls.order());
        for k in 0..sigma.len() {
            pairs = &pairs * &cp(&[sigma[k], sigma[(k + 1) % sigma.len()]])?;
        }
        prop_assert_eq!(&cp(&sigma)? * &cp(&reversed)?, pairs);
        let (a, l, b, c) = (pick(&a), l.index(ls.len()), pick(&b), pick(&c));
        let mut full = a.clone();
        full.push(l);
        full.extend(&b);
        full.push(l);
        full.extend(&c);
        let mut outer = a.clone();
        outer.push(l);
        outer.extend(&c);
        let mut inner = vec![l];
        inner.extend(&b);
        prop_assert_eq!(cp(&full)?, &cp(&outer)? * &cp(&inner)?);
        Ok(())
    })
}

fn scaled_root_lattice() -> impl Strategy<Value = (usize, prop::sample::Index, Vec<i64>)> {
    (0..fixtures().len(), any::<prop::sample::Index>(), small_coeffs())
}

/// `Λ* = S⁻¹Λ` agrees with the constraint solver on scaled root lattices.
pub fn dual_via_s_matches_solver(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    run(cases, scaled_root_lattice(), |(f, k, mu)| {
        let fx = &fx[f];
        let lam = ok(fx.roots[k.index(fx.roots.len())].scale(&scalar_from(fx.sys.order(), &mu)))?;
        prop_assert_eq!(ok(dual_star(&lam, &fx.sys))?, ok(dual_star_via_s(&lam, &fx.sys))?, "{}", fx.name);
        Ok(())
    })
}

/// `[Λ*:Λ]` is `|det S|` for lattices of rank `n` and `|det S|²` for rank `2n`.
pub fn dual_index_matches_det(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    run(cases, scaled_root_lattice(), |(f, k, mu)| {
        let fx = &fx[f];
        let lam = ok(fx.roots[k.index(fx.roots.len())].scale(&scalar_from(fx.sys.order(), &mu)))?;
        let idx = ok(ok(dual_star(&lam, &fx.sys))?.index(&lam))?;
        let det = ok(operator_s(&fx.sys))?.det;
        let abs2 = det.norm_sq_rational().expect("rational norm");
        let expect = if lam.rank() == fx.sys.n() {
            det.as_rational().expect("real determinant").abs()
        } else {
            prop_assert_eq!(lam.rank(), 2 * fx.sys.n());
            abs2
        };
        prop_assert_eq!(idx.map(Rational::from), Some(expect), "{}", fx.name);
        Ok(())
    })
}

fn orbit_case() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (0..fixtures().len(), small_vector()).prop_filter("nonzero vector", |(_, v)| v.iter().flatten().any(|&c| c != 0))
}

fn orbit_lattice_of(f: usize, v: &[Vec<i64>]) -> Option<(&'static Fixture, ZLattice)> {
    let fx = &fixtures()[f];
    let v = vector_from(fx.sys.order(), fx.sys.n(), v);
    if v.is_zero() {
        return None;
    }
    Some((fx, orbit_lattice(&fx.sys, &v)))
}

/// `Γ⁰` over the generating roots equals the sum over every root line.
pub fn root_sublattice_generators_vs_all_lines(cases: u32) -> Result<(), String> {
    run(cases, orbit_case(), |(f, v)| {
        let Some((fx, gamma)) = orbit_lattice_of(f, &v) else { return Ok(()) };
        prop_assert_eq!(
            ok(root_sublattice(&gamma, &fx.sys))?,
            ok(root_sublattice_all_lines(&gamma, &fx.sys.group))?,
            "{}",
            fx.name
        );
        Ok(())
    })
}

/// The intersection formula for `Γ*_j` agrees with the direct computation.
pub fn star_formula_vs_direct(cases: u32) -> Result<(), String> {
    run(cases, orbit_case(), |(f, v)| {
        let Some((fx, gamma)) = orbit_lattice_of(f, &v) else { return Ok(()) };
        prop_assert_eq!(ok(star_components(&gamma, &fx.sys))?, ok(star_components_direct(&gamma, &fx.sys))?);
        Ok(())
    })
}

/// On every edge with `|c_{kj}| = 1`: `Γ_k = (I−R_k)Γ_j` and `Γ_j = (I−R_j)Γ_k`.
pub fn unit_edge_equalities(cases: u32) -> Result<(), String> {
    run(cases, orbit_case(), |(f, v)| {
        let Some((fx, gamma)) = orbit_lattice_of(f, &v) else { return Ok(()) };
        let sys = &fx.sys;
        let comps: Vec<ZLattice> =
            sys.gens.iter().map(|r| root_component(&gamma, &r.root)).collect::<crysref::Result<_>>().unwrap();
        for j in 0..sys.s() {
            for k in j + 1..sys.s() {
                let c = ok(sys.pair_product(k, j))?;
                if !c.norm_sq_rational().is_some_and(|x| x == Rational::from_int(1)) {
                    continue;
                }
                prop_assert_eq!(&comps[k], &ok(comps[j].apply(&sys.i_minus(k)))?, "{} edge {}-{}", fx.name, j, k);
                prop_assert_eq!(&comps[j], &ok(comps[k].apply(&sys.i_minus(j)))?, "{} edge {}-{}", fx.name, j, k);
            }
        }
        Ok(())
    })
}

fn word_strategy() -> impl Strategy<Value = Vec<(prop::sample::Index, bool)>> {
    prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 0..=6)
}

fn word_of(sys: &ReflectionSystem, w: &[(prop::sample::Index, bool)]) -> Word {
    Word(w.iter().map(|(i, inv)| (i.index(sys.s()), if *inv { -1 } else { 1 })).collect())
}

fn cocycle_of(sys: &ReflectionSystem, vals: &[Vec<Vec<i64>>]) -> Cocycle {
    Cocycle { values: (0..sys.s()).map(|j| vector_from(sys.order(), sys.n(), &vals[j % vals.len()])).collect() }
}

/// `c(uv) = c(u) + Lin(u)·c(v)` for arbitrary values on the generators.
pub fn cocycle_law(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    let strategy = (0..fx.len(), prop::collection::vec(small_vector(), 1..=3), word_strategy(), word_strategy());
    run(cases, strategy, |(f, vals, u, v)| {
        let sys = &fx[f].sys;
        let c = cocycle_of(sys, &vals);
        let (u, v) = (word_of(sys, &u), word_of(sys, &v));
        let lhs = ok(evaluate_word(&c, sys, &u.concat(&v)))?;
        let rhs = ok(evaluate_word(&c, sys, &u))?.add(&ok(word_matrix(sys, &u))?.mul_vec(&ok(evaluate_word(&c, sys, &v))?));
        prop_assert_eq!(lhs, rhs);
        Ok(())
    })
}

/// `c(w^k) = (I + M + ⋯ + M^{k−1})c(w)`.
pub fn cocycle_power(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    let strategy = (0..fx.len(), prop::collection::vec(small_vector(), 1..=3), word_strategy(), 0i64..5);
    run(cases, strategy, |(f, vals, w, k)| {
        let sys = &fx[f].sys;
        let c = cocycle_of(sys, &vals);
        let w = word_of(sys, &w);
        let m = ok(word_matrix(sys, &w))?;
        let cw = ok(evaluate_word(&c, sys, &w))?;
        let mut expect = CVec::zeros(sys.n(), sys.order());
        let mut p = CMat::identity(sys.n(), sys.order());
        for _ in 0..k {
            expect = expect.add(&p.mul_vec(&cw));
            p = p.mul(&m);
        }
        prop_assert_eq!(ok(evaluate_word(&c, sys, &w.pow(k)))?, expect);
        Ok(())
    })
}

/// `|H¹| = [Λ*:Λ]` on scaled root lattices.
pub fn h1_order_is_dual_index(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    run(cases, scaled_root_lattice(), |(f, k, mu)| {
        let fx = &fx[f];
        let lam = ok(fx.roots[k.index(fx.roots.len())].scale(&scalar_from(fx.sys.order(), &mu)))?;
        let h = ok(h1_root_lattice(&fx.sys, &lam))?;
        prop_assert_eq!(Some(h.order), ok(ok(dual_star(&lam, &fx.sys))?.index(&lam))?);
        Ok(())
    })
}

/// Coboundaries are well-defined cocycles and are recognized as coboundaries.
pub fn coboundaries_are_well_defined(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    run(cases, (0..fx.len(), small_vector(), any::<bool>()), |(f, v, halve)| {
        let fx = &fx[f];
        let sys = &fx.sys;
        let mut v = vector_from(sys.order(), sys.n(), &v);
        if halve {
            v = v.scale_q(&Rational::new(1, 2));
        }
        let c = Cocycle::coboundary(sys, &v);
        let lam = &fx.roots[0];
        prop_assert!(ok(cocycle_well_defined(sys, &c, lam, None))?);
        prop_assert!(ok(is_coboundary(sys, &c, lam))?);
        Ok(())
    })
}

fn affine_of(sys: &ReflectionSystem, g: prop::sample::Index, t: &[Vec<i64>]) -> AffineElement {
    let m = sys.group.elements[g.index(sys.group.elements.len())].clone();
    AffineElement::new(m, vector_from(sys.order(), sys.n(), t)).unwrap()
}

/// Composition of affine maps is associative and inverses cancel.
pub fn affine_group_law(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    let el = || (any::<prop::sample::Index>(), small_vector());
    run(cases, (0..fx.len(), el(), el(), el()), |(f, a, b, c)| {
        let sys = &fx[f].sys;
        let (a, b, c) = (affine_of(sys, a.0, &a.1), affine_of(sys, b.0, &b.1), affine_of(sys, c.0, &c.1));
        let left = ok(ok(a.compose(&b))?.compose(&c))?;
        let right = ok(a.compose(&ok(b.compose(&c))?))?;
        prop_assert_eq!(left, right);
        prop_assert!(ok(a.compose(&ok(a.inverse())?))?.is_identity());
        Ok(())
    })
}

/// `(R, (I−R)x)` is an affine reflection whose mirror point is fixed and lies
/// on the mirror through `x`.
pub fn mirror_point_fixed(cases: u32) -> Result<(), String> {
    let fx = fixtures();
    run(cases, (0..fx.len(), any::<prop::sample::Index>(), small_vector()), |(f, j, x)| {
        let sys = &fx[f].sys;
        let r = &sys.gens[j.index(sys.s())];
        let x = vector_from(sys.order(), sys.n(), &x);
        let a = ok(AffineElement::new(r.matrix(), r.apply_i_minus(&x)))?;
        let info = ok(crysref::affine::is_affine_reflection(&a))?;
        prop_assert!(info.is_some());
        let p = info.unwrap().mirror_point;
        prop_assert_eq!(a.apply(&p), p.clone());
        prop_assert_eq!(a.apply(&x), x);
        Ok(())
    })
}

/// Reduction into the fundamental domain is idempotent and invariant under
/// similarity and change of basis.
pub fn modular_reduction(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::sample::select(vec![3u32, 4]),
        -6i64..=6,
        1i64..=6,
        prop::collection::vec(-3i64..=3, 2),
        (-3i64..=3, -3i64..=3, -3i64..=3),
    );
    run(cases, strategy, |(o, re, im, mu, (a, b, c))| {
        let gen = if o == 4 { CycloNum::i(o) } else { CycloNum::zeta_pow(o, 1) };
        let tau = &CycloNum::from_int(re, o) + &gen.scale(&Rational::from_int(im));
        let once = ok(reduce_tau(&tau))?;
        prop_assert_eq!(ok(reduce_tau(&once))?, once.clone());
        let one = CycloNum::one(o);
        let p = ok(modular_reduce(&one, &tau))?;
        prop_assert!(p.in_fundamental_domain());
        prop_assert_eq!(&ok(modular_reduce(&one, &once))?, &p);
        let mu = scalar_from(o, &mu);
        prop_assert_eq!(&ok(modular_reduce(&mu, &(&mu * &tau)))?, &p);
        // unimodular basis change [[1, a],[b, 1 + ab]] composed with a shift by c
        let alpha = &one + &tau.scale(&Rational::from_int(a));
        let beta = &(&one.scale(&Rational::from_int(b)) + &tau.scale(&Rational::from_int(1 + a * b)))
            + &alpha.scale(&Rational::from_int(c));
        prop_assert_eq!(&ok(modular_reduce(&alpha, &beta))?, &p);
        Ok(())
    })
}
