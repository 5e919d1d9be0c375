//! One pass/fail line per acceptance criterion, with timings.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crysref::affine::{
    is_crystallographic, one_dim, one_dim_mirrors, rank_of_translations, reflection_orders, OneDimKind,
};
use crysref::catalog::{get_group, imprimitive};
use crysref::cohomology::{
    cocycle_well_defined, h1_root_lattice, is_coboundary, lamb_allows, lamb_constraints, valid_classes, Cocycle,
    Presentation,
};
use crysref::graph::{build_graph, det_s_from_graph, LineSystem};
use crysref::group::{trace_ring, DEFAULT_CAP};
use crysref::lattice_theory::{
    admissible, build_lattices_s_n_plus_1, build_root_lattices_case1, build_root_lattices_case2,
    cyclic_product_ring, dual_star_via_s, is_invariant, lattices_similar, operator_s_from_reflections,
    propagate_along, ring_name, root_lattices, ReflectionSystem, SIMILARITY_BUDGET, SIMILARITY_RADIUS,
};
use crysref::zmodule::ZLattice;
use crysref::{CVec, CycloNum, Rational};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn lib<T>(r: crysref::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn sys(name: &str) -> Result<ReflectionSystem, String> {
    lib(ReflectionSystem::new(lib(lib(get_group(name))?.reflections())?, DEFAULT_CAP))
}

/// Both determinants of `S` from the generating reflections only.
fn dets(gens: &[crysref::Reflection]) -> Result<(CycloNum, CycloNum), String> {
    let s = lib(operator_s_from_reflections(gens))?;
    let g = lib(build_graph(&lib(LineSystem::from_reflections(gens))?, gens.len().max(3)))?;
    Ok((s.det, lib(det_s_from_graph(&g))?))
}

fn type_a_determinants() -> Outcome {
    for n in 1..=8 {
        let spec = lib(get_group(&format!("A{n}")))?;
        let (m, g) = dets(&lib(spec.reflections())?)?;
        let want = CycloNum::from_int(n as i64 + 1, m.order());
        ensure!(m == want && g == want, "A{n}: matrix {m}, graph {g}");
    }
    Ok("det S(A_n) = n+1 for n = 1..8 by matrix and graph".into())
}

fn imprimitive_determinants() -> Outcome {
    for (m, want) in [(2, 4), (3, 3), (4, 2), (6, 1)] {
        for n in 3..=5 {
            let spec = lib(imprimitive(m, m, n))?;
            let (a, b) = dets(&lib(spec.reflections())?)?;
            let want = CycloNum::from_int(want, a.order());
            ensure!(a == want && b == want, "G({m},{m},{n}): matrix {a}, graph {b}");
        }
    }
    Ok("det S(G(m,m,n)) = 4, 3, 2, 1 for m = 2, 3, 4, 6 and n = 3, 4, 5".into())
}

fn gaussian_extension(n: usize) -> Result<(), String> {
    let name = format!("G(4,2,{n})");
    let s = sys(&name)?;
    let sub = lib(s.prefix(n, DEFAULT_CAP))?;
    let base = lib(root_lattices(&sub))?;
    ensure!(base.len() == 1, "{name}: {} root lattices of the subsystem", base.len());
    let h = lib(h1_root_lattice(&sub, &base[0]))?;
    let two = num_bigint::BigInt::from(2);
    ensure!(h.invariant_factors == vec![two.clone(), two], "{name}: H1 factors {:?}", h.invariant_factors);
    let builds = lib(build_lattices_s_n_plus_1(&s, DEFAULT_CAP))?;
    let lattices: Vec<&ZLattice> = builds.iter().flat_map(|b| &b.lattices).collect();
    ensure!(lattices.len() == 5, "{name}: {} lattices", lattices.len());
    for l in &lattices {
        ensure!(lib(is_invariant(l, &s.group))?, "{name}: lattice not invariant");
    }
    // f₁ = S⁻¹e₁, f₂ = S⁻¹(i e₂), f₃ = f₁ + f₂
    let o = s.order();
    let ambient = lib(operator_s_from_reflections(&sub.gens))?.ambient;
    let inv = lib(ambient.inverse())?;
    let f1 = inv.mul_vec(&sub.gens[0].root);
    let f2 = inv.mul_vec(&sub.gens[1].root.scale(&CycloNum::i(o)));
    let f3 = f1.add(&f2);
    let last = s.i_minus(n);
    let dual = lib(dual_star_via_s(&base[0], &sub))?;
    for (k, f) in [&f1, &f2, &f3].into_iter().enumerate() {
        ensure!(dual.contains_cvec(f) && !base[0].contains_cvec(f), "{name}: f{} not in dual minus lattice", k + 1);
    }
    ensure!(!base[0].contains_cvec(&f1.sub(&f2)), "{name}: f1 - f2 in the lattice");
    ensure!(last.mul_vec(&f3).is_zero(), "{name}: (I-R) f3 is nonzero");
    ensure!(!last.mul_vec(&f1).is_zero() && !last.mul_vec(&f2).is_zero(), "{name}: f1 or f2 killed");
    for j in 0..n - 1 {
        ensure!(last.mul_vec(&sub.gens[j].root).is_zero(), "{name}: (I-R) e{} is nonzero", j + 1);
    }
    ensure!(!last.mul_vec(&sub.gens[n - 1].root).is_zero(), "{name}: (I-R) e{n} vanishes");
    Ok(())
}

fn gaussian_extensions() -> Outcome {
    gaussian_extension(3)?;
    gaussian_extension(4)?;
    Ok("G(4,2,n), n = 3, 4: H1 = Z/2 + Z/2, 5 invariant lattices, (I-R) f3 = 0".into())
}

fn eisenstein_chain() -> Outcome {
    let s = sys("G(3,1,3)")?;
    let builds = lib(build_root_lattices_case2(&s, None))?;
    ensure!(builds.len() == 2, "{} lattices", builds.len());
    let o = s.order();
    let one = CycloNum::one(o);
    let w = CycloNum::zeta_pow(o, 1);
    // i/√3 = (1 + 2ω)/3 = (1 − ω)⁻¹ up to a unit
    let third = &(&one + &w.scale(&Rational::from_int(2))) / &CycloNum::from_int(3, o);
    let span = |coef: &CycloNum| {
        let mut parts = vec![(vec![one.clone(), w.clone()], s.gens[0].root.clone())];
        for r in &s.gens[1..] {
            parts.push((vec![coef.clone(), &w * coef], r.root.clone()));
        }
        lib(ZLattice::span_over(&s.structure, &parts))
    };
    let expect: BTreeSet<Vec<Vec<Rational>>> =
        [span(&one)?, span(&third)?].iter().map(|l| l.basis_rows()).collect();
    let got: BTreeSet<Vec<Vec<Rational>>> = builds.iter().map(|b| b.lattice.basis_rows()).collect();
    ensure!(got == expect, "lattices differ from the two expected spans");
    for b in &builds {
        ensure!(lib(is_invariant(&b.lattice, &s.group))?, "lattice not invariant");
    }
    let similar =
        lib(lattices_similar(&builds[0].lattice, &builds[1].lattice, SIMILARITY_RADIUS, SIMILARITY_BUDGET))?;
    ensure!(similar.is_none(), "lattices are similar via {}", similar.unwrap());
    Ok("G(3,1,3): exactly the two expected lattices, not similar".into())
}

fn gaussian_paths() -> Outcome {
    let s = sys("G(4,4,4)")?;
    let o = s.order();
    let delta = [CycloNum::one(o), CycloNum::i(o)];
    let b = lib(build_root_lattices_case1(&s, &delta))?;
    let parts: Vec<(Vec<CycloNum>, CVec)> = s.gens.iter().map(|r| (delta.to_vec(), r.root.clone())).collect();
    let expect = lib(ZLattice::span_over(&s.structure, &parts))?;
    ensure!(b.lattice == expect, "lattice is not the [1,i]-span of the roots");
    ensure!(lib(is_invariant(&b.lattice, &s.group))?, "lattice not invariant");
    let start = &b.components[0];
    let unit = |j: usize, k: usize| {
        lib(s.pair_product(j, k)).map(|c| c.norm_sq_rational().is_some_and(|x| x == Rational::from_int(1)))
    };
    let mut checked = 0;
    for target in 1..s.s() {
        let mut paths: Vec<Vec<usize>> = Vec::new();
        // walks of length ≤ 5 from node 0 along unit edges
        let mut frontier = vec![vec![0usize]];
        for _ in 0..4 {
            let mut next = Vec::new();
            for p in &frontier {
                let last = *p.last().unwrap();
                for k in 0..s.s() {
                    if k != last && unit(last, k)? {
                        let mut q = p.clone();
                        q.push(k);
                        if k == target {
                            paths.push(q.clone());
                        }
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        ensure!(paths.len() >= 2, "fewer than two paths to node {}", target + 1);
        for p in &paths {
            let l = lib(propagate_along(&s, start, p))?;
            ensure!(l == b.components[target], "path {:?} gives a different component", p);
            checked += 1;
        }
    }
    Ok(format!("G(4,4,4): [1,i]-span lattice, {checked} unit-edge paths agree"))
}

fn k31_cocycle() -> Outcome {
    let spec = lib(get_group("K31"))?;
    let s = lib(ReflectionSystem::new(lib(spec.reflections())?, DEFAULT_CAP))?;
    ensure!(s.group.order() == 46080, "closure order {}", s.group.order());
    let i = CycloNum::i(4);
    let parts: Vec<(Vec<CycloNum>, CVec)> =
        s.gens[..4].iter().map(|r| (vec![CycloNum::one(4), i.clone()], r.root.clone())).collect();
    let gamma = lib(ZLattice::span_over(&s.structure, &parts))?;
    ensure!(lib(is_invariant(&gamma, &s.group))?, "lattice not invariant");
    let pres = lib(Presentation::parse(&s, spec.presentation.as_ref().ok_or("no presentation")?))?;
    let half = |a: i64, b: i64| CycloNum::from_terms(4, &[(0, Rational::new(a, 2)), (1, Rational::new(b, 2))]);
    let allowed = lib(lamb_constraints(&s, &gamma, DEFAULT_CAP))?;
    for a in -2..=2 {
        for b in -2..=2 {
            let want = (a - b) % 2 == 0;
            ensure!(lib(lamb_allows(&allowed, &half(a, b)))? == want, "constraint wrong at ({a}+{b}i)/2");
        }
    }
    let good = lib(Cocycle::last_root(&s, &half(1, 1)))?;
    ensure!(lib(cocycle_well_defined(&s, &good, &gamma, Some(&pres)))?, "(1+i)/2 fails the relators");
    ensure!(lib(cocycle_well_defined(&s, &good, &gamma, None))?, "(1+i)/2 fails the collision check");
    ensure!(!lib(is_coboundary(&s, &good, &gamma))?, "(1+i)/2 is a coboundary");
    let bad = lib(Cocycle::last_root(&s, &half(1, 0)))?;
    ensure!(!lib(cocycle_well_defined(&s, &bad, &gamma, Some(&pres)))?, "1/2 passes the relators");
    ensure!(!lib(cocycle_well_defined(&s, &bad, &gamma, None))?, "1/2 passes the collision check");
    Ok("K31: order 46080, lambda = (a+bi)/2 with a = b mod 2, (1+i)/2 non-split by both checks, 1/2 rejected".into())
}

fn admissibility() -> Outcome {
    let mut accepted = Vec::new();
    for m in 2..=12 {
        let s = lib(ReflectionSystem::new(lib(lib(imprimitive(m, m, 3))?.reflections())?, DEFAULT_CAP))?;
        if lib(admissible(&s))?.admissible {
            accepted.push(m);
        }
    }
    ensure!(accepted == vec![2, 3, 4, 6], "G(m,m,3) accepted for m in {accepted:?}");
    for (name, want) in [("A3", "Z"), ("G(4,4,3)", "Z[i]"), ("G(3,1,3)", "Z[w]")] {
        let got = ring_name(&lib(trace_ring(&sys(name)?.group))?);
        ensure!(got == want, "{name}: ring {got}, expected {want}");
    }
    Ok("G(m,m,3), m = 2..12: accepted exactly for 2, 3, 4, 6; rings Z, Z[i], Z[w]".into())
}

fn ring_equality() -> Outcome {
    for name in ["A3", "B3", "G(3,1,3)", "G(4,4,3)", "K4"] {
        let s = sys(name)?;
        let tr = lib(trace_ring(&s.group))?;
        let (_, cp) = lib(cyclic_product_ring(&s))?;
        ensure!(tr.module == cp.module, "{name}: trace ring {} vs {}", ring_name(&tr), ring_name(&cp));
    }
    Ok("trace ring = cyclic-product ring for A3, B3, G(3,1,3), G(4,4,3), K4".into())
}

fn property_suites() -> Outcome {
    let suites: [(&str, fn(u32) -> Result<(), String>); 7] = [
        ("cyclic-product invariance", common::cyclic_product_invariance),
        ("cyclic-product identities", common::cyclic_product_identities),
        ("dual via S vs solver", common::dual_via_s_matches_solver),
        ("root sublattice", common::root_sublattice_generators_vs_all_lines),
        ("star formula", common::star_formula_vs_direct),
        ("unit edges", common::unit_edge_equalities),
        ("dual index", common::dual_index_matches_det),
    ];
    for (name, suite) in suites {
        suite(common::CASES).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} suites x {} cases", suites.len(), common::CASES))
}

fn one_dimensional() -> Outcome {
    let one = CycloNum::one(1);
    let lam = crysref::cyclotomic::parse_scalar(4, "1+2i").map_err(|e| e.to_string())?;
    let patterns: [(OneDimKind, &[u32], usize); 5] = [
        (OneDimKind::W3, &[3], 2),
        (OneDimKind::W4, &[2, 4], 2),
        (OneDimKind::W6, &[2, 3, 6], 2),
        (OneDimKind::W2Lambda, &[2], 2),
        (OneDimKind::W2, &[2], 1),
    ];
    for (kind, orders, rank) in patterns {
        let g = lib(one_dim(kind, &one, (kind == OneDimKind::W2Lambda).then_some(&lam)))?;
        let spec = lib(g.affine_spec())?;
        let r = rank_of_translations(&spec);
        ensure!(r == rank, "{kind}: translation rank {r}");
        ensure!(is_crystallographic(&spec) == (r == 2), "{kind}: crystallographic flag");
        let got: Vec<u32> = reflection_orders(&g).into_iter().collect();
        ensure!(got == orders, "{kind}: reflection orders {got:?}");
        let mirrors = lib(one_dim_mirrors(&g, 2))?;
        let seen: BTreeSet<u32> = mirrors.iter().map(|m| m.order).collect();
        ensure!(seen.into_iter().collect::<Vec<_>>() == orders, "{kind}: mirror orders");
    }
    common::modular_reduction(common::CASES)?;
    Ok("five kinds, ranks and reflection orders as expected; reduction idempotent and invariant".into())
}

fn class_scans() -> Outcome {
    let mut counts = Vec::new();
    for name in ["G(4,2,3)", "K31", "G(6,2,3)"] {
        let s = sys(name)?;
        let lattices: Vec<ZLattice> = if name == "K31" {
            let i = CycloNum::i(4);
            let parts: Vec<(Vec<CycloNum>, CVec)> =
                s.gens[..4].iter().map(|r| (vec![CycloNum::one(4), i.clone()], r.root.clone())).collect();
            vec![lib(ZLattice::span_over(&s.structure, &parts))?]
        } else {
            lib(build_lattices_s_n_plus_1(&s, DEFAULT_CAP))?.into_iter().flat_map(|b| b.lattices).collect()
        };
        let mut per = Vec::new();
        for l in &lattices {
            per.push(lib(valid_classes(&s, l, 2))?.classes.len());
        }
        let max = per.iter().copied().max().unwrap_or(0);
        match name {
            "G(6,2,3)" => ensure!(per == vec![1], "{name}: class counts {per:?}"),
            _ => ensure!(!per.is_empty() && max <= 2, "{name}: class counts {per:?}"),
        }
        counts.push(format!("{name} {per:?}"));
    }
    Ok(format!("classes with D = 2: {}", counts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 11] = [
        ("det S of type A", type_a_determinants, Duration::from_secs(1)),
        ("det S of G(m,m,n)", imprimitive_determinants, Duration::from_secs(1)),
        ("G(4,2,n) lattices", gaussian_extensions, Duration::from_secs(10)),
        ("G(3,1,3) chain", eisenstein_chain, Duration::from_secs(5)),
        ("G(4,4,4) paths", gaussian_paths, Duration::from_secs(5)),
        ("K31 cocycle", k31_cocycle, Duration::from_secs(60)),
        ("admissibility", admissibility, Duration::from_secs(10)),
        ("ring equality", ring_equality, Duration::from_secs(30)),
        ("property suites", property_suites, Duration::from_secs(180)),
        ("one-dimensional groups", one_dimensional, Duration::from_secs(5)),
        ("class scans", class_scans, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let dt = t.elapsed();
        let (status, detail) = match result {
            Ok(d) if dt <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {dt:.2?}, limit {limit:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {}: {status} {name} ({dt:.2?}) {detail}", k + 1);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
