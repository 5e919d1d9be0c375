use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crysref::affine::{
    is_crystallographic, is_r_group, one_dim, one_dim_mirrors, rank_of_translations, reflection_orders, semidirect,
    OneDimKind, Verdict,
};
use crysref::catalog::{get_group, list_groups, scalar_from_json, GroupSpec};
use crysref::cohomology::{
    cocycle_well_defined, h1_root_lattice, is_coboundary, lamb_allows, lamb_constraints, valid_classes, Cocycle,
    Presentation,
};
use crysref::cyclotomic::parse_scalar;
use crysref::graph::{build_graph, det_s_from_graph, CYCLE_BOUND};
use crysref::group::{default_cap, is_essential, is_irreducible};
use crysref::lattice_theory::{
    admissible, build_lattices_s_n_plus_1, build_root_lattices_case1, build_root_lattices_case2, dual_star,
    is_invariant, operator_s, ring_name, root_lattices, root_sublattice, star_components, ReflectionSystem,
};
use crysref::zmodule::{modular_reduce, ZLattice};
use crysref::{CVec, CycloNum, Error};

/// Exact computations for affine complex reflection groups.
#[derive(Parser, Debug)]
#[command(name = "crysref", version)]
struct Cli {
    /// Also write a machine-readable report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Closure cap; defaults to CRYSREF_CAP or 1000000.
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Target {
    /// Spec file path or catalog name such as "G(4,2,3)".
    target: String,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Group graph: node orders, edge weights, cycle weights.
    Graph(Target),
    /// det S from the matrix and from the graph.
    Dets(Target),
    /// Root lattices built from the generating system.
    RootLattices {
        #[command(flatten)]
        t: Target,
        /// Comma-separated generators of the base lattice in C.
        #[arg(long)]
        delta: Option<String>,
    },
    /// The dual lattice and its star components.
    Dual(Target),
    /// Lattices between a root lattice and its dual for s = n + 1.
    Intermediate(Target),
    /// H^1 of root lattices by Smith normal form of S.
    H1(Target),
    /// Checks the cocycle c(r_{n+1}) = lambda e_{n+1}.
    CocycleCheck {
        #[command(flatten)]
        t: Target,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Which of the candidate lattices to use.
        #[arg(long, default_value_t = 0)]
        lattice_index: usize,
    },
    /// Scans lambda in (1/D)-grids and groups valid cocycles into classes.
    Classes {
        #[command(flatten)]
        t: Target,
        #[arg(long)]
        denominator: Option<u32>,
    },
    /// Full pipeline report.
    Classify {
        /// Spec file or catalog name; omit with --all.
        target: Option<String>,
        /// Run every catalog entry in catalog order.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        denominator: Option<u32>,
    },
    /// One-dimensional groups and their mirrors.
    OneDim {
        /// W2, W2l, W3, W4 or W6.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Coefficient box for translations.
        #[arg(long, default_value_t = 2)]
        radius: i64,
    },
    /// Lists catalog entries, or prints one entry as a spec file.
    Catalog { name: Option<String> },
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Lib(Error::Parse(_) | Error::UnknownGroup(_) | Error::BadRelator(_)) => 1,
            CliError::Lib(Error::CapExceeded(_) | Error::OrderCapExceeded(_)) => 3,
            CliError::Lib(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "{m}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Default)]
struct Report {
    text: Vec<String>,
    json: Map<String, Value>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn set(&mut self, k: &str, v: Value) {
        self.json.insert(k.to_string(), v);
    }
}

struct Input {
    spec: GroupSpec,
    extras: Value,
}

fn load(target: &str) -> CliResult<Input> {
    let path = Path::new(target);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{target}: {e}")))?;
        let extras: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{target}: invalid JSON: {e}")))?;
        let spec = GroupSpec::from_json(&extras)?;
        return Ok(Input { spec, extras });
    }
    Ok(Input { spec: get_group(target)?, extras: Value::Null })
}

fn system(spec: &GroupSpec, cap: usize) -> CliResult<ReflectionSystem> {
    if !spec.closure_feasible {
        return Err(Error::Precondition(format!("{} is listed as metadata only", spec.name)).into());
    }
    Ok(ReflectionSystem::new(spec.reflections()?, cap)?)
}

fn cvec_text(v: &CVec) -> Vec<String> {
    v.0.iter().map(ToString::to_string).collect()
}

fn lattice_json(l: &ZLattice) -> Value {
    json!({
        "rank": l.rank(),
        "basis": l.basis_cvecs().iter().map(cvec_text).collect::<Vec<_>>(),
    })
}

fn lattice_lines(r: &mut Report, l: &ZLattice, indent: &str) {
    r.line(format!("{indent}rank {}", l.rank()));
    for v in l.basis_cvecs() {
        r.line(format!("{indent}  ({})", cvec_text(&v).join(", ")));
    }
}

fn scalar_line_json(l: &ZLattice) -> Value {
    json!(l.basis_cvecs().iter().map(|v| v.0[0].to_string()).collect::<Vec<_>>())
}

/// Lattice from the spec file, if it lists one.
fn input_lattice(inp: &Input, sys: &ReflectionSystem) -> CliResult<Option<ZLattice>> {
    let Some(rows) = inp.extras.get("lattice") else {
        return Ok(None);
    };
    let rows = rows.as_array().ok_or_else(|| CliError::Input("lattice must be a list of vectors".into()))?;
    let mut vs = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| CliError::Input("lattice vector must be a list".into()))?;
        let v: Vec<CycloNum> =
            row.iter().map(|x| scalar_from_json(sys.order(), x)).collect::<crysref::Result<_>>()?;
        if v.len() != sys.n() {
            return Err(Error::DimensionMismatch(v.len(), sys.n()).into());
        }
        vs.push(CVec(v));
    }
    Ok(Some(ZLattice::from_cvecs(&sys.structure, &vs)?))
}

fn extra_str(inp: &Input, key: &str) -> Option<String> {
    match inp.extras.get(key)? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Lattices the lattice-level subcommands work on: the spec file's lattice, or
/// the builder output for `s = n` and `s = n + 1`.
fn working_lattices(inp: &Input, sys: &ReflectionSystem, cap: usize) -> CliResult<Vec<ZLattice>> {
    if let Some(l) = input_lattice(inp, sys)? {
        return Ok(vec![l]);
    }
    if sys.s() == sys.n() {
        Ok(root_lattices(sys)?)
    } else if sys.s() == sys.n() + 1 {
        Ok(build_lattices_s_n_plus_1(sys, cap)?.into_iter().flat_map(|b| b.lattices).collect())
    } else {
        Err(Error::Precondition(format!("{} generators in dimension {} are not supported", sys.s(), sys.n())).into())
    }
}

fn parse_list(order: u32, text: &str) -> CliResult<Vec<CycloNum>> {
    Ok(text.split(',').map(|t| parse_scalar(order, t)).collect::<crysref::Result<_>>()?)
}

fn header(r: &mut Report, spec: &GroupSpec, sys: &ReflectionSystem) {
    r.line(format!("group {}", spec.name));
    r.line(format!("  dimension {}, field Q(zeta_{}), {} generators, order {}", sys.n(), sys.order(), sys.s(), sys.group.order()));
    r.set("group", json!(spec.name));
    r.set("dim", json!(sys.n()));
    r.set("field_order", json!(sys.order()));
    r.set("generators", json!(sys.s()));
    r.set("order", json!(sys.group.order()));
}

fn cmd_graph(t: &Target, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    let g = build_graph(&sys.line_system()?, CYCLE_BOUND)?;
    for (j, m) in g.nodes.iter().enumerate() {
        r.line(format!("  node {} order {}", j + 1, m));
    }
    for (a, b, c) in &g.edges {
        r.line(format!("  edge {}-{} c = {}", a + 1, b + 1, c));
    }
    for (cyc, c) in &g.cycles {
        let ids: Vec<String> = cyc.iter().map(|j| (j + 1).to_string()).collect();
        r.line(format!("  cycle {} c = {}", ids.join("-"), c));
    }
    r.line(format!("  chain {}", g.is_chain()));
    r.set("graph", g.to_json());
    r.set("chain", json!(g.is_chain()));
    Ok(r)
}

fn dets_into(r: &mut Report, sys: &ReflectionSystem) -> CliResult<()> {
    let s = operator_s(sys)?;
    let g = build_graph(&sys.line_system()?, sys.n().max(3))?;
    let from_graph = det_s_from_graph(&g)?;
    r.line(format!("  det S (matrix) = {}", s.det));
    r.line(format!("  det S (graph)  = {}", from_graph));
    r.line(format!("  agree {}", s.det == from_graph));
    let abs2 = s.det.norm_sq_rational().map(|q| q.to_string()).unwrap_or_else(|| s.det.norm_sq().to_string());
    r.line(format!("  |det S|^2 = {abs2}"));
    r.set(
        "det_s",
        json!({"matrix": s.det.to_string(), "graph": from_graph.to_string(), "agree": s.det == from_graph, "abs_sq": abs2}),
    );
    Ok(())
}

fn cmd_dets(t: &Target, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    dets_into(&mut r, &sys)?;
    Ok(r)
}

fn cmd_root_lattices(t: &Target, delta: Option<&str>, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    if sys.s() == sys.n() + 1 {
        return intermediate_into(r, &sys, cap);
    }
    let delta = match delta.map(str::to_string).or_else(|| extra_str(&inp, "delta")) {
        Some(d) => Some(parse_list(sys.order(), &d)?),
        None => None,
    };
    let (method, lattices) = match &delta {
        None => ("default", root_lattices(&sys)?),
        Some(d) => match build_root_lattices_case1(&sys, d) {
            Ok(b) => ("path", vec![b.lattice]),
            Err(Error::PathConditionViolated(_)) => {
                ("chain", build_root_lattices_case2(&sys, Some(d))?.into_iter().map(|b| b.lattice).collect())
            }
            Err(e) => return Err(e.into()),
        },
    };
    r.line(format!("  method {method}, {} lattice(s)", lattices.len()));
    let mut out = Vec::new();
    for (k, l) in lattices.iter().enumerate() {
        r.line(format!("  lattice {}", k + 1));
        lattice_lines(&mut r, l, "    ");
        let inv = is_invariant(l, &sys.group)?;
        r.line(format!("    invariant {inv}"));
        let mut j = lattice_json(l);
        j["invariant"] = json!(inv);
        out.push(j);
    }
    r.set("method", json!(method));
    r.set("lattices", json!(out));
    Ok(r)
}

fn cmd_dual(t: &Target, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    let mut out = Vec::new();
    for (k, l) in working_lattices(&inp, &sys, cap)?.iter().enumerate() {
        let star = dual_star(l, &sys)?;
        let idx = star.index(l)?.map(|x| x.to_string()).unwrap_or_else(|| "infinite".into());
        r.line(format!("  lattice {}: [dual : lattice] = {idx}", k + 1));
        lattice_lines(&mut r, &star, "    ");
        let comps = star_components(l, &sys)?;
        let ranks: Vec<usize> = comps.iter().map(ZLattice::rank).collect();
        r.line(format!("    star component ranks {ranks:?}"));
        out.push(json!({"lattice": lattice_json(l), "dual": lattice_json(&star), "index": idx, "star_component_ranks": ranks}));
    }
    r.set("duals", json!(out));
    Ok(r)
}

fn intermediate_into(mut r: Report, sys: &ReflectionSystem, cap: usize) -> CliResult<Report> {
    let builds = build_lattices_s_n_plus_1(sys, cap)?;
    let mut out = Vec::new();
    for (k, b) in builds.iter().enumerate() {
        let idx = b.dual.index(&b.base)?.map(|x| x.to_string()).unwrap_or_else(|| "infinite".into());
        r.line(format!("  base lattice {} ([dual : base] = {idx}), {} invariant lattice(s)", k + 1, b.lattices.len()));
        let mut ls = Vec::new();
        for (i, l) in b.lattices.iter().enumerate() {
            r.line(format!("    lattice {}", i + 1));
            lattice_lines(&mut r, l, "      ");
            ls.push(lattice_json(l));
        }
        out.push(json!({"base": lattice_json(&b.base), "dual": lattice_json(&b.dual), "index": idx, "lattices": ls}));
    }
    r.set("intermediate", json!(out));
    Ok(r)
}

fn cmd_intermediate(t: &Target, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    intermediate_into(r, &sys, cap)
}

fn cmd_h1(t: &Target, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    let mut out = Vec::new();
    for (k, l) in working_lattices(&inp, &sys, cap)?.iter().enumerate() {
        let h = h1_root_lattice(&sys, l)?;
        let f: Vec<String> = h.invariant_factors.iter().map(ToString::to_string).collect();
        let shape = if f.is_empty() { "trivial".to_string() } else { f.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ") };
        r.line(format!("  lattice {}: H1 = {shape} (order {})", k + 1, h.order));
        out.push(json!({"invariant_factors": f, "order": h.order.to_string()}));
    }
    r.set("h1", json!(out));
    Ok(r)
}

fn pick_lattice(inp: &Input, sys: &ReflectionSystem, index: usize, cap: usize) -> CliResult<ZLattice> {
    let mut ls = working_lattices(inp, sys, cap)?;
    if index >= ls.len() {
        return Err(Error::IndexOutOfRange(index).into());
    }
    Ok(ls.swap_remove(index))
}

fn cmd_cocycle_check(t: &Target, lambda: Option<&str>, index: usize, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    let text = lambda
        .map(str::to_string)
        .or_else(|| extra_str(&inp, "lambda"))
        .ok_or_else(|| CliError::Input("cocycle-check needs --lambda or a lambda field".into()))?;
    let lam = parse_scalar(sys.order(), &text)?;
    let gamma = pick_lattice(&inp, &sys, index, cap)?;
    let c = Cocycle::last_root(&sys, &lam)?;
    let allowed = lamb_constraints(&sys, &gamma, cap)?;
    let passes = lamb_allows(&allowed, &lam)?;
    match &allowed {
        None => r.line("  necessary condition: none"),
        Some(a) => r.line(format!("  necessary condition: lambda in Z-span of {:?}", scalar_line_json(a))),
    }
    r.line(format!("  lambda = {lam}: necessary condition {}", if passes { "holds" } else { "fails" }));
    let collide = cocycle_well_defined(&sys, &c, &gamma, None)?;
    r.line(format!("  well-defined (closure) {collide}"));
    let mut j = json!({
        "lambda": lam.to_string(),
        "lattice": lattice_json(&gamma),
        "constraint": allowed.as_ref().map(scalar_line_json),
        "constraint_holds": passes,
        "well_defined_closure": collide,
    });
    if let Some(p) = &inp.spec.presentation {
        let pres = Presentation::parse(&sys, p)?;
        let by_rel = cocycle_well_defined(&sys, &c, &gamma, Some(&pres))?;
        r.line(format!("  well-defined (relators) {by_rel}"));
        j["well_defined_relators"] = json!(by_rel);
    }
    let cob = is_coboundary(&sys, &c, &gamma)?;
    r.line(format!("  coboundary {cob}"));
    j["coboundary"] = json!(cob);
    r.set("cocycle", j);
    Ok(r)
}

fn classes_into(r: &mut Report, sys: &ReflectionSystem, lattices: &[ZLattice], d: u32) -> CliResult<Value> {
    let mut out = Vec::new();
    for (k, gamma) in lattices.iter().enumerate() {
        let scan = valid_classes(sys, gamma, d)?;
        let wd: Vec<String> = scan.well_defined.iter().map(ToString::to_string).collect();
        let cl: Vec<String> = scan.classes.iter().map(ToString::to_string).collect();
        r.line(format!(
            "  lattice {}: {} candidates, well-defined {:?}, classes {:?}",
            k + 1,
            scan.candidates,
            wd,
            cl
        ));
        out.push(json!({
            "lattice": lattice_json(gamma),
            "denominator": d,
            "candidates": scan.candidates,
            "well_defined": wd,
            "classes": cl,
            "non_semidirect": scan.classes.len() > 1,
        }));
    }
    r.line("  note: classes are distinguished modulo coboundaries only; normalizer orbits are not fused");
    Ok(json!(out))
}

fn cmd_classes(t: &Target, denominator: Option<u32>, cap: usize) -> CliResult<Report> {
    let inp = load(&t.target)?;
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    let d = denominator.or_else(|| extra_str(&inp, "denominator").and_then(|s| s.parse().ok())).unwrap_or(2);
    let lattices = working_lattices(&inp, &sys, cap)?;
    let v = classes_into(&mut r, &sys, &lattices, d)?;
    r.set("classes", v);
    Ok(r)
}

fn classify_one(inp: &Input, denominator: u32, cap: usize) -> CliResult<Report> {
    let sys = system(&inp.spec, cap)?;
    let mut r = Report::default();
    header(&mut r, &inp.spec, &sys);
    let ess = is_essential(&sys.group);
    let irr = is_irreducible(&sys.group);
    r.line(format!("  essential {ess}, irreducible {irr}"));
    r.set("essential", json!(ess));
    r.set("irreducible", json!(irr));
    let g = build_graph(&sys.line_system()?, CYCLE_BOUND)?;
    r.line(format!("  graph: {} edge(s), {} oriented cycle(s), chain {}", g.edges.len(), g.cycles.len(), g.is_chain()));
    r.set("graph", g.to_json());
    let adm = admissible(&sys)?;
    let ring = ring_name(&adm.ring);
    r.line(format!("  admissible {}, ring of cyclic products {ring}", adm.admissible));
    r.set("admissible", json!(adm.admissible));
    r.set("ring", json!(ring));
    if !adm.admissible {
        let bad: Vec<String> = adm.failures.iter().map(ToString::to_string).collect();
        r.line(format!("  cyclic products outside an imaginary quadratic ring: {bad:?}"));
        r.line("  no crystallographic group has this linear part");
        r.set("failures", json!(bad));
        return Ok(r);
    }
    let mut entries = Vec::new();
    if sys.s() == sys.n() {
        dets_into(&mut r, &sys)?;
        for (k, l) in root_lattices(&sys)?.iter().enumerate() {
            let h = h1_root_lattice(&sys, l)?;
            let spec = semidirect(&sys.group, l)?;
            let rg = is_r_group(&spec)?;
            let cry = is_crystallographic(&spec);
            let f: Vec<String> = h.invariant_factors.iter().map(ToString::to_string).collect();
            r.line(format!("  lattice {}: rank {}, H1 factors {:?}", k + 1, l.rank(), f));
            r.line(format!("    semidirect product: r-group {rg}, crystallographic {cry}"));
            entries.push(json!({
                "lattice": lattice_json(l), "h1": f, "r_group": rg.to_string(), "crystallographic": cry,
                "translation_rank": rank_of_translations(&spec),
            }));
        }
        r.line("  every extension is split (s = n)");
        r.set("non_semidirect", json!(false));
    } else if sys.s() == sys.n() + 1 {
        let lattices: Vec<ZLattice> =
            build_lattices_s_n_plus_1(&sys, cap)?.into_iter().flat_map(|b| b.lattices).collect();
        let mut any = false;
        for (k, l) in lattices.iter().enumerate() {
            let spec = semidirect(&sys.group, l)?;
            let is_root = root_sublattice(l, &sys).map(|x| x == *l).unwrap_or(false);
            let rg = is_r_group(&spec)?;
            r.line(format!("  lattice {}: rank {}, root lattice {is_root}", k + 1, l.rank()));
            r.line(format!("    semidirect product: r-group {rg}, crystallographic {}", is_crystallographic(&spec)));
            let scan = valid_classes(&sys, l, denominator)?;
            let cl: Vec<String> = scan.classes.iter().map(ToString::to_string).collect();
            r.line(format!("    cocycle classes (D = {denominator}): {cl:?}"));
            let extra = scan.classes.len() > 1;
            any |= extra;
            let non_split_verdict = if extra && is_root { Verdict::True } else if extra { Verdict::Undecided } else { Verdict::False };
            if extra {
                r.line(format!("    non-semidirect r-group {non_split_verdict}"));
            }
            entries.push(json!({
                "lattice": lattice_json(l), "root_lattice": is_root, "r_group": rg.to_string(),
                "crystallographic": is_crystallographic(&spec), "classes": cl, "non_semidirect": extra,
            }));
        }
        r.line(format!("  non-semidirect extension found {any}"));
        r.line("  note: classes are distinguished modulo coboundaries only; normalizer orbits are not fused");
        r.set("non_semidirect", json!(any));
    } else {
        r.line("  lattice construction needs s = n or s = n + 1 generators");
    }
    r.set("lattices", json!(entries));
    Ok(r)
}

fn cmd_classify(target: Option<&str>, all: bool, denominator: Option<u32>, cap: usize) -> CliResult<Report> {
    let d = denominator.unwrap_or(2);
    match (target, all) {
        (Some(t), false) => {
            let inp = load(t)?;
            let d = denominator.or_else(|| extra_str(&inp, "denominator").and_then(|s| s.parse().ok())).unwrap_or(2);
            classify_one(&inp, d, cap)
        }
        (None, true) => {
            let mut r = Report::default();
            let mut out = Vec::new();
            for name in list_groups() {
                let spec = get_group(&name)?;
                if !spec.closure_feasible {
                    r.line(format!("group {name}: metadata only, skipped"));
                    out.push(json!({"group": name, "skipped": true}));
                    continue;
                }
                match classify_one(&Input { spec, extras: Value::Null }, d, cap) {
                    Ok(one) => {
                        r.text.extend(one.text);
                        out.push(Value::Object(one.json));
                    }
                    Err(e) => {
                        r.line(format!("group {name}: {e}"));
                        out.push(json!({"group": name, "error": e.to_string()}));
                    }
                }
            }
            r.set("groups", json!(out));
            Ok(r)
        }
        _ => Err(CliError::Input("give either a target or --all".into())),
    }
}

fn needed_order(base: u32, texts: &[&str]) -> u32 {
    let mut o = base;
    for t in texts {
        if t.contains('i') {
            o = num_integer::lcm(o, 4);
        }
        if t.contains('w') {
            o = num_integer::lcm(o, 3);
        }
    }
    o
}

fn cmd_one_dim(kind: &str, v: &str, lambda: Option<&str>, radius: i64) -> CliResult<Report> {
    let kind = OneDimKind::parse(kind)?;
    let base = match kind {
        OneDimKind::W3 | OneDimKind::W6 => 3,
        OneDimKind::W4 => 4,
        _ => 1,
    };
    let mut texts = vec![v];
    texts.extend(lambda);
    let o = needed_order(base, &texts);
    let v = parse_scalar(o, v)?;
    let lam = lambda.map(|l| parse_scalar(o, l)).transpose()?;
    let g = one_dim(kind, &v, lam.as_ref())?;
    let spec = g.affine_spec()?;
    let mut r = Report::default();
    r.line(format!("group {kind}"));
    r.set("kind", json!(kind.to_string()));
    if let (Some(raw), Some(red)) = (&lam, &g.lambda) {
        let p = modular_reduce(&CycloNum::one(o), raw)?;
        r.line(format!("  lambda {raw} reduced to {red} ({p})"));
        r.set("lambda", json!({"input": raw.to_string(), "reduced": red.to_string(), "point": p.to_string()}));
    }
    let basis: Vec<String> = g.basis.iter().map(ToString::to_string).collect();
    let rank = rank_of_translations(&spec);
    let cry = is_crystallographic(&spec);
    let orders: Vec<u32> = reflection_orders(&g).into_iter().collect();
    r.line(format!("  translations {basis:?}, rank {rank}, crystallographic {cry}"));
    r.line(format!("  reflection orders {orders:?}"));
    let mirrors = one_dim_mirrors(&g, radius)?;
    r.line(format!("  mirrors within coefficient box {radius}:"));
    for m in &mirrors {
        r.line(format!("    {}  order {}", m.point, m.order));
    }
    r.set("translations", json!(basis));
    r.set("rank", json!(rank));
    r.set("crystallographic", json!(cry));
    r.set("reflection_orders", json!(orders));
    r.set(
        "mirrors",
        json!(mirrors.iter().map(|m| json!({"point": m.point.to_string(), "order": m.order})).collect::<Vec<_>>()),
    );
    Ok(r)
}

fn cmd_catalog(name: Option<&str>) -> CliResult<Report> {
    let mut r = Report::default();
    match name {
        Some(n) => {
            let spec = get_group(n)?;
            let j = spec.to_json();
            r.line(serde_json::to_string_pretty(&j).expect("serializable"));
            r.set("spec", j);
        }
        None => {
            let mut out = Vec::new();
            for n in list_groups() {
                let spec = get_group(&n)?;
                let note = if spec.closure_feasible { "" } else { " (metadata only)" };
                r.line(format!("{n}: dim {}, Q(zeta_{}), {} generators{note}", spec.dim, spec.field_order, spec.generators.len()));
                out.push(json!({"name": n, "dim": spec.dim, "field_order": spec.field_order, "generators": spec.generators.len(), "closure_feasible": spec.closure_feasible}));
            }
            r.set("groups", json!(out));
        }
    }
    Ok(r)
}

fn run(cli: &Cli) -> CliResult<Report> {
    let cap = cli.cap.unwrap_or_else(default_cap);
    match &cli.cmd {
        Cmd::Graph(t) => cmd_graph(t, cap),
        Cmd::Dets(t) => cmd_dets(t, cap),
        Cmd::RootLattices { t, delta } => cmd_root_lattices(t, delta.as_deref(), cap),
        Cmd::Dual(t) => cmd_dual(t, cap),
        Cmd::Intermediate(t) => cmd_intermediate(t, cap),
        Cmd::H1(t) => cmd_h1(t, cap),
        Cmd::CocycleCheck { t, lambda, lattice_index } => cmd_cocycle_check(t, lambda.as_deref(), *lattice_index, cap),
        Cmd::Classes { t, denominator } => cmd_classes(t, *denominator, cap),
        Cmd::Classify { target, all, denominator } => cmd_classify(target.as_deref(), *all, *denominator, cap),
        Cmd::OneDim { kind, v, lambda, radius } => cmd_one_dim(kind, v, lambda.as_deref(), *radius),
        Cmd::Catalog { name } => cmd_catalog(name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            for l in &report.text {
                if writeln!(out, "{l}").is_err() {
                    break;
                }
            }
            if let Some(path) = &cli.json {
                let text = serde_json::to_string_pretty(&Value::Object(report.json)).expect("serializable");
                if let Err(e) = std::fs::write(path, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
