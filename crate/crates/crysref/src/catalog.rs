//! Built-in reflection groups: generating roots, orders, field order, optional
//! presentations, and expected values used as regression data.
//!
//! Most root systems are standard monomial or real models. Entries whose
//! coordinates had to be constructed are checked in the test suite against
//! group order, cyclic products, trace ring and `det S`.

use std::fmt;

use serde_json::{json, Value};

use crate::cyclotomic::{from_json_terms, parse_scalar, to_json_terms, CycloNum};
use crate::error::{Error, Result};
use crate::group::{closure, MatrixGroup};
use crate::linalg::{CVec, Reflection};
use crate::rational::Rational;

/// One generating reflection: root, order and eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub root: CVec,
    pub order: u32,
    pub theta: CycloNum,
}

impl GeneratorSpec {
    /// Order-`m` reflection with eigenvalue `e^{2πi/m}`.
    pub fn standard(root: CVec, order: u32) -> Self {
        let n = if order <= 2 { root.order() } else { num_integer::lcm(root.order(), order) };
        let root = root.lift(n).expect("lcm order");
        GeneratorSpec { theta: CycloNum::root_of_unity(n, order), root, order }
    }

    pub fn reflection(&self) -> Result<Reflection> {
        Reflection::new(self.root.clone(), self.theta.clone(), self.order)
    }
}

/// Where an expected value comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// Quoted from the published classification.
    Literature,
    /// Produced by an independent computation, named here.
    Computed(&'static str),
}

/// Regression values attached to an entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expected {
    pub order: Option<(usize, Source)>,
    pub det_s: Option<(CycloNum, Source)>,
    /// Name of `ℤ[Tr K]`: `"Z"`, `"Z[i]"`, `"Z[w]"`, `"Z[sqrt-2]"`, ….
    pub trace_ring: Option<(&'static str, Source)>,
    /// Number of lattices produced by the applicable builder.
    pub lattice_count: Option<(usize, Source)>,
    pub h1: Option<(Vec<u64>, Source)>,
    /// The group admits a crystallographic extension that is not a semidirect product.
    pub non_semidirect: Option<(bool, Source)>,
}

/// A reflection group in the catalog or read from a spec file.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub name: String,
    pub shephard_todd: Option<u32>,
    pub dim: usize,
    pub field_order: u32,
    pub generators: Vec<GeneratorSpec>,
    pub presentation: Option<Vec<String>>,
    pub expected: Expected,
    /// False for entries listed as metadata only.
    pub closure_feasible: bool,
    /// True when the coordinates were constructed rather than quoted.
    pub derived_roots: bool,
}

impl GroupSpec {
    pub fn reflections(&self) -> Result<Vec<Reflection>> {
        self.generators.iter().map(GeneratorSpec::reflection).collect()
    }

    pub fn group(&self, cap: usize) -> Result<MatrixGroup> {
        if !self.closure_feasible {
            return Err(Error::Precondition(format!("{} is listed as metadata only", self.name)));
        }
        let mats: Vec<_> = self.reflections()?.iter().map(Reflection::matrix).collect();
        closure(&mats, cap)
    }

    /// Serializes to the spec-file schema.
    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> = self
            .generators
            .iter()
            .map(|g| {
                json!({
                    "root": g.root.0.iter().map(to_json_terms).collect::<Vec<_>>(),
                    "order": g.order,
                    "theta": to_json_terms(&g.theta),
                })
            })
            .collect();
        let mut v = json!({
            "name": self.name,
            "field_order": self.field_order,
            "dim": self.dim,
            "generators": gens,
        });
        if let Some(p) = &self.presentation {
            v["presentation"] = json!(p);
        }
        if let Some(k) = self.shephard_todd {
            v["shephard_todd"] = json!(k);
        }
        v
    }

    /// Reads the generator part of a spec file; other keys are ignored.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(m.to_string());
        let name = v.get("name").and_then(Value::as_str).unwrap_or("unnamed").to_string();
        let order = v
            .get("field_order")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing integer field_order"))? as u32;
        if order == 0 || order > crate::cyclotomic::MAX_LIFT_ORDER {
            return Err(bad("field_order out of range"));
        }
        let gens = v.get("generators").and_then(Value::as_array).ok_or_else(|| bad("missing generators"))?;
        let mut generators = Vec::with_capacity(gens.len());
        for g in gens {
            let root = g
                .get("root")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("generator without root"))?
                .iter()
                .map(|x| scalar_from_json(order, x))
                .collect::<Result<Vec<_>>>()?;
            let m = g.get("order").and_then(Value::as_u64).ok_or_else(|| bad("generator without order"))? as u32;
            let root = CVec(root);
            let spec = match g.get("theta") {
                Some(t) => GeneratorSpec { root, order: m, theta: scalar_from_json(order, t)? },
                None => {
                    if !order.is_multiple_of(m) && !(order % 2 == 1 && (2 * order).is_multiple_of(m)) {
                        return Err(Error::Parse(format!("order {m} does not divide field order {order}")));
                    }
                    GeneratorSpec::standard(root, m)
                }
            };
            generators.push(spec);
        }
        let dim = generators.first().map_or(0, |g| g.root.dim());
        if let Some(d) = v.get("dim").and_then(Value::as_u64) {
            if d as usize != dim {
                return Err(Error::Parse(format!("dim {d} does not match root length {dim}")));
            }
        }
        let presentation = match v.get("presentation") {
            None | Some(Value::Null) => None,
            Some(p) => Some(
                p.as_array()
                    .ok_or_else(|| bad("presentation must be a list of strings"))?
                    .iter()
                    .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("relator must be a string")))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(GroupSpec {
            name,
            shephard_todd: v.get("shephard_todd").and_then(Value::as_u64).map(|k| k as u32),
            dim,
            field_order: order,
            generators,
            presentation,
            expected: Expected::default(),
            closure_feasible: true,
            derived_roots: false,
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {}, Q(zeta_{}), {} generators)", self.name, self.dim, self.field_order, self.generators.len())
    }
}

/// A scalar given either as `[[exp, "p/q"], …]` or as short text like `"(1+i)/2"`.
pub fn scalar_from_json(order: u32, v: &Value) -> Result<CycloNum> {
    match v {
        Value::String(s) => parse_scalar(order, s),
        Value::Number(n) => n
            .as_i64()
            .map(|k| CycloNum::from_int(k, order))
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}"))),
        _ => from_json_terms(order, v),
    }
}

fn s(order: u32, text: &str) -> CycloNum {
    parse_scalar(order, text).expect("catalog literal")
}

fn vec_of(order: u32, xs: &[&str]) -> CVec {
    CVec(xs.iter().map(|x| s(order, x)).collect())
}

fn eps_diff(n: usize, a: usize, b: usize, order: u32) -> CVec {
    let mut v = CVec::zeros(n, order);
    v.0[a] = CycloNum::one(order);
    v.0[b] = CycloNum::from_int(-1, order);
    v
}

fn lit<T>(x: T) -> Option<(T, Source)> {
    Some((x, Source::Literature))
}

fn computed<T>(x: T, oracle: &'static str) -> Option<(T, Source)> {
    Some((x, Source::Computed(oracle)))
}

fn base(name: &str, st: Option<u32>, order: u32, gens: Vec<GeneratorSpec>) -> GroupSpec {
    GroupSpec {
        name: name.to_string(),
        shephard_todd: st,
        dim: gens[0].root.dim(),
        field_order: order,
        generators: gens,
        presentation: None,
        expected: Expected::default(),
        closure_feasible: true,
        derived_roots: false,
    }
}

/// `√−2 = ζ₈ + ζ₈³`.
fn sqrt_minus_two() -> CycloNum {
    &CycloNum::zeta_pow(8, 1) + &CycloNum::zeta_pow(8, 3)
}

/// Weyl group of `A_n` acting essentially on `ℂⁿ`.
///
/// Roots `ε_k − ε_{k+1}` for `k < n` and `(a,…,a,a+1)` with `a = (z−1)/n`,
/// `|z|² = n+1`, so that the last root has norm 2 and meets the chain once.
pub fn type_a(n: usize) -> Result<GroupSpec> {
    let (order, a): (u32, CycloNum) = match n {
        1 => {
            let mut g = base("A1", Some(1), 4, vec![GeneratorSpec::standard(CVec::from_ints(&[1], 4), 2)]);
            g.expected = a_expected(1);
            return Ok(g);
        }
        2 => (3, s(3, "w")),
        3 => (4, s(4, "1/3")),
        4 => (4, s(4, "(1+i)/4")),
        5 => (8, (&CycloNum::one(8) + &sqrt_minus_two()).scale(&Rational::new(1, 5))),
        6 => (3, s(3, "(1+w)/3")),
        7 => (4, s(4, "(1+2i)/7")),
        8 => (4, s(4, "1/4")),
        _ => return Err(Error::UnknownGroup(format!("A{n}"))),
    };
    let mut gens: Vec<GeneratorSpec> =
        (0..n - 1).map(|k| GeneratorSpec::standard(eps_diff(n, k, k + 1, order), 2)).collect();
    let mut last = CVec(vec![a.clone(); n]);
    last.0[n - 1] = &a + &CycloNum::one(order);
    gens.push(GeneratorSpec::standard(last, 2));
    let mut g = base(&format!("A{n}"), Some(1), order, gens);
    g.expected = a_expected(n);
    g.derived_roots = n > 1;
    Ok(g)
}

fn a_expected(n: usize) -> Expected {
    let fact: usize = (1..=n + 1).product();
    Expected {
        order: computed(fact, "closure"),
        det_s: lit(CycloNum::from_int(n as i64 + 1, 4)),
        trace_ring: lit("Z"),
        h1: computed(vec![n as u64 + 1], "Smith form of the Cartan matrix"),
        ..Expected::default()
    }
}

fn field_for(m: u32) -> u32 {
    if m <= 2 {
        4
    } else {
        m
    }
}

/// Imprimitive group `G(m,p,n)` with its standard monomial roots.
pub fn imprimitive(m: u32, p: u32, n: usize) -> Result<GroupSpec> {
    let name = format!("G({m},{p},{n})");
    if m < 2 || p == 0 || !m.is_multiple_of(p) || !(2..=8).contains(&n) || m > 12 {
        return Err(Error::UnknownGroup(name));
    }
    let order = field_for(m);
    let mut gens = Vec::new();
    if p == 1 {
        gens.push(GeneratorSpec::standard(CVec::unit(n, 0, order), m));
        for k in 1..n {
            gens.push(GeneratorSpec::standard(eps_diff(n, k - 1, k, order), 2));
        }
    } else {
        gens.push(GeneratorSpec::standard(eps_diff(n, 0, 1, order), 2));
        let mut e2 = CVec::zeros(n, order);
        e2.0[0] = CycloNum::zeta_pow(order, -((order / m) as i64));
        e2.0[1] = CycloNum::from_int(-1, order);
        gens.push(GeneratorSpec::standard(e2, 2));
        for k in 2..n {
            gens.push(GeneratorSpec::standard(eps_diff(n, k - 1, k, order), 2));
        }
        if p < m {
            gens.push(GeneratorSpec::standard(CVec::unit(n, n - 1, order), m / p));
        }
    }
    let mut g = base(&name, Some(2), order, gens);
    let group_order = (m as usize).pow(n as u32) / p as usize * (1..=n).product::<usize>();
    g.expected.order = computed(group_order, "closure");
    g.expected.trace_ring = match (m, p) {
        (2, _) => lit("Z"),
        (4, 4) | (4, 2) => lit("Z[i]"),
        (3, 3) | (6, 6) | (6, 3) | (6, 2) | (3, 1) => lit("Z[w]"),
        _ => None,
    };
    if p == m {
        let det = match m {
            2 => Some(4),
            3 => Some(3),
            4 => Some(2),
            6 => Some(1),
            _ => None,
        };
        g.expected.det_s = det.and_then(|d| lit(CycloNum::from_int(d, order)));
        if m == 6 {
            g.expected.h1 = lit(vec![]);
        }
    }
    if (m, p) == (4, 2) {
        g.expected.h1 = lit(vec![2, 2]);
        g.expected.lattice_count = lit(5);
        if n == 3 {
            g.expected.non_semidirect = lit(true);
        }
    }
    if (m, p) == (6, 2) || (m, p) == (6, 3) {
        g.expected.lattice_count = lit(1);
        g.expected.non_semidirect = computed(false, "exhaustive cocycle scan");
    }
    if (m, p, n) == (3, 1, 3) {
        g.expected.lattice_count = lit(2);
    }
    Ok(g)
}

fn k4() -> GroupSpec {
    // ⟨e₁|e₂⟩ must satisfy |⟨e₁|e₂⟩|² = |e₁|²|e₂|²/3; no such pair lies in ℚ(ω)²,
    // so the roots use ℚ(ζ₁₂) ⊃ ℚ(ω, i).
    let o = 12;
    let w = CycloNum::root_of_unity(o, 3);
    let gens = vec![
        GeneratorSpec { root: CVec::from_ints(&[1, 0], o), order: 3, theta: w.clone() },
        GeneratorSpec {
            root: CVec(vec![CycloNum::one(o), &CycloNum::one(o) + &CycloNum::i(o)]),
            order: 3,
            theta: w,
        },
    ];
    let mut g = base("K4", Some(4), o, gens);
    g.derived_roots = true;
    g.expected.order = computed(24, "closure");
    g.expected.trace_ring = lit("Z[w]");
    g
}

fn k12() -> GroupSpec {
    let o = 8;
    let r = sqrt_minus_two();
    let gens = vec![
        GeneratorSpec::standard(CVec::from_ints(&[1, 0], o), 2),
        GeneratorSpec::standard(CVec::from_ints(&[1, 1], o), 2),
        GeneratorSpec::standard(CVec(vec![&CycloNum::one(o) + &r, CycloNum::one(o)]), 2),
    ];
    let mut g = base("K12", Some(12), o, gens);
    g.derived_roots = true;
    g.expected.order = computed(48, "closure");
    g.expected.trace_ring = lit("Z[sqrt-2]");
    g.expected.non_semidirect = lit(true);
    g
}

fn f4() -> GroupSpec {
    let o = 4;
    let gens = vec![
        GeneratorSpec::standard(eps_diff(4, 1, 2, o), 2),
        GeneratorSpec::standard(eps_diff(4, 2, 3, o), 2),
        GeneratorSpec::standard(CVec::unit(4, 3, o), 2),
        GeneratorSpec::standard(vec_of(o, &["1/2", "-1/2", "-1/2", "-1/2"]), 2),
    ];
    let mut g = base("K28", Some(28), o, gens);
    g.expected.order = computed(1152, "closure");
    g.expected.trace_ring = lit("Z");
    g.expected.det_s = computed(CycloNum::one(o), "Cartan determinant");
    g
}

fn k31_roots() -> Vec<GeneratorSpec> {
    let o = 4;
    [
        vec_of(o, &["-1-i", "0", "0", "0"]),
        vec_of(o, &["(-1+i)/2", "(-1+i)/2", "(-1+i)/2", "(-1+i)/2"]),
        vec_of(o, &["(1+i)/2", "(-1-i)/2", "(1-i)/2", "(1-i)/2"]),
        vec_of(o, &["0", "-1", "i", "0"]),
        vec_of(o, &["1", "-1", "0", "0"]),
    ]
    .into_iter()
    .map(|e| GeneratorSpec::standard(e, 2))
    .collect()
}

/// Relators of the five-generator presentation used for the cocycle check.
pub const K31_RELATORS: [&str; 17] = [
    "r1^2",
    "r2^2",
    "r3^2",
    "(r2 r3)^3",
    "(r3 r1)^3",
    "(r1 r2)^3",
    "(r2 r1 r3 r1)^4",
    "(r4 r5)^3",
    "r5^2",
    "(r5 r2)^2",
    "(r5 r1 r3 r1)^2",
    "(r5 r3)^4",
    "r1 (r5 r3 r2 r3) r1 (r5 r3 r2 r3)^-1",
    "r4^2",
    "(r4 r1)^2",
    "(r4 r3)^2",
    "(r4 r2)^3",
];

fn k29() -> GroupSpec {
    let mut g = base("K29", Some(29), 4, k31_roots()[..4].to_vec());
    g.derived_roots = true;
    g.expected.order = computed(7680, "closure");
    g.expected.trace_ring = lit("Z[i]");
    g
}

fn k31() -> GroupSpec {
    let mut g = base("K31", Some(31), 4, k31_roots());
    g.derived_roots = true;
    g.presentation = Some(K31_RELATORS.iter().map(|s| s.to_string()).collect());
    g.expected.order = computed(46080, "closure");
    g.expected.trace_ring = lit("Z[i]");
    g.expected.non_semidirect = lit(true);
    g
}

fn metadata_only(name: &str, st: u32, dim: usize) -> GroupSpec {
    GroupSpec {
        name: name.to_string(),
        shephard_todd: Some(st),
        dim,
        field_order: 1,
        generators: Vec::new(),
        presentation: None,
        expected: Expected::default(),
        closure_feasible: false,
        derived_roots: false,
    }
}

/// Linear part of a one-dimensional group: one reflection of order `m` on `ℂ`.
fn one_dim_linear(name: &str, m: u32) -> GroupSpec {
    let o = field_for(m);
    base(name, None, o, vec![GeneratorSpec::standard(CVec::from_ints(&[1], o), m)])
}

fn parse_imprimitive(name: &str) -> Option<(u32, u32, usize)> {
    let inner = name.strip_prefix("G(")?.strip_suffix(')')?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return None;
    }
    Some((parts[0].parse().ok()?, parts[1].parse().ok()?, parts[2].parse().ok()?))
}

/// Looks up a catalog entry by name.
pub fn get_group(name: &str) -> Result<GroupSpec> {
    let key = name.trim();
    if let Some((m, p, n)) = parse_imprimitive(key) {
        return imprimitive(m, p, n);
    }
    let rank = |prefix: &str| key.strip_prefix(prefix).and_then(|r| r.parse::<usize>().ok());
    let renamed = |mut g: GroupSpec, n: &str| {
        g.name = n.to_string();
        g
    };
    match key {
        "D3" => return imprimitive(2, 2, 3).map(|g| renamed(g, "D3")),
        "G2" => return imprimitive(6, 6, 2).map(|g| renamed(g, "G2")),
        "F4" | "K28" => return Ok(renamed(f4(), key)),
        "K4" => return Ok(k4()),
        "K12" => return Ok(k12()),
        "K29" => return Ok(k29()),
        "K31" => return Ok(k31()),
        "E6" => return Ok(metadata_only("E6", 35, 6)),
        "E7" => return Ok(metadata_only("E7", 36, 7)),
        "E8" => return Ok(metadata_only("E8", 37, 8)),
        "K32" => return Ok(metadata_only("K32", 32, 4)),
        "K33" => return Ok(metadata_only("K33", 33, 5)),
        "K34" => return Ok(metadata_only("K34", 34, 6)),
        "W(2,v)" | "W(2,v,l)" => return Ok(one_dim_linear(key, 2)),
        "W(3,v)" => return Ok(one_dim_linear(key, 3)),
        "W(4,v)" => return Ok(one_dim_linear(key, 4)),
        "W(6,v)" => return Ok(one_dim_linear(key, 6)),
        _ => {}
    }
    if let Some(n) = rank("A") {
        return type_a(n);
    }
    for prefix in ["B", "C"] {
        if let Some(n) = rank(prefix) {
            if (2..=8).contains(&n) {
                return imprimitive(2, 1, n).map(|g| renamed(g, key));
            }
        }
    }
    Err(Error::UnknownGroup(key.to_string()))
}

/// Names of all catalog entries, in catalog order.
pub fn list_groups() -> Vec<String> {
    let mut out: Vec<String> = (1..=8).map(|n| format!("A{n}")).collect();
    out.extend(["B2", "B3", "C2", "C3", "D3"].map(String::from));
    for m in [2u32, 3, 4, 6] {
        for p in (1..=m).filter(|p| m % p == 0) {
            for n in 2..=4usize {
                if (m, p, n) == (2, 2, 2) {
                    continue;
                }
                out.push(format!("G({m},{p},{n})"));
            }
        }
    }
    out.push("G(5,5,3)".into());
    out.extend(["G2", "F4", "K4", "K12", "K28", "K29", "K31"].map(String::from));
    out.extend(["E6", "E7", "E8", "K32", "K33", "K34"].map(String::from));
    out.extend(["W(2,v)", "W(2,v,l)", "W(3,v)", "W(4,v)", "W(6,v)"].map(String::from));
    out
}
