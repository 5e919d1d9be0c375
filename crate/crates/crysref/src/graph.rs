//! Cyclic products of systems of lines, the weighted group graph, the
//! determinant of `S` read off the graph, and isometry of line systems.

use std::collections::BTreeMap;

use num_integer::lcm;

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::linalg::{inner, CVec, Reflection};

/// Default bound on the length of enumerated simple cycles.
pub const CYCLE_BOUND: usize = 6;

/// Lines `ℂe_j` with multiplicities `m_j ≥ 2`.
#[derive(Clone, Debug)]
pub struct LineSystem {
    pub lines: Vec<(CVec, u32)>,
    /// Eigenvalue attached to each line; `e^{2πi/m_j}` unless given.
    pub thetas: Vec<CycloNum>,
    order: u32,
}

impl LineSystem {
    pub fn new(lines: Vec<(CVec, u32)>) -> Result<Self> {
        Self::with_thetas(lines, None)
    }

    fn with_thetas(lines: Vec<(CVec, u32)>, thetas: Option<Vec<CycloNum>>) -> Result<Self> {
        let Some((first, _)) = lines.first() else {
            return Err(Error::Precondition("empty line system".into()));
        };
        let dim = first.dim();
        let mut order = 1;
        for (e, m) in &lines {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch(e.dim(), dim));
            }
            if *m < 2 {
                return Err(Error::BadEigenvalue("multiplicity".into(), *m));
            }
            if e.is_zero() {
                return Err(Error::ZeroRoot);
            }
            order = lcm(order, e.order());
            if thetas.is_none() {
                order = field_with_root(order, *m);
            }
        }
        if let Some(t) = &thetas {
            order = t.iter().map(CycloNum::order).fold(order, lcm);
        }
        let thetas = match thetas {
            Some(t) => t.iter().map(|z| z.lift(order)).collect::<Result<Vec<_>>>()?,
            None => lines.iter().map(|(_, m)| CycloNum::root_of_unity(order, *m)).collect(),
        };
        let lines = lines
            .into_iter()
            .map(|(e, m)| Ok((e.lift(order)?, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LineSystem { lines, thetas, order })
    }

    /// Root lines, orders and eigenvalues of a generating system of reflections.
    pub fn from_reflections(gens: &[Reflection]) -> Result<Self> {
        Self::with_thetas(
            gens.iter().map(|r| (r.root.clone(), r.order)).collect(),
            Some(gens.iter().map(|r| r.theta.clone()).collect()),
        )
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn root(&self, j: usize) -> &CVec {
        &self.lines[j].0
    }

    /// `1 − θ_j`.
    pub fn eigen_factor(&self, j: usize) -> CycloNum {
        &CycloNum::one(self.order) - &self.thetas[j]
    }

    pub fn gram(&self, j: usize, k: usize) -> CycloNum {
        inner(self.root(j), self.root(k)).expect("equal dimensions")
    }
}

/// `c_{j₁…j_d} = Π⟨e_{j_l}|e_{j_{l+1}}⟩ / Π⟨e_{j_l}|e_{j_l}⟩ · Π(1 − θ_{j_l})`, cyclically.
pub fn cyclic_product(sys: &LineSystem, indices: &[usize]) -> Result<CycloNum> {
    if indices.is_empty() {
        return Err(Error::Precondition("empty index sequence".into()));
    }
    if let Some(&bad) = indices.iter().find(|&&j| j >= sys.len()) {
        return Err(Error::IndexOutOfRange(bad));
    }
    let d = indices.len();
    let mut num = CycloNum::one(sys.order);
    let mut den = CycloNum::one(sys.order);
    for l in 0..d {
        let (a, b) = (indices[l], indices[(l + 1) % d]);
        num = &num * &(&sys.gram(a, b) * &sys.eigen_factor(a));
        if num.is_zero() {
            return Ok(num);
        }
        den = &den * &sys.gram(a, a);
    }
    Ok(&num / &den)
}

/// Smallest `M` with `N | M` and `ζ_m ∈ ℚ(ζ_M)`, using `ℚ(ζ_N) = ℚ(ζ_{2N})` for odd `N`.
fn field_with_root(n: u32, m: u32) -> u32 {
    let l = lcm(n, m);
    if n % 2 == 1 && l == 2 * n {
        n
    } else {
        l
    }
}

/// Nodes weighted by `m_j`, edges by `c_{jk}`, oriented simple cycles by `c_σ`.
#[derive(Clone, Debug)]
pub struct GroupGraph {
    pub nodes: Vec<u32>,
    /// `c_j = 1 − θ_j`.
    pub loops: Vec<CycloNum>,
    /// `(j, k, c_{jk})` with `j < k` and `c_{jk} ≠ 0`.
    pub edges: Vec<(usize, usize, CycloNum)>,
    /// Oriented simple cycles of length ≥ 3, each starting at its smallest node.
    pub cycles: Vec<(Vec<usize>, CycloNum)>,
    pub cycle_bound: usize,
}

impl GroupGraph {
    pub fn edge(&self, j: usize, k: usize) -> Option<&CycloNum> {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        self.edges.iter().find(|(x, y, _)| *x == a && *y == b).map(|(_, _, c)| c)
    }

    pub fn neighbours(&self, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|(a, b, _)| if *a == j { Some(*b) } else if *b == j { Some(*a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// True if the edges form a path `0 − 1 − ⋯ − (n−1)`.
    pub fn is_chain(&self) -> bool {
        let n = self.nodes.len();
        self.edges.len() + 1 == n && self.edges.iter().all(|(a, b, _)| *b == *a + 1)
    }

    fn cycle_weight(&self, seq: &[usize]) -> Option<CycloNum> {
        let start = (0..seq.len()).min_by_key(|&i| seq[i])?;
        let rot: Vec<usize> = seq[start..].iter().chain(&seq[..start]).copied().collect();
        self.cycles.iter().find(|(s, _)| *s == rot).map(|(_, c)| c.clone())
    }

    /// Edge list, loop weights and cycles as JSON.
    pub fn to_json(&self) -> serde_json::Value {
        use crate::cyclotomic::to_json_terms;
        serde_json::json!({
            "nodes": self.nodes.iter().enumerate().map(|(j, m)| serde_json::json!({
                "id": j + 1, "m": m, "c": to_json_terms(&self.loops[j]),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|(a, b, c)| serde_json::json!({
                "from": a + 1, "to": b + 1, "c": to_json_terms(c), "text": c.to_string(),
            })).collect::<Vec<_>>(),
            "cycles": self.cycles.iter().map(|(s, c)| serde_json::json!({
                "nodes": s.iter().map(|j| j + 1).collect::<Vec<_>>(),
                "c": to_json_terms(c), "text": c.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Builds the group graph with simple cycles up to `cycle_bound` nodes.
pub fn build_graph(sys: &LineSystem, cycle_bound: usize) -> Result<GroupGraph> {
    let n = sys.len();
    let loops = (0..n).map(|j| cyclic_product(sys, &[j])).collect::<Result<Vec<_>>>()?;
    let mut edges = Vec::new();
    let mut adj = vec![Vec::new(); n];
    for j in 0..n {
        for k in j + 1..n {
            let c = cyclic_product(sys, &[j, k])?;
            if !c.is_zero() {
                adj[j].push(k);
                adj[k].push(j);
                edges.push((j, k, c));
            }
        }
    }
    let mut cycles = Vec::new();
    for start in 0..n {
        let mut path = vec![start];
        extend_cycles(sys, &adj, cycle_bound, &mut path, &mut cycles)?;
    }
    Ok(GroupGraph { nodes: sys.lines.iter().map(|l| l.1).collect(), loops, edges, cycles, cycle_bound })
}

fn extend_cycles(
    sys: &LineSystem,
    adj: &[Vec<usize>],
    bound: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, CycloNum)>,
) -> Result<()> {
    let start = path[0];
    let last = *path.last().expect("nonempty");
    for &next in &adj[last] {
        if next == start && path.len() >= 3 {
            out.push((path.clone(), cyclic_product(sys, path)?));
        } else if next > start && !path.contains(&next) && path.len() < bound {
            path.push(next);
            extend_cycles(sys, adj, bound, path, out)?;
            path.pop();
        }
    }
    Ok(())
}

/// `det S = Σ_σ sgn σ · Π c_{cycles of σ}`, summed over cycle covers of the graph.
///
/// Fails only when a needed cycle exceeds the graph's cycle bound.
pub fn det_s_from_graph(g: &GroupGraph) -> Result<CycloNum> {
    let n = g.nodes.len();
    let order = g.loops.first().map_or(1, CycloNum::order);
    let mut covered = vec![false; n];
    let mut total = CycloNum::zero(order);
    cover(g, &mut covered, CycloNum::one(order), &mut total)?;
    Ok(total)
}

fn cover(g: &GroupGraph, covered: &mut [bool], acc: CycloNum, total: &mut CycloNum) -> Result<()> {
    let Some(j) = covered.iter().position(|c| !c) else {
        *total = &*total + &acc;
        return Ok(());
    };
    covered[j] = true;
    cover(g, covered, &acc * &g.loops[j], total)?;
    let mut path = vec![j];
    walk(g, covered, &mut path, &acc, total)?;
    covered[j] = false;
    Ok(())
}

fn walk(
    g: &GroupGraph,
    covered: &mut [bool],
    path: &mut Vec<usize>,
    acc: &CycloNum,
    total: &mut CycloNum,
) -> Result<()> {
    let last = *path.last().expect("nonempty");
    for k in g.neighbours(last) {
        if covered[k] {
            continue;
        }
        path.push(k);
        covered[k] = true;
        // close the cycle here
        let weight = if path.len() == 2 {
            g.edge(path[0], path[1]).cloned()
        } else if g.edge(k, path[0]).is_some() {
            if path.len() > g.cycle_bound {
                return Err(Error::Precondition(format!(
                    "cycle of length {} exceeds the graph's cycle bound",
                    path.len()
                )));
            }
            Some(g.cycle_weight(path).ok_or_else(|| Error::Precondition("missing cycle".into()))?)
        } else {
            None
        };
        if let Some(w) = weight {
            let w = if path.len().is_multiple_of(2) { -w } else { w };
            cover(g, covered, acc * &w, total)?;
        }
        walk(g, covered, path, acc, total)?;
        covered[k] = false;
        path.pop();
    }
    Ok(())
}

/// Compares all single, pair and simple-cycle products.
pub fn line_systems_isometric(a: &LineSystem, b: &LineSystem) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    let n = a.len();
    for j in 0..n {
        if a.lines[j].1 != b.lines[j].1 {
            return Ok(false);
        }
        for k in j + 1..n {
            if !same(&cyclic_product(a, &[j, k])?, &cyclic_product(b, &[j, k])?)? {
                return Ok(false);
            }
        }
    }
    let ga = build_graph(a, n)?;
    for (seq, c) in &ga.cycles {
        if !same(c, &cyclic_product(b, seq)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn same(x: &CycloNum, y: &CycloNum) -> Result<bool> {
    Ok(x.checked_sub(y)?.is_zero())
}

/// Scalars `λ_j` with `⟨λ_j e_j|λ_k e_k⟩ = ⟨e′_j|e′_k⟩`, normalized by `λ_t = 1`.
///
/// Propagates along a spanning tree of the overlap graph and then checks the
/// full Gram matrices.
pub fn rescale_factors(a: &LineSystem, b: &LineSystem, t: usize) -> Result<Vec<CycloNum>> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch(n, b.len()));
    }
    if t >= n {
        return Err(Error::IndexOutOfRange(t));
    }
    let order = lcm(a.order, b.order);
    let ga = |j: usize, k: usize| a.gram(j, k).lift(order);
    let gb = |j: usize, k: usize| b.gram(j, k).lift(order);
    let mut lambda: Vec<Option<CycloNum>> = vec![None; n];
    lambda[t] = Some(CycloNum::one(order));
    let mut queue = std::collections::VecDeque::from([t]);
    while let Some(j) = queue.pop_front() {
        let lj = lambda[j].clone().expect("visited");
        for k in 0..n {
            if lambda[k].is_some() {
                continue;
            }
            let g = ga(k, j)?;
            if g.is_zero() {
                continue;
            }
            // λ_k·conj(λ_j)·⟨e_k|e_j⟩ = ⟨e′_k|e′_j⟩
            let lk = &gb(k, j)? / &(&lj.conj() * &g);
            lambda[k] = Some(lk);
            queue.push_back(k);
        }
    }
    let lambda: Vec<CycloNum> = lambda
        .into_iter()
        .map(|l| l.ok_or(Error::DisconnectedOverlapGraph))
        .collect::<Result<_>>()?;
    for j in 0..n {
        for k in 0..n {
            let lhs = &(&lambda[j] * &lambda[k].conj()) * &ga(j, k)?;
            if lhs != gb(j, k)? {
                return Err(Error::GramMismatch(format!("entry ({}, {})", j + 1, k + 1)));
            }
        }
    }
    Ok(lambda)
}

/// Products of all pairs and cycles keyed by index sequence, for reports.
pub fn product_table(g: &GroupGraph) -> BTreeMap<Vec<usize>, CycloNum> {
    let mut t = BTreeMap::new();
    for (j, c) in g.loops.iter().enumerate() {
        t.insert(vec![j], c.clone());
    }
    for (a, b, c) in &g.edges {
        t.insert(vec![*a, *b], c.clone());
    }
    for (s, c) in &g.cycles {
        t.insert(s.clone(), c.clone());
    }
    t
}
