//! Finite matrix groups by closure, their reflections and mirrors, trace rings,
//! and essentiality / irreducibility predicates.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, Reflection};
use crate::zmodule::{RealStructure, ZLattice};

pub const DEFAULT_CAP: usize = 1_000_000;

/// Closure cap, overridable through `CRYSREF_CAP`.
pub fn default_cap() -> usize {
    std::env::var("CRYSREF_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

fn fingerprint(m: &CMat) -> u64 {
    let mut h = DefaultHasher::new();
    m.hash(&mut h);
    h.finish()
}

/// A closed finite matrix group with canonically ordered elements.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    pub generators: Vec<CMat>,
    pub elements: Vec<CMat>,
    /// `right_mul[p][g]` is the index of `elements[p]·generators[g]`.
    pub right_mul: Vec<Vec<usize>>,
    parent: Vec<Option<(usize, usize)>>,
    lookup: HashMap<u64, Vec<usize>>,
    identity: usize,
}

impl MatrixGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.generators.first().map_or(0, |g| g.rows)
    }

    pub fn field_order(&self) -> u32 {
        self.generators.first().map_or(1, CMat::order)
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, m: &CMat) -> Option<usize> {
        self.lookup
            .get(&fingerprint(m))
            .and_then(|c| c.iter().copied().find(|&i| self.elements[i] == *m))
    }

    pub fn contains(&self, m: &CMat) -> bool {
        self.index_of(m).is_some()
    }

    /// A word over generator indices whose product is `elements[i]`.
    pub fn word(&self, i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        let mut cur = i;
        while let Some((p, g)) = self.parent[cur] {
            w.push(g);
            cur = p;
        }
        w.reverse();
        w
    }

    /// Breadth-first spanning tree order: each element after its parent.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut depth: Vec<usize> = vec![usize::MAX; self.order()];
        let mut order = Vec::with_capacity(self.order());
        depth[self.identity] = 0;
        order.push(self.identity);
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for (g, &q) in self.right_mul[p].iter().enumerate() {
                if depth[q] == usize::MAX && self.parent[q] == Some((p, g)) {
                    depth[q] = depth[p] + 1;
                    order.push(q);
                }
            }
        }
        order
    }

    /// Parent link of the spanning tree used for words.
    pub fn tree_parent(&self, i: usize) -> Option<(usize, usize)> {
        self.parent[i]
    }
}

/// Generates the group by breadth-first right multiplication.
pub fn closure(generators: &[CMat], cap: usize) -> Result<MatrixGroup> {
    let Some(first) = generators.first() else {
        return Err(Error::Precondition("at least one generator is required".into()));
    };
    let n = first.rows;
    let order = generators.iter().map(CMat::order).fold(1, num_integer::lcm);
    let gens: Vec<CMat> = generators.iter().map(|g| g.lift(order)).collect::<Result<_>>()?;
    for g in &gens {
        if !g.is_square() || g.rows != n {
            return Err(Error::DimensionMismatch(g.rows, n));
        }
    }
    let mut elements = vec![CMat::identity(n, order)];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut lookup: HashMap<u64, Vec<usize>> = HashMap::new();
    lookup.entry(fingerprint(&elements[0])).or_default().push(0);
    let mut right_mul: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(p) = queue.pop_front() {
        let mut row = Vec::with_capacity(gens.len());
        for (gi, g) in gens.iter().enumerate() {
            let q = elements[p].mul(g);
            let fp = fingerprint(&q);
            let found = lookup.get(&fp).and_then(|c| c.iter().copied().find(|&i| elements[i] == q));
            let idx = match found {
                Some(i) => i,
                None => {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    let i = elements.len();
                    elements.push(q);
                    parent.push(Some((p, gi)));
                    lookup.entry(fp).or_default().push(i);
                    queue.push_back(i);
                    i
                }
            };
            row.push(idx);
        }
        if right_mul.len() <= p {
            right_mul.resize(p + 1, Vec::new());
        }
        right_mul[p] = row;
    }
    canonicalize(gens, elements, parent, right_mul)
}

fn canonicalize(
    generators: Vec<CMat>,
    elements: Vec<CMat>,
    parent: Vec<Option<(usize, usize)>>,
    right_mul: Vec<Vec<usize>>,
) -> Result<MatrixGroup> {
    let mut perm: Vec<usize> = (0..elements.len()).collect();
    perm.sort_by(|&a, &b| elements[a].cmp(&elements[b]));
    let mut new_of_old = vec![0usize; elements.len()];
    for (new, &old) in perm.iter().enumerate() {
        new_of_old[old] = new;
    }
    let mut slots: Vec<Option<CMat>> = elements.into_iter().map(Some).collect();
    let elements: Vec<CMat> = perm.iter().map(|&o| slots[o].take().expect("permutation")).collect();
    let parent = perm
        .iter()
        .map(|&o| parent[o].map(|(p, g)| (new_of_old[p], g)))
        .collect();
    let right_mul = perm
        .iter()
        .map(|&o| right_mul[o].iter().map(|&q| new_of_old[q]).collect())
        .collect();
    let mut lookup: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        lookup.entry(fingerprint(e)).or_default().push(i);
    }
    let identity = new_of_old[0];
    Ok(MatrixGroup { generators, elements, right_mul, parent, lookup, identity })
}

/// One reflection found in a group.
#[derive(Clone, Debug)]
pub struct ReflectionElement {
    pub index: usize,
    pub reflection: Reflection,
}

/// A mirror with the order of its cyclic pointwise stabilizer.
#[derive(Clone, Debug)]
pub struct MirrorDatum {
    /// Normal vector of the mirror (a root of any reflection fixing it).
    pub mirror: CVec,
    pub m: u32,
    pub representative: usize,
    pub members: Vec<usize>,
}

/// Root of a rank-one `I − P`: any nonzero column.
fn rank_one_root(p: &CMat) -> CVec {
    let d = CMat::identity(p.rows, p.order()).sub(p);
    (0..d.cols)
        .map(|c| d.column(c))
        .find(|v| !v.is_zero())
        .expect("rank one")
}

/// Scales a line representative so that its first nonzero coordinate is one.
pub fn normalize_line(v: &CVec) -> CVec {
    let lead = v.0.iter().find(|x| !x.is_zero()).expect("nonzero vector").clone();
    let inv = lead.inv().expect("nonzero");
    v.scale(&inv)
}

/// Every element with `rank(I−P) = 1`, with its root and eigenvalue.
pub fn reflections_of(g: &MatrixGroup) -> Vec<ReflectionElement> {
    let mut out = Vec::new();
    for (i, p) in g.elements.iter().enumerate() {
        if linalg::fixed_codim(p) != 1 {
            continue;
        }
        let root = normalize_line(&rank_one_root(p));
        let pe = p.mul_vec(&root);
        let k = root.0.iter().position(|x| !x.is_zero()).expect("nonzero");
        let theta = &pe.0[k] / &root.0[k];
        let m = theta.multiplicative_order(10_000).unwrap_or(0);
        if let Ok(r) = Reflection::new(root, theta, m) {
            out.push(ReflectionElement { index: i, reflection: r });
        }
    }
    out
}

/// Mirrors with their stabilizer orders `m(H)`.
pub fn mirrors_of(g: &MatrixGroup) -> Vec<MirrorDatum> {
    let mut by_line: Vec<MirrorDatum> = Vec::new();
    let mut pos: HashMap<CVec, usize> = HashMap::new();
    for re in reflections_of(g) {
        let key = re.reflection.root.clone();
        match pos.get(&key) {
            Some(&k) => by_line[k].members.push(re.index),
            None => {
                pos.insert(key.clone(), by_line.len());
                by_line.push(MirrorDatum {
                    mirror: key,
                    m: 0,
                    representative: re.index,
                    members: vec![re.index],
                });
            }
        }
    }
    for md in &mut by_line {
        md.m = md.members.len() as u32 + 1;
    }
    by_line
}

/// True iff the common fixed space of the generators is zero.
pub fn is_essential(g: &MatrixGroup) -> bool {
    let n = g.dim();
    let order = g.field_order();
    let id = CMat::identity(n, order);
    let mut rows = Vec::new();
    for p in &g.generators {
        rows.extend(id.sub(p).row_vecs());
    }
    n > 0 && linalg::rank(&rows) == n
}

/// Complex irreducibility via the commutant of the generated algebra.
///
/// The commutant `{X : XP = PX for all generators}` is a ℚ(ζ_N)-space; for a
/// unitary group it is one-dimensional exactly when the representation is
/// irreducible over ℂ.
pub fn is_irreducible(g: &MatrixGroup) -> bool {
    let n = g.dim();
    let order = g.field_order();
    if n == 0 {
        return false;
    }
    let nn = n * n;
    let mut rows: Vec<Vec<CycloNum>> = Vec::new();
    for p in &g.generators {
        for i in 0..n {
            for j in 0..n {
                // (XP − PX)_{ij} = Σ_k X_{ik}P_{kj} − P_{ik}X_{kj}
                let mut row = vec![CycloNum::zero(order); nn];
                for k in 0..n {
                    row[i * n + k] = &row[i * n + k] + p.get(k, j);
                    row[k * n + j] = &row[k * n + j] - p.get(i, k);
                }
                rows.push(row);
            }
        }
    }
    nn - linalg::rank(&rows) == 1
}

/// The unital ring generated by a set of field elements, as a ℤ-module.
#[derive(Clone, Debug)]
pub struct TraceRing {
    pub generators: Vec<CycloNum>,
    /// ℤ-basis of the ring, inside the power-basis coordinates of ℚ(ζ_N).
    pub module: ZLattice,
}

impl TraceRing {
    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn basis(&self) -> Vec<CycloNum> {
        self.module.basis_cvecs().into_iter().map(|v| v.0[0].clone()).collect()
    }

    pub fn contains(&self, z: &CycloNum) -> bool {
        self.module.contains_cvec(&CVec(vec![z.clone()]))
    }
}

/// Smallest ℤ-module containing 1 and closed under multiplication by the generators.
pub fn ring_closure(order: u32, gens: &[CycloNum]) -> Result<TraceRing> {
    let st = RealStructure::new(1, order);
    let phi = st.phi;
    let gens: Vec<CycloNum> = gens.iter().map(|z| z.lift(order)).collect::<Result<_>>()?;
    let mut module = ZLattice::from_cvecs(&st, &[CVec(vec![CycloNum::one(order)])])?;
    for _ in 0..=4 * phi + 4 {
        let basis = module.basis_cvecs();
        let mut all = basis.clone();
        for b in &basis {
            for z in &gens {
                all.push(CVec(vec![&b.0[0] * z]));
            }
        }
        let next = ZLattice::from_cvecs(&st, &all)?;
        if next == module {
            return Ok(TraceRing { generators: gens, module });
        }
        if next.rank() > phi {
            return Err(Error::NoStabilization);
        }
        module = next;
    }
    Err(Error::NoStabilization)
}

/// `ℤ[Tr K]` from all element traces.
pub fn trace_ring(g: &MatrixGroup) -> Result<TraceRing> {
    let mut traces: Vec<CycloNum> = g.elements.iter().map(CMat::trace).collect();
    traces.sort();
    traces.dedup();
    ring_closure(g.field_order(), &traces)
}

/// Checks that every reflection of `g` is conjugate to a power of one of `gens`.
pub fn reflection_conjugacy_diagnostic(g: &MatrixGroup, gens: &[Reflection]) -> bool {
    let targets: Vec<CMat> = gens
        .iter()
        .flat_map(|r| {
            let m = r.matrix();
            (1..r.order).map(move |k| m.pow(k))
        })
        .collect();
    let target_idx: Vec<usize> = targets.iter().filter_map(|t| g.index_of(t)).collect();
    if target_idx.len() != targets.len() {
        return false;
    }
    let mut reached = vec![false; g.order()];
    let inverses: Vec<CMat> = g.elements.iter().map(CMat::adjoint).collect();
    for &t in &target_idx {
        for (p, pinv) in g.elements.iter().zip(&inverses) {
            let c = p.mul(&g.elements[t]).mul(pinv);
            if let Some(i) = g.index_of(&c) {
                reached[i] = true;
            }
        }
    }
    reflections_of(g).iter().all(|r| reached[r.index])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b2_gens() -> Vec<CMat> {
        let o = 4;
        let d = CMat::diag(&[CycloNum::from_int(-1, o), CycloNum::one(o)]);
        let s = CMat::from_rows(vec![
            vec![CycloNum::zero(o), CycloNum::one(o)],
            vec![CycloNum::one(o), CycloNum::zero(o)],
        ])
        .unwrap();
        vec![d, s]
    }

    fn a2_gens() -> Vec<CMat> {
        let e1 = CVec::from_ints(&[1, -1, 0], 4);
        let e2 = CVec::from_ints(&[0, 1, -1], 4);
        vec![
            Reflection::with_order(e1, 2).unwrap().matrix(),
            Reflection::with_order(e2, 2).unwrap().matrix(),
        ]
    }

    #[test]
    fn closure_orders() {
        assert_eq!(closure(&b2_gens(), 100).unwrap().order(), 8);
        let i = CMat::diag(&[CycloNum::i(4)]);
        assert_eq!(closure(&[i], 100).unwrap().order(), 4);
        assert_eq!(closure(&a2_gens(), 100).unwrap().order(), 6);
        assert_eq!(closure(&b2_gens(), 5).unwrap_err(), Error::CapExceeded(5));
    }

    #[test]
    fn closure_is_deterministic_and_words_evaluate() {
        let g1 = closure(&b2_gens(), 100).unwrap();
        let g2 = closure(&b2_gens(), 100).unwrap();
        assert_eq!(g1.elements, g2.elements);
        for i in 0..g1.order() {
            let mut acc = CMat::identity(2, 4);
            for &k in &g1.word(i) {
                acc = acc.mul(&g1.generators[k]);
            }
            assert_eq!(acc, g1.elements[i]);
        }
    }

    #[test]
    fn mirrors_of_small_groups() {
        let g = closure(&a2_gens(), 100).unwrap();
        let refl = reflections_of(&g);
        let mir = mirrors_of(&g);
        assert_eq!(refl.len(), 3);
        assert_eq!(mir.len(), 3);
        assert!(mir.iter().all(|m| m.m == 2));
        let w = CycloNum::zeta_pow(3, 1);
        let c = closure(&[CMat::diag(&[w, CycloNum::one(3)])], 10).unwrap();
        assert_eq!(reflections_of(&c).len(), 2);
        let mc = mirrors_of(&c);
        assert_eq!(mc.len(), 1);
        assert_eq!(mc[0].m, 3);
        let id = closure(&[CMat::identity(2, 4)], 10).unwrap();
        assert!(reflections_of(&id).is_empty());
    }

    #[test]
    fn essential_and_irreducible() {
        let a2 = closure(&a2_gens(), 100).unwrap();
        // in C^3 the A2 group fixes (1,1,1)
        assert!(!is_essential(&a2));
        let e1 = CVec::from_ints(&[1, 0], 4);
        let e2 = CVec::from_ints(&[0, 1], 4);
        let red = closure(
            &[
                Reflection::with_order(e1, 2).unwrap().matrix(),
                Reflection::with_order(e2, 2).unwrap().matrix(),
            ],
            100,
        )
        .unwrap();
        assert!(is_essential(&red));
        assert!(!is_irreducible(&red));
        assert!(!is_essential(&closure(&[CMat::identity(2, 4)], 10).unwrap()));
        let b2 = closure(&b2_gens(), 100).unwrap();
        assert!(is_essential(&b2) && is_irreducible(&b2));
    }

    #[test]
    fn trace_rings() {
        let a2 = closure(&a2_gens(), 100).unwrap();
        assert_eq!(trace_ring(&a2).unwrap().rank(), 1);
        let w = CycloNum::zeta_pow(3, 1);
        let c = closure(&[CMat::diag(&[w.clone(), CycloNum::one(3)])], 10).unwrap();
        let r = trace_ring(&c).unwrap();
        assert_eq!(r.rank(), 2);
        assert!(r.contains(&w));
    }

    #[test]
    fn conjugacy_diagnostic_small() {
        let e1 = CVec::from_ints(&[1, -1, 0], 4);
        let e2 = CVec::from_ints(&[0, 1, -1], 4);
        let gens = vec![Reflection::with_order(e1, 2).unwrap(), Reflection::with_order(e2, 2).unwrap()];
        let g = closure(&gens.iter().map(Reflection::matrix).collect::<Vec<_>>(), 100).unwrap();
        assert!(reflection_conjugacy_diagnostic(&g, &gens));
        let b = vec![
            Reflection::with_order(CVec::from_ints(&[1, 0], 4), 2).unwrap(),
            Reflection::with_order(CVec::from_ints(&[1, -1], 4), 2).unwrap(),
        ];
        let gb = closure(&b.iter().map(Reflection::matrix).collect::<Vec<_>>(), 100).unwrap();
        assert!(reflection_conjugacy_diagnostic(&gb, &b));
    }
}
