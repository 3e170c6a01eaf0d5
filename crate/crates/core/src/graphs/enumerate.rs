//! The graph growth process and its quotient by vertex relabelings.

use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counting::{loop_structure_bound, potential_structure_bound, tree_structure_count};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "c")]
    C,
}

impl Dir {
    pub fn opposite(self) -> Dir {
        match self {
            Dir::A => Dir::C,
            Dir::C => Dir::A,
        }
    }

    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    #[serde(rename = "root")]
    Root,
    W,
    V,
}

impl VertexKind {
    fn slots(self, p: usize) -> usize {
        match self {
            VertexKind::Root => p,
            VertexKind::W => 2,
            VertexKind::V => 1,
        }
    }
}

/// Slot `(v, d, i)`: vertex, direction, 1-based index within that direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub v: u8,
    pub d: Dir,
    pub i: u8,
}

/// An edge joins an `a` slot to a `c` slot; stored in that order.
pub type Edge = (EdgeLabel, EdgeLabel);

/// Graph produced by the growth process: root `0` with `p` slots per
/// direction, vertices `1..=k` of kind `W` (two slots per direction) or `V` (one).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleGraph {
    p: usize,
    kinds: Vec<VertexKind>,
    edges: Vec<Edge>,
}

impl AdmissibleGraph {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.kinds.len() - 1
    }

    /// Number of edges beyond a spanning tree.
    pub fn loops(&self) -> usize {
        self.edges.len() - self.k()
    }

    /// Number of potential vertices.
    pub fn potentials(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == VertexKind::V).count()
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `R_sigma`: vertex `v` of the result is vertex `sigma[v - 1]` of `self`.
    /// `sigma` is a permutation of `1..=k`.
    pub fn relabel(&self, sigma: &[u8]) -> AdmissibleGraph {
        let k = self.k();
        let mut inv = vec![0u8; k + 1];
        for (j, &s) in sigma.iter().enumerate() {
            inv[s as usize] = (j + 1) as u8;
        }
        let map = |l: EdgeLabel| EdgeLabel { v: inv[l.v as usize], ..l };
        let mut kinds = Vec::with_capacity(k + 1);
        kinds.push(VertexKind::Root);
        kinds.extend(sigma.iter().map(|&s| self.kinds[s as usize]));
        let mut edges: Vec<Edge> = self.edges.iter().map(|&(a, c)| (map(a), map(c))).collect();
        edges.sort_unstable();
        AdmissibleGraph { p: self.p, kinds, edges }
    }

    /// Lexicographically least relabeling.
    pub fn canonical(&self) -> AdmissibleGraph {
        let mut best: Option<AdmissibleGraph> = None;
        for sigma in permutations(self.k()) {
            let g = self.relabel(&sigma);
            if best.as_ref().is_none_or(|b| (&g.kinds, &g.edges) < (&b.kinds, &b.edges)) {
                best = Some(g);
            }
        }
        best.expect("at least the identity")
    }

    /// Structural checks: slot ranges, opposite directions, each slot used once,
    /// connectivity, and the loop property below.
    pub fn is_well_formed(&self) -> bool {
        let mut used = HashSet::new();
        for &(a, c) in &self.edges {
            if a.d != Dir::A || c.d != Dir::C || a.v == c.v {
                return false;
            }
            for l in [a, c] {
                let Some(kind) = self.kinds.get(l.v as usize) else { return false };
                if l.i == 0 || l.i as usize > kind.slots(self.p) || !used.insert(l) {
                    return false;
                }
            }
        }
        self.satisfies_loop_property()
    }

    /// There are `l` vertices `v`, each with both slots of one direction
    /// occupied, such that dropping one of those two edges per vertex leaves
    /// a spanning tree in which the kept edge joins `v` to its parent.
    pub fn satisfies_loop_property(&self) -> bool {
        let k = self.k();
        let l = self.loops();
        // (vertex, direction) pairs with both slots filled
        let mut doubles: Vec<(u8, Dir, [usize; 2])> = Vec::new();
        for v in 1..=k as u8 {
            if self.kinds[v as usize] != VertexKind::W {
                continue;
            }
            for d in [Dir::A, Dir::C] {
                let hit: Vec<usize> = self
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, c))| (d == Dir::A && a.v == v) || (d == Dir::C && c.v == v))
                    .map(|(i, _)| i)
                    .collect();
                if hit.len() == 2 {
                    doubles.push((v, d, [hit[0], hit[1]]));
                }
            }
        }
        let mut choice = Vec::new();
        self.search_loops(&doubles, 0, l, &mut choice)
    }

    fn search_loops(&self, doubles: &[(u8, Dir, [usize; 2])], from: usize, left: usize, choice: &mut Vec<(u8, usize, usize)>) -> bool {
        if left == 0 {
            return self.check_tree(choice);
        }
        for idx in from..doubles.len() {
            let (v, _, pair) = doubles[idx];
            if choice.iter().any(|&(w, _, _)| w == v) {
                continue;
            }
            for drop in 0..2 {
                choice.push((v, pair[drop], pair[1 - drop]));
                if self.search_loops(doubles, idx + 1, left - 1, choice) {
                    return true;
                }
                choice.pop();
            }
        }
        false
    }

    fn check_tree(&self, choice: &[(u8, usize, usize)]) -> bool {
        let k = self.k();
        let kept: Vec<Edge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !choice.iter().any(|&(_, d, _)| d == *i))
            .map(|(_, &e)| e)
            .collect();
        if kept.len() != k {
            return false;
        }
        // breadth-first parents from the root
        let mut parent: Vec<Option<usize>> = vec![None; k + 1];
        let mut seen = vec![false; k + 1];
        seen[0] = true;
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for (ei, &(a, c)) in kept.iter().enumerate() {
                let (u, w) = (a.v as usize, c.v as usize);
                let other = if u == x { w } else if w == x { u } else { continue };
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = Some(ei);
                    queue.push(other);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return false;
        }
        choice.iter().all(|&(v, _, keep)| {
            let e = self.edges[keep];
            parent[v as usize].map(|pi| kept[pi]) == Some(e)
        })
    }

    pub fn to_doc(&self) -> GraphDoc {
        let lab = |l: EdgeLabel| (l.v as usize, l.d, l.i as usize);
        GraphDoc {
            p: self.p,
            k: self.k(),
            l: self.loops(),
            m: self.potentials(),
            kinds: self.kinds.clone(),
            edges: self.edges.iter().map(|&(a, c)| [lab(a), lab(c)]).collect(),
        }
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self> {
        let lab = |(v, d, i): (usize, Dir, usize)| EdgeLabel { v: v as u8, d, i: i as u8 };
        let mut edges: Vec<Edge> = doc
            .edges
            .iter()
            .map(|[x, y]| if x.1 == Dir::A { (lab(*x), lab(*y)) } else { (lab(*y), lab(*x)) })
            .collect();
        edges.sort_unstable();
        let g = AdmissibleGraph { p: doc.p, kinds: doc.kinds.clone(), edges };
        if g.kinds.first() != Some(&VertexKind::Root) || g.k() != doc.k || g.loops() != doc.l || g.potentials() != doc.m {
            return Err(Error::config("graph", "header does not match kinds and edges"));
        }
        if !g.is_well_formed() {
            return Err(Error::config("graph.edges", "not an admissible graph"));
        }
        Ok(g)
    }
}

/// JSON edge-list form: `{p, k, l, m, kinds, edges: [[[v, d, i], [v, d, i]], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub p: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub kinds: Vec<VertexKind>,
    pub edges: Vec<[(usize, Dir, usize); 2]>,
}

/// Permutations of `1..=k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<u8>> {
    fn rec(cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j as u8 + 1);
                rec(cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Range accepted by the enumerators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    pub max_p: usize,
    pub max_k: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_p: 3, max_k: 5 }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Limits { max_p: usize::MAX, max_k: 8 }
    }

    fn check(&self, p: usize, k: usize) -> Result<()> {
        if p == 0 {
            return Err(Error::invalid("p must be at least 1"));
        }
        if p > self.max_p || k > self.max_k {
            return Err(Error::Ceiling(format!(
                "p={p}, k={k} outside p <= {}, k <= {}",
                self.max_p, self.max_k
            )));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Growth {
    edges: Vec<Edge>,
    empty: [Vec<EdgeLabel>; 2],
}

fn edge(x: EdgeLabel, y: EdgeLabel) -> Edge {
    if x.d == Dir::A {
        (x, y)
    } else {
        (y, x)
    }
}

fn grow(
    p: usize,
    kinds: &[VertexKind],
    j: usize,
    state: &Growth,
    loops_left: Option<usize>,
    out: &mut Vec<AdmissibleGraph>,
) {
    let k = kinds.len() - 1;
    if j > k {
        if loops_left.is_none_or(|l| l == 0) {
            let mut edges = state.edges.clone();
            edges.sort_unstable();
            out.push(AdmissibleGraph { p, kinds: kinds.to_vec(), edges });
        }
        return;
    }
    let kind = kinds[j];
    let w_left = kinds[j + 1..].iter().filter(|&&x| x == VertexKind::W).count();
    let slots = kind.slots(p) as u8;
    let v = j as u8;
    let fresh = |skip: &[EdgeLabel], st: &mut Growth| {
        for d in [Dir::A, Dir::C] {
            for i in 1..=slots {
                let l = EdgeLabel { v, d, i };
                if !skip.contains(&l) {
                    st.empty[d.idx()].push(l);
                }
            }
        }
    };
    for d in [Dir::A, Dir::C] {
        let targets = &state.empty[d.opposite().idx()];
        // one edge
        if loops_left.is_none_or(|l| l <= w_left) {
            for i in 1..=slots {
                let own = EdgeLabel { v, d, i };
                for t in 0..targets.len() {
                    let mut st = state.clone();
                    let target = st.empty[d.opposite().idx()].remove(t);
                    st.edges.push(edge(own, target));
                    fresh(&[own], &mut st);
                    grow(p, kinds, j + 1, &st, loops_left, out);
                }
            }
        }
        // two edges of the same direction
        if kind == VertexKind::W && loops_left.is_none_or(|l| l >= 1 && l - 1 <= w_left) {
            let own = [EdgeLabel { v, d, i: 1 }, EdgeLabel { v, d, i: 2 }];
            for t1 in 0..targets.len() {
                for t2 in 0..targets.len() {
                    if t1 == t2 {
                        continue;
                    }
                    let mut st = state.clone();
                    st.edges.push(edge(own[0], targets[t1]));
                    st.edges.push(edge(own[1], targets[t2]));
                    st.empty[d.opposite().idx()].retain(|x| *x != targets[t1] && *x != targets[t2]);
                    fresh(&own, &mut st);
                    grow(p, kinds, j + 1, &st, loops_left.map(|l| l - 1), out);
                }
            }
        }
    }
}

fn kind_patterns(k: usize, potentials: Option<usize>, with_potential: bool) -> Vec<Vec<VertexKind>> {
    let mut out = Vec::new();
    let total = if with_potential { 1usize << k } else { 1 };
    for mask in 0..total {
        if potentials.is_some_and(|m| mask.count_ones() as usize != m) {
            continue;
        }
        let mut kinds = vec![VertexKind::Root];
        kinds.extend((0..k).map(|b| if mask >> b & 1 == 1 { VertexKind::V } else { VertexKind::W }));
        out.push(kinds);
    }
    out
}

fn run(p: usize, k: usize, loops: Option<usize>, potentials: Option<usize>, with_potential: bool) -> Vec<AdmissibleGraph> {
    let root = Growth {
        edges: Vec::new(),
        empty: [
            (1..=p as u8).map(|i| EdgeLabel { v: 0, d: Dir::A, i }).collect(),
            (1..=p as u8).map(|i| EdgeLabel { v: 0, d: Dir::C, i }).collect(),
        ],
    };
    kind_patterns(k, potentials, with_potential)
        .into_par_iter()
        .flat_map_iter(|kinds| {
            let mut out = Vec::new();
            grow(p, &kinds, 1, &root, loops, &mut out);
            out
        })
        .collect()
}

/// All graphs produced by the growth process with `k` added vertices.
/// With `with_potential`, every added vertex may be `W` or `V`.
pub fn enumerate_admissible(p: usize, k: usize, with_potential: bool, limits: Limits) -> Result<Vec<AdmissibleGraph>> {
    limits.check(p, k)?;
    Ok(run(p, k, None, None, with_potential))
}

/// Admissible graphs with exactly `l` loops and `m` potential vertices.
pub fn enumerate_class(p: usize, k: usize, l: usize, m: usize, limits: Limits) -> Result<Vec<AdmissibleGraph>> {
    limits.check(p, k)?;
    if m > k {
        return Err(Error::invalid(format!("m={m} exceeds k={k}")));
    }
    Ok(run(p, k, Some(l), Some(m), m > 0))
}

/// Counts for one `(p, k, l, m)` class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureCount {
    pub p: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    /// Number of graph structures, the relabeling classes `|Q|`.
    pub count: u64,
    /// Number of admissible graphs emitted by the growth process.
    pub admissible: u64,
    /// Closed form, available for trees without potential vertices.
    pub closed_form: Option<String>,
    pub bound: String,
}

/// Distinct canonical forms among a set of graphs.
pub fn distinct_structures(graphs: &[AdmissibleGraph]) -> HashSet<AdmissibleGraph> {
    graphs.par_iter().map(|g| g.canonical()).collect()
}

pub fn count_structures(p: usize, k: usize, l: usize, m: usize, limits: Limits) -> Result<StructureCount> {
    let graphs = enumerate_class(p, k, l, m, limits)?;
    let count = distinct_structures(&graphs).len() as u64;
    let (pu, ku, lu, mu) = (p as u64, k as u64, l as u64, m as u64);
    let closed_form = if l == 0 && m == 0 { Some(tree_structure_count(pu, ku)?.to_string()) } else { None };
    let bound: BigUint = if m == 0 { loop_structure_bound(pu, ku, lu) } else { potential_structure_bound(pu, ku, lu, mu) };
    Ok(StructureCount { p, k, l, m, count, admissible: graphs.len() as u64, closed_form, bound: bound.to_string() })
}

/// Size of the class closed under all relabelings, computed explicitly.
pub fn extended_class_size(p: usize, k: usize, l: usize, m: usize, limits: Limits) -> Result<usize> {
    let graphs = enumerate_class(p, k, l, m, limits)?;
    let perms = permutations(k);
    let all: HashSet<AdmissibleGraph> =
        graphs.par_iter().flat_map_iter(|g| perms.iter().map(|s| g.relabel(s)).collect::<Vec<_>>()).collect();
    Ok(all.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        let g = enumerate_class(1, 1, 0, 0, Limits::default()).unwrap();
        assert_eq!(g.len(), 4);
        assert!(enumerate_class(1, 1, 1, 0, Limits::default()).unwrap().is_empty());
        assert_eq!(enumerate_class(2, 1, 1, 0, Limits::default()).unwrap().len(), 4);
        assert_eq!(enumerate_class(1, 1, 0, 1, Limits::default()).unwrap().len(), 2);
    }

    #[test]
    fn ceiling() {
        assert!(matches!(enumerate_admissible(4, 1, false, Limits::default()), Err(Error::Ceiling(_))));
        assert!(matches!(enumerate_admissible(1, 6, false, Limits::default()), Err(Error::Ceiling(_))));
        assert!(enumerate_admissible(0, 1, false, Limits::default()).is_err());
    }

    #[test]
    fn relabel_identity_and_inverse() {
        let gs = enumerate_class(1, 3, 1, 0, Limits::default()).unwrap();
        for g in gs.iter().take(50) {
            assert_eq!(&g.relabel(&[1, 2, 3]), g);
            let h = g.relabel(&[2, 3, 1]);
            assert_eq!(&h.relabel(&[3, 1, 2]), g);
            assert_eq!(h.canonical(), g.canonical());
        }
    }

    #[test]
    fn doc_round_trip() {
        for g in enumerate_admissible(2, 2, true, Limits::default()).unwrap().iter().take(40) {
            let s = serde_json::to_string(&g.to_doc()).unwrap();
            let back: GraphDoc = serde_json::from_str(&s).unwrap();
            assert_eq!(&AdmissibleGraph::from_doc(&back).unwrap(), g);
        }
    }
}
