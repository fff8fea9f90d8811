//! The factor digraph of a binary relation on k-tuples: vertices are orbits of
//! k-tuples, edges the orbit pairs realized by the relation.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbit::{realize, GroundTuple, WeakOrder};
use crate::relation::TemporalRelation;

/// One step of a walk. A forward step uses the edge `(from, to)`, a backward
/// step the edge `(to, from)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WalkStep {
    pub from: usize,
    pub to: usize,
    pub forward: bool,
}

impl WalkStep {
    pub fn edge(&self) -> (usize, usize) {
        if self.forward {
            (self.from, self.to)
        } else {
            (self.to, self.from)
        }
    }

    fn reversed(&self) -> WalkStep {
        WalkStep { from: self.to, to: self.from, forward: !self.forward }
    }
}

pub fn algebraic_length(walk: &[WalkStep]) -> i64 {
    walk.iter().map(|s| if s.forward { 1 } else { -1 }).sum()
}

#[derive(Clone, Debug)]
pub struct FactorDigraph {
    pub k: usize,
    pub vertices: Vec<WeakOrder>,
    pub edges: BTreeSet<(usize, usize)>,
    /// Component label of every vertex; components are numbered by their
    /// least vertex.
    pub component: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    /// Per component, the gcd of all potential discrepancies (`None` when
    /// every discrepancy is zero).
    pub gcd: Vec<Option<u64>>,
    potential: Vec<i64>,
    parent: Vec<Option<WalkStep>>,
    index: BTreeMap<WeakOrder, usize>,
}

pub fn factor_digraph(e: &TemporalRelation) -> Result<FactorDigraph> {
    if e.n != 2 {
        return Err(Error::ArityMismatch(format!("factor digraph needs a binary relation, got arity {}", e.n)));
    }
    let k = e.k;
    let mut vs: BTreeSet<WeakOrder> = e.component_orbits(0);
    vs.extend(e.component_orbits(1));
    let vertices: Vec<WeakOrder> = vs.into_iter().collect();
    let index: BTreeMap<WeakOrder, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let edges: BTreeSet<(usize, usize)> =
        e.orbits().iter().map(|o| (index[&o.block(0, k)], index[&o.block(1, k)])).collect();

    let nv = vertices.len();
    let mut adj: Vec<Vec<WalkStep>> = vec![Vec::new(); nv];
    for &(a, b) in &edges {
        adj[a].push(WalkStep { from: a, to: b, forward: true });
        if a != b {
            adj[b].push(WalkStep { from: b, to: a, forward: false });
        }
    }
    let mut component = vec![usize::MAX; nv];
    let mut components = Vec::new();
    let mut potential = vec![0i64; nv];
    let mut parent = vec![None; nv];
    for root in 0..nv {
        if component[root] != usize::MAX {
            continue;
        }
        let c = components.len();
        let mut members = vec![root];
        component[root] = c;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for s in &adj[u] {
                if component[s.to] == usize::MAX {
                    component[s.to] = c;
                    potential[s.to] = potential[u] + if s.forward { 1 } else { -1 };
                    parent[s.to] = Some(*s);
                    members.push(s.to);
                    queue.push_back(s.to);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    let mut gcd = vec![0u64; components.len()];
    for &(a, b) in &edges {
        let d = (potential[a] + 1 - potential[b]).unsigned_abs();
        let c = component[a];
        gcd[c] = gcd[c].gcd(&d);
    }
    let gcd = gcd.into_iter().map(|g| (g != 0).then_some(g)).collect();
    Ok(FactorDigraph { k, vertices, edges, component, components, gcd, potential, parent, index })
}

impl FactorDigraph {
    pub fn index_of(&self, v: &WeakOrder) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn component_vertices(&self, c: usize) -> BTreeSet<WeakOrder> {
        self.components[c].iter().map(|&v| self.vertices[v].clone()).collect()
    }

    pub fn has_length_one(&self, c: usize) -> bool {
        self.gcd[c] == Some(1)
    }

    /// Components admitting a closed walk of algebraic length 1, ascending.
    pub fn length_one_components(&self) -> Vec<usize> {
        (0..self.components.len()).filter(|&c| self.has_length_one(c)).collect()
    }

    fn root_path(&self, v: usize) -> Vec<WalkStep> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(s) = self.parent[cur] {
            path.push(s);
            cur = s.from;
        }
        path.reverse();
        path
    }

    /// A closed walk of algebraic length 1 inside component `c`, starting at
    /// its least vertex.
    pub fn length_one_walk(&self, c: usize) -> Option<Vec<WalkStep>> {
        if !self.has_length_one(c) {
            return None;
        }
        // Every edge closes a cycle through the spanning tree whose algebraic
        // length is its discrepancy; combine them with Bezout coefficients.
        let mut cycles: Vec<(i64, Vec<WalkStep>)> = Vec::new();
        for &(a, b) in &self.edges {
            if self.component[a] != c {
                continue;
            }
            let d = self.potential[a] + 1 - self.potential[b];
            if d == 0 {
                continue;
            }
            let mut cyc = self.root_path(a);
            cyc.push(WalkStep { from: a, to: b, forward: true });
            cyc.extend(self.root_path(b).iter().rev().map(WalkStep::reversed));
            cycles.push((d, cyc));
        }
        let coeffs = bezout(&cycles.iter().map(|(d, _)| *d).collect::<Vec<_>>())?;
        let mut walk = Vec::new();
        for ((_, cyc), coef) in cycles.iter().zip(coeffs) {
            for _ in 0..coef.unsigned_abs() {
                if coef > 0 {
                    walk.extend_from_slice(cyc);
                } else {
                    walk.extend(cyc.iter().rev().map(WalkStep::reversed));
                }
            }
        }
        Some(walk)
    }

    /// Checks that `walk` is closed, uses only factor edges, and returns its
    /// algebraic length.
    pub fn replay_walk(&self, walk: &[WalkStep]) -> Result<i64> {
        for w in walk.windows(2) {
            if w[0].to != w[1].from {
                return Err(Error::Precondition("walk is not contiguous".into()));
            }
        }
        if let (Some(f), Some(l)) = (walk.first(), walk.last()) {
            if f.from != l.to {
                return Err(Error::Precondition("walk is not closed".into()));
            }
        }
        if let Some(s) = walk.iter().find(|s| !self.edges.contains(&s.edge())) {
            return Err(Error::Precondition(format!("walk step {s:?} is not an edge")));
        }
        Ok(algebraic_length(walk))
    }

    fn power_step(&self, reach: &[Vec<bool>], members: &[usize]) -> Vec<Vec<bool>> {
        let nv = self.vertices.len();
        let mut out = vec![vec![false; nv]; nv];
        for &a in members {
            for &mid in members {
                if reach[a][mid] {
                    for &b in members {
                        if self.edges.contains(&(mid, b)) {
                            out[a][b] = true;
                        }
                    }
                }
            }
        }
        out
    }

    fn tip_graph_connected(&self, reach: &[Vec<bool>], members: &[usize]) -> bool {
        let start = members[0];
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            for &b in members {
                if !seen.contains(&b) && members.iter().any(|&c| reach[a][c] && reach[b][c]) {
                    seen.insert(b);
                    queue.push_back(b);
                }
            }
        }
        seen.len() == members.len()
    }

    /// Least `m` such that any two vertices of component `c` are joined by a
    /// fence of `m`-step walks.
    pub fn linking_exponent(&self, c: usize) -> Result<usize> {
        let members = &self.components[c];
        let nv = self.vertices.len();
        let mut reach = vec![vec![false; nv]; nv];
        for &(a, b) in &self.edges {
            if self.component[a] == c {
                reach[a][b] = true;
            }
        }
        let mut seen: HashSet<Vec<Vec<bool>>> = HashSet::new();
        let mut m = 1;
        loop {
            if self.tip_graph_connected(&reach, members) {
                return Ok(m);
            }
            if !seen.insert(reach.clone()) {
                return Err(Error::NoFence(format!("component {c} is not linked")));
            }
            reach = self.power_step(&reach, members);
            m += 1;
        }
    }

    /// Vertices reachable from `a` in exactly `h` steps, for `h = 0..=m`.
    fn layers(&self, a: usize, m: usize) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::from([a])];
        for _ in 0..m {
            let next: BTreeSet<usize> = self
                .edges
                .iter()
                .filter(|(x, _)| out.last().unwrap().contains(x))
                .map(|&(_, y)| y)
                .collect();
            out.push(next);
        }
        out
    }

    /// A walk of exactly `m` forward steps from `a` to `top`, as the visited
    /// vertices, choosing the least predecessor at every level.
    fn up_walk(&self, a: usize, top: usize, m: usize) -> Option<Vec<usize>> {
        let layers = self.layers(a, m);
        if !layers[m].contains(&top) {
            return None;
        }
        let mut walk = vec![top];
        let mut cur = top;
        for h in (0..m).rev() {
            cur = *layers[h].iter().find(|&&p| self.edges.contains(&(p, cur)))?;
            walk.push(cur);
        }
        walk.reverse();
        Some(walk)
    }

    /// An `m`-fence from `a` to `b`: strands of `m + 1` vertices listed from
    /// the lower tip up. Odd-numbered strands (counting from 1) are climbed,
    /// even-numbered ones descended.
    pub fn find_fence(&self, a: usize, b: usize, m: usize) -> Result<Vec<Vec<usize>>> {
        if self.component[a] != self.component[b] {
            return Err(Error::NoFence("endpoints lie in different components".into()));
        }
        let members = &self.components[self.component[a]];
        let nv = self.vertices.len();
        let mut reach = vec![vec![false; nv]; nv];
        for &(x, y) in &self.edges {
            if self.component[x] == self.component[a] {
                reach[x][y] = true;
            }
        }
        for _ in 1..m {
            reach = self.power_step(&reach, members);
        }
        // Breadth-first search over lower tips; each hop goes up to a shared
        // upper tip and back down.
        let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut queue = VecDeque::from([a]);
        let mut seen = BTreeSet::from([a]);
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for &y in members {
                if seen.contains(&y) {
                    continue;
                }
                if let Some(&top) = members.iter().find(|&&t| reach[x][t] && reach[y][t]) {
                    seen.insert(y);
                    prev.insert(y, (x, top));
                    queue.push_back(y);
                }
            }
        }
        if a == b {
            // One up-down pair through the least reachable upper tip.
            let top = *members.iter().find(|&&t| reach[a][t]).ok_or_else(|| Error::NoFence("dead end".into()))?;
            let s = self.up_walk(a, top, m).ok_or_else(|| Error::NoFence("no walk".into()))?;
            return Ok(vec![s.clone(), s]);
        }
        if !seen.contains(&b) {
            return Err(Error::NoFence(format!("no {m}-fence between the given vertices")));
        }
        let mut hops = Vec::new();
        let mut cur = b;
        while cur != a {
            let (p, top) = prev[&cur];
            hops.push((p, top, cur));
            cur = p;
        }
        hops.reverse();
        let mut strands = Vec::new();
        for (x, top, y) in hops {
            strands.push(self.up_walk(x, top, m).ok_or_else(|| Error::NoFence("no walk".into()))?);
            strands.push(self.up_walk(y, top, m).ok_or_else(|| Error::NoFence("no walk".into()))?);
        }
        Ok(strands)
    }
}

/// Integer coefficients `c` with `sum c_i * d_i = 1`, if the gcd is 1.
pub fn bezout(ds: &[i64]) -> Option<Vec<i64>> {
    let mut g = 0i64;
    let mut coeffs: Vec<i64> = Vec::with_capacity(ds.len());
    for &d in ds {
        if g == 1 {
            coeffs.push(0);
            continue;
        }
        // Invariant: sum coeffs_i * ds_i = g.
        let e = i64::extended_gcd(&g, &d);
        let (mut x, mut y, mut ng) = (e.x, e.y, e.gcd);
        if ng < 0 {
            ng = -ng;
            x = -x;
            y = -y;
        }
        for c in coeffs.iter_mut() {
            *c *= x;
        }
        coeffs.push(y);
        g = ng;
    }
    (g == 1).then_some(coeffs)
}

/// A fence whose vertices are concrete tuples; consecutive vertices of every
/// strand form an edge of the relation.
#[derive(Clone, Debug)]
pub struct GroundFence {
    pub strands: Vec<Vec<GroundTuple>>,
}

impl GroundFence {
    pub fn lower_tips(&self) -> Vec<&GroundTuple> {
        let mut out: Vec<&GroundTuple> = Vec::new();
        for (i, s) in self.strands.iter().enumerate() {
            if i == 0 || i % 2 == 1 {
                out.push(&s[0]);
            }
        }
        out
    }

    pub fn edges(&self) -> Vec<GroundTuple> {
        self.strands
            .iter()
            .flat_map(|s| s.windows(2).map(|w| GroundTuple::concat(&[w[0].clone(), w[1].clone()])))
            .collect()
    }
}

/// Least orbit of `e` with the given component orbits.
pub fn edge_orbit(e: &TemporalRelation, from: &WeakOrder, to: &WeakOrder) -> Option<WeakOrder> {
    e.orbits().iter().find(|o| o.block(0, e.k) == *from && o.block(1, e.k) == *to).cloned()
}

/// Realizes an edge of orbit `o` whose component `fixed_block` is `t`; returns
/// the other component.
pub fn extend_edge(o: &WeakOrder, k: usize, fixed_block: usize, t: &GroundTuple) -> Result<GroundTuple> {
    let fixed: Vec<_> = (0..k).map(|i| (fixed_block * k + i, t.values()[i].clone())).collect();
    let g = realize(o, &fixed)?;
    Ok(g.block(1 - fixed_block, k))
}

/// Lifts factor-level strands to tuples, starting from `start` at the lower
/// tip of the first strand. Shared tips reuse the same tuple.
pub fn lift_fence(
    e: &TemporalRelation,
    f: &FactorDigraph,
    strands: &[Vec<usize>],
    start: &GroundTuple,
) -> Result<GroundFence> {
    let k = e.k;
    let mut out: Vec<Vec<GroundTuple>> = Vec::new();
    let mut tip = start.clone();
    for (i, s) in strands.iter().enumerate() {
        let m = s.len() - 1;
        let mut ground: Vec<Option<GroundTuple>> = vec![None; m + 1];
        if i % 2 == 0 {
            ground[0] = Some(tip.clone());
            for h in 0..m {
                let o = edge_orbit(e, &f.vertices[s[h]], &f.vertices[s[h + 1]])
                    .ok_or_else(|| Error::NoFence("strand step is not an edge".into()))?;
                ground[h + 1] = Some(extend_edge(&o, k, 0, ground[h].as_ref().unwrap())?);
            }
        } else {
            ground[m] = Some(tip.clone());
            for h in (0..m).rev() {
                let o = edge_orbit(e, &f.vertices[s[h]], &f.vertices[s[h + 1]])
                    .ok_or_else(|| Error::NoFence("strand step is not an edge".into()))?;
                ground[h] = Some(extend_edge(&o, k, 1, ground[h + 1].as_ref().unwrap())?);
            }
        }
        let ground: Vec<GroundTuple> = ground.into_iter().map(Option::unwrap).collect();
        tip = if i % 2 == 0 { ground[m].clone() } else { ground[0].clone() };
        out.push(ground);
    }
    Ok(GroundFence { strands: out })
}

/// Pseudo-algebraic length 1: some component of the factor has a closed
/// walk of algebraic length 1. Returns the least such component's walk.
pub fn pseudo_algebraic_length_one(e: &TemporalRelation) -> Result<(bool, Option<Vec<WalkStep>>)> {
    let f = factor_digraph(e)?;
    match f.length_one_components().first() {
        Some(&c) => Ok((true, f.length_one_walk(c))),
        None => Ok((false, None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u32]) -> WeakOrder {
        WeakOrder::new(v.to_vec()).unwrap()
    }

    fn rel(k: usize, os: &[&[u32]]) -> TemporalRelation {
        TemporalRelation::new(2, k, os.iter().map(|o| w(o))).unwrap()
    }

    /// Factor-level relation on abstract vertices: vertex `i` is the 2-tuple
    /// orbit with index `i` among the three.
    fn digraph(edges: &[(usize, usize)]) -> FactorDigraph {
        let vs = crate::orbit::enumerate_weak_orders(2).unwrap();
        let orbits = edges.iter().map(|&(a, b)| WeakOrder::concat(&[&vs[a], &vs[b]]));
        // Concatenated orbits need joint canonical ranks; any joint order works.
        let orbits: Vec<WeakOrder> =
            orbits.map(|o| crate::orbit::canonicalize_slice(&(0..4).map(|i| (i as u32 / 2) * 10 + o.ranks()[i]).collect::<Vec<_>>())).collect();
        factor_digraph(&TemporalRelation::new(2, 2, orbits).unwrap()).unwrap()
    }

    #[test]
    fn factor_examples() {
        let f = factor_digraph(&rel(1, &[&[0, 1]])).unwrap();
        assert_eq!(f.vertices.len(), 1);
        assert_eq!(f.edges, BTreeSet::from([(0, 0)]));
        let f = factor_digraph(&rel(1, &[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(f.edges.len(), 1);
        let f = factor_digraph(&rel(2, &[&[0, 1, 1, 2]])).unwrap();
        assert_eq!(f.vertices, vec![w(&[0, 1])]);
        assert_eq!(f.edges, BTreeSet::from([(0, 0)]));
    }

    #[test]
    fn algebraic_length_examples() {
        let f = digraph(&[(0, 0)]);
        let walk = f.length_one_walk(0).unwrap();
        assert_eq!(walk.len(), 1);
        assert_eq!(f.replay_walk(&walk).unwrap(), 1);

        let f = digraph(&[(0, 1), (1, 0)]);
        assert_eq!(f.gcd[0], Some(2));
        assert!(f.length_one_walk(0).is_none());

        let f = digraph(&[(0, 1), (1, 2), (0, 2)]);
        assert!(f.has_length_one(0));
        let walk = f.length_one_walk(0).unwrap();
        assert_eq!(f.replay_walk(&walk).unwrap(), 1);

        let f = digraph(&[(0, 1), (1, 2)]);
        assert_eq!(f.gcd[0], None);
    }

    #[test]
    fn bezout_combines() {
        let c = bezout(&[6, 10, 15]).unwrap();
        assert_eq!(c[0] * 6 + c[1] * 10 + c[2] * 15, 1);
        assert!(bezout(&[4, 6]).is_none());
        assert_eq!(bezout(&[-1]).unwrap(), vec![-1]);
    }

    #[test]
    fn fences_on_small_factors() {
        let f = digraph(&[(0, 0)]);
        let m = f.linking_exponent(0).unwrap();
        assert_eq!(m, 1);
        let s = f.find_fence(0, 0, m).unwrap();
        assert_eq!(s.len(), 2);

        let f = digraph(&[(0, 1), (1, 0), (0, 0)]);
        let m = f.linking_exponent(0).unwrap();
        let s = f.find_fence(0, 1, m).unwrap();
        assert_eq!(s.first().unwrap()[0], 0);
        assert_eq!(s.last().unwrap()[0], 1);
        for st in &s {
            for w in st.windows(2) {
                assert!(f.has_edge(w[0], w[1]));
            }
        }

        let f = digraph(&[(0, 1), (1, 0)]);
        assert!(matches!(f.linking_exponent(0), Err(Error::NoFence(_))));
    }

    #[test]
    fn lifted_fence_shares_tips() {
        let e = rel(1, &[&[0, 1], &[1, 0], &[0, 0]]);
        let f = factor_digraph(&e).unwrap();
        let m = f.linking_exponent(0).unwrap();
        let s = f.find_fence(0, 0, m).unwrap();
        let g = lift_fence(&e, &f, &s, &GroundTuple::from_ints(&[0])).unwrap();
        assert_eq!(g.strands[0][m], g.strands[1][m]);
        for edge in g.edges() {
            assert!(e.contains(&edge.canonicalize()));
        }
    }
}
