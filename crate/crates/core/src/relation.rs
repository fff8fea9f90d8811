//! Temporal relations as finite sets of orbits, with optional witness terms.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minclean::implies;
use crate::ops::{dual_of, image_orbits, images, BaseOp, OpKind};
use crate::orbit::{GroundTuple, Kernel, WeakOrder};
use crate::term::{Arena, Node, Term};

/// Default cap on the number of orbits a closure may reach.
pub const DEFAULT_BUDGET: usize = 20_000;

/// Entries kept by an [`ImageCache`] before it starts over.
const CACHE_ENTRIES: usize = 4_000_000;

/// Image orbits of pairs of orbits, shared between closures. Orbits are
/// interned; image lists keep the order of [`WeakOrder`], so results never
/// depend on what the cache already holds.
#[derive(Default)]
pub struct ImageCache {
    inner: Mutex<CacheInner>,
}

#[derive(Default)]
struct CacheInner {
    ids: FxHashMap<WeakOrder, u32>,
    orbits: Vec<WeakOrder>,
    images: FxHashMap<(OpKind, u32, u32), Arc<[u32]>>,
}

impl CacheInner {
    fn intern(&mut self, w: &WeakOrder) -> u32 {
        if let Some(&id) = self.ids.get(w) {
            return id;
        }
        let id = self.orbits.len() as u32;
        self.orbits.push(w.clone());
        self.ids.insert(w.clone(), id);
        id
    }
}

impl ImageCache {
    pub fn intern(&self, w: &WeakOrder) -> u32 {
        self.inner.lock().unwrap().intern(w)
    }

    pub fn orbit(&self, id: u32) -> WeakOrder {
        self.inner.lock().unwrap().orbits[id as usize].clone()
    }

    /// Sorted, duplicate-free image orbits of `kind` on the pair `(x, y)`.
    pub fn images(&self, kind: OpKind, x: u32, y: u32) -> Result<Arc<[u32]>> {
        let (o1, o2) = {
            let inner = self.inner.lock().unwrap();
            if let Some(hit) = inner.images.get(&(kind, x, y)) {
                return Ok(hit.clone());
            }
            (inner.orbits[x as usize].clone(), inner.orbits[y as usize].clone())
        };
        let mut imgs = image_orbits(kind, &o1, &o2)?;
        imgs.sort();
        imgs.dedup();
        let mut inner = self.inner.lock().unwrap();
        let ids: Arc<[u32]> = imgs.iter().map(|w| inner.intern(w)).collect();
        if inner.images.len() >= CACHE_ENTRIES {
            inner.images.clear();
        }
        inner.images.insert((kind, x, y), ids.clone());
        Ok(ids)
    }
}

/// Generator tuples plus one derivation node per orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witnesses {
    pub generators: Vec<GroundTuple>,
    pub arena: Arena,
    pub node_of: BTreeMap<WeakOrder, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalRelation {
    pub n: usize,
    pub k: usize,
    orbits: BTreeSet<WeakOrder>,
    witnesses: Option<Witnesses>,
    /// Set when the orbit set is known to be closed under this kind.
    closed_under: Option<OpKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryGroup {
    pub degree: usize,
    /// Permutations `p`, read as "component `i` of the image is component
    /// `p[i]` of the original".
    pub generators: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationChecks {
    pub smooth: Option<bool>,
    pub cyclic: bool,
    pub symmetric: bool,
    pub two_transitive: bool,
    pub group_order: usize,
}

impl TemporalRelation {
    pub fn new(n: usize, k: usize, orbits: impl IntoIterator<Item = WeakOrder>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::ArityMismatch("arity and dimension must be positive".into()));
        }
        let orbits: BTreeSet<WeakOrder> = orbits.into_iter().collect();
        if let Some(bad) = orbits.iter().find(|o| o.len() != n * k) {
            return Err(Error::ArityMismatch(format!("orbit {bad} has length {}, expected {}", bad.len(), n * k)));
        }
        Ok(TemporalRelation { n, k, orbits, witnesses: None, closed_under: None })
    }

    /// Relation generated by concrete tuples; each orbit's witness is the
    /// first generator in it.
    pub fn from_generators(n: usize, k: usize, generators: Vec<GroundTuple>) -> Result<Self> {
        let mut arena = Arena::default();
        let mut node_of = BTreeMap::new();
        for (i, g) in generators.iter().enumerate() {
            if g.len() != n * k {
                return Err(Error::ArityMismatch(format!("generator {i} has length {}", g.len())));
            }
            let node = arena.push(Node::Gen(i));
            node_of.entry(g.canonicalize()).or_insert(node);
        }
        let mut r = TemporalRelation::new(n, k, node_of.keys().cloned())?;
        r.witnesses = Some(Witnesses { generators, arena, node_of });
        Ok(r)
    }

    pub fn orbits(&self) -> &BTreeSet<WeakOrder> {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn contains(&self, w: &WeakOrder) -> bool {
        self.orbits.contains(w)
    }

    pub fn closed_under(&self) -> Option<OpKind> {
        self.closed_under
    }

    /// Declares the orbit set closed under `kind` without checking.
    pub fn mark_closed(mut self, kind: OpKind) -> Self {
        self.closed_under = Some(kind);
        self
    }

    pub fn witnesses(&self) -> Option<&Witnesses> {
        self.witnesses.as_ref()
    }

    /// Witnesses, or generator terms over the canonical grounds of the orbits
    /// in ascending order.
    pub fn witnesses_or_default(&self) -> Witnesses {
        if let Some(w) = &self.witnesses {
            return w.clone();
        }
        let mut arena = Arena::default();
        let mut node_of = BTreeMap::new();
        let mut generators = Vec::new();
        for (i, o) in self.orbits.iter().enumerate() {
            generators.push(o.ground());
            node_of.insert(o.clone(), arena.push(Node::Gen(i)));
        }
        Witnesses { generators, arena, node_of }
    }

    pub fn with_default_witnesses(mut self) -> Self {
        self.witnesses = Some(self.witnesses_or_default());
        self
    }

    pub fn generator_tuples(&self) -> Vec<GroundTuple> {
        self.witnesses_or_default().generators
    }

    pub fn term_for(&self, w: &WeakOrder) -> Option<Term> {
        if !self.contains(w) {
            return None;
        }
        match &self.witnesses {
            Some(wit) => wit.node_of.get(w).map(|&n| wit.arena.extract(n)),
            None => self.orbits.iter().position(|o| o == w).map(Term::generator),
        }
    }

    /// Replays every witness term and compares it with its orbit.
    pub fn verify_witnesses(&self) -> Result<()> {
        let gens = self.generator_tuples();
        for o in &self.orbits {
            let t = self.term_for(o).ok_or_else(|| Error::EmptyResult(format!("no witness for {o}")))?;
            let got = t.eval(&gens)?.canonicalize();
            if got != *o {
                return Err(Error::InconsistentAlignment(format!("witness for {o} evaluates to {got}")));
            }
        }
        Ok(())
    }

    /// Keeps the orbits satisfying `keep`; witnesses are retained.
    pub fn filter(&self, keep: impl Fn(&WeakOrder) -> bool) -> TemporalRelation {
        let orbits: BTreeSet<WeakOrder> = self.orbits.iter().filter(|o| keep(o)).cloned().collect();
        let witnesses = self.witnesses.clone().map(|mut w| {
            w.node_of.retain(|o, _| orbits.contains(o));
            w
        });
        TemporalRelation { n: self.n, k: self.k, orbits, witnesses, closed_under: None }
    }

    /// Least superset closed under `kind` (with all automorphisms applied to
    /// the arguments). New orbits are discovered in a fixed order and keep
    /// their first derivation.
    pub fn closure(&self, kind: OpKind, budget: usize) -> Result<TemporalRelation> {
        self.closure_with(kind, budget, &ImageCache::default())
    }

    /// [`closure`](Self::closure) drawing images from a shared cache.
    pub fn closure_with(&self, kind: OpKind, budget: usize, cache: &ImageCache) -> Result<TemporalRelation> {
        self.saturate(kind, budget, cache, false)
    }

    /// Saturation that only combines members with the original orbits:
    /// `kind` is applied to pairs in which one side is a member of `self`.
    /// Its result is contained in the closure, and every member carries a
    /// derivation as usual.
    pub fn linear_closure_with(&self, kind: OpKind, budget: usize, cache: &ImageCache) -> Result<TemporalRelation> {
        self.saturate(kind, budget, cache, true)
    }

    fn saturate(&self, kind: OpKind, budget: usize, cache: &ImageCache, linear: bool) -> Result<TemporalRelation> {
        if self.orbits.is_empty() {
            return Err(Error::EmptyResult("closure of an empty relation".into()));
        }
        let mut wit = self.witnesses_or_default();
        let sym = self.position_symmetries();
        let is_rep = |w: &WeakOrder| sym.iter().all(|p| w.select(p) >= *w);
        let mut list: Vec<WeakOrder> = self.orbits.iter().cloned().collect();
        let mut ids: Vec<u32> = list.iter().map(|w| cache.intern(w)).collect();
        let mut rep: Vec<bool> = list.iter().map(is_rep).collect();
        let mut seen: FxHashSet<u32> = ids.iter().copied().collect();
        let mut i = 0;
        while i < list.len() {
            // Candidate orbits for the pairs (i, j) and (j, i) with j <= i
            // (j an original orbit in linear mode), found in parallel
            // against the orbits known so far. The list is
            // closed under the symmetries, so pairs whose first member is not
            // the least of its class are covered by a permuted pair.
            let (snapshot, known, reps) = (&ids, &seen, &rep);
            let last = if linear { i.min(self.orbits.len() - 1) } else { i };
            let batch: Vec<(u32, usize, usize)> = (0..=last)
                .into_par_iter()
                .map(|j| -> Result<Vec<_>> {
                    let pairs: &[(usize, usize)] = if i == j { &[(i, i)] } else { &[(i, j), (j, i)] };
                    let mut out = Vec::new();
                    for &(x, y) in pairs.iter().filter(|(x, _)| reps[*x]) {
                        let imgs = cache.images(kind, snapshot[x], snapshot[y])?;
                        out.extend(imgs.iter().filter(|w| !known.contains(w)).map(|&w| (w, x, y)));
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            for (id, x, y) in batch {
                if !seen.insert(id) {
                    continue;
                }
                let img = cache.orbit(id);
                let al = images(kind, &list[x], &list[y])?
                    .into_iter()
                    .find(|(w, _)| *w == img)
                    .map(|(_, al)| al)
                    .expect("image orbit has an alignment");
                for (t, p) in sym.iter().enumerate() {
                    let w = img.select(p);
                    let wid = cache.intern(&w);
                    if t > 0 && !seen.insert(wid) {
                        continue;
                    }
                    let args = [wit.node_of[&list[x].select(p)], wit.node_of[&list[y].select(p)]];
                    let node = wit.arena.push(Node::Apply { kind, align: al.restrict(p), args });
                    wit.node_of.insert(w.clone(), node);
                    rep.push(is_rep(&w));
                    list.push(w);
                    ids.push(wid);
                    if list.len() > budget {
                        return Err(Error::BudgetExceeded { limit: budget });
                    }
                }
            }
            i += 1;
        }
        Ok(TemporalRelation {
            n: self.n,
            k: self.k,
            orbits: list.into_iter().collect(),
            witnesses: Some(wit),
            closed_under: Some(kind),
        })
    }

    /// Position permutations that permute the components and, in the same
    /// way inside every component, the coordinates, and fix the relation.
    /// The identity comes first.
    pub fn position_symmetries(&self) -> Vec<Vec<usize>> {
        let (n, k) = (self.n, self.k);
        let mut out = Vec::new();
        for sigma in permutations(n) {
            for tau in permutations(k) {
                let p: Vec<usize> = (0..n * k).map(|i| sigma[i / k] * k + tau[i % k]).collect();
                if self.orbits.iter().all(|w| self.orbits.contains(&w.select(&p))) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Whether every application of `kind` to members stays inside.
    pub fn preserves(&self, kind: OpKind) -> Result<bool> {
        if self.closed_under == Some(kind) {
            return Ok(true);
        }
        let list: Vec<&WeakOrder> = self.orbits.iter().collect();
        if list.is_empty() {
            return Ok(true);
        }
        if kind.base == BaseOp::Constant {
            return Ok(self.contains(&WeakOrder::constant(self.n * self.k)));
        }
        let escapes = (0..list.len())
            .into_par_iter()
            .map(|x| -> Result<bool> {
                for y in &list {
                    if image_orbits(kind, list[x], y)?.iter().any(|img| !self.orbits.contains(img)) {
                        return Ok(true);
                    }
                }
                Ok(false)
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(!escapes.into_iter().any(|e| e))
    }

    /// Intersection of the kernels of all members.
    pub fn kernel_intersection(&self) -> Kernel {
        let mut it = self.orbits.iter();
        let Some(first) = it.next() else { return Kernel::new() };
        let mut k = first.kernel();
        for o in it {
            let ko = o.kernel();
            k.retain(|p| ko.contains(p));
        }
        k
    }

    /// Members of the lex-closure whose kernel is the intersection of all
    /// kernels of `self`.
    pub fn derivative(&self, budget: usize) -> Result<TemporalRelation> {
        let target = self.kernel_intersection();
        let lex_closed = self.closed_under.is_some_and(|c| implies(c, OpKind::LEX));
        let closed = if lex_closed { self.clone() } else { self.closure(OpKind::LEX, budget)? };
        let out = closed.filter(|o| o.kernel() == target);
        if out.is_empty() {
            return Err(Error::EmptyResult("derivative is empty".into()));
        }
        Ok(out)
    }

    /// Orbit-wise order reversal; witnesses become dual terms over negated
    /// generators.
    pub fn negate(&self) -> TemporalRelation {
        let witnesses = self.witnesses.as_ref().map(|w| Witnesses {
            generators: w.generators.iter().map(GroundTuple::negate).collect(),
            arena: w.arena.map_nodes(|n| match n {
                Node::Gen(i) => Node::Gen(*i),
                Node::Apply { kind, align, args } => {
                    Node::Apply { kind: dual_of(*kind), align: align.reverse(), args: *args }
                }
            }),
            node_of: w.node_of.iter().map(|(o, &id)| (o.negate(), id)).collect(),
        });
        TemporalRelation {
            n: self.n,
            k: self.k,
            orbits: self.orbits.iter().map(WeakOrder::negate).collect(),
            witnesses,
            closed_under: self.closed_under.map(dual_of),
        }
    }

    /// Projection to the flat positions `positions`, read as a relation of
    /// arity `n` on tuples of length `k`.
    pub fn select_positions(&self, positions: &[usize], n: usize, k: usize) -> Result<TemporalRelation> {
        if positions.is_empty() || positions.len() != n * k {
            return Err(Error::ArityMismatch("projection needs n*k positions".into()));
        }
        if positions.iter().any(|&p| p >= self.n * self.k) {
            return Err(Error::ArityMismatch("projection position out of range".into()));
        }
        let witnesses = self.witnesses.as_ref().map(|w| {
            let mut node_of: BTreeMap<WeakOrder, usize> = BTreeMap::new();
            for (o, &id) in &w.node_of {
                let p = o.select(positions);
                let e = node_of.entry(p).or_insert(id);
                *e = (*e).min(id);
            }
            Witnesses {
                generators: w.generators.iter().map(|g| g.select(positions)).collect(),
                arena: w.arena.map_nodes(|n| match n {
                    Node::Gen(i) => Node::Gen(*i),
                    Node::Apply { kind, align, args } => {
                        Node::Apply { kind: *kind, align: align.restrict(positions), args: *args }
                    }
                }),
                node_of,
            }
        });
        Ok(TemporalRelation {
            n,
            k,
            orbits: self.orbits.iter().map(|o| o.select(positions)).collect(),
            witnesses,
            closed_under: None,
        })
    }

    /// Projection to the listed components.
    pub fn project(&self, blocks: &[usize]) -> Result<TemporalRelation> {
        if blocks.is_empty() || blocks.iter().any(|&b| b >= self.n) {
            return Err(Error::ArityMismatch("invalid component selection".into()));
        }
        let positions: Vec<usize> = blocks.iter().flat_map(|&b| b * self.k..(b + 1) * self.k).collect();
        self.select_positions(&positions, blocks.len(), self.k)
    }

    /// Keeps coordinates `coords` inside every component.
    pub fn project_coords(&self, coords: &[usize]) -> Result<TemporalRelation> {
        if coords.is_empty() || coords.iter().any(|&c| c >= self.k) {
            return Err(Error::ArityMismatch("invalid coordinate selection".into()));
        }
        let positions: Vec<usize> = (0..self.n).flat_map(|b| coords.iter().map(move |&c| b * self.k + c)).collect();
        self.select_positions(&positions, self.n, coords.len())
    }

    /// Orbits of single components occurring anywhere in the relation.
    pub fn component_orbits(&self, block: usize) -> BTreeSet<WeakOrder> {
        self.orbits.iter().map(|o| o.block(block, self.k)).collect()
    }

    pub fn is_smooth(&self) -> Result<bool> {
        if self.n != 2 {
            return Err(Error::ArityMismatch(format!("smoothness needs a binary relation, got arity {}", self.n)));
        }
        Ok(self.component_orbits(0) == self.component_orbits(1))
    }

    /// Edges whose endpoint orbits both lie in `vertices`.
    pub fn restrict_component(&self, vertices: &BTreeSet<WeakOrder>) -> Result<TemporalRelation> {
        if self.n != 2 {
            return Err(Error::ArityMismatch("restriction to a component needs a binary relation".into()));
        }
        let k = self.k;
        let out = self.filter(|o| vertices.contains(&o.block(0, k)) && vertices.contains(&o.block(1, k)));
        if out.is_empty() {
            return Err(Error::EmptyResult("no edge inside the component".into()));
        }
        Ok(out)
    }

    pub fn permuted(&self, perm: &[usize]) -> BTreeSet<WeakOrder> {
        self.orbits.iter().map(|o| o.permute_blocks(perm, self.k)).collect()
    }

    pub fn invariant_under(&self, perm: &[usize]) -> bool {
        self.orbits.iter().all(|o| self.orbits.contains(&o.permute_blocks(perm, self.k)))
    }

    pub fn invariant_under_group(&self, g: &SymmetryGroup) -> bool {
        g.degree == self.n && g.generators.iter().all(|p| self.invariant_under(p))
    }

    /// All component permutations leaving the relation invariant.
    pub fn symmetry_group(&self) -> SymmetryGroup {
        let generators = permutations(self.n).into_iter().filter(|p| self.invariant_under(p)).collect();
        SymmetryGroup { degree: self.n, generators }
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_under(&cycle(self.n))
    }

    pub fn checks(&self) -> RelationChecks {
        let g = self.symmetry_group();
        RelationChecks {
            smooth: self.is_smooth().ok(),
            cyclic: self.is_cyclic(),
            symmetric: g.generators.len() == (1..=self.n).product::<usize>(),
            two_transitive: g.is_two_transitive(),
            group_order: g.generators.len(),
        }
    }

    /// Members whose components all lie in one orbit.
    pub fn pseudo_loop_orbits(&self) -> Vec<WeakOrder> {
        self.orbits.iter().filter(|o| is_pseudo_loop(o, self.k)).cloned().collect()
    }
}

pub fn is_pseudo_loop(o: &WeakOrder, k: usize) -> bool {
    let blocks = o.blocks(k);
    blocks.iter().all(|b| *b == blocks[0])
}

/// The cyclic shift sending component `i` to `i + 1`.
pub fn cycle(n: usize) -> Vec<usize> {
    (0..n).map(|i| (i + n - 1) % n).collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permute_rec(&mut cur, 0, &mut out);
    out.sort();
    out
}

fn permute_rec(cur: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == cur.len() {
        out.push(cur.clone());
        return;
    }
    for j in i..cur.len() {
        cur.swap(i, j);
        permute_rec(cur, i + 1, out);
        cur.swap(i, j);
    }
}

impl SymmetryGroup {
    /// Assumes `generators` lists every element, as produced by
    /// [`TemporalRelation::symmetry_group`].
    pub fn is_two_transitive(&self) -> bool {
        let n = self.degree;
        if n < 2 {
            return true;
        }
        let mut reached = BTreeSet::new();
        for p in &self.generators {
            reached.insert((p[0], p[1]));
        }
        reached.len() == n * (n - 1)
    }

    pub fn contains(&self, perm: &[usize]) -> bool {
        self.generators.iter().any(|p| p == perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u32]) -> WeakOrder {
        WeakOrder::new(v.to_vec()).unwrap()
    }

    fn rel(n: usize, k: usize, os: &[&[u32]]) -> TemporalRelation {
        TemporalRelation::new(n, k, os.iter().map(|o| w(o))).unwrap()
    }

    #[test]
    fn closure_examples() {
        let r = rel(2, 1, &[&[0, 1]]);
        assert_eq!(r.closure(OpKind::MIN, 100).unwrap().orbits(), r.orbits());
        let r = rel(2, 1, &[&[0, 1], &[1, 0]]);
        let c = r.closure(OpKind::MIN, 100).unwrap();
        assert_eq!(c.orbits(), rel(2, 1, &[&[0, 1], &[1, 0], &[0, 0]]).orbits());
        c.verify_witnesses().unwrap();
        assert_eq!(r.closure(OpKind::LEX, 100).unwrap().orbits(), r.orbits());
    }

    #[test]
    fn preserves_examples() {
        assert!(rel(2, 1, &[&[0, 1]]).preserves(OpKind::MIN).unwrap());
        assert!(!rel(2, 1, &[&[0, 1], &[1, 0]]).preserves(OpKind::MIN).unwrap());
        assert!(!rel(2, 1, &[&[0, 1]]).preserves(OpKind::CONSTANT).unwrap());
        assert!(rel(2, 1, &[&[0, 1], &[0, 0]]).preserves(OpKind::CONSTANT).unwrap());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(rel(2, 1, &[&[0, 0], &[0, 1]]).derivative(100).unwrap().orbits(), rel(2, 1, &[&[0, 1]]).orbits());
        let s = rel(2, 1, &[&[0, 1], &[1, 0]]);
        assert_eq!(s.derivative(100).unwrap().orbits(), s.orbits());
        let s = rel(2, 1, &[&[0, 0]]);
        assert_eq!(s.derivative(100).unwrap().orbits(), s.orbits());
    }

    #[test]
    fn negation_examples() {
        assert_eq!(rel(2, 1, &[&[0, 1]]).negate().orbits(), rel(2, 1, &[&[1, 0]]).orbits());
        assert_eq!(rel(2, 1, &[&[0, 0]]).negate().orbits(), rel(2, 1, &[&[0, 0]]).orbits());
        let c = rel(2, 1, &[&[0, 1], &[1, 0]]).closure(OpKind::MI, 100).unwrap();
        let n = c.negate();
        n.verify_witnesses().unwrap();
        assert_eq!(n.negate().orbits(), c.orbits());
    }

    #[test]
    fn check_examples() {
        assert_eq!(rel(2, 1, &[&[0, 1]]).is_smooth().unwrap(), true);
        let r = rel(3, 1, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        assert!(r.is_cyclic());
        assert!(r.checks().two_transitive);
        assert!(!rel(2, 1, &[&[0, 1]]).invariant_under(&[1, 0]));
        assert!(rel(3, 1, &[&[0, 0, 1]]).is_smooth().is_err());
    }

    #[test]
    fn projection_examples() {
        let r = rel(2, 2, &[&[0, 1, 1, 2]]);
        assert_eq!(r.project(&[0]).unwrap().orbits(), rel(1, 2, &[&[0, 1]]).orbits());
        let e = rel(2, 1, &[&[0, 1], &[1, 0]]);
        let all = e.component_orbits(0);
        assert_eq!(e.restrict_component(&all).unwrap().orbits(), e.orbits());
    }

    #[test]
    fn projected_witnesses_replay() {
        let r = rel(2, 2, &[&[0, 1, 1, 0], &[1, 0, 2, 2]]).closure(OpKind::MX, 1000).unwrap();
        r.verify_witnesses().unwrap();
        let p = r.project_coords(&[1]).unwrap();
        p.verify_witnesses().unwrap();
        let p = r.project(&[1]).unwrap();
        p.verify_witnesses().unwrap();
    }

    #[test]
    fn budget_is_enforced() {
        let r = rel(2, 2, &[&[0, 1, 2, 3], &[3, 2, 1, 0], &[0, 0, 1, 1]]);
        assert!(matches!(r.closure(OpKind::MI, 5), Err(Error::BudgetExceeded { limit: 5 })));
    }
}
