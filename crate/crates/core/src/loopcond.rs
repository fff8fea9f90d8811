//! Loop conditions given by finite digraphs and hypergraphs, their indicator
//! relations, and verification of the pseudo-loop condition at a fixed
//! dimension `k` with explicit witness terms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::time::Instant;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::OpKind;
use crate::orbit::{enumerate_weak_orders, GroundTuple, WeakOrder};
use crate::pseudoloop::find_pseudoloop_with;
use crate::relation::{cycle, permutations, ImageCache, TemporalRelation};
use crate::term::Term;

/// Default orbit budget per indicator closure. Indicators of 4-ary
/// structures at k = 2 reach tens of thousands of orbits.
pub const CONDITION_BUDGET: usize = 1_000_000;

pub const REPORT_SCHEMA: &str = "temporal-loops/condition-report/v1";

/// Vertices and edges of a loop condition. The order of `edges` is the
/// enumeration order: generator `i` of every witness is bound to edge `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure")]
pub struct ConditionStructure {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawStructure {
    name: String,
    vertices: Vec<String>,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<RawStructure> for ConditionStructure {
    type Error = Error;

    fn try_from(raw: RawStructure) -> Result<Self> {
        ConditionStructure::new(&raw.name, raw.vertices, raw.edges)
    }
}

impl ConditionStructure {
    pub fn new(name: &str, vertices: Vec<String>, edges: Vec<Vec<usize>>) -> Result<Self> {
        let n = edges.first().map(Vec::len).ok_or_else(|| Error::Parse("structure without edges".into()))?;
        if n < 2 {
            return Err(Error::Parse("edges need at least two entries".into()));
        }
        if edges.iter().any(|e| e.len() != n) {
            return Err(Error::ArityMismatch("edges of different lengths".into()));
        }
        if edges.iter().flatten().any(|&v| v >= vertices.len()) {
            return Err(Error::Parse("edge refers to an unknown vertex".into()));
        }
        if edges.iter().collect::<BTreeSet<_>>().len() != edges.len() {
            return Err(Error::Parse("edge listed twice".into()));
        }
        Ok(ConditionStructure { name: name.to_string(), vertices, edges })
    }

    pub fn arity(&self) -> usize {
        self.edges[0].len()
    }

    fn edge_set(&self) -> BTreeSet<Vec<usize>> {
        self.edges.iter().cloned().collect()
    }

    fn invariant_under(&self, perm: &[usize]) -> bool {
        let set = self.edge_set();
        self.edges.iter().all(|e| {
            let mut moved = vec![0; e.len()];
            for (i, &p) in perm.iter().enumerate() {
                moved[p] = e[i];
            }
            set.contains(&moved)
        })
    }

    /// The identity encoded by the structure, one side per component:
    /// `s(x, y, ...) = s(y, x, ...)`.
    pub fn identity(&self, symbol: &str) -> String {
        (0..self.arity())
            .map(|c| {
                let args: Vec<&str> = self.edges.iter().map(|e| self.vertices[e[c]].as_str()).collect();
                format!("{symbol}({})", args.join(", "))
            })
            .collect::<Vec<_>>()
            .join(" = ")
    }
}

fn named(vertices: &[&str]) -> Vec<String> {
    vertices.iter().map(|v| v.to_string()).collect()
}

/// The digraph with edges `a -> e`, `e -> r` and `a <-> r`, listed in the
/// order of `s(a, r, e, a) = s(r, a, r, e)`.
pub fn siggers4() -> ConditionStructure {
    ConditionStructure::new("siggers4", named(&["a", "e", "r"]), vec![vec![0, 2], vec![2, 0], vec![1, 2], vec![0, 1]]).unwrap()
}

/// The clique on three vertices, listed in the order of
/// `s(x, y, x, z, y, z) = s(y, x, z, x, z, y)`.
pub fn k3() -> ConditionStructure {
    let edges = vec![vec![0, 1], vec![1, 0], vec![0, 2], vec![2, 0], vec![1, 2], vec![2, 1]];
    ConditionStructure::new("k3", named(&["x", "y", "z"]), edges).unwrap()
}

/// The six non-constant triples over two vertices.
pub fn olsak() -> ConditionStructure {
    let edges = vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]];
    ConditionStructure::new("olsak", named(&["x", "y"]), edges).unwrap()
}

/// All arrangements of `(y, x, ..., x)`; edge `i` has `y` at position `i`.
pub fn wnu(n: usize) -> Result<ConditionStructure> {
    let edges = (0..n).map(|i| (0..n).map(|c| usize::from(c == i)).collect()).collect();
    ConditionStructure::new(&format!("wnu{n}"), named(&["x", "y"]), edges)
}

/// The directed cycle on `k` vertices.
pub fn cyclic(k: usize) -> Result<ConditionStructure> {
    let vertices = (1..=k).map(|i| format!("x{i}")).collect();
    ConditionStructure::new(&format!("cyclic{k}"), vertices, (0..k).map(|i| vec![i, (i + 1) % k]).collect())
}

/// Looks up `siggers4`, `k3`, `olsak`, `wnu<n>` or `cyclic<k>`.
pub fn preset(name: &str) -> Result<ConditionStructure> {
    let number = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
    match name {
        "siggers4" => Ok(siggers4()),
        "k3" | "K3" => Ok(k3()),
        "olsak" => Ok(olsak()),
        _ => {
            if let Some(n) = number("wnu").filter(|&n| n >= 2) {
                wnu(n)
            } else if let Some(k) = number("cyclic").filter(|&k| k >= 1) {
                cyclic(k)
            } else {
                Err(Error::Parse(format!("unknown preset {name:?}")))
            }
        }
    }
}

pub fn presets() -> Vec<ConditionStructure> {
    vec![siggers4(), k3(), olsak(), wnu(3).unwrap(), wnu(4).unwrap()]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisFlags {
    pub arity: usize,
    /// Digraphs only: every vertex has an incoming and an outgoing edge.
    pub smooth: Option<bool>,
    /// Digraphs only: some weakly connected component has a closed walk of
    /// algebraic length 1.
    pub algebraic_length_one: Option<bool>,
    pub cyclic: bool,
    pub symmetric: bool,
    pub two_transitive: bool,
}

impl HypothesisFlags {
    /// The failed requirements, empty when the structure qualifies.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.arity == 2 {
            if self.smooth != Some(true) {
                out.push("smooth = false");
            }
            if self.algebraic_length_one != Some(true) {
                out.push("algebraic_length_one = false");
            }
        } else {
            if !self.cyclic {
                out.push("cyclic = false");
            }
            if !self.two_transitive {
                out.push("two_transitive = false");
            }
        }
        out
    }
}

/// Greatest common divisor of the algebraic lengths of closed walks in each
/// weakly connected component, from a potential labeling.
fn component_periods(vertices: usize, edges: &[Vec<usize>]) -> Vec<i64> {
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); vertices];
    for e in edges {
        adj[e[0]].push((e[1], 1));
        adj[e[1]].push((e[0], -1));
    }
    let mut pot: Vec<Option<i64>> = vec![None; vertices];
    let mut comp = vec![usize::MAX; vertices];
    let mut periods = Vec::new();
    for s in 0..vertices {
        if pot[s].is_some() || adj[s].is_empty() {
            continue;
        }
        let c = periods.len();
        periods.push(0i64);
        pot[s] = Some(0);
        comp[s] = c;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(v, d) in &adj[u] {
                if pot[v].is_none() {
                    pot[v] = Some(pot[u].unwrap() + d);
                    comp[v] = c;
                    queue.push_back(v);
                }
            }
        }
    }
    for e in edges {
        let c = comp[e[0]];
        periods[c] = periods[c].gcd(&(pot[e[0]].unwrap() + 1 - pot[e[1]].unwrap()));
    }
    periods
}

pub fn hypothesis_report(s: &ConditionStructure) -> HypothesisFlags {
    let n = s.arity();
    let perms = permutations(n);
    let kept: Vec<&Vec<usize>> = perms.iter().filter(|p| s.invariant_under(p)).collect();
    let pairs: BTreeSet<(usize, usize)> = kept.iter().map(|p| (p[0], p[1])).collect();
    let (smooth, alg) = if n == 2 {
        let has = |side: usize| (0..s.vertices.len()).all(|v| s.edges.iter().any(|e| e[side] == v));
        (Some(has(0) && has(1)), Some(component_periods(s.vertices.len(), &s.edges).contains(&1)))
    } else {
        (None, None)
    };
    HypothesisFlags {
        arity: n,
        smooth,
        algebraic_length_one: alg,
        cyclic: s.invariant_under(&cycle(n)),
        symmetric: kept.len() == perms.len(),
        two_transitive: pairs.len() == n * (n - 1),
    }
}

fn edge_tuples(s: &ConditionStructure, assignment: &[GroundTuple]) -> Vec<GroundTuple> {
    s.edges.iter().map(|e| GroundTuple::concat(&e.iter().map(|&v| assignment[v].clone()).collect::<Vec<_>>())).collect()
}

/// The relation generated by the edges under `assignment`, with generator
/// `i` bound to edge `i`.
pub fn indicator(s: &ConditionStructure, assignment: &[GroundTuple]) -> Result<TemporalRelation> {
    if assignment.len() != s.vertices.len() {
        return Err(Error::ArityMismatch(format!("{} vertices, {} assigned tuples", s.vertices.len(), assignment.len())));
    }
    let k = assignment[0].len();
    if k == 0 || assignment.iter().any(|t| t.len() != k) {
        return Err(Error::ArityMismatch("assigned tuples of different lengths".into()));
    }
    TemporalRelation::from_generators(s.arity(), k, edge_tuples(s, assignment))
}

/// Evaluates a witness term; `Term::eval` under its specification name.
pub fn eval_term(t: &Term, generators: &[GroundTuple]) -> Result<GroundTuple> {
    t.eval(generators)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Success {
        /// Index into the report's witness table.
        witness: usize,
        orbit: WeakOrder,
        shared: WeakOrder,
    },
    Failure {
        error: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct AssignmentResult {
    /// The joint orbit of the assigned tuples, vertex after vertex.
    pub assignment: WeakOrder,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub closures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub schema: &'static str,
    pub structure: String,
    pub identity: String,
    pub clone: OpKind,
    pub k: usize,
    pub flags: HypothesisFlags,
    pub success: bool,
    pub assignments: Vec<AssignmentResult>,
    pub witnesses: Vec<Term>,
    pub counterexample: Option<WeakOrder>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl ConditionReport {
    pub fn failures(&self) -> impl Iterator<Item = &AssignmentResult> {
        self.assignments.iter().filter(|a| matches!(a.outcome, Outcome::Failure { .. }))
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.assignments.len() - self.failures().count();
        write!(f, "{} / {} / k={}: {ok} of {} assignments", self.structure, self.clone, self.k, self.assignments.len())?;
        if let Some(c) = &self.counterexample {
            write!(f, ", counterexample {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub budget: usize,
    /// Wall-clock timings make reports differ between runs, so they are
    /// only recorded on request.
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: CONDITION_BUDGET, timings: false }
    }
}

/// Checks that the witness, evaluated on the tuples each component of the
/// edges sees, gives the same orbit on every side.
fn replay(s: &ConditionStructure, assignment: &[GroundTuple], witness: &Term, shared: &WeakOrder, k: usize) -> Result<()> {
    for c in 0..s.arity() {
        let side: Vec<GroundTuple> = s.edges.iter().map(|e| assignment[e[c]].clone()).collect();
        let out = witness.project_block(c, k).eval(&side)?.canonicalize();
        if out != *shared {
            return Err(Error::Precondition(format!("side {c} replays to {out}, expected {shared}")));
        }
    }
    Ok(())
}

pub fn verify_condition(s: &ConditionStructure, clone: OpKind, k: usize) -> Result<ConditionReport> {
    verify_condition_with(s, clone, k, &VerifyOptions::default())
}

/// Runs the pseudo-loop search on the indicator of every assignment, up to
/// the joint orbit of the assigned tuples. Assignments with the same
/// sequence of edge orbits share one closure and one witness.
pub fn verify_condition_with(s: &ConditionStructure, clone: OpKind, k: usize, opts: &VerifyOptions) -> Result<ConditionReport> {
    let started = Instant::now();
    let flags = hypothesis_report(s);
    let violations = flags.violations();
    if !violations.is_empty() {
        return Err(Error::Hypothesis(format!("{}: {}", s.name, violations.join(", "))));
    }
    let v = s.vertices.len();
    let assignments: Vec<(WeakOrder, Vec<GroundTuple>)> =
        enumerate_weak_orders(v * k)?.into_iter().map(|w| { let g = w.ground().blocks(k); (w, g) }).collect();

    let mut keys: BTreeMap<Vec<WeakOrder>, usize> = BTreeMap::new();
    let mut key_of = Vec::with_capacity(assignments.len());
    let mut reps = Vec::new();
    for (i, (_, a)) in assignments.iter().enumerate() {
        let key: Vec<WeakOrder> = edge_tuples(s, a).iter().map(GroundTuple::canonicalize).collect();
        let next = keys.len();
        let id = *keys.entry(key).or_insert_with(|| {
            reps.push(i);
            next
        });
        key_of.push(id);
    }

    let cache = ImageCache::default();
    let solved: Vec<Result<(Term, WeakOrder, WeakOrder)>> = reps
        .par_iter()
        .map(|&i| {
            let e = indicator(s, &assignments[i].1)?.linear_closure_with(clone, opts.budget, &cache)?;
            let p = find_pseudoloop_with(&e, clone, opts.budget)?;
            Ok((p.witness, p.orbit, p.shared))
        })
        .collect();

    let mut witnesses = Vec::new();
    let mut witness_of = Vec::with_capacity(solved.len());
    for r in &solved {
        match r {
            Err(Error::BudgetExceeded { limit }) => return Err(Error::BudgetExceeded { limit: *limit }),
            Ok((t, _, _)) => {
                witness_of.push(Some(witnesses.len()));
                witnesses.push(t.clone());
            }
            Err(_) => witness_of.push(None),
        }
    }

    let results: Vec<AssignmentResult> = assignments
        .par_iter()
        .zip(key_of.par_iter())
        .map(|((w, a), &id)| {
            let outcome = match (&solved[id], witness_of[id]) {
                (Ok((t, orbit, shared)), Some(wi)) => match replay(s, a, t, shared, k) {
                    Ok(()) => Outcome::Success { witness: wi, orbit: orbit.clone(), shared: shared.clone() },
                    Err(err) => Outcome::Failure { error: err.to_string() },
                },
                (Err(err), _) => Outcome::Failure { error: err.to_string() },
                _ => unreachable!("solved entries have witnesses"),
            };
            AssignmentResult { assignment: w.clone(), outcome }
        })
        .collect();

    let counterexample = results.iter().find(|r| matches!(r.outcome, Outcome::Failure { .. })).map(|r| r.assignment.clone());
    let timings = opts.timings.then(|| Timings { total_ms: started.elapsed().as_secs_f64() * 1e3, closures: reps.len() });
    Ok(ConditionReport {
        schema: REPORT_SCHEMA,
        structure: s.name.clone(),
        identity: s.identity("s"),
        clone,
        k,
        flags,
        success: counterexample.is_none(),
        assignments: results,
        witnesses,
        counterexample,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_flags() {
        let f = hypothesis_report(&siggers4());
        assert_eq!((f.smooth, f.algebraic_length_one), (Some(true), Some(true)));
        let f = hypothesis_report(&k3());
        assert_eq!((f.smooth, f.algebraic_length_one), (Some(true), Some(true)));
        for s in [olsak(), wnu(3).unwrap(), wnu(4).unwrap()] {
            let f = hypothesis_report(&s);
            assert!(f.symmetric && f.two_transitive && f.cyclic, "{}", s.name);
        }
        let f = hypothesis_report(&cyclic(3).unwrap());
        assert_eq!(f.algebraic_length_one, Some(false));
    }

    #[test]
    fn identities_read_like_the_conditions() {
        assert_eq!(siggers4().identity("s"), "s(a, r, e, a) = s(r, a, r, e)");
        assert_eq!(olsak().identity("o"), "o(x, x, y, y, y, x) = o(x, y, x, y, x, y) = o(y, x, x, x, y, y)");
        assert_eq!(wnu(3).unwrap().identity("w"), "w(y, x, x) = w(x, y, x) = w(x, x, y)");
    }

    #[test]
    fn indicator_of_siggers4() {
        let a: Vec<GroundTuple> = [0, 1, 2].iter().map(|&v| GroundTuple::from_ints(&[v])).collect();
        let r = indicator(&siggers4(), &a).unwrap();
        let want: BTreeSet<WeakOrder> = [vec![0, 1], vec![1, 0]].into_iter().map(|v| WeakOrder::new(v).unwrap()).collect();
        assert_eq!(r.orbits(), &want);
    }

    #[test]
    fn siggers4_under_min() {
        let rep = verify_condition(&siggers4(), OpKind::MIN, 1).unwrap();
        assert!(rep.success, "{rep}");
        assert_eq!(rep.assignments.len(), 13);
    }

    #[test]
    fn cycle_rejected() {
        let err = verify_condition(&cyclic(3).unwrap(), OpKind::MIN, 1).unwrap_err();
        assert!(err.to_string().contains("algebraic_length_one = false"));
    }
}
