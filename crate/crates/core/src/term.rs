//! Witness terms: compositions of generators and operation applications.
//!
//! A term is stored as a node list in which every node refers only to earlier
//! nodes; the last node is the root. Shared subterms are stored once.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::{dual_of, orbit_image_fast, Alignment, OpKind};
use crate::orbit::{GroundTuple, WeakOrder};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    /// The tuple bound to generator `i`.
    Gen(usize),
    /// `kind` applied to the outputs of two earlier nodes, composed with
    /// automorphisms so that their joint order is `align`.
    Apply { kind: OpKind, align: Alignment, args: [usize; 2] },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTerm")]
pub struct Term {
    nodes: Vec<Node>,
}

#[derive(Deserialize)]
struct RawTerm {
    nodes: Vec<Node>,
}

impl TryFrom<RawTerm> for Term {
    type Error = Error;

    fn try_from(raw: RawTerm) -> Result<Term> {
        Term::from_nodes(raw.nodes)
    }
}

/// Nested notation such as `min(g0, mi(g1, g0))`; alignments are omitted.
/// Very large terms are cut short with `...`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const LIMIT: usize = 400;
        let mut text: Vec<String> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let s = match n {
                Node::Gen(i) => format!("g{i}"),
                Node::Apply { kind, args, .. } => {
                    let (a, b) = (&text[args[0]], &text[args[1]]);
                    if a.len() + b.len() > LIMIT {
                        format!("{kind}(...)")
                    } else {
                        format!("{kind}({a}, {b})")
                    }
                }
            };
            text.push(s);
        }
        f.write_str(text.last().map_or("", |s| s.as_str()))
    }
}

impl Term {
    pub fn generator(i: usize) -> Term {
        Term { nodes: vec![Node::Gen(i)] }
    }

    pub fn apply(kind: OpKind, align: Alignment, left: &Term, right: &Term) -> Term {
        let mut nodes = left.nodes.clone();
        let offset = nodes.len();
        nodes.extend(right.nodes.iter().map(|n| shift(n, offset)));
        let args = [offset - 1, nodes.len() - 1];
        nodes.push(Node::Apply { kind, align, args });
        Term { nodes }
    }

    /// Builds a term from a node list, checking that references point backwards.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Term> {
        if nodes.is_empty() {
            return Err(Error::Parse("term without nodes".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Apply { args, .. } = n {
                if args.iter().any(|&a| a >= i) {
                    return Err(Error::Parse(format!("term node {i} refers forward")));
                }
            }
        }
        Ok(Term { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        self.nodes.last().expect("terms are non-empty")
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Apply { args, .. } = n {
                d[i] = 1 + d[args[0]].max(d[args[1]]);
            }
        }
        *d.last().unwrap()
    }

    /// Generator indices occurring in the term, ascending.
    pub fn generators(&self) -> Vec<usize> {
        let mut g: Vec<usize> =
            self.nodes.iter().filter_map(|n| if let Node::Gen(i) = n { Some(*i) } else { None }).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// Evaluates the term with generator `i` bound to `generators[i]`.
    /// Intermediate results are re-grounded canonically.
    pub fn eval(&self, generators: &[GroundTuple]) -> Result<GroundTuple> {
        let mut values: Vec<GroundTuple> = Vec::with_capacity(self.nodes.len());
        let mut orbits: Vec<WeakOrder> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            match n {
                Node::Gen(i) => {
                    let t = generators.get(*i).ok_or_else(|| {
                        Error::InconsistentAlignment(format!("generator {i} is not bound"))
                    })?;
                    orbits.push(t.canonicalize());
                    values.push(t.clone());
                }
                Node::Apply { kind, align, args } => {
                    let (l, r) = (&orbits[args[0]], &orbits[args[1]]);
                    if align.left() != *l || align.right() != *r {
                        return Err(Error::InconsistentAlignment(format!(
                            "alignment {align:?} does not restrict to {l} and {r}"
                        )));
                    }
                    let out = orbit_image_fast(*kind, align)?;
                    values.push(out.ground());
                    orbits.push(out);
                }
            }
        }
        Ok(values.pop().unwrap())
    }

    /// The same term acting on the sub-tuples at `positions`.
    pub fn restrict(&self, positions: &[usize]) -> Term {
        Term {
            nodes: self
                .nodes
                .iter()
                .map(|n| match n {
                    Node::Gen(i) => Node::Gen(*i),
                    Node::Apply { kind, align, args } => {
                        Node::Apply { kind: *kind, align: align.restrict(positions), args: *args }
                    }
                })
                .collect(),
        }
    }

    /// Restriction to component `b` of tuples made of `k`-blocks.
    pub fn project_block(&self, b: usize, k: usize) -> Term {
        self.restrict(&(b * k..(b + 1) * k).collect::<Vec<_>>())
    }

    /// The term computing `-t(-x1, ..., -xm)`.
    pub fn dual(&self) -> Term {
        Term {
            nodes: self
                .nodes
                .iter()
                .map(|n| match n {
                    Node::Gen(i) => Node::Gen(*i),
                    Node::Apply { kind, align, args } => {
                        Node::Apply { kind: dual_of(*kind), align: align.reverse(), args: *args }
                    }
                })
                .collect(),
        }
    }

    /// Operation kinds used, each once.
    pub fn kinds(&self) -> Vec<OpKind> {
        let mut k: Vec<OpKind> = self
            .nodes
            .iter()
            .filter_map(|n| if let Node::Apply { kind, .. } = n { Some(*kind) } else { None })
            .collect();
        k.sort();
        k.dedup();
        k
    }
}

fn shift(n: &Node, offset: usize) -> Node {
    match n {
        Node::Gen(i) => Node::Gen(*i),
        Node::Apply { kind, align, args } => {
            Node::Apply { kind: *kind, align: align.clone(), args: [args[0] + offset, args[1] + offset] }
        }
    }
}

/// Shared node store for the witnesses of many orbits. Node `i` may refer to
/// any node before it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Arena {
    pub nodes: Vec<Node>,
}

impl Arena {
    pub fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    /// The term rooted at node `root`, keeping only reachable nodes.
    pub fn extract(&self, root: usize) -> Term {
        let mut keep = vec![false; root + 1];
        keep[root] = true;
        for i in (0..=root).rev() {
            if keep[i] {
                if let Node::Apply { args, .. } = &self.nodes[i] {
                    keep[args[0]] = true;
                    keep[args[1]] = true;
                }
            }
        }
        let mut index = BTreeMap::new();
        let mut nodes = Vec::new();
        for i in 0..=root {
            if !keep[i] {
                continue;
            }
            index.insert(i, nodes.len());
            nodes.push(match &self.nodes[i] {
                Node::Gen(g) => Node::Gen(*g),
                Node::Apply { kind, align, args } => {
                    Node::Apply { kind: *kind, align: align.clone(), args: [index[&args[0]], index[&args[1]]] }
                }
            });
        }
        Term { nodes }
    }

    /// Appends `t`, returning the index of its root.
    pub fn import(&mut self, t: &Term) -> usize {
        let offset = self.nodes.len();
        self.nodes.extend(t.nodes.iter().map(|n| shift(n, offset)));
        self.nodes.len() - 1
    }

    pub fn map_nodes(&self, f: impl Fn(&Node) -> Node) -> Arena {
        Arena { nodes: self.nodes.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_returns_bound_tuple() {
        let g = vec![GroundTuple::from_ints(&[4, 1]), GroundTuple::from_ints(&[0, 0]), GroundTuple::from_ints(&[7, 9])];
        assert_eq!(Term::generator(2).eval(&g).unwrap(), g[2]);
        assert!(Term::generator(3).eval(&g).is_err());
    }

    #[test]
    fn min_of_crossing_pairs() {
        let g = vec![GroundTuple::from_ints(&[0, 1]), GroundTuple::from_ints(&[1, 0])];
        let al = Alignment::of(&g[0], &g[1], None).unwrap();
        let t = Term::apply(OpKind::MIN, al, &Term::generator(0), &Term::generator(1));
        assert_eq!(t.eval(&g).unwrap(), GroundTuple::from_ints(&[0, 0]));
        assert_eq!(t.depth(), 1);
        assert_eq!(t.generators(), vec![0, 1]);
        // Swapped bindings no longer match the alignment.
        assert!(t.eval(&[g[1].clone(), g[0].clone()]).is_err());
    }

    #[test]
    fn arena_extract_keeps_reachable_nodes() {
        let mut a = Arena::default();
        let g0 = a.push(Node::Gen(0));
        let g1 = a.push(Node::Gen(1));
        let al = Alignment::of(&GroundTuple::from_ints(&[0]), &GroundTuple::from_ints(&[0]), None).unwrap();
        let top = a.push(Node::Apply { kind: OpKind::MIN, align: al, args: [g1, g1] });
        assert_eq!(g0, 0);
        let t = a.extract(top);
        assert_eq!(t.size(), 2);
        assert_eq!(t.generators(), vec![1]);
    }

    #[test]
    fn serde_round_trip() {
        let g = vec![GroundTuple::from_ints(&[0, 1]), GroundTuple::from_ints(&[1, 0])];
        let al = Alignment::of(&g[0], &g[1], None).unwrap();
        let t = Term::apply(OpKind::MX, al, &Term::generator(0), &Term::generator(1));
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Term>(&s).unwrap(), t);
    }
}
