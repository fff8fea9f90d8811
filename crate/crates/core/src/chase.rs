//! Propagation of minimum coordinates along fences.
//!
//! All tuples handled here live in one common frame: fences are lifted with
//! shared tips, so nested operations compare the actual values.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{factor_digraph, lift_fence, FactorDigraph, GroundFence};
use crate::ops::{apply, canonicalize_layered, lift, nested_apply, BaseOp, LayeredValue, OpKind};
use crate::orbit::{m_set, minx_of, GroundTuple, WeakOrder};
use crate::relation::TemporalRelation;

/// Result of one application of the intersection step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// Component `j` lies in every M-set and the minimum coordinates of the
    /// `j`-th components intersect in this set.
    Holds { intersection: BTreeSet<usize> },
    /// The nested tuple has a strictly smaller M-set than the first tuple,
    /// so the first tuple was not min-ready.
    NotMinReady { witness: GroundTuple, m: BTreeSet<usize> },
}

fn block_values(v: &[LayeredValue], b: usize, k: usize) -> &[LayeredValue] {
    &v[b * k..(b + 1) * k]
}

fn intersect_all(sets: impl Iterator<Item = BTreeSet<usize>>) -> BTreeSet<usize> {
    let mut acc: Option<BTreeSet<usize>> = None;
    for s in sets {
        acc = Some(match acc {
            None => s,
            Some(a) => a.intersection(&s).copied().collect(),
        });
    }
    acc.unwrap_or_default()
}

/// Given tuples `ts` of `k`-blocks in one frame that share component `i` in
/// their M-sets with intersecting minimum coordinates there, evaluates the
/// nested `kind` (mi or lex) and decides whether component `j` inherits the
/// property.
pub fn mi_intersect_step(kind: OpKind, ts: &[GroundTuple], k: usize, i: usize, j: usize) -> Result<StepOutcome> {
    if !matches!(kind.base, BaseOp::Mi | BaseOp::Lex) || kind.dual {
        return Err(Error::UnsupportedClone(format!("intersection step for {kind}")));
    }
    let first = ts.first().ok_or_else(|| Error::Precondition("no tuples".into()))?;
    let ms: Vec<BTreeSet<usize>> = ts.iter().map(|t| m_set(t.values(), k)).collect();
    if ms.iter().any(|m| !m.contains(&i)) {
        return Err(Error::Precondition(format!("component {i} is not in every M-set")));
    }
    if !ms[0].contains(&j) {
        return Err(Error::Precondition(format!("component {j} is not in the first M-set")));
    }
    let at_i = intersect_all(ts.iter().map(|t| minx_of(t.block(i, k).values())));
    if at_i.is_empty() {
        return Err(Error::Precondition(format!("minimum coordinates at component {i} do not intersect")));
    }
    if kind.base == BaseOp::Mi {
        let c = first.block(i, k).values().iter().min().cloned();
        if ts.iter().any(|t| t.block(i, k).values().iter().min().cloned() != c) {
            return Err(Error::Precondition(format!("minima at component {i} differ")));
        }
    }
    let u: Vec<LayeredValue> = if ts.len() == 1 {
        lift(first)
    } else {
        nested_apply(kind, &ts.iter().map(lift).collect::<Vec<_>>(), None)?
    };
    let mu = m_set(&u, k);
    if !mu.contains(&j) {
        return Ok(StepOutcome::NotMinReady { witness: canonicalize_layered(&u).ground(), m: mu });
    }
    let got = minx_of(block_values(&u, j, k));
    let expected = intersect_all(ts.iter().map(|t| minx_of(t.block(j, k).values())));
    if got != expected || got.is_empty() {
        return Err(Error::Precondition(format!("step evaluation gave {got:?}, expected {expected:?}")));
    }
    Ok(StepOutcome::Holds { intersection: got })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChaseReport {
    pub exponent: usize,
    pub strands: usize,
    pub steps: usize,
    /// Common minimum coordinates of every lower tip.
    pub intersection: BTreeSet<usize>,
}

/// Concatenated fence through every vertex of component `c`, in ascending
/// order, lifted from the canonical ground of the least vertex.
fn tour(e: &TemporalRelation, f: &FactorDigraph, c: usize, m: usize) -> Result<GroundFence> {
    let reps = &f.components[c];
    let mut strands: Vec<Vec<usize>> = Vec::new();
    if reps.len() == 1 {
        strands = f.find_fence(reps[0], reps[0], m)?;
    }
    for w in reps.windows(2) {
        strands.extend(f.find_fence(w[0], w[1], m)?);
    }
    lift_fence(e, f, &strands, &f.vertices[reps[0]].ground())
}

fn edge(fence: &GroundFence, strand: usize, h: usize) -> GroundTuple {
    GroundTuple::concat(&[fence.strands[strand][h].clone(), fence.strands[strand][h + 1].clone()])
}

fn singleton_m(e: &TemporalRelation) -> Option<WeakOrder> {
    e.orbits().iter().find(|o| m_set(o.ranks(), e.k).len() == 1).cloned()
}

fn factor_component(e: &TemporalRelation, c: usize) -> Result<(FactorDigraph, usize)> {
    let f = factor_digraph(e)?;
    if c >= f.components.len() {
        return Err(Error::Precondition(format!("no component {c}")));
    }
    if !f.has_length_one(c) {
        return Err(Error::NoFence(format!("component {c} has no closed walk of algebraic length 1")));
    }
    let m = f.linking_exponent(c)?;
    Ok((f, m))
}

/// Common minimum coordinates of all vertices of component `c` of a smooth
/// relation preserved by mi or lex, obtained by walking a fence through every
/// vertex class and applying the intersection step level by level.
pub fn component_minx_intersection(e: &TemporalRelation, c: usize, kind: OpKind) -> Result<ChaseReport> {
    if let Some(o) = singleton_m(e) {
        return Err(Error::FoundSingleton(o));
    }
    let k = e.k;
    let (f, m) = factor_component(e, c)?;
    let fence = tour(e, &f, c, m)?;
    let n = fence.strands.len();
    let mut family = vec![0usize];
    let mut steps = 0;
    let mut step = |family: &[usize], h: usize, i: usize, j: usize| -> Result<BTreeSet<usize>> {
        let ts: Vec<GroundTuple> = family.iter().map(|&s| edge(&fence, s, h)).collect();
        steps += 1;
        match mi_intersect_step(kind, &ts, k, i, j)? {
            StepOutcome::Holds { intersection } => Ok(intersection),
            StepOutcome::NotMinReady { witness, .. } => Err(Error::FoundSingleton(witness.canonicalize())),
        }
    };
    let mut current = BTreeSet::new();
    loop {
        for h in 0..m {
            current = step(&family, h, 0, 1)?;
        }
        if family.len() < n {
            family.push(family.len());
        }
        for h in (0..m).rev() {
            current = step(&family, h, 1, 0)?;
        }
        if family.len() == n {
            break;
        }
        family.push(family.len());
    }
    let tips = intersect_all(fence.lower_tips().into_iter().map(|t| minx_of(t.values())));
    if tips != current {
        return Err(Error::Precondition("chase result differs from the lower tips".into()));
    }
    Ok(ChaseReport { exponent: m, strands: n, steps, intersection: current })
}

/// For an edge orbit `t` inside a component of algebraic length 1 of a
/// relation preserved by mx, checks along a fence from its first to its
/// second component class that both components attain their minimum on the
/// same coordinates.
pub fn mx_fence_chase(e: &TemporalRelation, t: &WeakOrder) -> Result<ChaseReport> {
    if let Some(o) = singleton_m(e) {
        return Err(Error::FoundSingleton(o));
    }
    let k = e.k;
    let f = factor_digraph(e)?;
    let a = f.index_of(&t.block(0, k)).ok_or_else(|| Error::Precondition("edge not in relation".into()))?;
    let b = f.index_of(&t.block(1, k)).unwrap();
    let c = f.component[a];
    let (f, m) = factor_component(e, c)?;
    let strands = f.find_fence(a, b, m)?;
    let tg = t.ground();
    let fence = lift_fence(e, &f, &strands, &tg.block(0, k))?;
    let n = fence.strands.len();
    let mut steps = 0;
    // Adjacent strands of the family have equal minimum coordinates at the
    // current level; mx carries the equality to the next level.
    let mut step = |family: &[usize], h: usize, i: usize, j: usize| -> Result<()> {
        for w in family.windows(2) {
            steps += 1;
            let (x, y) = (edge(&fence, w[0], h), edge(&fence, w[1], h));
            let s = apply(OpKind::MX, &lift(&x), &lift(&y), None)?;
            let min_i = block_values(&s, i, k).iter().min().unwrap().clone();
            let min_j = block_values(&s, j, k).iter().min().unwrap().clone();
            if min_i.0.last().unwrap().1 != 1 {
                return Err(Error::Precondition("minimum coordinates differ on the known side".into()));
            }
            if min_j != min_i {
                return Err(Error::FoundSingleton(canonicalize_layered(&s)));
            }
            if minx_of(x.block(j, k).values()) != minx_of(y.block(j, k).values()) {
                return Err(Error::Precondition("mx step contradicts its key evaluation".into()));
            }
        }
        Ok(())
    };
    let mut family = vec![0usize];
    loop {
        for h in 0..m {
            step(&family, h, 0, 1)?;
        }
        if family.len() < n {
            family.push(family.len());
        }
        for h in (0..m).rev() {
            step(&family, h, 1, 0)?;
        }
        if family.len() == n {
            break;
        }
        family.push(family.len());
    }
    let tips: Vec<BTreeSet<usize>> = fence.lower_tips().into_iter().map(|t| minx_of(t.values())).collect();
    if tips.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Precondition("lower tips disagree after the chase".into()));
    }
    if minx_of(tg.block(1, k).values()) != tips[0] {
        return Err(Error::Precondition("edge is not min-clean".into()));
    }
    Ok(ChaseReport { exponent: m, strands: n, steps, intersection: tips[0].clone() })
}
