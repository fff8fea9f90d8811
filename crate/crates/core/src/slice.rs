//! Slice plans: nested pp or ll applications with a fixed prefix of members
//! that force a prescribed coordinate set to the bottom of every component.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::extend_edge;
use crate::minclean::{cyclic_shifts, hypothesis, MinCleanCertificate};
use crate::ops::{lift, nested_apply, LayeredValue, OpKind};
use crate::orbit::{canonicalize_slice, i_set, minx_of, sim_on, GroundTuple, Kernel, Rational, WeakOrder};
use crate::relation::TemporalRelation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceShape {
    /// Both components agree on `I` and have `I` as their `m` lowest ranks.
    Binary,
    /// Every component has `I` as its minimum coordinates.
    Hyper,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlicePlan {
    #[serde(rename = "I")]
    pub i: BTreeSet<usize>,
    pub m: usize,
    #[serde(serialize_with = "crate::orbit::serialize_rational")]
    pub q: Rational,
    /// Fixed leading arguments, flat over all components.
    pub prefix: Vec<GroundTuple>,
    pub kind: OpKind,
    pub shape: SliceShape,
    pub n: usize,
    pub k: usize,
    /// Common kernel of admissible inputs (ll plans only).
    pub kernel: Option<Kernel>,
}

impl SlicePlan {
    pub fn complement(&self) -> Vec<usize> {
        (0..self.k).filter(|c| !self.i.contains(c)).collect()
    }

    /// Evaluates the nested operation on the prefix followed by `t`, checking
    /// both postconditions of the plan.
    pub fn apply(&self, t: &GroundTuple) -> Result<GroundTuple> {
        if let Some(kernel) = &self.kernel {
            if t.canonicalize().kernel() != *kernel {
                return Err(Error::Precondition("input kernel differs from the common kernel".into()));
            }
        }
        let mut args: Vec<Vec<LayeredValue>> = self.prefix.iter().map(lift).collect();
        args.push(lift(t));
        let q = LayeredValue::plain(self.q.clone());
        let out = nested_apply(self.kind, &args, Some(&q))?;
        let w = canonicalize_slice(&out);
        self.check(&w, &t.canonicalize())?;
        Ok(w.ground())
    }

    fn check(&self, out: &WeakOrder, input: &WeakOrder) -> Result<()> {
        let k = self.k;
        let rest: BTreeSet<usize> = self.complement().into_iter().collect();
        let comps = out.blocks(k);
        let raw: Vec<&[u32]> = out.ranks().chunks(k).collect();
        let ins: Vec<&[u32]> = input.ranks().chunks(k).collect();
        for (c, b) in comps.iter().enumerate() {
            let bottom = match self.shape {
                SliceShape::Binary => i_set(b, self.m),
                SliceShape::Hyper => minx_of(b.ranks()),
            };
            if bottom != self.i {
                return Err(Error::SliceContract(format!("component {c} has bottom coordinates {bottom:?}")));
            }
            if !sim_on(raw[c], ins[c], &rest) {
                return Err(Error::SliceContract(format!("component {c} changed outside the slice")));
            }
        }
        if self.shape == SliceShape::Binary && !sim_on(raw[0], raw[1], &self.i) {
            return Err(Error::SliceContract("components disagree on the slice".into()));
        }
        Ok(())
    }
}

/// Number of distinct values the nested threshold choice leaves on `I`: the
/// first prefix tuple at or below `q` wins, and different winners never tie.
fn distinct_on(prefix: &[GroundTuple], lead: usize, k: usize, q: &Rational, i: &BTreeSet<usize>) -> usize {
    let vals: BTreeSet<(usize, &Rational)> = i
        .iter()
        .filter_map(|&j| prefix.iter().map(|t| &t.values()[lead * k + j]).enumerate().find(|(_, v)| *v <= q))
        .collect();
    vals.len()
}

/// Plan for a binary relation (`kind` pp, or ll over a derivative).
fn slice_binary(e: &TemporalRelation, cert: &MinCleanCertificate, kind: OpKind) -> Result<SlicePlan> {
    hypothesis(e.n == 2, "slice needs a binary relation")?;
    let k = e.k;
    let (u1, v1) = (&cert.tuple[0], &cert.tuple[1]);
    let (mu, mv) = (u1.values().iter().min().unwrap(), v1.values().iter().min().unwrap());
    let kernel = (kind == OpKind::LL).then(|| e.kernel_intersection());
    let first = cert.flat();
    if mu == mv {
        let i = minx_of(u1.values());
        return Ok(SlicePlan { i, m: 1, q: mu.clone(), prefix: vec![first], kind, shape: SliceShape::Binary, n: 2, k, kernel });
    }
    // `lead` holds the smaller minimum; each next member repeats the previous
    // lead tuple on the other side.
    let (lead, other) = if mu < mv { (0, 1) } else { (1, 0) };
    let q = first.block(lead, k).values().iter().min().unwrap().clone();
    let mut prefix = vec![first.clone()];
    let mut i: BTreeSet<usize> = minx_of(first.block(lead, k).values());
    loop {
        let prev = prefix.last().unwrap().block(lead, k);
        let target = prev.canonicalize();
        let o = e
            .orbits()
            .iter()
            .find(|o| o.block(other, k) == target)
            .ok_or_else(|| Error::Hypothesis("relation is not smooth: no edge to extend".into()))?;
        let next = extend_edge(o, k, other, &prev)?;
        let mut parts = vec![GroundTuple(vec![]), GroundTuple(vec![])];
        parts[lead] = next.clone();
        parts[other] = prev;
        prefix.push(GroundTuple::concat(&parts));
        let j: BTreeSet<usize> = (0..k).filter(|c| next.values()[*c] <= q && !i.contains(c)).collect();
        if j.is_empty() {
            break;
        }
        i.extend(j);
    }
    let m = distinct_on(&prefix, lead, k, &q, &i);
    Ok(SlicePlan { i, m, q, prefix, kind, shape: SliceShape::Binary, n: 2, k, kernel })
}

pub fn slice_pp(e: &TemporalRelation, cert: &MinCleanCertificate) -> Result<SlicePlan> {
    hypothesis(e.is_smooth()?, "relation is not smooth")?;
    slice_binary(e, cert, OpKind::PP)
}

/// Plan over a derivative `sp`, whose members share one kernel.
pub fn slice_ll(sp: &TemporalRelation, cert: &MinCleanCertificate) -> Result<SlicePlan> {
    hypothesis(sp.is_smooth()?, "derivative is not smooth")?;
    let kernel = sp.kernel_intersection();
    if sp.orbits().iter().any(|o| o.kernel() != kernel) || cert.orbit.kernel() != kernel {
        return Err(Error::Precondition("members do not share one kernel".into()));
    }
    slice_binary(sp, cert, OpKind::LL)
}

/// Plan for a cyclic relation of arity at least 3: the cyclic shifts of the
/// certificate with the threshold at its minimum.
pub fn slice_hyp(r: &TemporalRelation, cert: &MinCleanCertificate, kind: OpKind) -> Result<SlicePlan> {
    hypothesis(matches!(kind, OpKind::PP | OpKind::LL), "slice needs pp or ll")?;
    hypothesis(r.is_cyclic(), "relation is not cyclic")?;
    let k = r.k;
    let first = cert.flat();
    let a = *cert.m.iter().next().unwrap();
    let q = first.block(a, k).values().iter().min().unwrap().clone();
    let kernel = (kind == OpKind::LL).then(|| r.kernel_intersection());
    Ok(SlicePlan {
        i: cert.common_minx.clone(),
        m: 1,
        q,
        prefix: cyclic_shifts(&first, r.n, k),
        kind,
        shape: SliceShape::Hyper,
        n: r.n,
        k,
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minclean::{certify, Route};
    use crate::relation::DEFAULT_BUDGET;

    #[test]
    fn equal_minima_give_one_step() {
        let e = TemporalRelation::from_generators(2, 2, vec![GroundTuple::from_ints(&[0, 1, 0, 2]), GroundTuple::from_ints(&[0, 2, 0, 1])])
            .unwrap()
            .closure(OpKind::MIN, DEFAULT_BUDGET)
            .unwrap();
        let cert = certify(&e, &GroundTuple::from_ints(&[0, 1, 0, 2]), Route::Singleton).unwrap();
        let plan = slice_pp(&e, &cert).unwrap();
        assert_eq!(plan.prefix.len(), 1);
        assert_eq!(plan.i, BTreeSet::from([0]));
        assert_eq!(plan.m, 1);
        for o in e.orbits() {
            plan.apply(&o.ground()).unwrap();
        }
    }
}
