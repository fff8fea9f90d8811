//! Pseudo-loop search by induction on the dimension: a min-clean member
//! yields a slice plan that settles a coordinate set `I`, the projection to
//! the remaining coordinates is solved recursively, and the plan combines both.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::factor_digraph;
use crate::minclean::{
    ensure_preserved, hypothesis, length_one_component, loop_cyclic_min, minclean_hyp, minclean_lex_in, minclean_mi,
    minclean_min, minclean_mx,
};
use crate::ops::{BaseOp, OpKind};
use crate::orbit::{GroundTuple, WeakOrder};
use crate::relation::{is_pseudo_loop, TemporalRelation, DEFAULT_BUDGET};
use crate::slice::{slice_hyp, slice_ll, slice_pp, SlicePlan};
use crate::term::Term;

#[derive(Clone, Debug, Serialize)]
pub struct PseudoLoop {
    pub tuple: Vec<GroundTuple>,
    pub orbit: WeakOrder,
    /// The orbit shared by every component.
    pub shared: WeakOrder,
    pub witness: Term,
    /// Slice applications whose postconditions were checked.
    pub slices: usize,
}

#[derive(Clone, Copy, Debug, Default)]
struct Stats {
    slices: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Min, mi or mx: certificates from the clone, slices by pp.
    Pp(OpKind),
    /// ll: certificates and slices inside derivatives.
    Ll,
}

/// Least member of `rel` whose restriction to the coordinates `rest` of every
/// component is `p`.
fn lift_orbit(rel: &TemporalRelation, rest: &[usize], p: &WeakOrder) -> Result<WeakOrder> {
    let positions: Vec<usize> = (0..rel.n).flat_map(|b| rest.iter().map(move |&c| b * rel.k + c)).collect();
    rel.orbits()
        .iter()
        .find(|o| o.select(&positions) == *p)
        .cloned()
        .ok_or_else(|| Error::EmptyResult(format!("no member projects to {p}")))
}

fn least(rel: &TemporalRelation) -> Result<WeakOrder> {
    rel.orbits().iter().next().cloned().ok_or_else(|| Error::EmptyResult("empty relation".into()))
}

/// Applies `plan` to a member over the complement of the plan's slice that
/// is obtained from `solve_rest`, and checks the result lies in `target`.
fn finish(
    plan: &SlicePlan,
    target: &TemporalRelation,
    stats: &mut Stats,
    solve_rest: impl FnOnce(&[usize], &mut Stats) -> Result<WeakOrder>,
) -> Result<WeakOrder> {
    let rest = plan.complement();
    let input = if rest.is_empty() { least(target)? } else { lift_orbit(target, &rest, &solve_rest(&rest, stats)?)? };
    let out = plan.apply(&input.ground())?.canonicalize();
    stats.slices += 1;
    if !target.contains(&out) {
        return Err(Error::Precondition(format!("slice output {out} left the relation")));
    }
    if !is_pseudo_loop(&out, target.k) {
        return Err(Error::Precondition(format!("slice output {out} is not a pseudo-loop")));
    }
    Ok(out)
}

fn solve_binary(e: &TemporalRelation, kind: OpKind, stats: &mut Stats) -> Result<WeakOrder> {
    if e.k == 1 {
        return least(e);
    }
    let cert = match kind.base {
        BaseOp::Min => minclean_min(e)?,
        BaseOp::Mi => minclean_mi(e)?,
        _ => minclean_mx(e)?,
    };
    let plan = slice_pp(e, &cert)?;
    finish(&plan, e, stats, |rest, stats| solve_binary(&e.project_coords(rest)?.mark_closed(kind), kind, stats))
}

/// Pseudo-loop in the derivative of `s`; `e` is preserved by ll.
fn solve_ll(e: &TemporalRelation, s: &TemporalRelation, budget: usize, stats: &mut Stats) -> Result<WeakOrder> {
    let l = s.closure(OpKind::LEX, budget)?;
    let kernel = s.kernel_intersection();
    let sp = l.filter(|o| o.kernel() == kernel);
    if e.k == 1 {
        return least(&sp);
    }
    let cert = minclean_lex_in(s, e, &l)?;
    let plan = slice_ll(&sp, &cert)?;
    finish(&plan, &sp, stats, |rest, stats| {
        solve_ll(&e.project_coords(rest)?.mark_closed(OpKind::LL), &s.project_coords(rest)?, budget, stats)
    })
}

fn solve_hyp(r: &TemporalRelation, mode: Mode, budget: usize, stats: &mut Stats) -> Result<WeakOrder> {
    match mode {
        Mode::Pp(OpKind::MIN) => Ok(loop_cyclic_min(r)?.orbit),
        Mode::Pp(kind) => {
            if r.k == 1 {
                return least(r);
            }
            let cert = minclean_hyp(r, kind, budget)?;
            let plan = slice_hyp(r, &cert, OpKind::PP)?;
            finish(&plan, r, stats, |rest, stats| solve_hyp(&r.project_coords(rest)?.mark_closed(kind), mode, budget, stats))
        }
        Mode::Ll => {
            let rp = r.derivative(budget)?;
            if r.k == 1 {
                return least(&rp);
            }
            let cert = minclean_hyp(r, OpKind::LEX, budget)?;
            let plan = slice_hyp(&rp, &cert, OpKind::LL)?;
            finish(&plan, &rp, stats, |rest, stats| {
                solve_hyp(&r.project_coords(rest)?.mark_closed(OpKind::LL), mode, budget, stats)
            })
        }
    }
}

fn binary_hypotheses(e: &TemporalRelation) -> Result<usize> {
    hypothesis(e.is_smooth()?, "relation is not smooth")?;
    length_one_component(&factor_digraph(e)?)
}

fn hyp_hypotheses(r: &TemporalRelation) -> Result<()> {
    hypothesis(r.is_cyclic(), "relation is not cyclic")?;
    hypothesis(r.symmetry_group().is_two_transitive(), "relation is not 2-transitive")
}

fn package(r: &TemporalRelation, o: WeakOrder, stats: Stats) -> Result<PseudoLoop> {
    let witness = r.term_for(&o).ok_or_else(|| Error::Precondition(format!("{o} is not a member")))?;
    Ok(PseudoLoop { tuple: o.ground().blocks(r.k), shared: o.block(0, r.k), orbit: o, witness, slices: stats.slices })
}

/// Pseudo-loop of a smooth binary relation of pseudo-algebraic length 1
/// preserved by min, mi or mx.
pub fn pseudoloop_binary(e: &TemporalRelation, kind: OpKind) -> Result<PseudoLoop> {
    hypothesis(matches!(kind, OpKind::MIN | OpKind::MI | OpKind::MX), "unsupported kind for the binary search")?;
    binary_hypotheses(e)?;
    ensure_preserved(e, kind)?;
    let mut stats = Stats::default();
    let o = solve_binary(e, kind, &mut stats)?;
    package(e, o, stats)
}

/// Pseudo-loop in the derivative of `s`, where `s` is a smooth subset of `e`
/// with weakly connected first projection and `e` is preserved by ll.
pub fn pseudoloop_ll(e: &TemporalRelation, s: &TemporalRelation, budget: usize) -> Result<PseudoLoop> {
    hypothesis(e.is_smooth()?, "relation is not smooth")?;
    hypothesis(s.is_smooth()?, "S is not smooth")?;
    hypothesis(s.orbits().is_subset(e.orbits()), "S is not contained in E")?;
    let fs = factor_digraph(s)?;
    length_one_component(&fs)?;
    hypothesis(fs.components.len() == 1, "first projection of S is not weakly connected")?;
    ensure_preserved(e, OpKind::LL)?;
    let e = e.clone().mark_closed(OpKind::LL);
    let mut stats = Stats::default();
    let o = solve_ll(&e, s, budget, &mut stats)?;
    package(&e, o, stats)
}

/// Pseudo-loop of a cyclic 2-transitive relation of arity at least 3; for ll
/// it lies in the derivative.
pub fn pseudoloop_hyp(r: &TemporalRelation, kind: OpKind, budget: usize) -> Result<PseudoLoop> {
    hypothesis(r.n >= 3, "arity below 3")?;
    let mode = match kind {
        OpKind::MIN | OpKind::MI | OpKind::MX => Mode::Pp(kind),
        OpKind::LL => Mode::Ll,
        _ => return Err(Error::UnsupportedClone(kind.to_string())),
    };
    hyp_hypotheses(r)?;
    ensure_preserved(r, kind)?;
    let r = r.clone().mark_closed(kind);
    let mut stats = Stats::default();
    let o = solve_hyp(&r, mode, budget, &mut stats)?;
    package(&r, o, stats)
}

/// Pseudo-loop of `r` under the clone generated by `clone`, dispatching on
/// the constant, dual and arity cases.
pub fn find_pseudoloop(r: &TemporalRelation, clone: OpKind) -> Result<PseudoLoop> {
    find_pseudoloop_with(r, clone, DEFAULT_BUDGET)
}

pub fn find_pseudoloop_with(r: &TemporalRelation, clone: OpKind, budget: usize) -> Result<PseudoLoop> {
    if r.is_empty() {
        return Err(Error::EmptyResult("empty relation".into()));
    }
    if clone.base == BaseOp::Constant {
        ensure_preserved(r, clone)?;
        return package(r, WeakOrder::constant(r.n * r.k), Stats::default());
    }
    if matches!(clone.base, BaseOp::Lex | BaseOp::Pp) {
        return Err(Error::UnsupportedClone(clone.to_string()));
    }
    if clone.dual {
        let plain = OpKind::plain(clone.base);
        let neg = r.negate();
        let neg = if r.closed_under() == Some(clone) { neg.mark_closed(plain) } else { neg };
        let found = find_pseudoloop_with(&neg, plain, budget)?;
        return package(r, found.orbit.negate(), Stats { slices: found.slices });
    }
    if r.n == 1 {
        return package(r, least(r)?, Stats::default());
    }
    if r.n >= 3 {
        return pseudoloop_hyp(r, clone, budget);
    }
    if clone.base != BaseOp::Ll {
        return pseudoloop_binary(r, clone);
    }
    let c = binary_hypotheses(r)?;
    let f = factor_digraph(r)?;
    let s = r.restrict_component(&f.component_vertices(c))?;
    pseudoloop_ll(r, &s, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_pair_under_min() {
        let e = TemporalRelation::from_generators(2, 1, vec![GroundTuple::from_ints(&[0, 1]), GroundTuple::from_ints(&[1, 0])])
            .unwrap()
            .closure(OpKind::MIN, DEFAULT_BUDGET)
            .unwrap();
        let p = find_pseudoloop(&e, OpKind::MIN).unwrap();
        assert_eq!(p.orbit, WeakOrder::new(vec![0, 0]).unwrap());
        let gens = e.generator_tuples();
        assert_eq!(p.witness.eval(&gens).unwrap().canonicalize(), p.orbit);
    }

    #[test]
    fn constant_clone_returns_loop() {
        let r = TemporalRelation::new(2, 2, [WeakOrder::constant(4), WeakOrder::new(vec![0, 1, 1, 0]).unwrap()]).unwrap();
        let p = find_pseudoloop(&r, OpKind::CONSTANT).unwrap();
        assert!(p.orbit.is_constant());
    }

    #[test]
    fn two_dimensional_min_instance() {
        let gens = vec![GroundTuple::from_ints(&[0, 1, 2, 0]), GroundTuple::from_ints(&[2, 0, 0, 1]), GroundTuple::from_ints(&[0, 0, 1, 1])];
        let e = TemporalRelation::from_generators(2, 2, gens).unwrap().closure(OpKind::MIN, DEFAULT_BUDGET).unwrap();
        if e.is_smooth().unwrap() {
            let p = find_pseudoloop(&e, OpKind::MIN).unwrap();
            assert!(is_pseudo_loop(&p.orbit, 2));
        }
    }
}
