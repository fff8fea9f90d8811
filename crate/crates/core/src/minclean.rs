//! Constructions of min-clean members: tuples whose minimal components all
//! attain the minimum on the same coordinates.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::chase::{component_minx_intersection, mi_intersect_step, mx_fence_chase, StepOutcome};
use crate::error::{Error, Result};
use crate::factor::{factor_digraph, FactorDigraph};
use crate::ops::{apply_ground, images, nested_ground, BaseOp, OpKind};
use crate::orbit::{common_minx, m_set, GroundTuple, WeakOrder};
use crate::relation::{cycle, SymmetryGroup, TemporalRelation};
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Singleton,
    Loop,
    NestedMin,
    NestedMi,
    MxChase,
    MxRepair,
    LexSingleton,
    NestedLex,
    ExhaustiveFallback,
    CyclicShifts,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinCleanCertificate {
    pub tuple: Vec<GroundTuple>,
    #[serde(rename = "M")]
    pub m: BTreeSet<usize>,
    pub common_minx: BTreeSet<usize>,
    pub orbit: WeakOrder,
    pub provenance: Term,
    pub route: Route,
}

impl MinCleanCertificate {
    pub fn flat(&self) -> GroundTuple {
        GroundTuple::concat(&self.tuple)
    }

    pub fn k(&self) -> usize {
        self.tuple[0].len()
    }
}

/// Packages `t` as a certificate for membership in `rel`.
pub fn certify(rel: &TemporalRelation, t: &GroundTuple, route: Route) -> Result<MinCleanCertificate> {
    let orbit = t.canonicalize();
    let provenance = rel
        .term_for(&orbit)
        .ok_or_else(|| Error::Precondition(format!("constructed orbit {orbit} is not a member")))?;
    let common =
        common_minx(t.values(), rel.k).ok_or_else(|| Error::Precondition(format!("{orbit} is not min-clean")))?;
    Ok(MinCleanCertificate {
        tuple: t.blocks(rel.k),
        m: m_set(t.values(), rel.k),
        common_minx: common,
        orbit,
        provenance,
        route,
    })
}

pub(crate) fn hypothesis(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(what.to_string()))
    }
}

/// Whether closure under `closed` implies closure under `want`: lex lies in
/// the clone of ll, pp in the clones of min, mi and mx.
pub fn implies(closed: OpKind, want: OpKind) -> bool {
    closed == want
        || (closed.dual == want.dual
            && match want.base {
                BaseOp::Lex => closed.base == BaseOp::Ll,
                BaseOp::Pp => matches!(closed.base, BaseOp::Min | BaseOp::Mi | BaseOp::Mx),
                _ => false,
            })
}

pub(crate) fn ensure_preserved(rel: &TemporalRelation, kind: OpKind) -> Result<()> {
    if rel.closed_under().is_some_and(|c| implies(c, kind)) {
        return Ok(());
    }
    hypothesis(rel.preserves(kind)?, &format!("relation is not preserved by {kind}"))
}

fn ensure_smooth(rel: &TemporalRelation) -> Result<()> {
    hypothesis(rel.is_smooth()?, "relation is not smooth")
}

/// Least member with a single minimal component.
pub fn singleton_orbit(rel: &TemporalRelation) -> Option<WeakOrder> {
    rel.orbits().iter().find(|o| m_set(o.ranks(), rel.k).len() == 1).cloned()
}

/// Whether all components of the orbit coincide coordinate-wise.
pub fn is_loop(o: &WeakOrder, k: usize) -> bool {
    o.ranks().chunks(k).all(|c| c == &o.ranks()[..k])
}

fn singleton_certificate(rel: &TemporalRelation) -> Result<Option<MinCleanCertificate>> {
    singleton_orbit(rel).map(|o| certify(rel, &o.ground(), Route::Singleton)).transpose()
}

fn from_found(rel: &TemporalRelation, r: Result<MinCleanCertificate>) -> Result<MinCleanCertificate> {
    match r {
        Err(Error::FoundSingleton(o)) => certify(rel, &o.ground(), Route::Singleton),
        other => other,
    }
}

/// Least component of algebraic length 1.
pub(crate) fn length_one_component(f: &FactorDigraph) -> Result<usize> {
    f.length_one_components()
        .first()
        .copied()
        .ok_or_else(|| Error::Hypothesis("no component of pseudo-algebraic length 1".into()))
}

fn component_edges(e: &TemporalRelation, f: &FactorDigraph, c: usize) -> Result<Vec<GroundTuple>> {
    Ok(e.restrict_component(&f.component_vertices(c))?.orbits().iter().map(WeakOrder::ground).collect())
}

fn nested(kind: OpKind, ts: &[GroundTuple]) -> Result<GroundTuple> {
    nested_ground(kind, ts, None)
}

pub fn minclean_min(e: &TemporalRelation) -> Result<MinCleanCertificate> {
    ensure_smooth(e)?;
    ensure_preserved(e, OpKind::MIN)?;
    if let Some(c) = singleton_certificate(e)? {
        return Ok(c);
    }
    let f = factor_digraph(e)?;
    // Every edge has both minima at 0, so the nested min collects the union
    // of minimum coordinates over the component on both sides.
    let t = nested(OpKind::MIN, &component_edges(e, &f, 0)?)?;
    certify(e, &t, Route::NestedMin)
}

/// A genuine loop of a cyclic relation preserved by min.
pub fn loop_cyclic_min(r: &TemporalRelation) -> Result<MinCleanCertificate> {
    hypothesis(r.is_cyclic(), "relation is not cyclic")?;
    ensure_preserved(r, OpKind::MIN)?;
    if let Some(o) = r.orbits().iter().find(|o| is_loop(o, r.k)) {
        return certify(r, &o.ground(), Route::Loop);
    }
    let t = r.orbits().iter().next().ok_or_else(|| Error::EmptyResult("empty relation".into()))?.ground();
    let s = nested(OpKind::MIN, &cyclic_shifts(&t, r.n, r.k))?;
    if !is_loop(&s.canonicalize(), r.k) {
        return Err(Error::Precondition("nested min over the shifts is not a loop".into()));
    }
    certify(r, &s, Route::Loop)
}

/// `t` composed with the powers of the cyclic shift, identity first.
pub fn cyclic_shifts(t: &GroundTuple, n: usize, k: usize) -> Vec<GroundTuple> {
    let c = cycle(n);
    let mut out = vec![t.clone()];
    for _ in 1..n {
        let next = out.last().unwrap().permute_blocks(&c, k);
        out.push(next);
    }
    out
}

pub fn minclean_mi(e: &TemporalRelation) -> Result<MinCleanCertificate> {
    ensure_smooth(e)?;
    ensure_preserved(e, OpKind::MI)?;
    if let Some(c) = singleton_certificate(e)? {
        return Ok(c);
    }
    let f = factor_digraph(e)?;
    let c = length_one_component(&f)?;
    from_found(
        e,
        (|| {
            let chase = component_minx_intersection(e, c, OpKind::MI)?;
            let t = nested(OpKind::MI, &component_edges(e, &f, c)?)?;
            let cert = certify(e, &t, Route::NestedMi)?;
            if cert.common_minx != chase.intersection {
                return Err(Error::Precondition("nested mi disagrees with the component intersection".into()));
            }
            Ok(cert)
        })(),
    )
}

/// Every edge of a length-1 component is min-clean; the least one is chased
/// and returned.
pub fn minclean_mx(e: &TemporalRelation) -> Result<MinCleanCertificate> {
    ensure_preserved(e, OpKind::MX)?;
    if let Some(c) = singleton_certificate(e)? {
        return Ok(c);
    }
    let f = factor_digraph(e)?;
    let c = length_one_component(&f)?;
    let t = e.restrict_component(&f.component_vertices(c))?.orbits().iter().next().unwrap().clone();
    from_found(
        e,
        (|| {
            mx_fence_chase(e, &t)?;
            certify(e, &t.ground(), Route::MxChase)
        })(),
    )
}

/// Min-clean member of the derivative of `s` (its lex-closure members with
/// the least kernel).
pub fn minclean_lex(s: &TemporalRelation, e: &TemporalRelation, budget: usize) -> Result<MinCleanCertificate> {
    ensure_smooth(e)?;
    ensure_preserved(e, OpKind::LEX)?;
    hypothesis(s.n == 2 && s.k == e.k, "relations differ in shape")?;
    hypothesis(s.orbits().is_subset(e.orbits()), "S is not contained in E")?;
    ensure_smooth(s)?;
    let fs = factor_digraph(s)?;
    hypothesis(!fs.length_one_components().is_empty(), "S has no component of pseudo-algebraic length 1")?;
    hypothesis(fs.components.len() == 1, "first projection of S is not weakly connected")?;
    let l = s.closure(OpKind::LEX, budget)?;
    minclean_lex_in(s, e, &l)
}

/// As [`minclean_lex`], given the lex-closure `l` of `s`; hypotheses are
/// assumed checked.
pub(crate) fn minclean_lex_in(s: &TemporalRelation, e: &TemporalRelation, l: &TemporalRelation) -> Result<MinCleanCertificate> {
    let kernel = s.kernel_intersection();
    let sp = l.filter(|o| o.kernel() == kernel);
    if let Some(c) = singleton_certificate(&sp)? {
        return Ok(c);
    }
    let least = sp.orbits().iter().next().ok_or_else(|| Error::EmptyResult("derivative is empty".into()))?;
    if let Some(t) = singleton_orbit(l) {
        // lex(t, s) keeps the kernel of s and the single minimal component of t.
        let (img, _) = images(OpKind::LEX, &t, least)?.remove(0);
        return certify(&sp, &img.ground(), Route::LexSingleton);
    }
    if singleton_orbit(e).is_some() {
        let o = sp
            .orbits()
            .iter()
            .find(|o| common_minx(o.ranks(), e.k).is_some())
            .ok_or_else(|| Error::EmptyResult("no min-clean member of the derivative".into()))?;
        return certify(&sp, &o.ground(), Route::ExhaustiveFallback);
    }
    let fe = factor_digraph(e)?;
    let first = s.orbits().iter().next().unwrap().block(0, e.k);
    let c = fe.component[fe.index_of(&first).unwrap()];
    let chase = component_minx_intersection(e, c, OpKind::LEX)?;
    let gens: Vec<GroundTuple> = s.orbits().iter().map(WeakOrder::ground).collect();
    let t = nested(OpKind::LEX, &gens)?;
    let cert = certify(&sp, &t, Route::NestedLex)?;
    if !chase.intersection.is_subset(&cert.common_minx) {
        return Err(Error::Precondition("nested lex lost the component intersection".into()));
    }
    Ok(cert)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum MinReady {
    Singleton { orbit: WeakOrder, tuple: GroundTuple },
    AllFull,
}

fn find_perm(g: &SymmetryGroup, want: &[(usize, usize)]) -> Result<Vec<usize>> {
    g.generators
        .iter()
        .filter(|p| want.iter().all(|&(i, j)| p[i] == j))
        .min_by_key(|p| (p.iter().enumerate().filter(|(i, v)| i != *v).count(), (*p).clone()))
        .cloned()
        .ok_or_else(|| Error::Hypothesis(format!("no symmetry realizing {want:?}")))
}

fn two_transitive_group(r: &TemporalRelation) -> Result<SymmetryGroup> {
    let g = r.symmetry_group();
    hypothesis(g.is_two_transitive(), "relation is not 2-transitive")?;
    Ok(g)
}

/// Either a member with one minimal component, or the verified fact that
/// every member has all components minimal.
pub fn min_ready_dichotomy(r: &TemporalRelation, kind: OpKind) -> Result<MinReady> {
    hypothesis(matches!(kind, OpKind::MI | OpKind::LEX), "dichotomy needs mi or lex")?;
    let g = two_transitive_group(r)?;
    ensure_preserved(r, kind)?;
    dichotomy_with(r, kind, &g)
}

fn dichotomy_with(r: &TemporalRelation, kind: OpKind, g: &SymmetryGroup) -> Result<MinReady> {
    let (n, k) = (r.n, r.k);
    if let Some(o) = singleton_orbit(r) {
        return Ok(MinReady::Singleton { tuple: o.ground(), orbit: o });
    }
    let Some(t) = r.orbits().iter().find(|o| m_set(o.ranks(), k).len() < n) else {
        return Ok(MinReady::AllFull);
    };
    let m = m_set(t.ranks(), k);
    let a = *m.iter().next().unwrap();
    let p = (0..n).find(|i| !m.contains(i)).unwrap();
    let tg = t.ground();
    let mut ts = Vec::new();
    for i in (0..n).filter(|&i| i != a) {
        let perm = find_perm(g, &[(a, a), (i, p)])?;
        let copy = tg.permute_blocks(&perm, k);
        hypothesis(r.contains(&copy.canonicalize()), "permuted member missing")?;
        ts.push(copy);
    }
    let s = nested(kind, &ts)?;
    let orbit = s.canonicalize();
    if m_set(s.values(), k) != BTreeSet::from([a]) || !r.contains(&orbit) {
        return Err(Error::Precondition("nested copies did not isolate one minimal component".into()));
    }
    Ok(MinReady::Singleton { orbit, tuple: s })
}

/// For `t` with every component minimal, certifies via two rounds of the
/// intersection step that the minimum coordinates of all components intersect.
pub fn hyp_intersection(r: &TemporalRelation, g: &SymmetryGroup, t: &GroundTuple, kind: OpKind) -> Result<BTreeSet<usize>> {
    let (n, k) = (r.n, r.k);
    hypothesis(n >= 3, "arity below 3")?;
    let mut ts = vec![t.clone()];
    // Copies fixing component 0 and moving component i into slot 1.
    for i in 2..n {
        ts.push(t.permute_blocks(&find_perm(g, &[(0, 0), (1, i)])?, k));
    }
    let holds = |ts: &[GroundTuple], i: usize, j: usize| -> Result<BTreeSet<usize>> {
        for u in ts {
            hypothesis(r.contains(&u.canonicalize()), "permuted member missing")?;
        }
        match mi_intersect_step(kind, ts, k, i, j)? {
            StepOutcome::Holds { intersection } => Ok(intersection),
            StepOutcome::NotMinReady { .. } => Err(Error::Precondition("tuple is not min-ready".into())),
        }
    };
    for j in 1..n {
        holds(&ts, 0, j)?;
    }
    ts.push(t.permute_blocks(&find_perm(g, &[(1, 0), (2, 2)])?, k));
    let out = holds(&ts, 2, 1)?;
    let direct = t
        .blocks(k)
        .iter()
        .map(|b| crate::orbit::minx_of(b.values()))
        .reduce(|a, b| a.intersection(&b).copied().collect())
        .unwrap();
    if out != direct {
        return Err(Error::Precondition("intersection step disagrees with the direct intersection".into()));
    }
    Ok(out)
}

/// Min-clean member of an n-ary relation (n at least 3); for lex the member
/// lies in the derivative.
pub fn minclean_hyp(r: &TemporalRelation, kind: OpKind, budget: usize) -> Result<MinCleanCertificate> {
    hypothesis(r.n >= 3, "arity below 3")?;
    hypothesis(matches!(kind, OpKind::MI | OpKind::MX | OpKind::LEX), "unsupported kind")?;
    if kind != OpKind::MX {
        hypothesis(r.is_cyclic(), "relation is not cyclic")?;
    }
    let g = two_transitive_group(r)?;
    ensure_preserved(r, kind)?;
    let k = r.k;
    match kind.base {
        BaseOp::Mi => {
            if let Some(c) = singleton_certificate(r)? {
                return Ok(c);
            }
            if let Some(o) = r.orbits().iter().find(|o| is_loop(o, k)) {
                return certify(r, &o.ground(), Route::Loop);
            }
            if let MinReady::Singleton { tuple, .. } = dichotomy_with(r, kind, &g)? {
                return certify(r, &tuple, Route::Singleton);
            }
            let t = r.orbits().iter().next().unwrap().ground();
            hyp_intersection(r, &g, &t, kind)?;
            certify(r, &nested(kind, &cyclic_shifts(&t, r.n, k))?, Route::CyclicShifts)
        }
        BaseOp::Lex => {
            let rp = r.derivative(budget)?;
            if let Some(c) = singleton_certificate(&rp)? {
                return Ok(c);
            }
            let least = rp.orbits().iter().next().unwrap();
            let single = match dichotomy_with(r, kind, &g)? {
                MinReady::Singleton { orbit, .. } => Some(orbit),
                MinReady::AllFull => None,
            };
            if let Some(t) = single {
                let (img, _) = images(OpKind::LEX, &t, least)?.remove(0);
                return certify(&rp, &img.ground(), Route::LexSingleton);
            }
            let t = least.ground();
            hyp_intersection(r, &g, &t, kind)?;
            certify(&rp, &nested(kind, &cyclic_shifts(&t, r.n, k))?, Route::CyclicShifts)
        }
        _ => minclean_hyp_mx(r, &g),
    }
}

fn minclean_hyp_mx(r: &TemporalRelation, g: &SymmetryGroup) -> Result<MinCleanCertificate> {
    let k = r.k;
    if let Some(c) = singleton_certificate(r)? {
        return Ok(c);
    }
    if let Some(o) = r.orbits().iter().find(|o| is_loop(o, k)) {
        return certify(r, &o.ground(), Route::Loop);
    }
    let Some(start) = r.orbits().iter().find(|o| common_minx(o.ranks(), k).is_none()) else {
        return certify(r, &r.orbits().iter().next().unwrap().ground(), Route::MxRepair);
    };
    let mut t = start.ground();
    // Each round replaces two disagreeing minimal components by their
    // symmetric difference.
    for _ in 0..4 * r.n * k {
        let m: Vec<usize> = m_set(t.values(), k).into_iter().collect();
        let minx: Vec<BTreeSet<usize>> = t.blocks(k).iter().map(|b| crate::orbit::minx_of(b.values())).collect();
        let Some((a, b)) = m
            .iter()
            .flat_map(|&a| m.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| a < b && minx[a] != minx[b])
        else {
            return certify(r, &t, Route::MxRepair);
        };
        let swapped = t.permute_blocks(&find_perm(g, &[(a, b), (b, a)])?, k);
        t = apply_ground(OpKind::MX, &t, &swapped, None)?;
        hypothesis(r.contains(&t.canonicalize()), "mx of permuted members left the relation")?;
    }
    Err(Error::ResourceBound { what: "mx repair rounds", limit: 4 * r.n * k })
}
