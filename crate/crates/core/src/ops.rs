//! The binary operations min, mi, mx, lex, ll_q, pp_q, their duals, and the
//! constant operation.
//!
//! Values produced by an operation are [`LayeredValue`]s: lexicographic keys of
//! `(value, tag)` atoms. The tag order realizes the endomorphisms of the
//! definitions (tag 0 < tag 1 < tag 2 on the same value, and every tag of `x`
//! below every tag of any larger value). A shorter key is extended with the
//! neutral atom `(0, 0)`, which plays the role of an endomorphism fixing the
//! current values.

use std::collections::HashMap;

use rustc_hash::{FxHashMap, FxHashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::orbit::{canonicalize_slice, GroundTuple, Rational, WeakOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseOp {
    Min,
    Mi,
    Mx,
    Lex,
    Ll,
    Pp,
    Constant,
}

impl BaseOp {
    pub const ALL: [BaseOp; 7] =
        [BaseOp::Min, BaseOp::Mi, BaseOp::Mx, BaseOp::Lex, BaseOp::Ll, BaseOp::Pp, BaseOp::Constant];

    pub fn tag(self) -> &'static str {
        match self {
            BaseOp::Min => "min",
            BaseOp::Mi => "mi",
            BaseOp::Mx => "mx",
            BaseOp::Lex => "lex",
            BaseOp::Ll => "ll",
            BaseOp::Pp => "pp",
            BaseOp::Constant => "const",
        }
    }

    /// Whether the operation reads a threshold constant.
    pub fn uses_constant(self) -> bool {
        matches!(self, BaseOp::Ll | BaseOp::Pp)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpKind {
    pub base: BaseOp,
    pub dual: bool,
}

impl OpKind {
    pub const MIN: OpKind = OpKind::plain(BaseOp::Min);
    pub const MI: OpKind = OpKind::plain(BaseOp::Mi);
    pub const MX: OpKind = OpKind::plain(BaseOp::Mx);
    pub const LEX: OpKind = OpKind::plain(BaseOp::Lex);
    pub const LL: OpKind = OpKind::plain(BaseOp::Ll);
    pub const PP: OpKind = OpKind::plain(BaseOp::Pp);
    pub const CONSTANT: OpKind = OpKind::plain(BaseOp::Constant);

    pub const fn plain(base: BaseOp) -> Self {
        OpKind { base, dual: false }
    }

    /// The kinds the classification distinguishes: min, mi, mx, ll and
    /// their duals, then the constant operation.
    pub fn classified() -> Vec<OpKind> {
        let mut out = Vec::new();
        for base in [BaseOp::Min, BaseOp::Mi, BaseOp::Mx, BaseOp::Ll] {
            out.push(OpKind::plain(base));
            out.push(dual_of(OpKind::plain(base)));
        }
        out.push(OpKind::CONSTANT);
        out
    }

    pub fn uses_constant(self) -> bool {
        self.base.uses_constant()
    }
}

pub fn dual_of(kind: OpKind) -> OpKind {
    OpKind { base: kind.base, dual: !kind.dual }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            write!(f, "dual:{}", self.base.tag())
        } else {
            write!(f, "{}", self.base.tag())
        }
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (dual, rest) = match s.strip_prefix("dual:") {
            Some(rest) => (true, rest),
            None => match s.strip_prefix("dual-") {
                Some(rest) => (true, rest),
                None => (false, s),
            },
        };
        let base = match rest {
            "max" if !dual => return Ok(dual_of(OpKind::MIN)),
            "min" => BaseOp::Min,
            "mi" => BaseOp::Mi,
            "mx" => BaseOp::Mx,
            "lex" => BaseOp::Lex,
            "ll" => BaseOp::Ll,
            "pp" => BaseOp::Pp,
            "const" | "constant" => BaseOp::Constant,
            _ => return Err(Error::Parse(format!("unknown operation {s:?}"))),
        };
        Ok(OpKind { base, dual })
    }
}

impl Serialize for OpKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OpKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type Atom = (Rational, i32);

/// Output value of a (nested) operation, compared lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LayeredValue(pub Vec<Atom>);

impl fmt::Debug for LayeredValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|(v, t)| format!("({},{})", crate::orbit::format_rational(v), t)).collect();
        write!(f, "<{}>", parts.join(""))
    }
}

impl LayeredValue {
    pub fn plain(v: Rational) -> Self {
        LayeredValue(vec![(v, 0)])
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    fn padded(&self, depth: usize) -> LayeredValue {
        let mut out = self.0.clone();
        out.resize(depth, (Rational::zero(), 0));
        LayeredValue(out)
    }

    pub fn negate(&self) -> LayeredValue {
        LayeredValue(self.0.iter().map(|(v, t)| (-v, -t)).collect())
    }

    fn with_atom(&self, atom: Atom) -> LayeredValue {
        let mut out = self.0.clone();
        out.push(atom);
        LayeredValue(out)
    }

    fn prefixed(tag: i32, parts: &[&LayeredValue]) -> LayeredValue {
        let mut out = vec![(Rational::zero(), tag)];
        for p in parts {
            out.extend(p.0.iter().cloned());
        }
        LayeredValue(out)
    }
}

pub fn lift(t: &GroundTuple) -> Vec<LayeredValue> {
    t.values().iter().cloned().map(LayeredValue::plain).collect()
}

pub fn canonicalize_layered(values: &[LayeredValue]) -> WeakOrder {
    canonicalize_slice(values)
}

fn uniform_depth(values: &[LayeredValue], what: &str) -> Result<usize> {
    let d = values.first().map_or(0, |v| v.depth());
    if values.iter().any(|v| v.depth() != d) {
        return Err(Error::DepthMismatch(format!("{what} mixes layer depths")));
    }
    Ok(d)
}

fn pad_to(values: &[LayeredValue], depth: usize) -> Vec<LayeredValue> {
    values.iter().map(|v| v.padded(depth)).collect()
}

/// Applies `kind` componentwise. `q` is required by ll and pp.
pub fn apply(
    kind: OpKind,
    a: &[LayeredValue],
    b: &[LayeredValue],
    q: Option<&LayeredValue>,
) -> Result<Vec<LayeredValue>> {
    if a.len() != b.len() {
        return Err(Error::ArityMismatch(format!("arguments of length {} and {}", a.len(), b.len())));
    }
    if kind.uses_constant() && q.is_none() {
        return Err(Error::MissingConstantSlot(kind.to_string()));
    }
    if kind.dual {
        let na: Vec<_> = a.iter().map(LayeredValue::negate).collect();
        let nb: Vec<_> = b.iter().map(LayeredValue::negate).collect();
        let nq = q.map(LayeredValue::negate);
        let out = apply_base(kind.base, &na, &nb, nq.as_ref())?;
        return Ok(out.iter().map(LayeredValue::negate).collect());
    }
    apply_base(kind.base, a, b, q)
}

fn apply_base(
    base: BaseOp,
    a: &[LayeredValue],
    b: &[LayeredValue],
    q: Option<&LayeredValue>,
) -> Result<Vec<LayeredValue>> {
    let da = uniform_depth(a, "first argument")?;
    let db = uniform_depth(b, "second argument")?;
    let out: Vec<LayeredValue> = match base {
        BaseOp::Min | BaseOp::Mi | BaseOp::Mx => {
            let d = da.max(db);
            let (a, b) = (pad_to(a, d), pad_to(b, d));
            a.iter()
                .zip(&b)
                .map(|(x, y)| {
                    let m = x.min(y).clone();
                    match base {
                        BaseOp::Min => m,
                        BaseOp::Mi => m.with_atom((Rational::zero(), if x == y { 0 } else if x < y { 1 } else { 2 })),
                        _ => m.with_atom((Rational::zero(), if x != y { 0 } else { 1 })),
                    }
                })
                .collect()
        }
        BaseOp::Lex => a.iter().zip(b).map(|(x, y)| LayeredValue([x.0.clone(), y.0.clone()].concat())).collect(),
        BaseOp::Ll | BaseOp::Pp => {
            let q = q.expect("checked by caller");
            let d = da.max(q.depth());
            let a = pad_to(a, d);
            let q = q.padded(d);
            a.iter()
                .zip(b)
                .map(|(x, y)| match (base, *x <= q) {
                    (BaseOp::Ll, true) => LayeredValue::prefixed(0, &[x, y]),
                    (BaseOp::Ll, false) => LayeredValue::prefixed(1, &[y, x]),
                    (_, true) => LayeredValue::prefixed(0, &[x]),
                    (_, false) => LayeredValue::prefixed(1, &[y]),
                })
                .collect()
        }
        BaseOp::Constant => vec![LayeredValue::plain(Rational::zero()); a.len()],
    };
    let d = out.iter().map(LayeredValue::depth).max().unwrap_or(0);
    Ok(pad_to(&out, d))
}

/// Right-nested fold `f(t1, f(t2, ... f(t_{m-1}, t_m)))`.
pub fn nested_apply(kind: OpKind, ts: &[Vec<LayeredValue>], q: Option<&LayeredValue>) -> Result<Vec<LayeredValue>> {
    if ts.len() < 2 {
        return Err(Error::Precondition("nested application needs at least two tuples".into()));
    }
    let mut acc = ts[ts.len() - 1].clone();
    for t in ts[..ts.len() - 1].iter().rev() {
        acc = apply(kind, t, &acc, q)?;
    }
    Ok(acc)
}

/// Nested application over ground tuples sharing one frame, followed by
/// canonical re-grounding of the result.
pub fn nested_ground(kind: OpKind, ts: &[GroundTuple], q: Option<&Rational>) -> Result<GroundTuple> {
    if ts.len() == 1 {
        return Ok(ts[0].clone());
    }
    let lifted: Vec<_> = ts.iter().map(lift).collect();
    let q = q.cloned().map(LayeredValue::plain);
    let out = nested_apply(kind, &lifted, q.as_ref())?;
    Ok(canonicalize_layered(&out).ground())
}

pub fn negate(t: &GroundTuple) -> GroundTuple {
    t.negate()
}

/// Joint weak order of two equal-length tuples, optionally followed by one
/// slot for the threshold constant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Alignment {
    pub joint: WeakOrder,
    pub len: usize,
    pub constant: bool,
}

impl fmt::Debug for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{}{}", self.joint, self.len, if self.constant { "+q" } else { "" })
    }
}

impl Alignment {
    pub fn new(joint: WeakOrder, len: usize, constant: bool) -> Result<Self> {
        if joint.len() != 2 * len + constant as usize {
            return Err(Error::InconsistentAlignment(format!(
                "joint order of length {} for two tuples of length {len}",
                joint.len()
            )));
        }
        Ok(Alignment { joint, len, constant })
    }

    pub fn left(&self) -> WeakOrder {
        canonicalize_slice(&self.joint.ranks()[..self.len])
    }

    pub fn right(&self) -> WeakOrder {
        canonicalize_slice(&self.joint.ranks()[self.len..2 * self.len])
    }

    pub fn constant_rank(&self) -> Option<u32> {
        self.constant.then(|| self.joint.ranks()[2 * self.len])
    }

    /// Exchanges the roles of the two tuples.
    pub fn swap(&self) -> Alignment {
        let r = self.joint.ranks();
        let mut out = r[self.len..2 * self.len].to_vec();
        out.extend_from_slice(&r[..self.len]);
        out.extend_from_slice(&r[2 * self.len..]);
        Alignment { joint: canonicalize_slice(&out), len: self.len, constant: self.constant }
    }

    /// Order reversal of the whole joint frame.
    pub fn reverse(&self) -> Alignment {
        Alignment { joint: self.joint.negate(), len: self.len, constant: self.constant }
    }

    /// Restricts both tuples to `positions` (the constant slot is kept).
    pub fn restrict(&self, positions: &[usize]) -> Alignment {
        let r = self.joint.ranks();
        let mut out: Vec<u32> = positions.iter().map(|&p| r[p]).collect();
        out.extend(positions.iter().map(|&p| r[self.len + p]));
        if self.constant {
            out.push(r[2 * self.len]);
        }
        Alignment { joint: canonicalize_slice(&out), len: positions.len(), constant: self.constant }
    }

    /// Integer realization: left tuple, right tuple, threshold.
    pub fn ground(&self) -> (GroundTuple, GroundTuple, Option<Rational>) {
        let g = self.joint.ground();
        (
            GroundTuple(g.0[..self.len].to_vec()),
            GroundTuple(g.0[self.len..2 * self.len].to_vec()),
            self.constant.then(|| g.0[2 * self.len].clone()),
        )
    }

    /// Builds the alignment realized by concrete tuples.
    pub fn of(a: &GroundTuple, b: &GroundTuple, q: Option<&Rational>) -> Result<Alignment> {
        if a.len() != b.len() {
            return Err(Error::ArityMismatch("aligned tuples differ in length".into()));
        }
        let mut vals: Vec<Rational> = a.values().to_vec();
        vals.extend_from_slice(b.values());
        if let Some(q) = q {
            vals.push(q.clone());
        }
        Alignment::new(canonicalize_slice(&vals), a.len(), q.is_some())
    }
}

/// Largest number of alignments [`alignments`] will materialize.
pub const MAX_ALIGNMENTS: usize = 2_000_000;

/// Interleavings of two chains with `d1` and `d2` classes: for each, the joint
/// rank of every class of the first and second chain.
fn chain_merges(d1: usize, d2: usize) -> Arc<Vec<(Vec<u32>, Vec<u32>)>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<(Vec<u32>, Vec<u32>)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(d1, d2)) {
        return hit.clone();
    }
    let mut out = Vec::new();
    let mut m1 = vec![0u32; d1];
    let mut m2 = vec![0u32; d2];
    merge_rec(0, 0, 0, &mut m1, &mut m2, &mut out);
    let out = Arc::new(out);
    cache.lock().unwrap().insert((d1, d2), out.clone());
    out
}

fn merge_rec(
    i: usize,
    j: usize,
    step: u32,
    m1: &mut Vec<u32>,
    m2: &mut Vec<u32>,
    out: &mut Vec<(Vec<u32>, Vec<u32>)>,
) {
    if i == m1.len() && j == m2.len() {
        out.push((m1.clone(), m2.clone()));
        return;
    }
    if i < m1.len() && j < m2.len() {
        m1[i] = step;
        m2[j] = step;
        merge_rec(i + 1, j + 1, step + 1, m1, m2, out);
    }
    if i < m1.len() {
        m1[i] = step;
        merge_rec(i + 1, j, step + 1, m1, m2, out);
    }
    if j < m2.len() {
        m2[j] = step;
        merge_rec(i, j + 1, step + 1, m1, m2, out);
    }
}

fn delannoy(d1: usize, d2: usize) -> usize {
    let mut row = vec![1usize; d2 + 1];
    for _ in 0..d1 {
        let mut next = vec![1usize; d2 + 1];
        for j in 1..=d2 {
            next[j] = next[j - 1].saturating_add(row[j]).saturating_add(row[j - 1]);
        }
        row = next;
    }
    row[d2]
}

/// Every alignment of `o1` and `o2`; with `with_constant`, every placement of
/// the threshold slot as well.
pub fn alignments(o1: &WeakOrder, o2: &WeakOrder, with_constant: bool) -> Result<Vec<Alignment>> {
    if o1.len() != o2.len() {
        return Err(Error::ArityMismatch("aligned orbits differ in length".into()));
    }
    let (d1, d2) = (o1.classes(), o2.classes());
    let count = delannoy(d1, d2).saturating_mul(if with_constant { 2 * (d1 + d2) + 1 } else { 1 });
    if count > MAX_ALIGNMENTS {
        return Err(Error::ResourceBound { what: "alignments", limit: MAX_ALIGNMENTS });
    }
    let len = o1.len();
    let mut out = Vec::with_capacity(count);
    for (m1, m2) in chain_merges(d1, d2).iter() {
        let base: Vec<u32> = o1
            .ranks()
            .iter()
            .map(|&r| m1[r as usize])
            .chain(o2.ranks().iter().map(|&r| m2[r as usize]))
            .collect();
        if !with_constant {
            out.push(Alignment { joint: WeakOrder::from_ranks_unchecked(base), len, constant: false });
            continue;
        }
        let joint_classes = base.iter().max().map_or(0, |m| m + 1);
        // Slot 2c is the gap below class c, slot 2c+1 is class c itself.
        for slot in 0..=2 * joint_classes {
            let mut ranks: Vec<u32> = base.iter().map(|&r| 2 * r + 1).collect();
            ranks.push(slot);
            out.push(Alignment { joint: canonicalize_slice(&ranks), len, constant: true });
        }
    }
    Ok(out)
}

/// Orbit of the output of `kind` on any realization of `al`, computed through
/// layered keys on the integer realization.
pub fn orbit_image(kind: OpKind, al: &Alignment) -> Result<WeakOrder> {
    if kind.uses_constant() && !al.constant {
        return Err(Error::MissingConstantSlot(kind.to_string()));
    }
    let (a, b, q) = al.ground();
    let q = q.map(LayeredValue::plain);
    let out = apply(kind, &lift(&a), &lift(&b), if kind.uses_constant() { q.as_ref() } else { None })?;
    Ok(canonicalize_layered(&out))
}

/// Integer-key evaluation of [`orbit_image`]; agrees with it on every
/// alignment.
pub fn orbit_image_fast(kind: OpKind, al: &Alignment) -> Result<WeakOrder> {
    if kind.uses_constant() && !al.constant {
        return Err(Error::MissingConstantSlot(kind.to_string()));
    }
    let r = al.joint.ranks();
    let j = al.joint.classes() as i64;
    let flip = |x: u32| if kind.dual { j - 1 - x as i64 } else { x as i64 };
    let q = al.constant_rank().map(flip);
    let keys: Vec<i64> = (0..al.len)
        .map(|i| {
            let (x, y) = (flip(r[i]), flip(r[al.len + i]));
            let key = match kind.base {
                BaseOp::Min => x.min(y),
                BaseOp::Mi => 3 * x.min(y) + if x == y { 0 } else if x < y { 1 } else { 2 },
                BaseOp::Mx => 2 * x.min(y) + (x == y) as i64,
                BaseOp::Lex => x * (j + 1) + y,
                BaseOp::Pp => {
                    if x <= q.unwrap() {
                        x
                    } else {
                        (j + 1) + y
                    }
                }
                BaseOp::Ll => {
                    if x <= q.unwrap() {
                        x * (j + 1) + y
                    } else {
                        (j + 1) * (j + 1) + y * (j + 1) + x
                    }
                }
                BaseOp::Constant => 0,
            };
            if kind.dual {
                -key
            } else {
                key
            }
        })
        .collect();
    Ok(canonicalize_slice(&keys))
}

/// Distinct output orbits of `kind` over all alignments of `o1` and `o2`,
/// each with one alignment realizing it, sorted by orbit.
pub fn images(kind: OpKind, o1: &WeakOrder, o2: &WeakOrder) -> Result<Vec<(WeakOrder, Alignment)>> {
    if o1.len() != o2.len() {
        return Err(Error::ArityMismatch("combined orbits differ in length".into()));
    }
    if kind.dual {
        let inner = images(dual_of(kind), &o1.negate(), &o2.negate())?;
        let mut out: Vec<_> = inner.into_iter().map(|(w, al)| (w.negate(), al.reverse())).collect();
        out.sort();
        return Ok(out);
    }
    let len = o1.len();
    let mut out = match kind.base {
        BaseOp::Constant => {
            vec![(WeakOrder::constant(len), stacked_alignment(o1, o2, None))]
        }
        BaseOp::Lex => {
            let al = stacked_alignment(o1, o2, None);
            vec![(orbit_image_fast(kind, &al)?, al)]
        }
        BaseOp::Pp | BaseOp::Ll => {
            let mut v = Vec::new();
            for cut in 0..=o1.classes() {
                let al = stacked_alignment(o1, o2, Some(cut));
                v.push((orbit_image_fast(kind, &al)?, al));
            }
            v
        }
        BaseOp::Min | BaseOp::Mi | BaseOp::Mx => scan_images(kind.base, o1, o2),
    };
    out.sort();
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

/// The orbits of [`images`] without their alignments, in no fixed order.
pub fn image_orbits(kind: OpKind, o1: &WeakOrder, o2: &WeakOrder) -> Result<Vec<WeakOrder>> {
    if o1.len() != o2.len() {
        return Err(Error::ArityMismatch("combined orbits differ in length".into()));
    }
    if kind.dual {
        let inner = image_orbits(dual_of(kind), &o1.negate(), &o2.negate())?;
        return Ok(inner.iter().map(WeakOrder::negate).collect());
    }
    match kind.base {
        BaseOp::Min | BaseOp::Mi | BaseOp::Mx => {
            let (lists, table) = scan_table(kind.base, o1, o2);
            Ok(table[0][0].iter().map(|e| WeakOrder::from_ranks_unchecked(lists.to_ranks(e.suffix, o1.len()))).collect())
        }
        _ => Ok(images(kind, o1, o2)?.into_iter().map(|(w, _)| w).collect()),
    }
}

/// Alignment with every class of `o2` above every class of `o1`; `cut`
/// places the threshold so exactly the lowest `cut` classes of `o1` lie at
/// or below it.
fn stacked_alignment(o1: &WeakOrder, o2: &WeakOrder, cut: Option<usize>) -> Alignment {
    let d1 = o1.classes() as u32;
    let mut ranks: Vec<u32> = o1.ranks().iter().map(|&r| 2 * r + 1).collect();
    ranks.extend(o2.ranks().iter().map(|&r| 2 * (d1 + r) + 1));
    if let Some(cut) = cut {
        ranks.push(if cut == 0 { 0 } else { 2 * cut as u32 - 1 });
    }
    Alignment { joint: canonicalize_slice(&ranks), len: o1.len(), constant: cut.is_some() }
}

/// Hash-consed lists of position masks; node 0 is the empty list.
struct MaskLists {
    nodes: Vec<(u64, u32)>,
    index: FxHashMap<(u64, u32), u32>,
}

impl MaskLists {
    fn new() -> Self {
        MaskLists { nodes: vec![(0, 0)], index: FxHashMap::default() }
    }

    fn cons(&mut self, head: u64, tail: u32) -> u32 {
        let next = self.nodes.len() as u32;
        *self.index.entry((head, tail)).or_insert_with(|| {
            self.nodes.push((head, tail));
            next
        })
    }

    fn to_ranks(&self, mut id: u32, len: usize) -> Vec<u32> {
        let mut ranks = vec![0u32; len];
        let mut g = 0;
        while id != 0 {
            let (m, tail) = self.nodes[id as usize];
            for (p, r) in ranks.iter_mut().enumerate() {
                if m >> p & 1 == 1 {
                    *r = g;
                }
            }
            g += 1;
            id = tail;
        }
        ranks
    }
}

#[derive(Clone, Copy)]
struct ScanEntry {
    suffix: u32,
    step: u8,
    child: u32,
}

/// Output orbits of min, mi and mx by scanning the joint chain bottom-up.
/// The output only depends on which positions are first reached at each step
/// and by which argument, so paths are merged whenever their remaining
/// outputs coincide.
fn scan_images(base: BaseOp, o1: &WeakOrder, o2: &WeakOrder) -> Vec<(WeakOrder, Alignment)> {
    let (lists, table) = scan_table(base, o1, o2);
    table[0][0]
        .iter()
        .map(|e| {
            let mut path = Vec::new();
            let (mut i1, mut i2, mut cur) = (0, 0, *e);
            while cur.step != u8::MAX {
                path.push(cur.step);
                i1 += (cur.step != 1) as usize;
                i2 += (cur.step != 0) as usize;
                cur = table[i1][i2][cur.child as usize];
            }
            let w = WeakOrder::from_ranks_unchecked(lists.to_ranks(e.suffix, o1.len()));
            (w, path_alignment(o1, o2, &path))
        })
        .collect()
}

type ScanTable = Vec<Vec<Vec<ScanEntry>>>;

fn scan_table(base: BaseOp, o1: &WeakOrder, o2: &WeakOrder) -> (MaskLists, ScanTable) {
    let (d1, d2) = (o1.classes(), o2.classes());
    let len = o1.len();
    assert!(len <= 64, "tuples longer than 64 positions are not supported");
    let masks = |w: &WeakOrder, d: usize| {
        let mut eq = vec![0u64; d + 1];
        for (p, &r) in w.ranks().iter().enumerate() {
            eq[r as usize] |= 1 << p;
        }
        let mut below = vec![0u64; d + 2];
        for i in 0..=d {
            below[i + 1] = below[i] | eq[i];
        }
        (eq, below)
    };
    let (eq_a, below_a) = masks(o1, d1);
    let (eq_b, below_b) = masks(o2, d2);
    let full = below_a[d1];
    let above = |below: &[u64], i: usize| full & !below[i + 1];

    let mut lists = MaskLists::new();
    let mut table: Vec<Vec<Vec<ScanEntry>>> = vec![vec![Vec::new(); d2 + 1]; d1 + 1];
    let mut seen: FxHashSet<u32> = FxHashSet::default();
    for i1 in (0..=d1).rev() {
        for i2 in (0..=d2).rev() {
            let old = below_a[i1] | below_b[i2];
            let mut steps = [0u8; 3];
            let mut count = 0;
            for s in [2u8, 0, 1] {
                if match s {
                    0 => i1 < d1,
                    1 => i2 < d2,
                    _ => i1 < d1 && i2 < d2,
                } {
                    steps[count] = s;
                    count += 1;
                }
            }
            let steps = &steps[..count];
            if steps.is_empty() {
                table[i1][i2] = vec![ScanEntry { suffix: 0, step: u8::MAX, child: 0 }];
                continue;
            }
            if old == full {
                // Remaining steps emit nothing; finish along any path.
                table[i1][i2] = vec![ScanEntry { suffix: 0, step: steps[0], child: 0 }];
                continue;
            }
            seen.clear();
            let mut entries = Vec::new();
            for &step in steps {
                let (ta, tb) = (step != 1, step != 0);
                // Positions reached at this step only through the first argument,
                // only through the second, and through both.
                let only_a = if ta { eq_a[i1] & (above(&below_b, i2) | if tb { 0 } else { eq_b[i2] }) } else { 0 };
                let only_b = if tb { eq_b[i2] & (above(&below_a, i1) | if ta { 0 } else { eq_a[i1] }) } else { 0 };
                let both = if ta && tb { eq_a[i1] & eq_b[i2] } else { 0 };
                let (only_a, only_b, both) = (only_a & !old, only_b & !old, both & !old);
                let groups: &[u64] = match base {
                    BaseOp::Min => &[only_a | only_b | both],
                    BaseOp::Mi => &[both, only_a, only_b],
                    _ => &[only_a | only_b, both],
                };
                let next = &table[i1 + ta as usize][i2 + tb as usize];
                for (ci, e) in next.iter().enumerate() {
                    let mut id = e.suffix;
                    for &g in groups.iter().rev().filter(|&&g| g != 0) {
                        id = lists.cons(g, id);
                    }
                    if seen.insert(id) {
                        entries.push(ScanEntry { suffix: id, step, child: ci as u32 });
                    }
                }
            }
            table[i1][i2] = entries;
        }
    }
    (lists, table)
}

fn path_alignment(o1: &WeakOrder, o2: &WeakOrder, path: &[u8]) -> Alignment {
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    for (s, &step) in path.iter().enumerate() {
        if step != 1 {
            m1.push(s as u32);
        }
        if step != 0 {
            m2.push(s as u32);
        }
    }
    let ranks: Vec<u32> = o1
        .ranks()
        .iter()
        .map(|&r| m1[r as usize])
        .chain(o2.ranks().iter().map(|&r| m2[r as usize]))
        .collect();
    Alignment { joint: WeakOrder::from_ranks_unchecked(ranks), len: o1.len(), constant: false }
}

/// Applies `kind` to two ground tuples in a common frame and re-grounds.
pub fn apply_ground(kind: OpKind, a: &GroundTuple, b: &GroundTuple, q: Option<&Rational>) -> Result<GroundTuple> {
    nested_ground(kind, &[a.clone(), b.clone()], q)
}
