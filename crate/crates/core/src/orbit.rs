//! Orbits of tuples under the order-preserving permutations of the rationals.
//!
//! Two tuples lie in one orbit exactly when they induce the same weak order
//! on their positions, so an orbit is stored as a surjective rank tuple.
//! Indices are 0-based everywhere in this crate.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Largest tuple length accepted by [`enumerate_weak_orders`].
pub const MAX_ENUMERATION_LENGTH: usize = 9;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical orbit of a tuple: rank `r` at a position means the value there is
/// the `r`-th smallest distinct value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct WeakOrder(Vec<u32>);

impl TryFrom<Vec<u32>> for WeakOrder {
    type Error = Error;

    fn try_from(ranks: Vec<u32>) -> Result<Self> {
        WeakOrder::new(ranks)
    }
}

impl From<WeakOrder> for Vec<u32> {
    fn from(w: WeakOrder) -> Self {
        w.0
    }
}

impl fmt::Debug for WeakOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for WeakOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl WeakOrder {
    pub fn new(ranks: Vec<u32>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::InvalidWeakOrder("empty rank tuple".into()));
        }
        let max = *ranks.iter().max().unwrap() as usize;
        let mut seen = vec![false; max + 1];
        for &r in &ranks {
            seen[r as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidWeakOrder(format!("{ranks:?} is not surjective onto 0..={max}")));
        }
        Ok(WeakOrder(ranks))
    }

    pub(crate) fn from_ranks_unchecked(ranks: Vec<u32>) -> Self {
        debug_assert!(WeakOrder::new(ranks.clone()).is_ok());
        WeakOrder(ranks)
    }

    /// The all-equal orbit of length `len`.
    pub fn constant(len: usize) -> Self {
        WeakOrder(vec![0; len])
    }

    pub fn ranks(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct values.
    pub fn classes(&self) -> usize {
        self.0.iter().max().map_or(0, |m| *m as usize + 1)
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }

    /// Deterministic integer representative with values `0..classes`.
    pub fn ground(&self) -> GroundTuple {
        GroundTuple(self.0.iter().map(|&r| rational(r as i64)).collect())
    }

    /// Order reversal.
    pub fn negate(&self) -> WeakOrder {
        let top = self.classes() as u32 - 1;
        WeakOrder(self.0.iter().map(|&r| top - r).collect())
    }

    pub fn select(&self, positions: &[usize]) -> WeakOrder {
        canonicalize_slice(&positions.iter().map(|&p| self.0[p]).collect::<Vec<_>>())
    }

    /// Orbit of component `i` when read as an n-tuple of k-tuples.
    pub fn block(&self, i: usize, k: usize) -> WeakOrder {
        canonicalize_slice(&self.0[i * k..(i + 1) * k])
    }

    pub fn blocks(&self, k: usize) -> Vec<WeakOrder> {
        (0..self.len() / k).map(|i| self.block(i, k)).collect()
    }

    /// Rearranges components: component `i` of the result is component
    /// `perm[i]` of `self`.
    pub fn permute_blocks(&self, perm: &[usize], k: usize) -> WeakOrder {
        let mut out = Vec::with_capacity(self.len());
        for &src in perm {
            out.extend_from_slice(&self.0[src * k..(src + 1) * k]);
        }
        WeakOrder(out)
    }

    pub fn concat(parts: &[&WeakOrder]) -> WeakOrder {
        let flat: Vec<u32> = parts.iter().flat_map(|p| p.0.iter().copied()).collect();
        WeakOrder(flat)
    }

    pub fn kernel(&self) -> Kernel {
        kernel_of(&self.0)
    }
}

/// Canonical orbit of any totally ordered sequence.
pub fn canonicalize_slice<T: Ord>(values: &[T]) -> WeakOrder {
    let mut sorted: Vec<&T> = values.iter().collect();
    sorted.sort();
    sorted.dedup();
    WeakOrder(
        values
            .iter()
            .map(|v| sorted.binary_search(&v).expect("value present") as u32)
            .collect(),
    )
}

/// Concrete tuple of exact rationals; a representative of its orbit.
/// Serialized as a list of strings such as `"3"` or `"-7/2"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct GroundTuple(pub Vec<Rational>);

impl TryFrom<Vec<String>> for GroundTuple {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>().map(GroundTuple)
    }
}

impl From<GroundTuple> for Vec<String> {
    fn from(t: GroundTuple) -> Self {
        t.0.iter().map(format_rational).collect()
    }
}

impl fmt::Debug for GroundTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Display for GroundTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl GroundTuple {
    pub fn from_ints(values: &[i64]) -> Self {
        GroundTuple(values.iter().map(|&v| rational(v)).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn canonicalize(&self) -> WeakOrder {
        canonicalize(self)
    }

    pub fn negate(&self) -> GroundTuple {
        GroundTuple(self.0.iter().map(|v| -v).collect())
    }

    pub fn block(&self, i: usize, k: usize) -> GroundTuple {
        GroundTuple(self.0[i * k..(i + 1) * k].to_vec())
    }

    pub fn blocks(&self, k: usize) -> Vec<GroundTuple> {
        (0..self.len() / k).map(|i| self.block(i, k)).collect()
    }

    pub fn concat(parts: &[GroundTuple]) -> GroundTuple {
        GroundTuple(parts.iter().flat_map(|p| p.0.iter().cloned()).collect())
    }

    pub fn select(&self, positions: &[usize]) -> GroundTuple {
        GroundTuple(positions.iter().map(|&p| self.0[p].clone()).collect())
    }

    pub fn permute_blocks(&self, perm: &[usize], k: usize) -> GroundTuple {
        GroundTuple::concat(&perm.iter().map(|&p| self.block(p, k)).collect::<Vec<_>>())
    }

    pub fn stats(&self) -> TupleStats {
        stats(self)
    }
}

pub fn format_rational(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn serialize_rational<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(v))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

pub fn canonicalize(t: &GroundTuple) -> WeakOrder {
    canonicalize_slice(&t.0)
}

/// All surjective rank tuples of length `k`, in lexicographic order.
pub fn enumerate_weak_orders(k: usize) -> Result<Vec<WeakOrder>> {
    if k == 0 {
        return Err(Error::InvalidWeakOrder("length must be positive".into()));
    }
    if k > MAX_ENUMERATION_LENGTH {
        return Err(Error::ResourceBound { what: "weak order length", limit: MAX_ENUMERATION_LENGTH });
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    fill_rank_tuples(&mut cur, 0, k as u32, &mut out);
    Ok(out)
}

fn fill_rank_tuples(cur: &mut Vec<u32>, pos: usize, k: u32, out: &mut Vec<WeakOrder>) {
    if pos == cur.len() {
        if let Ok(w) = WeakOrder::new(cur.clone()) {
            out.push(w);
        }
        return;
    }
    for r in 0..k {
        cur[pos] = r;
        fill_rank_tuples(cur, pos + 1, k, out);
    }
}

/// Pairs `(i, j)`, `i < j`, of positions holding equal values.
pub type Kernel = BTreeSet<(usize, usize)>;

pub fn kernel_of<T: PartialEq>(values: &[T]) -> Kernel {
    let mut out = Kernel::new();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[i] == values[j] {
                out.insert((i, j));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleStats {
    pub min_value: Rational,
    pub minx: BTreeSet<usize>,
    pub kernel: Kernel,
    /// `i_sets[m - 1]` holds the positions of the `m` smallest distinct values.
    pub i_sets: Vec<BTreeSet<usize>>,
}

pub fn stats(t: &GroundTuple) -> TupleStats {
    assert!(!t.is_empty(), "stats of an empty tuple");
    let w = canonicalize(t);
    let k = t.len();
    let i_sets = (1..=k).map(|m| i_set(&w, m)).collect();
    TupleStats {
        min_value: t.0.iter().min().unwrap().clone(),
        minx: minx_of(&t.0),
        kernel: kernel_of(&t.0),
        i_sets,
    }
}

/// Positions attaining the minimum.
pub fn minx_of<T: Ord>(values: &[T]) -> BTreeSet<usize> {
    let Some(min) = values.iter().min() else { return BTreeSet::new() };
    values.iter().enumerate().filter(|(_, v)| *v == min).map(|(i, _)| i).collect()
}

/// Positions whose value is among the `m` smallest distinct values.
pub fn i_set(w: &WeakOrder, m: usize) -> BTreeSet<usize> {
    w.ranks().iter().enumerate().filter(|(_, &r)| (r as usize) < m).map(|(i, _)| i).collect()
}

/// `a ~_I b`: the projections to `positions` are order-isomorphic.
pub fn sim_on<T: Ord>(a: &[T], b: &[T], positions: &BTreeSet<usize>) -> bool {
    let pa: Vec<&T> = positions.iter().map(|&i| &a[i]).collect();
    let pb: Vec<&T> = positions.iter().map(|&i| &b[i]).collect();
    pa.is_empty() || canonicalize_slice(&pa) == canonicalize_slice(&pb)
}

/// Components (of length `k`) whose minimum equals the global minimum.
pub fn m_set<T: Ord>(flat: &[T], k: usize) -> BTreeSet<usize> {
    let Some(global) = flat.iter().min() else { return BTreeSet::new() };
    flat.chunks(k)
        .enumerate()
        .filter(|(_, c)| c.iter().min() == Some(global))
        .map(|(i, _)| i)
        .collect()
}

/// All components in the M-set attain their minimum on the same coordinates.
pub fn is_min_clean<T: Ord>(flat: &[T], k: usize) -> bool {
    common_minx(flat, k).is_some()
}

/// The shared `minx` of the M-set components, if they agree.
pub fn common_minx<T: Ord>(flat: &[T], k: usize) -> Option<BTreeSet<usize>> {
    let mut common: Option<BTreeSet<usize>> = None;
    for i in m_set(flat, k) {
        let mx = minx_of(&flat[i * k..(i + 1) * k]);
        match &common {
            None => common = Some(mx),
            Some(c) if *c != mx => return None,
            _ => {}
        }
    }
    common
}

/// Builds a ground tuple in orbit `orbit` whose values at the given positions
/// are prescribed. Unconstrained ranks are filled with evenly spaced values
/// between their known neighbours (integers step outward past the ends).
pub fn realize(orbit: &WeakOrder, fixed: &[(usize, Rational)]) -> Result<GroundTuple> {
    let d = orbit.classes();
    let mut known: Vec<Option<Rational>> = vec![None; d];
    for (pos, v) in fixed {
        let r = orbit.ranks()[*pos] as usize;
        match &known[r] {
            Some(prev) if prev != v => {
                return Err(Error::InconsistentAlignment(format!(
                    "positions of rank {r} prescribed different values"
                )))
            }
            _ => known[r] = Some(v.clone()),
        }
    }
    let anchors: Vec<(usize, Rational)> =
        known.iter().enumerate().filter_map(|(r, v)| v.clone().map(|v| (r, v))).collect();
    if anchors.windows(2).any(|w| w[0].1 >= w[1].1) {
        return Err(Error::InconsistentAlignment("prescribed values contradict the orbit".into()));
    }
    let mut values: Vec<Rational> = Vec::with_capacity(d);
    if anchors.is_empty() {
        values = (0..d).map(|r| rational(r as i64)).collect();
    } else {
        let (first_rank, first_val) = anchors[0].clone();
        for r in 0..first_rank {
            values.push(&first_val - rational((first_rank - r) as i64));
        }
        for w in anchors.windows(2) {
            let (ra, va) = &w[0];
            let (rb, vb) = &w[1];
            let gap = (rb - ra) as i64;
            for step in 0..gap {
                values.push(va + (vb - va) * Rational::new(BigInt::from(step), BigInt::from(gap)));
            }
        }
        let (last_rank, last_val) = anchors.last().unwrap().clone();
        for r in last_rank..d {
            values.push(&last_val + rational((r - last_rank) as i64));
        }
    }
    Ok(GroundTuple(orbit.ranks().iter().map(|&r| values[r as usize].clone()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks(v: &[u32]) -> WeakOrder {
        WeakOrder::new(v.to_vec()).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let t = GroundTuple(vec![parse_rational("7/2").unwrap(), parse_rational("6/5").unwrap(), parse_rational("7/2").unwrap()]);
        assert_eq!(canonicalize(&t), ranks(&[1, 0, 1]));
        assert_eq!(canonicalize(&GroundTuple::from_ints(&[7])), ranks(&[0]));
        assert_eq!(canonicalize(&GroundTuple::from_ints(&[2, 2, 2])), ranks(&[0, 0, 0]));
    }

    #[test]
    fn rejects_non_surjective() {
        assert!(WeakOrder::new(vec![0, 2]).is_err());
        assert!(WeakOrder::new(vec![]).is_err());
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_weak_orders(1).unwrap(), vec![ranks(&[0])]);
        assert_eq!(enumerate_weak_orders(2).unwrap(), vec![ranks(&[0, 0]), ranks(&[0, 1]), ranks(&[1, 0])]);
        assert!(enumerate_weak_orders(0).is_err());
        assert!(matches!(enumerate_weak_orders(40), Err(Error::ResourceBound { .. })));
    }

    #[test]
    fn stats_examples() {
        let s = stats(&GroundTuple::from_ints(&[5, 1, 3]));
        assert_eq!(s.min_value, rational(1));
        assert_eq!(s.minx, BTreeSet::from([1]));
        assert_eq!(s.i_sets[1], BTreeSet::from([1, 2]));
        assert_eq!(s.i_sets[2], BTreeSet::from([0, 1, 2]));
        let s = stats(&GroundTuple::from_ints(&[0, 0, 2]));
        assert_eq!(s.minx, BTreeSet::from([0, 1]));
        assert_eq!(s.i_sets[0], BTreeSet::from([0, 1]));
        assert!(stats(&GroundTuple::from_ints(&[1, 2, 3])).kernel.is_empty());
    }

    #[test]
    fn sim_examples() {
        let i = BTreeSet::from([0, 2]);
        assert!(sim_on(&[0, 5, 2], &[1, 9, 4], &i));
        assert!(!sim_on(&[0, 1], &[1, 0], &BTreeSet::from([0, 1])));
        assert!(sim_on(&[3, 1], &[0, 9], &BTreeSet::new()));
    }

    #[test]
    fn m_set_and_min_clean_examples() {
        assert_eq!(m_set(&[0, 1, 2, 3], 2), BTreeSet::from([0]));
        assert_eq!(m_set(&[0, 1, 0, 2], 2), BTreeSet::from([0, 1]));
        assert_eq!(m_set(&[1, 1, 1, 1], 2), BTreeSet::from([0, 1]));
        assert!(is_min_clean(&[0, 1, 0, 2], 2));
        assert!(!is_min_clean(&[0, 1, 1, 0], 2));
        // Both components reach the global minimum, on different coordinates.
        assert!(!is_min_clean(&[0, 1, 2, 0], 2));
        assert!(is_min_clean(&[0, 1, 2, 1], 2));
    }

    #[test]
    fn realize_respects_prescribed_values() {
        let w = ranks(&[2, 0, 1, 3]);
        let t = realize(&w, &[(1, rational(5)), (3, rational(6))]).unwrap();
        assert_eq!(canonicalize(&t), w);
        assert_eq!(t.0[1], rational(5));
        assert_eq!(t.0[3], rational(6));
        assert!(realize(&w, &[(1, rational(5)), (3, rational(4))]).is_err());
    }

    #[test]
    fn negate_reverses() {
        assert_eq!(canonicalize(&GroundTuple::from_ints(&[0, 1, 1]).negate()), ranks(&[1, 0, 0]));
        assert_eq!(ranks(&[0, 1, 1]).negate(), ranks(&[1, 0, 0]));
    }
}
