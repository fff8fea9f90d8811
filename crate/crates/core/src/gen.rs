//! Seeded random instances: closures of a few random seed tuples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ops::OpKind;
use crate::orbit::GroundTuple;
use crate::relation::{permutations, TemporalRelation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tuple of `len` integers drawn from `0..spread`.
pub fn random_tuple(rng: &mut impl Rng, len: usize, spread: i64) -> GroundTuple {
    GroundTuple::from_ints(&(0..len).map(|_| rng.gen_range(0..spread)).collect::<Vec<_>>())
}

/// Relation generated by `count` random tuples (not closed).
pub fn random_relation(rng: &mut impl Rng, n: usize, k: usize, count: usize) -> Result<TemporalRelation> {
    let spread = (n * k) as i64;
    let gens = (0..count).map(|_| random_tuple(rng, n * k, spread)).collect();
    TemporalRelation::from_generators(n, k, gens)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    None,
    /// Every seed is joined by all its component permutations.
    Full,
}

/// Closure under `kind` of `count` random seeds, symmetrized as requested.
pub fn random_closed(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    count: usize,
    symmetry: Symmetry,
    kind: OpKind,
    budget: usize,
) -> Result<TemporalRelation> {
    let spread = (n * k) as i64;
    let mut gens: Vec<GroundTuple> = Vec::new();
    for _ in 0..count {
        let t = random_tuple(rng, n * k, spread);
        match symmetry {
            Symmetry::None => gens.push(t),
            Symmetry::Full => gens.extend(permutations(n).iter().map(|p| t.permute_blocks(p, k))),
        }
    }
    TemporalRelation::from_generators(n, k, gens)?.closure(kind, budget)
}

/// Binary closure of random seeds, about half of them joined by their
/// reversed edge. Smoothness is not guaranteed.
pub fn random_smooth_binary(rng: &mut impl Rng, k: usize, count: usize, kind: OpKind, budget: usize) -> Result<TemporalRelation> {
    let spread = 2 * k as i64;
    let mut gens = Vec::new();
    for _ in 0..count {
        let t = random_tuple(rng, 2 * k, spread);
        if rng.gen_bool(0.5) {
            gens.push(t.permute_blocks(&[1, 0], k));
        }
        gens.push(t);
    }
    gens.shuffle(rng);
    TemporalRelation::from_generators(2, k, gens)?.closure(kind, budget)
}
