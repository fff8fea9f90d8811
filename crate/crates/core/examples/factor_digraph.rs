//! The factor digraph of a binary relation on Q^k: vertices are component
//! orbits, edges come from members. Components, algebraic-length gcds and a
//! closed walk of algebraic length 1.

use temporal_loops::factor::{algebraic_length, factor_digraph};
use temporal_loops::orbit::GroundTuple;
use temporal_loops::relation::TemporalRelation;
use temporal_loops::Result;

pub fn run() -> Result<()> {
    // Edges between orbits of Q^2: a 2-cycle and a 3-cycle on one component.
    let tuples = [
        [0, 1, 1, 0],
        [1, 0, 0, 1],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [1, 0, 0, 1],
    ];
    let gens = tuples.iter().map(|t| GroundTuple::from_ints(t)).collect();
    let e = TemporalRelation::from_generators(2, 2, gens)?;
    let f = factor_digraph(&e)?;
    for (i, v) in f.vertices.iter().enumerate() {
        println!("vertex {i}: {v}");
    }
    println!("edges {:?}", f.edges);
    for (c, members) in f.components.iter().enumerate() {
        println!("component {c}: {members:?} gcd {:?} length one {}", f.gcd[c], f.has_length_one(c));
        if let Some(walk) = f.length_one_walk(c) {
            println!("  walk of {} steps, algebraic length {}", walk.len(), algebraic_length(&walk));
            println!("  linking exponent {}", f.linking_exponent(c)?);
        }
    }
    println!("smooth: {}", e.is_smooth()?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
