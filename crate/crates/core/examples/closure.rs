//! Closing a relation under a clone, reading off witness terms, and the
//! preservation table.

use temporal_loops::ops::OpKind;
use temporal_loops::orbit::GroundTuple;
use temporal_loops::relation::{TemporalRelation, DEFAULT_BUDGET};
use temporal_loops::Result;

pub fn run() -> Result<()> {
    // x < y together with y < x, as a binary relation on Q.
    let r = TemporalRelation::from_generators(2, 1, vec![GroundTuple::from_ints(&[0, 1]), GroundTuple::from_ints(&[1, 0])])?;
    for kind in OpKind::classified() {
        println!("{:<10} preserved: {}", kind.to_string(), r.preserves(kind)?);
    }

    let min: OpKind = "min".parse()?;
    let closed = r.closure(min, DEFAULT_BUDGET)?;
    println!("closure under min has {} orbits", closed.len());
    let gens = closed.generator_tuples();
    for o in closed.orbits() {
        let term = closed.term_for(o).expect("every member has a witness");
        println!("  {o} = {term} -> {}", term.eval(&gens)?);
    }
    closed.verify_witnesses()?;

    // Closing twice changes nothing.
    assert_eq!(closed.closure(min, DEFAULT_BUDGET)?.orbits(), closed.orbits());

    // A ternary relation on Q^2.
    let t = TemporalRelation::from_generators(3, 2, vec![GroundTuple::from_ints(&[0, 1, 1, 0, 2, 2])])?;
    let mi = t.closure("mi".parse()?, DEFAULT_BUDGET)?;
    println!("ternary relation on Q^2: {} orbit(s), {} after mi", t.len(), mi.len());
    println!("checks: {:?}", mi.checks());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
