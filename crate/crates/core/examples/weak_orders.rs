//! Orbits of tuples under order automorphisms of the rationals.

use temporal_loops::orbit::{enumerate_weak_orders, is_min_clean, GroundTuple, WeakOrder};
use temporal_loops::Result;

pub fn run() -> Result<()> {
    let t = GroundTuple::from_ints(&[5, -2, 5, 7]);
    let w = t.canonicalize();
    println!("{t} has orbit {w}");
    assert_eq!(w, WeakOrder::new(vec![1, 0, 1, 2])?);

    // Ground representative and its negation.
    println!("ground {} negated {}", w.ground(), w.negate());

    for k in 1..=4 {
        println!("k = {k}: {} weak orders", enumerate_weak_orders(k)?.len());
    }

    // Two components of dimension 2.
    let flat = GroundTuple::from_ints(&[0, 1, 2, 1]);
    println!("{flat} min-clean at k = 2: {}", is_min_clean(flat.values(), 2));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
