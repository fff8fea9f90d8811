//! The binary operations of the classified clones on concrete tuples and on
//! orbits.

use temporal_loops::ops::{apply_ground, dual_of, image_orbits, OpKind};
use temporal_loops::orbit::{rational, GroundTuple, WeakOrder};
use temporal_loops::Result;

pub fn run() -> Result<()> {
    let a = GroundTuple::from_ints(&[0, 2, 1]);
    let b = GroundTuple::from_ints(&[1, 0, 1]);
    let q = rational(1);
    for kind in OpKind::classified() {
        let q = kind.uses_constant().then_some(&q);
        let out = apply_ground(kind, &a, &b, q)?;
        println!("{:<10} {a} {b} -> {} (dual {})", kind.to_string(), out.canonicalize(), dual_of(kind));
    }

    // All orbits reachable from two orbits, over every way of aligning them.
    let x = WeakOrder::new(vec![0, 1])?;
    let y = WeakOrder::new(vec![1, 0])?;
    for kind in ["min", "mi", "mx", "ll"] {
        let kind: OpKind = kind.parse()?;
        let imgs = image_orbits(kind, &x, &y)?;
        let shown: Vec<String> = imgs.iter().map(|w| w.to_string()).collect();
        println!("{kind}({x}, {y}) reaches {}", shown.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
