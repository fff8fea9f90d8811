//! Loop conditions at a fixed dimension: every assignment of the structure's
//! vertices to orbits is closed under the clone and solved for a pseudo-loop.

use temporal_loops::loopcond::{hypothesis_report, preset, presets, verify_condition, Outcome};
use temporal_loops::ops::OpKind;
use temporal_loops::Result;

pub fn run() -> Result<()> {
    for s in presets() {
        println!("{:<9} {}", s.name, s.identity("s"));
    }

    let s = preset("siggers4")?;
    let report = verify_condition(&s, "mi".parse()?, 1)?;
    println!("{} under mi at k = 1: {} assignments, success {}", s.name, report.assignments.len(), report.success);
    for a in report.assignments.iter().take(3) {
        if let Outcome::Success { witness, orbit, shared } = &a.outcome {
            println!("  {:?} -> {orbit} shared {shared}, witness {}", a.assignment, report.witnesses[*witness]);
        }
    }

    // The directed 3-cycle has no closed walk of algebraic length 1.
    let c3 = preset("cyclic3")?;
    println!("cyclic3 violations: {:?}", hypothesis_report(&c3).violations());
    let err = verify_condition(&c3, OpKind::MIN, 1).unwrap_err();
    println!("cyclic3 rejected: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
