//! Pseudo-loop search: a member whose components all lie in one orbit,
//! together with a witness term that rebuilds it from the generators.

use temporal_loops::gen::{random_closed, random_smooth_binary, rng, Symmetry};
use temporal_loops::ops::OpKind;
use temporal_loops::pseudoloop::find_pseudoloop;
use temporal_loops::relation::{is_pseudo_loop, TemporalRelation};
use temporal_loops::Result;

fn solve(label: &str, r: &TemporalRelation, clone: OpKind) -> Result<()> {
    match find_pseudoloop(r, clone) {
        Ok(p) => {
            let replay = p.witness.eval(&r.generator_tuples())?.canonicalize();
            assert_eq!(replay, p.orbit);
            assert!(is_pseudo_loop(&p.orbit, r.k));
            println!("{label}: {} shared {} via {} slice(s), term size {}", p.orbit, p.shared, p.slices, p.witness.size());
        }
        Err(err) => println!("{label}: rejected ({err})"),
    }
    Ok(())
}

pub fn run() -> Result<()> {
    for name in ["min", "mi", "mx", "ll"] {
        let clone: OpKind = name.parse()?;
        for seed in 0..3 {
            let e = random_smooth_binary(&mut rng(seed), 2, 3, clone, 2_000)?;
            solve(&format!("binary {clone} seed {seed}"), &e, clone)?;
        }
    }
    let r = random_closed(&mut rng(1), 3, 2, 1, Symmetry::Full, OpKind::MI, 2_000)?;
    solve("symmetric ternary mi", &r, OpKind::MI)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
