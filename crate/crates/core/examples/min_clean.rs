//! Min-clean members: certificates from each clone's construction, and the
//! loop of a cyclic relation preserved by min.

use temporal_loops::gen::{random_closed, random_smooth_binary, rng, Symmetry};
use temporal_loops::minclean::{loop_cyclic_min, minclean_mi, minclean_min, minclean_mx, MinCleanCertificate, Route};
use temporal_loops::ops::OpKind;
use temporal_loops::orbit::is_min_clean;
use temporal_loops::relation::TemporalRelation;
use temporal_loops::Result;

fn show(kind: OpKind, seed: u64, cert: &MinCleanCertificate) {
    println!(
        "{kind} seed {seed}: {} route {:?} M {:?} common minx {:?}",
        cert.orbit, cert.route, cert.m, cert.common_minx
    );
    assert!(is_min_clean(cert.flat().values(), cert.k()));
}

pub fn run() -> Result<()> {
    type Construction = fn(&TemporalRelation) -> Result<MinCleanCertificate>;
    let constructions: [(&str, Construction); 3] = [("min", minclean_min), ("mi", minclean_mi), ("mx", minclean_mx)];
    for (name, construct) in constructions {
        let kind: OpKind = name.parse()?;
        // Smooth instances with a component of algebraic length 1 are
        // accepted; the others are rejected with a hypothesis error. Members
        // with one minimal component are certificates on their own, so look
        // for an instance that needs the construction.
        let mut shown = false;
        for seed in 0..200 {
            let e = random_smooth_binary(&mut rng(seed), 2, 3, kind, 2_000)?;
            if let Ok(cert) = construct(&e) {
                if cert.route != Route::Singleton {
                    show(kind, seed, &cert);
                    shown = true;
                    break;
                }
            }
        }
        if !shown {
            println!("{kind}: only singleton certificates in this sample");
        }
    }

    let min = OpKind::MIN;
    let r = random_closed(&mut rng(7), 3, 2, 1, Symmetry::Full, min, 2_000)?;
    let cert = loop_cyclic_min(&r)?;
    println!("cyclic ternary relation with {} orbits has the loop {}", r.len(), cert.orbit);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
