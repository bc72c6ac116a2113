//! End-to-end runs of the composite map on sampled domains.

use spiralemb::chain::{verify_chain, Chain, ChainConfig, ChainSampling, ChainSamples, DEFAULT_SEED};
use spiralemb::exec::map_indexed;
use spiralemb::torus_strip::DomainSampling;
use spiralemb::verifier::check_injective_points;
use spiralemb::Execution;

#[test]
fn composite_is_injective_on_sample() {
    let chain = Chain::new(ChainConfig::with_default_m(0.1, 1.0).unwrap()).unwrap();
    let sampling = ChainSampling::for_target(100_000, DEFAULT_SEED);
    let samples = ChainSamples::new(&chain, &sampling).unwrap();
    let n = samples.len();
    assert!(n >= 100_000);
    let domain: Vec<[f64; 4]> = map_indexed(Execution::Parallel, n, |i| {
        let (p1, b) = samples.get(i);
        [p1.x, p1.y, b.x, b.y]
    });
    let images: Vec<[f64; 4]> = map_indexed(Execution::Parallel, n, |i| {
        let (p1, b) = samples.get(i);
        chain.j_eval(p1, b).unwrap().to_array()
    });
    let r = check_injective_points("J", &domain, &images, 1e-9, 1e-6, Execution::Parallel).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn rectangle_superset_exceeds_the_bound() {
    // Off the strands, points with |x1| beyond A (up to A + 4 eps) break
    // (dot) and the final bound; the estimate chain only covers the
    // immersed torus.
    let cfg = ChainConfig::with_default_m(0.1, 1.0).unwrap();
    let sampling = ChainSampling {
        domain: DomainSampling::Rectangles,
        p1_resolution: 60,
        b_resolution: 6,
        random: 0,
        seed: DEFAULT_SEED,
    };
    let r = verify_chain(cfg, &sampling, Execution::Parallel).unwrap();
    assert!(!r.passed);
    assert_eq!(r.evaluation_errors, 0);
    assert!(r.checks["dot"].violations > 0);
    assert!(r.checks["bound"].violations > 0);
}

#[test]
fn sup_shrinks_with_eps() {
    let sups: Vec<f64> = [0.1, 0.05, 0.02]
        .iter()
        .map(|&eps| {
            let cfg = ChainConfig::with_default_m(eps, 1.0).unwrap();
            let r = verify_chain(cfg, &ChainSampling::for_target(50_000, DEFAULT_SEED), Execution::Parallel).unwrap();
            assert!(r.passed, "{r:?}");
            r.sup_norm
        })
        .collect();
    assert!(sups.windows(2).all(|w| w[1] <= w[0]), "{sups:?}");
}
