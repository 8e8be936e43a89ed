//! Cross-module pipelines exercised through the public API.

use geoperm::conjecture::convert::recover_hyperboloidal;
use geoperm::conjecture::{build_pinning_system, emit_system, parse_system, Format};
use geoperm::geometry::{canonicalize, stabbing_order, Configuration, Line, OrderedOrder, Vec3};
use geoperm::lemmas::{check_distance_lemma, random_transversal_instance};
use geoperm::pinning::shrink::shrink_to_pin;
use geoperm::pinning::{
    classify_minimal_pinning, is_pinned_nested, make_hyperboloidal, HyperboloidalParams, PinningClass,
};
use geoperm::sampling::stream_rng;
use geoperm::transversal::{enumerate_geometric_permutations, find_transversal};

#[test]
fn enumerated_permutations_are_certified_and_obey_the_distance_lemma() {
    for k in 0..40 {
        let (cfg, l) = random_transversal_instance(4, 1.0, &mut stream_rng(77, k));
        let e = enumerate_geometric_permutations(&cfg, 50_000, k).unwrap();
        assert!(e.gps.contains(&canonicalize(&stabbing_order(&cfg, &l).unwrap())));
        assert_eq!(e.gps.len(), e.certificates.len());
        for w in &e.certificates {
            assert_eq!(&stabbing_order(&cfg, &w.line).unwrap(), &w.order);
        }
        assert!(check_distance_lemma(&cfg, &l).unwrap().holds);
    }
}

#[test]
fn shrinking_a_four_ball_zigzag_gives_a_pinned_line() {
    let cfg = Configuration::unit(&[
        Vec3::new(0.0, 0.4, 0.0),
        Vec3::new(2.2, -0.3, 0.2),
        Vec3::new(4.5, 0.2, -0.4),
        Vec3::new(6.8, -0.1, 0.3),
    ])
    .unwrap();
    let order = OrderedOrder::parse("ABCD").unwrap();
    let s = shrink_to_pin(&cfg, &order).unwrap();
    assert!(s.t_star > 0.0 && s.t_star < 1.0);
    let shrunk = cfg.with_radius(s.t_star).unwrap();
    assert_eq!(stabbing_order(&shrunk, &s.line).unwrap(), order);
    assert!(is_pinned_nested(&shrunk, &s.line, 5).unwrap().pinned);
    // Below the pinning radius the order disappears.
    let smaller = cfg.with_radius(s.t_star * 0.99).unwrap();
    assert!(find_transversal(&smaller, &order, 20_000, 3).unwrap().witness().is_none());
}

#[test]
fn hyperboloidal_instance_survives_rigid_motion_and_recovery() {
    let p = HyperboloidalParams::new(1.0, [-0.8, 1.5, 0.3, -1.5]).unwrap();
    let inst = make_hyperboloidal(&p).unwrap();
    let cfg = inst.configuration().unwrap();
    let c = classify_minimal_pinning(&cfg, &Line::x_axis()).unwrap();
    assert_eq!(c.class, PinningClass::Hyperboloidal);
    assert_eq!(c.alternation, Some(true));

    let mut rng = stream_rng(1, 0);
    let rot = geoperm::sampling::rotation(&mut rng);
    let iso = nalgebra::Isometry3::from_parts(
        nalgebra::Translation3::new(0.3, -1.2, 2.0),
        nalgebra::UnitQuaternion::from_rotation_matrix(&rot),
    );
    let moved = cfg.transformed(&iso);
    let line = Line::x_axis().transformed(&iso);
    let again = classify_minimal_pinning(&moved, &line).unwrap();
    assert_eq!(again.class, PinningClass::Hyperboloidal);
    assert_eq!(again.rank, 3);
    let (_, residual) = recover_hyperboloidal(&moved, &line).unwrap();
    assert!(residual < 1e-8, "{residual}");
}

#[test]
fn emitted_system_parses_back() {
    let sys = build_pinning_system();
    let text = emit_system(&sys, Format::Plain);
    assert_eq!(parse_system(&text).unwrap(), sys);
    let golden =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/pinning_system.txt")).unwrap();
    assert_eq!(parse_system(&golden).unwrap(), sys);
}
