use sechom_core::fixtures;
use sechom_core::secondary::{build_secondary_resolution, hosec_transfer, validate_secondary, BuildOptions};
use sechom_core::track::{Kind, TrackInstance};

fn instance(kind: Kind, seed: u64) -> TrackInstance {
    match (kind, seed % 2) {
        (Kind::PairCat, 0) => TrackInstance::pair_cat(&fixtures::e1()).unwrap(),
        (Kind::PairCat, _) => TrackInstance::pair_cat(&fixtures::exterior_xy()).unwrap(),
        (Kind::SquareRing, 0) => TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap(),
        (Kind::SquareRing, _) => TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap(),
    }
}

#[test]
fn random_builds_are_coherent_and_transfer_holds() {
    for kind in [Kind::PairCat, Kind::SquareRing] {
        for seed in 0..100u64 {
            let inst = instance(kind, seed);
            let b = fixtures::random_object(&inst, seed);
            let r = build_secondary_resolution(&inst, &b, BuildOptions::new(3, 5)).unwrap();
            let v = validate_secondary(&r.complex);
            assert!(v.ok, "{kind:?} seed {seed}: {:?}", v.first_failure);
            let h = hosec_transfer(&r.complex, 5);
            assert!(!h.violation, "{kind:?} seed {seed}: {h:?}");
        }
    }
}
