mod oracle;

use sechom_core::fixtures;
use sechom_core::gralg::Module;
use sechom_core::homalg::{build_resolution, ext_groups};
use sechom_core::secondary::lifted_complex;
use sechom_core::sext::D2Engine;
use sechom_core::track::TrackInstance;

#[test]
fn e1_ext_matches_periodic_oracle() {
    let k = Module::trivial(&fixtures::e1(), &[0]);
    let r = build_resolution(&k, 9, 10).unwrap();
    let ext = ext_groups(&r, &k, 0..=8, 0..=10).unwrap();
    let oracle = oracle::periodic_e1_ext(8, 10);
    for s in 0..=8 {
        for t in 0..=10 {
            assert_eq!(ext.dim(s, t), oracle[s][t as usize], "Ext^({s},{t})");
        }
    }
}

fn x_squared(alg: &sechom_core::gralg::Algebra) -> [i64; 2] {
    let v = alg.product(1, 1);
    [v[0] as i64, v[1] as i64]
}

#[test]
fn square_ring_d2_matches_divided_lift() {
    for lift in [fixtures::z4_lift_plain(), fixtures::z4_lift_twisted()] {
        let inst = TrackInstance::square_ring(&lift).unwrap();
        let classical = build_resolution(&Module::trivial(&fixtures::e1(), &[0]), 8, 12).unwrap();
        let c = lifted_complex(&inst, &classical, 8).unwrap();
        let e = D2Engine::new(&c, &fixtures::reduced_residue(&inst)).unwrap();
        let expect = oracle::divided_lift_d2(x_squared(&lift), 4);
        for s in 0..=4 {
            let r = e.d2(0, s, s as i32, &[1]).unwrap();
            match expect[s] {
                None => assert!(r.is_zero(), "s = {s}: {:?}", r.output),
                Some(t) => {
                    assert_eq!(r.output.len(), 1);
                    assert_eq!(r.output.get(&t), Some(&vec![1]));
                }
            }
        }
    }
}
