use proptest::prelude::*;

use sechom_core::exactla::{kernel_image, kernel_in, solve_in, solve_linear, Mat, Span};
use sechom_core::fixtures;
use sechom_core::gralg::{hom_space, is_linear, Module};
use sechom_core::homalg::{build_resolution, is_a_exact_upto};
use sechom_core::track::{compose, vcomp, vinverse, whisker_left, whisker_right, TrackInstance};

fn matrix(m: u32, max: usize) -> impl Strategy<Value = Mat> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(0..m, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(|ch| ch.iter().map(|&x| x as i64).collect()).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            Mat::from_rows(&refs, m)
        })
    })
}

fn modulus() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(4), Just(9)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_vectors_are_killed((m, a) in modulus().prop_flat_map(|m| (Just(m), matrix(m, 6)))) {
        let ki = kernel_image(&a);
        for k in &ki.kernel {
            prop_assert!(a.apply(k).iter().all(|&x| x == 0));
        }
        for (src, img) in ki.image_sources.iter().zip(&ki.image) {
            prop_assert_eq!(&a.apply(src), img);
        }
        if m == 2 || m == 3 || m == 5 {
            prop_assert_eq!(ki.kernel.len() + ki.rank, a.cols());
        }
    }

    #[test]
    fn solve_finds_every_reachable_target((_m, a, x) in modulus().prop_flat_map(|m| (Just(m), matrix(m, 5))).prop_flat_map(|(m, a)| {
        let c = a.cols();
        (Just(m), Just(a), proptest::collection::vec(0..m, c))
    })) {
        let b = a.apply(&x);
        let sol = solve_linear(&a, &b).unwrap().expect("b is in the image");
        prop_assert_eq!(a.apply(&sol.particular), b.clone());
        for h in &sol.homogeneous {
            prop_assert!(a.apply(h).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn solve_in_respects_orders(a in matrix(4, 4), x in proptest::collection::vec(0u32..2, 4)) {
        // source killed by 2, target Z/4
        let src = vec![2; a.cols()];
        let tgt = vec![4; a.rows()];
        let x: Vec<u32> = x.into_iter().take(a.cols()).chain(core::iter::repeat(0)).take(a.cols()).collect();
        let a2 = a.scale(2);
        let b = a2.apply(&x);
        let y = solve_in(&a2, &b, &src, &tgt).expect("reachable");
        prop_assert_eq!(a2.apply(&y), b);
        for k in kernel_in(&a2, &src, &tgt) {
            prop_assert!(a2.apply(&k).iter().all(|&v| v == 0));
            prop_assert!(k.iter().all(|&v| v < 2));
        }
    }

    #[test]
    fn span_membership_matches_solver(vs in proptest::collection::vec(proptest::collection::vec(0u32..3, 4), 1..6), w in proptest::collection::vec(0u32..3, 4)) {
        let mut span = Span::new(4, 3);
        for v in &vs {
            span.insert(v);
        }
        let a = Mat::from_columns(&vs, 4, 3);
        let solvable = solve_linear(&a, &w).unwrap().is_some();
        prop_assert_eq!(span.contains(&w), solvable);
        prop_assert_eq!(span.dim(), kernel_image(&a).rank);
    }

    #[test]
    fn hom_space_maps_are_linear(d1 in 0i32..3, d2 in 0i32..3, t in -2i32..3) {
        let alg = fixtures::exterior_xy();
        let m = sechom_core::gralg::free_on_degrees(&alg, &[d1]).module().clone();
        let n = Module::trivial(&alg, &[d2]).direct_sum(sechom_core::gralg::free_on_degrees(&alg, &[0]).module());
        for f in hom_space(&m, &n, t) {
            prop_assert!(is_linear(&m, &n, &f.matrix));
            prop_assert!(sechom_core::gralg::has_degree(&m, &n, &f.matrix, t));
        }
    }

    #[test]
    fn resolutions_square_to_zero_and_are_exact(degs in proptest::collection::vec(0i32..3, 1..3), seed in 0usize..3) {
        let alg = [fixtures::e1(), fixtures::exterior_xy(), fixtures::dual_numbers(3)][seed].clone();
        let m = Module::trivial(&alg, &degs);
        let r = build_resolution(&m, 3, 7).unwrap();
        let c = r.augmented();
        prop_assert!(is_a_exact_upto(&c, 7).first_failure.map_or(true, |(n, _)| n >= 2));
    }

    #[test]
    fn track_groupoid_laws_on_random_pairs(a in 0u64..400, b in 0u64..400) {
        let inst = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
        let x = fixtures::random_object(&inst, a);
        let y = fixtures::random_object(&inst, b);
        let maps = match inst.all_maps(&x, &y, 64) { Ok(m) => m, Err(_) => return Ok(()) };
        let data = match inst.all_data(&x, &y, 64) { Ok(d) => d, Err(_) => return Ok(()) };
        for f in maps.iter().take(4) {
            for d in data.iter().take(4) {
                let t = inst.track_from(f, d.clone());
                let back = vcomp(&vinverse(&t), &t).unwrap();
                prop_assert_eq!(back.source.clone(), f.clone());
                prop_assert!(back.datum.is_zero());
                let id = inst.identity_map(&y);
                prop_assert_eq!(whisker_left(&id, &t).unwrap(), t.clone());
                let idx = inst.identity_map(&x);
                prop_assert_eq!(whisker_right(&t, &idx).unwrap(), t.clone());
                prop_assert_eq!(compose(&id, f).unwrap(), f.clone());
            }
        }
    }
}
