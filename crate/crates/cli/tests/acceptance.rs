//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness so the lines reach the log; exits nonzero only when the set of
//! failing criteria differs from the expected one.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::process::Command as Proc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sechom::chart::{D2Line, D2Table};
use sechom::job::{setup, Command, JobSpec, Setup};
use sechom::verify::{self, audit_checks, d2_algebra_checks, secondary_ext_checks, Suite};
use sechom_core::fixtures;
use sechom_core::gralg::Module;
use sechom_core::homalg::{build_resolution, ext_groups, yoneda_product, ExtClass};
use sechom_core::secondary::{
    build_secondary_resolution, drop_top_generator, hosec_transfer, is_b_exact_direct, is_b_exact_upto, lifted_complex, truncate, validate_secondary, BuildOptions,
    SecondaryComplex,
};
use sechom_core::sext::D2Engine;
use sechom_core::track::{honest_sigma, verify_linear_extension, Kind, TrackInstance};
use sechom_core::Error;

/// Criterion 9 fails on the twisted lift: there d2 d2 != 0.
const EXPECTED_FAILURES: &[usize] = &[9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn job(command: Command, fixture: &str, s_max: usize, t_max: i32) -> (JobSpec, Setup) {
    let mut j = JobSpec::new(command, fixture);
    j.s_max = s_max;
    j.t_max = t_max;
    let s = setup(&j).expect("shipped fixture");
    (j, s)
}

fn suite_detail(s: &Suite) -> String {
    match &s.first_failure {
        None => format!("{} checks, {} skipped", s.checked, s.skipped),
        Some(w) => format!("{} of {} checks fail; first: {w}", s.failures, s.checked),
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let k = Module::trivial(&fixtures::e1(), &[0]);
    let res = build_resolution(&k, 9, 10).unwrap();
    let ext = ext_groups(&res, &k, 0..=8, 0..=10).unwrap();
    let elapsed = start.elapsed();
    let want = oracle::periodic_e1_ext(8, 10);
    let bad: Vec<(usize, i32)> = (0..=8).flat_map(|s| (0..=10).map(move |t| (s, t))).filter(|&(s, t)| ext.dim(s, t) != want[s][t as usize]).collect();
    let diagonal = (0..=8).all(|s| (0..=10).all(|t| ext.dim(s, t) == usize::from(t == s as i32)));
    outcome(bad.is_empty() && diagonal && elapsed.as_secs_f64() < 1.0, format!("s <= 8, t <= 10: {} cells off the oracle, {:.3}s", bad.len(), elapsed.as_secs_f64()))
}

fn c2() -> Outcome {
    let k = Module::trivial(&fixtures::e1(), &[0]);
    let res = build_resolution(&k, 9, 10).unwrap();
    let ext = ext_groups(&res, &k, 0..=8, 0..=10).unwrap();
    let h0 = ExtClass::from_coords(&res, &k, 1, 1, &ext.group(1, 1).unwrap().basis[0]);
    let mut power = ExtClass::from_coords(&res, &k, 0, 0, &ext.group(0, 0).unwrap().basis[0]);
    let mut powers_ok = true;
    for s in 1..=8 {
        power = yoneda_product(&h0, &power, &res, &res).unwrap();
        let g = ext.group(s, s as i32).unwrap();
        powers_ok &= g.classify(&power.coords(&res), 2) == vec![1];
    }
    let mut details = vec![format!("h0^s spans Ext^(s,s) for s <= 8: {powers_ok}")];
    let mut ok = powers_ok;
    for f in ["e1", "exterior"] {
        let (j, s) = job(Command::Verify, f, 2, 2);
        let suite = verify::homalg_suite(&s, &j);
        ok &= suite.passed() && suite.checked > 0;
        details.push(format!("{f}: {}", suite_detail(&suite)));
    }
    outcome(ok, details.join("; "))
}

fn c3() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    let pair = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
    let square = TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap();
    for (name, inst) in [("PairCat dim <= 2", pair), ("SquareRing rank 1", square)] {
        let sample = verify::track_sample(&inst);
        let rep = verify_linear_extension(&inst, &sample, &honest_sigma).unwrap();
        let checked: usize = rep.laws.iter().map(|l| l.checked).sum();
        let violations: usize = rep.laws.iter().map(|l| l.violations).sum();
        ok &= rep.passed() && rep.laws.iter().all(|l| l.checked > 0);
        details.push(format!("{name}: {} objects, {} laws, {checked} checks, {violations} violations", sample.len(), rep.laws.len()));
    }
    outcome(ok, details.join("; "))
}

fn instance(kind: Kind, seed: u64) -> TrackInstance {
    match (kind, seed % 2) {
        (Kind::PairCat, 0) => TrackInstance::pair_cat(&fixtures::e1()).unwrap(),
        (Kind::PairCat, _) => TrackInstance::pair_cat(&fixtures::exterior_xy()).unwrap(),
        (Kind::SquareRing, 0) => TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap(),
        (Kind::SquareRing, _) => TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap(),
    }
}

fn c4() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for kind in [Kind::PairCat, Kind::SquareRing] {
        for seed in 0..100u64 {
            let inst = instance(kind, seed);
            let b = fixtures::random_object(&inst, seed);
            match build_secondary_resolution(&inst, &b, BuildOptions::new(3, 5)) {
                Ok(r) => {
                    let v = validate_secondary(&r.complex);
                    if !v.ok {
                        bad.push(format!("{kind:?} seed {seed}: {:?}", v.first_failure));
                    }
                }
                Err(e) => bad.push(format!("{kind:?} seed {seed}: {e}")),
            }
            count += 1;
        }
    }
    outcome(bad.is_empty(), format!("{count} builds, {} incoherent{}", bad.len(), bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()))
}

fn total_dim(c: &SecondaryComplex) -> usize {
    c.objects.iter().map(|x| x.total_dim()).sum()
}

/// Small PairCat complexes: windows of builder resolutions and their faults.
fn small_pair_complexes() -> Vec<(String, SecondaryComplex)> {
    let mut out = Vec::new();
    let e1 = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
    let mut objects = vec![("k".to_string(), e1.object(&Module::trivial(e1.algebra(), &[0])).unwrap())];
    objects.push(("nonsplit".into(), fixtures::nonsplit_pair(&e1)));
    objects.push(("split".into(), fixtures::split_pair(&e1)));
    for (i, x) in fixtures::pair_objects_dim2(&e1).into_iter().enumerate() {
        objects.push((format!("dim2 #{i}"), x));
    }
    for seed in 0..40 {
        objects.push((format!("random {seed}"), fixtures::random_object(&e1, seed)));
    }
    for (name, x) in objects {
        let Ok(r) = build_secondary_resolution(&e1, &x, BuildOptions::new(3, 5)) else { continue };
        for hi in r.complex.lo..=r.complex.hi() {
            let c = truncate(&r.complex, hi).unwrap();
            if total_dim(&c) > 6 {
                break;
            }
            if let Some(degs) = c.object(hi).free_degrees() {
                for g in 0..degs.len() {
                    if let Ok(f) = drop_top_generator(&c, g) {
                        out.push((format!("{name} window ..{hi} without generator {g}"), f));
                    }
                }
            }
            out.push((format!("{name} window ..{hi}"), c));
        }
    }
    out
}

fn c5() -> Outcome {
    let degrees: Vec<i32> = (0..=3).collect();
    let (mut compared, mut capped, mut failing) = (0, 0, 0);
    let mut bad = Vec::new();
    for (name, c) in small_pair_complexes() {
        match is_b_exact_direct(&c, &degrees, 1 << 12) {
            Ok(direct) => {
                let total = is_b_exact_upto(&c, 3);
                compared += 1;
                if !total.exact {
                    failing += 1;
                }
                if direct != total {
                    bad.push(format!("{name}: direct {:?} total {:?}", direct.first_failure, total.first_failure));
                }
            }
            Err(Error::Cap(_)) => capped += 1,
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    outcome(
        bad.is_empty() && compared > 0 && capped == 0,
        format!("{compared} complexes of total dimension <= 6 ({failing} non-exact), {capped} capped, {} disagreements{}", bad.len(), bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()),
    )
}

fn c6() -> Outcome {
    let mut cases: Vec<(String, SecondaryComplex)> = small_pair_complexes();
    let ext = TrackInstance::pair_cat(&fixtures::exterior_xy()).unwrap();
    let plain = TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap();
    let twisted = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
    let bigger = [
        ("E(x,y) k", ext.clone(), ext.object(&Module::trivial(ext.algebra(), &[0])).unwrap()),
        ("Z/4 plain flat residue", plain.clone(), fixtures::flat_residue(&plain)),
        ("Z/4 twisted reduced residue", twisted.clone(), fixtures::reduced_residue(&twisted)),
    ];
    for (name, inst, x) in bigger {
        let r = build_secondary_resolution(&inst, &x, BuildOptions::new(4, 6)).unwrap();
        for hi in r.complex.lo + 1..=r.complex.hi() {
            let c = truncate(&r.complex, hi).unwrap();
            for g in 0..c.object(hi).free_degrees().map_or(0, |d| d.len()) {
                cases.push((format!("{name} ..{hi} without generator {g}"), drop_top_generator(&c, g).unwrap()));
            }
            cases.push((format!("{name} ..{hi}"), c));
        }
    }
    let (mut held, mut faults, mut hyp_fails) = (0, 0, 0);
    let mut bad = Vec::new();
    for (name, c) in &cases {
        let h = hosec_transfer(c, 6);
        if !h.r_image.exact {
            hyp_fails += 1;
            continue;
        }
        held += 1;
        if !h.secondary.exact {
            faults += 1;
        }
        if h.image.first_failure != h.secondary.first_failure {
            bad.push(format!("{name}: image {:?} secondary {:?}", h.image.first_failure, h.secondary.first_failure));
        }
    }
    outcome(
        bad.is_empty() && faults > 0,
        format!("{held} complexes satisfy the hypothesis ({faults} with injected faults detected), {hyp_fails} outside it, {} disagreements on the first failing degree", bad.len()),
    )
}

fn c7() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for f in ["e1", "e1-nonsplit", "e1-split", "z4-plain", "z4-twisted"] {
        let (j, s) = job(Command::Verify, f, 2, 4);
        let e = s.engine(j.s_max, j.t_max).unwrap();
        let mut suite = Suite::new("audit");
        audit_checks(&mut suite, &e, &s, &j);
        ok &= suite.passed() && suite.skipped == 0;
        details.push(format!("{f}: {}", suite_detail(&suite)));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 10.0, format!("{}; {secs:.2}s", details.join("; ")))
}

fn c8() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for f in sechom::job::FIXTURES {
        let (j, s) = job(Command::Verify, f, 3, 5);
        let e = s.engine(j.s_max, j.t_max).unwrap();
        let mut suite = Suite::new("d2 algebra");
        d2_algebra_checks(&mut suite, &e, &s, &j, &mut ChaCha8Rng::seed_from_u64(1));
        ok &= suite.passed();
        details.push(format!("{f}: {}", suite_detail(&suite)));
    }
    outcome(ok, details.join("; "))
}

fn c9() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for f in sechom::job::FIXTURES {
        let (j, s) = job(Command::Sext, f, 3, 5);
        let e = s.engine(j.s_max, j.t_max).unwrap();
        let mut suite = Suite::new("secondary Ext");
        secondary_ext_checks(&mut suite, &e, &s, &j);
        ok &= suite.passed();
        if suite.passed() {
            let chart = sechom::job::sext(&j, &s).unwrap();
            let cells: Vec<String> = chart.rows.iter().map(|r| format!("({},{},{})={}", r.s, r.t, r.m, r.dim)).collect();
            details.push(format!("{f}: table {}", cells.join(" ")));
        } else {
            details.push(format!("{f}: {}", suite_detail(&suite)));
        }
    }
    outcome(ok, details.join("; "))
}

fn c10() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    let mut tables = Vec::new();
    for (name, lift) in [("Z/4[x]/(x^2)", fixtures::z4_lift_plain()), ("Z/4[x]/(x^2-2)", fixtures::z4_lift_twisted())] {
        let inst = TrackInstance::square_ring(&lift).unwrap();
        let classical = build_resolution(&Module::trivial(&fixtures::e1(), &[0]), 8, 12).unwrap();
        let c = lifted_complex(&inst, &classical, 8).unwrap();
        let e = D2Engine::new(&c, &fixtures::reduced_residue(&inst)).unwrap();
        let xx = lift.product(1, 1);
        let expect = oracle::divided_lift_d2([xx[0] as i64, xx[1] as i64], 4);
        let mut rows = Vec::new();
        let mut mism = 0;
        for (s, want) in expect.iter().enumerate() {
            let r = e.d2(0, s, s as i32, &[1]).unwrap();
            let hit = match want {
                None => r.is_zero(),
                Some(t) => r.output.len() == 1 && r.output.get(t) == Some(&vec![1]),
            };
            mism += usize::from(!hit);
            rows.push(D2Line { s, t: s as i32, m: 0, class: vec![1], image: r.output });
        }
        ok &= mism == 0;
        details.push(format!("{name}: {mism} mismatches over s <= 4"));
        tables.push(D2Table { title: format!("d2 on h^s over {name}"), rows }.to_tsv());
    }
    for t in tables {
        print!("{t}");
    }
    outcome(ok, details.join("; "))
}

fn c11() -> Outcome {
    let run = || Proc::new(env!("CARGO_BIN_EXE_sechom")).args(["verify", "--fixture", "e1", "--seed", "11"]).output().unwrap();
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(same && a.status.code() == Some(0), format!("two runs, {} bytes each, identical: {same}", a.stdout.len()))
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 11] = [
        (1, "classical Ext of E1", c1),
        (2, "Yoneda structure", c2),
        (3, "track-law suite", c3),
        (4, "secondary coherence on random fixtures", c4),
        (5, "total complex vs direct b-exactness", c5),
        (6, "image vs secondary exactness under faults", c6),
        (7, "d2 independence audit", c7),
        (8, "d2 algebra", c8),
        (9, "d2 d2 = 0 and secondary Ext tables", c9),
        (10, "divided-lift oracle", c10),
        (11, "determinism of verify", c11),
    ];
    let mut failed = BTreeSet::new();
    for (n, name, f) in criteria {
        let o = f();
        println!("{} criterion {n} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.insert(n);
        }
    }
    let expected: BTreeSet<usize> = EXPECTED_FAILURES.iter().copied().collect();
    if failed != expected {
        println!("unexpected outcome: failing {failed:?}, expected {expected:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} of 11 pass; criterion 9 fails on the twisted lift as documented", 11 - failed.len());
}
