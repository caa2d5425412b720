//! The invariant suites behind `sechom verify`.

use std::fmt::Write;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sechom_core::exactla::{kernel_image, kernel_in, solve_in, solve_linear};
use sechom_core::fixtures;
use sechom_core::gralg::{free_on_degrees, has_degree, hom_space, hom_total, is_linear, Module};
use sechom_core::homalg::{add_classes, build_resolution, ext_groups, is_a_exact_upto, yoneda_product, ExtClass};
use sechom_core::secondary::{
    build_secondary_resolution, compose_secondary, describe_failure, drop_top_generator, hosec_transfer, identity_map, is_b_exact_direct, is_b_exact_upto,
    truncate, validate_secondary, validate_secondary_map, BuildOptions,
};
use sechom_core::sext::{comparison, independence_audit, secondary_ext, AuditOptions, D2Engine, D2Report};
use sechom_core::track::{honest_sigma, verify_linear_extension, Kind, PairObject, TrackInstance};
use sechom_core::{Error, Mat};

use crate::chart::Image;
use crate::job::{JobSpec, Setup, Source};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suite {
    pub name: &'static str,
    pub checked: usize,
    pub skipped: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl Suite {
    pub fn new(name: &'static str) -> Suite {
        Suite { name, checked: 0, skipped: 0, failures: 0, first_failure: None }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(witness());
        }
    }

    fn fail(&mut self, why: String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(why);
        }
    }

    /// Runs a fallible block; an error counts as a failure.
    fn run(&mut self, what: &str, f: impl FnOnce(&mut Suite) -> Result<()>) {
        if let Err(e) = f(self) {
            self.checked += 1;
            self.fail(format!("{what}: {e:#}"));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub header: String,
    pub suites: Vec<Suite>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(Suite::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&Suite> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {}\nsuite\tstatus\tchecked\tskipped\tfirst failure\n", self.header);
        for s in &self.suites {
            let status = if s.passed() { "PASS" } else { "FAIL" };
            let w = s.first_failure.as_deref().unwrap_or("-").replace(['\t', '\n'], " ");
            writeln!(out, "{}\t{status}\t{}\t{}\t{w}", s.name, s.checked, s.skipped).unwrap();
        }
        writeln!(out, "overall\t{}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}

const CAP: usize = 1 << 10;

pub fn verify(job: &JobSpec, s: &Setup) -> Report {
    let header = format!("sechom verify {} smax={} tmax={} seed={}", s.describe(), job.s_max, job.t_max, job.seed);
    let suites = vec![
        exactla_suite(s, job.seed),
        gralg_suite(s),
        homalg_suite(s, job),
        track_suite(s),
        secondary_suite(s, job),
        sext_suite(s, job),
    ];
    Report { header, suites }
}

fn random_mat(rng: &mut ChaCha8Rng, r: usize, c: usize, m: u32) -> Mat {
    let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..m) as i64).collect()).collect();
    let refs: Vec<&[i64]> = rows.iter().map(|x| x.as_slice()).collect();
    Mat::from_rows(&refs, m)
}

pub fn exactla_suite(s: &Setup, seed: u64) -> Suite {
    let mut suite = Suite::new("exactla");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = s.prime();
    let big = s.inst.algebra().modulus();
    for i in 0..60 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let a = random_mat(&mut rng, r, c, p);
        let ki = kernel_image(&a);
        suite.check(ki.kernel.iter().all(|k| a.apply(k).iter().all(|&x| x == 0)), || format!("kernel vector not killed (matrix {i})"));
        suite.check(ki.kernel.len() + ki.rank == c, || format!("rank-nullity fails (matrix {i})"));
        let x: Vec<u32> = (0..c).map(|_| rng.gen_range(0..p)).collect();
        let b = a.apply(&x);
        let ok = matches!(solve_linear(&a, &b), Ok(Some(sol)) if a.apply(&sol.particular) == b);
        suite.check(ok, || format!("reachable target not solved (matrix {i})"));
        if big != p {
            let a = random_mat(&mut rng, r, c, big);
            let ords: Vec<u32> = (0..c).map(|_| if rng.gen_bool(0.5) { p } else { big }).collect();
            let tgt = vec![big; r];
            let x: Vec<u32> = ords.iter().map(|&o| rng.gen_range(0..o)).collect();
            // entries killed by p lie in p Z/p^2
            let a = Mat::from_columns(&(0..c).map(|j| a.column(j).iter().map(|&v| if ords[j] == p { v % p * p } else { v }).collect()).collect::<Vec<_>>(), r, big);
            let b = a.apply(&x);
            let y = solve_in(&a, &b, &ords, &tgt);
            suite.check(y.is_some_and(|y| a.apply(&y) == b), || format!("Z/p^2 target not solved (matrix {i})"));
            for k in kernel_in(&a, &ords, &tgt) {
                suite.check(a.apply(&k).iter().all(|&v| v == 0), || format!("Z/p^2 kernel vector not killed (matrix {i})"));
            }
        }
    }
    suite
}

pub fn gralg_suite(s: &Setup) -> Suite {
    let mut suite = Suite::new("gralg");
    let alg = s.inst.algebra();
    let mut mods: Vec<Module> = vec![free_on_degrees(alg, &[0]).module().clone(), free_on_degrees(alg, &[1]).module().clone()];
    for m in [s.x.m0(), s.x.m1(), s.y.m0(), s.y.m1()] {
        if m.dim() > 0 && !mods.contains(m) {
            mods.push(m.clone());
        }
    }
    for (i, a) in mods.iter().enumerate() {
        for (j, b) in mods.iter().enumerate() {
            if alg.homogeneous() {
                for t in -2..=2 {
                    for f in hom_space(a, b, t) {
                        suite.check(is_linear(a, b, &f.matrix) && has_degree(a, b, &f.matrix, t), || format!("hom_space({i}, {j}, {t}) has a bad map"));
                    }
                }
            } else {
                for f in hom_total(a, b) {
                    suite.check(is_linear(a, b, &f), || format!("hom_total({i}, {j}) has a bad map"));
                }
            }
        }
    }
    suite
}

pub fn homalg_suite(s: &Setup, job: &JobSpec) -> Suite {
    let mut suite = Suite::new("homalg");
    suite.run("classical resolution", |suite| {
        let k = s.classical_target();
        let p = s.prime();
        let s_y = job.s_max.min(2);
        let t_y = job.t_max.min(4);
        let len = 3 * s_y + 2;
        let deg = 3 * t_y + 1;
        let res = build_resolution(&k, len - 1, deg)?;
        let ex = is_a_exact_upto(&res.augmented(), deg);
        // the last stage is left unresolved
        let ok = ex.first_failure.map_or(true, |(n, _)| n >= len as i32 - 1);
        suite.check(ok, || format!("resolution not exact: {}", describe_failure(&ex)));
        for n in 1..res.d.len() {
            suite.check(res.out_of(n).mul(&res.d[n]).is_zero(), || format!("d d != 0 at {n}"));
        }
        let top_t = 3 * t_y;
        let tab = ext_groups(&res, &k, 0..=3 * s_y, -top_t..=top_t)?;
        let mut classes = Vec::new();
        for ((sd, t), g) in &tab.groups {
            if *sd <= s_y && *t <= t_y {
                for b in &g.basis {
                    classes.push(ExtClass::from_coords(&res, &k, *sd, *t, b));
                }
            }
        }
        let class_of = |c: &ExtClass| -> Option<Vec<u32>> { tab.group(c.s, c.t).map(|g| g.classify(&c.coords(&res), p)) };
        let same = |a: &ExtClass, b: &ExtClass| a.s == b.s && a.t == b.t && class_of(a) == class_of(b);
        for a in &classes {
            for b in &classes {
                let ab = yoneda_product(a, b, &res, &res)?;
                suite.check(ab.is_cocycle(&res), || format!("product of ({},{}) and ({},{}) is not a cocycle", a.s, a.t, b.s, b.t));
                for c in &classes {
                    let l = yoneda_product(&ab, c, &res, &res)?;
                    let r = yoneda_product(a, &yoneda_product(b, c, &res, &res)?, &res, &res)?;
                    suite.check(same(&l, &r), || format!("associativity fails on ({},{}) ({},{}) ({},{})", a.s, a.t, b.s, b.t, c.s, c.t));
                }
                for a2 in classes.iter().filter(|x| x.s == a.s && x.t == a.t) {
                    let l = yoneda_product(&add_classes(a, a2), b, &res, &res)?;
                    let r = add_classes(&ab, &yoneda_product(a2, b, &res, &res)?);
                    suite.check(same(&l, &r), || format!("left additivity fails at ({},{})", a.s, a.t));
                }
                for b2 in classes.iter().filter(|x| x.s == b.s && x.t == b.t) {
                    let l = yoneda_product(a, &add_classes(b, b2), &res, &res)?;
                    let r = add_classes(&ab, &yoneda_product(a, b2, &res, &res)?);
                    suite.check(same(&l, &r), || format!("right additivity fails at ({},{})", b.s, b.t));
                }
            }
        }
        Ok(())
    });
    suite
}

pub fn track_sample(inst: &TrackInstance) -> Vec<PairObject> {
    match inst.kind() {
        Kind::PairCat if inst.algebra().dim() >= 2 => fixtures::pair_objects_dim2(inst),
        Kind::PairCat => {
            let alg = inst.algebra();
            vec![inst.zero_object(), inst.object(&Module::trivial(alg, &[0])).unwrap(), inst.object(&Module::trivial(alg, &[1])).unwrap()]
        }
        Kind::SquareRing => vec![inst.zero_object(), fixtures::square_rank_one(inst, 0), fixtures::square_rank_one(inst, 1)],
    }
}

pub fn track_suite(s: &Setup) -> Suite {
    let mut suite = Suite::new("track");
    suite.run("linear track extension", |suite| {
        let rep = verify_linear_extension(&s.inst, &track_sample(&s.inst), &honest_sigma)?;
        for law in &rep.laws {
            suite.checked += law.checked;
            if law.violations > 0 {
                suite.failures += law.violations;
                suite.first_failure.get_or_insert_with(|| format!("{}: {}", law.law, law.first_violation.clone().unwrap_or_default()));
            }
        }
        Ok(())
    });
    suite
}

pub fn secondary_suite(s: &Setup, job: &JobSpec) -> Suite {
    let mut suite = Suite::new("secondary");
    suite.run("job complex", |suite| {
        let c = s.complex(job.s_max, job.t_max)?;
        let v = validate_secondary(&c);
        suite.check(v.ok, || format!("coherence: {:?}", v.first_failure));
        if matches!(s.source, Source::Builder) {
            let e = is_b_exact_upto(&c, job.t_max);
            suite.check(e.exact, || format!("builder output not b-exact: {}", describe_failure(&e)));
        }
        let h = hosec_transfer(&c, job.t_max);
        suite.check(!h.violation, || format!("image vs secondary exactness: {} vs {}", describe_failure(&h.image), describe_failure(&h.secondary)));
        let id = identity_map(&c);
        let vid = validate_secondary_map(&c, &c, &id);
        suite.check(vid.ok, || format!("identity map: {:?}", vid.first_failure));
        suite.check(compose_secondary(&id, &id)? == id, || "identity does not compose to itself".into());
        if s.kind() == Kind::PairCat && c.hi() >= 1 {
            let small = truncate(&c, c.hi().min(2))?;
            let mut cases = vec![small.clone()];
            if let Ok(f) = drop_top_generator(&small, 0) {
                cases.push(f);
            }
            let degrees: Vec<i32> = (0..=3).collect();
            for (i, cx) in cases.iter().enumerate() {
                match is_b_exact_direct(cx, &degrees, CAP) {
                    Ok(direct) => {
                        let total = is_b_exact_upto(cx, 3);
                        suite.check(direct == total, || format!("case {i}: direct {} vs total {}", describe_failure(&direct), describe_failure(&total)));
                    }
                    Err(Error::Cap(_)) => suite.skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(())
    });
    suite.run("random fixtures", |suite| {
        for i in 0..20u64 {
            let seed = job.seed.wrapping_mul(1000).wrapping_add(i);
            let x = fixtures::random_object(&s.inst, seed);
            let r = build_secondary_resolution(&s.inst, &x, BuildOptions::new(3, 5))?;
            let v = validate_secondary(&r.complex);
            suite.check(v.ok, || format!("random object {seed}: coherence {:?}", v.first_failure));
            let h = hosec_transfer(&r.complex, 5);
            suite.check(!h.violation, || format!("random object {seed}: transfer violated"));
        }
        Ok(())
    });
    suite
}

fn add_image(a: &Image, b: &Image, p: u32) -> Image {
    let mut out = a.clone();
    for (t, v) in b {
        let e = out.entry(*t).or_insert_with(|| vec![0; v.len()]);
        for (x, y) in e.iter_mut().zip(v) {
            *x = (*x + y) % p;
        }
    }
    out.retain(|_, v| v.iter().any(|&x| x != 0));
    out
}

pub fn sext_suite(s: &Setup, job: &JobSpec) -> Suite {
    let mut suite = Suite::new("sext");
    let engine = match s.engine(job.s_max, job.t_max) {
        Ok(e) => e,
        Err(e) => {
            suite.checked += 1;
            suite.fail(format!("engine: {e:#}"));
            return suite;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(job.seed ^ 0x5e);
    d2_algebra_checks(&mut suite, &engine, s, job, &mut rng);
    audit_checks(&mut suite, &engine, s, job);
    secondary_ext_checks(&mut suite, &engine, s, job);
    suite
}

/// Additivity, vanishing on coboundaries and the identities behind `Γ` on
/// every basis class of the window.
pub fn d2_algebra_checks(suite: &mut Suite, e: &D2Engine, s: &Setup, job: &JobSpec, rng: &mut ChaCha8Rng) {
    let p = s.prime();
    suite.run("d2 algebra", |suite| {
        for m in 0..=1u32 {
            for sd in 0..=job.s_max {
                for t in s.t_min()..=job.t_max {
                    let g = e.group(m, sd, t)?;
                    let n = g.dim();
                    let unit = |i: usize| {
                        let mut v = vec![0; n];
                        v[i] = 1;
                        v
                    };
                    let reports: Vec<D2Report> = (0..n).map(|i| e.d2(m, sd, t, &unit(i))).collect::<Result<_, _>>()?;
                    for r in &reports {
                        let gd = r.big_gamma.mul(&e.cx.d(sd as i32 + 2).f0);
                        suite.check(gd.is_zero(), || format!("Γ d_{} != 0 at ({sd},{t}) level {m}", sd + 2));
                    }
                    let outs: Vec<Image> = reports.into_iter().map(|r| r.output).collect();
                    for i in 0..n {
                        for j in i..n {
                            let mut v = unit(i);
                            v[j] = (v[j] + 1) % p;
                            let lhs = e.d2(m, sd, t, &v)?.output;
                            suite.check(lhs == add_image(&outs[i], &outs[j], p), || format!("additivity fails on classes {i}, {j} of ({sd},{t}) level {m}"));
                        }
                    }
                    if sd >= 1 {
                        let prev = e.group(m, sd - 1, t)?;
                        let slots = prev.coords.slots.len();
                        if slots > 0 {
                            let v: Vec<u32> = (0..slots).map(|_| rng.gen_range(0..p)).collect();
                            let phi = prev.coords.to_map(&e.res.frees[sd - 1], e.coefficients(m), &v);
                            let c = phi.mul(&e.res.d[sd - 1]);
                            let r = e.d2_cocycle(m, sd, t, &c)?;
                            suite.check(r.is_zero(), || format!("d2 of a coboundary at ({sd},{t}) level {m} is {:?}", r.output));
                        }
                    }
                }
            }
        }
        Ok(())
    });
}

/// The independence audit on every class with `s <= 2`; capped variations
/// count as skipped.
pub fn audit_checks(suite: &mut Suite, e: &D2Engine, s: &Setup, job: &JobSpec) {
    suite.run("independence audit", |suite| {
        let mut opts = AuditOptions::default();
        if matches!(s.source, Source::Builder) {
            let alt = build_secondary_resolution(
                &s.inst,
                &s.x,
                BuildOptions { reverse: true, perturb: Some(job.seed), ..BuildOptions::new(e.cx.hi() as usize, s.resolution_degree(job.t_max)) },
            )?;
            let f = comparison(&alt.complex, &e.cx)?;
            opts.alternate = Some((alt.complex, f));
        }
        for sd in 0..=job.s_max.min(2) {
            for t in s.t_min()..=job.t_max {
                let g = e.group(0, sd, t)?;
                for i in 0..g.dim() {
                    let mut v = vec![0; g.dim()];
                    v[i] = 1;
                    let a = independence_audit(e, 0, sd, t, &v, &opts)?;
                    for var in &a.variations {
                        if var.capped {
                            suite.skipped += 1;
                        }
                        suite.check(var.mismatches == 0, || format!("{} at ({sd},{t}) class {i}: {}", var.name, var.witness.clone().unwrap_or_default()));
                    }
                }
            }
        }
        Ok(())
    });
}

/// `d2 d2 = 0` and the secondary Ext table.
pub fn secondary_ext_checks(suite: &mut Suite, e: &D2Engine, s: &Setup, job: &JobSpec) {
    suite.run("secondary Ext", |suite| {
        match secondary_ext(e, job.s_max, s.t_min()..=job.t_max) {
            Ok(tab) => {
                for ((sd, t, m), entry) in &tab.entries {
                    suite.check(entry.dim <= entry.primary, || format!("entry ({sd},{t},{m}) exceeds its primary group"));
                }
            }
            Err(Error::D2SquareNonzero { s: sd, witness }) => {
                suite.checked += 1;
                suite.fail(format!("d2 d2 != 0 from s = {sd}: {witness}"));
            }
            Err(err) => return Err(err.into()),
        }
        Ok(())
    });
}
