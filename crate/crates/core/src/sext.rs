//! The secondary differential `d2 : Ext^{s,t}(X, [-, R^m Y]) -> Ext^{s+2,t}(X, [-, R^{m+1} Y])`,
//! an audit of its independence from every choice, and secondary Ext.
//!
//! For a class with representative `c : X_s -> Y` choose `γ : 0 => c d_s`.
//! The pasting `Γ = c δ_s □ γ d_{s+1}` is a track `0 => 0` on `X_{s+2}`,
//! that is an element of `D(X_{s+2}, Y) = [X_{s+2}, R Y]`, and a cocycle.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactla::{kernel_in, solve_in, Mat, Span};
use crate::gralg::{FreeModule, Module};
use crate::homalg::{ext_groups, ExtGroup, Resolution};
use crate::secondary::{extend_secondary_map, image_resolution, pi0, project_degree, relabel, reversed_labels, validate_secondary, SecondaryComplex, SecondaryMap};
use crate::track::{comp, Kind, PairObject};
use crate::{Error, Result};

/// Class coordinates by internal degree; zero classes are omitted.
pub type Components = BTreeMap<i32, Vec<u32>>;

/// One coefficient level `R^m Y`.
#[derive(Clone, Debug)]
pub struct Level {
    pub object: PairObject,
    /// `π₀ R^m Y` over the base algebra.
    pub q: Module,
    pub proj: Mat,
    pub section: Mat,
    /// `M0` coordinates of this level into `M1` of the previous one.
    pub incl: Mat,
}

/// The audited value of d2 on one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Report {
    pub s: usize,
    pub t: i32,
    pub m: u32,
    /// `M0` part of the chosen representative.
    pub c0: Mat,
    pub gamma: Mat,
    /// Datum of `Γ`, a map `X_{s+2,0} -> Y_1`.
    pub big_gamma: Mat,
    /// `Γ` as a cocycle `P_{s+2} -> π₀ R^{m+1} Y`.
    pub cocycle: Mat,
    pub output: Components,
}

impl D2Report {
    pub fn is_zero(&self) -> bool {
        self.output.is_empty()
    }
}

/// Everything d2 needs about one secondary resolution and one coefficient object.
#[derive(Clone, Debug)]
pub struct D2Engine {
    pub cx: SecondaryComplex,
    pub y: PairObject,
    pub res: Resolution,
    pub levels: Vec<Level>,
}

impl D2Engine {
    pub fn new(cx: &SecondaryComplex, y: &PairObject) -> Result<D2Engine> {
        let inst = &cx.inst;
        if !y.m0().algebra().same(inst.algebra()) {
            return Err(Error::WrongInstance("coefficients outside the instance".into()));
        }
        if cx.lo > 0 {
            return Err(Error::Window("the complex must contain index 0".into()));
        }
        let v = validate_secondary(cx);
        if !v.ok {
            return Err(Error::Unsolvable(format!("resolution fails coherence at {:?}", v.first_failure)));
        }
        let res = image_resolution(cx)?;
        let mut levels = Vec::new();
        let mut z = y.clone();
        let mut incl = Mat::identity(z.m0().dim(), z.m0().modulus());
        for _ in 0..3 {
            let (q, proj, section) = pi0(inst, &z);
            let (next, next_incl) = inst.r_object(&z);
            levels.push(Level { object: z, q, proj, section, incl });
            z = next;
            incl = next_incl;
        }
        Ok(D2Engine { cx: cx.clone(), y: y.clone(), res, levels })
    }

    fn p(&self) -> u32 {
        self.cx.inst.prime()
    }

    pub fn coefficients(&self, m: u32) -> &Module {
        &self.levels[m as usize].q
    }

    /// `Ext^{s,t}(X, π₀ R^m Y)` on the image resolution.
    pub fn group(&self, m: u32, s: usize, t: i32) -> Result<ExtGroup> {
        let mut tab = ext_groups(&self.res, self.coefficients(m), s..=s, t..=t)?;
        Ok(tab.groups.remove(&(s, t)).expect("requested group"))
    }

    fn free(&self, s: usize) -> FreeModule {
        self.cx.free(s as i32).expect("free above index 0")
    }

    /// Cocycle `P_s -> π₀ R^m Y` of a class given by coordinates.
    pub fn cocycle(&self, m: u32, s: usize, t: i32, coords: &[u32]) -> Result<Mat> {
        let g = self.group(m, s, t)?;
        if coords.len() != g.dim() {
            return Err(Error::Dimension { expected: g.dim(), found: coords.len() });
        }
        let p = self.p();
        let mut v = vec![0; g.coords.slots.len()];
        for (b, &k) in g.basis.iter().zip(coords) {
            for (x, y) in v.iter_mut().zip(b) {
                *x = (*x + k * y) % p;
            }
        }
        Ok(g.coords.to_map(&self.res.frees[s], self.coefficients(m), &v))
    }

    /// The `M0` part of a representative `X_s -> R^m Y` of a cocycle.
    pub fn lift_cochain(&self, m: u32, s: usize, cocycle: &Mat) -> Mat {
        let lv = &self.levels[m as usize];
        let vals: Vec<Vec<u32>> = self.res.frees[s].values_of(cocycle).iter().map(|v| lv.section.apply(v)).collect();
        self.free(s).map_from_values(lv.object.m0(), &vals)
    }

    /// A track `γ : 0 => c d_s` for `c` with `M0` part `c0`, projected to the
    /// degree of each generator when the algebra is graded.
    pub fn solve_gamma(&self, m: u32, s: usize, t: i32, c0: &Mat) -> Result<Mat> {
        let z = &self.levels[m as usize].object;
        let f1 = self.free(s + 1);
        let cd = comp(c0, &self.cx.d(s as i32).f0);
        let o0 = vec![z.m0().modulus(); z.m0().dim()];
        let o1 = vec![z.m1().modulus(); z.m1().dim()];
        let mut vals = Vec::new();
        for (g, (_, deg)) in f1.gens().iter().enumerate() {
            let rhs: Vec<u32> = cd.column(f1.gen_index(g)).iter().map(|&x| (z.m0().modulus() - x) % z.m0().modulus()).collect();
            let Some(x) = solve_in(z.boundary(), &rhs, &o1, &o0) else {
                return Err(Error::Unsolvable(format!("no track 0 => c d_{s} at generator {g} of degree {deg}: not a cocycle")));
            };
            vals.push(if self.cx.graded() { project_degree(z.m1().degrees(), &x, deg - t) } else { x });
        }
        Ok(f1.map_from_values(z.m1(), &vals))
    }

    /// `Γ = c δ_s □ γ d_{s+1}` with its defining identities checked.
    pub fn big_gamma(&self, m: u32, s: usize, c0: &Mat, gamma: &Mat) -> Result<Mat> {
        let z = &self.levels[m as usize].object;
        let s_ = s as i32;
        let c1 = match self.cx.inst.kind() {
            Kind::SquareRing => c0.clone(),
            Kind::PairCat => crate::track::zero_into(z.m1(), self.cx.object(s_).m1().dim()),
        };
        let g = comp(&c1, self.cx.delta(s_)).add(&comp(gamma, &self.cx.d(s_ + 1).f0));
        if !comp(z.boundary(), &g).is_zero() || !comp(&g, self.cx.object(s_ + 2).boundary()).is_zero() {
            return Err(Error::Unsolvable(format!("Γ at s = {s} is not an automorphism of the zero map")));
        }
        if self.cx.has(s_ + 3) && !comp(&g, &self.cx.d(s_ + 2).f0).is_zero() {
            return Err(Error::Unsolvable(format!("Γ d_{} is nonzero", s + 2)));
        }
        Ok(g)
    }

    /// `Γ` as a cocycle `P_{s+2} -> π₀ R^{m+1} Y`.
    pub fn gamma_cocycle(&self, m: u32, s: usize, big_gamma: &Mat) -> Result<Mat> {
        let next = &self.levels[m as usize + 1];
        let z1 = self.levels[m as usize].object.m1();
        let f = self.free(s + 2);
        let ro = vec![next.object.m0().modulus(); next.object.m0().dim()];
        let zo = vec![z1.modulus(); z1.dim()];
        let mut vals = Vec::new();
        for g in 0..f.rank() {
            let Some(v) = solve_in(&next.incl, &big_gamma.column(f.gen_index(g)), &ro, &zo) else {
                return Err(Error::Unsolvable("Γ does not land in R Y".into()));
            };
            vals.push(next.proj.apply(&v));
        }
        Ok(self.res.frees[s + 2].map_from_values(&next.q, &vals))
    }

    /// Splits a cocycle `P_s -> π₀ R^m Y` by internal degree and classes each part.
    pub fn classify_map(&self, m: u32, s: usize, map: &Mat) -> Result<Components> {
        let q = self.coefficients(m);
        let f = &self.res.frees[s];
        let mut ts: Vec<i32> = Vec::new();
        for (g, (_, dg)) in f.gens().iter().enumerate() {
            let col = map.column(f.gen_index(g));
            for (j, &x) in col.iter().enumerate() {
                if x != 0 {
                    ts.push(dg - q.degrees()[j]);
                }
            }
        }
        ts.sort();
        ts.dedup();
        let mut out = Components::new();
        for t in ts {
            let g = self.group(m, s, t)?;
            let v = g.coords.from_map(f, map);
            let part = g.coords.to_map(f, q, &v);
            if s < self.res.d.len() && !part.mul(&self.res.d[s]).is_zero() {
                return Err(Error::Unsolvable(format!("component of degree {t} is not a cocycle")));
            }
            let c = g.classify(&v, self.p());
            if c.iter().any(|&x| x != 0) {
                out.insert(t, c);
            }
        }
        Ok(out)
    }

    /// d2 of an explicit representative and track.
    pub fn d2_with(&self, m: u32, s: usize, t: i32, c0: &Mat, gamma: &Mat) -> Result<D2Report> {
        let big = self.big_gamma(m, s, c0, gamma)?;
        let cocycle = self.gamma_cocycle(m, s, &big)?;
        let output = self.classify_map(m + 1, s + 2, &cocycle)?;
        Ok(D2Report { s, t, m, c0: c0.clone(), gamma: gamma.clone(), big_gamma: big, cocycle, output })
    }

    /// d2 of a cocycle `P_s -> π₀ R^m Y` of internal degree `-t`.
    pub fn d2_cocycle(&self, m: u32, s: usize, t: i32, cocycle: &Mat) -> Result<D2Report> {
        self.check_window(m, s)?;
        let c0 = self.lift_cochain(m, s, cocycle);
        self.d2_cochain(m, s, t, &c0)
    }

    pub fn d2_cochain(&self, m: u32, s: usize, t: i32, c0: &Mat) -> Result<D2Report> {
        self.check_window(m, s)?;
        let gamma = self.solve_gamma(m, s, t, c0)?;
        self.d2_with(m, s, t, c0, &gamma)
    }

    pub fn d2(&self, m: u32, s: usize, t: i32, coords: &[u32]) -> Result<D2Report> {
        self.check_window(m, s)?;
        let c = self.cocycle(m, s, t, coords)?;
        self.d2_cocycle(m, s, t, &c)
    }

    fn check_window(&self, m: u32, s: usize) -> Result<()> {
        if m > 1 {
            return Err(Error::Window(format!("level {m}: only levels 0 and 1 are tracked")));
        }
        if s as i32 + 3 > self.cx.hi() {
            return Err(Error::Window(format!("d2 on s = {s} needs A_{}", s + 3)));
        }
        Ok(())
    }
}

/// d2 of a class given as a cocycle on the image resolution of `cx`.
pub fn d2_class(cx: &SecondaryComplex, y: &PairObject, cls: &crate::homalg::ExtClass) -> Result<D2Report> {
    let e = D2Engine::new(cx, y)?;
    e.d2_cocycle(cls.m, cls.s, cls.t, &cls.cocycle.matrix)
}

fn enumerate(orders: &[u32], cap: usize) -> Option<Vec<Vec<u32>>> {
    let mut total: usize = 1;
    for &o in orders {
        total = total.checked_mul(o as usize)?;
        if total > cap {
            return None;
        }
    }
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0u32; orders.len()];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == orders.len() {
                return Some(out);
            }
            cur[i] += 1;
            if cur[i] < orders[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

fn combine(gens: &[Vec<u32>], coeffs: &[u32], orders: &[u32]) -> Vec<u32> {
    let mut v = vec![0; orders.len()];
    for (g, &k) in gens.iter().zip(coeffs) {
        for ((x, &y), &o) in v.iter_mut().zip(g).zip(orders) {
            *x = (*x + k * y) % o;
        }
    }
    v
}

/// One variation of the independence audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variation {
    pub name: String,
    pub compared: usize,
    pub mismatches: usize,
    /// Enumeration hit the cap and was cut short.
    pub capped: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub s: usize,
    pub t: i32,
    pub m: u32,
    pub reference: Components,
    pub variations: Vec<Variation>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.variations.iter().all(|v| v.mismatches == 0)
    }
    pub fn mismatches(&self) -> usize {
        self.variations.iter().map(|v| v.mismatches).sum()
    }
}

/// Which variations to run.
#[derive(Clone, Debug)]
pub struct AuditOptions {
    pub cap: usize,
    /// An independently built complex with a secondary map into the audited one.
    pub alternate: Option<(SecondaryComplex, SecondaryMap)>,
    pub relabel: bool,
}

impl Default for AuditOptions {
    fn default() -> AuditOptions {
        AuditOptions { cap: 1 << 10, alternate: None, relabel: true }
    }
}

struct Tally {
    v: Variation,
}

impl Tally {
    fn new(name: &str) -> Tally {
        Tally { v: Variation { name: name.into(), compared: 0, mismatches: 0, capped: false, witness: None } }
    }
    fn check(&mut self, reference: &Components, got: &Components, what: impl FnOnce() -> String) {
        self.v.compared += 1;
        if got != reference {
            self.v.mismatches += 1;
            if self.v.witness.is_none() {
                self.v.witness = Some(format!("{}: expected {:?}, got {:?}", what(), reference, got));
            }
        }
    }
    fn fail(&mut self, why: String) {
        self.v.compared += 1;
        self.v.mismatches += 1;
        if self.v.witness.is_none() {
            self.v.witness = Some(why);
        }
    }
}

/// Coordinates of `target` in one internal degree, for graded algebras.
fn degree_orders(m: &Module, d: Option<i32>) -> (Vec<usize>, Vec<u32>) {
    let idx: Vec<usize> = match d {
        Some(d) => m.in_degree(d),
        None => (0..m.dim()).collect(),
    };
    let o = vec![m.modulus(); idx.len()];
    (idx, o)
}

/// Recomputes d2 on one class under every available change of choices and
/// compares the resulting classes.
pub fn independence_audit(e: &D2Engine, m: u32, s: usize, t: i32, coords: &[u32], opts: &AuditOptions) -> Result<AuditReport> {
    let reference = e.d2(m, s, t, coords)?;
    let p = e.p();
    let graded = e.cx.graded();
    let lv = &e.levels[m as usize];
    let z = &lv.object;
    let mut variations = Vec::new();

    // (i) every cocycle representative, every lift, every track
    let mut tally = Tally::new("representatives and tracks");
    let group = e.group(m, s, t)?;
    let base = {
        let c = e.cocycle(m, s, t, coords)?;
        group.coords.from_map(&e.res.frees[s], &c)
    };
    let mut bspan = Span::new(group.coords.slots.len(), p);
    let bnd: Vec<Vec<u32>> = group.boundaries.iter().filter(|b| bspan.insert(b)).cloned().collect();
    let fs = e.free(s);
    let fs1 = e.free(s + 1);
    let lift_slots: Vec<(usize, usize)> = fs
        .gens()
        .iter()
        .enumerate()
        .flat_map(|(g, (_, dg))| degree_orders(z.m1(), graded.then_some(dg - t)).0.into_iter().map(move |j| (g, j)))
        .collect();
    let gamma_kernels: Vec<Vec<Vec<u32>>> = fs1
        .gens()
        .iter()
        .map(|(_, dg)| {
            let (idx, o) = degree_orders(z.m1(), graded.then_some(dg - t));
            let sub = z.boundary().select_cols(&idx);
            kernel_in(&sub, &o, &vec![z.m0().modulus(); z.m0().dim()])
                .into_iter()
                .map(|k| {
                    let mut v = vec![0; z.m1().dim()];
                    for (x, &i) in k.iter().zip(&idx) {
                        v[i] = *x;
                    }
                    v
                })
                .collect()
        })
        .collect();
    let reps = enumerate(&vec![p; bnd.len()], opts.cap);
    let lifts = enumerate(&vec![p; lift_slots.len()], opts.cap);
    let n_gamma: usize = gamma_kernels.iter().map(|k| k.len()).sum();
    let gammas = enumerate(&vec![p; n_gamma], opts.cap);
    match (reps, lifts, gammas) {
        (Some(reps), Some(lifts), Some(gammas)) if reps.len().saturating_mul(lifts.len()).saturating_mul(gammas.len()) <= opts.cap * 16 => {
            for r in &reps {
                let mut v = base.clone();
                for (b, &k) in bnd.iter().zip(r) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = (*x + k * y) % p;
                    }
                }
                let cocycle = group.coords.to_map(&e.res.frees[s], &lv.q, &v);
                let c_base = e.lift_cochain(m, s, &cocycle);
                for h in &lifts {
                    let mut vals = vec![vec![0; z.m1().dim()]; fs.rank()];
                    for (&(g, j), &k) in lift_slots.iter().zip(h) {
                        vals[g][j] = k;
                    }
                    let hmap = fs.map_from_values(z.m1(), &vals);
                    let c0 = c_base.add(&comp(z.boundary(), &hmap));
                    let gamma0 = match e.solve_gamma(m, s, t, &c0) {
                        Ok(g) => g,
                        Err(err) => {
                            tally.fail(format!("{err}"));
                            continue;
                        }
                    };
                    for gsel in &gammas {
                        let mut vals = vec![vec![0; z.m1().dim()]; fs1.rank()];
                        let mut k = 0;
                        for (g, ker) in gamma_kernels.iter().enumerate() {
                            let coeffs = &gsel[k..k + ker.len()];
                            k += ker.len();
                            vals[g] = combine(ker, coeffs, &vec![z.m1().modulus(); z.m1().dim()]);
                        }
                        let gamma = gamma0.add(&fs1.map_from_values(z.m1(), &vals));
                        match e.d2_with(m, s, t, &c0, &gamma) {
                            Ok(r) => tally.check(&reference.output, &r.output, || format!("c0 = {:?}, γ = {:?}", c0.entries(), gamma.entries())),
                            Err(err) => tally.fail(format!("{err}")),
                        }
                    }
                }
            }
        }
        _ => tally.v.capped = true,
    }
    variations.push(tally.v);

    // (ii) coboundary shifts c + a d_{s-1}
    let mut tally = Tally::new("coboundary shifts");
    if s > 0 {
        let fprev = e.free(s - 1);
        let slots: Vec<(usize, usize)> = fprev
            .gens()
            .iter()
            .enumerate()
            .flat_map(|(g, (_, dg))| degree_orders(z.m0(), graded.then_some(dg - t)).0.into_iter().map(move |j| (g, j)))
            .collect();
        match enumerate(&vec![z.m0().modulus(); slots.len()], opts.cap) {
            Some(all) => {
                for a in all {
                    let mut vals = vec![vec![0; z.m0().dim()]; fprev.rank()];
                    for (&(g, j), &k) in slots.iter().zip(&a) {
                        vals[g][j] = k;
                    }
                    let amap = fprev.map_from_values(z.m0(), &vals);
                    let c0 = reference.c0.add(&comp(&amap, &e.cx.d(s as i32 - 1).f0));
                    match e.d2_cochain(m, s, t, &c0) {
                        Ok(r) => tally.check(&reference.output, &r.output, || format!("a = {a:?}")),
                        Err(err) => tally.fail(format!("{err}")),
                    }
                }
            }
            None => tally.v.capped = true,
        }
    }
    variations.push(tally.v);

    // (iii) an independent resolution, compared through a secondary map f : alt -> cx
    if let Some((alt, f)) = &opts.alternate {
        let mut tally = Tally::new("independent resolution");
        match D2Engine::new(alt, &e.y) {
            Ok(e2) => {
                let fs_ = f.f(s as i32).f0.reduce(p);
                let fs2 = f.f(s as i32 + 2).f0.reduce(p);
                let c = e.cocycle(m, s, t, coords)?;
                let pulled = c.mul(&fs_);
                let out2 = e2.d2_cocycle(m, s, t, &pulled);
                let expect = e2.classify_map(m + 1, s + 2, &reference.cocycle.mul(&fs2));
                match (out2, expect) {
                    (Ok(a), Ok(b)) => tally.check(&b, &a.output, || "pullback along the comparison map".into()),
                    (Err(err), _) | (_, Err(err)) => tally.fail(format!("{err}")),
                }
            }
            Err(err) => tally.fail(format!("{err}")),
        }
        variations.push(tally.v);
    }

    // (iv) strict relabeling of generators
    if opts.relabel {
        let mut tally = Tally::new("relabeling");
        let (c2, ps) = relabel(&e.cx, &reversed_labels(&e.cx))?;
        let e2 = D2Engine::new(&c2, &e.y)?;
        let idx = |n: usize| (n as i32 - e.cx.lo) as usize;
        let ps_ = ps[idx(s)].reduce(p);
        let ps2 = ps[idx(s + 2)].reduce(p);
        let c = e.cocycle(m, s, t, coords)?;
        let moved = c.mul(&ps_.transpose());
        match e2.d2_cocycle(m, s, t, &moved) {
            Ok(r) => {
                let back = e.classify_map(m + 1, s + 2, &r.cocycle.mul(&ps2))?;
                tally.check(&reference.output, &back, || "reversed generator order".into());
            }
            Err(err) => tally.fail(format!("{err}")),
        }
        variations.push(tally.v);
    }

    Ok(AuditReport { s, t, m, reference: reference.output, variations })
}

/// The comparison map needed by audit variation (iii): `alt -> cx` over the
/// identity at the bottom index.
pub fn comparison(alt: &SecondaryComplex, cx: &SecondaryComplex) -> Result<SecondaryMap> {
    let start = alt.inst.identity_map(alt.object(alt.lo));
    if alt.object(alt.lo) != cx.object(cx.lo) {
        return Err(Error::NotComposable("complexes start at different objects".into()));
    }
    extend_secondary_map(alt, cx, start)
}

/// d2 on each basis class of `Ext^{s,t}` at level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Row {
    pub s: usize,
    pub t: i32,
    pub m: u32,
    pub index: usize,
    pub output: Components,
}

pub fn d2_table(e: &D2Engine, m: u32, s_range: core::ops::RangeInclusive<usize>, t_range: core::ops::RangeInclusive<i32>) -> Result<Vec<D2Row>> {
    let mut rows = Vec::new();
    for s in s_range {
        for t in t_range.clone() {
            let g = e.group(m, s, t)?;
            for i in 0..g.dim() {
                let mut c = vec![0; g.dim()];
                c[i] = 1;
                let r = e.d2(m, s, t, &c)?;
                rows.push(D2Row { s, t, m, index: i, output: r.output });
            }
        }
    }
    Ok(rows)
}

/// One entry of a secondary Ext table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondaryEntry {
    pub primary: usize,
    pub dim: usize,
    /// Class coordinates (in the primary basis) of a basis of the subquotient.
    pub witnesses: Vec<Vec<u32>>,
}

/// `ker d2^{s,m} / im d2^{s-2,m-1}` on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondaryExtTable {
    pub p: u32,
    pub s_max: usize,
    pub t_min: i32,
    pub t_max: i32,
    pub entries: BTreeMap<(usize, i32, u32), SecondaryEntry>,
}

impl SecondaryExtTable {
    pub fn dim(&self, s: usize, t: i32, m: u32) -> usize {
        self.entries.get(&(s, t, m)).map_or(0, |e| e.dim)
    }
}

fn add_scaled(acc: &mut Components, other: &Components, k: u32, p: u32) {
    for (t, v) in other {
        let e = acc.entry(*t).or_insert_with(|| vec![0; v.len()]);
        for (x, y) in e.iter_mut().zip(v) {
            *x = (*x + k * y) % p;
        }
    }
    acc.retain(|_, v| v.iter().any(|&x| x != 0));
}

/// Secondary Ext on `0..=s_max` and the given internal degrees, levels 0 and 1.
/// The composite `d2 d2` is checked on the window first.
pub fn secondary_ext(e: &D2Engine, s_max: usize, t_range: core::ops::RangeInclusive<i32>) -> Result<SecondaryExtTable> {
    let p = e.p();
    if s_max as i32 + 3 > e.cx.hi() {
        return Err(Error::Window(format!("secondary Ext up to s = {s_max} needs A_{}", s_max + 3)));
    }
    // d2 images of basis classes: (m, s, t) -> rows
    let mut images: BTreeMap<(u32, usize, i32), Vec<Components>> = BTreeMap::new();
    for m in 0..=1u32 {
        for s in 0..=s_max {
            for t in t_range.clone() {
                let g = e.group(m, s, t)?;
                let mut rows = Vec::new();
                for i in 0..g.dim() {
                    let mut c = vec![0; g.dim()];
                    c[i] = 1;
                    rows.push(e.d2(m, s, t, &c)?.output);
                }
                images.insert((m, s, t), rows);
            }
        }
    }
    for s in 0..=s_max.saturating_sub(2) {
        if s + 2 > s_max {
            break;
        }
        for t in t_range.clone() {
            for (i, img) in images[&(0, s, t)].iter().enumerate() {
                let mut acc = Components::new();
                for (t2, coords) in img {
                    let r = e.d2(1, s + 2, *t2, coords)?;
                    add_scaled(&mut acc, &r.output, 1, p);
                }
                if !acc.is_empty() {
                    return Err(Error::D2SquareNonzero { s, witness: format!("basis class {i} of Ext^({s},{t}) maps to {acc:?}") });
                }
            }
        }
    }
    for ((m, s, t), rows) in &images {
        for r in rows {
            if r.keys().any(|t2| t2 != t) {
                return Err(Error::Input(format!("d2 on Ext^({s},{t}) at level {m} leaves internal degree {t}: {r:?}")));
            }
        }
    }
    let mut entries = BTreeMap::new();
    for m in 0..=1u32 {
        for s in 0..=s_max {
            for t in t_range.clone() {
                let g = e.group(m, s, t)?;
                let n = g.dim();
                let target_dim = e.group(m + 1, s + 2, t)?.dim();
                let cols: Vec<Vec<u32>> = images[&(m, s, t)].iter().map(|c| c.get(&t).cloned().unwrap_or_else(|| vec![0; target_dim])).collect();
                let kernel = if target_dim == 0 || n == 0 {
                    (0..n)
                        .map(|i| {
                            let mut v = vec![0; n];
                            v[i] = 1;
                            v
                        })
                        .collect()
                } else {
                    crate::exactla::kernel_image(&Mat::from_columns(&cols, target_dim, p)).kernel
                };
                let mut span = Span::new(n, p);
                if m >= 1 && s >= 2 {
                    for img in &images[&(m - 1, s - 2, t)] {
                        if let Some(v) = img.get(&t) {
                            span.insert(v);
                        }
                    }
                }
                let im_dim = span.dim();
                let mut witnesses = Vec::new();
                for k in kernel {
                    if span.insert(&k) {
                        witnesses.push(k);
                    }
                }
                if span.dim() != im_dim + witnesses.len() || im_dim > n {
                    return Err(Error::Unsolvable("image of d2 is not inside the kernel".into()));
                }
                entries.insert((s, t, m), SecondaryEntry { primary: n, dim: witnesses.len(), witnesses });
            }
        }
    }
    Ok(SecondaryExtTable { p, s_max, t_min: *t_range.start(), t_max: *t_range.end(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gralg::Module;
    use crate::homalg::build_resolution;
    use crate::secondary::{build_secondary_resolution, lifted_complex, BuildOptions};
    use crate::track::TrackInstance;

    fn pair_setup(y: fn(&TrackInstance) -> PairObject, s_max: usize) -> D2Engine {
        let inst = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
        let k = inst.object(&Module::trivial(inst.algebra(), &[0])).unwrap();
        let r = build_secondary_resolution(&inst, &k, BuildOptions::new(s_max, 12)).unwrap();
        D2Engine::new(&r.complex, &y(&inst)).unwrap()
    }

    #[test]
    fn split_coefficients_give_zero_d2() {
        let e = pair_setup(fixtures::split_pair, 7);
        let rows = d2_table(&e, 0, 0..=4, 0..=6).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.output.is_empty()));
    }

    #[test]
    fn nonsplit_coefficients_hit_the_next_power() {
        let e = pair_setup(fixtures::nonsplit_pair, 7);
        for s in 0..=4 {
            let g = e.group(0, s, s as i32).unwrap();
            assert_eq!(g.dim(), 1);
            let r = e.d2(0, s, s as i32, &[1]).unwrap();
            assert_eq!(r.output.get(&(s as i32)), Some(&vec![1]));
        }
        // π₁Y sits in degree 2, so level-1 classes live at t = s - 2
        let tab = secondary_ext(&e, 4, -2..=6).unwrap();
        for s in 0..=4 {
            assert_eq!(tab.dim(s, s as i32, 0), 0);
            assert_eq!(tab.entries[&(s, s as i32 - 2, 1)].primary, 1);
        }
        assert_eq!(tab.dim(0, -2, 1), 1);
        assert_eq!(tab.dim(1, -1, 1), 1);
        assert_eq!(tab.dim(2, 0, 1), 0);
    }

    #[test]
    fn zero_class_has_zero_d2() {
        let e = pair_setup(fixtures::nonsplit_pair, 5);
        assert!(e.d2(0, 1, 1, &[0]).unwrap().is_zero());
    }

    #[test]
    fn audit_passes_on_pair_fixture() {
        let inst = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
        let k = inst.object(&Module::trivial(inst.algebra(), &[0])).unwrap();
        let r = build_secondary_resolution(&inst, &k, BuildOptions::new(5, 10)).unwrap();
        let alt = build_secondary_resolution(&inst, &k, BuildOptions { reverse: true, perturb: Some(7), ..BuildOptions::new(5, 10) }).unwrap();
        let f = comparison(&alt.complex, &r.complex).unwrap();
        let y = fixtures::nonsplit_pair(&inst);
        let e = D2Engine::new(&r.complex, &y).unwrap();
        let opts = AuditOptions { alternate: Some((alt.complex.clone(), f)), ..AuditOptions::default() };
        for s in 0..=2 {
            let a = independence_audit(&e, 0, s, s as i32, &[1], &opts).unwrap();
            assert!(a.passed(), "{a:?}");
            assert!(a.variations.iter().all(|v| !v.capped));
            assert_eq!(a.variations.len(), 4);
        }
    }

    #[test]
    fn plain_lift_has_zero_d2() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap();
        let b = fixtures::flat_residue(&inst);
        let r = build_secondary_resolution(&inst, &b, BuildOptions::new(7, 10)).unwrap();
        let e = D2Engine::new(&r.complex, &b).unwrap();
        let tab = secondary_ext(&e, 4, 0..=6).unwrap();
        for s in 0..=4 {
            assert_eq!(tab.dim(s, s as i32, 0), 1);
        }
    }

    #[test]
    fn twisted_lift_shifts_degree_and_fails_square() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
        let classical = build_resolution(&Module::trivial(&fixtures::e1(), &[0]), 8, 14).unwrap();
        let c = lifted_complex(&inst, &classical, 8).unwrap();
        let y = fixtures::reduced_residue(&inst);
        let e = D2Engine::new(&c, &y).unwrap();
        let r = e.d2(0, 1, 1, &[1]).unwrap();
        assert_eq!(r.output.get(&3), Some(&vec![1]));
        assert!(matches!(secondary_ext(&e, 4, 0..=6), Err(Error::D2SquareNonzero { .. })));
    }
}
