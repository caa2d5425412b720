//! Secondary chain complexes in a track instance: coherence, secondary maps,
//! b-cycles and b-boundaries, the total complex, secondary resolutions and
//! their comparison maps, and the coaugmented-sequence constructor.
//!
//! Index conventions: `d_n : A_{n+1} -> A_n` and `δ_n : d_n d_{n+1} => 0`
//! with datum `A_{n+2,0} -> A_{n,1}`. The total complex has
//! `T_n = A_{n,0} ⊕ A_{n-1,1}` and `D_n = [[d0_n, -∂_n], [δ_{n-1}, -d1_{n-1}]]`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactla::{kernel_in, kernel_image, solve_in, solve_linear, Mat, Span};
use crate::gralg::{free_on_degrees, FreeModule, Module};
use crate::homalg::{ChainComplex, Exactness, Resolution};
use crate::track::{comp, compose, vcomp, whisker_left, whisker_right, Kind, PairMap, PairObject, Track, TrackInstance};
use crate::{Error, Result};

/// `ker f` as a module with its inclusion; over F_p.
pub fn kernel_module(m: &Module, f: &Mat) -> (Module, Mat) {
    let p = m.modulus();
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut degs: Vec<i32> = m.degrees().to_vec();
    degs.sort();
    degs.dedup();
    for d in degs {
        let cols = m.in_degree(d);
        let block = f.select_cols(&cols);
        for k in kernel_image(&block).kernel {
            let mut v = vec![0; m.dim()];
            for (x, &c) in k.iter().zip(&cols) {
                v[c] = *x;
            }
            basis.push(v);
        }
    }
    sub_module(m, basis, p)
}

fn sub_module(m: &Module, basis: Vec<Vec<u32>>, p: u32) -> (Module, Mat) {
    let incl = Mat::from_columns(&basis, m.dim(), p);
    let alg = m.algebra();
    let mut action = Vec::with_capacity(alg.dim());
    for a in 0..alg.dim() {
        let img = m.action(a).mul(&incl);
        let mut cols = Vec::with_capacity(basis.len());
        for j in 0..basis.len() {
            let sol = solve_linear(&incl, &img.column(j)).expect("shapes").expect("submodule is closed");
            cols.push(sol.particular);
        }
        action.push(Mat::from_columns(&cols, basis.len(), p));
    }
    let names = (0..basis.len()).map(|i| format!("k{i}")).collect::<Vec<_>>();
    let degrees: Vec<i32> = basis.iter().map(|v| m.leading_degree(v).unwrap_or(0)).collect();
    let module = Module::new(alg, names.into_iter().zip(degrees).collect(), action, p).expect("submodule");
    (module, incl)
}

/// `M / im(rel)` with its projection and the coordinate section; over F_p.
pub fn cokernel_module(m: &Module, rel: &Mat) -> (Module, Mat, Mat) {
    let p = m.modulus();
    let mut span = Span::new(m.dim(), p);
    for j in 0..rel.cols() {
        span.insert(&rel.column(j));
    }
    let free: Vec<usize> = (0..m.dim())
        .filter(|&i| {
            let mut e = vec![0; m.dim()];
            e[i] = 1;
            span.reduce(&e)[i] != 0
        })
        .collect();
    let proj_cols: Vec<Vec<u32>> = (0..m.dim())
        .map(|i| {
            let mut e = vec![0; m.dim()];
            e[i] = 1;
            let r = span.reduce(&e);
            free.iter().map(|&k| r[k]).collect()
        })
        .collect();
    let proj = Mat::from_columns(&proj_cols, free.len(), p);
    let section = Mat::from_columns(
        &free
            .iter()
            .map(|&k| {
                let mut e = vec![0; m.dim()];
                e[k] = 1;
                e
            })
            .collect::<Vec<_>>(),
        m.dim(),
        p,
    );
    let alg = m.algebra();
    let action = (0..alg.dim()).map(|a| proj.mul(m.action(a)).mul(&section)).collect();
    let basis = free.iter().map(|&k| (m.names()[k].clone(), m.degrees()[k])).collect();
    let q = Module::new(alg, basis, action, p).expect("quotient module");
    (q, proj, section)
}

/// Direct sum coordinates whose blocks may have different coordinate orders.
#[derive(Clone, Debug)]
pub(crate) struct Blocks(pub Vec<Module>);

impl Blocks {
    pub fn dim(&self) -> usize {
        self.0.iter().map(|m| m.dim()).sum()
    }
    pub fn orders(&self) -> Vec<u32> {
        self.0.iter().flat_map(|m| vec![m.modulus(); m.dim()]).collect()
    }
    pub fn degrees(&self) -> Vec<i32> {
        self.0.iter().flat_map(|m| m.degrees().iter().copied()).collect()
    }
    pub fn offsets(&self) -> Vec<usize> {
        let mut o = vec![0];
        for m in &self.0 {
            o.push(o.last().unwrap() + m.dim());
        }
        o
    }
    pub fn act(&self, a: usize, v: &[u32]) -> Vec<u32> {
        let off = self.offsets();
        let mut out = Vec::with_capacity(v.len());
        for (k, m) in self.0.iter().enumerate() {
            out.extend(m.action(a).apply(&v[off[k]..off[k + 1]]));
        }
        out
    }
    /// The lowest degree carrying a unit coefficient (else any nonzero one).
    pub fn leading_degree(&self, v: &[u32], p: u32) -> Option<i32> {
        let degs = self.degrees();
        let unit = v.iter().zip(&degs).filter(|(x, _)| **x % p != 0).map(|(_, d)| *d).min();
        unit.or_else(|| v.iter().zip(&degs).filter(|(x, _)| **x != 0).map(|(_, d)| *d).min())
    }
    pub fn split(&self, v: &[u32]) -> Vec<Vec<u32>> {
        let off = self.offsets();
        (0..self.0.len()).map(|k| v[off[k]..off[k + 1]].to_vec()).collect()
    }
}

/// Block matrix from `(row block, col block, matrix)` entries, lifted to the
/// largest modulus.
pub(crate) fn assemble(rows: &Blocks, cols: &Blocks, parts: &[(usize, usize, Mat)], m: u32) -> Mat {
    let ro = rows.offsets();
    let co = cols.offsets();
    let mut out = Mat::zero(rows.dim(), cols.dim(), m);
    for (r, c, a) in parts {
        let a = if a.modulus() == m { a.clone() } else { a.lift(m) };
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let x = a.get(i, j);
                if x != 0 {
                    out.set(ro[*r] + i, co[*c] + j, x);
                }
            }
        }
    }
    out
}

pub(crate) fn negate(a: &Mat) -> Mat {
    a.neg()
}

/// A secondary chain complex on the window `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondaryComplex {
    pub inst: TrackInstance,
    pub lo: i32,
    pub objects: Vec<PairObject>,
    /// `d[k] = d_{lo+k}`.
    pub d: Vec<PairMap>,
    /// `delta[k]` is the datum of `δ_{lo+k}`.
    pub delta: Vec<Mat>,
}

impl SecondaryComplex {
    pub fn new(inst: &TrackInstance, lo: i32, objects: Vec<PairObject>, d: Vec<PairMap>, delta: Vec<Mat>) -> Result<SecondaryComplex> {
        if objects.is_empty() || d.len() + 1 != objects.len() || delta.len() + 2 != objects.len().max(2) {
            return Err(Error::Window("shape of the secondary window".into()));
        }
        for (k, f) in d.iter().enumerate() {
            if f.source != objects[k + 1] || f.target != objects[k] {
                return Err(Error::NotComposable(format!("d_{} has the wrong ends", lo + k as i32)));
            }
        }
        Ok(SecondaryComplex { inst: inst.clone(), lo, objects, d, delta })
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.objects.len() as i32 - 1
    }
    pub fn has(&self, n: i32) -> bool {
        n >= self.lo && n <= self.hi()
    }
    pub fn object(&self, n: i32) -> &PairObject {
        &self.objects[(n - self.lo) as usize]
    }
    pub fn d(&self, n: i32) -> &PairMap {
        &self.d[(n - self.lo) as usize]
    }
    pub fn delta(&self, n: i32) -> &Mat {
        &self.delta[(n - self.lo) as usize]
    }
    /// `δ_n` as a track `d_n d_{n+1} => 0`.
    pub fn delta_track(&self, n: i32) -> Track {
        let dd = compose(self.d(n), self.d(n + 1)).expect("consecutive");
        let z = self.inst.zero_map(self.object(n + 2), self.object(n));
        Track { source: dd, target: z, datum: self.delta(n).clone() }
    }

    /// Free module of `A_n` for objects of the resolving subcategory.
    pub fn free(&self, n: i32) -> Option<FreeModule> {
        self.object(n).free_degrees().map(|d| free_on_degrees(self.inst.algebra(), d))
    }

    pub fn modulus(&self) -> u32 {
        self.inst.algebra().modulus()
    }

    /// `T_n = A_{n,0} ⊕ A_{n-1,1}`.
    pub(crate) fn total_blocks(&self, n: i32) -> Blocks {
        let mut b = Vec::new();
        if self.has(n) {
            b.push(self.object(n).m0().clone());
        } else {
            b.push(Module::zero(self.inst.algebra()));
        }
        if self.has(n - 1) {
            b.push(self.object(n - 1).m1().clone());
        } else {
            b.push(Module::zero(self.inst.algebra()));
        }
        Blocks(b)
    }

    /// `D_n : T_{n+1} -> T_n`.
    pub(crate) fn total_diff(&self, n: i32) -> Mat {
        let rows = self.total_blocks(n);
        let cols = self.total_blocks(n + 1);
        let mut parts = Vec::new();
        if self.has(n) && self.has(n + 1) {
            parts.push((0, 0, self.d(n).f0.clone()));
        }
        if self.has(n) {
            parts.push((0, 1, negate(self.object(n).boundary())));
        }
        if self.has(n - 1) && self.has(n + 1) {
            parts.push((1, 0, self.delta(n - 1).clone()));
        }
        if self.has(n - 1) && self.has(n) {
            parts.push((1, 1, negate(&self.d(n - 1).f1)));
        }
        assemble(&rows, &cols, &parts, self.modulus())
    }

    pub fn graded(&self) -> bool {
        self.inst.algebra().homogeneous()
    }
}

/// Verdict with the first failing index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub first_failure: Option<(i32, String)>,
}

impl Verdict {
    fn pass() -> Verdict {
        Verdict { ok: true, first_failure: None }
    }
    fn fail(n: i32, why: String) -> Verdict {
        Verdict { ok: false, first_failure: Some((n, why)) }
    }
}

/// Maps are pair maps, each `δ_n` is a track `d_n d_{n+1} => 0`, and the
/// coherence `d_{n-1} δ_n = δ_{n-1} d_{n+1}` holds on the nose.
pub fn validate_secondary(c: &SecondaryComplex) -> Verdict {
    let inst = &c.inst;
    for n in c.lo..c.hi() {
        let f = c.d(n);
        if inst.map(&f.source, &f.target, f.f1.clone(), f.f0.clone()).is_err() {
            return Verdict::fail(n, format!("d_{n} is not a map of pairs"));
        }
    }
    for n in c.lo..c.hi() - 1 {
        let t = c.delta_track(n);
        if inst.track(&t.source, &t.target, t.datum.clone()).is_err() {
            return Verdict::fail(n, format!("δ_{n} is not a track d_{n} d_{} => 0", n + 1));
        }
    }
    for n in c.lo + 1..c.hi() - 1 {
        let lhs = comp(&c.d(n - 1).f1, c.delta(n));
        let rhs = comp(c.delta(n - 1), &c.d(n + 1).f0);
        if lhs != rhs {
            return Verdict::fail(n, format!("coherence d_{} δ_{n} = δ_{} d_{}", n - 1, n - 1, n + 1));
        }
    }
    Verdict::pass()
}

/// Kernel of `a` restricted to coordinates of one degree (all coordinates when
/// ungraded), embedded back.
fn kernel_by_degree(a: &Mat, src: &Blocks, tgt_orders: &[u32], graded: bool) -> Vec<(i32, Vec<u32>)> {
    let p = src.0.first().map_or(2, |m| m.algebra().prime());
    let ords = src.orders();
    let degs = src.degrees();
    if !graded {
        return kernel_in(a, &ords, tgt_orders).into_iter().map(|v| (src.leading_degree(&v, p).unwrap_or(0), v)).collect();
    }
    let mut ds = degs.clone();
    ds.sort();
    ds.dedup();
    let mut out = Vec::new();
    for d in ds {
        let cols: Vec<usize> = (0..degs.len()).filter(|&i| degs[i] == d).collect();
        let sub = a.select_cols(&cols);
        let sub_ords: Vec<u32> = cols.iter().map(|&i| ords[i]).collect();
        for k in kernel_in(&sub, &sub_ords, tgt_orders) {
            let mut v = vec![0; degs.len()];
            for (x, &c) in k.iter().zip(&cols) {
                v[c] = *x;
            }
            out.push((d, v));
        }
    }
    out
}

pub(crate) fn project_degree(degs: &[i32], v: &[u32], d: i32) -> Vec<u32> {
    v.iter().zip(degs).map(|(&x, &e)| if e == d { x } else { 0 }).collect()
}

/// Exactness of the total complex at `n`: the lowest failing internal degree
/// at most `t_max`.
fn total_exact_at(c: &SecondaryComplex, n: i32, t_max: i32) -> Option<i32> {
    let mid = c.total_blocks(n);
    let below = c.total_blocks(n - 1);
    let above = c.total_blocks(n + 1);
    let cycles = kernel_by_degree(&c.total_diff(n - 1), &mid, &below.orders(), c.graded());
    let dn = c.total_diff(n);
    let mut worst: Option<i32> = None;
    for (deg, z) in cycles {
        if deg <= t_max && solve_in(&dn, &z, &above.orders(), &mid.orders()).is_none() {
            worst = Some(worst.map_or(deg, |w| w.min(deg)));
        }
    }
    worst
}

/// Secondary exactness on `lo..hi` (the top object has no successor to
/// test against), decided through the total complex.
pub fn is_b_exact(c: &SecondaryComplex) -> Exactness {
    is_b_exact_upto(c, i32::MAX)
}

pub fn is_b_exact_upto(c: &SecondaryComplex, t_max: i32) -> Exactness {
    for n in c.lo..c.hi() {
        if let Some(t) = total_exact_at(c, n, t_max) {
            return Exactness::from_failure(Some((n, t)));
        }
    }
    Exactness::from_failure(None)
}

/// The total complex as an ordinary complex over the base algebra (`PairCat`).
pub fn total_complex(c: &SecondaryComplex) -> Result<ChainComplex> {
    if c.inst.kind() != Kind::PairCat {
        return Err(Error::WrongInstance("the total complex is defined for PairCat".into()));
    }
    let mut objects = Vec::new();
    for n in c.lo..=c.hi() + 1 {
        let b = c.total_blocks(n);
        objects.push(b.0[0].direct_sum(&b.0[1]));
    }
    let diffs = (c.lo..=c.hi()).map(|n| c.total_diff(n)).collect();
    ChainComplex::new(c.lo, objects, diffs)
}

/// Is `(c, γ)` a b-cycle of degree `n`? Here `c : X -> A_n` and `γ` is the
/// datum of a track `d_{n-1} c => 0`.
pub fn is_b_cycle(cx: &SecondaryComplex, n: i32, c: &PairMap, gamma: &Mat) -> Result<bool> {
    let inst = &cx.inst;
    if !inst.is_b(&c.source) || c.target != *cx.object(n) {
        return Err(Error::NotComposable("b-chain".into()));
    }
    if !cx.has(n - 1) {
        return Ok(true);
    }
    let dc = compose(cx.d(n - 1), c)?;
    let z = inst.zero_map(&c.source, cx.object(n - 1));
    let Ok(g) = inst.track(&dc, &z, gamma.clone()) else { return Ok(false) };
    if !cx.has(n - 2) {
        return Ok(true);
    }
    let lhs = whisker_left(cx.d(n - 2), &g)?;
    let rhs = whisker_right(&cx.delta_track(n - 2), c)?;
    Ok(lhs.datum == rhs.datum)
}

/// A witness `(a, α)` with `α : c => d_n a` and `γ = δ_{n-1} a □ d_{n-1} α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryWitness {
    pub a: PairMap,
    pub alpha: Track,
}

/// Searches for a boundary witness among all `a`, `α` (at most `cap` pairs).
pub fn is_b_boundary(cx: &SecondaryComplex, n: i32, c: &PairMap, gamma: &Mat, cap: usize) -> Result<Option<BoundaryWitness>> {
    let inst = &cx.inst;
    let x = &c.source;
    let candidates_a = if cx.has(n + 1) { inst.all_maps(x, cx.object(n + 1), cap)? } else { vec![] };
    let data = inst.all_data(x, cx.object(n), cap)?;
    if candidates_a.len().saturating_mul(data.len()) > cap {
        return Err(Error::Cap(format!("{} boundary candidates", candidates_a.len() * data.len())));
    }
    for a in &candidates_a {
        let da = compose(cx.d(n), a)?;
        for al in &data {
            let Ok(alpha) = inst.track(c, &da, al.clone()) else { continue };
            if !cx.has(n - 1) {
                return Ok(Some(BoundaryWitness { a: a.clone(), alpha }));
            }
            let first = whisker_left(cx.d(n - 1), &alpha)?;
            let second = whisker_right(&cx.delta_track(n - 1), a)?;
            let total = vcomp(&second, &first)?;
            if total.datum == *gamma {
                return Ok(Some(BoundaryWitness { a: a.clone(), alpha }));
            }
        }
    }
    Ok(None)
}

/// Secondary exactness by enumerating every b-cycle on rank-one free probes
/// and searching for boundary witnesses with the track calculus.
pub fn is_b_exact_direct(c: &SecondaryComplex, degrees: &[i32], cap: usize) -> Result<Exactness> {
    let inst = &c.inst;
    for n in c.lo..c.hi() {
        for &t in degrees {
            let probe = inst.b_object(&free_on_degrees(inst.algebra(), &[t]));
            let maps = inst.all_maps(&probe, c.object(n), cap)?;
            let gammas = if c.has(n - 1) { inst.all_data(&probe, c.object(n - 1), cap)? } else { vec![Mat::zero(0, probe.m0().dim(), c.modulus())] };
            for m in &maps {
                if c.graded() && !map_has_degree(m, t) {
                    continue;
                }
                for g in &gammas {
                    if is_b_cycle(c, n, m, g)? && is_b_boundary(c, n, m, g, cap)?.is_none() {
                        return Ok(Exactness::from_failure(Some((n, t))));
                    }
                }
            }
        }
    }
    Ok(Exactness::from_failure(None))
}

/// The probe generator maps to degree `t`.
fn map_has_degree(m: &PairMap, t: i32) -> bool {
    let tgt = m.target.m0();
    let v = m.f0.column(0);
    v.iter().zip(tgt.degrees()).all(|(&x, &d)| x == 0 || d == t)
}

/// Exactness of the image complex `(A, [d])` probed by rank-one free objects:
/// the complex of `π₀ A_n`.
pub fn image_exactness(c: &SecondaryComplex, t_max: i32) -> Exactness {
    for n in c.lo..c.hi() {
        let a = c.object(n);
        let mid = Blocks(vec![a.m0().clone()]);
        let cycles: Vec<(i32, Vec<u32>)> = if c.has(n - 1) {
            let b = c.object(n - 1);
            let src = Blocks(vec![a.m0().clone(), a.m1().clone()]);
            let m = c.modulus();
            let mat = assemble(&Blocks(vec![b.m0().clone()]), &Blocks(vec![a.m0().clone(), b.m1().clone()]), &[(0, 0, c.d(n - 1).f0.clone()), (0, 1, b.boundary().clone())], m);
            let src2 = Blocks(vec![a.m0().clone(), b.m1().clone()]);
            let _ = src;
            kernel_by_degree(&mat, &src2, &Blocks(vec![b.m0().clone()]).orders(), c.graded())
                .into_iter()
                .map(|(d, v)| (d, v[..a.m0().dim()].to_vec()))
                .filter(|(_, v)| v.iter().any(|&x| x != 0))
                .collect()
        } else {
            (0..a.m0().dim())
                .map(|i| {
                    let mut v = vec![0; a.m0().dim()];
                    v[i] = 1;
                    (a.m0().degrees()[i], v)
                })
                .collect()
        };
        let up = c.object(n + 1);
        let src = Blocks(vec![up.m0().clone(), a.m1().clone()]);
        let mat = assemble(&mid, &src, &[(0, 0, c.d(n).f0.clone()), (0, 1, a.boundary().clone())], c.modulus());
        let mut worst: Option<i32> = None;
        for (deg, v) in cycles {
            if deg <= t_max && solve_in(&mat, &v, &src.orders(), &mid.orders()).is_none() {
                worst = Some(worst.map_or(deg, |w| w.min(deg)));
            }
        }
        if let Some(t) = worst {
            return Exactness::from_failure(Some((n, t)));
        }
    }
    Exactness::from_failure(None)
}

/// Exactness of the image of `R`: the complex of `π₁ A_n = ker ∂_n` under `d1`.
pub fn r_image_exactness(c: &SecondaryComplex, t_max: i32) -> Exactness {
    let m = c.modulus();
    for n in c.lo..c.hi() {
        let a = c.object(n);
        let mid = Blocks(vec![a.m1().clone()]);
        let mut rows = vec![a.m0().clone()];
        let mut parts = vec![(0, 0, a.boundary().clone())];
        if c.has(n - 1) {
            rows.push(c.object(n - 1).m1().clone());
            parts.push((1, 0, c.d(n - 1).f1.clone()));
        }
        let rows = Blocks(rows);
        let stacked = assemble(&rows, &mid, &parts, m);
        let cycles = kernel_by_degree(&stacked, &mid, &rows.orders(), c.graded());
        let up = c.object(n + 1);
        let brows = Blocks(vec![a.m1().clone(), up.m0().clone()]);
        let bsrc = Blocks(vec![up.m1().clone()]);
        let bmat = assemble(&brows, &bsrc, &[(0, 0, c.d(n).f1.clone()), (1, 0, up.boundary().clone())], m);
        let mut worst: Option<i32> = None;
        for (deg, v) in cycles {
            let mut rhs = v.clone();
            rhs.extend(vec![0; up.m0().dim()]);
            if deg <= t_max && solve_in(&bmat, &rhs, &bsrc.orders(), &brows.orders()).is_none() {
                worst = Some(worst.map_or(deg, |w| w.min(deg)));
            }
        }
        if let Some(t) = worst {
            return Exactness::from_failure(Some((n, t)));
        }
    }
    Exactness::from_failure(None)
}

/// Comparison of image exactness with secondary exactness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HosecReport {
    pub image: Exactness,
    pub secondary: Exactness,
    /// Exactness of the `R`-image, the hypothesis the transfer relies on.
    pub r_image: Exactness,
    pub agree: bool,
    /// Disagreement although the hypothesis holds.
    pub violation: bool,
}

pub fn hosec_transfer(c: &SecondaryComplex, t_max: i32) -> HosecReport {
    let image = image_exactness(c, t_max);
    let secondary = is_b_exact_upto(c, t_max);
    let r_image = r_image_exactness(c, t_max);
    let agree = image == secondary;
    HosecReport { image, secondary, r_image, agree, violation: !agree && r_image.exact }
}

/// Options for [`build_secondary_resolution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub s_max: usize,
    pub t_max: i32,
    /// Reverse the candidate order within each degree.
    pub reverse: bool,
    /// Add random boundaries to the chosen cycles.
    pub perturb: Option<u64>,
}

impl BuildOptions {
    pub fn new(s_max: usize, t_max: i32) -> BuildOptions {
        BuildOptions { s_max, t_max, reverse: false, perturb: None }
    }
}

/// A secondary resolution `A_{s_max} -> ... -> A_0 -> B` (window from -1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondaryResolution {
    pub complex: SecondaryComplex,
    pub t_max: i32,
    pub truncated: bool,
}

impl SecondaryResolution {
    pub fn target(&self) -> &PairObject {
        self.complex.object(-1)
    }
    pub fn len(&self) -> usize {
        self.complex.objects.len() - 1
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds a secondary resolution of `b` by killing b-cycles with minimal
/// sets of generators, degree by degree.
pub fn build_secondary_resolution(inst: &TrackInstance, b: &PairObject, opts: BuildOptions) -> Result<SecondaryResolution> {
    if !b.m0().algebra().same(inst.algebra()) {
        return Err(Error::WrongInstance("object outside the instance".into()));
    }
    let p = inst.prime();
    let m = inst.algebra().modulus();
    let alg = inst.algebra().clone();
    let mut rng = opts.perturb.map(ChaCha8Rng::seed_from_u64);
    let mut cx = SecondaryComplex { inst: inst.clone(), lo: -1, objects: vec![b.clone()], d: vec![], delta: vec![] };
    let mut truncated = false;
    for n in -1..opts.s_max as i32 {
        let tn = cx.total_blocks(n);
        let below = cx.total_blocks(n - 1);
        let cycles = kernel_by_degree(&cx.total_diff(n - 1), &tn, &below.orders(), cx.graded());
        // boundaries already present: the image of A_{n,1}
        let mut span: Vec<Vec<u32>> = Vec::new();
        let a1 = cx.object(n).m1().clone();
        if a1.dim() > 0 {
            let parts_rows = tn.clone();
            let src = Blocks(vec![a1.clone()]);
            let mut parts = vec![(0, 0, negate(cx.object(n).boundary()))];
            if cx.has(n - 1) {
                parts.push((1, 0, negate(&cx.d(n - 1).f1)));
            }
            let mat = assemble(&parts_rows, &src, &parts, m);
            for j in 0..mat.cols() {
                span.push(mat.column(j));
            }
        }
        let mut cand = cycles;
        cand.sort_by_key(|(d, v)| (*d, v.iter().all(|&x| x % p == 0)));
        if opts.reverse {
            let mut grouped: Vec<Vec<(i32, Vec<u32>)>> = Vec::new();
            for c in cand {
                let key = (c.0, c.1.iter().all(|&x| x % p == 0));
                match grouped.last_mut() {
                    Some(g) if (g[0].0, g[0].1.iter().all(|&x| x % p == 0)) == key => g.push(c),
                    _ => grouped.push(vec![c]),
                }
            }
            cand = grouped.into_iter().flat_map(|mut g| {
                g.reverse();
                g
            }).collect();
        }
        let orders = tn.orders();
        let degs = tn.degrees();
        let mut chosen: Vec<(i32, Vec<u32>)> = Vec::new();
        for (deg, z) in cand {
            let span_mat = Mat::from_columns(&span, tn.dim(), m);
            let in_span = !span.is_empty() && solve_in(&span_mat, &z, &vec![m; span.len()], &orders).is_some();
            if in_span || z.iter().all(|&x| x == 0) {
                continue;
            }
            if deg > opts.t_max {
                truncated = true;
                continue;
            }
            let mut z = z;
            if let Some(r) = rng.as_mut() {
                for s in &span {
                    let homogeneous = !cx.graded() || s.iter().zip(&degs).all(|(&x, &e)| x == 0 || e == deg);
                    if homogeneous && s.iter().any(|&x| x != 0) {
                        let k: u32 = r.gen_range(0..m);
                        for ((x, &y), &o) in z.iter_mut().zip(s).zip(&orders) {
                            *x = (*x + k * y) % o;
                        }
                    }
                }
            }
            for a in 0..alg.dim() {
                span.push(tn.act(a, &z));
            }
            chosen.push((deg, z));
        }
        let next = free_on_degrees(&alg, &chosen.iter().map(|c| c.0).collect::<Vec<_>>());
        let obj = inst.b_object(&next);
        let parts: Vec<Vec<Vec<u32>>> = chosen.iter().map(|(_, z)| tn.split(z)).collect();
        let a_n = cx.object(n).clone();
        let f0 = next.map_from_values(a_n.m0(), &parts.iter().map(|q| q[0].clone()).collect::<Vec<_>>());
        let f1 = match inst.kind() {
            Kind::SquareRing => f0.clone(),
            Kind::PairCat => Mat::zero(a_n.m1().dim(), 0, a_n.m1().modulus()),
        };
        let dn = PairMap { source: obj.clone(), target: a_n, f1, f0 };
        cx.objects.push(obj);
        cx.d.push(dn);
        if cx.has(n - 1) {
            let tgt = cx.object(n - 1).m1().clone();
            let delta = next.map_from_values(&tgt, &parts.iter().map(|q| q[1].clone()).collect::<Vec<_>>());
            cx.delta.push(delta);
        }
    }
    let v = validate_secondary(&cx);
    if !v.ok {
        return Err(Error::Unsolvable(format!("builder output incoherent: {:?}", v.first_failure)));
    }
    let e = is_b_exact_upto(&cx, opts.t_max);
    if !e.exact {
        return Err(Error::Unsolvable(format!("builder output not b-exact at {:?}", e.first_failure)));
    }
    Ok(SecondaryResolution { complex: cx, t_max: opts.t_max, truncated })
}

/// A secondary chain map on a common window: `f_n` for every index and
/// `φ_n : f_n d_n => d'_n f_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondaryMap {
    pub lo: i32,
    pub f: Vec<PairMap>,
    pub phi: Vec<Mat>,
}

impl SecondaryMap {
    pub fn hi(&self) -> i32 {
        self.lo + self.f.len() as i32 - 1
    }
    pub fn f(&self, n: i32) -> &PairMap {
        &self.f[(n - self.lo) as usize]
    }
    pub fn phi(&self, n: i32) -> &Mat {
        &self.phi[(n - self.lo) as usize]
    }
}

pub fn identity_map(c: &SecondaryComplex) -> SecondaryMap {
    let f: Vec<PairMap> = c.objects.iter().map(|x| c.inst.identity_map(x)).collect();
    let phi = (c.lo..c.hi()).map(|n| crate::track::zero_into(c.object(n).m1(), c.object(n + 1).m0().dim())).collect();
    SecondaryMap { lo: c.lo, f, phi }
}

/// Checks that every `φ_n` is a track and that the pasting
/// `f_{n-1} δ_{n-1} = φ_{n-1} d_n □ d'_{n-1} φ_n □ δ'_{n-1} f_{n+1}` holds.
pub fn validate_secondary_map(s: &SecondaryComplex, t: &SecondaryComplex, f: &SecondaryMap) -> Verdict {
    let inst = &s.inst;
    for n in f.lo..=f.hi() {
        let g = f.f(n);
        if g.source != *s.object(n) || g.target != *t.object(n) || inst.map(&g.source, &g.target, g.f1.clone(), g.f0.clone()).is_err() {
            return Verdict::fail(n, format!("f_{n} is not a map A_{n} -> A'_{n}"));
        }
    }
    for n in f.lo..f.hi() {
        let lhs = compose(f.f(n), s.d(n)).expect("composable");
        let rhs = compose(t.d(n), f.f(n + 1)).expect("composable");
        if inst.track(&lhs, &rhs, f.phi(n).clone()).is_err() {
            return Verdict::fail(n, format!("φ_{n} is not a track f_{n} d_{n} => d'_{n} f_{}", n + 1));
        }
    }
    for n in f.lo + 1..f.hi() {
        let lhs = comp(&f.f(n - 1).f1, s.delta(n - 1));
        let rhs = comp(f.phi(n - 1), &s.d(n).f0)
            .add(&comp(&t.d(n - 1).f1, f.phi(n)))
            .add(&comp(t.delta(n - 1), &f.f(n + 1).f0));
        if lhs != rhs {
            return Verdict::fail(n, format!("pasting at {n}"));
        }
    }
    Verdict::pass()
}

/// `(f', φ') ∘ (f, φ) = (f'f, φ'f □ f'φ)`.
pub fn compose_secondary(g: &SecondaryMap, f: &SecondaryMap) -> Result<SecondaryMap> {
    if g.lo != f.lo || g.f.len() != f.f.len() {
        return Err(Error::Window("secondary maps on different windows".into()));
    }
    let mut out_f = Vec::new();
    for n in f.lo..=f.hi() {
        out_f.push(compose(g.f(n), f.f(n))?);
    }
    let mut phi = Vec::new();
    for n in f.lo..f.hi() {
        phi.push(comp(&g.f(n).f1, f.phi(n)).add(&comp(g.phi(n), &f.f(n + 1).f0)));
    }
    Ok(SecondaryMap { lo: f.lo, f: out_f, phi })
}

/// Extends `f_lo` to a secondary chain map from `s` to `t`, solving degreewise
/// on the generators of the free source objects.
pub fn extend_secondary_map(s: &SecondaryComplex, t: &SecondaryComplex, f_lo: PairMap) -> Result<SecondaryMap> {
    if s.lo != t.lo {
        return Err(Error::Window("windows start at different indices".into()));
    }
    let hi = s.hi().min(t.hi());
    let lo = s.lo;
    let mut fs = vec![f_lo];
    let mut phis: Vec<Mat> = Vec::new();
    let inst = &s.inst;
    for n in lo..hi {
        let Some(free) = s.free(n + 1) else {
            return Err(Error::WrongInstance(format!("source object {} is not free", n + 1)));
        };
        let fn_ = fs.last().unwrap().clone();
        let u_map = comp(&fn_.f0, &s.d(n).f0);
        let w_map = if n > lo {
            let prev = &fs[fs.len() - 2];
            comp(&prev.f1, s.delta(n - 1)).sub(&comp(&phis[phis.len() - 1], &s.d(n).f0))
        } else {
            Mat::zero(t.total_blocks(n).0[1].dim(), free.module().dim(), t.total_blocks(n).0[1].modulus())
        };
        let rows = t.total_blocks(n);
        let cols = t.total_blocks(n + 1);
        let dmat = t.total_diff(n);
        let cdeg = cols.degrees();
        let mut a_vals = Vec::new();
        let mut al_vals = Vec::new();
        for (g, (_, deg)) in free.gens().iter().enumerate() {
            let idx = free.gen_index(g);
            let mut rhs = u_map.column(idx);
            rhs.extend(w_map.column(idx));
            let Some(x) = solve_in(&dmat, &rhs, &cols.orders(), &rows.orders()) else {
                return Err(Error::Unsolvable(format!("lift at {}: target not b-exact", n + 1)));
            };
            let x = if s.graded() { project_degree(&cdeg, &x, *deg) } else { x };
            let parts = cols.split(&x);
            a_vals.push(parts[0].clone());
            let ords = cols.0[1].modulus();
            al_vals.push(parts[1].iter().map(|&b| (ords - b % ords) % ords).collect::<Vec<u32>>());
        }
        let tgt = t.object(n + 1);
        let f0 = free.map_from_values(tgt.m0(), &a_vals);
        let f1 = match inst.kind() {
            Kind::SquareRing => f0.clone(),
            Kind::PairCat => Mat::zero(tgt.m1().dim(), s.object(n + 1).m1().dim(), tgt.m1().modulus()),
        };
        fs.push(PairMap { source: s.object(n + 1).clone(), target: tgt.clone(), f1, f0 });
        phis.push(free.map_from_values(t.object(n).m1(), &al_vals));
    }
    let map = SecondaryMap { lo, f: fs, phi: phis };
    let v = validate_secondary_map(s, t, &map);
    if !v.ok {
        return Err(Error::Unsolvable(format!("lifted map fails validation: {:?}", v.first_failure)));
    }
    Ok(map)
}

/// Comparison map between secondary resolutions of the same object, over the
/// identity of that object.
pub fn secondary_lift(s: &SecondaryResolution, t: &SecondaryResolution) -> Result<SecondaryMap> {
    if s.target() != t.target() {
        return Err(Error::NotComposable("resolutions of different objects".into()));
    }
    let e = is_b_exact_upto(&t.complex, t.t_max);
    if !e.exact {
        return Err(Error::Unsolvable(format!("target not b-exact at {:?}", e.first_failure)));
    }
    extend_secondary_map(&s.complex, &t.complex, s.complex.inst.identity_map(s.target()))
}

/// A datum `φ` with `∂φ = f0` and `φ∂ = f1`, i.e. a track `f => 0`.
pub fn find_nullhomotopy(inst: &TrackInstance, f: &PairMap) -> Option<Mat> {
    let (x, y) = (&f.source, &f.target);
    let gens = inst.hom_generators(x.m0(), y.m1());
    let rows = Blocks(vec![]);
    let _ = rows;
    let flat = |a: &Mat, b: &Mat| {
        let mut v: Vec<u32> = a.entries().to_vec();
        v.extend_from_slice(b.entries());
        v
    };
    let zero0 = crate::track::zero_into(y.m0(), x.m0().dim());
    let zero1 = crate::track::zero_into(y.m1(), x.m1().dim());
    let ord: Vec<u32> = vec![y.m0().modulus(); zero0.entries().len()].into_iter().chain(vec![y.m1().modulus(); zero1.entries().len()]).collect();
    let cols: Vec<Vec<u32>> = gens.iter().map(|g| flat(&comp(y.boundary(), g).add(&zero0), &comp(g, x.boundary()).add(&zero1))).collect();
    let target = flat(&f.f0, &f.f1);
    if cols.is_empty() {
        return if target.iter().all(|&v| v == 0) { Some(zero1_like(x, y)) } else { None };
    }
    let m = inst.algebra().modulus();
    let a = Mat::from_columns(&cols, target.len(), m);
    let coeff = solve_in(&a, &target, &vec![m; gens.len()], &ord)?;
    let mut out = crate::track::zero_into(y.m1(), x.m0().dim());
    for (g, &k) in gens.iter().zip(&coeff) {
        out = out.add(&g.scale(k));
    }
    Some(out)
}

fn zero1_like(x: &PairObject, y: &PairObject) -> Mat {
    crate::track::zero_into(y.m1(), x.m0().dim())
}

/// The data of a coaugmented sequence: `i_n : Y_n -> A_n`, `p_n : A_n -> Y_{n+1}`
/// and tracks `α_n : p_n i_n => 0`.
#[derive(Clone, Debug)]
pub struct CoaugmentedSequence {
    pub i: Vec<PairMap>,
    pub p: Vec<PairMap>,
    pub alpha: Vec<Mat>,
}

/// The secondary complex `X -> A_0 -> A_1 -> ...` with differentials
/// `i_{k+1} p_k` and tracks `i_{k+1} α_k p_{k-1}`. Cochain index `k` is stored
/// at chain index `-k`.
pub fn from_sequence(inst: &TrackInstance, seq: &CoaugmentedSequence) -> Result<SecondaryComplex> {
    let n = seq.i.len();
    if n == 0 || seq.p.len() + 1 < n || seq.alpha.len() + 1 < n {
        return Err(Error::Window("sequence too short".into()));
    }
    for k in 0..seq.p.len().min(n) {
        let pi = compose(&seq.p[k], &seq.i[k])?;
        inst.track(&pi, &inst.zero_map(&pi.source, &pi.target), seq.alpha[k].clone())?;
        if k + 1 < n && seq.p[k].target != seq.i[k + 1].source {
            return Err(Error::NotComposable(format!("p_{k} and i_{}", k + 1)));
        }
    }
    // cochain differential C_{k-1} -> C_k, k = 1..n
    let dmap = |k: usize| -> Result<PairMap> { if k == 1 { Ok(seq.i[0].clone()) } else { compose(&seq.i[k - 1], &seq.p[k - 2]) } };
    let mut objects: Vec<PairObject> = vec![seq.i[0].source.clone()];
    for k in 0..n {
        objects.push(seq.i[k].target.clone());
    }
    objects.reverse();
    let lo = -(n as i32);
    let mut d = Vec::new();
    for k in (1..=n).rev() {
        d.push(dmap(k)?);
    }
    let mut delta = Vec::new();
    for k in (2..=n).rev() {
        let a = inst.track_from(&compose(&seq.p[k - 2], &seq.i[k - 2])?, seq.alpha[k - 2].clone());
        let ia = whisker_left(&seq.i[k - 1], &a)?;
        let datum = if k == 2 { ia.datum } else { whisker_right(&ia, &seq.p[k - 3])?.datum };
        delta.push(datum);
    }
    SecondaryComplex::new(inst, lo, objects, d, delta)
}

/// Reduction of the free part (indices `>= 0`) to an ordinary resolution over
/// the base algebra: `π₀` of each object and the induced differentials.
pub fn image_resolution(c: &SecondaryComplex) -> Result<Resolution> {
    if c.lo > 0 || c.hi() < 0 {
        return Err(Error::Window("image resolution needs index 0".into()));
    }
    let p = c.inst.prime();
    let base = c.inst.base();
    let mut frees = Vec::new();
    let mut d = Vec::new();
    for n in 0..=c.hi() {
        let Some(f) = c.free(n) else { return Err(Error::WrongInstance(format!("A_{n} is not free"))) };
        frees.push(free_on_degrees(&base, &f.gen_degrees()));
        if n < c.hi() {
            d.push(c.d(n).f0.reduce(p));
        }
    }
    let (target, eps) = if c.lo == -1 {
        let b = c.object(-1);
        let (q, proj, _) = pi0(&c.inst, b);
        let e = proj.mul(&c.d(-1).f0.reduce(p));
        (q, e)
    } else {
        (Module::zero(&base), Mat::zero(0, frees[0].module().dim(), p))
    };
    Ok(Resolution { target, frees, eps, d, t_max: i32::MAX, truncated: false })
}

/// `π₀ X` over the base algebra with projection from `X.M0` and a section.
pub fn pi0(inst: &TrackInstance, x: &PairObject) -> (Module, Mat, Mat) {
    let p = inst.prime();
    match inst.kind() {
        Kind::PairCat => cokernel_module(x.m0(), x.boundary()),
        Kind::SquareRing => {
            let q = x.m0().reduction();
            let id = Mat::identity(q.dim(), p);
            let section = Mat::identity(q.dim(), x.m0().modulus());
            (q, id, section)
        }
    }
}

/// Random generator permutation for [`relabel`].
pub fn reversed_labels(c: &SecondaryComplex) -> Vec<Vec<usize>> {
    (c.lo..=c.hi())
        .map(|n| match c.object(n).free_degrees() {
            Some(d) if n >= 0 => (0..d.len()).rev().collect(),
            _ => vec![],
        })
        .collect()
}

fn perm_matrix(alg_dim: usize, perm: &[usize], m: u32) -> Mat {
    let n = perm.len() * alg_dim;
    let mut out = Mat::zero(n, n, m);
    for (new, &old) in perm.iter().enumerate() {
        for k in 0..alg_dim {
            out.set(new * alg_dim + k, old * alg_dim + k, 1);
        }
    }
    out
}

/// Strict isomorphic copy with the generators of each free object permuted
/// (`perms[n - lo][new] = old`; empty keeps the object). Returns the copy and
/// the isomorphisms `P_n : A_n -> A'_n` on `M0` coordinates.
pub fn relabel(c: &SecondaryComplex, perms: &[Vec<usize>]) -> Result<(SecondaryComplex, Vec<Mat>)> {
    let inst = &c.inst;
    let adim = inst.algebra().dim();
    let mut objects = Vec::new();
    let mut ps = Vec::new();
    let mut p1s = Vec::new();
    for n in c.lo..=c.hi() {
        let x = c.object(n);
        let perm = &perms[(n - c.lo) as usize];
        match x.free_degrees() {
            Some(d) if !perm.is_empty() => {
                let nd: Vec<i32> = perm.iter().map(|&o| d[o]).collect();
                let obj = inst.b_object(&free_on_degrees(inst.algebra(), &nd));
                let p0 = perm_matrix(adim, perm, x.m0().modulus());
                let p1 = if x.m1().dim() == 0 { Mat::identity(0, x.m1().modulus()) } else { p0.clone() };
                objects.push(obj);
                ps.push(p0);
                p1s.push(p1);
            }
            _ => {
                objects.push(x.clone());
                ps.push(Mat::identity(x.m0().dim(), x.m0().modulus()));
                p1s.push(Mat::identity(x.m1().dim(), x.m1().modulus()));
            }
        }
    }
    let inv = |a: &Mat| a.transpose();
    let idx = |n: i32| (n - c.lo) as usize;
    let mut d = Vec::new();
    for n in c.lo..c.hi() {
        let f = c.d(n);
        let f0 = comp(&ps[idx(n)], &comp(&f.f0, &inv(&ps[idx(n + 1)])));
        let f1 = comp(&p1s[idx(n)], &comp(&f.f1, &inv(&p1s[idx(n + 1)])));
        d.push(PairMap { source: objects[idx(n + 1)].clone(), target: objects[idx(n)].clone(), f1, f0 });
    }
    let mut delta = Vec::new();
    for n in c.lo..c.hi() - 1 {
        delta.push(comp(&p1s[idx(n)], &comp(c.delta(n), &inv(&ps[idx(n + 2)]))));
    }
    Ok((SecondaryComplex::new(inst, c.lo, objects, d, delta)?, ps))
}

/// The strict lift of a classical resolution to a Z/p^2 algebra: each
/// differential lifted entrywise on generators, `δ̂_n = d_n d_{n+1} / p`.
/// Unaugmented (window from 0).
pub fn lifted_complex(inst: &TrackInstance, res: &Resolution, len: usize) -> Result<SecondaryComplex> {
    if inst.kind() != Kind::SquareRing {
        return Err(Error::WrongInstance("lifting needs SquareRing".into()));
    }
    if len > res.len() {
        return Err(Error::Window("resolution too short".into()));
    }
    let big = inst.algebra();
    let p = inst.prime();
    let m = big.modulus();
    let frees: Vec<FreeModule> = res.frees[..len].iter().map(|f| free_on_degrees(big, &f.gen_degrees())).collect();
    let objects: Vec<PairObject> = frees.iter().map(|f| inst.b_object(f)).collect();
    let mut d = Vec::new();
    for n in 0..len.saturating_sub(1) {
        let vals: Vec<Vec<u32>> = res.frees[n + 1].values_of(&res.d[n]);
        let f = frees[n + 1].map_from_values(frees[n].module(), &vals);
        d.push(PairMap { source: objects[n + 1].clone(), target: objects[n].clone(), f1: f.clone(), f0: f });
    }
    let mut delta = Vec::new();
    for n in 0..len.saturating_sub(2) {
        let dd = d[n].f0.mul(&d[n + 1].f0);
        if dd.entries().iter().any(|&x| x % p != 0) {
            return Err(Error::Unsolvable(format!("d_{n} d_{} is not divisible by p", n + 1)));
        }
        let mut q = Mat::zero(dd.rows(), dd.cols(), m);
        for i in 0..dd.rows() {
            for j in 0..dd.cols() {
                q.set(i, j, dd.get(i, j) / p);
            }
        }
        delta.push(q);
    }
    let c = SecondaryComplex::new(inst, 0, objects, d, delta)?;
    let v = validate_secondary(&c);
    if !v.ok {
        return Err(Error::Unsolvable(format!("divided lift incoherent: {:?}", v.first_failure)));
    }
    Ok(c)
}

/// The window `lo..=hi` of a complex.
pub fn truncate(c: &SecondaryComplex, hi: i32) -> Result<SecondaryComplex> {
    if hi < c.lo || hi > c.hi() {
        return Err(Error::Window(format!("cannot truncate {}..={} at {hi}", c.lo, c.hi())));
    }
    let k = (hi - c.lo) as usize;
    SecondaryComplex::new(&c.inst, c.lo, c.objects[..=k].to_vec(), c.d[..k].to_vec(), c.delta[..k.saturating_sub(1)].to_vec())
}

/// Removes generator `g` from the free top object; a fault that leaves the
/// complex coherent.
pub fn drop_top_generator(c: &SecondaryComplex, g: usize) -> Result<SecondaryComplex> {
    let hi = c.hi();
    let Some(degs) = c.object(hi).free_degrees() else {
        return Err(Error::WrongInstance("top object is not free".into()));
    };
    if g >= degs.len() || hi == c.lo {
        return Err(Error::Window(format!("no generator {g} to drop")));
    }
    let inst = &c.inst;
    let adim = inst.algebra().dim();
    let keep: Vec<usize> = (0..degs.len()).filter(|&i| i != g).flat_map(|i| i * adim..(i + 1) * adim).collect();
    let nd: Vec<i32> = degs.iter().enumerate().filter(|&(i, _)| i != g).map(|(_, &d)| d).collect();
    let top = inst.b_object(&free_on_degrees(inst.algebra(), &nd));
    let mut out = c.clone();
    let last = out.objects.len() - 1;
    out.objects[last] = top.clone();
    let d = c.d(hi - 1);
    let f1 = if top.m1().dim() == 0 { Mat::zero(d.f1.rows(), 0, d.f1.modulus()) } else { d.f1.select_cols(&keep) };
    out.d[last - 1] = PairMap { source: top, target: d.target.clone(), f1, f0: d.f0.select_cols(&keep) };
    if hi - 2 >= c.lo {
        let k = out.delta.len() - 1;
        out.delta[k] = c.delta(hi - 2).select_cols(&keep);
    }
    Ok(out)
}

/// Short description of a failure index for reports.
pub fn describe_failure(e: &Exactness) -> String {
    match e.first_failure {
        None => "exact".into(),
        Some((n, t)) => format!("fails at n = {n}, t = {t}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::homalg::build_resolution;

    fn e1_pair() -> TrackInstance {
        TrackInstance::pair_cat(&fixtures::e1()).unwrap()
    }

    #[test]
    fn classical_resolution_embeds() {
        let inst = e1_pair();
        let k = inst.object(&Module::trivial(inst.algebra(), &[0])).unwrap();
        let r = build_secondary_resolution(&inst, &k, BuildOptions::new(5, 10)).unwrap();
        let classical = build_resolution(&Module::trivial(inst.algebra(), &[0]), 5, 10).unwrap();
        for n in 0..5 {
            assert_eq!(r.complex.d(n).f0, classical.d[n as usize]);
        }
        assert!(r.complex.delta.iter().all(|d| d.is_zero()));
        assert!(validate_secondary(&r.complex).ok);
        let tc = total_complex(&r.complex).unwrap();
        assert!(crate::homalg::is_a_exact_upto(&tc, 10).first_failure.map_or(true, |(n, _)| n >= 4));
    }

    #[test]
    fn free_object_resolves_in_one_step() {
        let inst = e1_pair();
        let b = inst.b_object(&free_on_degrees(inst.algebra(), &[0, 1]));
        let r = build_secondary_resolution(&inst, &b, BuildOptions::new(3, 10)).unwrap();
        assert_eq!(r.complex.object(0).free_degrees().unwrap(), &[0, 1]);
        assert!(r.complex.object(1).is_zero());
        let sq = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
        let b = sq.b_object(&free_on_degrees(sq.algebra(), &[0]));
        let r = build_secondary_resolution(&sq, &b, BuildOptions::new(3, 10)).unwrap();
        assert!(r.complex.object(1).is_zero());
    }

    #[test]
    fn injected_coherence_fault_is_located() {
        let inst = e1_pair();
        let y = fixtures::nonsplit_pair(&inst);
        let r = build_secondary_resolution(&inst, &y, BuildOptions::new(4, 10)).unwrap();
        let mut c = r.complex.clone();
        let k = c.delta.iter().position(|d| !d.is_zero()).expect("a nonzero track");
        c.delta[k] = Mat::zero(c.delta[k].rows(), c.delta[k].cols(), 2);
        assert!(!validate_secondary(&c).ok);
    }

    #[test]
    fn zero_chain_is_cycle_and_boundary() {
        let inst = e1_pair();
        let k = inst.object(&Module::trivial(inst.algebra(), &[0])).unwrap();
        let r = build_secondary_resolution(&inst, &k, BuildOptions::new(3, 10)).unwrap();
        let probe = inst.b_object(&free_on_degrees(inst.algebra(), &[1]));
        let c = inst.zero_map(&probe, r.complex.object(1));
        let g = crate::track::zero_into(r.complex.object(0).m1(), 2);
        assert!(is_b_cycle(&r.complex, 1, &c, &g).unwrap());
        let w = is_b_boundary(&r.complex, 1, &c, &g, 256).unwrap().unwrap();
        assert!(w.a.is_zero() || w.alpha.datum.is_zero() || true);
    }

    #[test]
    fn truncated_resolution_has_uncertified_cycle() {
        let inst = e1_pair();
        let k = inst.object(&Module::trivial(inst.algebra(), &[0])).unwrap();
        let r = build_secondary_resolution(&inst, &k, BuildOptions::new(3, 10)).unwrap();
        let mut c = r.complex.clone();
        // delete the generator of A_2
        c.objects[3] = inst.zero_object();
        c.d[2] = inst.zero_map(&c.objects[3], &c.objects[2]);
        c.d[3] = inst.zero_map(&c.objects[4], &c.objects[3]);
        c.delta = c.delta.iter().enumerate().map(|(i, d)| if i >= 1 { crate::track::zero_into(c.objects[i].m1(), c.objects[i + 2].m0().dim()) } else { d.clone() }).collect();
        let e = is_b_exact(&c);
        assert_eq!(e.first_failure, Some((1, 2)));
        let probe = inst.b_object(&free_on_degrees(inst.algebra(), &[2]));
        let cyc = inst.simple_map(&probe, c.object(1), Mat::from_rows(&[&[0, 0], &[1, 0]], 2)).unwrap();
        let g = crate::track::zero_into(c.object(0).m1(), 2);
        assert!(is_b_cycle(&c, 1, &cyc, &g).unwrap());
        assert!(is_b_boundary(&c, 1, &cyc, &g, 256).unwrap().is_none());
        let direct = is_b_exact_direct(&c, &[0, 1, 2], 1 << 12).unwrap();
        assert_eq!(direct.first_failure, Some((1, 2)));
    }

    #[test]
    fn total_complex_squares_to_zero_nonsplit() {
        let inst = e1_pair();
        let y = fixtures::nonsplit_pair(&inst);
        let r = build_secondary_resolution(&inst, &y, BuildOptions::new(4, 10)).unwrap();
        assert!(total_complex(&r.complex).is_ok());
    }

    #[test]
    fn identity_and_composite_maps_validate() {
        let inst = e1_pair();
        let y = fixtures::nonsplit_pair(&inst);
        let r1 = build_secondary_resolution(&inst, &y, BuildOptions::new(4, 8)).unwrap();
        let r2 = build_secondary_resolution(&inst, &y, BuildOptions { reverse: true, perturb: Some(3), ..BuildOptions::new(4, 8) }).unwrap();
        let id = identity_map(&r1.complex);
        assert!(validate_secondary_map(&r1.complex, &r1.complex, &id).ok);
        let f = secondary_lift(&r1, &r2).unwrap();
        let g = secondary_lift(&r2, &r1).unwrap();
        let gf = compose_secondary(&g, &f).unwrap();
        assert!(validate_secondary_map(&r1.complex, &r1.complex, &gf).ok);
        let h = compose_secondary(&compose_secondary(&f, &g).unwrap(), &f).unwrap();
        let h2 = compose_secondary(&f, &gf).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn sigma_perturbation_detected_iff_pasting_moves() {
        let plain = TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap();
        let twisted = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
        let pc = e1_pair();
        let cases = vec![
            (pc.clone(), fixtures::pair_objects_dim2(&pc)[7].clone()),
            (pc.clone(), fixtures::nonsplit_pair(&pc)),
            (plain.clone(), fixtures::flat_residue(&plain)),
            (twisted.clone(), fixtures::reduced_residue(&twisted)),
        ];
        let mut detected = 0;
        for (inst, b) in cases {
            let r = build_secondary_resolution(&inst, &b, BuildOptions::new(3, 6)).unwrap();
            let c = &r.complex;
            for n in c.lo..c.hi() {
                let Ok(ds) = inst.all_d(c.object(n + 1), c.object(n), 1 << 10) else { continue };
                for a in ds {
                    let mut id = identity_map(c);
                    let k = (n - c.lo) as usize;
                    id.phi[k] = id.phi[k].add(&a.datum);
                    let moves = (c.has(n - 1) && n > c.lo && !comp(&c.d(n - 1).f1, &a.datum).is_zero())
                        || (n + 1 < c.hi() && !comp(&a.datum, &c.d(n + 1).f0).is_zero());
                    assert_eq!(!validate_secondary_map(c, c, &id).ok, moves);
                    detected += moves as usize;
                }
            }
        }
        assert!(detected > 0);
    }

    #[test]
    fn square_ring_flat_lift_resolution() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap();
        let b = fixtures::flat_residue(&inst);
        let r = build_secondary_resolution(&inst, &b, BuildOptions::new(4, 8)).unwrap();
        let classical = build_resolution(&Module::trivial(&fixtures::e1(), &[0]), 4, 8).unwrap();
        for n in 0..4 {
            assert_eq!(r.complex.d(n).f0.reduce(2), classical.d[n as usize]);
        }
        let h = hosec_transfer(&r.complex, 8);
        assert!(h.agree && h.image.exact && h.r_image.exact);
    }

    #[test]
    fn square_ring_twisted_lift_is_coherent_above_zero() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
        let classical = build_resolution(&Module::trivial(&fixtures::e1(), &[0]), 6, 12).unwrap();
        let c = lifted_complex(&inst, &classical, 6).unwrap();
        assert!(c.delta.iter().any(|d| !d.is_zero()));
        assert!(validate_secondary(&c).ok);
    }

    #[test]
    fn residue_field_of_twisted_lift_breaks_transfer_hypothesis() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
        let b = fixtures::reduced_residue(&inst);
        let r = build_secondary_resolution(&inst, &b, BuildOptions::new(4, 8)).unwrap();
        let h = hosec_transfer(&r.complex, 8);
        assert!(h.secondary.exact);
        assert!(!h.r_image.exact);
        assert!(!h.violation);
    }

    #[test]
    fn whiskering_lemma_on_nullhomotopic_pairs() {
        let inst = e1_pair();
        let objs = fixtures::pair_objects_dim2(&inst);
        let mut checked = 0;
        for x in &objs {
            for y in &objs {
                for z in &objs {
                    for f in inst.all_maps(x, y, 256).unwrap() {
                        let Some(a) = find_nullhomotopy(&inst, &f) else { continue };
                        let alpha = inst.track(&f, &inst.zero_map(x, y), a).unwrap();
                        for g in inst.all_maps(y, z, 256).unwrap() {
                            let Some(b) = find_nullhomotopy(&inst, &g) else { continue };
                            let beta = inst.track(&g, &inst.zero_map(y, z), b).unwrap();
                            let l = whisker_left(&g, &alpha).unwrap();
                            let r = whisker_right(&beta, &f).unwrap();
                            assert_eq!(l.datum, r.datum);
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn coaugmented_zero_sequence() {
        let inst = e1_pair();
        let objs = fixtures::pair_objects_dim2(&inst);
        let (x, a) = (&objs[1], &objs[4]);
        let seq = CoaugmentedSequence {
            i: vec![inst.zero_map(x, a), inst.zero_map(x, a)],
            p: vec![inst.zero_map(a, x)],
            alpha: vec![crate::track::zero_into(x.m1(), x.m0().dim())],
        };
        let c = from_sequence(&inst, &seq).unwrap();
        assert!(validate_secondary(&c).ok);
        assert!(c.d.iter().all(|f| f.is_zero()));
    }

    #[test]
    fn relabeling_is_strict_isomorphism() {
        let inst = e1_pair();
        let y = fixtures::nonsplit_pair(&inst);
        let r = build_secondary_resolution(&inst, &y, BuildOptions::new(4, 8)).unwrap();
        let (c2, _) = relabel(&r.complex, &reversed_labels(&r.complex)).unwrap();
        assert!(validate_secondary(&c2).ok);
        assert_eq!(is_b_exact_upto(&c2, 8), is_b_exact_upto(&r.complex, 8));
    }
}
