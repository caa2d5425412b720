//! Classical homological algebra: chain complexes, exactness probed by the
//! rank-one free module, minimal resolutions, comparison lifts with their
//! homotopies, Ext and the Yoneda product.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactla::{kernel_image, kernel_in, solve_in, Mat, Span};
use crate::gralg::{free_on_degrees, is_linear, FreeModule, Module, ModuleMap};
use crate::{Error, Result};

pub(crate) fn orders(m: &Module) -> Vec<u32> {
    vec![m.modulus(); m.dim()]
}

/// Finite window `A_lo, ..., A_hi` with `d_n : A_{n+1} -> A_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub lo: i32,
    pub objects: Vec<Module>,
    /// `diffs[k]` is `d_{lo+k}`.
    pub diffs: Vec<Mat>,
}

impl ChainComplex {
    pub fn new(lo: i32, objects: Vec<Module>, diffs: Vec<Mat>) -> Result<ChainComplex> {
        if objects.is_empty() || diffs.len() + 1 != objects.len() {
            return Err(Error::Window("need one differential between consecutive objects".into()));
        }
        for (k, d) in diffs.iter().enumerate() {
            let (src, tgt) = (&objects[k + 1], &objects[k]);
            if d.rows() != tgt.dim() || d.cols() != src.dim() {
                return Err(Error::Dimension { expected: tgt.dim() * src.dim(), found: d.rows() * d.cols() });
            }
            if !is_linear(src, tgt, d) {
                return Err(Error::NotLinear(format!("d_{}", lo + k as i32)));
            }
        }
        let c = ChainComplex { lo, objects, diffs };
        for k in 1..c.diffs.len() {
            let dd = c.diffs[k - 1].mul(&c.diffs[k]);
            if !dd.is_zero() {
                return Err(Error::NotLinear(format!("d_{} d_{} != 0", lo + k as i32 - 1, lo + k as i32)));
            }
        }
        Ok(c)
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.objects.len() as i32 - 1
    }

    pub fn object(&self, n: i32) -> &Module {
        &self.objects[(n - self.lo) as usize]
    }

    /// `d_n : A_{n+1} -> A_n`.
    pub fn diff(&self, n: i32) -> &Mat {
        &self.diffs[(n - self.lo) as usize]
    }
}

/// Verdict of an exactness check with the first failure `(index, internal degree)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exactness {
    pub exact: bool,
    pub first_failure: Option<(i32, i32)>,
}

impl Exactness {
    pub fn from_failure(f: Option<(i32, i32)>) -> Exactness {
        Exactness { exact: f.is_none(), first_failure: f }
    }
}

/// Exactness at `A_n`: every element of `ker d_{n-1}` lies in `im d_n`.
/// At the bottom of the window the outgoing map is zero. Returns the lowest
/// internal degree of a witness that is not a boundary.
pub fn exact_at(c: &ChainComplex, n: i32) -> Result<Option<i32>> {
    if n < c.lo || n >= c.hi() {
        return Err(Error::Window(format!("cannot decide exactness at {n} in window [{}, {}]", c.lo, c.hi())));
    }
    let a = c.object(n);
    let ords = orders(a);
    let kernel = if n == c.lo {
        (0..a.dim())
            .map(|i| {
                let mut v = vec![0; a.dim()];
                v[i] = 1;
                v
            })
            .collect()
    } else {
        kernel_in(c.diff(n - 1), &ords, &orders(c.object(n - 1)))
    };
    let d = c.diff(n);
    let src = orders(c.object(n + 1));
    let mut worst: Option<i32> = None;
    for v in kernel {
        if solve_in(d, &v, &src, &ords).is_none() {
            let deg = a.leading_degree(&v).unwrap_or(0);
            worst = Some(worst.map_or(deg, |w| w.min(deg)));
        }
    }
    Ok(worst)
}

/// Exactness of `Hom(Lambda, C)` at every index that the window decides.
pub fn is_a_exact(c: &ChainComplex) -> Exactness {
    for n in c.lo..c.hi() {
        if let Some(t) = exact_at(c, n).expect("inside window") {
            return Exactness::from_failure(Some((n, t)));
        }
    }
    Exactness::from_failure(None)
}

/// Like [`is_a_exact`] but ignoring failures above internal degree `t_max`.
pub fn is_a_exact_upto(c: &ChainComplex, t_max: i32) -> Exactness {
    for n in c.lo..c.hi() {
        let a = c.object(n);
        let ords = orders(a);
        let kernel: Vec<Vec<u32>> = if n == c.lo {
            (0..a.dim()).map(|i| unit(a.dim(), i)).collect()
        } else {
            kernel_in(c.diff(n - 1), &ords, &orders(c.object(n - 1)))
        };
        let src = orders(c.object(n + 1));
        let mut worst: Option<i32> = None;
        for v in kernel {
            let deg = a.leading_degree(&v).unwrap_or(0);
            if deg <= t_max && solve_in(c.diff(n), &v, &src, &ords).is_none() {
                worst = Some(worst.map_or(deg, |w| w.min(deg)));
            }
        }
        if let Some(t) = worst {
            return Exactness::from_failure(Some((n, t)));
        }
    }
    Exactness::from_failure(None)
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// A free resolution `P_s -> ... -> P_0 -> A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub target: Module,
    pub frees: Vec<FreeModule>,
    /// Augmentation `P_0 -> A`.
    pub eps: Mat,
    /// `d[n] : P_{n+1} -> P_n`.
    pub d: Vec<Mat>,
    pub t_max: i32,
    /// Some kernel element above `t_max` was left unresolved.
    pub truncated: bool,
}

impl Resolution {
    pub fn len(&self) -> usize {
        self.frees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frees.is_empty()
    }

    /// Differential out of `P_n`: the augmentation for `n = 0`.
    pub fn out_of(&self, n: usize) -> &Mat {
        if n == 0 {
            &self.eps
        } else {
            &self.d[n - 1]
        }
    }

    pub fn augmented(&self) -> ChainComplex {
        let mut objects = vec![self.target.clone()];
        objects.extend(self.frees.iter().map(|f| f.module().clone()));
        let mut diffs = vec![self.eps.clone()];
        diffs.extend(self.d.iter().cloned());
        ChainComplex { lo: -1, objects, diffs }
    }

    /// Number of generators of `P_s` in each internal degree.
    pub fn generator_degrees(&self, s: usize) -> Vec<i32> {
        self.frees[s].gen_degrees()
    }
}

/// Picks a minimal generating set of the submodule spanned by `candidates`
/// (homogeneous vectors), working up through the degrees. Over a field this
/// is graded Nakayama: a candidate is kept iff it is not in the span of what
/// the earlier choices generate.
fn minimal_generators(module: &Module, mut candidates: Vec<Vec<u32>>, t_max: i32) -> (Vec<(Vec<u32>, i32)>, bool) {
    let p = module.modulus();
    let mut span = Span::new(module.dim(), p);
    candidates.sort_by_key(|v| module.leading_degree(v).unwrap_or(i32::MAX));
    let mut chosen = Vec::new();
    let mut truncated = false;
    for v in candidates {
        if span.contains(&v) {
            continue;
        }
        let deg = module.leading_degree(&v).unwrap_or(0);
        if deg > t_max {
            truncated = true;
            continue;
        }
        for a in 0..module.algebra().dim() {
            span.insert(&module.action(a).apply(&v));
        }
        chosen.push((v, deg));
    }
    (chosen, truncated)
}

/// Homogeneous kernel basis of a degree-preserving map, degree by degree.
fn graded_kernel(f: &Mat, src: &Module, tgt: &Module) -> Vec<Vec<u32>> {
    let mut degs: Vec<i32> = src.degrees().to_vec();
    degs.sort();
    degs.dedup();
    let mut out = Vec::new();
    for d in degs {
        let cols = src.in_degree(d);
        let rows = tgt.in_degree(d);
        let block = f.select_rows(&rows).select_cols(&cols);
        for k in kernel_image(&block).kernel {
            let mut v = vec![0; src.dim()];
            for (x, &c) in k.iter().zip(&cols) {
                v[c] = *x;
            }
            out.push(v);
        }
    }
    out
}

/// Minimal free resolution of `a` through `P_{s_max}`, with generators in
/// internal degrees at most `t_max`. Requires a module over a field.
pub fn build_resolution(a: &Module, s_max: usize, t_max: i32) -> Result<Resolution> {
    let alg = a.algebra();
    if alg.is_square() || !alg.homogeneous() {
        return Err(Error::WrongInstance("classical resolutions need a graded algebra over F_p".into()));
    }
    let all: Vec<Vec<u32>> = (0..a.dim()).map(|i| unit(a.dim(), i)).collect();
    let (gens, mut truncated) = minimal_generators(a, all, t_max);
    let p0 = free_on_degrees(alg, &gens.iter().map(|g| g.1).collect::<Vec<_>>());
    let eps = p0.map_from_values(a, &gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
    let mut frees = vec![p0];
    let mut d = Vec::new();
    let mut prev_map = eps.clone();
    let mut prev_tgt = a.clone();
    for _ in 0..s_max {
        let top = frees.last().expect("nonempty").clone();
        let kernel = graded_kernel(&prev_map, top.module(), &prev_tgt);
        let (gens, tr) = minimal_generators(top.module(), kernel, t_max);
        truncated |= tr;
        let next = free_on_degrees(alg, &gens.iter().map(|g| g.1).collect::<Vec<_>>());
        let dn = next.map_from_values(top.module(), &gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        prev_map = dn.clone();
        prev_tgt = top.module().clone();
        frees.push(next);
        d.push(dn);
    }
    Ok(Resolution { target: a.clone(), frees, eps, d, t_max, truncated })
}

/// Keeps only the coordinates of `v` in degree `deg`.
pub(crate) fn project_degree(m: &Module, v: &[u32], deg: i32) -> Vec<u32> {
    v.iter().zip(m.degrees()).map(|(&x, &d)| if d == deg { x } else { 0 }).collect()
}

/// Lifts along a free source. Given `base : P_start -> T_{-1}`, finds maps
/// `f_k : P_{start+k} -> T_k` for `k = 0..len` with `e' f_0 = base` and
/// `d'_{k-1} f_k = f_{k-1} d_{start+k-1}`. All maps have internal degree `t`.
pub fn lift_from(src: &Resolution, start: usize, tgt: &ChainComplex, base: &Mat, t: i32, len: usize) -> Result<Vec<Mat>> {
    if tgt.lo != -1 {
        return Err(Error::Window("target must be augmented (start at -1)".into()));
    }
    if start + len > src.len() || len as i32 > tgt.hi() + 1 {
        return Err(Error::Window(format!("lift of length {len} from P_{start} does not fit")));
    }
    let homogeneous = src.target.algebra().homogeneous();
    let mut out: Vec<Mat> = Vec::with_capacity(len);
    for k in 0..len {
        let p = &src.frees[start + k];
        let tk = tgt.object(k as i32);
        let down = tgt.diff(k as i32 - 1);
        let rhs = if k == 0 { base.clone() } else { out[k - 1].mul(&src.d[start + k - 1]) };
        let mut values = Vec::with_capacity(p.rank());
        for g in 0..p.rank() {
            let b = rhs.column(p.gen_index(g));
            let Some(x) = solve_in(down, &b, &orders(tk), &orders(tgt.object(k as i32 - 1))) else {
                return Err(Error::Unsolvable(format!("lift at stage {k}, generator {g}: target not exact")));
            };
            let x = if homogeneous { project_degree(tk, &x, p.gens()[g].1 + t) } else { x };
            values.push(x);
        }
        out.push(p.map_from_values(tk, &values));
    }
    Ok(out)
}

/// Chain map `f_n : P_n -> T_n`, `n = 0..len`, over `f_{-1}`.
pub fn lift_chain_map(src: &Resolution, tgt: &ChainComplex, f_minus_one: &Mat, len: usize) -> Result<Vec<Mat>> {
    let base = f_minus_one.mul(&src.eps);
    lift_from(src, 0, tgt, &base, 0, len)
}

/// Homotopy between two lifts over the same `f_{-1}`: returns `h_0, ..., h_len`
/// with `h_k : P_{k-1} -> T_k`, `h_0 = 0` and
/// `f'_n - f_n = d'_n h_{n+1} + h_n d_{n-1}`.
pub fn chain_homotopy(src: &Resolution, tgt: &ChainComplex, f: &[Mat], g: &[Mat]) -> Result<Vec<Mat>> {
    let len = f.len().min(g.len());
    if len as i32 > tgt.hi() {
        return Err(Error::Window("homotopy needs one more target object".into()));
    }
    let mut h = vec![Mat::zero(tgt.object(0).dim(), src.target.dim(), tgt.object(0).modulus())];
    for n in 0..len {
        let p = &src.frees[n];
        let mut diff = g[n].sub(&f[n]);
        if n > 0 {
            diff = diff.sub(&h[n].mul(&src.d[n - 1]));
        }
        let next = tgt.object(n as i32 + 1);
        let mut values = Vec::new();
        for gi in 0..p.rank() {
            let b = diff.column(p.gen_index(gi));
            let Some(x) = solve_in(tgt.diff(n as i32), &b, &orders(next), &orders(tgt.object(n as i32))) else {
                return Err(Error::Unsolvable(format!("homotopy at {n}")));
            };
            values.push(project_degree(next, &x, p.gens()[gi].1));
        }
        h.push(p.map_from_values(next, &values));
    }
    Ok(h)
}

/// Checks `f'_n - f_n = d'_n h_{n+1} + h_n d_{n-1}` for all available `n`.
pub fn is_homotopy(src: &Resolution, tgt: &ChainComplex, f: &[Mat], g: &[Mat], h: &[Mat]) -> bool {
    let len = f.len().min(g.len()).min(h.len().saturating_sub(1));
    (0..len).all(|n| {
        let mut rhs = tgt.diff(n as i32).mul(&h[n + 1]);
        if n > 0 {
            rhs = rhs.add(&h[n].mul(&src.d[n - 1]));
        }
        g[n].sub(&f[n]) == rhs
    })
}

/// Coordinates of `Hom(P, Y)` in internal degree `-t`: a generator `g` goes
/// to the part of `Y` in degree `deg g - t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCoords {
    pub t: i32,
    /// `(generator, basis index of Y)`.
    pub slots: Vec<(usize, usize)>,
}

impl HomCoords {
    pub fn new(p: &FreeModule, y: &Module, t: i32) -> HomCoords {
        let mut slots = Vec::new();
        for (g, (_, dg)) in p.gens().iter().enumerate() {
            for j in y.in_degree(dg - t) {
                slots.push((g, j));
            }
        }
        HomCoords { t, slots }
    }

    pub fn to_map(&self, p: &FreeModule, y: &Module, v: &[u32]) -> Mat {
        let mut values = vec![vec![0; y.dim()]; p.rank()];
        for (&(g, j), &x) in self.slots.iter().zip(v) {
            values[g][j] = x;
        }
        p.map_from_values(y, &values)
    }

    pub fn from_map(&self, p: &FreeModule, f: &Mat) -> Vec<u32> {
        self.slots.iter().map(|&(g, j)| f.get(j, p.gen_index(g))).collect()
    }
}

/// `phi -> phi d` from `Hom^{-t}(P_s, Y)` to `Hom^{-t}(P_{s+1}, Y)`.
pub(crate) fn coboundary_matrix(ps: &FreeModule, ps1: &FreeModule, d: &Mat, y: &Module, t: i32) -> (HomCoords, HomCoords, Mat) {
    let from = HomCoords::new(ps, y, t);
    let to = HomCoords::new(ps1, y, t);
    let mut cols = Vec::with_capacity(from.slots.len());
    for i in 0..from.slots.len() {
        let mut e = vec![0; from.slots.len()];
        e[i] = 1;
        let phi = from.to_map(ps, y, &e);
        cols.push(to.from_map(ps1, &phi.mul(d)));
    }
    let m = Mat::from_columns(&cols, to.slots.len(), y.modulus());
    (from, to, m)
}

/// One bigraded Ext group with cocycle representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtGroup {
    pub s: usize,
    pub t: i32,
    pub coords: HomCoords,
    /// Representing cocycles of a basis, in `coords`.
    pub basis: Vec<Vec<u32>>,
    /// Spanning set of coboundaries.
    pub boundaries: Vec<Vec<u32>>,
    pub cocycle_dim: usize,
}

impl ExtGroup {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Class coordinates of a cocycle.
    pub fn classify(&self, v: &[u32], p: u32) -> Vec<u32> {
        let n = self.coords.slots.len();
        let mut cols: Vec<Vec<u32>> = self.boundaries.clone();
        cols.extend(self.basis.iter().cloned());
        let a = Mat::from_columns(&cols, n, p);
        let x = crate::exactla::solve_linear(&a, v).expect("shapes").expect("v is a cocycle");
        x.particular[self.boundaries.len()..].to_vec()
    }

    pub fn is_coboundary(&self, v: &[u32], p: u32) -> bool {
        self.classify(v, p).iter().all(|&x| x == 0)
    }
}

/// Ext groups of `res.target` with coefficients in `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtTable {
    pub groups: BTreeMap<(usize, i32), ExtGroup>,
    pub p: u32,
}

impl ExtTable {
    pub fn dim(&self, s: usize, t: i32) -> usize {
        self.groups.get(&(s, t)).map_or(0, |g| g.dim())
    }

    pub fn group(&self, s: usize, t: i32) -> Option<&ExtGroup> {
        self.groups.get(&(s, t))
    }
}

/// `Ext^{s,t} = H^s(Hom^{-t}(P_*, Y))` for `s` and `t` in the given ranges.
pub fn ext_groups(res: &Resolution, y: &Module, s_range: core::ops::RangeInclusive<usize>, t_range: core::ops::RangeInclusive<i32>) -> Result<ExtTable> {
    let p = y.modulus();
    if y.algebra().is_square() && !y.is_reduced() {
        return Err(Error::WrongInstance("Ext coefficients must be killed by p".into()));
    }
    let res = if res.target.algebra().is_square() { reduce_resolution(res) } else { res.clone() };
    if *s_range.end() + 1 >= res.len() {
        return Err(Error::Window(format!("Ext^{} needs P_{}", s_range.end(), s_range.end() + 1)));
    }
    let y = y.reduction();
    let mut groups = BTreeMap::new();
    for s in s_range {
        for t in t_range.clone() {
            let (coords, _, delta) = coboundary_matrix(&res.frees[s], &res.frees[s + 1], &res.d[s], &y, t);
            let cocycles = kernel_image(&delta).kernel;
            let boundaries: Vec<Vec<u32>> = if s == 0 {
                vec![]
            } else {
                let (_, _, prev) = coboundary_matrix(&res.frees[s - 1], &res.frees[s], &res.d[s - 1], &y, t);
                kernel_image(&prev).image
            };
            let mut span = Span::new(coords.slots.len(), p);
            for b in &boundaries {
                span.insert(b);
            }
            let mut basis = Vec::new();
            for z in &cocycles {
                if span.insert(z) {
                    basis.push(z.clone());
                }
            }
            groups.insert((s, t), ExtGroup { s, t, coords, basis, boundaries, cocycle_dim: cocycles.len() });
        }
    }
    Ok(ExtTable { groups, p })
}

/// The resolution reduced mod p (for lifted algebras).
pub fn reduce_resolution(res: &Resolution) -> Resolution {
    Resolution {
        target: res.target.reduction(),
        frees: res.frees.iter().map(|f| f.reduction()).collect(),
        eps: res.eps.reduce(res.target.algebra().prime()),
        d: res.d.iter().map(|d| d.reduce(res.target.algebra().prime())).collect(),
        t_max: res.t_max,
        truncated: res.truncated,
    }
}

/// A bigraded Ext element, stored as a cocycle on a resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass {
    pub s: usize,
    pub t: i32,
    /// Secondary level.
    pub m: u32,
    /// Cocycle `P_s -> Y` of internal degree `-t`.
    pub cocycle: ModuleMap,
}

impl ExtClass {
    pub fn from_coords(res: &Resolution, y: &Module, s: usize, t: i32, v: &[u32]) -> ExtClass {
        let coords = HomCoords::new(&res.frees[s], y, t);
        let matrix = coords.to_map(&res.frees[s], y, v);
        ExtClass { s, t, m: 0, cocycle: ModuleMap { source: res.frees[s].module().clone(), target: y.clone(), degree: -t, matrix } }
    }

    pub fn coords(&self, res: &Resolution) -> Vec<u32> {
        HomCoords::new(&res.frees[self.s], &self.cocycle.target, self.t).from_map(&res.frees[self.s], &self.cocycle.matrix)
    }

    pub fn is_cocycle(&self, res: &Resolution) -> bool {
        self.s + 1 > res.d.len() || self.cocycle.matrix.mul(&res.d[self.s]).is_zero()
    }
}

/// Yoneda product `[f][g] = [f h_m]` where `h` lifts `g : X_n -> Y` to a
/// chain map `X_{n+*} -> Y_*`.
pub fn yoneda_product(alpha: &ExtClass, beta: &ExtClass, res_x: &Resolution, res_y: &Resolution) -> Result<ExtClass> {
    let (m, n) = (alpha.s, beta.s);
    if n + m >= res_x.len() || m >= res_y.len() {
        return Err(Error::Window(format!("product of degrees {m} and {n} needs longer resolutions")));
    }
    let h = lift_from(res_x, n, &res_y.augmented(), &beta.cocycle.matrix, -beta.t, m + 1)?;
    let matrix = alpha.cocycle.matrix.mul(&h[m]);
    let z = alpha.cocycle.target.clone();
    Ok(ExtClass {
        s: m + n,
        t: alpha.t + beta.t,
        m: 0,
        cocycle: ModuleMap { source: res_x.frees[m + n].module().clone(), target: z, degree: -(alpha.t + beta.t), matrix },
    })
}

/// Sum of two classes in the same bidegree.
pub fn add_classes(a: &ExtClass, b: &ExtClass) -> ExtClass {
    let mut c = a.clone();
    c.cocycle.matrix = a.cocycle.matrix.add(&b.cocycle.matrix);
    c
}

pub fn scale_class(a: &ExtClass, k: u32) -> ExtClass {
    let mut c = a.clone();
    c.cocycle.matrix = a.cocycle.matrix.scale(k);
    c
}

/// Short label for diagnostics.
pub fn describe(c: &ExtClass) -> String {
    format!("class(s={}, t={}, m={})", c.s, c.t, c.m)
}
