//! Additive track categories realized on two-term complexes.
//!
//! Both shipped instances are handled by one engine. An object is a pair
//! `∂ : M1 -> M0`, a map is a pair `(f1, f0)` with `f0 ∂ = ∂ f1`, and a track
//! `f => f'` is a datum `φ : M0 -> N1` with `∂φ = f0 - f0'` and
//! `φ∂ = f1 - f1'`. Vertical composition adds data, inversion negates.
//!
//! `PairCat` uses arbitrary pairs over a graded algebra over F_p. `SquareRing`
//! uses modules over a Z/p^2 algebra with `M1 = M0 = M`, `∂ = p` and diagonal
//! maps `f1 = f0`, so a track `f => f'` is a lift `ĥ` with `p ĥ = f - f'`.
//! In both cases `D(X, Y) = Aut(0)` is the group of data with `∂φ = 0` and
//! `φ∂ = 0`, and `σ_f(a)` is the self-track of `f` with datum `a`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactla::Mat;
use crate::gralg::{hom_space, hom_total, Algebra, FreeModule, Module};
use crate::{Error, Result};

/// Composite `f g`. When `g` lands in a module killed by p and `f` leaves it
/// towards Z/p^2 coordinates, `g` is lifted first (well defined as `f p = 0`).
pub(crate) fn comp(f: &Mat, g: &Mat) -> Mat {
    if f.modulus() > g.modulus() {
        f.mul(&g.lift(f.modulus()))
    } else {
        f.mul(g)
    }
}

/// Matrix with `rows x cols` shape in the coordinates of `target`.
pub(crate) fn zero_into(target: &Module, source_dim: usize) -> Mat {
    Mat::zero(target.dim(), source_dim, target.modulus())
}

fn linear(src: &Module, tgt: &Module, f: &Mat) -> bool {
    if f.rows() != tgt.dim() || f.cols() != src.dim() {
        return false;
    }
    if f.rows() == 0 || f.cols() == 0 {
        return true;
    }
    (0..src.algebra().dim()).all(|a| comp(f, src.action(a)) == comp(tgt.action(a), f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    PairCat,
    SquareRing,
}

#[derive(Debug)]
struct PairData {
    m1: Module,
    m0: Module,
    boundary: Mat,
    /// Generator degrees when the object lies in the resolving subcategory.
    free: Option<Vec<i32>>,
}

/// A two-term complex `∂ : M1 -> M0`.
#[derive(Clone, Debug)]
pub struct PairObject(Arc<PairData>);

impl PartialEq for PairObject {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
            || (self.0.m1 == o.0.m1 && self.0.m0 == o.0.m0 && self.0.boundary == o.0.boundary && self.0.free == o.0.free)
    }
}
impl Eq for PairObject {}

impl PairObject {
    pub fn m1(&self) -> &Module {
        &self.0.m1
    }
    pub fn m0(&self) -> &Module {
        &self.0.m0
    }
    /// `∂ : M1 -> M0`.
    pub fn boundary(&self) -> &Mat {
        &self.0.boundary
    }
    pub fn free_degrees(&self) -> Option<&[i32]> {
        self.0.free.as_deref()
    }
    pub fn total_dim(&self) -> usize {
        self.0.m1.dim() + self.0.m0.dim()
    }
    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }
}

/// A map of pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMap {
    pub source: PairObject,
    pub target: PairObject,
    pub f1: Mat,
    pub f0: Mat,
}

impl PairMap {
    pub fn is_zero(&self) -> bool {
        self.f1.is_zero() && self.f0.is_zero()
    }
}

/// A track `source => target` between parallel maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Track {
    pub source: PairMap,
    pub target: PairMap,
    /// `φ : source.source.M0 -> source.target.M1`.
    pub datum: Mat,
}

impl Track {
    /// The datum reduced mod p (the divided difference for `SquareRing`).
    pub fn reduced_datum(&self) -> Mat {
        let p = self.source.source.m0().algebra().prime();
        if self.datum.modulus() == p {
            self.datum.clone()
        } else {
            self.datum.reduce(p)
        }
    }
}

/// An element of `D(X, Y) = Aut(0_{X,Y})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutZero {
    pub source: PairObject,
    pub target: PairObject,
    pub datum: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackInstance {
    kind: Kind,
    alg: Algebra,
}

impl TrackInstance {
    pub fn pair_cat(alg: &Algebra) -> Result<TrackInstance> {
        if alg.is_square() {
            return Err(Error::WrongInstance("PairCat needs an algebra over F_p".into()));
        }
        Ok(TrackInstance { kind: Kind::PairCat, alg: alg.clone() })
    }

    pub fn square_ring(lift: &Algebra) -> Result<TrackInstance> {
        if !lift.is_square() {
            return Err(Error::WrongInstance("SquareRing needs an algebra over Z/p^2".into()));
        }
        Ok(TrackInstance { kind: Kind::SquareRing, alg: lift.clone() })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }
    pub fn prime(&self) -> u32 {
        self.alg.prime()
    }
    /// The algebra of the homotopy category.
    pub fn base(&self) -> Algebra {
        self.alg.reduction()
    }

    /// Free module over the base algebra.
    pub fn base_free(&self, degrees: &[i32]) -> Module {
        crate::gralg::free_on_degrees(&self.base(), degrees).module().clone()
    }

    fn check_alg(&self, m: &Module) -> Result<()> {
        if !m.algebra().same(&self.alg) {
            return Err(Error::WrongInstance("module over a different algebra".into()));
        }
        Ok(())
    }

    /// A `PairCat` object from explicit data.
    pub fn pair(&self, m1: &Module, m0: &Module, boundary: Mat) -> Result<PairObject> {
        if self.kind != Kind::PairCat {
            return Err(Error::WrongInstance("explicit pairs exist only in PairCat".into()));
        }
        self.check_alg(m1)?;
        self.check_alg(m0)?;
        if !linear(m1, m0, &boundary) {
            return Err(Error::NotLinear("boundary".into()));
        }
        if !crate::gralg::has_degree(m1, m0, &boundary, 0) {
            return Err(Error::NotLinear("boundary must have degree 0".into()));
        }
        Ok(PairObject(Arc::new(PairData { m1: m1.clone(), m0: m0.clone(), boundary, free: None })))
    }

    /// The canonical object of a module: `0 -> M` in `PairCat`, `p : M -> M`
    /// in `SquareRing`.
    pub fn object(&self, m: &Module) -> Result<PairObject> {
        self.check_alg(m)?;
        Ok(match self.kind {
            Kind::PairCat => {
                let z = Module::zero(&self.alg);
                PairObject(Arc::new(PairData { m1: z, m0: m.clone(), boundary: Mat::zero(m.dim(), 0, m.modulus()), free: None }))
            }
            Kind::SquareRing => {
                let b = Mat::identity(m.dim(), m.modulus()).scale(self.prime());
                PairObject(Arc::new(PairData { m1: m.clone(), m0: m.clone(), boundary: b, free: None }))
            }
        })
    }

    /// Object of the resolving subcategory on a free module.
    pub fn b_object(&self, f: &FreeModule) -> PairObject {
        let x = self.object(f.module()).expect("free module over the instance algebra");
        let d = Arc::try_unwrap(x.0).expect("fresh");
        PairObject(Arc::new(PairData { free: Some(f.gen_degrees()), ..d }))
    }

    pub fn zero_object(&self) -> PairObject {
        self.b_object(&crate::gralg::free_on_degrees(&self.alg, &[]))
    }

    pub fn is_b(&self, x: &PairObject) -> bool {
        x.0.free.is_some()
    }

    pub fn direct_sum(&self, x: &PairObject, y: &PairObject) -> PairObject {
        let m = |a: &Module, b: &Module| if a.dim() == 0 { b.clone() } else if b.dim() == 0 { a.clone() } else { a.direct_sum(b) };
        let m1 = m(x.m1(), y.m1());
        let m0 = m(x.m0(), y.m0());
        let bd = Mat::block(
            x.boundary(),
            &Mat::zero(x.m0().dim(), y.m1().dim(), m0.modulus()),
            &Mat::zero(y.m0().dim(), x.m1().dim(), m0.modulus()),
            y.boundary(),
        );
        let bd = if bd.modulus() != m0.modulus() { bd.lift(m0.modulus()) } else { bd };
        let free = match (&x.0.free, &y.0.free) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        PairObject(Arc::new(PairData { m1, m0, boundary: bd, free }))
    }

    /// Validated pair map.
    pub fn map(&self, x: &PairObject, y: &PairObject, f1: Mat, f0: Mat) -> Result<PairMap> {
        if !linear(x.m1(), y.m1(), &f1) || !linear(x.m0(), y.m0(), &f0) {
            return Err(Error::NotLinear("map component".into()));
        }
        if comp(&f0, x.boundary()) != comp(y.boundary(), &f1) {
            return Err(Error::NotLinear("square f0 ∂ = ∂ f1 does not commute".into()));
        }
        if self.kind == Kind::SquareRing && !same_entries(&f1, &f0) {
            return Err(Error::WrongInstance("SquareRing maps are diagonal".into()));
        }
        Ok(PairMap { source: x.clone(), target: y.clone(), f1, f0 })
    }

    /// `SquareRing` map from a single matrix; `PairCat` map `(0, f)` on
    /// objects with `M1 = 0`.
    pub fn simple_map(&self, x: &PairObject, y: &PairObject, f: Mat) -> Result<PairMap> {
        match self.kind {
            Kind::SquareRing => self.map(x, y, f.clone(), f),
            Kind::PairCat => {
                if x.m1().dim() != 0 {
                    return Err(Error::WrongInstance("simple PairCat maps need M1 = 0 on the source".into()));
                }
                self.map(x, y, zero_into(y.m1(), 0), f)
            }
        }
    }

    pub fn zero_map(&self, x: &PairObject, y: &PairObject) -> PairMap {
        PairMap { source: x.clone(), target: y.clone(), f1: zero_into(y.m1(), x.m1().dim()), f0: zero_into(y.m0(), x.m0().dim()) }
    }

    pub fn identity_map(&self, x: &PairObject) -> PairMap {
        PairMap {
            source: x.clone(),
            target: x.clone(),
            f1: Mat::identity(x.m1().dim(), x.m1().modulus()),
            f0: Mat::identity(x.m0().dim(), x.m0().modulus()),
        }
    }

    /// The map reached from `f` along the datum `φ`: `f' = f - (φ∂, ∂φ)`.
    pub fn track_target(&self, f: &PairMap, datum: &Mat) -> PairMap {
        let y = &f.target;
        let x = &f.source;
        PairMap {
            source: x.clone(),
            target: y.clone(),
            f1: f.f1.sub(&comp(datum, x.boundary()).reduce_to(y.m1().modulus())),
            f0: f.f0.sub(&comp(y.boundary(), datum).reduce_to(y.m0().modulus())),
        }
    }

    /// Validated track `f => g` with the given datum.
    pub fn track(&self, f: &PairMap, g: &PairMap, datum: Mat) -> Result<Track> {
        if f.source != g.source || f.target != g.target {
            return Err(Error::NotComposable("track between non-parallel maps".into()));
        }
        if !linear(f.source.m0(), f.target.m1(), &datum) {
            return Err(Error::NotLinear("track datum".into()));
        }
        if self.track_target(f, &datum) != *g {
            return Err(Error::NotComposable("datum does not connect the maps".into()));
        }
        Ok(Track { source: f.clone(), target: g.clone(), datum })
    }

    pub fn identity_track(&self, f: &PairMap) -> Track {
        Track { source: f.clone(), target: f.clone(), datum: zero_into(f.target.m1(), f.source.m0().dim()) }
    }

    /// Every track leaving `f` is `f => track_target(f, φ)`.
    pub fn track_from(&self, f: &PairMap, datum: Mat) -> Track {
        let g = self.track_target(f, &datum);
        Track { source: f.clone(), target: g, datum }
    }

    pub fn is_aut_zero_datum(&self, x: &PairObject, y: &PairObject, datum: &Mat) -> bool {
        linear(x.m0(), y.m1(), datum) && comp(y.boundary(), datum).is_zero() && comp(datum, x.boundary()).is_zero()
    }

    pub fn aut_zero(&self, x: &PairObject, y: &PairObject, datum: Mat) -> Result<AutZero> {
        if !self.is_aut_zero_datum(x, y, &datum) {
            return Err(Error::NotLinear("not an automorphism of the zero map".into()));
        }
        Ok(AutZero { source: x.clone(), target: y.clone(), datum })
    }

    /// `σ_f : D(X, Y) -> Aut(f)`.
    pub fn sigma(&self, f: &PairMap, a: &AutZero) -> Result<Track> {
        if a.source != f.source || a.target != f.target {
            return Err(Error::NotComposable("σ: element of D on other objects".into()));
        }
        Ok(Track { source: f.clone(), target: f.clone(), datum: a.datum.clone() })
    }

    pub fn sigma_inv(&self, t: &Track) -> Result<AutZero> {
        if t.source != t.target {
            return Err(Error::NotComposable("σ^-1 needs a self-track".into()));
        }
        Ok(AutZero { source: t.source.source.clone(), target: t.source.target.clone(), datum: t.datum.clone() })
    }

    /// `g a` for `a ∈ D(X, Y)` and `g : Y -> Z`.
    pub fn d_push(&self, g: &PairMap, a: &AutZero) -> AutZero {
        AutZero { source: a.source.clone(), target: g.target.clone(), datum: comp(&g.f1, &a.datum) }
    }

    /// `b f` for `b ∈ D(Y, Z)` and `f : X -> Y`.
    pub fn d_pull(&self, b: &AutZero, f: &PairMap) -> AutZero {
        AutZero { source: f.source.clone(), target: b.target.clone(), datum: comp(&b.datum, &f.f0) }
    }

    /// `SquareRing` with `X`, `Y` over Z/p^2: `D(X, Y) -> Hom(X̄, Ȳ)`, `a ↦ a / p`.
    pub fn d_to_reduced(&self, a: &AutZero) -> Result<Mat> {
        let p = self.prime();
        if self.kind != Kind::SquareRing || a.target.m1().is_reduced() {
            return Err(Error::WrongInstance("division by p needs Z/p^2 coefficients".into()));
        }
        let d = &a.datum;
        let mut out = Mat::zero(d.rows(), d.cols(), p);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                out.set(i, j, d.get(i, j) / p);
            }
        }
        Ok(out)
    }

    /// Inverse of [`Self::d_to_reduced`].
    pub fn d_from_reduced(&self, x: &PairObject, y: &PairObject, h: &Mat) -> Result<AutZero> {
        let datum = h.lift(self.alg.modulus()).scale(self.prime());
        self.aut_zero(x, y, datum)
    }

    /// `R Y`: the object representing `D(-, Y)`, with the map carrying its
    /// `M0` coordinates into `Y.M1`. `PairCat`: `0 -> π₁Y`. `SquareRing`: the
    /// p-torsion `Y[p]`, identified with the reduction when `Y` is over Z/p^2.
    pub fn r_object(&self, y: &PairObject) -> (PairObject, Mat) {
        match self.kind {
            Kind::PairCat => {
                let (k, incl) = crate::secondary::kernel_module(y.m1(), y.boundary());
                (self.object(&k).expect("same algebra"), incl)
            }
            Kind::SquareRing => {
                let m = y.m0();
                if m.is_reduced() {
                    (y.clone(), Mat::identity(m.dim(), m.modulus()))
                } else {
                    let r = m.reduction().inflate(&self.alg).expect("lift of its reduction");
                    let incl = Mat::identity(m.dim(), m.modulus()).scale(self.prime());
                    (self.object(&r).expect("same algebra"), incl)
                }
            }
        }
    }

    /// The maps `M -> N` over which the instance enumerates: degree 0 for
    /// `PairCat`, all linear maps for `SquareRing`.
    pub fn hom_generators(&self, m: &Module, n: &Module) -> Vec<Mat> {
        if m.dim() == 0 || n.dim() == 0 {
            return vec![];
        }
        match self.kind {
            Kind::PairCat => hom_space(m, n, 0).into_iter().map(|f| f.matrix).collect(),
            Kind::SquareRing => hom_total(m, n),
        }
    }

    /// Every map `X -> Y`, up to `cap` of them.
    pub fn all_maps(&self, x: &PairObject, y: &PairObject, cap: usize) -> Result<Vec<PairMap>> {
        let z0 = zero_into(y.m0(), x.m0().dim());
        let z1 = zero_into(y.m1(), x.m1().dim());
        match self.kind {
            Kind::SquareRing => {
                let fs = enumerate_span(&self.hom_generators(x.m0(), y.m0()), &z0, cap)?;
                Ok(fs.into_iter().map(|f| PairMap { source: x.clone(), target: y.clone(), f1: f.clone(), f0: f }).collect())
            }
            Kind::PairCat => {
                let f1s = enumerate_span(&self.hom_generators(x.m1(), y.m1()), &z1, cap)?;
                let f0s = enumerate_span(&self.hom_generators(x.m0(), y.m0()), &z0, cap)?;
                let mut out = Vec::new();
                for f1 in &f1s {
                    for f0 in &f0s {
                        if comp(f0, x.boundary()) == comp(y.boundary(), f1) {
                            out.push(PairMap { source: x.clone(), target: y.clone(), f1: f1.clone(), f0: f0.clone() });
                            if out.len() > cap {
                                return Err(Error::Cap(format!("more than {cap} maps")));
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Every possible track datum `X.M0 -> Y.M1`.
    pub fn all_data(&self, x: &PairObject, y: &PairObject, cap: usize) -> Result<Vec<Mat>> {
        enumerate_span(&self.hom_generators(x.m0(), y.m1()), &zero_into(y.m1(), x.m0().dim()), cap)
    }

    /// The elements of `D(X, Y)`.
    pub fn all_d(&self, x: &PairObject, y: &PairObject, cap: usize) -> Result<Vec<AutZero>> {
        Ok(self
            .all_data(x, y, cap)?
            .into_iter()
            .filter(|d| self.is_aut_zero_datum(x, y, d))
            .map(|d| AutZero { source: x.clone(), target: y.clone(), datum: d })
            .collect())
    }
}

fn same_entries(a: &Mat, b: &Mat) -> bool {
    a.rows() == b.rows() && a.cols() == b.cols() && a.entries() == b.entries() && a.modulus() == b.modulus()
}

trait ReduceTo {
    fn reduce_to(&self, m: u32) -> Mat;
}

impl ReduceTo for Mat {
    fn reduce_to(&self, m: u32) -> Mat {
        if self.modulus() == m {
            self.clone()
        } else if self.modulus() % m == 0 {
            self.reduce(m)
        } else {
            self.lift(m)
        }
    }
}

/// All elements of the subgroup generated by `gens`, deduplicated, in a fixed order.
pub fn enumerate_span(gens: &[Mat], zero: &Mat, cap: usize) -> Result<Vec<Mat>> {
    let mut set: BTreeSet<Vec<u32>> = BTreeSet::new();
    set.insert(zero.entries().to_vec());
    let m = zero.modulus();
    for g in gens {
        let g = g.reduce_to(m);
        let mut next = set.clone();
        for s in &set {
            let mut cur = s.clone();
            loop {
                for (x, &y) in cur.iter_mut().zip(g.entries()) {
                    *x = (*x + y) % m;
                }
                if !next.insert(cur.clone()) {
                    break;
                }
                if next.len() > cap {
                    return Err(Error::Cap(format!("hom set larger than {cap}")));
                }
            }
        }
        set = next;
    }
    Ok(set
        .into_iter()
        .map(|e| {
            let mut out = zero.clone();
            for (k, x) in e.into_iter().enumerate() {
                out.set(k / zero.cols().max(1), k % zero.cols().max(1), x);
            }
            out
        })
        .collect())
}

/// `f ∘ g`.
pub fn compose(f: &PairMap, g: &PairMap) -> Result<PairMap> {
    if g.target != f.source {
        return Err(Error::NotComposable("maps".into()));
    }
    Ok(PairMap { source: g.source.clone(), target: f.target.clone(), f1: comp(&f.f1, &g.f1), f0: comp(&f.f0, &g.f0) })
}

/// `g α`.
pub fn whisker_left(g: &PairMap, a: &Track) -> Result<Track> {
    Ok(Track { source: compose(g, &a.source)?, target: compose(g, &a.target)?, datum: comp(&g.f1, &a.datum) })
}

/// `α e`.
pub fn whisker_right(a: &Track, e: &PairMap) -> Result<Track> {
    Ok(Track { source: compose(&a.source, e)?, target: compose(&a.target, e)?, datum: comp(&a.datum, &e.f0) })
}

/// `β □ α`: first `α`, then `β`.
pub fn vcomp(b: &Track, a: &Track) -> Result<Track> {
    if a.target != b.source {
        return Err(Error::NotComposable("vertical composite".into()));
    }
    Ok(Track { source: a.source.clone(), target: b.target.clone(), datum: a.datum.add(&b.datum) })
}

pub fn vinverse(a: &Track) -> Track {
    Track { source: a.target.clone(), target: a.source.clone(), datum: a.datum.neg() }
}

/// Both sides of the interchange law for `α : f => f'` on `Y -> Z` and
/// `β : g => g'` on `X -> Y`: `αg' □ fβ` and `f'β □ αg`.
pub fn horizontal(a: &Track, b: &Track) -> Result<(Track, Track)> {
    let left = vcomp(&whisker_right(a, &b.target)?, &whisker_left(&a.source, b)?)?;
    let right = vcomp(&whisker_left(&a.target, b)?, &whisker_right(a, &b.source)?)?;
    Ok((left, right))
}

/// One law of the extension suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub law: String,
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    pub laws: Vec<LawCheck>,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.violations == 0)
    }

    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.laws.iter().find(|l| l.violations > 0)
    }
}

struct Tally {
    law: &'static str,
    checked: usize,
    violations: usize,
    first: Option<String>,
}

impl Tally {
    fn new(law: &'static str) -> Tally {
        Tally { law, checked: 0, violations: 0, first: None }
    }
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(witness());
            }
        }
    }
    fn done(self) -> LawCheck {
        LawCheck { law: self.law.into(), checked: self.checked, violations: self.violations, first_violation: self.first }
    }
}

/// The σ used by [`verify_linear_extension`]; the honest one is [`honest_sigma`].
pub type SigmaFn<'a> = &'a dyn Fn(&PairMap, &Mat) -> Mat;

pub fn honest_sigma(_: &PairMap, a: &Mat) -> Mat {
    a.clone()
}

/// Checks the track-category and linear-extension laws on every map and
/// track among the sampled objects.
pub fn verify_linear_extension(inst: &TrackInstance, sample: &[PairObject], sigma: SigmaFn<'_>) -> Result<ExtensionReport> {
    const CAP: usize = 1 << 12;
    let n = sample.len();
    let mut maps = Vec::with_capacity(n * n);
    let mut data = Vec::with_capacity(n * n);
    let mut ds = Vec::with_capacity(n * n);
    for x in sample {
        for y in sample {
            maps.push(inst.all_maps(x, y, CAP)?);
            data.push(inst.all_data(x, y, CAP)?);
            ds.push(inst.all_d(x, y, CAP)?);
        }
    }
    let at = |i: usize, j: usize| i * n + j;
    let sig = |f: &PairMap, a: &AutZero| Track { source: f.clone(), target: f.clone(), datum: sigma(f, &a.datum) };

    let mut strict = Tally::new("strict zero object");
    let zero = inst.zero_object();
    for x in sample {
        for (a, b) in [(x, &zero), (&zero, x)] {
            let ms = inst.all_maps(a, b, CAP)?;
            let ts = inst.all_data(a, b, CAP)?;
            strict.check(ms.len() == 1 && ts.len() == 1, || format!("{} maps, {} tracks", ms.len(), ts.len()));
        }
    }

    let mut zero_law = Tally::new("zero law 0β = 0 = α0");
    let mut inter = Tally::new("interchange");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let z_yz = inst.zero_map(&sample[j], &sample[k]);
                let z_xy = inst.zero_map(&sample[i], &sample[j]);
                for g in &maps[at(i, j)] {
                    for bd in &data[at(i, j)] {
                        let beta = inst.track_from(g, bd.clone());
                        let w = whisker_left(&z_yz, &beta)?;
                        zero_law.check(w.datum.is_zero(), || format!("0β with β on objects {i}->{j}"));
                        for f in &maps[at(j, k)] {
                            for ad in &data[at(j, k)] {
                                let alpha = inst.track_from(f, ad.clone());
                                let (l, r) = horizontal(&alpha, &beta)?;
                                inter.check(l == r, || format!("objects {i}->{j}->{k}"));
                            }
                        }
                    }
                }
                for f in &maps[at(j, k)] {
                    for ad in &data[at(j, k)] {
                        let alpha = inst.track_from(f, ad.clone());
                        let w = whisker_right(&alpha, &z_xy)?;
                        zero_law.check(w.datum.is_zero(), || format!("α0 with α on objects {j}->{k}"));
                    }
                }
            }
        }
    }

    let mut eq1 = Tally::new("σ_gf(ga) = gσ_f(a)");
    let mut eq2 = Tally::new("σ_gf(bf) = σ_g(b)f");
    let mut eq3 = Tally::new("α □ σ_f(a) = σ_f'(a) □ α");
    let mut bij = Tally::new("σ_f and σ_f^-1 are inverse");
    for i in 0..n {
        for j in 0..n {
            for f in &maps[at(i, j)] {
                for a in &ds[at(i, j)] {
                    for k in 0..n {
                        for g in &maps[at(j, k)] {
                            let gf = compose(g, f)?;
                            let lhs = sig(&gf, &inst.d_push(g, a));
                            let rhs = whisker_left(g, &sig(f, a))?;
                            eq1.check(lhs == rhs, || format!("objects {i}->{j}->{k}"));
                        }
                    }
                    let s = sig(f, a);
                    bij.check(inst.sigma_inv(&s)? == *a, || format!("σ^-1σ on {i}->{j}"));
                    for d in &data[at(i, j)] {
                        let alpha = inst.track_from(f, d.clone());
                        let lhs = vcomp(&alpha, &s)?;
                        let rhs = vcomp(&sig(&alpha.target, a), &alpha)?;
                        eq3.check(lhs == rhs, || format!("objects {i}->{j}"));
                    }
                }
                for d in &data[at(i, j)] {
                    let alpha = inst.track_from(f, d.clone());
                    if alpha.target == *f {
                        let back = sig(f, &inst.sigma_inv(&alpha)?);
                        bij.check(back == alpha, || format!("σσ^-1 on {i}->{j}"));
                    }
                }
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            for g in &maps[at(j, k)] {
                for b in &ds[at(j, k)] {
                    for i in 0..n {
                        for f in &maps[at(i, j)] {
                            let gf = compose(g, f)?;
                            let lhs = sig(&gf, &inst.d_pull(b, f));
                            let rhs = whisker_right(&sig(g, b), f)?;
                            eq2.check(lhs == rhs, || format!("objects {i}->{j}->{k}"));
                        }
                    }
                }
            }
        }
    }

    let mut biadd = Tally::new("D biadditive on biproducts");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, x2, y) = (&sample[i], &sample[j], &sample[k]);
                let s = inst.direct_sum(x, x2);
                let lhs = inst.all_d(&s, y, CAP)?.len();
                let rhs = ds[at(i, k)].len() * ds[at(j, k)].len();
                biadd.check(lhs == rhs, || format!("|D({i}+{j}, {k})| = {lhs} vs {rhs}"));
                let s = inst.direct_sum(y, x2);
                let lhs = inst.all_d(x, &s, CAP)?.len();
                let rhs = ds[at(i, k)].len() * ds[at(i, j)].len();
                biadd.check(lhs == rhs, || format!("|D({i}, {k}+{j})| = {lhs} vs {rhs}"));
            }
        }
    }

    Ok(ExtensionReport {
        laws: vec![eq1.done(), eq2.done(), eq3.done(), bij.done(), inter.done(), zero_law.done(), strict.done(), biadd.done()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn vcomp_with_inverse_is_identity() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
        let f = fixtures::square_rank_one(&inst, 0);
        let id = inst.identity_map(&f);
        let a = inst.track_from(&id, Mat::identity(2, 4));
        let back = vcomp(&vinverse(&a), &a).unwrap();
        assert_eq!(back, inst.identity_track(&id));
    }

    #[test]
    fn sigma_inv_of_identity_is_zero() {
        let inst = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
        let objs = fixtures::pair_objects_dim2(&inst);
        let f = inst.identity_map(&objs[3]);
        let a = inst.sigma_inv(&inst.identity_track(&f)).unwrap();
        assert!(a.datum.is_zero());
    }

    #[test]
    fn square_ring_tracks_exist_iff_congruent() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap();
        let x = fixtures::square_rank_one(&inst, 0);
        let maps = inst.all_maps(&x, &x, 64).unwrap();
        assert_eq!(maps.len(), 16);
        let data = inst.all_data(&x, &x, 64).unwrap();
        for f in &maps {
            for g in &maps {
                let congruent = f.f0.reduce(2) == g.f0.reduce(2);
                let found = data.iter().any(|d| inst.track_target(f, d) == *g);
                assert_eq!(congruent, found);
            }
        }
    }

    #[test]
    fn square_ring_aut_zero_is_reduced_hom() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_twisted()).unwrap();
        let x = fixtures::square_rank_one(&inst, 0);
        let ds = inst.all_d(&x, &x, 64).unwrap();
        let reduced = crate::gralg::hom_total(&inst.base_free(&[0]), &inst.base_free(&[0]));
        let homs = enumerate_span(&reduced, &Mat::zero(2, 2, 2), 64).unwrap();
        assert_eq!(ds.len(), homs.len());
        for a in &ds {
            let h = inst.d_to_reduced(a).unwrap();
            assert!(homs.contains(&h));
            assert_eq!(inst.d_from_reduced(&x, &x, &h).unwrap(), *a);
        }
    }

    #[test]
    fn pair_cat_homotopy_classes_two_ways() {
        let inst = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
        let objs = fixtures::pair_objects_dim2(&inst);
        let free = inst.b_object(&crate::gralg::free_on_degrees(inst.algebra(), &[0]));
        for y in &objs {
            let maps = inst.all_maps(&free, y, 256).unwrap();
            let data = inst.all_data(&free, y, 256).unwrap();
            let mut classes: Vec<Vec<Vec<u32>>> = Vec::new();
            for f in &maps {
                let mut cls: Vec<Vec<u32>> = data.iter().map(|d| inst.track_target(f, d).f0.entries().to_vec()).collect();
                cls.sort();
                cls.dedup();
                if !classes.contains(&cls) {
                    classes.push(cls);
                }
            }
            let (q, _, _) = crate::secondary::cokernel_module(y.m0(), y.boundary());
            let direct = enumerate_span(&inst.hom_generators(free.m0(), &q), &Mat::zero(q.dim(), 2, 2), 256).unwrap();
            assert_eq!(classes.len(), direct.len());
        }
    }

    #[test]
    fn extension_laws_pair_cat() {
        let inst = TrackInstance::pair_cat(&fixtures::e1()).unwrap();
        let objs = fixtures::pair_objects_dim2(&inst);
        let r = verify_linear_extension(&inst, &objs, &honest_sigma).unwrap();
        assert!(r.passed(), "{:?}", r.first_failure());
        assert!(r.laws.iter().all(|l| l.checked > 0));
    }

    #[test]
    fn extension_laws_square_ring() {
        let inst = TrackInstance::square_ring(&fixtures::z4_lift_plain()).unwrap();
        let objs = vec![inst.zero_object(), fixtures::square_rank_one(&inst, 0), fixtures::square_rank_one(&inst, 1)];
        let r = verify_linear_extension(&inst, &objs, &honest_sigma).unwrap();
        assert!(r.passed(), "{:?}", r.first_failure());
    }

    #[test]
    fn corrupted_sigma_breaks_first_equation() {
        let inst = TrackInstance::pair_cat(&fixtures::dual_numbers(3)).unwrap();
        let objs = fixtures::pair_objects_dim2(&inst);
        let flip = |f: &PairMap, a: &Mat| if f.is_zero() { a.clone() } else { a.neg() };
        let r = verify_linear_extension(&inst, &objs, &flip).unwrap();
        assert_eq!(r.first_failure().unwrap().law, "σ_gf(ga) = gσ_f(a)");
    }
}
