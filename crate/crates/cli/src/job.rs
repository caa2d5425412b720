//! Job setup: fixtures or input files, windows, and the commands.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};

use sechom_core::fixtures;
use sechom_core::gralg::{Algebra, Module};
use sechom_core::homalg::{build_resolution, ext_groups, Resolution};
use sechom_core::secondary::{build_secondary_resolution, lifted_complex, pi0, validate_secondary, BuildOptions, SecondaryComplex};
use sechom_core::sext::{d2_table, secondary_ext, D2Engine};
use sechom_core::track::{Kind, PairObject, TrackInstance};

use crate::chart::{Chart, ChartRow, D2Line, D2Table};
use crate::input::{self, AlgebraSpec, ClassSpec, ComplexSpec, ObjectSpec};

pub const S_CAP: usize = 12;
pub const T_CAP: i32 = 24;

pub const FIXTURES: &[&str] = &["e1", "exterior", "e1-split", "e1-nonsplit", "z4-plain", "z4-twisted"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Resolve,
    Ext,
    Secres,
    D2,
    Sext,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Resolve => "resolve",
            Command::Ext => "ext",
            Command::Secres => "secres",
            Command::D2 => "d2",
            Command::Sext => "sext",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    pub track: Option<Kind>,
    pub fixture: Option<String>,
    pub algebra: Option<PathBuf>,
    /// Object to resolve.
    pub x: Option<PathBuf>,
    /// Coefficient object.
    pub y: Option<PathBuf>,
    pub complex: Option<PathBuf>,
    pub classes: Option<PathBuf>,
    pub s_max: usize,
    pub t_max: i32,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command, fixture: &str) -> JobSpec {
        JobSpec {
            command,
            track: None,
            fixture: Some(fixture.into()),
            algebra: None,
            x: None,
            y: None,
            complex: None,
            classes: None,
            s_max: 4,
            t_max: 8,
            seed: 0,
            out: None,
        }
    }

    pub fn check_window(&self) -> Result<()> {
        if self.s_max == 0 || self.s_max > S_CAP {
            bail!("--smax must lie in 1..={S_CAP}, got {}", self.s_max);
        }
        if self.t_max <= 0 || self.t_max > T_CAP {
            bail!("--tmax must lie in 1..={T_CAP}, got {}", self.t_max);
        }
        Ok(())
    }
}

/// Where the secondary complex comes from.
#[derive(Clone, Debug)]
pub enum Source {
    /// The builder applied to `x`.
    Builder,
    /// The divided lift of the classical resolution of `π₀ x`.
    Lifted,
    Given(SecondaryComplex),
}

#[derive(Clone, Debug)]
pub struct Setup {
    pub label: String,
    pub inst: TrackInstance,
    pub x: PairObject,
    pub y: PairObject,
    pub source: Source,
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::PairCat => "pair",
        Kind::SquareRing => "square",
    }
}

fn fixture(name: &str) -> Result<Setup> {
    let pair = |alg: Algebra, y: fn(&TrackInstance) -> PairObject| -> Result<Setup> {
        let inst = TrackInstance::pair_cat(&alg)?;
        let x = inst.object(&Module::trivial(&alg, &[0]))?;
        Ok(Setup { label: name.into(), y: y(&inst), inst, x, source: Source::Builder })
    };
    let k = |inst: &TrackInstance| inst.object(&Module::trivial(inst.algebra(), &[0])).expect("fixture");
    match name.to_ascii_lowercase().as_str() {
        "e1" => pair(fixtures::e1(), k),
        "exterior" | "exy" => pair(fixtures::exterior_xy(), k),
        "e1-split" => pair(fixtures::e1(), fixtures::split_pair),
        "e1-nonsplit" => pair(fixtures::e1(), fixtures::nonsplit_pair),
        "z4-plain" => {
            let inst = TrackInstance::square_ring(&fixtures::z4_lift_plain())?;
            let b = fixtures::flat_residue(&inst);
            Ok(Setup { label: name.into(), inst, x: b.clone(), y: b, source: Source::Builder })
        }
        "z4-twisted" => {
            let inst = TrackInstance::square_ring(&fixtures::z4_lift_twisted())?;
            let b = fixtures::reduced_residue(&inst);
            Ok(Setup { label: name.into(), inst, x: b.clone(), y: b, source: Source::Lifted })
        }
        _ => bail!("unknown fixture {name:?}; shipped fixtures: {}", FIXTURES.join(", ")),
    }
}

pub fn setup(job: &JobSpec) -> Result<Setup> {
    let mut s = match (&job.fixture, &job.algebra) {
        (Some(_), Some(_)) => bail!("give either --fixture or --algebra, not both"),
        (None, None) => bail!("no input: give --fixture NAME or --algebra FILE"),
        (Some(f), None) => {
            if job.x.is_some() || job.y.is_some() {
                bail!("--x/--y need --algebra; fixtures fix their objects");
            }
            fixture(f)?
        }
        (None, Some(path)) => {
            let spec: AlgebraSpec = input::read_json(path, "algebra")?;
            let alg = input::build_algebra(&spec)?;
            let kind = job.track.unwrap_or(if spec.square { Kind::SquareRing } else { Kind::PairCat });
            let inst = match kind {
                Kind::PairCat => TrackInstance::pair_cat(&alg),
                Kind::SquareRing => TrackInstance::square_ring(&alg),
            }
            .with_context(|| format!("--track {} does not fit the algebra", kind_name(kind)))?;
            let default = inst.object(&Module::trivial(&alg, &[0]))?;
            let obj = |p: &Option<PathBuf>, what: &str| -> Result<Option<PairObject>> {
                p.as_ref().map(|p| -> Result<PairObject> {
                    let o: ObjectSpec = input::read_json(p, what)?;
                    input::build_object(&inst, &o).with_context(|| format!("{what} {}", p.display()))
                }).transpose()
            };
            let x = obj(&job.x, "object")?;
            let y = obj(&job.y, "object")?.unwrap_or_else(|| x.clone().unwrap_or_else(|| default.clone()));
            let source = if kind == Kind::SquareRing && x.is_none() { Source::Lifted } else { Source::Builder };
            Setup { label: path.display().to_string(), x: x.unwrap_or(default), y, inst, source }
        }
    };
    if let Some(k) = job.track {
        if k != s.inst.kind() {
            bail!("--track {} does not match the {} instance of {}", kind_name(k), kind_name(s.inst.kind()), s.label);
        }
    }
    if let Some(path) = &job.complex {
        let spec: ComplexSpec = input::read_json(path, "complex")?;
        let c = input::build_complex(&s.inst, &spec).with_context(|| format!("complex {}", path.display()))?;
        let v = validate_secondary(&c);
        if let Some((n, why)) = v.first_failure {
            bail!("complex {} is not a secondary complex: index {n}: {why}", path.display());
        }
        s.source = Source::Given(c);
    }
    Ok(s)
}

impl Setup {
    pub fn kind(&self) -> Kind {
        self.inst.kind()
    }

    pub fn prime(&self) -> u32 {
        self.inst.prime()
    }

    /// `π₀ x` over the base algebra.
    pub fn classical_target(&self) -> Module {
        base_module(&pi0(&self.inst, &self.x).0)
    }

    pub fn classical_coefficients(&self) -> Module {
        base_module(&pi0(&self.inst, &self.y).0)
    }

    /// Highest internal degree of the coefficient object.
    pub fn y_top(&self) -> i32 {
        self.y.m0().degrees().iter().chain(self.y.m1().degrees()).copied().max().unwrap_or(0).max(0)
    }

    /// Internal degree bound for resolutions feeding a chart up to `t_max`.
    pub fn resolution_degree(&self, t_max: i32) -> i32 {
        t_max + self.y_top() + 1
    }

    pub fn classical_resolution(&self, len: usize, t_max: i32) -> Result<Resolution> {
        Ok(build_resolution(&self.classical_target(), len, self.resolution_degree(t_max))?)
    }

    /// A secondary complex reaching at least index `hi`.
    pub fn complex(&self, hi: usize, t_max: i32) -> Result<SecondaryComplex> {
        let c = match &self.source {
            Source::Builder => build_secondary_resolution(&self.inst, &self.x, BuildOptions::new(hi, self.resolution_degree(t_max)))?.complex,
            Source::Lifted => {
                let res = self.classical_resolution(hi + 1, t_max)?;
                lifted_complex(&self.inst, &res, hi + 1)?
            }
            Source::Given(c) => c.clone(),
        };
        if c.hi() < hi as i32 {
            bail!("the secondary complex stops at A_{}; this window needs A_{hi}", c.hi());
        }
        Ok(c)
    }

    pub fn engine(&self, s_max: usize, t_max: i32) -> Result<D2Engine> {
        Ok(D2Engine::new(&self.complex(s_max + 3, t_max)?, &self.y)?)
    }

    /// Lowest internal degree with classes at levels 0 and 1.
    pub fn t_min(&self) -> i32 {
        -self.y_top()
    }

    pub fn describe(&self) -> String {
        let src = match self.source {
            Source::Builder => "builder",
            Source::Lifted => "divided lift",
            Source::Given(_) => "input complex",
        };
        format!("{} track={} p={} modulus={} complex={src}", self.label, kind_name(self.kind()), self.prime(), self.inst.algebra().modulus())
    }
}

fn base_module(m: &Module) -> Module {
    if m.algebra().is_square() {
        m.reduction()
    } else {
        m.clone()
    }
}

fn title(job: &JobSpec, s: &Setup) -> String {
    format!("sechom {} {} smax={} tmax={}", job.command.name(), s.describe(), job.s_max, job.t_max)
}

/// Generators of a classical resolution, with their boundaries.
pub fn resolve(job: &JobSpec, s: &Setup) -> Result<Chart> {
    let res = build_resolution(&s.classical_target(), job.s_max, job.t_max)?;
    let mut rows = Vec::new();
    for n in 0..res.len() {
        let f = &res.frees[n];
        let values = f.values_of(res.out_of(n));
        let mut degs: Vec<i32> = f.gen_degrees();
        degs.sort();
        degs.dedup();
        for t in degs {
            let w: Vec<Vec<u32>> = (0..f.rank()).filter(|&g| f.gens()[g].1 == t).map(|g| values[g].clone()).collect();
            rows.push(ChartRow { s: n, t, m: 0, dim: w.len(), witnesses: w });
        }
    }
    Ok(Chart { title: title(job, s), rows })
}

/// Nonzero classical Ext groups with representing cocycles.
pub fn ext(job: &JobSpec, s: &Setup) -> Result<Chart> {
    let res = s.classical_resolution(job.s_max + 1, job.t_max)?;
    let tab = ext_groups(&res, &s.classical_coefficients(), 0..=job.s_max, s.t_min()..=job.t_max)?;
    let rows = tab
        .groups
        .iter()
        .filter(|(_, g)| g.dim() > 0)
        .map(|(&(sd, t), g)| ChartRow { s: sd, t, m: 0, dim: g.dim(), witnesses: g.basis.clone() })
        .collect();
    Ok(Chart { title: title(job, s), rows })
}

/// Generators of the secondary complex; a witness is the total-complex
/// vector `(d0, δ)` each generator kills.
pub fn secres(job: &JobSpec, s: &Setup) -> Result<(Chart, SecondaryComplex)> {
    let c = s.complex(job.s_max, job.t_max)?;
    let mut rows = Vec::new();
    for n in c.lo.max(0)..=c.hi().min(job.s_max as i32) {
        let Some(f) = c.free(n) else { continue };
        let mut degs = f.gen_degrees();
        degs.sort();
        degs.dedup();
        for t in degs.into_iter().filter(|&t| t <= job.t_max) {
            let mut w = Vec::new();
            for g in (0..f.rank()).filter(|&g| f.gens()[g].1 == t) {
                let col = f.gen_index(g);
                let mut v = if c.has(n - 1) { c.d(n - 1).f0.column(col) } else { vec![] };
                if c.has(n - 2) {
                    v.extend(c.delta(n - 2).column(col));
                }
                w.push(v);
            }
            rows.push(ChartRow { s: n as usize, t, m: 0, dim: w.len(), witnesses: w });
        }
    }
    Ok((Chart { title: title(job, s), rows }, c))
}

pub fn complex_json(c: &SecondaryComplex) -> String {
    let mut out = serde_json::to_string_pretty(&input::complex_spec(c)).expect("serializable");
    out.push('\n');
    out
}

/// d2 on the listed classes, or on every basis class of the window.
pub fn d2(job: &JobSpec, s: &Setup) -> Result<D2Table> {
    let classes: Option<Vec<ClassSpec>> = job.classes.as_ref().map(|p| input::read_json(p, "class list")).transpose()?;
    let t = title(job, s);
    if matches!(&classes, Some(c) if c.is_empty()) {
        return Ok(D2Table { title: t, rows: vec![] });
    }
    let e = s.engine(job.s_max, job.t_max)?;
    let rows = match classes {
        Some(cls) => cls
            .iter()
            .map(|c| {
                if c.s > job.s_max {
                    return Err(anyhow!("class at s = {} lies outside --smax {}", c.s, job.s_max));
                }
                let r = e.d2(c.m, c.s, c.t, &c.coords).with_context(|| format!("d2 of class (s={}, t={}, m={})", c.s, c.t, c.m))?;
                Ok(D2Line { s: c.s, t: c.t, m: c.m, class: c.coords.clone(), image: r.output })
            })
            .collect::<Result<Vec<_>>>()?,
        None => {
            let mut rows = Vec::new();
            for m in 0..=1 {
                for r in d2_table(&e, m, 0..=job.s_max, s.t_min()..=job.t_max)? {
                    let dim = e.group(m, r.s, r.t)?.dim();
                    let mut class = vec![0; dim];
                    class[r.index] = 1;
                    rows.push(D2Line { s: r.s, t: r.t, m, class, image: r.output });
                }
            }
            rows
        }
    };
    Ok(D2Table { title: t, rows })
}

/// Secondary Ext on the window; entries with a nonzero primary group.
pub fn sext(job: &JobSpec, s: &Setup) -> Result<Chart> {
    let e = s.engine(job.s_max, job.t_max)?;
    let tab = secondary_ext(&e, job.s_max, s.t_min()..=job.t_max)?;
    let rows = tab
        .entries
        .iter()
        .filter(|(_, e)| e.primary > 0)
        .map(|(&(sd, t, m), e)| ChartRow { s: sd, t, m, dim: e.dim, witnesses: e.witnesses.clone() })
        .collect();
    Ok(Chart { title: title(job, s), rows })
}
