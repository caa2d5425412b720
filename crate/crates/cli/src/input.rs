//! JSON input schemas and the complex serialization.

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sechom_core::gralg::{free_on_degrees, validate_algebra, Algebra, AlgebraTable, Module};
use sechom_core::secondary::SecondaryComplex;
use sechom_core::track::{Kind, PairMap, PairObject, TrackInstance};
use sechom_core::Mat;

/// A basis element referenced by position or by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref {
    Index(usize),
    Name(String),
}

impl Ref {
    fn resolve(&self, names: &[String], what: &str) -> Result<usize> {
        match self {
            Ref::Index(i) if *i < names.len() => Ok(*i),
            Ref::Index(i) => bail!("{what} index {i} out of range (have {})", names.len()),
            Ref::Name(n) => names.iter().position(|x| x == n).ok_or_else(|| anyhow!("unknown {what} {n:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub name: String,
    pub degree: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub basis: Ref,
    pub coeff: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub left: Ref,
    pub right: Ref,
    pub result: Vec<TermSpec>,
}

/// `{"p", "square", "basis", "products"}`; basis element 0 is the unit and
/// its products need not be listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub p: u32,
    #[serde(default)]
    pub square: bool,
    pub basis: Vec<BasisSpec>,
    #[serde(default)]
    pub products: Vec<ProductSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub element: Ref,
    pub generator: Ref,
    pub result: Vec<TermSpec>,
}

/// Generators plus the nonzero action entries `element · generator`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub generators: Vec<BasisSpec>,
    #[serde(default)]
    pub action: Vec<ActionSpec>,
    /// Killed by p (only meaningful over a Z/p^2 algebra).
    #[serde(default, skip_serializing_if = "is_false")]
    pub reduced: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectSpec {
    /// Free object of the resolving subcategory, by generator degrees.
    Free { free: Vec<i32> },
    /// Explicit pair `boundary : m1 -> m0` (PairCat).
    Pair { m1: ModuleSpec, m0: ModuleSpec, boundary: Vec<Vec<i64>> },
    /// The canonical object of a module.
    Plain { module: ModuleSpec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub f1: Vec<Vec<i64>>,
    pub f0: Vec<Vec<i64>>,
}

/// Window, objects, differentials `d[k] = d_{lo+k}` and track data
/// `delta[k]` of `δ_{lo+k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub lo: i32,
    pub objects: Vec<ObjectSpec>,
    pub d: Vec<MapSpec>,
    pub delta: Vec<Vec<Vec<i64>>>,
}

/// One Ext class for the `d2` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub s: usize,
    pub t: i32,
    #[serde(default)]
    pub m: u32,
    pub coords: Vec<u32>,
}

/// Parses JSON, reporting the position of syntax and schema errors.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| anyhow!("{what}: parse error at line {}, column {}: {e}", e.line(), e.column()))
}

pub fn read_json<T: DeserializeOwned>(path: &std::path::Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_json(&text, &format!("{what} {}", path.display()))
}

fn vector(terms: &[TermSpec], names: &[String], what: &str) -> Result<Vec<(usize, i64)>> {
    terms.iter().map(|t| Ok((t.basis.resolve(names, what)?, t.coeff))).collect()
}

pub fn build_algebra(spec: &AlgebraSpec) -> Result<Algebra> {
    let modulus = if spec.square { spec.p.checked_mul(spec.p).ok_or_else(|| anyhow!("p too large"))? } else { spec.p };
    let names: Vec<String> = spec.basis.iter().map(|b| b.name.clone()).collect();
    let mut products = Vec::new();
    for i in 0..names.len() {
        products.push((0, i, vec![(i, 1)]));
        products.push((i, 0, vec![(i, 1)]));
    }
    for p in &spec.products {
        let l = p.left.resolve(&names, "algebra basis element")?;
        let r = p.right.resolve(&names, "algebra basis element")?;
        products.push((l, r, vector(&p.result, &names, "algebra basis element")?));
    }
    let table = AlgebraTable { modulus, basis: spec.basis.iter().map(|b| (b.name.clone(), b.degree)).collect(), products };
    validate_algebra(&table).context("algebra fails validation")
}

pub fn build_module(alg: &Algebra, spec: &ModuleSpec) -> Result<Module> {
    let modulus = if spec.reduced { alg.prime() } else { alg.modulus() };
    let n = spec.generators.len();
    let names: Vec<String> = spec.generators.iter().map(|g| g.name.clone()).collect();
    let mut action = vec![Mat::zero(n, n, modulus); alg.dim()];
    action[0] = Mat::identity(n, modulus);
    for a in &spec.action {
        let e = a.element.resolve(alg.names(), "algebra basis element")?;
        if e == 0 {
            bail!("the unit acts as the identity and takes no action entries");
        }
        let g = a.generator.resolve(&names, "module generator")?;
        for (k, c) in vector(&a.result, &names, "module generator")? {
            let v = (action[e].get(k, g) as i64 + c).rem_euclid(modulus as i64) as u32;
            action[e].set(k, g, v);
        }
    }
    Module::new(alg, spec.generators.iter().map(|g| (g.name.clone(), g.degree)).collect(), action, modulus).context("module fails validation")
}

pub fn module_spec(m: &Module) -> ModuleSpec {
    let alg = m.algebra();
    let mut action = Vec::new();
    for a in 1..alg.dim() {
        let mat = m.action(a);
        for g in 0..m.dim() {
            let col = mat.column(g);
            let result: Vec<TermSpec> = col.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| TermSpec { basis: Ref::Index(k), coeff: c as i64 }).collect();
            if !result.is_empty() {
                action.push(ActionSpec { element: Ref::Index(a), generator: Ref::Index(g), result });
            }
        }
    }
    ModuleSpec {
        generators: m.basis().into_iter().map(|(name, degree)| BasisSpec { name, degree }).collect(),
        action,
        reduced: alg.is_square() && m.is_reduced(),
    }
}

/// A matrix of the given shape from rows.
pub fn matrix(rows: &[Vec<i64>], r: usize, c: usize, modulus: u32, what: &str) -> Result<Mat> {
    let shape_ok = (r == 0 && rows.is_empty()) || (rows.len() == r && rows.iter().all(|x| x.len() == c));
    if !shape_ok {
        bail!("{what}: expected a {r}x{c} matrix");
    }
    if r == 0 || c == 0 {
        return Ok(Mat::zero(r, c, modulus));
    }
    let refs: Vec<&[i64]> = rows.iter().map(|x| x.as_slice()).collect();
    Ok(Mat::from_rows(&refs, modulus))
}

pub fn rows_of(m: &Mat) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&x| x as i64).collect()).collect()
}

pub fn build_object(inst: &TrackInstance, spec: &ObjectSpec) -> Result<PairObject> {
    let alg = inst.algebra();
    Ok(match spec {
        ObjectSpec::Free { free } => inst.b_object(&free_on_degrees(alg, free)),
        ObjectSpec::Plain { module } => inst.object(&build_module(alg, module)?)?,
        ObjectSpec::Pair { m1, m0, boundary } => {
            let m1 = build_module(alg, m1)?;
            let m0 = build_module(alg, m0)?;
            let b = matrix(boundary, m0.dim(), m1.dim(), m0.modulus(), "boundary")?;
            inst.pair(&m1, &m0, b)?
        }
    })
}

pub fn object_spec(inst: &TrackInstance, x: &PairObject) -> ObjectSpec {
    if let Some(d) = x.free_degrees() {
        return ObjectSpec::Free { free: d.to_vec() };
    }
    match inst.kind() {
        Kind::SquareRing => ObjectSpec::Plain { module: module_spec(x.m0()) },
        Kind::PairCat => ObjectSpec::Pair { m1: module_spec(x.m1()), m0: module_spec(x.m0()), boundary: rows_of(x.boundary()) },
    }
}

pub fn complex_spec(c: &SecondaryComplex) -> ComplexSpec {
    ComplexSpec {
        lo: c.lo,
        objects: c.objects.iter().map(|x| object_spec(&c.inst, x)).collect(),
        d: c.d.iter().map(|f| MapSpec { f1: rows_of(&f.f1), f0: rows_of(&f.f0) }).collect(),
        delta: c.delta.iter().map(rows_of).collect(),
    }
}

/// Rebuilds a complex; the result still has to pass `validate_secondary`.
pub fn build_complex(inst: &TrackInstance, spec: &ComplexSpec) -> Result<SecondaryComplex> {
    let objects: Vec<PairObject> = spec.objects.iter().enumerate().map(|(k, o)| build_object(inst, o).with_context(|| format!("object {}", spec.lo + k as i32))).collect::<Result<_>>()?;
    if objects.is_empty() || spec.d.len() + 1 != objects.len() || spec.delta.len() + 2 != objects.len().max(2) {
        bail!("complex with {} objects needs {} differentials and {} track data", objects.len(), objects.len().saturating_sub(1), objects.len().saturating_sub(2));
    }
    let mut d = Vec::new();
    for (k, f) in spec.d.iter().enumerate() {
        let (src, tgt) = (&objects[k + 1], &objects[k]);
        let n = spec.lo + k as i32;
        let f1 = matrix(&f.f1, tgt.m1().dim(), src.m1().dim(), tgt.m1().modulus(), &format!("d_{n}.f1"))?;
        let f0 = matrix(&f.f0, tgt.m0().dim(), src.m0().dim(), tgt.m0().modulus(), &format!("d_{n}.f0"))?;
        d.push(PairMap { source: src.clone(), target: tgt.clone(), f1, f0 });
    }
    let mut delta = Vec::new();
    for (k, rows) in spec.delta.iter().enumerate() {
        let (src, tgt) = (&objects[k + 2], &objects[k]);
        delta.push(matrix(rows, tgt.m1().dim(), src.m0().dim(), tgt.m1().modulus(), &format!("delta_{}", spec.lo + k as i32))?);
    }
    Ok(SecondaryComplex::new(inst, spec.lo, objects, d, delta)?)
}
