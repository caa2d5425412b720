//! Shipped algebras, objects and seeded random instances.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::exactla::Mat;
use crate::gralg::{free_on_degrees, validate_algebra, Algebra, AlgebraTable, Module};
use crate::track::{PairObject, TrackInstance};

fn table(modulus: u32, basis: &[(&str, i32)], products: &[(usize, usize, &[(usize, i64)])]) -> AlgebraTable {
    let n = basis.len();
    let mut prods: Vec<(usize, usize, Vec<(usize, i64)>)> = Vec::new();
    for i in 0..n {
        prods.push((0, i, vec![(i, 1)]));
        if i > 0 {
            prods.push((i, 0, vec![(i, 1)]));
        }
    }
    for (l, r, res) in products {
        prods.push((*l, *r, res.to_vec()));
    }
    AlgebraTable { modulus, basis: basis.iter().map(|(s, d)| (String::from(*s), *d)).collect(), products: prods }
}

/// `F_2[x]/(x^2)`, `|x| = 1`.
pub fn e1_table() -> AlgebraTable {
    table(2, &[("1", 0), ("x", 1)], &[])
}

pub fn e1() -> Algebra {
    validate_algebra(&e1_table()).expect("E1")
}

/// `F_p[x]/(x^2)`, `|x| = 1`.
pub fn dual_numbers(p: u32) -> Algebra {
    validate_algebra(&table(p, &[("1", 0), ("x", 1)], &[])).expect("dual numbers")
}

/// Exterior algebra `E(x, y)` over `F_2`, `|x| = |y| = 1`.
pub fn exterior_xy() -> Algebra {
    exterior_xy_over(2)
}

pub fn exterior_xy_over(p: u32) -> Algebra {
    let m = p as i64;
    validate_algebra(&table(
        p,
        &[("1", 0), ("x", 1), ("y", 1), ("xy", 2)],
        &[(1, 2, &[(3, 1)]), (2, 1, &[(3, m - 1)])],
    ))
    .expect("E(x,y)")
}

/// `Z/4[x]/(x^2)`, `|x| = 1`.
pub fn z4_lift_plain() -> Algebra {
    validate_algebra(&table(4, &[("1", 0), ("x", 1)], &[])).expect("Z/4[x]/(x^2)")
}

/// `Z/4[x]/(x^2 - 2)`; graded only modulo 2.
pub fn z4_lift_twisted() -> Algebra {
    validate_algebra(&table(4, &[("1", 0), ("x", 1)], &[(1, 1, &[(0, 2)])])).expect("Z/4[x]/(x^2-2)")
}

/// Rank-one free object with its generator in degree `d`.
pub fn square_rank_one(inst: &TrackInstance, d: i32) -> PairObject {
    inst.b_object(&free_on_degrees(inst.algebra(), &[d]))
}

/// `Λ̃/(x)`: the residue field lifted flatly over Z/p^2 (needs `x^2 = 0`).
pub fn flat_residue(inst: &TrackInstance) -> PairObject {
    let alg = inst.algebra();
    let m = alg.modulus();
    let n = alg.dim();
    let mut action = vec![Mat::zero(1, 1, m); n];
    action[0] = Mat::identity(1, m);
    let module = Module::new(alg, vec![(String::from("r"), 0)], action, m).expect("x^2 = 0 in the lift");
    inst.object(&module).expect("same algebra")
}

/// The residue field killed by p and by the augmentation ideal.
pub fn reduced_residue(inst: &TrackInstance) -> PairObject {
    inst.object(&Module::trivial(inst.algebra(), &[0])).expect("same algebra")
}

/// Modules of dimension at most 2 over a dual-number style algebra, with
/// generators in degrees 0 and 1.
fn small_modules(alg: &Algebra) -> Vec<Module> {
    let lambda = free_on_degrees(alg, &[0]).module().clone();
    let mut out = vec![
        Module::zero(alg),
        Module::trivial(alg, &[0]),
        Module::trivial(alg, &[1]),
        Module::trivial(alg, &[0, 1]),
        Module::trivial(alg, &[0, 0]),
    ];
    if lambda.dim() <= 2 {
        out.push(lambda);
    }
    out
}

/// `PairCat` objects of total dimension at most 2: the zero object first,
/// then `(0 -> k0)`, `(0 -> k1)`, `(k0 -> 0)`, `(0 -> Λ)`, and the pairs on
/// one-dimensional modules with every degree-0 boundary.
pub fn pair_objects_dim2(inst: &TrackInstance) -> Vec<PairObject> {
    let alg = inst.algebra();
    let mods = small_modules(alg);
    let z = Module::zero(alg);
    let k0 = Module::trivial(alg, &[0]);
    let k1 = Module::trivial(alg, &[1]);
    let p = alg.modulus();
    let mut out = vec![
        inst.zero_object(),
        inst.object(&k0).unwrap(),
        inst.object(&k1).unwrap(),
        inst.pair(&k0, &z, Mat::zero(0, 1, p)).unwrap(),
    ];
    if let Some(l) = mods.iter().find(|m| m.dim() == 2 && m.degrees() == [0, 1] && m.action(1) != &Mat::zero(2, 2, p)) {
        out.push(inst.object(l).unwrap());
    }
    out.push(inst.object(&Module::trivial(alg, &[0, 1])).unwrap());
    out.push(inst.pair(&k0, &k0, Mat::identity(1, p)).unwrap());
    out.push(inst.pair(&k0, &k0, Mat::zero(1, 1, p)).unwrap());
    out.push(inst.pair(&k1, &k0, Mat::zero(1, 1, p)).unwrap());
    out.push(inst.pair(&k1, &z, Mat::zero(0, 1, p)).unwrap());
    out
}

/// `·x : Λ[1] -> Λ`, a non-split pair with `π₀ = k` and `π₁ = k[2]`.
pub fn nonsplit_pair(inst: &TrackInstance) -> PairObject {
    let alg = inst.algebra();
    let l1 = free_on_degrees(alg, &[1]);
    let l0 = free_on_degrees(alg, &[0]);
    let mut x = vec![0; alg.dim()];
    x[1] = 1;
    let bd = l1.map_from_values(l0.module(), &[x]);
    inst.pair(l1.module(), l0.module(), bd).expect("·x is linear of degree 0")
}

/// `k[0] ⊕ k[2]` with zero boundary `k[2] -> k[0]`: the split pair with the
/// same `π₀` and `π₁` as [`nonsplit_pair`].
pub fn split_pair(inst: &TrackInstance) -> PairObject {
    let alg = inst.algebra();
    let k0 = Module::trivial(alg, &[0]);
    let k2 = Module::trivial(alg, &[2]);
    inst.pair(&k2, &k0, Mat::zero(1, 1, alg.modulus())).expect("zero boundary")
}

/// A seeded random small object: for `PairCat` a pair of sums of trivial and
/// free rank-one modules with a random degree-0 boundary; for `SquareRing`
/// a free module, a flat residue sum or a reduced module.
pub fn random_object(inst: &TrackInstance, seed: u64) -> PairObject {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let alg = inst.algebra();
    let pick = |rng: &mut rand_chacha::ChaCha8Rng, max: usize| -> Module {
        let parts = rng.gen_range(1..=max);
        let mut m = Module::zero(alg);
        for _ in 0..parts {
            let d = rng.gen_range(0..3);
            let piece = if rng.gen_bool(0.5) { Module::trivial(alg, &[d]) } else { free_on_degrees(alg, &[d]).module().clone() };
            if inst.kind() == crate::track::Kind::SquareRing && piece.modulus() != alg.modulus() {
                continue;
            }
            m = if m.dim() == 0 { piece } else { m.direct_sum(&piece) };
        }
        m
    };
    match inst.kind() {
        crate::track::Kind::PairCat => {
            let m1 = pick(&mut rng, 2);
            let m0 = pick(&mut rng, 2);
            let gens = inst.hom_generators(&m1, &m0);
            let mut bd = Mat::zero(m0.dim(), m1.dim(), alg.modulus());
            for g in gens {
                let k = rng.gen_range(0..alg.modulus());
                bd = bd.add(&g.scale(k));
            }
            inst.pair(&m1, &m0, bd).expect("combination of maps")
        }
        crate::track::Kind::SquareRing => match rng.gen_range(0..3) {
            0 => {
                let r = rng.gen_range(1..=2);
                let degs: Vec<i32> = (0..r).map(|_| rng.gen_range(0..3)).collect();
                inst.b_object(&free_on_degrees(alg, &degs))
            }
            1 => {
                let r = rng.gen_range(1..=2);
                let degs: Vec<i32> = (0..r).map(|_| rng.gen_range(0..3)).collect();
                inst.object(&Module::trivial(alg, &degs)).expect("same algebra")
            }
            _ => {
                let m = pick(&mut rng, 2);
                if m.dim() == 0 {
                    inst.zero_object()
                } else {
                    inst.object(&m).expect("same algebra")
                }
            }
        },
    }
}
