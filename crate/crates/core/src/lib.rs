//! Secondary homological algebra over finite coefficient rings.
//!
//! The crate is `no_std` (it needs `alloc`). Layers, bottom up:
//!
//! - [`exactla`]: dense exact linear algebra over Z/p and Z/p^2
//! - [`gralg`]: finite dimensional graded algebras, modules, free modules, Hom
//! - [`homalg`]: chain complexes, minimal resolutions, chain-map lifts, Ext, Yoneda products
//! - [`track`]: additive track categories (`PairCat`, `SquareRing`) and their calculus
//! - [`secondary`]: secondary chain complexes, b-exactness, secondary resolutions and lifts
//! - [`sext`]: the secondary differential d2, its audits, and secondary Ext
//! - [`fixtures`]: the shipped algebras, objects and seeded random instances
#![no_std]

extern crate alloc;

use alloc::string::String;

pub mod exactla;
pub mod fixtures;
pub mod gralg;
pub mod homalg;
pub mod secondary;
pub mod sext;
pub mod track;

pub use exactla::{kernel_image, solve_linear, Mat, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("modulus {0} is not p or p^2 for a prime p <= 97")]
    BadModulus(u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("algebra is not associative at ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("algebra unit fails at {0}")]
    NotUnital(String),
    #[error("grading violated by {0} * {1}")]
    Grading(String, String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("not a module map: {0}")]
    NotLinear(String),
    #[error("window too short: {0}")]
    Window(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("no solution: {0}")]
    Unsolvable(String),
    #[error("wrong instance: {0}")]
    WrongInstance(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("d2 composite nonzero at s = {s}: {witness}")]
    D2SquareNonzero { s: usize, witness: String },
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = core::result::Result<T, Error>;
