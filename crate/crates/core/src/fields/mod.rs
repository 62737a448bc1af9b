//! Exact arithmetic in `F_{p^k}` and in rational function fields over it.

pub mod artin_schreier;
pub mod galois;
pub mod gcd;
pub mod parse;
pub mod poly;
pub mod rational;

pub use artin_schreier::{artin_schreier_image_test, pth_root, wp, ImageVerdict};
pub use galois::{GaloisField, GaloisScalar};
pub use poly::{Monomial, MultiPoly, MAX_VARS};
pub use rational::{FieldElement, FunctionField};
