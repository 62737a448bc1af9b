//! Exact computations with quaternion and symbol p-algebras over fields of
//! characteristic p: rank-two valuations and w-invariants, splitting
//! witnesses, Pfister forms, and checkable linkage certificates.

pub mod algebra;
pub mod certificate;
pub mod error;
pub mod fields;
pub mod linkage;
pub mod qforms;
pub mod search;
pub mod suite;
pub mod valuation;

pub use error::{Error, Result};
