//! Exact machinery for affine complex reflection groups: cyclotomic
//! arithmetic, group closure, cyclic products, invariant lattices,
//! H¹ and cocycle checks.

pub mod error;
pub mod rational;
pub mod cyclotomic;
pub mod linalg;
pub mod zmodule;
pub mod group;
pub mod graph;
pub mod catalog;
pub mod lattice_theory;
pub mod cohomology;
pub mod affine;

pub use cyclotomic::CycloNum;
pub use error::{Error, Result};
pub use linalg::{CMat, CVec, Reflection};
pub use rational::Rational;
