//! Numerical tensor calculus for four-manifolds carrying (para)complex structures.

#![allow(clippy::needless_range_loop)]

pub mod complex;
pub mod config;
pub mod convert;
pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod linespace;
pub mod pde;
pub mod planefields;
pub mod products;
pub mod report;
pub mod sampling;
pub mod selfcheck;
pub mod spaceforms;
pub mod structures;
pub mod suites;
pub mod tensor;
pub mod topology;

pub use complex::{ComplexJet, Cx};
pub use error::{GeomError, Result};
pub use jet::{Jet2, NumError, Real, Tangent};
