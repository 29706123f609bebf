//! Exact construction and verification of interpolatory dual and quasi-tight
//! framelet filter banks for integer dilation matrices.

pub mod cascade;
pub mod cli;
pub mod dense;
pub mod design;
pub mod dual;
pub mod error;
pub mod intmat;
pub mod io;
pub mod lattice;
pub mod laurent;
pub mod linalg;
pub mod moments;
pub mod quasitight;
pub mod smoothness;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use intmat::IntMatrix;
pub use lattice::DilationContext;
pub use laurent::{Filter, Point, Scalar, SupportBox};
