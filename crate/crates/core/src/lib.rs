//! Geometry-of-numbers toolkit: successive minima, the coordinate-product
//! minimum `ν(Γ,ρ)`, exact lattice-point counts in aligned boxes and the error
//! bounds built from them, plus the continued-fraction machinery for the
//! inhomogeneous Diophantine counting application.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases below fix
//! the default 50-digit binary float.

pub mod bounds;
pub mod boxcount;
pub mod dio;
pub mod dual_compare;
pub mod error;
pub mod linalg;
pub mod nu;
pub mod reduction;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{BigFloat, Field, Real};

pub type Scalar = BigFloat;
pub type Matrix = linalg::MatrixN<Scalar>;
pub type ExactMatrix = linalg::MatrixN<num_rational::BigRational>;
pub type Lattice = linalg::LatticeBasis<Scalar>;
pub type Lattice64 = linalg::LatticeBasis<f64>;
pub type Box = boxcount::AlignedBox<Scalar>;

pub mod prelude {
    pub use crate::scalar::{BigFloat, Field, Real};
    pub use num_traits::{One, Signed, ToPrimitive, Zero};
}
