//! Computing with cones of positive linear maps `M_n → M_m` through their
//! Choi matrices.
//!
//! * [`linalg`]: dense complex matrices, tensor bookkeeping, Hermitian
//!   eigendecomposition and PSD tests.
//! * [`choi`]: maps stored as Choi matrices, adjoints, transpose-conjugates,
//!   compositions and the dual functional.
//! * [`cones`]: membership oracles for the CP, copositive, PPT, decomposable,
//!   entanglement-breaking and positive cones, with certificates.
//! * [`harness`]: randomized verification of the duality relations between
//!   these cones.
//! * [`mapfile`]: the JSON matrix/map file format.
//!
//! All numerics are generic over [`Real`] (`f32`, `f64`); the aliases at the
//! crate root fix the double-precision instantiation used by the harness and CLI.

pub mod choi;
pub mod cones;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod linalg;
pub mod mapfile;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use choi::{DualFunctional, MapRep};
pub use linalg::{CMatrix, Dims, HermSpectrum};
pub use scalar::Real;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type CMatrix32 = CMatrix<f32>;
pub type MapRep64 = MapRep<f64>;
pub type MapRep32 = MapRep<f32>;
