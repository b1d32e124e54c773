//! Arbitrary-precision q-Borel–Laplace summation of divergent q-series.
//!
//! The library covers q-special functions ([`qcore`]), exact coefficient
//! engines ([`coeffs`]), q-Borel transforms and Padé continuation
//! ([`qborel`]), q-Laplace transforms ([`qlaplace`]), the q-hyperterminant
//! ([`hyperterm`]), Stokes multipliers ([`stokes`]), exponentially improved
//! expansions ([`expimp`]) and the pole lattice of the order-one solution of
//! q-Painlevé I ([`explorer`]).
//!
//! Numeric routines are generic over [`Real`]; use [`Mp`] for arbitrary
//! precision and `f64` for quick evaluations.

pub mod coeffs;
pub mod error;
pub mod expimp;
pub mod explorer;
pub mod hyperterm;
pub mod poly;
pub mod precision;
pub mod linalg;
pub mod qborel;
pub mod qcore;
pub mod qlaplace;
pub mod quad;
pub mod scalar;
pub mod special;
pub mod stokes;

pub use error::{Error, Result};
pub use precision::PrecisionContext;
pub use scalar::{ComplexExt, Mp, Real};

/// Complex number at arbitrary precision.
pub type Mpc = num_complex::Complex<Mp>;
/// Complex number at hardware precision.
pub type C64 = num_complex::Complex<f64>;
pub type QBaseMp = qcore::QBase<Mp>;
pub type QBase64 = qcore::QBase<f64>;
pub type SurfacePointMp = qcore::SurfacePoint<Mp>;
pub type SurfacePoint64 = qcore::SurfacePoint<f64>;
