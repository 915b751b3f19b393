//! Computes the representing measure of f(t) = Tr exp(A - tB) for a pair of
//! Hermitian matrices: n point masses at the eigenvalues of B plus a
//! continuous density on the open spectral interval, both obtained from the
//! eigenvalue branches of the pencil det(lambda I - A + zeta B) = 0 tracked
//! around a circle contour. The companion verification module reconstructs
//! f from the measure and checks non-negativity, closure and residual
//! identities at configurable tolerances.

pub mod assign;
pub mod config;
pub mod contour;
pub mod eigen;
pub mod error;
pub mod export;
pub mod linalg;
pub mod measure;
pub mod pair;
pub mod reduce;
pub mod verify;

pub use config::RunConfig;
pub use contour::SpectralContour;
pub use error::{Error, Result};
pub use linalg::{C64, CMatrix};
pub use measure::MeasureRepresentation;
pub use pair::HermitianPair;
pub use reduce::ReducedPair;
pub use verify::VerificationReport;
