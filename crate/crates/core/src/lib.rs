//! Numerical spectral geometry of flat cones over circle quotients: link
//! spectra, cone Green kernels with absolute/relative boundary conditions,
//! conical and orbifold heat kernels, zeta-regularized analytic torsion, and
//! the finite-rank cohomology bookkeeping tying the two pictures together.
//!
//! Standing assumptions, taken as given rather than re-proved:
//!
//! - links are sphere quotients S^m/G by free actions, m odd, and the flat
//!   bundle is an honest rank-one bundle with trivial isotropy action on
//!   fibers (higher rank would enter as a tensor factor on multiplicities);
//! - the de Rham complex on the punctured cone admits a unique ideal
//!   boundary condition: the minimal and maximal closed extensions of the
//!   differential coincide, so "the" conical Laplacian is well defined;
//! - the middle-degree link cohomology H^{m/2}(N) vanishes; with m odd the
//!   degree m/2 is not an integer, so the condition holds vacuously and is
//!   never checked at runtime.

pub mod cohomology;
pub mod cone;
pub mod error;
pub mod green;
pub mod green_full;
pub mod heat;
pub mod special;
pub mod spectrum;
pub mod spindle;
pub mod util;
pub mod zeta;

pub use error::{Error, Result};
