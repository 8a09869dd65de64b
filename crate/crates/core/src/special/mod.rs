//! Special functions backing the kernel and zeta machinery. Everything here
//! is validated against an independent quadrature or closed-form oracle in
//! the unit tests before the rest of the crate is allowed to rely on it.

pub mod bessel_i;
pub mod bessel_j;
pub mod expint;
pub mod gamma;
pub mod zeta_fn;

pub use bessel_i::{bessel_i, bessel_i_scaled};
pub use bessel_j::{bessel_j_prime_zeros, bessel_j_zeros, bessel_jn, bessel_jn_prime, zeros_by_scan};
pub use expint::expint_e1;
pub use gamma::{gamma, ln_gamma, EULER_GAMMA};
pub use zeta_fn::{riemann_zeta, zeta_prime_zero};
