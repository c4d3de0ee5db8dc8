//! Numerical toolkit for non-holomorphic Eisenstein series on Hilbert modular
//! groups `SL(2, o_K)` over class-number-one quadratic fields (and over `Q`).
//!
//! The pieces build on each other in this order:
//!
//! * [`fields`]: exact field arithmetic, units, embeddings, ideal counts.
//! * [`specfun`]: complex gamma and modified Bessel `K` functions.
//! * [`zeta`]: Dedekind zeta functions, completions, the scattering factor.
//! * [`geometry`]: points of `H^{r1} x H3^{r2}`, the group action, cusp heights
//!   and cusp-local coordinates.
//! * [`eisenstein`]: direct, Fourier and truncated evaluation of `E(z, s)`,
//!   plus the closed-form identities used to validate them.
//! * [`equidist`]: cusp-section averages of incomplete Eisenstein series and
//!   the decay fits built from them.

pub mod config;
pub mod eisenstein;
pub mod equidist;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod quadrature;
pub mod specfun;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
