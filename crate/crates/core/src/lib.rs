//! Plane waves in anisotropic linear viscoelastic solids with Prony-series
//! relaxation tensors.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`linalg`]: a small dense complex-matrix kernel (Hermitian and Schur
//!   decompositions, spectral norm, matrix exponential, and the principal
//!   matrix square root computed by an eigen/Schur route and by a
//!   Stieltjes-type integral).
//! * [`bernstein`]: matrix-valued complete Bernstein and Stieltjes functions
//!   with discrete measures, the Pick test, functional calculus and measure
//!   recovery by boundary-value inversion.
//! * [`medium`]: Voigt-stored relaxation tensors, the Laplace-domain modulus
//!   `Q(p)` and the acoustic tensor.
//! * [`planewave`]: the wave operator `K_n(p) = sqrt(rho) p Q_n(p)^{-1/2}`,
//!   modal solutions of the dispersion equation, the matrix descriptor
//!   `K_n(-i w) = -i w C_n + A_n`, propagators and the Zassenhaus split.
//! * [`energyflux`]: inhomogeneous plane waves, the time-averaged energy flux
//!   and its time-domain oracle.
//! * [`cpd`]: causal positive definiteness checks in time and frequency.
#![no_std]

extern crate alloc;

pub mod bernstein;
pub mod cpd;
pub mod energyflux;
mod error;
pub mod linalg;
pub mod medium;
pub mod planewave;
pub mod quad;
pub mod reference;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
