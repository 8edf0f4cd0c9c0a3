//! Spectral bookkeeping for thinly supported measures on flat tori and the
//! round 2-sphere.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; the only source of parallelism is the
//! [`Executor`] hook, which callers in a std environment can back with a
//! thread pool without changing any result.
//!
//! Layout:
//!
//! * [`spectrum`]: spectrum tables, coefficient sets, projections, `ℓ̂^p`
//!   sums and Weyl counts.
//! * [`torus`] and [`sphere`]: the two explicit models.
//! * [`grid`]: sample grids with exact synthesis/analysis.
//! * [`measures`]: thin-measure presets, closed-form and quadrature
//!   coefficients, Minkowski volume estimation.
//! * [`synthesis`]: windows, the low-pass multiplier `P_R`, stability and
//!   endpoint certificates.
//! * [`instances`]: seeded random inputs for harnesses.
//! * [`ratio`]: Fourier ratios, randomized sparse approximation,
//!   uncertainty certificates, eigenfunction growth and Kuznecov fits.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod exec;
pub mod grid;
pub mod instances;
pub mod measures;
pub mod numeric;
pub mod ratio;
pub mod rng;
pub mod spectrum;
pub mod sphere;
pub mod synthesis;
pub mod torus;

pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use num_complex::Complex64;
pub use spectrum::{
    enumerate_spectrum, lp_hat_norm, project, spectral_profile, weyl_check, BasisLabel, CoefficientSet, LpHatNorm,
    Manifold, ManifoldId, Path, ProfileEntry, Provenance, SpectralLine, SpectralProfile, SpectrumTable, WeylReport,
};
