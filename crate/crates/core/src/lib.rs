//! Bosonic mean-field limits on finite mode spaces.
//!
//! The crate works on the symmetric Fock space over `C^M`. Particle-number
//! sectors are represented densely in an occupation basis, and everything
//! else (Schwinger-Dyson terms, the classical Hartree flow, Egorov-type
//! comparisons) is built on top of that.
//!
//! Modules:
//! - [`fock`]: sector bases, quantization, contractions, Hamiltonians, marginals
//! - [`graphs`]: the graph growth process behind the loop expansion, Raney numbers
//! - [`dyson`]: free evolution, expansion terms, simplex quadrature, truncated expansions
//! - [`hartree`]: classical observables, Hartree flow, tree series
//! - [`dispersive`]: Kato-type integrals for Gaussians, Newton-potential angular factor
//! - [`lab`]: configs, seeded instances, sweeps, output

pub mod dispersive;
pub mod dyson;
mod error;
pub mod fock;
pub mod graphs;
pub mod hartree;
pub mod lab;
pub mod linalg;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
