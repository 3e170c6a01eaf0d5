//! Symmetric Fock sectors over `C^M` and the quantization map.
//!
//! An operator `a` on the `p`-particle sector is quantized on the
//! `n`-particle sector as `(p!/N^p) binom(n, p) P+ (a (x) 1) P+`; that is
//! `N^{-p}` times the Wick-ordered second quantization of `a`.

pub(crate) mod basis;
mod hamiltonian;
mod marginal;
mod mode_space;
mod operator;

pub use basis::{check_budget, product_state, sector_basis, sector_dim, Occupation, SectorBasis, DENSE_BUDGET};
pub use hamiltonian::{build_hamiltonian, one_body_sum};
pub use marginal::{marginal, product_expectation, quantization_error, DensityMatrix, QuantizationError, SectorState};
pub use mode_space::{flatten, unflatten, ModeSpace, ModeSpaceDoc};
pub use operator::{
    contract, contracted_commutator, product_coefficient, quantization_prefactor, quantize,
    quantized_commutator_expansion, quantized_product_check, quantized_product_expansion, QuantizationParams,
    SectorOperator,
};
#[allow(unused_imports)]
pub(crate) use operator::contract_maps;
#[allow(unused_imports)]
pub(crate) use hamiltonian::lift;
