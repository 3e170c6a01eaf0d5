//! Schwinger-Dyson expansion of `e^{itH_N} A_N(a) e^{-itH_N}` in powers of `1/N`.
//!
//! The Duhamel series in the interaction picture is reorganized by loop
//! number: the `k`-th multiple commutator equals `sum_l N^{-l} A_N(G^{(k,l)})`
//! with `N`-independent coefficients `G^{(k,l)}`.

mod expansion;
mod quadrature;
mod radius;
mod terms;

pub use expansion::{
    heisenberg_exact, loop_expansion, loop_expansion_vs_exact, ExpansionOrder, ExpansionReport, ExpansionResult,
    TermNorm,
};
pub use quadrature::{nested_simplex, simplex_integrate, Accumulate, GaussLegendre};
pub use radius::{radius, RadiusParams, RadiusReport};
pub use terms::{
    elementary_term_count, free_evolve, g_term, second_quantized, Family, FreeEvolution, LoopTermRequest,
    PotentialMode,
};
