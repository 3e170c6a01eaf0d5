//! Classical mean-field dynamics on `C^M`: the Hartree equation, polynomial
//! observables `<psi^{(x)q}, a psi^{(x)p}>`, their Poisson algebra, and the
//! tree expansion of evolved observables.

mod flow;
mod observable;
mod tree;

pub use flow::{evolve, HartreeFlow, TrajectoryPoint, DEFAULT_TOL};
pub use observable::{observable, poisson_bracket, ClassicalObservable};
pub use tree::{tree_series, tree_series_terms, tree_term};
