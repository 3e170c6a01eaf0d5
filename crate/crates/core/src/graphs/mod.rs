//! Graphs indexing the terms of the loop expansion, and the Raney and
//! Fuss-Catalan numbers that count them.
//!
//! The root vertex carries `p` slots per direction. Each added vertex joins
//! one or two of its slots of a single direction to free slots of opposite
//! direction on earlier vertices. Graphs related by relabeling the added
//! vertices form one structure.

mod counting;
mod enumerate;

pub use counting::{
    binom, catalan, elementary_term_bound, forest_count, loop_structure_bound, potential_structure_bound, raney,
    tree_structure_count,
};
pub use enumerate::{
    count_structures, distinct_structures, enumerate_admissible, enumerate_class, extended_class_size, permutations,
    AdmissibleGraph, Dir, Edge, EdgeLabel, GraphDoc, Limits, StructureCount, VertexKind,
};
