//! Symbolic computation for graph products of groups: canonical normal forms
//! and word arithmetic under the rewriting moves, cyclic and head/tail
//! decompositions, a desk-scale equation lab over free products, and a
//! classifier deciding Polish-admissibility conditions for symbolically
//! described instances.

pub mod cardinal;
pub mod classify;
pub mod descriptor;
pub mod equations;
pub mod graph;
pub mod group;
pub mod omega;
pub mod oracle;
pub mod pyramid;
pub mod words;

pub use cardinal::{card_predicates, card_sum, CardMode, CardValue, SymbolicCardinal};
pub use classify::{
    classify_abelian_sum, classify_countable_factors, classify_instance, check_necessary_conditions,
    check_restricted_admissibility, compute_partition, free_product_guard, FactorSpec, Outcome, PartitionA,
    SymbolicInstance, Verdict,
};
pub use descriptor::{AbelianDescriptor, CountableDecl, CountablePart, SIndex};
pub use graph::{CliqueClass, Graph, SymbolicGraph};
pub use group::{ConcreteGroup, FiniteTable, GroupElem};
pub use pyramid::{
    clg, csp, cyclically_reduce, is_ab_cyclically_reduced, is_cyclically_reduced,
    is_weakly_cyclically_reduced, pyramid_decompose, PyramidDecomposition,
};
pub use words::{NormalForm, Presentation, Syllable, Word};
