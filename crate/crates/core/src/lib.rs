//! Ordered r-uniform hypergraph matchings, the interleaving patterns formed by
//! pairs of edges, and exact and constructive bounds on the largest sub-matching
//! in which every pair forms the same pattern.
//!
//! Modules build bottom-up: [`pattern`] and [`partition`] are pure
//! combinatorics, [`matching`] and [`es`] the two data models, [`clique`] the
//! exact measurement, [`extract`] and [`extremal`] the two directions of the
//! bound, and [`oracle`] exhaustive ground truth for small sizes.

pub mod clique;
pub mod error;
pub mod es;
pub mod extract;
pub mod extremal;
pub mod matching;
pub mod oracle;
pub mod partition;
pub mod pattern;

pub use clique::{full_report, largest_clique, CliqueReport};
pub use error::{Error, Result};
pub use es::PointSet;
pub use extract::{extract_clique, guaranteed_size, ExtractionResult};
pub use extremal::{build_extremal, build_r_partite, build_uniform};
pub use matching::{Matching, PartiteWitness};
pub use oracle::{exact_ramsey, theorem_sweep};
pub use partition::{BudgetTable, OrderedPartition, PartitionChain};
pub use pattern::{Pattern, Sign, SignFunction};
