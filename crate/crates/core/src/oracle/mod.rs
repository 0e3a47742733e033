//! Exact combinatorial oracles: pair partitions and Wick moments, closed
//! walks and their profiles, equivalence classes, the Dyck encoding, and
//! exact expected moments for small band matrices.

pub mod dyck;
pub mod expected;
pub mod gaussian_lemmas;
pub mod lemmas;
pub mod moments;
pub mod partitions;
pub mod tuples;
pub mod wick;

pub use self::dyck::{dyck_check, enumerate_dyck_colorings, is_dyck_path, standard_coloring, ColoringCount, DyckCheck};
pub use self::expected::{exact_expected_moment, rademacher_enumerated_moment};
pub use self::gaussian_lemmas::{verify_gaussian_lemmas, GaussianCheck, GaussianLemmaReport, GaussianLemmaRow};
pub use self::lemmas::{
    verify_count_bounds, verify_paired_bounds, verify_vertex_bounds, ClassEntry, CountBoundReport,
    EquivalenceClassTable, LemmaViolation, PairedBoundReport, VertexBoundReport,
};
pub use self::moments::{
    moment_oracle, tuple_factors, CurieWeissMoments, EntryMoments, GaussianMoments, WignerMoments,
};
pub use self::partitions::{enumerate_pair_partitions, pair_partition_count, visit_pair_partitions, PairPartition};
pub use self::tuples::{is_relevant_tuple, superpose, tuple_graph, TupleGraph, TupleOdometer};
pub use self::wick::{equicorrelated_moment, wick_mixed_moment, wick_sum};
