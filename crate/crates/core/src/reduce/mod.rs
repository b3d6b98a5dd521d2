//! Product decomposition, isometry group and holonomy.

pub mod decompose;
pub mod holonomy;
pub mod partition;
pub mod split;

pub use decompose::{
    decompose, decompose_with_order, factor_natred, find_split, go_manifold, isometry_group, Decomposition,
    Factor, SplitRecord,
};
pub use holonomy::{
    factor_projector, holonomy_generators, holonomy_generators_direct, holonomy_generators_in, GeneratorIndex,
    HolonomyGenerators,
};
pub use partition::{
    canonical_partition, enumerate_partition_pairs, format_partition, pair_from_tree, prufer_decode, Partition,
    PartitionPair,
};
pub use split::{check_split, factor_metric, indicator_matrix, product_metric, product_pair, Split, SplitFailure};
