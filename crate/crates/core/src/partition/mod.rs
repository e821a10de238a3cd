//! Balanced Kernighan-Lin partitioning, hierarchical module/QCCD splitting and
//! placement of sub-partitions onto QCCDs.

mod hierarchy;
mod kl;
mod mapping;

use thiserror::Error;

use crate::graph::GraphError;

pub use hierarchy::{
    comm_seeded_init, hierarchical_partition, natural_order_tree, ModulePartition, PartitionConfig, PartitionTree,
    SubInit, SubPartition,
};
pub use kl::{balanced_seed_splits, cut_weight, kl_bipartition, kl_multistart, partition_k_way, Bipartition};
pub use mapping::{natural_map, switch_aware_map, MappingAssignment, Placement};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("invalid partition config: {0}")]
    Config(String),
    #[error("invalid seed assignment: {0}")]
    Seed(String),
    #[error("module {module} sub-partition {sub} holds {size} qubits, QCCD {qccd} takes {capacity}")]
    OverCapacity {
        module: usize,
        sub: usize,
        qccd: usize,
        size: usize,
        capacity: usize,
    },
    #[error("mapping: {0}")]
    Mapping(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
