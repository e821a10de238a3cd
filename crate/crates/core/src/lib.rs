//! Partitioning, mapping and execution simulation for networked trapped-ion
//! QCCD machines.

pub mod arch;
pub mod circuit;
pub mod graph;
pub mod harness;
pub mod partition;
pub mod sim;
