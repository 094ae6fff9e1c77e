//! Graph representations shared by every other module.

mod bitset;
mod cluster;
mod host;
pub mod io;
mod pair;
mod pattern;
mod simple;

pub use bitset::{BitSet, Ones};
pub use cluster::ClusterGraph;
pub use host::PartitionedHost;
pub use pair::BipartitePair;
pub use pattern::Pattern;
pub use simple::{Density, SimpleGraph};
