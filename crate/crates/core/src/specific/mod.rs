//! Protocols specialised to particular function families.

pub mod abs;
pub mod convex;
pub mod eq;
pub mod gt;
pub mod heavy;
pub mod partition;
pub mod smooth;
pub mod sparse;
pub mod toeplitz;

pub use abs::{abs_decomposition, abs_protocol};
pub use convex::{convex_lipschitz_protocol, convex_to_measure, ConvexMeasure};
pub use eq::{bucket, eq_protocol};
pub use gt::{gt_decomposition, gt_protocol};
pub use heavy::{heavy_truncate, sparse_inner};
pub use partition::{common_refinement, interval_partition, PartitionSpec};
pub use smooth::smooth_protocol;
pub use sparse::sparse_protocol;
pub use toeplitz::toeplitz_protocol;
