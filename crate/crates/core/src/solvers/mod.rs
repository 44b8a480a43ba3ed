//! Combinatorial engines shared by the counting, quantization and transport modules.

pub(crate) mod clique;
pub(crate) mod cover;
pub(crate) mod flow;
pub(crate) mod pmedian;

pub use cover::MassThreshold;
