//! Compiles the code listings of the guide in book/ as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/geodesics.md")]
pub mod geodesics {}

#[doc = include_str!("../../../book/src/existence.md")]
pub mod existence {}

#[doc = include_str!("../../../book/src/classify3d.md")]
pub mod classify3d {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
