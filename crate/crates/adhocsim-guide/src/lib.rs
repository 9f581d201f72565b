//! The book chapters from `book/src`, embedded as rustdoc so that
//! `cargo test --doc` compiles and runs every code snippet. One module per
//! chapter keeps test failures attributable to their chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/deployment.md")]
pub mod deployment {}

#[doc = include_str!("../../../book/src/connectivity.md")]
pub mod connectivity {}

#[doc = include_str!("../../../book/src/percolation.md")]
pub mod percolation {}

#[doc = include_str!("../../../book/src/scheduling.md")]
pub mod scheduling {}

#[doc = include_str!("../../../book/src/routing.md")]
pub mod routing {}

#[doc = include_str!("../../../book/src/channel.md")]
pub mod channel {}

#[doc = include_str!("../../../book/src/scaling_laws.md")]
pub mod scaling_laws {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
