//! Monte Carlo simulation and scaling analysis of wireless ad hoc networks
//! with random node failures.
//!
//! The crate models `n` nodes placed uniformly at random in the unit square,
//! each of which fails independently with probability `q`. On top of that it
//! provides:
//!
//! - [`deployment`]: seeded node placement, failure masks, and random
//!   source-destination pairing;
//! - [`topology`]: the geometric (distance-rule) graph over non-faulty nodes,
//!   connectivity testing, and critical-radius estimation;
//! - [`percolation`]: the cell tiling of the unit square and its
//!   site-percolation view;
//! - [`channel`]: physical-layer link models (path loss, log-normal
//!   shadowing, Rayleigh fading) and the SINR interference model;
//! - [`mac`]: the protocol interference model and the interference-free TDMA
//!   cell schedule;
//! - [`routing`]: multi-hop routing of flows along source-destination lines
//!   with detours around empty cells, cell loads, rate, and delay;
//! - [`analysis`]: closed-form capacity/delay scaling values, capacity-loss
//!   ratios, and redundancy-node solvers.
//!
//! Every random quantity is a pure function of a [`seed::SeedSpec`], so
//! experiments are reproducible bit-for-bit regardless of execution order or
//! thread count.

pub mod analysis;
pub mod channel;
pub mod deployment;
pub mod geom;
pub mod mac;
pub mod percolation;
pub mod routing;
pub mod seed;
pub mod topology;

mod error;

pub use error::{Error, Result};
pub use geom::Point;
pub use seed::SeedSpec;
