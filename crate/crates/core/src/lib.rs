//! Finite-time-guaranteed Monte Carlo tree search for POMDPs.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the
//! algorithmic pieces:
//!
//! * [`pomdp`]: generative-model trait, particle beliefs, discounted returns
//!   and the bootstrap particle filter used between acting steps.
//! * [`envs`]: the modified and original LightDark 1D benchmarks and small
//!   tabular POMDPs.
//! * [`oracle`]: exhaustive finite-horizon optimal values for tabular POMDPs.
//! * [`bonus`], [`pomcp`]: the polynomial exploration bonus and
//!   Corrected-POMCP for discrete observations.
//! * [`voronoi`], [`pomcpow`]: nearest-center observation partitions,
//!   Voro-POMCPOW and the raw-observation POMCPOW baseline.
//! * [`bounds`]: parameter ladders, tail bounds and the combined
//!   estimation + partition certificate.
//!
//! IO, configuration and the benchmark CLI live in the `ftpomdp` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bonus;
pub mod bounds;
pub mod envs;
mod error;
pub(crate) mod math;
pub mod oracle;
pub mod pomcp;
pub mod pomcpow;
pub mod pomdp;
pub mod rng;
pub mod voronoi;

pub use error::{Error, Result};
pub use pomdp::{ActionId, GenerativeModel, ParticleBelief, PlanningConfig, Step};
pub use rng::RandomStream;
