//! Mechanical co-design toolkit for a vertical flexible jumper ("pogo stick"):
//! hybrid spring-leg dynamics, an input-shaped stutter-jump command, a one-step
//! design environment, a from-scratch TD3 learner over the design parameters,
//! and a brute-force design-space sweep oracle.
//!
//! The crate is `no_std` + `alloc`; all floating-point transcendentals go through
//! [`libm`] so results are bit-identical on any host.

#![no_std]
// Validation deliberately writes `!(x > 0.0)` so that NaN fails the check
// along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod command;
pub mod env;
pub mod error;
pub mod mlp;
pub mod params;
pub mod sim;
pub mod sweep;
pub mod td3;

pub use error::Error;
pub use params::DesignParams;
pub use sim::{simulate, PogoState, SimConfig, Trajectory};
