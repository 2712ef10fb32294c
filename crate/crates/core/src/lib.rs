//! Coordination capacity for finite-alphabet networks.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; randomized routines take explicit seeds.
//!
//! * [`prob`]: pmfs, channels, information measures, joint types.
//! * [`regions`]: closed-form regions and bound evaluators.
//! * [`auxopt`]: searches over auxiliary random variables.
//! * [`codesim`]: random-code simulators and the exact strong-coordination evaluator.
//! * [`rdproj`]: rate-distortion as a projection of the coordination region.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod auxopt;
pub mod codesim;
mod error;
pub mod fixtures;
pub(crate) mod math;
mod par;
pub mod prob;
pub mod rdproj;
pub mod regions;
pub mod seed;

pub use error::{Error, Result};
pub use prob::{Alphabet, Channel, JointType, LogBase, Pmf, Sequence};
