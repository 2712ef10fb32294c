//! Finite-alphabet probability kernel: pmfs, channels, information measures,
//! joint types and typicality.

mod alphabet;
mod channel;
mod info;
mod pmf;
pub(crate) mod types;

pub use alphabet::Alphabet;
pub use channel::Channel;
pub(crate) use info::tv_raw as info_tv;
pub use info::{
    conditional_entropy, conditional_mutual_information, entropy, entropy_of, mutual_information,
    total_variation, LogBase,
};
pub use pmf::{compose_channel, validate_pmf, Pmf, DEFAULT_CELL_LIMIT};
pub use types::{is_typical, joint_type, tv_of_counts, JointType, Sequence};

/// Clamp tolerance for negative noise in input tables.
pub const CLAMP_TOLERANCE: f64 = 1e-12;
/// Normalization tolerance for input tables.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

pub(crate) fn strides(dims: &[usize]) -> alloc::vec::Vec<usize> {
    let mut s = alloc::vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Row-major multi-index iteration helper: advances `idx` in place, returns
/// false after the last index.
pub(crate) fn advance(idx: &mut [usize], dims: &[usize]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < dims[i] {
            return true;
        }
        idx[i] = 0;
    }
    false
}
