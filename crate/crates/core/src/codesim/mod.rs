//! Monte Carlo simulation of the random-coding achievability schemes, and the
//! exact small-n evaluator for strong coordination without communication.
//!
//! Codes are deterministic given the per-trial seed, and every scheme codes
//! the whole block at once with 2^⌈nR⌉ codewords. Encoders take the first
//! codeword passing a conditional-typicality test, so only the selected
//! codeword (and, with binning, the first decoder match) affects the
//! outcome. The simulators therefore never list the codebook: they draw the
//! selected codewords from their exact law under the random-codebook
//! ensemble, computed by dynamic programming over per-symbol count vectors.

mod code;
mod ensemble;
mod exact;
mod markov;
mod schemes;

use alloc::vec::Vec;

pub use exact::{no_comm_strong_exact_tv, no_comm_strong_exact_tv_with, ExactConfig, ExactMode};
pub use markov::{corner_types, strong_markov_corner, strong_markov_trial};
pub use schemes::{
    cascade_simulate, cascade_trial, side_info_simulate, side_info_trial, two_node_simulate,
    two_node_trial, TrialDetail,
};

use crate::{Error, Result};

/// Cap on the index bits of a codebook that is actually listed.
pub const MAX_CODEBOOK_BITS: u32 = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub trials: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n: usize, trials: usize, epsilon: f64, seed: u64) -> Self {
        Self {
            n,
            trials,
            epsilon,
            seed,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n == 0 || self.trials == 0 || !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "need n >= 1, trials >= 1, epsilon > 0 (got n={}, trials={}, epsilon={})",
                self.n,
                self.trials,
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub index: usize,
    /// TV between the joint type of all actions and the target joint.
    pub tv: f64,
    /// Some sub-block had no typical codeword.
    pub encoder_fail: bool,
    /// Some sub-block's decoder settled on a codeword other than the encoder's.
    pub decoder_ambiguous: bool,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    /// A trial succeeds when its TV is below this (and decoding, if any, is right).
    pub threshold: f64,
    pub outcomes: Vec<TrialOutcome>,
}

impl TrialReport {
    pub fn mean_tv(&self) -> f64 {
        self.outcomes.iter().map(|o| o.tv).sum::<f64>() / self.outcomes.len() as f64
    }

    pub fn median_tv(&self) -> f64 {
        let mut v: Vec<f64> = self.outcomes.iter().map(|o| o.tv).collect();
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        if v.len() % 2 == 1 {
            v[m]
        } else {
            0.5 * (v[m - 1] + v[m])
        }
    }

    pub fn success_fraction(&self) -> f64 {
        self.outcomes.iter().filter(|o| o.success).count() as f64 / self.outcomes.len() as f64
    }

    pub fn encoder_failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.encoder_fail).count()
    }
}

const TAG_TRIAL: u64 = 0x7121;

pub(crate) fn trial_seed(master: u64, index: usize) -> u64 {
    crate::seed::derive(master, TAG_TRIAL, index as u64)
}
