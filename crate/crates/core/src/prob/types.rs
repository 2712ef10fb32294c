use alloc::vec;
use alloc::vec::Vec;

use super::alphabet::same_axes;
use super::{Alphabet, Pmf};
use crate::{Error, Result};

/// A sequence of symbol indices over an alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    alphabet: Alphabet,
    symbols: Vec<usize>,
}

impl Sequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                found: 0,
            });
        }
        for &s in &symbols {
            alphabet.check_index(s)?;
        }
        Ok(Self { alphabet, symbols })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Sequence) -> Result<Sequence> {
        same_axes(
            core::slice::from_ref(&self.alphabet),
            core::slice::from_ref(&other.alphabet),
            "concatenation",
        )?;
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Sequence {
            alphabet: self.alphabet.clone(),
            symbols,
        })
    }
}

/// Empirical pmf of aligned sequences, held as exact integer counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointType {
    axes: Vec<Alphabet>,
    counts: Vec<u64>,
    n: u64,
}

impl JointType {
    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn to_pmf(&self) -> Pmf {
        let n = self.n as f64;
        Pmf::from_parts(
            self.axes.clone(),
            self.counts.iter().map(|&c| c as f64 / n).collect(),
        )
    }

    /// Type of the concatenated sequences: counts add.
    pub fn merge(&self, other: &JointType) -> Result<JointType> {
        same_axes(&self.axes, &other.axes, "joint type merge")?;
        Ok(JointType {
            axes: self.axes.clone(),
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
            n: self.n + other.n,
        })
    }

    /// TV distance to `p`.
    pub fn tv_to(&self, p: &Pmf) -> Result<f64> {
        same_axes(&self.axes, p.axes(), "joint type vs pmf")?;
        Ok(tv_of_counts(&self.counts, self.n, p.mass()))
    }
}

/// TV between the type with `counts` (total `n`) and `mass`.
pub fn tv_of_counts(counts: &[u64], n: u64, mass: &[f64]) -> f64 {
    let nf = n as f64;
    let s: f64 = counts
        .iter()
        .zip(mass)
        .map(|(&c, &p)| (c as f64 / nf - p).abs())
        .sum();
    (0.5 * s).min(1.0)
}

pub(crate) fn count_cells(cols: &[&[usize]], dims: &[usize]) -> Vec<u64> {
    let mut counts = vec![0u64; dims.iter().product()];
    let n = cols.first().map_or(0, |c| c.len());
    for i in 0..n {
        let mut j = 0;
        for (c, &d) in cols.iter().zip(dims) {
            j = j * d + c[i];
        }
        counts[j] += 1;
    }
    counts
}

pub fn joint_type(seqs: &[&Sequence]) -> Result<JointType> {
    let first = seqs.first().ok_or(Error::EmptyTable)?;
    let n = first.len();
    for s in seqs {
        if s.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: s.len(),
            });
        }
    }
    let axes: Vec<Alphabet> = seqs.iter().map(|s| s.alphabet.clone()).collect();
    let dims: Vec<usize> = axes.iter().map(Alphabet::len).collect();
    let cols: Vec<&[usize]> = seqs.iter().map(|s| s.symbols()).collect();
    Ok(JointType {
        axes,
        counts: count_cells(&cols, &dims),
        n: n as u64,
    })
}

/// Whether the joint type of `seqs` is strictly within `epsilon` of `p` in TV.
pub fn is_typical(seqs: &[&Sequence], p: &Pmf, epsilon: f64) -> Result<bool> {
    Ok(joint_type(seqs)?.tv_to(p)? < epsilon)
}
