// Per-position samplers and conditional tables shared by the schemes.

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand_chacha::ChaCha8Rng;

use crate::prob::Pmf;

/// Per-position sampler: generator `g` is used where the conditioning
/// sequence holds `g` (or generator 0 when unconditioned).
pub(crate) struct Generators {
    dists: Vec<Option<WeightedIndex<f64>>>,
}

impl Generators {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Self {
            dists: rows.iter().map(|r| WeightedIndex::new(r).ok()).collect(),
        }
    }

    pub fn single(mass: &[f64]) -> Self {
        Self::from_rows(&[mass.to_vec()])
    }

    pub fn sample(&self, g: usize, rng: &mut ChaCha8Rng) -> usize {
        match &self.dists[g] {
            Some(d) => d.sample(rng),
            // Unreachable conditioning symbol; any output will do.
            None => 0,
        }
    }
}

/// p(out | cond) from a joint whose last axis is the output, with `None`
/// rows for conditioning cells of zero probability.
pub(crate) struct CondTable {
    pub out: usize,
    pub rows: Vec<Option<Vec<f64>>>,
}

impl CondTable {
    pub fn from_joint(p: &Pmf) -> Self {
        let out = *p.dims().last().expect("at least one axis");
        let rows = p
            .mass()
            .chunks(out)
            .map(|r| {
                let s: f64 = r.iter().sum();
                (s > 0.0).then(|| r.iter().map(|v| v / s).collect())
            })
            .collect();
        Self { out, rows }
    }

    pub fn generators(&self) -> Generators {
        let uniform = vec![1.0; self.out];
        Generators::from_rows(
            &self
                .rows
                .iter()
                .map(|r| r.clone().unwrap_or_else(|| uniform.clone()))
                .collect::<Vec<_>>(),
        )
    }
}

/// Flattened conditioning cell per position of a sub-block.
pub(crate) fn cells(cols: &[&[usize]], dims: &[usize], start: usize, len: usize) -> Vec<usize> {
    (start..start + len)
        .map(|i| cols.iter().zip(dims).fold(0, |acc, (c, &d)| acc * d + c[i]))
        .collect()
}
