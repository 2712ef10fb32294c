use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::pmf::{cell_count, normalize_in_place};
use super::{advance, Alphabet, Pmf, DEFAULT_CELL_LIMIT};
use crate::{Error, Result};

/// Conditional pmf: one row over `output_axes` per input symbol combination.
/// With no input axes there is a single row.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    input_axes: Vec<Alphabet>,
    output_axes: Vec<Alphabet>,
    table: Vec<f64>,
}

impl Channel {
    /// `table` holds the rows back to back, inputs in row-major order.
    pub fn new(
        input_axes: Vec<Alphabet>,
        output_axes: Vec<Alphabet>,
        mut table: Vec<f64>,
    ) -> Result<Self> {
        let mut all = input_axes.clone();
        all.extend(output_axes.iter().cloned());
        let cells = cell_count(&all, DEFAULT_CELL_LIMIT)?;
        if cells != table.len() {
            return Err(Error::AxisMismatch(format!(
                "axes describe {cells} cells, table has {}",
                table.len()
            )));
        }
        let out_len: usize = output_axes.iter().map(Alphabet::len).product();
        for (r, row) in table.chunks_mut(out_len).enumerate() {
            normalize_in_place(row, r * out_len)?;
        }
        Ok(Self {
            input_axes,
            output_axes,
            table,
        })
    }

    pub(crate) fn from_parts(
        input_axes: Vec<Alphabet>,
        output_axes: Vec<Alphabet>,
        table: Vec<f64>,
    ) -> Self {
        Self {
            input_axes,
            output_axes,
            table,
        }
    }

    pub fn from_rows(
        input_axes: Vec<Alphabet>,
        output_axes: Vec<Alphabet>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::new(input_axes, output_axes, rows.concat())
    }

    /// Channel from a weight function `f(input, output)`; each row is normalized.
    pub fn from_fn(
        input_axes: Vec<Alphabet>,
        output_axes: Vec<Alphabet>,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let in_dims: Vec<usize> = input_axes.iter().map(Alphabet::len).collect();
        let out_dims: Vec<usize> = output_axes.iter().map(Alphabet::len).collect();
        let mut all = input_axes.clone();
        all.extend(output_axes.iter().cloned());
        cell_count(&all, DEFAULT_CELL_LIMIT)?;
        let mut table = Vec::new();
        let mut ii = vec![0; in_dims.len()];
        loop {
            let start = table.len();
            let mut oi = vec![0; out_dims.len()];
            loop {
                table.push(f(&ii, &oi));
                if !advance(&mut oi, &out_dims) {
                    break;
                }
            }
            let row = &mut table[start..];
            let s: f64 = row.iter().sum();
            if !(s > 0.0) || row.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                return Err(Error::NotNormalized { sum: s });
            }
            for v in row.iter_mut() {
                *v /= s;
            }
            if !advance(&mut ii, &in_dims) {
                break;
            }
        }
        Ok(Self {
            input_axes,
            output_axes,
            table,
        })
    }

    /// Deterministic channel `output = f(input)`.
    pub fn deterministic(
        input_axes: Vec<Alphabet>,
        output_axes: Vec<Alphabet>,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<Self> {
        Self::from_fn(
            input_axes,
            output_axes,
            |i, o| if f(i) == o { 1.0 } else { 0.0 },
        )
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        let mut table = vec![0.0; k * k];
        for i in 0..k {
            table[i * k + i] = 1.0;
        }
        Self::from_parts(vec![alphabet.clone()], vec![alphabet], table)
    }

    /// Every row equal to `out`.
    pub fn constant(input_axes: Vec<Alphabet>, out: &Pmf) -> Self {
        let rows: usize = input_axes.iter().map(Alphabet::len).product();
        let mut table = Vec::with_capacity(rows * out.len());
        for _ in 0..rows {
            table.extend_from_slice(out.mass());
        }
        Self::from_parts(input_axes, out.axes().to_vec(), table)
    }

    pub fn input_axes(&self) -> &[Alphabet] {
        &self.input_axes
    }

    pub fn output_axes(&self) -> &[Alphabet] {
        &self.output_axes
    }

    pub fn input_len(&self) -> usize {
        self.input_axes.iter().map(Alphabet::len).product()
    }

    pub fn output_len(&self) -> usize {
        self.output_axes.iter().map(Alphabet::len).product()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let k = self.output_len();
        &self.table[r * k..(r + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.output_len())
    }

    /// Row `r` as a pmf over the output axes.
    pub fn row_pmf(&self, r: usize) -> Pmf {
        Pmf::from_parts(self.output_axes.clone(), self.row(r).to_vec())
    }

    /// Row-wise convex combination `lambda·self + (1−lambda)·other`.
    pub fn mix(&self, other: &Channel, lambda: f64) -> Result<Channel> {
        if self.input_axes != other.input_axes || self.output_axes != other.output_axes {
            return Err(Error::AxisMismatch(
                "mixing channels with different axes".into(),
            ));
        }
        Ok(Self::from_parts(
            self.input_axes.clone(),
            self.output_axes.clone(),
            self.table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        ))
    }

    /// Number of outputs with nonzero probability under some input.
    pub fn effective_outputs(&self) -> usize {
        let k = self.output_len();
        (0..k).filter(|&o| self.rows().any(|r| r[o] > 0.0)).count()
    }
}
