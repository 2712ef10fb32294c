use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::alphabet::same_axes;
use super::{advance, strides, Alphabet, Channel, CLAMP_TOLERANCE, NORMALIZATION_TOLERANCE};
use crate::{Error, Result};

/// Default cap on the number of cells in a dense table.
pub const DEFAULT_CELL_LIMIT: usize = 1_000_000;

/// Dense pmf over a product of alphabets, row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

/// Single-axis pmf over labels `0..len` from a raw table.
pub fn validate_pmf(mass: &[f64]) -> Result<Pmf> {
    if mass.is_empty() {
        return Err(Error::EmptyTable);
    }
    Pmf::new(vec![Alphabet::range(mass.len())], mass.to_vec())
}

/// Joint of `p_in` and `ch`, with `ch` reading all axes of `p_in`.
pub fn compose_channel(p_in: &Pmf, ch: &Channel) -> Result<Pmf> {
    let all: Vec<usize> = (0..p_in.ndim()).collect();
    p_in.extend(ch, &all)
}

pub(crate) fn cell_count(axes: &[Alphabet], limit: usize) -> Result<usize> {
    let mut cells: u128 = 1;
    for a in axes {
        cells = cells.saturating_mul(a.len() as u128);
    }
    if cells > limit as u128 {
        return Err(Error::TooLarge { cells, limit });
    }
    Ok(cells as usize)
}

/// Clamp tiny negatives and renormalize; shared by pmfs and channel rows.
pub(crate) fn normalize_in_place(mass: &mut [f64], offset: usize) -> Result<()> {
    let mut sum = 0.0;
    for (i, m) in mass.iter_mut().enumerate() {
        if !m.is_finite() {
            return Err(Error::NotNormalized { sum: *m });
        }
        if *m < 0.0 {
            if *m < -CLAMP_TOLERANCE {
                return Err(Error::NegativeMass {
                    index: offset + i,
                    value: *m,
                });
            }
            *m = 0.0;
        }
        sum += *m;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    if sum != 1.0 {
        for m in mass.iter_mut() {
            *m /= sum;
        }
    }
    Ok(())
}

impl Pmf {
    pub fn new(axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        Self::with_limit(axes, mass, DEFAULT_CELL_LIMIT)
    }

    pub fn with_limit(axes: Vec<Alphabet>, mut mass: Vec<f64>, limit: usize) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::EmptyTable);
        }
        let cells = cell_count(&axes, limit)?;
        if cells != mass.len() {
            return Err(Error::AxisMismatch(format!(
                "axes describe {cells} cells, table has {}",
                mass.len()
            )));
        }
        normalize_in_place(&mut mass, 0)?;
        Ok(Self { axes, mass })
    }

    /// Internal constructor for tables that are normalized by construction.
    pub(crate) fn from_parts(axes: Vec<Alphabet>, mass: Vec<f64>) -> Self {
        debug_assert_eq!(
            axes.iter().map(Alphabet::len).product::<usize>(),
            mass.len()
        );
        Self { axes, mass }
    }

    /// Pmf from a weight function, normalized by its total.
    pub fn from_fn(axes: Vec<Alphabet>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let dims: Vec<usize> = axes.iter().map(Alphabet::len).collect();
        cell_count(&axes, DEFAULT_CELL_LIMIT)?;
        let mut idx = vec![0; dims.len()];
        let mut mass = Vec::with_capacity(dims.iter().product());
        loop {
            mass.push(f(&idx));
            if !advance(&mut idx, &dims) {
                break;
            }
        }
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) || mass.iter().any(|m| *m < 0.0 || !m.is_finite()) {
            return Err(Error::NotNormalized { sum: total });
        }
        for m in &mut mass {
            *m /= total;
        }
        Ok(Self { axes, mass })
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        Self::from_fn(axes, |_| 1.0)
    }

    pub fn point(axes: Vec<Alphabet>, at: &[usize]) -> Result<Self> {
        for (a, &i) in axes.iter().zip(at) {
            a.check_index(i)?;
        }
        if at.len() != axes.len() {
            return Err(Error::AxisMismatch(format!(
                "point index has {} coordinates for {} axes",
                at.len(),
                axes.len()
            )));
        }
        Self::from_fn(axes, |i| if i == at { 1.0 } else { 0.0 })
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::len).collect()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let dims = self.dims();
        idx.iter().zip(&dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.mass[self.flat_index(idx)]
    }

    pub(crate) fn check_axes_list(&self, axes: &[usize]) -> Result<()> {
        for (k, &a) in axes.iter().enumerate() {
            if a >= self.ndim() {
                return Err(Error::AxisMismatch(format!(
                    "axis {a} out of range for a {}-axis pmf",
                    self.ndim()
                )));
            }
            if axes[..k].contains(&a) {
                return Err(Error::AxisMismatch(format!("axis {a} listed twice")));
            }
        }
        Ok(())
    }

    /// Raw marginal mass over `keep` (in that order), without validation.
    pub(crate) fn marginal_mass(&self, keep: &[usize]) -> Vec<f64> {
        let dims = self.dims();
        let kd: Vec<usize> = keep.iter().map(|&a| dims[a]).collect();
        let ks = strides(&kd);
        let mut out = vec![0.0; kd.iter().product()];
        let mut idx = vec![0; dims.len()];
        for &m in &self.mass {
            if m != 0.0 {
                let mut j = 0;
                for (k, &a) in keep.iter().enumerate() {
                    j += idx[a] * ks[k];
                }
                out[j] += m;
            }
            advance(&mut idx, &dims);
        }
        out
    }

    /// Marginal over the listed axes, reordered as listed.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Pmf> {
        self.check_axes_list(keep)?;
        let axes = keep.iter().map(|&a| self.axes[a].clone()).collect();
        Ok(Pmf::from_parts(axes, self.marginal_mass(keep)))
    }

    /// Channel from the listed axes to the remaining ones (in original order).
    /// Rows with zero mass are set uniform; they carry no probability.
    pub fn condition(&self, inputs: &[usize]) -> Result<Channel> {
        self.check_axes_list(inputs)?;
        let outputs: Vec<usize> = (0..self.ndim()).filter(|a| !inputs.contains(a)).collect();
        let mut order = inputs.to_vec();
        order.extend_from_slice(&outputs);
        let joint = self.marginal_mass(&order);
        let out_len: usize = outputs.iter().map(|&a| self.axes[a].len()).product();
        let mut table = joint;
        for row in table.chunks_mut(out_len) {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                for v in row.iter_mut() {
                    *v /= s;
                }
            } else {
                row.fill(1.0 / out_len as f64);
            }
        }
        Ok(Channel::from_parts(
            inputs.iter().map(|&a| self.axes[a].clone()).collect(),
            outputs.iter().map(|&a| self.axes[a].clone()).collect(),
            table,
        ))
    }

    /// Appends the outputs of `ch`, which reads the axes listed in `on`.
    pub fn extend(&self, ch: &Channel, on: &[usize]) -> Result<Pmf> {
        self.check_axes_list(on)?;
        let in_axes: Vec<Alphabet> = on.iter().map(|&a| self.axes[a].clone()).collect();
        same_axes(&in_axes, ch.input_axes(), "channel input")?;
        let mut axes = self.axes.clone();
        axes.extend(ch.output_axes().iter().cloned());
        cell_count(&axes, DEFAULT_CELL_LIMIT)?;
        let dims = self.dims();
        let in_dims: Vec<usize> = on.iter().map(|&a| dims[a]).collect();
        let is = strides(&in_dims);
        let out_len = ch.output_len();
        let mut mass = Vec::with_capacity(self.mass.len() * out_len);
        let mut idx = vec![0; dims.len()];
        for &m in &self.mass {
            let mut r = 0;
            for (k, &a) in on.iter().enumerate() {
                r += idx[a] * is[k];
            }
            mass.extend(ch.row(r).iter().map(|q| m * q));
            advance(&mut idx, &dims);
        }
        Ok(Pmf::from_parts(axes, mass))
    }

    /// Outer product; axes of `self` first.
    pub fn product(&self, other: &Pmf) -> Result<Pmf> {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        cell_count(&axes, DEFAULT_CELL_LIMIT)?;
        let mut mass = Vec::with_capacity(self.len() * other.len());
        for &a in &self.mass {
            mass.extend(other.mass.iter().map(|b| a * b));
        }
        Ok(Pmf::from_parts(axes, mass))
    }

    /// Product of the marginals over the two axis groups, reordered as `a ++ b`.
    pub fn product_of_marginals(&self, a: &[usize], b: &[usize]) -> Result<Pmf> {
        self.marginalize(a)?.product(&self.marginalize(b)?)
    }

    /// Convex combination `lambda·self + (1−lambda)·other`.
    pub fn mix(&self, other: &Pmf, lambda: f64) -> Result<Pmf> {
        same_axes(&self.axes, &other.axes, "mix")?;
        Ok(Pmf::from_parts(
            self.axes.clone(),
            self.mass
                .iter()
                .zip(&other.mass)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        ))
    }

    /// Multi-index of flat cell `i`.
    pub fn unravel(&self, mut i: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut idx = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            idx[k] = i % dims[k];
            i /= dims[k];
        }
        idx
    }
}
