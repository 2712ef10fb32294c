use alloc::format;
use alloc::vec::Vec;

use super::alphabet::same_axes;
use super::Pmf;
use crate::math::{plogp, LN_2};
use crate::{Error, Result};

/// Logarithm base for information quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// Multiplier converting bits into this base.
    pub fn from_bits(self) -> f64 {
        match self {
            LogBase::Bits => 1.0,
            LogBase::Nats => LN_2,
        }
    }

    pub fn from_nats(self) -> f64 {
        match self {
            LogBase::Bits => 1.0 / LN_2,
            LogBase::Nats => 1.0,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }
}

pub(crate) fn entropy_bits(mass: &[f64]) -> f64 {
    mass.iter().map(|&p| plogp(p)).sum()
}

pub fn entropy(p: &Pmf, base: LogBase) -> f64 {
    entropy_bits(p.mass()) * base.from_bits()
}

/// Entropy of the marginal over `axes`.
pub fn entropy_of(p: &Pmf, axes: &[usize], base: LogBase) -> Result<f64> {
    p.check_axes_list(axes)?;
    Ok(entropy_bits(&p.marginal_mass(axes)) * base.from_bits())
}

fn disjoint(p: &Pmf, groups: &[&[usize]]) -> Result<()> {
    let all: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    p.check_axes_list(&all).map_err(|_| {
        Error::AxisMismatch(format!(
            "axis groups {groups:?} overlap or are out of range"
        ))
    })
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

/// H(A|B).
pub fn conditional_entropy(p: &Pmf, a: &[usize], b: &[usize], base: LogBase) -> Result<f64> {
    disjoint(p, &[a, b])?;
    let h = entropy_bits(&p.marginal_mass(&union(a, b))) - entropy_bits(&p.marginal_mass(b));
    Ok(h.max(0.0) * base.from_bits())
}

/// I(A;B) = H(A) + H(B) − H(A,B), clamped at zero.
pub fn mutual_information(p: &Pmf, a: &[usize], b: &[usize], base: LogBase) -> Result<f64> {
    disjoint(p, &[a, b])?;
    let i = entropy_bits(&p.marginal_mass(a)) + entropy_bits(&p.marginal_mass(b))
        - entropy_bits(&p.marginal_mass(&union(a, b)));
    Ok(i.max(0.0) * base.from_bits())
}

/// I(A;B|C) = H(A,C) + H(B,C) − H(A,B,C) − H(C), clamped at zero.
pub fn conditional_mutual_information(
    p: &Pmf,
    a: &[usize],
    b: &[usize],
    c: &[usize],
    base: LogBase,
) -> Result<f64> {
    disjoint(p, &[a, b, c])?;
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    let i = entropy_bits(&p.marginal_mass(&ac)) + entropy_bits(&p.marginal_mass(&bc))
        - entropy_bits(&p.marginal_mass(&abc))
        - entropy_bits(&p.marginal_mass(c));
    Ok(i.max(0.0) * base.from_bits())
}

/// Half the L1 distance.
pub fn total_variation(p: &Pmf, q: &Pmf) -> Result<f64> {
    same_axes(p.axes(), q.axes(), "total variation")?;
    Ok(tv_raw(p.mass(), q.mass()))
}

pub(crate) fn tv_raw(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    (0.5 * s).min(1.0)
}
