//! Rate-distortion as a linear image of the coordination region: rates pass
//! through unchanged and each distortion is the expectation of a per-letter
//! cost under the coordinated joint. Also the two-node distortion-rate
//! function and the (p0, p1) grid over binary channels.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp, ln, LN_2};
use crate::prob::{
    compose_channel, mutual_information, Alphabet, Channel, JointType, LogBase, Pmf,
};
use crate::regions::RateVector;
use crate::{Error, Result};

/// Named per-letter costs over the action alphabet (row-major over `axes`).
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionSpec {
    axes: Vec<Alphabet>,
    names: Vec<String>,
    tables: Vec<Vec<f64>>,
}

impl DistortionSpec {
    pub fn new(axes: Vec<Alphabet>, names: Vec<String>, tables: Vec<Vec<f64>>) -> Result<Self> {
        let cells: usize = axes.iter().map(Alphabet::len).product();
        if names.len() != tables.len() || tables.is_empty() {
            return Err(Error::InvalidArgument(
                "one name per distortion table".into(),
            ));
        }
        for t in &tables {
            if t.len() != cells {
                return Err(Error::LengthMismatch {
                    expected: cells,
                    found: t.len(),
                });
            }
            if let Some((index, &value)) = t
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_finite() || **v < 0.0)
            {
                return Err(Error::NegativeMass { index, value });
            }
        }
        Ok(Self {
            axes,
            names,
            tables,
        })
    }

    /// Hamming cost between two axes over the same alphabet.
    pub fn hamming(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        let table = (0..k * k)
            .map(|c| if c / k == c % k { 0.0 } else { 1.0 })
            .collect();
        Self {
            axes: vec![alphabet.clone(), alphabet],
            names: vec!["hamming".into()],
            tables: vec![table],
        }
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }
}

/// Σ d·t over the cells of a joint pmf or type.
pub fn distortion_of_type(t: &Pmf, d: &[f64]) -> Result<f64> {
    if t.len() != d.len() {
        return Err(Error::AxisMismatch(alloc::format!(
            "distortion table has {} cells, joint has {}",
            d.len(),
            t.len()
        )));
    }
    Ok(t.mass().iter().zip(d).map(|(p, c)| p * c).sum())
}

/// Same as [`distortion_of_type`] from exact counts.
pub fn distortion_of_joint_type(t: &JointType, d: &[f64]) -> Result<f64> {
    if t.counts().len() != d.len() {
        return Err(Error::AxisMismatch(
            "distortion table does not match the joint type".into(),
        ));
    }
    let s: f64 = t.counts().iter().zip(d).map(|(&k, c)| k as f64 * c).sum();
    Ok(s / t.n() as f64)
}

/// The block map [I 0; 0 D]: an identity on the rates, and rows
/// d_j(x, a)·p0(x) acting on the vectorized coordination channel p(a|x).
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix {
    rates: usize,
    rows: Vec<Vec<f64>>,
}

impl ProjectionMatrix {
    pub fn new(rates: usize, p0: &Pmf, spec: &DistortionSpec) -> Result<Self> {
        let nx = p0.len();
        let cells: usize = spec.axes.iter().map(Alphabet::len).product();
        if cells % nx != 0 {
            return Err(Error::AxisMismatch(
                "distortion axes must start with the source axes".into(),
            ));
        }
        let rows = spec
            .tables
            .iter()
            .map(|t| {
                t.iter()
                    .enumerate()
                    .map(|(c, d)| d * p0.mass()[c / (cells / nx)])
                    .collect()
            })
            .collect();
        Ok(Self { rates, rows })
    }

    /// Rows of the distortion block.
    pub fn distortion_rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Full matrix, rates first.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let width = self.rates + self.rows.first().map_or(0, Vec::len);
        let mut out = Vec::with_capacity(self.rates + self.rows.len());
        for i in 0..self.rates {
            let mut r = vec![0.0; width];
            r[i] = 1.0;
            out.push(r);
        }
        for row in &self.rows {
            let mut r = vec![0.0; self.rates];
            r.extend_from_slice(row);
            out.push(r);
        }
        out
    }

    pub fn apply(&self, rates: &[f64], coordination: &Channel) -> Result<Vec<f64>> {
        if rates.len() != self.rates {
            return Err(Error::LengthMismatch {
                expected: self.rates,
                found: rates.len(),
            });
        }
        let mut out = rates.to_vec();
        for row in &self.rows {
            if row.len() != coordination.table().len() {
                return Err(Error::LengthMismatch {
                    expected: row.len(),
                    found: coordination.table().len(),
                });
            }
            out.push(
                row.iter()
                    .zip(coordination.table())
                    .map(|(a, b)| a * b)
                    .sum(),
            );
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RdPoint {
    pub rates: RateVector,
    pub distortions: Vec<f64>,
}

/// Image of a (rates, coordination) point: the rates and E d_j under
/// p0·coordination, in the order of `spec`.
pub fn project_point(
    rates: &RateVector,
    coordination: &Channel,
    p0: &Pmf,
    spec: &DistortionSpec,
) -> Result<RdPoint> {
    let joint = compose_channel(p0, coordination)?;
    let distortions = spec
        .tables
        .iter()
        .map(|d| distortion_of_type(&joint, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(RdPoint {
        rates: rates.clone(),
        distortions,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionRate {
    /// Least expected distortion with I(X;Y) ≤ rate.
    pub distortion: f64,
    /// I(X;Y) of the optimizing channel, bits.
    pub rate: f64,
    pub channel: Channel,
}

const BA_ITERATIONS: usize = 2000;
const BA_TOLERANCE: f64 = 1e-13;
const SLOPE_MAX: f64 = 1e4;

/// Blahut-Arimoto at slope `beta` (bits per unit distortion): returns the
/// test channel rows, I in bits and D.
fn blahut_arimoto(p0: &[f64], d: &[f64], ny: usize, beta: f64) -> (Vec<f64>, f64, f64) {
    let nx = p0.len();
    let mut q = vec![1.0 / ny as f64; ny];
    let mut w = vec![0.0; nx * ny];
    for _ in 0..BA_ITERATIONS {
        for x in 0..nx {
            let row = &mut w[x * ny..(x + 1) * ny];
            let dmin = (0..ny)
                .filter(|&y| q[y] > 0.0)
                .map(|y| d[x * ny + y])
                .fold(f64::INFINITY, f64::min);
            let mut s = 0.0;
            for y in 0..ny {
                row[y] = if q[y] > 0.0 {
                    q[y] * exp(-beta * LN_2 * (d[x * ny + y] - dmin))
                } else {
                    0.0
                };
                s += row[y];
            }
            row.iter_mut().for_each(|v| *v /= s);
        }
        let mut next = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                next[y] += p0[x] * w[x * ny + y];
            }
        }
        let delta: f64 = next.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum();
        q = next;
        if delta < BA_TOLERANCE {
            break;
        }
    }
    let (mut i, mut dist) = (0.0, 0.0);
    for x in 0..nx {
        for y in 0..ny {
            let v = w[x * ny + y];
            if v > 0.0 && p0[x] > 0.0 {
                i += p0[x] * v * ln(v / q[y]) / LN_2;
                dist += p0[x] * v * d[x * ny + y];
            }
        }
    }
    (w, i.max(0.0), dist)
}

/// D(R) for a two-node network: the least E d(X, Y) over channels p(y|x)
/// with I(X;Y) ≤ R, found by bisection on the Blahut-Arimoto slope.
/// `d` is a table over (X, Y) and `y_axis` names the action alphabet.
pub fn min_distortion_at_rate(
    p0: &Pmf,
    d: &[f64],
    y_axis: Alphabet,
    r: f64,
) -> Result<DistortionRate> {
    if p0.ndim() != 1 {
        return Err(Error::AxisMismatch(
            "distortion-rate needs a single source axis".into(),
        ));
    }
    let (nx, ny) = (p0.len(), y_axis.len());
    if d.len() != nx * ny {
        return Err(Error::LengthMismatch {
            expected: nx * ny,
            found: d.len(),
        });
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "rate must be nonnegative, got {r}"
        )));
    }
    let p = p0.mass();
    let finish = |w: Vec<f64>, i: f64, dist: f64| -> Result<DistortionRate> {
        Ok(DistortionRate {
            distortion: dist,
            rate: i,
            channel: Channel::new(p0.axes().to_vec(), vec![y_axis.clone()], w)?,
        })
    };
    let (w, i, dist) = blahut_arimoto(p, d, ny, 0.0);
    if i >= r {
        return finish(w, i, dist);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    loop {
        let (w, i, dist) = blahut_arimoto(p, d, ny, hi);
        if i >= r {
            break;
        }
        if hi >= SLOPE_MAX {
            // Rate exceeds what any finite slope needs: the zero-distortion corner.
            return finish(w, i, dist);
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if blahut_arimoto(p, d, ny, mid).1 > r {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    let (w, i, dist) = blahut_arimoto(p, d, ny, lo);
    finish(w, i, dist)
}

/// One binary channel P(Y=1|X=0) = p0, P(Y=1|X=1) = p1 of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridRow {
    pub p0: f64,
    pub p1: f64,
    pub i_bits: f64,
    pub distortion: f64,
    /// I(X;Y) ≤ rate, so the channel's distortion is achievable at `rate`.
    pub in_region: bool,
}

/// `resolution`×`resolution` grid of binary channels over [0,1]², for a
/// binary source with Hamming distortion. Rows run over p0 first.
pub fn hamming_grid(source: &Pmf, resolution: usize, rate: f64) -> Result<Vec<GridRow>> {
    if source.ndim() != 1 || source.len() != 2 {
        return Err(Error::AxisMismatch("the grid needs a binary source".into()));
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument(
            "grid resolution must be at least 2".into(),
        ));
    }
    let px = source.mass();
    let step = 1.0 / (resolution - 1) as f64;
    let rows = crate::par::map_range(resolution, |a| {
        let p0 = a as f64 * step;
        (0..resolution)
            .map(|b| {
                let p1 = b as f64 * step;
                let joint = [
                    px[0] * (1.0 - p0),
                    px[0] * p0,
                    px[1] * (1.0 - p1),
                    px[1] * p1,
                ];
                let i_bits = binary_mi(&joint);
                let distortion = joint[1] + joint[2];
                GridRow {
                    p0,
                    p1,
                    i_bits,
                    distortion,
                    in_region: i_bits <= rate,
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

fn binary_mi(j: &[f64; 4]) -> f64 {
    let px = [j[0] + j[1], j[2] + j[3]];
    let py = [j[0] + j[2], j[1] + j[3]];
    let mut i = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let v = j[2 * x + y];
            if v > 0.0 {
                i += v * ln(v / (px[x] * py[y]));
            }
        }
    }
    (i / LN_2).max(0.0)
}

/// Least distortion among in-region grid rows.
pub fn grid_min_distortion(rows: &[GridRow]) -> Option<f64> {
    rows.iter()
        .filter(|r| r.in_region)
        .map(|r| r.distortion)
        .reduce(f64::min)
}

/// I(X;Y) in bits of a two-node operating point; a convenience for callers
/// tracing the boundary.
pub fn channel_rate(p0: &Pmf, ch: &Channel) -> Result<f64> {
    let j = compose_channel(p0, ch)?;
    let k = p0.ndim();
    let a: Vec<usize> = (0..k).collect();
    let b: Vec<usize> = (k..j.ndim()).collect();
    mutual_information(&j, &a, &b, LogBase::Bits)
}
