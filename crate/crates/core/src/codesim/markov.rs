// Empirical check of the strong Markov lemma: with (xⁿ, yⁿ) jointly typical
// and Zⁿ drawn memorylessly from p(z|y), the triple should be 4ε-typical.

use alloc::vec;
use alloc::vec::Vec;

use super::code::Generators;
use super::{trial_seed, SimConfig, TrialOutcome, TrialReport};
use crate::prob::types::count_cells;
use crate::prob::{tv_of_counts, Pmf};
use crate::regions::EXACT_TV_TOLERANCE;
use crate::seed;
use crate::{Error, Result};

const TAG_PAIR: u64 = 11;
const TAG_Z: u64 = 12;
/// Give up on rejection sampling after this many i.i.d. draws of (xⁿ, yⁿ).
const MAX_REJECTIONS: usize = 100_000;

struct Chain {
    dims: [usize; 3],
    p_xy: Vec<f64>,
    z_given_y: Generators,
}

impl Chain {
    fn new(p: &Pmf) -> Result<Self> {
        if p.ndim() != 3 {
            return Err(Error::AxisMismatch(
                "strong Markov check needs a joint over (X, Y, Z)".into(),
            ));
        }
        let d = p.dims();
        let p_xy = p.marginal_mass(&[0, 1]);
        let p_y = p.marginal_mass(&[1]);
        let p_yz = p.marginal_mass(&[1, 2]);
        let mut tv = 0.0;
        for x in 0..d[0] {
            for y in 0..d[1] {
                for z in 0..d[2] {
                    let m = if p_y[y] > 0.0 {
                        p_xy[x * d[1] + y] * p_yz[y * d[2] + z] / p_y[y]
                    } else {
                        0.0
                    };
                    tv += (p.get(&[x, y, z]) - m).abs();
                }
            }
        }
        let tv = 0.5 * tv;
        if tv > EXACT_TV_TOLERANCE {
            return Err(Error::NotMarkov { tv });
        }
        let rows: Vec<Vec<f64>> = (0..d[1])
            .map(|y| {
                let r = &p_yz[y * d[2]..(y + 1) * d[2]];
                if p_y[y] > 0.0 {
                    r.to_vec()
                } else {
                    vec![1.0; d[2]]
                }
            })
            .collect();
        Ok(Self {
            dims: [d[0], d[1], d[2]],
            p_xy,
            z_given_y: Generators::from_rows(&rows),
        })
    }

    fn outcome(
        &self,
        p: &Pmf,
        x: &[usize],
        y: &[usize],
        index: usize,
        seed: u64,
        eps: f64,
    ) -> TrialOutcome {
        let mut rng = seed::rng(seed, TAG_Z, index as u64);
        let z: Vec<usize> = y
            .iter()
            .map(|&yi| self.z_given_y.sample(yi, &mut rng))
            .collect();
        let counts = count_cells(&[x, y, &z], &self.dims);
        let tv = tv_of_counts(&counts, x.len() as u64, p.mass());
        TrialOutcome {
            index,
            tv,
            encoder_fail: false,
            decoder_ambiguous: false,
            success: tv < 4.0 * eps,
        }
    }
}

/// Runs `cfg.trials` trials, each with a freshly rejection-sampled ε-typical
/// (xⁿ, yⁿ) pair. Success means the triple's type is within 4ε of `p_xyz`.
pub fn strong_markov_trial(p_xyz: &Pmf, cfg: &SimConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let chain = Chain::new(p_xyz)?;
    let pair = Generators::single(&chain.p_xy);
    let n = cfg.n;
    let dims_xy = [chain.dims[0], chain.dims[1]];
    let outcomes = crate::par::map_range(cfg.trials, |i| {
        let ts = trial_seed(cfg.seed, i);
        let mut rng = seed::rng(ts, TAG_PAIR, 0);
        let (mut x, mut y) = (vec![0; n], vec![0; n]);
        for _ in 0..MAX_REJECTIONS {
            for k in 0..n {
                let c = pair.sample(0, &mut rng);
                x[k] = c / dims_xy[1];
                y[k] = c % dims_xy[1];
            }
            let counts = count_cells(&[&x, &y], &dims_xy);
            if tv_of_counts(&counts, n as u64, &chain.p_xy) < cfg.epsilon {
                return Ok(chain.outcome(p_xyz, &x, &y, i, ts, cfg.epsilon));
            }
        }
        Err(Error::InvalidArgument(alloc::format!(
            "no ε-typical (x, y) pair in {MAX_REJECTIONS} draws at n={n}"
        )))
    });
    Ok(TrialReport {
        threshold: 4.0 * cfg.epsilon,
        outcomes: outcomes.into_iter().collect::<Result<Vec<_>>>()?,
    })
}

/// Skewed joint types of (X, Y) that remain ε-typical: starting from the
/// closest integer type, move as many counts as possible from one cell to
/// another while the TV stays below ε. Cells of zero probability are left
/// empty. Duplicates are removed; the closest type itself comes first.
pub fn corner_types(p_xy: &[f64], n: usize, epsilon: f64) -> Vec<Vec<u64>> {
    let base = nearest_type(p_xy, n);
    let mut out = vec![base.clone()];
    for a in 0..p_xy.len() {
        for b in 0..p_xy.len() {
            if a == b || p_xy[a] == 0.0 || base[b] == 0 {
                continue;
            }
            let mut best = None;
            for k in 1..=base[b] {
                let mut t = base.clone();
                t[a] += k;
                t[b] -= k;
                if tv_of_counts(&t, n as u64, p_xy) < epsilon {
                    best = Some(t);
                } else {
                    break;
                }
            }
            if let Some(t) = best {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

fn nearest_type(p: &[f64], n: usize) -> Vec<u64> {
    let scaled: Vec<f64> = p.iter().map(|&v| v * n as f64).collect();
    let mut t: Vec<u64> = scaled
        .iter()
        .map(|&v| crate::math::floor(v) as u64)
        .collect();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| {
        (scaled[j] - t[j] as f64)
            .total_cmp(&(scaled[i] - t[i] as f64))
            .then(i.cmp(&j))
    });
    let short = n as u64 - t.iter().sum::<u64>();
    for &i in order.iter().take(short as usize) {
        t[i] += 1;
    }
    t
}

/// Adversarial variant: trial `i` uses corner type `i mod K` (laid out in
/// cell order, which the memoryless Z draw cannot exploit) in place of a
/// sampled pair.
pub fn strong_markov_corner(p_xyz: &Pmf, cfg: &SimConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let chain = Chain::new(p_xyz)?;
    let types = corner_types(&chain.p_xy, cfg.n, cfg.epsilon);
    let dy = chain.dims[1];
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = types
        .iter()
        .map(|t| {
            let mut x = Vec::with_capacity(cfg.n);
            let mut y = Vec::with_capacity(cfg.n);
            for (c, &k) in t.iter().enumerate() {
                for _ in 0..k {
                    x.push(c / dy);
                    y.push(c % dy);
                }
            }
            (x, y)
        })
        .collect();
    let outcomes = crate::par::map_range(cfg.trials, |i| {
        let (x, y) = &pairs[i % pairs.len()];
        chain.outcome(p_xyz, x, y, i, trial_seed(cfg.seed, i), cfg.epsilon)
    });
    Ok(TrialReport {
        threshold: 4.0 * cfg.epsilon,
        outcomes,
    })
}
