// Exact induced block law of the no-communication strong coordination scheme:
// a shared random index picks one of 2^⌈nR0⌉ Uⁿ codewords, and every node
// passes it through its own memoryless channel.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};

use super::MAX_CODEBOOK_BITS;
use crate::prob::{Channel, Pmf};
use crate::seed;
use crate::{Error, Result};

const TAG_EXACT: u64 = 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExactMode {
    /// Random codebook of 2^⌈nR0⌉ codewords drawn i.i.d. from p(u).
    #[default]
    Codebook,
    /// Every Uⁿ sequence weighted by its i.i.d. probability; the induced law
    /// is then the product target itself.
    FullRandomness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactConfig {
    /// Limit on enumerated (codeword, output block) pairs.
    pub budget: u128,
    pub mode: ExactMode,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            budget: 100_000_000,
            mode: ExactMode::Codebook,
        }
    }
}

/// TV between the induced law of (Xⁿ, Yⁿ, Zⁿ) and the i.i.d. target, for
/// the codebook drawn from `seed`.
pub fn no_comm_strong_exact_tv(
    u_pmf: &Pmf,
    x_u: &Channel,
    y_u: &Channel,
    z_u: &Channel,
    r0: f64,
    n: usize,
    seed: u64,
) -> Result<f64> {
    no_comm_strong_exact_tv_with(u_pmf, x_u, y_u, z_u, r0, n, seed, &ExactConfig::default())
}

#[allow(clippy::too_many_arguments)]
pub fn no_comm_strong_exact_tv_with(
    u_pmf: &Pmf,
    x_u: &Channel,
    y_u: &Channel,
    z_u: &Channel,
    r0: f64,
    n: usize,
    seed: u64,
    cfg: &ExactConfig,
) -> Result<f64> {
    let nu = u_pmf.len();
    for ch in [x_u, y_u, z_u] {
        if ch.input_len() != nu {
            return Err(Error::LengthMismatch {
                expected: nu,
                found: ch.input_len(),
            });
        }
    }
    if n == 0 || !(r0 >= 0.0) {
        return Err(Error::InvalidArgument("need n >= 1 and R0 >= 0".into()));
    }
    let (dx, dy, dz) = (x_u.output_len(), y_u.output_len(), z_u.output_len());
    let d = (dx * dy * dz) as u128;
    if (n as f64) * crate::math::log2(d as f64) >= 127.0 {
        return Err(Error::InvalidArgument(
            "block cells do not fit a 128-bit index".into(),
        ));
    }

    // Per-letter output law given u, sparse.
    let letters: Vec<Vec<(u128, f64)>> = (0..nu)
        .map(|u| {
            let mut v = Vec::new();
            for x in 0..dx {
                for y in 0..dy {
                    for z in 0..dz {
                        let m = x_u.row(u)[x] * y_u.row(u)[y] * z_u.row(u)[z];
                        if m > 0.0 {
                            v.push((((x * dy + y) * dz + z) as u128, m));
                        }
                    }
                }
            }
            v
        })
        .collect();
    let mut target = vec![0.0; d as usize];
    for (u, row) in letters.iter().enumerate() {
        for &(c, m) in row {
            target[c as usize] += u_pmf.mass()[u] * m;
        }
    }

    let widest = letters
        .iter()
        .zip(u_pmf.mass())
        .filter(|(_, &pu)| pu > 0.0)
        .map(|(l, _)| l.len() as u128)
        .max()
        .unwrap_or(0);
    let per_word = widest.checked_pow(n as u32).unwrap_or(u128::MAX);
    let words: Vec<(Vec<usize>, f64)> = match cfg.mode {
        ExactMode::Codebook => {
            let b = crate::math::ceil(n as f64 * r0 - 1e-9).max(0.0) as u32;
            if b > MAX_CODEBOOK_BITS {
                return Err(Error::CodebookTooLarge {
                    bits: b,
                    max_bits: MAX_CODEBOOK_BITS,
                });
            }
            let m = 1usize << b;
            check_budget(m as u128, per_word, cfg.budget)?;
            let dist = WeightedIndex::new(u_pmf.mass()).map_err(|_| Error::EmptyTable)?;
            let mut rng = seed::rng(seed, TAG_EXACT, 0);
            let w = 1.0 / m as f64;
            (0..m)
                .map(|_| ((0..n).map(|_| dist.sample(&mut rng)).collect(), w))
                .collect()
        }
        ExactMode::FullRandomness => {
            let m = (nu as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            check_budget(m, per_word, cfg.budget)?;
            let mut words = Vec::new();
            let mut idx = vec![0usize; n];
            loop {
                let w: f64 = idx.iter().map(|&u| u_pmf.mass()[u]).product();
                if w > 0.0 {
                    words.push((idx.clone(), w));
                }
                if !crate::prob::advance(&mut idx, &vec![nu; n]) {
                    break;
                }
            }
            words
        }
    };

    let mut induced: BTreeMap<u128, f64> = BTreeMap::new();
    for (word, w) in &words {
        accumulate(&letters, word, 0, 0, *w, d, &mut induced);
    }

    // TV over the support of the induced law, plus the target mass outside it.
    let mut diff = 0.0;
    let mut covered = 0.0;
    for (&key, &p) in &induced {
        let mut q = 1.0;
        let mut k = key;
        for _ in 0..n {
            q *= target[(k % d) as usize];
            k /= d;
        }
        diff += (p - q).abs();
        covered += q;
    }
    let tv = 0.5 * (diff + (1.0 - covered).max(0.0));
    Ok(tv.clamp(0.0, 1.0))
}

fn check_budget(codewords: u128, per_word: u128, budget: u128) -> Result<()> {
    let work = codewords.saturating_mul(per_word);
    if work > budget {
        return Err(Error::BudgetExceeded { work, budget });
    }
    Ok(())
}

fn accumulate(
    letters: &[Vec<(u128, f64)>],
    word: &[usize],
    key: u128,
    scale_pos: usize,
    weight: f64,
    d: u128,
    out: &mut BTreeMap<u128, f64>,
) {
    if scale_pos == word.len() {
        *out.entry(key).or_insert(0.0) += weight;
        return;
    }
    let place = d.pow(scale_pos as u32);
    for &(c, m) in &letters[word[scale_pos]] {
        accumulate(
            letters,
            word,
            key + c * place,
            scale_pos + 1,
            weight * m,
            d,
            out,
        );
    }
}
