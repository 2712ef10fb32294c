// Exact sampling of the codeword picked by a "first conditionally typical
// codeword" encoder over a random codebook of M i.i.d. codewords. Only the
// selected codeword matters to the actions, and its law is known: the
// generator conditioned on passing when some codeword passes (probability
// 1 − (1 − p)^M), and the generator conditioned on failing otherwise, since
// the fallback is codeword 0. So the codebook never has to be materialized
// and blocks can be as long as the caller likes.
//
// The test: every symbol lies in the support of p(o|c), and
// Σ_c Σ_o |N(c,o) − N(c)·p(o|c)| < 2nε, where each cell's term is rounded up
// to a multiple of 2nε/BINS before summing.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::code::Generators;
use crate::math::{ceil, exp, ln, LN_2};
use crate::{Error, Result};

const BINS: usize = 2048;
/// Limit on enumerated count vectors across all cells.
const MAX_VECTORS: usize = 4_000_000;
const MAX_REJECTIONS: usize = 1_000_000;

/// One conditioning cell: how many positions fall in it, the target row
/// p(·|c) (`None` when the cell has zero probability, so no symbol may go
/// there), and the generator row the codebook draws from at those positions.
pub(crate) struct CellSpec {
    pub count: usize,
    pub target: Option<Vec<f64>>,
    pub gen: Vec<f64>,
}

struct CellLaw {
    /// (count vector over outputs, bin, linear weight relative to `scale`).
    vectors: Vec<(Vec<u32>, usize, f64)>,
    by_bin: Vec<f64>,
    /// ln of the probability that weight 1.0 stands for.
    scale: f64,
}

pub(crate) struct Selector {
    unit: f64,
    targets: Vec<Option<Vec<f64>>>,
    counts: Vec<usize>,
    cells: Vec<CellLaw>,
    /// prefix[c] is the (scaled) law of the summed bins over cells < c.
    prefix: Vec<Vec<f64>>,
    ln_pass: f64,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + ln(i as f64);
    }
    t
}

fn bin_of(d: f64, unit: f64) -> usize {
    ceil(d / unit - 1e-9).max(0.0) as usize
}

impl Selector {
    pub fn new(cells: &[CellSpec], epsilon: f64) -> Result<Self> {
        let n: usize = cells.iter().map(|c| c.count).sum();
        let budget = 2.0 * n as f64 * epsilon;
        let unit = budget / BINS as f64;
        let lf = ln_factorials(n);
        let mut total = 0usize;
        let mut laws = Vec::with_capacity(cells.len());
        let mut impossible = false;
        for cell in cells {
            let law = match &cell.target {
                None if cell.count > 0 => None,
                None => Some(CellLaw {
                    vectors: vec![(vec![0; cell.gen.len()], 0, 1.0)],
                    by_bin: vec![1.0],
                    scale: 0.0,
                }),
                Some(p) => enumerate(cell, p, budget, unit, &lf, &mut total)?,
            };
            match law {
                Some(l) => laws.push(l),
                None => {
                    impossible = true;
                    laws.push(CellLaw {
                        vectors: Vec::new(),
                        by_bin: Vec::new(),
                        scale: 0.0,
                    });
                }
            }
        }
        let mut prefix = vec![{
            let mut f = vec![0.0; BINS];
            f[0] = 1.0;
            f
        }];
        let mut ln_scale = 0.0;
        if !impossible {
            for law in &laws {
                let prev = prefix.last().expect("seeded");
                let mut next = vec![0.0; BINS];
                for (k, &a) in prev.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    for (b, &w) in law.by_bin.iter().enumerate().take(BINS - k) {
                        next[k + b] += a * w;
                    }
                }
                ln_scale += law.scale;
                let m = next.iter().cloned().fold(0.0, f64::max);
                if m > 0.0 {
                    next.iter_mut().for_each(|v| *v /= m);
                    ln_scale += ln(m);
                }
                prefix.push(next);
            }
        }
        let mass: f64 = prefix.last().expect("seeded").iter().sum();
        let ln_pass = if impossible || mass == 0.0 {
            f64::NEG_INFINITY
        } else {
            (ln(mass) + ln_scale).min(0.0)
        };
        Ok(Self {
            unit,
            targets: cells.iter().map(|c| c.target.clone()).collect(),
            counts: cells.iter().map(|c| c.count).collect(),
            cells: laws,
            prefix,
            ln_pass,
        })
    }

    /// ln P(a single codeword passes).
    pub fn ln_pass(&self) -> f64 {
        self.ln_pass
    }

    /// ln P(none of 2^bits codewords passes).
    pub fn ln_fail(&self, bits: f64) -> f64 {
        ln_none(self.ln_pass, bits)
    }

    /// Count vectors of a passing codeword, one per cell.
    fn sample_pass(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
        let last = self.prefix.last().expect("seeded");
        let mut k = pick(last, rng);
        let mut out = vec![Vec::new(); self.cells.len()];
        for c in (0..self.cells.len()).rev() {
            let law = &self.cells[c];
            let prev = &self.prefix[c];
            let w: Vec<f64> = (0..=k.min(law.by_bin.len().saturating_sub(1)))
                .map(|b| law.by_bin[b] * prev[k - b])
                .collect();
            let b = pick(&w, rng);
            let members: Vec<&(Vec<u32>, usize, f64)> =
                law.vectors.iter().filter(|v| v.1 == b).collect();
            let mw: Vec<f64> = members.iter().map(|v| v.2).collect();
            out[c] = members[pick(&mw, rng)].0.clone();
            k -= b;
        }
        out
    }

    /// The encoder test applied to a concrete codeword.
    pub fn passes(&self, cell_of: &[usize], word: &[usize]) -> bool {
        let mut counts: Vec<Vec<u32>> = self.cells.iter().map(|_| Vec::new()).collect();
        for (&c, &o) in cell_of.iter().zip(word) {
            match &self.targets[c] {
                Some(p) if p[o] > 0.0 => {
                    if counts[c].is_empty() {
                        counts[c] = vec![0; p.len()];
                    }
                    counts[c][o] += 1;
                }
                _ => return false,
            }
        }
        let mut bins = 0;
        for (c, t) in self.targets.iter().enumerate() {
            if let Some(p) = t {
                let nc = self.counts[c] as f64;
                let d: f64 = p
                    .iter()
                    .enumerate()
                    .map(|(o, &q)| (counts[c].get(o).copied().unwrap_or(0) as f64 - nc * q).abs())
                    .sum();
                bins += bin_of(d, self.unit);
            }
        }
        bins < BINS
    }
}

fn pick(w: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = w.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &v) in w.iter().enumerate() {
        if u < v {
            return i;
        }
        u -= v;
    }
    w.iter().rposition(|&v| v > 0.0).unwrap_or(0)
}

/// Count vectors of one cell within the TV budget, with their probabilities
/// under the generator. `None` when none fits.
fn enumerate(
    cell: &CellSpec,
    p: &[f64],
    budget: f64,
    unit: f64,
    lf: &[f64],
    total: &mut usize,
) -> Result<Option<CellLaw>> {
    let nc = cell.count;
    let target: Vec<f64> = p.iter().map(|&q| nc as f64 * q).collect();
    // Outputs the codeword can use: in the target's support and the generator's.
    let free: Vec<usize> = (0..p.len())
        .filter(|&o| p[o] > 0.0 && cell.gen[o] > 0.0)
        .collect();
    let fixed: f64 = (0..p.len())
        .filter(|o| !free.contains(o))
        .map(|o| target[o])
        .sum();
    if fixed >= budget {
        return Ok(None);
    }
    let mut raw: Vec<(Vec<u32>, f64, f64)> = Vec::new();
    let mut cur = vec![0u32; p.len()];
    walk(
        &free, 0, nc, fixed, &target, budget, &mut cur, cell, lf, &mut raw, total,
    )?;
    if raw.is_empty() {
        return Ok(None);
    }
    let top = raw.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let mut by_bin = Vec::new();
    let vectors: Vec<(Vec<u32>, usize, f64)> = raw
        .into_iter()
        .map(|(v, d, lw)| {
            let b = bin_of(d, unit);
            let w = exp(lw - top);
            if by_bin.len() <= b {
                by_bin.resize(b + 1, 0.0);
            }
            by_bin[b] += w;
            (v, b, w)
        })
        .collect();
    Ok(Some(CellLaw {
        vectors,
        by_bin,
        scale: top,
    }))
}

#[allow(clippy::too_many_arguments)]
fn walk(
    free: &[usize],
    at: usize,
    left: usize,
    dev: f64,
    target: &[f64],
    budget: f64,
    cur: &mut Vec<u32>,
    cell: &CellSpec,
    lf: &[f64],
    out: &mut Vec<(Vec<u32>, f64, f64)>,
    total: &mut usize,
) -> Result<()> {
    let rest: f64 = free[at..].iter().map(|&o| target[o]).sum();
    if dev + (left as f64 - rest).abs() >= budget {
        return Ok(());
    }
    if at + 1 == free.len() || free.is_empty() {
        if let Some(&o) = free.last() {
            cur[o] = left as u32;
        }
        let d = dev
            + free
                .last()
                .map_or(0.0, |&o| (left as f64 - target[o]).abs());
        if d >= budget || (free.is_empty() && left > 0) {
            return Ok(());
        }
        *total += 1;
        if *total > MAX_VECTORS {
            return Err(Error::BudgetExceeded {
                work: *total as u128,
                budget: MAX_VECTORS as u128,
            });
        }
        let lw = lf[cell.count]
            + free
                .iter()
                .map(|&o| cur[o] as f64 * ln(cell.gen[o]) - lf[cur[o] as usize])
                .sum::<f64>();
        out.push((cur.clone(), d, lw));
        if let Some(&o) = free.last() {
            cur[o] = 0;
        }
        return Ok(());
    }
    let o = free[at];
    for k in 0..=left {
        let d = dev + (k as f64 - target[o]).abs();
        // Both this term and the remainder only grow once k passes the target.
        if d >= budget && k as f64 > target[o] {
            break;
        }
        cur[o] = k as u32;
        walk(
            free,
            at + 1,
            left - k,
            d,
            target,
            budget,
            cur,
            cell,
            lf,
            out,
            total,
        )?;
    }
    cur[o] = 0;
    Ok(())
}

impl Selector {
    /// A codeword drawn from the generator conditioned on passing.
    pub fn draw_pass(&self, cell_of: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
        let counts = self.sample_pass(rng);
        let mut word = vec![0usize; cell_of.len()];
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); counts.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            slots[c].push(i);
        }
        for (c, pos) in slots.iter().enumerate() {
            let mut symbols: Vec<usize> = Vec::with_capacity(pos.len());
            for (o, &k) in counts[c].iter().enumerate() {
                symbols.extend(core::iter::repeat(o).take(k as usize));
            }
            symbols.shuffle(rng);
            for (&i, &s) in pos.iter().zip(&symbols) {
                word[i] = s;
            }
        }
        word
    }

    /// A codeword drawn from the generator conditioned on failing; position
    /// i uses generator row `gen_of[i]`.
    pub fn draw_fail(
        &self,
        cell_of: &[usize],
        gens: &Generators,
        gen_of: &[usize],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<usize>> {
        let mut word = vec![0usize; cell_of.len()];
        for _ in 0..MAX_REJECTIONS {
            for (i, w) in word.iter_mut().enumerate() {
                *w = gens.sample(gen_of[i], rng);
            }
            if !self.passes(cell_of, &word) {
                return Ok(word);
            }
        }
        Err(Error::InvalidArgument(
            "could not draw a non-typical codeword".into(),
        ))
    }
}

/// ln P(no success among 2^bits independent tries with success probability
/// e^ln_p).
pub(crate) fn ln_none(ln_p: f64, bits: f64) -> f64 {
    if ln_p == f64::NEG_INFINITY {
        return 0.0;
    }
    let p = exp(ln_p);
    // −ln(1 − p), accurate for tiny p.
    let neg_ln_q = if p < 1e-8 { p } else { -libm::log1p(-p) };
    if neg_ln_q.is_infinite() {
        return f64::NEG_INFINITY;
    }
    -exp(bits * LN_2 + ln(neg_ln_q))
}

/// ln(e^a + e^b).
pub(crate) fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + libm::log1p(exp(lo - hi))
}

/// The codeword an encoder with a 2^bits codebook settles on: the first
/// passing one, or codeword 0 when none passes. Returns (codeword, failed).
pub(crate) fn select(
    sel: &Selector,
    bits: f64,
    cell_of: &[usize],
    gens: &Generators,
    gen_of: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, bool)> {
    if rng.gen::<f64>() < exp(sel.ln_fail(bits)) {
        Ok((sel.draw_fail(cell_of, gens, gen_of, rng)?, true))
    } else {
        Ok((sel.draw_pass(cell_of, rng), false))
    }
}
