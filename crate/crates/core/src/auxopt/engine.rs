// Dense factor-model optimizer shared by every auxiliary-variable search.
//
// A model is a product of conditional tables over a handful of small axes.
// Objectives are linear combinations of marginal entropies (bits), optionally
// plus a KL(target ‖ marginal) penalty for distribution constraints that the
// factorization cannot enforce on its own.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::math::{exp, ln, log2, LN_2};
use crate::prob::strides;

pub(crate) struct Factor {
    pub rows: usize,
    pub cols: usize,
    pub free: bool,
}

pub(crate) struct Marg {
    map: Vec<u32>,
    size: usize,
}

pub(crate) struct Problem {
    pub dims: Vec<usize>,
    pub cells: usize,
    pub factors: Vec<Factor>,
    /// Fixed tables (free factors hold a placeholder).
    pub fixed: Vec<Vec<f64>>,
    idx: Vec<Vec<u32>>,
    margs: Vec<Marg>,
    terms: Vec<(usize, f64)>,
    kl: Option<(usize, Vec<f64>)>,
}

pub(crate) type Tables = Vec<Vec<f64>>;

fn cell_map(dims: &[usize], axes: &[usize]) -> (Vec<u32>, usize) {
    let cells: usize = dims.iter().product();
    let sub: Vec<usize> = axes.iter().map(|&a| dims[a]).collect();
    let ss = strides(&sub);
    let cs = strides(dims);
    let map = (0..cells)
        .map(|i| {
            axes.iter()
                .enumerate()
                .map(|(k, &a)| (i / cs[a]) % dims[a] * ss[k])
                .sum::<usize>() as u32
        })
        .collect();
    (map, sub.iter().product())
}

impl Problem {
    pub fn new(dims: Vec<usize>) -> Self {
        let cells = dims.iter().product();
        Self {
            dims,
            cells,
            factors: Vec::new(),
            fixed: Vec::new(),
            idx: Vec::new(),
            margs: Vec::new(),
            terms: Vec::new(),
            kl: None,
        }
    }

    /// Adds a factor p(out | cond); `fixed` pins its table.
    pub fn factor(&mut self, cond: &[usize], out: &[usize], fixed: Option<Vec<f64>>) -> usize {
        let rows = cond.iter().map(|&a| self.dims[a]).product();
        let cols = out.iter().map(|&a| self.dims[a]).product();
        let mut axes = cond.to_vec();
        axes.extend_from_slice(out);
        let (map, size) = cell_map(&self.dims, &axes);
        debug_assert_eq!(size, rows * cols);
        let free = fixed.is_none();
        self.fixed.push(fixed.unwrap_or_default());
        self.idx.push(map);
        self.factors.push(Factor { rows, cols, free });
        self.factors.len() - 1
    }

    fn marg(&mut self, axes: &[usize]) -> usize {
        let (map, size) = cell_map(&self.dims, axes);
        self.margs.push(Marg { map, size });
        self.margs.len() - 1
    }

    /// Adds `coeff · H(axes)` to the objective.
    pub fn entropy_term(&mut self, axes: &[usize], coeff: f64) {
        let m = self.marg(axes);
        self.terms.push((m, coeff));
    }

    /// Adds `coeff · I(a; b | c)`.
    pub fn cmi_term(&mut self, a: &[usize], b: &[usize], c: &[usize], coeff: f64) {
        let cat = |x: &[usize], y: &[usize]| {
            let mut v = x.to_vec();
            v.extend_from_slice(y);
            v
        };
        let ac = cat(a, c);
        let bc = cat(b, c);
        let abc = cat(&ac, b);
        self.entropy_term(&ac, coeff);
        self.entropy_term(&bc, coeff);
        self.entropy_term(&abc, -coeff);
        if !c.is_empty() {
            self.entropy_term(c, -coeff);
        }
    }

    /// Requires the marginal over `axes` to equal `target`.
    pub fn constrain(&mut self, axes: &[usize], target: Vec<f64>) {
        let m = self.marg(axes);
        self.kl = Some((m, target));
    }

    pub fn joint(&self, tables: &Tables) -> Vec<f64> {
        (0..self.cells)
            .map(|i| {
                let mut p = 1.0;
                for (f, t) in tables.iter().enumerate() {
                    p *= t[self.idx[f][i] as usize];
                }
                p
            })
            .collect()
    }

    fn marginal(&self, m: usize, j: &[f64]) -> Vec<f64> {
        let mg = &self.margs[m];
        let mut out = vec![0.0; mg.size];
        for (i, &p) in j.iter().enumerate() {
            out[mg.map[i] as usize] += p;
        }
        out
    }

    pub fn objective(&self, tables: &Tables) -> f64 {
        let j = self.joint(tables);
        self.terms
            .iter()
            .map(|&(m, c)| {
                c * self
                    .marginal(m, &j)
                    .iter()
                    .map(|&p| crate::math::plogp(p))
                    .sum::<f64>()
            })
            .sum()
    }

    /// TV between the constrained marginal and its target (zero if unconstrained).
    pub fn gap(&self, tables: &Tables) -> f64 {
        match &self.kl {
            None => 0.0,
            Some((m, t)) => crate::prob::info_tv(&self.marginal(*m, &self.joint(tables)), t),
        }
    }

    /// Loss and gradient with respect to each cell of the joint.
    fn cell_gradient(&self, j: &[f64], lambda: f64, g: &mut [f64]) -> f64 {
        g.fill(0.0);
        let mut loss = 0.0;
        for &(m, c) in &self.terms {
            let mv = self.marginal(m, j);
            loss += c * mv.iter().map(|&p| crate::math::plogp(p)).sum::<f64>();
            let d: Vec<f64> = mv
                .iter()
                .map(|&p| if p > 0.0 { -c * log2(p) } else { 0.0 })
                .collect();
            let map = &self.margs[m].map;
            for (gi, &k) in g.iter_mut().zip(map) {
                *gi += d[k as usize];
            }
        }
        if let Some((m, t)) = &self.kl {
            let mv = self.marginal(*m, j);
            let mut kl = 0.0;
            let d: Vec<f64> = mv
                .iter()
                .zip(t)
                .map(|(&q, &p)| {
                    if p > 0.0 {
                        kl += p * log2(p / q.max(1e-300));
                        -lambda * p / (q.max(1e-300) * LN_2)
                    } else {
                        0.0
                    }
                })
                .collect();
            loss += lambda * kl;
            let map = &self.margs[*m].map;
            for (gi, &k) in g.iter_mut().zip(map) {
                *gi += d[k as usize];
            }
        }
        loss
    }

    /// Gradient of the loss with respect to every free table entry.
    fn table_gradient(&self, tables: &Tables, lambda: f64, grads: &mut [Vec<f64>]) -> f64 {
        let nf = tables.len();
        let mut vals = vec![0.0; nf];
        let mut prefix = vec![0.0; nf + 1];
        let j = self.joint(tables);
        let mut g = vec![0.0; self.cells];
        let loss = self.cell_gradient(&j, lambda, &mut g);
        for gr in grads.iter_mut() {
            gr.fill(0.0);
        }
        for i in 0..self.cells {
            if g[i] == 0.0 {
                continue;
            }
            prefix[0] = 1.0;
            for f in 0..nf {
                vals[f] = tables[f][self.idx[f][i] as usize];
                prefix[f + 1] = prefix[f] * vals[f];
            }
            let mut suffix = 1.0;
            for f in (0..nf).rev() {
                if self.factors[f].free {
                    grads[f][self.idx[f][i] as usize] += g[i] * prefix[f] * suffix;
                }
                suffix *= vals[f];
            }
        }
        loss
    }

    /// Tables for all factors given free-factor values.
    pub fn assemble(&self, free: &[Vec<f64>]) -> Tables {
        let mut it = free.iter();
        self.factors
            .iter()
            .zip(&self.fixed)
            .map(|(f, fx)| {
                if f.free {
                    it.next().expect("one table per free factor").clone()
                } else {
                    fx.clone()
                }
            })
            .collect()
    }

    pub fn random_free(&self, rng: &mut ChaCha8Rng, spread: f64) -> Vec<Vec<f64>> {
        self.factors
            .iter()
            .filter(|f| f.free)
            .map(|f| {
                let logits: Vec<f64> = (0..f.rows * f.cols)
                    .map(|_| rng.gen_range(-spread..spread))
                    .collect();
                softmax_rows(&logits, f.cols)
            })
            .collect()
    }

    /// Adam on row-softmax logits of the free tables, with the KL penalty
    /// weight raised stage by stage.
    pub fn descend(&self, start: &Tables, iterations: usize, step_tolerance: f64) -> Tables {
        let free: Vec<usize> = (0..self.factors.len())
            .filter(|&f| self.factors[f].free)
            .collect();
        let mut logits: Vec<Vec<f64>> = free
            .iter()
            .map(|&f| start[f].iter().map(|&p| ln(p.max(1e-9))).collect())
            .collect();
        let mut m: Vec<Vec<f64>> = logits.iter().map(|l| vec![0.0; l.len()]).collect();
        let mut v = m.clone();
        let mut tables = start.clone();
        let mut grads: Vec<Vec<f64>> = tables.iter().map(|t| vec![0.0; t.len()]).collect();
        let stages: &[f64] = if self.kl.is_some() {
            &[1.0, 10.0, 100.0, 1000.0]
        } else {
            &[0.0]
        };
        let per_stage = (iterations / stages.len()).max(1);
        let (b1, b2) = (0.9, 0.999);
        let mut t = 0i32;
        for &lambda in stages {
            let mut last = f64::INFINITY;
            let mut calm = 0;
            for it in 0..per_stage {
                let loss = self.table_gradient(&tables, lambda, &mut grads);
                if (last - loss).abs() < step_tolerance {
                    calm += 1;
                    if calm >= 25 {
                        break;
                    }
                } else {
                    calm = 0;
                }
                last = loss;
                t += 1;
                let lr = 0.08 * (1.0 - 0.9 * it as f64 / per_stage as f64);
                let c1 = 1.0 - crate::math::pow(b1, t as f64);
                let c2 = 1.0 - crate::math::pow(b2, t as f64);
                for (k, &f) in free.iter().enumerate() {
                    let cols = self.factors[f].cols;
                    let p = &tables[f];
                    let g = &grads[f];
                    for r in 0..self.factors[f].rows {
                        let row = r * cols..(r + 1) * cols;
                        let mean: f64 = row.clone().map(|c| p[c] * g[c]).sum();
                        for c in row {
                            let d = p[c] * (g[c] - mean);
                            m[k][c] = b1 * m[k][c] + (1.0 - b1) * d;
                            v[k][c] = b2 * v[k][c] + (1.0 - b2) * d * d;
                            logits[k][c] -=
                                lr * (m[k][c] / c1) / (crate::math::sqrt(v[k][c] / c2) + 1e-12);
                        }
                    }
                    tables[f] = softmax_rows(&logits[k], cols);
                }
            }
        }
        tables
    }

    /// EM for latent-class models: every free factor is refit to the
    /// posterior-weighted joint whose constrained marginal equals the target.
    pub fn em(&self, start: &Tables, iterations: usize) -> Tables {
        let Some((m, target)) = &self.kl else {
            return start.clone();
        };
        let map = &self.margs[*m].map;
        let mut tables = start.clone();
        for _ in 0..iterations {
            let j = self.joint(&tables);
            let q = self.marginal(*m, &j);
            if crate::prob::info_tv(&q, target) < 1e-15 {
                break;
            }
            let r: Vec<f64> = j
                .iter()
                .zip(map)
                .map(|(&p, &k)| {
                    let qk = q[k as usize];
                    if qk > 0.0 {
                        p * target[k as usize] / qk
                    } else {
                        0.0
                    }
                })
                .collect();
            for (f, fac) in self.factors.iter().enumerate() {
                if !fac.free {
                    continue;
                }
                let mut acc = vec![0.0; fac.rows * fac.cols];
                for (i, &p) in r.iter().enumerate() {
                    acc[self.idx[f][i] as usize] += p;
                }
                for row in 0..fac.rows {
                    let s: f64 = acc[row * fac.cols..(row + 1) * fac.cols].iter().sum();
                    if s > 0.0 {
                        for c in 0..fac.cols {
                            tables[f][row * fac.cols + c] = acc[row * fac.cols + c] / s;
                        }
                    }
                }
            }
        }
        tables
    }

    /// Zeroes free entries below `threshold` and renormalizes rows.
    pub fn snap(&self, tables: &Tables, threshold: f64) -> Tables {
        let mut out = tables.clone();
        for (f, fac) in self.factors.iter().enumerate() {
            if !fac.free {
                continue;
            }
            for row in out[f].chunks_mut(fac.cols) {
                let max = row.iter().cloned().fold(0.0, f64::max);
                for p in row.iter_mut() {
                    if *p < threshold && *p < max {
                        *p = 0.0;
                    }
                }
                let s: f64 = row.iter().sum();
                for p in row.iter_mut() {
                    *p /= s;
                }
            }
        }
        out
    }
}

pub(crate) fn softmax_rows(logits: &[f64], cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    for row in logits.chunks(cols) {
        let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = row.iter().map(|&l| exp(l - mx)).collect();
        let s: f64 = e.iter().sum();
        out.extend(e.iter().map(|x| x / s));
    }
    out
}
