#![allow(dead_code)]

use coordcap_core::{Alphabet, Channel, Pmf};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MASTER_SEED: u64 = 0x5EED;

/// 256 cases from a fixed seed, no persistence files.
pub fn fixed(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(MASTER_SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn axes(dims: &[usize]) -> Vec<Alphabet> {
    dims.iter().map(|&d| Alphabet::range(d)).collect()
}

/// Normalized weights with roughly one cell in five set to zero.
pub fn weights(raw: &[f64]) -> Vec<f64> {
    let mut w: Vec<f64> = raw.iter().map(|&r| if r < 0.2 { 0.0 } else { r }).collect();
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

pub fn random_pmf(rng: &mut impl Rng, dims: &[usize]) -> Pmf {
    let n: usize = dims.iter().product();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    Pmf::new(axes(dims), weights(&raw)).unwrap()
}

pub fn random_channel(rng: &mut impl Rng, ins: &[usize], outs: &[usize]) -> Channel {
    let rows: usize = ins.iter().product();
    let cols: usize = outs.iter().product();
    let table: Vec<f64> = (0..rows)
        .flat_map(|_| {
            let raw: Vec<f64> = (0..cols).map(|_| rng.gen::<f64>()).collect();
            weights(&raw)
        })
        .collect();
    Channel::new(axes(ins), axes(outs), table).unwrap()
}

pub fn pmf_strategy(dims: Vec<usize>) -> impl Strategy<Value = Pmf> {
    let n: usize = dims.iter().product();
    proptest::collection::vec(0.0..1.0f64, n)
        .prop_map(move |raw| Pmf::new(axes(&dims), weights(&raw)).unwrap())
}

pub fn channel_strategy(ins: Vec<usize>, outs: Vec<usize>) -> impl Strategy<Value = Channel> {
    let rows: usize = ins.iter().product();
    let cols: usize = outs.iter().product();
    proptest::collection::vec(proptest::collection::vec(0.0..1.0f64, cols), rows).prop_map(
        move |raw| {
            let table = raw.iter().flat_map(|r| weights(r)).collect();
            Channel::new(axes(&ins), axes(&outs), table).unwrap()
        },
    )
}

/// Small alphabet sizes for randomized shapes.
pub fn dim() -> impl Strategy<Value = usize> {
    2usize..=3
}

/// Entropy in bits of raw mass, written out independently of the library.
pub fn h(mass: &[f64]) -> f64 {
    mass.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Marginal over `keep` of a row-major table with shape `dims`.
pub fn marginal(mass: &[f64], dims: &[usize], keep: &[usize]) -> Vec<f64> {
    let kd: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let mut out = vec![0.0; kd.iter().product()];
    let mut idx = vec![0usize; dims.len()];
    for &m in mass {
        let j = keep.iter().fold(0, |acc, &k| acc * dims[k] + idx[k]);
        out[j] += m;
        for a in (0..dims.len()).rev() {
            idx[a] += 1;
            if idx[a] < dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}

/// I(A;B|C) in bits from marginal entropies.
pub fn cmi(mass: &[f64], dims: &[usize], a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let cat = |xs: &[&[usize]]| xs.concat();
    h(&marginal(mass, dims, &cat(&[a, c]))) + h(&marginal(mass, dims, &cat(&[b, c])))
        - h(&marginal(mass, dims, &cat(&[a, b, c])))
        - h(&marginal(mass, dims, c))
}

pub fn mi(mass: &[f64], dims: &[usize], a: &[usize], b: &[usize]) -> f64 {
    cmi(mass, dims, a, b, &[])
}

pub fn h2(p: f64) -> f64 {
    h(&[p, 1.0 - p])
}
