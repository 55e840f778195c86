#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weighted_thermo::equilibrium::InvariantMeasure;
use weighted_thermo::{FactorChain, FiniteDepth, Symbol, WeightVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn carpet() -> (FactorChain, WeightVector) {
    (
        FactorChain::new(vec![3, 2], vec![vec![0, 0, 1]]).unwrap(),
        WeightVector::from_log_scales(&[3.0, 2.0]).unwrap(),
    )
}

pub fn mcmullen() -> f64 {
    (2f64.powf(2f64.ln() / 3f64.ln()) + 1.0).log2()
}

/// A chain with `levels` levels over at most `max_alphabet` base symbols,
/// with onto factor maps.
pub fn random_chain(rng: &mut impl Rng, levels: usize, max_alphabet: usize) -> FactorChain {
    let mut sizes = vec![rng.gen_range(2..=max_alphabet)];
    for _ in 1..levels {
        let prev = *sizes.last().unwrap();
        sizes.push(rng.gen_range(1..=prev));
    }
    let maps = (0..levels - 1)
        .map(|l| {
            let (from, to) = (sizes[l], sizes[l + 1]);
            let mut m: Vec<Symbol> = (0..to as Symbol).collect();
            m.extend((to..from).map(|_| rng.gen_range(0..to) as Symbol));
            m.shuffle(rng);
            m
        })
        .collect();
    FactorChain::new(sizes, maps).unwrap()
}

pub fn random_weights(rng: &mut impl Rng, levels: usize) -> WeightVector {
    WeightVector::new((0..levels).map(|_| rng.gen_range(0.2..2.0)).collect()).unwrap()
}

pub fn random_table(rng: &mut impl Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn random_depth_one(rng: &mut impl Rng, chain: &FactorChain) -> FiniteDepth {
    FiniteDepth::depth_one(0, random_table(rng, chain.alphabet_size(0), 1.0)).unwrap()
}

/// A random model: chain with 1 to 3 levels, alphabets up to 4, depth-1
/// potential.
pub fn random_model(seed: u64) -> (FactorChain, WeightVector, FiniteDepth) {
    let mut r = rng(seed);
    let levels = r.gen_range(1..=3);
    let chain = random_chain(&mut r, levels, 4);
    let a = random_weights(&mut r, levels);
    let phi = random_depth_one(&mut r, &chain);
    (chain, a, phi)
}

pub fn random_probability(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Stationary vector of a positive stochastic matrix by power iteration.
pub fn stationary(transition: &[Vec<f64>]) -> Vec<f64> {
    let n = transition.len();
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let mut next = vec![0.0; n];
        for (i, row) in transition.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                next[j] += p[i] * t;
            }
        }
        let diff: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        let s: f64 = next.iter().sum();
        p = next.into_iter().map(|x| x / s).collect();
        if diff < 1e-15 {
            break;
        }
    }
    p
}

pub fn random_markov(rng: &mut impl Rng, n: usize) -> InvariantMeasure {
    let t: Vec<Vec<f64>> = (0..n).map(|_| random_probability(rng, n)).collect();
    InvariantMeasure::markov(stationary(&t), t).unwrap()
}

/// All words of length `n` over `alphabet` symbols, lexicographic.
pub fn words(alphabet: usize, n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..alphabet as Symbol).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}
