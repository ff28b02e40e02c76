//! Bernoulli product measures, seeded sampling, and exact pushforward of cylinder probabilities.
//!
//! Sampling uses SplitMix64 seeded with the raw seed. Each site draws one 64-bit value per lane,
//! sites left to right, and a lane is occupied when the top 53 bits `u` satisfy
//! `u · den < num · 2^53` for `p = num / den`. Ensembles use seed `seed + index` for sample `index`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Density, WindowSpec, Word};

/// Largest window (in sites) the exact pushforward will enumerate.
pub const ENUMERATION_BUDGET: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub p: Density,
    pub lanes: u32,
    pub length: usize,
    pub seed: u64,
}

/// Exact probabilities of every word on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderWeights {
    pub window: WindowSpec,
    pub weights: BTreeMap<Word, BigRational>,
}

impl CylinderWeights {
    /// Product-measure weights of all binary words on `window`.
    pub fn product(window: WindowSpec, p: Density) -> Result<Self> {
        check_probability(p)?;
        let weights = all_binary_words(window.len())
            .map(|w| {
                let weight = product_weight(&w, p, 1)?;
                Ok((w, weight))
            })
            .collect::<Result<_>>()?;
        Ok(Self { window, weights })
    }

    pub fn total(&self) -> BigRational {
        self.weights.values().fold(BigRational::zero(), |acc, w| acc + w)
    }

    /// Weight of `sub` placed at `offset` inside the window, summed over the remaining sites.
    pub fn marginal(&self, offset: usize, sub: &[u32]) -> BigRational {
        self.weights
            .iter()
            .filter(|(w, _)| w.symbols().get(offset..offset + sub.len()) == Some(sub))
            .fold(BigRational::zero(), |acc, (_, weight)| acc + weight)
    }
}

/// Per-sample seed for ensemble member `index`.
pub fn ensemble_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index)
}

fn check_probability(p: Density) -> Result<()> {
    if p < Density::zero() || p > Density::one() {
        return Err(Error::ProbabilityOutOfRange(p.to_string()));
    }
    Ok(())
}

/// Widens a density to an arbitrary-precision rational.
pub fn to_big(p: Density) -> BigRational {
    BigRational::new(BigInt::from(*p.numer()), BigInt::from(*p.denom()))
}

/// Decimal expansion rounded to `digits` places, trailing zeros removed.
pub fn decimal_string(r: &BigRational, digits: usize) -> String {
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let scaled = (r * scale).round().to_integer();
    let mut text = format!("{:0>width$}", scaled.abs().to_string(), width = digits + 1);
    if digits > 0 {
        text.insert(text.len() - digits, '.');
        let trimmed = text.trim_end_matches('0').trim_end_matches('.').len();
        text.truncate(trimmed);
    }
    if scaled.is_negative() {
        text.insert(0, '-');
    }
    text
}

/// Site occupancies of a seeded sample, each the sum of `lanes` Bernoulli(p) draws.
pub fn bernoulli_cells(sample: &SampleSpec) -> Result<Vec<u32>> {
    check_probability(sample.p)?;
    if sample.lanes == 0 {
        return Err(Error::NoLanes);
    }
    let mut rng = SplitMix64::seed_from_u64(sample.seed);
    let num = *sample.p.numer() as u128;
    let den = *sample.p.denom() as u128;
    let threshold = num << 53;
    let cells = (0..sample.length)
        .map(|_| (0..sample.lanes).filter(|_| u128::from(rng.next_u64() >> 11) * den < threshold).count() as u32)
        .collect();
    Ok(cells)
}

/// A seeded Bernoulli ring.
pub fn bernoulli_config(sample: &SampleSpec) -> Result<Configuration> {
    Configuration::ring(bernoulli_cells(sample)?, sample.lanes)
}

/// A seeded ring with exactly `particles` particles spread uniformly over the `length · lanes`
/// lane slots (a Fisher-Yates shuffle driven by the same generator).
pub fn fixed_count_config(length: usize, lanes: u32, particles: usize, seed: u64) -> Result<Configuration> {
    if lanes == 0 {
        return Err(Error::NoLanes);
    }
    let slots = length * lanes as usize;
    if particles > slots {
        return Err(Error::DensityOutOfRange(format!("{particles}/{length}")));
    }
    let mut occupied: Vec<bool> = (0..slots).map(|i| i < particles).collect();
    occupied.shuffle(&mut SplitMix64::seed_from_u64(seed));
    let cells = occupied.chunks(lanes as usize).map(|c| c.iter().filter(|&&b| b).count() as u32).collect();
    Configuration::ring(cells, lanes)
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Cylinder probability of `a` under the product of per-site Binomial(M, p) laws.
pub fn product_weight(a: &Word, p: Density, lanes: u32) -> Result<BigRational> {
    check_probability(p)?;
    let p = to_big(p);
    let q = BigRational::one() - &p;
    let mut weight = BigRational::one();
    for &c in a.symbols() {
        if c > lanes {
            return Err(Error::SymbolOutOfRange { value: c, max: lanes });
        }
        weight *= BigRational::from_integer(binomial(lanes, c)) * num_traits::pow(p.clone(), c as usize)
            * num_traits::pow(q.clone(), (lanes - c) as usize);
    }
    Ok(weight)
}

fn all_binary_words(len: usize) -> impl Iterator<Item = Word> {
    (0u64..1 << len).map(move |b| {
        let s: Vec<u32> = (0..len).map(|i| ((b >> (len - 1 - i)) & 1) as u32).collect();
        Word::new(s, 1).expect("binary")
    })
}

/// One step of the `v`-particle rule on a word stored as bits (bit `i` is site `i`), empty
/// outside, followed by dropping the `v` leftmost and the rightmost sites.
fn step_bits(word: u32, len: u32, v: u32) -> u32 {
    let mut out = 0u32;
    let mut next = u32::MAX;
    for i in (0..len).rev() {
        if word >> i & 1 == 1 {
            let target = if next == u32::MAX { i + v } else { (i + v).min(next - 1) };
            if target < len {
                out |= 1 << target;
            }
            next = i;
        }
    }
    (out >> v) & ((1u32 << (len - v - 1)) - 1)
}

/// Number of ones in the source word, tallied per image on the `k` target sites after `t` steps.
fn enumerate_images(v: u32, k: usize, t: usize, mut visit: impl FnMut(u32, u32)) -> Result<usize> {
    if v == 0 {
        return Err(Error::ZeroVelocity);
    }
    let sites = k + t * (v as usize + 1);
    if sites > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget { sites, limit: ENUMERATION_BUDGET });
    }
    for word in 0u32..1 << sites {
        let mut image = word;
        let mut len = sites as u32;
        for _ in 0..t {
            image = step_bits(image, len, v);
            len -= v + 1;
        }
        visit(image, word.count_ones());
    }
    Ok(sites)
}

fn bits_of(w: &Word) -> Result<u32> {
    let mut bits = 0u32;
    for (i, &c) in w.symbols().iter().enumerate() {
        match c {
            0 => {}
            1 => bits |= 1 << i,
            _ => return Err(Error::SymbolOutOfRange { value: c, max: 1 }),
        }
    }
    Ok(bits)
}

fn weight_from_counts(counts: &[u64], sites: usize, p: Density) -> BigRational {
    let p = to_big(p);
    let q = BigRational::one() - &p;
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(ones, &c)| {
            BigRational::from_integer(BigInt::from(c))
                * num_traits::pow(p.clone(), ones)
                * num_traits::pow(q.clone(), sites - ones)
        })
        .fold(BigRational::zero(), |acc, w| acc + w)
}

/// `μ_p(T_v^{-t}[W])` for one-lane flows, by exhaustive enumeration of the dependence window.
pub fn pushforward_iterated(v: u32, w: &Word, p: Density, t: usize) -> Result<BigRational> {
    check_probability(p)?;
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let target = bits_of(w)?;
    let mut counts = vec![0u64; ENUMERATION_BUDGET + 1];
    let sites = enumerate_images(v, w.len(), t, |image, ones| {
        if image == target {
            counts[ones as usize] += 1;
        }
    })?;
    Ok(weight_from_counts(&counts, sites, p))
}

/// `μ_p(T_v^{-1}[W])`.
pub fn pushforward(v: u32, w: &Word, p: Density) -> Result<BigRational> {
    pushforward_iterated(v, w, p, 1)
}

/// Weights of all `k`-site words after `t` steps, on the window `[0, k-1]`.
pub fn pushforward_distribution(v: u32, k: usize, p: Density, t: usize) -> Result<CylinderWeights> {
    check_probability(p)?;
    if k == 0 {
        return Err(Error::EmptyWord);
    }
    let mut counts = vec![vec![0u64; ENUMERATION_BUDGET + 1]; 1 << k];
    let sites = enumerate_images(v, k, t, |image, ones| counts[image as usize][ones as usize] += 1)?;
    let weights = all_binary_words(k)
        .map(|w| {
            let c = &counts[bits_of(&w).expect("binary") as usize];
            let weight = weight_from_counts(c, sites, p);
            (w, weight)
        })
        .collect();
    Ok(CylinderWeights { window: WindowSpec { start: 0, end: k as isize - 1 }, weights })
}

/// Shift invariance of the weights and of their one-step image under the `v`-particle rule.
///
/// Both are compared through their marginals on every sub-window one site shorter than the
/// window they live on.
pub fn translation_invariance_check(weights: &CylinderWeights, v: u32) -> Result<bool> {
    let k = weights.window.len();
    if !shift_invariant(weights) {
        return Ok(false);
    }
    let image_len = match k.checked_sub(v as usize + 1) {
        Some(n) if n >= 2 => n,
        _ => return Ok(true),
    };
    let mut image = BTreeMap::new();
    for (word, weight) in &weights.weights {
        let stepped = step_bits(bits_of(word)?, k as u32, v);
        let symbols = (0..image_len).map(|i| stepped >> i & 1).collect();
        *image.entry(Word::new(symbols, 1)?).or_insert_with(BigRational::zero) += weight;
    }
    let start = weights.window.start + v as isize;
    let window = WindowSpec { start, end: start + image_len as isize - 1 };
    Ok(shift_invariant(&CylinderWeights { window, weights: image }))
}

fn shift_invariant(weights: &CylinderWeights) -> bool {
    let k = weights.window.len();
    if k < 2 {
        return true;
    }
    all_binary_words(k - 1).all(|sub| weights.marginal(0, sub.symbols()) == weights.marginal(1, sub.symbols()))
}
