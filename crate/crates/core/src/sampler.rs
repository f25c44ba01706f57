//! Process W: a weighted random linear ordering built largest element first.
//!
//! At each step an unassigned position `i` is picked with probability
//! proportional to `w_i` and receives the largest element not yet placed.
//! Weights are rescaled to integers by their common denominator so every draw
//! is an exact uniform integer draw; there is no floating point anywhere on
//! the sampling path.
//!
//! Randomness comes from [`RandomSource`], a ChaCha20 stream seeded with
//! `ChaCha20Rng::seed_from_u64`. Both the generator and the seeding routine
//! are fixed; the same seed yields the same draws on every platform.

use std::collections::BTreeSet;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hikita::{hikita_distribution, weights_from_params, HikitaParams, WeightVector};
use crate::perm::{orderings_of, LinearOrdering};
use crate::rational::{self, common_denominator_scale, Rational};
use crate::watershed::watershed_fast;

/// Name of the generator behind [`RandomSource`], echoed in reports.
pub const GENERATOR_NAME: &str = "ChaCha20 (rand_chacha 0.3, seed_from_u64)";

/// Per-bin tolerance, in standard deviations.
pub const TOLERANCE_SIGMAS: f64 = 4.0;

/// Seeded deterministic random source.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform integer in `[0, bound)` by rejection sampling. `bound` must be non-zero.
    pub fn uniform_below(&mut self, bound: &BigUint) -> BigUint {
        self.rng.gen_biguint_below(bound)
    }
}

/// Picks the next position for process W.
pub trait IndexChooser {
    /// `available` lists the still-unassigned 0-based positions and `weights`
    /// their integer weights in the same order. Returns an offset into `available`.
    fn choose(&mut self, available: &[usize], weights: &[BigUint]) -> Result<usize>;
}

impl IndexChooser for RandomSource {
    fn choose(&mut self, _available: &[usize], weights: &[BigUint]) -> Result<usize> {
        let total: BigUint = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::domain("no positive weight left to choose from"));
        }
        let mut r = self.uniform_below(&total);
        for (offset, w) in weights.iter().enumerate() {
            if r < *w {
                return Ok(offset);
            }
            r -= w;
        }
        unreachable!("draw below the total weight")
    }
}

/// Replays a fixed sequence of 1-based positions.
#[derive(Debug, Clone)]
pub struct ForcedChoices {
    choices: std::vec::IntoIter<usize>,
}

impl ForcedChoices {
    pub fn new(choices: Vec<usize>) -> Self {
        ForcedChoices { choices: choices.into_iter() }
    }
}

impl IndexChooser for ForcedChoices {
    fn choose(&mut self, available: &[usize], _weights: &[BigUint]) -> Result<usize> {
        // Once only one position remains the choice is forced anyway.
        if available.len() == 1 {
            return Ok(0);
        }
        let next = self
            .choices
            .next()
            .ok_or_else(|| Error::domain("forced choice sequence exhausted"))?;
        available
            .iter()
            .position(|&i| i + 1 == next)
            .ok_or_else(|| Error::domain(format!("position {next} is not available")))
    }
}

/// Process W for one fixed weight vector, with weights pre-scaled to integers.
#[derive(Debug, Clone)]
pub struct ProcessW {
    weights: Vec<BigUint>,
}

impl ProcessW {
    pub fn new(weights: &WeightVector) -> Self {
        ProcessW { weights: common_denominator_scale(weights.as_slice()) }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Places `elements` (any order, distinct) and returns the ordering plus
    /// the 1-based positions chosen at each step.
    pub fn sample_traced(
        &self,
        elements: &[i64],
        chooser: &mut impl IndexChooser,
    ) -> Result<(LinearOrdering, Vec<usize>)> {
        if elements.len() != self.weights.len() {
            return Err(Error::domain(format!(
                "{} elements but {} weights",
                elements.len(),
                self.weights.len()
            )));
        }
        let mut desc = LinearOrdering::new(elements.to_vec())?.into_vec();
        desc.sort_unstable_by(|a, b| b.cmp(a));

        let mut slots: Vec<Option<i64>> = vec![None; desc.len()];
        let mut available: Vec<usize> = (0..desc.len()).collect();
        let mut avail_weights = self.weights.clone();
        let mut choices = Vec::with_capacity(desc.len());
        for value in desc {
            let offset = chooser.choose(&available, &avail_weights)?;
            let pos = available.remove(offset);
            avail_weights.remove(offset);
            slots[pos] = Some(value);
            choices.push(pos + 1);
        }
        let ordering = slots.into_iter().map(|s| s.expect("every slot filled")).collect();
        Ok((LinearOrdering::from_distinct(ordering), choices))
    }

    pub fn sample(&self, elements: &[i64], chooser: &mut impl IndexChooser) -> Result<LinearOrdering> {
        self.sample_traced(elements, chooser).map(|(o, _)| o)
    }
}

pub fn process_w_sample(
    elements: &[i64],
    weights: &WeightVector,
    chooser: &mut impl IndexChooser,
) -> Result<LinearOrdering> {
    ProcessW::new(weights).sample(elements, chooser)
}

/// The per-step selection probabilities that produce `ordering`: step `t`
/// picks the position of the `t`-th largest element among those still open.
pub fn ordering_step_factors(weights: &WeightVector, ordering: &LinearOrdering) -> Result<Vec<Rational>> {
    if weights.len() != ordering.len() {
        return Err(Error::domain(format!(
            "{} weights but ordering has length {}",
            weights.len(),
            ordering.len()
        )));
    }
    let mut positions: Vec<usize> = (0..ordering.len()).collect();
    positions.sort_unstable_by(|&i, &j| ordering.as_slice()[j].cmp(&ordering.as_slice()[i]));
    let w = weights.as_slice();
    let mut remaining = weights.total();
    let mut factors = Vec::with_capacity(positions.len());
    for i in positions {
        factors.push(&w[i] / &remaining);
        remaining -= &w[i];
    }
    Ok(factors)
}

/// Exact probability that process W produces `ordering`.
pub fn ordering_probability(weights: &WeightVector, ordering: &LinearOrdering) -> Result<Rational> {
    Ok(ordering_step_factors(weights, ordering)?.into_iter().product())
}

fn check_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap {
        return Err(Error::ResourceLimit { what: "enumeration size", requested: m, cap });
    }
    Ok(())
}

/// Watershed distribution under process W, by summing exact ordering
/// probabilities over all `(2n)!` orderings.
pub fn exact_watershed_distribution(weights: &WeightVector, cap: usize) -> Result<Vec<Rational>> {
    let m = weights.len();
    if !m.is_multiple_of(2) {
        return Err(Error::InvalidLength { len: m, reason: "even number of weights required" });
    }
    check_cap(m, cap)?;
    let mut dist = vec![Rational::zero(); m / 2 + 1];
    for p in orderings_of(m) {
        let (k, _) = watershed_fast(&p)?;
        dist[k] += ordering_probability(weights, &p)?;
    }
    let total: Rational = dist.iter().sum();
    if !total.is_one() {
        return Err(Error::contradiction(format!("ordering probabilities sum to {total}")));
    }
    Ok(dist)
}

fn index_set(indices: &[usize], m: usize, name: &str) -> Result<BTreeSet<usize>> {
    let mut set = BTreeSet::new();
    for &i in indices {
        if i == 0 || i > m {
            return Err(Error::domain(format!("{name} index {i} is outside 1..={m}")));
        }
        set.insert(i);
    }
    Ok(set)
}

fn subset_pair(weights: &WeightVector, q: &[usize], r: &[usize]) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    let m = weights.len();
    let q = index_set(q, m, "Q")?;
    let r = index_set(r, m, "R")?;
    if r.is_empty() {
        return Err(Error::domain("R must be non-empty"));
    }
    if !q.is_subset(&r) {
        return Err(Error::domain("Q is not a subset of R"));
    }
    Ok((q, r))
}

/// `(sum_{j in Q} w_j) / (sum_{j in R} w_j)` for 1-based index sets `Q ⊆ R`.
pub fn subset_max_probability(weights: &WeightVector, q: &[usize], r: &[usize]) -> Result<Rational> {
    let (q, r) = subset_pair(weights, q, r)?;
    let w = weights.as_slice();
    let sum = |s: &BTreeSet<usize>| s.iter().map(|&i| &w[i - 1]).sum::<Rational>();
    Ok(sum(&q) / sum(&r))
}

/// Probability that the largest of `{p_i : i in R}` sits at an index in `Q`,
/// by enumerating every ordering weighted by [`ordering_probability`].
pub fn subset_max_probability_enumerated(
    weights: &WeightVector,
    q: &[usize],
    r: &[usize],
    cap: usize,
) -> Result<Rational> {
    let (q, r) = subset_pair(weights, q, r)?;
    check_cap(weights.len(), cap)?;
    let mut total = Rational::zero();
    for p in orderings_of(weights.len()) {
        let argmax = *r
            .iter()
            .max_by_key(|&&i| p.at(i).expect("index in range"))
            .expect("R is non-empty");
        if q.contains(&argmax) {
            total += ordering_probability(weights, &p)?;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinReport {
    pub k: usize,
    /// Expected frequency, display only.
    pub expected: f64,
    pub observed: f64,
    pub sigma: f64,
    pub tolerance: f64,
    pub deviation: f64,
    pub within_tolerance: bool,
}

/// Empirical watershed histogram compared against an exact distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    #[serde(with = "rational::serde_str::opt_vec")]
    pub exact: Option<Vec<Rational>>,
    pub empirical_counts: Vec<u64>,
    pub sample_size: u64,
    pub seed: u64,
    pub generator: &'static str,
    pub tolerance_sigmas: f64,
    pub bins: Vec<BinReport>,
    /// Pearson chi-square against `exact`; informational only.
    pub chi_square: Option<f64>,
    pub passed: bool,
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Draws `sample_size` orderings of `{1, ..., 2n}` from process W with the
/// given weights and tallies their watersheds.
pub fn watershed_histogram_sampled(weights: &WeightVector, sample_size: u64, seed: u64) -> Result<Vec<u64>> {
    let m = weights.len();
    if !m.is_multiple_of(2) {
        return Err(Error::InvalidLength { len: m, reason: "even number of weights required" });
    }
    let process = ProcessW::new(weights);
    let elements: Vec<i64> = (1..=m as i64).collect();
    let mut rng = RandomSource::new(seed);
    let mut counts = vec![0u64; m / 2 + 1];
    for _ in 0..sample_size {
        let p = process.sample(&elements, &mut rng)?;
        counts[watershed_fast(&p)?.0] += 1;
    }
    Ok(counts)
}

/// Builds a report comparing `counts` against `exact` at the 4-sigma per-bin tolerance.
pub fn compare_histogram(exact: Option<Vec<Rational>>, counts: Vec<u64>, seed: u64) -> DistributionReport {
    let sample_size: u64 = counts.iter().sum();
    let n_f = sample_size as f64;
    let mut bins = Vec::new();
    let mut chi_square = None;
    if let Some(exact) = &exact {
        let mut chi = 0.0;
        for (k, (p, &c)) in exact.iter().zip(&counts).enumerate() {
            let expected = to_f64(p);
            let observed = c as f64 / n_f;
            let sigma = (expected * (1.0 - expected) / n_f).sqrt();
            let tolerance = TOLERANCE_SIGMAS * sigma;
            let deviation = (observed - expected).abs();
            if expected > 0.0 {
                chi += (c as f64 - n_f * expected).powi(2) / (n_f * expected);
            }
            bins.push(BinReport {
                k,
                expected,
                observed,
                sigma,
                tolerance,
                deviation,
                within_tolerance: deviation <= tolerance,
            });
        }
        chi_square = Some(chi);
    }
    let passed = exact.is_some() && bins.iter().all(|b| b.within_tolerance);
    DistributionReport {
        exact,
        empirical_counts: counts,
        sample_size,
        seed,
        generator: GENERATOR_NAME,
        tolerance_sigmas: TOLERANCE_SIGMAS,
        bins,
        chi_square,
        passed,
    }
}

/// Monte Carlo check of `phi_k` as the watershed distribution of process W.
pub fn monte_carlo_watershed(params: &HikitaParams, sample_size: u64, seed: u64) -> Result<DistributionReport> {
    if sample_size == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let exact = hikita_distribution(params)?;
    let counts = watershed_histogram_sampled(&weights_from_params(params), sample_size, seed)?;
    Ok(compare_histogram(Some(exact), counts, seed))
}
