//! One-shot runner for the exhaustive, exact and statistical checks.
//!
//! Each suite reports how many cases it checked and, on failure, the first
//! counterexample as JSON.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bulldozer::{line_from_sequence, unsweepable_towns};
use crate::error::Result;
use crate::hikita::{hikita_distribution, weights_from_params, HikitaParams, WeightVector};
use crate::perm::{
    all_cycles_even, canonicalize, even_via_records, foata, foata_inverse, orderings_of, LinearOrdering,
};
use crate::rational::{format_rational, int, ratio, Rational};
use crate::sampler::{
    exact_watershed_distribution, monte_carlo_watershed, ordering_probability, ordering_step_factors,
    subset_max_probability, ForcedChoices, ProcessW,
};
use crate::watershed::{
    even_total_brute, watershed_brute, watershed_candidates, watershed_count, watershed_count_total,
    watershed_fast_with,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate defects used to check that the suites catch real bugs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Classify pairs with the ascent/descent comparison reversed.
    FlipAscent,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub level: Level,
    pub enumeration_cap: usize,
    pub monte_carlo_samples: u64,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl VerifyConfig {
    pub fn new(level: Level, seed: u64) -> Self {
        VerifyConfig {
            level,
            enumeration_cap: crate::watershed::DEFAULT_ENUMERATION_CAP,
            monte_carlo_samples: 100_000,
            seed,
            fault: None,
        }
    }

    /// Largest `n` enumerated over `{1, ..., 2n}`.
    fn max_n(&self) -> usize {
        let by_level = match self.level {
            Level::Quick => 3,
            Level::Full => 4,
        };
        by_level.min(self.enumeration_cap / 2)
    }

    fn watershed(&self, p: &LinearOrdering) -> Result<usize> {
        match self.fault {
            None => watershed_fast_with(p, |x, y| x < y).map(|r| r.0),
            Some(Fault::FlipAscent) => watershed_fast_with(p, |x, y| x > y).map(|r| r.0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub scale: String,
    pub checked: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub seed: u64,
    pub enumeration_cap: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

/// Outcome of a suite body: cases checked, or the first failure.
type Outcome = std::result::Result<u64, Value>;

fn fail(v: Value) -> Outcome {
    Err(v)
}

fn err_value(e: crate::error::Error) -> Value {
    json!({ "error": e.to_string() })
}

fn suite(name: &'static str, scale: String, body: impl FnOnce() -> Outcome) -> SuiteResult {
    let start = Instant::now();
    let outcome = body();
    let elapsed_ms = start.elapsed().as_millis();
    match outcome {
        Ok(checked) => SuiteResult { name, scale, checked, passed: true, counterexample: None, elapsed_ms },
        Err(cx) => SuiteResult { name, scale, checked: 0, passed: false, counterexample: Some(cx), elapsed_ms },
    }
}

pub fn run(config: &VerifyConfig) -> VerifyReport {
    let max_n = config.max_n();
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut suites = Vec::new();

    suites.push(suite("foata_bijection", format!("all orderings of length <= {}", 2 * max_n), || {
        let mut checked = 0;
        for m in 0..=2 * max_n {
            for rho in orderings_of(m) {
                let pi = foata_inverse(&rho);
                if foata(&pi) != rho || canonicalize(pi.cycles().to_vec()).as_ref() != Ok(&pi) {
                    return fail(json!({ "ordering": rho }));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }));

    suites.push(suite("even_cycles_via_records", format!("2n <= {}", 2 * max_n), || {
        let mut checked = 0;
        for n in 0..=max_n {
            for rho in orderings_of(2 * n) {
                if even_via_records(&rho).map_err(err_value)? != all_cycles_even(&foata_inverse(&rho)) {
                    return fail(json!({ "ordering": rho }));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }));

    suites.push(suite("watershed_unique_and_fast_equals_brute", format!("2n <= {}", 2 * max_n), || {
        let mut checked = 0;
        for n in 0..=max_n {
            for p in orderings_of(2 * n) {
                let ks = watershed_candidates(&p).map_err(err_value)?;
                let fast = config.watershed(&p).map_err(err_value)?;
                if ks.len() != 1 || ks[0] != fast {
                    return fail(json!({ "ordering": p, "brute_candidates": ks, "fast": fast }));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }));

    let random_count = match config.level {
        Level::Quick => 500,
        Level::Full => 10_000,
    };
    let random_seed: u64 = rng.gen();
    suites.push(suite("watershed_random_long", format!("{random_count} random orderings, 2n = 100"), || {
        let mut local = ChaCha20Rng::seed_from_u64(random_seed);
        let mut v: Vec<i64> = (1..=100).collect();
        for _ in 0..random_count {
            v.shuffle(&mut local);
            let p = LinearOrdering::new(v.clone()).map_err(err_value)?;
            let brute = watershed_brute(&p).map_err(err_value)?;
            let fast = config.watershed(&p).map_err(err_value)?;
            if brute != fast {
                return fail(json!({ "ordering": p, "brute": brute, "fast": fast }));
            }
        }
        Ok(random_count)
    }));

    suites.push(suite("worked_examples", "3 sequences".into(), || {
        let cases: [(&[i64], usize); 3] = [
            (&[2, 6, 1, 5, 4, 3], 2),
            (&[12, 20, 7, 15, 13, 11, 3, 9, 14, 5, 16, 10, 2, 19, 18, 4, 1, 8, 6, 17], 7),
            (&[2, 5, 6, 7, 9, 3, 8, 4, 10, 1], 2),
        ];
        for (seq, expected) in cases {
            let p = LinearOrdering::new(seq.to_vec()).map_err(err_value)?;
            let fast = config.watershed(&p).map_err(err_value)?;
            let brute = watershed_brute(&p).map_err(err_value)?;
            if fast != expected || brute != expected {
                return fail(json!({ "ordering": p, "expected": expected, "fast": fast, "brute": brute }));
            }
        }
        Ok(3)
    }));

    suites.push(suite("watershed_counts", format!("histograms 2n <= {}, totals n <= 10", 2 * max_n), || {
        let mut checked = 0;
        for n in 0..=max_n {
            let mut hist = vec![0u64; n + 1];
            for p in orderings_of(2 * n) {
                hist[watershed_brute(&p).map_err(err_value)?] += 1;
            }
            for (k, &h) in hist.iter().enumerate() {
                let formula = watershed_count(n as u64, k as u64).map_err(err_value)?;
                let even = even_total_brute(n, k, config.enumeration_cap).map_err(err_value)?;
                if BigUint::from(h) != formula || even != formula {
                    return fail(json!({
                        "n": n, "k": k, "histogram": h,
                        "formula": formula.to_string(), "even_total": even.to_string(),
                    }));
                }
                checked += 1;
            }
        }
        let mut fact = BigUint::one();
        for n in 0..=10u64 {
            if n > 0 {
                fact *= BigUint::from((2 * n - 1) * (2 * n));
            }
            if watershed_count_total(n) != fact {
                return fail(json!({ "n": n, "total": watershed_count_total(n).to_string() }));
            }
            checked += 1;
        }
        Ok(checked)
    }));

    let q_choices = [int(1), int(2), ratio(1, 2), ratio(3, 2), int(5)];
    suites.push(suite("phi_normalization", "200 random parameter sets, n <= 5".into(), || {
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let a: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
            let b: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
            let q = q_choices[rng.gen_range(0..q_choices.len())].clone();
            let params = HikitaParams::new(a, b, q).map_err(err_value)?;
            // hikita_distribution checks positivity and the exact sum itself.
            hikita_distribution(&params).map_err(|e| json!({ "params": params, "error": e.to_string() }))?;
        }
        Ok(200)
    }));

    let t4_max_n = match config.level {
        Level::Quick => 2,
        Level::Full => 3,
    }
    .min(config.enumeration_cap / 2);
    suites.push(suite("phi_is_watershed_law", format!("n <= {t4_max_n}, a_i, b_i <= 2, q in {{1, 2, 1/2, 3/2}}"), || {
        let mut checked = 0;
        for n in 1..=t4_max_n {
            let blocks = 1usize << (2 * n);
            for q in [int(1), int(2), ratio(1, 2), ratio(3, 2)] {
                for mask in 0..blocks {
                    let bit = |i: usize| 1 + ((mask >> i) & 1) as u64;
                    let a = (0..n).map(|i| bit(2 * i)).collect();
                    let b = (0..n).map(|i| bit(2 * i + 1)).collect();
                    let params = HikitaParams::new(a, b, q.clone()).map_err(err_value)?;
                    let formula = hikita_distribution(&params).map_err(err_value)?;
                    let weights = weights_from_params(&params);
                    let enumerated =
                        exact_watershed_distribution(&weights, config.enumeration_cap).map_err(err_value)?;
                    if formula != enumerated {
                        return fail(json!({
                            "params": params,
                            "formula": formula.iter().map(format_rational).collect::<Vec<_>>(),
                            "enumerated": enumerated.iter().map(format_rational).collect::<Vec<_>>(),
                        }));
                    }
                    checked += 1;
                }
            }
        }
        Ok(checked)
    }));

    let subset_max = match config.level {
        Level::Quick => 4,
        Level::Full => 6,
    }
    .min(config.enumeration_cap);
    suites.push(suite("subset_maximum_law", format!("ground sets of size <= {subset_max}, 20 weight vectors"), || {
        let mut checked = 0;
        for t in 0..20 {
            let m = 1 + t % subset_max;
            let w: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=20)).collect();
            let weights = WeightVector::from_integers(&w).map_err(err_value)?;
            let table = argmax_table(&weights).map_err(err_value)?;
            for r_mask in 1usize..(1 << m) {
                // Iterate over every submask of r_mask, including empty.
                let mut q_mask = r_mask;
                loop {
                    let q = mask_indices(q_mask);
                    let r = mask_indices(r_mask);
                    let closed = subset_max_probability(&weights, &q, &r).map_err(err_value)?;
                    let enumerated: Rational = q.iter().map(|&i| &table[r_mask][i - 1]).sum();
                    if closed != enumerated {
                        return fail(json!({
                            "weights": w, "Q": q, "R": r,
                            "closed_form": format_rational(&closed),
                            "enumerated": format_rational(&enumerated),
                        }));
                    }
                    checked += 1;
                    if q_mask == 0 {
                        break;
                    }
                    q_mask = (q_mask - 1) & r_mask;
                }
            }
        }
        Ok(checked)
    }));

    let (mc_n, mc_samples) = match config.level {
        Level::Quick => (3, config.monte_carlo_samples.min(20_000)),
        Level::Full => (5, config.monte_carlo_samples),
    };
    let mc_seed: u64 = rng.gen();
    suites.push(suite("monte_carlo_phi", format!("n = {mc_n}, {mc_samples} samples, seed {mc_seed}"), || {
        let mut local = ChaCha20Rng::seed_from_u64(mc_seed);
        let a = (0..mc_n).map(|_| local.gen_range(1..=3)).collect();
        let b = (0..mc_n).map(|_| local.gen_range(1..=3)).collect();
        let q = [int(1), int(2), ratio(1, 2), ratio(3, 2)][local.gen_range(0..4)].clone();
        let params = HikitaParams::new(a, b, q).map_err(err_value)?;
        let report = monte_carlo_watershed(&params, mc_samples, mc_seed).map_err(err_value)?;
        if !report.passed {
            return fail(json!({ "params": params, "report": report }));
        }
        Ok(mc_samples)
    }));

    suites.push(suite("bulldozer_watershed", format!("lines from all orderings, 2m <= {}", 2 * max_n), || {
        let mut checked = 0;
        for m in 0..=max_n {
            for seq in orderings_of(2 * m) {
                let line = line_from_sequence(&seq).map_err(err_value)?;
                let towns = unsweepable_towns(&line).map_err(err_value)?;
                let k = config.watershed(&seq).map_err(err_value)?;
                if towns != vec![k + 1] {
                    return fail(json!({ "sequence": seq, "unsweepable": towns, "watershed": k }));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }));

    suites.push(suite("process_w_worked_example", "weights 7,2,4,7; choices 3,4,1".into(), || {
        let weights = WeightVector::from_integers(&[7, 2, 4, 7]).map_err(err_value)?;
        let mut forced = ForcedChoices::new(vec![3, 4, 1]);
        let p = ProcessW::new(&weights).sample(&[1, 2, 3, 4], &mut forced).map_err(err_value)?;
        let factors = ordering_step_factors(&weights, &p).map_err(err_value)?;
        let expected = vec![ratio(4, 20), ratio(7, 16), ratio(7, 9), int(1)];
        if p.as_slice() != [2, 1, 4, 3] || factors != expected {
            return fail(json!({
                "ordering": p,
                "factors": factors.iter().map(format_rational).collect::<Vec<_>>(),
            }));
        }
        Ok(1)
    }));

    let passed = suites.iter().all(|s| s.passed);
    VerifyReport {
        level: config.level,
        seed: config.seed,
        enumeration_cap: config.enumeration_cap,
        fault: config.fault,
        suites,
        passed,
    }
}

fn mask_indices(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// `table[r_mask][i]`: probability that the largest entry over positions in
/// `r_mask` sits at position `i + 1`, summed over every ordering.
fn argmax_table(weights: &WeightVector) -> Result<Vec<Vec<Rational>>> {
    let m = weights.len();
    let mut table = vec![vec![Rational::zero(); m]; 1 << m];
    for p in orderings_of(m) {
        let prob = ordering_probability(weights, &p)?;
        let v = p.as_slice();
        for (r_mask, row) in table.iter_mut().enumerate().skip(1) {
            let argmax = (0..m)
                .filter(|i| r_mask >> i & 1 == 1)
                .max_by_key(|&i| v[i])
                .expect("non-empty mask");
            row[argmax] += &prob;
        }
    }
    Ok(table)
}
