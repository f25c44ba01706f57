//! The watershed statistic of an even-length sequence.
//!
//! For a sequence `p_1, ..., p_2n` of distinct integers the watershed is the
//! unique `k` such that both the reversed prefix `p_2k, ..., p_1` and the
//! suffix `p_{2k+1}, ..., p_2n` invert under the Foata map to permutations
//! whose cycles all have even length.
//!
//! [`watershed_brute`] checks that definition for every `k`. [`watershed_fast`]
//! runs the ascent/descent run-collapse algorithm level by level and records
//! a [`WatershedTrace`].

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{all_cycles_even, foata_inverse, one_line_cycle_lengths, orderings_of, LinearOrdering};

/// Exact non-negative count.
pub type BigCount = BigUint;

/// Default cap on `2n` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

fn require_even(ordering: &LinearOrdering) -> Result<usize> {
    if !ordering.len().is_multiple_of(2) {
        return Err(Error::InvalidLength {
            len: ordering.len(),
            reason: "the watershed is only defined for even-length sequences",
        });
    }
    Ok(ordering.len() / 2)
}

fn inverts_to_even_cycles(part: &LinearOrdering) -> bool {
    all_cycles_even(&foata_inverse(part))
}

/// Every `k` in `0..=n` that satisfies the defining property.
pub fn watershed_candidates(ordering: &LinearOrdering) -> Result<Vec<usize>> {
    let n = require_even(ordering)?;
    Ok((0..=n)
        .filter(|&k| {
            inverts_to_even_cycles(&ordering.slice(0, 2 * k).reversed())
                && inverts_to_even_cycles(&ordering.slice(2 * k, 2 * n))
        })
        .collect())
}

/// Watershed by direct search over every split, asserting the split is unique.
pub fn watershed_brute(ordering: &LinearOrdering) -> Result<usize> {
    match watershed_candidates(ordering)?.as_slice() {
        [k] => Ok(*k),
        ks => Err(Error::contradiction(format!(
            "sequence {ordering} has {} valid splits {ks:?}, expected exactly one",
            ks.len()
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Letter {
    A,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Assignment {
    Left,
    Right,
    /// Collapsed into a representative for the next level.
    Carried,
}

/// One maximal run of equal letters at some level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunTrace {
    pub letter: Letter,
    /// 1-based positions in the original sequence covered by this run.
    pub positions: Vec<usize>,
    pub representative: i64,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelTrace {
    /// The sequence the letters of this level are read from.
    pub sequence: Vec<i64>,
    pub letters: Vec<Letter>,
    pub runs: Vec<RunTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WatershedTrace {
    pub levels: Vec<LevelTrace>,
    /// Number of original positions assigned to the left part (`2k`).
    pub left_cut: usize,
}

impl WatershedTrace {
    pub fn left_positions(&self) -> Vec<usize> {
        self.positions_with(Assignment::Left)
    }

    pub fn right_positions(&self) -> Vec<usize> {
        self.positions_with(Assignment::Right)
    }

    fn positions_with(&self, which: Assignment) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .levels
            .iter()
            .flat_map(|l| &l.runs)
            .filter(|r| r.assignment == which)
            .flat_map(|r| r.positions.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// Checks that every representative is the maximum over its positions and
    /// that the left and right positions partition `1..=len`.
    pub fn check_consistency(&self, original: &LinearOrdering) -> Result<()> {
        for level in &self.levels {
            for run in &level.runs {
                let max = run.positions.iter().filter_map(|&p| original.at(p)).max();
                if max != Some(run.representative) {
                    return Err(Error::contradiction(format!(
                        "run representative {} is not the maximum over positions {:?}",
                        run.representative, run.positions
                    )));
                }
            }
        }
        let left = self.left_positions();
        let right = self.right_positions();
        let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
        all.sort_unstable();
        if all != (1..=original.len()).collect::<Vec<_>>() {
            return Err(Error::contradiction("left/right assignment is not a partition"));
        }
        if left.len() != self.left_cut || left.last().is_some_and(|&p| p != self.left_cut) {
            return Err(Error::contradiction("left part is not a prefix"));
        }
        Ok(())
    }
}

/// A term of the current level: its value and the original 0-based span it stands for.
#[derive(Debug, Clone, Copy)]
struct Term {
    value: i64,
    start: usize,
    end: usize,
}

/// Watershed via the level-by-level ascent/descent run collapse.
pub fn watershed_fast(ordering: &LinearOrdering) -> Result<(usize, WatershedTrace)> {
    watershed_fast_with(ordering, |x, y| x < y)
}

/// [`watershed_fast`] with a pluggable ascent test. Only used to build
/// deliberately broken variants for mutation testing of the verifier.
#[doc(hidden)]
pub fn watershed_fast_with(
    ordering: &LinearOrdering,
    is_ascent: impl Fn(i64, i64) -> bool,
) -> Result<(usize, WatershedTrace)> {
    require_even(ordering)?;
    let mut terms: Vec<Term> = ordering
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &value)| Term { value, start: i, end: i + 1 })
        .collect();
    let mut levels = Vec::new();
    let mut left_cut = 0;

    while !terms.is_empty() {
        if !terms.len().is_multiple_of(2) {
            return Err(Error::contradiction(format!(
                "level {} has odd length {}",
                levels.len() + 1,
                terms.len()
            )));
        }
        let letters: Vec<Letter> = terms
            .chunks_exact(2)
            .map(|p| if is_ascent(p[0].value, p[1].value) { Letter::A } else { Letter::D })
            .collect();

        // Maximal runs as half-open ranges of pair indices.
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for (i, l) in letters.iter().enumerate() {
            match runs.last_mut() {
                Some((_, end)) if letters[*end - 1] == *l => *end = i + 1,
                _ => runs.push((i, i + 1)),
            }
        }

        let last = runs.len() - 1;
        let mut next = Vec::with_capacity(runs.len());
        let mut run_traces = Vec::with_capacity(runs.len());
        let mut consumed = 0;
        for (idx, &(a, b)) in runs.iter().enumerate() {
            let members = &terms[2 * a..2 * b];
            let start = members[0].start;
            let end = members[members.len() - 1].end;
            let representative = members.iter().map(|t| t.value).max().expect("run is non-empty");
            let assignment = match letters[a] {
                Letter::A if idx == 0 => {
                    left_cut += end - start;
                    Assignment::Left
                }
                Letter::D if idx == last => Assignment::Right,
                _ => {
                    next.push(Term { value: representative, start, end });
                    Assignment::Carried
                }
            };
            consumed += 2 * (b - a);
            run_traces.push(RunTrace {
                letter: letters[a],
                positions: (start + 1..=end).collect(),
                representative,
                assignment,
            });
        }
        if consumed != terms.len() || next.len() >= terms.len() {
            return Err(Error::contradiction("run collapse did not shrink the level"));
        }
        levels.push(LevelTrace {
            sequence: terms.iter().map(|t| t.value).collect(),
            letters,
            runs: run_traces,
        });
        terms = next;
    }

    if !left_cut.is_multiple_of(2) {
        return Err(Error::contradiction("odd number of terms assigned left"));
    }
    Ok((left_cut / 2, WatershedTrace { levels, left_cut }))
}

/// `m!! = m (m-2) (m-4) ...`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigCount> {
    if m < -1 {
        return Err(Error::domain(format!("double factorial of {m} is undefined")));
    }
    let mut acc = BigUint::one();
    let mut i = m;
    while i > 1 {
        acc *= BigUint::from(i as u64);
        i -= 2;
    }
    Ok(acc)
}

/// Permutations of `2n` elements with all cycles even: `((2n-1)!!)^2`.
pub fn all_even_count(n: u64) -> BigCount {
    let d = double_factorial(2 * n as i64 - 1).expect("2n-1 >= -1");
    &d * &d
}

/// Orderings of `{1, ..., 2n}` with watershed `k`:
/// `C(2n, 2k) ((2k-1)!!)^2 ((2n-2k-1)!!)^2`.
pub fn watershed_count(n: u64, k: u64) -> Result<BigCount> {
    if k > n {
        return Err(Error::domain(format!("k = {k} is outside 0..={n}")));
    }
    let choose = binomial(BigUint::from(2 * n), BigUint::from(2 * k));
    Ok(choose * all_even_count(k) * all_even_count(n - k))
}

fn check_cap(two_n: usize, cap: usize) -> Result<()> {
    if two_n > cap {
        return Err(Error::ResourceLimit {
            what: "enumeration size 2n",
            requested: two_n,
            cap,
        });
    }
    Ok(())
}

/// Permutations of `{1, ..., 2n}` whose even-length cycles have total length
/// `2k`, counted by enumeration.
pub fn even_total_brute(n: usize, k: usize, cap: usize) -> Result<BigCount> {
    if k > n {
        return Err(Error::domain(format!("k = {k} is outside 0..={n}")));
    }
    check_cap(2 * n, cap)?;
    let mut count = 0u64;
    for p in orderings_of(2 * n) {
        let even_total: usize = one_line_cycle_lengths(p.as_slice())?
            .into_iter()
            .filter(|l| l % 2 == 0)
            .sum();
        if even_total == 2 * k {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Histogram of [`watershed_brute`] over every ordering of `{1, ..., 2n}`.
pub fn watershed_histogram_brute(n: usize, cap: usize) -> Result<Vec<BigCount>> {
    check_cap(2 * n, cap)?;
    let mut counts = vec![0u64; n + 1];
    for p in orderings_of(2 * n) {
        counts[watershed_brute(&p)?] += 1;
    }
    Ok(counts.into_iter().map(BigUint::from).collect())
}

/// `sum_k watershed_count(n, k)`; should equal `(2n)!`.
pub fn watershed_count_total(n: u64) -> BigCount {
    (0..=n).fold(BigUint::zero(), |acc, k| acc + watershed_count(n, k).expect("k <= n"))
}
