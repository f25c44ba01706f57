//! Linear orderings, cycle-form permutations and the Foata map.
//!
//! The Foata map writes a permutation in canonical cycle form (largest element
//! first in every cycle, cycles sorted by their largest element) and then
//! drops the parentheses. It is inverted by cutting the sequence in front of
//! every left-to-right maximum.
//!
//! Positions in the public API are 1-based.

use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence of pairwise distinct integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct LinearOrdering {
    elements: Vec<i64>,
}

impl LinearOrdering {
    pub fn new(elements: Vec<i64>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(elements.len());
        for &e in &elements {
            if !seen.insert(e) {
                return Err(Error::InvalidPermutation(format!("duplicate element {e}")));
            }
        }
        Ok(LinearOrdering { elements })
    }

    /// Caller guarantees distinctness.
    pub(crate) fn from_distinct(elements: Vec<i64>) -> Self {
        debug_assert!(elements.iter().all_unique());
        LinearOrdering { elements }
    }

    pub fn empty() -> Self {
        LinearOrdering::default()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.elements
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Element at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> Option<i64> {
        pos.checked_sub(1).and_then(|i| self.elements.get(i).copied())
    }

    pub fn reversed(&self) -> LinearOrdering {
        LinearOrdering::from_distinct(self.elements.iter().rev().copied().collect())
    }

    /// The sub-ordering between 0-based offsets `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> LinearOrdering {
        LinearOrdering::from_distinct(self.elements[start..end].to_vec())
    }
}

impl<'de> Deserialize<'de> for LinearOrdering {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        LinearOrdering::new(v).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<i64>> for LinearOrdering {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        LinearOrdering::new(v)
    }
}

impl fmt::Display for LinearOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.elements.iter().join(","))
    }
}

/// A permutation of a finite set of integers in canonical disjoint-cycle form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct CyclePermutation {
    cycles: Vec<Vec<i64>>,
}

impl CyclePermutation {
    pub fn empty() -> Self {
        CyclePermutation::default()
    }

    pub fn cycles(&self) -> &[Vec<i64>] {
        &self.cycles
    }

    pub fn into_cycles(self) -> Vec<Vec<i64>> {
        self.cycles
    }

    /// Number of elements moved or fixed by the permutation.
    pub fn support_len(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    pub fn cycle_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.cycles.iter().map(Vec::len)
    }
}

impl<'de> Deserialize<'de> for CyclePermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            cycles: Vec<Vec<i64>>,
        }
        let raw = Raw::deserialize(d)?;
        canonicalize(raw.cycles).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for CyclePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            write!(f, "({})", c.iter().join(","))?;
        }
        Ok(())
    }
}

/// Normalizes arbitrary disjoint cycles: each cycle is rotated so its maximum
/// comes first and the cycles are sorted by maximum.
pub fn canonicalize(cycles: Vec<Vec<i64>>) -> Result<CyclePermutation> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(cycles.len());
    for mut cycle in cycles {
        let Some(argmax) = cycle.iter().position_max() else {
            return Err(Error::InvalidPermutation("empty cycle".into()));
        };
        for &e in &cycle {
            if !seen.insert(e) {
                return Err(Error::InvalidPermutation(format!("duplicate element {e}")));
            }
        }
        cycle.rotate_left(argmax);
        out.push(cycle);
    }
    out.sort_unstable_by_key(|c| c[0]);
    Ok(CyclePermutation { cycles: out })
}

/// The Foata map: concatenation of the canonical cycles.
pub fn foata(perm: &CyclePermutation) -> LinearOrdering {
    LinearOrdering::from_distinct(perm.cycles.concat())
}

/// Inverse of the Foata map: cut before every left-to-right maximum.
pub fn foata_inverse(ordering: &LinearOrdering) -> CyclePermutation {
    let xs = ordering.as_slice();
    let mut starts = records(ordering).into_iter().map(|p| p - 1).collect::<Vec<_>>();
    starts.push(xs.len());
    let cycles = starts.windows(2).map(|w| xs[w[0]..w[1]].to_vec()).collect();
    CyclePermutation { cycles }
}

/// 1-based positions of the left-to-right maxima.
pub fn records(ordering: &LinearOrdering) -> Vec<usize> {
    let mut out = Vec::new();
    let mut best: Option<i64> = None;
    for (i, &x) in ordering.as_slice().iter().enumerate() {
        if best.is_none_or(|b| x > b) {
            best = Some(x);
            out.push(i + 1);
        }
    }
    out
}

pub fn all_cycles_even(perm: &CyclePermutation) -> bool {
    perm.cycles.iter().all(|c| c.len() % 2 == 0)
}

/// True iff no left-to-right maximum sits at an even position.
///
/// Equivalent to `all_cycles_even(&foata_inverse(ordering))` for even-length input.
pub fn even_via_records(ordering: &LinearOrdering) -> Result<bool> {
    if !ordering.len().is_multiple_of(2) {
        return Err(Error::InvalidLength {
            len: ordering.len(),
            reason: "even length required",
        });
    }
    let mut running_max = i64::MIN;
    for (i, &x) in ordering.as_slice().iter().enumerate() {
        if x > running_max {
            if i % 2 == 1 {
                return Ok(false);
            }
            running_max = x;
        }
    }
    Ok(true)
}

/// All orderings of `{1, ..., m}` in lexicographic order.
pub fn orderings_of(m: usize) -> impl Iterator<Item = LinearOrdering> {
    (1..=m as i64)
        .permutations(m)
        .map(LinearOrdering::from_distinct)
}

/// Cycle lengths of the permutation `i -> one_line[i-1]` of `{1, ..., m}`.
///
/// This reads the ordering as one-line notation, which is unrelated to the
/// Foata map; the counting oracles rely on that independence.
pub fn one_line_cycle_lengths(one_line: &[i64]) -> Result<Vec<usize>> {
    let m = one_line.len();
    let mut image = Vec::with_capacity(m);
    for &v in one_line {
        if v < 1 || v as usize > m {
            return Err(Error::InvalidPermutation(format!(
                "{v} is not in 1..={m}"
            )));
        }
        image.push(v as usize - 1);
    }
    let mut visited = vec![false; m];
    let mut lengths = Vec::new();
    for start in 0..m {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            i = image[i];
            len += 1;
        }
        if i != start {
            return Err(Error::InvalidPermutation("not a bijection".into()));
        }
        lengths.push(len);
    }
    Ok(lengths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ord(v: &[i64]) -> LinearOrdering {
        LinearOrdering::new(v.to_vec()).unwrap()
    }

    fn perm(cycles: &[&[i64]]) -> CyclePermutation {
        canonicalize(cycles.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let p = perm(&[&[2, 5], &[7], &[3, 6, 9]]);
        assert_eq!(p.cycles(), &[vec![5, 2], vec![7], vec![9, 3, 6]]);
        let q = perm(&[&[5, 2], &[7], &[9, 3, 6]]);
        assert_eq!(p, q);
        assert_eq!(canonicalize(vec![]).unwrap(), CyclePermutation::empty());
    }

    #[test]
    fn canonicalize_rejects_bad_input() {
        assert!(matches!(
            canonicalize(vec![vec![1, 2], vec![2]]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            canonicalize(vec![vec![3, 3]]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            canonicalize(vec![vec![]]),
            Err(Error::InvalidPermutation(_))
        ));
    }

    #[test]
    fn ordering_rejects_duplicates() {
        assert!(LinearOrdering::new(vec![1, 2, 1]).is_err());
        assert!(LinearOrdering::new(vec![]).is_ok());
    }

    #[test]
    fn foata_examples() {
        assert_eq!(foata(&perm(&[&[5, 2], &[7], &[9, 3, 6]])), ord(&[5, 2, 7, 9, 3, 6]));
        assert_eq!(foata(&perm(&[&[7]])), ord(&[7]));
        assert_eq!(foata(&perm(&[&[4, 3]])), ord(&[4, 3]));
    }

    #[test]
    fn foata_inverse_examples() {
        assert_eq!(
            foata_inverse(&ord(&[5, 2, 7, 9, 3, 6])),
            perm(&[&[5, 2], &[7], &[9, 3, 6]])
        );
        assert_eq!(foata_inverse(&LinearOrdering::empty()), CyclePermutation::empty());
        assert_eq!(foata_inverse(&ord(&[5, 1, 6, 2])), perm(&[&[5, 1], &[6, 2]]));
    }

    #[test]
    fn records_examples() {
        assert_eq!(records(&ord(&[5, 2, 7, 9, 3, 6])), vec![1, 3, 4]);
        assert_eq!(records(&ord(&[1])), vec![1]);
        assert_eq!(records(&ord(&[2, 6, 1, 5, 4, 3])), vec![1, 2]);
        assert!(records(&LinearOrdering::empty()).is_empty());
    }

    #[test]
    fn even_cycle_examples() {
        assert!(all_cycles_even(&perm(&[&[5, 1], &[6, 2]])));
        assert!(!all_cycles_even(&perm(&[&[5, 2], &[7], &[9, 3, 6]])));
        assert!(all_cycles_even(&CyclePermutation::empty()));

        assert!(even_via_records(&ord(&[5, 1, 6, 2])).unwrap());
        assert!(!even_via_records(&ord(&[2, 6, 1, 5, 4, 3])).unwrap());
        assert!(even_via_records(&ord(&[2, 1])).unwrap());
        assert!(matches!(
            even_via_records(&ord(&[1, 2, 3])),
            Err(Error::InvalidLength { len: 3, .. })
        ));
    }

    #[test]
    fn even_cycles_via_records_exhaustive() {
        for n in 0..=4 {
            for rho in orderings_of(2 * n) {
                assert_eq!(
                    even_via_records(&rho).unwrap(),
                    all_cycles_even(&foata_inverse(&rho)),
                    "{rho}"
                );
            }
        }
    }

    #[test]
    fn bijection_exhaustive() {
        for m in 0..=7 {
            for rho in orderings_of(m) {
                let pi = foata_inverse(&rho);
                assert_eq!(foata(&pi), rho);
                assert_eq!(canonicalize(pi.cycles().to_vec()).unwrap(), pi);
                let starts: Vec<usize> = pi
                    .cycle_lengths()
                    .scan(1, |pos, len| {
                        let s = *pos;
                        *pos += len;
                        Some(s)
                    })
                    .collect();
                assert_eq!(records(&rho), starts);
            }
        }
    }

    #[test]
    fn one_line_cycles() {
        assert_eq!(one_line_cycle_lengths(&[2, 1, 3]).unwrap(), vec![2, 1]);
        assert_eq!(one_line_cycle_lengths(&[]).unwrap(), Vec::<usize>::new());
        assert!(one_line_cycle_lengths(&[1, 1]).is_err());
        assert!(one_line_cycle_lengths(&[0]).is_err());
    }

    fn distinct_vec(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::hash_set(-1000i64..1000, 0..max_len)
            .prop_flat_map(|s| Just(s.into_iter().collect::<Vec<_>>()).prop_shuffle())
    }

    proptest! {
        #[test]
        fn round_trip_random(v in distinct_vec(200)) {
            let rho = LinearOrdering::new(v).unwrap();
            prop_assert_eq!(foata(&foata_inverse(&rho)), rho);
        }

        #[test]
        fn canonicalize_idempotent(v in distinct_vec(40), cuts in proptest::collection::vec(1usize..5, 0..40)) {
            let mut cycles = Vec::new();
            let mut rest = &v[..];
            let mut cuts = cuts.into_iter();
            while !rest.is_empty() {
                let c = cuts.next().unwrap_or(1).min(rest.len());
                cycles.push(rest[..c].to_vec());
                rest = &rest[c..];
            }
            let once = canonicalize(cycles).unwrap();
            let twice = canonicalize(once.cycles().to_vec()).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(foata_inverse(&foata(&once)), once);
        }
    }
}
