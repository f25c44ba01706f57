//! Towns on a line, each with a left- and a right-facing bulldozer.
//!
//! A bulldozer moving right from town `i` pushes off every right-facing
//! bulldozer it reaches from behind, and every left-facing one only if it is
//! strictly larger. So town `i < j` sweeps town `j` exactly when
//! `r_i > max(l_{i+1}, ..., l_j)`, and symmetrically to the left.
//!
//! Town indices are 1-based.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::LinearOrdering;
use crate::watershed::watershed_fast;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TownLine {
    /// `left[t-1]` is the left bulldozer of town `t`, if present.
    left: Vec<Option<i64>>,
    right: Vec<Option<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl TownLine {
    pub fn new(left: Vec<Option<i64>>, right: Vec<Option<i64>>) -> Result<Self> {
        if left.is_empty() {
            return Err(Error::domain("a line needs at least one town"));
        }
        if left.len() != right.len() {
            return Err(Error::domain(format!(
                "{} left bulldozers but {} right bulldozers",
                left.len(),
                right.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in left.iter().chain(&right).flatten() {
            if !seen.insert(*s) {
                return Err(Error::domain(format!("bulldozer size {s} appears twice")));
            }
        }
        Ok(TownLine { left, right })
    }

    pub fn towns(&self) -> usize {
        self.left.len()
    }

    pub fn left_sizes(&self) -> &[Option<i64>] {
        &self.left
    }

    pub fn right_sizes(&self) -> &[Option<i64>] {
        &self.right
    }

    fn size(&self, side: Side, town: usize) -> Result<i64> {
        let (v, name) = match side {
            Side::Left => (&self.left, "left"),
            Side::Right => (&self.right, "right"),
        };
        v[town - 1].ok_or_else(|| {
            Error::domain(format!("the {name} bulldozer of town {town} is absent"))
        })
    }

    fn check_town(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.towns() {
            return Err(Error::domain(format!("town {t} is outside 1..={}", self.towns())));
        }
        Ok(())
    }

    /// The interior bulldozers `r_1, l_2, r_2, ..., l_n` read left to right.
    pub fn interior_sequence(&self) -> Result<LinearOrdering> {
        let mut seq = Vec::with_capacity(2 * self.towns() - 2);
        for t in 1..self.towns() {
            seq.push(self.size(Side::Right, t)?);
            seq.push(self.size(Side::Left, t + 1)?);
        }
        LinearOrdering::new(seq)
    }
}

impl<'de> Deserialize<'de> for TownLine {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            left: Vec<Option<i64>>,
            right: Vec<Option<i64>>,
        }
        let raw = Raw::deserialize(d)?;
        TownLine::new(raw.left, raw.right).map_err(serde::de::Error::custom)
    }
}

/// Whether town `i` can sweep town `j` away, by the max-comparison criterion.
pub fn can_sweep(line: &TownLine, i: usize, j: usize) -> Result<bool> {
    line.check_town(i)?;
    line.check_town(j)?;
    if i == j {
        return Err(Error::domain("a town cannot sweep itself"));
    }
    if i < j {
        let mover = line.size(Side::Right, i)?;
        for t in i + 1..=j {
            if line.size(Side::Left, t)? > mover {
                return Ok(false);
            }
        }
    } else {
        let mover = line.size(Side::Left, i)?;
        for t in j..i {
            if line.size(Side::Right, t)? > mover {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Step-by-step simulation of one sweep along the physical layout
/// `l_1 T_1 r_1 l_2 T_2 r_2 ...`. Absent bulldozers are simply not on the road.
pub fn simulate_sweep(line: &TownLine, i: usize, j: usize) -> Result<bool> {
    line.check_town(i)?;
    line.check_town(j)?;
    if i == j {
        return Err(Error::domain("a town cannot sweep itself"));
    }
    enum Item {
        Dozer { facing: Side, size: i64 },
        Town(usize),
    }
    let mut road = Vec::with_capacity(3 * line.towns());
    for t in 1..=line.towns() {
        if let Some(size) = line.left[t - 1] {
            road.push(Item::Dozer { facing: Side::Left, size });
        }
        road.push(Item::Town(t));
        if let Some(size) = line.right[t - 1] {
            road.push(Item::Dozer { facing: Side::Right, size });
        }
    }
    let moving = if i < j { Side::Right } else { Side::Left };
    let mover = line.size(moving, i)?;
    let start = road
        .iter()
        .position(|it| matches!(it, Item::Dozer { facing, size } if *facing == moving && *size == mover))
        .expect("mover is on the road");
    let path: Box<dyn Iterator<Item = &Item>> = match moving {
        Side::Right => Box::new(road[start + 1..].iter()),
        Side::Left => Box::new(road[..start].iter().rev()),
    };
    for item in path {
        match *item {
            Item::Town(t) if t == j => return Ok(true),
            Item::Town(_) => {}
            // Same direction: hit from the rear.
            Item::Dozer { facing, .. } if facing == moving => {}
            Item::Dozer { size, .. } => {
                if size > mover {
                    return Ok(false);
                }
            }
        }
    }
    unreachable!("target town lies on the path")
}

fn unsweepable_by(line: &TownLine, sweeps: impl Fn(&TownLine, usize, usize) -> Result<bool>) -> Result<Vec<usize>> {
    let n = line.towns();
    let mut out = Vec::new();
    for t in 1..=n {
        let mut swept = false;
        for s in (1..=n).filter(|&s| s != t) {
            if sweeps(line, s, t)? {
                swept = true;
                break;
            }
        }
        if !swept {
            out.push(t);
        }
    }
    Ok(out)
}

/// Every town that no other town can sweep away.
pub fn unsweepable_towns(line: &TownLine) -> Result<Vec<usize>> {
    unsweepable_by(line, can_sweep)
}

/// [`unsweepable_towns`] computed with [`simulate_sweep`].
pub fn unsweepable_towns_simulated(line: &TownLine) -> Result<Vec<usize>> {
    unsweepable_by(line, simulate_sweep)
}

/// The unsweepable town, checking that there is exactly one.
pub fn unique_unsweepable(towns: &[usize]) -> Result<usize> {
    match towns {
        [t] => Ok(*t),
        ts => Err(Error::contradiction(format!(
            "expected exactly one unsweepable town, found {ts:?}"
        ))),
    }
}

/// Builds the line with `m + 1` towns whose interior bulldozers are
/// `r_1 = s_1, l_2 = s_2, r_2 = s_3, ..., l_{m+1} = s_2m`.
pub fn line_from_sequence(seq: &LinearOrdering) -> Result<TownLine> {
    if !seq.len().is_multiple_of(2) {
        return Err(Error::InvalidLength { len: seq.len(), reason: "even length required" });
    }
    let towns = seq.len() / 2 + 1;
    let mut left = vec![None; towns];
    let mut right = vec![None; towns];
    for (idx, pair) in seq.as_slice().chunks_exact(2).enumerate() {
        right[idx] = Some(pair[0]);
        left[idx + 1] = Some(pair[1]);
    }
    TownLine::new(left, right)
}

/// True iff the only unsweepable town is town `watershed + 1`.
pub fn correspondence_check(seq: &LinearOrdering) -> Result<bool> {
    let line = line_from_sequence(seq)?;
    let (k, _) = watershed_fast(seq)?;
    Ok(unsweepable_towns(&line)? == vec![k + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::orderings_of;
    use proptest::prelude::*;

    fn ord(v: &[i64]) -> LinearOrdering {
        LinearOrdering::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_town_line() {
        let line = line_from_sequence(&ord(&[9, 3])).unwrap();
        assert_eq!(line.left_sizes(), &[None, Some(3)]);
        assert_eq!(line.right_sizes(), &[Some(9), None]);
        assert!(can_sweep(&line, 1, 2).unwrap());
        assert!(!can_sweep(&line, 2, 1).unwrap());
        assert_eq!(unsweepable_towns(&line).unwrap(), vec![1]);
        assert!(correspondence_check(&ord(&[9, 3])).unwrap());
    }

    #[test]
    fn single_town() {
        let line = line_from_sequence(&LinearOrdering::empty()).unwrap();
        assert_eq!(line.towns(), 1);
        assert_eq!(line.left_sizes(), &[None]);
        assert_eq!(unsweepable_towns(&line).unwrap(), vec![1]);
    }

    #[test]
    fn six_term_example() {
        let seq = ord(&[2, 6, 1, 5, 4, 3]);
        let line = line_from_sequence(&seq).unwrap();
        assert_eq!(line.right_sizes(), &[Some(2), Some(1), Some(4), None]);
        assert_eq!(line.left_sizes(), &[None, Some(6), Some(5), Some(3)]);
        assert_eq!(unsweepable_towns(&line).unwrap(), vec![3]);
        assert!(correspondence_check(&seq).unwrap());
    }

    #[test]
    fn errors() {
        let line = line_from_sequence(&ord(&[9, 3])).unwrap();
        assert!(can_sweep(&line, 1, 1).is_err());
        assert!(can_sweep(&line, 0, 1).is_err());
        assert!(can_sweep(&line, 1, 3).is_err());
        let broken = TownLine::new(vec![None, None], vec![Some(1), None]).unwrap();
        assert!(matches!(can_sweep(&broken, 1, 2), Err(Error::Domain(_))));
        assert!(TownLine::new(vec![Some(1)], vec![Some(1)]).is_err());
        assert!(TownLine::new(vec![], vec![]).is_err());
        assert!(line_from_sequence(&ord(&[1, 2, 3])).is_err());
        assert!(unique_unsweepable(&[1, 2]).is_err());
        assert!(unique_unsweepable(&[]).is_err());
    }

    #[test]
    fn exhaustive_uniqueness_and_correspondence() {
        for m in 0..=4 {
            for seq in orderings_of(2 * m) {
                let line = line_from_sequence(&seq).unwrap();
                let towns = unsweepable_towns(&line).unwrap();
                assert_eq!(towns.len(), 1, "{seq}");
                assert!(correspondence_check(&seq).unwrap(), "{seq}");
            }
        }
    }

    #[test]
    fn simulator_agrees_exhaustively() {
        for m in 0..=3 {
            for seq in orderings_of(2 * m) {
                let line = line_from_sequence(&seq).unwrap();
                for i in 1..=line.towns() {
                    for j in (1..=line.towns()).filter(|&j| j != i) {
                        assert_eq!(can_sweep(&line, i, j).unwrap(), simulate_sweep(&line, i, j).unwrap());
                    }
                }
            }
        }
        // Full lines with all 2n bulldozers present.
        for seq in orderings_of(6) {
            let v = seq.as_slice();
            let line = TownLine::new(
                vec![Some(v[0]), Some(v[2]), Some(v[4])],
                vec![Some(v[1]), Some(v[3]), Some(v[5])],
            )
            .unwrap();
            assert_eq!(unsweepable_towns(&line).unwrap(), unsweepable_towns_simulated(&line).unwrap());
            assert_eq!(unsweepable_towns(&line).unwrap().len(), 1);
        }
    }

    #[test]
    fn interval_property_exhaustive() {
        for m in 0..=4 {
            for seq in orderings_of(2 * m) {
                let line = line_from_sequence(&seq).unwrap();
                let n = line.towns();
                for i in 1..=n {
                    for j in (1..=n).filter(|&j| j != i) {
                        if can_sweep(&line, i, j).unwrap() {
                            let between = if i < j { i + 1..j } else { j + 1..i };
                            for t in between {
                                assert!(can_sweep(&line, i, t).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn interior_sequence_round_trip() {
        let seq = ord(&[2, 6, 1, 5, 4, 3]);
        assert_eq!(line_from_sequence(&seq).unwrap().interior_sequence().unwrap(), seq);
    }

    proptest! {
        #[test]
        fn relabeling_invariance(
            sizes in Just((1..=10i64).collect::<Vec<_>>()).prop_shuffle(),
            shift in -500i64..500,
        ) {
            let seq = ord(&sizes);
            let cubed = ord(&sizes.iter().map(|x| x * x * x + shift).collect::<Vec<_>>());
            let a = line_from_sequence(&seq).unwrap();
            let b = line_from_sequence(&cubed).unwrap();
            for i in 1..=a.towns() {
                for j in (1..=a.towns()).filter(|&j| j != i) {
                    prop_assert_eq!(can_sweep(&a, i, j).unwrap(), can_sweep(&b, i, j).unwrap());
                }
            }
            prop_assert_eq!(unsweepable_towns(&a).unwrap(), unsweepable_towns(&b).unwrap());
        }
    }
}
