//! Lee-metric spread of an interleaver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Minimum Lee distance between interleaver-code points and a pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadResult {
    pub d_value: usize,
    pub witness: (usize, usize),
}

/// Wraparound distance `min((a - b) mod L, (b - a) mod L)`.
#[inline]
pub fn circular_distance(a: usize, b: usize, modulus: usize) -> usize {
    let diff = a.abs_diff(b);
    diff.min(modulus - diff)
}

/// Lee distance between `(i, π(i))` and `(j, π(j))`.
pub fn lee_point_distance(i: usize, j: usize, perm: &Permutation) -> Result<usize> {
    let l = perm.len();
    for v in [i, j] {
        if v >= l {
            return Err(Error::OutOfRange {
                value: v as u64,
                modulus: l as u64,
            });
        }
    }
    if i == j {
        return Err(Error::SameIndex(i));
    }
    Ok(circular_distance(i, j, l) + circular_distance(perm.apply(i), perm.apply(j), l))
}

/// Exhaustive spread computation over all unordered pairs. The witness is the
/// lexicographically smallest `(i, j)`, `i < j`, attaining the minimum.
pub fn spread(perm: &Permutation) -> Result<SpreadResult> {
    let l = perm.len();
    if l < 2 {
        return Err(Error::InvalidModulus(l as u64));
    }
    let fwd = perm.forward();
    let mut best = SpreadResult {
        d_value: usize::MAX,
        witness: (0, 1),
    };
    for i in 0..l {
        for j in i + 1..l {
            let d = circular_distance(i, j, l) + circular_distance(fwd[i], fwd[j], l);
            if d < best.d_value {
                best = SpreadResult {
                    d_value: d,
                    witness: (i, j),
                };
            }
        }
    }
    Ok(best)
}

/// Spread value only; stops early once it is known to fall below `floor`.
/// Returns `None` in that case.
pub(crate) fn spread_at_least(perm: &Permutation, floor: usize) -> Option<usize> {
    let l = perm.len();
    let fwd = perm.forward();
    let mut best = usize::MAX;
    // Only index gaps below `floor` can produce a Lee distance below it, and
    // every pair's index gap is at most L/2.
    for i in 0..l {
        for j in i + 1..l {
            let gap = circular_distance(i, j, l);
            if gap >= best {
                continue;
            }
            let d = gap + circular_distance(fwd[i], fwd[j], l);
            if d < best {
                best = d;
                if best < floor {
                    return None;
                }
            }
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ModPoly;

    fn perm(l: u64, q1: u64, q2: u64, q3: u64) -> Permutation {
        ModPoly::cubic(l, q1, q2, q3)
            .unwrap()
            .as_permutation()
            .unwrap()
    }

    #[test]
    fn circular_examples() {
        assert_eq!(circular_distance(0, 7, 8), 1);
        assert_eq!(circular_distance(5, 5, 8), 0);
        assert_eq!(circular_distance(3, 10, 40), 7);
        assert_eq!(circular_distance(0, 4, 8), 4);
    }

    #[test]
    fn lee_examples() {
        let id = Permutation::identity(10);
        assert_eq!(lee_point_distance(0, 1, &id).unwrap(), 2);
        assert_eq!(lee_point_distance(0, 9, &id).unwrap(), 2);
        assert_eq!(lee_point_distance(3, 3, &id), Err(Error::SameIndex(3)));
        assert!(lee_point_distance(0, 10, &id).is_err());
    }

    #[test]
    fn spread_examples() {
        assert_eq!(spread(&Permutation::identity(12)).unwrap().d_value, 2);
        let r = spread(&perm(40, 13, 10, 0)).unwrap();
        assert_eq!(r.d_value, 4);
        assert_eq!(
            lee_point_distance(r.witness.0, r.witness.1, &perm(40, 13, 10, 0)).unwrap(),
            4
        );
        assert_eq!(spread(&perm(80, 11, 20, 0)).unwrap().d_value, 10);
        assert!(spread(&Permutation::identity(1)).is_err());
    }

    #[test]
    fn early_exit_agrees() {
        for (q1, q2, q3) in [(13, 10, 0), (3, 8, 16), (1, 0, 0), (7, 20, 0)] {
            let pm = perm(40, q1, q2, q3);
            let d = spread(&pm).unwrap().d_value;
            assert_eq!(spread_at_least(&pm, 0), Some(d));
            assert_eq!(spread_at_least(&pm, d), Some(d));
            assert_eq!(spread_at_least(&pm, d + 1), None);
        }
    }
}
