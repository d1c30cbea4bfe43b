//! Coefficient precision minimization.
//!
//! For one coefficient, every region contributes a set of admissible
//! magnitudes. A shared shift `t` and stored width `P` are chosen so that
//! every region keeps at least one magnitude of the form `s << t` with
//! `s < 2^P`, with `P` as small as possible.

use std::fmt;
use std::str::FromStr;

use crate::designspace::HalfOpenRange;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignClass {
    /// All values `>= 0`, stored as magnitudes.
    NonNegative,
    /// All values `<= 0`, stored as magnitudes and subtracted.
    NonPositive,
    /// Values of both signs, stored in two's complement with a sign bit.
    Mixed,
}

impl SignClass {
    pub fn name(&self) -> &'static str {
        match self {
            SignClass::NonNegative => "nonneg",
            SignClass::NonPositive => "nonpos",
            SignClass::Mixed => "mixed",
        }
    }
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "nonneg" => Ok(SignClass::NonNegative),
            "nonpos" => Ok(SignClass::NonPositive),
            "mixed" => Ok(SignClass::Mixed),
            other => Err(Error::Config(format!("unknown sign class `{other}`"))),
        }
    }
}

/// Storage of one coefficient across all LUT rows: `v = ±(stored << shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WidthPlan {
    pub class: SignClass,
    pub shift: u32,
    /// Magnitude bits `P`; mixed storage adds one sign bit.
    pub width: u32,
}

impl WidthPlan {
    /// Bits the field occupies in a LUT row.
    pub fn field_bits(&self) -> u32 {
        self.width + (self.class == SignClass::Mixed) as u32
    }

    /// Admissible values are `j << shift` for `j` in this range.
    fn multiplier_range(&self) -> (i128, i128) {
        let top = if self.width >= 127 {
            i128::MAX
        } else {
            (1i128 << self.width) - 1
        };
        match self.class {
            SignClass::NonNegative => (0, top),
            SignClass::NonPositive => (-top, 0),
            SignClass::Mixed => (-top, top),
        }
    }

    pub fn admits(&self, v: i128) -> bool {
        let (jmin, jmax) = self.multiplier_range();
        if self.shift >= 127 {
            return v == 0;
        }
        let unit = 1i128 << self.shift;
        v.rem_euclid(unit) == 0 && (jmin..=jmax).contains(&v.div_euclid(unit))
    }

    /// Smallest admissible value in `[lo, hi)`.
    pub fn smallest_in(&self, range: HalfOpenRange) -> Option<i128> {
        if self.shift >= 127 {
            return range.contains(0).then_some(0);
        }
        let (jmin, jmax) = self.multiplier_range();
        let unit = 1i128 << self.shift;
        let j = jmin.max(-((-range.lo).div_euclid(unit)));
        let v = j.checked_mul(unit)?;
        (j <= jmax && v < range.hi).then_some(v)
    }

    /// Field contents for an admissible value.
    pub fn encode(&self, v: i128) -> u128 {
        assert!(self.admits(v), "{v} not representable under {self:?}");
        if self.width == 0 {
            return 0;
        }
        let mag = v.unsigned_abs() >> self.shift.min(127);
        match self.class {
            SignClass::NonNegative | SignClass::NonPositive => mag,
            SignClass::Mixed => {
                let bits = self.field_bits();
                let j = v >> self.shift;
                (j as u128) & mask(bits)
            }
        }
    }

    /// Inverse of [`WidthPlan::encode`].
    pub fn decode(&self, field: u128) -> i128 {
        if self.width == 0 {
            return 0;
        }
        let j = match self.class {
            SignClass::NonNegative => field as i128,
            SignClass::NonPositive => -(field as i128),
            SignClass::Mixed => {
                let bits = self.field_bits();
                let sign = 1u128 << (bits - 1);
                if field & sign != 0 {
                    (field as i128) - (1i128 << bits)
                } else {
                    field as i128
                }
            }
        };
        j << self.shift
    }
}

pub(crate) fn mask(bits: u32) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

/// Outcome of the precision minimization for one sign family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WidthResult {
    /// Chosen shift `t*`, the smallest `t` achieving the minimum.
    pub shift: u32,
    /// Minimal stored width `P`, never negative.
    pub width: u32,
    /// Largest shift every region tolerates, `T`.
    pub max_shift: u32,
}

/// A per-region set of non-negative magnitudes.
pub(crate) trait MagnitudeSet {
    /// `max_{s} tz(s)`, with `tz(0) = cap`; `None` when empty.
    fn max_trailing_zeros(&self, cap: u32) -> Option<u32>;
    /// `min bitlen(s)` over elements with `tz(s) >= t`.
    fn min_bits_with_shift(&self, t: u32, cap: u32) -> Option<u32>;
}

fn tz(s: u128, cap: u32) -> u32 {
    if s == 0 {
        cap
    } else {
        s.trailing_zeros().min(cap)
    }
}

fn bitlen(s: u128) -> u32 {
    128 - s.leading_zeros()
}

impl MagnitudeSet for [u128] {
    fn max_trailing_zeros(&self, cap: u32) -> Option<u32> {
        self.iter().map(|&s| tz(s, cap)).max()
    }

    fn min_bits_with_shift(&self, t: u32, cap: u32) -> Option<u32> {
        self.iter()
            .filter(|&&s| tz(s, cap) >= t)
            .map(|&s| bitlen(s))
            .min()
    }
}

/// Union of half-open magnitude intervals `[lo, hi)`.
impl MagnitudeSet for [(u128, u128)] {
    fn max_trailing_zeros(&self, cap: u32) -> Option<u32> {
        self.iter()
            .filter(|(lo, hi)| lo < hi)
            .map(|&(lo, hi)| {
                if lo == 0 {
                    return cap;
                }
                (0..=cap.min(127))
                    .rev()
                    .find(|&t| first_multiple(lo, t).is_some_and(|v| v < hi))
                    .unwrap_or(0)
            })
            .max()
    }

    fn min_bits_with_shift(&self, t: u32, cap: u32) -> Option<u32> {
        self.iter()
            .filter_map(|&(lo, hi)| {
                if lo == 0 && hi > 0 {
                    return Some(0);
                }
                if t > cap {
                    return None;
                }
                // bitlen is monotone, so the smallest multiple wins
                first_multiple(lo, t).filter(|&v| v < hi).map(bitlen)
            })
            .min()
    }
}

fn first_multiple(lo: u128, t: u32) -> Option<u128> {
    if t >= 128 {
        return (lo == 0).then_some(0);
    }
    let unit = 1u128 << t;
    lo.div_ceil(unit).checked_mul(unit)
}

/// The precision minimization over per-region sets.
///
/// `T_{r,s}` is the trailing-zero count of `s` (capped at `cap` for zero),
/// `T = min_r max_s T_{r,s}`, and for each `t <= T` the width
/// `P_t = max_r min_{s : T_{r,s} >= t} (bitlen(s) - t)`. The result is the
/// minimal `P_t` (clamped at zero) and the smallest `t` attaining it.
pub(crate) fn minimize_sets<S: MagnitudeSet + ?Sized>(
    sets: &[&S],
    cap: u32,
) -> Option<WidthResult> {
    let mut max_shift = u32::MAX;
    for s in sets {
        max_shift = max_shift.min(s.max_trailing_zeros(cap)?);
    }
    if sets.is_empty() {
        return None;
    }
    let mut best: Option<(i64, u32)> = None;
    for t in 0..=max_shift {
        let mut p_t = i64::MIN;
        for s in sets {
            let bits = s
                .min_bits_with_shift(t, cap)
                .expect("t <= T leaves every set nonempty");
            p_t = p_t.max(bits as i64 - t as i64);
        }
        if best.is_none_or(|(p, _)| p_t < p) {
            best = Some((p_t, t));
        }
    }
    best.map(|(p, t)| WidthResult {
        shift: t,
        width: p.max(0) as u32,
        max_shift,
    })
}

/// Precision minimization for explicit per-region sets of non-negative
/// integers. Zero counts as having `cap` trailing zeros.
///
/// # Panics
///
/// If any set is empty.
pub fn minimize_width(sets: &[Vec<u128>], cap: u32) -> WidthResult {
    assert!(
        sets.iter().all(|s| !s.is_empty()),
        "every region needs a value"
    );
    let refs: Vec<&[u128]> = sets.iter().map(|s| s.as_slice()).collect();
    minimize_sets(&refs, cap).expect("nonempty family")
}

/// As [`minimize_width`], for unions of half-open magnitude intervals.
pub fn minimize_width_intervals(sets: &[Vec<(u128, u128)>], cap: u32) -> Option<WidthResult> {
    let refs: Vec<&[(u128, u128)]> = sets.iter().map(|s| s.as_slice()).collect();
    minimize_sets(&refs, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CAP: u32 = 20;

    #[test]
    fn worked_example() {
        let r = minimize_width(&[vec![12, 8], vec![6]], CAP);
        assert_eq!((r.max_shift, r.width, r.shift), (1, 3, 1));
    }

    #[test]
    fn all_zero() {
        let r = minimize_width(&[vec![0], vec![0], vec![0]], CAP);
        assert_eq!((r.width, r.shift), (0, CAP));
    }

    #[test]
    fn equal_powers_of_two() {
        let r = minimize_width(&[vec![32], vec![32]], CAP);
        assert_eq!((r.width, r.shift), (1, 5));
        // mixed exponents: T = 3, P = 5 - 3 + 1
        let r = minimize_width(&[vec![8], vec![32]], CAP);
        assert_eq!((r.width, r.shift), (3, 3));
    }

    #[test]
    fn b_sets_from_example() {
        let r = minimize_width(&[vec![6], vec![12]], CAP);
        assert_eq!((r.width, r.shift), (3, 1));
    }

    #[test]
    fn plan_codec() {
        let plans = [
            WidthPlan {
                class: SignClass::NonNegative,
                shift: 2,
                width: 3,
            },
            WidthPlan {
                class: SignClass::NonPositive,
                shift: 0,
                width: 4,
            },
            WidthPlan {
                class: SignClass::Mixed,
                shift: 1,
                width: 3,
            },
        ];
        for p in plans {
            for v in -64i128..64 {
                if p.admits(v) {
                    let f = p.encode(v);
                    assert!(f < 1 << p.field_bits());
                    assert_eq!(p.decode(f), v, "{p:?}");
                }
            }
        }
        assert!(plans[0].admits(28) && !plans[0].admits(32) && !plans[0].admits(-4));
        assert!(plans[1].admits(-15) && !plans[1].admits(1));
        assert!(plans[2].admits(-14) && plans[2].admits(14) && !plans[2].admits(16));
    }

    #[test]
    fn smallest_in_range() {
        let p = WidthPlan {
            class: SignClass::NonNegative,
            shift: 2,
            width: 3,
        };
        assert_eq!(p.smallest_in(HalfOpenRange::new(5, 20)), Some(8));
        assert_eq!(p.smallest_in(HalfOpenRange::new(-5, 20)), Some(0));
        assert_eq!(p.smallest_in(HalfOpenRange::new(29, 40)), None);
        let n = WidthPlan {
            class: SignClass::NonPositive,
            shift: 1,
            width: 2,
        };
        assert_eq!(n.smallest_in(HalfOpenRange::new(-100, 3)), Some(-6));
        assert_eq!(n.smallest_in(HalfOpenRange::new(1, 3)), None);
    }

    fn to_intervals(sets: &[Vec<u128>]) -> Vec<Vec<(u128, u128)>> {
        sets.iter()
            .map(|s| s.iter().map(|&v| (v, v + 1)).collect())
            .collect()
    }

    proptest! {
        #[test]
        fn intervals_agree_with_points(
            sets in prop::collection::vec(prop::collection::vec(0u128..300, 1..5), 1..5)
        ) {
            let pts = minimize_width(&sets, CAP);
            let iv = minimize_width_intervals(&to_intervals(&sets), CAP).unwrap();
            prop_assert_eq!(pts, iv);
        }

        #[test]
        fn wide_intervals_agree_with_expansion(
            ranges in prop::collection::vec((0u128..200, 1u128..40), 1..4)
        ) {
            let iv: Vec<Vec<(u128, u128)>> = ranges.iter().map(|&(lo, w)| vec![(lo, lo + w)]).collect();
            let pts: Vec<Vec<u128>> = ranges.iter().map(|&(lo, w)| (lo..lo + w).collect()).collect();
            prop_assert_eq!(minimize_width(&pts, CAP), minimize_width_intervals(&iv, CAP).unwrap());
        }
    }
}
