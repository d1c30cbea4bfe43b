//! Chord tables and the extremal chord search.

use crate::bounds::RegionBounds;
use crate::rational::Rational;

/// Per-region extremal chords, indexed by `t = x + y`.
///
/// `max_lower(t)` is the largest lower chord `(l(y) - u(x) - 1) / (y - x)`
/// over pairs `x < y` with `x + y = t`; `min_upper(t)` the smallest upper
/// chord `(u(y) + 1 - l(x)) / (y - x)`. Both exist exactly for
/// `t in 1..=2N-3`, where `N` is the region length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordTables {
    pub region: u64,
    max_lower: Vec<Rational>,
    min_upper: Vec<Rational>,
}

impl ChordTables {
    /// Number of defined `t` values.
    pub fn len(&self) -> usize {
        self.max_lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.max_lower.is_empty()
    }

    /// The defined `t` values, `1..=2N-3`.
    pub fn t_values(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.len()
    }

    /// `M(r, t)`, or `None` outside the defined range.
    pub fn max_lower(&self, t: usize) -> Option<Rational> {
        t.checked_sub(1)
            .and_then(|i| self.max_lower.get(i))
            .copied()
    }

    /// `m(r, t)`, or `None` outside the defined range.
    pub fn min_upper(&self, t: usize) -> Option<Rational> {
        t.checked_sub(1)
            .and_then(|i| self.min_upper.get(i))
            .copied()
    }

    /// `M(r, .)` as a slice indexed by `t - 1`.
    pub fn max_lower_slice(&self) -> &[Rational] {
        &self.max_lower
    }

    /// `m(r, .)` as a slice indexed by `t - 1`.
    pub fn min_upper_slice(&self) -> &[Rational] {
        &self.min_upper
    }

    /// `M(r, t) < m(r, t)` for every `t`.
    pub fn same_sum_condition(&self) -> bool {
        self.max_lower
            .iter()
            .zip(&self.min_upper)
            .all(|(lo, hi)| lo < hi)
    }
}

/// Builds `M(r, .)` and `m(r, .)` for one region.
pub fn chord_tables(rb: &RegionBounds<'_>) -> ChordTables {
    let (l, u) = (rb.lower, rb.upper);
    let n = l.len();
    let count = (2 * n).saturating_sub(3);
    let mut max_lower = Vec::with_capacity(count);
    let mut min_upper = Vec::with_capacity(count);
    for t in 1..=count {
        let x_min = t.saturating_sub(n - 1);
        let x_max = (t - 1) / 2;
        // (num, den) pairs compared by cross-multiplication
        let mut lo = (i64::MIN, 1i64);
        let mut hi = (i64::MAX, 1i64);
        for x in x_min..=x_max {
            let y = t - x;
            let span = (y - x) as i64;
            let lower = (l[y] - u[x] - 1, span);
            let upper = (u[y] + 1 - l[x], span);
            if (lower.0 as i128) * (lo.1 as i128) > (lo.0 as i128) * (lower.1 as i128) {
                lo = lower;
            }
            if (upper.0 as i128) * (hi.1 as i128) < (hi.0 as i128) * (upper.1 as i128) {
                hi = upper;
            }
        }
        max_lower.push(Rational::new(lo.0 as i128, lo.1 as i128));
        min_upper.push(Rational::new(hi.0 as i128, hi.1 as i128));
    }
    ChordTables {
        region: rb.region,
        max_lower,
        min_upper,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    #[inline]
    fn improves(self, candidate: &Rational, best: &Rational) -> bool {
        match self {
            Extremum::Max => candidate > best,
            Extremum::Min => candidate < best,
        }
    }
}

/// Which implementation of the 2-D chord search to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Skip rows that provably cannot improve on the current best.
    #[default]
    SkipRule,
    /// Full `O(N^2)` scan.
    Naive,
}

/// The extremum of `D(x, y) = (g(y) - h(x)) / (y - x)` over `x < y`, with
/// its witnessing pair. Ties resolve to the smallest `x`, then smallest `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChordExtremum {
    pub value: Rational,
    pub x: usize,
    pub y: usize,
}

/// Extremal chord search with row skipping.
///
/// Rows are scanned in increasing `x`. Once a best pair `(x', y')` is
/// known, a later row `x` cannot beat it whenever
/// `D(x', y') <= (h(x) - h(x')) / (x - x')` (reversed for `Min`), so the
/// row is skipped. The result equals the full scan exactly. Returns `None`
/// when fewer than two indices exist.
pub fn extremal_chord_search(
    g: &[Rational],
    h: &[Rational],
    mode: Extremum,
) -> Option<ChordExtremum> {
    skip_search(g, h, mode, None).map(|(e, _)| e)
}

/// [`extremal_chord_search`] with an explicit strategy.
pub fn extremal_chord_search_with(
    strategy: SearchStrategy,
    g: &[Rational],
    h: &[Rational],
    mode: Extremum,
) -> Option<ChordExtremum> {
    chord_search(strategy, g, h, mode, None).map(|(e, _)| e)
}

/// Runs the chosen strategy; with `stop_at`, returns as soon as the running
/// best reaches the threshold (inclusive). The flag reports an early stop.
pub(crate) fn chord_search(
    strategy: SearchStrategy,
    g: &[Rational],
    h: &[Rational],
    mode: Extremum,
    stop_at: Option<Rational>,
) -> Option<(ChordExtremum, bool)> {
    match strategy {
        SearchStrategy::SkipRule => skip_search(g, h, mode, stop_at),
        SearchStrategy::Naive => naive_search(g, h, mode, stop_at),
    }
}

#[inline]
fn chord(g: &[Rational], h: &[Rational], x: usize, y: usize) -> Rational {
    g[y].sub_raw(h[x]).div_int_raw((y - x) as i128)
}

#[inline]
fn reached(mode: Extremum, value: &Rational, stop_at: &Option<Rational>) -> bool {
    match stop_at {
        Some(s) => !mode.improves(s, value),
        None => false,
    }
}

fn skip_search(
    g: &[Rational],
    h: &[Rational],
    mode: Extremum,
    stop_at: Option<Rational>,
) -> Option<(ChordExtremum, bool)> {
    let n = g.len();
    assert_eq!(n, h.len(), "chord search arrays differ in length");
    if n < 2 {
        return None;
    }
    let mut best: Option<ChordExtremum> = None;
    for x in 0..n - 1 {
        if let Some(b) = &best {
            let slope = h[x].sub_raw(h[b.x]).div_int_raw((x - b.x) as i128);
            let hopeless = match mode {
                Extremum::Max => b.value <= slope,
                Extremum::Min => b.value >= slope,
            };
            if hopeless {
                continue;
            }
        }
        for y in x + 1..n {
            let d = chord(g, h, x, y);
            if best.as_ref().is_none_or(|b| mode.improves(&d, &b.value)) {
                best = Some(ChordExtremum { value: d, x, y });
                if reached(mode, &d, &stop_at) {
                    return best.map(|b| (b, true));
                }
            }
        }
    }
    best.map(|b| (b, false))
}

fn naive_search(
    g: &[Rational],
    h: &[Rational],
    mode: Extremum,
    stop_at: Option<Rational>,
) -> Option<(ChordExtremum, bool)> {
    let n = g.len();
    assert_eq!(n, h.len(), "chord search arrays differ in length");
    let mut best: Option<ChordExtremum> = None;
    for x in 0..n.saturating_sub(1) {
        for y in x + 1..n {
            let d = chord(g, h, x, y);
            if best.as_ref().is_none_or(|b| mode.improves(&d, &b.value)) {
                best = Some(ChordExtremum { value: d, x, y });
                if reached(mode, &d, &stop_at) {
                    return best.map(|b| (b, true));
                }
            }
        }
    }
    best.map(|b| (b, false))
}
