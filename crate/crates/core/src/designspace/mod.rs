//! Exact feasibility analysis and the complete coefficient catalog.
//!
//! A region admits a polynomial `(a, b, c)` at shift `k` when
//! `l(x) <= floor((a x^2 + b x + c) / 2^k) <= u(x)` for every offset `x`.
//! Eliminating `c` and then `b` turns this into chord conditions on the
//! region bounds; the chord tables hold their extremes per `t = x + y`.
//! Everything here is integer or exact rational arithmetic.

mod catalog;
mod chord;

use rayon::prelude::*;

use crate::bounds::{check_lookup_bits, region_bounds, BoundTable, RegionBounds};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use catalog::{write_catalog, CoefficientCatalog, RegionCatalog};
pub use chord::{
    chord_tables, extremal_chord_search, extremal_chord_search_with, ChordExtremum, ChordTables,
    Extremum, SearchStrategy,
};

/// Inclusive integer range; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntRange {
    pub lo: i128,
    pub hi: i128,
}

impl IntRange {
    pub const EMPTY: IntRange = IntRange { lo: 1, hi: 0 };

    pub fn new(lo: i128, hi: i128) -> Self {
        IntRange { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> u128 {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo) as u128 + 1
        }
    }

    pub fn contains(&self, v: i128) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn intersect(&self, other: &IntRange) -> IntRange {
        IntRange::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn iter(&self) -> impl Iterator<Item = i128> {
        self.lo..=self.hi
    }

    /// Up to `cap` consecutive values of the range, centred on the value
    /// nearest to zero.
    pub fn nearest_zero(&self, cap: u128) -> IntRange {
        if self.len() <= cap {
            return *self;
        }
        let centre = 0i128.clamp(self.lo, self.hi);
        let half = (cap / 2) as i128;
        let lo = (centre - half).max(self.lo);
        let lo = lo.min(self.hi - cap as i128 + 1);
        IntRange::new(lo, lo + cap as i128 - 1)
    }
}

/// Half-open integer range `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfOpenRange {
    pub lo: i128,
    pub hi: i128,
}

impl HalfOpenRange {
    pub fn new(lo: i128, hi: i128) -> Self {
        HalfOpenRange { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn len(&self) -> u128 {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo) as u128
        }
    }

    pub fn contains(&self, v: i128) -> bool {
        self.lo <= v && v < self.hi
    }

    pub fn intersect(&self, other: &HalfOpenRange) -> HalfOpenRange {
        HalfOpenRange::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

/// Options shared by the generation entry points.
#[derive(Clone, Debug)]
pub struct GenerateOptions {
    pub strategy: SearchStrategy,
    /// Largest shift tried; defaults to `2 (p + q)`.
    pub k_max: Option<u32>,
    /// Unconstrained coefficients are clamped to `[-2^w, 2^w]`; defaults to
    /// `w = 2 (p + q)`.
    pub window_bits: Option<u32>,
    /// Most `a` values stored per region; larger ranges keep the values
    /// nearest zero and mark the catalog as truncated.
    pub a_cap: u128,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            strategy: SearchStrategy::SkipRule,
            k_max: None,
            window_bits: None,
            a_cap: 1 << 16,
        }
    }
}

impl GenerateOptions {
    pub fn k_max(&self, table: &BoundTable) -> u32 {
        self.k_max.unwrap_or(2 * table.output().width())
    }

    pub fn window_bits(&self, table: &BoundTable) -> u32 {
        self.window_bits
            .unwrap_or(2 * table.output().width())
            .min(100)
    }
}

/// Symmetric clamp window for unconstrained coefficients.
pub fn window(bits: u32) -> IntRange {
    IntRange::new(-(1i128 << bits), 1i128 << bits)
}

/// Everything the later stages need about one region: its bounds, chord
/// tables and the extremal second-difference quotients bounding `a / 2^k`.
#[derive(Clone, Debug)]
pub struct RegionAnalysis {
    pub region: u64,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub tables: ChordTables,
    /// `max_{t<s} (M(s) - m(t)) / (s - t)`
    pub a_lower: Option<ChordExtremum>,
    /// `min_{t<s} (m(s) - M(t)) / (s - t)`
    pub a_upper: Option<ChordExtremum>,
    pub feasible: bool,
}

impl RegionAnalysis {
    pub fn bounds(&self) -> RegionBounds<'_> {
        RegionBounds {
            region: self.region,
            lower: &self.lower,
            upper: &self.upper,
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Integer `a` range at shift `k`; see [`a_interval`].
    pub fn a_range(&self, k: u32, window_bits: u32) -> IntRange {
        a_range_from(
            self.a_lower.map(|e| e.value),
            self.a_upper.map(|e| e.value),
            k,
            window_bits,
        )
    }

    pub fn b_range(&self, a: i128, k: u32, window_bits: u32) -> IntRange {
        b_interval(&self.tables, a, k, window_bits)
    }

    pub fn c_range(&self, a: i128, b: i128, k: u32) -> HalfOpenRange {
        c_interval(&self.bounds(), a, b, k)
    }

    /// Whether some integer triple exists at shift `k`.
    pub fn admits(&self, k: u32, window_bits: u32) -> bool {
        if !self.feasible {
            return false;
        }
        let ar = self.a_range(k, window_bits);
        if ar.is_empty() {
            return false;
        }
        // widest b-intervals sit near the middle of the a-range
        let mid = ar.lo + (ar.hi - ar.lo) / 2;
        let mut step = 0i128;
        loop {
            let below = mid - step;
            let above = mid + step + 1;
            let mut any = false;
            for a in [below, above] {
                if ar.contains(a) {
                    any = true;
                    let br = self.b_range(a, k, window_bits);
                    if !br.is_empty() {
                        debug_assert!(!self.c_range(a, br.lo, k).is_empty());
                        return true;
                    }
                }
            }
            if !any {
                return false;
            }
            step += 1;
        }
    }
}

/// Computes the chord tables and the second-difference extremes of one
/// region.
pub fn analyze_region(rb: &RegionBounds<'_>, strategy: SearchStrategy) -> RegionAnalysis {
    let tables = chord_tables(rb);
    let mut analysis = RegionAnalysis {
        region: rb.region,
        lower: rb.lower.to_vec(),
        upper: rb.upper.to_vec(),
        a_lower: None,
        a_upper: None,
        feasible: false,
        tables,
    };
    fill_a_extremes(&mut analysis, strategy);
    analysis.feasible = analysis.tables.same_sum_condition()
        && match (&analysis.a_lower, &analysis.a_upper) {
            (Some(lo), Some(hi)) => lo.value < hi.value,
            _ => true,
        };
    analysis
}

fn fill_a_extremes(analysis: &mut RegionAnalysis, strategy: SearchStrategy) {
    let big_m = analysis.tables.max_lower_slice();
    let small_m = analysis.tables.min_upper_slice();
    let upper = chord::chord_search(strategy, small_m, big_m, Extremum::Min, None).map(|(e, _)| e);
    let lower = chord::chord_search(strategy, big_m, small_m, Extremum::Max, None).map(|(e, _)| e);
    analysis.a_upper = upper;
    analysis.a_lower = lower;
}

/// Feasibility test for a region: `M(t) < m(t)` for every `t`, and the
/// largest lower second-difference quotient lies strictly below the
/// smallest upper one. Vacuously true for fewer than two `t` values.
pub fn region_feasible(tables: &ChordTables) -> bool {
    region_feasible_with(tables, SearchStrategy::SkipRule)
}

pub fn region_feasible_with(tables: &ChordTables, strategy: SearchStrategy) -> bool {
    if !tables.same_sum_condition() {
        return false;
    }
    let big_m = tables.max_lower_slice();
    let small_m = tables.min_upper_slice();
    let Some((upper, _)) = chord::chord_search(strategy, small_m, big_m, Extremum::Min, None)
    else {
        return true;
    };
    match chord::chord_search(strategy, big_m, small_m, Extremum::Max, Some(upper.value)) {
        Some((lower, stopped)) => !stopped && lower.value < upper.value,
        None => true,
    }
}

fn a_range_from(
    lower: Option<Rational>,
    upper: Option<Rational>,
    k: u32,
    window_bits: u32,
) -> IntRange {
    let w = window(window_bits);
    let lo = lower.map_or(w.lo, |v| v.int_above_scaled(k));
    let hi = upper.map_or(w.hi, |v| v.int_below_scaled(k));
    IntRange::new(lo, hi)
}

/// Integer `a` values with `2^k * lower < a < 2^k * upper`, where the
/// bounds are the extremal second-difference quotients of the tables. A
/// missing bound (fewer than two `t` values) is replaced by the window.
pub fn a_interval(tables: &ChordTables, k: u32, window_bits: u32) -> IntRange {
    let big_m = tables.max_lower_slice();
    let small_m = tables.min_upper_slice();
    let upper = extremal_chord_search(small_m, big_m, Extremum::Min).map(|e| e.value);
    let lower = extremal_chord_search(big_m, small_m, Extremum::Max).map(|e| e.value);
    a_range_from(lower, upper, k, window_bits)
}

/// Integer `b` with `2^k M(t) - a t < b < 2^k m(t) - a t` for every `t`.
/// A single-point region leaves `b` free within the window.
pub fn b_interval(tables: &ChordTables, a: i128, k: u32, window_bits: u32) -> IntRange {
    if tables.is_empty() {
        return window(window_bits);
    }
    // floor is monotone, so int_above(max_t v_t) = max_t floor(v_t) + 1
    let mut lo = i128::MIN;
    let mut hi = i128::MAX;
    for t in tables.t_values() {
        let at = a.checked_mul(t as i128).expect("coefficient overflow");
        let lower = tables.max_lower(t).unwrap();
        let upper = tables.min_upper(t).unwrap();
        lo = lo.max(shifted_minus(lower, k, at).div_euclid(lower.denom()));
        let un = shifted_minus(upper, k, at);
        hi = hi.min(-((-un).div_euclid(upper.denom())));
    }
    IntRange::new(lo + 1, hi - 1)
}

/// Numerator of `2^k v - c` over `v`'s denominator.
#[inline]
fn shifted_minus(v: Rational, k: u32, c: i128) -> i128 {
    let scaled = v.numer().checked_shl(k).filter(|s| s >> k == v.numer());
    scaled
        .and_then(|s| s.checked_sub(c.checked_mul(v.denom())?))
        .expect("coefficient overflow")
}

/// `[max_x (2^k l(x) - a x^2 - b x), min_x (2^k (u(x) + 1) - a x^2 - b x))`.
pub fn c_interval(rb: &RegionBounds<'_>, a: i128, b: i128, k: u32) -> HalfOpenRange {
    c_interval_truncated(rb, a, b, k, 0, 0)
}

/// As [`c_interval`], with the low `square_trunc` bits of `x` cleared in the
/// square and the low `linear_trunc` bits cleared in the linear term.
pub fn c_interval_truncated(
    rb: &RegionBounds<'_>,
    a: i128,
    b: i128,
    k: u32,
    square_trunc: u32,
    linear_trunc: u32,
) -> HalfOpenRange {
    let sq_mask = !((1u64 << square_trunc) - 1);
    let lin_mask = !((1u64 << linear_trunc) - 1);
    let mut lo = i128::MIN;
    let mut hi = i128::MAX;
    for (x, (&l, &u)) in rb.lower.iter().zip(rb.upper).enumerate() {
        let xs = (x as u64 & sq_mask) as i128;
        let xl = (x as u64 & lin_mask) as i128;
        let p = a * xs * xs + b * xl;
        lo = lo.max(((l as i128) << k) - p);
        hi = hi.min((((u + 1) as i128) << k) - p);
        if lo >= hi {
            break;
        }
    }
    HalfOpenRange::new(lo, hi)
}

/// Analyses every region at `lookup_bits`, in region order.
pub fn analyze_regions(
    table: &BoundTable,
    lookup_bits: u32,
    strategy: SearchStrategy,
) -> Result<Vec<RegionAnalysis>> {
    check_lookup_bits(table.input(), lookup_bits)?;
    (0..1u64 << lookup_bits)
        .into_par_iter()
        .map(|r| {
            let rb = region_bounds(table, lookup_bits, r)?;
            Ok(analyze_region(&rb, strategy))
        })
        .collect()
}

/// Per-`R` feasibility summary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub lookup_bits: u32,
    pub regions: u64,
    /// Infeasible region indices, ascending. Only the first is recorded when
    /// the check stops early.
    pub infeasible: Vec<u64>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.infeasible.is_empty()
    }
}

/// Checks every region at `lookup_bits`. With `count_all = false` the
/// check stops at the first infeasible region.
pub fn check_feasibility(
    table: &BoundTable,
    lookup_bits: u32,
    strategy: SearchStrategy,
    count_all: bool,
) -> Result<FeasibilityReport> {
    check_lookup_bits(table.input(), lookup_bits)?;
    let regions = 1u64 << lookup_bits;
    let infeasible_region = |r: u64| -> bool {
        let rb = region_bounds(table, lookup_bits, r).expect("region in range");
        !region_feasible_with(&chord_tables(&rb), strategy)
    };
    let infeasible = if count_all {
        (0..regions)
            .into_par_iter()
            .filter(|&r| infeasible_region(r))
            .collect()
    } else {
        (0..regions)
            .into_par_iter()
            .find_first(|&r| infeasible_region(r))
            .into_iter()
            .collect()
    };
    Ok(FeasibilityReport {
        lookup_bits,
        regions,
        infeasible,
    })
}

/// Smallest `R <= r_max` at which every region is feasible.
pub fn min_feasible_r(
    table: &BoundTable,
    r_max: u32,
    strategy: SearchStrategy,
) -> Result<Option<u32>> {
    check_lookup_bits(table.input(), r_max)?;
    for r in 0..=r_max {
        if check_feasibility(table, r, strategy, false)?.feasible() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Smallest shift `k` at which a region admits an integer triple.
pub fn region_min_k(analysis: &RegionAnalysis, k_max: u32, window_bits: u32) -> Option<u32> {
    (0..=k_max).find(|&k| analysis.admits(k, window_bits))
}

fn global_k(
    analyses: &[RegionAnalysis],
    lookup_bits: u32,
    opts: &GenerateOptions,
    table: &BoundTable,
) -> Result<u32> {
    if let Some(bad) = analyses.iter().find(|a| !a.feasible) {
        return Err(Error::InfeasibleRegion {
            lookup_bits,
            region: bad.region,
        });
    }
    let k_max = opts.k_max(table);
    let w = opts.window_bits(table);
    let ks: Vec<Option<u32>> = analyses
        .par_iter()
        .map(|a| region_min_k(a, k_max, w))
        .collect();
    let mut k = 0;
    for (a, rk) in analyses.iter().zip(ks) {
        match rk {
            Some(rk) => k = k.max(rk),
            None => {
                return Err(Error::ShiftLimit {
                    k_max,
                    region: a.region,
                })
            }
        }
    }
    Ok(k)
}

/// The smallest global shift at which every region admits a polynomial.
/// Per-region minima suffice: a triple at `k` doubles to one at `k + 1`.
pub fn min_global_k(table: &BoundTable, lookup_bits: u32, opts: &GenerateOptions) -> Result<u32> {
    let analyses = analyze_regions(table, lookup_bits, opts.strategy)?;
    global_k(&analyses, lookup_bits, opts, table)
}

/// Builds the coefficient catalog at a given shift.
pub fn generate_space(
    table: &BoundTable,
    lookup_bits: u32,
    k: u32,
    opts: &GenerateOptions,
) -> Result<CoefficientCatalog> {
    let analyses = analyze_regions(table, lookup_bits, opts.strategy)?;
    catalog_from(table, lookup_bits, k, &analyses, opts)
}

/// Analyses once, finds the minimal shift and builds the catalog there.
pub fn build_space(
    table: &BoundTable,
    lookup_bits: u32,
    opts: &GenerateOptions,
) -> Result<CoefficientCatalog> {
    let analyses = analyze_regions(table, lookup_bits, opts.strategy)?;
    let k = global_k(&analyses, lookup_bits, opts, table)?;
    catalog_from(table, lookup_bits, k, &analyses, opts)
}

fn catalog_from(
    table: &BoundTable,
    lookup_bits: u32,
    k: u32,
    analyses: &[RegionAnalysis],
    opts: &GenerateOptions,
) -> Result<CoefficientCatalog> {
    if let Some(bad) = analyses.iter().find(|a| !a.feasible) {
        return Err(Error::InfeasibleRegion {
            lookup_bits,
            region: bad.region,
        });
    }
    let w = opts.window_bits(table);
    let regions: Vec<RegionCatalog> = analyses
        .par_iter()
        .map(|an| RegionCatalog::build(an, k, w, opts.a_cap))
        .collect::<Result<_>>()?;
    Ok(CoefficientCatalog::new(
        table.input(),
        table.output(),
        lookup_bits,
        k,
        w,
        regions,
    ))
}
