use std::fmt::Write as _;

use log::warn;

use super::{c_interval_truncated, HalfOpenRange, IntRange, RegionAnalysis};
use crate::bounds::{FixedFormat, RegionBounds};
use crate::error::{Error, Result};

/// The admissible coefficients of one region at the catalog's shift.
///
/// `a` values are kept as a range; each `a` with a nonempty `b` range is
/// listed with that range. `c` ranges are recomputed from the region bounds
/// on demand.
#[derive(Clone, Debug)]
pub struct RegionCatalog {
    region: u64,
    k: u32,
    lower: Vec<i64>,
    upper: Vec<i64>,
    a_range: IntRange,
    entries: Vec<(i128, IntRange)>,
    truncated: bool,
}

impl RegionCatalog {
    pub(super) fn build(
        an: &RegionAnalysis,
        k: u32,
        window_bits: u32,
        a_cap: u128,
    ) -> Result<Self> {
        let a_range = an.a_range(k, window_bits);
        let listed = a_range.nearest_zero(a_cap);
        let truncated = listed != a_range;
        if truncated {
            warn!(
                "region {}: a-range {:?} has {} values; keeping {} nearest zero",
                an.region,
                a_range,
                a_range.len(),
                listed.len()
            );
        }
        let entries: Vec<(i128, IntRange)> = listed
            .iter()
            .map(|a| (a, an.b_range(a, k, window_bits)))
            .filter(|(_, b)| !b.is_empty())
            .collect();
        if entries.is_empty() {
            return Err(Error::NoPolynomialAtShift {
                k,
                region: an.region,
            });
        }
        Ok(RegionCatalog {
            region: an.region,
            k,
            lower: an.lower.clone(),
            upper: an.upper.clone(),
            a_range,
            entries,
            truncated,
        })
    }

    pub fn region(&self) -> u64 {
        self.region
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn bounds(&self) -> RegionBounds<'_> {
        RegionBounds {
            region: self.region,
            lower: &self.lower,
            upper: &self.upper,
        }
    }

    /// Offsets per region, `2^(n+m-R)`.
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// The full integer `a` interval `[a0, a1]`.
    pub fn a_range(&self) -> IntRange {
        self.a_range
    }

    /// `(a, [b0, b1])` for every listed `a` whose `b` range is nonempty.
    pub fn entries(&self) -> &[(i128, IntRange)] {
        &self.entries
    }

    pub fn b_range(&self, a: i128) -> IntRange {
        self.entries
            .iter()
            .find(|(ea, _)| *ea == a)
            .map_or(IntRange::EMPTY, |(_, b)| *b)
    }

    pub fn c_range(&self, a: i128, b: i128) -> HalfOpenRange {
        c_interval_truncated(&self.bounds(), a, b, self.k, 0, 0)
    }

    /// True when the listed `a` values are a capped subset of `a_range`.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Every triple with all three coefficients inside the given window.
    pub fn triples_within(&self, window: IntRange) -> Vec<(i128, i128, i128)> {
        let mut out = Vec::new();
        for &(a, br) in &self.entries {
            if !window.contains(a) {
                continue;
            }
            for b in br.intersect(&window).iter() {
                let cr = self.c_range(a, b);
                let lo = cr.lo.max(window.lo);
                let hi = cr.hi.min(window.hi + 1);
                out.extend((lo..hi).map(|c| (a, b, c)));
            }
        }
        out
    }
}

/// The complete design space at one `(R, k)`.
#[derive(Clone, Debug)]
pub struct CoefficientCatalog {
    input: FixedFormat,
    output: FixedFormat,
    lookup_bits: u32,
    k: u32,
    window_bits: u32,
    regions: Vec<RegionCatalog>,
}

impl CoefficientCatalog {
    pub(super) fn new(
        input: FixedFormat,
        output: FixedFormat,
        lookup_bits: u32,
        k: u32,
        window_bits: u32,
        regions: Vec<RegionCatalog>,
    ) -> Self {
        CoefficientCatalog {
            input,
            output,
            lookup_bits,
            k,
            window_bits,
            regions,
        }
    }

    pub fn input(&self) -> FixedFormat {
        self.input
    }

    pub fn output(&self) -> FixedFormat {
        self.output
    }

    pub fn lookup_bits(&self) -> u32 {
        self.lookup_bits
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn window_bits(&self) -> u32 {
        self.window_bits
    }

    /// Width of the offset `x`, `n + m - R`.
    pub fn offset_bits(&self) -> u32 {
        self.input.width() - self.lookup_bits
    }

    pub fn regions(&self) -> &[RegionCatalog] {
        &self.regions
    }

    /// Zero lies in every region's `a` interval, so a piecewise linear
    /// design suffices.
    pub fn linear_sufficient(&self) -> bool {
        self.regions.iter().all(|r| r.a_range.contains(0))
    }

    pub fn truncated(&self) -> bool {
        self.regions.iter().any(|r| r.truncated)
    }

    /// Leading output bits shared by every bound, as `(count, value)`.
    pub fn constant_msbs(&self) -> (u32, u64) {
        let width = self.output.width();
        let bounds = self
            .regions
            .iter()
            .flat_map(|r| r.lower.iter().chain(&r.upper));
        let lo = bounds.clone().min().copied().unwrap_or(0) as u64;
        let hi = bounds.max().copied().unwrap_or(0) as u64;
        let count = (0..width)
            .take_while(|&c| lo >> (width - c - 1) == hi >> (width - c - 1))
            .count() as u32;
        let value = if count == 0 { 0 } else { lo >> (width - count) };
        (count, value)
    }

    /// Total number of listed `(a, b)` pairs.
    pub fn ab_pairs(&self) -> u128 {
        self.regions
            .iter()
            .flat_map(|r| r.entries.iter().map(|(_, b)| b.len()))
            .sum()
    }
}

/// Catalog text format:
///
/// ```text
/// # polyspace catalog
/// n=0 m=10 p=0 q=11 R=6 k=9 window=44 linear=1 truncated=0
/// region 0 a=-1..0 entries=2
/// -1 12 14
/// 0 10 15
/// region 1 ...
/// ```
///
/// Each region line gives the inclusive `a` interval and the number of
/// `a b0 b1` entry lines that follow (`b` inclusive). `c` ranges are not
/// stored; they follow from the bound table.
pub fn write_catalog(cat: &CoefficientCatalog) -> String {
    let mut out = String::new();
    out.push_str("# polyspace catalog\n");
    writeln!(
        out,
        "n={} m={} p={} q={} R={} k={} window={} linear={} truncated={}",
        cat.input.int_bits,
        cat.input.frac_bits,
        cat.output.int_bits,
        cat.output.frac_bits,
        cat.lookup_bits,
        cat.k,
        cat.window_bits,
        cat.linear_sufficient() as u8,
        cat.truncated() as u8,
    )
    .unwrap();
    for r in &cat.regions {
        writeln!(
            out,
            "region {} a={}..{} entries={}",
            r.region,
            r.a_range.lo,
            r.a_range.hi,
            r.entries.len()
        )
        .unwrap();
        for (a, b) in &r.entries {
            writeln!(out, "{a} {} {}", b.lo, b.hi).unwrap();
        }
    }
    out
}
