//! Picks one design out of a coefficient catalog.
//!
//! Starting from the minimal shift `k`, the square-operand truncation `i`
//! and then the linear-operand truncation `j` are maximized, coefficient
//! widths are minimized for `a`, `b` and `c` in turn, and the first
//! surviving triple of every region is taken.

mod width;

use std::fmt;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;

use crate::bounds::FixedFormat;
use crate::designspace::{c_interval_truncated, CoefficientCatalog, HalfOpenRange, RegionCatalog};
use crate::error::{Error, Result};

pub(crate) use width::mask as width_mask;
use width::minimize_sets;
pub use width::{minimize_width, minimize_width_intervals, SignClass, WidthPlan, WidthResult};

/// Low bits of `x` cleared before squaring (`i`) and before the linear
/// product (`j`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TruncationChoice {
    pub square: u32,
    pub linear: u32,
}

impl TruncationChoice {
    pub fn square_operand(&self, x: u64) -> u64 {
        clear_low(x, self.square)
    }

    pub fn linear_operand(&self, x: u64) -> u64 {
        clear_low(x, self.linear)
    }
}

fn clear_low(x: u64, bits: u32) -> u64 {
    if bits >= 64 {
        0
    } else {
        x & !((1u64 << bits) - 1)
    }
}

/// Order of the truncation steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecisionOrder {
    /// `i`, then `j`.
    #[default]
    SquareFirst,
    /// `j`, then `i`.
    LinearFirst,
    /// Keep `i = j = 0`.
    NoTruncation,
}

impl FromStr for DecisionOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square-first" => Ok(DecisionOrder::SquareFirst),
            "linear-first" => Ok(DecisionOrder::LinearFirst),
            "no-truncation" => Ok(DecisionOrder::NoTruncation),
            other => Err(Error::Config(format!("unknown decision order `{other}`"))),
        }
    }
}

impl fmt::Display for DecisionOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionOrder::SquareFirst => "square-first",
            DecisionOrder::LinearFirst => "linear-first",
            DecisionOrder::NoTruncation => "no-truncation",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub order: DecisionOrder,
    /// Most `b` values kept per `(region, a)`, nearest zero.
    pub b_cap: u128,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            order: DecisionOrder::SquareFirst,
            b_cap: 1 << 12,
        }
    }
}

/// One `(a, b)` pair with the `c` values valid under the current truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub a: i128,
    pub b: i128,
    pub c: HalfOpenRange,
}

#[derive(Clone, Debug)]
pub struct RegionCandidates {
    pub region: u64,
    pub rows: Vec<Candidate>,
}

/// Surviving triples of a catalog, after zero or more decision steps.
#[derive(Clone, Debug)]
pub struct CandidateSet<'a> {
    catalog: &'a CoefficientCatalog,
    truncation: TruncationChoice,
    c_plan: Option<WidthPlan>,
    regions: Vec<RegionCandidates>,
}

impl<'a> CandidateSet<'a> {
    /// Every listed triple of the catalog, rows sorted by `(a, b)`.
    pub fn new(catalog: &'a CoefficientCatalog, b_cap: u128) -> Self {
        let regions = catalog
            .regions()
            .par_iter()
            .map(|rc| {
                let mut rows = Vec::new();
                for &(a, br) in rc.entries() {
                    let kept = br.nearest_zero(b_cap);
                    if kept != br {
                        warn!(
                            "region {}: b-range {:?} for a={a} trimmed to {} values",
                            rc.region(),
                            br,
                            kept.len()
                        );
                    }
                    for b in kept.iter() {
                        let c = rc.c_range(a, b);
                        if !c.is_empty() {
                            rows.push(Candidate { a, b, c });
                        }
                    }
                }
                RegionCandidates {
                    region: rc.region(),
                    rows,
                }
            })
            .collect();
        CandidateSet {
            catalog,
            truncation: TruncationChoice::default(),
            c_plan: None,
            regions,
        }
    }

    pub fn catalog(&self) -> &CoefficientCatalog {
        self.catalog
    }

    pub fn truncation(&self) -> TruncationChoice {
        self.truncation
    }

    pub fn regions(&self) -> &[RegionCandidates] {
        &self.regions
    }

    /// Number of surviving `(a, b)` rows.
    pub fn rows(&self) -> usize {
        self.regions.iter().map(|r| r.rows.len()).sum()
    }

    /// Every region keeps at least one triple.
    pub fn all_nonempty(&self) -> bool {
        self.regions.iter().all(|r| !r.rows.is_empty())
    }

    fn assert_nonempty(&self, pass: &str) {
        if let Some(r) = self.regions.iter().find(|r| r.rows.is_empty()) {
            panic!("{pass} emptied region {}", r.region);
        }
    }

    /// Whether every region keeps a triple under truncation `t`.
    pub fn truncation_valid(&self, t: TruncationChoice) -> bool {
        self.regions
            .par_iter()
            .zip(self.catalog.regions())
            .all(|(rc, cat)| {
                rc.rows
                    .iter()
                    .any(|row| !truncated_c(cat, row, t).is_empty())
            })
    }

    /// Keeps the triples valid under `t`, narrowing their `c` ranges.
    pub fn with_truncation(&self, t: TruncationChoice) -> CandidateSet<'a> {
        let regions = self
            .regions
            .par_iter()
            .zip(self.catalog.regions())
            .map(|(rc, cat)| RegionCandidates {
                region: rc.region,
                rows: rc
                    .rows
                    .iter()
                    .filter_map(|row| {
                        let c = truncated_c(cat, row, t);
                        (!c.is_empty()).then_some(Candidate { c, ..*row })
                    })
                    .collect(),
            })
            .collect();
        CandidateSet {
            catalog: self.catalog,
            truncation: t,
            c_plan: self.c_plan,
            regions,
        }
    }

    fn retain(&self, keep: impl Fn(&Candidate) -> bool + Sync) -> CandidateSet<'a> {
        CandidateSet {
            regions: self
                .regions
                .iter()
                .map(|rc| RegionCandidates {
                    region: rc.region,
                    rows: rc.rows.iter().filter(|row| keep(row)).copied().collect(),
                })
                .collect(),
            catalog: self.catalog,
            truncation: self.truncation,
            c_plan: self.c_plan,
        }
    }
}

fn truncated_c(cat: &RegionCatalog, row: &Candidate, t: TruncationChoice) -> HalfOpenRange {
    c_interval_truncated(&cat.bounds(), row.a, row.b, cat.k(), t.square, t.linear).intersect(&row.c)
}

/// Largest `i` in `[0, m_x]` keeping a triple in every region, with the
/// current `j`; the returned set holds exactly the surviving triples.
pub fn max_square_truncation<'a>(set: &CandidateSet<'a>) -> (u32, CandidateSet<'a>) {
    let mx = set.catalog.offset_bits();
    let base = set.truncation;
    let i = (0..=mx)
        .rev()
        .find(|&i| set.truncation_valid(TruncationChoice { square: i, ..base }))
        .unwrap_or(0);
    let out = set.with_truncation(TruncationChoice { square: i, ..base });
    out.assert_nonempty("square truncation");
    (i, out)
}

/// Largest `j` in `[0, m_x]` keeping a triple in every region, with the
/// current `i`.
pub fn max_linear_truncation<'a>(set: &CandidateSet<'a>) -> (u32, CandidateSet<'a>) {
    let mx = set.catalog.offset_bits();
    let base = set.truncation;
    let j = (0..=mx)
        .rev()
        .find(|&j| set.truncation_valid(TruncationChoice { linear: j, ..base }))
        .unwrap_or(0);
    let out = set.with_truncation(TruncationChoice { linear: j, ..base });
    out.assert_nonempty("linear truncation");
    (j, out)
}

/// Storage plans of the three coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WidthPlans {
    pub a: WidthPlan,
    pub b: WidthPlan,
    pub c: WidthPlan,
}

impl WidthPlans {
    pub fn as_array(&self) -> [WidthPlan; 3] {
        [self.a, self.b, self.c]
    }

    /// Bits per LUT row.
    pub fn row_bits(&self) -> u32 {
        self.as_array().iter().map(|p| p.field_bits()).sum()
    }

    /// Some coefficient needed the mixed-sign fallback.
    pub fn mixed_fallback(&self) -> bool {
        self.as_array().iter().any(|p| p.class == SignClass::Mixed)
    }
}

/// Trailing-zero cap for zero, `p + q + 8`.
pub fn zero_shift_cap(output: FixedFormat) -> u32 {
    output.width() + 8
}

#[derive(Clone, Copy)]
enum Coef {
    A,
    B,
}

fn value(row: &Candidate, which: Coef) -> i128 {
    match which {
        Coef::A => row.a,
        Coef::B => row.b,
    }
}

/// Chooses between the sign families: the eligible one with smaller `P`,
/// ties to nonneg, else the mixed fallback.
fn choose_plan(
    nonneg: Option<WidthResult>,
    nonpos: Option<WidthResult>,
    mixed: impl FnOnce() -> WidthResult,
) -> WidthPlan {
    let plan = |class, r: WidthResult| WidthPlan {
        class,
        shift: r.shift,
        width: r.width,
    };
    match (nonneg, nonpos) {
        (Some(p), Some(n)) if n.width < p.width => plan(SignClass::NonPositive, n),
        (Some(p), _) => plan(SignClass::NonNegative, p),
        (None, Some(n)) => plan(SignClass::NonPositive, n),
        (None, None) => plan(SignClass::Mixed, mixed()),
    }
}

fn point_plan(set: &CandidateSet<'_>, which: Coef, cap: u32) -> WidthPlan {
    let family = |f: &dyn Fn(i128) -> Option<u128>| -> Vec<Vec<u128>> {
        set.regions
            .iter()
            .map(|rc| {
                let mut v: Vec<u128> = rc.rows.iter().filter_map(|r| f(value(r, which))).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    };
    let run = |sets: Vec<Vec<u128>>| {
        let refs: Vec<&[u128]> = sets.iter().map(|s| s.as_slice()).collect();
        minimize_sets(&refs, cap)
    };
    let nonneg = run(family(&|v| (v >= 0).then_some(v as u128)));
    let nonpos = run(family(&|v| (v <= 0).then_some(v.unsigned_abs())));
    choose_plan(nonneg, nonpos, || {
        run(family(&|v| Some(v.unsigned_abs()))).expect("nonempty regions")
    })
}

fn interval_plan(set: &CandidateSet<'_>, cap: u32) -> WidthPlan {
    let family = |f: &dyn Fn(HalfOpenRange) -> Vec<(u128, u128)>| -> Vec<Vec<(u128, u128)>> {
        set.regions
            .iter()
            .map(|rc| rc.rows.iter().flat_map(|r| f(r.c)).collect())
            .collect()
    };
    let run = |sets: Vec<Vec<(u128, u128)>>| minimize_width_intervals(&sets, cap);
    let nonneg = run(family(&|c| nonneg_part(c).into_iter().collect()));
    let nonpos = run(family(&|c| nonpos_part(c).into_iter().collect()));
    choose_plan(nonneg, nonpos, || {
        run(family(&|c| {
            nonneg_part(c).into_iter().chain(nonpos_part(c)).collect()
        }))
        .expect("nonempty regions")
    })
}

/// Magnitudes of `[lo, hi) ∩ [0, ∞)`.
fn nonneg_part(c: HalfOpenRange) -> Option<(u128, u128)> {
    let lo = c.lo.max(0);
    (lo < c.hi).then_some((lo as u128, c.hi as u128))
}

/// Magnitudes of `[lo, hi) ∩ (-∞, 0]`.
fn nonpos_part(c: HalfOpenRange) -> Option<(u128, u128)> {
    let hi = c.hi.min(1);
    (c.lo < hi).then(|| ((1 - hi) as u128, (1 - c.lo) as u128))
}

/// Minimizes the storage of `a`, `b` and `c` in that order, pruning the
/// triples each choice rules out.
pub fn coefficient_width_pass<'a>(set: &CandidateSet<'a>) -> (WidthPlans, CandidateSet<'a>) {
    set.assert_nonempty("width pass input");
    let cap = zero_shift_cap(set.catalog.output());
    let a = point_plan(set, Coef::A, cap);
    let set = set.retain(|r| a.admits(r.a));
    set.assert_nonempty("a width");
    let b = point_plan(&set, Coef::B, cap);
    let set = set.retain(|r| b.admits(r.b));
    set.assert_nonempty("b width");
    let c = interval_plan(&set, cap);
    let mut set = set.retain(|r| c.smallest_in(r.c).is_some());
    set.assert_nonempty("c width");
    set.c_plan = Some(c);
    let plans = WidthPlans { a, b, c };
    if plans.mixed_fallback() {
        warn!("mixed-sign coefficient storage in use: {plans:?}");
    }
    (plans, set)
}

/// The chosen design: one triple per region plus its storage plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectedDesign {
    pub input: FixedFormat,
    pub output: FixedFormat,
    pub lookup_bits: u32,
    pub k: u32,
    pub truncation: TruncationChoice,
    pub plans: WidthPlans,
    /// `(a, b, c)` per region, in region order.
    pub coefficients: Vec<(i128, i128, i128)>,
    /// Leading output bits that never change, `(count, value)`.
    pub constant_msbs: (u32, u64),
    /// The catalog behind this design was capped.
    pub catalog_truncated: bool,
}

impl SelectedDesign {
    pub fn offset_bits(&self) -> u32 {
        self.input.width() - self.lookup_bits
    }
}

/// First surviving triple per region under `(a, b, c)` ascending.
pub fn select_design(set: &CandidateSet<'_>, plans: WidthPlans) -> Result<SelectedDesign> {
    let cat = set.catalog;
    let mut coefficients = Vec::with_capacity(set.regions.len());
    for rc in &set.regions {
        let mut rows: Vec<&Candidate> = rc.rows.iter().collect();
        rows.sort_by_key(|r| (r.a, r.b));
        let pick = rows
            .iter()
            .find_map(|r| plans.c.smallest_in(r.c).map(|c| (r.a, r.b, c)))
            .ok_or(Error::EmptyRegion {
                region: rc.region,
                stage: "selection",
            })?;
        coefficients.push(pick);
    }
    Ok(SelectedDesign {
        input: cat.input(),
        output: cat.output(),
        lookup_bits: cat.lookup_bits(),
        k: cat.k(),
        truncation: set.truncation,
        plans,
        coefficients,
        constant_msbs: cat.constant_msbs(),
        catalog_truncated: cat.truncated(),
    })
}

/// Runs the whole decision procedure on a catalog.
pub fn explore(catalog: &CoefficientCatalog, opts: &ExploreOptions) -> Result<SelectedDesign> {
    let set = CandidateSet::new(catalog, opts.b_cap);
    if let Some(r) = set.regions.iter().find(|r| r.rows.is_empty()) {
        return Err(Error::EmptyRegion {
            region: r.region,
            stage: "candidates",
        });
    }
    let set = match opts.order {
        DecisionOrder::SquareFirst => max_linear_truncation(&max_square_truncation(&set).1).1,
        DecisionOrder::LinearFirst => max_square_truncation(&max_linear_truncation(&set).1).1,
        DecisionOrder::NoTruncation => set,
    };
    let (plans, set) = coefficient_width_pass(&set);
    select_design(&set, plans)
}
