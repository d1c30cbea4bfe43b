//! Bit-exact evaluation of packed designs and the brute-force oracles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{region_bounds, BoundTable};
use crate::designspace::IntRange;
use crate::emit::{netlist, HardwareDesign, SimError};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `floor((a x_t^2 + b x_j + c) / 2^k)` for input `z`, clamped only when
/// the design asks for it.
pub fn evaluate(hw: &HardwareDesign, z: u64) -> i128 {
    let mx = hw.offset_bits();
    let r = if hw.lookup_bits == 0 {
        0
    } else {
        (z >> mx) as usize
    };
    let x = z & ((1u64 << mx) - 1);
    let (a, b, c) = hw.coefficients(r);
    let xt = hw.truncation.square_operand(x) as i128;
    let xj = hw.truncation.linear_operand(x) as i128;
    let v = a * xt * xt + b * xj + c;
    let out = v >> hw.k;
    if hw.clamp {
        out.clamp(0, hw.output.max_value() as i128)
    } else {
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    /// `count` inputs drawn from a seeded generator.
    Sampled {
        count: u64,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub z: u64,
    pub value: i128,
    pub lower: i64,
    pub upper: i64,
}

/// Outcome of checking a design against a bound table.
///
/// Slack at an input is `min(y - l, u - y)`; it is negative exactly where the
/// bounds are violated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub inputs: u64,
    pub worst_slack: i128,
    /// Smallest violating input, if any.
    pub counterexample: Option<Counterexample>,
    pub histogram: BTreeMap<i128, u64>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    fn single(z: u64, value: i128, lower: i64, upper: i64) -> Self {
        let slack = (value - lower as i128).min(upper as i128 - value);
        CheckReport {
            inputs: 1,
            worst_slack: slack,
            counterexample: (slack < 0).then_some(Counterexample {
                z,
                value,
                lower,
                upper,
            }),
            histogram: BTreeMap::from([(slack, 1)]),
        }
    }

    fn empty() -> Self {
        CheckReport {
            inputs: 0,
            worst_slack: i128::MAX,
            counterexample: None,
            histogram: BTreeMap::new(),
        }
    }

    fn merge(mut self, other: CheckReport) -> Self {
        self.inputs += other.inputs;
        self.worst_slack = self.worst_slack.min(other.worst_slack);
        self.counterexample = match (self.counterexample, other.counterexample) {
            (Some(a), Some(b)) => Some(if a.z <= b.z { a } else { b }),
            (a, b) => a.or(b),
        };
        for (s, n) in other.histogram {
            *self.histogram.entry(s).or_default() += n;
        }
        self
    }

    /// Machine-readable summary:
    ///
    /// ```text
    /// result=pass inputs=1024 worst_slack=0
    /// counterexample=none
    /// slack 0 12
    /// slack 1 1012
    /// ```
    ///
    /// A failing check prints `counterexample=z:value:lower:upper`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "result={} inputs={} worst_slack={}",
            if self.passed() { "pass" } else { "fail" },
            self.inputs,
            self.worst_slack
        )
        .unwrap();
        match &self.counterexample {
            None => out.push_str("counterexample=none\n"),
            Some(c) => writeln!(
                out,
                "counterexample={}:{}:{}:{}",
                c.z, c.value, c.lower, c.upper
            )
            .unwrap(),
        }
        for (s, n) in &self.histogram {
            writeln!(out, "slack {s} {n}").unwrap();
        }
        out
    }
}

fn check_formats(hw: &HardwareDesign, table: &BoundTable) -> Result<()> {
    if hw.input != table.input() || hw.output != table.output() {
        return Err(Error::Config(format!(
            "design formats {} -> {} do not match table {} -> {}",
            hw.input,
            hw.output,
            table.input(),
            table.output()
        )));
    }
    if hw.rows.len() != 1usize << hw.lookup_bits {
        return Err(Error::Config("LUT height disagrees with R".into()));
    }
    Ok(())
}

fn check_one(hw: &HardwareDesign, table: &BoundTable, z: u64) -> CheckReport {
    let (l, u) = table.bounds(z);
    CheckReport::single(z, evaluate(hw, z), l, u)
}

/// Checks `l(z) <= evaluate(z) <= u(z)`.
pub fn check_design(
    hw: &HardwareDesign,
    table: &BoundTable,
    mode: CheckMode,
) -> Result<CheckReport> {
    check_formats(hw, table)?;
    let size = table.input().size();
    let report = match mode {
        CheckMode::Exhaustive => (0..size)
            .into_par_iter()
            .fold(CheckReport::empty, |acc, z| {
                acc.merge(check_one(hw, table, z))
            })
            .reduce(CheckReport::empty, CheckReport::merge),
        CheckMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let zs: Vec<u64> = (0..count).map(|_| rng.gen_range(0..size)).collect();
            zs.par_iter()
                .fold(CheckReport::empty, |acc, &z| {
                    acc.merge(check_one(hw, table, z))
                })
                .reduce(CheckReport::empty, CheckReport::merge)
        }
    };
    Ok(report)
}

/// First input where the simulated HDL disagrees with [`evaluate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HdlMismatch {
    Overflow(SimError),
    Value { z: u64, hdl: i128, reference: i128 },
}

/// Simulates the emitted datapath on every input and compares it with the
/// evaluator, reassembling the dropped constant MSBs.
pub fn check_hdl(hw: &HardwareDesign) -> std::result::Result<(), HdlMismatch> {
    let net = netlist(hw);
    let (count, value) = hw.dropped_msbs;
    let low = hw.datapath_output_bits();
    let size = hw.input.size();
    let first = (0..size)
        .into_par_iter()
        .filter_map(|z| {
            let reference = evaluate(hw, z);
            match net.simulate(z) {
                Err(e) => Some((z, HdlMismatch::Overflow(e))),
                Ok(port) => {
                    let hdl = if count == 0 {
                        port as i128
                    } else {
                        ((value as i128) << low) | port as i128
                    };
                    (hdl != reference).then_some((z, HdlMismatch::Value { z, hdl, reference }))
                }
            }
        })
        .min_by_key(|(z, _)| *z);
    match first {
        None => Ok(()),
        Some((_, m)) => Err(m),
    }
}

/// Largest input width the brute-force space oracle accepts.
pub const ORACLE_MAX_INPUT_BITS: u32 = 8;
/// Largest number of `(a, b, c)` probes per region.
pub const ORACLE_MAX_PROBES: u128 = 1 << 32;

/// Every integer triple within `window` (per coefficient) that satisfies
/// `l(x) <= floor((a x^2 + b x + c) / 2^k) <= u(x)` for all offsets of a
/// region, found by direct enumeration.
pub fn oracle_space(
    table: &BoundTable,
    lookup_bits: u32,
    k: u32,
    window: IntRange,
) -> Result<Vec<BTreeSet<(i128, i128, i128)>>> {
    if table.input().width() > ORACLE_MAX_INPUT_BITS {
        return Err(Error::Resource(format!(
            "oracle limited to {ORACLE_MAX_INPUT_BITS} input bits"
        )));
    }
    if window
        .len()
        .checked_pow(3)
        .is_none_or(|n| n > ORACLE_MAX_PROBES)
    {
        return Err(Error::Resource(format!("window {window:?} too large")));
    }
    let regions = 1u64 << lookup_bits;
    (0..regions)
        .into_par_iter()
        .map(|r| {
            let rb = region_bounds(table, lookup_bits, r)?;
            let holds = |a: i128, b: i128, c: i128| {
                rb.lower
                    .iter()
                    .zip(rb.upper)
                    .enumerate()
                    .all(|(x, (&l, &u))| {
                        let x = x as i128;
                        let y = (a * x * x + b * x + c).div_euclid(1i128 << k);
                        l as i128 <= y && y <= u as i128
                    })
            };
            let mut found = BTreeSet::new();
            for a in window.iter() {
                for b in window.iter() {
                    for c in window.iter() {
                        if holds(a, b, c) {
                            found.insert((a, b, c));
                        }
                    }
                }
            }
            Ok(found)
        })
        .collect()
}

/// Full-scan extremum of `(g(y) - h(x)) / (y - x)` over `x < y`, earliest
/// pair on ties.
#[allow(clippy::needless_range_loop)]
pub fn naive_chord_search(
    g: &[Rational],
    h: &[Rational],
    maximize: bool,
) -> Option<(Rational, usize, usize)> {
    let mut best: Option<(Rational, usize, usize)> = None;
    for x in 0..g.len() {
        for y in x + 1..g.len() {
            let num = g[y].numer() * h[x].denom() - h[x].numer() * g[y].denom();
            let d = Rational::new(num, g[y].denom() * h[x].denom() * (y - x) as i128);
            let better = match &best {
                None => true,
                Some((v, _, _)) => {
                    if maximize {
                        d > *v
                    } else {
                        d < *v
                    }
                }
            };
            if better {
                best = Some((d, x, y));
            }
        }
    }
    best
}
