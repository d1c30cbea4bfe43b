//! LUT packing, design files and HDL output.

mod hdl;

use std::fmt::Write as _;

use crate::bounds::FixedFormat;
use crate::error::{parse_err, Error, Result};
use crate::explore::{SelectedDesign, SignClass, TruncationChoice, WidthPlan, WidthPlans};

pub use hdl::{emit_hdl, netlist, Netlist, Node, Op, SimError};

use crate::explore::width_mask as mask;

/// A packed design: one LUT row per region plus everything needed to
/// evaluate it.
///
/// Rows hold `[a | b | c]` with `a` in the most significant bits. Each field
/// stores `v >> shift`, as a magnitude for the fixed-sign classes and in
/// two's complement for the mixed class. Zero-width fields are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardwareDesign {
    pub input: FixedFormat,
    pub output: FixedFormat,
    pub lookup_bits: u32,
    pub k: u32,
    pub truncation: TruncationChoice,
    pub plans: WidthPlans,
    pub rows: Vec<u128>,
    /// Output MSBs left out of the datapath, `(count, value)`.
    pub dropped_msbs: (u32, u64),
    /// Clamp evaluated outputs into the output format.
    pub clamp: bool,
}

impl HardwareDesign {
    pub fn offset_bits(&self) -> u32 {
        self.input.width() - self.lookup_bits
    }

    pub fn row_bits(&self) -> u32 {
        self.plans.row_bits()
    }

    /// Bit positions `(lo, bits)` of the `a`, `b` and `c` fields.
    pub fn field_layout(&self) -> [(u32, u32); 3] {
        let [pa, pb, pc] = self.plans.as_array().map(|p| p.field_bits());
        [(pb + pc, pa), (pc, pb), (0, pc)]
    }

    /// Coefficients of region `r`.
    pub fn coefficients(&self, r: usize) -> (i128, i128, i128) {
        let row = self.rows[r];
        let [a, b, c] = self
            .field_layout()
            .into_iter()
            .zip(self.plans.as_array())
            .map(|((lo, bits), plan)| plan.decode((row >> lo) & mask(bits)))
            .collect::<Vec<_>>()
            .try_into()
            .unwrap();
        (a, b, c)
    }

    /// Every region's coefficients.
    pub fn unpack(&self) -> Vec<(i128, i128, i128)> {
        (0..self.rows.len()).map(|r| self.coefficients(r)).collect()
    }

    /// Output bits the datapath produces.
    pub fn datapath_output_bits(&self) -> u32 {
        self.output.width() - self.dropped_msbs.0
    }

    /// `LUT [Pa,Pb,Pc] = total`, sign bits included in the field widths.
    pub fn width_report(&self) -> String {
        let [a, b, c] = self.plans.as_array().map(|p| p.field_bits());
        format!("LUT [{a},{b},{c}] = {}", a + b + c)
    }
}

/// Packs the selected coefficients into LUT rows.
pub fn pack_lut(design: &SelectedDesign) -> Result<HardwareDesign> {
    let expected = 1usize << design.lookup_bits;
    if design.coefficients.len() != expected {
        return Err(Error::Specification(format!(
            "{} coefficient rows for {expected} regions",
            design.coefficients.len()
        )));
    }
    let mut hw = HardwareDesign {
        input: design.input,
        output: design.output,
        lookup_bits: design.lookup_bits,
        k: design.k,
        truncation: design.truncation,
        plans: design.plans,
        rows: Vec::with_capacity(expected),
        dropped_msbs: design.constant_msbs,
        clamp: false,
    };
    if hw.row_bits() > 128 {
        return Err(Error::Resource(format!("{}-bit LUT rows", hw.row_bits())));
    }
    let layout = hw.field_layout();
    for (r, &(a, b, c)) in design.coefficients.iter().enumerate() {
        let mut row = 0u128;
        for ((v, plan), (lo, _)) in [a, b, c]
            .into_iter()
            .zip(design.plans.as_array())
            .zip(layout)
        {
            if !plan.admits(v) {
                return Err(Error::Specification(format!(
                    "region {r}: coefficient {v} not representable as {plan:?}"
                )));
            }
            row |= plan.encode(v) << lo;
        }
        hw.rows.push(row);
    }
    Ok(hw)
}

fn hex_digits(bits: u32) -> usize {
    (bits as usize).div_ceil(4).max(1)
}

/// Design file text:
///
/// ```text
/// # polyspace design
/// n=0 m=10 p=0 q=11 R=6 k=3 i=4 j=0 msbs=1:1 clamp=0
/// a nonneg shift=19 width=0
/// b nonpos shift=0 width=4
/// c nonneg shift=0 width=14
/// rows=64 bits=18
/// 0 0x3d7ff -7 15359
/// ...
/// ```
///
/// Each row line is `region packed-row a b c`; the parser checks the
/// coefficients against the packed bits.
pub fn write_design_file(hw: &HardwareDesign) -> String {
    let mut out = String::from("# polyspace design\n");
    writeln!(
        out,
        "n={} m={} p={} q={} R={} k={} i={} j={} msbs={}:{} clamp={}",
        hw.input.int_bits,
        hw.input.frac_bits,
        hw.output.int_bits,
        hw.output.frac_bits,
        hw.lookup_bits,
        hw.k,
        hw.truncation.square,
        hw.truncation.linear,
        hw.dropped_msbs.0,
        hw.dropped_msbs.1,
        hw.clamp as u8,
    )
    .unwrap();
    for (name, p) in ["a", "b", "c"].iter().zip(hw.plans.as_array()) {
        writeln!(
            out,
            "{name} {} shift={} width={}",
            p.class, p.shift, p.width
        )
        .unwrap();
    }
    writeln!(out, "rows={} bits={}", hw.rows.len(), hw.row_bits()).unwrap();
    let digits = hex_digits(hw.row_bits());
    for (r, row) in hw.rows.iter().enumerate() {
        let (a, b, c) = hw.coefficients(r);
        writeln!(out, "{r} 0x{row:0digits$x} {a} {b} {c}").unwrap();
    }
    out
}

fn fields<'a>(line: &'a str, n: usize, keys: &[&str]) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != keys.len() {
        return Err(parse_err(n, format!("expected {} fields", keys.len())));
    }
    parts
        .iter()
        .zip(keys)
        .map(|(p, k)| {
            p.strip_prefix(k)
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| parse_err(n, format!("expected `{k}=`")))
        })
        .collect()
}

fn num<T: std::str::FromStr>(s: &str, n: usize) -> Result<T> {
    s.parse()
        .map_err(|_| parse_err(n, format!("bad number `{s}`")))
}

/// Parses [`write_design_file`] output.
pub fn parse_design_file(text: &str) -> Result<HardwareDesign> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing {what}")))
    };

    let (n, line) = next("header")?;
    let h = fields(
        line,
        n,
        &["n", "m", "p", "q", "R", "k", "i", "j", "msbs", "clamp"],
    )?;
    let input = FixedFormat::new(num(h[0], n)?, num(h[1], n)?)?;
    let output = FixedFormat::new(num(h[2], n)?, num(h[3], n)?)?;
    let lookup_bits: u32 = num(h[4], n)?;
    if lookup_bits > input.width() || input.width() > crate::bounds::MAX_INPUT_BITS {
        return Err(parse_err(n, "R exceeds the input width"));
    }
    let (count, value) = h[8]
        .split_once(':')
        .ok_or_else(|| parse_err(n, "msbs must be count:value"))?;
    let dropped_msbs = (num::<u32>(count, n)?, num::<u64>(value, n)?);
    if dropped_msbs.0 > output.width() {
        return Err(parse_err(n, "more dropped bits than output bits"));
    }
    let clamp = match h[9] {
        "0" => false,
        "1" => true,
        _ => return Err(parse_err(n, "clamp must be 0 or 1")),
    };
    let truncation = TruncationChoice {
        square: num(h[6], n)?,
        linear: num(h[7], n)?,
    };
    let mx = input.width() - lookup_bits;
    if truncation.square > mx || truncation.linear > mx {
        return Err(parse_err(n, "truncation exceeds the offset width"));
    }

    let mut plans = Vec::new();
    for name in ["a", "b", "c"] {
        let (n, line) = next("coefficient plan")?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != name {
            return Err(parse_err(
                n,
                format!("expected `{name} <class> shift= width=`"),
            ));
        }
        let class: SignClass = parts[1]
            .parse()
            .map_err(|_| parse_err(n, "bad sign class"))?;
        let rest = parts[2..].join(" ");
        let f = fields(&rest, n, &["shift", "width"])?;
        plans.push(WidthPlan {
            class,
            shift: num(f[0], n)?,
            width: num(f[1], n)?,
        });
    }
    let plans = WidthPlans {
        a: plans[0],
        b: plans[1],
        c: plans[2],
    };

    let (n, line) = next("row count")?;
    let f = fields(line, n, &["rows", "bits"])?;
    let count: usize = num(f[0], n)?;
    if count != 1usize << lookup_bits {
        return Err(parse_err(n, format!("{count} rows for R={lookup_bits}")));
    }
    if num::<u32>(f[1], n)? != plans.row_bits() {
        return Err(parse_err(n, "row width disagrees with the plans"));
    }
    let mut hw = HardwareDesign {
        input,
        output,
        lookup_bits,
        k: num(h[5], n)?,
        truncation,
        plans,
        rows: Vec::with_capacity(count),
        dropped_msbs,
        clamp,
    };
    for r in 0..count {
        let (n, line) = next("LUT row")?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 5 || num::<usize>(parts[0], n)? != r {
            return Err(parse_err(n, format!("expected row {r}")));
        }
        let hex = parts[1]
            .strip_prefix("0x")
            .ok_or_else(|| parse_err(n, "row must be hex"))?;
        let row = u128::from_str_radix(hex, 16).map_err(|_| parse_err(n, "bad hex row"))?;
        if row & !mask(plans.row_bits()) != 0 {
            return Err(parse_err(n, "row wider than the plans allow"));
        }
        hw.rows.push(row);
        let want: (i128, i128, i128) = (num(parts[2], n)?, num(parts[3], n)?, num(parts[4], n)?);
        if hw.coefficients(r) != want {
            return Err(parse_err(n, "coefficients disagree with the packed row"));
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n, "trailing content"));
    }
    Ok(hw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(class: SignClass, shift: u32, width: u32) -> WidthPlan {
        WidthPlan {
            class,
            shift,
            width,
        }
    }

    pub(crate) fn toy() -> SelectedDesign {
        let f = FixedFormat::new(0, 2).unwrap();
        SelectedDesign {
            input: f,
            output: FixedFormat::new(0, 3).unwrap(),
            lookup_bits: 0,
            k: 0,
            truncation: TruncationChoice::default(),
            plans: WidthPlans {
                a: plan(SignClass::NonNegative, 0, 0),
                b: plan(SignClass::NonNegative, 0, 2),
                c: plan(SignClass::NonNegative, 0, 0),
            },
            coefficients: vec![(0, 2, 0)],
            constant_msbs: (0, 0),
            catalog_truncated: false,
        }
    }

    #[test]
    fn toy_row_bits() {
        let hw = pack_lut(&toy()).unwrap();
        assert_eq!(hw.row_bits(), 2);
        assert_eq!(format!("{:02b}", hw.rows[0]), "10");
        assert_eq!(hw.unpack(), vec![(0, 2, 0)]);
        assert_eq!(hw.width_report(), "LUT [0,2,0] = 2");
    }

    #[test]
    fn mixed_fields_roundtrip() {
        let mut d = toy();
        d.lookup_bits = 1;
        d.plans = WidthPlans {
            a: plan(SignClass::Mixed, 1, 2),
            b: plan(SignClass::NonPositive, 0, 3),
            c: plan(SignClass::NonNegative, 2, 4),
        };
        d.coefficients = vec![(-6, -7, 60), (4, 0, 0)];
        let hw = pack_lut(&d).unwrap();
        assert_eq!(hw.row_bits(), 10);
        assert_eq!(hw.unpack(), d.coefficients);
        assert_eq!(hw.width_report(), "LUT [3,3,4] = 10");
    }

    #[test]
    fn unrepresentable_coefficient_rejected() {
        let mut d = toy();
        d.coefficients = vec![(0, 4, 0)];
        assert!(pack_lut(&d).is_err());
    }

    #[test]
    fn design_file_roundtrip() {
        let hw = pack_lut(&toy()).unwrap();
        let text = write_design_file(&hw);
        assert_eq!(parse_design_file(&text).unwrap(), hw);
        assert_eq!(write_design_file(&parse_design_file(&text).unwrap()), text);
    }

    #[test]
    fn corrupted_files_rejected() {
        let text = write_design_file(&pack_lut(&toy()).unwrap());
        let bad_header = text.replace("k=0", "k=zero");
        assert!(parse_design_file(&bad_header).is_err());
        let missing_key = text.replace(" clamp=0", "");
        assert!(parse_design_file(&missing_key).is_err());
        let bad_row = text.replace("0x2 0 2 0", "0x2 0 3 0");
        assert!(matches!(
            parse_design_file(&bad_row),
            Err(Error::Parse { .. })
        ));
        let wide_row = text.replace("0x2 0 2 0", "0x6 0 2 0");
        assert!(parse_design_file(&wide_row).is_err());
        let short = text.replace("rows=1", "rows=2");
        assert!(parse_design_file(&short).is_err());
        assert!(parse_design_file("").is_err());
    }
}
