//! Bound-table text format.
//!
//! ```text
//! # comments start with '#'
//! n=0 m=10 p=0 q=11
//! 0 2047 2047
//! 1 2045 2047
//! ```
//!
//! After the header there is one `Z l u` record per input, in order, all
//! decimal.

use std::fmt::Write as _;

use super::{BoundTable, FixedFormat};
use crate::error::{parse_err, Result};

pub fn write_bound_table(table: &BoundTable) -> String {
    let mut out = String::with_capacity(table.len() * 16);
    let (i, o) = (table.input(), table.output());
    out.push_str("# polyspace bound table\n");
    writeln!(
        out,
        "n={} m={} p={} q={}",
        i.int_bits, i.frac_bits, o.int_bits, o.frac_bits
    )
    .unwrap();
    for (z, (l, u)) in table.lower().iter().zip(table.upper()).enumerate() {
        writeln!(out, "{z} {l} {u}").unwrap();
    }
    out
}

pub fn parse_bound_table(text: &str) -> Result<BoundTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let mut fields = [None; 4];
    for tok in header.split_whitespace() {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(hline, format!("bad header field `{tok}`")))?;
        let idx = match key {
            "n" => 0,
            "m" => 1,
            "p" => 2,
            "q" => 3,
            _ => return Err(parse_err(hline, format!("unknown header key `{key}`"))),
        };
        let v: u32 = val
            .parse()
            .map_err(|_| parse_err(hline, format!("bad value `{val}`")))?;
        fields[idx] = Some(v);
    }
    let [Some(n), Some(m), Some(p), Some(q)] = fields else {
        return Err(parse_err(hline, "header must define n, m, p and q"));
    };
    let input = FixedFormat::new(n, m).map_err(|e| parse_err(hline, e.to_string()))?;
    let output = FixedFormat::new(p, q).map_err(|e| parse_err(hline, e.to_string()))?;
    if input.width() > super::MAX_INPUT_BITS {
        return Err(parse_err(hline, "input width too large"));
    }

    let size = input.size() as usize;
    let mut lower = Vec::with_capacity(size);
    let mut upper = Vec::with_capacity(size);
    for (lineno, line) in lines {
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(lineno, "expected three integers"))?;
        let [z, l, u] = nums[..] else {
            return Err(parse_err(lineno, "expected `Z l u`"));
        };
        if z != lower.len() as i64 {
            return Err(parse_err(
                lineno,
                format!("expected Z={}, found {z}", lower.len()),
            ));
        }
        lower.push(l);
        upper.push(u);
    }
    BoundTable::new(input, output, lower, upper)
}
