//! Fixed-point formats, input splitting and integer bound tables.

pub mod certified;
mod io;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use io::{parse_bound_table, write_bound_table};

/// Largest supported input width `n + m`.
pub const MAX_INPUT_BITS: u32 = 24;
/// Largest supported output width `p + q`.
pub const MAX_OUTPUT_BITS: u32 = 28;

/// Unsigned fixed-point format `n.m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FixedFormat {
    pub int_bits: u32,
    pub frac_bits: u32,
}

impl FixedFormat {
    pub fn new(int_bits: u32, frac_bits: u32) -> Result<Self> {
        if int_bits + frac_bits == 0 {
            return Err(Error::Config(
                "fixed-point format must have at least one bit".into(),
            ));
        }
        Ok(FixedFormat {
            int_bits,
            frac_bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.int_bits + self.frac_bits
    }

    /// Number of representable values, `2^(n+m)`.
    pub fn size(&self) -> u64 {
        1u64 << self.width()
    }

    pub fn max_value(&self) -> u64 {
        self.size() - 1
    }
}

impl fmt::Display for FixedFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.int_bits, self.frac_bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionId {
    /// `1 / 1.x`
    Reciprocal,
    /// `log2(1.x)`
    Log2,
    /// `2^(0.x)`
    Exp2,
    /// Bounds supplied by a bound-table file.
    CustomTable,
}

impl FunctionId {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionId::Reciprocal => "recip",
            FunctionId::Log2 => "log2",
            FunctionId::Exp2 => "exp2",
            FunctionId::CustomTable => "custom",
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, FunctionId::CustomTable)
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "recip" | "reciprocal" => Ok(FunctionId::Reciprocal),
            "log2" => Ok(FunctionId::Log2),
            "exp2" => Ok(FunctionId::Exp2),
            "custom" | "table" | "custom-table" => Ok(FunctionId::CustomTable),
            other => Err(Error::Config(format!("unknown function `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AccuracyMode {
    /// `|out - F| <= 1 ulp`
    OneUlp,
    /// `out` is one of the representable neighbours of `F`.
    Faithful,
    /// Bounds come verbatim from a table.
    ExplicitTable,
}

impl AccuracyMode {
    pub fn name(&self) -> &'static str {
        match self {
            AccuracyMode::OneUlp => "one-ulp",
            AccuracyMode::Faithful => "faithful",
            AccuracyMode::ExplicitTable => "table",
        }
    }
}

impl fmt::Display for AccuracyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AccuracyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one-ulp" | "ulp" | "1ulp" => Ok(AccuracyMode::OneUlp),
            "faithful" => Ok(AccuracyMode::Faithful),
            "table" | "explicit-table" => Ok(AccuracyMode::ExplicitTable),
            other => Err(Error::Config(format!("unknown accuracy mode `{other}`"))),
        }
    }
}

/// What to approximate, on which formats, and how accurately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub function: FunctionId,
    pub input: FixedFormat,
    pub output: FixedFormat,
    pub accuracy: AccuracyMode,
    /// The output carries a leading bit that is constant over the domain
    /// (`0.1y` for the reciprocal, `1.y` for exp2); emission may drop it.
    pub implicit_leading_bit: bool,
}

impl ProblemSpec {
    /// The conventional formats for a built-in function on `bits` input
    /// fraction bits:
    ///
    /// | function | input | output |
    /// |----------|-------|--------|
    /// | recip    | `1.x` (0.m) | `0.1y`, q = m+1 |
    /// | log2     | `1.x` (0.m) | `0.y`, q = m+1 |
    /// | exp2     | `0.x` (0.m) | `1.y`, p = 1, q = m |
    pub fn builtin(function: FunctionId, bits: u32, accuracy: AccuracyMode) -> Result<Self> {
        let input = FixedFormat::new(0, bits)?;
        let (output, implicit) = match function {
            FunctionId::Reciprocal => (FixedFormat::new(0, bits + 1)?, true),
            FunctionId::Log2 => (FixedFormat::new(0, bits + 1)?, false),
            FunctionId::Exp2 => (FixedFormat::new(1, bits)?, true),
            FunctionId::CustomTable => {
                return Err(Error::Config(
                    "custom functions are described by a bound table".into(),
                ))
            }
        };
        let spec = ProblemSpec {
            function,
            input,
            output,
            accuracy,
            implicit_leading_bit: implicit,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn custom(input: FixedFormat, output: FixedFormat) -> Result<Self> {
        let spec = ProblemSpec {
            function: FunctionId::CustomTable,
            input,
            output,
            accuracy: AccuracyMode::ExplicitTable,
            implicit_leading_bit: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input.width() > MAX_INPUT_BITS {
            return Err(Error::Config(format!(
                "input width {} exceeds {MAX_INPUT_BITS} bits",
                self.input.width()
            )));
        }
        if self.output.width() > MAX_OUTPUT_BITS {
            return Err(Error::Config(format!(
                "output width {} exceeds {MAX_OUTPUT_BITS} bits",
                self.output.width()
            )));
        }
        if self.function.is_builtin() {
            if self.input.int_bits != 0 {
                return Err(Error::Config(format!(
                    "built-in {} expects a pure fraction input (n = 0)",
                    self.function
                )));
            }
            if self.accuracy == AccuracyMode::ExplicitTable {
                return Err(Error::Config(
                    "explicit-table accuracy requires a custom function".into(),
                ));
            }
        }
        Ok(())
    }

    /// A short identifier such as `recip_10`, used for file and module names.
    pub fn tag(&self) -> String {
        format!("{}_{}", self.function, self.input.width())
    }
}

/// Per-input integer output bounds `l(Z) <= u(Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundTable {
    input: FixedFormat,
    output: FixedFormat,
    lower: Vec<i64>,
    upper: Vec<i64>,
}

impl BoundTable {
    pub fn new(
        input: FixedFormat,
        output: FixedFormat,
        lower: Vec<i64>,
        upper: Vec<i64>,
    ) -> Result<Self> {
        if input.width() > MAX_INPUT_BITS || output.width() > MAX_OUTPUT_BITS {
            return Err(Error::Config("format exceeds supported widths".into()));
        }
        if lower.len() as u64 != input.size() || upper.len() as u64 != input.size() {
            return Err(Error::Specification(format!(
                "bound table needs {} entries, got {}/{}",
                input.size(),
                lower.len(),
                upper.len()
            )));
        }
        let max = (1i64 << output.width()) - 1;
        for (z, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l > u {
                return Err(Error::Specification(format!("l({z}) = {l} > u({z}) = {u}")));
            }
            if l < 0 || u > max {
                return Err(Error::Specification(format!(
                    "bounds at Z={z} outside [0, {max}]"
                )));
            }
        }
        Ok(BoundTable {
            input,
            output,
            lower,
            upper,
        })
    }

    pub fn input(&self) -> FixedFormat {
        self.input
    }

    pub fn output(&self) -> FixedFormat {
        self.output
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn bounds(&self, z: u64) -> (i64, i64) {
        (self.lower[z as usize], self.upper[z as usize])
    }

    /// Number of leading output bits shared by every admissible output,
    /// with their value.
    pub fn constant_msbs(&self) -> (u32, u64) {
        let width = self.output.width();
        let lo = *self.lower.iter().min().unwrap() as u64;
        let hi = *self.upper.iter().max().unwrap() as u64;
        let mut count = 0;
        while count < width {
            let shift = width - count - 1;
            if lo >> shift != hi >> shift {
                break;
            }
            count += 1;
        }
        let value = if count == 0 { 0 } else { lo >> (width - count) };
        (count, value)
    }
}

/// Splits `z` into the top `lookup_bits` bits `r` and the remaining offset `x`.
pub fn split_input(format: FixedFormat, z: u64, lookup_bits: u32) -> Result<(u64, u64)> {
    check_lookup_bits(format, lookup_bits)?;
    if z >= format.size() {
        return Err(Error::Config(format!("input {z} outside {format}")));
    }
    let offset_bits = format.width() - lookup_bits;
    Ok((z >> offset_bits, z & ((1u64 << offset_bits) - 1)))
}

/// Concatenates `{r, x}`.
pub fn join_input(format: FixedFormat, r: u64, x: u64, lookup_bits: u32) -> u64 {
    (r << (format.width() - lookup_bits)) | x
}

pub(crate) fn check_lookup_bits(format: FixedFormat, lookup_bits: u32) -> Result<()> {
    if lookup_bits > format.width() {
        return Err(Error::Config(format!(
            "R = {lookup_bits} exceeds input width {}",
            format.width()
        )));
    }
    Ok(())
}

/// The bounds `l_R(r, .)` and `u_R(r, .)` of one region, indexed by `x`.
#[derive(Clone, Copy, Debug)]
pub struct RegionBounds<'a> {
    pub region: u64,
    pub lower: &'a [i64],
    pub upper: &'a [i64],
}

impl RegionBounds<'_> {
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }
}

/// Region `r` is the contiguous block of inputs whose top `R` bits equal `r`.
pub fn region_bounds(
    table: &BoundTable,
    lookup_bits: u32,
    region: u64,
) -> Result<RegionBounds<'_>> {
    check_lookup_bits(table.input, lookup_bits)?;
    if region >> lookup_bits != 0 {
        return Err(Error::Config(format!(
            "region {region} out of range for R = {lookup_bits}"
        )));
    }
    let len = 1usize << (table.input.width() - lookup_bits);
    let start = region as usize * len;
    Ok(RegionBounds {
        region,
        lower: &table.lower[start..start + len],
        upper: &table.upper[start..start + len],
    })
}

/// Builds the bound table of a built-in function with certified rounding.
pub fn make_bound_table(spec: &ProblemSpec) -> Result<BoundTable> {
    spec.validate()?;
    let m = spec.input.frac_bits;
    let q = spec.output.frac_bits;
    let eval: fn(u64, u32, u32) -> certified::CertifiedFloor = match spec.function {
        FunctionId::Reciprocal => certified::reciprocal,
        FunctionId::Log2 => certified::log2,
        FunctionId::Exp2 => certified::exp2,
        FunctionId::CustomTable => {
            return Err(Error::Config(
                "custom functions must supply a bound table".into(),
            ))
        }
    };
    let max = (1i64 << spec.output.width()) - 1;
    let mode = spec.accuracy;
    let pairs: Vec<(i64, i64)> = (0..spec.input.size())
        .into_par_iter()
        .map(|z| bounds_from_floor(eval(z, m, q), mode, max).map_err(|e| (z, e)))
        .collect::<std::result::Result<_, _>>()
        .map_err(|(z, msg)| Error::Specification(format!("{} at Z={z}: {msg}", spec.function)))?;
    let (lower, upper) = pairs.into_iter().unzip();
    BoundTable::new(spec.input, spec.output, lower, upper)
}

/// Applies the accuracy mode to `F * 2^q` and clamps into `[0, max]`.
///
/// Clamping may move an endpoint by at most one ulp; a value further
/// outside the representable range is a specification error.
pub(crate) fn bounds_from_floor(
    v: certified::CertifiedFloor,
    mode: AccuracyMode,
    max: i64,
) -> std::result::Result<(i64, i64), String> {
    let f = v.floor;
    let (l, u) = match (mode, v.exact) {
        // ceil(F - 1), floor(F + 1)
        (AccuracyMode::OneUlp, true) => (f - 1, f + 1),
        (AccuracyMode::OneUlp, false) => (f, f + 1),
        (AccuracyMode::Faithful, true) => (f, f),
        (AccuracyMode::Faithful, false) => (f, f + 1),
        (AccuracyMode::ExplicitTable, _) => return Err("explicit-table mode has no oracle".into()),
    };
    // F*2^q > max + 1 or F*2^q < -1
    let too_high = f > max + 1 || (f == max + 1 && !v.exact);
    if too_high || f < -1 {
        return Err(format!(
            "value {f} not representable within one ulp of [0, {max}]"
        ));
    }
    Ok((l.clamp(0, max), u.clamp(0, max)))
}
