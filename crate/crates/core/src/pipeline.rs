//! The end-to-end flow from a bound table to a checked hardware design.

use crate::bounds::BoundTable;
use crate::designspace::{build_space, CoefficientCatalog, GenerateOptions};
use crate::emit::{pack_lut, HardwareDesign};
use crate::error::Result;
use crate::explore::{explore, ExploreOptions, SelectedDesign};
use crate::verify::{check_design, CheckMode, CheckReport};

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub generate: GenerateOptions,
    pub explore: ExploreOptions,
    pub check: CheckMode,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            generate: GenerateOptions::default(),
            explore: ExploreOptions::default(),
            check: CheckMode::Exhaustive,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Build {
    pub catalog: CoefficientCatalog,
    pub design: SelectedDesign,
    pub hardware: HardwareDesign,
    pub report: CheckReport,
}

/// Generates the space at the minimal shift, picks a design, packs it and
/// checks it against the table.
pub fn build_design(table: &BoundTable, lookup_bits: u32, opts: &BuildOptions) -> Result<Build> {
    let catalog = build_space(table, lookup_bits, &opts.generate)?;
    let design = explore(&catalog, &opts.explore)?;
    let hardware = pack_lut(&design)?;
    let report = check_design(&hardware, table, opts.check)?;
    Ok(Build {
        catalog,
        design,
        hardware,
        report,
    })
}

/// Wall time of one full generation (analysis, shift search, catalog).
pub fn time_generation(
    table: &BoundTable,
    lookup_bits: u32,
    opts: &GenerateOptions,
) -> Result<std::time::Duration> {
    let start = std::time::Instant::now();
    build_space(table, lookup_bits, opts)?;
    Ok(start.elapsed())
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6)
            .map(|r| (r as f64, 7.0 * (r as f64).powi(-3)))
            .collect();
        assert!((loglog_slope(&pts) + 3.0).abs() < 1e-9);
    }
}
