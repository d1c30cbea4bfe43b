//! Shared inputs for the benchmarks.

use polyspace_core::bounds::region_bounds;
use polyspace_core::designspace::{chord_tables, ChordTables};
use polyspace_core::{make_bound_table, AccuracyMode, BoundTable, FunctionId, ProblemSpec};

pub fn builtin_table(function: FunctionId, bits: u32) -> BoundTable {
    let spec = ProblemSpec::builtin(function, bits, AccuracyMode::OneUlp).expect("built-in spec");
    make_bound_table(&spec).expect("bound table")
}

/// Chord tables of one region, as fed to the extremal search.
pub fn region_tables(table: &BoundTable, lookup_bits: u32, region: u64) -> ChordTables {
    chord_tables(&region_bounds(table, lookup_bits, region).expect("region in range"))
}
