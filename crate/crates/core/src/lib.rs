//! Complete design-space generation for piecewise quadratic fixed-point
//! interpolators.
//!
//! The input `Z` is split into lookup bits `r` and offset bits `x`; every
//! region `r` evaluates `floor((a x^2 + b x + c) / 2^k)` with coefficients
//! read from a table. Given integer output bounds per input, this crate
//! enumerates every admissible coefficient triple exactly, picks one design
//! through a configurable decision procedure, emits HDL for it and checks
//! it bit-exactly.

pub mod bounds;
pub mod designspace;
pub mod emit;
pub mod error;
pub mod explore;
pub mod pipeline;
pub mod rational;
pub mod verify;

pub use bounds::{
    make_bound_table, split_input, AccuracyMode, BoundTable, FixedFormat, FunctionId, ProblemSpec,
};
pub use designspace::{
    build_space, generate_space, min_feasible_r, min_global_k, CoefficientCatalog, GenerateOptions,
    SearchStrategy,
};
pub use emit::{emit_hdl, pack_lut, parse_design_file, write_design_file, HardwareDesign};
pub use error::{Error, Result};
pub use explore::{
    explore, DecisionOrder, ExploreOptions, SelectedDesign, TruncationChoice, WidthPlan, WidthPlans,
};
pub use pipeline::{build_design, loglog_slope, time_generation, Build, BuildOptions};
pub use rational::Rational;
pub use verify::{check_design, evaluate, CheckMode, CheckReport};
