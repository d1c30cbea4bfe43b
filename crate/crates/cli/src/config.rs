use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use polyspace_core::bounds::parse_bound_table;
use polyspace_core::{
    make_bound_table, AccuracyMode, BoundTable, DecisionOrder, ExploreOptions, FixedFormat,
    FunctionId, GenerateOptions, ProblemSpec, SearchStrategy,
};

/// Settings shared by every command. Each one can also be given in the
/// TOML file passed to `--config`, under the same name with underscores;
/// flags win over the file.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// recip, log2 or exp2.
    #[arg(long, short = 'f', global = true)]
    pub function: Option<String>,
    /// Input fraction bits of a built-in function.
    #[arg(long, short = 'b', global = true)]
    pub bits: Option<u32>,
    /// Output integer bits, overriding the built-in convention.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Output fraction bits, overriding the built-in convention.
    #[arg(long, global = true)]
    pub q: Option<u32>,
    /// one-ulp or faithful.
    #[arg(long, global = true)]
    pub accuracy: Option<String>,
    /// Bound-table file for a custom function.
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
    /// Lookup bits R.
    #[arg(long = "lookup-bits", short = 'R', global = true)]
    pub lookup_bits: Option<u32>,
    /// Largest R tried by `feasible`.
    #[arg(long, global = true)]
    pub r_max: Option<u32>,
    /// Largest shift k tried.
    #[arg(long, global = true)]
    pub k_max: Option<u32>,
    /// Clamp window exponent for unconstrained coefficients.
    #[arg(long, global = true)]
    pub window_bits: Option<u32>,
    /// Most a values stored per region.
    #[arg(long, global = true)]
    pub a_cap: Option<u128>,
    /// Most b values explored per (region, a).
    #[arg(long, global = true)]
    pub b_cap: Option<u128>,
    /// square-first, linear-first or no-truncation.
    #[arg(long, global = true)]
    pub order: Option<String>,
    /// skip or naive chord search.
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, short = 'j', global = true)]
    pub threads: Option<usize>,
    /// Directory for generated files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    function: Option<String>,
    bits: Option<u32>,
    p: Option<u32>,
    q: Option<u32>,
    accuracy: Option<String>,
    table: Option<PathBuf>,
    lookup_bits: Option<u32>,
    r_max: Option<u32>,
    k_max: Option<u32>,
    window_bits: Option<u32>,
    a_cap: Option<u128>,
    b_cap: Option<u128>,
    order: Option<String>,
    strategy: Option<String>,
    threads: Option<usize>,
    out_dir: Option<PathBuf>,
}

/// Where the bounds come from.
#[derive(Debug, Clone)]
pub enum Source {
    Builtin(ProblemSpec),
    Table(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub source: Source,
    pub lookup_bits: Option<u32>,
    pub r_max: Option<u32>,
    pub generate: GenerateOptions,
    pub explore: ExploreOptions,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

fn parse_strategy(s: &str) -> Result<SearchStrategy> {
    match s {
        "skip" => Ok(SearchStrategy::SkipRule),
        "naive" => Ok(SearchStrategy::Naive),
        other => bail!("unknown strategy `{other}` (skip or naive)"),
    }
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> Result<Settings> {
        let file = match &args.config {
            None => FileConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let mut cfg: FileConfig =
                    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                // relative paths in the file are relative to the file
                let base = path.parent().unwrap_or(Path::new(""));
                cfg.table = cfg.table.map(|t| base.join(t));
                cfg.out_dir = cfg.out_dir.map(|d| base.join(d));
                cfg
            }
        };
        macro_rules! pick {
            ($f:ident) => {
                args.$f.clone().or(file.$f)
            };
        }
        let table = pick!(table);
        let function = pick!(function);
        let source = match (table, function) {
            (Some(_), Some(f)) if f != "custom" => {
                bail!("give either a built-in function or a bound table, not both")
            }
            (Some(t), _) => Source::Table(t),
            (None, Some(f)) => {
                let function: FunctionId = f.parse()?;
                let bits = pick!(bits).context("built-in functions need --bits")?;
                let accuracy: AccuracyMode =
                    pick!(accuracy).as_deref().unwrap_or("one-ulp").parse()?;
                let mut spec = ProblemSpec::builtin(function, bits, accuracy)?;
                let (p, q) = (pick!(p), pick!(q));
                if p.is_some() || q.is_some() {
                    spec.output = FixedFormat::new(
                        p.unwrap_or(spec.output.int_bits),
                        q.unwrap_or(spec.output.frac_bits),
                    )?;
                    spec.validate()?;
                }
                Source::Builtin(spec)
            }
            (None, None) => bail!("no function given: use --function or --table"),
        };
        let mut generate = GenerateOptions::default();
        if let Some(s) = pick!(strategy) {
            generate.strategy = parse_strategy(&s)?;
        }
        generate.k_max = pick!(k_max);
        generate.window_bits = pick!(window_bits);
        if let Some(cap) = pick!(a_cap) {
            generate.a_cap = cap;
        }
        let mut explore = ExploreOptions::default();
        if let Some(cap) = pick!(b_cap) {
            explore.b_cap = cap;
        }
        if let Some(o) = pick!(order) {
            explore.order = o.parse::<DecisionOrder>()?;
        }
        if generate.a_cap == 0 || explore.b_cap == 0 {
            bail!("enumeration caps must be positive");
        }
        Ok(Settings {
            source,
            lookup_bits: pick!(lookup_bits),
            r_max: pick!(r_max),
            generate,
            explore,
            threads: pick!(threads),
            out_dir: pick!(out_dir).unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    pub fn table(&self) -> Result<BoundTable> {
        match &self.source {
            Source::Builtin(spec) => Ok(make_bound_table(spec)?),
            Source::Table(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_bound_table(&text)?)
            }
        }
    }

    /// Short name for files and HDL modules, such as `recip_10`.
    pub fn tag(&self) -> String {
        match &self.source {
            Source::Builtin(spec) => spec.tag(),
            Source::Table(path) => {
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("custom");
                stem.chars()
                    .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
                    .collect()
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.source {
            Source::Builtin(s) => {
                format!("{} {} -> {} {}", s.function, s.input, s.output, s.accuracy)
            }
            Source::Table(p) => format!("table {}", p.display()),
        }
    }

    pub fn require_lookup_bits(&self) -> Result<u32> {
        self.lookup_bits
            .context("this command needs --lookup-bits (-R)")
    }
}
