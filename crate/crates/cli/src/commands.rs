use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use polyspace_core::bounds::write_bound_table;
use polyspace_core::designspace::{check_feasibility, write_catalog};
use polyspace_core::emit::{emit_hdl, parse_design_file, write_design_file};
use polyspace_core::verify::{check_hdl, HdlMismatch};
use polyspace_core::{
    build_design, build_space, check_design, loglog_slope, time_generation, BuildOptions,
    CheckMode, SearchStrategy,
};

use crate::config::Settings;

/// Exit status of a command that ran to completion.
pub enum Outcome {
    Ok,
    /// The command ran but its check failed.
    Failed,
}

fn write_file(dir: &Path, name: &str, text: &str, out: &mut dyn Write) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(path)
}

pub fn bounds(s: &Settings, file: Option<&Path>, out: &mut dyn Write) -> Result<Outcome> {
    let table = s.table()?;
    let text = write_bound_table(&table);
    match file {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(Outcome::Ok)
}

pub fn feasible(s: &Settings, out: &mut dyn Write) -> Result<Outcome> {
    let table = s.table()?;
    let width = table.input().width();
    writeln!(out, "spec {}", s.describe())?;
    let range: Vec<u32> = match s.lookup_bits {
        Some(r) => vec![r],
        None => (0..=s.r_max.unwrap_or(width)).collect(),
    };
    let mut first = None;
    for r in range {
        let rep = check_feasibility(&table, r, s.generate.strategy, true)?;
        writeln!(
            out,
            "R={r} {} infeasible_regions={}/{}",
            if rep.feasible() {
                "feasible"
            } else {
                "infeasible"
            },
            rep.infeasible.len(),
            rep.regions
        )?;
        if rep.feasible() && first.is_none() {
            first = Some(r);
            if s.lookup_bits.is_none() {
                break;
            }
        }
    }
    match first {
        Some(r) => {
            writeln!(out, "min_feasible_R={r}")?;
            Ok(Outcome::Ok)
        }
        None => {
            writeln!(out, "min_feasible_R=none")?;
            Ok(Outcome::Failed)
        }
    }
}

pub fn generate(s: &Settings, out: &mut dyn Write) -> Result<Outcome> {
    let r = s.require_lookup_bits()?;
    let table = s.table()?;
    let cat = build_space(&table, r, &s.generate)?;
    writeln!(out, "spec {}", s.describe())?;
    writeln!(
        out,
        "R={r} k={} {} ab_pairs={}{}",
        cat.k(),
        if cat.linear_sufficient() {
            "linear"
        } else {
            "quadratic"
        },
        cat.ab_pairs(),
        if cat.truncated() { " truncated" } else { "" }
    )?;
    write_file(
        &s.out_dir,
        &format!("{}_R{r}.catalog", s.tag()),
        &write_catalog(&cat),
        out,
    )?;
    Ok(Outcome::Ok)
}

pub fn build(s: &Settings, out: &mut dyn Write) -> Result<Outcome> {
    let r = s.require_lookup_bits()?;
    let table = s.table()?;
    let opts = BuildOptions {
        generate: s.generate.clone(),
        explore: s.explore.clone(),
        check: CheckMode::Exhaustive,
    };
    let b = build_design(&table, r, &opts)?;
    let hw = &b.hardware;
    writeln!(out, "spec {}", s.describe())?;
    writeln!(
        out,
        "R={r} k={} {} i={} j={} order={}",
        hw.k,
        if b.catalog.linear_sufficient() {
            "linear"
        } else {
            "quadratic"
        },
        hw.truncation.square,
        hw.truncation.linear,
        s.explore.order
    )?;
    let [pa, pb, pc] = hw.plans.as_array();
    writeln!(
        out,
        "a {} shift={} | b {} shift={} | c {} shift={}",
        pa.class, pa.shift, pb.class, pb.shift, pc.class, pc.shift
    )?;
    if hw.plans.mixed_fallback() {
        writeln!(out, "note: mixed-sign coefficient storage")?;
    }
    if b.design.catalog_truncated {
        writeln!(out, "note: catalog enumeration was capped")?;
    }
    writeln!(out, "{}", hw.width_report())?;
    let first = b.report.to_text();
    writeln!(out, "check {}", first.lines().next().unwrap_or_default())?;
    let hdl_ok = check_hdl(hw);
    if let Err(e) = &hdl_ok {
        writeln!(out, "hdl mismatch: {e:?}")?;
    }
    let tag = format!("{}_R{r}", s.tag());
    write_file(
        &s.out_dir,
        &format!("{tag}.design"),
        &write_design_file(hw),
        out,
    )?;
    write_file(&s.out_dir, &format!("{tag}.v"), &emit_hdl(hw, &tag), out)?;
    if b.report.passed() && hdl_ok.is_ok() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed)
    }
}

pub fn verify(
    s: &Settings,
    design: &Path,
    samples: Option<u64>,
    seed: u64,
    hdl: bool,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let text =
        fs::read_to_string(design).with_context(|| format!("reading {}", design.display()))?;
    let hw = parse_design_file(&text)?;
    let table = s.table()?;
    let mode = match samples {
        None => CheckMode::Exhaustive,
        Some(count) => CheckMode::Sampled { count, seed },
    };
    let report = check_design(&hw, &table, mode)?;
    out.write_all(report.to_text().as_bytes())?;
    let mut ok = report.passed();
    if hdl {
        match check_hdl(&hw) {
            Ok(()) => writeln!(out, "hdl=match")?,
            Err(HdlMismatch::Overflow(e)) => {
                writeln!(out, "hdl=overflow {e}")?;
                ok = false;
            }
            Err(HdlMismatch::Value { z, hdl, reference }) => {
                writeln!(out, "hdl=mismatch z={z} hdl={hdl} reference={reference}")?;
                ok = false;
            }
        }
    }
    Ok(if ok { Outcome::Ok } else { Outcome::Failed })
}

fn parse_sweep(text: &str) -> Result<Vec<u32>> {
    let (lo, hi) = text
        .split_once("..")
        .context("sweep must look like 6..10")?;
    let (lo, hi): (u32, u32) = (lo.trim().parse()?, hi.trim().parse()?);
    if lo > hi {
        bail!("empty sweep {text}");
    }
    Ok((lo..=hi).collect())
}

pub fn bench(s: &Settings, sweep: Option<&str>, reps: u32, out: &mut dyn Write) -> Result<Outcome> {
    let table = s.table()?;
    let rs = match sweep {
        Some(text) => parse_sweep(text)?,
        None => vec![s.require_lookup_bits()?],
    };
    let reps = reps.max(1);
    let time = |r: u32, strategy: SearchStrategy| -> Result<f64> {
        let opts = polyspace_core::GenerateOptions {
            strategy,
            ..s.generate.clone()
        };
        let mut best = f64::INFINITY;
        for _ in 0..reps {
            best = best.min(time_generation(&table, r, &opts)?.as_secs_f64());
        }
        Ok(best)
    };
    writeln!(out, "spec {}", s.describe())?;
    writeln!(out, "threads={}", rayon::current_num_threads())?;
    writeln!(out, "R skip_s naive_s speedup")?;
    let mut points = Vec::new();
    for r in rs {
        let skip = time(r, SearchStrategy::SkipRule)?;
        let naive = time(r, SearchStrategy::Naive)?;
        writeln!(out, "{r} {skip:.4} {naive:.4} {:.2}", naive / skip)?;
        points.push((r as f64, skip));
    }
    if points.len() >= 2 {
        writeln!(out, "loglog_slope={:.2}", loglog_slope(&points))?;
    }
    Ok(Outcome::Ok)
}
