use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use movewin::harness::sqrt_window;
use movewin::io::{write_rows, write_samples_csv, write_snapshot};
use movewin::stepper::RunOutcome;
use movewin::{
    evolve, sweep_space, sweep_time, ConvergenceTable, Coupling, ReferenceSolution, SimConfig, Silent,
};
use serde::Serialize;

use crate::ReferenceArgs;

/// Marker error for a sweep in which some points failed.
#[derive(Debug)]
pub struct PartialSweep;

impl std::error::Error for PartialSweep {}

impl std::fmt::Display for PartialSweep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("sweep is partial: at least one point failed")
    }
}

fn run_dir(config: &SimConfig, suffix: &str) -> Result<PathBuf> {
    let dir = config.out.join(format!("{}{suffix}", config.hash()));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.json"), config.to_json() + "\n")?;
    Ok(dir)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn write_outcome(out: &RunOutcome, dir: &Path) -> Result<()> {
    write_rows(&out.progress, &["step", "t", "norm", "boundary_indicator"], &dir.join("progress.csv"))?;
    write_rows(
        &out.extensions,
        &["t", "old_L", "new_L", "old_N", "new_N", "indicator"],
        &dir.join("extensions.csv"),
    )?;
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    for s in &out.snapshots {
        let stem = format!("step_{:07}", s.step);
        write_snapshot(&s.field, &snaps.join(format!("{stem}.txt")))?;
        write_samples_csv(&s.field, &snaps.join(format!("{stem}.csv")))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RunSummary {
    config_hash: String,
    steps: usize,
    final_time: f64,
    final_half_width: f64,
    final_modes: usize,
    extensions: usize,
    initial_norm: f64,
    final_norm: f64,
    max_norm_drift: f64,
    /// L² distance to the exact solution at each snapshot, when one is known.
    exact_errors: Option<Vec<(f64, f64)>>,
}

fn summarize(config: &SimConfig, out: &RunOutcome) -> Result<RunSummary> {
    let n0 = out.progress[0].norm;
    let exact_errors = match ReferenceSolution::analytic_for(config) {
        Some(r) => Some(
            out.snapshots
                .iter()
                .map(|s| Ok((s.t, r.error(&s.field, s.t)?)))
                .collect::<movewin::Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(RunSummary {
        config_hash: config.hash(),
        steps: out.state.steps(),
        final_time: out.state.time(),
        final_half_width: out.state.grid().half_width(),
        final_modes: out.state.grid().modes(),
        extensions: out.extensions.len(),
        initial_norm: n0,
        final_norm: out.state.field().l2_norm(),
        max_norm_drift: out.progress.iter().map(|p| (p.norm - n0).abs() / n0).fold(0.0, f64::max),
        exact_errors,
    })
}

pub fn run(config: &SimConfig) -> Result<PathBuf> {
    let dir = run_dir(config, "")?;
    log::info!("run {} -> {}", config.hash(), dir.display());
    let out = evolve(config, &mut Silent)?;
    write_outcome(&out, &dir)?;
    write_json(&summarize(config, &out)?, &dir.join("summary.json"))?;
    Ok(dir)
}

fn reference(config: &SimConfig, args: &ReferenceArgs, default: (f64, usize, f64)) -> Result<ReferenceSolution> {
    if !args.any() {
        if let Some(r) = ReferenceSolution::analytic_for(config) {
            log::info!("using the exact solution as reference");
            return Ok(r);
        }
    }
    let modes = args.ref_modes.unwrap_or(default.1);
    let half_width = args.ref_half_width.unwrap_or(default.0.max(sqrt_window(modes)));
    let tau = args.ref_tau.unwrap_or(default.2);
    log::info!("computing reference with L = {half_width}, N = {modes}, tau = {tau}");
    Ok(ReferenceSolution::compute(config, half_width, modes, tau)?)
}

fn finish_sweep(
    config: &SimConfig,
    table: &ConvergenceTable,
    reference: &ReferenceSolution,
    dir: &Path,
) -> Result<()> {
    table.write_csv(&dir.join("convergence.csv"))?;
    if table.partial {
        bail!(PartialSweep);
    }
    let summary = table.summary(&config.hash(), reference.provenance())?;
    summary.write_json(&dir.join("summary.json"))?;
    log::info!("fitted slope {:.4}", summary.slope);
    Ok(())
}

pub fn conv_space(config: &SimConfig, ns: &[usize], args: &ReferenceArgs) -> Result<PathBuf> {
    let max_n = ns.iter().copied().max().context("no degrees given")?;
    let reference = reference(config, args, (sqrt_window(max_n), 4 * max_n, config.tau))?;
    let table = sweep_space(config, ns, &reference)?;
    let dir = run_dir(config, "-space")?;
    finish_sweep(config, &table, &reference, &dir)?;
    Ok(dir)
}

pub fn conv_time(config: &SimConfig, taus: &[f64], coupling: Coupling, args: &ReferenceArgs) -> Result<PathBuf> {
    let tau_min = taus.iter().copied().fold(f64::INFINITY, f64::min);
    if !(tau_min.is_finite() && tau_min > 0.0) {
        return Err(movewin::Error::InvalidParameter {
            name: "taus",
            reason: "step sizes must be positive".into(),
        }
        .into());
    }
    let default = match coupling {
        Coupling::FixedN => (config.half_width, config.modes, tau_min / 4.0),
        Coupling::InverseTau => {
            let n = 4 * (1.0 / tau_min).round() as usize;
            (sqrt_window(n), n, tau_min / 4.0)
        }
    };
    let reference = reference(config, args, default)?;
    let table = sweep_time(config, taus, coupling, &reference)?;
    let suffix = match coupling {
        Coupling::FixedN => "-time",
        Coupling::InverseTau => "-time-coupled",
    };
    let dir = run_dir(config, suffix)?;
    finish_sweep(config, &table, &reference, &dir)?;
    Ok(dir)
}

#[derive(Serialize)]
struct DemoSummary {
    config_hash: String,
    small_half_width: f64,
    small_modes: usize,
    large_half_width: f64,
    large_modes: usize,
    extension_times: Vec<f64>,
    distance: f64,
    relative_distance: f64,
}

pub fn extend_demo(config: &SimConfig, large_half_width: Option<f64>, large_modes: Option<usize>) -> Result<PathBuf> {
    let lw = large_half_width.unwrap_or(2.0 * config.half_width);
    let lm = large_modes.unwrap_or((config.modes as f64 * lw / config.half_width).round() as usize);
    let large_cfg = SimConfig {
        half_width: lw,
        modes: lm,
        extend: false,
        ..config.clone()
    };
    large_cfg.validate()?;
    let dir = run_dir(config, "-demo")?;
    let small = evolve(config, &mut Silent)?;
    let large = evolve(&large_cfg, &mut Silent)?;
    for (name, out) in [("small", &small), ("large", &large)] {
        let sub = dir.join(name);
        fs::create_dir_all(&sub)?;
        write_outcome(out, &sub)?;
    }
    let distance = small.state.field().l2_distance(large.state.field())?;
    let summary = DemoSummary {
        config_hash: config.hash(),
        small_half_width: config.half_width,
        small_modes: config.modes,
        large_half_width: lw,
        large_modes: lm,
        extension_times: small.extensions.iter().map(|e| e.t).collect(),
        distance,
        relative_distance: distance / large.state.field().l2_norm(),
    };
    log::info!("relative L2 distance {:.3e}", summary.relative_distance);
    write_json(&summary, &dir.join("summary.json"))?;
    Ok(dir)
}
