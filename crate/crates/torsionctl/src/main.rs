//! torsionctl: reproducible desk-scale runs of the cone torsion
//! computations. Every subcommand prints a PASS/FAIL check table (or a JSON
//! report with --json) and exits 0 on pass, 1 on usage errors, 2 on failed
//! checks, 3 on numerical failures.

mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use torsion_core::cohomology::harmonic_dim_check;
use torsion_core::cone::ConeIndices;
use torsion_core::error::Error as CoreError;
use torsion_core::green::{
    absolute_boundary_residual, coexact_green_eval, cone_distance, green_bound_check,
    jump_condition_residual, ode_residual, relative_boundary_residual, ConePoint, KernelFlavor,
};
use torsion_core::heat::{duhamel_compare, SolverConfig};
use torsion_core::spectrum::{
    circle_quotient_spectrum, load_spectrum, sphere_coexact_spectrum, validate_spectrum,
    write_spectrum, LinkSpectrum,
};
use torsion_core::spindle::{degree_one_control_trace, spindle_torsion_compare};
use torsion_core::util::sample_heat_pairs;
use torsion_core::zeta::fit::geometric_grid;
use torsion_core::zeta::{
    circle_torsion_closed_form, circle_torsion_mellin, residue_check, weighted_residue_check,
};

use config::{parse_f64_list, RunConfig};
use report::{Check, Report, EXIT_CHECK_FAILED, EXIT_NUMERICAL, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "torsionctl", version, about = "cone torsion computations, reproducibly")]
struct Cli {
    /// emit the full report as JSON
    #[arg(long, global = true)]
    json: bool,

    /// suppress informational output (check lines still print)
    #[arg(long, global = true)]
    quiet: bool,

    /// flat key-value config file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// build, validate and write link spectra
    Spectrum(SpectrumArgs),
    /// Green kernel evaluations and identity checks
    Green(GreenArgs),
    /// heat kernel comparison grids
    Heat(HeatArgs),
    /// torsion values, residue diagnostics, route comparison
    Torsion(TorsionArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// circle quotient order (S^1/Z_k)
    #[arg(long)]
    k: Option<u64>,
    /// eigenvalue cutoff
    #[arg(long)]
    cutoff: Option<f64>,
    /// round-sphere dimension (coexact spectrum mode)
    #[arg(long)]
    sphere_m: Option<usize>,
    /// form degree for the sphere spectrum
    #[arg(long)]
    degree: Option<usize>,
    /// write the spectrum to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// load a spectrum file instead of building one
    #[arg(long)]
    load: Option<PathBuf>,
    /// run the invariant validator
    #[arg(long)]
    validate: bool,
}

#[derive(Args)]
struct GreenArgs {
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    degree: Option<usize>,
    /// model | absolute | relative
    #[arg(long)]
    flavor: Option<String>,
    /// all | boundary | jump | ode
    #[arg(long)]
    checks: Option<String>,
    /// shorthand for --checks boundary
    #[arg(long)]
    boundary_check: bool,
    /// fit-and-validate the logarithmic kernel bound
    #[arg(long)]
    bound_check: bool,
    /// sample pairs for the bound check
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// write kernel samples as CSV (flavor, r1, theta1, r2, theta2, value, tail)
    #[arg(long)]
    emit_csv: Option<PathBuf>,
}

#[derive(Args)]
struct HeatArgs {
    #[arg(long)]
    k: Option<u64>,
    /// comma-separated times
    #[arg(long)]
    times: Option<String>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    /// solver cells
    #[arg(long)]
    cells: Option<usize>,
    /// solver time step
    #[arg(long)]
    dt: Option<f64>,
    /// write the HeatGrid JSON here
    #[arg(long)]
    out: Option<PathBuf>,
    /// write (t, dist, K_c, K_o) rows here
    #[arg(long)]
    emit_plot_data: Option<PathBuf>,
}

#[derive(Args)]
struct TorsionArgs {
    /// circle closed form + numeric cross-check
    #[arg(long)]
    circle: bool,
    /// circle circumference
    #[arg(long = "L", visible_alias = "length")]
    length: Option<f64>,
    /// flat spindle routes
    #[arg(long)]
    spindle: bool,
    #[arg(long)]
    k: Option<u64>,
    /// compare the conical and orbifold routes
    #[arg(long)]
    compare: bool,
    /// run the residue / log-coefficient diagnostics
    #[arg(long)]
    residue_check: bool,
    /// sqrt-eigenvalue truncation for spindle spectra
    #[arg(long)]
    truncation: Option<f64>,
    /// write the residue-fit trace samples as CSV (t, weighted, control)
    #[arg(long)]
    emit_trace_csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(0),
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    if let Ok(threads) = std::env::var("TORSIONCTL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let run_config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        },
        None => RunConfig::default(),
    };
    let outcome = match &cli.command {
        Command::Spectrum(args) => cmd_spectrum(args, &run_config),
        Command::Green(args) => cmd_green(args, &run_config),
        Command::Heat(args) => cmd_heat(args, &run_config),
        Command::Torsion(args) => cmd_torsion(args, &run_config),
    };
    match outcome {
        Ok(report) => {
            report.emit(cli.json, cli.quiet);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}

fn exit_code_for(e: &CliError) -> i32 {
    match e {
        CliError::Usage(_) => EXIT_USAGE,
        CliError::Numerical(_) => EXIT_NUMERICAL,
        CliError::Check(_) => EXIT_CHECK_FAILED,
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
    Check(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Check(m) => write!(f, "{m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(m) | CoreError::Unsupported(m) => CliError::Usage(m),
            CoreError::Parse { line, message } => {
                CliError::Check(format!("parse error at line {line}: {message}"))
            }
            CoreError::Validation(m) => CliError::Check(m),
            CoreError::Numerical(m) => CliError::Numerical(m),
            CoreError::Io(e) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<String> for CliError {
    fn from(m: String) -> Self {
        CliError::Usage(m)
    }
}

fn cmd_spectrum(args: &SpectrumArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new(
        "spectrum",
        json!({
            "k": args.k, "cutoff": args.cutoff, "sphere_m": args.sphere_m,
            "degree": args.degree, "load": args.load, "validate": args.validate,
        }),
    );
    let spectrum: LinkSpectrum = if let Some(path) = &args.load {
        load_spectrum(path)?
    } else if let Some(m) = args.sphere_m {
        let degree = cfg.resolve(args.degree, "spectrum", "degree", 0)?;
        let cutoff = cfg.resolve(args.cutoff, "spectrum", "cutoff", 100.0)?;
        sphere_coexact_spectrum(m, degree, cutoff)?
    } else {
        let k = cfg.resolve(args.k, "spectrum", "k", 1)?;
        let cutoff = cfg.resolve(args.cutoff, "spectrum", "cutoff", 100.0)?;
        circle_quotient_spectrum(k, cutoff)?
    };
    let violations = validate_spectrum(&spectrum);
    if args.validate || args.load.is_some() {
        report.push(Check::flag(
            format!("spectrum invariants ({} violations)", violations.len()),
            violations.is_empty(),
        ));
    }
    if let Some(path) = &args.out {
        write_spectrum(&spectrum, path)?;
    }
    let per_degree: Vec<usize> = (0..=spectrum.m)
        .map(|d| spectrum.degree(d).count())
        .collect();
    report.payload = json!({
        "m": spectrum.m,
        "k": spectrum.group_order,
        "cutoff": spectrum.cutoff,
        "families": spectrum.modes.len(),
        "families_per_degree": per_degree,
        "violations": violations,
    });
    if report.checks.is_empty() {
        report.push(Check::flag("spectrum built", true));
    }
    Ok(report)
}

fn builtin_check_indices(k: u64) -> Vec<ConeIndices> {
    let mut out: Vec<ConeIndices> = torsion_core::green::builtin_indices();
    for n in 0..4u64 {
        let mu = ((k * n) * (k * n)) as f64;
        out.push(ConeIndices::new(1, 0, mu).unwrap());
    }
    out
}

fn cmd_green(args: &GreenArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.resolve(args.k, "green", "k", 1)?;
    if k == 0 {
        return Err(CliError::Usage("k must be >= 1".into()));
    }
    let degree = cfg.resolve(args.degree, "green", "degree", 0)?;
    let flavor: KernelFlavor = args
        .flavor
        .as_deref()
        .or_else(|| cfg.get("green", "flavor"))
        .unwrap_or("absolute")
        .parse()
        .map_err(|e: CoreError| CliError::Usage(e.to_string()))?;
    let checks = if args.boundary_check {
        "boundary".to_string()
    } else {
        args.checks
            .clone()
            .or_else(|| cfg.get("green", "checks").map(String::from))
            .unwrap_or_else(|| "all".to_string())
    };
    if !matches!(checks.as_str(), "all" | "boundary" | "jump" | "ode") {
        return Err(CliError::Usage(format!(
            "unknown checks selection `{checks}` (expected all | boundary | jump | ode)"
        )));
    }
    let mut report = Report::new(
        "green",
        json!({"k": k, "degree": degree, "flavor": flavor.to_string(), "checks": checks}),
    );
    let indices = builtin_check_indices(k);
    let grid: Vec<f64> = (1..=100).map(|j| j as f64 / 100.0).collect();
    if checks == "all" || checks == "boundary" {
        let mut worst_abs = 0.0f64;
        let mut worst_rel = 0.0f64;
        for idx in &indices {
            for &r in grid.iter().take(99) {
                if idx.mu > 0.0 {
                    worst_abs = worst_abs.max(absolute_boundary_residual(idx, r)?);
                }
                if idx.nu > 0.0 {
                    worst_rel = worst_rel.max(relative_boundary_residual(idx, r)?);
                }
            }
        }
        report.push(Check::below("absolute boundary residual", worst_abs, 1e-10));
        report.push(Check::below("relative boundary residual", worst_rel, 1e-10));
    }
    if checks == "all" || checks == "jump" {
        let mut worst = 0.0f64;
        for idx in &indices {
            for &r in grid.iter().take(99) {
                if flavor == KernelFlavor::Absolute && idx.a_plus == 0.0 && idx.m == 1 {
                    continue;
                }
                worst = worst.max(jump_condition_residual(idx, flavor, r)?);
            }
        }
        report.push(Check::below("derivative jump residual", worst, 1e-10));
    }
    if checks == "all" || checks == "ode" {
        let mut worst = 0.0f64;
        for idx in &indices {
            for &(r1, r2) in &[(0.3, 0.8), (0.9, 0.25), (0.5, 0.55)] {
                if flavor == KernelFlavor::Absolute && idx.a_plus == 0.0 && idx.m == 1 {
                    continue;
                }
                worst = worst.max(ode_residual(idx, flavor, r1, r2)?);
            }
        }
        report.push(Check::below("per-mode ODE residual", worst, 1e-8));
    }
    let pairs_n = cfg.resolve(args.pairs, "green", "pairs", 200)?;
    let seed = cfg.resolve(args.seed, "green", "seed", 7)?;
    if args.bound_check {
        let spectrum = circle_quotient_spectrum(k, 4e6)?;
        let pairs = torsion_core::util::sample_green_pairs(k, pairs_n, seed, 1e-3, 1.0);
        let bound = green_bound_check(&spectrum, degree.min(1), flavor, &pairs)?;
        report.push(Check::flag(
            format!(
                "kernel bound C={:.4} (validation max {:.4})",
                bound.fitted_c, bound.max_validation_ratio
            ),
            bound.violations == 0,
        ));
        report.payload = serde_json::to_value(&bound).unwrap();
    }
    if let Some(path) = &args.emit_csv {
        let spectrum = circle_quotient_spectrum(k, 4e6)?;
        let pairs = torsion_core::util::sample_green_pairs(k, pairs_n, seed, 1e-3, 1.0);
        let mut f = std::fs::File::create(path).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(f, "flavor,r1,theta1,r2,theta2,value,tail_bound")
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for (a, b) in pairs {
            let g = coexact_green_eval(&spectrum, degree.min(1), flavor, a, b, None)?;
            writeln!(
                f,
                "{},{},{},{},{},{},{}",
                flavor, a.r, a.theta, b.r, b.theta, g.value, g.tail_bound
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
        }
    }
    Ok(report)
}

fn cmd_heat(args: &HeatArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.resolve(args.k, "heat", "k", 2)?;
    if k == 0 {
        return Err(CliError::Usage("k must be >= 1".into()));
    }
    let times = match args.times.as_deref().or_else(|| cfg.get("heat", "times")) {
        Some(raw) => parse_f64_list(raw)?,
        None => vec![0.05, 0.2, 1.0],
    };
    let pairs_n = cfg.resolve(args.pairs, "heat", "pairs", 20)?;
    let seed = cfg.resolve(args.seed, "heat", "seed", 7)?;
    let r_min = cfg.resolve(args.r_min, "heat", "r_min", 0.3)?;
    let r_max = cfg.resolve(args.r_max, "heat", "r_max", 1.0)?;
    let cells = cfg.resolve(args.cells, "heat", "cells", SolverConfig::default().cells)?;
    let dt = cfg.resolve(args.dt, "heat", "dt", SolverConfig::default().dt)?;
    let mut report = Report::new(
        "heat",
        json!({"k": k, "times": times, "pairs": pairs_n, "seed": seed,
               "r_min": r_min, "r_max": r_max, "cells": cells, "dt": dt}),
    );
    let solver = SolverConfig::default().with_resolution(cells, dt);
    let pairs = sample_heat_pairs(k, pairs_n, seed, r_min, r_max);
    let grid = duhamel_compare(k, &times, &pairs, solver)?;
    report.push(Check::below(
        "sup relative kernel discrepancy",
        grid.sup_rel_discrepancy,
        1e-4,
    ));
    if let Some(path) = &args.out {
        let f = std::fs::File::create(path).map_err(|e| CliError::Usage(e.to_string()))?;
        serde_json::to_writer_pretty(f, &grid).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Some(path) = &args.emit_plot_data {
        let mut f = std::fs::File::create(path).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(f, "t,dist,k_c,k_o").map_err(|e| CliError::Usage(e.to_string()))?;
        for (ti, &t) in grid.times.iter().enumerate() {
            for (pi, &((r1, th1), (r2, th2))) in grid.pairs.iter().enumerate() {
                let d = cone_distance(k, ConePoint::new(r1, th1), ConePoint::new(r2, th2));
                writeln!(
                    f,
                    "{},{},{},{}",
                    t, d, grid.values_c[ti][pi], grid.values_o[ti][pi]
                )
                .map_err(|e| CliError::Usage(e.to_string()))?;
            }
        }
    }
    report.payload = serde_json::to_value(&grid).unwrap();
    Ok(report)
}

fn cmd_torsion(args: &TorsionArgs, cfg: &RunConfig) -> Result<Report, CliError> {
    if args.circle {
        let length = cfg.resolve(args.length, "torsion", "L", 2.0 * std::f64::consts::PI)?;
        if length <= 0.0 {
            return Err(CliError::Usage("circumference must be positive".into()));
        }
        let mut report = Report::new("torsion", json!({"mode": "circle", "L": length}));
        let closed = circle_torsion_closed_form(length)?;
        let numeric = circle_torsion_mellin(length)?;
        let expected = -length.ln();
        report.push(Check::below(
            "closed form |log T + log L|",
            (closed.log_torsion - expected).abs(),
            1e-9,
        ));
        report.push(Check::below(
            "numeric Mellin |log T + log L|",
            (numeric.log_torsion - expected).abs(),
            1e-6,
        ));
        report.push(Check::below(
            "path discrepancy",
            (closed.log_torsion - numeric.log_torsion).abs(),
            1e-6,
        ));
        report.payload = json!({
            "convention": closed.convention,
            "log_torsion_closed": closed.log_torsion,
            "log_torsion_numeric": numeric.log_torsion,
            "torsion": closed.torsion,
        });
        return Ok(report);
    }
    if !args.spindle {
        return Err(CliError::Usage(
            "choose a geometry: --circle or --spindle".into(),
        ));
    }
    let k = cfg.resolve(args.k, "torsion", "k", 2)?;
    if k == 0 {
        return Err(CliError::Usage("k must be >= 1".into()));
    }
    let truncation = cfg.resolve(args.truncation, "torsion", "truncation", 60.0)?;
    let mut report = Report::new(
        "torsion",
        json!({"mode": "spindle", "k": k, "compare": args.compare,
               "residue_check": args.residue_check, "truncation": truncation}),
    );
    if args.residue_check {
        // weighted combination from the conical route
        let spec = torsion_core::spindle::conical_route(k, truncation)?;
        let series: Vec<torsion_core::zeta::ZetaSeries> = spec
            .per_degree
            .iter()
            .map(|m| {
                torsion_core::zeta::ZetaSeries::new(
                    m.clone(),
                    torsion_core::zeta::Continuation::DirectOnly,
                )
            })
            .collect::<Result<_, _>>()?;
        let t_lo = 28.0 / (truncation * truncation);
        let weighted = weighted_residue_check(&series, (t_lo, 0.03), -1.0, 1e-3)?;
        report.push(Check::below(
            "weighted log-t coefficient",
            weighted.log_coefficient.abs(),
            1e-3,
        ));
        // the log-bearing single-degree control must trip the fitter
        let grid = geometric_grid(1.5e-3, 0.08, 40);
        let control_samples: Vec<(f64, f64)> = grid
            .iter()
            .map(|&t| (t, degree_one_control_trace(k, t)))
            .collect();
        let control = residue_check(&control_samples, -1.0, 1e-3)?;
        if let Some(path) = &args.emit_trace_csv {
            let weighted_samples =
                torsion_core::zeta::weighted_trace_samples(&series, (t_lo, 0.03), 48);
            let mut f =
                std::fs::File::create(path).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(f, "t,weighted_trace,control_trace")
                .map_err(|e| CliError::Usage(e.to_string()))?;
            for (i, &(t, w)) in weighted_samples.iter().enumerate() {
                let ctrl = control_samples
                    .get(i)
                    .map(|&(_, v)| v)
                    .unwrap_or(f64::NAN);
                writeln!(f, "{t},{w},{ctrl}").map_err(|e| CliError::Usage(e.to_string()))?;
            }
        }
        report.push(Check::flag(
            format!(
                "single-degree control detected (|b| = {:.3e}, band {:.1e})",
                control.log_coefficient.abs(),
                control.band
            ),
            control.log_coefficient.abs() > 1e-2,
        ));
        report.payload = json!({"weighted": weighted, "control": control});
        return Ok(report);
    }
    let cmp = spindle_torsion_compare(k, truncation)?;
    if args.compare {
        report.push(Check::below(
            "|log T_c - log T_o|",
            cmp.rel_log_discrepancy,
            1e-4,
        ));
        let dims = harmonic_dim_check(k, &[0, 1, 2])?;
        report.push(Check::flag(
            "kernel dimensions match (1,0,1)",
            dims.iter().all(|r| r.1),
        ));
    } else {
        report.push(Check::flag("spindle torsion computed", true));
    }
    report.payload = serde_json::to_value(&cmp).unwrap();
    Ok(report)
}
