//! Command-line pipeline: analyze parameters, construct the discontinuous
//! profile, verify candidates against the weak-solution conditions, and
//! evolve initial data under the PDE.
//!
//! Exit codes: 0 success, 2 invalid parameters or malformed input, 3 a
//! pipeline stage failed, 4 verification finished but a residual exceeded
//! its tolerance. Reports are written before any nonzero exit that has one,
//! and identical configurations produce byte-identical outputs.

use crate::error::{Error, Result};
use crate::grid::{parse_csv, GridFunction};
use crate::kernel::KernelQuadratureConfig;
use crate::matcher::{match_on_trajectories, JumpData};
use crate::pde::{track_wave, write_snapshot_series, PdeState, WaveTrackReport};
use crate::phase_plane::{
    equal_states, equilibria, first_integral_h, make_params, regime_diagnostics, PlanarPoint,
    WaveParams,
};
use crate::profile::{peakon_profile, reconstruct_profile, step_profile, ShockProfile};
use crate::shooting::{shoot_p, shoot_q, ShootingConfig};
use crate::verifier::{full_report, wode1_at, Candidate, VerifyTolerances};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "fw-waves",
    version,
    about = "Discontinuous traveling waves of the Fornberg-Whitham equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derived parameters, regime classification, and saddle structure
    Analyze(AnalyzeArgs),
    /// Shoot both orbits, match them, and write the profile
    Construct(ConstructArgs),
    /// Residual report for constructed files or a named candidate shape
    Verify(VerifyArgs),
    /// Evolve a constructed profile and track the shock
    Simulate(SimulateArgs),
    /// Evolve the peaked closed-form wave and measure its speed
    Peakon(PeakonArgs),
    /// Evolve the pure step and measure how far it is from rigid translation
    StepDemo(StepDemoArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Left asymptotic state
    #[arg(long = "A")]
    a: Option<f64>,
    /// Right asymptotic state
    #[arg(long = "B")]
    b: Option<f64>,
    /// TOML config supplying unset flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stdout format: csv (human table) or json
    #[arg(long)]
    format: Option<String>,
    /// Directory for analysis.json and manifest.json
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    /// Profile half-width
    #[arg(long = "L")]
    l: Option<f64>,
    /// Grid points across [−L, L]
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Also write a gnuplot script rendering the profile
    #[arg(long)]
    emit_plot_script: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Directory holding construct outputs (profile.csv, jump.json, manifest.json)
    #[arg(long, conflicts_with = "shape")]
    dir: Option<PathBuf>,
    /// Named candidate instead of files: step, constant, or peakon
    #[arg(long)]
    shape: Option<String>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    /// Constant level for --shape constant
    #[arg(long)]
    k: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Override the derived wave speed (for probing malformed inputs)
    #[arg(long = "c")]
    c_override: Option<f64>,
    /// Override the derived integration constant
    #[arg(long = "alpha")]
    alpha_override: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    /// Load the initial profile from construct outputs instead of rebuilding
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Final time
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Snapshot count across [0, T]
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    emit_plot_script: bool,
}

#[derive(Args, Debug)]
struct PeakonArgs {
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    emit_plot_script: bool,
}

#[derive(Args, Debug)]
struct StepDemoArgs {
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    emit_plot_script: bool,
}

/// Optional values a TOML config file may supply; flags win over these,
/// these win over built-in defaults.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "A")]
    a: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    #[serde(rename = "L")]
    l: Option<f64>,
    n: Option<usize>,
    #[serde(rename = "T")]
    t: Option<f64>,
    cfl: Option<f64>,
    samples: Option<usize>,
    k: Option<f64>,
    output_dir: Option<PathBuf>,
    format: Option<String>,
    emit_plot_script: Option<bool>,
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Malformed(format!("config {}: {e}", p.display())))?;
            toml::from_str(&text)
                .map_err(|e| Error::Malformed(format!("config {}: {e}", p.display())))
        }
    }
}

fn require(name: &str, flag: Option<f64>, file: Option<f64>) -> Result<f64> {
    flag.or(file).ok_or_else(|| {
        Error::InvalidParams(format!("{name} is required (flag --{name} or config)"))
    })
}

fn resolve_grid(l: f64, n: usize) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParams(format!("L must be positive, got {l}")));
    }
    if n < 16 {
        return Err(Error::InvalidParams(format!(
            "n must be at least 16, got {n}"
        )));
    }
    Ok(())
}

fn resolve_format(flag: Option<String>, file: Option<String>) -> Result<String> {
    let f = flag.or(file).unwrap_or_else(|| "csv".to_string());
    if f == "csv" || f == "json" {
        Ok(f)
    } else {
        Err(Error::InvalidParams(format!(
            "format must be csv or json, got {f}"
        )))
    }
}

fn out_dir(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or(file)
        .unwrap_or_else(|| PathBuf::from("fw-waves-out"))
}

/// Failures inside an agreed pipeline stage exit 3 with the stage named;
/// parameter and input rejection stays exit 2.
fn stage_err(stage: &str, e: Error) -> Error {
    Error::Regime(format!("stage {stage}: {e}"))
}

fn code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) | Error::Malformed(_) | Error::Json(_) => 2,
        _ => 3,
    }
}

/// Parses argv and runs one command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Peakon(a) => cmd_peakon(a),
        Command::StepDemo(a) => cmd_step_demo(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            code_for(&e)
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str, files: &mut Vec<String>) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    files.push(name.to_string());
    Ok(())
}

fn write_manifest(
    dir: &Path,
    command: &str,
    config: serde_json::Value,
    files: &[String],
    extra: Option<(&str, serde_json::Value)>,
) -> Result<()> {
    let mut m = json!({
        "command": command,
        "config": config,
        "files": files,
    });
    if let Some((key, value)) = extra {
        m[key] = value;
    }
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&m)? + "\n",
    )?;
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32> {
    let fc = load_file_config(&args.config)?;
    let a = require("A", args.a, fc.a)?;
    let b = require("B", args.b, fc.b)?;
    let format = resolve_format(args.format, fc.format)?;
    let p = make_params(a, b)?;
    let diag = regime_diagnostics(&p);
    let (e_lo, e_hi) = equilibria(&p)?;
    let saddles = crate::phase_plane::saddle_data(&p).ok();
    let h_a = first_integral_h(&p, PlanarPoint::new(p.a, 0.0));
    let h_b = first_integral_h(&p, PlanarPoint::new(p.b, 0.0));

    let mut analysis = json!({
        "params": p,
        "regime": diag,
        "equilibria": { "S_minus": e_lo, "S_plus": e_hi },
        "H_levels": { "at_A": h_a, "at_B": h_b },
    });
    if let Some((sm, sp)) = &saddles {
        analysis["saddles"] = json!({ "S_minus": sm, "S_plus": sp });
    }

    if format == "json" {
        println!("{}", serde_json::to_string_pretty(&analysis)?);
    } else {
        println!("A = {}, B = {}", p.a, p.b);
        println!("c = {}, alpha = {}", p.c, p.alpha);
        println!("shock regime: {}", diag.shock_regime);
        println!("equilibria: ({}, 0) and ({}, 0)", e_lo.u, e_hi.u);
        println!("H at (A, 0) = {h_a}");
        println!("H at (B, 0) = {h_b}");
        match &saddles {
            Some((sm, sp)) => {
                println!(
                    "saddle at ({}, 0): eigenvalues \u{00b1}{}, unstable direction ({}, {})",
                    sm.location.u, sm.eigenvalue_pos, sm.eigvec_pos.u, sm.eigvec_pos.v
                );
                println!(
                    "saddle at ({}, 0): eigenvalues \u{00b1}{}, unstable direction ({}, {})",
                    sp.location.u, sp.eigenvalue_pos, sp.eigvec_pos.u, sp.eigvec_pos.v
                );
            }
            None => println!(
                "note: the discontinuous wave needs A > B + 2 (have A \u{2212} B = {}); \
                 both rest points are saddles only in that regime",
                p.a - p.b
            ),
        }
    }

    if let Some(dir) = args.output_dir.or(fc.output_dir) {
        std::fs::create_dir_all(&dir)?;
        let mut files = Vec::new();
        write_file(
            &dir,
            "analysis.json",
            &(serde_json::to_string_pretty(&analysis)? + "\n"),
            &mut files,
        )?;
        let config = json!({ "A": a, "B": b, "format": format });
        write_manifest(&dir, "analyze", config, &files, None)?;
    }
    Ok(0)
}

fn construct_profile(p: &WaveParams, l: f64, n: usize) -> Result<ShockProfile> {
    let sc = ShootingConfig::default();
    let pt = shoot_p(p, &sc).map_err(|e| stage_err("shooting P", e))?;
    let qt = shoot_q(p, &sc).map_err(|e| stage_err("shooting Q", e))?;
    let jump = match_on_trajectories(&pt, &qt).map_err(|e| stage_err("matching", e))?;
    reconstruct_profile(&pt, &qt, &jump, l, n).map_err(|e| stage_err("profile reconstruction", e))
}

fn profile_plot_script(jump: &JumpData) -> String {
    format!(
        "set datafile separator ','\n\
         set xlabel 'xi'\n\
         set ylabel 'W'\n\
         set key left top\n\
         set arrow 1 from 0,{} to 0,{} nohead dashtype 2\n\
         plot 'profile.csv' skip 1 using 1:2 with lines title 'W', \\\n\
         \x20    'profile.csv' skip 1 using 1:3 with lines title 'dW/dxi'\n",
        jump.u_right, jump.u_left
    )
}

fn snapshot_plot_script(times: &[f64]) -> String {
    let list = times
        .iter()
        .map(|t| format!("{t}"))
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "set datafile separator ','\n\
         set xlabel 'xi'\n\
         set ylabel 'u'\n\
         times = \"{list}\"\n\
         plot for [i=1:words(times)] 'snapshots.csv' skip 1 \\\n\
         \x20    using (abs($1 - real(word(times, i))) < 1e-9 ? $2 : 1/0):3 \\\n\
         \x20    with lines title 't = '.word(times, i)\n"
    )
}

fn cmd_construct(args: ConstructArgs) -> Result<i32> {
    let fc = load_file_config(&args.config)?;
    let a = require("A", args.a, fc.a)?;
    let b = require("B", args.b, fc.b)?;
    let l = args.l.or(fc.l).unwrap_or(40.0);
    let n = args.n.or(fc.n).unwrap_or(4001);
    resolve_grid(l, n)?;
    let emit_plot = args.emit_plot_script || fc.emit_plot_script.unwrap_or(false);
    let dir = out_dir(args.output_dir, fc.output_dir);

    let p = make_params(a, b)?;
    if !p.shock_regime {
        return Err(Error::Regime(format!(
            "no discontinuous wave outside B + 2 < c < A: A = {a}, B = {b} give c = {}",
            p.c
        )));
    }
    let prof = construct_profile(&p, l, n)?;

    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    write_file(&dir, "profile.csv", &prof.to_csv(), &mut files)?;
    write_file(
        &dir,
        "jump.json",
        &(serde_json::to_string_pretty(&prof.jump)? + "\n"),
        &mut files,
    )?;
    if emit_plot {
        write_file(
            &dir,
            "plot.gp",
            &profile_plot_script(&prof.jump),
            &mut files,
        )?;
    }
    let config = json!({
        "A": a, "B": b, "L": l, "n": n,
        "emit_plot_script": emit_plot,
    });
    write_manifest(
        &dir,
        "construct",
        config,
        &files,
        Some(("profile", prof.manifest())),
    )?;

    println!(
        "constructed W: W(0-) = {}, W(0+) = {}, c = {}",
        prof.jump.u_left, prof.jump.u_right, p.c
    );
    println!("wrote {} files to {}", files.len() + 1, dir.display());
    Ok(0)
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

/// Rebuilds (params, W grid, W′ grid) from a construct output directory.
fn load_constructed(dir: &Path) -> Result<(WaveParams, GridFunction, GridFunction)> {
    let manifest: serde_json::Value =
        serde_json::from_str(&read_input(&dir.join("manifest.json"))?)
            .map_err(|e| Error::Malformed(format!("manifest.json: {e}")))?;
    let params: WaveParams = serde_json::from_value(manifest["profile"]["params"].clone())
        .map_err(|e| Error::Malformed(format!("manifest.json params: {e}")))?;
    let jump: JumpData = serde_json::from_str(&read_input(&dir.join("jump.json"))?)
        .map_err(|e| Error::Malformed(format!("jump.json: {e}")))?;
    let (xs, cols) = parse_csv(&read_input(&dir.join("profile.csv"))?, 2)?;
    let left = xs[0];
    let right = xs[xs.len() - 1];
    let w = GridFunction::new(
        left,
        right,
        cols[0].clone(),
        params.a,
        params.b,
        Some((jump.u_left, jump.u_right)),
    )?;
    let wp = GridFunction::new(
        left,
        right,
        cols[1].clone(),
        0.0,
        0.0,
        Some((jump.v_left, jump.v_right)),
    )?;
    Ok((params, w, wp))
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let fc = load_file_config(&args.config)?;
    let l = args.l.or(fc.l).unwrap_or(40.0);
    let n = args.n.or(fc.n).unwrap_or(4001);
    resolve_grid(l, n)?;
    let report_dir = args
        .output_dir
        .or(fc.output_dir)
        .or_else(|| args.dir.clone())
        .unwrap_or_else(|| PathBuf::from("fw-waves-out"));

    let (cand, mut params) = match (&args.dir, args.shape.as_deref()) {
        (Some(dir), None) => {
            let (params, w, wp) = load_constructed(dir)?;
            (Candidate::new(w, wp, None, Vec::new())?, params)
        }
        (None, Some("step")) => {
            let a = require("A", args.a, fc.a)?;
            let b = require("B", args.b, fc.b)?;
            (Candidate::step(a, b, l, n)?, make_params(a, b)?)
        }
        (None, Some("constant")) => {
            let k = args.k.or(fc.k).unwrap_or(2.0);
            (Candidate::constant(k, l, n)?, equal_states(k, 1.0 + k)?)
        }
        (None, Some("peakon")) => (Candidate::peakon(l, n)?, equal_states(0.0, 4.0 / 3.0)?),
        (None, Some(other)) => {
            return Err(Error::InvalidParams(format!(
                "unknown shape '{other}'; expected step, constant, or peakon"
            )))
        }
        _ => {
            return Err(Error::InvalidParams(
                "verify needs either --dir or --shape".into(),
            ))
        }
    };
    if let Some(c) = args.c_override {
        params.c = c;
    }
    if let Some(alpha) = args.alpha_override {
        params.alpha = alpha;
    }

    let cfg = KernelQuadratureConfig::default();
    let report = full_report(&cand, &params, &cfg)?;
    let tol = VerifyTolerances::default();

    std::fs::create_dir_all(&report_dir)?;
    std::fs::write(
        report_dir.join("report.json"),
        serde_json::to_string_pretty(&json!({ "report": report, "tolerances": tol }))? + "\n",
    )?;

    println!(
        "rankine-hugoniot residual: {} (applicable: {})",
        report.rh_residual, report.rh_applicable
    );
    println!(
        "derivative-condition residual: {} (applicable: {})",
        report.deriv_residual, report.deriv_applicable
    );
    println!(
        "interior residual sup (|xi| >= {}): {}",
        report.xi_min, report.wode1_sup
    );
    println!(
        "interior residual at xi = 1: {}",
        wode1_at(&cand, params.c, 1.0, &cfg)?
    );
    println!("first-integral form sup: {}", report.const_sup);
    println!("second-order balance sup: {}", report.second_order_sup);
    for wf in &report.weak_form_values {
        println!("weak form, bump {}: {}", wf.id, wf.value);
    }
    let failures = report.failures(&tol);
    if failures.is_empty() {
        println!("PASS: every applicable residual within tolerance");
        Ok(0)
    } else {
        for f in &failures {
            println!("FAIL: {f}");
        }
        Ok(4)
    }
}

fn write_track_outputs(
    dir: &Path,
    command: &str,
    config: serde_json::Value,
    report: &WaveTrackReport,
    states: &[PdeState],
    emit_plot: bool,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    write_snapshot_series(states, &dir.join("snapshots.csv"))?;
    files.push("snapshots.csv".to_string());
    write_file(
        dir,
        "track_report.json",
        &(serde_json::to_string_pretty(report)? + "\n"),
        &mut files,
    )?;
    if emit_plot {
        write_file(
            dir,
            "plot.gp",
            &snapshot_plot_script(&report.times_sampled),
            &mut files,
        )?;
    }
    write_manifest(dir, command, config, &files, None)?;
    Ok(())
}

fn print_track_summary(report: &WaveTrackReport, c_expected: f64) {
    match report.measured_speed {
        Some(s) => println!("measured speed: {s} (expected {c_expected})"),
        None => println!("measured speed: undefined (featureless data)"),
    }
    println!(
        "relative L1 shape error vs rigid translation: {}",
        report.shape_error_l1
    );
    if let Some(p) = report.shock_position_error {
        println!("feature position error: {p} cell widths");
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let fc = load_file_config(&args.config)?;
    let t = args.t.or(fc.t).unwrap_or(5.0);
    let cfl = args.cfl.or(fc.cfl).unwrap_or(0.4);
    let samples = args.samples.or(fc.samples).unwrap_or(11);
    let emit_plot = args.emit_plot_script || fc.emit_plot_script.unwrap_or(false);
    let dir = out_dir(args.output_dir, fc.output_dir);

    let (p, grid, config) = match &args.dir {
        Some(src) => {
            let (p, w, _) = load_constructed(src)?;
            let config = json!({
                "dir": src.display().to_string(), "T": t, "cfl": cfl, "samples": samples,
                "emit_plot_script": emit_plot,
            });
            (p, w, config)
        }
        None => {
            let a = require("A", args.a, fc.a)?;
            let b = require("B", args.b, fc.b)?;
            let l = args.l.or(fc.l).unwrap_or(60.0);
            let n = args.n.or(fc.n).unwrap_or(6000);
            resolve_grid(l, n)?;
            let p = make_params(a, b)?;
            if !p.shock_regime {
                return Err(Error::Regime(format!(
                    "no discontinuous wave outside B + 2 < c < A: A = {a}, B = {b} give c = {}",
                    p.c
                )));
            }
            let prof = construct_profile(&p, l, n)?;
            let config = json!({
                "A": a, "B": b, "L": l, "n": n, "T": t, "cfl": cfl, "samples": samples,
                "emit_plot_script": emit_plot,
            });
            (p, prof.grid, config)
        }
    };
    let (report, states) =
        track_wave(&grid, cfl, p.c, t, samples).map_err(|e| stage_err("wave tracking", e))?;
    write_track_outputs(&dir, "simulate", config, &report, &states, emit_plot)?;
    print_track_summary(&report, p.c);
    Ok(0)
}

fn cmd_peakon(args: PeakonArgs) -> Result<i32> {
    let fc = load_file_config(&args.config)?;
    let l = args.l.or(fc.l).unwrap_or(60.0);
    let n = args.n.or(fc.n).unwrap_or(6001);
    let t = args.t.or(fc.t).unwrap_or(3.0);
    let cfl = args.cfl.or(fc.cfl).unwrap_or(0.4);
    let samples = args.samples.or(fc.samples).unwrap_or(11);
    resolve_grid(l, n)?;
    let emit_plot = args.emit_plot_script || fc.emit_plot_script.unwrap_or(false);
    let dir = out_dir(args.output_dir, fc.output_dir);

    let (grid, c) = peakon_profile(l, n)?;
    let (report, states) =
        track_wave(&grid, cfl, c, t, samples).map_err(|e| stage_err("wave tracking", e))?;
    let config = json!({
        "L": l, "n": n, "T": t, "cfl": cfl, "samples": samples,
        "emit_plot_script": emit_plot,
    });
    write_track_outputs(&dir, "peakon", config, &report, &states, emit_plot)?;
    print_track_summary(&report, c);
    Ok(0)
}

fn cmd_step_demo(args: StepDemoArgs) -> Result<i32> {
    let fc = load_file_config(&args.config)?;
    let a = require("A", args.a, fc.a)?;
    let b = require("B", args.b, fc.b)?;
    let l = args.l.or(fc.l).unwrap_or(10.0);
    let n = args.n.or(fc.n).unwrap_or(1000);
    let t = args.t.or(fc.t).unwrap_or(1.0);
    let cfl = args.cfl.or(fc.cfl).unwrap_or(0.4);
    let samples = args.samples.or(fc.samples).unwrap_or(3);
    resolve_grid(l, n)?;
    let emit_plot = args.emit_plot_script || fc.emit_plot_script.unwrap_or(false);
    let dir = out_dir(args.output_dir, fc.output_dir);

    let p = make_params(a, b)?;
    let grid = step_profile(a, b, l, n)?;
    let (report, states) =
        track_wave(&grid, cfl, p.c, t, samples).map_err(|e| stage_err("wave tracking", e))?;
    let config = json!({
        "A": a, "B": b, "L": l, "n": n, "T": t, "cfl": cfl, "samples": samples,
        "emit_plot_script": emit_plot,
    });
    write_track_outputs(&dir, "step-demo", config, &report, &states, emit_plot)?;
    print_track_summary(&report, p.c);
    println!(
        "the pure jump satisfies the jump conditions for c = {} but not the \
         interior equation; the deformation above is the defect made visible",
        p.c
    );
    Ok(0)
}
