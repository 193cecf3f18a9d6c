//! Command-line experiment driver for `latshell`.
//!
//! Every subcommand writes CSV (data rows behind `#` metadata lines) and a
//! JSON summary. Exit codes: 0 pass, 1 tolerance failure, 2 usage or config error.

pub mod args;
pub mod config;
pub mod experiments;
pub mod output;
pub mod presets;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::{merge_args, merge_globals, read_config, CliError, CliResult};
use crate::experiments::Ctx;
use crate::output::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Like [`run`], with explicit streams for stdout and stderr.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_PASS
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<bool> {
    let mut file = match &cli.global.config {
        Some(path) => read_config(path)?,
        None => Default::default(),
    };
    let global = merge_globals(&mut file, cli.global.clone())?;
    let ctx = Ctx { timing: !global.no_timing.unwrap_or(false) };

    if let Command::Preset(p) = &cli.command {
        if p.name == "list" {
            for (name, about) in presets::PRESETS {
                writeln!(out, "{name:<22}{about}").map_err(|e| CliError::Io(e.to_string()))?;
            }
            return Ok(true);
        }
        if let Some(k) = file.keys().next() {
            return Err(CliError::Usage(format!("config: presets take no parameters, found `{k}`")));
        }
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = global.workers {
        if n == 0 {
            return Err(config::field_err("workers", "must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let report = pool.install(|| dispatch(&cli.command, file, ctx))?;

    let csv = report.to_csv(ctx.timing)?;
    let summary = report.to_json();
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &global.out {
        Some(path) => std::fs::write(path, &csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => out.write_all(&csv).map_err(io)?,
    }
    let summary_path: Option<PathBuf> = match (&global.summary, &global.out) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(o)) => Some(o.with_extension("json")),
        (None, None) => None,
    };
    match summary_path {
        Some(p) if p.as_os_str() == "-" => out.write_all(summary.as_bytes()).map_err(io)?,
        Some(p) => std::fs::write(&p, summary).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => {}
    }
    writeln!(err, "{}: {}", report.experiment, if report.pass { "PASS" } else { "FAIL" }).map_err(io)?;
    Ok(report.pass)
}

fn dispatch(command: &Command, file: serde_json::Map<String, serde_json::Value>, ctx: Ctx) -> CliResult<Report> {
    match command {
        Command::CountShell(a) => {
            let (a, params) = merge_args(file, a)?;
            experiments::count_shell(&a, params)
        }
        Command::CountPairs(a) => {
            let (a, params) = merge_args(file, a)?;
            experiments::count_pairs(&a, params)
        }
        Command::DiscrepancyScan(a) => {
            let (a, params) = merge_args(file, a)?;
            experiments::discrepancy_scan(&a, params)
        }
        Command::MaCheck(a) => {
            let (a, params) = merge_args(file, a)?;
            experiments::ma_check(&a, params)
        }
        Command::EnergyScan(a) => {
            let (a, params) = merge_args(file, a)?;
            experiments::energy_scan(&a, params)
        }
        Command::SharpnessDemo(a) => {
            let (a, params) = merge_args(file, a)?;
            experiments::sharpness_demo(&a, params)
        }
        Command::Fit(a) => {
            let (a, params) = merge_args(file, a)?;
            experiments::fit(&a, params)
        }
        Command::Preset(p) => presets::run_preset(&p.name, ctx),
    }
}
