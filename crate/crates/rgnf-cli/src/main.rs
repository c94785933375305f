//! `rgnf`: redraws screen-reader navigation flows over Android view
//! hierarchies, scores them against ground truth, and renders overlays.

mod commands;
mod config;
mod error;
mod io;
mod overlay;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(
    name = "rgnf",
    version,
    about = "Regroup and redraw screen-reader navigation flows"
)]
struct Cli {
    /// TOML config file; the RGNF_CONFIG env var is honored when absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: config::ConfigFlags,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze one screen and write all flow artifacts.
    Redraw {
        /// View hierarchy (uiautomator XML or JSON).
        hierarchy: PathBuf,
        /// Screenshot PNG for shape-based grouping and the overlay.
        #[arg(long, value_name = "PNG")]
        screenshot: Option<PathBuf>,
        /// Artifact directory.
        #[arg(long, value_name = "DIR", default_value = "rgnf-out")]
        out: PathBuf,
    },
    /// Score a candidate flow against a ground-truth flow.
    Eval {
        /// Flow JSON to score.
        #[arg(long, value_name = "FILE")]
        candidate: PathBuf,
        /// Ground-truth flow JSON.
        #[arg(long, value_name = "FILE")]
        truth: PathBuf,
        /// View hierarchy both flows refer to.
        #[arg(long, value_name = "FILE")]
        hierarchy: PathBuf,
        /// Report directory.
        #[arg(long, value_name = "DIR", default_value = "rgnf-out")]
        out: PathBuf,
    },
    /// Analyze and score every screen in a manifest.
    Batch {
        /// JSON list of {id, hierarchy, screenshot?, truth?} entries.
        manifest: PathBuf,
        /// Artifact directory (one subdirectory per screen).
        #[arg(long, value_name = "DIR", default_value = "rgnf-out")]
        out: PathBuf,
    },
    /// Render the overlay SVG from existing flow files.
    Render {
        #[arg(long, value_name = "FILE")]
        hierarchy: PathBuf,
        /// Flow drawn with solid arrows.
        #[arg(long, value_name = "FILE")]
        flow: PathBuf,
        /// Flow drawn underneath with dashed arrows.
        #[arg(long, value_name = "FILE")]
        baseline: Option<PathBuf>,
        #[arg(long, value_name = "PNG")]
        screenshot: Option<PathBuf>,
        #[arg(long, value_name = "FILE", default_value = "overlay.svg")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config::resolve(cli.config.as_deref(), &cli.flags)?;
    match cli.cmd {
        Cmd::Redraw { hierarchy, screenshot, out } => {
            commands::cmd_redraw(&hierarchy, screenshot.as_deref(), &out, &cfg)
        }
        Cmd::Eval { candidate, truth, hierarchy, out } => {
            commands::cmd_eval(&candidate, &truth, &hierarchy, &out)
        }
        Cmd::Batch { manifest, out } => commands::cmd_batch(&manifest, &out, &cfg),
        Cmd::Render { hierarchy, flow, baseline, screenshot, out } => commands::cmd_render(
            &hierarchy,
            &flow,
            baseline.as_deref(),
            screenshot.as_deref(),
            &out,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("rgnf: {err}");
            ExitCode::from(err.code())
        }
    }
}
