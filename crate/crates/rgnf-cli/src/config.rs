//! Run configuration: defaults, TOML config file, command-line overrides,
//! in rising precedence.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use rgnf_core::pipeline::AnalysisConfig;

use crate::error::CliError;

/// Threshold overrides accepted by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// Gaussian blur strength for shape extraction.
    #[arg(long, global = true, value_name = "SIGMA")]
    pub sigma: Option<f64>,

    /// Strong-edge fraction of the maximum gradient, in [0.70, 0.90].
    #[arg(long, global = true, value_name = "FRAC")]
    pub canny_high: Option<f64>,

    /// Weak-edge fraction of the maximum gradient, in [0.30, 0.50].
    #[arg(long, global = true, value_name = "FRAC")]
    pub canny_low: Option<f64>,

    /// Largest normalized shape distance that still counts as similar.
    #[arg(long, global = true, value_name = "DIST")]
    pub hausdorff_threshold: Option<f64>,

    /// Largest pixel gap that still groups neighbours.
    #[arg(long, global = true, value_name = "PX")]
    pub proximity_max: Option<u32>,

    /// Group by horizontal gaps only.
    #[arg(long, global = true)]
    pub strict_proximity: bool,

    /// Keep invisible and focus-transparent components in the flow.
    #[arg(long, global = true)]
    pub no_filter: bool,
}

/// Optional keys understood in a TOML config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    sigma: Option<f64>,
    canny_high: Option<f64>,
    canny_low: Option<f64>,
    hausdorff_threshold: Option<f64>,
    proximity_max: Option<u32>,
    strict_proximity: Option<bool>,
    filter: Option<bool>,
}

/// Builds the effective configuration. `--config` wins over `RGNF_CONFIG`;
/// flags win over the file; the file wins over defaults.
pub fn resolve(config_flag: Option<&Path>, flags: &ConfigFlags) -> Result<AnalysisConfig, CliError> {
    let mut cfg = AnalysisConfig::default();

    let file_path: Option<PathBuf> = config_flag
        .map(Path::to_path_buf)
        .or_else(|| env::var_os("RGNF_CONFIG").map(PathBuf::from));
    if let Some(path) = file_path {
        let doc = fs::read_to_string(&path).map_err(|e| CliError::at(&path, e))?;
        let file: FileConfig = toml::from_str(&doc).map_err(|e| CliError::at(&path, e))?;
        apply_file(&mut cfg, &file);
    }
    apply_flags(&mut cfg, flags);

    cfg.grouping.validate().map_err(CliError::from)?;
    Ok(cfg)
}

fn apply_file(cfg: &mut AnalysisConfig, file: &FileConfig) {
    let vision = &mut cfg.grouping.vision;
    if let Some(v) = file.sigma {
        vision.sigma = v;
    }
    if let Some(v) = file.canny_high {
        vision.high_frac = v;
    }
    if let Some(v) = file.canny_low {
        vision.low_frac = v;
    }
    if let Some(v) = file.hausdorff_threshold {
        vision.hausdorff_threshold = v;
    }
    if let Some(v) = file.proximity_max {
        cfg.grouping.max_gap = v;
    }
    if let Some(v) = file.strict_proximity {
        cfg.strict_proximity = v;
    }
    if let Some(v) = file.filter {
        cfg.filter_enabled = v;
    }
}

fn apply_flags(cfg: &mut AnalysisConfig, flags: &ConfigFlags) {
    let vision = &mut cfg.grouping.vision;
    if let Some(v) = flags.sigma {
        vision.sigma = v;
    }
    if let Some(v) = flags.canny_high {
        vision.high_frac = v;
    }
    if let Some(v) = flags.canny_low {
        vision.low_frac = v;
    }
    if let Some(v) = flags.hausdorff_threshold {
        vision.hausdorff_threshold = v;
    }
    if let Some(v) = flags.proximity_max {
        cfg.grouping.max_gap = v;
    }
    if flags.strict_proximity {
        cfg.strict_proximity = true;
    }
    if flags.no_filter {
        cfg.filter_enabled = false;
    }
}
