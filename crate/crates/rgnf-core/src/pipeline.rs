//! One-call analysis: baseline flow, filtering, grouping, redraw, patch.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::flow::{
    classify_focusability, classify_visibility, extract_baseline_flow, filter_flow,
    FilterReport, Focusability, NavFlow, VisibilityClass,
};
use crate::hierarchy::ViewTree;
use crate::redraw::{emit_patch_plan, patch_report, redraw_flow, PatchPlan};
use crate::regions::{group_regions, GroupingConfig, GroupingOutcome};
use crate::vision::GrayImage;
use crate::Result;

/// Knobs for a full analysis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub grouping: GroupingConfig,
    /// Drop invisible and focus-transparent components before redrawing.
    pub filter_enabled: bool,
    /// Group by horizontal gaps only.
    pub strict_proximity: bool,
}

impl Default for AnalysisConfig {
    fn default() -> AnalysisConfig {
        AnalysisConfig {
            grouping: GroupingConfig::default(),
            filter_enabled: true,
            strict_proximity: false,
        }
    }
}

/// Everything one screen analysis produces.
#[derive(Debug, Clone)]
pub struct GuiAnalysis {
    pub baseline: NavFlow,
    pub filtered: NavFlow,
    pub filter_report: FilterReport,
    pub grouping: GroupingOutcome,
    pub redrawn: NavFlow,
    /// Region members that the filter had already removed.
    pub skipped_members: Vec<String>,
    pub patch_plan: PatchPlan,
    pub patch_text: String,
    pub diagnostics: Vec<String>,
}

/// Runs the whole pipeline over one screen. Fails with
/// [`Error::NothingFocusable`] when no visible, enabled, focusable
/// component exists, since a focus chain cannot be anchored anywhere.
pub fn analyze(
    tree: &ViewTree,
    screenshot: Option<&GrayImage>,
    cfg: &AnalysisConfig,
) -> Result<GuiAnalysis> {
    cfg.grouping.validate()?;
    let anchored = tree.nodes().into_iter().any(|n| {
        !n.is_container()
            && classify_visibility(n) == VisibilityClass::Visible
            && classify_focusability(n) == Focusability::Focusable
    });
    if !anchored {
        return Err(Error::NothingFocusable);
    }

    let baseline = extract_baseline_flow(tree);
    let (filtered, filter_report) = if cfg.filter_enabled {
        filter_flow(&baseline, tree)?
    } else {
        (baseline.clone(), FilterReport::default())
    };
    let grouping = group_regions(tree, screenshot, &cfg.grouping, cfg.strict_proximity)?;
    let redraw = redraw_flow(tree, &grouping.merged, &filtered)?;
    let (patch_plan, diagnostics) = emit_patch_plan(&redraw.flow, tree)?;
    let patch_text = patch_report(&patch_plan, &redraw.flow, tree)?;
    Ok(GuiAnalysis {
        baseline,
        filtered,
        filter_report,
        grouping,
        redrawn: redraw.flow,
        skipped_members: redraw.skipped_members,
        patch_plan,
        patch_text,
        diagnostics,
    })
}
