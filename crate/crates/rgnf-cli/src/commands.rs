//! Subcommand implementations.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rgnf_core::flow::NavFlow;
use rgnf_core::hierarchy::ViewTree;
use rgnf_core::metrics::{reachability, sequence_similarity, ReachabilityReport, SimilarityReport};
use rgnf_core::pipeline::{analyze, AnalysisConfig, GuiAnalysis};
use rgnf_core::vision::GrayImage;

use crate::error::CliError;
use crate::io::{atomic_write, read_flow, read_png, read_tree, write_json};
use crate::overlay::render_overlay;

fn write_analysis_artifacts(
    dir: &Path,
    tree: &ViewTree,
    analysis: &GuiAnalysis,
    png: Option<&[u8]>,
) -> Result<(), CliError> {
    write_json(&dir.join("baseline.json"), &analysis.baseline)?;
    write_json(&dir.join("filtered.json"), &analysis.filtered)?;
    write_json(&dir.join("filter_report.json"), &analysis.filter_report)?;
    write_json(&dir.join("regions.json"), &analysis.grouping)?;
    write_json(&dir.join("redrawn.json"), &analysis.redrawn)?;
    write_json(&dir.join("patch_plan.json"), &analysis.patch_plan)?;
    atomic_write(&dir.join("patch_report.txt"), analysis.patch_text.as_bytes())?;
    let svg = render_overlay(tree, &analysis.redrawn, Some(&analysis.baseline), png)?;
    atomic_write(&dir.join("overlay.svg"), svg.as_bytes())?;
    Ok(())
}

fn load_screenshot(path: Option<&Path>) -> Result<Option<(GrayImage, Vec<u8>)>, CliError> {
    path.map(read_png).transpose()
}

pub fn cmd_redraw(
    hierarchy: &Path,
    screenshot: Option<&Path>,
    out: &Path,
    cfg: &AnalysisConfig,
) -> Result<(), CliError> {
    let tree = read_tree(hierarchy)?;
    let shot = load_screenshot(screenshot)?;
    let analysis = analyze(&tree, shot.as_ref().map(|(img, _)| img), cfg)?;
    write_analysis_artifacts(out, &tree, &analysis, shot.as_ref().map(|(_, b)| b.as_slice()))?;
    for line in &analysis.diagnostics {
        eprintln!("rgnf: {line}");
    }
    for skipped in &analysis.skipped_members {
        eprintln!("rgnf: region member {skipped} was filtered out of the flow");
    }
    println!(
        "redrawn {} components into {} region(s); artifacts in {}",
        analysis.redrawn.len(),
        analysis.grouping.merged.len(),
        out.display()
    );
    Ok(())
}

fn unresolved_ids(tree: &ViewTree, flows: &[&NavFlow]) -> Vec<String> {
    let idx = tree.index();
    let mut missing = BTreeSet::new();
    for flow in flows {
        for id in &flow.order {
            if idx.get(id).is_none() {
                missing.insert(id.clone());
            }
        }
    }
    missing.into_iter().collect()
}

#[derive(Serialize)]
struct EvalReport {
    similarity: SimilarityReport,
    reachability: ReachabilityReport,
}

pub fn cmd_eval(
    candidate_path: &Path,
    truth_path: &Path,
    hierarchy: &Path,
    out: &Path,
) -> Result<(), CliError> {
    let tree = read_tree(hierarchy)?;
    let candidate = read_flow(candidate_path)?;
    let truth = read_flow(truth_path)?;
    let missing = unresolved_ids(&tree, &[&candidate, &truth]);
    if !missing.is_empty() {
        return Err(CliError::input(format!(
            "ids not present in the hierarchy: {}",
            missing.join(", ")
        )));
    }
    let similarity = sequence_similarity(&truth, &candidate)?;
    let reach = reachability(&tree, &candidate)?;

    fs::create_dir_all(out).map_err(|e| CliError::at(out, e))?;
    let report = EvalReport { similarity, reachability: reach };
    write_json(&out.join("eval.json"), &report)?;

    let csv = out.join("eval.csv");
    let mut row = String::new();
    if !csv.exists() {
        row.push_str("candidate,s,n,m,p\n");
    }
    let name = candidate_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "candidate".into());
    let _ = writeln!(
        row,
        "{name},{:.6},{},{},{:.6}",
        report.similarity.s, report.reachability.n, report.reachability.m, report.reachability.p
    );
    fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&csv)
        .and_then(|mut f| f.write_all(row.as_bytes()))
        .map_err(|e| CliError::at(&csv, e))?;

    println!(
        "S = {:.6} ({} of {} matched), reach {}/{} = {:.6}",
        report.similarity.s,
        report.similarity.matched_len,
        report.similarity.truth_len,
        report.reachability.n,
        report.reachability.m,
        report.reachability.p
    );
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    id: String,
    hierarchy: PathBuf,
    #[serde(default)]
    screenshot: Option<PathBuf>,
    #[serde(default)]
    truth: Option<PathBuf>,
}

struct Scores {
    s_ours: Option<f64>,
    s_base: Option<f64>,
    p_ours: f64,
    p_base: f64,
}

fn process_entry(
    entry: &ManifestEntry,
    base: &Path,
    out_dir: &Path,
    cfg: &AnalysisConfig,
) -> Result<Scores, CliError> {
    let tree = read_tree(&base.join(&entry.hierarchy))?;
    let shot = load_screenshot(entry.screenshot.as_ref().map(|p| base.join(p)).as_deref())?;
    let analysis = analyze(&tree, shot.as_ref().map(|(img, _)| img), cfg)?;
    write_analysis_artifacts(out_dir, &tree, &analysis, shot.as_ref().map(|(_, b)| b.as_slice()))?;
    let p_ours = reachability(&tree, &analysis.redrawn)?.p;
    let p_base = reachability(&tree, &analysis.baseline)?.p;
    let (s_ours, s_base) = match &entry.truth {
        Some(t) => {
            let truth = read_flow(&base.join(t))?;
            let missing = unresolved_ids(&tree, &[&truth]);
            if !missing.is_empty() {
                return Err(CliError::input(format!(
                    "truth ids not present in the hierarchy: {}",
                    missing.join(", ")
                )));
            }
            (
                Some(sequence_similarity(&truth, &analysis.redrawn)?.s),
                Some(sequence_similarity(&truth, &analysis.baseline)?.s),
            )
        }
        None => (None, None),
    };
    Ok(Scores { s_ours, s_base, p_ours, p_base })
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn cmd_batch(manifest: &Path, out: &Path, cfg: &AnalysisConfig) -> Result<(), CliError> {
    let doc = fs::read_to_string(manifest).map_err(|e| CliError::at(manifest, e))?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&doc).map_err(|e| CliError::at(manifest, e))?;
    if entries.is_empty() {
        return Err(CliError::input("no inputs: the manifest lists no screens"));
    }
    let mut seen = BTreeSet::new();
    for entry in &entries {
        let bad_name = entry.id.is_empty()
            || entry.id.contains(['/', '\\'])
            || entry.id == "."
            || entry.id == "..";
        if bad_name {
            return Err(CliError::input(format!("invalid screen id {:?}", entry.id)));
        }
        if !seen.insert(entry.id.as_str()) {
            return Err(CliError::input(format!("duplicate screen id {:?}", entry.id)));
        }
    }
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));

    let mut rows: Vec<(String, Result<Scores, CliError>)> = Vec::new();
    for entry in &entries {
        let result = process_entry(entry, base, &out.join(&entry.id), cfg);
        if let Err(e) = &result {
            eprintln!("rgnf: {}: {e}", entry.id);
        }
        rows.push((entry.id.clone(), result));
    }

    let mut csv = String::from("gui,status,s_ours,s_baseline,p_ours,p_baseline\n");
    let (mut s_ours, mut s_base, mut p_ours, mut p_base) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut failed = 0usize;
    for (id, result) in &rows {
        match result {
            Ok(s) => {
                let _ = writeln!(
                    csv,
                    "{id},ok,{},{},{:.6},{:.6}",
                    opt_cell(s.s_ours),
                    opt_cell(s.s_base),
                    s.p_ours,
                    s.p_base
                );
                if let (Some(a), Some(b)) = (s.s_ours, s.s_base) {
                    s_ours.push(a);
                    s_base.push(b);
                }
                p_ours.push(s.p_ours);
                p_base.push(s.p_base);
            }
            Err(_) => {
                failed += 1;
                let _ = writeln!(csv, "{id},FAILED,,,,");
            }
        }
    }
    let _ = writeln!(
        csv,
        "mean,,{},{},{},{}",
        opt_cell(mean(&s_ours)),
        opt_cell(mean(&s_base)),
        opt_cell(mean(&p_ours)),
        opt_cell(mean(&p_base))
    );
    atomic_write(&out.join("aggregate.csv"), csv.as_bytes())?;
    print!("{csv}");

    if failed > 0 {
        return Err(CliError::PartialFailure(failed));
    }
    Ok(())
}

pub fn cmd_render(
    hierarchy: &Path,
    flow: &Path,
    baseline: Option<&Path>,
    screenshot: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let tree = read_tree(hierarchy)?;
    let solid = read_flow(flow)?;
    let dashed = baseline.map(read_flow).transpose()?;
    let png = screenshot
        .map(|p| fs::read(p).map_err(|e| CliError::at(p, e)))
        .transpose()?;
    let svg = render_overlay(&tree, &solid, dashed.as_ref(), png.as_deref())?;
    atomic_write(out, svg.as_bytes())?;
    println!("wrote {}", out.display());
    Ok(())
}
