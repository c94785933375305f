//! Static SVG overlay: the screen (screenshot or schematic boxes) with the
//! flow drawn as numbered arrows between component centers.

use std::fmt::Write;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;

use rgnf_core::flow::NavFlow;
use rgnf_core::hierarchy::ViewTree;

use crate::error::CliError;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn centers(tree: &ViewTree, flow: &NavFlow) -> Result<Vec<(f64, f64)>, CliError> {
    let idx = tree.index();
    flow.order
        .iter()
        .map(|id| Ok(idx.require(id).map_err(CliError::from)?.bounds.center()))
        .collect()
}

fn arrow_path(out: &mut String, pts: &[(f64, f64)], class: &str) {
    for w in pts.windows(2) {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        let _ = writeln!(
            out,
            r#"  <line class="{class}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" marker-end="url(#head-{class})"/>"#
        );
    }
}

/// Renders the overlay. `solid` is the flow under inspection; `dashed`, when
/// given, is drawn underneath for comparison. `png` embeds the screenshot
/// verbatim; without it the components are drawn as boxes.
pub fn render_overlay(
    tree: &ViewTree,
    solid: &NavFlow,
    dashed: Option<&NavFlow>,
    png: Option<&[u8]>,
) -> Result<String, CliError> {
    let width = tree.screen.right().max(1);
    let height = tree.screen.bottom().max(1);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace">"#
    );
    svg.push_str(
        r##"  <defs>
    <marker id="head-flow" markerWidth="7" markerHeight="7" refX="6" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#e5484d"/></marker>
    <marker id="head-base" markerWidth="7" markerHeight="7" refX="6" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#7e7e7e"/></marker>
  </defs>
  <style>
    .flow { stroke: #e5484d; stroke-width: 3; }
    .base { stroke: #7e7e7e; stroke-width: 2; stroke-dasharray: 8 6; }
    .box { fill: none; stroke: #3b6ea5; stroke-width: 2; }
    .stop { fill: #e5484d; }
    .num { fill: #ffffff; font-size: 18px; text-anchor: middle; dominant-baseline: central; }
  </style>
"##,
    );
    match png {
        Some(bytes) => {
            let _ = writeln!(
                svg,
                r#"  <image x="0" y="0" width="{width}" height="{height}" href="data:image/png;base64,{}"/>"#,
                BASE64.encode(bytes)
            );
        }
        None => {
            let _ = writeln!(
                svg,
                r##"  <rect x="0" y="0" width="{width}" height="{height}" fill="#101418"/>"##
            );
        }
    }
    for node in tree.nodes() {
        if node.is_container() {
            continue;
        }
        let b = &node.bounds;
        let _ = writeln!(
            svg,
            r#"  <rect class="box" x="{}" y="{}" width="{}" height="{}"><title>{}</title></rect>"#,
            b.left,
            b.top,
            b.width,
            b.height,
            esc(&node.id)
        );
    }
    if let Some(flow) = dashed {
        arrow_path(&mut svg, &centers(tree, flow)?, "base");
    }
    let pts = centers(tree, solid)?;
    arrow_path(&mut svg, &pts, "flow");
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"  <circle class="stop" cx="{x:.1}" cy="{y:.1}" r="13"/>
  <text class="num" x="{x:.1}" y="{y:.1}">{}</text>"#,
            i + 1
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
