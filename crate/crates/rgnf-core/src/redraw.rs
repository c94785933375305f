//! Flow redrawing and focus-chain patching.
//!
//! The redrawn flow follows two rules: arrival order is the filtered DFS
//! order, and once any member of a region is reached the whole region is
//! read to completion (members in document order) before moving on. The
//! patch plan encodes the resulting next-focus chain.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::flow::{FlowOrigin, NavFlow};
use crate::hierarchy::ViewTree;
use crate::regions::Region;
use crate::Result;

/// Identifier kinds used by a patch edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdKind {
    ResourceId,
    NodeId,
    /// One endpoint uses a resource id, the other a node id.
    Mixed,
}

/// One next-focus rewiring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchEdge {
    pub from: String,
    pub to: String,
    pub id_kind: IdKind,
}

/// The full next-focus chain realizing a redrawn flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchPlan {
    pub edges: Vec<PatchEdge>,
    /// The chain closes back on its first component.
    pub wraps: bool,
}

/// Result of redrawing, with diagnostics for region members that had been
/// filtered out of the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct RedrawOutcome {
    pub flow: NavFlow,
    /// Region members absent from the input flow, skipped during emission.
    pub skipped_members: Vec<String>,
}

/// Reorders a filtered flow so every region is read contiguously: walk the
/// flow; on first reaching a region emit all of its surviving members in
/// document order; nodes outside any region keep their position.
pub fn redraw_flow(
    tree: &ViewTree,
    regions: &[Region],
    filtered: &NavFlow,
) -> Result<RedrawOutcome> {
    if !matches!(filtered.origin, FlowOrigin::Baseline | FlowOrigin::Filtered) {
        return Err(Error::InvalidParameter(format!(
            "redraw_flow expects a baseline or filtered flow, got {:?}",
            filtered.origin
        )));
    }
    filtered.validate(tree)?;
    let idx = tree.index();
    let in_flow: HashSet<&str> = filtered.order.iter().map(|s| s.as_str()).collect();

    let mut region_of: HashMap<&str, usize> = HashMap::new();
    for (ri, region) in regions.iter().enumerate() {
        for member in &region.members {
            if idx.dfs_pos(member).is_none() {
                return Err(Error::UnknownNode(member.clone()));
            }
            if region_of.insert(member.as_str(), ri).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "node {member} belongs to two regions; regions must partition"
                )));
            }
        }
    }

    // Surviving members per region, in document order; the rest are
    // reported as skipped.
    let mut skipped_members = Vec::new();
    let mut surviving: Vec<Vec<&str>> = Vec::with_capacity(regions.len());
    for region in regions {
        let mut members: Vec<&str> = region
            .members
            .iter()
            .map(|m| m.as_str())
            .filter(|m| {
                let kept = in_flow.contains(m);
                if !kept {
                    skipped_members.push(m.to_string());
                }
                kept
            })
            .collect();
        members.sort_by_key(|m| idx.dfs_pos(m));
        surviving.push(members);
    }

    let mut visited: HashSet<&str> = HashSet::new();
    let mut order: Vec<String> = Vec::with_capacity(filtered.order.len());
    for id in &filtered.order {
        if visited.contains(id.as_str()) {
            continue;
        }
        match region_of.get(id.as_str()) {
            Some(&ri) => {
                for &member in &surviving[ri] {
                    if visited.insert(member) {
                        order.push(member.to_string());
                    }
                }
            }
            None => {
                visited.insert(id.as_str());
                order.push(id.clone());
            }
        }
    }
    Ok(RedrawOutcome {
        flow: NavFlow::new(FlowOrigin::Redrawn, order),
        skipped_members,
    })
}

/// Builds the next-focus chain for a redrawn flow, preferring resource ids
/// and falling back to node ids (with a diagnostic) when a resource id is
/// empty or shared by several flow members.
pub fn emit_patch_plan(flow: &NavFlow, tree: &ViewTree) -> Result<(PatchPlan, Vec<String>)> {
    if flow.origin != FlowOrigin::Redrawn {
        return Err(Error::InvalidParameter(format!(
            "emit_patch_plan expects a redrawn flow, got {:?}",
            flow.origin
        )));
    }
    if flow.is_empty() {
        return Err(Error::EmptyInput("cannot patch an empty flow".into()));
    }
    flow.validate(tree)?;
    let idx = tree.index();

    let mut resource_count: HashMap<&str, usize> = HashMap::new();
    for id in &flow.order {
        let node = idx.require(id)?;
        if !node.resource_id.is_empty() {
            *resource_count.entry(node.resource_id.as_str()).or_default() += 1;
        }
    }

    let mut diagnostics = Vec::new();
    let mut idents: Vec<(String, bool)> = Vec::with_capacity(flow.len());
    for id in &flow.order {
        let node = idx.require(id)?;
        if node.resource_id.is_empty() {
            diagnostics.push(format!("node {id}: empty resource_id, using node id"));
            idents.push((id.clone(), false));
        } else if resource_count[node.resource_id.as_str()] > 1 {
            diagnostics.push(format!(
                "node {id}: resource_id {:?} is shared by {} flow members, using node id",
                node.resource_id,
                resource_count[node.resource_id.as_str()]
            ));
            idents.push((id.clone(), false));
        } else {
            idents.push((node.resource_id.clone(), true));
        }
    }

    let n = flow.len();
    let mut edges = Vec::with_capacity(n);
    for i in 0..n {
        let (ref from, from_res) = idents[i];
        let (ref to, to_res) = idents[(i + 1) % n];
        let id_kind = match (from_res, to_res) {
            (true, true) => IdKind::ResourceId,
            (false, false) => IdKind::NodeId,
            _ => IdKind::Mixed,
        };
        edges.push(PatchEdge { from: from.clone(), to: to.clone(), id_kind });
    }
    Ok((PatchPlan { edges, wraps: true }, diagnostics))
}

/// Renders a patch plan as a human-readable rewiring list, annotating each
/// endpoint with its class and text.
pub fn patch_report(plan: &PatchPlan, flow: &NavFlow, tree: &ViewTree) -> Result<String> {
    if plan.edges.len() != flow.len() {
        return Err(Error::InvalidParameter(format!(
            "patch plan has {} edges but the flow has {} nodes",
            plan.edges.len(),
            flow.len()
        )));
    }
    let idx = tree.index();
    let mut out = String::new();
    out.push_str(&format!(
        "focus rewiring plan: {} components, wraps last -> first\n",
        flow.len()
    ));
    for (i, edge) in plan.edges.iter().enumerate() {
        let from = idx.require(&flow.order[i])?;
        let to = idx.require(&flow.order[(i + 1) % flow.len()])?;
        out.push_str(&format!(
            "{:>4}. {} -> {}  ({} {:?} -> {} {:?})\n",
            i + 1,
            edge.from,
            edge.to,
            from.view_class,
            from.text,
            to.view_class,
            to.text
        ));
    }
    Ok(out)
}
