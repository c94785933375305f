//! Perceptual grouping of components into regions.
//!
//! Grouping proceeds per container scope (initial-regions), then two
//! Gestalt passes run inside each scope: proximity (edge gaps within a
//! pixel band) and similarity (same role, near-identical edge shapes).
//! Overlapping groups are merged into a single region at the end.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hierarchy::{crop_component, Bounds, Role, TreeIndex, ViewTree};
use crate::vision::{detect_shape, normalized_hausdorff, EdgePointSet, GrayImage, VisionConfig};
use crate::Result;

/// How a region was formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Initial,
    Proximal,
    Similar,
    Merged,
}

/// A group of components read contiguously.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub kind: RegionKind,
    /// Node ids in DFS encounter order.
    pub members: Vec<String>,
    /// Container id of the owning initial-region; absent for
    /// `kind=initial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_initial: Option<String>,
}

/// Thresholds for the grouping passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupingConfig {
    /// Smallest gap (px) that still groups.
    pub min_gap: u32,
    /// Largest gap (px) that still groups.
    pub max_gap: u32,
    pub vision: VisionConfig,
}

impl Default for GroupingConfig {
    fn default() -> GroupingConfig {
        GroupingConfig { min_gap: 0, max_gap: 15, vision: VisionConfig::default() }
    }
}

impl GroupingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_gap > self.max_gap {
            return Err(Error::InvalidParameter(format!(
                "min_gap {} exceeds max_gap {}",
                self.min_gap, self.max_gap
            )));
        }
        self.vision.validate()
    }
}

/// Diagnostics from the similarity pass.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimilarityNotes {
    /// True when grouping had to rely on roles alone (no screenshot).
    pub low_confidence: bool,
    /// Members whose shape could not be extracted; they grouped by role.
    pub shape_fallbacks: Vec<ShapeFallback>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeFallback {
    pub node: String,
    pub reason: String,
}

impl SimilarityNotes {
    fn absorb(&mut self, other: SimilarityNotes) {
        self.low_confidence |= other.low_confidence;
        self.shape_fallbacks.extend(other.shape_fallbacks);
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> DisjointSet {
        DisjointSet { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Attach the larger root index under the smaller one so the
            // representative is always the earliest member.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Paper-literal horizontal gap: `|k.left − j.left − j.width|`, the
/// distance between j's right edge and k's left edge.
pub fn horizontal_gap(j: &Bounds, k: &Bounds) -> u32 {
    (k.left as i64 - j.left as i64 - j.width as i64).unsigned_abs() as u32
}

/// Axis-aligned rectangle gap: zero when the rectangles overlap, else the
/// Euclidean distance between the closest edges.
pub fn edge_gap(j: &Bounds, k: &Bounds) -> f64 {
    let dx = if k.left > j.right() {
        (k.left - j.right()) as f64
    } else if j.left > k.right() {
        (j.left - k.right()) as f64
    } else {
        0.0
    };
    let dy = if k.top > j.bottom() {
        (k.top - j.bottom()) as f64
    } else if j.top > k.bottom() {
        (j.top - k.bottom()) as f64
    } else {
        0.0
    };
    dx.hypot(dy)
}

/// Groups every non-container node under its nearest container ancestor.
/// One region per non-empty scope, ordered by the scope's DFS position.
pub fn initial_regions(tree: &ViewTree) -> Vec<Region> {
    let idx = tree.index();
    let mut by_scope: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (pos, node) in idx.nodes().iter().enumerate() {
        if node.is_container() {
            continue;
        }
        by_scope
            .entry(idx.scope_of(pos))
            .or_default()
            .push(node.id.clone());
    }
    by_scope
        .into_values()
        .map(|members| Region { kind: RegionKind::Initial, members, parent_initial: None })
        .collect()
}

fn require_initial(region: &Region, op: &str) -> Result<()> {
    if region.kind != RegionKind::Initial {
        return Err(Error::InvalidParameter(format!(
            "{op} expects an initial region, got {:?}",
            region.kind
        )));
    }
    Ok(())
}

fn scope_id(idx: &TreeIndex<'_>, member: &str) -> Result<String> {
    let pos = idx
        .dfs_pos(member)
        .ok_or_else(|| Error::UnknownNode(member.to_string()))?;
    Ok(idx.nodes()[idx.scope_of(pos)].id.clone())
}

/// Splits the component indices `0..n` into regions following a union
/// relation, preserving member order and ordering regions by earliest
/// member.
fn components_to_regions(
    members: &[String],
    dsu: &mut DisjointSet,
    kind: RegionKind,
    parent: &str,
) -> Vec<Region> {
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, id) in members.iter().enumerate() {
        groups.entry(dsu.find(i)).or_default().push(id.clone());
    }
    groups
        .into_values()
        .map(|members| Region {
            kind,
            members,
            parent_initial: Some(parent.to_string()),
        })
        .collect()
}

/// Connected components over the gap graph of an initial region. The gap
/// metric is `edge_gap` by default; `strict` switches to the literal
/// horizontal formula (tested in both orientations of each pair).
pub fn proximal_regions(
    region: &Region,
    tree: &ViewTree,
    cfg: &GroupingConfig,
    strict: bool,
) -> Result<Vec<Region>> {
    require_initial(region, "proximal_regions")?;
    cfg.validate()?;
    let idx = tree.index();
    let bounds: Vec<Bounds> = region
        .members
        .iter()
        .map(|id| idx.require(id).map(|n| n.bounds))
        .collect::<Result<_>>()?;
    let mut dsu = DisjointSet::new(region.members.len());
    for i in 0..bounds.len() {
        for j in (i + 1)..bounds.len() {
            let near = if strict {
                let fwd = horizontal_gap(&bounds[i], &bounds[j]);
                let rev = horizontal_gap(&bounds[j], &bounds[i]);
                (cfg.min_gap..=cfg.max_gap).contains(&fwd)
                    || (cfg.min_gap..=cfg.max_gap).contains(&rev)
            } else {
                let gap = edge_gap(&bounds[i], &bounds[j]);
                gap >= cfg.min_gap as f64 && gap <= cfg.max_gap as f64
            };
            if near {
                dsu.union(i, j);
            }
        }
    }
    let parent = match region.members.first() {
        Some(first) => scope_id(&idx, first)?,
        None => return Ok(Vec::new()),
    };
    Ok(components_to_regions(
        &region.members,
        &mut dsu,
        RegionKind::Proximal,
        &parent,
    ))
}

/// Groups same-role members whose edge shapes are near-identical.
/// Textviews are left to the proximity pass. Members without a usable
/// shape (no screenshot, or extraction failed) group by role alone.
pub fn similar_regions(
    region: &Region,
    tree: &ViewTree,
    screenshot: Option<&GrayImage>,
    cfg: &GroupingConfig,
) -> Result<(Vec<Region>, SimilarityNotes)> {
    require_initial(region, "similar_regions")?;
    cfg.validate()?;
    let idx = tree.index();
    let mut notes = SimilarityNotes::default();
    let roles: Vec<Role> = region
        .members
        .iter()
        .map(|id| idx.require(id).map(|n| n.role()))
        .collect::<Result<_>>()?;
    let mut shapes: Vec<Option<EdgePointSet>> = vec![None; region.members.len()];
    if let Some(img) = screenshot {
        for (i, id) in region.members.iter().enumerate() {
            if roles[i] == Role::TextView {
                continue;
            }
            // A shape only matters when there is a same-role peer to
            // compare against.
            let has_peer = roles
                .iter()
                .enumerate()
                .any(|(j, r)| j != i && *r == roles[i]);
            if !has_peer {
                continue;
            }
            let node = idx.require(id)?;
            let shape = crop_component(img, &node.bounds)
                .and_then(|crop| detect_shape(&crop.image, &cfg.vision));
            match shape {
                Ok(set) => shapes[i] = Some(set),
                Err(e) => notes.shape_fallbacks.push(ShapeFallback {
                    node: id.clone(),
                    reason: e.to_string(),
                }),
            }
        }
    }
    let mut dsu = DisjointSet::new(region.members.len());
    for i in 0..region.members.len() {
        for j in (i + 1)..region.members.len() {
            if roles[i] != roles[j] || roles[i] == Role::TextView {
                continue;
            }
            let grouped = match (&shapes[i], &shapes[j]) {
                (Some(a), Some(b)) => {
                    normalized_hausdorff(a, b)? <= cfg.vision.hausdorff_threshold
                }
                _ => {
                    if screenshot.is_none() {
                        notes.low_confidence = true;
                    }
                    true
                }
            };
            if grouped {
                dsu.union(i, j);
            }
        }
    }
    let parent = match region.members.first() {
        Some(first) => scope_id(&idx, first)?,
        None => return Ok((Vec::new(), notes)),
    };
    let regions =
        components_to_regions(&region.members, &mut dsu, RegionKind::Similar, &parent);
    Ok((regions, notes))
}

/// Unions regions (across both passes) that share members. Regions that
/// overlap nothing pass through unchanged; merged regions take
/// `kind=merged` with members re-sorted into DFS order.
pub fn merge_overlapping(
    proximal: &[Region],
    similar: &[Region],
    tree: &ViewTree,
) -> Vec<Region> {
    let inputs: Vec<&Region> = proximal.iter().chain(similar.iter()).collect();
    if inputs.is_empty() {
        return Vec::new();
    }
    let idx = tree.index();
    let mut dsu = DisjointSet::new(inputs.len());
    let mut owner: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    for (ri, region) in inputs.iter().enumerate() {
        for member in &region.members {
            match owner.get(member.as_str()) {
                Some(&prev) => dsu.union(prev, ri),
                None => {
                    owner.insert(member.as_str(), ri);
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for ri in 0..inputs.len() {
        classes.entry(dsu.find(ri)).or_default().push(ri);
    }
    let mut out: Vec<(usize, Region)> = Vec::new();
    for group in classes.into_values() {
        let region = if group.len() == 1 {
            inputs[group[0]].clone()
        } else {
            let mut members: Vec<String> = group
                .iter()
                .flat_map(|&ri| inputs[ri].members.iter().cloned())
                .collect();
            members.sort_by_key(|id| idx.dfs_pos(id).unwrap_or(usize::MAX));
            members.dedup();
            Region {
                kind: RegionKind::Merged,
                members,
                parent_initial: inputs[group[0]].parent_initial.clone(),
            }
        };
        let first_pos = region
            .members
            .first()
            .and_then(|id| idx.dfs_pos(id))
            .unwrap_or(usize::MAX);
        out.push((first_pos, region));
    }
    out.sort_by_key(|(pos, _)| *pos);
    out.into_iter().map(|(_, r)| r).collect()
}

/// Full grouping outcome for one tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingOutcome {
    pub initial: Vec<Region>,
    /// Proximity partition of every initial region (singletons included).
    pub proximal: Vec<Region>,
    /// Similarity partition of every initial region (singletons included).
    pub similar: Vec<Region>,
    /// Final partition of all grouped nodes after overlap merging; only
    /// groups of two or more members take part.
    pub merged: Vec<Region>,
    pub notes: SimilarityNotes,
}

/// Runs both grouping passes over every initial region and merges the
/// overlaps. Singleton proximity/similarity components do not form groups
/// on their own.
pub fn group_regions(
    tree: &ViewTree,
    screenshot: Option<&GrayImage>,
    cfg: &GroupingConfig,
    strict: bool,
) -> Result<GroupingOutcome> {
    cfg.validate()?;
    let initial = initial_regions(tree);
    let mut proximal = Vec::new();
    let mut similar = Vec::new();
    let mut notes = SimilarityNotes::default();
    for region in &initial {
        proximal.extend(proximal_regions(region, tree, cfg, strict)?);
        let (sim, n) = similar_regions(region, tree, screenshot, cfg)?;
        notes.absorb(n);
        similar.extend(sim);
    }
    let grouped = |rs: &[Region]| -> Vec<Region> {
        rs.iter().filter(|r| r.members.len() >= 2).cloned().collect()
    };
    let merged = merge_overlapping(&grouped(&proximal), &grouped(&similar), tree);
    Ok(GroupingOutcome { initial, proximal, similar, merged, notes })
}
