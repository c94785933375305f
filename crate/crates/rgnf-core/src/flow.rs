//! Baseline navigation flow and screen-reader filtering.
//!
//! The baseline flow is the order a swipe-right traversal visits content
//! nodes: document-order DFS with containers skipped. Filtering removes
//! nodes a screen reader never lands on (invisible, unfocusable) or lands
//! on silently (enabled but not focusable), reconnecting the survivors.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hierarchy::{ViewNode, ViewTree, Visibility};
use crate::Result;

/// Provenance of a navigation flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowOrigin {
    Baseline,
    Filtered,
    Redrawn,
    GroundTruth,
}

/// A navigation flow: node ids in visit order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavFlow {
    pub origin: FlowOrigin,
    pub order: Vec<String>,
}

impl NavFlow {
    pub fn new(origin: FlowOrigin, order: Vec<String>) -> NavFlow {
        NavFlow { origin, order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Checks the flow invariants against its tree: no duplicate ids and
    /// every id resolves.
    pub fn validate(&self, tree: &ViewTree) -> Result<()> {
        let idx = tree.index();
        let mut seen = std::collections::HashSet::new();
        for id in &self.order {
            idx.require(id)?;
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(())
    }
}

/// Whether a screen reader can perceive the node at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisibilityClass {
    Visible,
    Invisible,
}

/// How a visible node responds to screen-reader focus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Focusability {
    Focusable,
    Unfocusable,
    /// Reachable by the reader but produces no output (enabled yet not
    /// focusable).
    ReachableSilent,
}

/// Report of what [`filter_flow`] removed and how survivors were rejoined.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub removed_invisible: Vec<String>,
    pub removed_unfocusable: Vec<String>,
    pub removed_silent: Vec<String>,
    /// Pairs (pred, succ) made adjacent by an internal deletion.
    pub reconnections: Vec<(String, String)>,
}

impl FilterReport {
    pub fn removed_total(&self) -> usize {
        self.removed_invisible.len() + self.removed_unfocusable.len() + self.removed_silent.len()
    }
}

/// Lists every non-container node in DFS pre-order.
pub fn extract_baseline_flow(tree: &ViewTree) -> NavFlow {
    let order = tree
        .nodes()
        .iter()
        .filter(|n| !n.is_container())
        .map(|n| n.id.clone())
        .collect();
    NavFlow::new(FlowOrigin::Baseline, order)
}

/// A node is invisible when it is declared hidden, its class marks it as
/// hidden, it cannot respond to events (disabled and not clickable), or it
/// has no area on screen.
pub fn classify_visibility(node: &ViewNode) -> VisibilityClass {
    let hidden_class =
        node.view_class.contains("hidden-element") || node.view_class.contains("invisible");
    if node.visibility != Visibility::Visible
        || hidden_class
        || (!node.enabled && !node.clickable)
        || node.bounds.area() == 0
    {
        VisibilityClass::Invisible
    } else {
        VisibilityClass::Visible
    }
}

/// Classifies how screen-reader focus treats a visible node.
pub fn classify_focusability(node: &ViewNode) -> Focusability {
    match (node.focusable, node.enabled) {
        (true, true) => Focusability::Focusable,
        (false, true) => Focusability::ReachableSilent,
        _ => Focusability::Unfocusable,
    }
}

/// Removes invisible, unfocusable, and silent nodes from a flow, recording
/// a reconnection for every internal deletion. Leading and trailing
/// deletions drop without one.
pub fn filter_flow(flow: &NavFlow, tree: &ViewTree) -> Result<(NavFlow, FilterReport)> {
    if !matches!(flow.origin, FlowOrigin::Baseline | FlowOrigin::Filtered) {
        return Err(Error::InvalidParameter(format!(
            "filter_flow expects a baseline or filtered flow, got {:?}",
            flow.origin
        )));
    }
    let idx = tree.index();
    let mut kept: Vec<String> = Vec::with_capacity(flow.order.len());
    let mut report = FilterReport::default();
    let mut pending_removal = false;
    for id in &flow.order {
        let node = idx.require(id)?;
        let removed_bucket = match classify_visibility(node) {
            VisibilityClass::Invisible => Some(&mut report.removed_invisible),
            VisibilityClass::Visible => match classify_focusability(node) {
                Focusability::Focusable => None,
                Focusability::ReachableSilent => Some(&mut report.removed_silent),
                Focusability::Unfocusable => Some(&mut report.removed_unfocusable),
            },
        };
        match removed_bucket {
            Some(bucket) => {
                bucket.push(id.clone());
                if !kept.is_empty() {
                    pending_removal = true;
                }
            }
            None => {
                if pending_removal {
                    let pred = kept.last().expect("pending removal implies a survivor");
                    report.reconnections.push((pred.clone(), id.clone()));
                    pending_removal = false;
                }
                kept.push(id.clone());
            }
        }
    }
    Ok((NavFlow::new(FlowOrigin::Filtered, kept), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::Bounds;
    use crate::synth::{leaf, tree_of, NodeBuilder};

    fn three_leaf_tree() -> ViewTree {
        tree_of(
            NodeBuilder::container("root", "linearlayout", (0, 0, 1080, 1920))
                .child(leaf("i", "button", (0, 0, 100, 50)))
                .child(leaf("j", "button", (0, 60, 100, 50)))
                .child(leaf("k", "button", (0, 120, 100, 50)))
                .build(),
        )
    }

    #[test]
    fn baseline_skips_containers() {
        let tree = tree_of(
            NodeBuilder::container("root", "framelayout", (0, 0, 500, 500))
                .child(
                    NodeBuilder::container("c1", "linearlayout", (0, 0, 500, 200))
                        .child(leaf("a", "textview", (0, 0, 100, 40)))
                        .child(leaf("b", "button", (110, 0, 100, 40)))
                        .build(),
                )
                .child(leaf("c", "imageview", (0, 210, 100, 100)))
                .build(),
        );
        let flow = extract_baseline_flow(&tree);
        assert_eq!(flow.origin, FlowOrigin::Baseline);
        assert_eq!(flow.order, ["a", "b", "c"]);
    }

    #[test]
    fn baseline_singleton_tree() {
        let tree = tree_of(leaf("only", "button", (0, 0, 10, 10)));
        assert_eq!(extract_baseline_flow(&tree).order, ["only"]);
    }

    #[test]
    fn baseline_empty_when_all_containers() {
        let tree = tree_of(NodeBuilder::container("root", "linearlayout", (0, 0, 9, 9)).build());
        assert!(extract_baseline_flow(&tree).is_empty());
    }

    #[test]
    fn visibility_rules() {
        let visible = leaf("a", "button", (0, 0, 10, 10));
        assert_eq!(classify_visibility(&visible), VisibilityClass::Visible);

        let gone = NodeBuilder::new("a", "button", (0, 0, 10, 10))
            .visibility(Visibility::Gone)
            .build();
        assert_eq!(classify_visibility(&gone), VisibilityClass::Invisible);

        let declared = NodeBuilder::new("a", "button", (0, 0, 10, 10))
            .visibility(Visibility::Invisible)
            .build();
        assert_eq!(classify_visibility(&declared), VisibilityClass::Invisible);

        let hidden_class = leaf("a", "hidden-element-view", (0, 0, 10, 10));
        assert_eq!(classify_visibility(&hidden_class), VisibilityClass::Invisible);

        let invisible_class = leaf("a", "invisiblebutton", (0, 0, 10, 10));
        assert_eq!(classify_visibility(&invisible_class), VisibilityClass::Invisible);

        let inert = NodeBuilder::new("a", "button", (0, 0, 10, 10))
            .enabled(false)
            .clickable(false)
            .build();
        assert_eq!(classify_visibility(&inert), VisibilityClass::Invisible);

        let disabled_clickable = NodeBuilder::new("a", "button", (0, 0, 10, 10))
            .enabled(false)
            .clickable(true)
            .build();
        assert_eq!(classify_visibility(&disabled_clickable), VisibilityClass::Visible);

        let flat = leaf("a", "button", (0, 0, 0, 10));
        assert_eq!(classify_visibility(&flat), VisibilityClass::Invisible);
    }

    #[test]
    fn focusability_rules() {
        let f = |focusable: bool, enabled: bool| {
            classify_focusability(
                &NodeBuilder::new("a", "button", (0, 0, 10, 10))
                    .focusable(focusable)
                    .enabled(enabled)
                    .clickable(true)
                    .build(),
            )
        };
        assert_eq!(f(true, true), Focusability::Focusable);
        assert_eq!(f(false, true), Focusability::ReachableSilent);
        assert_eq!(f(true, false), Focusability::Unfocusable);
        assert_eq!(f(false, false), Focusability::Unfocusable);
    }

    fn silent(id: &str, y: u32) -> ViewNode {
        NodeBuilder::new(id, "button", (0, y, 100, 50))
            .focusable(false)
            .build()
    }

    fn invisible(id: &str, y: u32) -> ViewNode {
        NodeBuilder::new(id, "button", (0, y, 100, 50))
            .visibility(Visibility::Invisible)
            .build()
    }

    #[test]
    fn internal_removal_reconnects() {
        let tree = tree_of(
            NodeBuilder::container("root", "linearlayout", (0, 0, 1000, 1000))
                .child(leaf("i", "button", (0, 0, 100, 50)))
                .child(silent("j", 60))
                .child(leaf("k", "button", (0, 120, 100, 50)))
                .build(),
        );
        let baseline = extract_baseline_flow(&tree);
        let (filtered, report) = filter_flow(&baseline, &tree).unwrap();
        assert_eq!(filtered.origin, FlowOrigin::Filtered);
        assert_eq!(filtered.order, ["i", "k"]);
        assert_eq!(report.removed_silent, ["j"]);
        assert!(report.removed_invisible.is_empty());
        assert!(report.removed_unfocusable.is_empty());
        assert_eq!(report.reconnections, [("i".to_string(), "k".to_string())]);
    }

    #[test]
    fn run_of_removals_yields_single_reconnection() {
        let tree = tree_of(
            NodeBuilder::container("root", "linearlayout", (0, 0, 1000, 1000))
                .child(leaf("a", "button", (0, 0, 100, 50)))
                .child(invisible("b", 60))
                .child(invisible("c", 120))
                .child(leaf("d", "button", (0, 180, 100, 50)))
                .build(),
        );
        let (filtered, report) = filter_flow(&extract_baseline_flow(&tree), &tree).unwrap();
        assert_eq!(filtered.order, ["a", "d"]);
        assert_eq!(report.removed_invisible, ["b", "c"]);
        assert_eq!(report.reconnections, [("a".to_string(), "d".to_string())]);
    }

    #[test]
    fn leading_and_trailing_removals_have_no_reconnection() {
        let tree = tree_of(
            NodeBuilder::container("root", "linearlayout", (0, 0, 1000, 1000))
                .child(invisible("x", 0))
                .child(leaf("a", "button", (0, 60, 100, 50)))
                .child(leaf("b", "button", (0, 120, 100, 50)))
                .child(silent("y", 180))
                .build(),
        );
        let (filtered, report) = filter_flow(&extract_baseline_flow(&tree), &tree).unwrap();
        assert_eq!(filtered.order, ["a", "b"]);
        assert!(report.reconnections.is_empty());
        assert_eq!(report.removed_total(), 2);
    }

    #[test]
    fn clean_flow_passes_through() {
        let tree = three_leaf_tree();
        let baseline = extract_baseline_flow(&tree);
        let (filtered, report) = filter_flow(&baseline, &tree).unwrap();
        assert_eq!(filtered.order, baseline.order);
        assert_eq!(report, FilterReport::default());
    }

    #[test]
    fn filtering_is_idempotent() {
        let tree = tree_of(
            NodeBuilder::container("root", "linearlayout", (0, 0, 1000, 1000))
                .child(leaf("a", "button", (0, 0, 100, 50)))
                .child(silent("s", 60))
                .child(invisible("v", 120))
                .child(leaf("b", "button", (0, 180, 100, 50)))
                .build(),
        );
        let (once, _) = filter_flow(&extract_baseline_flow(&tree), &tree).unwrap();
        let (twice, report) = filter_flow(&once, &tree).unwrap();
        assert_eq!(once.order, twice.order);
        assert_eq!(report.removed_total(), 0);
        assert!(report.reconnections.is_empty());
    }

    #[test]
    fn survivor_count_matches_report() {
        let tree = tree_of(
            NodeBuilder::container("root", "linearlayout", (0, 0, 1000, 1000))
                .child(invisible("v1", 0))
                .child(leaf("a", "button", (0, 60, 100, 50)))
                .child(silent("s1", 120))
                .child(
                    NodeBuilder::new("u1", "checkbox", (0, 180, 100, 50))
                        .focusable(true)
                        .enabled(false)
                        .clickable(true)
                        .build(),
                )
                .child(leaf("b", "button", (0, 240, 100, 50)))
                .build(),
        );
        let baseline = extract_baseline_flow(&tree);
        let (filtered, report) = filter_flow(&baseline, &tree).unwrap();
        assert_eq!(filtered.len(), baseline.len() - report.removed_total());
        assert_eq!(report.removed_unfocusable, ["u1"]);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let tree = three_leaf_tree();
        let flow = NavFlow::new(FlowOrigin::Baseline, vec!["ghost".into()]);
        match filter_flow(&flow, &tree) {
            Err(Error::UnknownNode(id)) => assert_eq!(id, "ghost"),
            other => panic!("expected unknown-node error, got {other:?}"),
        }
    }

    #[test]
    fn redrawn_flow_rejected() {
        let tree = three_leaf_tree();
        let flow = NavFlow::new(FlowOrigin::Redrawn, vec!["i".into()]);
        assert!(filter_flow(&flow, &tree).is_err());
    }

    #[test]
    fn flow_serialization_shape() {
        let flow = NavFlow::new(FlowOrigin::GroundTruth, vec!["a".into(), "b".into()]);
        let json = serde_json::to_string(&flow).unwrap();
        assert_eq!(json, r#"{"origin":"ground_truth","order":["a","b"]}"#);
        let back: NavFlow = serde_json::from_str(&json).unwrap();
        assert_eq!(back, flow);
    }

    #[test]
    fn validate_catches_duplicates_and_ghosts() {
        let tree = three_leaf_tree();
        let dup = NavFlow::new(FlowOrigin::Baseline, vec!["i".into(), "i".into()]);
        assert!(matches!(dup.validate(&tree), Err(Error::DuplicateId(_))));
        let ghost = NavFlow::new(FlowOrigin::Baseline, vec!["zz".into()]);
        assert!(matches!(ghost.validate(&tree), Err(Error::UnknownNode(_))));
        let ok = NavFlow::new(FlowOrigin::Baseline, vec!["i".into(), "k".into()]);
        assert!(ok.validate(&tree).is_ok());
    }

    #[test]
    fn invisible_nodes_never_survive() {
        let cases = [
            NodeBuilder::new("z", "button", (0, 0, 10, 10))
                .visibility(Visibility::Gone)
                .build(),
            leaf("z", "hidden-element", (0, 0, 10, 10)),
            NodeBuilder::new("z", "button", (0, 0, 10, 10))
                .enabled(false)
                .clickable(false)
                .build(),
            leaf("z", "button", (5, 5, 0, 0)),
        ];
        for node in cases {
            let bounds = Bounds::new(0, 0, 1000, 1000);
            let tree = tree_of(
                NodeBuilder::container("root", "linearlayout", (0, 0, bounds.width, bounds.height))
                    .child(node)
                    .build(),
            );
            let (filtered, _) = filter_flow(&extract_baseline_flow(&tree), &tree).unwrap();
            assert!(!filtered.order.contains(&"z".to_string()));
        }
    }
}
