//! Synthetic screens: builders, drawing helpers, and seeded generators
//! used by tests, benchmarks, and the demo assets.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flow::{extract_baseline_flow, filter_flow, FlowOrigin, NavFlow};
use crate::hierarchy::{canonical_class, Bounds, SourceFormat, ViewNode, ViewTree, Visibility};
use crate::metrics::sequence_similarity;
use crate::redraw::redraw_flow;
use crate::regions::{group_regions, GroupingConfig, Region, RegionKind};
use crate::vision::GrayImage;

/// Fluent constructor for synthetic view nodes.
#[derive(Debug, Clone)]
pub struct NodeBuilder {
    node: ViewNode,
}

impl NodeBuilder {
    /// A leaf-style node: focusable, enabled, visible.
    pub fn new(id: &str, class: &str, bounds: (u32, u32, u32, u32)) -> NodeBuilder {
        let (left, top, width, height) = bounds;
        NodeBuilder {
            node: ViewNode {
                id: id.to_string(),
                resource_id: String::new(),
                view_class: canonical_class(class),
                text: String::new(),
                bounds: Bounds::new(left, top, width, height),
                focusable: true,
                enabled: true,
                clickable: false,
                visibility: Visibility::Visible,
                children: Vec::new(),
            },
        }
    }

    /// A container-style node: not focusable itself.
    pub fn container(id: &str, class: &str, bounds: (u32, u32, u32, u32)) -> NodeBuilder {
        NodeBuilder::new(id, class, bounds).focusable(false)
    }

    pub fn focusable(mut self, v: bool) -> NodeBuilder {
        self.node.focusable = v;
        self
    }

    pub fn enabled(mut self, v: bool) -> NodeBuilder {
        self.node.enabled = v;
        self
    }

    pub fn clickable(mut self, v: bool) -> NodeBuilder {
        self.node.clickable = v;
        self
    }

    pub fn visibility(mut self, v: Visibility) -> NodeBuilder {
        self.node.visibility = v;
        self
    }

    pub fn resource(mut self, resource_id: &str) -> NodeBuilder {
        self.node.resource_id = resource_id.to_string();
        self
    }

    pub fn text(mut self, text: &str) -> NodeBuilder {
        self.node.text = text.to_string();
        self
    }

    pub fn child(mut self, child: ViewNode) -> NodeBuilder {
        self.node.children.push(child);
        self
    }

    pub fn build(self) -> ViewNode {
        self.node
    }
}

/// A plain focusable leaf.
pub fn leaf(id: &str, class: &str, bounds: (u32, u32, u32, u32)) -> ViewNode {
    NodeBuilder::new(id, class, bounds).build()
}

/// Wraps a root node into a tree whose screen equals the root bounds.
pub fn tree_of(root: ViewNode) -> ViewTree {
    ViewTree {
        screen: root.bounds,
        root,
        source: SourceFormat::RgnfJson,
    }
}

/// Draws a rectangular ring just inside `bounds`.
pub fn draw_rect_outline(img: &mut GrayImage, bounds: &Bounds, value: f32, thickness: u32) {
    for t in 0..thickness {
        let left = bounds.left + t;
        let top = bounds.top + t;
        let right = bounds.right().saturating_sub(1 + t);
        let bottom = bounds.bottom().saturating_sub(1 + t);
        if left > right || top > bottom {
            return;
        }
        for x in left..=right {
            put(img, x, top, value);
            put(img, x, bottom, value);
        }
        for y in top..=bottom {
            put(img, left, y, value);
            put(img, right, y, value);
        }
    }
}

/// Fills the whole rectangle.
pub fn fill_rect(img: &mut GrayImage, bounds: &Bounds, value: f32) {
    for y in bounds.top..bounds.bottom() {
        for x in bounds.left..bounds.right() {
            put(img, x, y, value);
        }
    }
}

fn put(img: &mut GrayImage, x: u32, y: u32, value: f32) {
    if x < img.width() && y < img.height() {
        img.set(x, y, value);
    }
}

/// Baseline swipe order of [`menu_screen`].
pub const MENU_BASELINE: [&str; 20] = [
    "button1", "button2", "text3", "text4", "text5", "text6", "text7", "text8", "text9",
    "image10", "button11", "text15", "button16", "button17", "button12", "button13",
    "button14", "image18", "image19", "image20",
];

/// Redrawn swipe order of [`menu_screen`]: label/value pairs interleave and
/// the four identical menu buttons read as one block.
pub const MENU_REDRAWN: [&str; 20] = [
    "button1", "button2", "text3", "text4", "text7", "text5", "text8", "text6", "text9",
    "image10", "button11", "button12", "button13", "button14", "text15", "button16",
    "button17", "image18", "image19", "image20",
];

/// A menu screen whose default swipe order splits its label/value grid and
/// scatters a column of identical action buttons. Returns the hierarchy and
/// a schematic screenshot (white component outlines on black).
pub fn menu_screen() -> (ViewTree, GrayImage) {
    let header = NodeBuilder::container("header", "android.widget.LinearLayout", (0, 0, 1080, 160))
        .child(
            NodeBuilder::new("button1", "android.widget.Button", (40, 48, 140, 64))
                .resource("app:id/nav_back")
                .text("Back")
                .clickable(true)
                .build(),
        )
        .child(
            NodeBuilder::new("button2", "android.widget.Button", (600, 48, 200, 56))
                .resource("app:id/nav_search")
                .text("Search")
                .clickable(true)
                .build(),
        )
        .child(
            NodeBuilder::new("text3", "android.widget.TextView", (860, 52, 180, 40))
                .resource("app:id/account_name")
                .text("Alex")
                .build(),
        )
        .build();

    let mut grid =
        NodeBuilder::container("grid", "android.widget.RelativeLayout", (0, 280, 1080, 120));
    let labels = ["Songs", "Albums", "Artists"];
    let values = ["128", "16", "9"];
    for (i, label) in labels.iter().enumerate() {
        let x = 60 + i as u32 * 370;
        grid = grid.child(
            NodeBuilder::new(
                &format!("text{}", 4 + i),
                "android.widget.TextView",
                (x, 300, 150, 28),
            )
            .resource(&format!("app:id/stat_label_{i}"))
            .text(label)
            .build(),
        );
    }
    for (i, value) in values.iter().enumerate() {
        let x = 60 + i as u32 * 370;
        grid = grid.child(
            NodeBuilder::new(
                &format!("text{}", 7 + i),
                "android.widget.TextView",
                (x, 332, 90, 24),
            )
            .resource(&format!("app:id/stat_value_{i}"))
            .text(value)
            .build(),
        );
    }
    let grid = grid.build();

    let banner = NodeBuilder::new("image10", "android.widget.ImageView", (60, 420, 960, 540))
        .resource("app:id/banner")
        .text("Now playing")
        .build();

    let mut panel =
        NodeBuilder::container("panel", "android.widget.LinearLayout", (0, 980, 1080, 480));
    panel = panel.child(
        NodeBuilder::new("button11", "android.widget.Button", (60, 1000, 200, 80))
            .resource("app:id/menu_play")
            .text("Play")
            .clickable(true)
            .build(),
    );
    panel = panel.child(
        NodeBuilder::new("text15", "android.widget.TextView", (300, 1010, 300, 40))
            .resource("app:id/queue_title")
            .text("Up next")
            .build(),
    );
    panel = panel.child(
        NodeBuilder::new("button16", "android.widget.Button", (300, 1070, 120, 50))
            .resource("app:id/queue_clear")
            .text("Clear")
            .clickable(true)
            .build(),
    );
    panel = panel.child(
        NodeBuilder::new("button17", "android.widget.Button", (460, 1070, 150, 50))
            .resource("app:id/queue_save")
            .text("Save")
            .clickable(true)
            .build(),
    );
    for (i, label) in ["Shuffle", "Repeat", "Stop"].iter().enumerate() {
        panel = panel.child(
            NodeBuilder::new(
                &format!("button{}", 12 + i),
                "android.widget.Button",
                (60, 1120 + i as u32 * 120, 200, 80),
            )
            .resource(&format!("app:id/menu_{}", label.to_lowercase()))
            .text(label)
            .clickable(true)
            .build(),
        );
    }
    let panel = panel.build();

    let mut bottom =
        NodeBuilder::container("bottom", "android.widget.LinearLayout", (0, 1780, 1080, 140));
    for (i, label) in ["Home", "Library", "Settings"].iter().enumerate() {
        bottom = bottom.child(
            NodeBuilder::new(
                &format!("image{}", 18 + i),
                "android.widget.ImageView",
                (100 + i as u32 * 400, 1800, 80, 80),
            )
            .resource(&format!("app:id/tab_{}", label.to_lowercase()))
            .text(label)
            .clickable(true)
            .build(),
        );
    }
    let bottom = bottom.build();

    let root = NodeBuilder::container("root", "android.widget.FrameLayout", (0, 0, 1080, 1920))
        .child(header)
        .child(grid)
        .child(banner)
        .child(panel)
        .child(bottom)
        .build();
    let tree = tree_of(root);

    let mut img = GrayImage::new(1080, 1920, 0.0);
    for node in tree.nodes() {
        if !node.is_container() {
            draw_rect_outline(&mut img, &node.bounds, 1.0, 2);
        }
    }
    (tree, img)
}

/// A single toolbar row: a wide label tight against a small button, a lone
/// medium button, and a second label/button pair. The two small buttons
/// share a size but carry different glyphs.
pub fn toolbar_strip() -> (ViewTree, GrayImage) {
    let root = NodeBuilder::container("root", "androidx.appcompat.widget.Toolbar", (0, 0, 1080, 620))
        .child(
            NodeBuilder::new("text5", "android.widget.TextView", (25, 545, 256, 28))
                .resource("app:id/title")
                .text("Inbox")
                .build(),
        )
        .child(
            NodeBuilder::new("button6", "android.widget.Button", (286, 545, 28, 28))
                .resource("app:id/refresh")
                .text("Refresh")
                .clickable(true)
                .build(),
        )
        .child(
            NodeBuilder::new("button7", "android.widget.Button", (542, 545, 38, 38))
                .resource("app:id/compose")
                .text("Compose")
                .clickable(true)
                .build(),
        )
        .child(
            NodeBuilder::new("text8", "android.widget.TextView", (872, 545, 128, 28))
                .resource("app:id/filter_label")
                .text("Unread")
                .build(),
        )
        .child(
            NodeBuilder::new("button9", "android.widget.Button", (1004, 545, 28, 28))
                .resource("app:id/filter_toggle")
                .text("Toggle")
                .clickable(true)
                .build(),
        )
        .build();
    let tree = tree_of(root);

    let mut img = GrayImage::new(1080, 620, 0.0);
    for node in tree.nodes() {
        if !node.is_container() {
            draw_rect_outline(&mut img, &node.bounds, 1.0, 2);
        }
    }
    // Distinct glyphs keep the equally sized buttons from reading as
    // duplicates: button9 gets a filled center pip, button7 a center dot.
    fill_rect(&mut img, &Bounds::new(1014, 555, 8, 8), 1.0);
    fill_rect(&mut img, &Bounds::new(559, 562, 4, 4), 1.0);
    (tree, img)
}

/// A screen with touchable components but nothing focusable: every leaf is
/// either disabled or focus-transparent.
pub fn unfocusable_screen() -> ViewTree {
    tree_of(
        NodeBuilder::container("root", "android.widget.LinearLayout", (0, 0, 600, 200))
            .child(
                NodeBuilder::new("label", "android.widget.TextView", (20, 20, 200, 40))
                    .focusable(false)
                    .build(),
            )
            .child(
                NodeBuilder::new("ghost", "android.widget.Button", (20, 100, 200, 60))
                    .enabled(false)
                    .build(),
            )
            .build(),
    )
}

/// One synthetic GUI with its ground-truth reading order.
#[derive(Debug, Clone)]
pub struct AblationCase {
    pub id: String,
    pub tree: ViewTree,
    pub truth: NavFlow,
}

const CASE_CLASSES: [&str; 4] = [
    "android.widget.Button",
    "android.widget.TextView",
    "android.widget.ImageView",
    "android.widget.CheckBox",
];

/// Seeded corpus of screens that each carry at least one invisible or
/// focus-transparent component in a non-trailing position. The ground truth
/// is the reading order after filtering and redrawing; skipping the filter
/// provably degrades it on every case.
pub fn ablation_corpus(count: usize, seed: u64) -> Vec<AblationCase> {
    let cfg = GroupingConfig::default();
    let mut cases = Vec::with_capacity(count);
    for case in 0..count {
        let mut accepted = None;
        for salt in 0..64u64 {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ ((case as u64) << 16) ^ (salt << 40));
            let tree = random_screen(&mut rng);
            let baseline = extract_baseline_flow(&tree);
            let (filtered, report) = match filter_flow(&baseline, &tree) {
                Ok(v) => v,
                Err(_) => continue,
            };
            if report.removed_total() == 0 || filtered.is_empty() {
                continue;
            }
            let grouping = match group_regions(&tree, None, &cfg, false) {
                Ok(g) => g,
                Err(_) => continue,
            };
            let redrawn = match redraw_flow(&tree, &grouping.merged, &filtered) {
                Ok(r) => r.flow,
                Err(_) => continue,
            };
            let unfiltered = match redraw_flow(&tree, &grouping.merged, &baseline) {
                Ok(r) => r.flow,
                Err(_) => continue,
            };
            let truth = NavFlow::new(FlowOrigin::GroundTruth, redrawn.order.clone());
            let degraded = match sequence_similarity(&truth, &unfiltered) {
                Ok(r) => r.s < 1.0,
                Err(_) => continue,
            };
            if degraded {
                accepted = Some(AblationCase {
                    id: format!("gui{case:02}"),
                    tree,
                    truth,
                });
                break;
            }
        }
        cases.push(accepted.expect("seeded screen generation converges"));
    }
    cases
}

fn random_screen(rng: &mut impl Rng) -> ViewTree {
    let containers = rng.random_range(2..=4);
    let mut counter = 0usize;
    let mut root =
        NodeBuilder::container("root", "android.widget.FrameLayout", (0, 0, 1200, 1600));
    for c in 0..containers {
        let top = 60 + c as u32 * 320;
        let mut row = NodeBuilder::container(
            &format!("row{c}"),
            "android.widget.LinearLayout",
            (0, top, 1200, 280),
        );
        let leaves = rng.random_range(2..=5);
        let defect_at = rng.random_range(0..leaves - 1);
        let mut x = 20u32;
        for l in 0..leaves {
            counter += 1;
            let class = CASE_CLASSES[rng.random_range(0..CASE_CLASSES.len())];
            let width = rng.random_range(90..=220) as u32;
            let height = rng.random_range(60..=200) as u32;
            let id = format!("node{counter}");
            let mut b = NodeBuilder::new(&id, class, (x, top + 20, width, height));
            if rng.random_bool(0.8) {
                b = b.resource(&format!("app:id/item{counter}"));
            }
            let is_last = l == leaves - 1;
            if l == defect_at && !is_last && rng.random_bool(0.85) {
                b = match rng.random_range(0..3) {
                    0 => b.visibility(if rng.random_bool(0.5) {
                        Visibility::Gone
                    } else {
                        Visibility::Invisible
                    }),
                    1 => b.enabled(false),
                    _ => b.focusable(false),
                };
            }
            row = row.child(b.build());
            let gap = if rng.random_bool(0.3) {
                rng.random_range(4..=12)
            } else {
                rng.random_range(40..=160)
            };
            x += width + gap as u32;
        }
        root = root.child(row.build());
    }
    tree_of(root.build())
}

/// A random flat-or-nested screen with up to `max_leaves` focusable leaves,
/// ids `a`, `b`, `c`, ...
pub fn random_tree(rng: &mut impl Rng, max_leaves: usize) -> ViewTree {
    const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
    let leaves = rng.random_range(1..=max_leaves.min(NAMES.len()));
    let nested = leaves >= 3 && rng.random_bool(0.5);
    let mut root =
        NodeBuilder::container("root", "android.widget.LinearLayout", (0, 0, 400, 1000));
    let split = if nested { rng.random_range(1..leaves) } else { leaves };
    for (i, name) in NAMES.iter().take(split).enumerate() {
        root = root.child(leaf(
            name,
            "android.widget.Button",
            (10, 10 + i as u32 * 100, 80, 80),
        ));
    }
    if nested {
        let mut inner = NodeBuilder::container(
            "inner",
            "android.widget.LinearLayout",
            (100, 0, 300, 1000),
        );
        for (i, name) in NAMES.iter().take(leaves).skip(split).enumerate() {
            inner = inner.child(leaf(
                name,
                "android.widget.Button",
                (110, 10 + i as u32 * 100, 80, 80),
            ));
        }
        root = root.child(inner.build());
    }
    tree_of(root.build())
}

/// A random partition of `ids` into regions; chunks of one sometimes appear
/// as explicit singleton regions, member order within a region is shuffled.
pub fn random_partition(rng: &mut impl Rng, ids: &[String]) -> Vec<Region> {
    let mut pool: Vec<String> = ids.to_vec();
    pool.shuffle(rng);
    let mut regions = Vec::new();
    let mut i = 0;
    while i < pool.len() {
        let remaining = pool.len() - i;
        let size = rng.random_range(1..=remaining.min(4));
        if size >= 2 || rng.random_bool(0.3) {
            regions.push(Region {
                kind: RegionKind::Merged,
                members: pool[i..i + size].to_vec(),
                parent_initial: Some("root".into()),
            });
        }
        i += size;
    }
    regions
}
