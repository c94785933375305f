//! View-hierarchy model and parsers.
//!
//! Two input formats are supported: uiautomator XML dumps (`<node>` elements
//! with `bounds="[x1,y1][x2,y2]"` attributes) and a compact JSON form in
//! which bounds are written `[[height,width],[x,y]]`. Both parse into the
//! same [`ViewTree`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::vision::GrayImage;
use crate::Result;

/// Coordinates are capped well below `u32::MAX` so that derived sums
/// (`right`, `bottom`, areas) never overflow in later arithmetic.
pub const MAX_COORD: i64 = 10_000_000;

/// Axis-aligned rectangle in screen pixels. `width`/`height` may be zero;
/// zero-area nodes parse fine and are flagged invisible downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub left: u32,
    pub top: u32,
    pub width: u32,
    pub height: u32,
}

impl Bounds {
    pub fn new(left: u32, top: u32, width: u32, height: u32) -> Bounds {
        Bounds { left, top, width, height }
    }

    /// Builds bounds from corner coordinates, validating orientation.
    pub fn from_corners(x1: i64, y1: i64, x2: i64, y2: i64, node: &str) -> Result<Bounds> {
        for (v, what) in [(x1, "x1"), (y1, "y1"), (x2, "x2"), (y2, "y2")] {
            if v < 0 {
                return Err(Error::InvalidBounds {
                    node: node.to_string(),
                    reason: format!("negative coordinate {what}={v}"),
                });
            }
            if v > MAX_COORD {
                return Err(Error::InvalidBounds {
                    node: node.to_string(),
                    reason: format!("coordinate {what}={v} exceeds {MAX_COORD}"),
                });
            }
        }
        if x2 < x1 || y2 < y1 {
            return Err(Error::InvalidBounds {
                node: node.to_string(),
                reason: format!("inverted corners [{x1},{y1}][{x2},{y2}]"),
            });
        }
        Ok(Bounds::new(x1 as u32, y1 as u32, (x2 - x1) as u32, (y2 - y1) as u32))
    }

    /// Builds bounds from `left/top/width/height`, validating ranges.
    pub fn from_extents(left: i64, top: i64, width: i64, height: i64, node: &str) -> Result<Bounds> {
        for (v, what) in [(left, "x"), (top, "y"), (width, "width"), (height, "height")] {
            if v < 0 {
                return Err(Error::InvalidBounds {
                    node: node.to_string(),
                    reason: format!("negative {what}={v}"),
                });
            }
            if v > MAX_COORD {
                return Err(Error::InvalidBounds {
                    node: node.to_string(),
                    reason: format!("{what}={v} exceeds {MAX_COORD}"),
                });
            }
        }
        Ok(Bounds::new(left as u32, top as u32, width as u32, height as u32))
    }

    pub fn right(&self) -> u32 {
        self.left + self.width
    }

    pub fn bottom(&self) -> u32 {
        self.top + self.height
    }

    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.left as f64 + self.width as f64 / 2.0,
            self.top as f64 + self.height as f64 / 2.0,
        )
    }

    pub fn intersect(&self, other: &Bounds) -> Option<Bounds> {
        let left = self.left.max(other.left);
        let top = self.top.max(other.top);
        let right = self.right().min(other.right());
        let bottom = self.bottom().min(other.bottom());
        if right <= left || bottom <= top {
            return None;
        }
        Some(Bounds::new(left, top, right - left, bottom - top))
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}][{},{}]",
            self.left,
            self.top,
            self.right(),
            self.bottom()
        )
    }
}

/// Declared visibility of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Visible,
    Invisible,
    Gone,
}

impl Visibility {
    fn parse(s: &str, node: &str) -> Result<Visibility> {
        match s {
            "visible" => Ok(Visibility::Visible),
            "invisible" => Ok(Visibility::Invisible),
            "gone" => Ok(Visibility::Gone),
            other => Err(Error::MalformedInput(format!(
                "node {node}: unknown visibility {other:?}"
            ))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Visibility::Visible => "visible",
            Visibility::Invisible => "invisible",
            Visibility::Gone => "gone",
        }
    }
}

/// Coarse widget role derived from the class name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    TextView,
    ImageView,
    Button,
    ViewGroup,
    Other,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::TextView => "textview",
            Role::ImageView => "imageview",
            Role::Button => "button",
            Role::ViewGroup => "viewgroup",
            Role::Other => "other",
        };
        f.write_str(s)
    }
}

/// Container classes that do not follow the `*layout`/`*viewgroup` naming.
const CONTAINER_CLASSES: &[&str] = &[
    "listview",
    "gridview",
    "recyclerview",
    "scrollview",
    "horizontalscrollview",
    "nestedscrollview",
    "viewpager",
    "viewpager2",
    "radiogroup",
    "toolbar",
    "actionbar",
    "cardview",
    "tablerow",
    "fragmentcontainerview",
];

/// Maps a canonical (lowercased, package-stripped) class name to a role.
pub fn role_of(class: &str) -> Role {
    if class.ends_with("textview") {
        Role::TextView
    } else if class.ends_with("imageview") {
        Role::ImageView
    } else if class.ends_with("button") {
        Role::Button
    } else if class.ends_with("layout")
        || class.ends_with("viewgroup")
        || CONTAINER_CLASSES.contains(&class)
    {
        Role::ViewGroup
    } else {
        Role::Other
    }
}

/// Lowercases a class name and strips package and outer-class prefixes,
/// e.g. `android.widget.TextView` becomes `textview`.
pub fn canonical_class(raw: &str) -> String {
    let lower = raw.trim().to_ascii_lowercase();
    let simple = lower.rsplit('.').next().unwrap_or("");
    simple.rsplit('$').next().unwrap_or("").to_string()
}

/// One node of the view hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewNode {
    pub id: String,
    pub resource_id: String,
    /// Canonical class name (lowercased, package-stripped).
    pub view_class: String,
    pub text: String,
    pub bounds: Bounds,
    pub focusable: bool,
    pub enabled: bool,
    pub clickable: bool,
    pub visibility: Visibility,
    pub children: Vec<ViewNode>,
}

impl ViewNode {
    pub fn role(&self) -> Role {
        role_of(&self.view_class)
    }

    pub fn is_container(&self) -> bool {
        self.role() == Role::ViewGroup
    }
}

/// Format a hierarchy document was parsed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    UiautomatorXml,
    RgnfJson,
}

/// A parsed hierarchy together with the screen extent.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewTree {
    pub root: ViewNode,
    pub screen: Bounds,
    pub source: SourceFormat,
}

impl ViewTree {
    /// All nodes in DFS preorder.
    pub fn nodes(&self) -> Vec<&ViewNode> {
        let mut out = Vec::new();
        fn walk<'t>(n: &'t ViewNode, out: &mut Vec<&'t ViewNode>) {
            out.push(n);
            for c in &n.children {
                walk(c, out);
            }
        }
        walk(&self.root, &mut out);
        out
    }

    pub fn node(&self, id: &str) -> Option<&ViewNode> {
        self.nodes().into_iter().find(|n| n.id == id)
    }

    /// Builds a lookup index over the tree. Prefer this over repeated
    /// [`ViewTree::node`] calls.
    pub fn index(&self) -> TreeIndex<'_> {
        TreeIndex::new(self)
    }
}

/// Preorder index over a [`ViewTree`]: id lookup, DFS positions, parents.
pub struct TreeIndex<'t> {
    order: Vec<&'t ViewNode>,
    parent: Vec<Option<usize>>,
    by_id: HashMap<&'t str, usize>,
}

impl<'t> TreeIndex<'t> {
    fn new(tree: &'t ViewTree) -> TreeIndex<'t> {
        let mut order = Vec::new();
        let mut parent = Vec::new();
        let mut stack = vec![(&tree.root, None::<usize>)];
        while let Some((node, par)) = stack.pop() {
            let idx = order.len();
            order.push(node);
            parent.push(par);
            for c in node.children.iter().rev() {
                stack.push((c, Some(idx)));
            }
        }
        let by_id = order
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        TreeIndex { order, parent, by_id }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn nodes(&self) -> &[&'t ViewNode] {
        &self.order
    }

    pub fn get(&self, id: &str) -> Option<&'t ViewNode> {
        self.by_id.get(id).map(|&i| self.order[i])
    }

    /// DFS preorder position of a node id.
    pub fn dfs_pos(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<&'t ViewNode> {
        self.get(id).ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn parent_of(&self, pos: usize) -> Option<usize> {
        self.parent.get(pos).copied().flatten()
    }

    /// Nearest ancestor with a container role; the root when none exists
    /// (including for the root itself).
    pub fn scope_of(&self, pos: usize) -> usize {
        let mut cur = self.parent_of(pos);
        while let Some(p) = cur {
            if self.order[p].is_container() {
                return p;
            }
            cur = self.parent_of(p);
        }
        0
    }
}

/// Guesses the input format from the first non-whitespace byte.
pub fn sniff_format(doc: &str) -> SourceFormat {
    match doc.trim_start().bytes().next() {
        Some(b'<') => SourceFormat::UiautomatorXml,
        _ => SourceFormat::RgnfJson,
    }
}

/// Parses a hierarchy document in the given format.
pub fn parse_hierarchy(doc: &str, format: SourceFormat) -> Result<ViewTree> {
    match format {
        SourceFormat::UiautomatorXml => parse_xml(doc),
        SourceFormat::RgnfJson => parse_json(doc),
    }
}

// ---------------------------------------------------------------- XML input

fn parse_xml(doc: &str) -> Result<ViewTree> {
    let xml = roxmltree::Document::parse(doc)
        .map_err(|e| Error::MalformedInput(format!("xml: {e}")))?;
    let root_el = xml.root_element();
    let node_el = if root_el.has_tag_name("node") {
        root_el
    } else {
        let mut nodes = root_el
            .children()
            .filter(|c| c.is_element() && c.has_tag_name("node"));
        let first = nodes.next().ok_or_else(|| {
            Error::MalformedInput("no <node> element under the document root".into())
        })?;
        if nodes.next().is_some() {
            return Err(Error::MalformedInput(
                "multiple top-level <node> elements; expected one root".into(),
            ));
        }
        first
    };
    let mut counter = 0usize;
    let root = build_xml_node(node_el, &mut counter)?;
    let screen = root.bounds;
    Ok(ViewTree { root, screen, source: SourceFormat::UiautomatorXml })
}

fn xml_bool(el: roxmltree::Node<'_, '_>, attr: &str, default: bool, node: &str) -> Result<bool> {
    match el.attribute(attr) {
        None => Ok(default),
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        Some(other) => Err(Error::MalformedInput(format!(
            "node {node}: attribute {attr}={other:?} is not a boolean"
        ))),
    }
}

fn build_xml_node(el: roxmltree::Node<'_, '_>, counter: &mut usize) -> Result<ViewNode> {
    let idx = *counter;
    *counter += 1;
    let class_raw = el.attribute("class").unwrap_or("");
    let resource_id = el.attribute("resource-id").unwrap_or("").to_string();
    let name = if resource_id.is_empty() {
        format!("{}#{}", if class_raw.is_empty() { "node" } else { class_raw }, idx)
    } else {
        resource_id.clone()
    };
    let bounds_attr = el.attribute("bounds").ok_or_else(|| {
        Error::MalformedInput(format!("node {name}: missing bounds attribute"))
    })?;
    let bounds = parse_corner_string(bounds_attr, &name)?;
    let visibility = match el.attribute("visible-to-user") {
        None | Some("true") => Visibility::Visible,
        Some("false") => Visibility::Invisible,
        Some(other) => {
            return Err(Error::MalformedInput(format!(
                "node {name}: attribute visible-to-user={other:?} is not a boolean"
            )))
        }
    };
    let mut children = Vec::new();
    for child in el.children() {
        if child.is_element() {
            if !child.has_tag_name("node") {
                return Err(Error::MalformedInput(format!(
                    "node {name}: unexpected element <{}>",
                    child.tag_name().name()
                )));
            }
            children.push(build_xml_node(child, counter)?);
        }
    }
    Ok(ViewNode {
        id: format!("n{idx}"),
        resource_id,
        view_class: canonical_class(class_raw),
        text: el.attribute("text").unwrap_or("").to_string(),
        bounds,
        focusable: xml_bool(el, "focusable", false, &name)?,
        enabled: xml_bool(el, "enabled", true, &name)?,
        clickable: xml_bool(el, "clickable", false, &name)?,
        visibility,
        children,
    })
}

/// Parses the uiautomator `[x1,y1][x2,y2]` corner syntax.
fn parse_corner_string(s: &str, node: &str) -> Result<Bounds> {
    let bad = || Error::MalformedInput(format!("node {node}: malformed bounds {s:?}"));
    let inner = s.strip_prefix('[').ok_or_else(bad)?;
    let inner = inner.strip_suffix(']').ok_or_else(bad)?;
    let (first, second) = inner.split_once("][").ok_or_else(bad)?;
    let parse_pair = |p: &str| -> Result<(i64, i64)> {
        let (a, b) = p.split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse::<i64>().map_err(|_| bad())?;
        let b = b.trim().parse::<i64>().map_err(|_| bad())?;
        Ok((a, b))
    };
    let (x1, y1) = parse_pair(first)?;
    let (x2, y2) = parse_pair(second)?;
    Bounds::from_corners(x1, y1, x2, y2, node)
}

// --------------------------------------------------------------- JSON input

/// JSON bounds follow the `[[height,width],[x,y]]` layout convention.
type JsonBounds = [[i64; 2]; 2];

fn to_json_bounds(b: &Bounds) -> JsonBounds {
    [
        [b.height as i64, b.width as i64],
        [b.left as i64, b.top as i64],
    ]
}

fn from_json_bounds(jb: &JsonBounds, node: &str) -> Result<Bounds> {
    let [[height, width], [x, y]] = *jb;
    Bounds::from_extents(x, y, width, height, node)
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    screen: Option<JsonBounds>,
    root: JsonNode,
}

fn default_true() -> bool {
    true
}

fn default_visibility() -> String {
    "visible".to_string()
}

fn is_true(v: &bool) -> bool {
    *v
}

fn is_false(v: &bool) -> bool {
    !*v
}

fn is_visible(v: &String) -> bool {
    v == "visible"
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    resource_id: String,
    class: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    text: String,
    bounds: JsonBounds,
    #[serde(default, skip_serializing_if = "is_false")]
    focusable: bool,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    enabled: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    clickable: bool,
    #[serde(default = "default_visibility", skip_serializing_if = "is_visible")]
    visibility: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<JsonNode>,
}

fn parse_json(doc: &str) -> Result<ViewTree> {
    let value: serde_json::Value = serde_json::from_str(doc)
        .map_err(|e| Error::MalformedInput(format!("json: {e}")))?;
    let json_doc: JsonDoc = if value.get("root").is_some() {
        serde_json::from_value(value).map_err(|e| Error::MalformedInput(format!("json: {e}")))?
    } else {
        JsonDoc {
            screen: None,
            root: serde_json::from_value(value)
                .map_err(|e| Error::MalformedInput(format!("json: {e}")))?,
        }
    };
    let mut counter = 0usize;
    let root = build_json_node(json_doc.root, &mut counter)?;
    let screen = match &json_doc.screen {
        Some(jb) => from_json_bounds(jb, "screen")?,
        None => root.bounds,
    };
    let tree = ViewTree { root, screen, source: SourceFormat::RgnfJson };
    check_unique_ids(&tree)?;
    Ok(tree)
}

fn build_json_node(j: JsonNode, counter: &mut usize) -> Result<ViewNode> {
    let idx = *counter;
    *counter += 1;
    let id = match j.id {
        Some(id) if !id.is_empty() => id,
        _ => format!("n{idx}"),
    };
    let bounds = from_json_bounds(&j.bounds, &id)?;
    let visibility = Visibility::parse(&j.visibility, &id)?;
    let mut children = Vec::with_capacity(j.children.len());
    for c in j.children {
        children.push(build_json_node(c, counter)?);
    }
    Ok(ViewNode {
        id,
        resource_id: j.resource_id,
        view_class: canonical_class(&j.class),
        text: j.text,
        bounds,
        focusable: j.focusable,
        enabled: j.enabled,
        clickable: j.clickable,
        visibility,
        children,
    })
}

fn check_unique_ids(tree: &ViewTree) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for node in tree.nodes() {
        if !seen.insert(node.id.as_str()) {
            return Err(Error::DuplicateId(node.id.clone()));
        }
    }
    Ok(())
}

/// Serializes a tree to the JSON hierarchy format. Parsing the output
/// yields a tree equal to the input.
pub fn to_rgnf_json(tree: &ViewTree) -> String {
    fn convert(n: &ViewNode) -> JsonNode {
        JsonNode {
            id: Some(n.id.clone()),
            resource_id: n.resource_id.clone(),
            class: n.view_class.clone(),
            text: n.text.clone(),
            bounds: to_json_bounds(&n.bounds),
            focusable: n.focusable,
            enabled: n.enabled,
            clickable: n.clickable,
            visibility: n.visibility.as_str().to_string(),
            children: n.children.iter().map(convert).collect(),
        }
    }
    let doc = JsonDoc {
        screen: Some(to_json_bounds(&tree.screen)),
        root: convert(&tree.root),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("hierarchy serialization");
    out.push('\n');
    out
}

// -------------------------------------------------------------------- crops

/// Result of cropping a component out of a screenshot.
#[derive(Debug, Clone)]
pub struct CroppedComponent {
    pub image: GrayImage,
    /// True when the bounds were clamped to the image extent.
    pub clamped: bool,
}

/// Cuts the pixels under `bounds` out of a screenshot. Bounds that overlap
/// the image by at least half their area are clamped; smaller overlaps are
/// an error.
pub fn crop_component(img: &GrayImage, bounds: &Bounds) -> Result<CroppedComponent> {
    let extent = Bounds::new(0, 0, img.width(), img.height());
    let overlap = bounds.intersect(&extent);
    let overlap_area = overlap.map_or(0, |b| b.area());
    if bounds.area() == 0 || overlap_area * 2 < bounds.area() {
        return Err(Error::CropOutsideImage(format!(
            "bounds {bounds} cover {overlap_area} px of a {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let inner = overlap.expect("nonzero overlap");
    let mut out = GrayImage::new(inner.width, inner.height, 0.0);
    for y in 0..inner.height {
        for x in 0..inner.width {
            let v = img.get(inner.left + x, inner.top + y);
            out.set(x, y, v);
        }
    }
    Ok(CroppedComponent { image: out, clamped: inner != *bounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_string_parses() {
        let b = parse_corner_string("[25,545][281,573]", "t").unwrap();
        assert_eq!(b, Bounds::new(25, 545, 256, 28));
    }

    #[test]
    fn corner_string_rejects_garbage() {
        for s in ["", "[1,2][3]", "[1,2)(3,4]", "[a,b][c,d]", "1,2 3,4"] {
            assert!(parse_corner_string(s, "t").is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn inverted_corners_rejected() {
        let err = parse_corner_string("[10,10][5,20]", "t").unwrap_err();
        assert!(err.to_string().contains("inverted"));
    }

    #[test]
    fn zero_area_bounds_parse() {
        let b = parse_corner_string("[10,10][10,10]", "t").unwrap();
        assert_eq!(b.area(), 0);
    }

    #[test]
    fn json_bounds_convention() {
        let b = from_json_bounds(&[[28, 256], [25, 545]], "t").unwrap();
        assert_eq!(b, Bounds::new(25, 545, 256, 28));
        assert_eq!(to_json_bounds(&b), [[28, 256], [25, 545]]);
    }

    #[test]
    fn class_canonicalization() {
        assert_eq!(canonical_class("android.widget.TextView"), "textview");
        assert_eq!(canonical_class("a.b.Outer$Inner"), "inner");
        assert_eq!(canonical_class("Button"), "button");
        assert_eq!(canonical_class(""), "");
    }

    #[test]
    fn roles_from_classes() {
        assert_eq!(role_of("textview"), Role::TextView);
        assert_eq!(role_of("appcompattextview"), Role::TextView);
        assert_eq!(role_of("imageview"), Role::ImageView);
        assert_eq!(role_of("button"), Role::Button);
        assert_eq!(role_of("imagebutton"), Role::Button);
        assert_eq!(role_of("linearlayout"), Role::ViewGroup);
        assert_eq!(role_of("customviewgroup"), Role::ViewGroup);
        assert_eq!(role_of("recyclerview"), Role::ViewGroup);
        assert_eq!(role_of("checkbox"), Role::Other);
        assert_eq!(role_of("view"), Role::Other);
    }

    const XML_DOC: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<hierarchy rotation="0">
  <node class="android.widget.FrameLayout" bounds="[0,0][1080,1920]" enabled="true">
    <node class="android.widget.TextView" resource-id="app:id/title" text="Title"
          bounds="[40,80][400,140]" focusable="true" enabled="true"/>
    <node class="android.widget.Button" bounds="[40,200][240,280]"
          focusable="true" enabled="true" clickable="true" visible-to-user="false"/>
  </node>
</hierarchy>"#;

    #[test]
    fn xml_parse_assigns_preorder_ids() {
        let tree = parse_hierarchy(XML_DOC, SourceFormat::UiautomatorXml).unwrap();
        let ids: Vec<&str> = tree.nodes().iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["n0", "n1", "n2"]);
        assert_eq!(tree.screen, Bounds::new(0, 0, 1080, 1920));
        let title = tree.node("n1").unwrap();
        assert_eq!(title.view_class, "textview");
        assert_eq!(title.resource_id, "app:id/title");
        assert_eq!(title.text, "Title");
        assert!(title.focusable && title.enabled && !title.clickable);
        assert_eq!(title.visibility, Visibility::Visible);
        let button = tree.node("n2").unwrap();
        assert_eq!(button.visibility, Visibility::Invisible);
        assert!(button.clickable);
    }

    #[test]
    fn xml_missing_bounds_names_node() {
        let doc = r#"<hierarchy><node class="x.Y" resource-id="app:id/broken"/></hierarchy>"#;
        let err = parse_hierarchy(doc, SourceFormat::UiautomatorXml).unwrap_err();
        assert!(err.to_string().contains("app:id/broken"), "{err}");
    }

    #[test]
    fn xml_bad_bool_rejected() {
        let doc = r#"<hierarchy><node class="x.Y" bounds="[0,0][10,10]" focusable="yes"/></hierarchy>"#;
        assert!(parse_hierarchy(doc, SourceFormat::UiautomatorXml).is_err());
    }

    #[test]
    fn xml_requires_single_root() {
        let doc = r#"<hierarchy>
            <node class="a.B" bounds="[0,0][10,10]"/>
            <node class="a.C" bounds="[0,0][10,10]"/>
        </hierarchy>"#;
        assert!(parse_hierarchy(doc, SourceFormat::UiautomatorXml).is_err());
    }

    const JSON_DOC: &str = r#"{
      "screen": [[1920, 1080], [0, 0]],
      "root": {
        "id": "root",
        "class": "android.widget.LinearLayout",
        "bounds": [[1920, 1080], [0, 0]],
        "children": [
          {"id": "label", "class": "TextView", "text": "hi",
           "bounds": [[28, 256], [25, 545]], "focusable": true},
          {"class": "Button", "bounds": [[28, 28], [286, 545]],
           "focusable": true, "clickable": true}
        ]
      }
    }"#;

    #[test]
    fn json_parse_and_defaults() {
        let tree = parse_hierarchy(JSON_DOC, SourceFormat::RgnfJson).unwrap();
        assert_eq!(tree.screen, Bounds::new(0, 0, 1080, 1920));
        let label = tree.node("label").unwrap();
        assert_eq!(label.bounds, Bounds::new(25, 545, 256, 28));
        assert!(label.enabled, "enabled defaults to true");
        assert_eq!(label.visibility, Visibility::Visible);
        let anon = tree.node("n2").unwrap();
        assert_eq!(anon.view_class, "button");
        assert_eq!(anon.bounds, Bounds::new(286, 545, 28, 28));
    }

    #[test]
    fn json_bare_root_accepted() {
        let doc = r#"{"class": "Button", "bounds": [[10, 10], [0, 0]], "focusable": true}"#;
        let tree = parse_hierarchy(doc, SourceFormat::RgnfJson).unwrap();
        assert_eq!(tree.screen, Bounds::new(0, 0, 10, 10));
        assert_eq!(tree.root.id, "n0");
    }

    #[test]
    fn json_duplicate_ids_rejected() {
        let doc = r#"{
          "class": "LinearLayout", "bounds": [[100, 100], [0, 0]],
          "children": [
            {"id": "a", "class": "Button", "bounds": [[10, 10], [0, 0]]},
            {"id": "a", "class": "Button", "bounds": [[10, 10], [20, 0]]}
          ]
        }"#;
        match parse_hierarchy(doc, SourceFormat::RgnfJson) {
            Err(Error::DuplicateId(id)) => assert_eq!(id, "a"),
            other => panic!("expected duplicate-id error, got {other:?}"),
        }
    }

    #[test]
    fn json_unknown_visibility_rejected() {
        let doc = r#"{"id": "x", "class": "Button", "bounds": [[10, 10], [0, 0]], "visibility": "hidden"}"#;
        let err = parse_hierarchy(doc, SourceFormat::RgnfJson).unwrap_err();
        assert!(err.to_string().contains('x'), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let tree = parse_hierarchy(JSON_DOC, SourceFormat::RgnfJson).unwrap();
        let back = parse_hierarchy(&to_rgnf_json(&tree), SourceFormat::RgnfJson).unwrap();
        assert_eq!(tree, back);
    }

    #[test]
    fn xml_survives_json_round_trip() {
        let tree = parse_hierarchy(XML_DOC, SourceFormat::UiautomatorXml).unwrap();
        let back = parse_hierarchy(&to_rgnf_json(&tree), SourceFormat::RgnfJson).unwrap();
        assert_eq!(tree.root, back.root);
        assert_eq!(tree.screen, back.screen);
    }

    #[test]
    fn format_sniffing() {
        assert_eq!(sniff_format("  <hierarchy/>"), SourceFormat::UiautomatorXml);
        assert_eq!(sniff_format("{\"root\": {}}"), SourceFormat::RgnfJson);
    }

    #[test]
    fn scope_resolution() {
        let tree = parse_hierarchy(JSON_DOC, SourceFormat::RgnfJson).unwrap();
        let idx = tree.index();
        let label_pos = idx.dfs_pos("label").unwrap();
        assert_eq!(idx.scope_of(label_pos), 0);
        assert_eq!(idx.scope_of(0), 0, "root falls back to itself");
    }

    #[test]
    fn crop_inside_image() {
        let mut img = GrayImage::new(10, 8, 0.0);
        img.set(3, 2, 1.0);
        let crop = crop_component(&img, &Bounds::new(2, 1, 4, 3)).unwrap();
        assert!(!crop.clamped);
        assert_eq!((crop.image.width(), crop.image.height()), (4, 3));
        assert_eq!(crop.image.get(1, 1), 1.0);
    }

    #[test]
    fn crop_clamps_majority_overlap() {
        let img = GrayImage::new(10, 10, 0.5);
        let crop = crop_component(&img, &Bounds::new(6, 0, 6, 10)).unwrap();
        assert!(crop.clamped);
        assert_eq!((crop.image.width(), crop.image.height()), (4, 10));
    }

    #[test]
    fn crop_rejects_minority_overlap() {
        let img = GrayImage::new(10, 10, 0.5);
        let err = crop_component(&img, &Bounds::new(8, 0, 6, 10)).unwrap_err();
        assert!(matches!(err, Error::CropOutsideImage(_)), "{err}");
        let err = crop_component(&img, &Bounds::new(50, 50, 5, 5)).unwrap_err();
        assert!(matches!(err, Error::CropOutsideImage(_)));
    }

    #[test]
    fn crop_rejects_degenerate_bounds() {
        let img = GrayImage::new(10, 10, 0.5);
        assert!(crop_component(&img, &Bounds::new(2, 2, 0, 5)).is_err());
    }
}
