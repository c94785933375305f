use thiserror::Error;

/// Errors produced by parsing, grouping, vision, and evaluation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Input document could not be parsed into a view tree.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// Geometry of a node is unusable (negative extent, inverted corners).
    #[error("invalid bounds for {node}: {reason}")]
    InvalidBounds { node: String, reason: String },

    /// Two nodes share an identifier.
    #[error("duplicate node id: {0}")]
    DuplicateId(String),

    /// A referenced node id does not exist in the tree.
    #[error("unknown node id: {0}")]
    UnknownNode(String),

    /// A configuration value or argument is out of its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A required input collection is empty.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Image decoding or pixel validation failed.
    #[error("image error: {0}")]
    Image(String),

    /// Requested crop overlaps the screenshot too little to be usable.
    #[error("crop outside image: {0}")]
    CropOutsideImage(String),

    /// Edge detection produced no edge points for a component.
    #[error("no shape detected: {0}")]
    ShapeNotFound(String),

    /// The tree contains no component a screen reader could focus.
    #[error("no focusable component in the tree")]
    NothingFocusable,
}
