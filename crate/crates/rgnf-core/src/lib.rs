//! Analysis of screen-reader navigation flows over GUI view hierarchies.
//!
//! The library parses a view hierarchy (uiautomator XML or a compact JSON
//! form), extracts the baseline swipe-right traversal, filters out nodes a
//! screen reader cannot land on, groups components into perceptual regions
//! (proximity and shape similarity), and redraws the traversal so that each
//! region is visited contiguously. Evaluation helpers score a traversal
//! against a ground-truth sequence and measure reachability.

pub mod error;
pub mod flow;
pub mod hierarchy;
pub mod metrics;
pub mod pipeline;
pub mod redraw;
pub mod regions;
pub mod synth;
pub mod vision;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
