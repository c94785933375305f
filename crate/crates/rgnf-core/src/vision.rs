//! Edge-shape extraction and Hausdorff shape comparison.
//!
//! Shapes are extracted from grayscale crops with a classic detector:
//! Gaussian blur, Sobel gradients, non-maximum suppression along the
//! quantized gradient direction, then hysteresis thresholding with the
//! thresholds expressed as fractions of the maximum suppressed magnitude.
//! The surviving edge pixels form an [`EdgePointSet`] compared with the
//! exact Hausdorff distance.

use std::collections::VecDeque;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hierarchy::Bounds;
use crate::Result;

/// Point sets larger than this are subsampled (deterministically) before
/// Hausdorff comparison.
pub const MAX_SHAPE_POINTS: usize = 10_000;

/// Fixed seed for the subsampling draw; keeps detect_shape bit-stable.
const SUBSAMPLE_SEED: u64 = 0x5247_4E46;

/// Grayscale raster with pixels in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<f32>,
}

impl GrayImage {
    /// Creates a constant image. Panics on zero dimensions or a fill value
    /// outside `[0, 1]`.
    pub fn new(width: u32, height: u32, fill: f32) -> GrayImage {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        assert!((0.0..=1.0).contains(&fill), "fill must lie in [0,1]");
        GrayImage {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    /// Wraps an existing pixel buffer, validating length and value range.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<f32>) -> Result<GrayImage> {
        if width == 0 || height == 0 {
            return Err(Error::Image("image dimensions must be nonzero".into()));
        }
        if pixels.len() != width as usize * height as usize {
            return Err(Error::Image(format!(
                "pixel buffer holds {} values, expected {}",
                pixels.len(),
                width as usize * height as usize
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::Image(format!("pixel value {bad} outside [0,1]")));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// Reads a pixel with clamp-to-edge semantics for out-of-range
    /// coordinates.
    pub fn get_clamped(&self, x: i64, y: i64) -> f32 {
        let cx = x.clamp(0, self.width as i64 - 1) as u32;
        let cy = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(cx, cy)
    }

    pub fn set(&mut self, x: u32, y: u32, v: f32) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn total_intensity(&self) -> f64 {
        self.pixels.iter().map(|&v| v as f64).sum()
    }

    /// Decodes a PNG (any color type) to grayscale.
    pub fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
        let img = image::load_from_memory(bytes)
            .map_err(|e| Error::Image(format!("png decode: {e}")))?
            .to_luma8();
        let (width, height) = (img.width(), img.height());
        let pixels = img.as_raw().iter().map(|&v| v as f32 / 255.0).collect();
        GrayImage::from_pixels(width, height, pixels)
    }

    /// Encodes as an 8-bit grayscale PNG.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let raw: Vec<u8> = self
            .pixels
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        let img = image::GrayImage::from_raw(self.width, self.height, raw)
            .expect("buffer length matches dimensions");
        let mut out = io::Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png)
            .map_err(|e| Error::Image(format!("png encode: {e}")))?;
        Ok(out.into_inner())
    }
}

/// Per-pixel gradient magnitude and direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: u32,
    height: u32,
    magnitude: Vec<f32>,
    direction: Vec<f32>,
}

impl GradientField {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn magnitude(&self, x: u32, y: u32) -> f32 {
        self.magnitude[y as usize * self.width as usize + x as usize]
    }

    pub fn direction(&self, x: u32, y: u32) -> f32 {
        self.direction[y as usize * self.width as usize + x as usize]
    }

    fn magnitude_clamped(&self, x: i64, y: i64) -> f32 {
        let cx = x.clamp(0, self.width as i64 - 1) as u32;
        let cy = y.clamp(0, self.height as i64 - 1) as u32;
        self.magnitude(cx, cy)
    }

    pub fn max_magnitude(&self) -> f32 {
        self.magnitude.iter().cloned().fold(0.0, f32::max)
    }

    /// Builds a field from raw planes; intended for tests and synthetic
    /// fixtures.
    pub fn from_planes(
        width: u32,
        height: u32,
        magnitude: Vec<f32>,
        direction: Vec<f32>,
    ) -> Result<GradientField> {
        let n = width as usize * height as usize;
        if magnitude.len() != n || direction.len() != n {
            return Err(Error::Image(format!(
                "gradient planes hold {}/{} values, expected {n}",
                magnitude.len(),
                direction.len()
            )));
        }
        Ok(GradientField { width, height, magnitude, direction })
    }
}

/// Binary edge mask produced by hysteresis thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    width: u32,
    height: u32,
    mask: Vec<bool>,
}

impl EdgeMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn at(&self, x: u32, y: u32) -> bool {
        self.mask[y as usize * self.width as usize + x as usize]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// Set of edge pixels in component-local coordinates, sorted row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePointSet {
    points: Vec<(u32, u32)>,
    extent: Bounds,
}

impl EdgePointSet {
    /// Sorts, deduplicates, and validates: the set must be non-empty and
    /// every point must lie within the extent.
    pub fn new(mut points: Vec<(u32, u32)>, extent: Bounds) -> Result<EdgePointSet> {
        if points.is_empty() {
            return Err(Error::EmptyInput("edge point set".into()));
        }
        points.sort_unstable_by_key(|&(x, y)| (y, x));
        points.dedup();
        for &(x, y) in &points {
            let inside = x >= extent.left
                && x <= extent.left + extent.width
                && y >= extent.top
                && y <= extent.top + extent.height;
            if !inside {
                return Err(Error::InvalidParameter(format!(
                    "edge point ({x},{y}) outside extent {extent}"
                )));
            }
        }
        Ok(EdgePointSet { points, extent })
    }

    pub fn points(&self) -> &[(u32, u32)] {
        &self.points
    }

    pub fn extent(&self) -> Bounds {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Detector parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VisionConfig {
    /// Gaussian blur standard deviation.
    pub sigma: f64,
    /// Strong-edge threshold as a fraction of the max suppressed magnitude.
    pub high_frac: f64,
    /// Weak-edge threshold as a fraction of the max suppressed magnitude.
    pub low_frac: f64,
    /// Similarity cutoff for normalized Hausdorff distances.
    pub hausdorff_threshold: f64,
}

impl Default for VisionConfig {
    fn default() -> VisionConfig {
        VisionConfig {
            sigma: 1.4,
            high_frac: 0.80,
            low_frac: 0.40,
            hausdorff_threshold: 0.1,
        }
    }
}

impl VisionConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(0.70..=0.90).contains(&self.high_frac) {
            return Err(Error::InvalidParameter(format!(
                "high_frac must lie in [0.70, 0.90], got {}",
                self.high_frac
            )));
        }
        if !(0.30..=0.50).contains(&self.low_frac) {
            return Err(Error::InvalidParameter(format!(
                "low_frac must lie in [0.30, 0.50], got {}",
                self.low_frac
            )));
        }
        if self.low_frac >= self.high_frac {
            return Err(Error::InvalidParameter(format!(
                "low_frac {} must be below high_frac {}",
                self.low_frac, self.high_frac
            )));
        }
        if !self.hausdorff_threshold.is_finite() || self.hausdorff_threshold < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "hausdorff_threshold must be non-negative, got {}",
                self.hausdorff_threshold
            )));
        }
        Ok(())
    }
}

/// Unnormalized 2-D Gaussian: `1/(2πσ²)·exp(−(x²+y²)/2σ²)`.
pub fn gaussian_kernel_value(x: i64, y: i64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    (1.0 / (2.0 * std::f64::consts::PI * s2))
        * (-((x * x + y * y) as f64) / (2.0 * s2)).exp()
}

/// Blurs with a unit-sum Gaussian kernel of radius `⌈3σ⌉`, clamp-to-edge.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let side = (2 * radius + 1) as usize;
    let mut kernel = vec![0.0f64; side * side];
    let mut total = 0.0f64;
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let w = gaussian_kernel_value(dx, dy, sigma);
            kernel[((dy + radius) as usize) * side + (dx + radius) as usize] = w;
            total += w;
        }
    }
    for w in &mut kernel {
        *w /= total;
    }
    let mut out = GrayImage::new(img.width(), img.height(), 0.0);
    for y in 0..img.height() as i64 {
        for x in 0..img.width() as i64 {
            let mut acc = 0.0f64;
            for dy in -radius..=radius {
                for dx in -radius..=radius {
                    let w = kernel[((dy + radius) as usize) * side + (dx + radius) as usize];
                    acc += w * img.get_clamped(x + dx, y + dy) as f64;
                }
            }
            out.set(x as u32, y as u32, acc as f32);
        }
    }
    Ok(out)
}

/// Standard 3×3 Sobel responses with clamp-to-edge borders.
pub fn sobel_gradients(img: &GrayImage) -> Result<GradientField> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::InvalidParameter(format!(
            "sobel needs an image of at least 3x3, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let n = img.width() as usize * img.height() as usize;
    let mut magnitude = vec![0.0f32; n];
    let mut direction = vec![0.0f32; n];
    for y in 0..img.height() as i64 {
        for x in 0..img.width() as i64 {
            let p = |dx: i64, dy: i64| img.get_clamped(x + dx, y + dy) as f64;
            let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1))
                - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1))
                - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            let idx = y as usize * img.width() as usize + x as usize;
            magnitude[idx] = (gx * gx + gy * gy).sqrt() as f32;
            let mut dir = gy.atan2(gx);
            if dir <= -std::f64::consts::PI {
                dir = std::f64::consts::PI;
            }
            direction[idx] = dir as f32;
        }
    }
    GradientField::from_planes(img.width(), img.height(), magnitude, direction)
}

/// Zeroes every pixel that is not a local maximum along its quantized
/// gradient direction (bins at 0°, 45°, 90°, 135°). Neighbor reads clamp
/// at the borders.
pub fn non_max_suppress(g: &GradientField) -> GradientField {
    let mut magnitude = vec![0.0f32; g.magnitude.len()];
    for y in 0..g.height as i64 {
        for x in 0..g.width as i64 {
            let idx = y as usize * g.width as usize + x as usize;
            let m = g.magnitude[idx];
            if m == 0.0 {
                continue;
            }
            let mut deg = (g.direction[idx] as f64).to_degrees();
            if deg < 0.0 {
                deg += 180.0;
            }
            let ((ax, ay), (bx, by)) = if !(22.5..157.5).contains(&deg) {
                ((-1, 0), (1, 0))
            } else if deg < 67.5 {
                ((1, 1), (-1, -1))
            } else if deg < 112.5 {
                ((0, -1), (0, 1))
            } else {
                ((-1, 1), (1, -1))
            };
            let n1 = g.magnitude_clamped(x + ax, y + ay);
            let n2 = g.magnitude_clamped(x + bx, y + by);
            if m >= n1 && m >= n2 {
                magnitude[idx] = m;
            }
        }
    }
    GradientField {
        width: g.width,
        height: g.height,
        magnitude,
        direction: g.direction.clone(),
    }
}

/// Double-threshold hysteresis. Thresholds are fractions of the maximum
/// magnitude; weak pixels survive only when 8-connected (transitively) to
/// a strong pixel.
pub fn hysteresis_threshold(g: &GradientField, low_frac: f64, high_frac: f64) -> Result<EdgeMap> {
    if !(low_frac > 0.0 && low_frac < high_frac && high_frac <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "hysteresis thresholds need 0 < low < high <= 1, got low={low_frac} high={high_frac}"
        )));
    }
    let width = g.width as usize;
    let height = g.height as usize;
    let mut mask = vec![false; width * height];
    let max = g.max_magnitude() as f64;
    if max <= 0.0 {
        return Ok(EdgeMap { width: g.width, height: g.height, mask });
    }
    let high_t = high_frac * max;
    let low_t = low_frac * max;
    let mut queue = VecDeque::new();
    for (idx, &m) in g.magnitude.iter().enumerate() {
        if m as f64 >= high_t {
            mask[idx] = true;
            queue.push_back(idx);
        }
    }
    while let Some(idx) = queue.pop_front() {
        let x = (idx % width) as i64;
        let y = (idx / width) as i64;
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = x + dx;
                let ny = y + dy;
                if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                let nidx = ny as usize * width + nx as usize;
                if !mask[nidx] && g.magnitude[nidx] as f64 >= low_t {
                    mask[nidx] = true;
                    queue.push_back(nidx);
                }
            }
        }
    }
    Ok(EdgeMap { width: g.width, height: g.height, mask })
}

/// Runs the full detector over a component crop and returns its edge
/// pixels. Featureless crops produce a "no shape detected" error.
pub fn detect_shape(crop: &GrayImage, cfg: &VisionConfig) -> Result<EdgePointSet> {
    cfg.validate()?;
    if crop.width() < 3 || crop.height() < 3 {
        return Err(Error::InvalidParameter(format!(
            "component crop {}x{} is smaller than 3x3",
            crop.width(),
            crop.height()
        )));
    }
    let blurred = gaussian_blur(crop, cfg.sigma)?;
    let gradients = sobel_gradients(&blurred)?;
    let suppressed = non_max_suppress(&gradients);
    let edges = hysteresis_threshold(&suppressed, cfg.low_frac, cfg.high_frac)?;
    let mut points = Vec::new();
    for y in 0..edges.height() {
        for x in 0..edges.width() {
            if edges.at(x, y) {
                points.push((x, y));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::ShapeNotFound(format!(
            "{}x{} crop produced no edge pixels",
            crop.width(),
            crop.height()
        )));
    }
    if points.len() > MAX_SHAPE_POINTS {
        let mut rng = ChaCha8Rng::seed_from_u64(SUBSAMPLE_SEED);
        let chosen = rand::seq::index::sample(&mut rng, points.len(), MAX_SHAPE_POINTS);
        let mut sampled: Vec<(u32, u32)> = chosen.iter().map(|i| points[i]).collect();
        sampled.sort_unstable_by_key(|&(x, y)| (y, x));
        points = sampled;
    }
    EdgePointSet::new(points, Bounds::new(0, 0, crop.width(), crop.height()))
}

fn directed_sq(from: &[(u32, u32)], to: &[(u32, u32)], mut cmax: f64) -> f64 {
    for &(ax, ay) in from {
        let mut cmin = f64::INFINITY;
        for &(bx, by) in to {
            let dx = ax as f64 - bx as f64;
            let dy = ay as f64 - by as f64;
            let d = dx * dx + dy * dy;
            if d < cmin {
                cmin = d;
                if cmin <= cmax {
                    break;
                }
            }
        }
        if cmin > cmax {
            cmax = cmin;
        }
    }
    cmax
}

/// Exact symmetric Hausdorff distance in pixels.
pub fn hausdorff(a: &EdgePointSet, b: &EdgePointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("hausdorff on empty point set".into()));
    }
    let forward = directed_sq(a.points(), b.points(), 0.0);
    let both = directed_sq(b.points(), a.points(), forward);
    Ok(both.sqrt())
}

/// Hausdorff distance divided by the diagonal of the union of the two
/// extents (aligned at the origin), yielding a dimensionless value.
pub fn normalized_hausdorff(a: &EdgePointSet, b: &EdgePointSet) -> Result<f64> {
    let h = hausdorff(a, b)?;
    let w = a.extent.width.max(b.extent.width) as f64;
    let hgt = a.extent.height.max(b.extent.height) as f64;
    let diag = w.hypot(hgt);
    if diag <= 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate extents: union diagonal is zero".into(),
        ));
    }
    Ok(h / diag)
}

/// Writes an edge map as a binary PGM (P5) for debugging.
pub fn write_pgm<W: Write>(map: &EdgeMap, out: &mut W) -> io::Result<()> {
    write!(out, "P5\n{} {}\n255\n", map.width(), map.height())?;
    let bytes: Vec<u8> = map.mask.iter().map(|&b| if b { 255 } else { 0 }).collect();
    out.write_all(&bytes)
}

/// Writes a point set as `x,y` CSV lines for debugging.
pub fn write_points_csv<W: Write>(set: &EdgePointSet, out: &mut W) -> io::Result<()> {
    writeln!(out, "x,y")?;
    for &(x, y) in set.points() {
        writeln!(out, "{x},{y}")?;
    }
    Ok(())
}
