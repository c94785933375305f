//! Deterministic file I/O: canonical JSON (sorted keys, fixed-precision
//! floats), atomic writes, and input readers.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use rgnf_core::flow::NavFlow;
use rgnf_core::hierarchy::{parse_hierarchy, sniff_format, ViewTree};
use rgnf_core::vision::GrayImage;

use crate::error::CliError;

/// Pretty printer that renders every float with six decimals so reruns are
/// byte-identical.
struct CanonicalFormatter {
    inner: PrettyFormatter<'static>,
}

impl CanonicalFormatter {
    fn new() -> CanonicalFormatter {
        CanonicalFormatter { inner: PrettyFormatter::new() }
    }
}

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.6}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{value:.6}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes with sorted object keys (via the `Value` detour) and fixed
/// six-decimal floats, with a trailing newline.
pub fn to_canonical_json<T: Serialize>(data: &T) -> Result<Vec<u8>, CliError> {
    let value = serde_json::to_value(data)
        .map_err(|e| CliError::input(format!("serialize: {e}")))?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter::new());
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::input(format!("serialize: {e}")))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes through a temp file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| CliError::at(dir, e))?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| CliError::at(path, "not a file path"))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!("{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| CliError::at(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::at(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, data: &T) -> Result<(), CliError> {
    atomic_write(path, &to_canonical_json(data)?)
}

pub fn read_tree(path: &Path) -> Result<ViewTree, CliError> {
    let doc = fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
    parse_hierarchy(&doc, sniff_format(&doc)).map_err(|e| CliError::at(path, e))
}

pub fn read_flow(path: &Path) -> Result<NavFlow, CliError> {
    let doc = fs::read_to_string(path).map_err(|e| CliError::at(path, e))?;
    serde_json::from_str(&doc).map_err(|e| CliError::at(path, e))
}

/// Returns the decoded grayscale image together with the raw bytes, which
/// the overlay embeds untouched.
pub fn read_png(path: &Path) -> Result<(GrayImage, Vec<u8>), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::at(path, e))?;
    let img = GrayImage::decode_png(&bytes).map_err(|e| CliError::at(path, e))?;
    Ok((img, bytes))
}
