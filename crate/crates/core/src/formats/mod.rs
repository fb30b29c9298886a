//! File formats: float maps, 16-bit depth PNGs, class-id masks, RGB images
//! and the dataset manifest.

mod classes;
mod manifest;
mod pfm;
mod png16;
mod rgb;

use std::fs;
use std::io::Write;
use std::path::Path;

pub use classes::{collapse_mask, ClassCollapseRule, ClassRaster};
pub use manifest::{load_manifest, parse_manifest, DatasetManifest, EvalResolution, GtSpace, SampleRecord};
pub use pfm::{decode_pfm, encode_pfm, read_pfm, write_pfm};
pub use png16::{
    decode_png16_depth, encode_png16_depth, read_class_png, read_png16_depth, write_png16_depth,
};
pub use rgb::{read_rgb, write_rgb_png};

use crate::error::{Error, Result};

/// Writes `bytes` to a sibling temp file and renames it over `path`, so
/// readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::Builder::new()
        .prefix(".tmp-")
        .tempfile_in(dir)
        .map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}
