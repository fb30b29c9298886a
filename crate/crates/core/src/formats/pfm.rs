//! Single-channel portable float maps.
//!
//! Layout: `Pf\n<width> <height>\n<scale>\n` followed by `width * height`
//! 4-byte floats, rows stored bottom-up. A negative scale means
//! little-endian. Invalid pixels are stored as `+inf` and any non-finite
//! value read back is treated as invalid.

use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::{read_bytes, write_atomic};
use crate::raster::{ScalarMap, Space};

struct Header {
    width: usize,
    height: usize,
    little_endian: bool,
    payload_offset: usize,
}

fn parse_header(bytes: &[u8]) -> std::result::Result<Header, String> {
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| "non-ASCII header")?);
    }
    // exactly one whitespace byte separates the scale from the payload
    if pos >= bytes.len() {
        return Err("missing payload".into());
    }
    pos += 1;

    match tokens[0] {
        "Pf" => {}
        "PF" => return Err("3-channel PF files are not supported, expected 1 channel".into()),
        other => return Err(format!("bad magic `{other}`")),
    }
    let width: usize = tokens[1]
        .parse()
        .map_err(|_| format!("bad width `{}`", tokens[1]))?;
    let height: usize = tokens[2]
        .parse()
        .map_err(|_| format!("bad height `{}`", tokens[2]))?;
    let scale: f64 = tokens[3]
        .parse()
        .map_err(|_| format!("bad scale `{}`", tokens[3]))?;
    if width == 0 || height == 0 {
        return Err(format!("empty raster {width}x{height}"));
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err(format!("scale must be finite and non-zero, got {scale}"));
    }
    Ok(Header {
        width,
        height,
        little_endian: scale < 0.0,
        payload_offset: pos,
    })
}

/// Decodes an in-memory PFM. `path` is only used in error messages.
pub fn decode_pfm(bytes: &[u8], space: Space, path: &Path) -> Result<ScalarMap> {
    let header = parse_header(bytes).map_err(|r| Error::format(path, r))?;
    let (w, h) = (header.width, header.height);
    let payload = &bytes[header.payload_offset..];
    let needed = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::format(path, "dimensions overflow"))?;
    if payload.len() < needed {
        return Err(Error::format(
            path,
            format!("truncated payload: {} of {needed} bytes", payload.len()),
        ));
    }

    let mut values = vec![0.0f64; w * h];
    for (row_in_file, chunk) in payload[..needed].chunks_exact(w * 4).enumerate() {
        let y = h - 1 - row_in_file;
        for (x, px) in chunk.chunks_exact(4).enumerate() {
            let raw = [px[0], px[1], px[2], px[3]];
            let v = if header.little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            values[y * w + x] = f64::from(v);
        }
    }
    ScalarMap::sanitized(w, h, values, None, space)
}

/// Encodes a map as a little-endian PFM with invalid pixels set to `+inf`.
pub fn encode_pfm(map: &ScalarMap) -> Vec<u8> {
    let (w, h) = map.dims();
    let header = format!("Pf\n{w} {h}\n-1\n");
    let mut out = Vec::with_capacity(header.len() + w * h * 4);
    out.extend_from_slice(header.as_bytes());
    for y in (0..h).rev() {
        for x in 0..w {
            let v = map.get(x, y).map_or(f32::INFINITY, |v| v as f32);
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn read_pfm(path: &Path, space: Space) -> Result<ScalarMap> {
    let bytes = read_bytes(path)?;
    decode_pfm(&bytes, space, path)
}

pub fn write_pfm(map: &ScalarMap, path: &Path) -> Result<()> {
    write_atomic(path, &encode_pfm(map))
}
