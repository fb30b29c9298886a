//! 16-bit ground-truth depth PNGs and integer class-id mask PNGs.
//!
//! Depth PNGs store millimeters directly; 0 marks a missing measurement.

use std::io::Cursor;
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};

use crate::error::{Error, Result};
use crate::formats::classes::ClassRaster;
use crate::formats::{read_bytes, write_atomic};
use crate::raster::{ScalarMap, Space};

struct RawPng {
    width: usize,
    height: usize,
    color: ColorType,
    depth: BitDepth,
    line_size: usize,
    buf: Vec<u8>,
}

fn decode_raw(bytes: &[u8], path: &Path) -> Result<RawPng> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::format(path, e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::format(path, "image too large"))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::format(path, e.to_string()))?;
    buf.truncate(info.buffer_size());
    Ok(RawPng {
        width: info.width as usize,
        height: info.height as usize,
        color: info.color_type,
        depth: info.bit_depth,
        line_size: info.line_size,
        buf,
    })
}

pub fn decode_png16_depth(bytes: &[u8], path: &Path) -> Result<ScalarMap> {
    let raw = decode_raw(bytes, path)?;
    if raw.color != ColorType::Grayscale || raw.depth != BitDepth::Sixteen {
        return Err(Error::format(
            path,
            format!(
                "expected 16-bit grayscale, got {:?} at {:?}",
                raw.color, raw.depth
            ),
        ));
    }
    let mut values = Vec::with_capacity(raw.width * raw.height);
    let mut valid = Vec::with_capacity(raw.width * raw.height);
    for row in raw.buf.chunks_exact(raw.line_size) {
        for px in row[..raw.width * 2].chunks_exact(2) {
            let v = u16::from_be_bytes([px[0], px[1]]);
            values.push(f64::from(v));
            valid.push(v != 0);
        }
    }
    ScalarMap::new(raw.width, raw.height, values, valid, Space::DepthMm)
}

/// Encodes a depth map as 16-bit millimeters. Valid values are rounded to
/// the nearest millimeter and must land in `1..=65535`.
pub fn encode_png16_depth(map: &ScalarMap) -> Result<Vec<u8>> {
    if map.space() != Space::DepthMm {
        return Err(Error::Domain(format!(
            "16-bit depth PNG stores depth_mm, got {}",
            map.space()
        )));
    }
    let (w, h) = map.dims();
    let mut data = Vec::with_capacity(w * h * 2);
    for y in 0..h {
        for x in 0..w {
            let v = match map.get(x, y) {
                None => 0u16,
                Some(d) => {
                    let r = d.round();
                    if !(1.0..=65535.0).contains(&r) {
                        return Err(Error::Domain(format!(
                            "depth {d} mm at ({x}, {y}) does not fit a 16-bit PNG"
                        )));
                    }
                    r as u16
                }
            };
            data.extend_from_slice(&v.to_be_bytes());
        }
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, w as u32, h as u32);
        enc.set_color(ColorType::Grayscale);
        enc.set_depth(BitDepth::Sixteen);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::Domain(format!("png encode: {e}")))?;
        writer
            .write_image_data(&data)
            .map_err(|e| Error::Domain(format!("png encode: {e}")))?;
        writer
            .finish()
            .map_err(|e| Error::Domain(format!("png encode: {e}")))?;
    }
    Ok(out)
}

pub fn read_png16_depth(path: &Path) -> Result<ScalarMap> {
    decode_png16_depth(&read_bytes(path)?, path)
}

pub fn write_png16_depth(map: &ScalarMap, path: &Path) -> Result<()> {
    write_atomic(path, &encode_png16_depth(map)?)
}

/// Reads a single-channel class-id raster: grayscale or palette-indexed PNG
/// at any PNG bit depth. Palette images yield raw indices.
pub fn read_class_png(path: &Path) -> Result<ClassRaster> {
    let raw = decode_raw(&read_bytes(path)?, path)?;
    if !matches!(raw.color, ColorType::Grayscale | ColorType::Indexed) {
        return Err(Error::format(
            path,
            format!("class mask must be grayscale or indexed, got {:?}", raw.color),
        ));
    }
    let bits = match raw.depth {
        BitDepth::One => 1,
        BitDepth::Two => 2,
        BitDepth::Four => 4,
        BitDepth::Eight => 8,
        BitDepth::Sixteen => 16,
    };
    let mut ids = Vec::with_capacity(raw.width * raw.height);
    for row in raw.buf.chunks_exact(raw.line_size) {
        for x in 0..raw.width {
            let id = match bits {
                16 => u16::from_be_bytes([row[2 * x], row[2 * x + 1]]),
                8 => u16::from(row[x]),
                b => {
                    let per_byte = 8 / b;
                    let byte = row[x / per_byte];
                    let shift = 8 - b * (x % per_byte + 1);
                    u16::from((byte >> shift) & ((1u8 << b) - 1))
                }
            };
            ids.push(id);
        }
    }
    ClassRaster::new(raw.width, raw.height, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode_gray(w: u32, h: u32, depth: BitDepth, color: ColorType, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, w, h);
        enc.set_color(color);
        enc.set_depth(depth);
        if color == ColorType::Indexed {
            enc.set_palette(vec![0u8; 3 * 16]);
        }
        let mut wr = enc.write_header().unwrap();
        wr.write_image_data(data).unwrap();
        wr.finish().unwrap();
        out
    }

    #[test]
    fn zero_is_invalid_and_values_are_millimeters() {
        let mut data = Vec::new();
        for v in [0u16, 1500, 65535, 7] {
            data.extend_from_slice(&v.to_be_bytes());
        }
        let bytes = encode_gray(2, 2, BitDepth::Sixteen, ColorType::Grayscale, &data);
        let m = decode_png16_depth(&bytes, Path::new("d.png")).unwrap();
        assert_eq!(m.valid(), &[false, true, true, true]);
        assert_eq!(m.get(1, 0), Some(1500.0));
        assert_eq!(m.space(), Space::DepthMm);
    }

    #[test]
    fn eight_bit_depth_is_rejected() {
        let bytes = encode_gray(2, 1, BitDepth::Eight, ColorType::Grayscale, &[1, 2]);
        assert!(matches!(
            decode_png16_depth(&bytes, Path::new("d.png")),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let map = ScalarMap::new(
            3,
            2,
            vec![1500.0, 0.0, 2.0, 65535.0, 1.0, 900.0],
            vec![true, false, true, true, true, true],
            Space::DepthMm,
        )
        .unwrap();
        let a = encode_png16_depth(&map).unwrap();
        let back = decode_png16_depth(&a, Path::new("d.png")).unwrap();
        assert_eq!(back.valid(), map.valid());
        let b = encode_png16_depth(&back).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn out_of_range_depth_cannot_be_encoded() {
        let map = ScalarMap::constant(1, 1, 70000.0, Space::DepthMm).unwrap();
        assert!(encode_png16_depth(&map).is_err());
    }

    #[test]
    fn packed_indexed_masks_unpack() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.png");
        // 4-bit indexed, 3 pixels: 2, 3, 1 -> bytes 0x23, 0x10
        std::fs::write(
            &p,
            encode_gray(3, 1, BitDepth::Four, ColorType::Indexed, &[0x23, 0x10]),
        )
        .unwrap();
        let r = read_class_png(&p).unwrap();
        assert_eq!(r.ids(), &[2, 3, 1]);
    }
}
