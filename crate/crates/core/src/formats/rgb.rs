use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::write_atomic;
use crate::raster::RgbImage;

/// Reads any PNG or JPEG as 8-bit RGB, dropping alpha.
pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::format(path, other.to_string()),
    })?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    RgbImage::new(w as usize, h as usize, rgb.into_raw())
}

pub fn encode_rgb_png(img: &RgbImage) -> Result<Vec<u8>> {
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec())
        .ok_or_else(|| Error::Dimension("RGB buffer does not match its dimensions".into()))?;
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| Error::Domain(format!("png encode: {e}")))?;
    Ok(out.into_inner())
}

pub fn write_rgb_png(img: &RgbImage, path: &Path) -> Result<()> {
    write_atomic(path, &encode_rgb_png(img)?)
}
