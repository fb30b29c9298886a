//! Quarter-resolution resampling used by the evaluation protocol.
//!
//! Output dimensions are `floor(w / 4) x floor(h / 4)`; trailing rows and
//! columns that do not fill a 4x4 block are dropped. Nearest-neighbor
//! sampling picks the source pixel `(4x + 2, 4y + 2)`, the one containing the
//! center of each output pixel's footprint.

use crate::error::{Error, Result};
use crate::raster::{RgbImage, ScalarMap, Space, TomMask};

const FACTOR: usize = 4;
const CENTER: usize = FACTOR / 2;

pub trait QuarterResize: Sized {
    fn resize_quarter(&self) -> Result<Self>;
}

fn quarter_dims(width: usize, height: usize) -> Result<(usize, usize)> {
    if width < FACTOR || height < FACTOR {
        return Err(Error::Dimension(format!(
            "quarter resize needs at least {FACTOR}x{FACTOR}, got {width}x{height}"
        )));
    }
    Ok((width / FACTOR, height / FACTOR))
}

fn nearest_index(src_width: usize, x: usize, y: usize) -> usize {
    (y * FACTOR + CENTER) * src_width + x * FACTOR + CENTER
}

impl QuarterResize for RgbImage {
    /// Area average over each 4x4 block, rounded to nearest.
    fn resize_quarter(&self) -> Result<Self> {
        let (w, h) = quarter_dims(self.width(), self.height())?;
        let src = self.data();
        let sw = self.width();
        let mut out = Vec::with_capacity(w * h * 3);
        for y in 0..h {
            for x in 0..w {
                let mut acc = [0u32; 3];
                for dy in 0..FACTOR {
                    let row = (y * FACTOR + dy) * sw;
                    for dx in 0..FACTOR {
                        let i = (row + x * FACTOR + dx) * 3;
                        for c in 0..3 {
                            acc[c] += u32::from(src[i + c]);
                        }
                    }
                }
                let n = (FACTOR * FACTOR) as u32;
                out.extend(acc.iter().map(|&s| ((s + n / 2) / n) as u8));
            }
        }
        RgbImage::new(w, h, out)
    }
}

impl QuarterResize for TomMask {
    fn resize_quarter(&self) -> Result<Self> {
        let (w, h) = quarter_dims(self.width(), self.height())?;
        let src = self.data();
        let data = (0..h)
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| src[nearest_index(self.width(), x, y)])
            .collect();
        TomMask::new(w, h, data)
    }
}

impl QuarterResize for ScalarMap {
    /// Nearest-neighbor on both values and validity. Disparities are divided
    /// by four since the retained region is sampled with a 4 px stride.
    fn resize_quarter(&self) -> Result<Self> {
        let (w, h) = quarter_dims(self.width(), self.height())?;
        let scale = if self.space() == Space::DisparityPx {
            1.0 / FACTOR as f64
        } else {
            1.0
        };
        let mut values = Vec::with_capacity(w * h);
        let mut valid = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let i = nearest_index(self.width(), x, y);
                let ok = self.valid()[i];
                valid.push(ok);
                values.push(if ok {
                    self.values()[i] * scale
                } else {
                    self.values()[i]
                });
            }
        }
        ScalarMap::new(w, h, values, valid, self.space())
    }
}

pub fn resize_quarter<T: QuarterResize>(raster: &T) -> Result<T> {
    raster.resize_quarter()
}
