//! Minimal bar charts rendered straight into RGB buffers.

use tomdistill::{InpaintColor, RgbImage};

const WIDTH: usize = 480;
const HEIGHT: usize = 320;
const MARGIN: usize = 24;
const BACKGROUND: InpaintColor = InpaintColor::gray(255);
const AXIS: [u8; 3] = [0, 0, 0];
const SERIES: [[u8; 3]; 6] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
];

/// One group of bars per category, one bar per series inside a group.
/// Missing values leave a gap. Bars share a linear scale starting at zero.
pub fn bar_chart(groups: &[Vec<Option<f64>>]) -> RgbImage {
    let mut data = RgbImage::filled(WIDTH, HEIGHT, BACKGROUND)
        .expect("fixed chart size")
        .into_data();
    let mut put = |x: usize, y: usize, c: [u8; 3]| {
        let i = 3 * (y * WIDTH + x);
        data[i..i + 3].copy_from_slice(&c);
    };

    let base = HEIGHT - MARGIN;
    for x in MARGIN..WIDTH - MARGIN {
        put(x, base, AXIS);
    }
    for y in MARGIN..=base {
        put(MARGIN, y, AXIS);
    }

    let max = groups
        .iter()
        .flatten()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let plot_w = WIDTH - 2 * MARGIN;
    let plot_h = (base - MARGIN) as f64;
    if !groups.is_empty() {
        let group_w = plot_w / groups.len();
        for (g, series) in groups.iter().enumerate() {
            let n = series.len().max(1);
            let bar_w = (group_w * 3 / 4 / n).max(1);
            let x0 = MARGIN + g * group_w + group_w / 8;
            for (s, v) in series.iter().enumerate() {
                let Some(v) = v.filter(|v| v.is_finite()) else {
                    continue;
                };
                let h = if max > 0.0 {
                    (v.abs() / max * plot_h).round() as usize
                } else {
                    0
                };
                let color = SERIES[s % SERIES.len()];
                for x in x0 + s * bar_w + 1..x0 + (s + 1) * bar_w {
                    for y in base - h..base {
                        put(x, y, color);
                    }
                }
            }
        }
    }
    RgbImage::new(WIDTH, HEIGHT, data).expect("buffer matches chart size")
}
