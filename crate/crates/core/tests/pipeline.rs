use std::fs;
use std::path::Path;

use tomdistill::backend::{base_key, color_key, BackendSpec};
use tomdistill::distill::{distill_mono, distill_stereo_merged, DistillConfig, Strategy};
use tomdistill::formats::{
    collapse_mask, load_manifest, read_class_png, read_pfm, read_rgb, write_pfm, write_rgb_png,
};
use tomdistill::inpaint::sample_palette;
use tomdistill::metrics::{evaluate_sample, EvalOptions, Rescale, Split};
use tomdistill::{
    depth_to_disparity, InpaintColor, RgbImage, ScalarMap, Space, StereoCalibration, TomMask,
};

const W: usize = 24;
const H: usize = 16;

fn write_gray(path: &Path, data: Vec<u8>) {
    image::GrayImage::from_raw(W as u32, H as u32, data)
        .unwrap()
        .save(path)
        .unwrap();
}

/// Class raster in the Booster convention: 0 background, 1 opaque,
/// 2 transparent, 3 mirror.
fn booster_classes() -> Vec<u8> {
    (0..W * H)
        .map(|i| {
            let (x, y) = (i % W, i / W);
            match (x, y) {
                (4..=9, 3..=8) => 2,
                (14..=19, 5..=12) => 3,
                _ if x < 2 => 0,
                _ => 1,
            }
        })
        .collect()
}

fn plane_disparity() -> ScalarMap {
    ScalarMap::from_fn(W, H, Space::DisparityPx, |x, y| {
        10.0 + 0.5 * x as f64 + 0.25 * y as f64
    })
    .unwrap()
}

#[test]
fn manifest_mask_and_mono_distillation() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let img = RgbImage::filled(W, H, InpaintColor::new(10, 200, 30)).unwrap();
    write_rgb_png(&img, &root.join("left.png")).unwrap();
    write_gray(&root.join("classes.png"), booster_classes());
    fs::write(
        root.join("set.toml"),
        "class_map = \"booster\"\n\n[[samples]]\nid = \"a\"\nleft = \"left.png\"\nmask = \"classes.png\"\n",
    )
    .unwrap();

    let manifest = load_manifest(&root.join("set.toml")).unwrap();
    let sample = &manifest.samples[0];
    let mask = collapse_mask(
        &read_class_png(sample.mask.as_ref().unwrap()).unwrap(),
        &manifest.class_map,
    )
    .unwrap();
    assert_eq!(mask.count_tom(), 6 * 6 + 6 * 8);
    assert!(mask.is_tom(4, 3) && mask.is_tom(19, 12) && !mask.is_tom(0, 0));

    // predictions disagree inside the mask; the median settles on the
    // middle one
    let preds = root.join("preds");
    fs::create_dir_all(&preds).unwrap();
    for c in 0..3 {
        let m = ScalarMap::from_fn(W, H, Space::AffineInverseDepth, |x, y| {
            if mask.is_tom(x, y) {
                [5.0, 1.0, 3.0][c]
            } else {
                7.0
            }
        })
        .unwrap();
        write_pfm(&m, &preds.join(format!("{}.pfm", color_key("a", c)))).unwrap();
    }
    let backend = BackendSpec::precomputed(&preds, Space::AffineInverseDepth).unwrap();
    let cfg = DistillConfig::new(3, 9, Strategy::MonoVirtualDepth).unwrap();
    let image = read_rgb(&sample.left).unwrap();
    let d = distill_mono(&image, &mask, "a", &backend, &cfg).unwrap();
    for y in 0..H {
        for x in 0..W {
            let want = if mask.is_tom(x, y) { 3.0 } else { 7.0 };
            assert_eq!(d.map.get(x, y), Some(want));
        }
    }
    assert_eq!(d.provenance.palette, sample_palette(9, "a", 3).unwrap().colors);
    assert_eq!(d.provenance.backend_keys, ["a_c0", "a_c1", "a_c2"]);
}

#[test]
fn merged_labels_from_metric_depth_mono() {
    let dir = tempfile::tempdir().unwrap();
    let calib = StereoCalibration::new(400.0, 50.0).unwrap();
    let gt = plane_disparity();
    let mask = TomMask::from_fn(W, H, |x, y| (8..16).contains(&x) && (4..12).contains(&y)).unwrap();

    // the monocular network is right up to scale and shift in disparity
    let mono_disp = ScalarMap::from_fn(W, H, Space::DisparityPx, |x, y| {
        0.8 * gt.value(x, y) + 1.0
    })
    .unwrap();
    let mono_depth = tomdistill::disparity_to_depth(&mono_disp, &calib).unwrap();
    let mono_dir = dir.path().join("mono");
    let stereo_dir = dir.path().join("stereo");
    fs::create_dir_all(&mono_dir).unwrap();
    fs::create_dir_all(&stereo_dir).unwrap();
    for c in 0..2 {
        write_pfm(&mono_depth, &mono_dir.join(format!("{}.pfm", color_key("s", c)))).unwrap();
    }
    let base = ScalarMap::from_fn(W, H, Space::DisparityPx, |x, y| {
        if mask.is_tom(x, y) {
            999.0
        } else {
            gt.value(x, y)
        }
    })
    .unwrap();
    write_pfm(&base, &stereo_dir.join(format!("{}.pfm", base_key("s")))).unwrap();

    let mono = BackendSpec::precomputed(&mono_dir, Space::DepthMm).unwrap();
    let stereo = BackendSpec::precomputed(&stereo_dir, Space::DisparityPx).unwrap();
    let cfg = DistillConfig::new(2, 0, Strategy::StereoMerged).unwrap();
    let img = RgbImage::filled(W, H, InpaintColor::gray(90)).unwrap();

    let missing = distill_stereo_merged(&img, &img, &mask, "s", &mono, &stereo, &cfg, None);
    assert!(missing.is_err(), "depth output needs a calibration");

    let d = distill_stereo_merged(&img, &img, &mask, "s", &mono, &stereo, &cfg, Some(&calib))
        .unwrap();
    let a = d.provenance.alignment.unwrap();
    assert!((a.scale - 1.25).abs() < 1e-4, "{a:?}");
    assert!((a.shift + 1.25).abs() < 1e-3, "{a:?}");
    for y in 0..H {
        for x in 0..W {
            let v = d.map.value(x, y);
            if mask.is_tom(x, y) {
                // depth went through f32 storage, so only approximately exact
                assert!((v - gt.value(x, y)).abs() < 1e-3, "({x}, {y}) {v}");
            } else {
                assert_eq!(v.to_bits(), base.value(x, y).to_bits());
            }
        }
    }
}

#[test]
fn label_pfm_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let gt = plane_disparity();
    let path = dir.path().join("x.pfm");
    write_pfm(&gt, &path).unwrap();
    assert_eq!(read_pfm(&path, Space::DisparityPx).unwrap(), gt);
    let calib = StereoCalibration::new(400.0, 50.0).unwrap();
    let depth = tomdistill::disparity_to_depth(&gt, &calib).unwrap();
    let back = depth_to_disparity(&depth, &calib).unwrap();
    for (a, b) in back.values().iter().zip(gt.values()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn quarter_evaluation_samples_block_centers() {
    // an error only on pixels outside every block center is invisible at
    // quarter resolution
    let gt = plane_disparity();
    let pred = ScalarMap::from_fn(W, H, Space::DisparityPx, |x, y| {
        gt.value(x, y) + if x % 4 == 2 && y % 4 == 2 { 0.0 } else { 50.0 }
    })
    .unwrap();
    let mask = TomMask::from_fn(W, H, |x, _| x < 12).unwrap();
    let opts = |quarter| EvalOptions {
        rescale: Rescale::None,
        space: Space::DisparityPx,
        quarter_resolution: quarter,
    };
    let full = evaluate_sample(&pred, &gt, &mask, &opts(false)).unwrap();
    let quarter = evaluate_sample(&pred, &gt, &mask, &opts(true)).unwrap();
    assert!(full.get(Split::All).unwrap().mae > 40.0);
    let q = quarter.get(Split::All).unwrap();
    assert_eq!(q.count, (W / 4) * (H / 4));
    assert_eq!(q.mae, 0.0);
    assert_eq!(q.bad["2"], 0.0);
    assert_eq!(quarter.get(Split::Tom).unwrap().count, 3 * 4);
}
