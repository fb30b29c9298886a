#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sha2::{Digest, Sha256};
use tempfile::TempDir;
use tomdistill::backend::{base_key, color_key};
use tomdistill::formats::{write_pfm, write_rgb_png};
use tomdistill::{RgbImage, ScalarMap, Space, TomMask};

pub const MONO_SCALE: f64 = 0.5;
pub const MONO_SHIFT: f64 = 3.0;

pub struct Dataset {
    pub dir: TempDir,
    pub manifest: PathBuf,
    pub mono: PathBuf,
    pub stereo: PathBuf,
    pub ids: Vec<String>,
    pub gt: Vec<ScalarMap>,
    pub masks: Vec<TomMask>,
}

impl Dataset {
    pub fn path(&self) -> &Path {
        self.dir.path()
    }
}

/// Disparity of a fronto-slanted plane. Coefficients are dyadic so every
/// value, and every affine image of it used below, is exact in f32.
pub fn plane(i: usize, w: usize, h: usize) -> ScalarMap {
    let c = 16.0 + i as f64;
    ScalarMap::from_fn(w, h, Space::DisparityPx, |x, y| {
        c + 0.25 * x as f64 + 0.125 * y as f64
    })
    .unwrap()
}

fn texture(rng: &mut StdRng, w: usize, h: usize) -> RgbImage {
    let data = (0..w * h * 3).map(|_| rng.random::<u8>()).collect();
    RgbImage::new(w, h, data).unwrap()
}

fn write_mask_png(mask: &TomMask, path: &Path) {
    let img = image::GrayImage::from_raw(
        mask.width() as u32,
        mask.height() as u32,
        mask.data().to_vec(),
    )
    .unwrap();
    img.save(path).unwrap();
}

/// `n` stereo samples of size `w`×`h` with a rectangular ToM region each.
///
/// * ground truth: planar disparity;
/// * monocular backend (`mono/`): `MONO_SCALE * gt + MONO_SHIFT` for three of
///   the five colors and garbage inside the mask for the other two;
/// * stereo backend (`stereo/`): ground truth outside the mask and garbage
///   inside it.
pub fn synthetic(n: usize, w: usize, h: usize, seed: u64) -> Dataset {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let mono = root.join("mono");
    let stereo = root.join("stereo");
    fs::create_dir_all(&mono).unwrap();
    fs::create_dir_all(&stereo).unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut manifest = String::from(
        "class_map = \"binary\"\n\n[calibration]\nfocal = 500.0\nbaseline = 100.0\n",
    );
    let (mut ids, mut gts, mut masks) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let id = format!("s{i:02}");
        let x0 = rng.random_range(2..w / 2);
        let y0 = rng.random_range(2..h / 2);
        let x1 = rng.random_range(x0 + 4..w - 2);
        let y1 = rng.random_range(y0 + 4..h - 2);
        let mask = TomMask::from_fn(w, h, |x, y| (x0..x1).contains(&x) && (y0..y1).contains(&y))
            .unwrap();
        let gt = plane(i, w, h);

        write_rgb_png(&texture(&mut rng, w, h), &root.join(format!("{id}_left.png"))).unwrap();
        write_rgb_png(&texture(&mut rng, w, h), &root.join(format!("{id}_right.png"))).unwrap();
        write_mask_png(&mask, &root.join(format!("{id}_mask.png")));
        write_pfm(&gt, &root.join(format!("{id}_gt.pfm"))).unwrap();

        for c in 0..5 {
            let noisy = c >= 3;
            let m = ScalarMap::from_fn(w, h, Space::AffineInverseDepth, |x, y| {
                let v = MONO_SCALE * gt.value(x, y) + MONO_SHIFT;
                if noisy && mask.is_tom(x, y) { v + 100.0 * (c as f64) } else { v }
            })
            .unwrap();
            write_pfm(&m, &mono.join(format!("{}.pfm", color_key(&id, c)))).unwrap();
        }
        let base = ScalarMap::from_fn(w, h, Space::DisparityPx, |x, y| {
            if mask.is_tom(x, y) {
                500.0 + (x * y % 97) as f64
            } else {
                gt.value(x, y)
            }
        })
        .unwrap();
        write_pfm(&base, &stereo.join(format!("{}.pfm", base_key(&id)))).unwrap();

        let _ = write!(
            manifest,
            "\n[[samples]]\nid = \"{id}\"\nleft = \"{id}_left.png\"\nright = \"{id}_right.png\"\n\
             mask = \"{id}_mask.png\"\ngt = \"{id}_gt.pfm\"\ngt_space = \"disparity_px\"\n"
        );
        ids.push(id);
        gts.push(gt);
        masks.push(mask);
    }
    let manifest_path = root.join("dataset.toml");
    fs::write(&manifest_path, manifest).unwrap();
    Dataset {
        dir,
        manifest: manifest_path,
        mono,
        stereo,
        ids,
        gt: gts,
        masks,
    }
}

pub fn tomdistill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tomdistill"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn collect(dir: &Path, base: &Path, out: &mut Vec<(String, Vec<u8>)>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect(&path, base, out);
        } else {
            let rel = path.strip_prefix(base).unwrap().to_string_lossy().into_owned();
            out.push((rel, fs::read(&path).unwrap()));
        }
    }
}

/// SHA-256 over every file below `dir`, keyed by relative path.
pub fn tree_hash(dir: &Path) -> (String, usize) {
    let mut files = Vec::new();
    collect(dir, dir, &mut files);
    files.sort();
    let mut h = Sha256::new();
    for (rel, bytes) in &files {
        h.update((rel.len() as u64).to_le_bytes());
        h.update(rel.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    let hex = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    (hex, files.len())
}
