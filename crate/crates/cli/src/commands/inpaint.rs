use std::process::ExitCode;

use serde_json::json;
use tomdistill::backend::color_key;
use tomdistill::formats::write_rgb_png;
use tomdistill::inpaint::{inpaint, sample_palette};
use tomdistill::Error;

use crate::args::InpaintArgs;
use crate::loaders;
use crate::runner::{self, ConfigError};

pub fn run(args: &InpaintArgs) -> Result<ExitCode, ConfigError> {
    let manifest = runner::load(&args.run)?;
    let dir = args.run.out.join("inpaint");
    std::fs::create_dir_all(&dir)?;
    let n = args.palette.colors as usize;

    let outcomes = runner::for_each_sample(
        &manifest.samples,
        args.run.workers,
        args.run.fail_fast,
        |sample| {
            let image = loaders::left(sample)?;
            let mask = loaders::mask(&manifest, sample)?;
            let palette = sample_palette(args.palette.seed, &sample.id, n)?;
            let mut files = Vec::with_capacity(n);
            for (i, &c) in palette.colors.iter().enumerate() {
                let name = format!("{}.png", color_key(&sample.id, i));
                write_rgb_png(&inpaint(&image, &mask, c)?, &dir.join(&name))?;
                files.push(format!("inpaint/{name}"));
            }
            Ok::<_, Error>(json!({ "palette": palette.colors, "images": files }))
        },
    )?;
    let settings = json!({ "colors": n, "seed": args.palette.seed });
    runner::finish(&args.run.out, "inpaint", settings, &outcomes, |v| v.clone())
}
