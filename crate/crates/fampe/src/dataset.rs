//! Synthetic shapes dataset: a desk-scale 4-class image set (disk, square,
//! cross, stripes) with per-sample jitter and pixel noise, plus loading of
//! any PGM/PPM directory with a `labels.csv` index.

use std::path::Path;

use fampe_core::model::LabeledSample;
use fampe_core::rng::StreamRng;

use crate::error::{CliError, CliResult};
use crate::fsutil;
use crate::image::RawImage;

pub const CLASS_NAMES: [&str; 4] = ["disk", "square", "cross", "stripes"];
pub const LABELS_FILE: &str = "labels.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticShapesSpec {
    /// Images are `size x size`, single channel.
    pub size: usize,
    pub classes: usize,
    pub per_class: usize,
    /// Standard deviation of additive pixel noise (unit pixel range).
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticShapesSpec {
    fn default() -> Self {
        SyntheticShapesSpec { size: 32, classes: 4, per_class: 50, noise: 0.05, seed: 0 }
    }
}

impl SyntheticShapesSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.size < 8 {
            return Err(CliError::config(format!("image size must be >= 8, got {}", self.size)));
        }
        if !(2..=CLASS_NAMES.len()).contains(&self.classes) {
            return Err(CliError::config(format!(
                "class count must be in [2, {}], got {}",
                CLASS_NAMES.len(),
                self.classes
            )));
        }
        if self.per_class == 0 {
            return Err(CliError::config("samples per class must be >= 1"));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(CliError::config(format!("noise level must be >= 0, got {}", self.noise)));
        }
        Ok(())
    }
}

/// Render one sample as quantized grayscale pixels.
pub fn render_sample(spec: &SyntheticShapesSpec, class: usize, index: usize) -> Vec<u8> {
    let s = spec.size;
    let mut rng = StreamRng::from_key(spec.seed, &[0xD5, class as u64, index as u64]);
    let mut canvas = rng.gaussian_field(s * s, 0.1, spec.noise);
    let jitter = (s / 8).max(1);
    let offset = |rng: &mut StreamRng| rng.next_below(2 * jitter + 1) as isize - jitter as isize;
    let cy = (s as isize / 2 + offset(&mut rng)) as f64;
    let cx = (s as isize / 2 + offset(&mut rng)) as f64;
    let extent = s as f64 * (1.0 / 6.0 + rng.next_unit() / 12.0);
    let ink = 0.9;
    match class {
        0 => {
            // disk
            for r in 0..s {
                for c in 0..s {
                    let (dy, dx) = (r as f64 - cy, c as f64 - cx);
                    if dy * dy + dx * dx <= extent * extent {
                        canvas[r * s + c] = ink;
                    }
                }
            }
        }
        1 => {
            // square
            for r in 0..s {
                for c in 0..s {
                    if (r as f64 - cy).abs() <= extent && (c as f64 - cx).abs() <= extent {
                        canvas[r * s + c] = ink;
                    }
                }
            }
        }
        2 => {
            // cross: a vertical and a horizontal bar through the center
            let arm = extent * 1.5;
            let thick = (s as f64 / 12.0).max(1.5);
            for r in 0..s {
                for c in 0..s {
                    let (dy, dx) = (r as f64 - cy, c as f64 - cx);
                    let vertical = dy.abs() <= arm && dx.abs() <= thick;
                    let horizontal = dx.abs() <= arm && dy.abs() <= thick;
                    if vertical || horizontal {
                        canvas[r * s + c] = ink;
                    }
                }
            }
        }
        _ => {
            // stripes: full-frame bars, the only high-frequency class
            let period = 3 + rng.next_below(3);
            let phase = rng.next_below(period);
            let horizontal = rng.next_below(2) == 1;
            for r in 0..s {
                for c in 0..s {
                    let coord = if horizontal { r } else { c };
                    if ((coord + phase) / period).is_multiple_of(2) {
                        canvas[r * s + c] = ink;
                    }
                }
            }
        }
    }
    canvas.iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8).collect()
}

/// All samples in deterministic class-major order: `(filename, label, image)`.
pub fn synthesize(spec: &SyntheticShapesSpec) -> CliResult<Vec<(String, usize, RawImage)>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(spec.classes * spec.per_class);
    for (class, class_name) in CLASS_NAMES.iter().enumerate().take(spec.classes) {
        for index in 0..spec.per_class {
            let name = format!("{class_name}_{index:04}.pgm");
            let pixels = render_sample(spec, class, index);
            out.push((name, class, RawImage::new(1, spec.size, spec.size, pixels)?));
        }
    }
    Ok(out)
}

/// Write images plus `labels.csv` into `dir`; returns the sample count.
pub fn write_dataset(dir: &Path, spec: &SyntheticShapesSpec) -> CliResult<usize> {
    let samples = synthesize(spec)?;
    let mut labels = String::from("filename,label\n");
    for (name, label, image) in &samples {
        image.save(&dir.join(name))?;
        labels.push_str(&format!("{name},{label}\n"));
    }
    fsutil::write_atomic(&dir.join(LABELS_FILE), labels.as_bytes())?;
    Ok(samples.len())
}

/// Load every sample listed in `dir/labels.csv`, in file order.
pub fn load_dataset(dir: &Path) -> CliResult<Vec<LabeledSample>> {
    Ok(load_dataset_named(dir)?.into_iter().map(|(_, s)| s).collect())
}

/// Like [`load_dataset`] but keeps each sample's file stem as an identifier.
pub fn load_dataset_named(dir: &Path) -> CliResult<Vec<(String, LabeledSample)>> {
    let labels_path = dir.join(LABELS_FILE);
    let text = fsutil::read_text(&labels_path)?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && line == "filename,label" {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (name, label) = line.split_once(',').ok_or_else(|| {
            CliError::format(format!(
                "{}:{}: expected `filename,label`, got {line:?}",
                labels_path.display(),
                lineno + 1
            ))
        })?;
        let label: usize = label.trim().parse().map_err(|_| {
            CliError::format(format!(
                "{}:{}: label {label:?} is not an integer",
                labels_path.display(),
                lineno + 1
            ))
        })?;
        let name = name.trim();
        let image = RawImage::load(&dir.join(name))?;
        let stem = name.rsplit_once('.').map_or(name, |(stem, _)| stem).to_string();
        samples.push((stem, LabeledSample { image: image.to_tensor(), label }));
    }
    if samples.is_empty() {
        return Err(CliError::new("dataset", format!("{} lists no samples", labels_path.display())));
    }
    Ok(samples)
}
