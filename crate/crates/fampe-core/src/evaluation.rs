//! Insertion/deletion scoring: rank pixels by attributed importance, reveal
//! (or remove) them progressively, and integrate the true-class probability
//! over the revealed fraction with the trapezoid rule.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use libm::exp;

use crate::attribution::AttributionMap;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::tensor::Tensor;

/// Image used at fraction 0 of insertion / fraction 1 of deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// All-zero (black) image. Default.
    Black,
    /// Gaussian-blurred copy of the input (sigma 2, 9-tap separable kernel).
    Blur,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSettings {
    /// Number of reveal steps; `ceil(P / steps)` pixels per step.
    pub steps: usize,
    pub baseline: BaselineKind,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings { steps: 100, baseline: BaselineKind::Black }
    }
}

/// True-class probability at each revealed fraction; fractions ascend from 0
/// to 1 inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCurve {
    pub fractions: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl PerturbationCurve {
    /// Trapezoidal area under the curve over the fraction axis; in `[0, 1]`
    /// because probabilities are.
    pub fn auc(&self) -> f64 {
        let mut area = 0.0;
        for i in 1..self.fractions.len() {
            let dx = self.fractions[i] - self.fractions[i - 1];
            area += dx * (self.probabilities[i] + self.probabilities[i - 1]) * 0.5;
        }
        area
    }
}

/// Pixel indices in descending order of aggregated importance; ties broken
/// by ascending row-major index.
pub fn rank_pixels(map: &AttributionMap) -> Vec<usize> {
    let importance = map.pixel_importance();
    let mut order: Vec<usize> = (0..importance.len()).collect();
    order.sort_by(|&a, &b| {
        importance[b].total_cmp(&importance[a]).then(a.cmp(&b))
    });
    order
}

/// Baseline image for the given input.
pub fn baseline_image(x: &Tensor, kind: BaselineKind) -> Tensor {
    match kind {
        BaselineKind::Black => Tensor::zeros(x.shape()),
        BaselineKind::Blur => gaussian_blur(x, 2.0, 4),
    }
}

/// Separable Gaussian blur with clamp-to-edge boundary handling.
pub fn gaussian_blur(x: &Tensor, sigma: f64, radius: usize) -> Tensor {
    let shape = x.shape();
    assert_eq!(shape.len(), 3);
    let (c, h, w) = (shape[0], shape[1], shape[2]);
    let mut kernel: Vec<f64> = (0..=2 * radius)
        .map(|k| {
            let d = k as f64 - radius as f64;
            exp(-(d * d) / (2.0 * sigma * sigma))
        })
        .collect();
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }
    let mut out = x.clone();
    for ch in 0..c {
        let src = x.channel(ch).to_vec();
        // horizontal pass
        let mut tmp = vec![0.0; h * w];
        for i in 0..h {
            for j in 0..w {
                let mut acc = 0.0;
                for (k, &kv) in kernel.iter().enumerate() {
                    let jj = (j as isize + k as isize - radius as isize).clamp(0, w as isize - 1);
                    acc += kv * src[i * w + jj as usize];
                }
                tmp[i * w + j] = acc;
            }
        }
        // vertical pass
        let dst = out.channel_mut(ch);
        for i in 0..h {
            for j in 0..w {
                let mut acc = 0.0;
                for (k, &kv) in kernel.iter().enumerate() {
                    let ii = (i as isize + k as isize - radius as isize).clamp(0, h as isize - 1);
                    acc += kv * tmp[ii as usize * w + j];
                }
                dst[i * w + j] = acc;
            }
        }
    }
    out
}

fn check_eval(x: &Tensor, ranking: &[usize], settings: &EvalSettings) -> Result<(usize, usize)> {
    let shape = x.shape();
    if shape.len() != 3 {
        return Err(Error::ShapeMismatch { expected: vec![0, 0, 0], actual: shape.to_vec() });
    }
    let plane = shape[1] * shape[2];
    if ranking.len() != plane {
        return Err(Error::ShapeMismatch { expected: vec![plane], actual: vec![ranking.len()] });
    }
    if settings.steps == 0 {
        return Err(Error::InvalidConfig { what: String::from("steps must be >= 1") });
    }
    Ok((shape[0], plane))
}

/// Copy all channels of pixel `p` from `src` into `dst`.
fn copy_pixel(dst: &mut Tensor, src: &Tensor, channels: usize, plane: usize, p: usize) {
    for c in 0..channels {
        dst.data_mut()[c * plane + p] = src.data()[c * plane + p];
    }
}

fn perturbation_curve(
    model: &Model,
    x: &Tensor,
    y: usize,
    ranking: &[usize],
    settings: &EvalSettings,
    insertion: bool,
) -> Result<PerturbationCurve> {
    let (channels, plane) = check_eval(x, ranking, settings)?;
    let baseline = baseline_image(x, settings.baseline);
    let chunk = plane.div_ceil(settings.steps);
    // Insertion starts from the baseline and reveals pixels of x; deletion
    // starts from x and replaces pixels with the baseline.
    let (mut current, reveal_src) = if insertion {
        (baseline.clone(), x)
    } else {
        (x.clone(), &baseline)
    };
    let mut fractions = Vec::new();
    let mut probabilities = Vec::new();
    let mut revealed = 0usize;
    loop {
        fractions.push(revealed as f64 / plane as f64);
        probabilities.push(model.class_probability(&current, y)?);
        if revealed == plane {
            break;
        }
        let next = (revealed + chunk).min(plane);
        for &p in &ranking[revealed..next] {
            copy_pixel(&mut current, reveal_src, channels, plane, p);
        }
        revealed = next;
    }
    Ok(PerturbationCurve { fractions, probabilities })
}

/// Insertion curve for an explicit pixel ranking.
pub fn insertion_curve_ranked(
    model: &Model,
    x: &Tensor,
    y: usize,
    ranking: &[usize],
    settings: &EvalSettings,
) -> Result<PerturbationCurve> {
    perturbation_curve(model, x, y, ranking, settings, true)
}

/// Deletion curve for an explicit pixel ranking.
pub fn deletion_curve_ranked(
    model: &Model,
    x: &Tensor,
    y: usize,
    ranking: &[usize],
    settings: &EvalSettings,
) -> Result<PerturbationCurve> {
    perturbation_curve(model, x, y, ranking, settings, false)
}

/// Insertion AUC for an attribution map (higher is better).
pub fn insertion_score(
    model: &Model,
    x: &Tensor,
    y: usize,
    map: &AttributionMap,
    settings: &EvalSettings,
) -> Result<f64> {
    Ok(insertion_curve_ranked(model, x, y, &rank_pixels(map), settings)?.auc())
}

/// Deletion AUC for an attribution map (lower is better).
pub fn deletion_score(
    model: &Model,
    x: &Tensor,
    y: usize,
    map: &AttributionMap,
    settings: &EvalSettings,
) -> Result<f64> {
    Ok(deletion_curve_ranked(model, x, y, &rank_pixels(map), settings)?.auc())
}

/// Per-sample score pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleScore {
    pub insertion: f64,
    pub deletion: f64,
}

/// Per-sample scores across an alpha grid; rows are samples, columns alphas.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatrix {
    pub alphas: Vec<f64>,
    pub insertion: Vec<Vec<f64>>,
    pub deletion: Vec<Vec<f64>>,
}

/// Per-alpha aggregation: mean scores, argmax/argmin frequencies, and the
/// per-sample best indices. Frequencies count the first (lowest-alpha)
/// achiever on ties, so each column vector sums to 100%.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBreakdown {
    pub alphas: Vec<f64>,
    pub mean_insertion: Vec<f64>,
    pub mean_deletion: Vec<f64>,
    pub insertion_argmax_freq_pct: Vec<f64>,
    pub deletion_argmin_freq_pct: Vec<f64>,
    pub best_insertion_alpha_index: Vec<usize>,
    pub best_deletion_alpha_index: Vec<usize>,
}

/// Aggregated report over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub per_sample: Vec<SampleScore>,
    pub mean_insertion: f64,
    pub mean_deletion: f64,
    pub per_alpha: Option<AlphaBreakdown>,
}

fn argbest(row: &[f64], higher: bool) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if (higher && v > row[best]) || (!higher && v < row[best]) {
            best = i;
        }
    }
    best
}

/// Dataset means plus the optional per-alpha breakdown.
pub fn aggregate_report(per_sample: &[SampleScore], per_alpha: Option<&AlphaMatrix>) -> Result<ScoreReport> {
    if per_sample.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = per_sample.len() as f64;
    let mean_insertion = per_sample.iter().map(|s| s.insertion).sum::<f64>() / n;
    let mean_deletion = per_sample.iter().map(|s| s.deletion).sum::<f64>() / n;
    let per_alpha = match per_alpha {
        None => None,
        Some(m) => {
            let k = m.alphas.len();
            if m.insertion.len() != per_sample.len() || m.deletion.len() != per_sample.len() {
                return Err(Error::ShapeMismatch {
                    expected: vec![per_sample.len()],
                    actual: vec![m.insertion.len(), m.deletion.len()],
                });
            }
            let mut mean_ins = vec![0.0; k];
            let mut mean_del = vec![0.0; k];
            let mut ins_freq = vec![0.0; k];
            let mut del_freq = vec![0.0; k];
            let mut best_ins = Vec::with_capacity(per_sample.len());
            let mut best_del = Vec::with_capacity(per_sample.len());
            for (irow, drow) in m.insertion.iter().zip(&m.deletion) {
                if irow.len() != k || drow.len() != k {
                    return Err(Error::ShapeMismatch {
                        expected: vec![k],
                        actual: vec![irow.len(), drow.len()],
                    });
                }
                for j in 0..k {
                    mean_ins[j] += irow[j] / n;
                    mean_del[j] += drow[j] / n;
                }
                let bi = argbest(irow, true);
                let bd = argbest(drow, false);
                ins_freq[bi] += 100.0 / n;
                del_freq[bd] += 100.0 / n;
                best_ins.push(bi);
                best_del.push(bd);
            }
            Some(AlphaBreakdown {
                alphas: m.alphas.clone(),
                mean_insertion: mean_ins,
                mean_deletion: mean_del,
                insertion_argmax_freq_pct: ins_freq,
                deletion_argmin_freq_pct: del_freq,
                best_insertion_alpha_index: best_ins,
                best_deletion_alpha_index: best_del,
            })
        }
    };
    Ok(ScoreReport { per_sample: per_sample.to_vec(), mean_insertion, mean_deletion, per_alpha })
}

/// Two-column plain-text emission of `(cutoff, best-alpha)` pairs, one line
/// per sample, for external plotting.
pub fn emit_cutoff_alpha_scatter(pairs: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for &(cutoff, alpha) in pairs {
        out.push_str(&alloc::format!("{cutoff} {alpha}\n"));
    }
    out
}
