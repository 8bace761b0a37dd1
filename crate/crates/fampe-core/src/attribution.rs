//! Attribution engines.
//!
//! The main path builds frequency-aware variants of the current sample
//! (additive spatial noise, then masked multiplicative noise split between
//! low- and high-frequency bands at a blend weight `alpha`), averages input
//! gradients over the variants, takes a signed step of size `eta` along the
//! mean gradient, and accumulates `step (.) gradient` over the attack
//! iterations. An all-pass DCT baseline and straight-path integrated
//! gradients are provided for comparison.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::rng::StreamRng;
use crate::spectral::{
    dct2d, energy_cutoff_mean, fft2d, fftshift, gaussian_lowpass_mask, highpass_mask, idct2d,
    ifft2d, ifftshift, max_radius, CutoffRadius,
};
use crate::tensor::Tensor;

/// All method hyperparameters plus the RNG seed.
///
/// `epsilon` is in pixel units; the additive noise applied is
/// `N(0,1) * epsilon / 255`. `sigma` is the standard deviation of the
/// multiplicative frequency-domain noise `N(1, sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FampeConfig {
    pub epsilon: f64,
    pub sigma: f64,
    pub eta: f64,
    pub n_variants: usize,
    pub n_iters: usize,
    pub alpha: f64,
    pub tau: f64,
    pub seed: u64,
    /// Clip attack iterates to `[0, 1]`. Off by default: unclipped keeps the
    /// path integrand exact.
    pub clip: bool,
}

impl Default for FampeConfig {
    fn default() -> Self {
        FampeConfig {
            epsilon: 48.0,
            sigma: 16.0,
            eta: 0.05,
            n_variants: 20,
            n_iters: 10,
            alpha: 0.5,
            tau: 0.9,
            seed: 0,
            clip: false,
        }
    }
}

impl FampeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidConfig { what });
        if !(0.0..=1.0).contains(&self.alpha) || !self.alpha.is_finite() {
            return bad(format!("alpha must be in [0, 1], got {}", self.alpha));
        }
        if !(self.tau.is_finite() && self.tau > 0.0 && self.tau <= 1.0) {
            return bad(format!("tau must be in (0, 1], got {}", self.tau));
        }
        if self.n_variants < 1 {
            return bad(String::from("n_variants must be >= 1"));
        }
        if self.n_iters < 1 {
            return bad(String::from("n_iters must be >= 1"));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad(format!("eta must be > 0, got {}", self.eta));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad(format!("epsilon must be >= 0, got {}", self.epsilon));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return bad(format!("sigma must be >= 0, got {}", self.sigma));
        }
        Ok(())
    }
}

/// How per-channel attribution values are collapsed to one score per pixel
/// when ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelAggregation {
    /// Signed sum over channels (default; path products are predominantly
    /// non-negative).
    Sum,
    AbsSum,
}

/// Per-feature relevance tensor with the same `C x H x W` shape as the input.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionMap {
    pub values: Tensor,
    pub channel_aggregation: ChannelAggregation,
}

impl AttributionMap {
    /// One importance score per pixel (length `H * W`).
    pub fn pixel_importance(&self) -> Vec<f64> {
        let shape = self.values.shape();
        assert_eq!(shape.len(), 3, "attribution maps are C x H x W");
        let (c, plane) = (shape[0], shape[1] * shape[2]);
        let mut out = vec![0.0; plane];
        for ch in 0..c {
            let slice = self.values.channel(ch);
            for (o, &v) in out.iter_mut().zip(slice) {
                *o += match self.channel_aggregation {
                    ChannelAggregation::Sum => v,
                    ChannelAggregation::AbsSum => v.abs(),
                };
            }
        }
        out
    }
}

/// Pre-drawn noise fields for one variant, one entry per channel. The
/// additive field is already scaled by `epsilon / 255`; the multiplicative
/// fields are `N(1, sigma)` draws. Exposed so tests can force shared draws
/// across methods.
#[derive(Debug, Clone)]
pub struct VariantNoise {
    pub additive: Vec<Vec<f64>>,
    pub low_mult: Vec<Vec<f64>>,
    pub high_mult: Vec<Vec<f64>>,
}

fn image_dims(x: &Tensor) -> Result<(usize, usize, usize)> {
    let s = x.shape();
    if s.len() != 3 {
        return Err(Error::ShapeMismatch { expected: vec![0, 0, 0], actual: s.to_vec() });
    }
    Ok((s[0], s[1], s[2]))
}

/// Draw the three noise fields for variant `i` of iteration `t`. Streams are
/// keyed on `(seed, t, i, channel, field)`, so results do not depend on the
/// order variants are generated in.
pub fn draw_variant_noise(
    channels: usize,
    plane: usize,
    cfg: &FampeConfig,
    t: usize,
    i: usize,
) -> VariantNoise {
    let scale = cfg.epsilon / 255.0;
    let mut additive = Vec::with_capacity(channels);
    let mut low_mult = Vec::with_capacity(channels);
    let mut high_mult = Vec::with_capacity(channels);
    for c in 0..channels {
        let key = |field: u64| [0xFA, t as u64, i as u64, c as u64, field];
        let mut r0 = StreamRng::from_key(cfg.seed, &key(0));
        additive.push(r0.gaussian_field(plane, 0.0, scale));
        let mut r1 = StreamRng::from_key(cfg.seed, &key(1));
        low_mult.push(r1.gaussian_field(plane, 1.0, cfg.sigma));
        let mut r2 = StreamRng::from_key(cfg.seed, &key(2));
        high_mult.push(r2.gaussian_field(plane, 1.0, cfg.sigma));
    }
    VariantNoise { additive, low_mult, high_mult }
}

/// Frequency-aware variant with explicit noise fields (test hook).
///
/// Per channel: add the additive field, move to the centered frequency
/// domain, multiply by `alpha * L * n_low + (1 - alpha) * H * n_high`, and
/// return the real part of the inverse transform.
pub fn frequency_aware_variant_with(
    x_t: &Tensor,
    c_f: CutoffRadius,
    alpha: f64,
    noise: &VariantNoise,
) -> Result<Tensor> {
    let (channels, h, w) = image_dims(x_t)?;
    let low = gaussian_lowpass_mask(h, w, c_f)?;
    let high = highpass_mask(h, w, c_f)?;
    let mut out = Vec::with_capacity(x_t.len());
    for c in 0..channels {
        let plane = x_t.channel(c);
        let noisy: Vec<f64> = plane.iter().zip(&noise.additive[c]).map(|(&v, &n)| v + n).collect();
        let spec = fftshift(&fft2d(&noisy, h, w)?)?;
        let multiplier: Vec<f64> = low
            .data()
            .iter()
            .zip(high.data())
            .zip(noise.low_mult[c].iter().zip(&noise.high_mult[c]))
            .map(|((&l, &hi), (&n1, &n2))| alpha * l * n1 + (1.0 - alpha) * hi * n2)
            .collect();
        let modulated = spec.apply_real_field(&multiplier)?;
        let (spatial, _imag_residual) = ifft2d(&ifftshift(&modulated)?)?;
        out.extend(spatial);
    }
    Tensor::from_vec(x_t.shape(), out)
}

/// The `i`-th frequency-aware variant of `x_t` at iteration `t`.
pub fn frequency_aware_variant(
    x_t: &Tensor,
    c_f: CutoffRadius,
    cfg: &FampeConfig,
    i: usize,
    t: usize,
) -> Result<Tensor> {
    let (channels, h, w) = image_dims(x_t)?;
    let noise = draw_variant_noise(channels, h * w, cfg, t, i);
    frequency_aware_variant_with(x_t, c_f, cfg.alpha, &noise)
}

/// All-pass DCT variant with explicit noise fields (test hook). Uses the
/// additive and `low_mult` fields; there is no band split.
pub fn attexplore_variant_with(x_t: &Tensor, noise: &VariantNoise) -> Result<Tensor> {
    let (channels, h, w) = image_dims(x_t)?;
    let mut out = Vec::with_capacity(x_t.len());
    for c in 0..channels {
        let plane = x_t.channel(c);
        let noisy: Vec<f64> = plane.iter().zip(&noise.additive[c]).map(|(&v, &n)| v + n).collect();
        let coeffs = dct2d(&noisy, h, w)?;
        let modulated: Vec<f64> =
            coeffs.iter().zip(&noise.low_mult[c]).map(|(&v, &n)| v * n).collect();
        out.extend(idct2d(&modulated, h, w)?);
    }
    Tensor::from_vec(x_t.shape(), out)
}

/// The `i`-th all-pass (DCT-modulated) variant of `x_t` at iteration `t`.
pub fn attexplore_variant(x_t: &Tensor, cfg: &FampeConfig, i: usize, t: usize) -> Result<Tensor> {
    let (channels, h, w) = image_dims(x_t)?;
    let noise = draw_variant_noise(channels, h * w, cfg, t, i);
    attexplore_variant_with(x_t, &noise)
}

/// Mean input gradient over `n_variants` frequency-aware variants.
pub fn mean_input_gradient(
    model: &Model,
    x_t: &Tensor,
    y: usize,
    c_f: CutoffRadius,
    cfg: &FampeConfig,
    t: usize,
) -> Result<Tensor> {
    mean_gradient_over(model, x_t, y, cfg, |x, i| frequency_aware_variant(x, c_f, cfg, i, t))
}

fn mean_gradient_over(
    model: &Model,
    x_t: &Tensor,
    y: usize,
    cfg: &FampeConfig,
    variant: impl Fn(&Tensor, usize) -> Result<Tensor>,
) -> Result<Tensor> {
    let mut acc = Tensor::zeros(x_t.shape());
    for i in 0..cfg.n_variants {
        let v = variant(x_t, i)?;
        let g = model.input_gradient(&v, y)?;
        acc.add_assign(&g);
    }
    acc.scale(1.0 / cfg.n_variants as f64);
    Ok(acc)
}

/// `eta * sign(g)` elementwise, with `sign(0) = 0`.
pub fn step_direction(g_mean: &Tensor, eta: f64) -> Tensor {
    g_mean.map(|v| {
        if v > 0.0 {
            eta
        } else if v < 0.0 {
            -eta
        } else {
            0.0
        }
    })
}

/// FAMPE output: the attribution map plus the cutoff radius the image
/// selected (needed for cutoff-vs-alpha reporting).
#[derive(Debug, Clone, PartialEq)]
pub struct FampeAttribution {
    pub map: AttributionMap,
    pub cutoff: CutoffRadius,
    /// True when the image was spectrally degenerate (constant) and the
    /// documented `r_max / 2` fallback was used.
    pub cutoff_fallback: bool,
}

/// Cutoff for an image: mean per-channel power spectrum fed to the energy
/// criterion, with the documented `r_max / 2` fallback for constant images.
pub fn image_cutoff(x: &Tensor, tau: f64) -> Result<(CutoffRadius, bool)> {
    let (channels, h, w) = image_dims(x)?;
    let mut specs = Vec::with_capacity(channels);
    for c in 0..channels {
        specs.push(fftshift(&fft2d(x.channel(c), h, w)?)?);
    }
    match energy_cutoff_mean(&specs, tau) {
        Ok(c_f) => Ok((c_f, false)),
        Err(Error::DegenerateSpectrum) => {
            Ok((CutoffRadius::new(max_radius(h, w) / 2.0)?, true))
        }
        Err(e) => Err(e),
    }
}

fn integrate_path(
    x: &Tensor,
    cfg: &FampeConfig,
    grad_at: impl Fn(&Tensor, usize) -> Result<Tensor>,
) -> Result<Tensor> {
    let mut x_t = x.clone();
    let mut accumulated = Tensor::zeros(x.shape());
    for t in 0..cfg.n_iters {
        let g = grad_at(&x_t, t)?;
        if g.first_non_finite().is_some() {
            return Err(Error::NonFiniteAtIteration { iter: t });
        }
        let delta = step_direction(&g, cfg.eta);
        for ((a, d), gv) in accumulated.data_mut().iter_mut().zip(delta.data()).zip(g.data()) {
            *a += d * gv;
        }
        for (xv, d) in x_t.data_mut().iter_mut().zip(delta.data()) {
            *xv += d;
            if cfg.clip {
                *xv = xv.clamp(0.0, 1.0);
            }
        }
        if x_t.first_non_finite().is_some() {
            return Err(Error::NonFiniteAtIteration { iter: t });
        }
    }
    Ok(accumulated)
}

/// Frequency-aware path attribution. The cutoff is computed once from the
/// original `x`, not per iteration.
pub fn fampe_attribute(model: &Model, x: &Tensor, y: usize, cfg: &FampeConfig) -> Result<FampeAttribution> {
    cfg.validate()?;
    x.ensure_finite()?;
    let (c_f, cutoff_fallback) = image_cutoff(x, cfg.tau)?;
    let values = integrate_path(x, cfg, |x_t, t| {
        mean_input_gradient(model, x_t, y, c_f, cfg, t)
    })?;
    Ok(FampeAttribution {
        map: AttributionMap { values, channel_aggregation: ChannelAggregation::Sum },
        cutoff: c_f,
        cutoff_fallback,
    })
}

/// All-pass DCT baseline: identical loop structure, unfiltered multiplicative
/// noise.
pub fn attexplore_attribute(model: &Model, x: &Tensor, y: usize, cfg: &FampeConfig) -> Result<AttributionMap> {
    cfg.validate()?;
    x.ensure_finite()?;
    let values = integrate_path(x, cfg, |x_t, t| {
        mean_gradient_over(model, x_t, y, cfg, |xv, i| attexplore_variant(xv, cfg, i, t))
    })?;
    Ok(AttributionMap { values, channel_aggregation: ChannelAggregation::Sum })
}

/// Straight-path integrated gradients of the target-class logit, midpoint
/// rule with `steps` panels.
pub fn ig_attribute(
    model: &Model,
    x: &Tensor,
    y: usize,
    baseline: &Tensor,
    steps: usize,
) -> Result<AttributionMap> {
    x.ensure_same_shape(baseline)?;
    x.ensure_finite()?;
    baseline.ensure_finite()?;
    if steps == 0 {
        return Err(Error::InvalidConfig { what: String::from("ig steps must be >= 1") });
    }
    let diff: Vec<f64> = x.data().iter().zip(baseline.data()).map(|(a, b)| a - b).collect();
    let mut mean_grad = Tensor::zeros(x.shape());
    for k in 0..steps {
        let frac = (k as f64 + 0.5) / steps as f64;
        let point = Tensor::from_vec(
            x.shape(),
            baseline.data().iter().zip(&diff).map(|(b, d)| b + frac * d).collect(),
        )?;
        mean_grad.add_assign(&model.logit_gradient(&point, y)?);
    }
    mean_grad.scale(1.0 / steps as f64);
    let values = Tensor::from_vec(
        x.shape(),
        diff.iter().zip(mean_grad.data()).map(|(d, g)| d * g).collect(),
    )?;
    Ok(AttributionMap { values, channel_aggregation: ChannelAggregation::Sum })
}

/// The eleven-point ablation grid `0.0, 0.1, ..., 1.0`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// One evaluated grid point of an alpha sweep.
#[derive(Debug, Clone)]
pub struct AlphaSweepPoint {
    pub alpha: f64,
    pub map: AttributionMap,
    pub insertion: f64,
    pub deletion: f64,
}

/// Per-sample alpha sweep outcome: every evaluated grid point plus the
/// max-insertion / min-deletion selection.
#[derive(Debug, Clone)]
pub struct AlphaSweepResult {
    pub points: Vec<AlphaSweepPoint>,
    pub cutoff: CutoffRadius,
    pub best_insertion: f64,
    pub best_insertion_alpha: f64,
    pub best_deletion: f64,
    pub best_deletion_alpha: f64,
}

/// Run FAMPE at each `alpha` (same seed throughout, so alpha is the only
/// varying factor), evaluate each map, and extract the per-sample best
/// insertion and deletion.
pub fn alpha_sweep(
    model: &Model,
    x: &Tensor,
    y: usize,
    cfg: &FampeConfig,
    alphas: &[f64],
    eval: &crate::evaluation::EvalSettings,
) -> Result<AlphaSweepResult> {
    if alphas.is_empty() {
        return Err(Error::InvalidConfig { what: String::from("alpha grid is empty") });
    }
    let mut points = Vec::with_capacity(alphas.len());
    let mut cutoff = None;
    for &alpha in alphas {
        let mut local = cfg.clone();
        local.alpha = alpha;
        let out = fampe_attribute(model, x, y, &local)?;
        cutoff.get_or_insert(out.cutoff);
        let insertion = crate::evaluation::insertion_score(model, x, y, &out.map, eval)?;
        let deletion = crate::evaluation::deletion_score(model, x, y, &out.map, eval)?;
        points.push(AlphaSweepPoint { alpha, map: out.map, insertion, deletion });
    }
    let best_ins = points
        .iter()
        .fold((f64::NEG_INFINITY, 0.0), |acc, p| if p.insertion > acc.0 { (p.insertion, p.alpha) } else { acc });
    let best_del = points
        .iter()
        .fold((f64::INFINITY, 0.0), |acc, p| if p.deletion < acc.0 { (p.deletion, p.alpha) } else { acc });
    Ok(AlphaSweepResult {
        points,
        cutoff: cutoff.unwrap(),
        best_insertion: best_ins.0,
        best_insertion_alpha: best_ins.1,
        best_deletion: best_del.0,
        best_deletion_alpha: best_del.1,
    })
}
