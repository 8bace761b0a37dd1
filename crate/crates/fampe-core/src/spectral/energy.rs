//! Energy-based selection of the cutoff radius: the smallest integer radius
//! whose enclosed cumulative power reaches a fraction `tau` of the total
//! non-DC power.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::ceil;

use super::mask::radial_distance;
use super::{CutoffRadius, Spectrum};
use crate::error::{Error, Result};

/// Largest radial distance on the grid (the corner bin vs. the centered DC bin).
pub fn max_radius(height: usize, width: usize) -> f64 {
    radial_distance(0, 0, height, width)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidConfig { what: format!("tau must be in (0, 1], got {tau}") });
    }
    Ok(())
}

fn cutoff_of_power(power: &[f64], height: usize, width: usize, tau: f64) -> Result<CutoffRadius> {
    let r_max = ceil(max_radius(height, width)) as usize;
    // Bucket r holds the power of bins whose smallest covering integer
    // radius is r, i.e. r = ceil(D).
    let mut buckets = vec![0.0f64; r_max + 1];
    let mut total = 0.0f64;
    for u in 0..height {
        for v in 0..width {
            let d = radial_distance(u, v, height, width);
            if d == 0.0 {
                continue; // DC excluded
            }
            let p = power[u * width + v];
            buckets[ceil(d) as usize] += p;
            total += p;
        }
    }
    if total <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let threshold = tau * total;
    let mut cum = 0.0;
    for (r, b) in buckets.iter().enumerate().skip(1) {
        cum += b;
        if cum >= threshold {
            return CutoffRadius::new(r as f64);
        }
    }
    // Accumulated floating error can leave cum marginally below threshold at
    // tau = 1; the full-grid radius covers everything by definition.
    CutoffRadius::new(r_max as f64)
}

/// Cutoff radius of a single centered spectrum.
pub fn energy_cutoff(spec: &Spectrum, tau: f64) -> Result<CutoffRadius> {
    check_tau(tau)?;
    if !spec.is_shifted() {
        return Err(Error::ShiftState { expected_shifted: true });
    }
    let power: Vec<f64> = spec.data().iter().map(|c| c.norm_sqr()).collect();
    cutoff_of_power(&power, spec.height(), spec.width(), tau)
}

/// One cutoff per image: the mean of the per-channel power spectra.
pub fn energy_cutoff_mean(specs: &[Spectrum], tau: f64) -> Result<CutoffRadius> {
    check_tau(tau)?;
    if specs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (h, w) = (specs[0].height(), specs[0].width());
    let mut power = vec![0.0f64; h * w];
    for spec in specs {
        if !spec.is_shifted() {
            return Err(Error::ShiftState { expected_shifted: true });
        }
        if spec.height() != h || spec.width() != w {
            return Err(Error::ShapeMismatch {
                expected: vec![h, w],
                actual: vec![spec.height(), spec.width()],
            });
        }
        for (p, c) in power.iter_mut().zip(spec.data()) {
            *p += c.norm_sqr();
        }
    }
    let n = specs.len() as f64;
    for p in &mut power {
        *p /= n;
    }
    cutoff_of_power(&power, h, w, tau)
}
