//! Gaussian low-/high-pass frequency masks in the centered layout.

use alloc::vec::Vec;
use libm::{exp, sqrt};

use super::CutoffRadius;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskKind {
    Lowpass,
    Highpass,
}

/// Real 2-D gain grid with entries in `[0, 1]`, centered DC bin.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMask {
    height: usize,
    width: usize,
    kind: MaskKind,
    cutoff: CutoffRadius,
    data: Vec<f64>,
}

impl FrequencyMask {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    pub fn cutoff(&self) -> CutoffRadius {
        self.cutoff
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }
}

/// Distance from bin `(u, v)` to the centered DC bin `(floor(H/2), floor(W/2))`.
pub(crate) fn radial_distance(u: usize, v: usize, height: usize, width: usize) -> f64 {
    let du = u as f64 - (height / 2) as f64;
    let dv = v as f64 - (width / 2) as f64;
    sqrt(du * du + dv * dv)
}

/// `exp(-D^2 / (2 c^2))` around the centered DC bin; exactly 1 at the center.
pub fn gaussian_lowpass_mask(height: usize, width: usize, cutoff: CutoffRadius) -> Result<FrequencyMask> {
    let c = cutoff.value();
    let denom = 2.0 * c * c;
    let mut data = Vec::with_capacity(height * width);
    for u in 0..height {
        for v in 0..width {
            let d = radial_distance(u, v, height, width);
            data.push(exp(-(d * d) / denom));
        }
    }
    Ok(FrequencyMask { height, width, kind: MaskKind::Lowpass, cutoff, data })
}

/// Elementwise complement `1 - lowpass`, so the pair partitions the spectrum.
pub fn highpass_mask(height: usize, width: usize, cutoff: CutoffRadius) -> Result<FrequencyMask> {
    let low = gaussian_lowpass_mask(height, width, cutoff)?;
    let data = low.data.iter().map(|&v| 1.0 - v).collect();
    Ok(FrequencyMask { height, width, kind: MaskKind::Highpass, cutoff, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_bin_is_exactly_one() {
        for (h, w) in [(4, 4), (5, 5), (3, 8), (7, 4)] {
            let m = gaussian_lowpass_mask(h, w, CutoffRadius::new(2.0).unwrap()).unwrap();
            assert_eq!(m.at(h / 2, w / 2), 1.0);
            let hi = highpass_mask(h, w, CutoffRadius::new(2.0).unwrap()).unwrap();
            assert_eq!(hi.at(h / 2, w / 2), 0.0);
        }
    }

    #[test]
    fn value_at_cutoff_distance() {
        // Bin at distance exactly c from center: exp(-1/2).
        let c = CutoffRadius::new(3.0).unwrap();
        let m = gaussian_lowpass_mask(8, 8, c).unwrap();
        // center (4,4); bin (4,7) is at distance 3.
        assert!((m.at(4, 7) - exp(-0.5)).abs() < 1e-15);
        assert!((m.at(4, 7) - 0.606530659712633).abs() < 1e-12);
        let hi = highpass_mask(8, 8, c).unwrap();
        assert!((hi.at(4, 7) - (1.0 - exp(-0.5))).abs() < 1e-15);
        assert!((hi.at(4, 7) - 0.393469).abs() < 1e-6);
    }

    #[test]
    fn value_at_twice_cutoff() {
        // 8x8, c = 2, bin at distance 4 -> exp(-2).
        let m = gaussian_lowpass_mask(8, 8, CutoffRadius::new(2.0).unwrap()).unwrap();
        assert!((m.at(4, 0) - exp(-2.0)).abs() < 1e-15);
        assert!((m.at(4, 0) - 0.135335).abs() < 1e-6);
    }

    #[test]
    fn complement_is_exact_and_bounded() {
        let c = CutoffRadius::new(1.7).unwrap();
        let low = gaussian_lowpass_mask(6, 9, c).unwrap();
        let high = highpass_mask(6, 9, c).unwrap();
        for (l, h) in low.data().iter().zip(high.data()) {
            assert_eq!(l + h, 1.0);
            assert!((0.0..=1.0).contains(l));
            assert!((0.0..=1.0).contains(h));
        }
    }

    #[test]
    fn lowpass_monotone_in_cutoff() {
        let cuts = [0.5, 1.0, 2.0, 4.0, 8.0];
        let masks: Vec<FrequencyMask> = cuts
            .iter()
            .map(|&c| gaussian_lowpass_mask(8, 8, CutoffRadius::new(c).unwrap()).unwrap())
            .collect();
        for pair in masks.windows(2) {
            for (a, b) in pair[0].data().iter().zip(pair[1].data()) {
                assert!(b >= a);
            }
        }
    }
}
