//! Frequency-domain machinery: 2-D FFT/IFFT with centering shifts, Gaussian
//! frequency masks, the energy-based cutoff radius, and a 2-D orthonormal DCT.
//!
//! Convention: the forward FFT is unnormalized and the inverse carries the
//! `1/(H*W)` factor, so `Sum |x|^2 = (1/(H*W)) * Sum |F|^2` (Parseval). All
//! masks live in the centered layout where the DC bin sits at
//! `(floor(H/2), floor(W/2))`.

mod dct;
mod energy;
mod fft;
mod mask;

pub use dct::{dct2d, idct2d};
pub use energy::{energy_cutoff, energy_cutoff_mean, max_radius};
pub use fft::{fft2d, ifft2d};
pub use mask::{gaussian_lowpass_mask, highpass_mask, FrequencyMask, MaskKind};

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex 2-D frequency grid for one image channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    height: usize,
    width: usize,
    /// True when the zero-frequency bin sits at `(floor(H/2), floor(W/2))`.
    shifted: bool,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn new(height: usize, width: usize, shifted: bool, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), height * width);
        Spectrum { height, width, shifted, data }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_shifted(&self) -> bool {
        self.shifted
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.width + col]
    }

    /// Elementwise product with a real field of the same layout and size.
    pub fn apply_real_field(&self, field: &[f64]) -> Result<Spectrum> {
        if field.len() != self.data.len() {
            return Err(Error::ShapeMismatch {
                expected: alloc::vec![self.height, self.width],
                actual: alloc::vec![field.len()],
            });
        }
        let data = self.data.iter().zip(field).map(|(c, &m)| c * m).collect();
        Ok(Spectrum::new(self.height, self.width, self.shifted, data))
    }

    /// Multiply by a frequency mask. The spectrum must be in the centered
    /// layout because masks are defined around the centered DC bin.
    pub fn apply_mask(&self, mask: &FrequencyMask) -> Result<Spectrum> {
        if !self.shifted {
            return Err(Error::ShiftState { expected_shifted: true });
        }
        if mask.height() != self.height || mask.width() != self.width {
            return Err(Error::ShapeMismatch {
                expected: alloc::vec![self.height, self.width],
                actual: alloc::vec![mask.height(), mask.width()],
            });
        }
        self.apply_real_field(mask.data())
    }
}

fn roll(spec: &Spectrum, shift_rows: usize, shift_cols: usize, shifted_after: bool) -> Spectrum {
    let (h, w) = (spec.height, spec.width);
    let mut out = alloc::vec![Complex64::default(); h * w];
    for i in 0..h {
        let ti = (i + shift_rows) % h;
        for j in 0..w {
            let tj = (j + shift_cols) % w;
            out[ti * w + tj] = spec.data[i * w + j];
        }
    }
    Spectrum::new(h, w, shifted_after, out)
}

/// Move the zero-frequency bin to the grid center (quadrant swap).
pub fn fftshift(spec: &Spectrum) -> Result<Spectrum> {
    if spec.shifted {
        return Err(Error::ShiftState { expected_shifted: false });
    }
    Ok(roll(spec, spec.height / 2, spec.width / 2, true))
}

/// Undo [`fftshift`], exact for odd dimensions too.
pub fn ifftshift(spec: &Spectrum) -> Result<Spectrum> {
    if !spec.shifted {
        return Err(Error::ShiftState { expected_shifted: true });
    }
    Ok(roll(
        spec,
        spec.height - spec.height / 2,
        spec.width - spec.width / 2,
        false,
    ))
}

/// Radial cutoff between low- and high-frequency bins, in bin units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffRadius(f64);

impl CutoffRadius {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidCutoff { value });
        }
        Ok(CutoffRadius(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn impulse_spectrum(h: usize, w: usize, at: (usize, usize)) -> Spectrum {
        let mut data = vec![Complex64::default(); h * w];
        data[at.0 * w + at.1] = Complex64::new(1.0, 0.0);
        Spectrum::new(h, w, false, data)
    }

    #[test]
    fn shift_moves_origin_to_center() {
        let s = fftshift(&impulse_spectrum(4, 4, (0, 0))).unwrap();
        assert_eq!(s.at(2, 2), Complex64::new(1.0, 0.0));
        assert!(s.is_shifted());
    }

    #[test]
    fn shift_on_rectangular_odd_grid() {
        // 3x5 grid: (0,0) lands at (floor(3/2), floor(5/2)) = (1, 2).
        let s = fftshift(&impulse_spectrum(3, 5, (0, 0))).unwrap();
        assert_eq!(s.at(1, 2), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn shift_roundtrip_exact_on_odd_grids() {
        let mut data = Vec::new();
        for k in 0..25 {
            data.push(Complex64::new(k as f64, -(k as f64) * 0.5));
        }
        let s = Spectrum::new(5, 5, false, data);
        let back = ifftshift(&fftshift(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn double_shift_rejected() {
        let s = fftshift(&impulse_spectrum(4, 4, (0, 0))).unwrap();
        assert_eq!(
            fftshift(&s).unwrap_err(),
            Error::ShiftState { expected_shifted: false }
        );
        let u = ifftshift(&s).unwrap();
        assert_eq!(
            ifftshift(&u).unwrap_err(),
            Error::ShiftState { expected_shifted: true }
        );
    }

    #[test]
    fn cutoff_must_be_positive_and_finite() {
        assert!(CutoffRadius::new(0.0).is_err());
        assert!(CutoffRadius::new(-1.0).is_err());
        assert!(CutoffRadius::new(f64::NAN).is_err());
        assert!(CutoffRadius::new(2.5).is_ok());
    }
}
