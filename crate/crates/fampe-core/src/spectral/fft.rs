//! 2-D discrete Fourier transform over row-major real channels.
//!
//! Power-of-two lengths use an iterative radix-2 Cooley-Tukey pass; other
//! lengths fall back to a direct O(n^2) DFT, which is fine at desk scale.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use libm::{cos, sin};
use num_complex::Complex64;

use super::Spectrum;
use crate::error::{Error, Result};

fn twiddles(n: usize, inverse: bool) -> Vec<Complex64> {
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|k| {
            let angle = sign * TAU * k as f64 / n as f64;
            Complex64::new(cos(angle), sin(angle))
        })
        .collect()
}

fn fft1d_pow2(buf: &mut [Complex64], tw: &[Complex64]) {
    let n = buf.len();
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = tw[k * step];
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w;
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

fn dft1d_direct(buf: &mut [Complex64], tw: &[Complex64]) {
    let n = buf.len();
    let mut out = vec![Complex64::default(); n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        for (j, &x) in buf.iter().enumerate() {
            acc += x * tw[(k * j) % n];
        }
        *o = acc;
    }
    buf.copy_from_slice(&out);
}

struct Dim {
    tw: Vec<Complex64>,
    pow2: bool,
}

impl Dim {
    fn new(n: usize, inverse: bool) -> Self {
        Dim { tw: twiddles(n, inverse), pow2: n.is_power_of_two() }
    }

    fn run(&self, buf: &mut [Complex64]) {
        if self.pow2 {
            fft1d_pow2(buf, &self.tw);
        } else {
            dft1d_direct(buf, &self.tw);
        }
    }
}

fn transform2d(data: &mut [Complex64], height: usize, width: usize, inverse: bool) {
    let row_dim = Dim::new(width, inverse);
    for row in data.chunks_mut(width) {
        row_dim.run(row);
    }
    let col_dim = Dim::new(height, inverse);
    let mut col = vec![Complex64::default(); height];
    for j in 0..width {
        for i in 0..height {
            col[i] = data[i * width + j];
        }
        col_dim.run(&mut col);
        for i in 0..height {
            data[i * width + j] = col[i];
        }
    }
}

/// Forward 2-D DFT of a real channel (unnormalized, unshifted output).
pub fn fft2d(channel: &[f64], height: usize, width: usize) -> Result<Spectrum> {
    assert!(height > 0 && width > 0, "empty grid");
    assert_eq!(channel.len(), height * width);
    if let Some(index) = channel.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut data: Vec<Complex64> = channel.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform2d(&mut data, height, width, false);
    Ok(Spectrum::new(height, width, false, data))
}

/// Inverse 2-D DFT with the `1/(H*W)` factor. Returns the real part of the
/// complex inverse along with the largest imaginary-part magnitude, which is
/// nonzero when the spectrum lost Hermitian symmetry (e.g. after asymmetric
/// multiplicative noise).
pub fn ifft2d(spec: &Spectrum) -> Result<(Vec<f64>, f64)> {
    if spec.is_shifted() {
        return Err(Error::ShiftState { expected_shifted: false });
    }
    if let Some(index) = spec.data().iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let (h, w) = (spec.height(), spec.width());
    let mut data = spec.data().to_vec();
    transform2d(&mut data, h, w, true);
    let norm = 1.0 / (h * w) as f64;
    let mut imag_residual = 0.0f64;
    let real: Vec<f64> = data
        .iter()
        .map(|c| {
            let im = (c.im * norm).abs();
            if im > imag_residual {
                imag_residual = im;
            }
            c.re * norm
        })
        .collect();
    Ok((real, imag_residual))
}
