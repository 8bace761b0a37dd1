//! Orthonormal 2-D DCT (type-II forward, type-III inverse), applied
//! separably with a precomputed basis matrix per dimension. Direct matrix
//! application is O(n^2) per 1-D pass, acceptable at desk scale.

use alloc::vec;
use alloc::vec::Vec;
use libm::{cos, sqrt};

use crate::error::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// `basis[k * n + j] = s(k) * cos(pi * (2j + 1) * k / (2n))`,
/// `s(0) = sqrt(1/n)`, `s(k>0) = sqrt(2/n)`. The matrix is orthogonal, so
/// the inverse transform is its transpose.
fn dct_basis(n: usize) -> Vec<f64> {
    let mut basis = vec![0.0; n * n];
    for k in 0..n {
        let scale = if k == 0 { sqrt(1.0 / n as f64) } else { sqrt(2.0 / n as f64) };
        for j in 0..n {
            basis[k * n + j] = scale * cos(PI * (2 * j + 1) as f64 * k as f64 / (2.0 * n as f64));
        }
    }
    basis
}

fn apply_rows(data: &[f64], height: usize, width: usize, basis: &[f64], transpose: bool) -> Vec<f64> {
    let mut out = vec![0.0; height * width];
    for i in 0..height {
        let row = &data[i * width..(i + 1) * width];
        for k in 0..width {
            let mut acc = 0.0;
            for j in 0..width {
                let b = if transpose { basis[j * width + k] } else { basis[k * width + j] };
                acc += b * row[j];
            }
            out[i * width + k] = acc;
        }
    }
    out
}

fn apply_cols(data: &[f64], height: usize, width: usize, basis: &[f64], transpose: bool) -> Vec<f64> {
    let mut out = vec![0.0; height * width];
    for j in 0..width {
        for k in 0..height {
            let mut acc = 0.0;
            for i in 0..height {
                let b = if transpose { basis[i * height + k] } else { basis[k * height + i] };
                acc += b * data[i * width + j];
            }
            out[k * width + j] = acc;
        }
    }
    out
}

fn check_finite(channel: &[f64]) -> Result<()> {
    if let Some(index) = channel.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// Forward orthonormal 2-D DCT of a real channel.
pub fn dct2d(channel: &[f64], height: usize, width: usize) -> Result<Vec<f64>> {
    assert!(height > 0 && width > 0, "empty grid");
    assert_eq!(channel.len(), height * width);
    check_finite(channel)?;
    let row_basis = dct_basis(width);
    let col_basis = dct_basis(height);
    let tmp = apply_rows(channel, height, width, &row_basis, false);
    Ok(apply_cols(&tmp, height, width, &col_basis, false))
}

/// Inverse (type-III) orthonormal 2-D DCT; `idct2d(dct2d(x)) = x`.
pub fn idct2d(coeffs: &[f64], height: usize, width: usize) -> Result<Vec<f64>> {
    assert!(height > 0 && width > 0, "empty grid");
    assert_eq!(coeffs.len(), height * width);
    check_finite(coeffs)?;
    let row_basis = dct_basis(width);
    let col_basis = dct_basis(height);
    let tmp = apply_cols(coeffs, height, width, &col_basis, true);
    Ok(apply_rows(&tmp, height, width, &row_basis, true))
}
