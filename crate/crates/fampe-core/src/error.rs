//! Crate-wide error type.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A grid entry was NaN or infinite; `index` is the row-major offset.
    NonFinite { index: usize },
    /// An intermediate of an iterative attribution loop became non-finite.
    NonFiniteAtIteration { iter: usize },
    /// Tensor shapes do not agree.
    ShapeMismatch { expected: Vec<usize>, actual: Vec<usize> },
    /// A spectrum was passed in the wrong centering layout (e.g. a second
    /// `fftshift`, or `ifft2d` on a still-shifted spectrum).
    ShiftState { expected_shifted: bool },
    /// Mask cutoff must be strictly positive and fit the grid.
    InvalidCutoff { value: f64 },
    /// All non-DC spectral energy is zero (constant image); the cutoff of a
    /// degenerate spectrum is undefined.
    DegenerateSpectrum,
    /// Class label out of range.
    LabelOutOfRange { label: usize, classes: usize },
    EmptyDataset,
    /// A configuration field violates its documented range.
    InvalidConfig { what: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite { index } => {
                write!(f, "non-finite value at row-major index {index}")
            }
            Error::NonFiniteAtIteration { iter } => {
                write!(f, "non-finite intermediate at iteration {iter}")
            }
            Error::ShapeMismatch { expected, actual } => {
                write!(f, "shape mismatch: expected {expected:?}, got {actual:?}")
            }
            Error::ShiftState { expected_shifted } => {
                if *expected_shifted {
                    write!(f, "expected a centered (shifted) spectrum")
                } else {
                    write!(f, "expected an unshifted spectrum")
                }
            }
            Error::InvalidCutoff { value } => {
                write!(f, "invalid cutoff radius {value}")
            }
            Error::DegenerateSpectrum => {
                write!(f, "degenerate spectrum: all non-DC energy is zero")
            }
            Error::LabelOutOfRange { label, classes } => {
                write!(f, "label {label} out of range for {classes} classes")
            }
            Error::EmptyDataset => write!(f, "dataset is empty"),
            Error::InvalidConfig { what } => write!(f, "invalid config: {what}"),
        }
    }
}

impl core::error::Error for Error {}
