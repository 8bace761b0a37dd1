//! Per-layer forward and backward kernels. Everything operates on row-major
//! `f64` slices with shapes carried by the caller.

use alloc::vec;
use alloc::vec::Vec;

pub fn dense_forward(w: &[f64], b: &[f64], x: &[f64], out_dim: usize, in_dim: usize) -> Vec<f64> {
    debug_assert_eq!(w.len(), out_dim * in_dim);
    debug_assert_eq!(x.len(), in_dim);
    let mut y = b.to_vec();
    for o in 0..out_dim {
        let row = &w[o * in_dim..(o + 1) * in_dim];
        let mut acc = 0.0;
        for (wi, xi) in row.iter().zip(x) {
            acc += wi * xi;
        }
        y[o] += acc;
    }
    y
}

/// Returns `(dx, dw, db)`.
pub fn dense_backward(
    w: &[f64],
    x: &[f64],
    dy: &[f64],
    out_dim: usize,
    in_dim: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut dx = vec![0.0; in_dim];
    let mut dw = vec![0.0; out_dim * in_dim];
    for o in 0..out_dim {
        let g = dy[o];
        let row = &w[o * in_dim..(o + 1) * in_dim];
        let drow = &mut dw[o * in_dim..(o + 1) * in_dim];
        for i in 0..in_dim {
            dx[i] += row[i] * g;
            drow[i] = x[i] * g;
        }
    }
    (dx, dw, dy.to_vec())
}

pub struct ConvDims {
    pub in_ch: usize,
    pub out_ch: usize,
    pub kernel: usize,
    pub stride: usize,
    pub pad: usize,
    pub in_h: usize,
    pub in_w: usize,
}

impl ConvDims {
    pub fn out_h(&self) -> usize {
        (self.in_h + 2 * self.pad - self.kernel) / self.stride + 1
    }

    pub fn out_w(&self) -> usize {
        (self.in_w + 2 * self.pad - self.kernel) / self.stride + 1
    }
}

pub fn conv_forward(w: &[f64], b: &[f64], x: &[f64], d: &ConvDims) -> Vec<f64> {
    let (oh, ow) = (d.out_h(), d.out_w());
    let mut y = vec![0.0; d.out_ch * oh * ow];
    for oc in 0..d.out_ch {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = b[oc];
                for ic in 0..d.in_ch {
                    for ky in 0..d.kernel {
                        let iy = (oy * d.stride + ky) as isize - d.pad as isize;
                        if iy < 0 || iy >= d.in_h as isize {
                            continue;
                        }
                        for kx in 0..d.kernel {
                            let ix = (ox * d.stride + kx) as isize - d.pad as isize;
                            if ix < 0 || ix >= d.in_w as isize {
                                continue;
                            }
                            let wv = w[((oc * d.in_ch + ic) * d.kernel + ky) * d.kernel + kx];
                            let xv = x[(ic * d.in_h + iy as usize) * d.in_w + ix as usize];
                            acc += wv * xv;
                        }
                    }
                }
                y[(oc * oh + oy) * ow + ox] = acc;
            }
        }
    }
    y
}

/// Returns `(dx, dw, db)`.
pub fn conv_backward(w: &[f64], x: &[f64], dy: &[f64], d: &ConvDims) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (oh, ow) = (d.out_h(), d.out_w());
    let mut dx = vec![0.0; d.in_ch * d.in_h * d.in_w];
    let mut dw = vec![0.0; w.len()];
    let mut db = vec![0.0; d.out_ch];
    for oc in 0..d.out_ch {
        for oy in 0..oh {
            for ox in 0..ow {
                let g = dy[(oc * oh + oy) * ow + ox];
                db[oc] += g;
                for ic in 0..d.in_ch {
                    for ky in 0..d.kernel {
                        let iy = (oy * d.stride + ky) as isize - d.pad as isize;
                        if iy < 0 || iy >= d.in_h as isize {
                            continue;
                        }
                        for kx in 0..d.kernel {
                            let ix = (ox * d.stride + kx) as isize - d.pad as isize;
                            if ix < 0 || ix >= d.in_w as isize {
                                continue;
                            }
                            let widx = ((oc * d.in_ch + ic) * d.kernel + ky) * d.kernel + kx;
                            let xidx = (ic * d.in_h + iy as usize) * d.in_w + ix as usize;
                            dw[widx] += x[xidx] * g;
                            dx[xidx] += w[widx] * g;
                        }
                    }
                }
            }
        }
    }
    (dx, dw, db)
}

pub fn relu_forward(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect()
}

pub fn relu_backward(x: &[f64], dy: &[f64]) -> Vec<f64> {
    x.iter().zip(dy).map(|(&xv, &g)| if xv > 0.0 { g } else { 0.0 }).collect()
}

/// Non-overlapping k x k mean pooling; trailing rows/cols that do not fill a
/// window are dropped (floor semantics).
pub fn avgpool_forward(x: &[f64], ch: usize, h: usize, w: usize, k: usize) -> Vec<f64> {
    let (oh, ow) = (h / k, w / k);
    let inv = 1.0 / (k * k) as f64;
    let mut y = vec![0.0; ch * oh * ow];
    for c in 0..ch {
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = 0.0;
                for ky in 0..k {
                    for kx in 0..k {
                        acc += x[(c * h + oy * k + ky) * w + ox * k + kx];
                    }
                }
                y[(c * oh + oy) * ow + ox] = acc * inv;
            }
        }
    }
    y
}

pub fn avgpool_backward(dy: &[f64], ch: usize, h: usize, w: usize, k: usize) -> Vec<f64> {
    let (oh, ow) = (h / k, w / k);
    let inv = 1.0 / (k * k) as f64;
    let mut dx = vec![0.0; ch * h * w];
    for c in 0..ch {
        for oy in 0..oh {
            for ox in 0..ow {
                let g = dy[(c * oh + oy) * ow + ox] * inv;
                for ky in 0..k {
                    for kx in 0..k {
                        dx[(c * h + oy * k + ky) * w + ox * k + kx] = g;
                    }
                }
            }
        }
    }
    dx
}
