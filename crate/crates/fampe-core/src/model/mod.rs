//! Minimal differentiable classifier runtime: forward pass, softmax
//! cross-entropy loss, and exact reverse-mode gradients with respect to the
//! input (the gradient oracle behind the attribution engines) or the
//! parameters (for the SGD trainer).

mod layers;
mod train;

pub use train::{train_sgd, TrainOutcome};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::{exp, log};

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::tensor::Tensor;

use layers::ConvDims;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Dense { input: usize, output: usize },
    Conv2d { in_ch: usize, out_ch: usize, kernel: usize, stride: usize, pad: usize },
    Relu,
    Flatten,
    AvgPool2d { kernel: usize },
}

/// Architecture description: an ordered layer list plus the expected input
/// shape and class count. Shape composition is validated before use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub input_shape: Vec<usize>,
    pub layers: Vec<Layer>,
    pub class_count: usize,
}

/// Image with its ground-truth class.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub image: Tensor,
    pub label: usize,
}

impl ModelSpec {
    /// Shape after each layer, starting with the input shape. Errors when
    /// adjacent layers do not compose or the final output is not
    /// `[class_count]`.
    pub fn activation_shapes(&self) -> Result<Vec<Vec<usize>>> {
        let mut shapes = vec![self.input_shape.clone()];
        for (idx, layer) in self.layers.iter().enumerate() {
            let cur = shapes.last().unwrap().clone();
            let next = match *layer {
                Layer::Dense { input, output } => {
                    if cur != [input] {
                        return Err(Error::InvalidConfig {
                            what: format!("layer {idx}: dense expects [{input}], got {cur:?}"),
                        });
                    }
                    vec![output]
                }
                Layer::Conv2d { in_ch, out_ch, kernel, stride, pad } => {
                    if cur.len() != 3 || cur[0] != in_ch {
                        return Err(Error::InvalidConfig {
                            what: format!("layer {idx}: conv2d expects [{in_ch}, H, W], got {cur:?}"),
                        });
                    }
                    if kernel == 0 || stride == 0 {
                        return Err(Error::InvalidConfig {
                            what: format!("layer {idx}: kernel and stride must be positive"),
                        });
                    }
                    let d = ConvDims {
                        in_ch,
                        out_ch,
                        kernel,
                        stride,
                        pad,
                        in_h: cur[1],
                        in_w: cur[2],
                    };
                    if cur[1] + 2 * pad < kernel || cur[2] + 2 * pad < kernel {
                        return Err(Error::InvalidConfig {
                            what: format!("layer {idx}: kernel {kernel} larger than padded input"),
                        });
                    }
                    vec![out_ch, d.out_h(), d.out_w()]
                }
                Layer::Relu => cur,
                Layer::Flatten => vec![cur.iter().product()],
                Layer::AvgPool2d { kernel } => {
                    if cur.len() != 3 || kernel == 0 || cur[1] / kernel == 0 || cur[2] / kernel == 0 {
                        return Err(Error::InvalidConfig {
                            what: format!("layer {idx}: avgpool2d({kernel}) does not fit {cur:?}"),
                        });
                    }
                    vec![cur[0], cur[1] / kernel, cur[2] / kernel]
                }
            };
            shapes.push(next);
        }
        let out = shapes.last().unwrap();
        if *out != [self.class_count] {
            return Err(Error::InvalidConfig {
                what: format!(
                    "final activation shape {out:?} does not match class count {}",
                    self.class_count
                ),
            });
        }
        Ok(shapes)
    }

    /// Parameter tensor shapes per layer (`W` then `b` for dense/conv).
    pub fn param_shapes(&self) -> Vec<Vec<Vec<usize>>> {
        self.layers
            .iter()
            .map(|layer| match *layer {
                Layer::Dense { input, output } => vec![vec![output, input], vec![output]],
                Layer::Conv2d { in_ch, out_ch, kernel, .. } => {
                    vec![vec![out_ch, in_ch, kernel, kernel], vec![out_ch]]
                }
                _ => Vec::new(),
            })
            .collect()
    }
}

/// A validated architecture together with its flat parameter tensor list
/// (layer order, `W` before `b`).
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    spec: ModelSpec,
    weights: Vec<Tensor>,
    shapes: Vec<Vec<usize>>,
}

impl Model {
    /// Seeded He-normal initialization (biases zero).
    pub fn init(spec: ModelSpec, seed: u64) -> Result<Model> {
        let shapes = spec.activation_shapes()?;
        let mut weights = Vec::new();
        for (li, tensors) in spec.param_shapes().iter().enumerate() {
            for (ti, tshape) in tensors.iter().enumerate() {
                let len: usize = tshape.iter().product();
                let t = if ti == 0 {
                    // fan-in = everything but the leading output extent
                    let fan_in: usize = tshape[1..].iter().product();
                    let std = libm::sqrt(2.0 / fan_in as f64);
                    let mut rng = StreamRng::from_key(seed, &[0x57, li as u64, ti as u64]);
                    Tensor::from_vec(tshape, rng.gaussian_field(len, 0.0, std))?
                } else {
                    Tensor::zeros(tshape)
                };
                weights.push(t);
            }
        }
        Ok(Model { spec, weights, shapes })
    }

    /// Build a model from externally supplied weights (e.g. a weight file),
    /// checking every tensor shape against the spec.
    pub fn with_weights(spec: ModelSpec, weights: Vec<Tensor>) -> Result<Model> {
        let shapes = spec.activation_shapes()?;
        let expected: Vec<Vec<usize>> = spec.param_shapes().into_iter().flatten().collect();
        if expected.len() != weights.len() {
            return Err(Error::InvalidConfig {
                what: format!("expected {} weight tensors, got {}", expected.len(), weights.len()),
            });
        }
        for (e, t) in expected.iter().zip(&weights) {
            if t.shape() != e.as_slice() {
                return Err(Error::ShapeMismatch { expected: e.clone(), actual: t.shape().to_vec() });
            }
        }
        Ok(Model { spec, weights, shapes })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[Tensor] {
        &self.weights
    }

    pub fn class_count(&self) -> usize {
        self.spec.class_count
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        if x.shape() != self.spec.input_shape.as_slice() {
            return Err(Error::ShapeMismatch {
                expected: self.spec.input_shape.clone(),
                actual: x.shape().to_vec(),
            });
        }
        x.ensure_finite()
    }

    fn conv_dims(&self, layer_idx: usize) -> ConvDims {
        let input = &self.shapes[layer_idx];
        match self.spec.layers[layer_idx] {
            Layer::Conv2d { in_ch, out_ch, kernel, stride, pad } => ConvDims {
                in_ch,
                out_ch,
                kernel,
                stride,
                pad,
                in_h: input[1],
                in_w: input[2],
            },
            _ => unreachable!("conv_dims on non-conv layer"),
        }
    }

    /// Activations after every layer; `trace[0]` is the input, the last entry
    /// the logits.
    fn forward_trace(&self, x: &Tensor) -> Result<Vec<Tensor>> {
        self.check_input(x)?;
        let mut trace = vec![x.clone()];
        let mut widx = 0usize;
        for (li, layer) in self.spec.layers.iter().enumerate() {
            let cur = trace.last().unwrap();
            let next_shape = &self.shapes[li + 1];
            let data = match *layer {
                Layer::Dense { input, output } => {
                    let w = self.weights[widx].data();
                    let b = self.weights[widx + 1].data();
                    widx += 2;
                    layers::dense_forward(w, b, cur.data(), output, input)
                }
                Layer::Conv2d { .. } => {
                    let d = self.conv_dims(li);
                    let w = self.weights[widx].data();
                    let b = self.weights[widx + 1].data();
                    widx += 2;
                    layers::conv_forward(w, b, cur.data(), &d)
                }
                Layer::Relu => layers::relu_forward(cur.data()),
                Layer::Flatten => cur.data().to_vec(),
                Layer::AvgPool2d { kernel } => {
                    let s = &self.shapes[li];
                    layers::avgpool_forward(cur.data(), s[0], s[1], s[2], kernel)
                }
            };
            trace.push(Tensor::from_vec(next_shape, data)?);
        }
        Ok(trace)
    }

    /// Deterministic forward pass to logits.
    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_trace(x)?.into_iter().next_back().unwrap())
    }

    /// True-class probability under softmax, the quantity tracked by the
    /// insertion/deletion curves.
    pub fn class_probability(&self, x: &Tensor, y: usize) -> Result<f64> {
        let logits = self.forward(x)?;
        check_label(y, self.class_count())?;
        Ok(softmax(logits.data())[y])
    }

    /// Reverse pass from a logit cotangent down to the input; optionally
    /// accumulates parameter gradients (aligned with `weights`).
    fn backward(
        &self,
        trace: &[Tensor],
        dlogits: Vec<f64>,
        mut param_grads: Option<&mut Vec<Tensor>>,
    ) -> Result<Tensor> {
        let widx_per_layer: Vec<usize> = {
            let mut acc = 0;
            self.spec
                .layers
                .iter()
                .map(|l| {
                    let at = acc;
                    if matches!(l, Layer::Dense { .. } | Layer::Conv2d { .. }) {
                        acc += 2;
                    }
                    at
                })
                .collect()
        };
        let mut grad = dlogits;
        for (li, layer) in self.spec.layers.iter().enumerate().rev() {
            let x_in = trace[li].data();
            grad = match *layer {
                Layer::Dense { input, output } => {
                    let wi = widx_per_layer[li];
                    let (dx, dw, db) =
                        layers::dense_backward(self.weights[wi].data(), x_in, &grad, output, input);
                    if let Some(pg) = param_grads.as_deref_mut() {
                        accumulate(&mut pg[wi], &dw);
                        accumulate(&mut pg[wi + 1], &db);
                    }
                    dx
                }
                Layer::Conv2d { .. } => {
                    let wi = widx_per_layer[li];
                    let d = self.conv_dims(li);
                    let (dx, dw, db) =
                        layers::conv_backward(self.weights[wi].data(), x_in, &grad, &d);
                    if let Some(pg) = param_grads.as_deref_mut() {
                        accumulate(&mut pg[wi], &dw);
                        accumulate(&mut pg[wi + 1], &db);
                    }
                    dx
                }
                Layer::Relu => layers::relu_backward(x_in, &grad),
                Layer::Flatten => grad,
                Layer::AvgPool2d { kernel } => {
                    let s = &self.shapes[li];
                    layers::avgpool_backward(&grad, s[0], s[1], s[2], kernel)
                }
            };
        }
        Tensor::from_vec(&self.spec.input_shape, grad)
    }

    /// Exact gradient of the softmax cross-entropy loss with respect to the
    /// input.
    pub fn input_gradient(&self, x: &Tensor, y: usize) -> Result<Tensor> {
        check_label(y, self.class_count())?;
        let trace = self.forward_trace(x)?;
        let logits = trace.last().unwrap();
        let mut dlogits = softmax(logits.data());
        dlogits[y] -= 1.0;
        self.backward(&trace, dlogits, None)
    }

    /// Gradient of the pre-softmax logit of `class` with respect to the input
    /// (the integrated-gradients integrand).
    pub fn logit_gradient(&self, x: &Tensor, class: usize) -> Result<Tensor> {
        check_label(class, self.class_count())?;
        let trace = self.forward_trace(x)?;
        let mut dlogits = vec![0.0; self.class_count()];
        dlogits[class] = 1.0;
        self.backward(&trace, dlogits, None)
    }

    /// One training step: returns the loss and updates weights in place.
    pub(crate) fn sgd_step(&mut self, sample: &LabeledSample, lr: f64) -> Result<f64> {
        check_label(sample.label, self.class_count())?;
        let trace = self.forward_trace(&sample.image)?;
        let logits = trace.last().unwrap();
        let loss_value = loss(logits, sample.label)?;
        let mut dlogits = softmax(logits.data());
        dlogits[sample.label] -= 1.0;
        let mut grads: Vec<Tensor> = self.weights.iter().map(|t| Tensor::zeros(t.shape())).collect();
        self.backward(&trace, dlogits, Some(&mut grads))?;
        for (w, g) in self.weights.iter_mut().zip(&grads) {
            for (wv, gv) in w.data_mut().iter_mut().zip(g.data()) {
                *wv -= lr * gv;
            }
        }
        Ok(loss_value)
    }
}

fn accumulate(t: &mut Tensor, delta: &[f64]) {
    for (a, b) in t.data_mut().iter_mut().zip(delta) {
        *a += b;
    }
}

fn check_label(y: usize, classes: usize) -> Result<()> {
    if y >= classes {
        return Err(Error::LabelOutOfRange { label: y, classes });
    }
    Ok(())
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| exp(z - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Softmax cross-entropy with max-subtraction stabilization.
pub fn loss(logits: &Tensor, y: usize) -> Result<f64> {
    check_label(y, logits.len())?;
    let z = logits.data();
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse: f64 = max + log(z.iter().map(|&v| exp(v - max)).sum::<f64>());
    Ok(lse - z[y])
}
