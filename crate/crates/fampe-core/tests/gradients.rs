//! Finite-difference verification of the exact input gradients across every
//! layer kind.

use fampe_core::model::{loss, Layer, Model, ModelSpec};
use fampe_core::rng::StreamRng;
use fampe_core::Tensor;

fn seeded_input(shape: &[usize], seed: u64) -> Tensor {
    let mut rng = StreamRng::from_key(seed, &[0xF00D]);
    let len = shape.iter().product();
    Tensor::from_vec(shape, rng.gaussian_field(len, 0.5, 0.3)).unwrap()
}

/// All architectures exercised by the finite-difference suite; together they
/// cover dense, conv (strided and padded), relu, flatten, and avgpool.
pub fn test_architectures() -> Vec<ModelSpec> {
    vec![
        ModelSpec {
            input_shape: vec![6],
            layers: vec![Layer::Dense { input: 6, output: 3 }],
            class_count: 3,
        },
        ModelSpec {
            input_shape: vec![8],
            layers: vec![
                Layer::Dense { input: 8, output: 10 },
                Layer::Relu,
                Layer::Dense { input: 10, output: 4 },
            ],
            class_count: 4,
        },
        ModelSpec {
            input_shape: vec![1, 6, 6],
            layers: vec![
                Layer::Conv2d { in_ch: 1, out_ch: 4, kernel: 3, stride: 1, pad: 1 },
                Layer::Relu,
                Layer::Flatten,
                Layer::Dense { input: 4 * 6 * 6, output: 3 },
            ],
            class_count: 3,
        },
        ModelSpec {
            input_shape: vec![2, 7, 7],
            layers: vec![
                Layer::Conv2d { in_ch: 2, out_ch: 3, kernel: 3, stride: 2, pad: 0 },
                Layer::Relu,
                Layer::Flatten,
                Layer::Dense { input: 3 * 3 * 3, output: 2 },
            ],
            class_count: 2,
        },
        ModelSpec {
            input_shape: vec![1, 8, 8],
            layers: vec![
                Layer::Conv2d { in_ch: 1, out_ch: 4, kernel: 3, stride: 1, pad: 1 },
                Layer::Relu,
                Layer::AvgPool2d { kernel: 2 },
                Layer::Conv2d { in_ch: 4, out_ch: 6, kernel: 3, stride: 1, pad: 0 },
                Layer::Relu,
                Layer::Flatten,
                Layer::Dense { input: 6 * 2 * 2, output: 4 },
            ],
            class_count: 4,
        },
    ]
}

/// Central finite difference of the loss at coordinate `j`.
fn finite_difference(model: &Model, x: &Tensor, y: usize, j: usize, h: f64) -> f64 {
    let mut plus = x.clone();
    plus.data_mut()[j] += h;
    let mut minus = x.clone();
    minus.data_mut()[j] -= h;
    let lp = loss(&model.forward(&plus).unwrap(), y).unwrap();
    let lm = loss(&model.forward(&minus).unwrap(), y).unwrap();
    (lp - lm) / (2.0 * h)
}

pub fn check_gradients(model: &Model, x: &Tensor, y: usize, coords: usize, seed: u64) {
    let grad = model.input_gradient(x, y).unwrap();
    let mut rng = StreamRng::from_key(seed, &[0xC0DE]);
    for _ in 0..coords {
        let j = rng.next_below(x.len());
        let fd = finite_difference(model, x, y, j, 1e-4);
        let an = grad.data()[j];
        let denom = an.abs().max(fd.abs()).max(1e-6);
        let rel = (an - fd).abs() / denom;
        assert!(rel < 1e-4, "coord {j}: analytic {an}, fd {fd}, rel {rel}");
    }
}

#[test]
fn finite_differences_match_across_all_layer_kinds() {
    let mut case = 0u64;
    for spec in test_architectures() {
        for trial in 0..4u64 {
            case += 1;
            let model = Model::init(spec.clone(), 1000 + case).unwrap();
            let x = seeded_input(&spec.input_shape, 2000 + case);
            let y = (trial as usize) % spec.class_count;
            check_gradients(&model, &x, y, 50, 3000 + case);
        }
    }
    assert_eq!(case, 20, "twenty seeded model/input pairs");
}
