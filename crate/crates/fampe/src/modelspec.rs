//! Plain-text model architecture files.
//!
//! One directive per line; `#` starts a comment. Example:
//!
//! ```text
//! input 1 32 32
//! conv 1 8 3 1 1      # in_ch out_ch kernel stride pad
//! relu
//! avgpool 2
//! flatten
//! dense 2048 4        # input output
//! classes 4
//! ```

use fampe_core::model::{Layer, ModelSpec};

use crate::error::{CliError, CliResult};

/// The built-in classifier used when no architecture file is given: a small
/// two-block CNN for `1 x size x size` inputs.
pub fn default_model_spec(size: usize, classes: usize) -> ModelSpec {
    let pooled = size / 2 / 2;
    ModelSpec {
        input_shape: vec![1, size, size],
        layers: vec![
            Layer::Conv2d { in_ch: 1, out_ch: 8, kernel: 3, stride: 1, pad: 1 },
            Layer::Relu,
            Layer::AvgPool2d { kernel: 2 },
            Layer::Conv2d { in_ch: 8, out_ch: 16, kernel: 3, stride: 1, pad: 1 },
            Layer::Relu,
            Layer::AvgPool2d { kernel: 2 },
            Layer::Flatten,
            Layer::Dense { input: 16 * pooled * pooled, output: classes },
        ],
        class_count: classes,
    }
}

pub fn encode_model_spec(spec: &ModelSpec) -> String {
    let mut out = String::from("input");
    for d in &spec.input_shape {
        out.push_str(&format!(" {d}"));
    }
    out.push('\n');
    for layer in &spec.layers {
        match layer {
            Layer::Dense { input, output } => out.push_str(&format!("dense {input} {output}\n")),
            Layer::Conv2d { in_ch, out_ch, kernel, stride, pad } => {
                out.push_str(&format!("conv {in_ch} {out_ch} {kernel} {stride} {pad}\n"))
            }
            Layer::Relu => out.push_str("relu\n"),
            Layer::Flatten => out.push_str("flatten\n"),
            Layer::AvgPool2d { kernel } => out.push_str(&format!("avgpool {kernel}\n")),
        }
    }
    out.push_str(&format!("classes {}\n", spec.class_count));
    out
}

pub fn parse_model_spec(text: &str) -> CliResult<ModelSpec> {
    let mut input_shape: Option<Vec<usize>> = None;
    let mut class_count: Option<usize> = None;
    let mut layers = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let directive = parts.next().unwrap();
        let args: Vec<usize> = parts
            .map(|p| {
                p.parse().map_err(|_| {
                    CliError::format(format!(
                        "model spec line {}: {p:?} is not an integer",
                        lineno + 1
                    ))
                })
            })
            .collect::<CliResult<_>>()?;
        let expect = |n: usize| -> CliResult<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(CliError::format(format!(
                    "model spec line {}: `{directive}` takes {n} arguments, got {}",
                    lineno + 1,
                    args.len()
                )))
            }
        };
        match directive {
            "input" => {
                if args.is_empty() {
                    return Err(CliError::format(format!(
                        "model spec line {}: `input` needs a shape",
                        lineno + 1
                    )));
                }
                input_shape = Some(args);
            }
            "classes" => {
                expect(1)?;
                class_count = Some(args[0]);
            }
            "dense" => {
                expect(2)?;
                layers.push(Layer::Dense { input: args[0], output: args[1] });
            }
            "conv" => {
                expect(5)?;
                layers.push(Layer::Conv2d {
                    in_ch: args[0],
                    out_ch: args[1],
                    kernel: args[2],
                    stride: args[3],
                    pad: args[4],
                });
            }
            "relu" => {
                expect(0)?;
                layers.push(Layer::Relu);
            }
            "flatten" => {
                expect(0)?;
                layers.push(Layer::Flatten);
            }
            "avgpool" => {
                expect(1)?;
                layers.push(Layer::AvgPool2d { kernel: args[0] });
            }
            other => {
                return Err(CliError::format(format!(
                    "model spec line {}: unknown directive {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    let spec = ModelSpec {
        input_shape: input_shape
            .ok_or_else(|| CliError::format("model spec is missing an `input` line"))?,
        layers,
        class_count: class_count
            .ok_or_else(|| CliError::format("model spec is missing a `classes` line"))?,
    };
    // surfaces inter-layer shape conflicts at parse time
    spec.activation_shapes().map_err(CliError::from)?;
    Ok(spec)
}
