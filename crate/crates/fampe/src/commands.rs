//! The five commands behind the CLI surface. Each takes fully resolved
//! arguments (flag/config-file merging happens in `main`) and writes its
//! artifacts atomically into an output directory.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use fampe_core::attribution::{
    alpha_sweep, attexplore_attribute, fampe_attribute, ig_attribute, image_cutoff,
    AttributionMap, ChannelAggregation, FampeConfig,
};
use fampe_core::evaluation::{
    aggregate_report, baseline_image, deletion_score, emit_cutoff_alpha_scatter, insertion_score,
    AlphaMatrix, BaselineKind, EvalSettings, SampleScore,
};
use fampe_core::model::{train_sgd, LabeledSample, Model};
use fampe_core::Tensor;

use crate::dataset::{self, SyntheticShapesSpec};
use crate::error::{CliError, CliResult};
use crate::fsutil;
use crate::image::RawImage;
use crate::mapfile;
use crate::modelspec;
use crate::report::{self, ScoreRow};
use crate::weights;

pub const WEIGHTS_FILE: &str = "weights.famw";
pub const MODEL_FILE: &str = "model.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fampe,
    Ig,
    Attexplore,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fampe => "fampe",
            Method::Ig => "ig",
            Method::Attexplore => "attexplore",
        }
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "fampe" => Ok(Method::Fampe),
            "ig" => Ok(Method::Ig),
            "attexplore" => Ok(Method::Attexplore),
            other => Err(CliError::new(
                "method",
                format!("unknown method {other:?} (expected fampe, ig or attexplore)"),
            )),
        }
    }
}

/// Starting image of the integrated-gradients path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgBaseline {
    Black,
    Blur,
    /// The input itself; attributions are identically zero.
    Input,
}

impl FromStr for IgBaseline {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "black" => Ok(IgBaseline::Black),
            "blur" => Ok(IgBaseline::Blur),
            "input" => Ok(IgBaseline::Input),
            other => Err(CliError::config(format!(
                "unknown ig baseline {other:?} (expected black, blur or input)"
            ))),
        }
    }
}

impl FromStr for Wrapped<BaselineKind> {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "black" => Ok(Wrapped(BaselineKind::Black)),
            "blur" => Ok(Wrapped(BaselineKind::Blur)),
            other => Err(CliError::config(format!(
                "unknown evaluation baseline {other:?} (expected black or blur)"
            ))),
        }
    }
}

impl FromStr for Wrapped<ChannelAggregation> {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "sum" => Ok(Wrapped(ChannelAggregation::Sum)),
            "abs-sum" => Ok(Wrapped(ChannelAggregation::AbsSum)),
            other => Err(CliError::config(format!(
                "unknown aggregation {other:?} (expected sum or abs-sum)"
            ))),
        }
    }
}

/// Newtype so foreign enums can implement `FromStr` here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wrapped<T>(pub T);

// ---------------------------------------------------------------------------
// synth

pub fn cmd_synth(out_dir: &Path, spec: &SyntheticShapesSpec) -> CliResult<()> {
    let n = dataset::write_dataset(out_dir, spec)?;
    println!("wrote {n} samples to {}", out_dir.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// train

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub dataset: PathBuf,
    pub model_spec: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

pub fn cmd_train(args: &TrainArgs) -> CliResult<()> {
    let samples = dataset::load_dataset(&args.dataset)?;
    let spec = match &args.model_spec {
        Some(path) => modelspec::parse_model_spec(&fsutil::read_text(path)?)?,
        None => default_spec_for(&samples)?,
    };
    let mut model = Model::init(spec.clone(), args.seed)?;
    let outcome = train_sgd(&mut model, &samples, args.epochs, args.learning_rate, args.seed)?;
    weights::save_weights(&args.out_dir.join(WEIGHTS_FILE), model.weights())?;
    fsutil::write_atomic(
        &args.out_dir.join(MODEL_FILE),
        modelspec::encode_model_spec(&spec).as_bytes(),
    )?;
    println!("train_acc={}", outcome.final_accuracy);
    Ok(())
}

fn default_spec_for(samples: &[LabeledSample]) -> CliResult<fampe_core::model::ModelSpec> {
    let shape = samples[0].image.shape();
    if shape.len() != 3 || shape[0] != 1 || shape[1] != shape[2] {
        return Err(CliError::config(format!(
            "the built-in architecture needs square single-channel images, got {shape:?}; \
             pass --model-spec"
        )));
    }
    let classes = samples.iter().map(|s| s.label).max().unwrap_or(0) + 1;
    Ok(modelspec::default_model_spec(shape[1], classes))
}

/// Load a trained model: the architecture file defaults to `model.txt` next
/// to the weights.
pub fn load_model(weights_path: &Path, model_spec: Option<&Path>) -> CliResult<Model> {
    let spec_path = match model_spec {
        Some(p) => p.to_path_buf(),
        None => weights_path.with_file_name(MODEL_FILE),
    };
    let spec = modelspec::parse_model_spec(&fsutil::read_text(&spec_path)?)?;
    let tensors = weights::load_weights(weights_path)?;
    Ok(Model::with_weights(spec, tensors)?)
}

// ---------------------------------------------------------------------------
// attribute

#[derive(Debug, Clone)]
pub struct AttributeArgs {
    pub weights: PathBuf,
    pub model_spec: Option<PathBuf>,
    pub image: PathBuf,
    pub label: usize,
    pub method: Method,
    pub cfg: FampeConfig,
    pub ig_steps: usize,
    pub ig_baseline: IgBaseline,
    pub aggregation: ChannelAggregation,
    pub out_dir: PathBuf,
}

fn attribute_one(
    model: &Model,
    x: &Tensor,
    label: usize,
    method: Method,
    cfg: &FampeConfig,
    ig_steps: usize,
    ig_baseline: IgBaseline,
) -> CliResult<(AttributionMap, f64)> {
    match method {
        Method::Fampe => {
            let out = fampe_attribute(model, x, label, cfg)?;
            Ok((out.map, out.cutoff.value()))
        }
        Method::Attexplore => {
            let map = attexplore_attribute(model, x, label, cfg)?;
            let (cutoff, _) = image_cutoff(x, cfg.tau)?;
            Ok((map, cutoff.value()))
        }
        Method::Ig => {
            let baseline = match ig_baseline {
                IgBaseline::Black => baseline_image(x, BaselineKind::Black),
                IgBaseline::Blur => baseline_image(x, BaselineKind::Blur),
                IgBaseline::Input => x.clone(),
            };
            let map = ig_attribute(model, x, label, &baseline, ig_steps)?;
            let (cutoff, _) = image_cutoff(x, cfg.tau)?;
            Ok((map, cutoff.value()))
        }
    }
}

pub fn cmd_attribute(args: &AttributeArgs) -> CliResult<()> {
    let model = load_model(&args.weights, args.model_spec.as_deref())?;
    let x = RawImage::load(&args.image)?.to_tensor();
    let (mut map, cutoff) = attribute_one(
        &model,
        &x,
        args.label,
        args.method,
        &args.cfg,
        args.ig_steps,
        args.ig_baseline,
    )?;
    map.channel_aggregation = args.aggregation;
    mapfile::save_map(&args.out_dir.join("map.fama"), &map)?;
    fsutil::write_atomic(&args.out_dir.join("map.txt"), mapfile::map_text(&map).as_bytes())?;
    mapfile::heatmap_image(&map).save(&args.out_dir.join("heatmap.pgm"))?;
    println!("method={} cutoff={cutoff} wrote map.fama map.txt heatmap.pgm", args.method.name());
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    pub weights: PathBuf,
    pub model_spec: Option<PathBuf>,
    pub dataset: PathBuf,
    pub method: Method,
    pub cfg: FampeConfig,
    pub ig_steps: usize,
    pub ig_baseline: IgBaseline,
    pub eval: EvalSettings,
    /// Evaluate only the first `n` listed samples.
    pub limit: Option<usize>,
    pub out_dir: PathBuf,
}

fn select<T>(samples: &[T], limit: Option<usize>) -> &[T] {
    match limit {
        Some(n) => &samples[..n.min(samples.len())],
        None => samples,
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let model = load_model(&args.weights, args.model_spec.as_deref())?;
    let samples = dataset::load_dataset_named(&args.dataset)?;
    let samples = select(&samples, args.limit);
    if samples.is_empty() {
        return Err(CliError::new("dataset", "no samples selected"));
    }
    let rows: Vec<ScoreRow> = samples
        .par_iter()
        .map(|(name, sample)| -> CliResult<ScoreRow> {
            let (map, cutoff) = attribute_one(
                &model,
                &sample.image,
                sample.label,
                args.method,
                &args.cfg,
                args.ig_steps,
                args.ig_baseline,
            )?;
            Ok(ScoreRow {
                sample_id: name.clone(),
                alpha: args.cfg.alpha,
                insertion: insertion_score(&model, &sample.image, sample.label, &map, &args.eval)?,
                deletion: deletion_score(&model, &sample.image, sample.label, &map, &args.eval)?,
                cutoff,
            })
        })
        .collect::<CliResult<_>>()?;
    let per_sample: Vec<SampleScore> = rows
        .iter()
        .map(|r| SampleScore { insertion: r.insertion, deletion: r.deletion })
        .collect();
    let reportd = aggregate_report(&per_sample, None)?;
    fsutil::write_atomic(&args.out_dir.join("scores.csv"), report::score_csv(&rows).as_bytes())?;
    let grid = match args.method {
        Method::Ig => Vec::new(),
        _ => vec![args.cfg.alpha],
    };
    fsutil::write_atomic(
        &args.out_dir.join("summary.txt"),
        report::summary_text(
            args.method.name(),
            reportd.mean_insertion,
            reportd.mean_deletion,
            rows.len(),
            &grid,
        )
        .as_bytes(),
    )?;
    println!(
        "method={} n={} mean_insertion={} mean_deletion={}",
        args.method.name(),
        rows.len(),
        reportd.mean_insertion,
        reportd.mean_deletion
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// ablate

#[derive(Debug, Clone)]
pub struct AblateArgs {
    pub weights: PathBuf,
    pub model_spec: Option<PathBuf>,
    pub dataset: PathBuf,
    pub cfg: FampeConfig,
    pub alphas: Vec<f64>,
    pub eval: EvalSettings,
    pub limit: Option<usize>,
    pub out_dir: PathBuf,
}

struct SampleSweep {
    rows: Vec<ScoreRow>,
    insertion: Vec<f64>,
    deletion: Vec<f64>,
    best_insertion: f64,
    best_deletion: f64,
    baseline: SampleScore,
    scatter: (f64, f64),
}

pub fn cmd_ablate(args: &AblateArgs) -> CliResult<()> {
    let model = load_model(&args.weights, args.model_spec.as_deref())?;
    let samples = dataset::load_dataset_named(&args.dataset)?;
    let samples = select(&samples, args.limit);
    if samples.is_empty() {
        return Err(CliError::new("dataset", "no samples selected"));
    }
    let sweeps: Vec<SampleSweep> = samples
        .par_iter()
        .map(|(name, sample)| -> CliResult<SampleSweep> {
            let sweep =
                alpha_sweep(&model, &sample.image, sample.label, &args.cfg, &args.alphas, &args.eval)?;
            let cutoff = sweep.cutoff.value();
            let rows = sweep
                .points
                .iter()
                .map(|p| ScoreRow {
                    sample_id: name.clone(),
                    alpha: p.alpha,
                    insertion: p.insertion,
                    deletion: p.deletion,
                    cutoff,
                })
                .collect();
            let base_map = attexplore_attribute(&model, &sample.image, sample.label, &args.cfg)?;
            let baseline = SampleScore {
                insertion: insertion_score(&model, &sample.image, sample.label, &base_map, &args.eval)?,
                deletion: deletion_score(&model, &sample.image, sample.label, &base_map, &args.eval)?,
            };
            Ok(SampleSweep {
                rows,
                insertion: sweep.points.iter().map(|p| p.insertion).collect(),
                deletion: sweep.points.iter().map(|p| p.deletion).collect(),
                best_insertion: sweep.best_insertion,
                best_deletion: sweep.best_deletion,
                baseline,
                scatter: (cutoff, sweep.best_insertion_alpha),
            })
        })
        .collect::<CliResult<_>>()?;
    let n = sweeps.len() as f64;
    let matrix = AlphaMatrix {
        alphas: args.alphas.clone(),
        insertion: sweeps.iter().map(|s| s.insertion.clone()).collect(),
        deletion: sweeps.iter().map(|s| s.deletion.clone()).collect(),
    };
    // The method row selects the best alpha per sample before averaging.
    let fampe_scores: Vec<SampleScore> = sweeps
        .iter()
        .map(|s| SampleScore { insertion: s.best_insertion, deletion: s.best_deletion })
        .collect();
    let reportd = aggregate_report(&fampe_scores, Some(&matrix))?;
    let breakdown = reportd.per_alpha.as_ref().expect("matrix was provided");
    let baseline_row = (
        sweeps.iter().map(|s| s.baseline.insertion).sum::<f64>() / n,
        sweeps.iter().map(|s| s.baseline.deletion).sum::<f64>() / n,
    );
    let all_rows: Vec<ScoreRow> = sweeps.iter().flat_map(|s| s.rows.clone()).collect();
    fsutil::write_atomic(&args.out_dir.join("scores.csv"), report::score_csv(&all_rows).as_bytes())?;
    fsutil::write_atomic(
        &args.out_dir.join("ablation.csv"),
        report::ablation_table(
            breakdown,
            (reportd.mean_insertion, reportd.mean_deletion),
            baseline_row,
        )
        .as_bytes(),
    )?;
    let scatter: Vec<(f64, f64)> = sweeps.iter().map(|s| s.scatter).collect();
    fsutil::write_atomic(
        &args.out_dir.join("scatter.txt"),
        emit_cutoff_alpha_scatter(&scatter).as_bytes(),
    )?;
    fsutil::write_atomic(
        &args.out_dir.join("summary.txt"),
        report::summary_text(
            "fampe",
            reportd.mean_insertion,
            reportd.mean_deletion,
            sweeps.len(),
            &args.alphas,
        )
        .as_bytes(),
    )?;
    println!(
        "n={} fampe_insertion={} fampe_deletion={} attexplore_insertion={} attexplore_deletion={}",
        sweeps.len(),
        reportd.mean_insertion,
        reportd.mean_deletion,
        baseline_row.0,
        baseline_row.1
    );
    Ok(())
}
