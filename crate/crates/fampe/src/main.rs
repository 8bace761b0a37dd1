//! `fampe` — frequency-aware attribution toolkit.
//!
//! Subcommands: `synth`, `train`, `attribute`, `evaluate`, `ablate`.
//! Every value resolves as: command-line flag > `--config` file entry >
//! built-in default (`FAMPE_SEED` sits below the file for the seed).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use fampe::commands::{
    self, AblateArgs, AttributeArgs, EvaluateArgs, IgBaseline, Method, TrainArgs, Wrapped,
};
use fampe::config::{parse_float_list, FileConfig};
use fampe::dataset::SyntheticShapesSpec;
use fampe::error::{CliError, CliResult};

use fampe_core::attribution::{default_alpha_grid, ChannelAggregation, FampeConfig};
use fampe_core::evaluation::{BaselineKind, EvalSettings};

#[derive(Parser)]
#[command(name = "fampe", version, about = "Frequency-aware attribution for small classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic shapes dataset (PGM images + labels.csv).
    Synth(SynthCli),
    /// Train a classifier and write weights + architecture files.
    Train(TrainCli),
    /// Attribute one prediction; writes map.fama, map.txt and heatmap.pgm.
    Attribute(AttributeCli),
    /// Score a method over a dataset; writes scores.csv and summary.txt.
    Evaluate(EvaluateCli),
    /// Sweep the low/high-frequency blend weight; writes the per-alpha
    /// table, best-alpha summary and cutoff/alpha scatter data.
    Ablate(AblateCli),
}

#[derive(Args)]
struct CommonCli {
    /// Line-based `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonCli {
    fn file(&self) -> CliResult<FileConfig> {
        match &self.config {
            Some(path) => FileConfig::load(path),
            None => Ok(FileConfig::default()),
        }
    }

    fn out_dir(&self, file: &FileConfig) -> CliResult<PathBuf> {
        file.resolve_opt(self.out.clone(), "out_dir")?
            .ok_or_else(|| CliError::config("no output directory: pass --out or set out_dir"))
    }
}

#[derive(Args)]
struct SynthCli {
    #[command(flatten)]
    common: CommonCli,
    /// Image side length (images are size x size, single channel).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    classes: Option<usize>,
    /// Samples per class.
    #[arg(long)]
    per_class: Option<usize>,
    /// Additive pixel-noise standard deviation.
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Args)]
struct TrainCli {
    #[command(flatten)]
    common: CommonCli,
    /// Dataset directory (images + labels.csv).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Architecture file; defaults to a built-in small CNN.
    #[arg(long)]
    model_spec: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    /// SGD learning rate (unrelated to the attack step size).
    #[arg(long)]
    lr: Option<f64>,
}

#[derive(Args)]
struct MethodCli {
    /// Attribution method: fampe, ig or attexplore.
    #[arg(long)]
    method: Option<Method>,
    /// Low/high-frequency noise blend weight in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Additive noise amplitude in pixel units (applied as epsilon / 255).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Multiplicative frequency-noise standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Attack step size.
    #[arg(long)]
    eta: Option<f64>,
    /// Perturbed variants per iteration.
    #[arg(long)]
    variants: Option<usize>,
    /// Attack iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// Spectral-energy fraction selecting the cutoff radius.
    #[arg(long)]
    tau: Option<f64>,
    /// Clip attack iterates to [0, 1].
    #[arg(long)]
    clip: bool,
    /// Integration steps for the ig method.
    #[arg(long)]
    ig_steps: Option<usize>,
    /// Path start for the ig method: black, blur or input.
    #[arg(long)]
    ig_baseline: Option<IgBaseline>,
}

impl MethodCli {
    fn resolve(&self, file: &FileConfig, seed: u64) -> CliResult<FampeConfig> {
        let d = FampeConfig::default();
        let cfg = FampeConfig {
            epsilon: file.resolve(self.epsilon, "epsilon", d.epsilon)?,
            sigma: file.resolve(self.sigma, "sigma", d.sigma)?,
            eta: file.resolve(self.eta, "eta", d.eta)?,
            n_variants: file.resolve(self.variants, "variants", d.n_variants)?,
            n_iters: file.resolve(self.iters, "iters", d.n_iters)?,
            alpha: file.resolve(self.alpha, "alpha", d.alpha)?,
            tau: file.resolve(self.tau, "tau", d.tau)?,
            seed,
            clip: file.resolve(self.clip.then_some(true), "clip", false)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_method(&self, file: &FileConfig) -> CliResult<Method> {
        file.resolve(self.method, "method", Method::Fampe)
    }

    fn resolve_ig(&self, file: &FileConfig) -> CliResult<(usize, IgBaseline)> {
        Ok((
            file.resolve(self.ig_steps, "ig_steps", 64)?,
            file.resolve(self.ig_baseline, "ig_baseline", IgBaseline::Black)?,
        ))
    }
}

#[derive(Args)]
struct EvalCli {
    /// Reveal steps of the insertion/deletion curves.
    #[arg(long)]
    steps: Option<usize>,
    /// Curve baseline image: black or blur.
    #[arg(long)]
    baseline: Option<Wrapped<BaselineKind>>,
    /// Evaluate only the first n listed samples.
    #[arg(long)]
    limit: Option<usize>,
}

impl EvalCli {
    fn resolve(&self, file: &FileConfig) -> CliResult<(EvalSettings, Option<usize>)> {
        let d = EvalSettings::default();
        let settings = EvalSettings {
            steps: file.resolve(self.steps, "steps", d.steps)?,
            baseline: file.resolve(self.baseline, "baseline", Wrapped(d.baseline))?.0,
        };
        Ok((settings, file.resolve_opt(self.limit, "limit")?))
    }
}

#[derive(Args)]
struct AttributeCli {
    #[command(flatten)]
    common: CommonCli,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    model_spec: Option<PathBuf>,
    /// Input image (PGM or PPM).
    #[arg(long)]
    image: Option<PathBuf>,
    /// Class whose prediction is explained.
    #[arg(long)]
    label: Option<usize>,
    #[command(flatten)]
    method: MethodCli,
    /// Channel aggregation for ranking and heatmaps: sum or abs-sum.
    #[arg(long)]
    aggregation: Option<Wrapped<ChannelAggregation>>,
}

#[derive(Args)]
struct EvaluateCli {
    #[command(flatten)]
    common: CommonCli,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    model_spec: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    method: MethodCli,
    #[command(flatten)]
    eval: EvalCli,
}

#[derive(Args)]
struct AblateCli {
    #[command(flatten)]
    common: CommonCli,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    model_spec: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    method: MethodCli,
    #[command(flatten)]
    eval: EvalCli,
    /// Comma-separated alpha grid; defaults to 0.0, 0.1, ..., 1.0.
    #[arg(long)]
    alphas: Option<String>,
}

fn required<T>(value: Option<T>, what: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(format!("missing required value: {what}")))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth(args) => {
            let file = args.common.file()?;
            let defaults = SyntheticShapesSpec::default();
            let spec = SyntheticShapesSpec {
                size: file.resolve(args.size, "size", defaults.size)?,
                classes: file.resolve(args.classes, "classes", defaults.classes)?,
                per_class: file.resolve(args.per_class, "per_class", defaults.per_class)?,
                noise: file.resolve(args.noise, "noise", defaults.noise)?,
                seed: file.resolve_seed(args.common.seed)?,
            };
            commands::cmd_synth(&args.common.out_dir(&file)?, &spec)
        }
        Command::Train(args) => {
            let file = args.common.file()?;
            commands::cmd_train(&TrainArgs {
                dataset: required(file.resolve_opt(args.dataset, "dataset")?, "--dataset")?,
                model_spec: file.resolve_opt(args.model_spec, "model_spec")?,
                out_dir: args.common.out_dir(&file)?,
                epochs: file.resolve(args.epochs, "epochs", 30)?,
                learning_rate: file.resolve(args.lr, "lr", 0.1)?,
                seed: file.resolve_seed(args.common.seed)?,
            })
        }
        Command::Attribute(args) => {
            let file = args.common.file()?;
            let seed = file.resolve_seed(args.common.seed)?;
            let cfg = args.method.resolve(&file, seed)?;
            let (ig_steps, ig_baseline) = args.method.resolve_ig(&file)?;
            commands::cmd_attribute(&AttributeArgs {
                weights: required(file.resolve_opt(args.weights, "weights")?, "--weights")?,
                model_spec: file.resolve_opt(args.model_spec, "model_spec")?,
                image: required(file.resolve_opt(args.image, "image")?, "--image")?,
                label: required(file.resolve_opt(args.label, "label")?, "--label")?,
                method: args.method.resolve_method(&file)?,
                cfg,
                ig_steps,
                ig_baseline,
                aggregation: file
                    .resolve(args.aggregation, "aggregation", Wrapped(ChannelAggregation::Sum))?
                    .0,
                out_dir: args.common.out_dir(&file)?,
            })
        }
        Command::Evaluate(args) => {
            let file = args.common.file()?;
            let seed = file.resolve_seed(args.common.seed)?;
            let cfg = args.method.resolve(&file, seed)?;
            let (ig_steps, ig_baseline) = args.method.resolve_ig(&file)?;
            let (eval, limit) = args.eval.resolve(&file)?;
            commands::cmd_evaluate(&EvaluateArgs {
                weights: required(file.resolve_opt(args.weights, "weights")?, "--weights")?,
                model_spec: file.resolve_opt(args.model_spec, "model_spec")?,
                dataset: required(file.resolve_opt(args.dataset, "dataset")?, "--dataset")?,
                method: args.method.resolve_method(&file)?,
                cfg,
                ig_steps,
                ig_baseline,
                eval,
                limit,
                out_dir: args.common.out_dir(&file)?,
            })
        }
        Command::Ablate(args) => {
            let file = args.common.file()?;
            let seed = file.resolve_seed(args.common.seed)?;
            let cfg = args.method.resolve(&file, seed)?;
            let (eval, limit) = args.eval.resolve(&file)?;
            let alphas = match file.resolve_opt(args.alphas, "alphas")? {
                Some(raw) => parse_float_list(&raw)?,
                None => default_alpha_grid(),
            };
            commands::cmd_ablate(&AblateArgs {
                weights: required(file.resolve_opt(args.weights, "weights")?, "--weights")?,
                model_spec: file.resolve_opt(args.model_spec, "model_spec")?,
                dataset: required(file.resolve_opt(args.dataset, "dataset")?, "--dataset")?,
                cfg,
                alphas,
                eval,
                limit,
                out_dir: args.common.out_dir(&file)?,
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{err}");
        std::process::exit(1);
    }
}
