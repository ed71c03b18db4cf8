use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

use privgame::data::{read_csv, DatasetKind};
use privgame::gaussian::post_mechanism_pair;
use privgame::prob::{
    gauss_map_accuracy_general, mechanism_joint, mutual_information_nats,
};
use privgame::train::loss::LossKind;
use privgame::train::{
    history_to_csv, train_gap, ConstraintMode, ModelKind, TrainConfig, TrainOutcome,
};

use super::{usage, BinaryParams, CliError, GaussParams};
use crate::tradeoff::{append_point, Source, TradeoffPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainModel {
    BinaryPdd,
    BinaryPdi,
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Constraint {
    /// Scaled one-sided penalty on the budget violation.
    Penalty,
    /// Augmented Lagrangian with slack and multiplier updates.
    Al,
}

#[derive(clap::Args, Debug)]
pub struct TrainArgs {
    /// Training dataset CSV (header "x,y")
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum)]
    pub model: TrainModel,
    /// Distortion budget
    #[arg(long = "D")]
    pub d: f64,
    /// Constraint mode; defaults to penalty for binary models and al for gauss
    #[arg(long, value_enum)]
    pub constraint: Option<Constraint>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (mechanism.json, history.csv, evaluation.csv, config.json)
    #[arg(long)]
    pub out: PathBuf,
    /// Outer iterations; defaults to 200 for binary models and 400 for gauss
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 200)]
    pub minibatch: usize,
    /// Adversary epochs per outer iteration
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Train under the alpha-loss instead of the log-loss
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub rho0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub rho_growth: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda0: f64,
    /// Source model parameters for the exact evaluation record:
    #[command(flatten)]
    pub binary: BinaryParams,
    #[command(flatten)]
    pub gauss: GaussParams,
}

#[derive(Serialize)]
struct RunConfig<'a> {
    model: &'a str,
    config: &'a TrainConfig,
    dataset: String,
    dataset_sha256: String,
    converged_at: Option<usize>,
    final_distortion: f64,
}

pub fn build_config(args: &TrainArgs) -> Result<(ModelKind, TrainConfig), CliError> {
    let model = match args.model {
        TrainModel::BinaryPdd => ModelKind::BinaryPdd,
        TrainModel::BinaryPdi => ModelKind::BinaryPdi,
        TrainModel::Gauss => ModelKind::Gauss,
    };
    let mut cfg = TrainConfig::new(args.d, args.seed);
    cfg.learning_rate = args.lr;
    cfg.minibatch = args.minibatch;
    cfg.adversary_epochs = args.k;
    cfg.outer_iters = args.iters.unwrap_or(match model {
        ModelKind::Gauss => 400,
        _ => 200,
    });
    cfg.constraint_mode = match args.constraint {
        Some(Constraint::Penalty) => ConstraintMode::Penalty,
        Some(Constraint::Al) => ConstraintMode::AugmentedLagrangian,
        None => match model {
            ModelKind::Gauss => ConstraintMode::AugmentedLagrangian,
            _ => ConstraintMode::Penalty,
        },
    };
    cfg.rho0 = args.rho0;
    cfg.rho_growth = args.rho_growth;
    cfg.rho_max = args.rho_max;
    cfg.lambda0 = args.lambda0;
    if let Some(alpha) = args.alpha {
        cfg.loss = LossKind::Alpha { alpha };
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok((model, cfg))
}

/// Evaluate a learned mechanism exactly under the stated source model.
pub fn evaluate_outcome(
    args: &TrainArgs,
    model: ModelKind,
    outcome: &TrainOutcome,
    elapsed_ms: u64,
    seed: u64,
) -> Result<TradeoffPoint, CliError> {
    let mech = outcome.mechanism();
    let (map_accuracy, mi_nats) = match model {
        ModelKind::BinaryPdd | ModelKind::BinaryPdi => {
            let joint = args.binary.joint()?;
            let bm = mech.as_binary().expect("binary training yields binary mechanism");
            let induced = mechanism_joint(&joint, &bm)?;
            (
                privgame::prob::binary_map_accuracy(&induced),
                Some(mutual_information_nats(&induced)),
            )
        }
        ModelKind::Gauss => {
            let source = args.gauss.model()?;
            let gm = mech.as_gauss().expect("gauss training yields gauss mechanism");
            let pair = post_mechanism_pair(&source, &gm);
            (gauss_map_accuracy_general(&pair), None)
        }
    };
    Ok(TradeoffPoint {
        d: args.d,
        source: Source::Trained,
        map_accuracy,
        mi_nats,
        mech_json: serde_json::to_string(&mech)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("mechanism serialize: {e}")))?,
        elapsed_ms,
        seed: Some(seed),
    })
}

pub fn run(args: TrainArgs) -> Result<(), CliError> {
    let (model, cfg) = build_config(&args)?;
    let kind = match model {
        ModelKind::Gauss => DatasetKind::Gaussian,
        _ => DatasetKind::Binary,
    };
    let dataset = read_csv(&args.dataset, kind)?;
    let bytes = std::fs::read(&args.dataset)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot hash dataset: {e}")))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));

    let start = Instant::now();
    let outcome = train_gap(&dataset, model, &cfg)?;
    let elapsed_ms = start.elapsed().as_millis() as u64;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot create {:?}: {e}", args.out)))?;
    super::write_mechanism(&args.out.join("mechanism.json"), &outcome.mechanism())?;
    std::fs::write(args.out.join("history.csv"), history_to_csv(&outcome.history))
        .map_err(|e| CliError::Runtime(e.into()))?;

    let point = evaluate_outcome(&args, model, &outcome, elapsed_ms, cfg.seed)?;
    append_point(&args.out.join("evaluation.csv"), &point)?;

    let model_name = match model {
        ModelKind::BinaryPdd => "binary-pdd",
        ModelKind::BinaryPdi => "binary-pdi",
        ModelKind::Gauss => "gauss",
    };
    let run_cfg = RunConfig {
        model: model_name,
        config: &cfg,
        dataset: args.dataset.display().to_string(),
        dataset_sha256: digest,
        converged_at: outcome.converged_at,
        final_distortion: outcome.final_distortion(),
    };
    let text = serde_json::to_string_pretty(&run_cfg)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("config serialize: {e}")))?;
    std::fs::write(args.out.join("config.json"), text)
        .map_err(|e| CliError::Runtime(e.into()))?;

    println!("{}", args.out.display());
    Ok(())
}
