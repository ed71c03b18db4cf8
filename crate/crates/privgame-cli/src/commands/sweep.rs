use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use privgame::binary::{optimal_pdd, theorem1_pdi};
use privgame::data::{gen_binary, gen_gauss, Dataset};
use privgame::gaussian::pdd_full_grid_search;
use privgame::prob::BernoulliXorModel;
use privgame::train::{train_gap, TrainOutcome};

use super::train::{build_config, evaluate_outcome, TrainArgs, TrainModel};
use super::{usage, CliError};
use crate::tradeoff::parse_d_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    TheoryVsTrained,
}

#[derive(clap::Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub mode: SweepMode,
    /// Budget grid, end-inclusive: start:end:step
    #[arg(long = "D-grid")]
    pub d_grid: String,
    /// Training-set size; defaults to 10000 for binary models, 20000 for gauss
    #[arg(long)]
    pub n: Option<usize>,
    /// Concurrent sweep points (0 = rayon default)
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Lattice points per cube axis for the gauss theory column
    #[arg(long, default_value_t = 51)]
    pub grid_n: usize,
    /// Joined output CSV
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub train: TrainArgs2,
}

// The sweep reuses the train flags except --dataset/--D/--out, which it
// owns. clap cannot flatten with removals, so the shared subset is spelled
// out once more here and converted.
#[derive(clap::Args, Debug)]
pub struct TrainArgs2 {
    #[arg(long, value_enum)]
    pub model: TrainModel,
    #[arg(long, value_enum)]
    pub constraint: Option<super::train::Constraint>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 200)]
    pub minibatch: usize,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
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
    #[command(flatten)]
    pub binary: super::BinaryParams,
    #[command(flatten)]
    pub gauss: super::GaussParams,
}

impl TrainArgs2 {
    fn to_train_args(&self, d: f64, seed: u64) -> TrainArgs {
        TrainArgs {
            dataset: PathBuf::new(),
            model: self.model,
            d,
            constraint: self.constraint,
            seed,
            out: PathBuf::new(),
            iters: self.iters,
            lr: self.lr,
            minibatch: self.minibatch,
            k: self.k,
            alpha: self.alpha,
            rho0: self.rho0,
            rho_growth: self.rho_growth,
            rho_max: self.rho_max,
            lambda0: self.lambda0,
            binary: self.binary.clone(),
            gauss: self.gauss.clone(),
        }
    }
}

/// One joined sweep row, sorted by `D` in the output.
#[derive(Debug, Serialize)]
struct SweepRow {
    #[serde(rename = "D")]
    d: f64,
    theory_map_accuracy: f64,
    trained_map_accuracy: f64,
    abs_diff: f64,
    theory_mi_nats: Option<f64>,
    trained_mi_nats: Option<f64>,
    train_seed: u64,
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let grid = parse_d_grid(&args.d_grid)?;
    let base_seed = args.train.seed;

    // One dataset for the whole sweep; per-point training seeds derive
    // from the base seed by point index.
    let dataset: Dataset = match args.train.model {
        TrainModel::Gauss => {
            let model = args.train.gauss.model()?;
            gen_gauss(&model, args.n.unwrap_or(20_000), base_seed)
        }
        _ => {
            let (p, q) = args.train.binary.pq()?;
            let model = BernoulliXorModel::new(p, q).map_err(|e| usage(e.to_string()))?;
            gen_binary(&model, args.n.unwrap_or(10_000), base_seed)
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("thread pool: {e}")))?;

    let rows: Result<Vec<SweepRow>, CliError> = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(idx, &d)| -> Result<SweepRow, CliError> {
                let train_seed = base_seed ^ idx as u64;
                let targs = args.train.to_train_args(d, train_seed);
                let (model, cfg) = build_config(&targs)?;

                let (theory_acc, theory_mi) = match args.train.model {
                    TrainModel::BinaryPdi => {
                        let (p, q) = args.train.binary.pq()?;
                        let sol = theorem1_pdi(p, q, d.min(1.0))?;
                        let joint = args.train.binary.joint()?;
                        let induced =
                            privgame::prob::mechanism_joint(&joint, &sol.witness)?;
                        (
                            sol.accuracy,
                            Some(privgame::prob::mutual_information_nats(&induced)),
                        )
                    }
                    TrainModel::BinaryPdd => {
                        let joint = args.train.binary.joint()?;
                        let (mech, acc) = optimal_pdd(&joint, d)?;
                        let induced = privgame::prob::mechanism_joint(&joint, &mech)?;
                        (acc, Some(privgame::prob::mutual_information_nats(&induced)))
                    }
                    TrainModel::Gauss => {
                        let model = args.train.gauss.model()?;
                        let (_, acc) = pdd_full_grid_search(&model, d, args.grid_n)?;
                        (acc, None)
                    }
                };

                let start = Instant::now();
                let outcome: TrainOutcome = train_gap(&dataset, model, &cfg)?;
                let elapsed = start.elapsed().as_millis() as u64;
                let trained = evaluate_outcome(&targs, model, &outcome, elapsed, train_seed)?;

                Ok(SweepRow {
                    d,
                    theory_map_accuracy: theory_acc,
                    trained_map_accuracy: trained.map_accuracy,
                    abs_diff: (trained.map_accuracy - theory_acc).abs(),
                    theory_mi_nats: theory_mi,
                    trained_mi_nats: trained.mi_nats,
                    train_seed,
                })
            })
            .collect()
    });
    let mut rows = rows?;
    rows.sort_by(|a, b| a.d.total_cmp(&b.d));

    let mut w = csv::Writer::from_path(&args.out)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot write {:?}: {e}", args.out)))?;
    for row in &rows {
        w.serialize(row)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("csv serialize: {e}")))?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.into()))?;
    println!("{}", args.out.display());
    Ok(())
}
