use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use privgame::binary::{optimal_pdd, theorem1_pdi};
use privgame::gaussian::{pdd_full_grid_search, theorem2_pdi, theorem3_pdd_shift};
use privgame::mechanism::Mechanism;
use privgame::prob::{mechanism_joint, mutual_information_nats, JointBinary};

use super::{usage, BinaryParams, CliError, GaussParams};
use crate::tradeoff::{parse_d_grid, write_points, Source, TradeoffPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryModel {
    /// Optimal private-data dependent flip mechanism (linear program).
    BinaryPdd,
    /// Optimal private-data independent flip mechanism (closed form).
    BinaryPdi,
    /// Gaussian noise-only scheme (closed form, equal variances).
    GaussPdi,
    /// Gaussian shift-only scheme (closed form, equal variances).
    GaussShift,
    /// Full Gaussian shift+noise synthesis (boundary cube search).
    GaussFull,
}

#[derive(clap::Args, Debug)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub model: TheoryModel,
    #[command(flatten)]
    pub binary: BinaryParams,
    #[command(flatten)]
    pub gauss: GaussParams,
    /// Budget grid, end-inclusive: start:end:step
    #[arg(long = "D-grid")]
    pub d_grid: String,
    /// Lattice points per cube axis for gauss-full
    #[arg(long, default_value_t = 51)]
    pub grid_n: usize,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Optional JSON sidecar with the same rows
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn binary_point(d: f64, mech: privgame::mechanism::BinaryMechanism, accuracy: f64, joint: &JointBinary, elapsed_ms: u64) -> Result<TradeoffPoint, CliError> {
    let induced = mechanism_joint(joint, &mech)?;
    let mech: Mechanism = mech.into();
    Ok(TradeoffPoint {
        d,
        source: Source::Theory,
        map_accuracy: accuracy,
        mi_nats: Some(mutual_information_nats(&induced)),
        mech_json: serde_json::to_string(&mech)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("mechanism serialize: {e}")))?,
        elapsed_ms,
        seed: None,
    })
}

fn gauss_point(d: f64, mech: privgame::mechanism::GaussMechanism, accuracy: f64, elapsed_ms: u64) -> Result<TradeoffPoint, CliError> {
    let mech: Mechanism = mech.into();
    Ok(TradeoffPoint {
        d,
        source: Source::Theory,
        map_accuracy: accuracy,
        mi_nats: None,
        mech_json: serde_json::to_string(&mech)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("mechanism serialize: {e}")))?,
        elapsed_ms,
        seed: None,
    })
}

pub fn run(args: TheoryArgs) -> Result<(), CliError> {
    let grid = parse_d_grid(&args.d_grid)?;
    let mut points = Vec::with_capacity(grid.len());
    match args.model {
        TheoryModel::BinaryPdd => {
            let joint = args.binary.joint()?;
            for &d in &grid {
                let t = Instant::now();
                let (mech, acc) = optimal_pdd(&joint, d)?;
                points.push(binary_point(d, mech, acc, &joint, ms(t))?);
            }
        }
        TheoryModel::BinaryPdi => {
            let (p, q) = args.binary.pq()?;
            let joint = args.binary.joint()?;
            for &d in &grid {
                let t = Instant::now();
                let sol = theorem1_pdi(p, q, d.min(1.0))?;
                points.push(binary_point(d, sol.witness, sol.accuracy, &joint, ms(t))?);
            }
        }
        TheoryModel::GaussPdi | TheoryModel::GaussShift => {
            let model = args.gauss.model()?;
            if !model.equal_variances() {
                return Err(usage(
                    "gauss-pdi and gauss-shift require var0 = var1; use gauss-full otherwise",
                ));
            }
            for &d in &grid {
                let t = Instant::now();
                let (mech, acc) = match args.model {
                    TheoryModel::GaussPdi => theorem2_pdi(&model, d)?,
                    _ => theorem3_pdd_shift(&model, d)?,
                };
                points.push(gauss_point(d, mech, acc, ms(t))?);
            }
        }
        TheoryModel::GaussFull => {
            let model = args.gauss.model()?;
            if args.grid_n < 2 {
                return Err(usage("--grid-n must be at least 2"));
            }
            for &d in &grid {
                let t = Instant::now();
                let (mech, acc) = pdd_full_grid_search(&model, d, args.grid_n)?;
                points.push(gauss_point(d, mech, acc, ms(t))?);
            }
        }
    }
    write_points(&args.out, &points)?;
    if let Some(json_path) = &args.json {
        let text = serde_json::to_string_pretty(&points)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("json serialize: {e}")))?;
        std::fs::write(json_path, text)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot write {json_path:?}: {e}")))?;
    }
    println!("{}", args.out.display());
    Ok(())
}

fn ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}
