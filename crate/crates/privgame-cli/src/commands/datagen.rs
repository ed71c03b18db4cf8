use std::path::PathBuf;

use clap::ValueEnum;
use privgame::data::{gen_binary, gen_gauss, write_csv};
use privgame::prob::BernoulliXorModel;

use super::{usage, BinaryParams, CliError, GaussParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataModel {
    Binary,
    Gauss,
}

#[derive(clap::Args, Debug)]
pub struct DatagenArgs {
    #[arg(long, value_enum)]
    pub model: DataModel,
    #[command(flatten)]
    pub binary: BinaryParams,
    #[command(flatten)]
    pub gauss: GaussParams,
    /// Number of rows to draw
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: DatagenArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let dataset = match args.model {
        DataModel::Binary => {
            let (p, q) = args.binary.pq()?;
            let model = BernoulliXorModel::new(p, q).map_err(|e| usage(e.to_string()))?;
            gen_binary(&model, args.n, args.seed)
        }
        DataModel::Gauss => {
            let model = args.gauss.model()?;
            gen_gauss(&model, args.n, args.seed)
        }
    };
    write_csv(&dataset, &args.out)?;
    println!("{}", dataset.len());
    Ok(())
}
