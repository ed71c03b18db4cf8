use std::path::PathBuf;
use std::time::Instant;

use privgame::gaussian::post_mechanism_pair;
use privgame::mechanism::Mechanism;
use privgame::prob::{
    binary_map_accuracy, expected_hamming_distortion, gauss_map_accuracy_general,
    mechanism_joint, mutual_information_nats,
};

use super::{read_mechanism, BinaryParams, CliError, GaussParams};
use crate::tradeoff::{append_point, Source, TradeoffPoint};

#[derive(clap::Args, Debug)]
pub struct EvalArgs {
    /// Mechanism JSON file (kind: pdd | pdi | gauss)
    #[arg(long)]
    pub mechanism: PathBuf,
    #[command(flatten)]
    pub binary: BinaryParams,
    #[command(flatten)]
    pub gauss: GaussParams,
    /// Tradeoff CSV to append to
    #[arg(long)]
    pub out: PathBuf,
    /// Provenance label recorded in the output row
    #[arg(long, value_enum, default_value_t = SourceArg::Theory)]
    pub source: SourceArg,
    /// Also print the mutual information converted to bits (binary only)
    #[arg(long)]
    pub mi_bits: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SourceArg {
    Theory,
    Trained,
}

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mech = read_mechanism(&args.mechanism)?;
    let (d, map_accuracy, mi_nats) = match &mech {
        Mechanism::Pdd { .. } | Mechanism::Pdi { .. } => {
            let joint = args.binary.joint()?;
            let bm = mech.as_binary().unwrap();
            let induced = mechanism_joint(&joint, &bm)?;
            (
                expected_hamming_distortion(&joint, &bm),
                binary_map_accuracy(&induced),
                Some(mutual_information_nats(&induced)),
            )
        }
        Mechanism::Gauss { .. } => {
            let model = args.gauss.model()?;
            let gm = mech.as_gauss().unwrap();
            let pair = post_mechanism_pair(&model, &gm);
            (
                gm.expected_sq_distortion(model.ptilde),
                gauss_map_accuracy_general(&pair),
                None,
            )
        }
    };
    let point = TradeoffPoint {
        d,
        source: match args.source {
            SourceArg::Theory => Source::Theory,
            SourceArg::Trained => Source::Trained,
        },
        map_accuracy,
        mi_nats,
        mech_json: serde_json::to_string(&mech)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("mechanism serialize: {e}")))?,
        elapsed_ms: start.elapsed().as_millis() as u64,
        seed: None,
    };
    append_point(&args.out, &point)?;
    match mi_nats {
        Some(mi) if args.mi_bits => println!(
            "map_accuracy={map_accuracy} mi_nats={mi} mi_bits={}",
            mi / std::f64::consts::LN_2
        ),
        Some(mi) => println!("map_accuracy={map_accuracy} mi_nats={mi}"),
        None => println!("map_accuracy={map_accuracy}"),
    }
    Ok(())
}
