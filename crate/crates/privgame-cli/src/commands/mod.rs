pub mod datagen;
pub mod eval;
pub mod sweep;
pub mod theory;
pub mod train;

use std::path::Path;

use privgame::mechanism::Mechanism;
use privgame::prob::{GaussMixture, JointBinary};

/// Failures are split by exit code: bad invocations (2) vs runtime errors (1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<privgame::Error> for CliError {
    fn from(e: privgame::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Binary source parameters: either the XOR model `(p, q)` or an explicit
/// joint table.
#[derive(clap::Args, Debug, Clone)]
pub struct BinaryParams {
    /// P(X = 1) of the XOR source
    #[arg(long)]
    pub p: Option<f64>,
    /// Flip-noise probability q with Y = X xor N, N ~ Bernoulli(q)
    #[arg(long)]
    pub q: Option<f64>,
    /// Explicit joint table "p00,p01,p10,p11" of (X, Y); overrides --p/--q
    #[arg(long)]
    pub joint: Option<String>,
}

impl BinaryParams {
    pub fn joint(&self) -> Result<JointBinary, CliError> {
        if let Some(spec) = &self.joint {
            let vals: Vec<f64> = spec
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| usage(format!("bad joint entry {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            if vals.len() != 4 {
                return Err(usage("--joint needs four comma-separated entries"));
            }
            return JointBinary::new(vals[0], vals[1], vals[2], vals[3])
                .map_err(|e| usage(e.to_string()));
        }
        let (p, q) = self.pq()?;
        Ok(privgame::prob::BernoulliXorModel::new(p, q)
            .map_err(|e| usage(e.to_string()))?
            .joint())
    }

    pub fn pq(&self) -> Result<(f64, f64), CliError> {
        match (self.p, self.q) {
            (Some(p), Some(q)) => Ok((p, q)),
            _ => Err(usage("binary models need --p and --q (or --joint)")),
        }
    }
}

/// Gaussian mixture source parameters.
#[derive(clap::Args, Debug, Clone)]
pub struct GaussParams {
    /// Class prior P(Y = 1)
    #[arg(long)]
    pub ptilde: Option<f64>,
    /// Class-mean magnitude: E[X | Y=1] = +mu, E[X | Y=0] = -mu
    #[arg(long)]
    pub mu: Option<f64>,
    /// Variance of X | Y=0
    #[arg(long)]
    pub var0: Option<f64>,
    /// Variance of X | Y=1
    #[arg(long)]
    pub var1: Option<f64>,
}

impl GaussParams {
    pub fn model(&self) -> Result<GaussMixture, CliError> {
        match (self.ptilde, self.mu, self.var0, self.var1) {
            (Some(pt), Some(mu), Some(v0), Some(v1)) => {
                GaussMixture::new(pt, mu, v0, v1).map_err(|e| usage(e.to_string()))
            }
            _ => Err(usage("gauss models need --ptilde, --mu, --var0 and --var1")),
        }
    }
}

/// Load and validate a mechanism JSON file; parse failures carry the path
/// to the offending field.
///
/// The `kind` tag is dispatched by hand so that field-level errors keep
/// their path (an internally tagged enum buffers its content and loses it).
pub fn read_mechanism(path: &Path) -> Result<Mechanism, CliError> {
    #[derive(serde::Deserialize)]
    struct PddFields {
        s00: f64,
        s01: f64,
        s10: f64,
        s11: f64,
    }
    #[derive(serde::Deserialize)]
    struct PdiFields {
        s0: f64,
        s1: f64,
    }
    #[derive(serde::Deserialize)]
    struct GaussFields {
        beta0: f64,
        beta1: f64,
        gamma0: f64,
        gamma1: f64,
    }

    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot read {path:?}: {e}")))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("malformed mechanism JSON: {e}")))?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| {
            CliError::Runtime(anyhow::anyhow!(
                "malformed mechanism JSON at field `kind`: missing or not a string"
            ))
        })?
        .to_owned();

    fn typed<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
        serde_path_to_error::deserialize(value).map_err(|e| {
            CliError::Runtime(anyhow::anyhow!(
                "malformed mechanism JSON at field `{}`: {}",
                e.path(),
                e.inner()
            ))
        })
    }

    let mech = match kind.as_str() {
        "pdd" => {
            let f: PddFields = typed(value)?;
            Mechanism::Pdd { s00: f.s00, s01: f.s01, s10: f.s10, s11: f.s11 }
        }
        "pdi" => {
            let f: PdiFields = typed(value)?;
            Mechanism::Pdi { s0: f.s0, s1: f.s1 }
        }
        "gauss" => {
            let f: GaussFields = typed(value)?;
            Mechanism::Gauss {
                beta0: f.beta0,
                beta1: f.beta1,
                gamma0: f.gamma0,
                gamma1: f.gamma1,
            }
        }
        other => {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "malformed mechanism JSON at field `kind`: unknown kind {other:?}"
            )))
        }
    };
    mech.validate()?;
    Ok(mech)
}

pub fn write_mechanism(path: &Path, mech: &Mechanism) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(mech)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("mechanism serialize: {e}")))?;
    std::fs::write(path, text)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot write {path:?}: {e}")))?;
    Ok(())
}
