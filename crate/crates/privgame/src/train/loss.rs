//! Adversary loss functions over a scalar belief `P(Y = 1 | observation)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beliefs are clipped into `[BELIEF_CLIP, 1 - BELIEF_CLIP]` before any
/// logarithm or fractional power is taken.
pub const BELIEF_CLIP: f64 = 1e-7;

pub fn clip_belief(b: f64) -> f64 {
    b.clamp(BELIEF_CLIP, 1.0 - BELIEF_CLIP)
}

/// Cross-entropy (log) loss of a belief against the realized bit.
pub fn cross_entropy_loss(belief: f64, y: u8) -> f64 {
    let b = clip_belief(belief);
    if y == 1 {
        -b.ln()
    } else {
        -(1.0 - b).ln()
    }
}

/// Tunable loss interpolating between the log loss (`alpha -> 1`) and the
/// 0-1 loss (`alpha -> infinity`):
/// `alpha/(alpha-1) * (y (1 - b^{1-1/alpha}) + (1-y)(1 - (1-b)^{1-1/alpha}))`.
pub fn alpha_loss(belief: f64, y: u8, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} must be > 1 (use the cross-entropy loss for the log-loss limit)"
        )));
    }
    let b = clip_belief(belief);
    let expo = 1.0 - 1.0 / alpha;
    let scale = alpha / (alpha - 1.0);
    Ok(if y == 1 {
        scale * (1.0 - b.powf(expo))
    } else {
        scale * (1.0 - (1.0 - b).powf(expo))
    })
}

/// Which loss the training game is played under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "loss", rename_all = "snake_case")]
pub enum LossKind {
    CrossEntropy,
    Alpha { alpha: f64 },
}

impl LossKind {
    pub fn validate(&self) -> Result<()> {
        if let LossKind::Alpha { alpha } = self {
            if !alpha.is_finite() || *alpha <= 1.0 {
                return Err(Error::InvalidParameter(format!("alpha = {alpha} must be > 1")));
            }
        }
        Ok(())
    }

    pub fn loss(&self, belief: f64, y: u8) -> f64 {
        match *self {
            LossKind::CrossEntropy => cross_entropy_loss(belief, y),
            // Validity of alpha is checked at configuration time.
            LossKind::Alpha { alpha } => alpha_loss(belief, y, alpha).expect("validated alpha"),
        }
    }

    /// d loss / d belief, evaluated at the clipped belief.
    pub fn dloss_dbelief(&self, belief: f64, y: u8) -> f64 {
        let b = clip_belief(belief);
        match *self {
            LossKind::CrossEntropy => {
                if y == 1 {
                    -1.0 / b
                } else {
                    1.0 / (1.0 - b)
                }
            }
            LossKind::Alpha { alpha } => {
                // The alpha/(alpha-1) prefactor cancels against the power
                // rule: d/db of the bracket is -(1 - 1/alpha) b^{-1/alpha}.
                if y == 1 {
                    -b.powf(-1.0 / alpha)
                } else {
                    (1.0 - b).powf(-1.0 / alpha)
                }
            }
        }
    }
}
