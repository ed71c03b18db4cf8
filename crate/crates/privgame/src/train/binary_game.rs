//! The binary two-player game: the privatizer's parameters are the flip
//! mechanism's stay-probabilities themselves, and the adversary keeps one
//! belief per released symbol. Because both output symbols can be
//! enumerated, every quantity is an analytic expectation over the
//! mechanism's randomness; no sampling is involved anywhere.

use crate::mechanism::BinaryMechanism;
use crate::train::loss::LossKind;

/// Which mechanism family the privatizer is allowed to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryMechKind {
    Pdd,
    Pdi,
}

/// The privatizer's parameters: the stay-probabilities, stored flat
/// (`[s00, s01, s10, s11]` for PDD, `[s0, s1]` for PDI). Kept inside
/// `[0, 1]` by projection after every optimizer step.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPrivatizerParams {
    pub kind: BinaryMechKind,
    pub s: Vec<f64>,
}

impl BinaryPrivatizerParams {
    /// Identity release: all stay-probabilities one.
    pub fn identity(kind: BinaryMechKind) -> Self {
        let dim = match kind {
            BinaryMechKind::Pdd => 4,
            BinaryMechKind::Pdi => 2,
        };
        BinaryPrivatizerParams { kind, s: vec![1.0; dim] }
    }

    pub fn clamp(&mut self) {
        for v in self.s.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    }

    pub fn mechanism(&self) -> BinaryMechanism {
        match self.kind {
            BinaryMechKind::Pdd => BinaryMechanism::Pdd {
                s00: self.s[0],
                s01: self.s[1],
                s10: self.s[2],
                s11: self.s[3],
            },
            BinaryMechKind::Pdi => BinaryMechanism::Pdi { s0: self.s[0], s1: self.s[1] },
        }
    }

    /// Index of the stay-probability used for the cell `(x, y)`.
    fn cell_index(&self, x: u8, y: u8) -> usize {
        match self.kind {
            BinaryMechKind::Pdd => (x as usize) * 2 + y as usize,
            BinaryMechKind::Pdi => x as usize,
        }
    }

    /// `P(xhat = 1 | x, y)` under the current parameters.
    pub fn p_release_one(&self, x: u8, y: u8) -> f64 {
        let s = self.s[self.cell_index(x, y)];
        if x == 1 {
            s
        } else {
            1.0 - s
        }
    }

    /// d `P(xhat = 1 | x, y)` / d s_cell for the active cell.
    fn dp1_dcell(&self, x: u8) -> f64 {
        if x == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Expected Hamming distortion contributed by a row: `1 - s_cell`.
    pub fn row_distortion(&self, x: u8, y: u8) -> f64 {
        1.0 - self.s[self.cell_index(x, y)]
    }
}

/// The adversary's parameters: `a0 = P(Y = 0 | xhat = 0)` and
/// `a1 = P(Y = 1 | xhat = 1)`, each projected into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryAdversaryParams {
    pub a0: f64,
    pub a1: f64,
}

impl BinaryAdversaryParams {
    pub fn clamp(&mut self) {
        self.a0 = self.a0.clamp(0.0, 1.0);
        self.a1 = self.a1.clamp(0.0, 1.0);
    }

    /// Belief that `Y = 1` after observing the released symbol.
    pub fn belief_given_release(&self, xhat: u8) -> f64 {
        if xhat == 1 {
            self.a1
        } else {
            1.0 - self.a0
        }
    }
}

/// The adversary's expected belief that `Y = 1` given an input row, with
/// the expectation taken analytically over the mechanism's randomness:
/// `a1 * P(xhat=1 | x, y) + (1 - a0) * P(xhat=0 | x, y)`.
pub fn binary_belief(
    x: u8,
    y: u8,
    privatizer: &BinaryPrivatizerParams,
    adversary: &BinaryAdversaryParams,
) -> f64 {
    let p1 = privatizer.p_release_one(x, y);
    adversary.a1 * p1 + (1.0 - adversary.a0) * (1.0 - p1)
}

/// Expected adversary loss for one row, `E_xhat[loss(belief(xhat), y)]`
/// expanded over both release symbols, together with its exact gradients.
pub struct RowLoss {
    pub loss: f64,
    /// Gradient w.r.t. `(a0, a1)`.
    pub grad_adv: [f64; 2],
    /// Gradient w.r.t. the row's active stay-probability, paired with its
    /// index into the privatizer's parameter vector.
    pub grad_priv: (usize, f64),
}

pub fn row_expected_loss(
    x: u8,
    y: u8,
    privatizer: &BinaryPrivatizerParams,
    adversary: &BinaryAdversaryParams,
    loss: LossKind,
) -> RowLoss {
    let p1 = privatizer.p_release_one(x, y);
    let belief1 = adversary.a1;
    let belief0 = 1.0 - adversary.a0;
    let l1 = loss.loss(belief1, y);
    let l0 = loss.loss(belief0, y);
    let value = p1 * l1 + (1.0 - p1) * l0;
    // d/da1 only flows through the xhat=1 branch, d/da0 through xhat=0.
    let grad_a1 = p1 * loss.dloss_dbelief(belief1, y);
    let grad_a0 = -(1.0 - p1) * loss.dloss_dbelief(belief0, y);
    let cell = privatizer.cell_index(x, y);
    let grad_s = privatizer.dp1_dcell(x) * (l1 - l0);
    RowLoss { loss: value, grad_adv: [grad_a0, grad_a1], grad_priv: (cell, grad_s) }
}
