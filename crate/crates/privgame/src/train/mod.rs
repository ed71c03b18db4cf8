//! Data-driven mechanism learning: an alternating minimax loop in which an
//! adversary network takes several ascent epochs per outer iteration and
//! the privatizer takes one descent epoch against it, with the distortion
//! budget enforced by a penalty or augmented-Lagrangian term.
//!
//! A run is single-threaded and fully determined by its config (seed
//! included). Distinct runs own all their state and can execute
//! concurrently.

pub mod adam;
pub mod binary_game;
pub mod gauss_game;
pub mod loss;
pub mod mlp;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, DatasetKind};
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use adam::{adam_step, AdamState};
use binary_game::{
    row_expected_loss, BinaryAdversaryParams, BinaryMechKind, BinaryPrivatizerParams,
};
use gauss_game::GaussPrivatizerParams;
use loss::LossKind;
use mlp::{MlpAdversaryParams, MLP_DIM};

/// How the distortion constraint is folded into the privatizer's loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintMode {
    /// Add `rho_t * max(0, distortion - D)`.
    Penalty,
    /// Add `rho_t/2 * (distortion + delta - D)^2 - lambda_t * (...)` with a
    /// slack variable `delta >= 0` and multiplier updates.
    AugmentedLagrangian,
}

/// Which game is being trained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    BinaryPdd,
    BinaryPdi,
    Gauss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub minibatch: usize,
    /// Adversary epochs per privatizer epoch (`k`).
    pub adversary_epochs: usize,
    /// Outer iteration budget (`T`).
    pub outer_iters: usize,
    pub constraint_mode: ConstraintMode,
    pub rho0: f64,
    pub rho_growth: f64,
    pub rho_max: f64,
    pub lambda0: f64,
    pub seed: u64,
    pub distortion_budget: f64,
    #[serde(flatten)]
    pub loss: LossKind,
}

impl TrainConfig {
    pub fn new(distortion_budget: f64, seed: u64) -> Self {
        TrainConfig {
            learning_rate: 0.01,
            minibatch: 200,
            adversary_epochs: 5,
            outer_iters: 200,
            constraint_mode: ConstraintMode::Penalty,
            rho0: 1.0,
            rho_growth: 0.1,
            rho_max: 1000.0,
            lambda0: 0.0,
            seed,
            distortion_budget,
            loss: LossKind::CrossEntropy,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate = {} must be > 0",
                self.learning_rate
            )));
        }
        if self.minibatch == 0 {
            return Err(Error::InvalidParameter("minibatch must be >= 1".into()));
        }
        if self.adversary_epochs == 0 {
            return Err(Error::InvalidParameter("adversary_epochs must be >= 1".into()));
        }
        if !(self.distortion_budget.is_finite() && self.distortion_budget >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "distortion_budget = {} must be >= 0",
                self.distortion_budget
            )));
        }
        for (name, v) in [
            ("rho0", self.rho0),
            ("rho_growth", self.rho_growth),
            ("rho_max", self.rho_max),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be >= 0")));
            }
        }
        self.loss.validate()
    }

    fn rho_at(&self, t: usize) -> f64 {
        (self.rho0 * (1.0 + self.rho_growth * t as f64)).min(self.rho_max)
    }
}

/// One row of the per-outer-iteration training history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iter: usize,
    /// Mean adversary loss over the final inner adversary epoch.
    pub adv_loss: f64,
    /// Expected distortion over the full training set (analytic in the
    /// parameters; for the Gaussian model the noise expectation is taken
    /// in closed form).
    pub distortion: f64,
    /// Constraint violation `max(0, distortion - D)`.
    pub residual: f64,
    pub lambda: f64,
    pub rho: f64,
}

/// Serialize history rows as CSV with the schema
/// `iter,adv_loss,distortion,residual,lambda,rho`.
pub fn history_to_csv(rows: &[HistoryRow]) -> String {
    let mut out = String::from("iter,adv_loss,distortion,residual,lambda,rho\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iter, r.adv_loss, r.distortion, r.residual, r.lambda, r.rho
        ));
    }
    out
}

/// Learned parameters of both players.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnedParams {
    Binary { privatizer: BinaryPrivatizerParams, adversary: BinaryAdversaryParams },
    Gauss { privatizer: GaussPrivatizerParams, adversary: MlpAdversaryParams },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub params: LearnedParams,
    pub history: Vec<HistoryRow>,
    /// Set when the parameter-movement stopping rule fired before the
    /// iteration budget ran out.
    pub converged_at: Option<usize>,
    /// Expected training-set distortion of the returned parameters.
    pub mechanism_distortion: f64,
}

impl TrainOutcome {
    /// The learned privatizer exported as a mechanism.
    pub fn mechanism(&self) -> Mechanism {
        match &self.params {
            LearnedParams::Binary { privatizer, .. } => privatizer.mechanism().into(),
            LearnedParams::Gauss { privatizer, .. } => privatizer.mechanism().into(),
        }
    }

    /// Expected distortion on the training set of the returned mechanism.
    pub fn final_distortion(&self) -> f64 {
        self.mechanism_distortion
    }
}

const MOVEMENT_TOL: f64 = 1e-6;

/// Train privatizer and adversary on a dataset with the alternating
/// minimax loop.
pub fn train_gap(dataset: &Dataset, model: ModelKind, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if dataset.rows.is_empty() {
        return Err(Error::InvalidParameter("dataset is empty".into()));
    }
    let expected_kind = match model {
        ModelKind::BinaryPdd | ModelKind::BinaryPdi => DatasetKind::Binary,
        ModelKind::Gauss => DatasetKind::Gaussian,
    };
    if dataset.kind != expected_kind {
        return Err(Error::InvalidParameter(format!(
            "dataset kind {:?} does not match training model {:?}",
            dataset.kind, model
        )));
    }
    match model {
        ModelKind::BinaryPdd => train_binary(dataset, BinaryMechKind::Pdd, cfg),
        ModelKind::BinaryPdi => train_binary(dataset, BinaryMechKind::Pdi, cfg),
        ModelKind::Gauss => train_gauss(dataset, cfg),
    }
}

/// Constraint-term coefficient multiplying the distortion gradient.
///
/// The augmented-Lagrangian slack is minimized out in closed form at the
/// distortion being penalized (`delta = max(0, D - dist + lambda/rho)`),
/// which makes the constraint force vanish identically while the budget is
/// slack and reduces to the shifted penalty `rho (dist - D) - lambda` once
/// it binds. Evaluating the slack at a stale distortion instead would turn
/// the AL term into pure gradient noise of magnitude `rho * (dist -
/// dist_stale)` inside the feasible region.
fn constraint_coeff(mode: ConstraintMode, dist: f64, d: f64, lambda: f64, rho: f64) -> f64 {
    match mode {
        ConstraintMode::Penalty => {
            if dist > d {
                rho
            } else {
                0.0
            }
        }
        ConstraintMode::AugmentedLagrangian => {
            let delta = al_slack(dist, d, lambda, rho);
            rho * (dist + delta - d) - lambda
        }
    }
}

/// Closed-form inner minimization of the augmented Lagrangian over the
/// slack: `delta = max(0, D - distortion + lambda / rho)`.
fn al_slack(dist: f64, d: f64, lambda: f64, rho: f64) -> f64 {
    (d - dist + lambda / rho).max(0.0)
}

fn train_binary(
    dataset: &Dataset,
    kind: BinaryMechKind,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let d = cfg.distortion_budget;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rows: Vec<(u8, u8)> = dataset.rows.iter().map(|r| (r.x as u8, r.y)).collect();

    // Cell counts make the full-dataset distortion O(1).
    let mut counts = [0usize; 4];
    for &(x, y) in &rows {
        counts[(x as usize) * 2 + y as usize] += 1;
    }
    let n = rows.len() as f64;
    let freq: Vec<f64> = counts.iter().map(|c| *c as f64 / n).collect();

    let mut privatizer = BinaryPrivatizerParams::identity(kind);
    let mut adversary = BinaryAdversaryParams { a0: 0.5, a1: 0.5 };
    let priv_dim = privatizer.s.len();
    let mut priv_state = AdamState::new(priv_dim);
    let mut adv_state = AdamState::new(2);

    let full_distortion = |p: &BinaryPrivatizerParams| -> f64 {
        let mut acc = 0.0;
        for x in 0..2u8 {
            for y in 0..2u8 {
                acc += freq[(x as usize) * 2 + y as usize] * p.row_distortion(x, y);
            }
        }
        acc
    };
    let snapshot = |p: &BinaryPrivatizerParams, a: &BinaryAdversaryParams| -> Vec<f64> {
        let mut v = p.s.clone();
        v.push(a.a0);
        v.push(a.a1);
        v
    };

    // Empirical joint of (X, Y), for the best-iterate objective below.
    let emp_joint = crate::prob::JointBinary::new(freq[0], freq[1], freq[2], freq[3])?;
    // The empirical minimax value of the current mechanism: its exact MAP
    // accuracy against the empirical joint. Used to select the returned
    // iterate, because in the saturation regime the game's loss surface is
    // flat and the last iterate can sit on a transient excursion.
    let empirical_accuracy = |p: &BinaryPrivatizerParams| -> f64 {
        let induced = crate::prob::mechanism_joint(&emp_joint, &p.mechanism())
            .expect("projected parameters stay in [0, 1]");
        crate::prob::binary_map_accuracy(&induced)
    };

    let mut perm: Vec<usize> = (0..rows.len()).collect();
    let mut lambda = cfg.lambda0;
    let mut history = Vec::with_capacity(cfg.outer_iters);
    let mut converged_at = None;
    let mut last_finite = snapshot(&privatizer, &adversary);
    let mut best: Option<(f64, f64, BinaryPrivatizerParams, BinaryAdversaryParams)> = None;

    for t in 0..cfg.outer_iters {
        let rho = cfg.rho_at(t);
        let before = snapshot(&privatizer, &adversary);

        let mut last_epoch_loss = 0.0;
        for _ in 0..cfg.adversary_epochs {
            perm.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            let mut batches = 0usize;
            for chunk in perm.chunks(cfg.minibatch) {
                let m = chunk.len() as f64;
                let mut grad = [0.0f64; 2];
                let mut loss_sum = 0.0;
                for &i in chunk {
                    let (x, y) = rows[i];
                    let rl = row_expected_loss(x, y, &privatizer, &adversary, cfg.loss);
                    loss_sum += rl.loss;
                    grad[0] += rl.grad_adv[0];
                    grad[1] += rl.grad_adv[1];
                }
                grad[0] /= m;
                grad[1] /= m;
                let mut a = [adversary.a0, adversary.a1];
                adam_step(&mut a, &grad, &mut adv_state, cfg.learning_rate)?;
                adversary = BinaryAdversaryParams { a0: a[0], a1: a[1] };
                adversary.clamp();
                epoch_loss += loss_sum / m;
                batches += 1;
            }
            last_epoch_loss = epoch_loss / batches as f64;
        }

        perm.shuffle(&mut rng);
        for chunk in perm.chunks(cfg.minibatch) {
            let m = chunk.len() as f64;
            let mut grad = vec![0.0f64; priv_dim];
            for &i in chunk {
                let (x, y) = rows[i];
                let rl = row_expected_loss(x, y, &privatizer, &adversary, cfg.loss);
                // The privatizer descends the negated adversary loss.
                grad[rl.grad_priv.0] -= rl.grad_priv.1 / m;
            }
            // The budget term penalizes the expected distortion over the
            // whole training set, which is analytic in the parameters;
            // its gradient on cell c is -freq_c.
            let dist = full_distortion(&privatizer);
            let coeff = constraint_coeff(cfg.constraint_mode, dist, d, lambda, rho);
            if coeff != 0.0 {
                for (c, g) in grad.iter_mut().enumerate() {
                    let f = match kind {
                        BinaryMechKind::Pdd => freq[c],
                        BinaryMechKind::Pdi => freq[c * 2] + freq[c * 2 + 1],
                    };
                    *g -= coeff * f;
                }
            }
            adam_step(&mut privatizer.s, &grad, &mut priv_state, cfg.learning_rate)?;
            privatizer.clamp();
        }

        let dist_end = full_distortion(&privatizer);
        history.push(HistoryRow {
            iter: t,
            adv_loss: last_epoch_loss,
            distortion: dist_end,
            residual: (dist_end - d).max(0.0),
            lambda,
            rho,
        });
        if cfg.constraint_mode == ConstraintMode::AugmentedLagrangian {
            let delta = al_slack(dist_end, d, lambda, rho);
            lambda -= rho * (dist_end + delta - d);
        }

        if dist_end <= d + 1e-9 {
            let acc = empirical_accuracy(&privatizer);
            if best.as_ref().is_none_or(|b| acc < b.0) {
                best = Some((acc, dist_end, privatizer.clone(), adversary));
            }
        }

        let after = snapshot(&privatizer, &adversary);
        if !after.iter().all(|v| v.is_finite()) || !last_epoch_loss.is_finite() {
            return Err(Error::Diverged { iter: t, last_finite });
        }
        last_finite = after.clone();
        let movement = before
            .iter()
            .zip(&after)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if movement < MOVEMENT_TOL {
            converged_at = Some(t);
            break;
        }
    }

    let (privatizer, adversary, mechanism_distortion) = match best {
        Some((_, dist, p, a)) => (p, a, dist),
        None => {
            let dist = full_distortion(&privatizer);
            (privatizer, adversary, dist)
        }
    };
    Ok(TrainOutcome {
        params: LearnedParams::Binary { privatizer, adversary },
        history,
        converged_at,
        mechanism_distortion,
    })
}

fn train_gauss(dataset: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    let d = cfg.distortion_budget;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rows: Vec<(f64, u8)> = dataset.rows.iter().map(|r| (r.x, r.y)).collect();
    let frac1 = rows.iter().filter(|r| r.1 == 1).count() as f64 / rows.len() as f64;

    let mut privatizer = GaussPrivatizerParams::init();
    let mut adversary = MlpAdversaryParams::init(&mut rng);
    let mut priv_state = AdamState::new(4);
    let mut adv_state = AdamState::new(MLP_DIM);

    let snapshot = |p: &GaussPrivatizerParams, a: &MlpAdversaryParams| -> Vec<f64> {
        let mut v = p.as_vec();
        v.extend_from_slice(a.theta());
        v
    };

    let mut perm: Vec<usize> = (0..rows.len()).collect();
    let mut lambda = cfg.lambda0;
    let mut history = Vec::with_capacity(cfg.outer_iters);
    let mut converged_at = None;
    let mut last_finite = snapshot(&privatizer, &adversary);

    for t in 0..cfg.outer_iters {
        let rho = cfg.rho_at(t);
        let before = snapshot(&privatizer, &adversary);

        let mut last_epoch_loss = 0.0;
        for _ in 0..cfg.adversary_epochs {
            perm.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            let mut batches = 0usize;
            for chunk in perm.chunks(cfg.minibatch) {
                let m = chunk.len() as f64;
                let mut grad = vec![0.0f64; MLP_DIM];
                let mut loss_sum = 0.0;
                for &i in chunk {
                    let (x, y) = rows[i];
                    let noise: f64 = rng.sample(StandardNormal);
                    let xhat = privatizer.forward(x, y, noise);
                    let fwd = adversary.forward_cached(xhat);
                    loss_sum += cfg.loss.loss(fwd.belief, y);
                    let g = adversary.backward(&fwd, cfg.loss.dloss_dbelief(fwd.belief, y));
                    for (acc, gi) in grad.iter_mut().zip(&g.theta) {
                        *acc += gi;
                    }
                }
                for g in grad.iter_mut() {
                    *g /= m;
                }
                adam_step(adversary.theta_mut(), &grad, &mut adv_state, cfg.learning_rate)?;
                epoch_loss += loss_sum / m;
                batches += 1;
            }
            last_epoch_loss = epoch_loss / batches as f64;
        }

        perm.shuffle(&mut rng);
        for chunk in perm.chunks(cfg.minibatch) {
            let m = chunk.len() as f64;
            let mut grad = [0.0f64; 4];
            for &i in chunk {
                let (x, y) = rows[i];
                let noise: f64 = rng.sample(StandardNormal);
                let xhat = privatizer.forward(x, y, noise);
                let fwd = adversary.forward_cached(xhat);
                let back = adversary.backward(&fwd, cfg.loss.dloss_dbelief(fwd.belief, y));
                let dxhat = privatizer.dxhat_dparams(y, noise);
                for k in 0..4 {
                    // Negated adversary loss through the released sample.
                    grad[k] -= back.input * dxhat[k] / m;
                }
            }
            // The budget term penalizes the expected distortion, with the
            // noise expectation taken in closed form; only the adversary
            // loss flows through the reparameterized samples.
            let dist = privatizer.expected_sq_distortion(frac1);
            let coeff = constraint_coeff(cfg.constraint_mode, dist, d, lambda, rho);
            if coeff != 0.0 {
                let (g0, g1) = privatizer.gammas();
                let dist_grad = [
                    (1.0 - frac1) * 2.0 * privatizer.beta0,
                    frac1 * 2.0 * privatizer.beta1,
                    (1.0 - frac1) * 4.0 * g0 * privatizer.gamma0_raw,
                    frac1 * 4.0 * g1 * privatizer.gamma1_raw,
                ];
                for (g, dg) in grad.iter_mut().zip(&dist_grad) {
                    *g += coeff * dg;
                }
            }
            let mut v = privatizer.as_vec();
            adam_step(&mut v, &grad, &mut priv_state, cfg.learning_rate)?;
            privatizer.set_from(&v);
        }

        let dist_end = privatizer.expected_sq_distortion(frac1);
        history.push(HistoryRow {
            iter: t,
            adv_loss: last_epoch_loss,
            distortion: dist_end,
            residual: (dist_end - d).max(0.0),
            lambda,
            rho,
        });
        if cfg.constraint_mode == ConstraintMode::AugmentedLagrangian {
            let delta = al_slack(dist_end, d, lambda, rho);
            lambda -= rho * (dist_end + delta - d);
        }

        let after = snapshot(&privatizer, &adversary);
        if !after.iter().all(|v| v.is_finite())
            || !last_epoch_loss.is_finite()
            || !dist_end.is_finite()
        {
            return Err(Error::Diverged { iter: t, last_finite });
        }
        last_finite = after.clone();
        let movement = before
            .iter()
            .zip(&after)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if movement < MOVEMENT_TOL {
            converged_at = Some(t);
            break;
        }
    }

    let mechanism_distortion = privatizer.expected_sq_distortion(frac1);
    Ok(TrainOutcome {
        params: LearnedParams::Gauss { privatizer, adversary },
        history,
        converged_at,
        mechanism_distortion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_binary;
    use crate::prob::BernoulliXorModel;

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig::new(0.3, 1);
        assert!(cfg.validate().is_ok());
        cfg.learning_rate = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = TrainConfig::new(-0.1, 1);
        assert!(cfg.validate().is_err());
        cfg = TrainConfig::new(0.3, 1);
        cfg.loss = LossKind::Alpha { alpha: 0.9 };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_dataset_rejected() {
        let ds = Dataset { kind: DatasetKind::Binary, rows: vec![], provenance: None };
        let cfg = TrainConfig::new(0.2, 1);
        assert!(train_gap(&ds, ModelKind::BinaryPdd, &cfg).is_err());
    }

    #[test]
    fn kind_mismatch_rejected() {
        let model = BernoulliXorModel::new(0.5, 0.25).unwrap();
        let ds = gen_binary(&model, 100, 3);
        let cfg = TrainConfig::new(0.2, 1);
        assert!(train_gap(&ds, ModelKind::Gauss, &cfg).is_err());
    }

    #[test]
    fn histories_are_bit_identical_across_runs() {
        let model = BernoulliXorModel::new(0.5, 0.25).unwrap();
        let ds = gen_binary(&model, 1000, 9);
        let mut cfg = TrainConfig::new(0.3, 42);
        cfg.outer_iters = 8;
        let a = train_gap(&ds, ModelKind::BinaryPdi, &cfg).unwrap();
        let b = train_gap(&ds, ModelKind::BinaryPdi, &cfg).unwrap();
        assert_eq!(a.params, b.params);
        for (ra, rb) in a.history.iter().zip(&b.history) {
            assert_eq!(ra.adv_loss.to_bits(), rb.adv_loss.to_bits());
            assert_eq!(ra.distortion.to_bits(), rb.distortion.to_bits());
        }
    }

    #[test]
    fn history_csv_schema() {
        let rows = vec![HistoryRow {
            iter: 0,
            adv_loss: 0.5,
            distortion: 0.1,
            residual: 0.0,
            lambda: 0.0,
            rho: 1.0,
        }];
        let csv = history_to_csv(&rows);
        assert!(csv.starts_with("iter,adv_loss,distortion,residual,lambda,rho\n"));
        assert!(csv.lines().count() == 2);
    }
}
