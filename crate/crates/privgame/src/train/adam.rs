//! A self-contained Adam optimizer (first/second moment estimates with
//! bias correction).

use crate::error::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Per-parameter-vector optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        AdamState { m: vec![0.0; dim], v: vec![0.0; dim], t: 0 }
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }
}

/// One Adam update in place:
/// `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`,
/// `theta <- theta - lr * mhat / (sqrt(vhat) + eps)` with the usual bias
/// corrections `mhat = m / (1 - b1^t)`, `vhat = v / (1 - b2^t)`.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    if grads.len() != params.len() || state.m.len() != params.len() {
        return Err(Error::ShapeMismatch {
            expected: state.m.len(),
            got: if grads.len() != params.len() { grads.len() } else { params.len() },
        });
    }
    state.t += 1;
    let bc1 = 1.0 - ADAM_BETA1.powi(state.t as i32);
    let bc2 = 1.0 - ADAM_BETA2.powi(state.t as i32);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = ADAM_BETA1 * state.m[i] + (1.0 - ADAM_BETA1) * g;
        state.v[i] = ADAM_BETA2 * state.v[i] + (1.0 - ADAM_BETA2) * g * g;
        let mhat = state.m[i] / bc1;
        let vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (vhat.sqrt() + ADAM_EPS);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut p = vec![1.0, -2.0, 0.5];
        let mut s = AdamState::new(3);
        adam_step(&mut p, &[0.0, 0.0, 0.0], &mut s, 0.01).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
        assert_eq!(s.steps_taken(), 1);
    }

    #[test]
    fn first_step_from_zero_state() {
        // With m = v = 0, the bias corrections cancel and the first update
        // is exactly -lr * g / (|g| + eps).
        for g in [0.3, -4.0, 1e-3] {
            let mut p = vec![0.0];
            let mut s = AdamState::new(1);
            adam_step(&mut p, &[g], &mut s, 0.01).unwrap();
            let expect = -0.01 * g / (g.abs() + ADAM_EPS);
            assert_relative_eq!(p[0], expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_gradient_approaches_signed_learning_rate() {
        let g = 0.7;
        let mut p = vec![0.0];
        let mut s = AdamState::new(1);
        let mut last = 0.0;
        for _ in 0..500 {
            last = p[0];
            adam_step(&mut p, &[g], &mut s, 0.01).unwrap();
        }
        let delta = p[0] - last;
        assert_relative_eq!(delta, -0.01, max_relative = 1e-6);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let mut p = vec![0.0, 0.0];
        let mut s = AdamState::new(2);
        assert!(adam_step(&mut p, &[1.0], &mut s, 0.01).is_err());
    }
}
