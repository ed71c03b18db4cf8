//! The adversary network for the Gaussian model: a fixed 1-16-8-1 fully
//! connected classifier with leaky-ReLU hidden activations and a sigmoid
//! output, with hand-derived backpropagation.

use rand::Rng;

use crate::train::loss::LossKind;

pub const LEAKY_SLOPE: f64 = 0.2;

pub const HIDDEN1: usize = 16;
pub const HIDDEN2: usize = 8;

const W1: usize = 0;
const B1: usize = W1 + HIDDEN1;
const W2: usize = B1 + HIDDEN1;
const B2: usize = W2 + HIDDEN1 * HIDDEN2;
const W3: usize = B2 + HIDDEN2;
const B3: usize = W3 + HIDDEN2;
/// Total parameter count: 177.
pub const MLP_DIM: usize = B3 + 1;

fn leaky(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        LEAKY_SLOPE * z
    }
}

fn leaky_deriv(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Adversary parameters as one flat vector (so the optimizer and the
/// finite-difference checks can treat them uniformly).
#[derive(Debug, Clone, PartialEq)]
pub struct MlpAdversaryParams {
    theta: Vec<f64>,
}

/// Intermediate activations kept for the backward pass.
pub struct MlpForward {
    pub belief: f64,
    z1: [f64; HIDDEN1],
    h1: [f64; HIDDEN1],
    z2: [f64; HIDDEN2],
    h2: [f64; HIDDEN2],
    x: f64,
}

/// Gradients of a loss with respect to every parameter and to the input.
#[derive(Debug, Clone)]
pub struct MlpGradients {
    pub theta: Vec<f64>,
    pub input: f64,
}

impl MlpAdversaryParams {
    pub fn zeros() -> Self {
        MlpAdversaryParams { theta: vec![0.0; MLP_DIM] }
    }

    /// Glorot-uniform weight init (`+-sqrt(6 / (fan_in + fan_out))`),
    /// zero biases.
    pub fn init<R: Rng>(rng: &mut R) -> Self {
        let mut theta = vec![0.0; MLP_DIM];
        let mut fill = |range: std::ops::Range<usize>, limit: f64, rng: &mut R| {
            for i in range {
                theta[i] = rng.gen_range(-limit..limit);
            }
        };
        fill(W1..B1, (6.0 / (1 + HIDDEN1) as f64).sqrt(), rng);
        fill(W2..B2, (6.0 / (HIDDEN1 + HIDDEN2) as f64).sqrt(), rng);
        fill(W3..B3, (6.0 / (HIDDEN2 + 1) as f64).sqrt(), rng);
        MlpAdversaryParams { theta }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn from_theta(theta: Vec<f64>) -> Self {
        assert_eq!(theta.len(), MLP_DIM);
        MlpAdversaryParams { theta }
    }

    pub fn forward_cached(&self, x: f64) -> MlpForward {
        let t = &self.theta;
        let mut z1 = [0.0; HIDDEN1];
        let mut h1 = [0.0; HIDDEN1];
        for i in 0..HIDDEN1 {
            z1[i] = t[W1 + i] * x + t[B1 + i];
            h1[i] = leaky(z1[i]);
        }
        let mut z2 = [0.0; HIDDEN2];
        let mut h2 = [0.0; HIDDEN2];
        for o in 0..HIDDEN2 {
            let mut acc = t[B2 + o];
            let row = W2 + o * HIDDEN1;
            for i in 0..HIDDEN1 {
                acc += t[row + i] * h1[i];
            }
            z2[o] = acc;
            h2[o] = leaky(acc);
        }
        let mut z3 = t[B3];
        for o in 0..HIDDEN2 {
            z3 += t[W3 + o] * h2[o];
        }
        MlpForward { belief: sigmoid(z3), z1, h1, z2, h2, x }
    }

    /// Backward pass given `d loss / d belief`; the sigmoid derivative is
    /// folded in here.
    pub fn backward(&self, fwd: &MlpForward, dloss_dbelief: f64) -> MlpGradients {
        let t = &self.theta;
        let mut g = vec![0.0; MLP_DIM];
        let dz3 = dloss_dbelief * fwd.belief * (1.0 - fwd.belief);
        g[B3] = dz3;
        let mut dh2 = [0.0; HIDDEN2];
        for o in 0..HIDDEN2 {
            g[W3 + o] = dz3 * fwd.h2[o];
            dh2[o] = dz3 * t[W3 + o];
        }
        let mut dh1 = [0.0; HIDDEN1];
        for o in 0..HIDDEN2 {
            let dz2 = dh2[o] * leaky_deriv(fwd.z2[o]);
            g[B2 + o] = dz2;
            let row = W2 + o * HIDDEN1;
            for i in 0..HIDDEN1 {
                g[row + i] = dz2 * fwd.h1[i];
                dh1[i] += dz2 * t[row + i];
            }
        }
        let mut dx = 0.0;
        for i in 0..HIDDEN1 {
            let dz1 = dh1[i] * leaky_deriv(fwd.z1[i]);
            g[W1 + i] = dz1 * fwd.x;
            g[B1 + i] = dz1;
            dx += dz1 * t[W1 + i];
        }
        MlpGradients { theta: g, input: dx }
    }
}

/// Belief `P(Y = 1 | xhat)` of the adversary network.
pub fn mlp_forward(adv: &MlpAdversaryParams, xhat: f64) -> f64 {
    adv.forward_cached(xhat).belief
}

/// Exact gradients of `loss(mlp(xhat), y)` with respect to every adversary
/// parameter and to `xhat` itself (the privatizer's chain rule runs through
/// the latter).
pub fn backprop_mlp(
    adv: &MlpAdversaryParams,
    xhat: f64,
    y: u8,
    loss_kind: LossKind,
) -> MlpGradients {
    let fwd = adv.forward_cached(xhat);
    let dl = loss_kind.dloss_dbelief(fwd.belief, y);
    adv.backward(&fwd, dl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_parameters_give_half_everywhere() {
        let adv = MlpAdversaryParams::zeros();
        for x in [-5.0, -0.3, 0.0, 2.0, 100.0] {
            assert_eq!(mlp_forward(&adv, x), 0.5);
        }
    }

    #[test]
    fn positive_identity_stack_is_monotone() {
        // Hand-built: first unit passes x through, everything else dead,
        // positive readout. The output must be nondecreasing in x.
        let mut adv = MlpAdversaryParams::zeros();
        adv.theta_mut()[W1] = 1.0; // first hidden-1 weight
        adv.theta_mut()[W2] = 1.0; // h2[0] reads h1[0]
        adv.theta_mut()[W3] = 1.0; // output reads h2[0]
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let x = -6.0 + 12.0 * i as f64 / 199.0;
            let b = mlp_forward(&adv, x);
            assert!(b >= prev - 1e-15, "belief decreased at x = {x}");
            prev = b;
        }
    }

    #[test]
    fn zero_net_cross_entropy_gradient_shape() {
        // With all-zero parameters the belief is 1/2 regardless of input,
        // so hidden weight gradients vanish but the output bias gradient
        // does not.
        let adv = MlpAdversaryParams::zeros();
        let g = backprop_mlp(&adv, 0.0, 1, LossKind::CrossEntropy);
        for i in W1..B3 {
            assert_eq!(g.theta[i], 0.0, "parameter {i}");
        }
        // d XE / d z3 = belief - y = -0.5.
        assert!((g.theta[B3] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn logit_gradient_is_belief_minus_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let adv = MlpAdversaryParams::init(&mut rng);
        let fwd = adv.forward_cached(0.8);
        let g = backprop_mlp(&adv, 0.8, 1, LossKind::CrossEntropy);
        // The output-bias gradient equals d loss / d z3.
        assert!((g.theta[B3] - (fwd.belief - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let h = 1e-5;
        for kind in [LossKind::CrossEntropy, LossKind::Alpha { alpha: 4.0 }] {
            for _ in 0..5 {
                let adv = MlpAdversaryParams::init(&mut rng);
                let x: f64 = rng.gen_range(-4.0..4.0);
                let y = u8::from(rng.gen_bool(0.5));
                let g = backprop_mlp(&adv, x, y, kind);
                for idx in [0, 7, B1 + 3, W2 + 37, B2 + 5, W3 + 2, B3] {
                    let mut plus = adv.clone();
                    plus.theta_mut()[idx] += h;
                    let mut minus = adv.clone();
                    minus.theta_mut()[idx] -= h;
                    let num = (kind.loss(mlp_forward(&plus, x), y)
                        - kind.loss(mlp_forward(&minus, x), y))
                        / (2.0 * h);
                    let denom = num.abs().max(g.theta[idx].abs()).max(1e-8);
                    assert!(
                        (num - g.theta[idx]).abs() / denom < 1e-5,
                        "param {idx}: numeric {num} vs analytic {}",
                        g.theta[idx]
                    );
                }
                let num_x = (kind.loss(mlp_forward(&adv, x + h), y)
                    - kind.loss(mlp_forward(&adv, x - h), y))
                    / (2.0 * h);
                let denom = num_x.abs().max(g.input.abs()).max(1e-8);
                assert!((num_x - g.input).abs() / denom < 1e-5);
            }
        }
    }
}
