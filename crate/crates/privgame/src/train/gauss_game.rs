//! The Gaussian privatizer: four scalar parameters acting as
//! `xhat = x + (1-y) b0 - y b1 + ((1-y) g0 + y g1) n` with reparameterized
//! standard-normal noise, so gradients flow through the sample. The noise
//! scales are stored unconstrained and squared at use, which keeps them
//! nonnegative without projections.

use crate::mechanism::GaussMechanism;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussPrivatizerParams {
    pub beta0: f64,
    pub beta1: f64,
    pub gamma0_raw: f64,
    pub gamma1_raw: f64,
}

impl GaussPrivatizerParams {
    /// Start from the no-privacy point; the small raw noise keeps the
    /// squared parameterization away from its dead zero-gradient point.
    pub fn init() -> Self {
        GaussPrivatizerParams { beta0: 0.0, beta1: 0.0, gamma0_raw: 0.1, gamma1_raw: 0.1 }
    }

    pub fn as_vec(&self) -> Vec<f64> {
        vec![self.beta0, self.beta1, self.gamma0_raw, self.gamma1_raw]
    }

    pub fn set_from(&mut self, v: &[f64]) {
        self.beta0 = v[0];
        self.beta1 = v[1];
        self.gamma0_raw = v[2];
        self.gamma1_raw = v[3];
    }

    /// Effective noise scales.
    pub fn gammas(&self) -> (f64, f64) {
        (self.gamma0_raw * self.gamma0_raw, self.gamma1_raw * self.gamma1_raw)
    }

    /// The released value for one row given a standard-normal draw.
    pub fn forward(&self, x: f64, y: u8, noise: f64) -> f64 {
        let (g0, g1) = self.gammas();
        if y == 1 {
            x - self.beta1 + g1 * noise
        } else {
            x + self.beta0 + g0 * noise
        }
    }

    /// Gradient of `xhat` w.r.t. `(beta0, beta1, gamma0_raw, gamma1_raw)`.
    pub fn dxhat_dparams(&self, y: u8, noise: f64) -> [f64; 4] {
        if y == 1 {
            [0.0, -1.0, 0.0, 2.0 * self.gamma1_raw * noise]
        } else {
            [1.0, 0.0, 2.0 * self.gamma0_raw * noise, 0.0]
        }
    }

    /// Distortion of one released row and its parameter gradient. The
    /// displacement is `xhat - x`, so the squared distortion and its chain
    /// rule reuse [`Self::dxhat_dparams`].
    pub fn row_sq_distortion(&self, y: u8, noise: f64) -> (f64, [f64; 4]) {
        let (g0, g1) = self.gammas();
        let disp = if y == 1 { -self.beta1 + g1 * noise } else { self.beta0 + g0 * noise };
        let d = disp * disp;
        let dx = self.dxhat_dparams(y, noise);
        (d, dx.map(|v| 2.0 * disp * v))
    }

    /// Analytic expected squared distortion given the class-1 fraction of
    /// the dataset (expectation over the noise taken in closed form).
    pub fn expected_sq_distortion(&self, frac_y1: f64) -> f64 {
        let (g0, g1) = self.gammas();
        frac_y1 * (self.beta1 * self.beta1 + g1 * g1)
            + (1.0 - frac_y1) * (self.beta0 * self.beta0 + g0 * g0)
    }

    /// Export as a mechanism. Shifts are clamped at zero: transient small
    /// negative values can survive training, but the mechanism family is
    /// defined with nonnegative shifts.
    pub fn mechanism(&self) -> GaussMechanism {
        let (g0, g1) = self.gammas();
        GaussMechanism {
            beta0: self.beta0.max(0.0),
            beta1: self.beta1.max(0.0),
            gamma0: g0,
            gamma1: g1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn forward_matches_reparameterization() {
        let p = GaussPrivatizerParams {
            beta0: 0.5,
            beta1: 1.5,
            gamma0_raw: 0.4,
            gamma1_raw: 0.9,
        };
        assert_relative_eq!(p.forward(2.0, 0, 1.0), 2.0 + 0.5 + 0.16);
        assert_relative_eq!(p.forward(2.0, 1, -1.0), 2.0 - 1.5 - 0.81);
    }

    #[test]
    fn distortion_gradients_match_finite_differences() {
        let h = 1e-6;
        let p = GaussPrivatizerParams {
            beta0: 0.7,
            beta1: 1.2,
            gamma0_raw: 0.5,
            gamma1_raw: -0.8,
        };
        for y in [0u8, 1u8] {
            for noise in [-1.3, 0.2, 2.1] {
                let (_, grad) = p.row_sq_distortion(y, noise);
                for i in 0..4 {
                    let mut vp = p.as_vec();
                    vp[i] += h;
                    let mut pp = p.clone();
                    pp.set_from(&vp);
                    let mut vm = p.as_vec();
                    vm[i] -= h;
                    let mut pm = p.clone();
                    pm.set_from(&vm);
                    let num =
                        (pp.row_sq_distortion(y, noise).0 - pm.row_sq_distortion(y, noise).0)
                            / (2.0 * h);
                    assert_relative_eq!(num, grad[i], max_relative = 1e-5, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn exported_mechanism_clamps_negative_shifts() {
        let p = GaussPrivatizerParams {
            beta0: -1e-3,
            beta1: 2.0,
            gamma0_raw: -0.5,
            gamma1_raw: 0.3,
        };
        let m = p.mechanism();
        assert_eq!(m.beta0, 0.0);
        assert_relative_eq!(m.gamma0, 0.25);
        assert!(m.validate().is_ok());
    }
}
