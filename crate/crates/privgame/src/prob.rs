//! Exact probability computations: the Gaussian tail function, 2x2 joint
//! tables, MAP adversary accuracy, and discrete mutual information.
//!
//! Everything here is a pure function of its inputs, so all of it is safe to
//! call concurrently.

use crate::error::{Error, Result};
use crate::mechanism::BinaryMechanism;

/// Absolute tolerance accepted on probability inputs. Sums within this
/// tolerance of one are renormalized; larger deviations are rejected.
pub const PROB_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Gaussian tail
// ---------------------------------------------------------------------------

// Rational minimax approximations for erf/erfc due to W. J. Cody (1969),
// accurate to ~1e-16 relative error. Table-free and portable.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERFC_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERFC_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERFC_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERFC_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const ONE_OVER_SQRT_PI: f64 = 5.64189583547756287e-1;

/// erf(x) for |x| <= 0.46875.
fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// exp(-y^2) evaluated with the argument split to preserve relative accuracy
/// of the product in the erfc tail.
fn exp_neg_sq(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Complementary error function, |relative error| < 1e-14 on the real line.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    let result = if y <= 0.46875 {
        return 1.0 - erf_small(x);
    } else if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        exp_neg_sq(y) * (num + ERFC_C[7]) / (den + ERFC_D[7])
    } else if y < 26.6 {
        let z = 1.0 / (y * y);
        let mut num = ERFC_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERFC_P[i]) * z;
            den = (den + ERFC_Q[i]) * z;
        }
        let tail = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        exp_neg_sq(y) * (ONE_OVER_SQRT_PI - tail) / y
    } else {
        // exp(-y^2) underflows past here.
        0.0
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// Upper tail of the standard normal: `Q(x) = P(N(0,1) > x)`.
///
/// Computed through the identity `Q(x) = erfc(x / sqrt(2)) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    q_function(-x)
}

// ---------------------------------------------------------------------------
// Binary model
// ---------------------------------------------------------------------------

/// Validated 2x2 joint probability table with `p(i, j) = P(first = i,
/// second = j)`. Entries are clamped/renormalized within [`PROB_TOL`] at
/// construction and immutable afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointBinary {
    p00: f64,
    p01: f64,
    p10: f64,
    p11: f64,
}

impl JointBinary {
    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        let mut e = [p00, p01, p10, p11];
        for (i, v) in e.iter_mut().enumerate() {
            if !v.is_finite() || *v < -PROB_TOL || *v > 1.0 + PROB_TOL {
                return Err(Error::InvalidParameter(format!(
                    "joint entry #{i} = {v} outside [0, 1]"
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let sum: f64 = e.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidParameter(format!(
                "joint entries sum to {sum}, expected 1"
            )));
        }
        Ok(JointBinary {
            p00: e[0] / sum,
            p01: e[1] / sum,
            p10: e[2] / sum,
            p11: e[3] / sum,
        })
    }

    /// `P(first = i, second = j)`.
    pub fn p(&self, i: u8, j: u8) -> f64 {
        match (i, j) {
            (0, 0) => self.p00,
            (0, 1) => self.p01,
            (1, 0) => self.p10,
            (1, 1) => self.p11,
            _ => panic!("binary index out of range: ({i}, {j})"),
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    /// `P(first = 1)`.
    pub fn first_marginal(&self) -> f64 {
        self.p10 + self.p11
    }

    /// `P(second = 1)`.
    pub fn second_marginal(&self) -> f64 {
        self.p01 + self.p11
    }

    /// Swap the labels of the first coordinate.
    pub fn relabel_first(&self) -> Self {
        JointBinary { p00: self.p10, p01: self.p11, p10: self.p00, p11: self.p01 }
    }

    /// Product table with the same marginals (first independent of second).
    pub fn product_of_marginals(&self) -> Self {
        let f1 = self.first_marginal();
        let s1 = self.second_marginal();
        JointBinary {
            p00: (1.0 - f1) * (1.0 - s1),
            p01: (1.0 - f1) * s1,
            p10: f1 * (1.0 - s1),
            p11: f1 * s1,
        }
    }
}

/// Binary source `X ~ Bernoulli(p)` with private bit `Y = X ^ N`,
/// `N ~ Bernoulli(q)` independent of `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliXorModel {
    pub p: f64,
    pub q: f64,
}

impl BernoulliXorModel {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(BernoulliXorModel { p, q })
    }

    /// Induced joint table of `(X, Y)`.
    pub fn joint(&self) -> JointBinary {
        let (p, q) = (self.p, self.q);
        JointBinary {
            p00: (1.0 - p) * (1.0 - q),
            p01: (1.0 - p) * q,
            p10: p * q,
            p11: p * (1.0 - q),
        }
    }
}

/// MAP adversary accuracy for a joint table of `(xhat, Y)`: the sum over
/// both output symbols of the larger of the two per-symbol joint masses.
pub fn binary_map_accuracy(joint_hat: &JointBinary) -> f64 {
    joint_hat.p00.max(joint_hat.p01) + joint_hat.p10.max(joint_hat.p11)
}

/// Push a joint table of `(X, Y)` through a flip mechanism, producing the
/// joint table of `(xhat, Y)`.
pub fn mechanism_joint(joint: &JointBinary, mech: &BinaryMechanism) -> Result<JointBinary> {
    mech.validate()?;
    let mut out = [0.0f64; 4];
    for j in 0..2u8 {
        // P(xhat = 0, Y = j) = p0j * s0j + p1j * (1 - s1j), and complement.
        let stay0 = mech.stay(0, j);
        let stay1 = mech.stay(1, j);
        let p0 = joint.p(0, j);
        let p1 = joint.p(1, j);
        out[j as usize] = p0 * stay0 + p1 * (1.0 - stay1);
        out[2 + j as usize] = p0 * (1.0 - stay0) + p1 * stay1;
    }
    JointBinary::new(out[0], out[1], out[2], out[3])
}

/// Expected Hamming distortion `P(xhat != X)` of a mechanism applied to a
/// joint table of `(X, Y)`.
pub fn expected_hamming_distortion(joint: &JointBinary, mech: &BinaryMechanism) -> f64 {
    let mut d = 0.0;
    for x in 0..2u8 {
        for y in 0..2u8 {
            d += joint.p(x, y) * (1.0 - mech.stay(x, y));
        }
    }
    d
}

/// Mutual information of the two coordinates of a 2x2 joint table, in nats.
/// The convention `0 * ln 0 = 0` applies.
pub fn mutual_information_nats(joint_hat: &JointBinary) -> f64 {
    let f1 = joint_hat.first_marginal();
    let s1 = joint_hat.second_marginal();
    let marg_first = [1.0 - f1, f1];
    let marg_second = [1.0 - s1, s1];
    let mut mi = 0.0;
    for i in 0..2u8 {
        for j in 0..2u8 {
            let pij = joint_hat.p(i, j);
            if pij > 0.0 {
                let prod = marg_first[i as usize] * marg_second[j as usize];
                mi += pij * (pij / prod).ln();
            }
        }
    }
    mi.max(0.0)
}

// ---------------------------------------------------------------------------
// Gaussian model
// ---------------------------------------------------------------------------

/// Two-class Gaussian mixture source: `P(Y=1) = ptilde`,
/// `X | Y=0 ~ N(-mu, var0)`, `X | Y=1 ~ N(+mu, var1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussMixture {
    pub ptilde: f64,
    pub mu: f64,
    pub var0: f64,
    pub var1: f64,
}

impl GaussMixture {
    pub fn new(ptilde: f64, mu: f64, var0: f64, var1: f64) -> Result<Self> {
        if !ptilde.is_finite() || ptilde <= 0.0 || ptilde >= 1.0 {
            return Err(Error::InvalidParameter(format!("ptilde = {ptilde} outside (0, 1)")));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu = {mu} must be finite")));
        }
        for (name, v) in [("var0", var0), ("var1", var1)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(GaussMixture { ptilde, mu, var0, var1 })
    }

    pub fn equal_variances(&self) -> bool {
        (self.var0 - self.var1).abs() < 1e-12 * self.var0.max(self.var1)
    }

    /// The hypothesis-testing pair for the raw (unprivatized) source.
    pub fn raw_pair(&self) -> GaussPair {
        GaussPair {
            prior1: self.ptilde,
            mean0: -self.mu,
            mean1: self.mu,
            var0: self.var0,
            var1: self.var1,
        }
    }
}

/// A generic two-class Gaussian hypothesis-testing instance, e.g. the
/// post-mechanism distribution pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussPair {
    pub prior1: f64,
    pub mean0: f64,
    pub mean1: f64,
    pub var0: f64,
    pub var1: f64,
}

impl GaussPair {
    pub fn new(prior1: f64, mean0: f64, mean1: f64, var0: f64, var1: f64) -> Result<Self> {
        if !prior1.is_finite() || prior1 <= 0.0 || prior1 >= 1.0 {
            return Err(Error::InvalidParameter(format!("prior1 = {prior1} outside (0, 1)")));
        }
        for (name, v) in [("mean0", mean0), ("mean1", mean1)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be finite")));
            }
        }
        for (name, v) in [("var0", var0), ("var1", var1)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(GaussPair { prior1, mean0, mean1, var0, var1 })
    }
}

/// MAP detection probability for two equal-variance Gaussians separated by
/// `alpha` standard deviations, with class prior `P(Y=1) = ptilde`.
///
/// For `alpha <= 0` (no separation, or the shift mechanism has crossed the
/// means) the adversary can only guess the prior, so the limit value
/// `max(ptilde, 1 - ptilde)` is returned. The same limit is used below
/// `alpha < 1e-12` where the `1/alpha` term is numerically meaningless.
pub fn gauss_map_accuracy_closed(alpha: f64, ptilde: f64) -> f64 {
    debug_assert!(ptilde > 0.0 && ptilde < 1.0, "ptilde must lie in (0, 1)");
    if alpha < 1e-12 {
        return ptilde.max(1.0 - ptilde);
    }
    let log_ratio = ((1.0 - ptilde) / ptilde).ln();
    ptilde * q_function(-alpha / 2.0 + log_ratio / alpha)
        + (1.0 - ptilde) * q_function(-alpha / 2.0 - log_ratio / alpha)
}

/// Exact MAP accuracy `int max(prior1 * N(x; mean1, var1), (1 - prior1) *
/// N(x; mean0, var0)) dx` for an arbitrary two-Gaussian instance.
///
/// The decision boundary of the log-likelihood ratio is linear when the
/// variances agree (routed through the closed form) and quadratic otherwise;
/// the integral is then a sum of prior-weighted Gaussian CDF masses over the
/// correct-decision regions.
pub fn gauss_map_accuracy_general(pair: &GaussPair) -> f64 {
    let GaussPair { prior1, mean0, mean1, var0, var1 } = *pair;
    let prior0 = 1.0 - prior1;

    if (var0 - var1).abs() < 1e-12 * var0.max(var1) {
        let sigma = var0.sqrt();
        let alpha = (mean1 - mean0).abs() / sigma;
        return gauss_map_accuracy_closed(alpha, prior1);
    }

    // Log-likelihood difference f(x) = ln(prior1 N1(x)) - ln(prior0 N0(x))
    // = a x^2 + b x + c; class 1 is decided where f > 0.
    let a = 0.5 / var0 - 0.5 / var1;
    let b = mean1 / var1 - mean0 / var0;
    let c = (prior1 / prior0).ln() + 0.5 * (var0 / var1).ln() + mean0 * mean0 / (2.0 * var0)
        - mean1 * mean1 / (2.0 * var1);

    let sd0 = var0.sqrt();
    let sd1 = var1.sqrt();
    let cdf0 = |x: f64| normal_cdf((x - mean0) / sd0);
    let cdf1 = |x: f64| normal_cdf((x - mean1) / sd1);

    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        // f has constant sign, the sign of the leading coefficient.
        return if a > 0.0 { prior1 } else { prior0 };
    }
    // Numerically stable quadratic roots.
    let sq = disc.sqrt();
    let qq = -0.5 * (b + b.signum() * sq);
    let (mut r1, mut r2) = if b == 0.0 {
        let r = (sq / (2.0 * a)).abs();
        (-r, r)
    } else {
        (qq / a, c / qq)
    };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }

    if a > 0.0 {
        // Class 1 outside (r1, r2).
        prior1 * (cdf1(r1) + 1.0 - cdf1(r2)) + prior0 * (cdf0(r2) - cdf0(r1))
    } else {
        // Class 1 inside (r1, r2).
        prior1 * (cdf1(r2) - cdf1(r1)) + prior0 * (cdf0(r1) + 1.0 - cdf0(r2))
    }
}
