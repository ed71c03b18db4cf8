//! Privatization mechanism types shared by the solvers, the trainer, and
//! the file formats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Randomized flip mechanism for binary data, parameterized by the
/// stay-probabilities `s`.
///
/// For the private-data dependent (`Pdd`) kind, `sXY` is the probability of
/// releasing `xhat = x` when `(X, Y) = (x, y)`; the first index is the value
/// of `X`, the second the value of `Y`. The private-data independent (`Pdi`)
/// kind may not look at `Y`, so it keeps only `s0 = P(xhat=0 | X=0)` and
/// `s1 = P(xhat=1 | X=1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BinaryMechanism {
    Pdd { s00: f64, s01: f64, s10: f64, s11: f64 },
    Pdi { s0: f64, s1: f64 },
}

impl BinaryMechanism {
    /// Identity release: every stay-probability is one.
    pub fn identity_pdd() -> Self {
        BinaryMechanism::Pdd { s00: 1.0, s01: 1.0, s10: 1.0, s11: 1.0 }
    }

    pub fn identity_pdi() -> Self {
        BinaryMechanism::Pdi { s0: 1.0, s1: 1.0 }
    }

    /// Stay-probability for the cell `(x, y)`. PDI mechanisms ignore `y`.
    pub fn stay(&self, x: u8, y: u8) -> f64 {
        match *self {
            BinaryMechanism::Pdd { s00, s01, s10, s11 } => match (x, y) {
                (0, 0) => s00,
                (0, 1) => s01,
                (1, 0) => s10,
                (1, 1) => s11,
                _ => panic!("binary cell out of range: ({x}, {y})"),
            },
            BinaryMechanism::Pdi { s0, s1 } => match x {
                0 => s0,
                1 => s1,
                _ => panic!("binary value out of range: {x}"),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let entries: &[f64] = match self {
            BinaryMechanism::Pdd { s00, s01, s10, s11 } => &[*s00, *s01, *s10, *s11],
            BinaryMechanism::Pdi { s0, s1 } => &[*s0, *s1],
        };
        for (i, s) in entries.iter().enumerate() {
            if !s.is_finite() || *s < 0.0 || *s > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "stay-probability #{i} = {s} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Additive Gaussian mechanism `xhat = x + (1-y)*beta0 - y*beta1
/// + ((1-y)*gamma0 + y*gamma1) * n` with `n` standard normal.
///
/// Shifts move the two class-conditional distributions toward each other;
/// the noise scales fatten them. All four parameters are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussMechanism {
    pub beta0: f64,
    pub beta1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
}

impl GaussMechanism {
    pub fn new(beta0: f64, beta1: f64, gamma0: f64, gamma1: f64) -> Result<Self> {
        let m = GaussMechanism { beta0, beta1, gamma0, gamma1 };
        m.validate()?;
        Ok(m)
    }

    pub fn identity() -> Self {
        GaussMechanism { beta0: 0.0, beta1: 0.0, gamma0: 0.0, gamma1: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beta0", self.beta0),
            ("beta1", self.beta1),
            ("gamma0", self.gamma0),
            ("gamma1", self.gamma1),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }

    /// Expected squared distortion `E||xhat - x||^2` under class prior
    /// `P(Y=1) = ptilde`.
    pub fn expected_sq_distortion(&self, ptilde: f64) -> f64 {
        ptilde * (self.beta1 * self.beta1 + self.gamma1 * self.gamma1)
            + (1.0 - ptilde) * (self.beta0 * self.beta0 + self.gamma0 * self.gamma0)
    }
}

/// Serialized mechanism with an explicit `kind` discriminator; this is the
/// on-disk JSON format used by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mechanism {
    Pdd { s00: f64, s01: f64, s10: f64, s11: f64 },
    Pdi { s0: f64, s1: f64 },
    Gauss { beta0: f64, beta1: f64, gamma0: f64, gamma1: f64 },
}

impl Mechanism {
    pub fn validate(&self) -> Result<()> {
        match self.clone() {
            Mechanism::Pdd { s00, s01, s10, s11 } => {
                BinaryMechanism::Pdd { s00, s01, s10, s11 }.validate()
            }
            Mechanism::Pdi { s0, s1 } => BinaryMechanism::Pdi { s0, s1 }.validate(),
            Mechanism::Gauss { beta0, beta1, gamma0, gamma1 } => {
                GaussMechanism { beta0, beta1, gamma0, gamma1 }.validate()
            }
        }
    }

    pub fn as_binary(&self) -> Option<BinaryMechanism> {
        match *self {
            Mechanism::Pdd { s00, s01, s10, s11 } => {
                Some(BinaryMechanism::Pdd { s00, s01, s10, s11 })
            }
            Mechanism::Pdi { s0, s1 } => Some(BinaryMechanism::Pdi { s0, s1 }),
            Mechanism::Gauss { .. } => None,
        }
    }

    pub fn as_gauss(&self) -> Option<GaussMechanism> {
        match *self {
            Mechanism::Gauss { beta0, beta1, gamma0, gamma1 } => {
                Some(GaussMechanism { beta0, beta1, gamma0, gamma1 })
            }
            _ => None,
        }
    }
}

impl From<BinaryMechanism> for Mechanism {
    fn from(m: BinaryMechanism) -> Self {
        match m {
            BinaryMechanism::Pdd { s00, s01, s10, s11 } => Mechanism::Pdd { s00, s01, s10, s11 },
            BinaryMechanism::Pdi { s0, s1 } => Mechanism::Pdi { s0, s1 },
        }
    }
}

impl From<GaussMechanism> for Mechanism {
    fn from(m: GaussMechanism) -> Self {
        Mechanism::Gauss {
            beta0: m.beta0,
            beta1: m.beta1,
            gamma0: m.gamma0,
            gamma1: m.gamma1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mechanism_json_round_trip_carries_kind() {
        let m = Mechanism::Pdi { s0: 0.9, s1: 0.7 };
        let js = serde_json::to_string(&m).unwrap();
        assert!(js.contains("\"kind\":\"pdi\""));
        let back: Mechanism = serde_json::from_str(&js).unwrap();
        assert_eq!(m, back);

        let g = Mechanism::Gauss { beta0: 2.8284, beta1: 2.8284, gamma0: 0.0, gamma1: 0.0 };
        let js = serde_json::to_string(&g).unwrap();
        assert!(js.contains("\"kind\":\"gauss\""));
        assert_eq!(g, serde_json::from_str::<Mechanism>(&js).unwrap());
    }

    #[test]
    fn out_of_range_stay_probability_rejected() {
        assert!(BinaryMechanism::Pdi { s0: 1.2, s1: 0.5 }.validate().is_err());
        assert!(BinaryMechanism::Pdi { s0: 1.0, s1: 0.0 }.validate().is_ok());
        assert!(GaussMechanism::new(-0.1, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn expected_sq_distortion_matches_hand_value() {
        let m = GaussMechanism::new(2.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(m.expected_sq_distortion(0.5), 4.0);
        let m = GaussMechanism::new(1.0, 2.0, 3.0, 4.0).unwrap();
        // 0.75*(4+16) + 0.25*(1+9)
        assert!((m.expected_sq_distortion(0.75) - 17.5).abs() < 1e-12);
    }
}
