//! Game-theoretically optimal binary mechanisms: the private-data dependent
//! linear program and the closed-form private-data independent solution.

use crate::error::{Error, Result};
use crate::mechanism::BinaryMechanism;
use crate::prob::JointBinary;
use crate::simplex::{solve_lp, LpConstraint, LpProblem, Relation};

/// Build the six-variable LP whose optimum is the best PDD flip mechanism
/// for the joint table under Hamming distortion budget `d`.
///
/// Variable order is `(s11, s01, s10, s00, t0, t1)`; the objective is
/// `min t0 + t1` where `t0`/`t1` bound the per-output-symbol adversary
/// masses, and the final row is the distortion budget.
pub fn build_pdd_lp(joint: &JointBinary, d: f64) -> Result<LpProblem> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::InvalidParameter(format!("distortion budget D = {d} must be >= 0")));
    }
    let p00 = joint.p(0, 0);
    let p01 = joint.p(0, 1);
    let p10 = joint.p(1, 0);
    let p11 = joint.p(1, 1);

    // Columns: s11 s01 s10 s00 t0 t1.
    let constraints = vec![
        // p11 (1 - s11) + p01 s01 <= t0
        LpConstraint {
            coeffs: vec![-p11, p01, 0.0, 0.0, -1.0, 0.0],
            relation: Relation::Le,
            rhs: -p11,
        },
        // p10 (1 - s10) + p00 s00 <= t0
        LpConstraint {
            coeffs: vec![0.0, 0.0, -p10, p00, -1.0, 0.0],
            relation: Relation::Le,
            rhs: -p10,
        },
        // p11 s11 + p01 (1 - s01) <= t1
        LpConstraint {
            coeffs: vec![p11, -p01, 0.0, 0.0, 0.0, -1.0],
            relation: Relation::Le,
            rhs: -p01,
        },
        // p10 s10 + p00 (1 - s00) <= t1
        LpConstraint {
            coeffs: vec![0.0, 0.0, p10, -p00, 0.0, -1.0],
            relation: Relation::Le,
            rhs: -p00,
        },
        // sum p_ij (1 - s_ij) <= D
        LpConstraint {
            coeffs: vec![-p11, -p01, -p10, -p00, 0.0, 0.0],
            relation: Relation::Le,
            rhs: d - 1.0,
        },
    ];
    Ok(LpProblem {
        objective: vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
        constraints,
        bounds: vec![(0.0, 1.0); 6],
    })
}

/// Solve the PDD LP and return the optimal mechanism with its MAP accuracy.
pub fn optimal_pdd(joint: &JointBinary, d: f64) -> Result<(BinaryMechanism, f64)> {
    let lp = build_pdd_lp(joint, d)?;
    let sol = solve_lp(&lp)?;
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    let mech = BinaryMechanism::Pdd {
        s11: clamp(sol.values[0]),
        s01: clamp(sol.values[1]),
        s10: clamp(sol.values[2]),
        s00: clamp(sol.values[3]),
    };
    Ok((mech, sol.objective))
}

/// The optimal PDI mechanisms form a line segment in `(s0, s1)`: every
/// point with `coeff_s0 * s0 + coeff_s1 * s1` in `[lo, hi]` (intersected
/// with the unit box) attains the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdiFamily {
    /// Coefficient of `s0`, equal to `1 - p`.
    pub coeff_s0: f64,
    /// Coefficient of `s1`, equal to `p`.
    pub coeff_s1: f64,
    pub lo: f64,
    pub hi: f64,
}

impl PdiFamily {
    pub fn contains(&self, s0: f64, s1: f64) -> bool {
        if !(0.0..=1.0).contains(&s0) || !(0.0..=1.0).contains(&s1) {
            return false;
        }
        let w = self.coeff_s0 * s0 + self.coeff_s1 * s1;
        w >= self.lo - 1e-12 && w <= self.hi + 1e-12
    }
}

impl std::fmt::Display for PdiFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:.6}*s0 + {:.6}*s1 in [{:.6}, {:.6}], s0, s1 in [0, 1]",
            self.coeff_s0, self.coeff_s1, self.lo, self.hi
        )
    }
}

/// Closed-form optimal PDI solution: the accuracy value, the optimal family,
/// and one concrete witness mechanism from the family.
///
/// Below the saturation threshold `D < min(p, 1-p)` the witness is the
/// symmetric point `s0 = s1 = 1 - D`. At and past saturation the witness is
/// the family member on the totally-mixing line `s0 + s1 = 1`, which
/// renders the release independent of the private bit (zero mutual
/// information) at the least distortion the family allows.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremOneSolution {
    pub accuracy: f64,
    pub family: PdiFamily,
    pub witness: BinaryMechanism,
}

/// Optimal PDI mechanism for the XOR source, solved in closed form.
///
/// Branches: `q = 1/2` makes the private bit independent of the data, so
/// any feasible mechanism attains accuracy 1/2. While `1 - D > max(p, 1-p)`
/// the optimum sits on the distortion boundary and decreases linearly in
/// `D`; past that point it saturates at the prior-guessing value. Boundary
/// ties resolve to the saturation branch (the two branches agree in value
/// there).
pub fn theorem1_pdi(p: f64, q: f64, d: f64) -> Result<TheoremOneSolution> {
    for (name, v) in [("p", p), ("q", q), ("D", d)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let coeff_s0 = 1.0 - p;
    let coeff_s1 = p;
    let eps = 1e-12;

    if (q - 0.5).abs() < eps {
        let lo = (1.0 - d).clamp(0.0, 1.0);
        let family = PdiFamily { coeff_s0, coeff_s1, lo, hi: 1.0 };
        let witness = symmetric_witness(lo);
        return Ok(TheoremOneSolution { accuracy: 0.5, family, witness });
    }

    let hi_prior = p.max(1.0 - p);
    let lo_prior = p.min(1.0 - p);
    if 1.0 - d > hi_prior + eps {
        // Linear branch: the whole budget is binding.
        let w = 1.0 - d;
        let accuracy = if q < 0.5 {
            (1.0 - 2.0 * q) * w + q
        } else {
            (2.0 * q - 1.0) * w + 1.0 - q
        };
        let family = PdiFamily { coeff_s0, coeff_s1, lo: w, hi: w };
        let witness = symmetric_witness(w);
        return Ok(TheoremOneSolution { accuracy, family, witness });
    }

    // Saturation branch.
    let accuracy = if (p >= 0.5 && q < 0.5) || (p <= 0.5 && q > 0.5) {
        p * (1.0 - q) + (1.0 - p) * q
    } else {
        p * q + (1.0 - p) * (1.0 - q)
    };
    let lo = lo_prior.max(1.0 - d);
    let family = PdiFamily { coeff_s0, coeff_s1, lo, hi: hi_prior };
    let witness = mixing_witness(p, lo);
    Ok(TheoremOneSolution { accuracy, family, witness })
}

fn symmetric_witness(w: f64) -> BinaryMechanism {
    let c = w.clamp(0.0, 1.0);
    BinaryMechanism::Pdi { s0: c, s1: c }
}

/// Family member on the line `s0 + s1 = 1` at constraint value `w`; the
/// released bit is then independent of the input, hence of the private bit.
fn mixing_witness(p: f64, w: f64) -> BinaryMechanism {
    if (p - 0.5).abs() < 1e-12 {
        return BinaryMechanism::Pdi { s0: 0.5, s1: 0.5 };
    }
    let s1 = ((w - (1.0 - p)) / (2.0 * p - 1.0)).clamp(0.0, 1.0);
    BinaryMechanism::Pdi { s0: 1.0 - s1, s1 }
}

/// Result of the exhaustive PDI grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdiBruteForce {
    pub accuracy: f64,
    pub s0: f64,
    pub s1: f64,
}

/// Exhaustive grid minimization of the MAP accuracy over feasible PDI
/// mechanisms, used as an independent oracle for [`theorem1_pdi`].
///
/// The joint probabilities of `(xhat, Y)` are expanded directly from the
/// Markov-chain factorization rather than going through the closed form
/// being checked. The returned accuracy is within `2 * step` of the true
/// optimum (the objective is 2-Lipschitz in `(s0, s1)`).
pub fn pdi_brute_force(p: f64, q: f64, d: f64, step: f64) -> Result<PdiBruteForce> {
    for (name, v) in [("p", p), ("q", q)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
        }
    }
    if !(0.0..=0.1).contains(&step) || step == 0.0 {
        return Err(Error::InvalidParameter(format!("step = {step} outside (0, 0.1]")));
    }
    if !d.is_finite() || d < 0.0 {
        return Err(Error::InvalidParameter(format!("D = {d} must be >= 0")));
    }

    let n = (1.0 / step).round() as usize;
    let grid = |i: usize| (i as f64 * step).min(1.0);
    let p11 = p * (1.0 - q);
    let p01 = (1.0 - p) * q;
    let p10 = p * q;
    let p00 = (1.0 - p) * (1.0 - q);

    let mut best = PdiBruteForce { accuracy: f64::INFINITY, s0: 0.0, s1: 0.0 };
    for i in 0..=n {
        let s0 = grid(i);
        for j in 0..=n {
            let s1 = grid(j);
            let distortion = (1.0 - s0) * (1.0 - p) + (1.0 - s1) * p;
            if distortion > d + 1e-12 {
                continue;
            }
            let y1_x0 = p11 * (1.0 - s1) + p01 * s0;
            let y0_x0 = p10 * (1.0 - s1) + p00 * s0;
            let y1_x1 = p11 * s1 + p01 * (1.0 - s0);
            let y0_x1 = p10 * s1 + p00 * (1.0 - s0);
            let acc = y1_x0.max(y0_x0) + y1_x1.max(y0_x1);
            if acc < best.accuracy {
                best = PdiBruteForce { accuracy: acc, s0, s1 };
            }
        }
    }
    if !best.accuracy.is_finite() {
        return Err(Error::InvalidParameter("no feasible grid point".into()));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{binary_map_accuracy, expected_hamming_distortion, mechanism_joint, BernoulliXorModel};
    use approx::assert_relative_eq;

    fn xor_joint(p: f64, q: f64) -> JointBinary {
        BernoulliXorModel::new(p, q).unwrap().joint()
    }

    #[test]
    fn lp_zero_budget_pins_identity() {
        let joint = xor_joint(0.5, 0.25);
        let (mech, obj) = optimal_pdd(&joint, 0.0).unwrap();
        assert_relative_eq!(obj, 0.75, epsilon = 1e-9);
        let out = mechanism_joint(&joint, &mech).unwrap();
        assert_relative_eq!(binary_map_accuracy(&out), 0.75, epsilon = 1e-9);
    }

    #[test]
    fn lp_quarter_budget_matches_grid_value() {
        // At D = 0.25 a PDD mechanism can already decorrelate the release:
        // s = (1, 1, 1, 1/3) spends exactly 0.25 and equalizes
        // P(xhat | Y=0) and P(xhat | Y=1), so the optimum is the prior
        // floor 0.5 (a step-0.01 grid oracle reports 0.5025). PDI needs
        // D = 0.5 for the same effect.
        let joint = xor_joint(0.5, 0.25);
        let (mech, obj) = optimal_pdd(&joint, 0.25).unwrap();
        assert_relative_eq!(obj, 0.5, epsilon = 1e-9);
        assert!(expected_hamming_distortion(&joint, &mech) <= 0.25 + 1e-9);
        let hand = BinaryMechanism::Pdd { s00: 1.0, s01: 1.0, s10: 1.0, s11: 1.0 / 3.0 };
        let out = mechanism_joint(&joint, &hand).unwrap();
        assert_relative_eq!(binary_map_accuracy(&out), 0.5, epsilon = 1e-12);
        assert_relative_eq!(expected_hamming_distortion(&joint, &hand), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn lp_half_budget_reaches_prior_floor() {
        let joint = xor_joint(0.5, 0.25);
        let (mech, obj) = optimal_pdd(&joint, 0.5).unwrap();
        assert_relative_eq!(obj, 0.5, epsilon = 1e-9);
        // The reported objective matches the mechanism re-evaluated exactly.
        let out = mechanism_joint(&joint, &mech).unwrap();
        assert_relative_eq!(binary_map_accuracy(&out), obj, epsilon = 1e-9);
    }

    #[test]
    fn lp_full_budget_never_binds_distortion() {
        // With D = 1 total flipping is allowed, so the optimum equals the
        // D = 0.5 saturation value on this symmetric source.
        let joint = xor_joint(0.5, 0.25);
        let (_, at_one) = optimal_pdd(&joint, 1.0).unwrap();
        let (_, at_sat) = optimal_pdd(&joint, 0.5).unwrap();
        assert_relative_eq!(at_one, at_sat, epsilon = 1e-9);
    }

    #[test]
    fn lp_degenerate_constant_private_bit() {
        // p01 = p11 = 0 means Y is constantly 0: accuracy 1 regardless of D.
        let joint = JointBinary::new(0.6, 0.0, 0.4, 0.0).unwrap();
        let (_, obj) = optimal_pdd(&joint, 0.3).unwrap();
        assert_relative_eq!(obj, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn lp_rejects_negative_budget() {
        let joint = xor_joint(0.5, 0.25);
        assert!(build_pdd_lp(&joint, -0.1).is_err());
    }

    #[test]
    fn theorem1_linear_branch() {
        let sol = theorem1_pdi(0.5, 0.25, 0.2).unwrap();
        assert_relative_eq!(sol.accuracy, 0.65, epsilon = 1e-12);
        let BinaryMechanism::Pdi { s0, s1 } = sol.witness else { panic!() };
        assert!(sol.family.contains(s0, s1));
        assert_relative_eq!(s0, 0.8, epsilon = 1e-12);
        assert_relative_eq!(s1, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn theorem1_independent_private_bit() {
        let sol = theorem1_pdi(0.5, 0.5, 0.3).unwrap();
        assert_relative_eq!(sol.accuracy, 0.5, epsilon = 1e-12);
        assert_relative_eq!(sol.family.lo, 0.7, epsilon = 1e-12);
        assert_relative_eq!(sol.family.hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn theorem1_saturation_branch() {
        let sol = theorem1_pdi(0.75, 0.25, 0.3).unwrap();
        assert_relative_eq!(sol.accuracy, 0.625, epsilon = 1e-12);
        let BinaryMechanism::Pdi { s0, s1 } = sol.witness else { panic!() };
        assert!(sol.family.contains(s0, s1));
        // The witness sits on the mixing line, so the release is
        // independent of the private bit.
        assert_relative_eq!(s0 + s1, 1.0, epsilon = 1e-12);
        let joint = xor_joint(0.75, 0.25);
        let out = mechanism_joint(&joint, &sol.witness).unwrap();
        assert!(crate::prob::mutual_information_nats(&out) < 1e-12);
        // And it respects the budget.
        assert!(crate::prob::expected_hamming_distortion(&joint, &sol.witness) <= 0.3 + 1e-12);
    }

    #[test]
    fn theorem1_matches_brute_force_spot_checks() {
        for (p, q, d) in [(0.5, 0.25, 0.2), (0.75, 0.25, 0.3), (0.3, 0.7, 0.15), (0.6, 0.9, 0.55)]
        {
            let sol = theorem1_pdi(p, q, d).unwrap();
            let bf = pdi_brute_force(p, q, d, 0.01).unwrap();
            assert!(
                (sol.accuracy - bf.accuracy).abs() <= 0.02,
                "({p}, {q}, {d}): closed {} vs grid {}",
                sol.accuracy,
                bf.accuracy
            );
        }
    }

    #[test]
    fn brute_force_flat_when_private_bit_independent() {
        let bf = pdi_brute_force(0.5, 0.5, 0.4, 0.02).unwrap();
        assert_relative_eq!(bf.accuracy, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn brute_force_full_budget_matches_saturation() {
        let bf = pdi_brute_force(0.75, 0.25, 1.0, 0.01).unwrap();
        let sol = theorem1_pdi(0.75, 0.25, 1.0).unwrap();
        assert!((bf.accuracy - sol.accuracy).abs() <= 0.02);
    }

    #[test]
    fn brute_force_rejects_bad_step() {
        assert!(pdi_brute_force(0.5, 0.25, 0.2, 0.0).is_err());
        assert!(pdi_brute_force(0.5, 0.25, 0.2, 0.2).is_err());
    }

    #[test]
    fn pdd_dominates_pdi() {
        for d in [0.0, 0.1, 0.2, 0.3, 0.5] {
            for (p, q) in [(0.5, 0.25), (0.75, 0.25), (0.4, 0.8)] {
                let joint = xor_joint(p, q);
                let (_, lp_obj) = optimal_pdd(&joint, d).unwrap();
                let pdi = theorem1_pdi(p, q, d).unwrap();
                assert!(
                    lp_obj <= pdi.accuracy + 1e-9,
                    "PDD {lp_obj} should not exceed PDI {} at (p={p}, q={q}, D={d})",
                    pdi.accuracy
                );
            }
        }
    }
}
