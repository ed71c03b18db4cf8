//! Cross-checks of the closed-form and LP routes against independent
//! numeric oracles (quadrature and exhaustive grids).

mod support;

use privgame::binary::{optimal_pdd, pdi_brute_force, theorem1_pdi};
use privgame::prob::{
    gauss_map_accuracy_closed, gauss_map_accuracy_general, q_function, GaussPair, JointBinary,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{map_accuracy_quadrature, pdd_grid_oracle, q_quadrature};

#[test]
fn q_function_matches_tail_quadrature() {
    for i in 0..=32 {
        let x = -8.0 + i as f64 * 0.5;
        let q = q_function(x);
        let oracle = q_quadrature(x);
        assert!(
            (q - oracle).abs() < 1e-12,
            "Q({x}) = {q} vs quadrature {oracle}"
        );
    }
    // The spec-level reference point.
    assert!((q_function(1.0) - 0.158_655_25).abs() < 1e-7);
}

#[test]
fn general_map_accuracy_matches_quadrature_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(271828);
    for _ in 0..60 {
        let pair = GaussPair::new(
            rng.gen_range(0.05..0.95),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.1..9.0),
            rng.gen_range(0.1..9.0),
        )
        .unwrap();
        let exact = gauss_map_accuracy_general(&pair);
        let oracle =
            map_accuracy_quadrature(pair.prior1, pair.mean0, pair.mean1, pair.var0, pair.var1);
        assert!(
            (exact - oracle).abs() < 1e-6,
            "pair {pair:?}: exact {exact} vs quadrature {oracle}"
        );
    }
}

#[test]
fn general_map_accuracy_equal_variance_reduces_to_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(31415);
    for _ in 0..200 {
        let var = rng.gen_range(0.1..9.0);
        let mean0 = rng.gen_range(-5.0..5.0);
        let mean1 = rng.gen_range(-5.0..5.0);
        let prior1 = rng.gen_range(0.05..0.95);
        let pair = GaussPair::new(prior1, mean0, mean1, var, var).unwrap();
        let alpha = (mean1 - mean0).abs() / var.sqrt();
        let closed = gauss_map_accuracy_closed(alpha, prior1);
        let general = gauss_map_accuracy_general(&pair);
        assert!(
            (closed - general).abs() < 1e-9,
            "closed {closed} vs general {general}"
        );
    }
}

#[test]
fn unequal_variance_spot_value_from_quadrature() {
    // prior .5, N(-3, 4) vs N(3, 1): the independent quadrature oracle
    // fixes this value near 0.97866.
    let pair = GaussPair::new(0.5, -3.0, 3.0, 4.0, 1.0).unwrap();
    let oracle = map_accuracy_quadrature(0.5, -3.0, 3.0, 4.0, 1.0);
    assert!((oracle - 0.97866).abs() < 5e-5, "oracle moved: {oracle}");
    assert!((gauss_map_accuracy_general(&pair) - oracle).abs() < 1e-9);
}

#[test]
fn theorem1_agrees_with_grid_oracle_on_coarse_lattice() {
    // Full-density lattice agreement is the acceptance suite's job; this
    // covers every branch combination at a coarser lattice.
    for pi in 1..10 {
        let p = pi as f64 * 0.1;
        for qi in 1..10 {
            let q = qi as f64 * 0.1;
            for di in (1..10).step_by(2) {
                let d = di as f64 * 0.1;
                let closed = theorem1_pdi(p, q, d).unwrap().accuracy;
                let grid = pdi_brute_force(p, q, d, 0.01).unwrap().accuracy;
                assert!(
                    (closed - grid).abs() <= 0.02,
                    "(p={p}, q={q}, D={d}): closed {closed} vs grid {grid}"
                );
            }
        }
    }
}

#[test]
fn lp_agrees_with_pruned_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for _ in 0..6 {
        let raw: [f64; 4] = std::array::from_fn(|_| -f64::ln(rng.gen_range(1e-9..1.0)));
        let total: f64 = raw.iter().sum();
        let [p00, p01, p10, p11] = raw.map(|v| v / total);
        let joint = JointBinary::new(p00, p01, p10, p11).unwrap();
        for d in [0.0, 0.1, 0.25] {
            let (_, lp) = optimal_pdd(&joint, d).unwrap();
            let grid = pdd_grid_oracle(p00, p01, p10, p11, d, 0.01);
            assert!(
                (lp - grid).abs() <= 0.02 && lp <= grid + 1e-9,
                "joint ({p00:.3},{p01:.3},{p10:.3},{p11:.3}) D={d}: lp {lp} vs grid {grid}"
            );
        }
    }
}
