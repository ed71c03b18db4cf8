//! Optimal Gaussian noise mechanisms: closed forms for the
//! private-data-independent and pure-shift schemes, a one-dimensional
//! search for the shift-plus-common-noise scheme, and the full
//! three-parameter cube search over the distortion boundary.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mechanism::GaussMechanism;
use crate::prob::{
    gauss_map_accuracy_closed, gauss_map_accuracy_general, GaussMixture, GaussPair,
};

/// Coordinates of the rational boundary parameterization: every point of
/// `[0,1]^3` maps to a mechanism lying exactly on the distortion boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubePoint {
    pub eps: f64,
    pub w0: f64,
    pub w1: f64,
}

impl CubePoint {
    pub fn new(eps: f64, w0: f64, w1: f64) -> Result<Self> {
        for (name, v) in [("eps", eps), ("w0", w0), ("w1", w1)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(CubePoint { eps, w0, w1 })
    }
}

/// Map a cube point to its mechanism on the distortion boundary
/// `ptilde (beta1^2 + gamma1^2) + (1 - ptilde)(beta0^2 + gamma0^2) = D`.
///
/// `eps` splits the budget between the two classes along an ellipse;
/// `w0`/`w1` split each class's share between shift and noise along a
/// circle, both through the rational parameterization `t -> ((1-t^2),
/// 2t)/(1+t^2)`.
pub fn cube_to_mechanism(point: &CubePoint, ptilde: f64, d: f64) -> GaussMechanism {
    debug_assert!(ptilde > 0.0 && ptilde < 1.0);
    debug_assert!(d >= 0.0);
    let e = point.eps;
    let e0 = 2.0 * (d / (1.0 - ptilde)).sqrt() * e / (1.0 + e * e);
    let e1 = (d / ptilde).sqrt() * (1.0 - e * e) / (1.0 + e * e);
    let circle = |radius: f64, w: f64| {
        let den = 1.0 + w * w;
        (radius * (1.0 - w * w) / den, radius * 2.0 * w / den)
    };
    let (beta0, gamma0) = circle(e0, point.w0);
    let (beta1, gamma1) = circle(e1, point.w1);
    GaussMechanism { beta0, beta1, gamma0, gamma1 }
}

/// The post-mechanism hypothesis-testing pair: class 0 becomes
/// `N(-mu + beta0, var0 + gamma0^2)` and class 1 becomes
/// `N(mu - beta1, var1 + gamma1^2)`.
pub fn post_mechanism_pair(model: &GaussMixture, mech: &GaussMechanism) -> GaussPair {
    GaussPair {
        prior1: model.ptilde,
        mean0: -model.mu + mech.beta0,
        mean1: model.mu - mech.beta1,
        var0: model.var0 + mech.gamma0 * mech.gamma0,
        var1: model.var1 + mech.gamma1 * mech.gamma1,
    }
}

fn require_equal_variances(model: &GaussMixture, what: &str) -> Result<f64> {
    if !model.equal_variances() {
        return Err(Error::InvalidParameter(format!(
            "{what} requires equal class variances, got var0 = {}, var1 = {}",
            model.var0, model.var1
        )));
    }
    Ok(model.var0)
}

fn validate_budget(d: f64) -> Result<()> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::InvalidParameter(format!("distortion budget D = {d} must be >= 0")));
    }
    Ok(())
}

/// Optimal private-data-independent noise-adding scheme on an
/// equal-variance model: no shift, noise scale `sqrt(D)`.
pub fn theorem2_pdi(model: &GaussMixture, d: f64) -> Result<(GaussMechanism, f64)> {
    validate_budget(d)?;
    let var = require_equal_variances(model, "the PDI scheme")?;
    let gamma = d.sqrt();
    let mech = GaussMechanism { beta0: 0.0, beta1: 0.0, gamma0: gamma, gamma1: gamma };
    let alpha = 2.0 * model.mu / (d + var).sqrt();
    Ok((mech, gauss_map_accuracy_closed(alpha, model.ptilde)))
}

/// Optimal pure-shift scheme on an equal-variance model. The class with
/// the smaller prior absorbs proportionally more of the shift budget.
pub fn theorem3_pdd_shift(model: &GaussMixture, d: f64) -> Result<(GaussMechanism, f64)> {
    validate_budget(d)?;
    let var = require_equal_variances(model, "the shift scheme")?;
    let pt = model.ptilde;
    let beta0 = (pt * d / (1.0 - pt)).sqrt();
    let beta1 = ((1.0 - pt) * d / pt).sqrt();
    let mech = GaussMechanism { beta0, beta1, gamma0: 0.0, gamma1: 0.0 };
    let alpha = (2.0 * model.mu - beta0 - beta1) / var.sqrt();
    Ok((mech, gauss_map_accuracy_closed(alpha, pt)))
}

/// Shift-plus-common-noise scheme on an equal-variance model.
///
/// The objective depends on the shifts only through their sum, and for any
/// fixed shift budget the optimal split is the pure-shift allocation, so
/// the search reduces to one dimension: the fraction `t` of the budget
/// spent on shifting. The reduced objective `alpha(t)` is non-convex, so a
/// global grid with one local refinement stage is used instead of a local
/// solver.
pub fn theorem4_shift_plus_noise(
    model: &GaussMixture,
    d: f64,
    grid_n: usize,
) -> Result<(GaussMechanism, f64)> {
    validate_budget(d)?;
    let var = require_equal_variances(model, "the shift-plus-noise scheme")?;
    if grid_n < 2 {
        return Err(Error::InvalidParameter(format!("grid_n = {grid_n} must be >= 2")));
    }
    let pt = model.ptilde;
    let alpha_of = |t: f64| {
        let shift_sum = (t * d).sqrt() / (pt * (1.0 - pt)).sqrt();
        (2.0 * model.mu - shift_sum) / ((1.0 - t) * d + var).sqrt()
    };

    let min_on = |lo: f64, hi: f64| -> (f64, f64) {
        let mut best_t = lo;
        let mut best_a = f64::INFINITY;
        for i in 0..grid_n {
            let t = lo + (hi - lo) * i as f64 / (grid_n - 1) as f64;
            let a = alpha_of(t);
            if a < best_a {
                best_a = a;
                best_t = t;
            }
        }
        (best_t, best_a)
    };

    let (coarse_t, _) = min_on(0.0, 1.0);
    let step = 1.0 / (grid_n - 1) as f64;
    let (t, alpha) = min_on((coarse_t - step).max(0.0), (coarse_t + step).min(1.0));

    let shift_budget = t * d;
    let mech = GaussMechanism {
        beta0: (pt * shift_budget / (1.0 - pt)).sqrt(),
        beta1: ((1.0 - pt) * shift_budget / pt).sqrt(),
        gamma0: ((1.0 - t) * d).sqrt(),
        gamma1: ((1.0 - t) * d).sqrt(),
    };
    Ok((mech, gauss_map_accuracy_closed(alpha, pt)))
}

/// Full mechanism synthesis: minimize the exact MAP accuracy over the
/// distortion boundary by searching the `(eps, w0, w1)` cube on a
/// `grid_n^3` lattice, then refining once around the best coarse point.
///
/// Handles unequal class variances, for which no closed form exists.
/// Lattice evaluations run in parallel; the reduction takes the minimum
/// with ties broken by lexicographic point order, so the result does not
/// depend on scheduling.
pub fn pdd_full_grid_search(
    model: &GaussMixture,
    d: f64,
    grid_n: usize,
) -> Result<(GaussMechanism, f64)> {
    validate_budget(d)?;
    if grid_n < 2 {
        return Err(Error::InvalidParameter(format!("grid_n = {grid_n} must be >= 2")));
    }
    if d == 0.0 {
        let mech = GaussMechanism::identity();
        let acc = gauss_map_accuracy_general(&model.raw_pair());
        return Ok((mech, acc));
    }

    let search = |lo: [f64; 3], hi: [f64; 3]| -> (usize, f64) {
        let coord = |axis: usize, i: usize| {
            lo[axis] + (hi[axis] - lo[axis]) * i as f64 / (grid_n - 1) as f64
        };
        (0..grid_n * grid_n * grid_n)
            .into_par_iter()
            .map(|idx| {
                let (i, rem) = (idx / (grid_n * grid_n), idx % (grid_n * grid_n));
                let (j, k) = (rem / grid_n, rem % grid_n);
                let point =
                    CubePoint { eps: coord(0, i), w0: coord(1, j), w1: coord(2, k) };
                let mech = cube_to_mechanism(&point, model.ptilde, d);
                let acc = gauss_map_accuracy_general(&post_mechanism_pair(model, &mech));
                (idx, acc)
            })
            .reduce(
                || (usize::MAX, f64::INFINITY),
                |a, b| match b.1.total_cmp(&a.1) {
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Equal if b.0 < a.0 => b,
                    _ => a,
                },
            )
    };

    let unit_lo = [0.0; 3];
    let unit_hi = [1.0; 3];
    let (best_idx, _) = search(unit_lo, unit_hi);
    let decode = |idx: usize, lo: [f64; 3], hi: [f64; 3]| {
        let (i, rem) = (idx / (grid_n * grid_n), idx % (grid_n * grid_n));
        let (j, k) = (rem / grid_n, rem % grid_n);
        [
            lo[0] + (hi[0] - lo[0]) * i as f64 / (grid_n - 1) as f64,
            lo[1] + (hi[1] - lo[1]) * j as f64 / (grid_n - 1) as f64,
            lo[2] + (hi[2] - lo[2]) * k as f64 / (grid_n - 1) as f64,
        ]
    };
    let center = decode(best_idx, unit_lo, unit_hi);

    // One refinement stage over the coarse cell around the best point.
    let step = 1.0 / (grid_n - 1) as f64;
    let fine_lo = [
        (center[0] - step).max(0.0),
        (center[1] - step).max(0.0),
        (center[2] - step).max(0.0),
    ];
    let fine_hi = [
        (center[0] + step).min(1.0),
        (center[1] + step).min(1.0),
        (center[2] + step).min(1.0),
    ];
    let (fine_idx, fine_acc) = search(fine_lo, fine_hi);
    let best = decode(fine_idx, fine_lo, fine_hi);
    let point = CubePoint { eps: best[0], w0: best[1], w1: best[2] };
    let mech = cube_to_mechanism(&point, model.ptilde, d);
    Ok((mech, fine_acc))
}
