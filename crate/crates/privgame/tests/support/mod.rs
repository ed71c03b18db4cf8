//! Independent numeric oracles for the integration tests. Nothing here may
//! call the implementation paths it is used to check.

/// Adaptive Simpson quadrature with Richardson acceptance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 55)
}

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    (-z * z / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// MAP accuracy by direct quadrature of the max of the two prior-weighted
/// class densities.
pub fn map_accuracy_quadrature(
    prior1: f64,
    mean0: f64,
    mean1: f64,
    var0: f64,
    var1: f64,
) -> f64 {
    let sd0 = var0.sqrt();
    let sd1 = var1.sqrt();
    let lo = (mean0 - 12.0 * sd0).min(mean1 - 12.0 * sd1);
    let hi = (mean0 + 12.0 * sd0).max(mean1 + 12.0 * sd1);
    let f = move |x: f64| {
        (prior1 * normal_pdf(x, mean1, var1)).max((1.0 - prior1) * normal_pdf(x, mean0, var0))
    };
    adaptive_simpson(&f, lo, hi, 1e-12)
}

/// Standard normal upper-tail probability by quadrature over [0, x] plus
/// the half-line symmetry; independent of the erfc implementation.
pub fn q_quadrature(x: f64) -> f64 {
    let phi = |u: f64| normal_pdf(u, 0.0, 1.0);
    0.5 - adaptive_simpson(&phi, 0.0, x, 1e-15)
}

/// Exhaustive pruned grid minimization of the PDD MAP accuracy over
/// stay-probabilities on a step lattice, the oracle for the LP route.
/// Expands the per-symbol adversary masses directly from the joint.
pub fn pdd_grid_oracle(p00: f64, p01: f64, p10: f64, p11: f64, d: f64, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
    let mut best = f64::INFINITY;
    // Iterate each s downward from 1 so the partial distortion only grows;
    // break as soon as the remaining budget is exhausted.
    for &s00 in grid.iter().rev() {
        let d0 = p00 * (1.0 - s00);
        if d0 > d + 1e-12 {
            break;
        }
        for &s01 in grid.iter().rev() {
            let d1 = d0 + p01 * (1.0 - s01);
            if d1 > d + 1e-12 {
                break;
            }
            for &s10 in grid.iter().rev() {
                let d2 = d1 + p10 * (1.0 - s10);
                if d2 > d + 1e-12 {
                    break;
                }
                let m0b = p10 * (1.0 - s10) + p00 * s00;
                let m1b = p10 * s10 + p00 * (1.0 - s00);
                for &s11 in grid.iter().rev() {
                    if d2 + p11 * (1.0 - s11) > d + 1e-12 {
                        break;
                    }
                    let m0a = p11 * (1.0 - s11) + p01 * s01;
                    let m1a = p11 * s11 + p01 * (1.0 - s01);
                    let acc = m0a.max(m0b) + m1a.max(m1b);
                    if acc < best {
                        best = acc;
                    }
                }
            }
        }
    }
    best
}
