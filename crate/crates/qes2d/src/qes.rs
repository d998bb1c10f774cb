//! Algebraic (quasi-exact) levels: spectra of separation constants together
//! with the node structure of their polynomial factors.
//!
//! At the algebraic energy of degree `n` each model carries `n + 1` states
//! distinguished by the separation constant. The polynomial factor `P` is
//! shared between the two separated coordinates, so its real zeros split
//! into nodes on one axis or the other; the split is a strict function of
//! the rank of the separation constant, and this module verifies that
//! instead of assuming it.

use crate::error::{Error, Result};
use crate::linalg::polynomial_roots;
use crate::model::{ModelV1, ModelV2};
use crate::recurrence::{
    build_elliptic_recurrence, build_parabolic_recurrence, coefficient_vector,
    separation_eigenvalues,
};

/// One algebraic state: separation constant, polynomial coefficients, and
/// where the polynomial zeros land.
#[derive(Debug, Clone)]
pub struct QesState {
    pub lambda: f64,
    /// Coefficients `A_0..A_n` of the shared polynomial factor, `A_0 = 1`.
    pub coefficients: Vec<f64>,
    /// Real zeros of the polynomial in its natural variable, ascending.
    pub polynomial_zeros: Vec<f64>,
    /// Node counts on the two separated axes. Parabolic: `(u1, u2)` nodes,
    /// from positive and negative zeros. Elliptic: `(angular, radial)`
    /// nodes, from zeros below and above 1.
    pub node_split: (usize, usize),
}

/// The full algebraic multiplet at degree `n`.
#[derive(Debug, Clone)]
pub struct QesSolution {
    pub degree: usize,
    pub energy: f64,
    /// States ordered by ascending separation constant.
    pub states: Vec<QesState>,
    /// Imaginary residual left by the eigensolver, relative to the spectral
    /// scale; zero on the symmetrizable route.
    pub max_imag_residual: f64,
}

fn real_zeros(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() < 2 {
        return Ok(Vec::new());
    }
    let roots = polynomial_roots(coeffs)?;
    let mut zeros = Vec::with_capacity(roots.len());
    for (re, im) in roots {
        if im.abs() > 1e-8 * (1.0 + re.abs()) {
            // The zeros are real in exact arithmetic, so an off-axis root
            // means the monomial-basis root extraction lost conditioning
            // (high degree spreads the coefficients over many decades).
            return Err(Error::Realness(format!(
                "polynomial zero strayed off the real axis: {re} + {im}i"
            )));
        }
        zeros.push(re);
    }
    zeros.sort_by(|a, b| a.total_cmp(b));
    Ok(zeros)
}

/// Solve the parabolic multiplet of the tilted model at degree `n`.
///
/// The state of ascending-lambda rank `q` must put `q` of its zeros at
/// positive values of the squared parabolic coordinate (nodes on the `u1`
/// axis) and the remaining `n - q` at negative values (nodes on the `u2`
/// axis, where `u2^2 = -t`); a zero pinned at the origin or a split that
/// disagrees with the rank is a `Labeling` error.
pub fn solve_parabolic(m: &ModelV1, n: usize) -> Result<QesSolution> {
    let rec = build_parabolic_recurrence(m, n);
    let spectrum = separation_eigenvalues(&rec)?;
    let mut states = Vec::with_capacity(n + 1);
    for (q, &lambda) in spectrum.lambdas.iter().enumerate() {
        let coefficients = coefficient_vector(&rec, lambda)?;
        let zeros = real_zeros(&coefficients)?;
        if zeros.len() != n {
            return Err(Error::Labeling(format!(
                "degree {n} state of rank {q} kept only {} zeros",
                zeros.len()
            )));
        }
        let mut positive = 0usize;
        let mut negative = 0usize;
        for &z in &zeros {
            if z.abs() < 1e-12 {
                return Err(Error::Labeling(format!(
                    "rank {q} zero pinned at the origin: {z:.3e}"
                )));
            }
            if z > 0.0 {
                positive += 1;
            } else {
                negative += 1;
            }
        }
        if (positive, negative) != (q, n - q) {
            return Err(Error::Labeling(format!(
                "rank {q} of degree {n} split as ({positive}, {negative}) instead of ({q}, {})",
                n - q
            )));
        }
        states.push(QesState {
            lambda,
            coefficients,
            polynomial_zeros: zeros,
            node_split: (positive, negative),
        });
    }
    Ok(QesSolution {
        degree: n,
        energy: m.energy(n),
        states,
        max_imag_residual: spectrum.max_imag_residual,
    })
}

/// Solve the elliptic multiplet of the doubly singular model at degree `n`
/// and squared interfocal distance `d2 > 0`.
///
/// Zeros live in the polynomial variable that equals `cos^2(u2)` on the
/// angular axis and `cosh^2(u1)` on the radial one, so each zero must fall
/// strictly inside `(0, 1)` (an angular node) or beyond 1 (a radial node).
/// The rank-`q` state carries `(n - q, q)` angular and radial nodes.
pub fn solve_elliptic(m: &ModelV2, n: usize, d2: f64) -> Result<QesSolution> {
    if !(d2 > 0.0) || !d2.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "elliptic multiplet needs d2 > 0, got {d2}"
        )));
    }
    let rec = build_elliptic_recurrence(m, n, d2)?;
    let spectrum = separation_eigenvalues(&rec)?;
    let mut states = Vec::with_capacity(n + 1);
    for (q, &lambda) in spectrum.lambdas.iter().enumerate() {
        let coefficients = coefficient_vector(&rec, lambda)?;
        let zeros = real_zeros(&coefficients)?;
        if zeros.len() != n {
            return Err(Error::Labeling(format!(
                "degree {n} state of rank {q} kept only {} zeros",
                zeros.len()
            )));
        }
        let margin = 1e-9;
        let mut angular = 0usize;
        let mut radial = 0usize;
        for &z in &zeros {
            if z < margin || (z - 1.0).abs() < margin {
                return Err(Error::Labeling(format!(
                    "rank {q} zero pinned on a coordinate boundary: {z:.6e}"
                )));
            }
            if z < 1.0 {
                angular += 1;
            } else {
                radial += 1;
            }
        }
        if (angular, radial) != (n - q, q) {
            return Err(Error::Labeling(format!(
                "rank {q} of degree {n} split as ({angular}, {radial}) instead of ({}, {q})",
                n - q
            )));
        }
        states.push(QesState {
            lambda,
            coefficients,
            polynomial_zeros: zeros,
            node_split: (angular, radial),
        });
    }
    Ok(QesSolution {
        degree: n,
        energy: m.energy(n),
        states,
        max_imag_residual: spectrum.max_imag_residual,
    })
}

/// Worst Hausdorff-style mismatch between the elliptic spectrum and its
/// axis-exchange image at the opposite-sign interfocal parameter, relative
/// to the spectral scale.
///
/// Exchanging the two half-axes maps the model onto itself with `k1` and
/// `k2` swapped and the foci rotated, which flips the sign of `d2` in the
/// recurrence; the separation spectra must agree exactly.
pub fn elliptic_symmetry_residual(m: &ModelV2, n: usize, d2: f64) -> Result<f64> {
    let direct = separation_eigenvalues(&build_elliptic_recurrence(m, n, d2)?)?;
    let image =
        separation_eigenvalues(&build_elliptic_recurrence(&m.axes_swapped(), n, -d2)?)?;
    let scale = direct
        .lambdas
        .iter()
        .chain(image.lambdas.iter())
        .fold(1.0f64, |acc, &l| acc.max(l.abs()));
    let worst = direct
        .lambdas
        .iter()
        .zip(image.lambdas.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(worst / scale)
}

/// How the elliptic spectrum approaches its two geometric limits.
#[derive(Debug, Clone)]
pub struct LimitReport {
    /// Probe value of `d2` for the concentric limit.
    pub small_d2: f64,
    /// Per ascending rank: relative error of lambda against the concentric
    /// closed form `-(2(n - q) + 1 +- k1 +- k2)^2`.
    pub small_d2_errors: Vec<f64>,
    /// Per ascending rank: fitted slope of the linear correction,
    /// `(lambda(d2) - limit) / d2` at the probe. Informational.
    pub small_d2_slopes: Vec<f64>,
    /// Probe values of `d2` for the far-separated limit.
    pub large_d2: [f64; 3],
    /// Worst (over ranks) relative residual at the first probe of the model
    /// `lambda = (w^2/64) d2^2 + b d2 + c` with `(b, c)` fitted over all
    /// three probes. The leading coefficient is pinned at its exact value,
    /// so a wrong leading behavior cannot be absorbed by the fit and shows
    /// up here. This is the far-separated acceptance quantity.
    pub large_d2_fit_residual: f64,
    /// Per ascending rank: quadratic coefficient from an exact two-point
    /// fit of `a d2^2 + b d2` through the upper probes, next to the exact
    /// `w^2 / 64`. Informational.
    pub large_d2_quadratic: Vec<(f64, f64)>,
    /// Per ascending rank: fitted linear coefficient next to
    /// `-(w/4)(4 n1 - 2n +- k1 -+ k2)` at `n1 = n - q`. Informational; the
    /// printed closed form for this subleading constant is under suspicion,
    /// so it is reported rather than asserted.
    pub large_d2_linear: Vec<(f64, f64)>,
}

/// Probe the concentric (`d2 -> 0`) and far-separated (`d2 -> inf`) limits
/// of the elliptic separation constants at degree `n`.
pub fn limit_check(m: &ModelV2, n: usize) -> Result<LimitReport> {
    let sk1 = m.sk1();
    let sk2 = m.sk2();
    let w = m.omega;

    let small_d2 = 1e-3;
    let small = separation_eigenvalues(&build_elliptic_recurrence(m, n, small_d2)?)?;
    let mut small_d2_errors = Vec::with_capacity(n + 1);
    let mut small_d2_slopes = Vec::with_capacity(n + 1);
    for (q, &lambda) in small.lambdas.iter().enumerate() {
        let m1 = (n - q) as f64;
        let limit = -(2.0 * m1 + 1.0 + sk1 + sk2).powi(2);
        small_d2_errors.push((lambda - limit).abs() / limit.abs());
        small_d2_slopes.push((lambda - limit) / small_d2);
    }

    let large_d2 = [400.0, 800.0, 1600.0];
    let mut spectra = Vec::with_capacity(3);
    for &d2 in &large_d2 {
        spectra.push(separation_eigenvalues(&build_elliptic_recurrence(m, n, d2)?)?);
    }
    let a_exact = w * w / 64.0;
    let mut large_d2_fit_residual = 0.0f64;
    let mut large_d2_quadratic = Vec::with_capacity(n + 1);
    let mut large_d2_linear = Vec::with_capacity(n + 1);
    for q in 0..=n {
        // least-squares fit of lambda - a_exact d2^2 = b d2 + c
        let (mut s11, mut s10, mut s00, mut r1, mut r0) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, &d2) in large_d2.iter().enumerate() {
            let y = spectra[i].lambdas[q] - a_exact * d2 * d2;
            s11 += d2 * d2;
            s10 += d2;
            s00 += 1.0;
            r1 += d2 * y;
            r0 += y;
        }
        let sol = crate::linalg::lu_solve(&[vec![s11, s10], vec![s10, s00]], &[r1, r0])?;
        let (b_fit, c_fit) = (sol[0], sol[1]);
        let probe = large_d2[0];
        let fitted = a_exact * probe * probe + b_fit * probe + c_fit;
        let residual = (spectra[0].lambdas[q] - fitted).abs() / spectra[0].lambdas[q].abs();
        large_d2_fit_residual = large_d2_fit_residual.max(residual);
        // exact two-point quadratic through the upper probes
        let (d1, d2b) = (large_d2[1], large_d2[2]);
        let (l1, l2) = (spectra[1].lambdas[q], spectra[2].lambdas[q]);
        let a_fit = (l2 / d2b - l1 / d1) / (d2b - d1);
        large_d2_quadratic.push((a_fit, a_exact));
        let n1 = (n - q) as f64;
        let model_value = -(w / 4.0) * (4.0 * n1 - 2.0 * n as f64 + sk1 - sk2);
        large_d2_linear.push((b_fit, model_value));
    }

    Ok(LimitReport {
        small_d2,
        small_d2_errors,
        small_d2_slopes,
        large_d2,
        large_d2_fit_residual,
        large_d2_quadratic,
        large_d2_linear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;
    use approx::assert_relative_eq;

    #[test]
    fn parabolic_node_splits_follow_rank() {
        for &k1 in &[0.0, 1.0] {
            for &(k2, sign) in &[(1.5, Sign::Plus), (0.25, Sign::Minus)] {
                let m = ModelV1::new(1.0, k1, k2, sign).unwrap();
                for n in 0..=5 {
                    let sol = solve_parabolic(&m, n).unwrap();
                    assert_eq!(sol.states.len(), n + 1);
                    for (q, st) in sol.states.iter().enumerate() {
                        assert_eq!(st.node_split, (q, n - q), "k1 {k1} n {n} rank {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn parabolic_reference_state() {
        // w = 1, k1 = 0, k2 = 3/2 plus: the upper degree-1 state has its
        // zero at sqrt(2.5) on the positive side
        let m = ModelV1::new(1.0, 0.0, 1.5, Sign::Plus).unwrap();
        let sol = solve_parabolic(&m, 1).unwrap();
        assert_relative_eq!(sol.states[1].lambda, 40.0f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(
            sol.states[1].polynomial_zeros[0],
            2.5f64.sqrt(),
            max_relative = 1e-12
        );
        assert_eq!(sol.states[1].node_split, (1, 0));
        assert_relative_eq!(
            sol.states[0].polynomial_zeros[0],
            -(2.5f64.sqrt()),
            max_relative = 1e-12
        );
        assert_eq!(sol.states[0].node_split, (0, 1));
        assert_relative_eq!(sol.energy, m.energy(1));
    }

    #[test]
    fn elliptic_node_splits_follow_rank() {
        let m = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
        for n in 0..=4 {
            for &d2 in &[0.5, 2.0, 8.0] {
                let sol = solve_elliptic(&m, n, d2).unwrap();
                for (q, st) in sol.states.iter().enumerate() {
                    assert_eq!(st.node_split, (n - q, q), "n {n} d2 {d2} rank {q}");
                    for &z in &st.polynomial_zeros {
                        assert!(z > 0.0 && (z - 1.0).abs() > 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn axis_exchange_symmetry_is_exact() {
        let m = ModelV2::new(1.3, 0.4, 1.1, Sign::Plus, Sign::Plus).unwrap();
        for n in 0..=5 {
            for &d2 in &[0.5, 2.0, 8.0] {
                let r = elliptic_symmetry_residual(&m, n, d2).unwrap();
                assert!(r <= 1e-10, "n {n} d2 {d2}: residual {r:.3e}");
            }
        }
    }

    #[test]
    fn concentric_limit() {
        let m = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
        let report = limit_check(&m, 3).unwrap();
        for (q, err) in report.small_d2_errors.iter().enumerate() {
            assert!(*err < 1e-3, "rank {q}: concentric error {err:.3e}");
        }
    }

    #[test]
    fn far_separated_limit() {
        for &w in &[1.0, 2.0] {
            let m = ModelV2::new(w, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
            let report = limit_check(&m, 2).unwrap();
            assert!(
                report.large_d2_fit_residual < 1e-3,
                "w {w}: fit residual {:.3e}",
                report.large_d2_fit_residual
            );
            for (q, (a_fit, a_exact)) in report.large_d2_quadratic.iter().enumerate() {
                println!("w {w} rank {q}: a_fit {a_fit:.8} a_exact {a_exact:.8}");
                assert_relative_eq!(a_fit, a_exact, max_relative = 2e-2);
            }
            for (q, (b_fit, model)) in report.large_d2_linear.iter().enumerate() {
                // the re-derived subleading coefficient, confirmed by fit
                assert_relative_eq!(b_fit, model, max_relative = 5e-3);
                let _ = q;
            }
        }
    }
}
