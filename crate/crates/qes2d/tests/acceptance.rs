//! Acceptance gate: one test per stated capability, each printing a single
//! pass/fail line with its worst measured deviation, and enforcing both the
//! numeric tolerance and the runtime budget of its criterion. The lines are
//! written straight to the stdout handle so they stay visible in default
//! (captured) test runs.
//!
//! The tests serialize on a global lock so the timings reflect each
//! criterion alone rather than scheduler contention.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use qes2d::interbasis::{
    double_orthogonality_elliptic, double_orthogonality_parabolic, gram_cartesian_v1,
    gram_cartesian_v2, gram_elliptic_2d, gram_elliptic_factorized, gram_identity_defect,
    gram_parabolic_2d, gram_parabolic_factorized, gram_polar, interbasis_projection,
    reconstruction_residual,
};
use qes2d::model::{sextic_parameters, Sign};
use qes2d::niven::solve_niven;
use qes2d::oracle::{
    elliptic_separation_oracle, parabolic_separation_oracle, plane_energy_oracle_v1,
    plane_energy_oracle_v2, sextic_oracle, EllipticAxis, ParabolicAxis,
};
use qes2d::qes::{elliptic_symmetry_residual, limit_check, solve_elliptic, solve_parabolic};
use qes2d::recurrence::{
    parabolic_series_log, predicted_tail_ratio_elliptic, predicted_tail_ratio_parabolic,
    tail_ratio_elliptic, tail_ratio_parabolic,
};
use qes2d::wavefn::{elliptic_multiplet, parabolic_multiplet};
use qes2d::{ModelV1, ModelV2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static GATE: Mutex<()> = Mutex::new(());

/// Write one verdict line past the libtest capture, so the gate's lines
/// appear in plain `cargo test` output, not only under `--nocapture`.
fn verdict_line(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

/// Run one criterion under the gate, print its line, and panic on failure.
fn criterion<F>(name: &str, budget: Duration, body: F)
where
    F: FnOnce() -> Result<String, String>,
{
    let _guard = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    match outcome {
        Ok(detail) if elapsed <= budget => {
            verdict_line(&format!("{name}: PASS ({elapsed:.2?}) {detail}"));
        }
        Ok(detail) => {
            verdict_line(&format!(
                "{name}: FAIL ({elapsed:.2?}) exceeded budget {budget:.2?}; {detail}"
            ));
            panic!("{name} exceeded its runtime budget: {elapsed:.2?} > {budget:.2?}");
        }
        Err(why) => {
            verdict_line(&format!("{name}: FAIL ({elapsed:.2?}) {why}"));
            panic!("{name} failed: {why}");
        }
    }
}

fn v1(omega: f64, k1: f64, k2: f64, sign: Sign) -> ModelV1 {
    ModelV1::new(omega, k1, k2, sign).expect("model parameters")
}

fn v2(omega: f64, k1: f64, k2: f64, s1: Sign, s2: Sign) -> ModelV2 {
    ModelV2::new(omega, k1, k2, s1, s2).expect("model parameters")
}

#[test]
fn criterion_01_degree_one_closed_form() {
    criterion(
        "criterion 01 (degree-1 separation constants in closed form)",
        Duration::from_secs(1),
        || {
            let mut worst = 0.0f64;
            let mut cases = 0usize;
            for &w in &[0.5, 1.0, 2.0] {
                for &k1 in &[-1.0, 0.0, 2.0] {
                    for &(k2, sign) in &[
                        (0.25, Sign::Plus),
                        (0.25, Sign::Minus),
                        (1.5, Sign::Plus),
                    ] {
                        let m = v1(w, k1, k2, sign);
                        let sol = solve_parabolic(&m, 1).map_err(|e| e.to_string())?;
                        let sk2 = m.sk2();
                        let base = (k1 / w) * (2.0 + sk2);
                        let root = (k1 * k1 / (w * w) + 16.0 * w * (1.0 + sk2)).sqrt();
                        let exact = [base - root, base + root];
                        for (st, ex) in sol.states.iter().zip(&exact) {
                            worst = worst.max((st.lambda - ex).abs());
                        }
                        cases += 1;
                    }
                }
            }
            if worst <= 1e-10 {
                Ok(format!("{cases} parameter sets, worst |error| {worst:.2e} <= 1e-10"))
            } else {
                Err(format!("worst |error| {worst:.2e} > 1e-10"))
            }
        },
    );
}

#[test]
fn criterion_02_degree_two_spectrum_and_kernel_vector() {
    criterion(
        "criterion 02 (degree-2 untilted spectrum and kernel coefficients)",
        Duration::from_secs(1),
        || {
            let mut worst = 0.0f64;
            for &w in &[0.5, 1.0, 2.0] {
                for &(k2, sign) in &[
                    (1.5, Sign::Plus),
                    (0.25, Sign::Plus),
                    (0.25, Sign::Minus),
                ] {
                    let m = v1(w, 0.0, k2, sign);
                    let sol = solve_parabolic(&m, 2).map_err(|e| e.to_string())?;
                    let big = (32.0 * w * (3.0 + 2.0 * m.sk2())).sqrt();
                    worst = worst.max((sol.states[0].lambda + big).abs());
                    worst = worst.max(sol.states[1].lambda.abs());
                    worst = worst.max((sol.states[2].lambda - big).abs());
                    let a = &sol.states[1].coefficients;
                    worst = worst.max((a[0] - 1.0).abs());
                    worst = worst.max(a[1].abs());
                    worst = worst.max((a[2] + w / (2.0 + m.sk2())).abs());
                }
            }
            if worst <= 1e-10 {
                Ok(format!("worst |error| {worst:.2e} <= 1e-10"))
            } else {
                Err(format!("worst |error| {worst:.2e} > 1e-10"))
            }
        },
    );
}

#[test]
fn criterion_03_zero_system_reproduces_the_spectrum() {
    criterion(
        "criterion 03 (polynomial-zero balance system, degrees up to 6)",
        Duration::from_secs(10),
        || {
            let mut worst_lambda = 0.0f64;
            let mut worst_residual = 0.0f64;
            for &k1 in &[0.0, 1.0] {
                let m = v1(1.0, k1, 1.5, Sign::Plus);
                for n in 0..=6usize {
                    let sol = solve_parabolic(&m, n).map_err(|e| e.to_string())?;
                    let mut found = Vec::with_capacity(n + 1);
                    for q in 0..=n {
                        let niv = solve_niven(&m, n, q).map_err(|e| e.to_string())?;
                        worst_residual = niv
                            .residuals
                            .iter()
                            .fold(worst_residual, |acc, r| acc.max(r.abs()));
                        found.push(niv.lambda);
                    }
                    if found.len() != n + 1 {
                        return Err(format!(
                            "degree {n}: got {} zero-system solutions, want {}",
                            found.len(),
                            n + 1
                        ));
                    }
                    found.sort_by(|a, b| a.total_cmp(b));
                    for (niv, st) in found.iter().zip(&sol.states) {
                        worst_lambda = worst_lambda.max((niv - st.lambda).abs());
                    }
                }
            }
            if worst_lambda <= 1e-8 && worst_residual <= 1e-10 {
                Ok(format!(
                    "worst |lambda gap| {worst_lambda:.2e} <= 1e-8, worst equation residual {worst_residual:.2e} <= 1e-10, full multiplets recovered"
                ))
            } else {
                Err(format!(
                    "worst |lambda gap| {worst_lambda:.2e} (<= 1e-8 wanted), worst residual {worst_residual:.2e} (<= 1e-10 wanted)"
                ))
            }
        },
    );
}

#[test]
fn criterion_04_gram_matrices_and_double_orthogonality() {
    criterion(
        "criterion 04 (Gram identities of all bases; unweighted factor orthogonality)",
        Duration::from_secs(60),
        || {
            let m1 = v1(1.0, 1.0, 1.5, Sign::Plus);
            let m2 = v2(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus);
            let d2 = 2.0;
            let mut worst_gram = 0.0f64;
            for n in 0..=4usize {
                let g = gram_cartesian_v1(&m1, n).map_err(|e| e.to_string())?;
                worst_gram = worst_gram.max(gram_identity_defect(&g));
                let g = gram_cartesian_v2(&m2, n).map_err(|e| e.to_string())?;
                worst_gram = worst_gram.max(gram_identity_defect(&g));
                let g = gram_polar(&m2, n).map_err(|e| e.to_string())?;
                worst_gram = worst_gram.max(gram_identity_defect(&g));
                let par = parabolic_multiplet(&m1, n).map_err(|e| e.to_string())?;
                let g = gram_parabolic_factorized(&par).map_err(|e| e.to_string())?;
                worst_gram = worst_gram.max(gram_identity_defect(&g));
                let g = gram_parabolic_2d(&par, 48, 8).map_err(|e| e.to_string())?;
                worst_gram = worst_gram.max(gram_identity_defect(&g));
                let ell = elliptic_multiplet(&m2, n, d2).map_err(|e| e.to_string())?;
                let g = gram_elliptic_factorized(&ell).map_err(|e| e.to_string())?;
                worst_gram = worst_gram.max(gram_identity_defect(&g));
                let g = gram_elliptic_2d(&ell, 48, 8).map_err(|e| e.to_string())?;
                worst_gram = worst_gram.max(gram_identity_defect(&g));
            }
            let par = parabolic_multiplet(&m1, 4).map_err(|e| e.to_string())?;
            let (xi, eta) = double_orthogonality_parabolic(&par).map_err(|e| e.to_string())?;
            let ell = elliptic_multiplet(&m2, 4, d2).map_err(|e| e.to_string())?;
            let (rad, ang) = double_orthogonality_elliptic(&ell).map_err(|e| e.to_string())?;
            let worst_double = xi.max(eta).max(rad).max(ang);
            if worst_gram <= 1e-6 && worst_double <= 1e-6 {
                Ok(format!(
                    "worst Gram defect {worst_gram:.2e} <= 1e-6 (both quadrature routes), worst unweighted factor overlap {worst_double:.2e} <= 1e-6"
                ))
            } else {
                Err(format!(
                    "worst Gram defect {worst_gram:.2e} (<= 1e-6 wanted), worst factor overlap {worst_double:.2e} (<= 1e-6 wanted)"
                ))
            }
        },
    );
}

#[test]
fn criterion_05_interbasis_expansion() {
    criterion(
        "criterion 05 (parabolic-to-product change of basis at zero tilt)",
        Duration::from_secs(60),
        || {
            let m = v1(1.0, 0.0, 1.5, Sign::Plus);
            let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0005);
            let points: Vec<(f64, f64)> = (0..20)
                .map(|_| (rng.gen_range(-1.5..1.5), rng.gen_range(0.1..1.5)))
                .collect();
            let mut worst_orth = 0.0f64;
            let mut worst_rec = 0.0f64;
            for n in 0..=4usize {
                let w = interbasis_projection(&m, n, 48, 8).map_err(|e| e.to_string())?;
                worst_orth = worst_orth.max(w.orthonormality_defect());
                worst_rec = worst_rec
                    .max(reconstruction_residual(&m, &w, &points).map_err(|e| e.to_string())?);
            }
            if worst_orth <= 1e-6 && worst_rec <= 1e-5 {
                Ok(format!(
                    "worst row-orthonormality defect {worst_orth:.2e} <= 1e-6, worst pointwise reconstruction gap {worst_rec:.2e} <= 1e-5 at 20 random points"
                ))
            } else {
                Err(format!(
                    "orthonormality defect {worst_orth:.2e} (<= 1e-6 wanted), reconstruction gap {worst_rec:.2e} (<= 1e-5 wanted)"
                ))
            }
        },
    );
}

#[test]
fn criterion_06_axis_exchange_symmetry() {
    criterion(
        "criterion 06 (elliptic spectra match their axis-exchange images)",
        Duration::from_secs(5),
        || {
            let m = v2(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus);
            let mut worst = 0.0f64;
            for n in 0..=5usize {
                for &d2 in &[0.5, 2.0, 8.0] {
                    worst = worst
                        .max(elliptic_symmetry_residual(&m, n, d2).map_err(|e| e.to_string())?);
                }
            }
            if worst <= 1e-8 {
                Ok(format!("worst relative spectral mismatch {worst:.2e} <= 1e-8"))
            } else {
                Err(format!("worst relative spectral mismatch {worst:.2e} > 1e-8"))
            }
        },
    );
}

#[test]
fn criterion_07_interfocal_limits() {
    criterion(
        "criterion 07 (concentric and far-separated interfocal limits)",
        Duration::from_secs(10),
        || {
            let m = v2(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus);
            let mut worst_small = 0.0f64;
            let mut worst_large = 0.0f64;
            for n in 0..=3usize {
                let report = limit_check(&m, n).map_err(|e| e.to_string())?;
                worst_small = report
                    .small_d2_errors
                    .iter()
                    .fold(worst_small, |acc, e| acc.max(*e));
                worst_large = worst_large.max(report.large_d2_fit_residual);
            }
            if worst_small <= 1e-3 && worst_large <= 1e-3 {
                Ok(format!(
                    "concentric-limit relative error {worst_small:.2e} <= 1e-3 at d2 = 1e-3; pinned-quadratic fit residual {worst_large:.2e} <= 1e-3 at d2 = 400"
                ))
            } else {
                Err(format!(
                    "concentric error {worst_small:.2e} (<= 1e-3 wanted), far-separated fit residual {worst_large:.2e} (<= 1e-3 wanted)"
                ))
            }
        },
    );
}

#[test]
fn criterion_08_finite_difference_oracles() {
    criterion(
        "criterion 08 (independent finite-difference agreement)",
        Duration::from_secs(120),
        || {
            // plane energies, both models, repulsive branches
            let m1 = v1(1.0, 1.0, 1.5, Sign::Plus);
            let e1 = plane_energy_oracle_v1(&m1, 3, 72).map_err(|e| e.to_string())?;
            let x1 = [m1.energy(0), m1.energy(1), m1.energy(1)];
            let m2 = v2(1.0, 1.5, 2.5, Sign::Plus, Sign::Plus);
            let e2 = plane_energy_oracle_v2(&m2, 3, 72).map_err(|e| e.to_string())?;
            let x2 = [m2.energy(0), m2.energy(1), m2.energy(1)];
            let worst_energy = e1
                .iter()
                .zip(&x1)
                .chain(e2.iter().zip(&x2))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if worst_energy > 1e-3 {
                return Err(format!(
                    "worst plane-energy gap {worst_energy:.2e} > 1e-3 ({e1:.6?} vs {x1:.6?}; {e2:.6?} vs {x2:.6?})"
                ));
            }
            // separation constants from each discretized axis
            let mut worst_lambda = 0.0f64;
            for &k1 in &[0.0, 1.0] {
                let m = v1(1.0, k1, 1.5, Sign::Plus);
                let n = 3;
                let sol = solve_parabolic(&m, n).map_err(|e| e.to_string())?;
                let lambdas: Vec<f64> = sol.states.iter().map(|s| s.lambda).collect();
                for axis in [ParabolicAxis::Xi, ParabolicAxis::Eta] {
                    let fd = parabolic_separation_oracle(&m, n, 1600, axis)
                        .map_err(|e| e.to_string())?;
                    for (a, b) in lambdas.iter().zip(&fd) {
                        worst_lambda = worst_lambda.max((a - b).abs());
                    }
                }
            }
            let (n, d2) = (2usize, 2.0);
            let sol = solve_elliptic(&m2, n, d2).map_err(|e| e.to_string())?;
            let lambdas: Vec<f64> = sol.states.iter().map(|s| s.lambda).collect();
            for axis in [EllipticAxis::Radial, EllipticAxis::Angular] {
                let fd = elliptic_separation_oracle(&m2, n, d2, 1600, axis)
                    .map_err(|e| e.to_string())?;
                for (a, b) in lambdas.iter().zip(&fd) {
                    worst_lambda = worst_lambda.max((a - b).abs());
                }
            }
            if worst_lambda <= 1e-4 {
                Ok(format!(
                    "worst plane-energy gap {worst_energy:.2e} <= 1e-3 (three lowest levels, both models); worst separation-constant gap {worst_lambda:.2e} <= 1e-4 (all four discretized axes, rank-matched)"
                ))
            } else {
                Err(format!(
                    "worst separation-constant gap {worst_lambda:.2e} > 1e-4"
                ))
            }
        },
    );
}

#[test]
fn criterion_09_differential_residuals() {
    criterion(
        "criterion 09 (separated and planar differential residuals)",
        Duration::from_secs(10),
        || {
            let mut worst = 0.0f64;
            // 50 interior probe points per check, on a deterministic lattice
            let m1 = v1(1.0, 1.0, 1.5, Sign::Plus);
            let par = parabolic_multiplet(&m1, 3).map_err(|e| e.to_string())?;
            for st in &par {
                for i in 0..10 {
                    let u1 = 0.15 + 0.22 * i as f64;
                    for j in 0..5 {
                        let u2 = 0.12 + 0.40 * j as f64;
                        worst = worst.max(st.ode_residual_u1(u1).map_err(|e| e.to_string())?);
                        worst = worst.max(st.ode_residual_u2(u2).map_err(|e| e.to_string())?);
                        worst = worst.max(st.pde_residual(u1, u2).map_err(|e| e.to_string())?);
                    }
                }
            }
            let m2 = v2(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus);
            let ell = elliptic_multiplet(&m2, 2, 2.0).map_err(|e| e.to_string())?;
            for st in &ell {
                for i in 0..10 {
                    let u1 = 0.08 + 0.20 * i as f64;
                    for j in 0..5 {
                        let u2 = 0.15 + 0.26 * j as f64;
                        worst = worst
                            .max(st.ode_residual_radial(u1).map_err(|e| e.to_string())?);
                        worst = worst
                            .max(st.ode_residual_angular(u2).map_err(|e| e.to_string())?);
                        worst = worst.max(st.pde_residual(u1, u2).map_err(|e| e.to_string())?);
                    }
                }
            }
            if worst <= 1e-5 {
                Ok(format!(
                    "worst normalized residual {worst:.2e} <= 1e-5 over 50-point lattices, every state and both systems"
                ))
            } else {
                Err(format!("worst normalized residual {worst:.2e} > 1e-5"))
            }
        },
    );
}

#[test]
fn criterion_10_tail_asymptotics() {
    criterion(
        "criterion 10 (untruncated tail ratios and series growth)",
        Duration::from_secs(5),
        || {
            let m1 = v1(1.0, 0.0, 1.5, Sign::Plus);
            let (e, lambda) = (0.123, -1.0);
            let s = 400usize;
            let measured =
                tail_ratio_parabolic(&m1, e, lambda, s).map_err(|er| er.to_string())?;
            let predicted = predicted_tail_ratio_parabolic(&m1, s);
            let par_gap = (measured / predicted - 1.0).abs();
            let m2 = v2(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus);
            let (e2, lambda2, d2) = (0.2, -1.0, 2.0);
            let measured2 =
                tail_ratio_elliptic(&m2, d2, e2, lambda2, s).map_err(|er| er.to_string())?;
            let predicted2 = predicted_tail_ratio_elliptic(&m2, d2, s);
            let ell_gap = (measured2 / predicted2 - 1.0).abs();
            if par_gap > 0.05 || ell_gap > 0.05 {
                return Err(format!(
                    "tail ratio mismatch at row {s}: parabolic {par_gap:.2e}, elliptic {ell_gap:.2e} (<= 5e-2 wanted)"
                ));
            }
            // Growth of the untruncated series, in the series variable z
            // (the square of the separable coordinate): the reconstructed
            // sum must exceed 0.05 * cosh(w z^2 / 2), which certifies the
            // off-spectrum solution grows too fast to be normalizable.
            let w = m1.omega;
            let ln_cosh = |x: f64| x.abs() + (-2.0 * x.abs()).exp().ln_1p() - 2.0f64.ln();
            let mut worst_margin = f64::INFINITY;
            for &z in &[3.0f64, 4.0, 6.0, 8.0, 10.0] {
                let log_series = parabolic_series_log(&m1, e, lambda, z.sqrt())
                    .map_err(|er| er.to_string())?;
                let margin = log_series - ln_cosh(0.5 * w * z * z) - 0.05f64.ln();
                worst_margin = worst_margin.min(margin);
            }
            if worst_margin >= 0.0 {
                Ok(format!(
                    "tail ratios within 5% of their asymptotes at row {s} (parabolic {par_gap:.2e}, elliptic {ell_gap:.2e}); series exceeds 0.05 cosh(w z^2/2) up to z = 10 (worst log margin {worst_margin:.3})"
                ))
            } else {
                Err(format!(
                    "series fell below 0.05 cosh(w z^2/2) by log margin {worst_margin:.3e}"
                ))
            }
        },
    );
}

#[test]
fn criterion_11_sextic_reduction() {
    criterion(
        "criterion 11 (one-dimensional sextic reduction)",
        Duration::from_secs(30),
        || {
            let m = v1(1.0, 2.0, 1.5, Sign::Plus);
            let mut worst = 0.0f64;
            for n in 0..=2usize {
                let sol = solve_parabolic(&m, n).map_err(|e| e.to_string())?;
                let p = sextic_parameters(&m, n);
                let fd = sextic_oracle(&p, n + 1, 1600).map_err(|e| e.to_string())?;
                for (st, e) in sol.states.iter().zip(&fd) {
                    worst = worst.max((st.lambda - e).abs());
                }
            }
            if worst <= 1e-3 {
                Ok(format!(
                    "doubled sextic levels match the separation constants to {worst:.2e} <= 1e-3 for degrees 0..=2"
                ))
            } else {
                Err(format!("worst sextic gap {worst:.2e} > 1e-3"))
            }
        },
    );
}
