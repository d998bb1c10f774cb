//! Zero-system route to the parabolic multiplets.
//!
//! Instead of diagonalizing the coefficient recurrence, the polynomial
//! factor can be pinned down by its zeros `alpha_1..alpha_n` in the squared
//! parabolic coordinate. Mutual balance of the zeros gives `n` coupled
//! equations of electrostatic type,
//!
//! ```text
//! sum_{m != l} 2 / (alpha_l - alpha_m) + (1 +- k2) / alpha_l - w alpha_l
//!     = k1 / (2 w),
//! ```
//!
//! and the separation constant follows from the zero configuration. This
//! route shares no code with the recurrence route, which makes the two fit
//! for cross-validation. The product form over the zeros also evaluates the
//! two-dimensional eigenfunction directly, where it must be annihilated by
//! the model's second-order symmetry operator up to `-2E`; that residual is
//! computed here as well.

use crate::error::{Error, Result};
use crate::linalg::{lu_solve, sym_tridiag_eigenvalues};
use crate::model::ModelV1;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A converged zero configuration.
#[derive(Debug, Clone)]
pub struct NivenSolution {
    /// Zeros in the squared parabolic coordinate, ascending; `q` of them
    /// positive, `n - q` negative.
    pub alphas: Vec<f64>,
    /// Separation constant reconstructed from the zeros.
    pub lambda: f64,
    /// Final residuals of the balance equations.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Residual vector of the balance equations at a zero configuration.
pub fn niven_equations(m: &ModelV1, alphas: &[f64]) -> Result<Vec<f64>> {
    let w = m.omega;
    let sk2 = m.sk2();
    let rhs = m.k1 / (2.0 * w);
    let n = alphas.len();
    let mut res = Vec::with_capacity(n);
    for l in 0..n {
        let al = alphas[l];
        if al == 0.0 {
            return Err(Error::Domain("zero pinned at the origin".into()));
        }
        let mut sum = (1.0 + sk2) / al - w * al - rhs;
        for (mth, &am) in alphas.iter().enumerate() {
            if mth != l {
                let gap = al - am;
                if gap == 0.0 {
                    return Err(Error::NumericDegeneracy(format!(
                        "coincident zeros at {al}"
                    )));
                }
                sum += 2.0 / gap;
            }
        }
        res.push(sum);
    }
    Ok(res)
}

fn niven_jacobian(m: &ModelV1, alphas: &[f64]) -> Vec<Vec<f64>> {
    let w = m.omega;
    let sk2 = m.sk2();
    let n = alphas.len();
    let mut jac = vec![vec![0.0; n]; n];
    for l in 0..n {
        let al = alphas[l];
        let mut diag = -(1.0 + sk2) / (al * al) - w;
        for (mth, &am) in alphas.iter().enumerate() {
            if mth != l {
                let inv2 = 1.0 / ((al - am) * (al - am));
                diag -= 2.0 * inv2;
                jac[l][mth] = 2.0 * inv2;
            }
        }
        jac[l][l] = diag;
    }
    jac
}

/// Separation constant from a zero configuration:
/// `lambda = 4 (1 +- k2) [ k1 / (4 w) + sum_l 1 / alpha_l ]`.
pub fn lambda_from_zeros(m: &ModelV1, alphas: &[f64]) -> f64 {
    let inv_sum: f64 = alphas.iter().map(|a| 1.0 / a).sum();
    4.0 * (1.0 + m.sk2()) * (m.k1 / (4.0 * m.omega) + inv_sum)
}

/// Zeros of the generalized Laguerre polynomial of the given degree, via
/// the symmetric Jacobi matrix (Golub-Welsch, nodes only).
fn laguerre_zeros(degree: usize, alpha: f64) -> Result<Vec<f64>> {
    if degree == 0 {
        return Ok(Vec::new());
    }
    let diag: Vec<f64> = (0..degree).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
    let off: Vec<f64> = (1..degree)
        .map(|j| (j as f64 * (j as f64 + alpha)).sqrt())
        .collect();
    sym_tridiag_eigenvalues(&diag, &off)
}

fn seed_configuration(m: &ModelV1, n: usize, q: usize) -> Result<Vec<f64>> {
    let sk2 = m.sk2();
    let w = m.omega;
    let mut seeds = Vec::with_capacity(n);
    for y in laguerre_zeros(n - q, sk2)? {
        seeds.push(-(y / w).sqrt());
    }
    for x in laguerre_zeros(q, sk2)? {
        seeds.push((x / w).sqrt());
    }
    seeds.sort_by(|a, b| a.total_cmp(b));
    Ok(seeds)
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Solve the balance equations for the rank-`q` member of the degree-`n`
/// multiplet: `q` zeros on the positive side, `n - q` on the negative side.
///
/// Damped Newton from Laguerre-node seeds; on a stall, near-collision, or a
/// sign pattern drifting away from `(q, n - q)`, the seeds are jittered
/// deterministically and the solve restarts, up to eight attempts.
pub fn solve_niven(m: &ModelV1, n: usize, q: usize) -> Result<NivenSolution> {
    if q > n {
        return Err(Error::ParameterDomain(format!(
            "rank {q} exceeds degree {n}"
        )));
    }
    if n == 0 {
        return Ok(NivenSolution {
            alphas: Vec::new(),
            lambda: lambda_from_zeros(m, &[]),
            residuals: Vec::new(),
            iterations: 0,
        });
    }
    let base = seed_configuration(m, n, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut total_iters = 0usize;
    'attempt: for attempt in 0..8 {
        let mut alphas = base.clone();
        if attempt > 0 {
            for a in alphas.iter_mut() {
                // keep the sign, wiggle the magnitude
                *a *= 1.0 + 0.15 * (rng.gen::<f64>() - 0.5) * attempt as f64;
            }
        }
        let mut res = match niven_equations(m, &alphas) {
            Ok(r) => r,
            Err(_) => continue 'attempt,
        };
        for _ in 0..200 {
            total_iters += 1;
            if sup_norm(&res) <= 1e-12 {
                let positive = alphas.iter().filter(|a| **a > 0.0).count();
                if positive != q {
                    continue 'attempt;
                }
                let scale = sup_norm(&alphas);
                for pair in alphas.windows(2) {
                    if (pair[1] - pair[0]).abs() < 1e-8 * scale {
                        continue 'attempt;
                    }
                }
                alphas.sort_by(|a, b| a.total_cmp(b));
                let lambda = lambda_from_zeros(m, &alphas);
                let residuals = niven_equations(m, &alphas)?;
                return Ok(NivenSolution {
                    alphas,
                    lambda,
                    residuals,
                    iterations: total_iters,
                });
            }
            let jac = niven_jacobian(m, &alphas);
            let neg_res: Vec<f64> = res.iter().map(|r| -r).collect();
            let step = match lu_solve(&jac, &neg_res) {
                Ok(s) => s,
                Err(_) => continue 'attempt,
            };
            // backtracking line search on the residual norm
            let old_norm = sup_norm(&res);
            let mut damp = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<f64> = alphas
                    .iter()
                    .zip(step.iter())
                    .map(|(a, d)| a + damp * d)
                    .collect();
                if let Ok(trial_res) = niven_equations(m, &trial) {
                    if sup_norm(&trial_res) < old_norm * (1.0 - 1e-4 * damp) {
                        alphas = trial;
                        res = trial_res;
                        accepted = true;
                        break;
                    }
                }
                damp *= 0.5;
            }
            if !accepted {
                continue 'attempt;
            }
        }
    }
    Err(Error::Convergence(format!(
        "zero system for degree {n} rank {q} did not settle in 8 attempts"
    )))
}

/// Value and Cartesian derivatives of the polynomial part in product form,
/// `Phi = prod_l (y^2 / alpha_l + 2 x - alpha_l)`.
#[derive(Debug, Clone, Copy)]
pub struct ProductEval {
    pub value: f64,
    pub dx: f64,
    pub dxx: f64,
    pub dy: f64,
    pub dyy: f64,
}

/// Evaluate the product form and its derivatives at `(x, y)` analytically
/// through logarithmic-derivative sums. Points where a factor vanishes are
/// a `Domain` error; pick a generic point instead.
pub fn product_form_eval(alphas: &[f64], x: f64, y: f64) -> Result<ProductEval> {
    let mut value = 1.0;
    let mut sx = 0.0; // sum 2 / B_l
    let mut sx2 = 0.0; // sum (2 / B_l)^2
    let mut sy = 0.0; // sum (2 y / alpha_l) / B_l
    let mut sy2 = 0.0; // sum (2 y / alpha_l)^2 / B_l^2
    let mut syy = 0.0; // sum (2 / alpha_l) / B_l
    for &a in alphas {
        let b = y * y / a + 2.0 * x - a;
        if b.abs() < 1e-140 {
            return Err(Error::Domain(format!(
                "product factor vanishes at ({x}, {y}) for zero {a}"
            )));
        }
        value *= b;
        sx += 2.0 / b;
        sx2 += 4.0 / (b * b);
        let ty = 2.0 * y / a;
        sy += ty / b;
        sy2 += ty * ty / (b * b);
        syy += 2.0 / (a * b);
    }
    Ok(ProductEval {
        value,
        dx: value * sx,
        dxx: value * (sx * sx - sx2),
        dy: value * sy,
        dyy: value * (sy * sy - sy2 + syy),
    })
}

/// Relative residual of the symmetry-operator eigenrelation on the product
/// form at `(x, y)`.
///
/// The gauge-stripped operator is
///
/// ```text
/// R = dxx + dyy + [ (1 +- 2 k2)/y - 2 w y ] dy
///     - 4 w (x + k1/(4 w^2)) dx - w (4 +- 2 k2) + k1^2/(4 w^2)
/// ```
///
/// and `R Phi = -2 E_n Phi` on the degree-`n` multiplet. The residual is
/// normalized by the sum of the magnitudes of the individual terms, so it
/// measures cancellation quality rather than point placement.
pub fn symmetry_operator_residual(
    m: &ModelV1,
    n: usize,
    alphas: &[f64],
    x: f64,
    y: f64,
) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::Domain("operator is singular on the x axis".into()));
    }
    let w = m.omega;
    let sk2 = m.sk2();
    let p = product_form_eval(alphas, x, y)?;
    let terms = [
        p.dxx,
        p.dyy,
        ((1.0 + 2.0 * sk2) / y - 2.0 * w * y) * p.dy,
        -4.0 * w * (x + m.k1 / (4.0 * w * w)) * p.dx,
        (-w * (4.0 + 2.0 * sk2) + m.k1 * m.k1 / (4.0 * w * w)) * p.value,
        2.0 * m.energy(n) * p.value,
    ];
    let residual: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum::<f64>().max(1e-300);
    Ok(residual.abs() / scale)
}
