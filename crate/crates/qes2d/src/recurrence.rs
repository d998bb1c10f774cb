//! Three-term recurrences for the separation constants.
//!
//! Writing the separated eigenfunction as a gauge factor times a polynomial
//! `P(t) = sum_s A_s t^s` turns each separated ODE into a three-term
//! recurrence for the coefficients:
//!
//! ```text
//! super[s] A_{s+1} + (diag_base[s] + kappa * lambda) A_s + sub[s] A_{s-1} = 0
//! ```
//!
//! At the algebraic energies the `A_{s-1}` coefficient vanishes past
//! `s = n + 1`, so rows `0..=n` close on themselves: the separation constants
//! are the eigenvalues of a tridiagonal matrix of size `n + 1`, and `A_{n+1}`
//! must come out as zero. The parabolic matrix is similar to a symmetric one;
//! the elliptic matrix is not (its sub- and super-diagonals have opposite
//! signs), yet its spectrum is known to be real, which this module checks
//! rather than assumes.
//!
//! Away from the algebraic energies the recurrence runs forever. Those
//! infinite tails are exercised deliberately: backward continued-fraction
//! iteration measures the asymptotic coefficient ratio, a log-space forward
//! summation evaluates the resulting series against its exponential lower
//! bound, and a Gamma-function substitution rewrites the tail as a continued
//! fraction with positive partial denominators.

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{ModelV1, ModelV2};
use crate::specfn::ln_gamma;

/// Which separation produced a truncated recurrence.
#[derive(Debug, Clone, Copy)]
pub enum RecurrenceFamily {
    /// Parabolic separation of the tilted anisotropic model; the polynomial
    /// variable is `t = u1^2` (square of the parabolic coordinate).
    Parabolic { model: ModelV1 },
    /// Elliptic separation of the doubly singular isotropic model; the
    /// polynomial variable is `t = cos^2(u2)` on the angular range and
    /// `t = cosh^2(u1)` on the radial range. `d2` is the squared interfocal
    /// distance; a negative value is the formal image of the recurrence
    /// under exchange of the two axes and is accepted for that purpose.
    Elliptic { model: ModelV2, d2: f64 },
}

/// A truncated three-term recurrence in the eigenvalue normal form
/// `T A = -kappa * lambda * A` with `T` tridiagonal of size `degree_n + 1`.
#[derive(Debug, Clone)]
pub struct ThreeTermRecurrence {
    pub degree_n: usize,
    /// Coefficient of `A_{s+1}` in row `s`, for `s = 0..=n`. The last entry
    /// never enters the matrix; it closes the residual check in
    /// [`coefficient_vector`].
    pub super_diag: Vec<f64>,
    /// Lambda-free part of the diagonal, `s = 0..=n`.
    pub diag_base: Vec<f64>,
    /// Coefficient of `A_{s-1}` in row `s`, for `s = 1..=n`; entry 0 is 0.
    pub sub_diag: Vec<f64>,
    /// kappa, the weight of lambda on the diagonal.
    pub lambda_weight: f64,
    pub family: RecurrenceFamily,
}

/// Separation constants of a truncated recurrence, sorted ascending.
#[derive(Debug, Clone)]
pub struct SeparationSpectrum {
    pub lambdas: Vec<f64>,
    /// Largest imaginary part met while solving, relative to the spectral
    /// scale. Zero on the symmetrizable path.
    pub max_imag_residual: f64,
}

/// Build the parabolic recurrence of the tilted model at degree `n`.
///
/// `super[s] = (s+1)(s+1+-k2)`, `diag_base[s] = -(k1/4w)(2s+1+-k2)`,
/// `sub[s] = w(n+1-s)`, `kappa = 1/4`.
pub fn build_parabolic_recurrence(m: &ModelV1, n: usize) -> ThreeTermRecurrence {
    let sk2 = m.sk2();
    let w = m.omega;
    let mut super_diag = Vec::with_capacity(n + 1);
    let mut diag_base = Vec::with_capacity(n + 1);
    let mut sub_diag = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let sf = s as f64;
        super_diag.push((sf + 1.0) * (sf + 1.0 + sk2));
        diag_base.push(-(m.k1 / (4.0 * w)) * (2.0 * sf + 1.0 + sk2));
        sub_diag.push(if s == 0 { 0.0 } else { w * (n as f64 + 1.0 - sf) });
    }
    ThreeTermRecurrence {
        degree_n: n,
        super_diag,
        diag_base,
        sub_diag,
        lambda_weight: 0.25,
        family: RecurrenceFamily::Parabolic { model: *m },
    }
}

/// Build the elliptic recurrence of the doubly singular model at degree `n`
/// and squared interfocal distance `d2`.
///
/// `super[s] = (s+1)(s+1+-k1)`, `sub[s] = -(d2 w/4)(n-s+1)`, `kappa = -1/4`,
/// and the diagonal base is
///
/// ```text
/// -(1/4) [ (2s+1+-k1+-k2)^2 + (d2 w/4)(4s-2n+-k1-+k2) - d2^2 w^2/64 ]
/// ```
///
/// `d2 < 0` is accepted as the formal axis-exchange image (see
/// [`RecurrenceFamily::Elliptic`]); `d2 = 0` is rejected because the
/// elliptic net degenerates there.
pub fn build_elliptic_recurrence(m: &ModelV2, n: usize, d2: f64) -> Result<ThreeTermRecurrence> {
    if d2 == 0.0 || !d2.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "elliptic recurrence needs nonzero finite d2, got {d2}"
        )));
    }
    let sk1 = m.sk1();
    let sk2 = m.sk2();
    let w = m.omega;
    let q = d2 * w / 4.0;
    let mut super_diag = Vec::with_capacity(n + 1);
    let mut diag_base = Vec::with_capacity(n + 1);
    let mut sub_diag = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let sf = s as f64;
        super_diag.push((sf + 1.0) * (sf + 1.0 + sk1));
        let sq = 2.0 * sf + 1.0 + sk1 + sk2;
        // the last term is d2^2 w^2 / 64 = q^2 / 4
        diag_base.push(
            -0.25 * (sq * sq + q * (4.0 * sf - 2.0 * n as f64 + sk1 - sk2) - 0.25 * q * q),
        );
        sub_diag.push(if s == 0 { 0.0 } else { -q * (n as f64 - sf + 1.0) });
    }
    Ok(ThreeTermRecurrence {
        degree_n: n,
        super_diag,
        diag_base,
        sub_diag,
        lambda_weight: -0.25,
        family: RecurrenceFamily::Elliptic { model: *m, d2 },
    })
}

/// Solve `T A = -kappa lambda A` for all separation constants.
///
/// When every product `super[s] * sub[s+1]` is positive the matrix is
/// diagonally similar to a symmetric tridiagonal one and the QL algorithm
/// applies. Otherwise the dense Hessenberg QR runs and the spectrum is
/// checked for realness a posteriori (`Realness` error beyond `1e-9`
/// relative), because nothing in the algebra forces it.
pub fn separation_eigenvalues(rec: &ThreeTermRecurrence) -> Result<SeparationSpectrum> {
    let n = rec.degree_n;
    let dim = n + 1;
    let symmetrizable = (0..n).all(|s| rec.super_diag[s] * rec.sub_diag[s + 1] > 0.0);
    let (mut eigs, max_imag_residual) = if symmetrizable {
        let off: Vec<f64> = (0..n)
            .map(|s| (rec.super_diag[s] * rec.sub_diag[s + 1]).sqrt())
            .collect();
        (linalg::sym_tridiag_eigenvalues(&rec.diag_base, &off)?, 0.0)
    } else {
        let mut t = vec![vec![0.0; dim]; dim];
        for s in 0..dim {
            t[s][s] = rec.diag_base[s];
            if s + 1 < dim {
                t[s][s + 1] = rec.super_diag[s];
                t[s + 1][s] = rec.sub_diag[s + 1];
            }
        }
        let pairs = linalg::real_eigenvalues(&t)?;
        let scale = pairs
            .iter()
            .map(|p| p.0.abs())
            .fold(1.0f64, f64::max);
        let worst = pairs.iter().map(|p| p.1.abs()).fold(0.0f64, f64::max) / scale;
        if worst > 1e-9 {
            return Err(Error::Realness(format!(
                "separation spectrum has imaginary residual {worst:.3e} of the spectral scale"
            )));
        }
        let mut re: Vec<f64> = pairs.into_iter().map(|p| p.0).collect();
        re.sort_by(|a, b| a.total_cmp(b));
        (re, worst)
    };
    // lambda = -eig / kappa
    for e in eigs.iter_mut() {
        *e = -*e / rec.lambda_weight;
    }
    eigs.sort_by(|a, b| a.total_cmp(b));
    Ok(SeparationSpectrum {
        lambdas: eigs,
        max_imag_residual,
    })
}

/// Polynomial coefficients `A_0..A_n` at a given separation constant,
/// normalized to `A_0 = 1`.
///
/// Built by forward substitution through rows `0..n-1`; row `n` then has no
/// unknown left, so its residual (divided by the untruncated `super[n]`)
/// plays the role of `A_{n+1}` and must vanish. If it exceeds `1e-8` of the
/// largest coefficient the given lambda is not a separation constant and
/// `NotAnEigenvalue` is returned.
pub fn coefficient_vector(rec: &ThreeTermRecurrence, lambda: f64) -> Result<Vec<f64>> {
    let n = rec.degree_n;
    let kappa = rec.lambda_weight;
    let mut a = vec![0.0; n + 1];
    a[0] = 1.0;
    for s in 0..n {
        let prev = if s == 0 { 0.0 } else { a[s - 1] };
        a[s + 1] = -((rec.diag_base[s] + kappa * lambda) * a[s] + rec.sub_diag[s] * prev)
            / rec.super_diag[s];
    }
    let prev = if n == 0 { 0.0 } else { a[n - 1] };
    let closure = -((rec.diag_base[n] + kappa * lambda) * a[n] + rec.sub_diag[n] * prev)
        / rec.super_diag[n];
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if closure.abs() > 1e-8 * scale {
        return Err(Error::NotAnEigenvalue(format!(
            "row {n} leaves A_{} = {closure:.3e} against coefficient scale {scale:.3e}",
            n + 1
        )));
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// Infinite recurrences at general energy
// ---------------------------------------------------------------------------

/// Row `s` of the untruncated parabolic recurrence at energy `e` and
/// separation constant `lambda`, as `(alpha, beta, gamma)` in
/// `alpha A_{s+1} + beta A_s + gamma A_{s-1} = 0`.
///
/// At `e = E_n` this reduces to the truncated coefficients, with
/// `gamma = w (n + 1 - s)` vanishing one row past the cutoff.
pub fn parabolic_infinite_row(m: &ModelV1, e: f64, lambda: f64, s: usize) -> (f64, f64, f64) {
    let sk2 = m.sk2();
    let w = m.omega;
    let sf = s as f64;
    let alpha = (sf + 1.0) * (sf + 1.0 + sk2);
    let beta = -(m.k1 / (4.0 * w)) * (2.0 * sf + 1.0 + sk2) + 0.25 * lambda;
    let c1 = 0.5 * (e + m.k1 * m.k1 / (8.0 * w * w)) - 0.5 * sk2 * w;
    let gamma = c1 - w * sf;
    (alpha, beta, gamma)
}

/// Row `s` of the untruncated elliptic recurrence at energy `e`.
pub fn elliptic_infinite_row(
    m: &ModelV2,
    d2: f64,
    e: f64,
    lambda: f64,
    s: usize,
) -> (f64, f64, f64) {
    let sk1 = m.sk1();
    let sk2 = m.sk2();
    let w = m.omega;
    let sf = s as f64;
    let alpha = (sf + 1.0) * (sf + 1.0 + sk1);
    let lam_shift = lambda + (1.0 + sk1 + sk2) * (1.0 + sk1 + sk2) + 0.5 * d2 * w * (1.0 + sk1)
        - 0.25 * d2 * e
        - d2 * d2 * w * w / 64.0;
    let beta = -(sf * (sf + 1.0 + sk1 + sk2) + 0.25 * d2 * w * sf + 0.25 * lam_shift);
    let p = 0.5 * d2 * (w * (2.0 + sk1 + sk2) - e);
    let gamma = 0.25 * (p + d2 * w * (sf - 1.0));
    (alpha, beta, gamma)
}

fn backward_ratio<F>(row: F, s_probe: usize, s_seed: usize, r_seed: f64) -> Result<f64>
where
    F: Fn(usize) -> (f64, f64, f64),
{
    let mut r = r_seed;
    for s in (s_probe..s_seed).rev() {
        let (alpha, beta, gamma) = row(s + 1);
        let denom = beta + alpha * r;
        if denom.abs() < 1e-280 {
            return Err(Error::NumericDegeneracy(format!(
                "continued-fraction denominator vanished at s = {s}"
            )));
        }
        r = -gamma / denom;
    }
    Ok(r)
}

/// Measured coefficient ratio `A_{s+1}/A_s` of the minimal tail of the
/// untruncated parabolic recurrence at row `s_probe`.
///
/// Backward continued-fraction iteration from `max(3 s_probe, 1200)`, seeded
/// with the asymptotic ratio. Plain downward iteration from a zero seed
/// fails here (the two formal tail solutions have equal modulus), so the
/// seed carries the asymptotics in and the long descent washes out its
/// inaccuracy at the probe row.
pub fn tail_ratio_parabolic(m: &ModelV1, e: f64, lambda: f64, s_probe: usize) -> Result<f64> {
    if s_probe == 0 {
        return Err(Error::ParameterDomain("probe row must be positive".into()));
    }
    let s_seed = (3 * s_probe).max(1200);
    let seed = predicted_tail_ratio_parabolic(m, s_seed);
    backward_ratio(
        |s| parabolic_infinite_row(m, e, lambda, s),
        s_probe,
        s_seed,
        seed,
    )
}

/// Asymptotic parabolic tail ratio `sqrt(w / s)`.
pub fn predicted_tail_ratio_parabolic(m: &ModelV1, s: usize) -> f64 {
    (m.omega / s as f64).sqrt()
}

/// Measured coefficient ratio of the minimal elliptic tail at row `s_probe`.
pub fn tail_ratio_elliptic(
    m: &ModelV2,
    d2: f64,
    e: f64,
    lambda: f64,
    s_probe: usize,
) -> Result<f64> {
    if s_probe == 0 {
        return Err(Error::ParameterDomain("probe row must be positive".into()));
    }
    if !(d2 > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "tail probe needs d2 > 0, got {d2}"
        )));
    }
    let s_seed = (3 * s_probe).max(1200);
    let seed = predicted_tail_ratio_elliptic(m, d2, s_seed);
    backward_ratio(
        |s| elliptic_infinite_row(m, d2, e, lambda, s),
        s_probe,
        s_seed,
        seed,
    )
}

/// Asymptotic elliptic tail ratio `(d2 w / 4) / s`.
pub fn predicted_tail_ratio_elliptic(m: &ModelV2, d2: f64, s: usize) -> f64 {
    0.25 * d2 * m.omega / s as f64
}

/// Natural log of `S(u) = sum_s A_s u^{2s}` for the untruncated parabolic
/// recurrence, valid in regimes where every term is positive (it errors out
/// otherwise). Terms are accumulated in log space through the ratio
/// recurrence, so the sum survives far past where raw `A_s` underflow.
pub fn parabolic_series_log(m: &ModelV1, e: f64, lambda: f64, u: f64) -> Result<f64> {
    if u <= 0.0 {
        return Err(Error::ParameterDomain(format!(
            "series evaluation point must be positive, got {u}"
        )));
    }
    let ln_u2 = 2.0 * u.ln();
    // rho_s = A_{s+1}/A_s from the row equations, starting at row 0
    let (a0, b0, _) = parabolic_infinite_row(m, e, lambda, 0);
    let mut rho = -b0 / a0;
    if rho <= 0.0 {
        return Err(Error::Domain(format!(
            "series terms change sign already at s = 1 (ratio {rho:.3e})"
        )));
    }
    let mut ln_term = 0.0f64; // ln of A_0 u^0
    let mut ln_max = 0.0f64;
    let mut acc = 1.0f64; // sum of exp(ln_term - ln_max), rescaled as ln_max moves
    let cap = 400_000usize;
    let mut s = 0usize;
    loop {
        // advance to term s+1
        ln_term += rho.ln() + ln_u2;
        if ln_term > ln_max {
            acc = acc * (ln_max - ln_term).exp() + 1.0;
            ln_max = ln_term;
        } else {
            acc += (ln_term - ln_max).exp();
        }
        s += 1;
        if ln_term < ln_max - 45.0 {
            break;
        }
        if s >= cap {
            return Err(Error::Convergence(format!(
                "series at u = {u} still growing after {cap} terms"
            )));
        }
        let (a, b, g) = parabolic_infinite_row(m, e, lambda, s);
        let next = -(b + g / rho) / a;
        if next <= 0.0 {
            return Err(Error::Domain(format!(
                "series terms change sign at s = {}",
                s + 1
            )));
        }
        rho = next;
    }
    Ok(ln_max + acc.ln())
}

// ---------------------------------------------------------------------------
// Continued-fraction normal form of the parabolic tail
// ---------------------------------------------------------------------------

/// `G_a(s) = Gamma((s+a+2)/2) / Gamma((s+a+1)/2)`, the square-root-free
/// building block with `G_a(s-1) G_a(s) = (s + a) / 2`.
fn gamma_step(a: f64, s: f64) -> Result<f64> {
    Ok((ln_gamma(0.5 * (s + a + 2.0))? - ln_gamma(0.5 * (s + a + 1.0))?).exp())
}

/// Rescaling factor `f(s)` with `f(s) f(s-1) = -gamma_s / alpha_s` for the
/// parabolic recurrence, built from Gamma-function ratios. Requires the
/// regime where `-gamma_s / alpha_s > 0` all the way down (`Domain` error
/// otherwise, detected through a nonpositive Gamma argument).
///
/// This is the bridge between raw coefficient ratios and the normal form:
/// `A_{s+1}/A_s = f(s) * B_{s+1}/B_s` for any solution of the recurrence.
pub fn parabolic_cf_rescaling(m: &ModelV1, e: f64, s: usize) -> Result<f64> {
    let w = m.omega;
    let sk2 = m.sk2();
    // gamma_s = -w (s + c) with this c:
    let c = -0.5 * (e + m.k1 * m.k1 / (8.0 * w * w)) / w + 0.5 * sk2;
    let sf = s as f64;
    if sf + c + 1.0 <= 0.0 || sf + 1.0 + sk2 <= 0.0 {
        return Err(Error::Domain(format!(
            "rescaling breaks down at s = {s}: Gamma argument not positive"
        )));
    }
    Ok((0.5 * w).sqrt() * gamma_step(c, sf)?
        / (gamma_step(1.0, sf)? * gamma_step(1.0 + sk2, sf)?))
}

/// Partial denominator `b_s` of the normalized tail recurrence
/// `B_{s+1} = b_s B_s + B_{s-1}`, where `A_s = B_s * prod_{j<s} f(j)`.
///
/// In the bound regime (`k1 = 0`, `lambda < 0`, energy below the spectrum)
/// every `b_s` is positive for large `s`, which brackets the tail ratio.
pub fn parabolic_cf_denominator(m: &ModelV1, e: f64, lambda: f64, s: usize) -> Result<f64> {
    if s == 0 {
        return Err(Error::ParameterDomain(
            "b_0 does not exist; the normal form starts at row 1".into(),
        ));
    }
    let (_, beta, gamma) = parabolic_infinite_row(m, e, lambda, s);
    if gamma == 0.0 {
        return Err(Error::NumericDegeneracy(format!("gamma vanishes at row {s}")));
    }
    Ok(beta * parabolic_cf_rescaling(m, e, s - 1)? / gamma)
}

/// Value of the finite continued fraction
/// `b[last] + 1/(b[last-1] + 1/(... + 1/b[0]))`.
///
/// With every entry equal to 1 this converges to the golden ratio.
pub fn finite_continued_fraction(b: &[f64]) -> f64 {
    let mut v = b[0];
    for &x in &b[1..] {
        v = x + 1.0 / v;
    }
    v
}

/// Ratio `xi_s = B_{s+1} / B_s` of the rescaled solution regular at the
/// origin, evaluated as a continued fraction descending `depth` levels from
/// row `s`.
///
/// If the descent reaches row 0 it terminates on the exact
/// `xi_0 = -beta_0 / (alpha_0 f(0))`; otherwise the deepest level seeds with
/// its bare partial denominator. The raw coefficient ratio of the regular
/// solution is recovered as `A_{s+1}/A_s = f(s) xi_s`. Away from the
/// algebraic energies this is a different solution from the tail measured by
/// [`tail_ratio_parabolic`], whose ratio is anchored at large `s` instead.
pub fn continued_fraction_xi(
    m: &ModelV1,
    e: f64,
    lambda: f64,
    s: usize,
    depth: usize,
) -> Result<f64> {
    if s == 0 || depth == 0 {
        return Err(Error::ParameterDomain(
            "continued fraction needs s >= 1 and depth >= 1".into(),
        ));
    }
    let bottom = s.saturating_sub(depth).max(1);
    let mut terms = Vec::with_capacity(s - bottom + 2);
    if bottom == 1 {
        // exact termination at row 0
        let (a0, b0, _) = parabolic_infinite_row(m, e, lambda, 0);
        terms.push(-b0 / (a0 * parabolic_cf_rescaling(m, e, 0)?));
    } else {
        terms.push(parabolic_cf_denominator(m, e, lambda, bottom - 1)?);
    }
    for j in bottom..=s {
        terms.push(parabolic_cf_denominator(m, e, lambda, j)?);
    }
    Ok(finite_continued_fraction(&terms))
}
