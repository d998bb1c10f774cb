//! Inner products between states: Gram matrices for every implemented
//! basis, the unweighted one-dimensional orthogonality of separated
//! factors, and the change of basis between parabolic and Cartesian states
//! at a shared energy level, computed both by quadrature projection and by
//! a closed Hermite-moment sum.

use crate::error::{Error, Result};
use crate::model::{ModelV1, ModelV2};
use crate::quad::{gauss_legendre, integrate_tanh_sinh};
use crate::specfn::ln_gamma;
use crate::wavefn::{
    hermite_shifted, parabolic_multiplet, singular_oscillator_1d, CartesianStateV1,
    EllipticState, ParabolicState, PolarStateV2,
};
use rayon::prelude::*;

/// Composite Gauss-Legendre nodes and weights on `(a, b)`.
fn composite_nodes(order: usize, panels: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let (xs, ws) = gauss_legendre(order)?;
    let mut nodes = Vec::with_capacity(order * panels);
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in xs.iter().zip(&ws) {
            nodes.push((mid + half * x, half * w));
        }
    }
    Ok(nodes)
}

/// Pairwise integrals of one-dimensional factors on `(0, upper)`, with the
/// factors scaled by their own norms so every integrand is of unit scale.
///
/// Returns `(scales, plain, weighted)`: `scales[i]` is the norm of factor
/// `i`, `plain[i][j]` integrates the scaled product, `weighted[i][j]` adds
/// the weight function. Scaling keeps the cancellation noise of the
/// near-zero off-diagonal integrals below the convergence tolerance, which
/// bare factors of large amplitude would defeat.
fn scaled_pair_integrals<F, W>(
    dim: usize,
    upper: f64,
    factor: F,
    weight: W,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)>
where
    F: Fn(usize, f64) -> f64,
    W: Fn(f64) -> f64,
{
    let mut scales = vec![0.0; dim];
    for (i, s) in scales.iter_mut().enumerate() {
        let self_int = integrate_tanh_sinh(0.0, upper, 1e-12, 12, |u| {
            let v = factor(i, u);
            v * v
        })?;
        if !(self_int > 0.0) || !self_int.is_finite() {
            return Err(Error::Accuracy(format!(
                "factor {i} has self integral {self_int}"
            )));
        }
        *s = self_int.sqrt();
    }
    let mut plain = vec![vec![0.0; dim]; dim];
    let mut weighted = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let p = integrate_tanh_sinh(0.0, upper, 1e-12, 12, |u| {
                factor(i, u) * factor(j, u) / (scales[i] * scales[j])
            })?;
            let w = integrate_tanh_sinh(0.0, upper, 1e-12, 12, |u| {
                weight(u) * factor(i, u) * factor(j, u) / (scales[i] * scales[j])
            })?;
            plain[i][j] = p;
            plain[j][i] = p;
            weighted[i][j] = w;
            weighted[j][i] = w;
        }
    }
    Ok((scales, plain, weighted))
}

fn pairwise_identity_defect(g: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

/// Largest deviation of a Gram matrix from the identity.
pub fn gram_identity_defect(g: &[Vec<f64>]) -> f64 {
    pairwise_identity_defect(g)
}

// ---------------------------------------------------------------------------
// Gram matrices
// ---------------------------------------------------------------------------

/// Plane Gram matrix of parabolic states by genuine two-dimensional tensor
/// quadrature with the parabolic volume weight.
pub fn gram_parabolic_2d(
    states: &[ParabolicState],
    order: usize,
    panels: usize,
) -> Result<Vec<Vec<f64>>> {
    if states.is_empty() {
        return Ok(Vec::new());
    }
    let u1_max = states
        .iter()
        .map(|s| s.cutoff_u1())
        .fold(0.0f64, f64::max);
    let u2_max = states
        .iter()
        .map(|s| s.cutoff_u2())
        .fold(0.0f64, f64::max);
    let n1 = composite_nodes(order, panels, 0.0, u1_max)?;
    let n2 = composite_nodes(order, panels, 0.0, u2_max)?;
    // cache each state's factors on the two axes
    let fvals: Vec<Vec<f64>> = states
        .par_iter()
        .map(|s| n1.iter().map(|&(u, _)| s.norm * s.xi_factor(u)).collect())
        .collect();
    let gvals: Vec<Result<Vec<f64>>> = states
        .par_iter()
        .map(|s| n2.iter().map(|&(u, _)| s.eta_factor(u)).collect())
        .collect();
    let gvals = gvals.into_iter().collect::<Result<Vec<_>>>()?;
    let dim = states.len();
    let mut gram = vec![vec![0.0; dim]; dim];
    let entries: Vec<((usize, usize), f64)> = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(i, j)| {
            let mut acc = 0.0;
            for (a, &(u1, w1)) in n1.iter().enumerate() {
                let fi = fvals[i][a] * fvals[j][a];
                if fi == 0.0 {
                    continue;
                }
                let mut inner_w = 0.0; // sum w2 * g_i g_j * u2^2
                let mut inner_0 = 0.0; // sum w2 * g_i g_j
                for (b, &(u2, w2)) in n2.iter().enumerate() {
                    let gg = gvals[i][b] * gvals[j][b];
                    inner_0 += w2 * gg;
                    inner_w += w2 * gg * u2 * u2;
                }
                acc += w1 * fi * (u1 * u1 * inner_0 + inner_w);
            }
            ((i, j), 2.0 * acc)
        })
        .collect();
    for ((i, j), v) in entries {
        gram[i][j] = v;
        gram[j][i] = v;
    }
    Ok(gram)
}

/// The same Gram matrix through the factorized route: the parabolic weight
/// splits into four one-dimensional integrals per pair.
pub fn gram_parabolic_factorized(states: &[ParabolicState]) -> Result<Vec<Vec<f64>>> {
    let dim = states.len();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let u1_max = states
        .iter()
        .map(|s| s.cutoff_u1())
        .fold(0.0f64, f64::max);
    let u2_max = states
        .iter()
        .map(|s| s.cutoff_u2())
        .fold(0.0f64, f64::max);
    let (s_xi, xi_0, xi_w) =
        scaled_pair_integrals(dim, u1_max, |i, u| states[i].xi_factor(u), |u| u * u)?;
    let (s_eta, eta_0, eta_w) = scaled_pair_integrals(
        dim,
        u2_max,
        |i, u| states[i].eta_factor(u).unwrap_or(f64::NAN),
        |u| u * u,
    )?;
    let mut gram = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let rescale = s_xi[i] * s_xi[j] * s_eta[i] * s_eta[j];
            let v = 2.0
                * states[i].norm
                * states[j].norm
                * rescale
                * (xi_w[i][j] * eta_0[i][j] + xi_0[i][j] * eta_w[i][j]);
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

/// Plane Gram matrix of elliptic states by two-dimensional tensor
/// quadrature with the elliptic volume weight (quadrant integral scaled to
/// the plane).
pub fn gram_elliptic_2d(
    states: &[EllipticState],
    order: usize,
    panels: usize,
) -> Result<Vec<Vec<f64>>> {
    if states.is_empty() {
        return Ok(Vec::new());
    }
    let d2 = states[0].d2;
    let u1_max = states
        .iter()
        .map(|s| s.cutoff_u1())
        .fold(0.0f64, f64::max);
    let n1 = composite_nodes(order, panels, 0.0, u1_max)?;
    let n2 = composite_nodes(order, panels, 0.0, std::f64::consts::FRAC_PI_2)?;
    let rvals: Vec<Vec<f64>> = states
        .par_iter()
        .map(|s| n1.iter().map(|&(u, _)| s.norm * s.radial_factor(u)).collect())
        .collect();
    let avals: Vec<Result<Vec<f64>>> = states
        .par_iter()
        .map(|s| n2.iter().map(|&(u, _)| s.angular_factor(u)).collect())
        .collect();
    let avals = avals.into_iter().collect::<Result<Vec<_>>>()?;
    let dim = states.len();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| (i..dim).map(move |j| (i, j)))
        .collect();
    let entries: Vec<((usize, usize), f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut acc = 0.0;
            for (a, &(u1, w1)) in n1.iter().enumerate() {
                let rr = rvals[i][a] * rvals[j][a];
                if rr == 0.0 {
                    continue;
                }
                let ch2 = u1.cosh().powi(2);
                let mut inner_c = 0.0;
                let mut inner_0 = 0.0;
                for (b, &(u2, w2)) in n2.iter().enumerate() {
                    let aa = avals[i][b] * avals[j][b];
                    inner_0 += w2 * aa;
                    inner_c += w2 * aa * u2.cos().powi(2);
                }
                acc += w1 * rr * (ch2 * inner_0 - inner_c);
            }
            // quadrant integral times 4 puts the diagonal at 1
            ((i, j), 4.0 * 0.25 * d2 * acc)
        })
        .collect();
    let mut gram = vec![vec![0.0; dim]; dim];
    for ((i, j), v) in entries {
        gram[i][j] = v;
        gram[j][i] = v;
    }
    Ok(gram)
}

/// Factorized route for the elliptic Gram matrix.
pub fn gram_elliptic_factorized(states: &[EllipticState]) -> Result<Vec<Vec<f64>>> {
    let dim = states.len();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let d2 = states[0].d2;
    let u1_max = states
        .iter()
        .map(|s| s.cutoff_u1())
        .fold(0.0f64, f64::max);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (s_rad, rad_0, rad_c) = scaled_pair_integrals(
        dim,
        u1_max,
        |i, u| states[i].radial_factor(u),
        |u| {
            let c = u.cosh();
            c * c
        },
    )?;
    let (s_ang, ang_0, ang_c) = scaled_pair_integrals(
        dim,
        half_pi,
        |i, u| states[i].angular_factor(u).unwrap_or(f64::NAN),
        |u| {
            let c = u.cos();
            c * c
        },
    )?;
    let mut gram = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let rescale = s_rad[i] * s_rad[j] * s_ang[i] * s_ang[j];
            let v = d2
                * states[i].norm
                * states[j].norm
                * rescale
                * (rad_c[i][j] * ang_0[i][j] - rad_0[i][j] * ang_c[i][j]);
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

/// Gram matrix of the level-`n` Cartesian shell of the tilted model; the
/// plane inner product factorizes into exact one-dimensional integrals.
pub fn gram_cartesian_v1(m: &ModelV1, n: usize) -> Result<Vec<Vec<f64>>> {
    let w = m.omega;
    let x_half = ((42.0 + 2.0 * n as f64) / (2.0 * w)).sqrt() + 1.0;
    let y_max = (45.0 / w).sqrt() + 1.0;
    let xc = m.x_center();
    let dim = n + 1;
    let mut gram = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let (a1, a2) = (i, n - i);
            let (b1, b2) = (j, n - j);
            let hx = integrate_tanh_sinh(xc - x_half, xc + x_half, 1e-12, 12, |x| {
                hermite_shifted(m, a1, x).unwrap_or(f64::NAN)
                    * hermite_shifted(m, b1, x).unwrap_or(f64::NAN)
            })?;
            let sy = integrate_tanh_sinh(0.0, y_max, 1e-12, 12, |y| {
                singular_oscillator_1d(w, m.sk2(), a2, y).unwrap_or(f64::NAN)
                    * singular_oscillator_1d(w, m.sk2(), b2, y).unwrap_or(f64::NAN)
            })?;
            // even extension: plane = 2 * upper half plane, and each state
            // carries 1/sqrt(2)
            let v = hx * sy;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

/// Gram matrix of the level-`n` Cartesian shell of the doubly singular
/// model (plane convention, diagonal 1).
pub fn gram_cartesian_v2(m: &ModelV2, n: usize) -> Result<Vec<Vec<f64>>> {
    let w = m.omega;
    let r_max = (45.0 / w).sqrt() + 1.0;
    let dim = n + 1;
    let mut gram = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let sx = integrate_tanh_sinh(0.0, r_max, 1e-12, 12, |x| {
                singular_oscillator_1d(w, m.sk1(), i, x).unwrap_or(f64::NAN)
                    * singular_oscillator_1d(w, m.sk1(), j, x).unwrap_or(f64::NAN)
            })?;
            let sy = integrate_tanh_sinh(0.0, r_max, 1e-12, 12, |y| {
                singular_oscillator_1d(w, m.sk2(), n - i, y).unwrap_or(f64::NAN)
                    * singular_oscillator_1d(w, m.sk2(), n - j, y).unwrap_or(f64::NAN)
            })?;
            let v = sx * sy;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

/// Gram matrix of the level-`n` polar shell (plane convention, diagonal 1).
pub fn gram_polar(m: &ModelV2, n: usize) -> Result<Vec<Vec<f64>>> {
    let w = m.omega;
    let r_max = ((45.0 + 2.0 * n as f64) / w).sqrt() + 1.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let dim = n + 1;
    let mut gram = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let a = PolarStateV2::new(*m, n - i, i);
            let b = PolarStateV2::new(*m, n - j, j);
            let rad = integrate_tanh_sinh(0.0, r_max, 1e-12, 12, |r| {
                r * a.radial(r).unwrap_or(f64::NAN) * b.radial(r).unwrap_or(f64::NAN)
            })?;
            let ang = integrate_tanh_sinh(0.0, half_pi, 1e-12, 12, |p| {
                a.angular(p).unwrap_or(f64::NAN) * b.angular(p).unwrap_or(f64::NAN)
            })?;
            let v = 4.0 * rad * ang;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

// ---------------------------------------------------------------------------
// Unweighted one-dimensional orthogonality
// ---------------------------------------------------------------------------

/// Largest normalized unweighted overlap between distinct separated
/// factors of a parabolic multiplet, on each axis: the factors of a shared
/// level are orthogonal with plain measure, with no volume weight.
pub fn double_orthogonality_parabolic(states: &[ParabolicState]) -> Result<(f64, f64)> {
    let dim = states.len();
    if dim == 0 {
        return Ok((0.0, 0.0));
    }
    let u1_max = states
        .iter()
        .map(|s| s.cutoff_u1())
        .fold(0.0f64, f64::max);
    let u2_max = states
        .iter()
        .map(|s| s.cutoff_u2())
        .fold(0.0f64, f64::max);
    // the scaled plain integrals are exactly the normalized overlaps
    let (_, xi, _) =
        scaled_pair_integrals(dim, u1_max, |i, u| states[i].xi_factor(u), |_| 0.0)?;
    let (_, eta, _) = scaled_pair_integrals(
        dim,
        u2_max,
        |i, u| states[i].eta_factor(u).unwrap_or(f64::NAN),
        |_| 0.0,
    )?;
    let mut worst_xi = 0.0f64;
    let mut worst_eta = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            worst_xi = worst_xi.max(xi[i][j].abs());
            worst_eta = worst_eta.max(eta[i][j].abs());
        }
    }
    Ok((worst_xi, worst_eta))
}

/// The elliptic counterpart: radial and angular factors of a shared level
/// are orthogonal with plain measure.
pub fn double_orthogonality_elliptic(states: &[EllipticState]) -> Result<(f64, f64)> {
    let dim = states.len();
    if dim == 0 {
        return Ok((0.0, 0.0));
    }
    let u1_max = states
        .iter()
        .map(|s| s.cutoff_u1())
        .fold(0.0f64, f64::max);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (_, rad, _) =
        scaled_pair_integrals(dim, u1_max, |i, u| states[i].radial_factor(u), |_| 0.0)?;
    let (_, ang, _) = scaled_pair_integrals(
        dim,
        half_pi,
        |i, u| states[i].angular_factor(u).unwrap_or(f64::NAN),
        |_| 0.0,
    )?;
    let mut worst_rad = 0.0f64;
    let mut worst_ang = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            worst_rad = worst_rad.max(rad[i][j].abs());
            worst_ang = worst_ang.max(ang[i][j].abs());
        }
    }
    Ok((worst_rad, worst_ang))
}

// ---------------------------------------------------------------------------
// Parabolic <-> Cartesian change of basis
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterbasisMethod {
    /// Two-dimensional quadrature of parabolic against Cartesian states.
    Projection,
    /// Hermite-moment closed sum (requires `k1 = 0`).
    ClosedSum,
}

/// Change of basis at level `n`: rows are parabolic states by rank, columns
/// Cartesian states by the first oscillator index.
#[derive(Debug, Clone)]
pub struct InterbasisMatrix {
    pub degree: usize,
    pub entries: Vec<Vec<f64>>,
    pub method: InterbasisMethod,
}

impl InterbasisMatrix {
    /// Largest deviation of W W^T from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let dim = self.entries.len();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let dot: f64 = (0..self.entries[i].len())
                    .map(|k| self.entries[i][k] * self.entries[j][k])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Projection route, valid for any tilt: overlap of each normalized
/// parabolic state with each Cartesian state of the same level, by tensor
/// quadrature in parabolic coordinates.
pub fn interbasis_projection(
    m: &ModelV1,
    n: usize,
    order: usize,
    panels: usize,
) -> Result<InterbasisMatrix> {
    let states = parabolic_multiplet(m, n)?;
    let u1_max = states
        .iter()
        .map(|s| s.cutoff_u1())
        .fold(0.0f64, f64::max);
    let u2_max = states
        .iter()
        .map(|s| s.cutoff_u2())
        .fold(0.0f64, f64::max);
    let n1_nodes = composite_nodes(order, panels, 0.0, u1_max)?;
    let n2_nodes = composite_nodes(order, panels, 0.0, u2_max)?;
    let cart: Vec<CartesianStateV1> = (0..=n)
        .map(|n1| CartesianStateV1::new(*m, n1, n - n1))
        .collect();
    // Cartesian values on the parabolic grid, one matrix per column state
    let cart_grid: Vec<Result<Vec<Vec<f64>>>> = cart
        .par_iter()
        .map(|c| {
            n1_nodes
                .iter()
                .map(|&(u1, _)| {
                    n2_nodes
                        .iter()
                        .map(|&(u2, _)| {
                            let x = 0.5 * (u1 * u1 - u2 * u2);
                            let y = u1 * u2;
                            c.eval(x, y)
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<Vec<f64>>>>()
        })
        .collect();
    let cart_grid = cart_grid.into_iter().collect::<Result<Vec<_>>>()?;
    let entries: Vec<Vec<f64>> = states
        .par_iter()
        .map(|st| {
            let fv: Vec<f64> = n1_nodes
                .iter()
                .map(|&(u, _)| st.norm * st.xi_factor(u))
                .collect();
            let gv: Vec<f64> = n2_nodes
                .iter()
                .map(|&(u, _)| st.eta_factor(u).unwrap_or(f64::NAN))
                .collect();
            cart_grid
                .iter()
                .map(|cg| {
                    let mut acc = 0.0;
                    for (a, &(u1, w1)) in n1_nodes.iter().enumerate() {
                        let mut inner = 0.0;
                        for (b, &(u2, w2)) in n2_nodes.iter().enumerate() {
                            inner += w2 * gv[b] * cg[a][b] * (u1 * u1 + u2 * u2);
                        }
                        acc += w1 * fv[a] * inner;
                    }
                    2.0 * acc
                })
                .collect()
        })
        .collect();
    Ok(InterbasisMatrix {
        degree: n,
        entries,
        method: InterbasisMethod::Projection,
    })
}

/// Closed-sum route at zero tilt.
///
/// Matching both sides of the expansion on the singular line removes the
/// second coordinate; Hermite orthogonality then gives each entry as a
/// finite moment sum over the polynomial coefficients:
/// the entry is proportional to
/// `sum_t A_{n1 + 2t} (2/w)^{(n1+2t)/2} (n1+2t)! / (4^t t!)`,
/// normalized by the edge values of the Cartesian factors. (The moment
/// identity used: the integral of `x^{n+2t} e^{-x^2} H_n(x)` over the line
/// is `sqrt(pi) (n+2t)! / (2^{2t} t!)`.)
pub fn interbasis_closed_sum(m: &ModelV1, n: usize) -> Result<InterbasisMatrix> {
    if m.k1 != 0.0 {
        return Err(Error::ParameterDomain(format!(
            "closed-sum change of basis needs zero tilt, got k1 = {}",
            m.k1
        )));
    }
    let w = m.omega;
    let sk2 = m.sk2();
    let states = parabolic_multiplet(m, n)?;
    let mut entries = Vec::with_capacity(states.len());
    for st in &states {
        let mut row = Vec::with_capacity(n + 1);
        for n1 in 0..=n {
            let n2 = n - n1;
            // edge slope of the Cartesian singular factor
            let c_n2 = (0.5
                * (2.0f64.ln() + (1.0 + sk2) * w.ln() + ln_gamma(n2 as f64 + 1.0)?
                    - ln_gamma(n2 as f64 + sk2 + 1.0)?))
            .exp();
            let b_n2 = (ln_gamma(n2 as f64 + sk2 + 1.0)?
                - ln_gamma(n2 as f64 + 1.0)?
                - ln_gamma(sk2 + 1.0)?)
            .exp();
            // Hermite moment sum over coefficients with index n1, n1+2, ...
            let mut moment = 0.0;
            let mut t = 0usize;
            while n1 + 2 * t <= n {
                let s = n1 + 2 * t;
                let term = st.coefficients[s]
                    * ((s as f64 / 2.0) * (2.0 / w).ln() + ln_gamma(s as f64 + 1.0)?
                        - (t as f64) * 4.0f64.ln()
                        - ln_gamma(t as f64 + 1.0)?)
                    .exp();
                moment += term;
                t += 1;
            }
            let prefactor = 2.0f64.sqrt() * st.norm / (c_n2 * b_n2)
                * (2.0 * w / std::f64::consts::PI).powf(0.25)
                * std::f64::consts::PI.sqrt()
                / (2.0 * w).sqrt()
                / ((n1 as f64) * 2.0f64.ln() + ln_gamma(n1 as f64 + 1.0)?)
                    .exp()
                    .sqrt();
            row.push(prefactor * moment);
        }
        entries.push(row);
    }
    Ok(InterbasisMatrix {
        degree: n,
        entries,
        method: InterbasisMethod::ClosedSum,
    })
}

/// Worst pointwise error of reconstructing each parabolic state from the
/// Cartesian shell through `w`.
pub fn reconstruction_residual(
    m: &ModelV1,
    w: &InterbasisMatrix,
    points: &[(f64, f64)],
) -> Result<f64> {
    let n = w.degree;
    let states = parabolic_multiplet(m, n)?;
    let cart: Vec<CartesianStateV1> = (0..=n)
        .map(|n1| CartesianStateV1::new(*m, n1, n - n1))
        .collect();
    let mut worst = 0.0f64;
    for (q, st) in states.iter().enumerate() {
        for &(x, y) in points {
            let direct = st.eval(x, y)?;
            let mut expanded = 0.0;
            for (n1, c) in cart.iter().enumerate() {
                expanded += w.entries[q][n1] * c.eval(x, y)?;
            }
            worst = worst.max((direct - expanded).abs());
        }
    }
    Ok(worst)
}
