//! Finite-difference cross-checks.
//!
//! Everything the algebraic routes produce — separation constants, plane
//! energies, the sextic reduction — is recomputed here from discretized
//! Schroedinger operators that share no code with those routes: central
//! differences, Dirichlet walls, Sturm bisection or banded inverse
//! iteration, one Richardson step. Agreement between the two pipelines is
//! the main correctness evidence of the crate.
//!
//! Ordering conventions rest on node counts. Within a degree-`n` multiplet
//! the state of rank `q` has exactly `q` nodes on the first separated axis
//! and `n - q` on the second, so the multiplet occupies precisely the
//! lowest `n + 1` eigenvalues of each one-dimensional separated operator,
//! in rank order on the first axis and reversed on the second.

use crate::error::{Error, Result};
use crate::linalg::{banded_smallest_eigen, sym_tridiag_smallest, BandMatrix};
use crate::model::{sextic_potential, ModelV1, ModelV2, SexticParameters};

/// Which separated axis of the parabolic system to discretize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParabolicAxis {
    Xi,
    Eta,
}

/// Which separated axis of the elliptic system to discretize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticAxis {
    Radial,
    Angular,
}

/// Lowest `count` eigenvalues of `-kappa d^2/dx^2 + V` on `(a, b)` with
/// Dirichlet walls, central differences on `grid` subintervals.
pub fn fd_lowest_1d<V>(
    a: f64,
    b: f64,
    grid: usize,
    count: usize,
    kappa: f64,
    potential: V,
) -> Result<Vec<f64>>
where
    V: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::ParameterDomain(format!(
            "discretization range must be finite and ordered, got [{a}, {b}]"
        )));
    }
    if grid < count + 2 || grid < 8 {
        return Err(Error::ParameterDomain(format!(
            "grid of {grid} subintervals cannot resolve {count} eigenvalues"
        )));
    }
    let h = (b - a) / grid as f64;
    let inv_h2 = kappa / (h * h);
    let n = grid - 1;
    let mut diag = Vec::with_capacity(n);
    for j in 1..=n {
        let x = a + j as f64 * h;
        let v = potential(x);
        if !v.is_finite() {
            return Err(Error::Domain(format!("potential not finite at {x}")));
        }
        diag.push(2.0 * inv_h2 + v);
    }
    let off = vec![-inv_h2; n - 1];
    sym_tridiag_smallest(&diag, &off, count)
}

/// `fd_lowest_1d` on `grid` and `2 grid` subintervals combined as
/// `(4 e_fine - e_coarse) / 3`: the central-difference eigenvalue error is
/// even in `h`, so one Richardson step removes the `h^2` term.
pub fn fd_lowest_1d_refined<V>(
    a: f64,
    b: f64,
    grid: usize,
    count: usize,
    kappa: f64,
    potential: V,
) -> Result<Vec<f64>>
where
    V: Fn(f64) -> f64,
{
    let coarse = fd_lowest_1d(a, b, grid, count, kappa, &potential)?;
    let fine = fd_lowest_1d(a, b, 2 * grid, count, kappa, &potential)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Lowest `count` eigenvalues of `-(1/2) laplacian + V` on an open box with
/// Dirichlet walls, five-point differences on an `nx` by `ny` interior
/// grid.
pub fn fd_lowest_2d<V>(
    range_x: (f64, f64),
    range_y: (f64, f64),
    nx: usize,
    ny: usize,
    count: usize,
    seed: u64,
    potential: V,
) -> Result<Vec<f64>>
where
    V: Fn(f64, f64) -> f64,
{
    let (ax, bx) = range_x;
    let (ay, by) = range_y;
    if !(ax < bx && ay < by) || !(ax.is_finite() && bx.is_finite() && ay.is_finite() && by.is_finite())
    {
        return Err(Error::ParameterDomain(format!(
            "box must be finite and ordered, got [{ax}, {bx}] x [{ay}, {by}]"
        )));
    }
    if nx < 4 || ny < 4 {
        return Err(Error::ParameterDomain(format!(
            "interior grid {nx} x {ny} is too small"
        )));
    }
    let hx = (bx - ax) / (nx + 1) as f64;
    let hy = (by - ay) / (ny + 1) as f64;
    let (cx, cy) = (0.5 / (hx * hx), 0.5 / (hy * hy));
    let n = nx * ny;
    let mut mat = BandMatrix::zeros(n, nx);
    for iy in 0..ny {
        let y = ay + (iy + 1) as f64 * hy;
        for ix in 0..nx {
            let x = ax + (ix + 1) as f64 * hx;
            let v = potential(x, y);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "potential not finite at ({x}, {y})"
                )));
            }
            let idx = iy * nx + ix;
            mat.add_at(idx, idx, 2.0 * cx + 2.0 * cy + v);
            if ix + 1 < nx {
                mat.add_at(idx, idx + 1, -cx);
            }
            if iy + 1 < ny {
                mat.add_at(idx, idx + nx, -cy);
            }
        }
    }
    let (values, _) = banded_smallest_eigen(&mat, count, 1e-11, 1000, seed)?;
    Ok(values)
}

/// One Richardson step over `fd_lowest_2d` at doubled interior resolution.
///
/// Doubling `nx -> 2 nx + 1` halves both steps exactly, so the extrapolation
/// `(4 e_fine - e_coarse) / 3` cancels the `h^2` error term.
pub fn fd_lowest_2d_refined<V>(
    range_x: (f64, f64),
    range_y: (f64, f64),
    nx: usize,
    ny: usize,
    count: usize,
    seed: u64,
    potential: V,
) -> Result<Vec<f64>>
where
    V: Fn(f64, f64) -> f64,
{
    let coarse = fd_lowest_2d(range_x, range_y, nx, ny, count, seed, &potential)?;
    let fine = fd_lowest_2d(
        range_x,
        range_y,
        2 * nx + 1,
        2 * ny + 1,
        count,
        seed,
        &potential,
    )?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Reach of the quartic-gauge decay for the parabolic separated equations.
fn parabolic_reach(omega: f64) -> f64 {
    (180.0 / omega).powf(0.25) + 2.0
}

/// Separation constants of the degree-`n` parabolic multiplet from a
/// finite-difference discretization of one separated axis, in rank order.
///
/// The first-axis operator carries the multiplet as its lowest `n + 1`
/// eigenvalues in rank order; the second-axis operator carries the negated
/// constants in reversed rank order.
pub fn parabolic_separation_oracle(
    m: &ModelV1,
    n: usize,
    grid: usize,
    axis: ParabolicAxis,
) -> Result<Vec<f64>> {
    let (w, k1) = (m.omega, m.k1);
    let barrier = m.k2 * m.k2 - 0.25;
    let energy = m.energy(n);
    let quartic = match axis {
        ParabolicAxis::Xi => k1,
        ParabolicAxis::Eta => -k1,
    };
    let reach = parabolic_reach(w);
    let eigs = fd_lowest_1d_refined(0.0, reach, grid, n + 1, 1.0, |u| {
        let u2 = u * u;
        w * w * u2 * u2 * u2 + quartic * u2 * u2 - 2.0 * energy * u2 + barrier / u2
    })?;
    Ok(match axis {
        ParabolicAxis::Xi => eigs,
        ParabolicAxis::Eta => eigs.iter().rev().map(|e| -e).collect(),
    })
}

/// Separation constants of the degree-`n` elliptic multiplet at interfocal
/// parameter `d2`, from one separated axis, in rank order.
///
/// The separated operators carry the affinely shifted constant
/// `c = -lambda + d2 E / 4 + d2^2 w^2 / 64`: the radial operator has
/// eigenvalues `-c` (rank order), the angular one `+c` (reversed).
pub fn elliptic_separation_oracle(
    m: &ModelV2,
    n: usize,
    d2: f64,
    grid: usize,
    axis: EllipticAxis,
) -> Result<Vec<f64>> {
    if !(d2 > 0.0) || !d2.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "interfocal parameter must be positive and finite, got {d2}"
        )));
    }
    let w = m.omega;
    let energy = m.energy(n);
    let b1 = m.k1 * m.k1 - 0.25;
    let b2 = m.k2 * m.k2 - 0.25;
    let quart = d2 * d2 * w * w / 64.0;
    let shift = 0.25 * d2 * energy + quart;
    match axis {
        EllipticAxis::Radial => {
            // gauge decays like exp(-w d2 cosh^2 / 4); iterate the cutoff
            let beta = w * d2 / 8.0;
            let mut v = 1.0 + 45.0 / (2.0 * beta);
            for _ in 0..4 {
                v = 1.0 + (45.0 + (2.0 * n as f64 + 2.0) * v.max(2.0).ln()) / (2.0 * beta);
            }
            let reach = v.sqrt().acosh();
            let eigs = fd_lowest_1d_refined(0.0, reach, grid, n + 1, 1.0, |u| {
                let (ch, sh) = (u.cosh(), u.sinh());
                let s2 = 2.0 * sh * ch; // sinh(2u)
                quart * s2 * s2 - b1 / (ch * ch) + b2 / (sh * sh)
                    - 0.5 * d2 * energy * ch * ch
            })?;
            Ok(eigs.iter().map(|e| e + shift).collect())
        }
        EllipticAxis::Angular => {
            let eigs = fd_lowest_1d_refined(
                0.0,
                std::f64::consts::FRAC_PI_2,
                grid,
                n + 1,
                1.0,
                |u| {
                    let (c, s) = (u.cos(), u.sin());
                    let s2 = 2.0 * s * c; // sin(2u)
                    quart * s2 * s2 + b1 / (c * c) + b2 / (s * s)
                        + 0.5 * d2 * energy * c * c
                },
            )?;
            Ok(eigs.iter().rev().map(|e| shift - e).collect())
        }
    }
}

/// Lowest plane energies of the tilted model by two-dimensional finite
/// differences on the upper half plane (the barrier keeps repulsive
/// branches Dirichlet at the singular line; requires `k2 > 1/2`).
pub fn plane_energy_oracle_v1(m: &ModelV1, count: usize, grid: usize) -> Result<Vec<f64>> {
    if m.k2 <= 0.5 {
        return Err(Error::ParameterDomain(format!(
            "half-plane discretization needs a repulsive barrier, k2 = {} is not > 1/2",
            m.k2
        )));
    }
    let w = m.omega;
    let xc = m.x_center();
    let rx = (18.0 / w).sqrt() + 0.5;
    let ry = (36.0 / w).sqrt() + 0.5;
    fd_lowest_2d_refined(
        (xc - rx, xc + rx),
        (0.0, ry),
        grid,
        grid,
        count,
        0x0f_d0_01,
        |x, y| m.potential(x, y).unwrap_or(f64::NAN),
    )
}

/// Lowest plane energies of the doubly singular model by two-dimensional
/// finite differences on the open quadrant (requires `k1, k2 > 1/2`).
pub fn plane_energy_oracle_v2(m: &ModelV2, count: usize, grid: usize) -> Result<Vec<f64>> {
    if m.k1 <= 0.5 || m.k2 <= 0.5 {
        return Err(Error::ParameterDomain(format!(
            "quadrant discretization needs repulsive barriers, got k1 = {}, k2 = {}",
            m.k1, m.k2
        )));
    }
    let w = m.omega;
    let r = (36.0 / w).sqrt() + 0.5;
    fd_lowest_2d_refined(
        (0.0, r),
        (0.0, r),
        grid,
        grid,
        count,
        0x0f_d0_02,
        |x, y| m.potential(x, y).unwrap_or(f64::NAN),
    )
}

/// Twice the lowest `count` levels of the one-dimensional sextic problem,
/// which the algebraic route exposes as separation constants.
pub fn sextic_oracle(p: &SexticParameters, count: usize, grid: usize) -> Result<Vec<f64>> {
    let reach = parabolic_reach(p.omega);
    let eigs = fd_lowest_1d_refined(0.0, reach, grid, count, 0.5, |x| {
        sextic_potential(p, x).unwrap_or(f64::NAN)
    })?;
    Ok(eigs.iter().map(|e| 2.0 * e).collect())
}
