//! Deterministic quadrature: composite Gauss-Legendre panels and a
//! tanh-sinh rule for endpoint-singular integrands.
//!
//! Everything here is fixed-node and reproducible; adaptivity enters only
//! through the tanh-sinh level doubling, which stops on a stated tolerance.
//! Infinite ranges are handled by the callers, which know their integrands'
//! decay scales and pick explicit cutoffs.

use crate::error::{Error, Result};

/// Panel count and per-panel order of a composite Gauss-Legendre rule.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub order: usize,
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 32,
            panels: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize, panels: usize) -> Result<Self> {
        if !(2..=200).contains(&order) || panels == 0 || panels > 10_000 {
            return Err(Error::ParameterDomain(format!(
                "quadrature wants 2 <= order <= 200 and 1 <= panels <= 10000, got order {order}, panels {panels}"
            )));
        }
        Ok(QuadratureSpec { order, panels })
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre polynomial from the Chebyshev-like
/// initial guesses; exact for polynomials of degree `2 order - 1`.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(1..=200).contains(&order) {
        return Err(Error::ParameterDomain(format!(
            "Gauss-Legendre order out of range: {order}"
        )));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // symmetric rule: compute the lower half, mirror the rest
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and its derivative
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok((nodes, weights))
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate_1d<F>(spec: QuadratureSpec, a: f64, b: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "integration range must be finite, got [{a}, {b}]"
        )));
    }
    let (nodes, weights) = gauss_legendre(spec.order)?;
    let h = (b - a) / spec.panels as f64;
    let mut total = 0.0;
    for p in 0..spec.panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut panel = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let v = f(mid + half * x);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "integrand not finite at {}",
                    mid + half * x
                )));
            }
            panel += w * v;
        }
        total += panel * half;
    }
    Ok(total)
}

/// Tensor-product Gauss-Legendre integral of `f(x, y)` over a rectangle.
pub fn integrate_2d<F>(
    spec_x: QuadratureSpec,
    range_x: (f64, f64),
    spec_y: QuadratureSpec,
    range_y: (f64, f64),
    mut f: F,
) -> Result<f64>
where
    F: FnMut(f64, f64) -> f64,
{
    let (nx, wx) = gauss_legendre(spec_x.order)?;
    let (ny, wy) = gauss_legendre(spec_y.order)?;
    let hx = (range_x.1 - range_x.0) / spec_x.panels as f64;
    let hy = (range_y.1 - range_y.0) / spec_y.panels as f64;
    let mut total = 0.0;
    for px in 0..spec_x.panels {
        let midx = range_x.0 + (px as f64 + 0.5) * hx;
        for py in 0..spec_y.panels {
            let midy = range_y.0 + (py as f64 + 0.5) * hy;
            let mut panel = 0.0;
            for (xi, wxi) in nx.iter().zip(wx.iter()) {
                let x = midx + 0.5 * hx * xi;
                let mut row = 0.0;
                for (yj, wyj) in ny.iter().zip(wy.iter()) {
                    let y = midy + 0.5 * hy * yj;
                    let v = f(x, y);
                    if !v.is_finite() {
                        return Err(Error::Domain(format!(
                            "integrand not finite at ({x}, {y})"
                        )));
                    }
                    row += wyj * v;
                }
                panel += wxi * row;
            }
            total += panel * 0.25 * hx * hy;
        }
    }
    Ok(total)
}

/// Tanh-sinh integral of `f` over `[a, b]`, doubling the node density until
/// two consecutive levels agree to `tol` (relative to the scale of the
/// result) or `max_level` is hit.
///
/// The substitution pushes nodes double-exponentially into the endpoints,
/// which tames the fractional-power and logarithmic endpoint behavior that
/// defeats polynomial rules. The integrand must stay bounded or diverge at
/// most logarithmically toward the endpoints: nodes are placed by their
/// centered coordinate, so offsets below about `1e-16` of the range collapse
/// onto the endpoint and an integrand growing like a negative power there
/// would turn that collapse into noise. Endpoint values of `f` are never
/// requested; non-finite values at interior nodes are treated as zero only
/// when their weight already underflows, and are an error otherwise.
pub fn integrate_tanh_sinh<F>(a: f64, b: f64, tol: f64, max_level: u32, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::ParameterDomain(format!(
            "tanh-sinh range must be finite and ordered, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) || max_level < 2 || max_level > 14 {
        return Err(Error::ParameterDomain(
            "tanh-sinh wants tol > 0 and 2 <= max_level <= 14".into(),
        ));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let t_max = 6.1; // weights underflow past here
    let mut prev = f64::NAN;
    for level in 0..=max_level {
        let h = 1.0 / f64::from(1u32 << level);
        let kmax = (t_max / h).floor() as i64;
        let mut sum = 0.0;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let ch = u.cosh();
            let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (ch * ch);
            let x = mid + half * u.tanh();
            if x <= a || x >= b {
                continue; // node collapsed onto an endpoint in f64
            }
            let v = f(x);
            if !v.is_finite() {
                if w < 1e-280 {
                    continue;
                }
                return Err(Error::Domain(format!("integrand not finite at {x}")));
            }
            sum += w * v;
        }
        let est = sum * h * half;
        if level >= 2 && (est - prev).abs() <= tol * (1.0 + est.abs()) {
            return Ok(est);
        }
        prev = est;
    }
    Err(Error::Convergence(format!(
        "tanh-sinh failed to settle to {tol:.1e} within {max_level} levels"
    )))
}
