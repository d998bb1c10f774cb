//! Wavefunctions: exact one-dimensional bases and the gauge-dressed
//! polynomial states of the two models, with analytic derivatives for
//! residual checks and quadrature-backed normalization.
//!
//! Conventions. The tilted model lives on the full plane with a singular
//! line at `y = 0`; its states are normalized so the plane integral of
//! `|psi|^2` is 1, and they are even under `y -> -y`. The doubly singular
//! model is singular on both axes; each of its states is normalized to 1/4
//! per quadrant (1 on the plane after even extension).

use crate::error::{Error, Result};
use crate::model::{parabolic_from_cartesian, ModelV1, ModelV2};
use crate::qes::{solve_elliptic, solve_parabolic, QesState};
use crate::quad::integrate_tanh_sinh;
use crate::specfn::{eval_orthopoly, ln_gamma, PolyFamily};

fn poly_eval_d2(coeffs: &[f64], t: f64) -> (f64, f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    let mut ddp = 0.0;
    for &c in coeffs.iter().rev() {
        ddp = ddp * t + 2.0 * dp;
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp, ddp)
}

// ---------------------------------------------------------------------------
// One-dimensional bases
// ---------------------------------------------------------------------------

/// Normalized eigenfunction of the shifted stiff oscillator along `x` in the
/// tilted model: frequency `2 w`, centered on the potential minimum.
pub fn hermite_shifted(m: &ModelV1, n1: usize, x: f64) -> Result<f64> {
    let w = m.omega;
    let z = x - m.x_center();
    let ln_norm = 0.25 * (2.0 * w / std::f64::consts::PI).ln()
        - 0.5 * (n1 as f64 * 2.0f64.ln() + ln_gamma(n1 as f64 + 1.0)?);
    let h = eval_orthopoly(PolyFamily::Hermite, n1, (2.0 * w).sqrt() * z)?;
    Ok((ln_norm - w * z * z).exp() * h)
}

/// Normalized eigenfunction of the singular oscillator on the half line:
/// frequency `w`, signed barrier index `k` (so the edge behavior is
/// `y^(1/2 + k)`). Normalized with plain measure `dy` on `(0, inf)`.
pub fn singular_oscillator_1d(w: f64, k: f64, n2: usize, y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::Domain(format!(
            "half-line oscillator evaluated at y = {y}"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let ln_norm = 0.5
        * (2.0f64.ln() + (1.0 + k) * w.ln() + ln_gamma(n2 as f64 + 1.0)?
            - ln_gamma(n2 as f64 + k + 1.0)?);
    let l = eval_orthopoly(PolyFamily::Laguerre { alpha: k }, n2, w * y * y)?;
    Ok((ln_norm + (0.5 + k) * y.ln() - 0.5 * w * y * y).exp() * l)
}

/// Cartesian product state of the tilted model, even-extended across the
/// singular line and normalized on the plane. Energy `E_{n1 + n2}`.
#[derive(Debug, Clone)]
pub struct CartesianStateV1 {
    pub model: ModelV1,
    pub n1: usize,
    pub n2: usize,
}

impl CartesianStateV1 {
    pub fn new(model: ModelV1, n1: usize, n2: usize) -> Self {
        CartesianStateV1 { model, n1, n2 }
    }

    pub fn energy(&self) -> f64 {
        self.model.energy(self.n1 + self.n2)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let hx = hermite_shifted(&self.model, self.n1, x)?;
        let sy = singular_oscillator_1d(self.model.omega, self.model.sk2(), self.n2, y.abs())?;
        Ok(hx * sy / 2.0f64.sqrt())
    }
}

/// Cartesian product state of the doubly singular model, quadrant
/// normalization 1/4. Energy `E_{n1 + n2}`.
#[derive(Debug, Clone)]
pub struct CartesianStateV2 {
    pub model: ModelV2,
    pub n1: usize,
    pub n2: usize,
}

impl CartesianStateV2 {
    pub fn new(model: ModelV2, n1: usize, n2: usize) -> Self {
        CartesianStateV2 { model, n1, n2 }
    }

    pub fn energy(&self) -> f64 {
        self.model.energy(self.n1 + self.n2)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let sx = singular_oscillator_1d(self.model.omega, self.model.sk1(), self.n1, x.abs())?;
        let sy = singular_oscillator_1d(self.model.omega, self.model.sk2(), self.n2, y.abs())?;
        Ok(0.5 * sx * sy)
    }
}

/// Polar state of the doubly singular model: radial index `nr`, angular
/// index `m`, shell `n = nr + m`, quadrant normalization 1/4.
///
/// The angular factor is a Jacobi polynomial in `cos(2 phi)` against the
/// double Poeschl-Teller weight; the radial factor carries the effective
/// angular momentum `2 m + 1 +- k1 +- k2` and is normalized with the polar
/// measure `r dr`.
#[derive(Debug, Clone)]
pub struct PolarStateV2 {
    pub model: ModelV2,
    pub nr: usize,
    pub m_ang: usize,
}

impl PolarStateV2 {
    pub fn new(model: ModelV2, nr: usize, m_ang: usize) -> Self {
        PolarStateV2 { model, nr, m_ang }
    }

    pub fn energy(&self) -> f64 {
        self.model.energy(self.nr + self.m_ang)
    }

    pub fn radial(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let w = self.model.omega;
        let lam = 2.0 * self.m_ang as f64 + self.model.sk1() + self.model.sk2() + 1.0;
        let nr = self.nr;
        let ln_norm = 0.5
            * ((2.0 * w).ln() + ln_gamma(nr as f64 + 1.0)? - ln_gamma(nr as f64 + lam + 1.0)?);
        let l = eval_orthopoly(PolyFamily::Laguerre { alpha: lam }, nr, w * r * r)?;
        Ok((ln_norm + lam * (w.sqrt() * r).ln() - 0.5 * w * r * r).exp() * l)
    }

    pub fn angular(&self, phi: f64) -> Result<f64> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
            return Err(Error::Domain(format!(
                "angular factor wants phi in [0, pi/2], got {phi}"
            )));
        }
        if phi == 0.0 || phi == std::f64::consts::FRAC_PI_2 {
            return Ok(0.0);
        }
        let sk1 = self.model.sk1();
        let sk2 = self.model.sk2();
        let ma = self.m_ang as f64;
        let ln_norm = 0.5
            * ((2.0 * ma + sk1 + sk2 + 1.0).ln() + ln_gamma(ma + 1.0)?
                + ln_gamma(ma + sk1 + sk2 + 1.0)?
                - 2.0f64.ln()
                - ln_gamma(ma + sk2 + 1.0)?
                - ln_gamma(ma + sk1 + 1.0)?);
        let p = eval_orthopoly(
            PolyFamily::Jacobi {
                alpha: sk2,
                beta: sk1,
            },
            self.m_ang,
            (2.0 * phi).cos(),
        )?;
        Ok(ln_norm.exp()
            * phi.cos().powf(0.5 + sk1)
            * phi.sin().powf(0.5 + sk2)
            * p)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let (ax, ay) = (x.abs(), y.abs());
        let r = ax.hypot(ay);
        if r == 0.0 {
            return Ok(0.0);
        }
        let phi = ay.atan2(ax);
        Ok(self.radial(r)? * self.angular(phi)?)
    }
}

// ---------------------------------------------------------------------------
// Parabolic algebraic states of the tilted model
// ---------------------------------------------------------------------------

/// One algebraic state in parabolic coordinates: the shared polynomial in
/// both separated factors, dressed by the gauge, normalized on the plane.
#[derive(Debug, Clone)]
pub struct ParabolicState {
    pub model: ModelV1,
    pub degree: usize,
    pub rank: usize,
    pub lambda: f64,
    pub coefficients: Vec<f64>,
    pub node_split: (usize, usize),
    /// Multiplies the bare product of separated factors.
    pub norm: f64,
}

/// Build the whole degree-`n` multiplet, each state normalized on the plane.
pub fn parabolic_multiplet(m: &ModelV1, n: usize) -> Result<Vec<ParabolicState>> {
    let sol = solve_parabolic(m, n)?;
    sol.states
        .iter()
        .enumerate()
        .map(|(rank, st)| ParabolicState::from_state(*m, n, rank, st))
        .collect()
}

impl ParabolicState {
    fn from_state(model: ModelV1, degree: usize, rank: usize, st: &QesState) -> Result<Self> {
        let mut state = ParabolicState {
            model,
            degree,
            rank,
            lambda: st.lambda,
            coefficients: st.coefficients.clone(),
            node_split: st.node_split,
            norm: 1.0,
        };
        let plane = state.plane_integral_quadrature()?;
        if !(plane > 0.0) || !plane.is_finite() {
            return Err(Error::Accuracy(format!(
                "plane integral came out {plane} for degree {degree} rank {rank}"
            )));
        }
        state.norm = 1.0 / plane.sqrt();
        Ok(state)
    }

    /// Single state by rank; solves the whole multiplet internally.
    pub fn new(model: ModelV1, degree: usize, rank: usize) -> Result<Self> {
        let sol = solve_parabolic(&model, degree)?;
        let st = sol
            .states
            .get(rank)
            .ok_or_else(|| Error::ParameterDomain(format!("rank {rank} exceeds degree {degree}")))?;
        Self::from_state(model, degree, rank, st)
    }

    fn gauge_exponent(&self) -> f64 {
        0.5 + self.model.sk2()
    }

    /// Cutoff beyond which the separated factors are below 1e-18 scale.
    pub fn cutoff_u1(&self) -> f64 {
        cutoff_quartic(self.model.omega, self.model.k1, self.degree)
    }

    pub fn cutoff_u2(&self) -> f64 {
        cutoff_quartic(self.model.omega, -self.model.k1, self.degree)
    }

    /// First separated factor, even in `u1`; bare (no normalization).
    pub fn xi_factor(&self, u1: f64) -> f64 {
        let a = self.gauge_exponent();
        let w = self.model.omega;
        let k1 = self.model.k1;
        let t = u1 * u1;
        let (p, _, _) = poly_eval_d2(&self.coefficients, t);
        if u1 == 0.0 {
            return 0.0;
        }
        let h = 0.25 * w * t * t + (k1 / (4.0 * w)) * t;
        (a * u1.abs().ln() - h).exp() * p
    }

    /// Second separated factor on `u2 >= 0`; bare.
    pub fn eta_factor(&self, u2: f64) -> Result<f64> {
        if u2 < 0.0 {
            return Err(Error::Domain(format!(
                "second parabolic coordinate must be nonnegative, got {u2}"
            )));
        }
        if u2 == 0.0 {
            return Ok(0.0);
        }
        let a = self.gauge_exponent();
        let w = self.model.omega;
        let k1 = self.model.k1;
        let t = u2 * u2;
        let (p, _, _) = poly_eval_d2(&self.coefficients, -t);
        let h = 0.25 * w * t * t - (k1 / (4.0 * w)) * t;
        Ok((a * u2.ln() - h).exp() * p)
    }

    /// Normalized value at a parabolic point (`u2 >= 0`).
    pub fn eval_coords(&self, u1: f64, u2: f64) -> Result<f64> {
        Ok(self.norm * self.xi_factor(u1) * self.eta_factor(u2)?)
    }

    /// Normalized value at a Cartesian point.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let (u1, u2) = parabolic_from_cartesian(x, y);
        self.eval_coords(u1, u2)
    }

    fn plane_integral_quadrature(&self) -> Result<f64> {
        // weight u1^2 + u2^2 factorizes against the product form
        let u1_max = self.cutoff_u1();
        let u2_max = self.cutoff_u2();
        let i_w = integrate_tanh_sinh(0.0, u1_max, 1e-12, 12, |u| {
            let f = self.xi_factor(u);
            u * u * f * f
        })?;
        let i_0 = integrate_tanh_sinh(0.0, u1_max, 1e-12, 12, |u| {
            let f = self.xi_factor(u);
            f * f
        })?;
        let j_w = integrate_tanh_sinh(0.0, u2_max, 1e-12, 12, |u| {
            let g = self.eta_factor(u).unwrap_or(f64::NAN);
            u * u * g * g
        })?;
        let j_0 = integrate_tanh_sinh(0.0, u2_max, 1e-12, 12, |u| {
            let g = self.eta_factor(u).unwrap_or(f64::NAN);
            g * g
        })?;
        Ok(2.0 * (i_w * j_0 + i_0 * j_w))
    }

    fn factor_with_second_derivative(&self, u: f64, first_axis: bool) -> Result<(f64, f64)> {
        if u <= 0.0 {
            return Err(Error::Domain(
                "derivative evaluation wants a strictly positive coordinate".into(),
            ));
        }
        let a = self.gauge_exponent();
        let w = self.model.omega;
        let k1 = if first_axis { self.model.k1 } else { -self.model.k1 };
        let t = u * u;
        let (p, mut dp, ddp) = poly_eval_d2(&self.coefficients, if first_axis { t } else { -t });
        if !first_axis {
            // chain rule through the sign of the polynomial argument; the
            // second derivative keeps its sign
            dp = -dp;
        }
        let h1 = w * t * u + (k1 / (2.0 * w)) * u; // h'
        let h2 = 3.0 * w * t + k1 / (2.0 * w); // h''
        let g = (a * u.ln() - (0.25 * w * t * t + (k1 / (4.0 * w)) * t)).exp();
        let gl = a / u - h1; // g'/g
        let gll = gl * gl - a / t - h2; // g''/g
        // d/du P(t(u)) with t = +-u^2: dp already carries the sign
        let p1 = 2.0 * u * dp;
        let p2 = 2.0 * dp + 4.0 * t * ddp;
        let value = g * p;
        let second = g * (gll * p + 2.0 * gl * p1 + p2);
        Ok((value, second))
    }

    /// Normalized residual of the first separated equation at `u1 > 0`.
    pub fn ode_residual_u1(&self, u1: f64) -> Result<f64> {
        let (f, f2) = self.factor_with_second_derivative(u1, true)?;
        let m = &self.model;
        let t = u1 * u1;
        let e = m.energy(self.degree);
        let u_pot = m.omega * m.omega * t * t * t + m.k1 * t * t - 2.0 * e * t
            + (m.k2 * m.k2 - 0.25) / t;
        let terms = [-f2, u_pot * f, -self.lambda * f];
        let resid: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        Ok(resid.abs() / scale)
    }

    /// Normalized residual of the second separated equation at `u2 > 0`;
    /// the separation constant enters with the opposite sign here.
    pub fn ode_residual_u2(&self, u2: f64) -> Result<f64> {
        let (g, g2) = self.factor_with_second_derivative(u2, false)?;
        let m = &self.model;
        let t = u2 * u2;
        let e = m.energy(self.degree);
        let u_pot = m.omega * m.omega * t * t * t - m.k1 * t * t - 2.0 * e * t
            + (m.k2 * m.k2 - 0.25) / t;
        let terms = [-g2, u_pot * g, self.lambda * g];
        let resid: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        Ok(resid.abs() / scale)
    }

    /// Normalized residual of the full two-dimensional eigenvalue equation
    /// at a parabolic point (`u1, u2 > 0`).
    pub fn pde_residual(&self, u1: f64, u2: f64) -> Result<f64> {
        let (f, f2) = self.factor_with_second_derivative(u1, true)?;
        let (g, g2) = self.factor_with_second_derivative(u2, false)?;
        let m = &self.model;
        let rho = u1 * u1 + u2 * u2;
        let x = 0.5 * (u1 * u1 - u2 * u2);
        let y = u1 * u2;
        let v = m.potential(x, y)?;
        let e = m.energy(self.degree);
        let terms = [
            -0.5 * (f2 * g + f * g2) / rho,
            v * f * g,
            -e * f * g,
        ];
        let resid: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        Ok(resid.abs() / scale)
    }
}

/// Closed-form plane integral of a bare parabolic product state, through
/// term-by-term moments of the quartic gauge.
///
/// Each moment is a Gamma series in powers of `k1 / (2 w)`; at `k1 = 0` a
/// single term survives. Used as an independent check against quadrature.
pub fn parabolic_plane_integral_series(m: &ModelV1, coefficients: &[f64]) -> Result<f64> {
    let w = m.omega;
    let sk2 = m.sk2();
    let moment = |p: usize, j: usize, eta_side: bool| -> Result<f64> {
        let sign = if eta_side { 1.0 } else { -1.0 };
        let ratio = sign * m.k1 / (2.0 * w);
        let prefactor = if eta_side { 0.25 } else { 0.5 };
        let mut total = 0.0f64;
        let mut pow = 1.0f64; // ratio^mm / mm!
        for mm in 0..400 {
            let g = 0.5 * (1.0 + sk2 + p as f64 + j as f64 + mm as f64);
            let term = pow * (g * (2.0 / w).ln() + ln_gamma(g)?).exp();
            total += term;
            if mm > 4 && term.abs() < 1e-18 * total.abs().max(1.0) {
                return Ok(prefactor * total);
            }
            pow *= ratio / (mm as f64 + 1.0);
        }
        Err(Error::Convergence(
            "gauge moment series did not converge".into(),
        ))
    };
    let n = coefficients.len() - 1;
    let mut xi0 = vec![0.0; 2 * n + 1]; // sum over s + s' = p of A_s A_s'
    for (s, &a) in coefficients.iter().enumerate() {
        for (sp, &b) in coefficients.iter().enumerate() {
            xi0[s + sp] += a * b;
        }
    }
    let mut eta0 = vec![0.0; 2 * n + 1]; // with the alternating signs
    for (s, &a) in coefficients.iter().enumerate() {
        for (sp, &b) in coefficients.iter().enumerate() {
            let sgn = if (s + sp) % 2 == 0 { 1.0 } else { -1.0 };
            eta0[s + sp] += sgn * a * b;
        }
    }
    let mut total = 0.0;
    for (p, &cx) in xi0.iter().enumerate() {
        if cx == 0.0 {
            continue;
        }
        for (q, &ce) in eta0.iter().enumerate() {
            if ce == 0.0 {
                continue;
            }
            total += cx * ce * (moment(p, 1, false)? * moment(q, 0, true)?
                + moment(p, 0, false)? * moment(q, 1, true)?);
        }
    }
    // the doubling for the full first axis already sits in the moment
    // prefactors
    Ok(total)
}

fn cutoff_quartic(w: f64, k1: f64, degree: usize) -> f64 {
    // solve w t^2 / 2 + (k1 / 2w) t = budget for t = u^2, then pad for the
    // polynomial growth
    let mut t = (2.0 * 42.0 / w).sqrt();
    for _ in 0..4 {
        let budget = 42.0 + (2.0 * degree as f64 + 2.0) * t.max(1.0).ln();
        let b = k1 / (2.0 * w);
        t = ((b * b + 2.0 * w * budget).sqrt() - b) / w;
    }
    t.sqrt()
}

// ---------------------------------------------------------------------------
// Elliptic algebraic states of the doubly singular model
// ---------------------------------------------------------------------------

/// One elliptic algebraic state: the shared polynomial evaluated at
/// `cosh^2(u1)` radially and `cos^2(u2)` angularly, dressed by the gauges,
/// quadrant normalization 1/4.
#[derive(Debug, Clone)]
pub struct EllipticState {
    pub model: ModelV2,
    pub d2: f64,
    pub degree: usize,
    pub rank: usize,
    pub lambda: f64,
    pub coefficients: Vec<f64>,
    pub node_split: (usize, usize),
    pub norm: f64,
}

/// Build the whole degree-`n` elliptic multiplet at interfocal parameter
/// `d2 > 0`.
pub fn elliptic_multiplet(m: &ModelV2, n: usize, d2: f64) -> Result<Vec<EllipticState>> {
    let sol = solve_elliptic(m, n, d2)?;
    sol.states
        .iter()
        .enumerate()
        .map(|(rank, st)| EllipticState::from_state(*m, d2, n, rank, st))
        .collect()
}

impl EllipticState {
    fn from_state(
        model: ModelV2,
        d2: f64,
        degree: usize,
        rank: usize,
        st: &QesState,
    ) -> Result<Self> {
        let mut state = EllipticState {
            model,
            d2,
            degree,
            rank,
            lambda: st.lambda,
            coefficients: st.coefficients.clone(),
            node_split: st.node_split,
            norm: 1.0,
        };
        let quadrant = state.quadrant_integral_quadrature()?;
        if !(quadrant > 0.0) || !quadrant.is_finite() {
            return Err(Error::Accuracy(format!(
                "quadrant integral came out {quadrant} for degree {degree} rank {rank}"
            )));
        }
        state.norm = 0.5 / quadrant.sqrt();
        Ok(state)
    }

    pub fn new(model: ModelV2, d2: f64, degree: usize, rank: usize) -> Result<Self> {
        let sol = solve_elliptic(&model, degree, d2)?;
        let st = sol
            .states
            .get(rank)
            .ok_or_else(|| Error::ParameterDomain(format!("rank {rank} exceeds degree {degree}")))?;
        Self::from_state(model, d2, degree, rank, st)
    }

    fn beta(&self) -> f64 {
        self.model.omega * self.d2 / 8.0
    }

    /// Radial cutoff: past here the gauge is below the 1e-18 scale.
    pub fn cutoff_u1(&self) -> f64 {
        let beta = self.beta();
        let n = self.degree as f64;
        let mut v = 1.0 + 45.0 / (2.0 * beta);
        for _ in 0..4 {
            v = 1.0 + (45.0 + (2.0 * n + 2.0) * v.ln()) / (2.0 * beta);
        }
        v.sqrt().acosh()
    }

    /// Radial factor at `u1 >= 0`; bare.
    pub fn radial_factor(&self, u1: f64) -> f64 {
        if u1 <= 0.0 {
            return 0.0;
        }
        let a1 = 0.5 + self.model.sk1();
        let a2 = 0.5 + self.model.sk2();
        let (ch, sh) = (u1.cosh(), u1.sinh());
        let v = ch * ch;
        let (p, _, _) = poly_eval_d2(&self.coefficients, v);
        (a1 * ch.ln() + a2 * sh.ln() - self.beta() * v).exp() * p
    }

    /// Angular factor on `(0, pi/2)`; bare.
    pub fn angular_factor(&self, u2: f64) -> Result<f64> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&u2) {
            return Err(Error::Domain(format!(
                "angular coordinate wants [0, pi/2], got {u2}"
            )));
        }
        if u2 == 0.0 || u2 == std::f64::consts::FRAC_PI_2 {
            return Ok(0.0);
        }
        let a1 = 0.5 + self.model.sk1();
        let a2 = 0.5 + self.model.sk2();
        let (c, s) = (u2.cos(), u2.sin());
        let t = c * c;
        let (p, _, _) = poly_eval_d2(&self.coefficients, t);
        Ok((a1 * c.ln() + a2 * s.ln() - self.beta() * t).exp() * p)
    }

    /// Normalized value at an elliptic point.
    pub fn eval_coords(&self, u1: f64, u2: f64) -> Result<f64> {
        Ok(self.norm * self.radial_factor(u1) * self.angular_factor(u2)?)
    }

    /// Normalized value at a Cartesian point (even-extended to all
    /// quadrants).
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let (u1, u2) = crate::model::elliptic_from_cartesian(self.d2, x.abs(), y.abs())?;
        self.eval_coords(u1, u2)
    }

    fn quadrant_integral_quadrature(&self) -> Result<f64> {
        let u1_max = self.cutoff_u1();
        let i_ch = integrate_tanh_sinh(0.0, u1_max, 1e-12, 12, |u| {
            let r = self.radial_factor(u);
            let c = u.cosh();
            c * c * r * r
        })?;
        let i_0 = integrate_tanh_sinh(0.0, u1_max, 1e-12, 12, |u| {
            let r = self.radial_factor(u);
            r * r
        })?;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let j_cos = integrate_tanh_sinh(0.0, half_pi, 1e-12, 12, |u| {
            let a = self.angular_factor(u).unwrap_or(f64::NAN);
            let c = u.cos();
            c * c * a * a
        })?;
        let j_0 = integrate_tanh_sinh(0.0, half_pi, 1e-12, 12, |u| {
            let a = self.angular_factor(u).unwrap_or(f64::NAN);
            a * a
        })?;
        Ok(0.25 * self.d2 * (i_ch * j_0 - i_0 * j_cos))
    }

    fn radial_with_second_derivative(&self, u: f64) -> Result<(f64, f64)> {
        if u <= 0.0 {
            return Err(Error::Domain(
                "radial derivative wants a strictly positive coordinate".into(),
            ));
        }
        let a1 = 0.5 + self.model.sk1();
        let a2 = 0.5 + self.model.sk2();
        let beta = self.beta();
        let (ch, sh) = (u.cosh(), u.sinh());
        let v = ch * ch;
        let (p, dp, ddp) = poly_eval_d2(&self.coefficients, v);
        let g = (a1 * ch.ln() + a2 * sh.ln() - beta * v).exp();
        let th = sh / ch;
        let ct = ch / sh;
        let s2 = 2.0 * sh * ch; // sinh 2u
        let c2 = v + sh * sh; // cosh 2u
        let gl = a1 * th + a2 * ct - beta * s2;
        let gll = gl * gl + a1 / (ch * ch) - a2 / (sh * sh) - 2.0 * beta * c2;
        let v1 = s2;
        let v2 = 2.0 * c2;
        let value = g * p;
        let second = g * (gll * p + 2.0 * gl * dp * v1 + ddp * v1 * v1 + dp * v2);
        Ok((value, second))
    }

    fn angular_with_second_derivative(&self, u: f64) -> Result<(f64, f64)> {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&u) || u == 0.0 {
            return Err(Error::Domain(
                "angular derivative wants the open interval (0, pi/2)".into(),
            ));
        }
        let a1 = 0.5 + self.model.sk1();
        let a2 = 0.5 + self.model.sk2();
        let beta = self.beta();
        let (c, s) = (u.cos(), u.sin());
        let t = c * c;
        let (p, dp, ddp) = poly_eval_d2(&self.coefficients, t);
        let g = (a1 * c.ln() + a2 * s.ln() - beta * t).exp();
        let s2 = 2.0 * s * c; // sin 2u
        let c2 = t - s * s; // cos 2u
        let gl = -a1 * s / c + a2 * c / s + beta * s2;
        let gll = gl * gl - a1 / (c * c) - a2 / (s * s) + 2.0 * beta * c2;
        let t1 = -s2;
        let t2 = -2.0 * c2;
        let value = g * p;
        let second = g * (gll * p + 2.0 * gl * dp * t1 + ddp * t1 * t1 + dp * t2);
        Ok((value, second))
    }

    /// Constant appearing in the separated equations. It differs from the
    /// algebraic `lambda` by an affine shift in the energy and the
    /// interfocal parameter:
    /// `c = -lambda + d2 E / 4 + d2^2 w^2 / 64`.
    ///
    /// The radial operator `-d^2 + U_rad` then has eigenvalue `-c` and the
    /// angular operator `-d^2 + U_ang` has eigenvalue `+c`.
    pub fn separated_constant(&self) -> f64 {
        let w = self.model.omega;
        let e = self.model.energy(self.degree);
        -self.lambda + 0.25 * self.d2 * e + self.d2 * self.d2 * w * w / 64.0
    }

    /// Normalized residual of the radial separated equation at `u1 > 0`.
    pub fn ode_residual_radial(&self, u1: f64) -> Result<f64> {
        let (r, r2) = self.radial_with_second_derivative(u1)?;
        let m = &self.model;
        let e = m.energy(self.degree);
        let (ch, sh) = (u1.cosh(), u1.sinh());
        let s2 = 2.0 * sh * ch;
        let u_pot = self.d2 * self.d2 * m.omega * m.omega / 64.0 * s2 * s2
            - (m.k1 * m.k1 - 0.25) / (ch * ch)
            + (m.k2 * m.k2 - 0.25) / (sh * sh)
            - 0.5 * self.d2 * e * ch * ch;
        let terms = [-r2, u_pot * r, self.separated_constant() * r];
        let resid: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        Ok(resid.abs() / scale)
    }

    /// Normalized residual of the angular separated equation on
    /// `(0, pi/2)`; the separated constant enters with the opposite sign.
    pub fn ode_residual_angular(&self, u2: f64) -> Result<f64> {
        let (a, a2d) = self.angular_with_second_derivative(u2)?;
        let m = &self.model;
        let e = m.energy(self.degree);
        let (c, s) = (u2.cos(), u2.sin());
        let s2 = 2.0 * s * c;
        let u_pot = self.d2 * self.d2 * m.omega * m.omega / 64.0 * s2 * s2
            + (m.k1 * m.k1 - 0.25) / (c * c)
            + (m.k2 * m.k2 - 0.25) / (s * s)
            + 0.5 * self.d2 * e * c * c;
        let terms = [-a2d, u_pot * a, -self.separated_constant() * a];
        let resid: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        Ok(resid.abs() / scale)
    }

    /// Normalized residual of the full eigenvalue equation at an elliptic
    /// point in the open quadrant.
    pub fn pde_residual(&self, u1: f64, u2: f64) -> Result<f64> {
        let (r, r2) = self.radial_with_second_derivative(u1)?;
        let (a, a2d) = self.angular_with_second_derivative(u2)?;
        let m = &self.model;
        let half_d = 0.5 * self.d2.sqrt();
        let x = half_d * u1.cosh() * u2.cos();
        let y = half_d * u1.sinh() * u2.sin();
        let ch = u1.cosh();
        let h2 = 0.25 * self.d2 * (ch * ch - u2.cos() * u2.cos());
        let v = m.potential(x, y)?;
        let e = m.energy(self.degree);
        let terms = [-0.5 * (r2 * a + r * a2d) / h2, v * r * a, -e * r * a];
        let resid: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
        Ok(resid.abs() / scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;
    use crate::quad::{integrate_1d, integrate_2d, QuadratureSpec};
    use approx::assert_relative_eq;

    #[test]
    fn one_dimensional_bases_are_orthonormal() {
        let m = ModelV1::new(0.8, 0.7, 1.5, Sign::Plus).unwrap();
        let spec = QuadratureSpec::new(48, 12).unwrap();
        for a in 0..3usize {
            for b in 0..3usize {
                let hx = integrate_1d(spec, -9.0, 9.0, |x| {
                    hermite_shifted(&m, a, x).unwrap() * hermite_shifted(&m, b, x).unwrap()
                })
                .unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((hx - expect).abs() < 1e-10, "hermite {a} {b}: {hx}");
                let sy = integrate_tanh_sinh(0.0, 12.0, 1e-12, 12, |y| {
                    singular_oscillator_1d(0.8, m.sk2(), a, y).unwrap()
                        * singular_oscillator_1d(0.8, m.sk2(), b, y).unwrap()
                })
                .unwrap();
                assert!((sy - expect).abs() < 1e-10, "singular {a} {b}: {sy}");
            }
        }
    }

    #[test]
    fn polar_factors_are_normalized() {
        let m = ModelV2::new(1.2, 0.6, 1.4, Sign::Plus, Sign::Plus).unwrap();
        for (nr, ma) in [(0usize, 0usize), (1, 0), (0, 2), (2, 1)] {
            let st = PolarStateV2::new(m, nr, ma);
            let rad = integrate_tanh_sinh(0.0, 10.0, 1e-12, 12, |r| {
                let v = st.radial(r).unwrap();
                v * v * r
            })
            .unwrap();
            assert_relative_eq!(rad, 1.0, max_relative = 1e-9);
            let ang = integrate_tanh_sinh(0.0, std::f64::consts::FRAC_PI_2, 1e-12, 12, |p| {
                let v = st.angular(p).unwrap();
                v * v
            })
            .unwrap();
            assert_relative_eq!(ang, 0.25, max_relative = 1e-9);
        }
    }

    #[test]
    fn cartesian_v2_energy_matches_polar_shell() {
        let m = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
        let cart = CartesianStateV2::new(m, 1, 2);
        let polar = PolarStateV2::new(m, 1, 2);
        assert_relative_eq!(cart.energy(), polar.energy());
        assert_relative_eq!(cart.energy(), m.energy(3));
    }

    #[test]
    fn parabolic_states_are_plane_normalized() {
        // independent 2D tensor quadrature against the factorized route
        for &(k1, k2, sign, tol) in &[
            (0.0, 1.5, Sign::Plus, 1e-7),
            (1.0, 1.5, Sign::Plus, 1e-7),
            // the fractional edge power defeats polynomial quadrature, so
            // the cross-check is looser on the lower branch
            (0.5, 0.25, Sign::Minus, 2e-5),
        ] {
            let m = ModelV1::new(1.0, k1, k2, sign).unwrap();
            let states = parabolic_multiplet(&m, 2).unwrap();
            for st in &states {
                let u1m = st.cutoff_u1();
                let u2m = st.cutoff_u2();
                let sx = QuadratureSpec::new(48, 8).unwrap();
                let plane = 2.0
                    * integrate_2d(sx, (0.0, u1m), sx, (0.0, u2m), |u1, u2| {
                        let v = st.eval_coords(u1, u2).unwrap();
                        (u1 * u1 + u2 * u2) * v * v
                    })
                    .unwrap();
                assert!(
                    (plane - 1.0).abs() < tol,
                    "k1 {k1} rank {}: plane integral {plane}",
                    st.rank
                );
            }
        }
    }

    #[test]
    fn series_route_matches_quadrature_normalization() {
        for &k1 in &[0.0, 1.0] {
            let m = ModelV1::new(1.0, k1, 1.5, Sign::Plus).unwrap();
            let states = parabolic_multiplet(&m, 3).unwrap();
            for st in &states {
                let series = parabolic_plane_integral_series(&m, &st.coefficients).unwrap();
                let quadrature = 1.0 / (st.norm * st.norm);
                assert_relative_eq!(series, quadrature, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn parabolic_residuals_vanish_on_states() {
        let points1 = [0.31, 0.77, 1.24, 1.9];
        for &k1 in &[0.0, 1.0] {
            let m = ModelV1::new(1.0, k1, 1.5, Sign::Plus).unwrap();
            for st in &parabolic_multiplet(&m, 3).unwrap() {
                for &u in &points1 {
                    assert!(st.ode_residual_u1(u).unwrap() < 1e-10, "u1 residual");
                    assert!(st.ode_residual_u2(u).unwrap() < 1e-10, "u2 residual");
                }
                for &(u1, u2) in &[(0.4, 0.9), (1.3, 0.5), (0.8, 1.6)] {
                    assert!(st.pde_residual(u1, u2).unwrap() < 1e-10, "pde residual");
                }
            }
        }
    }

    #[test]
    fn parabolic_state_is_even_across_the_singular_line() {
        let m = ModelV1::new(1.0, 1.0, 1.5, Sign::Plus).unwrap();
        let st = &parabolic_multiplet(&m, 2).unwrap()[1];
        for &(x, y) in &[(0.5, 0.8), (-0.7, 0.3), (1.1, 1.4)] {
            let up = st.eval(x, y).unwrap();
            let down = st.eval(x, -y).unwrap();
            assert_relative_eq!(up, down, max_relative = 1e-12);
        }
    }

    #[test]
    fn elliptic_states_are_quadrant_normalized() {
        let m = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
        for &d2 in &[0.8, 2.5] {
            for st in &elliptic_multiplet(&m, 2, d2).unwrap() {
                let u1m = st.cutoff_u1();
                let sx = QuadratureSpec::new(48, 8).unwrap();
                let quadrant = integrate_2d(
                    sx,
                    (0.0, u1m),
                    sx,
                    (0.0, std::f64::consts::FRAC_PI_2),
                    |u1, u2| {
                        let v = st.eval_coords(u1, u2).unwrap();
                        let w = 0.25 * d2 * (u1.cosh().powi(2) - u2.cos().powi(2));
                        w * v * v
                    },
                )
                .unwrap();
                assert!(
                    (quadrant - 0.25).abs() < 1e-7,
                    "d2 {d2} rank {}: quadrant integral {quadrant}",
                    st.rank
                );
            }
        }
    }

    #[test]
    fn elliptic_residuals_vanish_on_states() {
        let m = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
        for &d2 in &[0.8, 2.5] {
            for st in &elliptic_multiplet(&m, 3, d2).unwrap() {
                for &u in &[0.2, 0.7, 1.3] {
                    assert!(
                        st.ode_residual_radial(u).unwrap() < 1e-10,
                        "radial residual d2 {d2} rank {}",
                        st.rank
                    );
                }
                for &u in &[0.3, 0.8, 1.4] {
                    assert!(
                        st.ode_residual_angular(u).unwrap() < 1e-10,
                        "angular residual d2 {d2} rank {}",
                        st.rank
                    );
                }
                for &(u1, u2) in &[(0.5, 0.6), (1.1, 1.2), (0.3, 1.0)] {
                    assert!(st.pde_residual(u1, u2).unwrap() < 1e-10, "pde residual");
                }
            }
        }
    }

    #[test]
    fn elliptic_approaches_polar_in_the_concentric_limit() {
        let m = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
        let n = 2;
        let d2 = 1e-3;
        let states = elliptic_multiplet(&m, n, d2).unwrap();
        for (q, st) in states.iter().enumerate() {
            let polar = PolarStateV2::new(m, q, n - q);
            for &(x, y) in &[(0.6, 0.4), (0.3, 1.1), (1.2, 0.9)] {
                let a = st.eval(x, y).unwrap();
                let b = polar.eval(x, y).unwrap();
                // sign conventions may differ per state
                assert!(
                    (a.abs() - b.abs()).abs() < 1e-3 * (1.0 + b.abs()),
                    "rank {q} at ({x}, {y}): {a} vs {b}"
                );
            }
        }
    }
}
