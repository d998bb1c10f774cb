//! Model parameters, potentials, energies, and coordinate systems.
//!
//! Two planar singular-oscillator models are covered. The first couples an
//! anisotropic oscillator (frequency `2*omega` along x, `omega` along y) to
//! a linear tilt `k1 x` and an inverse-square barrier on the x-axis:
//!
//! ```text
//! V1(x, y) = 2 w^2 x^2 + k1 x + w^2 y^2 / 2 + (k2^2 - 1/4) / (2 y^2)
//! ```
//!
//! The second is the isotropic oscillator with inverse-square barriers on
//! both axes:
//!
//! ```text
//! V2(x, y) = w^2 (x^2 + y^2) / 2 + (k1^2 - 1/4) / (2 x^2) + (k2^2 - 1/4) / (2 y^2)
//! ```
//!
//! Units are `hbar = mass = 1`, Hamiltonian `H = -(1/2) Laplacian + V`.
//! Both models are exactly solvable; their hidden-symmetry operators have
//! polynomial eigenfunctions whose separation constants are the subject of
//! the `recurrence`, `qes`, and `niven` modules.

use crate::error::{Error, Result};

/// Branch choice for the exponent `1/2 +- k` attached to an inverse-square
/// axis barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Signed strength `+-k` for this branch.
    pub fn apply(self, k: f64) -> f64 {
        self.factor() * k
    }
}

fn validate_branch(k: f64, sign: Sign, which: &str) -> Result<()> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::ParameterDomain(format!(
            "{which} must be finite and nonnegative, got {k}"
        )));
    }
    if sign == Sign::Minus && k >= 0.5 {
        // 1/2 - k <= 0 makes y^(1/2 - k) non-normalizable against the
        // inverse-square barrier; only the plus branch survives there.
        return Err(Error::BranchRule(format!(
            "minus branch requires {which} < 1/2, got {k}"
        )));
    }
    if sign == Sign::Minus && k == 0.0 {
        return Err(Error::BranchRule(format!(
            "minus branch duplicates the plus branch at {which} = 0"
        )));
    }
    Ok(())
}

/// Anisotropic singular oscillator with a linear tilt along x.
#[derive(Debug, Clone, Copy)]
pub struct ModelV1 {
    pub omega: f64,
    pub k1: f64,
    pub k2: f64,
    pub sign2: Sign,
}

impl ModelV1 {
    pub fn new(omega: f64, k1: f64, k2: f64, sign2: Sign) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !k1.is_finite() {
            return Err(Error::ParameterDomain(format!("k1 must be finite, got {k1}")));
        }
        validate_branch(k2, sign2, "k2")?;
        Ok(ModelV1 {
            omega,
            k1,
            k2,
            sign2,
        })
    }

    /// Signed barrier strength `+-k2`.
    pub fn sk2(&self) -> f64 {
        self.sign2.apply(self.k2)
    }

    /// Exponent `a = 1/2 +- k2` of the y-axis factor.
    pub fn a2(&self) -> f64 {
        0.5 + self.sk2()
    }

    /// Energy of the degree-`n` level:
    /// `E_n = w (2n + 2 +- k2) - k1^2 / (8 w^2)`.
    pub fn energy(&self, n: usize) -> f64 {
        self.omega * (2.0 * n as f64 + 2.0 + self.sk2())
            - self.k1 * self.k1 / (8.0 * self.omega * self.omega)
    }

    pub fn potential(&self, x: f64, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Err(Error::Domain("potential is singular on the x-axis".into()));
        }
        let w2 = self.omega * self.omega;
        Ok(2.0 * w2 * x * x
            + self.k1 * x
            + 0.5 * w2 * y * y
            + (self.k2 * self.k2 - 0.25) / (2.0 * y * y))
    }

    /// Center of the x-oscillator after completing the square.
    pub fn x_center(&self) -> f64 {
        -self.k1 / (4.0 * self.omega * self.omega)
    }
}

/// Isotropic oscillator with inverse-square barriers on both axes.
#[derive(Debug, Clone, Copy)]
pub struct ModelV2 {
    pub omega: f64,
    pub k1: f64,
    pub k2: f64,
    pub sign1: Sign,
    pub sign2: Sign,
}

impl ModelV2 {
    pub fn new(omega: f64, k1: f64, k2: f64, sign1: Sign, sign2: Sign) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        validate_branch(k1, sign1, "k1")?;
        validate_branch(k2, sign2, "k2")?;
        Ok(ModelV2 {
            omega,
            k1,
            k2,
            sign1,
            sign2,
        })
    }

    pub fn sk1(&self) -> f64 {
        self.sign1.apply(self.k1)
    }

    pub fn sk2(&self) -> f64 {
        self.sign2.apply(self.k2)
    }

    /// Exponent `1/2 +- k1` of the x-axis factor.
    pub fn a1(&self) -> f64 {
        0.5 + self.sk1()
    }

    /// Exponent `1/2 +- k2` of the y-axis factor.
    pub fn a2(&self) -> f64 {
        0.5 + self.sk2()
    }

    /// Energy of the degree-`n` level: `E_n = w (2n + 2 +- k1 +- k2)`.
    pub fn energy(&self, n: usize) -> f64 {
        self.omega * (2.0 * n as f64 + 2.0 + self.sk1() + self.sk2())
    }

    pub fn potential(&self, x: f64, y: f64) -> Result<f64> {
        if x == 0.0 || y == 0.0 {
            return Err(Error::Domain("potential is singular on the axes".into()));
        }
        let w2 = self.omega * self.omega;
        Ok(0.5 * w2 * (x * x + y * y)
            + (self.k1 * self.k1 - 0.25) / (2.0 * x * x)
            + (self.k2 * self.k2 - 0.25) / (2.0 * y * y))
    }

    /// The same model with the two axes exchanged.
    pub fn axes_swapped(&self) -> ModelV2 {
        ModelV2 {
            omega: self.omega,
            k1: self.k2,
            k2: self.k1,
            sign1: self.sign2,
            sign2: self.sign1,
        }
    }
}

/// Orthogonal coordinate systems in which the two models separate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordSystem {
    Cartesian,
    /// `x = (u1^2 - u2^2)/2`, `y = u1 u2`, with `u1` real and `u2 >= 0`.
    Parabolic,
    /// `x = u1 cos(u2)`, `y = u1 sin(u2)`, `u1 > 0`.
    Polar,
    /// `x = (d/2) cosh(u1) cos(u2)`, `y = (d/2) sinh(u1) sin(u2)` with
    /// `d = sqrt(d2)` the interfocal distance, `u1 >= 0`, `u2 in [0, pi/2]`.
    Elliptic { d2: f64 },
}

/// Map a coordinate pair to `(x, y, weight)` where `weight` is the Jacobian
/// density `h1 h2` of the orthogonal net (so `dA = weight du1 du2`).
pub fn coordinate_map(sys: CoordSystem, u1: f64, u2: f64) -> Result<(f64, f64, f64)> {
    match sys {
        CoordSystem::Cartesian => Ok((u1, u2, 1.0)),
        CoordSystem::Parabolic => {
            if u2 < 0.0 {
                return Err(Error::Domain(format!(
                    "parabolic u2 must be nonnegative, got {u2}"
                )));
            }
            let x = 0.5 * (u1 * u1 - u2 * u2);
            let y = u1 * u2;
            Ok((x, y, u1 * u1 + u2 * u2))
        }
        CoordSystem::Polar => {
            if u1 <= 0.0 {
                return Err(Error::Domain(format!("polar radius must be positive, got {u1}")));
            }
            Ok((u1 * u2.cos(), u1 * u2.sin(), u1))
        }
        CoordSystem::Elliptic { d2 } => {
            if !(d2 > 0.0) {
                return Err(Error::Domain(format!(
                    "elliptic coordinates need d2 > 0, got {d2}"
                )));
            }
            if u1 < 0.0 {
                return Err(Error::Domain(format!(
                    "elliptic u1 must be nonnegative, got {u1}"
                )));
            }
            let half_d = 0.5 * d2.sqrt();
            let x = half_d * u1.cosh() * u2.cos();
            let y = half_d * u1.sinh() * u2.sin();
            let ch = u1.cosh();
            let c = u2.cos();
            let weight = half_d * half_d * (ch * ch - c * c);
            Ok((x, y, weight))
        }
    }
}

/// Invert the parabolic map on the closed upper half plane: returns
/// `(u1, u2)` with `u2 >= 0` and `sign(u1) = sign(y)`.
pub fn parabolic_from_cartesian(x: f64, y: f64) -> (f64, f64) {
    let r = x.hypot(y);
    // r + x and r - x are both nonnegative; guard rounding at the axis
    let u1 = (r + x).max(0.0).sqrt() * if y < 0.0 { -1.0 } else { 1.0 };
    let u2 = (r - x).max(0.0).sqrt();
    (u1, u2)
}

/// Invert the elliptic map on the open first quadrant.
pub fn elliptic_from_cartesian(d2: f64, x: f64, y: f64) -> Result<(f64, f64)> {
    if !(d2 > 0.0) {
        return Err(Error::Domain(format!("elliptic coordinates need d2 > 0, got {d2}")));
    }
    if x < 0.0 || y < 0.0 {
        return Err(Error::Domain(format!(
            "elliptic inversion is defined on the first quadrant, got ({x}, {y})"
        )));
    }
    let d = d2.sqrt();
    let a = 2.0 * x / d;
    let b = 2.0 * y / d;
    // cosh^2(u1) is the larger root of t^2 - (1 + a^2 + b^2) t + a^2 = 0
    let s = 1.0 + a * a + b * b;
    let disc = (s * s - 4.0 * a * a).max(0.0).sqrt();
    let ch2 = 0.5 * (s + disc);
    let u1 = ch2.sqrt().max(1.0).acosh();
    let c2 = (a * a / ch2).clamp(0.0, 1.0);
    let u2 = c2.sqrt().clamp(-1.0, 1.0).acos();
    Ok((u1, u2))
}

/// Parameters of the one-dimensional sextic-plus-inverse-square problem
/// that the parabolic separation of the first model reduces to.
///
/// The half-line Hamiltonian `h = -(1/2) d^2/dx^2 + v(x)` with
///
/// ```text
/// v(x) = w^2 x^6 / 2 + 2 beta w^2 x^4 + (2 beta^2 w^2 - 2 delta w - lambda_bar) x^2
///        + 2 (delta - 1/4)(delta - 3/4) / x^2
/// ```
///
/// has exactly `n + 1` algebraic levels when `lambda_bar = w (2n + 1)`, and
/// twice each such level equals one separation constant of the planar
/// problem. `sextic_parameters` performs the dictionary in that direction.
#[derive(Debug, Clone, Copy)]
pub struct SexticParameters {
    pub omega: f64,
    pub beta: f64,
    pub delta: f64,
    pub lambda_bar: f64,
}

/// Dictionary from the planar model at degree `n` to the sextic problem:
/// `beta = k1 / (4 w^2)`, `delta = (1 +- k2) / 2`, `lambda_bar = w (2n + 1)`.
pub fn sextic_parameters(m: &ModelV1, n: usize) -> SexticParameters {
    SexticParameters {
        omega: m.omega,
        beta: m.k1 / (4.0 * m.omega * m.omega),
        delta: 0.5 * (1.0 + m.sk2()),
        lambda_bar: m.omega * (2.0 * n as f64 + 1.0),
    }
}

pub fn sextic_potential(p: &SexticParameters, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Domain("sextic potential is singular at x = 0".into()));
    }
    let w2 = p.omega * p.omega;
    let x2 = x * x;
    Ok(0.5 * w2 * x2 * x2 * x2
        + 2.0 * p.beta * w2 * x2 * x2
        + (2.0 * p.beta * p.beta * w2 - 2.0 * p.delta * p.omega - p.lambda_bar) * x2
        + 2.0 * (p.delta - 0.25) * (p.delta - 0.75) / x2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn branch_rules() {
        assert!(ModelV1::new(1.0, 0.0, 1.5, Sign::Plus).is_ok());
        assert!(ModelV1::new(1.0, 0.0, 1.5, Sign::Minus).is_err());
        assert!(ModelV1::new(1.0, 0.0, 0.25, Sign::Minus).is_ok());
        assert!(ModelV1::new(1.0, 0.0, 0.0, Sign::Minus).is_err());
        assert!(ModelV1::new(-1.0, 0.0, 1.0, Sign::Plus).is_err());
        assert!(ModelV2::new(1.0, 0.5, 0.25, Sign::Plus, Sign::Minus).is_ok());
        assert!(ModelV2::new(1.0, 0.5, 0.25, Sign::Minus, Sign::Plus).is_err());
    }

    #[test]
    fn energies() {
        let m = ModelV1::new(2.0, -1.0, 1.5, Sign::Plus).unwrap();
        // E_0 = 2 (2 + 1.5) - 1 / 32
        assert_relative_eq!(m.energy(0), 7.0 - 1.0 / 32.0);
        assert_relative_eq!(m.energy(3), 2.0 * (6.0 + 2.0 + 1.5) - 1.0 / 32.0);
        let m2 = ModelV2::new(1.0, 0.5, 1.5, Sign::Plus, Sign::Plus).unwrap();
        assert_relative_eq!(m2.energy(2), 4.0 + 2.0 + 0.5 + 1.5);
    }

    #[test]
    fn potential_matches_oscillator_decomposition() {
        // V1 minus its singular part is 2 w^2 (x - xc)^2 + w^2 y^2 / 2 + shift
        let m = ModelV1::new(1.3, 0.7, 0.9, Sign::Plus).unwrap();
        let (x, y) = (0.4, 1.1);
        let v = m.potential(x, y).unwrap();
        let w2 = m.omega * m.omega;
        let xc = m.x_center();
        let recomposed = 2.0 * w2 * (x - xc) * (x - xc) - 2.0 * w2 * xc * xc
            + 0.5 * w2 * y * y
            + (m.k2 * m.k2 - 0.25) / (2.0 * y * y);
        assert_relative_eq!(v, recomposed, max_relative = 1e-13);
    }

    #[test]
    fn parabolic_roundtrip() {
        for &(x, y) in &[(0.3, 1.2), (-0.8, 0.4), (2.0, -1.5), (-1.0, -0.1)] {
            let (u1, u2) = parabolic_from_cartesian(x, y);
            let (xx, yy, w) = coordinate_map(CoordSystem::Parabolic, u1, u2).unwrap();
            assert_relative_eq!(xx, x, epsilon = 1e-12);
            assert_relative_eq!(yy, y, epsilon = 1e-12);
            assert!(w > 0.0);
        }
    }

    #[test]
    fn elliptic_roundtrip() {
        let d2 = 2.7;
        for &(x, y) in &[(0.3, 1.2), (2.4, 0.2), (0.9, 0.9), (3.0, 2.5)] {
            let (u1, u2) = elliptic_from_cartesian(d2, x, y).unwrap();
            let (xx, yy, w) = coordinate_map(CoordSystem::Elliptic { d2 }, u1, u2).unwrap();
            assert_relative_eq!(xx, x, epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(yy, y, epsilon = 1e-10, max_relative = 1e-10);
            assert!(w > 0.0);
        }
    }

    #[test]
    fn elliptic_weight_is_metric_density() {
        // weight = (d2/4)(cosh^2 u1 - cos^2 u2)
        let d2 = 1.8;
        let (u1, u2) = (0.7, 0.5);
        let (_, _, w) = coordinate_map(CoordSystem::Elliptic { d2 }, u1, u2).unwrap();
        let expect = 0.25 * d2 * (u1.cosh().powi(2) - u2.cos().powi(2));
        assert_relative_eq!(w, expect, max_relative = 1e-13);
    }

    #[test]
    fn sextic_dictionary() {
        let m = ModelV1::new(1.0, 2.0, 1.5, Sign::Plus).unwrap();
        let p = sextic_parameters(&m, 2);
        assert_relative_eq!(p.beta, 0.5);
        assert_relative_eq!(p.delta, 1.25);
        assert_relative_eq!(p.lambda_bar, 5.0);
        // centrifugal strength 2 (delta - 1/4)(delta - 3/4) = (k2^2 - 1/4)/2
        let cf = 2.0 * (p.delta - 0.25) * (p.delta - 0.75);
        assert_relative_eq!(cf, (m.k2 * m.k2 - 0.25) / 2.0, max_relative = 1e-13);
    }
}
