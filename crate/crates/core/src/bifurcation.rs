//! Zeroth-order bifurcation profiles `g(t) = V sn(Ωt, m)`.
//!
//! Every profile solves a reduced ODE on odd 2π-periodic functions, either
//! the quartic equation `η̈ + A(η)(3⟨η²⟩η + η³) = 0` with
//! `A(η) = ⟨η⁴⟩ + 3⟨η²⟩²`, or a member of the cubic family
//! `κη̈ + c₂⟨η²⟩η + c₃η³ = 0`. Substituting the elliptic ansatz and using
//! `sn'' = -(1+m) sn + 2m sn³` turns each equation into a scalar equation
//! for `m` plus explicit formulas for `Ω` and `V`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elliptic::{self, Jacobi, Modulus};
use crate::error::{Error, Result};
use crate::roots::brent;

/// Number of uniform samples used for residual checks.
pub const RESIDUAL_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityCase {
    Quartic,
    QuadraticCubic,
}

/// Leading Taylor coefficients of the nonlinearity `f(x, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityCoefficients {
    pub case: NonlinearityCase,
    pub a2: f64,
    /// x-average of `a₃(x)` over `(0, π)`.
    pub a3_mean: f64,
    pub a4: f64,
}

impl NonlinearityCoefficients {
    pub fn quartic(a4: f64) -> Result<Self> {
        let c = Self {
            case: NonlinearityCase::Quartic,
            a2: 0.0,
            a3_mean: 0.0,
            a4,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn quadratic_cubic(a2: f64, a3_mean: f64) -> Result<Self> {
        let c = Self {
            case: NonlinearityCase::QuadraticCubic,
            a2,
            a3_mean,
            a4: 0.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.a2.is_finite() && self.a3_mean.is_finite() && self.a4.is_finite();
        if !finite {
            return Err(Error::domain("nonlinearity coefficients must be finite"));
        }
        match self.case {
            NonlinearityCase::Quartic if self.a4 == 0.0 => {
                Err(Error::domain("quartic case requires a4 != 0"))
            }
            NonlinearityCase::QuadraticCubic if self.a2 == 0.0 && self.a3_mean == 0.0 => {
                Err(Error::domain("quadratic-cubic case requires (a2, <a3>) != (0, 0)"))
            }
            _ => Ok(()),
        }
    }
}

/// Which reduced equation a profile solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `η̈ + A(η)(3⟨η²⟩η + η³) = 0`.
    Quartic,
    /// `-s* η̈ - ⟨η²⟩η + λη³ = 0`.
    CubicSstar,
    /// `η̈ + ⟨η²⟩η + λη³ = 0`.
    ExteriorLambda,
    /// `η̈ + η³ = 0`.
    PureCubic,
    /// `η̈ + ⟨η²⟩η = 0`.
    NonlocalOnly,
}

/// The reduced ODE in normalized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReducedEquation {
    QuarticA,
    /// `κη̈ + c₂⟨η²⟩η + c₃η³ = 0`.
    Cubic { kappa: f64, c2: f64, c3: f64 },
}

impl ReducedEquation {
    pub fn cubic_sstar(lambda: f64, s_star: i8) -> Self {
        Self::Cubic {
            kappa: -f64::from(s_star),
            c2: -1.0,
            c3: lambda,
        }
    }

    pub fn exterior(lambda: f64) -> Self {
        Self::Cubic {
            kappa: 1.0,
            c2: 1.0,
            c3: lambda,
        }
    }

    pub fn pure_cubic() -> Self {
        Self::Cubic {
            kappa: 1.0,
            c2: 0.0,
            c3: 1.0,
        }
    }

    pub fn nonlocal_only() -> Self {
        Self::Cubic {
            kappa: 1.0,
            c2: 1.0,
            c3: 0.0,
        }
    }

    /// Pointwise residual given samples of `η` and `η̈` on a uniform grid of
    /// one period (averages by the trapezoid rule on the same grid).
    pub fn residual(&self, eta: &[f64], eta_ddot: &[f64]) -> Vec<f64> {
        let n = eta.len() as f64;
        let m2 = eta.iter().map(|e| e * e).sum::<f64>() / n;
        match *self {
            ReducedEquation::QuarticA => {
                let m4 = eta.iter().map(|e| e.powi(4)).sum::<f64>() / n;
                let a = m4 + 3.0 * m2 * m2;
                eta.iter()
                    .zip(eta_ddot)
                    .map(|(&e, &dd)| dd + a * (3.0 * m2 * e + e * e * e))
                    .collect()
            }
            ReducedEquation::Cubic { kappa, c2, c3 } => eta
                .iter()
                .zip(eta_ddot)
                .map(|(&e, &dd)| kappa * dd + c2 * m2 * e + c3 * e * e * e)
                .collect(),
        }
    }
}

/// Coefficients of the reduced functional in the quadratic–cubic case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCoefficients {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Positive coefficient of `η³` in the normalized reduced equation
    /// (zero for the nonlocal-only case, one for the pure cubic case).
    pub lambda: f64,
    pub s_star: i8,
    pub kind: ProfileKind,
}

/// `α = (9⟨a₃⟩ - π²a₂²)/12`, `γ = π⟨a₃⟩/2` and the scale `β`.
pub fn alpha_gamma_beta(a2: f64, a3_mean: f64) -> (f64, f64, f64) {
    let alpha = (9.0 * a3_mean - PI * PI * a2 * a2) / 12.0;
    let gamma = PI * a3_mean / 2.0;
    let beta = if alpha_vanishes(alpha, a2, a3_mean) {
        (PI / gamma).sqrt()
    } else {
        (2.0 * alpha.abs()).powf(-0.5)
    };
    (alpha, gamma, beta)
}

fn alpha_vanishes(alpha: f64, a2: f64, a3_mean: f64) -> bool {
    alpha.abs() <= 8.0 * f64::EPSILON * (9.0 * a3_mean.abs() + PI * PI * a2 * a2)
}

/// All admissible `(λ, s*)` pairs for a quadratic–cubic nonlinearity.
pub fn reduce_coefficients(c: &NonlinearityCoefficients) -> Result<Vec<ReducedCoefficients>> {
    if c.case != NonlinearityCase::QuadraticCubic {
        return Err(Error::domain("reduce_coefficients applies to the quadratic-cubic case"));
    }
    c.validate()?;
    let (alpha, gamma, beta) = alpha_gamma_beta(c.a2, c.a3_mean);
    let make = |lambda, s_star, kind| ReducedCoefficients {
        alpha,
        gamma,
        beta,
        lambda,
        s_star,
        kind,
    };
    if c.a3_mean == 0.0 {
        return Ok(vec![make(0.0, 1, ProfileKind::NonlocalOnly)]);
    }
    if alpha_vanishes(alpha, c.a2, c.a3_mean) {
        return Ok(vec![make(1.0, -1, ProfileKind::PureCubic)]);
    }
    let lambda = gamma.abs() / (2.0 * PI * alpha.abs());
    if alpha < 0.0 && gamma > 0.0 {
        let mut out = vec![make(lambda, -1, ProfileKind::CubicSstar)];
        if lambda < 1.0 {
            out.push(make(lambda, 1, ProfileKind::CubicSstar));
        }
        Ok(out)
    } else {
        let s_star = if alpha > 0.0 { -1 } else { 1 };
        Ok(vec![make(lambda, s_star, ProfileKind::ExteriorLambda)])
    }
}

/// The zeroth-order solution `g(t) = V sn(Ωt, m)`, period 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    #[serde(rename = "case")]
    pub kind: ProfileKind,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub m: f64,
    pub s_star: Option<i8>,
    pub lambda: Option<f64>,
    pub residual_sup: f64,
}

impl WaveProfile {
    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.m).expect("profile modulus below one")
    }

    pub fn jacobi(&self) -> Jacobi {
        Jacobi::new(self.modulus())
    }

    pub fn equation(&self) -> ReducedEquation {
        let lambda = self.lambda.unwrap_or(0.0);
        match self.kind {
            ProfileKind::Quartic => ReducedEquation::QuarticA,
            ProfileKind::CubicSstar => {
                ReducedEquation::cubic_sstar(lambda, self.s_star.unwrap_or(-1))
            }
            ProfileKind::ExteriorLambda => ReducedEquation::exterior(lambda),
            ProfileKind::PureCubic => ReducedEquation::pure_cubic(),
            ProfileKind::NonlocalOnly => ReducedEquation::nonlocal_only(),
        }
    }

    /// `(g, ġ, g̈)` at `t`; `g̈` from `sn'' = -(1+m)sn + 2m sn³`.
    pub fn eval(&self, jac: &Jacobi, t: f64) -> (f64, f64, f64) {
        let s = jac.eval(self.omega * t);
        let g = self.v * s.sn;
        let g_dot = self.v * self.omega * s.sn_dot();
        let w2 = self.omega * self.omega;
        let g_ddot = -w2 * (1.0 + self.m) * g + 2.0 * self.m * w2 / (self.v * self.v) * g * g * g;
        (g, g_dot, g_ddot)
    }

    pub fn g(&self, t: f64) -> f64 {
        self.v * self.jacobi().sn(self.omega * t)
    }

    /// Samples of `g` on the uniform grid `t_i = 2πi/n`.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let jac = self.jacobi();
        (0..n)
            .map(|i| self.v * jac.sn(self.omega * 2.0 * PI * i as f64 / n as f64))
            .collect()
    }

    /// Sup-norm residual of the profile's reduced equation on `n` points.
    pub fn equation_residual(&self, n: usize) -> f64 {
        let jac = self.jacobi();
        let mut g = Vec::with_capacity(n);
        let mut gdd = Vec::with_capacity(n);
        for i in 0..n {
            let (a, _, c) = self.eval(&jac, 2.0 * PI * i as f64 / n as f64);
            g.push(a);
            gdd.push(c);
        }
        self.equation()
            .residual(&g, &gdd)
            .into_iter()
            .fold(0.0, |acc, r| acc.max(r.abs()))
    }

    /// `|2K(m) - Ωπ|`.
    pub fn period_defect(&self) -> f64 {
        (2.0 * elliptic::complete_k(self.modulus()) - self.omega * PI).abs()
    }

    /// `⟨g²⟩ = V²⟨sn²⟩`.
    pub fn mean_g2(&self) -> f64 {
        self.v * self.v * elliptic::mean_sn2(self.modulus())
    }

    /// `⟨g⁴⟩ = V⁴⟨sn⁴⟩`, by period quadrature.
    pub fn mean_g4(&self) -> f64 {
        let sn4 = self
            .jacobi()
            .period_mean(elliptic::DEFAULT_AVERAGE_POINTS, |s| s.sn.powi(4));
        self.v.powi(4) * sn4
    }

    /// `A(g) = ⟨g⁴⟩ + 3⟨g²⟩²`.
    pub fn a_of_g(&self) -> f64 {
        let m2 = self.mean_g2();
        self.mean_g4() + 3.0 * m2 * m2
    }

    fn with_residual(mut self) -> Self {
        self.residual_sup = self.equation_residual(RESIDUAL_GRID);
        self
    }
}

/// Root of `ψ(m) = (7+m)K(m) - 6E(m)` in `(-1, 0)`, after verifying by a
/// coarse scan that `ψ` changes sign exactly once there.
pub fn quartic_modulus() -> Result<f64> {
    let psi = |m: f64| elliptic::psi_quartic(Modulus::new(m).expect("m in (-1,0)")).expect("domain");
    let scan: Vec<f64> = (1..200).map(|i| -1.0 + i as f64 / 200.0).collect();
    let signs: Vec<bool> = scan.iter().map(|&m| psi(m) > 0.0).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if changes != 1 {
        return Err(Error::Convergence {
            what: format!("psi sign scan found {changes} sign changes"),
            iterations: scan.len(),
            achieved: f64::NAN,
        });
    }
    brent(psi, -0.5, -0.1, 1e-15)
}

/// Profile of `η̈ + A(η)(3⟨η²⟩η + η³) = 0`; independent of `a₄`.
pub fn solve_quartic_profile(a4: f64) -> Result<WaveProfile> {
    NonlinearityCoefficients::quartic(a4)?;
    let m = quartic_modulus()?;
    let md = Modulus::new(m)?;
    let omega = 2.0 * elliptic::complete_k(md) / PI;
    let phi = elliptic::mean_sn2(md);
    let sn4 = elliptic::mean_ratios(md)?.sn4;
    let v = (-2.0 * m * omega * omega / (sn4 + 3.0 * phi * phi)).powf(1.0 / 6.0);
    let profile = WaveProfile {
        kind: ProfileKind::Quartic,
        v,
        omega,
        m,
        s_star: None,
        lambda: None,
        residual_sup: 0.0,
    }
    .with_residual();
    // first line of the parameter system: Ω²(1+m) = 3A⟨g²⟩
    let lhs = omega * omega * (1.0 + m);
    let rhs = 3.0 * profile.a_of_g() * profile.mean_g2();
    if (lhs - rhs).abs() > 1e-9 * lhs.abs().max(1.0) {
        return Err(Error::CrossCheck {
            name: "quartic frequency relation".into(),
            a: lhs,
            b: rhs,
            tol: 1e-9,
        });
    }
    Ok(profile)
}

/// `λ(m) = 2m⟨sn²(·,m)⟩/(1+m)`.
pub fn lambda_of_m(m: f64) -> Result<f64> {
    let md = Modulus::new(m)?;
    Ok(2.0 * m * elliptic::mean_sn2(md) / (1.0 + m))
}

/// Range of the chart `x = ln(-1-m)` used for `s* = -1`.
const NEG_CHART: (f64, f64) = (-40.0, 50.0);
/// Range of the chart `y = ln(1-m)` used for `s* = +1`; the left end is the
/// last point with `m < 1` in double precision.
const POS_CHART: (f64, f64) = (-36.7, -1e-300);
/// Largest relative gap `|λ(m̄) - λ|/λ` accepted for the rounded root.
const REPRESENTABLE_LAMBDA_GAP: f64 = 1e-10;

/// `m̄` solving `λ = 2m⟨sn²⟩/(1+m)` on the branch selected by `s*`.
pub fn cubic_modulus(lambda: f64, s_star: i8) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    match s_star {
        -1 => {
            // m = -1 - e^x, so m/(1+m) = (1 + e^x)/e^x
            let h = |x: f64| {
                let ex = x.exp();
                let m = -1.0 - ex;
                2.0 * (1.0 + ex) / ex * elliptic::mean_sn2(Modulus::new(m).expect("m < -1")) - lambda
            };
            let (lo, hi) = NEG_CHART;
            if h(lo) <= 0.0 || h(hi) >= 0.0 {
                return Err(Error::domain(format!(
                    "lambda = {lambda} outside the representable range of the s* = -1 branch"
                )));
            }
            let x = brent(h, lo, hi, 1e-14)?;
            Ok(-1.0 - x.exp())
        }
        1 => {
            if lambda >= 1.0 {
                return Err(Error::domain(format!(
                    "s* = +1 requires lambda in (0, 1), got {lambda}"
                )));
            }
            let m_of = |y: f64| -y.exp_m1();
            let h = |y: f64| {
                let m = m_of(y);
                2.0 * m / (1.0 + m) * elliptic::mean_sn2(Modulus::new(m).expect("0 < m < 1")) - lambda
            };
            let (lo, hi) = POS_CHART;
            if h(lo) <= 0.0 {
                return Err(Error::domain(format!(
                    "lambda = {lambda} is too close to 1: the modulus 1 - m would underflow"
                )));
            }
            let y = brent(h, lo, hi, 1e-15)?;
            let m = m_of(y);
            // near m = 1 the nearest double to the root may no longer
            // reproduce λ
            let gap = (lambda_of_m(m)? - lambda).abs() / lambda;
            if gap > REPRESENTABLE_LAMBDA_GAP {
                return Err(Error::domain(format!(
                    "lambda = {lambda} is too close to 1: the nearest double modulus \
                     reproduces it only to {gap:.1e}"
                )));
            }
            Ok(m)
        }
        _ => Err(Error::domain(format!("s* must be +1 or -1, got {s_star}"))),
    }
}

/// Profile of `-s*η̈ - ⟨η²⟩η + λη³ = 0`.
pub fn solve_cubic_profile(lambda: f64, s_star: i8) -> Result<WaveProfile> {
    let m = cubic_modulus(lambda, s_star)?;
    let md = Modulus::new(m)?;
    let omega = 2.0 * elliptic::complete_k(md) / PI;
    let s = f64::from(s_star);
    let v = (2.0 * m * omega * omega / (s * lambda)).sqrt();
    let profile = WaveProfile {
        kind: ProfileKind::CubicSstar,
        v,
        omega,
        m,
        s_star: Some(s_star),
        lambda: Some(lambda),
        residual_sup: 0.0,
    }
    .with_residual();
    // first line of the parameter system: Ω²(1+m) = s* V²⟨sn²⟩
    let lhs = omega * omega * (1.0 + m);
    let rhs = s * v * v * elliptic::mean_sn2(md);
    if (lhs - rhs).abs() > 1e-9 * lhs.abs().max(1.0) {
        return Err(Error::CrossCheck {
            name: "cubic frequency relation".into(),
            a: lhs,
            b: rhs,
            tol: 1e-9,
        });
    }
    Ok(profile)
}

/// Profile of `η̈ + ⟨η²⟩η + λη³ = 0` (`m ∈ (-1, 0)`, `λ = -2m⟨sn²⟩/(1+m)`).
pub fn solve_exterior_profile(lambda: f64, s_star: i8) -> Result<WaveProfile> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    // m = -1 + e^z, z ∈ (-∞, 0)
    let h = |z: f64| {
        let m = z.exp_m1();
        -2.0 * m / z.exp() * elliptic::mean_sn2(Modulus::new(m).expect("-1 < m < 0")) - lambda
    };
    let (lo, hi) = (-700.0, -1e-300);
    if h(lo) <= 0.0 || h(hi) >= 0.0 {
        return Err(Error::domain(format!(
            "lambda = {lambda} outside the representable range of the exterior branch"
        )));
    }
    let m = brent(h, lo, hi, 1e-15)?.exp_m1();
    let md = Modulus::new(m)?;
    let omega = 2.0 * elliptic::complete_k(md) / PI;
    let v = (-2.0 * m * omega * omega / lambda).sqrt();
    Ok(WaveProfile {
        kind: ProfileKind::ExteriorLambda,
        v,
        omega,
        m,
        s_star: Some(s_star),
        lambda: Some(lambda),
        residual_sup: 0.0,
    }
    .with_residual())
}

/// Closed-form profiles of the two degenerate reductions.
pub fn degenerate_profile(kind: ProfileKind) -> Result<WaveProfile> {
    match kind {
        ProfileKind::NonlocalOnly => Ok(WaveProfile {
            kind,
            v: 2f64.sqrt(),
            omega: 1.0,
            m: 0.0,
            s_star: Some(1),
            lambda: Some(0.0),
            residual_sup: 0.0,
        }
        .with_residual()),
        ProfileKind::PureCubic => {
            // c₃(1+m) = 0 forces m = -1, and V² = 2Ω²
            let omega = 2.0 * elliptic::complete_k(Modulus::new(-1.0)?) / PI;
            Ok(WaveProfile {
                kind,
                v: 2f64.sqrt() * omega,
                omega,
                m: -1.0,
                s_star: Some(-1),
                lambda: Some(1.0),
                residual_sup: 0.0,
            }
            .with_residual())
        }
        _ => Err(Error::domain("not a degenerate profile kind")),
    }
}

/// Profile for one admissible `(λ, s*)` pair.
pub fn profile_for(reduced: &ReducedCoefficients) -> Result<WaveProfile> {
    match reduced.kind {
        ProfileKind::CubicSstar => solve_cubic_profile(reduced.lambda, reduced.s_star),
        ProfileKind::ExteriorLambda => solve_exterior_profile(reduced.lambda, reduced.s_star),
        ProfileKind::PureCubic | ProfileKind::NonlocalOnly => degenerate_profile(reduced.kind),
        ProfileKind::Quartic => Err(Error::domain("quartic profiles come from solve_quartic_profile")),
    }
}

/// Frequency–amplitude relation: `ω = √(1 - 2s*δ²)` (quadratic–cubic) or
/// `ω = √(1 - 2δ⁶)` (quartic).
pub fn frequency_map(delta: f64, case: NonlinearityCase, s_star: i8) -> Result<f64> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::domain(format!("delta must be non-negative, got {delta}")));
    }
    let shift = match case {
        NonlinearityCase::Quartic => 2.0 * delta.powi(6),
        NonlinearityCase::QuadraticCubic => {
            if s_star != 1 && s_star != -1 {
                return Err(Error::domain(format!("s* must be +1 or -1, got {s_star}")));
            }
            2.0 * f64::from(s_star) * delta * delta
        }
    };
    if shift >= 1.0 {
        return Err(Error::domain(format!("frequency undefined: 1 - {shift} <= 0")));
    }
    Ok((1.0 - shift).sqrt())
}
