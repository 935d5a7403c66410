//! Complete elliptic integrals and Jacobi elliptic functions for every real
//! parameter `m < 1` (parameter convention, `m = k²`).
//!
//! Everything is driven by one arithmetic–geometric mean sweep started at
//! `(1, √(1-m))`, which is valid for negative `m` as well, so no
//! modulus transformation is needed on the fast path. The defining
//! integrals (adaptive quadrature) and the amplitude ODE are exposed as
//! independent oracles.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::GaussIntegrator;
use crate::quadrature;

/// Default number of trapezoid nodes for period averages.
pub const DEFAULT_AVERAGE_POINTS: usize = 4096;

/// Elliptic parameter `m`, strictly below 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::domain(format!("elliptic parameter must be finite, got {m}")));
        }
        if m >= 1.0 {
            return Err(Error::domain(format!("elliptic parameter must satisfy m < 1, got {m}")));
        }
        Ok(Self(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Reciprocal-modulus image `m / (m - 1)`.
    pub fn reciprocal(self) -> Modulus {
        Modulus(self.0 / (self.0 - 1.0))
    }
}

impl TryFrom<f64> for Modulus {
    type Error = Error;
    fn try_from(m: f64) -> Result<Self> {
        Modulus::new(m)
    }
}

impl From<Modulus> for f64 {
    fn from(m: Modulus) -> f64 {
        m.0
    }
}

/// AGM sweep data: the means `a_n` and signed `c_n = (a_{n-1} - b_{n-1}) / 2`.
#[derive(Debug, Clone)]
struct Agm {
    a: Vec<f64>,
    c: Vec<f64>,
    /// `(K - E) / (m K)`, accumulated without cancellation.
    ke_ratio: f64,
}

impl Agm {
    fn new(m: f64) -> Self {
        let mut a = vec![1.0];
        let mut c = vec![0.0];
        let mut an = 1.0;
        let mut bn = (1.0 - m).sqrt();
        // c_1 = (1 - b_0) / 2 written without subtraction
        let mut cn = m / (2.0 * (1.0 + bn));
        // r_n = c_n^2 / m
        let mut r = m / (4.0 * (1.0 + bn) * (1.0 + bn));
        let mut ratio = 0.5;
        let mut pow2 = 1.0;
        for _ in 0..60 {
            let a_next = 0.5 * (an + bn);
            let b_next = (an * bn).sqrt();
            a.push(a_next);
            c.push(cn);
            ratio += pow2 * r;
            if cn.abs() <= 0.25 * f64::EPSILON * a_next {
                break;
            }
            // c_{n+1} = c_n^2 / (2 (a_n + b_n)), n >= 1
            let sum = a_next + b_next;
            let c_next = cn * cn / (2.0 * sum);
            r *= cn * cn / (4.0 * sum * sum);
            an = a_next;
            bn = b_next;
            cn = c_next;
            pow2 *= 2.0;
        }
        Agm {
            a,
            c,
            ke_ratio: ratio,
        }
    }

    fn k(&self) -> f64 {
        PI / (2.0 * self.a[self.a.len() - 1])
    }
}

/// Complete elliptic integral of the first kind,
/// `K(m) = ∫₀^{π/2} (1 - m sin²θ)^{-1/2} dθ`.
pub fn complete_k(m: Modulus) -> f64 {
    if m.0 == 0.0 {
        return FRAC_PI_2;
    }
    Agm::new(m.0).k()
}

/// Complete elliptic integral of the second kind,
/// `E(m) = ∫₀^{π/2} (1 - m sin²θ)^{1/2} dθ`.
pub fn complete_e(m: Modulus) -> f64 {
    if m.0 == 0.0 {
        return FRAC_PI_2;
    }
    let agm = Agm::new(m.0);
    agm.k() * (1.0 - m.0 * agm.ke_ratio)
}

/// `K` and `E` from a single AGM sweep.
pub fn complete_ke(m: Modulus) -> (f64, f64) {
    if m.0 == 0.0 {
        return (FRAC_PI_2, FRAC_PI_2);
    }
    let agm = Agm::new(m.0);
    let k = agm.k();
    (k, k * (1.0 - m.0 * agm.ke_ratio))
}

/// Defining integral of `K` by adaptive Gauss–Kronrod quadrature (oracle).
pub fn complete_k_quadrature(m: Modulus) -> f64 {
    let m = m.0;
    quadrature::adaptive(
        |th: f64| 1.0 / (1.0 - m * th.sin().powi(2)).sqrt(),
        0.0,
        FRAC_PI_2,
        1e-15,
        1e-14,
    )
}

/// Defining integral of `E` by adaptive Gauss–Kronrod quadrature (oracle).
pub fn complete_e_quadrature(m: Modulus) -> f64 {
    let m = m.0;
    quadrature::adaptive(
        |th: f64| (1.0 - m * th.sin().powi(2)).sqrt(),
        0.0,
        FRAC_PI_2,
        1e-15,
        1e-14,
    )
}

/// `dK/dm = (E/(1-m) - K) / (2m)`.
pub fn dk_dm(m: Modulus) -> f64 {
    if m.0 == 0.0 {
        return PI / 8.0;
    }
    let (k, e) = complete_ke(m);
    (e / (1.0 - m.0) - k) / (2.0 * m.0)
}

/// `dE/dm = (E - K) / (2m)`.
pub fn de_dm(m: Modulus) -> f64 {
    if m.0 == 0.0 {
        return -PI / 8.0;
    }
    let (k, e) = complete_ke(m);
    (e - k) / (2.0 * m.0)
}

/// Jacobi elliptic functions at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiSample {
    pub t: f64,
    pub am: f64,
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

impl JacobiSample {
    /// `d sn / dt = cn · dn`.
    pub fn sn_dot(&self) -> f64 {
        self.cn * self.dn
    }
}

/// Precomputed AGM data for repeated evaluation at a fixed parameter.
#[derive(Debug, Clone)]
pub struct Jacobi {
    m: f64,
    quarter_period: f64,
    agm: Agm,
}

impl Jacobi {
    pub fn new(m: Modulus) -> Self {
        let agm = Agm::new(m.0);
        let quarter_period = if m.0 == 0.0 { FRAC_PI_2 } else { agm.k() };
        Self {
            m: m.0,
            quarter_period,
            agm,
        }
    }

    pub fn modulus(&self) -> Modulus {
        Modulus(self.m)
    }

    /// `K(m)`; `sn` has period `4K`.
    pub fn quarter_period(&self) -> f64 {
        self.quarter_period
    }

    /// Amplitude `am(t, m)`, the inverse of `φ ↦ F(φ, m)`.
    pub fn am(&self, t: f64) -> f64 {
        if self.m == 0.0 {
            return t;
        }
        // am(t + 2K j) = am(t) + j π
        let half = 2.0 * self.quarter_period;
        let j = (t / half).round();
        let r = t - j * half;
        let n = self.agm.a.len() - 1;
        let mut phi = 2f64.powi(n as i32) * self.agm.a[n] * r;
        for i in (1..=n).rev() {
            let s = (self.agm.c[i] / self.agm.a[i]) * phi.sin();
            phi = 0.5 * (phi + s.clamp(-1.0, 1.0).asin());
        }
        phi + j * PI
    }

    pub fn eval(&self, t: f64) -> JacobiSample {
        let am = self.am(t);
        let (sn, cn) = am.sin_cos();
        let dn2 = if self.m >= 0.0 {
            (1.0 - self.m) + self.m * cn * cn
        } else {
            1.0 - self.m * sn * sn
        };
        JacobiSample {
            t,
            am,
            sn,
            cn,
            dn: dn2.max(0.0).sqrt(),
        }
    }

    pub fn sn(&self, t: f64) -> f64 {
        self.am(t).sin()
    }

    /// Average of `f(sample)` over one period `4K` (uniform trapezoid rule).
    pub fn period_mean(&self, points: usize, mut f: impl FnMut(&JacobiSample) -> f64) -> f64 {
        let period = 4.0 * self.quarter_period;
        quadrature::periodic_mean(points, period, |t| f(&self.eval(t)))
    }
}

/// Jacobi functions at `(t, m)`.
pub fn jacobi(t: f64, m: Modulus) -> JacobiSample {
    Jacobi::new(m).eval(t)
}

/// Amplitude obtained by integrating `d am/dt = √(1 - m sin² am)` from 0
/// (oracle path, independent of the AGM).
pub fn amplitude_by_ode(t: f64, m: Modulus) -> Result<f64> {
    let m = m.0;
    let f = |_s: f64, y: &[f64; 1]| [(1.0 - m * y[0].sin().powi(2)).sqrt()];
    let int = GaussIntegrator::new(1e-14);
    let steps = (t.abs() / 0.05).ceil().max(1.0) as usize;
    let mut y = [0.0];
    for i in 0..steps {
        let t0 = t * i as f64 / steps as f64;
        let t1 = t * (i + 1) as f64 / steps as f64;
        y = int.advance(&f, t0, &y, t1)?;
    }
    Ok(y[0])
}

/// Period average `⟨sn²(·, m)⟩ = (K - E) / (m K)`; `1/2` at `m = 0`.
pub fn mean_sn2(m: Modulus) -> f64 {
    if m.0 == 0.0 {
        return 0.5;
    }
    Agm::new(m.0).ke_ratio
}

/// Period averages of quartic and `dn`-weighted powers of `sn`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanRatios {
    /// `⟨sn⁴⟩`, by period quadrature.
    pub sn4: f64,
    /// `⟨sn²/dn²⟩ = (1 - ⟨sn²⟩) / (1 - m)`.
    pub sn2_over_dn2: f64,
    /// `⟨sn⁴/dn²⟩ = (1 + (m - 2)⟨sn²⟩) / (m (1 - m))`.
    pub sn4_over_dn2: f64,
}

pub fn mean_ratios(m: Modulus) -> Result<MeanRatios> {
    mean_ratios_with(m, DEFAULT_AVERAGE_POINTS)
}

pub fn mean_ratios_with(m: Modulus, points: usize) -> Result<MeanRatios> {
    if m.0 == 0.0 {
        return Err(Error::domain("mean_ratios requires m != 0"));
    }
    let mv = m.0;
    let phi = mean_sn2(m);
    let jac = Jacobi::new(m);
    let sn4 = jac.period_mean(points, |s| s.sn.powi(4));
    Ok(MeanRatios {
        sn4,
        sn2_over_dn2: (1.0 - phi) / (1.0 - mv),
        sn4_over_dn2: (1.0 + (mv - 2.0) * phi) / (mv * (1.0 - mv)),
    })
}

/// `ψ(m) = (7 + m) K(m) - 6 E(m)` on `(-1, 0]`.
pub fn psi_quartic(m: Modulus) -> Result<f64> {
    if !(m.0 > -1.0 && m.0 <= 0.0) {
        return Err(Error::domain(format!("psi_quartic requires m in (-1, 0], got {}", m.0)));
    }
    let (k, e) = complete_ke(m);
    Ok((7.0 + m.0) * k - 6.0 * e)
}

/// `∫₀^{π/2} (1 + m(1 + 6 sin²θ)) (1 - m sin²θ)^{-1/2} dθ` (oracle for ψ).
pub fn psi_quartic_integral(m: f64) -> f64 {
    quadrature::adaptive(
        |th: f64| {
            let s2 = th.sin().powi(2);
            (1.0 + m * (1.0 + 6.0 * s2)) / (1.0 - m * s2).sqrt()
        },
        0.0,
        FRAC_PI_2,
        1e-15,
        1e-14,
    )
}

/// `φ(m) = ⟨sn²⟩` through the reciprocal parameter `μ = m/(m-1)`:
/// `φ = 1 - 1/μ + E(μ) / (μ K(μ))`.
pub fn phi_reciprocal_route(m: Modulus) -> f64 {
    if m.0 == 0.0 {
        return 0.5;
    }
    let mu = m.reciprocal();
    let (k, e) = complete_ke(mu);
    1.0 - 1.0 / mu.0 + e / (mu.0 * k)
}

/// `φ(m) = ⟨sn²(·, m)⟩`, cross-checked against the reciprocal-parameter
/// route wherever that route is well conditioned (`|μ| ≥ 10⁻³`).
pub fn phi_mean_map(m: Modulus) -> Result<f64> {
    let direct = mean_sn2(m);
    let mu = m.0 / (m.0 - 1.0);
    if mu.abs() >= 1e-3 {
        let other = phi_reciprocal_route(m);
        let tol = 1e-11;
        if (direct - other).abs() > tol * direct.abs().max(1e-300) {
            return Err(Error::CrossCheck {
                name: "phi direct vs reciprocal route".into(),
                a: direct,
                b: other,
                tol,
            });
        }
    }
    Ok(direct)
}

/// `φ'(m) = (E²/(1-m) - K²) / (2 m² K²)`.
pub fn dphi_dm(m: Modulus) -> f64 {
    if m.0 == 0.0 {
        return 1.0 / 16.0;
    }
    let (k, e) = complete_ke(m);
    (e * e / (1.0 - m.0) - k * k) / (2.0 * m.0 * m.0 * k * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(m: f64) -> Modulus {
        Modulus::new(m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn rejects_m_at_or_above_one() {
        assert!(Modulus::new(1.0).is_err());
        assert!(Modulus::new(1.5).is_err());
        assert!(Modulus::new(f64::NAN).is_err());
        assert!(Modulus::new(0.999_999).is_ok());
    }

    #[test]
    fn k_and_e_at_zero() {
        assert_eq!(complete_k(md(0.0)), FRAC_PI_2);
        assert_eq!(complete_e(md(0.0)), FRAC_PI_2);
    }

    #[test]
    fn k_and_e_match_quadrature_oracle() {
        for m in [-50.0, -10.0, -2.0, -0.5, -0.29, 0.1, 0.5, 0.9, 0.99] {
            let m = md(m);
            assert!(rel(complete_k(m), complete_k_quadrature(m)) < 1e-12, "K {m:?}");
            assert!(rel(complete_e(m), complete_e_quadrature(m)) < 1e-12, "E {m:?}");
        }
    }

    #[test]
    fn e_tends_to_one() {
        let e = complete_e(md(1.0 - 1e-12));
        assert!((e - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reciprocal_transforms() {
        for m in [-10.0, -2.0, -0.5, -1e-3, -1234.5] {
            let m = md(m);
            let mu = m.reciprocal();
            let s = (1.0 - m.value()).sqrt();
            assert!(rel(complete_k(m), complete_k(mu) / s) < 1e-12);
            assert!(rel(complete_e(m), complete_e(mu) * s) < 1e-12);
        }
    }

    #[test]
    fn sn_special_values() {
        for m in [-4.0, -0.3, 0.0, 0.4, 0.95] {
            let j = Jacobi::new(md(m));
            let k = j.quarter_period();
            assert!((j.eval(k).sn - 1.0).abs() < 1e-14, "m = {m}");
            assert_eq!(j.eval(0.0).sn, 0.0);
        }
        for t in [-3.0, 0.2, 1.0, 7.5] {
            assert!((jacobi(t, md(0.0)).sn - f64::sin(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn amplitude_matches_ode_oracle() {
        for (t, m) in [(1.0, -0.29), (2.5, -7.0), (3.0, 0.6), (-1.7, -0.9)] {
            let am = jacobi(t, md(m)).am;
            let oracle = amplitude_by_ode(t, md(m)).unwrap();
            assert!((am - oracle).abs() < 1e-12, "t={t} m={m}: {am} vs {oracle}");
        }
    }

    #[test]
    fn mean_sn2_limits_and_quadrature() {
        assert_eq!(mean_sn2(md(0.0)), 0.5);
        assert!(mean_sn2(md(-1e30)) < 0.05);
        assert!(mean_sn2(md(1.0 - 1e-15)) > 0.9);
        for m in [-30.0, -1.5, -0.2, 1e-9, 0.5, 0.9] {
            let j = Jacobi::new(md(m));
            let q = j.period_mean(DEFAULT_AVERAGE_POINTS, |s| s.sn * s.sn);
            assert!((mean_sn2(md(m)) - q).abs() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn mean_ratio_identities_hold_against_quadrature() {
        for m in [0.5, -2.0, -0.7, 0.93] {
            let r = mean_ratios(md(m)).unwrap();
            let j = Jacobi::new(md(m));
            let q2 = j.period_mean(4096, |s| (s.sn / s.dn).powi(2));
            let q4 = j.period_mean(4096, |s| s.sn.powi(4) / (s.dn * s.dn));
            assert!((r.sn2_over_dn2 - q2).abs() < 1e-10, "m = {m}");
            assert!((r.sn4_over_dn2 - q4).abs() < 1e-10, "m = {m}");
        }
        let r0 = mean_ratios_with(md(1e-300), 1024).unwrap();
        assert!((r0.sn4 - 0.375).abs() < 1e-14);
        assert!(mean_ratios(md(0.0)).is_err());
    }

    #[test]
    fn closed_form_sn4_agrees_with_quadrature() {
        // ⟨sn⁴⟩ = ((2+m)K - 2(1+m)E) / (3 m² K)
        for m in [-3.0, -0.25, 0.3, 0.8] {
            let (k, e) = complete_ke(md(m));
            let closed = ((2.0 + m) * k - 2.0 * (1.0 + m) * e) / (3.0 * m * m * k);
            let r = mean_ratios(md(m)).unwrap();
            assert!((r.sn4 - closed).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn psi_matches_its_integral_form() {
        assert!((psi_quartic(md(0.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        for m in [-0.99, -0.5, -0.2554, -0.01] {
            let a = psi_quartic(md(m)).unwrap();
            let b = psi_quartic_integral(m);
            assert!((a - b).abs() < 1e-12, "m = {m}");
        }
        let near = psi_quartic(md(-1.0 + 1e-13)).unwrap();
        let limit = -quadrature::adaptive(
            |th: f64| 6.0 * th.sin().powi(2) / (1.0 + th.sin().powi(2)).sqrt(),
            0.0,
            FRAC_PI_2,
            1e-15,
            1e-14,
        );
        assert!(near < 0.0);
        assert!((near - limit).abs() < 1e-11);
        assert!(psi_quartic(md(-1.0)).is_err());
        assert!(psi_quartic(md(0.1)).is_err());
    }

    #[test]
    fn phi_is_increasing_with_positive_derivative() {
        let grid = [-10.0, -5.0, -2.0, -1.01, 0.1, 0.5, 0.9];
        let vals: Vec<f64> = grid.iter().map(|&m| phi_mean_map(md(m)).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]), "{vals:?}");
        for &m in &grid {
            assert!(dphi_dm(md(m)) > 0.0);
            let h = 1e-5 * (1.0 + f64::abs(m));
            let fd = (mean_sn2(md(m + h)) - mean_sn2(md(m - h))) / (2.0 * h);
            assert!(rel(dphi_dm(md(m)), fd) < 1e-6, "m = {m}");
        }
        assert_eq!(phi_mean_map(md(0.0)).unwrap(), 0.5);
    }

    #[test]
    fn derivative_formulas_match_finite_differences() {
        for m in [-3.0, -0.4, 0.2, 0.7] {
            let h = 1e-5;
            let fk = (complete_k(md(m + h)) - complete_k(md(m - h))) / (2.0 * h);
            let fe = (complete_e(md(m + h)) - complete_e(md(m - h))) / (2.0 * h);
            assert!(rel(dk_dm(md(m)), fk) < 1e-8);
            assert!(rel(de_dm(md(m)), fe) < 1e-8);
        }
    }
}
