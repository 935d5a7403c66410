//! Large-`n` development of `Φ_n(v) = Φ₀(H_n v)` against the reduced functional.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::box_op::bilinear;
use super::series::{CosCos, CosineProfile, FourierSeries1D, FourierSeries2D, Grid2};
use crate::bifurcation::{alpha_gamma_beta, ReducedEquation};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DevelopmentCase {
    Quartic { a4: f64 },
    Cubic { a2: f64, a3: CosineProfile, s_star: i8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevelopmentReport {
    pub ns: Vec<usize>,
    pub beta: f64,
    /// `Ψ(η)` from one-dimensional quadrature.
    pub psi: f64,
    /// `Φ_n(c_n v) / (4πβ² n^e)` with `c_n = βn^{1/3}, e = 8/3` (quartic) or `c_n = βn, e = 4`.
    pub rescaled: Vec<f64>,
    /// `rescaled - Ψ`, minus the `R₃` part in the cubic case.
    pub remainders: Vec<f64>,
    /// `n² · remainders`.
    pub scaled_remainders: Vec<f64>,
    /// Least-squares slope of `-ln|remainder|` against `ln n`.
    pub fitted_exponent: f64,
    /// Coefficient of `R(η)/n²` inside the bracket: `a₄²β⁶/(8π) = 3/(8π³)` or `β²/(4π)`.
    pub remainder_coefficient: f64,
    /// `a₄²/(8π)`, the coefficient as stated without the `β⁶` factor (quartic only).
    pub stated_alpha: Option<f64>,
    /// `R(η)` (quartic) or `R₂(η)` (cubic) evaluated at `n = 1`.
    pub r_eta: f64,
    /// `R₃(η)` at each `n` (zero in the quartic case).
    pub r3: Vec<f64>,
    /// `⟨m⟩` as the mean of `v^{2d}` versus the closed form in moments of `η`.
    pub mean_m: f64,
    pub mean_m_formula: f64,
    /// Largest relative gap between `½‖H_n v‖²` from coefficients, from 2D
    /// grid quadrature, and `2πn²∫η̇²`.
    pub kinetic_defect: f64,
    /// Largest coefficient of `H_n v` off the multiples of `n`.
    pub support_defect: f64,
}

fn moments(eta: &FourierSeries1D) -> (f64, f64) {
    let m = 8 * (eta.modes() + 1);
    let s = eta.samples(m);
    let m2 = s.iter().map(|x| x * x).sum::<f64>() / m as f64;
    let m4 = s.iter().map(|x| x.powi(4)).sum::<f64>() / m as f64;
    (m2, m4)
}

/// `½‖H_n v‖²` three ways; returns the coefficient value and the largest relative gap.
fn kinetic_check(eta: &FourierSeries1D, n: usize) -> (f64, f64, f64) {
    let series = FourierSeries2D::from_eta(eta, n);
    let coeff = 0.5 * series.h1_norm_sq();
    let closed = 2.0 * PI * (n * n) as f64 * eta.kinetic();
    let k = eta.modes();
    let grid = Grid2::for_degree(n * k);
    let pts = grid.points();
    let size = grid.n;
    let mut vt2 = 0.0;
    let mut vx2 = 0.0;
    for &t in &pts {
        for &x in &pts {
            let nf = n as f64;
            let (dp, dm) = (eta.eval_dot(nf * (t + x)), eta.eval_dot(nf * (t - x)));
            vt2 += (nf * (dp - dm)).powi(2);
            vx2 += (nf * (dp + dm)).powi(2);
        }
    }
    let quad = 0.5 * 2.0 * PI * PI * (vt2 + vx2) / (size * size) as f64;
    let mut support = 0.0f64;
    for l in 0..=series.l_max {
        for j in 1..=series.j_max {
            if l % n != 0 || j % n != 0 {
                support = support.max(series.get(l, j).abs());
            }
        }
    }
    let gap = ((coeff - closed).abs().max((quad - closed).abs())) / closed.abs().max(f64::MIN_POSITIVE);
    (coeff, gap, support)
}

struct Constants {
    beta: f64,
    psi: f64,
    remainder_coefficient: f64,
    stated_alpha: Option<f64>,
    r_eta: f64,
    mean_m_formula: f64,
}

fn fit_exponent(ns: &[usize], rem: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = rem.iter().map(|r| r.abs().ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    -sxy / sxx
}

/// Evaluates `Φ_n` on the rescaled `v = η(t+x) - η(t-x)` for each `n` and
/// compares with `Ψ(η)`.
pub fn verify_development(case: &DevelopmentCase, eta: &FourierSeries1D, ns: &[usize]) -> Result<DevelopmentReport> {
    if ns.len() < 2 || ns.contains(&0) {
        return Err(Error::domain("need at least two positive n"));
    }
    let k = eta.modes();
    let (m2, m4) = moments(eta);
    let (power, degree) = match case {
        DevelopmentCase::Quartic { a4 } => {
            if *a4 == 0.0 {
                return Err(Error::domain("a4 must be non-zero"));
            }
            (4, 4 * k)
        }
        DevelopmentCase::Cubic { s_star, .. } => {
            if *s_star != 1 && *s_star != -1 {
                return Err(Error::domain("s* must be +1 or -1"));
            }
            (2, 4 * k)
        }
    };
    // base products: v^power for the nonlocal term, v⁴ for the local one
    let grid = Grid2::for_degree(degree);
    let v = grid.v_of_eta(eta);
    let vp: Vec<f64> = v.iter().map(|x| x.powi(power)).collect();
    let f = grid.analyze_coscos(&vp, power as usize * k, power as usize * k);
    let v4: Vec<f64> = v.iter().map(|x| x.powi(4)).collect();
    let f4 = grid.analyze_coscos(&v4, 4 * k, 4 * k);
    let mean_m = f.get(0, 0);
    let nonlocal = |n: usize| bilinear(&f, &f, n);

    let mut rescaled = Vec::new();
    let mut remainders = Vec::new();
    let mut r3 = Vec::new();
    let mut kinetic_defect = 0.0f64;
    let mut support_defect = 0.0f64;
    let consts = match case {
        DevelopmentCase::Quartic { a4 } => {
            let beta = (3.0 / (PI * PI * a4 * a4)).powf(1.0 / 6.0);
            let mm = m4 + 3.0 * m2 * m2;
            let psi = 0.5 * eta.kinetic() - 0.25 * PI * mm * mm;
            for &n in ns {
                let (kin, gap, sup) = kinetic_check(eta, n);
                kinetic_defect = kinetic_defect.max(gap);
                support_defect = support_defect.max(sup);
                let nf = n as f64;
                let c = beta * nf.powf(1.0 / 3.0);
                let phi = c * c * kin - 0.5 * a4 * a4 * c.powi(8) * nonlocal(n);
                let r = phi / (4.0 * PI * beta * beta * nf.powf(8.0 / 3.0));
                rescaled.push(r);
                remainders.push(r - psi);
                r3.push(0.0);
            }
            let r_eta = PI.powi(4) / 6.0 * mean_m * mean_m - nonlocal(1);
            Constants {
                beta,
                psi,
                remainder_coefficient: a4 * a4 * beta.powi(6) / (8.0 * PI),
                stated_alpha: Some(a4 * a4 / (8.0 * PI)),
                r_eta,
                mean_m_formula: 2.0 * mm,
            }
        }
        DevelopmentCase::Cubic { a2, a3, s_star } => {
            let (alpha, gamma, beta) = alpha_gamma_beta(*a2, a3.mean);
            let s = f64::from(*s_star);
            let i2 = eta.integral_sq();
            let i4 = 2.0 * PI * m4;
            let psi = 0.5 * s * eta.kinetic() + beta * beta / (4.0 * PI) * (alpha * i2 * i2 + gamma * i4);
            for &n in ns {
                let (kin, gap, sup) = kinetic_check(eta, n);
                kinetic_defect = kinetic_defect.max(gap);
                support_defect = support_defect.max(sup);
                let nf = n as f64;
                let c = beta * nf;
                // ∫_Ω a₃(x)(H_n v)⁴ through the t-mean row of v⁴
                let a3n = a3.pullback(n);
                let local = |prof: &CosineProfile| -> f64 {
                    let mut acc = 2.0 * PI * PI * prof.mean * f4.get(0, 0);
                    for (p, cq) in prof.modes.iter().enumerate() {
                        acc += PI * PI * cq * f4.get(0, p + 1);
                    }
                    acc
                };
                let quartic_local = local(&a3n);
                let fluct = CosineProfile {
                    mean: 0.0,
                    modes: a3n.modes.clone(),
                };
                let r3n = 0.25 * local(&fluct);
                let phi = s * c * c * kin - 0.5 * a2 * a2 * c.powi(4) * nonlocal(n) + 0.25 * c.powi(4) * quartic_local;
                let r = phi / (4.0 * PI * beta * beta * nf.powi(4));
                rescaled.push(r);
                remainders.push(r - psi - beta * beta / (4.0 * PI) * r3n);
                r3.push(r3n);
            }
            let r_eta = -0.5 * a2 * a2 * (nonlocal(1) - PI * PI / 6.0 * i2 * i2);
            Constants {
                beta,
                psi,
                remainder_coefficient: beta * beta / (4.0 * PI),
                stated_alpha: None,
                r_eta,
                mean_m_formula: 2.0 * m2,
            }
        }
    };
    let scaled_remainders = ns.iter().zip(&remainders).map(|(&n, r)| (n * n) as f64 * r).collect();
    Ok(DevelopmentReport {
        ns: ns.to_vec(),
        beta: consts.beta,
        psi: consts.psi,
        fitted_exponent: fit_exponent(ns, &remainders),
        scaled_remainders,
        rescaled,
        remainders,
        remainder_coefficient: consts.remainder_coefficient,
        stated_alpha: consts.stated_alpha,
        r_eta: consts.r_eta,
        r3,
        mean_m,
        mean_m_formula: consts.mean_m_formula,
        kinetic_defect,
        support_defect,
    })
}

/// The reduced equation whose functional is `Ψ` for `case`.
pub fn reduced_equation(case: &DevelopmentCase) -> Result<ReducedEquation> {
    match case {
        DevelopmentCase::Quartic { .. } => Ok(ReducedEquation::QuarticA),
        DevelopmentCase::Cubic { a2, a3, s_star } => {
            let (alpha, gamma, beta) = alpha_gamma_beta(*a2, a3.mean);
            Ok(ReducedEquation::Cubic {
                kappa: -f64::from(*s_star),
                c2: 2.0 * beta * beta * alpha,
                c3: beta * beta * gamma / PI,
            })
        }
    }
}

/// `CosCos` coefficients of `(η(t+x) - η(t-x))^p` on the base grid.
pub fn power_coscos(eta: &FourierSeries1D, p: i32) -> CosCos {
    let k = eta.modes();
    let deg = p as usize * k;
    let grid = Grid2::for_degree(deg);
    let v = grid.v_of_eta(eta);
    let vp: Vec<f64> = v.iter().map(|x| x.powi(p)).collect();
    grid.analyze_coscos(&vp, deg, deg)
}
