//! Galerkin Newton solver for the reduced profile equations in sine
//! coefficients, and the reduced functionals whose critical points they are.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::series::FourierSeries1D;
use crate::bifurcation::ReducedEquation;
use crate::linearization::min_singular_value;
use crate::{Error, Result};

/// Collocation data on `M = 4(N+1)` points, enough for exact cubic and quartic averages.
struct Collocation {
    n: usize,
    m: usize,
    /// `sin(k t_i)` at `[(k-1) m + i]`.
    sin: Vec<f64>,
}

impl Collocation {
    fn new(n: usize) -> Self {
        let m = 4 * (n + 1);
        let mut sin = vec![0.0; n * m];
        for k in 1..=n {
            for i in 0..m {
                sin[(k - 1) * m + i] = (2.0 * PI * ((k * i) % m) as f64 / m as f64).sin();
            }
        }
        Self { n, m, sin }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.sin[(k - 1) * self.m..k * self.m]
    }

    fn synth(&self, b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (k, bk) in b.iter().enumerate() {
            for (o, s) in out.iter_mut().zip(self.row(k + 1)) {
                *o += bk * s;
            }
        }
        out
    }

    /// `[f]_k = (1/π)∫ f sin(kt)`.
    fn coeff(&self, f: &[f64], k: usize) -> f64 {
        2.0 / self.m as f64 * f.iter().zip(self.row(k)).map(|(a, b)| a * b).sum::<f64>()
    }

    fn mean(&self, f: impl Fn(f64) -> f64, eta: &[f64]) -> f64 {
        eta.iter().map(|&e| f(e)).sum::<f64>() / self.m as f64
    }
}

/// Sine coefficients of the equation residual and its Jacobian.
fn residual_and_jacobian(eq: &ReducedEquation, col: &Collocation, b: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = col.n;
    let eta = col.synth(b);
    let m2 = col.mean(|e| e * e, &eta);
    let cube: Vec<f64> = eta.iter().map(|e| e * e * e).collect();
    let cube_k: Vec<f64> = (1..=n).map(|k| col.coeff(&cube, k)).collect();
    let sq: Vec<f64> = eta.iter().map(|e| e * e).collect();
    // [η² sin(jt)]_k
    let mut sq_jk = DMatrix::<f64>::zeros(n, n);
    for j in 1..=n {
        let f: Vec<f64> = sq.iter().zip(col.row(j)).map(|(a, s)| a * s).collect();
        for k in j..=n {
            let v = col.coeff(&f, k);
            sq_jk[(k - 1, j - 1)] = v;
            sq_jk[(j - 1, k - 1)] = v;
        }
    }
    let mut r = DVector::<f64>::zeros(n);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    match *eq {
        ReducedEquation::QuarticA => {
            let m4 = col.mean(|e| e.powi(4), &eta);
            let a = m4 + 3.0 * m2 * m2;
            let da: Vec<f64> = (0..n).map(|j| 2.0 * cube_k[j] + 6.0 * m2 * b[j]).collect();
            for k in 0..n {
                let kk = ((k + 1) * (k + 1)) as f64;
                let inner = 3.0 * m2 * b[k] + cube_k[k];
                r[k] = -kk * b[k] + a * inner;
                for j in 0..n {
                    let mut v = da[j] * inner + a * (3.0 * b[j] * b[k] + 3.0 * sq_jk[(k, j)]);
                    if j == k {
                        v += -kk + 3.0 * a * m2;
                    }
                    jac[(k, j)] = v;
                }
            }
        }
        ReducedEquation::Cubic { kappa, c2, c3 } => {
            for k in 0..n {
                let kk = ((k + 1) * (k + 1)) as f64;
                r[k] = -kappa * kk * b[k] + c2 * m2 * b[k] + c3 * cube_k[k];
                for j in 0..n {
                    let mut v = c2 * b[k] * b[j] + 3.0 * c3 * sq_jk[(k, j)];
                    if j == k {
                        v += -kappa * kk + c2 * m2;
                    }
                    jac[(k, j)] = v;
                }
            }
        }
    }
    (r, jac)
}

/// Sine coefficients `[R(η)]_k` of the pointwise residual of `eq`.
pub fn ode_residual(eq: &ReducedEquation, eta: &FourierSeries1D) -> Vec<f64> {
    let col = Collocation::new(eta.modes());
    residual_and_jacobian(eq, &col, &eta.b).0.iter().copied().collect()
}

/// Analytic Jacobian `∂[R]_k/∂b_j`.
pub fn ode_jacobian(eq: &ReducedEquation, eta: &FourierSeries1D) -> DMatrix<f64> {
    let col = Collocation::new(eta.modes());
    residual_and_jacobian(eq, &col, &eta.b).1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 50,
            max_halvings: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    pub eta: FourierSeries1D,
    pub iterations: usize,
    /// 2-norm of the coefficient residual after each accepted step, starting with the guess.
    pub residual_history: Vec<f64>,
    pub residual: f64,
}

/// Newton on the sine coefficients `b_1..b_N` (`N = guess.modes()`) with
/// residual-halving backtracking.
pub fn ode_newton(eq: &ReducedEquation, guess: &FourierSeries1D, opts: NewtonOptions) -> Result<OdeSolution> {
    let n = guess.modes();
    if n == 0 {
        return Err(Error::domain("ode_newton needs at least one mode"));
    }
    let col = Collocation::new(n);
    let mut b = guess.b.clone();
    let (mut r, mut jac) = residual_and_jacobian(eq, &col, &b);
    let mut history = vec![r.norm()];
    let mut it = 0;
    while r.norm() >= opts.tol {
        if it == opts.max_iterations {
            return Err(Error::Convergence {
                what: "ode_newton".into(),
                iterations: it,
                achieved: r.norm(),
            });
        }
        it += 1;
        let step = jac.clone().lu().solve(&(-&r)).ok_or_else(|| Error::Singular {
            what: "ode_newton Jacobian".into(),
            sigma_min: min_singular_value(&jac),
        })?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = b.iter().zip(step.iter()).map(|(x, d)| x + t * d).collect();
            let (rt, jt) = residual_and_jacobian(eq, &col, &trial);
            if rt.norm() < r.norm() {
                b = trial;
                r = rt;
                jac = jt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::Convergence {
                what: "ode_newton line search".into(),
                iterations: it,
                achieved: r.norm(),
            });
        }
        history.push(r.norm());
    }
    Ok(OdeSolution {
        eta: FourierSeries1D::new(b),
        iterations: it,
        residual: r.norm(),
        residual_history: history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedSolution {
    pub solution: OdeSolution,
    pub modes: usize,
    /// Sup-norm change of `η` at the last doubling.
    pub doubling_change: f64,
}

/// Solves at `N`, `2N`, … until doubling changes `η` by less than `tol` in sup norm.
pub fn ode_newton_refined(
    eq: &ReducedEquation,
    guess: &FourierSeries1D,
    opts: NewtonOptions,
    tol: f64,
    max_modes: usize,
) -> Result<RefinedSolution> {
    let mut coarse = ode_newton(eq, guess, opts)?;
    let mut n = guess.modes();
    loop {
        let fine = ode_newton(eq, &coarse.eta.resized(2 * n), opts)?;
        let points = 16 * n;
        let change = fine.eta.sup_distance(|t| coarse.eta.eval(t), points);
        if change < tol {
            return Ok(RefinedSolution {
                solution: fine,
                modes: 2 * n,
                doubling_change: change,
            });
        }
        if 4 * n > max_modes {
            return Err(Error::Resolution {
                what: format!("ode_newton at {} modes", 2 * n),
                change,
            });
        }
        coarse = fine;
        n *= 2;
    }
}

/// `σ_min` of `D⁻¹J/κ`, `D = diag(k²)`, the Galerkin counterpart of the spectral kernel check.
pub fn galerkin_sigma_min(eq: &ReducedEquation, eta: &FourierSeries1D) -> f64 {
    let mut jac = ode_jacobian(eq, eta);
    let kappa = match *eq {
        ReducedEquation::QuarticA => 1.0,
        ReducedEquation::Cubic { kappa, .. } => kappa,
    };
    for k in 1..=eta.modes() {
        let d = (k * k) as f64 * kappa;
        for j in 0..eta.modes() {
            jac[(k - 1, j)] /= d;
        }
    }
    min_singular_value(&jac)
}

/// Reduced functional `Ψ` and its gradient in the sine coefficients.
///
/// Quartic: `½∫η̇² - (2π/8)(⟨η⁴⟩ + 3⟨η²⟩²)²`. Cubic form
/// `κη̈ + c₂⟨η²⟩η + c₃η³`: `-(κ/2)∫η̇² + (c₂/8π)(∫η²)² + (c₃/4)∫η⁴`.
pub fn functional_and_gradient(eq: &ReducedEquation, eta: &FourierSeries1D) -> (f64, Vec<f64>) {
    let col = Collocation::new(eta.modes());
    let (r, _) = residual_and_jacobian(eq, &col, &eta.b);
    let e = col.synth(&eta.b);
    let m2 = col.mean(|x| x * x, &e);
    let m4 = col.mean(|x| x.powi(4), &e);
    match *eq {
        ReducedEquation::QuarticA => {
            let mm = m4 + 3.0 * m2 * m2;
            let value = 0.5 * eta.kinetic() - 0.25 * PI * mm * mm;
            (value, r.iter().map(|x| -PI * x).collect())
        }
        ReducedEquation::Cubic { kappa, c2, c3 } => {
            let i2 = 2.0 * PI * m2;
            let value = -0.5 * kappa * eta.kinetic() + c2 / (8.0 * PI) * i2 * i2 + 0.25 * c3 * 2.0 * PI * m4;
            (value, r.iter().map(|x| PI * x).collect())
        }
    }
}

/// `Q(η) = (∫η²)² / (2π∫η⁴)`, which takes values in `(0, 1)`.
pub fn q_functional(eta: &FourierSeries1D) -> f64 {
    let col = Collocation::new(eta.modes());
    let e = col.synth(&eta.b);
    let m2 = col.mean(|x| x * x, &e);
    let m4 = col.mean(|x| x.powi(4), &e);
    m2 * m2 / m4
}
