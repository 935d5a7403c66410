//! Newton solver for the zeroth-order bifurcation equation on `V_n`.
//!
//! Unknowns are the base coefficients `b_k` of `ṽ = Σ b_k φ_k`,
//! `φ_k = 2cos(kt) sin(kx)`; the solution is `v̄_n = H_n ṽ`. All products are
//! formed on the base grid and `□⁻¹` is applied at frequency `n` exactly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::box_op::{dual_weight, kernel_apply};
use super::series::{CosineProfile, FourierSeries1D, Grid2};
use crate::linearization::min_singular_value;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum BifurcationCase {
    /// `Δv + 4a₄²Π_V(v³□⁻¹v⁴) = 0`.
    Quartic { a4: f64 },
    /// `-s*Δv = 2a₂²Π_V(v□⁻¹v²) - Π_V(a₃(x)v³)`.
    Cubic { a2: f64, a3: CosineProfile, s_star: i8 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSolution {
    pub n: usize,
    /// Base profile: `v̄_n(t,x) = η(n(t+x)) - η(n(t-x))`.
    pub eta: FourierSeries1D,
    pub iterations: usize,
    /// Largest `|r_k|` over the unknown modes.
    pub residual: f64,
    /// Largest `|r_k|` over the next `K` modes, which are not unknowns.
    pub residual_tail: f64,
    /// `σ_min` of `D⁻¹J`, `D = diag(2n²k²)`: non-degeneracy in `V_n`.
    pub sigma_min: f64,
}

struct Workspace<'a> {
    case: &'a BifurcationCase,
    n: usize,
    k: usize,
    k_out: usize,
    grid: Grid2,
    phis: Vec<Vec<f64>>,
    a3n: Vec<f64>,
}

impl<'a> Workspace<'a> {
    fn new(case: &'a BifurcationCase, n: usize, k: usize) -> Self {
        let k_out = 2 * k;
        let a3n = match case {
            BifurcationCase::Cubic { a3, .. } => Some(a3.pullback(n)),
            BifurcationCase::Quartic { .. } => None,
        };
        // v³φ_k against its dual field, or a₃v³φ_k, stays below this degree
        let extra = a3n.as_ref().map_or(0, |p| p.max_mode());
        let grid = Grid2::for_degree(3 * k + k_out + extra);
        let phis = (1..=k_out).map(|j| grid.phi(j)).collect();
        let a3n = a3n.map_or_else(Vec::new, |p| grid.x_field(|x| p.eval(x)));
        Self {
            case,
            n,
            k,
            k_out,
            grid,
            phis,
            a3n,
        }
    }

    /// Field `H` with `∫_Ω F·H = ∫_Ω H_nF □⁻¹ H_nG` for even–even `F` of degree ≤ `p_out`.
    fn dual(&self, g: &[f64], deg: usize, p_out: usize) -> Vec<f64> {
        let gc = self.grid.analyze_coscos(g, deg, deg);
        let kg = kernel_apply(&gc, self.n, p_out);
        self.grid.synth_coscos(&kg, dual_weight)
    }

    fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }

    /// Residual over modes `1..=k_out` and, if asked, the Jacobian over `1..=k`.
    fn evaluate(&self, b: &[f64], with_jacobian: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
        let g = &self.grid;
        let eta = FourierSeries1D::new(b.to_vec());
        let v = g.v_of_eta(&eta);
        let n2 = (self.n * self.n) as f64;
        let (kk, ko) = (self.k, self.k_out);
        let mut r = vec![0.0; ko];
        let mut jac = with_jacobian.then(|| DMatrix::<f64>::zeros(kk, kk));
        match self.case {
            BifurcationCase::Quartic { a4 } => {
                let a42 = a4 * a4;
                let v2: Vec<f64> = v.iter().map(|x| x * x).collect();
                let v3 = Self::mul(&v2, &v);
                let v4 = Self::mul(&v2, &v2);
                let h = self.dual(&v4, 4 * kk, 3 * kk + ko);
                let v3h = Self::mul(&v3, &h);
                for k in 1..=ko {
                    let bk = if k <= kk { b[k - 1] } else { 0.0 };
                    r[k - 1] = -2.0 * n2 * (k * k) as f64 * bk + 4.0 * a42 * g.mean_product(&v3h, &self.phis[k - 1]);
                }
                if let Some(jac) = jac.as_mut() {
                    let v2h = Self::mul(&v2, &h);
                    let v3phi: Vec<Vec<f64>> = (0..kk).map(|j| Self::mul(&v3, &self.phis[j])).collect();
                    let duals: Vec<Vec<f64>> = v3phi.iter().map(|f| self.dual(f, 4 * kk, 4 * kk)).collect();
                    for k in 0..kk {
                        let left = Self::mul(&v2h, &self.phis[k]);
                        for j in k..kk {
                            let mut val = 4.0
                                * a42
                                * (3.0 * g.mean_product(&left, &self.phis[j]) + 4.0 * g.mean_product(&v3phi[k], &duals[j]));
                            if j == k {
                                val -= 2.0 * n2 * ((k + 1) * (k + 1)) as f64;
                            }
                            jac[(k, j)] = val;
                            jac[(j, k)] = val;
                        }
                    }
                }
            }
            BifurcationCase::Cubic { a2, s_star, .. } => {
                let a22 = a2 * a2;
                let s = f64::from(*s_star);
                let v2: Vec<f64> = v.iter().map(|x| x * x).collect();
                let h = self.dual(&v2, 2 * kk, kk + ko);
                let vh = Self::mul(&v, &h);
                let a3v3: Vec<f64> = v2.iter().zip(&v).zip(&self.a3n).map(|((x, y), a)| a * x * y).collect();
                for k in 1..=ko {
                    let bk = if k <= kk { b[k - 1] } else { 0.0 };
                    let phi = &self.phis[k - 1];
                    r[k - 1] = 2.0 * s * n2 * (k * k) as f64 * bk - 2.0 * a22 * g.mean_product(&vh, phi)
                        + g.mean_product(&a3v3, phi);
                }
                if let Some(jac) = jac.as_mut() {
                    let vphi: Vec<Vec<f64>> = (0..kk).map(|j| Self::mul(&v, &self.phis[j])).collect();
                    let duals: Vec<Vec<f64>> = vphi.iter().map(|f| self.dual(f, 2 * kk, 2 * kk)).collect();
                    let a3v2: Vec<f64> = v2.iter().zip(&self.a3n).map(|(x, a)| a * x).collect();
                    for k in 0..kk {
                        let hk = Self::mul(&h, &self.phis[k]);
                        let ak = Self::mul(&a3v2, &self.phis[k]);
                        for j in k..kk {
                            let phj = &self.phis[j];
                            let mut val = -2.0 * a22 * (g.mean_product(&hk, phj) + 2.0 * g.mean_product(&vphi[k], &duals[j]))
                                + 3.0 * g.mean_product(&ak, phj);
                            if j == k {
                                val += 2.0 * s * n2 * ((k + 1) * (k + 1)) as f64;
                            }
                            jac[(k, j)] = val;
                            jac[(j, k)] = val;
                        }
                    }
                }
            }
        }
        (r, jac)
    }
}

fn validate(case: &BifurcationCase, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    match case {
        BifurcationCase::Quartic { a4 } if *a4 == 0.0 || !a4.is_finite() => Err(Error::domain("a4 must be non-zero")),
        BifurcationCase::Cubic { s_star, .. } if *s_star != 1 && *s_star != -1 => {
            Err(Error::domain("s* must be +1 or -1"))
        }
        _ => Ok(()),
    }
}

/// Coefficients on `φ_{nk}`, `k = 1..=2K`, of the bifurcation equation residual.
pub fn bifurcation_residual(case: &BifurcationCase, n: usize, eta: &FourierSeries1D) -> Result<Vec<f64>> {
    validate(case, n)?;
    Ok(Workspace::new(case, n, eta.modes()).evaluate(&eta.b, false).0)
}

/// Analytic Jacobian of [`bifurcation_residual`] over the first `K` modes.
pub fn bifurcation_jacobian(case: &BifurcationCase, n: usize, eta: &FourierSeries1D) -> Result<DMatrix<f64>> {
    validate(case, n)?;
    Ok(Workspace::new(case, n, eta.modes()).evaluate(&eta.b, true).1.unwrap())
}

/// Base seed `c·η*` from a critical point `η*` of `Ψ`: `c = βn^{1/3}` (quartic) or `βn`.
pub fn scaled_seed(case: &BifurcationCase, n: usize, eta_star: &FourierSeries1D) -> FourierSeries1D {
    let nf = n as f64;
    let c = match case {
        BifurcationCase::Quartic { a4 } => (3.0 / (PI * PI * a4 * a4)).powf(1.0 / 6.0) * nf.cbrt(),
        BifurcationCase::Cubic { a2, a3, .. } => crate::bifurcation::alpha_gamma_beta(*a2, a3.mean).2 * nf,
    };
    eta_star.scaled(c)
}

/// Newton in `V_n` from `seed` (base coefficients, `K = seed.modes()` unknowns).
pub fn solve_bifurcation(
    case: &BifurcationCase,
    n: usize,
    seed: &FourierSeries1D,
    tol: f64,
    max_iterations: usize,
) -> Result<BifurcationSolution> {
    validate(case, n)?;
    let k = seed.modes();
    let ws = Workspace::new(case, n, k);
    let mut b = seed.b.clone();
    let scale = 2.0 * (n * n) as f64 * b.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let sup = |r: &[f64]| r[..k].iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let (mut r, mut jac) = ws.evaluate(&b, true);
    let mut it = 0;
    while sup(&r) > tol * scale {
        if it == max_iterations {
            return Err(Error::Convergence {
                what: "bifurcation Newton".into(),
                iterations: it,
                achieved: sup(&r),
            });
        }
        it += 1;
        let j = jac.take().unwrap();
        let rhs = -DVector::from_column_slice(&r[..k]);
        let step = j.clone().lu().solve(&rhs).ok_or_else(|| Error::Singular {
            what: "bifurcation Jacobian".into(),
            sigma_min: min_singular_value(&j),
        })?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = b.iter().zip(step.iter()).map(|(x, d)| x + t * d).collect();
            let (rt, _) = ws.evaluate(&trial, false);
            if sup(&rt) < sup(&r) || t < 1e-6 {
                jac = ws.evaluate(&trial, true).1;
                b = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
    }
    let mut j = jac.unwrap();
    for kk in 1..=k {
        let d = 2.0 * (n * n * kk * kk) as f64;
        for c in 0..k {
            j[(kk - 1, c)] /= d;
        }
    }
    Ok(BifurcationSolution {
        n,
        eta: FourierSeries1D::new(b),
        iterations: it,
        residual: sup(&r),
        residual_tail: r[k..].iter().fold(0.0f64, |a, x| a.max(x.abs())),
        sigma_min: min_singular_value(&j),
    })
}
