//! Implicit Gauss–Legendre Runge–Kutta integration (4 stages, order 8)
//! with step-doubling error control.
//!
//! Gauss collocation methods conserve quadratic invariants, so the
//! Wronskian of a linear second-order system is preserved to round-off.

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, GaussRule};

const STAGES: usize = 4;
const ORDER: i32 = 8;

#[derive(Debug, Clone)]
pub struct GaussIntegrator {
    a: [[f64; STAGES]; STAGES],
    b: [f64; STAGES],
    c: [f64; STAGES],
    /// Local error tolerance, mixed absolute/relative.
    pub tol: f64,
    /// Maximum bisection depth of a single requested interval.
    pub max_depth: u32,
}

impl Default for GaussIntegrator {
    fn default() -> Self {
        Self::new(1e-12)
    }
}

impl GaussIntegrator {
    pub fn new(tol: f64) -> Self {
        let (x, w) = gauss_legendre(STAGES);
        let mut c = [0.0; STAGES];
        let mut b = [0.0; STAGES];
        for i in 0..STAGES {
            c[i] = 0.5 * (1.0 + x[i]);
            b[i] = 0.5 * w[i];
        }
        let lagrange = |j: usize, tau: f64| {
            (0..STAGES)
                .filter(|&k| k != j)
                .map(|k| (tau - c[k]) / (c[j] - c[k]))
                .product::<f64>()
        };
        let rule = GaussRule::new(STAGES);
        let mut a = [[0.0; STAGES]; STAGES];
        for i in 0..STAGES {
            for j in 0..STAGES {
                a[i][j] = rule.integrate(0.0, c[i], |tau| lagrange(j, tau));
            }
        }
        Self {
            a,
            b,
            c,
            tol,
            max_depth: 40,
        }
    }

    /// One implicit step; `None` if the stage fixed-point iteration stalls.
    pub fn step<const D: usize>(
        &self,
        f: &impl Fn(f64, &[f64; D]) -> [f64; D],
        t: f64,
        y: &[f64; D],
        h: f64,
    ) -> Option<[f64; D]> {
        let mut k = [[0.0; D]; STAGES];
        let k0 = f(t, y);
        for ki in k.iter_mut() {
            *ki = k0;
        }
        let mut converged = false;
        for _ in 0..80 {
            let mut change = 0.0f64;
            let mut next = [[0.0; D]; STAGES];
            for i in 0..STAGES {
                let mut stage = *y;
                for (j, kj) in k.iter().enumerate() {
                    for d in 0..D {
                        stage[d] += h * self.a[i][j] * kj[d];
                    }
                }
                next[i] = f(t + self.c[i] * h, &stage);
                for d in 0..D {
                    let scale = 1.0 + next[i][d].abs();
                    change = change.max((next[i][d] - k[i][d]).abs() / scale);
                }
            }
            k = next;
            if change <= 4.0 * f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return None;
        }
        let mut out = *y;
        for (i, ki) in k.iter().enumerate() {
            for d in 0..D {
                out[d] += h * self.b[i] * ki[d];
            }
        }
        Some(out)
    }

    /// Advance from `(t0, y0)` to `t1`, subdividing until the step-doubling
    /// estimate meets the tolerance.
    pub fn advance<const D: usize>(
        &self,
        f: &impl Fn(f64, &[f64; D]) -> [f64; D],
        t0: f64,
        y0: &[f64; D],
        t1: f64,
    ) -> Result<[f64; D]> {
        self.advance_rec(f, t0, y0, t1, 0)
    }

    fn advance_rec<const D: usize>(
        &self,
        f: &impl Fn(f64, &[f64; D]) -> [f64; D],
        t0: f64,
        y0: &[f64; D],
        t1: f64,
        depth: u32,
    ) -> Result<[f64; D]> {
        let h = t1 - t0;
        let tm = t0 + 0.5 * h;
        let full = self.step(f, t0, y0, h);
        let half = self
            .step(f, t0, y0, 0.5 * h)
            .and_then(|ym| self.step(f, tm, &ym, 0.5 * h));
        if let (Some(full), Some(half)) = (full, half) {
            let mut err = 0.0f64;
            for d in 0..D {
                let e = (full[d] - half[d]).abs() / (2f64.powi(ORDER) - 1.0);
                err = err.max(e / (1.0 + half[d].abs()));
            }
            if err <= self.tol {
                return Ok(half);
            }
            if depth >= self.max_depth {
                return Err(Error::Convergence {
                    what: "gauss integrator step".into(),
                    iterations: depth as usize,
                    achieved: err,
                });
            }
        } else if depth >= self.max_depth {
            return Err(Error::Convergence {
                what: "gauss integrator stage solve".into(),
                iterations: depth as usize,
                achieved: f64::NAN,
            });
        }
        let ym = self.advance_rec(f, t0, y0, tm, depth + 1)?;
        self.advance_rec(f, tm, &ym, t1, depth + 1)
    }

    /// Solution sampled at every point of `grid` (which starts at the
    /// initial time).
    pub fn solve_on_grid<const D: usize>(
        &self,
        f: &impl Fn(f64, &[f64; D]) -> [f64; D],
        y0: [f64; D],
        grid: &[f64],
    ) -> Result<Vec<[f64; D]>> {
        let mut out = Vec::with_capacity(grid.len());
        let mut y = y0;
        out.push(y);
        for w in grid.windows(2) {
            y = self.advance(f, w[0], &y, w[1])?;
            out.push(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_over_many_periods() {
        let int = GaussIntegrator::default();
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let t_end = 20.0 * std::f64::consts::PI;
        let y = int.advance(&f, 0.0, &[0.0, 1.0], t_end).unwrap();
        assert!(y[0].abs() < 1e-10, "{y:?}");
        assert!((y[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn nonlinear_logistic() {
        let int = GaussIntegrator::default();
        let f = |_t: f64, y: &[f64; 1]| [y[0] * (1.0 - y[0])];
        let y = int.advance(&f, 0.0, &[0.1], 3.0).unwrap();
        let exact = 1.0 / (1.0 + 9.0 * (-3.0f64).exp());
        assert!((y[0] - exact).abs() < 1e-11, "{} vs {exact}", y[0]);
    }

    #[test]
    fn preserves_wronskian_of_mathieu_system() {
        let int = GaussIntegrator::default();
        let q = |t: f64| 1.3 + 0.7 * (2.0 * t).cos();
        let f = |t: f64, y: &[f64; 4]| [y[1], -q(t) * y[0], y[3], -q(t) * y[2]];
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let sol = int.solve_on_grid(&f, [1.0, 0.0, 0.0, 1.0], &grid).unwrap();
        for y in sol {
            let w = y[0] * y[3] - y[1] * y[2];
            assert!((w - 1.0).abs() < 1e-13);
        }
    }
}
