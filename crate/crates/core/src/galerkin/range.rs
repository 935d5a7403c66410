//! The range equation on W for `δ ≥ 0`, its small divisors, and a Monte
//! Carlo sweep of their distribution in `δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{CosineProfile, FourierSeries2D, Grid2};
use crate::bifurcation::{frequency_map, NonlinearityCase};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum RangeProblem {
    /// `L_ω w = Π_W[a₄u⁴ + δa₅(x)u⁵]`, `u = v + δ³w`, `ω = √(1 - 2δ⁶)`.
    Quartic { a4: f64, a5: CosineProfile },
    /// `L_ω w = Π_W[a₂u² + δa₃(x)u³ + δ²a₄u⁴]`, `u = v + δw`, `ω = √(1 - 2s*δ²)`.
    QuadraticCubic {
        a2: f64,
        a3: CosineProfile,
        a4: f64,
        s_star: i8,
    },
}

impl RangeProblem {
    pub fn omega(&self, delta: f64) -> Result<f64> {
        match self {
            RangeProblem::Quartic { .. } => frequency_map(delta, NonlinearityCase::Quartic, 1),
            RangeProblem::QuadraticCubic { s_star, .. } => {
                frequency_map(delta, NonlinearityCase::QuadraticCubic, *s_star)
            }
        }
    }

    fn w_scale(&self, delta: f64) -> f64 {
        match self {
            RangeProblem::Quartic { .. } => delta.powi(3),
            RangeProblem::QuadraticCubic { .. } => delta,
        }
    }

    fn degree(&self, d: usize) -> usize {
        match self {
            RangeProblem::Quartic { a5, .. } => 5 * d + a5.max_mode(),
            RangeProblem::QuadraticCubic { a3, .. } => 4 * d + a3.max_mode(),
        }
    }

    /// Nonlinearity and its `u`-derivative at one point.
    fn eval(&self, delta: f64, ax: f64, u: f64) -> (f64, f64) {
        match self {
            RangeProblem::Quartic { a4, .. } => {
                let u3 = u * u * u;
                (a4 * u3 * u + delta * ax * u3 * u * u, 4.0 * a4 * u3 + 5.0 * delta * ax * u3 * u)
            }
            RangeProblem::QuadraticCubic { a2, a4, .. } => {
                let u2 = u * u;
                (
                    a2 * u2 + delta * ax * u2 * u + delta * delta * a4 * u2 * u2,
                    2.0 * a2 * u + 3.0 * delta * ax * u2 + 4.0 * delta * delta * a4 * u2 * u,
                )
            }
        }
    }

    fn profile(&self) -> &CosineProfile {
        match self {
            RangeProblem::Quartic { a5, .. } => a5,
            RangeProblem::QuadraticCubic { a3, .. } => a3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeOptions {
    pub l_max: usize,
    pub j_max: usize,
    /// Newton stops when the coefficient residual is below `tol · max(1, ‖N(w)‖∞)`.
    pub tol: f64,
    pub max_newton: usize,
    /// A small divisor below this is a resonance error.
    pub divisor_threshold: f64,
}

impl Default for RangeOptions {
    fn default() -> Self {
        Self {
            l_max: 64,
            j_max: 64,
            tol: 1e-13,
            max_newton: 20,
            divisor_threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSolveReport {
    pub delta: f64,
    pub omega: f64,
    pub l_max: usize,
    pub j_max: usize,
    pub min_divisor: f64,
    pub min_divisor_mode: (usize, usize),
    pub newton_iterations: usize,
    /// Coefficient sup norm of the residual, starting with the first iterate.
    pub residual_history: Vec<f64>,
    pub gmres_iterations: Vec<usize>,
    pub residual_sup: f64,
    /// Sup over the collocation grid of the residual series.
    pub residual_grid_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSolution {
    pub w: FourierSeries2D,
    pub report: RangeSolveReport,
}

/// Step halvings tried before a range Newton step is declared failed.
const MAX_HALVINGS: usize = 10;

/// `min |ω²l² - j²|` over `0 ≤ l ≤ l_max`, `1 ≤ j ≤ j_max`, `l ≠ j`, with its mode.
pub fn min_small_divisor(omega: f64, l_max: usize, j_max: usize) -> (f64, usize, usize) {
    let w2 = omega * omega;
    let mut best = (f64::INFINITY, 0, 0);
    for l in 0..=l_max {
        for j in 1..=j_max {
            if l == j {
                continue;
            }
            let d = (w2 * (l * l) as f64 - (j * j) as f64).abs();
            if d < best.0 {
                best = (d, l, j);
            }
        }
    }
    best
}

struct Operator<'a> {
    problem: &'a RangeProblem,
    delta: f64,
    scale: f64,
    grid: Grid2,
    v: Vec<f64>,
    ax: Vec<f64>,
    divisors: FourierSeries2D,
    l_max: usize,
    j_max: usize,
}

impl Operator<'_> {
    fn u(&self, w: &FourierSeries2D) -> Vec<f64> {
        let wv = self.grid.synth(w);
        self.v.iter().zip(&wv).map(|(a, b)| a + self.scale * b).collect()
    }

    fn project(&self, values: &[f64]) -> FourierSeries2D {
        self.grid.sine_expansion(values, self.l_max, self.j_max).project_w()
    }

    /// `N(w)` and the pointwise derivative factor `scale·∂_u g(u)`.
    fn nonlinear(&self, w: &FourierSeries2D) -> (FourierSeries2D, Vec<f64>) {
        let u = self.u(w);
        let mut g = Vec::with_capacity(u.len());
        let mut dg = Vec::with_capacity(u.len());
        for (uu, a) in u.iter().zip(&self.ax) {
            let (f, d) = self.problem.eval(self.delta, *a, *uu);
            g.push(f);
            dg.push(self.scale * d);
        }
        (self.project(&g), dg)
    }

    fn apply_d(&self, w: &FourierSeries2D) -> FourierSeries2D {
        let mut out = w.clone();
        for (o, d) in out.c.iter_mut().zip(&self.divisors.c) {
            *o *= d;
        }
        out
    }

    fn solve_d(&self, r: &FourierSeries2D) -> FourierSeries2D {
        let mut out = r.clone();
        for (o, d) in out.c.iter_mut().zip(&self.divisors.c) {
            *o = if *d == 0.0 { 0.0 } else { *o / d };
        }
        out
    }

    /// `dw - D⁻¹Π_W(factor·dw)`.
    fn preconditioned(&self, factor: &[f64], dw: &FourierSeries2D) -> FourierSeries2D {
        let vals = self.grid.synth(dw);
        let prod: Vec<f64> = vals.iter().zip(factor).map(|(a, b)| a * b).collect();
        let corr = self.solve_d(&self.project(&prod));
        FourierSeries2D {
            c: dw.c.iter().zip(&corr.c).map(|(a, b)| a - b).collect(),
            ..dw.clone()
        }
    }
}

fn sup(c: &[f64]) -> f64 {
    c.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// GMRES without restart for `A x = b`; returns `x` and the iteration count.
fn gmres(apply: impl Fn(&[f64]) -> Vec<f64>, b: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, usize, f64) {
    let n = b.len();
    let beta = dot(b, b).sqrt();
    if beta == 0.0 {
        return (vec![0.0; n], 0, 0.0);
    }
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|x| x / beta).collect()];
    let mut h: Vec<Vec<f64>> = Vec::new();
    let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut g = vec![beta];
    let mut res = beta;
    let mut k = 0;
    while k < max_iter && res > tol * beta {
        let mut w = apply(&basis[k]);
        let mut col = vec![0.0; k + 2];
        for (i, q) in basis.iter().enumerate() {
            col[i] = dot(&w, q);
            for (wj, qj) in w.iter_mut().zip(q) {
                *wj -= col[i] * qj;
            }
        }
        col[k + 1] = dot(&w, &w).sqrt();
        for i in 0..k {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let r = col[k].hypot(col[k + 1]);
        let (c, s) = (col[k] / r, col[k + 1] / r);
        cs.push(c);
        sn.push(s);
        let hk1 = col[k + 1];
        col[k] = r;
        col[k + 1] = 0.0;
        g.push(-s * g[k]);
        g[k] *= c;
        res = g[k + 1].abs();
        h.push(col);
        if hk1 > 0.0 {
            basis.push(w.iter().map(|x| x / hk1).collect());
        }
        k += 1;
        if hk1 == 0.0 {
            break;
        }
    }
    // back substitution
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![0.0; n];
    for (yi, q) in y.iter().zip(&basis) {
        for (xj, qj) in x.iter_mut().zip(q) {
            *xj += yi * qj;
        }
    }
    (x, k, res / beta)
}

/// Solves the truncated range equation for `w ∈ W` given `v ∈ V`.
pub fn range_solve(problem: &RangeProblem, v: &FourierSeries2D, delta: f64, opts: RangeOptions) -> Result<RangeSolution> {
    if v.max_abs() > 0.0 && v.project_w().max_abs() > 1e-14 * v.max_abs() {
        return Err(Error::domain("range_solve: v must lie in V"));
    }
    let omega = problem.omega(delta)?;
    let (l_max, j_max) = (opts.l_max, opts.j_max);
    let (dmin, ml, mj) = min_small_divisor(omega, l_max, j_max);
    if dmin < opts.divisor_threshold {
        return Err(Error::Resonance { l: ml, j: mj, divisor: dmin });
    }
    let d_u = l_max.max(j_max).max(v.l_max).max(v.j_max);
    let grid = Grid2::for_degree(problem.degree(d_u));
    let prof = problem.profile();
    let ax = grid.x_field(|x| prof.eval(x));
    let mut divisors = FourierSeries2D::zeros(l_max, j_max);
    let w2 = omega * omega;
    for l in 0..=l_max {
        for j in 1..=j_max {
            if l != j {
                divisors.set(l, j, w2 * (l * l) as f64 - (j * j) as f64);
            }
        }
    }
    let op = Operator {
        problem,
        delta,
        scale: problem.w_scale(delta),
        v: grid.synth(v),
        grid,
        ax,
        divisors,
        l_max,
        j_max,
    };
    let zero = FourierSeries2D::zeros(l_max, j_max);
    let (n0, _) = op.nonlinear(&zero);
    let mut w = op.solve_d(&n0);
    let eval = |w: &FourierSeries2D| {
        let (nw, factor) = op.nonlinear(w);
        let dw = op.apply_d(w);
        let r: Vec<f64> = dw.c.iter().zip(&nw.c).map(|(a, b)| a - b).collect();
        let rs = sup(&r);
        (r, rs, nw.max_abs(), factor)
    };
    let (mut r, mut rs, mut nmax, mut factor) = eval(&w);
    let mut history = vec![rs];
    let mut gmres_its = Vec::new();
    let mut it = 0;
    while rs > opts.tol * nmax.max(1.0) && op.scale != 0.0 {
        if it == opts.max_newton {
            return Err(Error::Convergence {
                what: "range Newton".into(),
                iterations: it,
                achieved: rs,
            });
        }
        it += 1;
        let rhs = op.solve_d(&FourierSeries2D {
            c: r.iter().map(|x| -x).collect(),
            ..zero.clone()
        });
        let (step, its, _) = gmres(
            |x| {
                let s = FourierSeries2D {
                    c: x.to_vec(),
                    ..zero.clone()
                };
                op.preconditioned(&factor, &s).c
            },
            &rhs.c,
            1e-14,
            200,
        );
        gmres_its.push(its);
        // residual backtracking: halve the step until the residual drops
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = FourierSeries2D {
                c: w.c.iter().zip(&step).map(|(a, b)| a + t * b).collect(),
                ..zero.clone()
            };
            let (tr, ts, tn, tf) = eval(&trial);
            if ts < rs {
                (w, r, rs, nmax, factor) = (trial, tr, ts, tn, tf);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::Convergence {
                what: "range Newton line search".into(),
                iterations: it,
                achieved: rs,
            });
        }
        history.push(rs);
    }
    let (residual, residual_sup) = (r, rs);
    let res_series = FourierSeries2D { c: residual, ..zero };
    let residual_grid_sup = sup(&op.grid.synth(&res_series));
    Ok(RangeSolution {
        w,
        report: RangeSolveReport {
            delta,
            omega,
            l_max,
            j_max,
            min_divisor: dmin,
            min_divisor_mode: (ml, mj),
            newton_iterations: it,
            residual_history: history,
            gmres_iterations: gmres_its,
            residual_sup,
            residual_grid_sup,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub delta_max: f64,
    pub samples: usize,
    pub threshold: f64,
    pub seed: u64,
    /// Fraction of sampled `δ ∈ (0, δ_max)` whose smallest divisor is at least `threshold`.
    pub admissible_fraction: f64,
    pub smallest_divisor: f64,
}

/// Monte Carlo estimate of the admissible fraction of `δ ∈ (0, δ_max)`.
#[allow(clippy::too_many_arguments)]
pub fn delta_sweep(
    case: NonlinearityCase,
    s_star: i8,
    delta_max: f64,
    samples: usize,
    l_max: usize,
    j_max: usize,
    threshold: f64,
    seed: u64,
) -> Result<SweepReport> {
    if !(delta_max > 0.0) || samples == 0 {
        return Err(Error::domain("delta_max must be positive and samples non-zero"));
    }
    // the frequency must exist on the whole interval
    frequency_map(delta_max, case, s_star)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deltas: Vec<f64> = (0..samples).map(|_| rng.gen_range(0.0..delta_max)).collect();
    let divisors: Vec<f64> = deltas
        .par_iter()
        .map(|&d| {
            let omega = frequency_map(d, case, s_star).expect("checked above");
            min_small_divisor(omega, l_max, j_max).0
        })
        .collect();
    let good = divisors.iter().filter(|&&d| d >= threshold).count();
    Ok(SweepReport {
        delta_max,
        samples,
        threshold,
        seed,
        admissible_fraction: good as f64 / samples as f64,
        smallest_divisor: divisors.iter().copied().fold(f64::INFINITY, f64::min),
    })
}
