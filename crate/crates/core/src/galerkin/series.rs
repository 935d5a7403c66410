use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Odd 2π-periodic series `η(t) = Σ_{k=1}^N b_k sin(kt)`; `b[k-1]` is `b_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries1D {
    pub b: Vec<f64>,
}

impl FourierSeries1D {
    pub fn new(b: Vec<f64>) -> Self {
        Self { b }
    }

    pub fn zeros(n: usize) -> Self {
        Self { b: vec![0.0; n] }
    }

    pub fn modes(&self) -> usize {
        self.b.len()
    }

    /// Sine coefficients of `f` by the trapezoid rule on `max(16(n+1), 2048)` points.
    pub fn project(f: impl Fn(f64) -> f64, n: usize) -> Self {
        let m = (16 * (n + 1)).max(2048);
        let values: Vec<f64> = (0..m).map(|i| f(2.0 * PI * i as f64 / m as f64)).collect();
        Self::from_samples(&values, n)
    }

    /// Sine coefficients from samples on the uniform grid `2πi/M`.
    pub fn from_samples(values: &[f64], n: usize) -> Self {
        let m = values.len();
        let b = (1..=n)
            .map(|k| {
                2.0 / m as f64
                    * values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| v * (2.0 * PI * ((k * i) % m) as f64 / m as f64).sin())
                        .sum::<f64>()
            })
            .collect();
        Self { b }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.b.iter().enumerate().map(|(i, b)| b * ((i + 1) as f64 * t).sin()).sum()
    }

    pub fn eval_dot(&self, t: f64) -> f64 {
        self.b
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let k = (i + 1) as f64;
                b * k * (k * t).cos()
            })
            .sum()
    }

    pub fn samples(&self, m: usize) -> Vec<f64> {
        (0..m).map(|i| self.eval(2.0 * PI * i as f64 / m as f64)).collect()
    }

    /// `∫_T η²`.
    pub fn integral_sq(&self) -> f64 {
        PI * self.b.iter().map(|b| b * b).sum::<f64>()
    }

    /// `∫_T η̇²`.
    pub fn kinetic(&self) -> f64 {
        PI * self
            .b
            .iter()
            .enumerate()
            .map(|(i, b)| ((i + 1) * (i + 1)) as f64 * b * b)
            .sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            b: self.b.iter().map(|b| s * b).collect(),
        }
    }

    pub fn resized(&self, n: usize) -> Self {
        let mut b = self.b.clone();
        b.resize(n, 0.0);
        Self { b }
    }

    /// Largest `|η(t) - f(t)|` over `points` uniform points of one period.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / points as f64;
                (self.eval(t) - f(t)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let n = self.modes().max(other.modes());
        let (a, b) = (self.resized(n), other.resized(n));
        a.b.iter().zip(&b.b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

/// `u(t,x) = Σ c_{l,j} cos(lt) sin(jx)` for `0 ≤ l ≤ l_max`, `1 ≤ j ≤ j_max`.
///
/// The diagonal `l = j` is the space V, the rest is W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries2D {
    pub l_max: usize,
    pub j_max: usize,
    pub c: Vec<f64>,
}

impl FourierSeries2D {
    pub fn zeros(l_max: usize, j_max: usize) -> Self {
        Self {
            l_max,
            j_max,
            c: vec![0.0; (l_max + 1) * j_max],
        }
    }

    fn idx(&self, l: usize, j: usize) -> usize {
        debug_assert!(l <= self.l_max && (1..=self.j_max).contains(&j));
        l * self.j_max + j - 1
    }

    pub fn get(&self, l: usize, j: usize) -> f64 {
        if l > self.l_max || j == 0 || j > self.j_max {
            0.0
        } else {
            self.c[self.idx(l, j)]
        }
    }

    pub fn set(&mut self, l: usize, j: usize, v: f64) {
        let i = self.idx(l, j);
        self.c[i] = v;
    }

    /// `H_n v` for `v = η(t+x) - η(t-x)`: mode `k` of `η` lands on `(nk, nk)`.
    pub fn from_eta(eta: &FourierSeries1D, n: usize) -> Self {
        let size = n * eta.modes();
        let mut out = Self::zeros(size, size);
        for (i, b) in eta.b.iter().enumerate() {
            let k = n * (i + 1);
            out.set(k, k, 2.0 * b);
        }
        out
    }

    /// Inverse of [`from_eta`](Self::from_eta) on the V component.
    pub fn to_eta(&self, n: usize) -> FourierSeries1D {
        let k_max = self.l_max.min(self.j_max) / n;
        FourierSeries1D::new((1..=k_max).map(|k| 0.5 * self.get(n * k, n * k)).collect())
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let mut s = 0.0;
        for l in 0..=self.l_max {
            let ct = (l as f64 * t).cos();
            for j in 1..=self.j_max {
                s += self.c[self.idx(l, j)] * ct * (j as f64 * x).sin();
            }
        }
        s
    }

    pub fn project_v(&self) -> Self {
        let mut out = Self::zeros(self.l_max, self.j_max);
        for k in 1..=self.l_max.min(self.j_max) {
            out.set(k, k, self.get(k, k));
        }
        out
    }

    pub fn project_w(&self) -> Self {
        let mut out = self.clone();
        for k in 1..=self.l_max.min(self.j_max) {
            out.set(k, k, 0.0);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.l_max, self.j_max), (other.l_max, other.j_max));
        Self {
            l_max: self.l_max,
            j_max: self.j_max,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn resized(&self, l_max: usize, j_max: usize) -> Self {
        let mut out = Self::zeros(l_max, j_max);
        for l in 0..=l_max.min(self.l_max) {
            for j in 1..=j_max.min(self.j_max) {
                out.set(l, j, self.get(l, j));
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    pub fn max_diagonal(&self) -> f64 {
        (1..=self.l_max.min(self.j_max)).fold(0.0, |a, k| a.max(self.get(k, k).abs()))
    }

    /// `∫_Ω u·w` over `Ω = T × (0, π)`.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for l in 0..=self.l_max.min(other.l_max) {
            let wt = if l == 0 { 2.0 * PI } else { PI };
            for j in 1..=self.j_max.min(other.j_max) {
                s += wt * 0.5 * PI * self.get(l, j) * other.get(l, j);
            }
        }
        s
    }

    /// `‖u‖²_{H¹} = ∫_Ω u_t² + u_x²`.
    pub fn h1_norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for l in 0..=self.l_max {
            let wt = if l == 0 { 2.0 * PI } else { PI };
            for j in 1..=self.j_max {
                let c = self.get(l, j);
                // the t-derivative swaps cos for sin, whose square integrates to π
                s += 0.5 * PI * c * c * (if l == 0 { 0.0 } else { PI * (l * l) as f64 } + wt * (j * j) as f64);
            }
        }
        s
    }
}

/// Even–even series `F(t,x) = Σ c_{l,p} cos(lt) cos(px)`, `0 ≤ l ≤ l_max`, `0 ≤ p ≤ p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosCos {
    pub l_max: usize,
    pub p_max: usize,
    pub c: Vec<f64>,
}

impl CosCos {
    pub fn zeros(l_max: usize, p_max: usize) -> Self {
        Self {
            l_max,
            p_max,
            c: vec![0.0; (l_max + 1) * (p_max + 1)],
        }
    }

    pub fn get(&self, l: usize, p: usize) -> f64 {
        if l > self.l_max || p > self.p_max {
            0.0
        } else {
            self.c[l * (self.p_max + 1) + p]
        }
    }

    pub fn set(&mut self, l: usize, p: usize, v: f64) {
        self.c[l * (self.p_max + 1) + p] = v;
    }
}

/// Coefficient `(2/π)∫_0^π cos(px) sin(jx) dx` of `cos(px)` on `sin(jx)`.
pub fn cos_to_sine(j: usize, p: usize) -> f64 {
    if (j + p) % 2 == 0 {
        0.0
    } else {
        let (j, p) = (j as f64, p as f64);
        4.0 / PI * j / (j * j - p * p)
    }
}

/// Uniform `n × n` grid on `[0, 2π)²`, values stored `t`-major.
#[derive(Debug, Clone)]
pub struct Grid2 {
    pub n: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Grid2 {
    pub fn new(n: usize) -> Self {
        let ang = |i: usize| 2.0 * PI * i as f64 / n as f64;
        Self {
            n,
            cos: (0..n).map(|i| ang(i).cos()).collect(),
            sin: (0..n).map(|i| ang(i).sin()).collect(),
        }
    }

    /// Smallest even grid resolving every coefficient of a trigonometric polynomial of degree `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(2 * degree + 2)
    }

    fn c(&self, mode: usize, i: usize) -> f64 {
        self.cos[(mode * i) % self.n]
    }

    fn s(&self, mode: usize, i: usize) -> f64 {
        self.sin[(mode * i) % self.n]
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| 2.0 * PI * i as f64 / self.n as f64).collect()
    }

    pub fn mean(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }

    pub fn mean_product(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
    }

    /// `∫_Ω a·b` for functions even in `x`, or odd–odd products.
    pub fn integral(&self, a: &[f64], b: &[f64]) -> f64 {
        2.0 * PI * PI * self.mean_product(a, b)
    }

    pub fn synth(&self, u: &FourierSeries2D) -> Vec<f64> {
        let n = self.n;
        let mut rows = vec![0.0; (u.l_max + 1) * n];
        for l in 0..=u.l_max {
            for j in 1..=u.j_max {
                let c = u.get(l, j);
                if c != 0.0 {
                    for i in 0..n {
                        rows[l * n + i] += c * self.s(j, i);
                    }
                }
            }
        }
        self.combine_rows(&rows, u.l_max)
    }

    pub fn synth_coscos(&self, f: &CosCos, weight: impl Fn(usize) -> f64) -> Vec<f64> {
        let n = self.n;
        let mut rows = vec![0.0; (f.l_max + 1) * n];
        for l in 0..=f.l_max {
            for p in 0..=f.p_max {
                let c = f.get(l, p) * weight(p);
                if c != 0.0 {
                    for i in 0..n {
                        rows[l * n + i] += c * self.c(p, i);
                    }
                }
            }
        }
        self.combine_rows(&rows, f.l_max)
    }

    fn combine_rows(&self, rows: &[f64], l_max: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for it in 0..n {
            let dst = &mut out[it * n..(it + 1) * n];
            for l in 0..=l_max {
                let ct = self.c(l, it);
                let row = &rows[l * n..(l + 1) * n];
                for (d, r) in dst.iter_mut().zip(row) {
                    *d += ct * r;
                }
            }
        }
        out
    }

    /// `t`-cosine coefficients of every `x`-row, modes `0..=l_max`.
    fn t_cosine(&self, values: &[f64], l_max: usize) -> Vec<f64> {
        let n = self.n;
        assert!(2 * l_max < n, "t-mode {l_max} not resolved on {n} points");
        let mut rows = vec![0.0; (l_max + 1) * n];
        for it in 0..n {
            let src = &values[it * n..(it + 1) * n];
            for l in 0..=l_max {
                let w = self.c(l, it) * if l == 0 { 1.0 } else { 2.0 } / n as f64;
                let dst = &mut rows[l * n..(l + 1) * n];
                for (d, v) in dst.iter_mut().zip(src) {
                    *d += w * v;
                }
            }
        }
        rows
    }

    pub fn analyze_coscos(&self, values: &[f64], l_max: usize, p_max: usize) -> CosCos {
        let n = self.n;
        assert!(2 * p_max < n, "x-mode {p_max} not resolved on {n} points");
        let rows = self.t_cosine(values, l_max);
        let mut out = CosCos::zeros(l_max, p_max);
        for l in 0..=l_max {
            let row = &rows[l * n..(l + 1) * n];
            for p in 0..=p_max {
                let w = if p == 0 { 1.0 } else { 2.0 } / n as f64;
                out.set(l, p, w * row.iter().enumerate().map(|(i, r)| r * self.c(p, i)).sum::<f64>());
            }
        }
        out
    }

    /// Sine expansion on `(0, π)` of a grid function: the odd part in `x`
    /// directly, the even part through its cosine coefficients.
    pub fn sine_expansion(&self, values: &[f64], l_max: usize, j_max: usize) -> FourierSeries2D {
        let n = self.n;
        let mut even = vec![0.0; n * n];
        let mut odd = vec![0.0; n * n];
        for it in 0..n {
            for ix in 0..n {
                let a = values[it * n + ix];
                let b = values[it * n + (n - ix) % n];
                even[it * n + ix] = 0.5 * (a + b);
                odd[it * n + ix] = 0.5 * (a - b);
            }
        }
        let rows = self.t_cosine(&odd, l_max);
        let p_all = (n - 1) / 2;
        let cc = self.analyze_coscos(&even, l_max, p_all);
        let mut out = FourierSeries2D::zeros(l_max, j_max);
        for l in 0..=l_max {
            let row = &rows[l * n..(l + 1) * n];
            for j in 1..=j_max {
                let direct = 2.0 / n as f64 * row.iter().enumerate().map(|(i, r)| r * self.s(j, i)).sum::<f64>();
                let converted: f64 = (0..=p_all).map(|p| cc.get(l, p) * cos_to_sine(j, p)).sum();
                out.set(l, j, direct + converted);
            }
        }
        out
    }

    /// Values of `η(t+x) - η(t-x)`.
    pub fn v_of_eta(&self, eta: &FourierSeries1D) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for (i, b) in eta.b.iter().enumerate() {
            let k = i + 1;
            for it in 0..n {
                let ct = 2.0 * b * self.c(k, it);
                for ix in 0..n {
                    out[it * n + ix] += ct * self.s(k, ix);
                }
            }
        }
        out
    }

    /// Values of `φ_k = 2cos(kt) sin(kx)`.
    pub fn phi(&self, k: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for it in 0..n {
            let ct = 2.0 * self.c(k, it);
            for ix in 0..n {
                out[it * n + ix] = ct * self.s(k, ix);
            }
        }
        out
    }

    /// Values of an `x`-only function on the grid.
    pub fn x_field(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let xs: Vec<f64> = self.points().iter().map(|&x| f(x)).collect();
        let mut out = Vec::with_capacity(self.n * self.n);
        for _ in 0..self.n {
            out.extend_from_slice(&xs);
        }
        out
    }
}

/// `x`-profile `a(x) = a₀ + Σ_q c_q cos(qx)` on `(0, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineProfile {
    pub mean: f64,
    /// `modes[q-1]` multiplies `cos(qx)`.
    pub modes: Vec<f64>,
}

impl CosineProfile {
    pub fn constant(mean: f64) -> Self {
        Self { mean, modes: Vec::new() }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.mean
            + self
                .modes
                .iter()
                .enumerate()
                .map(|(i, c)| c * ((i + 1) as f64 * x).cos())
                .sum::<f64>()
    }

    pub fn max_mode(&self) -> usize {
        self.modes.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1)
    }

    /// Cosine modes divisible by `n`, relabelled: `∫ a(x) F(nx) = ∫ a_n(x) F(x)` over `(0, π)`.
    pub fn pullback(&self, n: usize) -> Self {
        let modes = (1..)
            .map(|p| p * n)
            .take_while(|&q| q <= self.modes.len())
            .map(|q| self.modes[q - 1])
            .collect();
        Self { mean: self.mean, modes }
    }

    /// Least-squares cosine projection of samples `(x, a)` on `(0, π)`
    /// (trapezoid rule on the sample abscissae), keeping `max_modes ≤ 32` modes.
    pub fn from_samples(samples: &[(f64, f64)], max_modes: usize) -> crate::Result<Self> {
        if max_modes > 32 {
            return Err(crate::Error::domain(format!("at most 32 modes, got {max_modes}")));
        }
        if samples.len() < 2 * max_modes + 2 {
            return Err(crate::Error::domain("too few samples for the requested modes"));
        }
        if samples.iter().any(|(x, a)| !(x.is_finite() && a.is_finite()) || *x < 0.0 || *x > PI)
            || samples.windows(2).any(|w| w[1].0 <= w[0].0)
        {
            return Err(crate::Error::domain("samples must be finite, increasing and inside [0, π]"));
        }
        let integral = |q: usize| -> f64 {
            samples
                .windows(2)
                .map(|w| {
                    let f0 = w[0].1 * (q as f64 * w[0].0).cos();
                    let f1 = w[1].1 * (q as f64 * w[1].0).cos();
                    0.5 * (w[1].0 - w[0].0) * (f0 + f1)
                })
                .sum()
        };
        Ok(Self {
            mean: integral(0) / PI,
            modes: (1..=max_modes).map(|q| 2.0 / PI * integral(q)).collect(),
        })
    }
}
