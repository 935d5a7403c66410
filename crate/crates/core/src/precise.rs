//! Extended-precision Taylor integration of the Hill system at
//! `g = V sn(Ωt, m)`.
//!
//! Near `m = 1` on the `s* = +1` branch the odd solution `v̄` grows by a
//! factor of order `|ρ|` within a period and the `A₀` formulas cancel terms
//! of size `ρ²`, so double precision runs out. The system for
//! `(sn, cn, dn, ū, ū', v̄, v̄', ∫gū, ∫gv̄)` is polynomial; its Taylor
//! coefficients follow from Cauchy products, so the integration needs only
//! field operations. It runs in double-double arithmetic when `|ρ|` is
//! moderate and in multi-word binary floating point otherwise.

use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use twofloat::TwoFloat;

use crate::bifurcation::{ReducedEquation, WaveProfile};
use crate::error::{Error, Result};

/// Field operations plus `sqrt`, enough for the AGM and the Taylor
/// recurrences.
pub trait Real:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Unit round-off.
    fn epsilon() -> f64;
    fn lit(x: f64) -> Self;
    fn pi() -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
}

/// Double-double number. `twofloat` division rounds to about `1e-17`, so
/// division is redone with two correction steps.
#[derive(Debug, Clone, Copy)]
pub struct Dd(pub TwoFloat);

macro_rules! dd_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Dd {
            type Output = Dd;
            fn $f(self, rhs: Dd) -> Dd {
                Dd(self.0.$f(rhs.0))
            }
        }
    };
}
dd_binop!(Add, add);
dd_binop!(Sub, sub);
dd_binop!(Mul, mul);

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let (a, b) = (self.0, rhs.0);
        let q1 = a.hi() / b.hi();
        let r = a - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        Dd(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Real for Dd {
    fn epsilon() -> f64 {
        2f64.powi(-104)
    }
    fn lit(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }
    fn pi() -> Self {
        Dd(twofloat::consts::PI)
    }
    fn to_f64(&self) -> f64 {
        self.0.hi() + self.0.lo()
    }
    fn sqrt(&self) -> Self {
        // one Newton step on the library square root
        let y = Dd(self.0.sqrt());
        (y + *self / y) * Dd::lit(0.5)
    }
}

/// Binary floating point with `BITS` bits, round half to even.
#[derive(Debug, Clone)]
pub struct Mp<const BITS: usize>(FBig<HalfEven>);

macro_rules! mp_binop {
    ($tr:ident, $f:ident) => {
        impl<const BITS: usize> $tr for Mp<BITS> {
            type Output = Mp<BITS>;
            fn $f(self, rhs: Mp<BITS>) -> Mp<BITS> {
                Mp(self.0.$f(rhs.0))
            }
        }
    };
}
mp_binop!(Add, add);
mp_binop!(Sub, sub);
mp_binop!(Mul, mul);
mp_binop!(Div, div);

impl<const BITS: usize> Neg for Mp<BITS> {
    type Output = Mp<BITS>;
    fn neg(self) -> Mp<BITS> {
        Mp(-self.0)
    }
}

impl<const BITS: usize> Real for Mp<BITS> {
    fn epsilon() -> f64 {
        2f64.powi(-(BITS as i32))
    }
    fn lit(x: f64) -> Self {
        let v = FBig::<HalfEven>::try_from(x).expect("finite literal");
        Mp(v.with_precision(BITS).value())
    }
    fn pi() -> Self {
        Mp(FBig::pi(BITS))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt())
    }
}

/// `Ω = 2K(m)/π` and `⟨sn²⟩` from one AGM sweep in `T`.
pub fn omega_and_mean_sn2<T: Real>(m: f64) -> (T, T) {
    let one = T::lit(1.0);
    let mt = T::lit(m);
    let mut an = one.clone();
    let mut bn = (one.clone() - mt.clone()).sqrt();
    let onep = one.clone() + bn.clone();
    let mut cn = mt.clone() / (onep.clone() * T::lit(2.0));
    let mut r = mt / (onep.clone() * onep * T::lit(4.0));
    let mut ratio = T::lit(0.5);
    let mut pow2 = T::lit(1.0);
    let stop = T::epsilon() * 0.25;
    for _ in 0..200 {
        let a_next = (an.clone() + bn.clone()) * T::lit(0.5);
        let b_next = (an * bn).sqrt();
        ratio = ratio + r.clone() * pow2.clone();
        if cn.to_f64().abs() <= stop * a_next.to_f64() {
            an = a_next;
            break;
        }
        let sum = a_next.clone() + b_next.clone();
        let c2 = cn.clone() * cn;
        let c_next = c2.clone() / (sum.clone() * T::lit(2.0));
        r = r * c2 / (sum.clone() * sum * T::lit(4.0));
        an = a_next;
        bn = b_next;
        cn = c_next;
        pow2 = pow2 * T::lit(2.0);
    }
    (one / an, ratio)
}

const STATES: usize = 9;
const S: usize = 0;
const C: usize = 1;
const D: usize = 2;
const U: usize = 3;
const UP: usize = 4;
const V: usize = 5;
const VP: usize = 6;
const IU: usize = 7;
const IV: usize = 8;

struct Taylor<T> {
    order: usize,
    omega: T,
    w2: T,
    m: T,
    six_m: T,
    one_plus_m: T,
    v: T,
    inv: Vec<T>,
    tol: f64,
}

impl<T: Real> Taylor<T> {
    fn new(omega: T, m: f64, v: T) -> Self {
        // truncation target a little above round-off; work per unit time
        // scales like K² tol^(-1/K), smallest near K = ln(1/tol)/2
        let tol = 16.0 * T::epsilon();
        let order = (0.5 * (-tol.ln())).ceil() as usize;
        let mt = T::lit(m);
        Taylor {
            order,
            w2: omega.clone() * omega.clone(),
            omega,
            six_m: mt.clone() * T::lit(6.0),
            one_plus_m: T::lit(1.0) + mt.clone(),
            m: mt,
            v,
            inv: (1..=order).map(|k| T::lit(1.0) / T::lit(k as f64)).collect(),
            tol,
        }
    }

    fn expand(&self, x: &[T]) -> Vec<Vec<T>> {
        let n = self.order;
        let zero = T::lit(0.0);
        let mut coef: Vec<Vec<T>> = x
            .iter()
            .map(|xi| {
                let mut row = vec![zero.clone(); n + 1];
                row[0] = xi.clone();
                row
            })
            .collect();
        let mut ss = vec![zero.clone(); n + 1];
        let cauchy = |a: &[T], b: &[T], k: usize| {
            let mut acc = a[0].clone() * b[k].clone();
            for i in 1..=k {
                acc = acc + a[i].clone() * b[k - i].clone();
            }
            acc
        };
        for k in 0..n {
            let inv = self.inv[k].clone();
            ss[k] = cauchy(&coef[S], &coef[S], k);
            let cd = cauchy(&coef[C], &coef[D], k);
            let sd = cauchy(&coef[S], &coef[D], k);
            let sc = cauchy(&coef[S], &coef[C], k);
            let ssu = cauchy(&ss, &coef[U], k);
            let ssv = cauchy(&ss, &coef[V], k);
            let su = cauchy(&coef[S], &coef[U], k);
            let sv = cauchy(&coef[S], &coef[V], k);
            coef[S][k + 1] = self.omega.clone() * cd * inv.clone();
            coef[C][k + 1] = -(self.omega.clone() * sd) * inv.clone();
            coef[D][k + 1] = -(self.omega.clone() * sc * self.m.clone()) * inv.clone();
            coef[U][k + 1] = coef[UP][k].clone() * inv.clone();
            coef[UP][k + 1] = -(self.w2.clone()
                * (self.one_plus_m.clone() * coef[U][k].clone() - ssu * self.six_m.clone()))
                * inv.clone();
            coef[V][k + 1] = coef[VP][k].clone() * inv.clone();
            coef[VP][k + 1] = -(self.w2.clone()
                * (self.one_plus_m.clone() * coef[V][k].clone() - ssv * self.six_m.clone()))
                * inv.clone();
            coef[IU][k + 1] = self.v.clone() * su * inv.clone();
            coef[IV][k + 1] = self.v.clone() * sv * inv;
        }
        coef
    }

    /// Largest step whose last two Taylor terms stay below the tolerance.
    fn step_bound(&self, coef: &[Vec<T>]) -> f64 {
        let n = self.order;
        let mut h = f64::INFINITY;
        for row in coef {
            let scale = row[0].to_f64().abs().max(1.0) * self.tol;
            for k in [n - 1, n] {
                let a = row[k].to_f64().abs();
                if a > 0.0 {
                    h = h.min((scale / a).powf(1.0 / k as f64));
                }
            }
        }
        h
    }

    fn eval(&self, coef: &[Vec<T>], h: &T) -> Vec<T> {
        coef.iter()
            .map(|row| {
                let mut acc = row[self.order].clone();
                for k in (0..self.order).rev() {
                    acc = acc * h.clone() + row[k].clone();
                }
                acc
            })
            .collect()
    }
}

/// Arithmetic used by [`precise_hill`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    DoubleDouble,
    Mp192,
    Mp256,
    Mp384,
}

impl Precision {
    /// Approximate decimal digits carried.
    pub fn digits(self) -> f64 {
        let bits = match self {
            Precision::DoubleDouble => 104.0,
            Precision::Mp192 => 192.0,
            Precision::Mp256 => 256.0,
            Precision::Mp384 => 384.0,
        };
        bits * std::f64::consts::LOG10_2
    }
}

/// Results of the extended-precision integration, rounded to `f64` after
/// every cancellation has been carried out in the working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PreciseHill {
    pub precision: Precision,
    pub points_per_period: usize,
    pub omega: f64,
    /// Amplitude used in `g`; recomputed from `m` on the `s*` branches.
    pub v: f64,
    pub mean_sn2: f64,
    /// Least-squares `ρ` from the integrated `v̄`.
    pub rho: f64,
    /// `m/(m-1) · 2π · (1 + (1+m)(1-⟨sn²⟩)/(1-m))`.
    pub rho_closed_form: f64,
    /// Sup-norm of `v̄(t+2π) - v̄(t) - ρū(t)` relative to `max(1, |ρ|)`.
    pub rho_defect: f64,
    /// Sup-norm of `ūv̄' - ū'v̄ - 1` over two periods.
    pub wronskian_drift: f64,
    /// Sup-norm gap between the integrated `ū` and `cn·dn`.
    pub u_bar_gap: f64,
    /// `⟨gL(g)⟩` on the sample grid.
    pub glg: f64,
    /// `∫₀^{2π} g v̄`.
    pub int_g_vbar: f64,
    /// `1 + (2c₂/κ)⟨gL(g)⟩`.
    pub a0_green: Option<f64>,
    /// `-s*ρ/(4πλ) + (∫gv̄)²/(2πρ)` on the `s*` branches.
    pub glg_intermediate: Option<f64>,
    /// `1 + (2/λ)[-ρ/(4π) + πm(1 + m - 2m⟨sn²⟩)²/(ρ(1-m)⁴)]` with the
    /// integrated `ρ`, on the `s*` branches.
    pub a0_intermediate: Option<f64>,
    /// Taylor steps taken over two periods.
    pub steps: usize,
}

/// Picks the working precision: the `A₀` formulas lose about `2 log₁₀|ρ|`
/// digits, and a potential of size `|m|` costs another `log₁₀|m|`.
pub fn precision_for(rho_estimate: f64, m: f64) -> Precision {
    let needed = 2.0 * rho_estimate.abs().max(1.0).log10() + m.abs().max(1.0).log10() + 16.0;
    [Precision::DoubleDouble, Precision::Mp192, Precision::Mp256]
        .into_iter()
        .find(|p| p.digits() >= needed)
        .unwrap_or(Precision::Mp384)
}

/// Integrates over `[0, 4π]` with `points_per_period` uniform samples per
/// period, in the precision suited to the profile.
pub fn precise_hill(profile: &WaveProfile, points_per_period: usize) -> Result<PreciseHill> {
    let m = profile.m;
    if !(m < 1.0) || !m.is_finite() {
        return Err(Error::domain(format!("modulus {m} outside m < 1")));
    }
    let estimate = crate::linearization::rho_closed_form(m);
    precise_hill_with(profile, points_per_period, precision_for(estimate, m))
}

pub fn precise_hill_with(
    profile: &WaveProfile,
    points_per_period: usize,
    precision: Precision,
) -> Result<PreciseHill> {
    match precision {
        Precision::DoubleDouble => run::<Dd>(profile, points_per_period, precision),
        Precision::Mp192 => run::<Mp<192>>(profile, points_per_period, precision),
        Precision::Mp256 => run::<Mp<256>>(profile, points_per_period, precision),
        Precision::Mp384 => run::<Mp<384>>(profile, points_per_period, precision),
    }
}

fn run<T: Real>(profile: &WaveProfile, n: usize, precision: Precision) -> Result<PreciseHill> {
    let m = profile.m;
    let (omega, phi) = omega_and_mean_sn2::<T>(m);
    let one = T::lit(1.0);
    let mt = T::lit(m);
    // on the s* branches V and λ are recomputed from m̄ so that the
    // intermediate route cancels consistently
    let sstar = match (profile.kind, profile.s_star) {
        (crate::bifurcation::ProfileKind::CubicSstar, Some(s)) => Some(T::lit(f64::from(s))),
        _ => None,
    };
    let vt = match &sstar {
        Some(s) => (omega.clone() * omega.clone() * (one.clone() + mt.clone()) / (s.clone() * phi.clone())).sqrt(),
        None => T::lit(profile.v),
    };
    let taylor = Taylor::new(omega.clone(), m, vt.clone());
    let pi = T::pi();
    let two_pi = pi.clone() * T::lit(2.0);
    let zero = T::lit(0.0);
    let mut x = vec![zero.clone(); STATES];
    for i in [C, D, U, VP] {
        x[i] = one.clone();
    }
    let mut samples = Vec::with_capacity(2 * n + 1);
    samples.push(x.clone());
    let mut t = zero.clone();
    let mut steps = 0usize;
    let mut next = 1usize;
    let grid_point = |i: usize| two_pi.clone() * T::lit(i as f64) / T::lit(n as f64);
    while next <= 2 * n {
        let coef = taylor.expand(&x);
        let bound = taylor.step_bound(&coef);
        // grid points inside the step come from the same polynomial
        while next <= 2 * n {
            let tau = grid_point(next) - t.clone();
            if tau.to_f64() > bound {
                break;
            }
            samples.push(taylor.eval(&coef, &tau));
            next += 1;
        }
        let h = T::lit(bound);
        x = taylor.eval(&coef, &h);
        t = t + h;
        steps += 1;
        if steps > 1_000_000 || !bound.is_finite() || bound <= 0.0 {
            return Err(Error::Convergence {
                what: "extended-precision Taylor integration".into(),
                iterations: steps,
                achieved: bound,
            });
        }
    }

    let mut num = zero.clone();
    let mut den = zero.clone();
    for i in 0..n {
        num = num + (samples[i + n][V].clone() - samples[i][V].clone()) * samples[i][U].clone();
        den = den + samples[i][U].clone() * samples[i][U].clone();
    }
    let rho = num / den;
    let rho_f = rho.to_f64();
    if rho_f == 0.0 || !rho_f.is_finite() {
        return Err(Error::Singular {
            what: "Green operator (rho = 0)".into(),
            sigma_min: 0.0,
        });
    }
    let rho_scale = rho_f.abs().max(1.0);
    let mut rho_defect = 0.0f64;
    let mut wronskian_drift = 0.0f64;
    let mut u_bar_gap = 0.0f64;
    for (i, y) in samples.iter().enumerate() {
        if i < n {
            let d = samples[i + n][V].clone() - y[V].clone() - rho.clone() * y[U].clone();
            rho_defect = rho_defect.max(d.to_f64().abs() / rho_scale);
        }
        let w = y[U].clone() * y[VP].clone() - y[UP].clone() * y[V].clone() - one.clone();
        wronskian_drift = wronskian_drift.max(w.to_f64().abs());
        u_bar_gap = u_bar_gap.max((y[U].clone() - y[C].clone() * y[D].clone()).to_f64().abs());
    }

    let int_g_vbar = samples[n][IV].clone();
    let c = int_g_vbar.clone() / rho.clone();
    let mut glg = zero.clone();
    for y in &samples[..n] {
        let lg = (y[IU].clone() + c.clone()) * y[V].clone() - y[IV].clone() * y[U].clone();
        glg = glg + vt.clone() * y[S].clone() * lg;
    }
    glg = glg / T::lit(n as f64);

    let one_m = one.clone() - mt.clone();
    let rho_closed = mt.clone() / (mt.clone() - one.clone())
        * two_pi.clone()
        * (one.clone() + (one.clone() + mt.clone()) * (one.clone() - phi.clone()) / one_m.clone());

    let a0_green = match profile.equation() {
        ReducedEquation::Cubic { kappa, c2, .. } => {
            Some((one.clone() + glg.clone() * T::lit(2.0 * c2 / kappa)).to_f64())
        }
        ReducedEquation::QuarticA => None,
    };
    let (glg_intermediate, a0_intermediate) = match sstar {
        Some(s) => {
            let lam = mt.clone() * phi.clone() * T::lit(2.0) / (one.clone() + mt.clone());
            let gi = -(rho.clone() * s) / (pi.clone() * T::lit(4.0) * lam.clone())
                + int_g_vbar.clone() * int_g_vbar.clone() / (two_pi.clone() * rho.clone());
            let tt = one.clone() + mt.clone() - mt.clone() * phi.clone() * T::lit(2.0);
            let om2 = one_m.clone() * one_m.clone();
            let bracket = -rho.clone() / (pi.clone() * T::lit(4.0))
                + pi.clone() * mt.clone() * tt.clone() * tt / (rho.clone() * om2.clone() * om2);
            let a0 = one.clone() + bracket * T::lit(2.0) / lam;
            (Some(gi.to_f64()), Some(a0.to_f64()))
        }
        _ => (None, None),
    };

    Ok(PreciseHill {
        precision,
        points_per_period: n,
        omega: omega.to_f64(),
        v: vt.to_f64(),
        mean_sn2: phi.to_f64(),
        rho: rho_f,
        rho_closed_form: rho_closed.to_f64(),
        rho_defect,
        wronskian_drift,
        u_bar_gap,
        glg: glg.to_f64(),
        int_g_vbar: int_g_vbar.to_f64(),
        a0_green,
        glg_intermediate,
        a0_intermediate,
        steps,
    })
}
