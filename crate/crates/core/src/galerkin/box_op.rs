//! The wave operator `□ = ∂_tt - ∂_xx` and its inverse on W.
//!
//! On a sine series `□` multiplies `cos(lt) sin(jx)` by `j² - l²`. For the
//! even–even products that appear in the reduced functionals, `□⁻¹` is
//! applied exactly: on the `cos(Lt)` component it solves
//! `-y'' - L²y = cos(qx)`, `y(0) = y(π) = 0`, in closed form, so
//! `∫_Ω F □⁻¹G` is a finite sum of elementary integrals.

use std::f64::consts::PI;

use super::series::{cos_to_sine, CosCos, FourierSeries2D};
use crate::{Error, Result};

/// Relative size of a V component that `box_inverse` still treats as zero.
pub const DIAGONAL_TOL: f64 = 1e-14;

pub fn apply_box(u: &FourierSeries2D) -> FourierSeries2D {
    let mut out = u.clone();
    for l in 0..=u.l_max {
        for j in 1..=u.j_max {
            out.set(l, j, ((j * j) as f64 - (l * l) as f64) * u.get(l, j));
        }
    }
    out
}

/// `□⁻¹u` for `u ∈ W`; a V component above `DIAGONAL_TOL·max(1, ‖u‖∞)` is a domain error.
pub fn box_inverse(u: &FourierSeries2D) -> Result<FourierSeries2D> {
    let scale = u.max_abs().max(1.0);
    let mut out = FourierSeries2D::zeros(u.l_max, u.j_max);
    for l in 0..=u.l_max {
        for j in 1..=u.j_max {
            let c = u.get(l, j);
            if l == j {
                if c.abs() > DIAGONAL_TOL * scale {
                    return Err(Error::domain(format!(
                        "box_inverse: component {c:.3e} on the kernel mode ({l}, {j})"
                    )));
                }
            } else {
                out.set(l, j, c / ((j * j) as f64 - (l * l) as f64));
            }
        }
    }
    Ok(out)
}

fn parity(c: i64) -> f64 {
    if c.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

// ∫_0^π cos(ax) cos(bx)
fn cc(a: i64, b: i64) -> f64 {
    match (a == b, a == 0) {
        (true, true) => PI,
        (true, false) => 0.5 * PI,
        _ => 0.0,
    }
}

// ∫_0^π x sin(cx)
fn xs(c: i64) -> f64 {
    if c == 0 {
        0.0
    } else {
        -PI * parity(c) / c as f64
    }
}

// ∫_0^π x cos(ax)
fn xc(a: i64) -> f64 {
    if a == 0 {
        0.5 * PI * PI
    } else {
        (parity(a) - 1.0) / (a * a) as f64
    }
}

// ∫_0^π x² cos(ax)
fn x2c(a: i64) -> f64 {
    if a == 0 {
        PI.powi(3) / 3.0
    } else {
        2.0 * PI * parity(a) / (a * a) as f64
    }
}

/// `∫_0^π cos(ax) y(x) dx` where `-y'' - L²y = cos(qx)`, `y(0) = 0`, and
/// `y(π) = 0` for `L = 0`; for `L > 0` the particular solution without a
/// `sin(Lx)` component.
pub fn kernel_entry(big_l: usize, a: usize, q: usize) -> f64 {
    let (l, a, q) = (big_l as i64, a as i64, q as i64);
    if l == 0 {
        if q == 0 {
            // y = x(π - x)/2
            0.5 * (PI * xc(a) - x2c(a))
        } else {
            let q2 = (q * q) as f64;
            (cc(a, q) - cc(a, 0)) / q2 + (1.0 - parity(q)) / (PI * q2) * xc(a)
        }
    } else if q == l {
        // y = -x sin(Lx)/(2L)
        -(xs(l + a) + xs(l - a)) / (4.0 * l as f64)
    } else {
        (cc(a, q) - cc(a, l)) / ((q * q - l * l) as f64)
    }
}

/// `∫_Ω F □⁻¹G` for `F = H_n F̃`, `G = H_n G̃` given by the base coefficients.
pub fn bilinear(f: &CosCos, g: &CosCos, n: usize) -> f64 {
    let kg = kernel_apply(g, n, f.p_max);
    pair_with(f, &kg)
}

/// `Σ πw_l F_{l,a} K_{l,a}` with `w_0 = 2`.
pub fn pair_with(f: &CosCos, kg: &CosCos) -> f64 {
    let mut s = 0.0;
    for l in 0..=f.l_max.min(kg.l_max) {
        let wl = if l == 0 { 2.0 * PI } else { PI };
        for a in 0..=f.p_max.min(kg.p_max) {
            s += wl * f.get(l, a) * kg.get(l, a);
        }
    }
    s
}

/// `K_{l,a} = Σ_q k_{nl}(na, nq) G_{l,q}` for `a ≤ p_out`.
pub fn kernel_apply(g: &CosCos, n: usize, p_out: usize) -> CosCos {
    let mut out = CosCos::zeros(g.l_max, p_out);
    for l in 0..=g.l_max {
        for a in 0..=p_out {
            let s: f64 = (0..=g.p_max)
                .map(|q| {
                    let c = g.get(l, q);
                    if c == 0.0 {
                        0.0
                    } else {
                        c * kernel_entry(n * l, n * a, n * q)
                    }
                })
                .sum();
            out.set(l, a, s);
        }
    }
    out
}

/// Grid weight turning `K` into a field `H` with `∫_Ω F·H = Σ πw_l F_{l,a} K_{l,a}`.
pub fn dual_weight(a: usize) -> f64 {
    if a == 0 {
        1.0 / PI
    } else {
        2.0 / PI
    }
}

/// The same pairing through the sine series of `F` and `G`, truncated at
/// `j ≤ j_max`; converges like `j_max⁻³`.
pub fn bilinear_sine_route(f: &CosCos, g: &CosCos, n: usize, j_max: usize) -> f64 {
    let mut s = 0.0;
    for l in 0..=f.l_max.min(g.l_max) {
        let big_l = n * l;
        let wl = if l == 0 { 2.0 * PI } else { PI };
        for j in 1..=j_max {
            if j == big_l {
                continue;
            }
            let sf: f64 = (0..=f.p_max).map(|p| f.get(l, p) * cos_to_sine(j, n * p)).sum();
            let sg: f64 = (0..=g.p_max).map(|p| g.get(l, p) * cos_to_sine(j, n * p)).sum();
            s += wl * 0.5 * PI * sf * sg / ((j * j) as f64 - (big_l * big_l) as f64);
        }
    }
    s
}
