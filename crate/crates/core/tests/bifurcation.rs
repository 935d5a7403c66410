use std::f64::consts::PI;

use resowave::bifurcation::*;
use resowave::elliptic::{self, Modulus};
use resowave::Error;

// Reference values from a 30-digit evaluation of the same defining
// equations (mpmath ellipk/ellipe/findroot).
const QUARTIC_M: f64 = -0.255_444_227_367_865_435_344_7;
const QUARTIC_OMEGA: f64 = 0.943_951_290_379_630_195_806;
const QUARTIC_V: f64 = 0.867_387_469_723_554_051_879;

#[test]
fn quartic_profile_matches_high_precision_reference() {
    let p = solve_quartic_profile(1.0).unwrap();
    assert!((p.m - QUARTIC_M).abs() < 1e-12, "m = {}", p.m);
    assert!((p.omega - QUARTIC_OMEGA).abs() < 1e-12);
    assert!((p.v - QUARTIC_V).abs() < 1e-12);
    assert!(p.residual_sup < 1e-8, "residual {}", p.residual_sup);
    assert!(p.period_defect() < 1e-10);
}

#[test]
fn quartic_profile_is_independent_of_a4() {
    let a = solve_quartic_profile(1.0).unwrap();
    let b = solve_quartic_profile(2.0).unwrap();
    let c = solve_quartic_profile(-0.3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(solve_quartic_profile(0.0).is_err());
}

#[test]
fn quartic_root_reproduces_the_ratio_step() {
    // -(1+m)/(6m) = ⟨sn²⟩ at the root
    let m = quartic_modulus().unwrap();
    let phi = elliptic::mean_sn2(Modulus::new(m).unwrap());
    assert!((-(1.0 + m) / (6.0 * m) - phi).abs() < 1e-12);
}

#[test]
fn cubic_reference_moduli() {
    let cases: [(f64, i8, f64); 9] = [
        (0.5, -1, -181.784_245_555_937),
        (0.9, -1, -6.468_245_937_336_55),
        (1.0, -1, -4.750_919_597_425_77),
        (2.0, -1, -1.776_287_415_067_96),
        (5.0, -1, -1.219_849_715_604_41),
        (0.3, -1, -38_564.900_765_403),
        (0.1, 1, 0.109_352_563_818_676),
        (0.3, 1, 0.393_539_664_569_15),
        (0.5, 1, 0.748_188_597_158_308),
    ];
    for (lambda, s, m_ref) in cases {
        let m = cubic_modulus(lambda, s).unwrap();
        assert!(((m - m_ref) / m_ref).abs() < 1e-11, "λ={lambda} s*={s}: {m} vs {m_ref}");
    }
    let tiny = cubic_modulus(0.1, -1).unwrap();
    assert!((tiny / -1.471_157_917_731_34e16 - 1.0).abs() < 1e-9);
}

#[test]
fn cubic_profiles_satisfy_their_equations() {
    for (lambda, s) in [(0.3, -1), (0.3, 1), (1.0, -1), (0.9, 1), (5.0, -1)] {
        let p = solve_cubic_profile(lambda, s).unwrap();
        assert!(p.residual_sup < 1e-8, "λ={lambda} s*={s}: {}", p.residual_sup);
        assert!(p.period_defect() < 1e-10 * p.omega.max(1.0));
        if s == -1 {
            assert!(p.m < -1.0);
        } else {
            assert!(p.m > 0.0 && p.m < 1.0);
        }
        let lam = lambda_of_m(p.m).unwrap();
        assert!((lam - lambda).abs() < 1e-12 * lambda.max(1.0));
    }
}

#[test]
fn cubic_branch_domain() {
    assert!(matches!(solve_cubic_profile(1.5, 1), Err(Error::Domain(_))));
    assert!(matches!(solve_cubic_profile(1.0, 1), Err(Error::Domain(_))));
    assert!(matches!(solve_cubic_profile(-1.0, -1), Err(Error::Domain(_))));
    assert!(matches!(solve_cubic_profile(0.5, 0), Err(Error::Domain(_))));
}

#[test]
fn modulus_tends_to_one_as_lambda_tends_to_one() {
    let ms: Vec<f64> = [0.5, 0.8, 0.9, 0.91]
        .iter()
        .map(|&l| cubic_modulus(l, 1).unwrap())
        .collect();
    assert!(ms.windows(2).all(|w| w[0] < w[1]));
    assert!(1.0 - ms[3] < 1e-8);
    // beyond this the nearest double to m̄ no longer reproduces λ
    for lambda in [0.93, 0.97, 0.999] {
        assert!(matches!(cubic_modulus(lambda, 1), Err(Error::Domain(_))), "λ={lambda}");
    }
}

#[test]
fn modulus_is_monotone_in_lambda_on_each_branch() {
    let neg: Vec<f64> = [0.4, 0.7, 1.0, 1.5, 3.0, 8.0]
        .iter()
        .map(|&l| cubic_modulus(l, -1).unwrap())
        .collect();
    assert!(neg.windows(2).all(|w| w[0] < w[1]), "{neg:?}");
    let pos: Vec<f64> = [0.05, 0.2, 0.4, 0.6, 0.8]
        .iter()
        .map(|&l| cubic_modulus(l, 1).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
}

#[test]
fn profiles_are_odd_with_minimal_period_two_pi() {
    for p in [
        solve_quartic_profile(1.0).unwrap(),
        solve_cubic_profile(1.0, -1).unwrap(),
        solve_cubic_profile(0.5, 1).unwrap(),
    ] {
        for t in [0.3, 1.1, 2.9] {
            assert!((p.g(t) + p.g(-t)).abs() < 1e-14);
            assert!((p.g(t + 2.0 * PI) - p.g(t)).abs() < 1e-10);
            // one period, not several: g(π) = 0 and g > 0 on (0, π)
            assert!(p.g(t.min(PI - 0.01)) > 0.0);
        }
        assert!((2.0 * PI * p.omega - 4.0 * elliptic::complete_k(p.modulus())).abs() < 1e-10);
    }
}

#[test]
fn reduce_coefficients_case_table() {
    let nl = NonlinearityCoefficients::quadratic_cubic(1.0, 0.0).unwrap();
    let r = reduce_coefficients(&nl).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].kind, ProfileKind::NonlocalOnly);

    let nl = NonlinearityCoefficients::quadratic_cubic(1.0, PI * PI / 9.0).unwrap();
    let r = reduce_coefficients(&nl).unwrap();
    assert_eq!(r[0].kind, ProfileKind::PureCubic);
    assert_eq!(r[0].s_star, -1);

    // interior with λ < 1: both signs
    let nl = NonlinearityCoefficients::quadratic_cubic(1.0, 0.5).unwrap();
    let r = reduce_coefficients(&nl).unwrap();
    assert_eq!(r.iter().map(|c| c.s_star).collect::<Vec<_>>(), vec![-1, 1]);
    assert!(r.iter().all(|c| c.kind == ProfileKind::CubicSstar && c.lambda < 1.0));

    // interior with λ > 1: only s* = -1
    let nl = NonlinearityCoefficients::quadratic_cubic(1.0, 0.9).unwrap();
    let r = reduce_coefficients(&nl).unwrap();
    assert_eq!(r.len(), 1);
    assert!(r[0].lambda > 1.0 && r[0].s_star == -1);

    // exterior values
    let nl = NonlinearityCoefficients::quadratic_cubic(1.0, 2.0).unwrap();
    let r = reduce_coefficients(&nl).unwrap();
    assert_eq!((r[0].kind, r[0].s_star), (ProfileKind::ExteriorLambda, -1));
    let nl = NonlinearityCoefficients::quadratic_cubic(1.0, -0.4).unwrap();
    let r = reduce_coefficients(&nl).unwrap();
    assert_eq!((r[0].kind, r[0].s_star), (ProfileKind::ExteriorLambda, 1));
    assert!(r[0].lambda > 0.0);
}

#[test]
fn lambda_below_one_iff_below_twelfth_threshold() {
    // 12⟨a₃⟩ < π²a₂² ⇔ λ < 1, checked on both sides of the threshold
    let a2: f64 = 1.3;
    let thr = PI * PI * a2 * a2 / 12.0;
    for a3 in [0.2 * thr, 0.9 * thr, 0.999 * thr, 1.001 * thr, 1.2 * thr, 1.3 * thr] {
        let nl = NonlinearityCoefficients::quadratic_cubic(a2, a3).unwrap();
        let r = reduce_coefficients(&nl).unwrap();
        let both = r.len() == 2;
        assert_eq!(both, a3 < thr, "a3 = {a3}");
        assert_eq!(r[0].lambda < 1.0, a3 < thr);
    }
}

#[test]
fn degenerate_profiles() {
    let p = degenerate_profile(ProfileKind::NonlocalOnly).unwrap();
    assert!((p.v - 2f64.sqrt()).abs() < 1e-15 && p.omega == 1.0 && p.m == 0.0);
    assert!(p.residual_sup < 1e-14);
    let mut scaled = p;
    scaled.v = 1.2;
    assert!(scaled.equation_residual(512) > 0.1);

    let q = degenerate_profile(ProfileKind::PureCubic).unwrap();
    assert!(q.residual_sup < 1e-10);
    assert_eq!(q.m, -1.0);
}

#[test]
fn exterior_profiles() {
    for lambda in [0.05, 0.5, 2.0, 40.0] {
        let p = solve_exterior_profile(lambda, -1).unwrap();
        assert!(p.m > -1.0 && p.m < 0.0);
        assert!(p.residual_sup < 1e-8 * p.v.max(1.0).powi(3), "λ={lambda}: {}", p.residual_sup);
    }
}

#[test]
fn profile_json_round_trip() {
    let p = solve_cubic_profile(0.5, 1).unwrap();
    let s = serde_json::to_string(&p).unwrap();
    for key in ["\"case\":\"cubic_sstar\"", "\"V\":", "\"Omega\":", "\"s_star\":1", "\"lambda\":0.5", "\"residual_sup\""] {
        assert!(s.contains(key), "{s}");
    }
    let back: WaveProfile = serde_json::from_str(&s).unwrap();
    assert_eq!(back, p);
}
