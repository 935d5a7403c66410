//! One function per subcommand. Each returns the JSON body, auxiliary
//! files and the named pass/fail gates.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use resowave::bifurcation::{
    profile_for, reduce_coefficients, solve_cubic_profile, solve_quartic_profile, NonlinearityCase,
    NonlinearityCoefficients, ProfileKind, ReducedCoefficients, WaveProfile,
};
use resowave::galerkin::{
    delta_sweep, galerkin_sigma_min, ode_newton, ode_newton_refined, range_solve, scaled_seed, solve_bifurcation,
    verify_development, BifurcationCase, CosineProfile, DevelopmentCase, FourierSeries1D, FourierSeries2D,
    NewtonOptions, RangeOptions, RangeProblem,
};
use resowave::linearization::{certify, spectral_kernel_check};

use crate::config::{Case, RunConfig};
use crate::CliError;

pub struct Outcome {
    pub file: &'static str,
    pub body: Value,
    pub extra_files: Vec<(String, String)>,
    pub gates: Vec<(String, bool)>,
}

fn newton_options(cfg: &RunConfig) -> NewtonOptions {
    NewtonOptions {
        tol: cfg.tolerances.newton,
        ..Default::default()
    }
}

/// Admissible reduced coefficients of the cubic case, filtered by the `s*` override.
fn cubic_reductions(cfg: &RunConfig, a3: &CosineProfile) -> Result<Vec<ReducedCoefficients>, CliError> {
    let nl = NonlinearityCoefficients::quadratic_cubic(cfg.a2, a3.mean)?;
    let all = reduce_coefficients(&nl)?;
    let kept: Vec<_> = all.into_iter().filter(|r| cfg.s_star.map_or(true, |s| s == r.s_star)).collect();
    if kept.is_empty() {
        return Err(CliError::Input(format!("no admissible branch with s* = {}", cfg.s_star.unwrap_or(0))));
    }
    Ok(kept)
}

/// Profiles described by the configuration.
pub fn profiles_from_config(cfg: &RunConfig) -> Result<(Vec<WaveProfile>, Option<Vec<ReducedCoefficients>>), CliError> {
    match cfg.case {
        Case::Quartic => Ok((vec![solve_quartic_profile(cfg.a4)?], None)),
        Case::Cubic => {
            if let Some(lambda) = cfg.lambda {
                let s = cfg.s_star.ok_or_else(|| CliError::Input("a lambda override needs s_star".into()))?;
                return Ok((vec![solve_cubic_profile(lambda, s)?], None));
            }
            let reduced = cubic_reductions(cfg, &cfg.a3_profile()?)?;
            let profiles = reduced.iter().map(profile_for).collect::<Result<Vec<_>, _>>()?;
            Ok((profiles, Some(reduced)))
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProfileFile {
    Wrapped { profiles: Vec<WaveProfile> },
    List(Vec<WaveProfile>),
    Single(WaveProfile),
}

pub fn load_profiles(path: &Path) -> Result<Vec<WaveProfile>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let parsed: ProfileFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(match parsed {
        ProfileFile::Wrapped { profiles } | ProfileFile::List(profiles) => profiles,
        ProfileFile::Single(p) => vec![p],
    })
}

fn label(p: &WaveProfile) -> String {
    let kind = serde_json::to_value(p.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    match p.s_star {
        Some(s) if p.kind != ProfileKind::Quartic => format!("{kind} s*={s:+}"),
        _ => kind,
    }
}

pub fn profile(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (profiles, reduced) = profiles_from_config(cfg)?;
    let gates = profiles
        .iter()
        .map(|p| {
            (
                format!("{} residual {:.2e} < {:.0e}", label(p), p.residual_sup, cfg.tolerances.profile_residual),
                p.residual_sup < cfg.tolerances.profile_residual,
            )
        })
        .collect();
    Ok(Outcome {
        file: "profile.json",
        body: json!({ "profiles": profiles, "reduced": reduced }),
        extra_files: Vec::new(),
        gates,
    })
}

fn resolve_profiles(cfg: &RunConfig, file: Option<&Path>) -> Result<Vec<WaveProfile>, CliError> {
    match file {
        Some(path) => load_profiles(path),
        None => Ok(profiles_from_config(cfg)?.0),
    }
}

pub fn certify_cmd(cfg: &RunConfig, file: Option<&Path>) -> Result<Outcome, CliError> {
    let mut certs = Vec::new();
    let mut gates = Vec::new();
    for p in resolve_profiles(cfg, file)? {
        let c = certify(&p)?;
        let name = label(&p);
        match (c.b_of_g, c.a0) {
            (Some(b), _) => gates.push((format!("{name} B_of_g > 0"), b > 0.0)),
            (None, Some(a)) => gates.push((format!("{name} A0 = {a:.6}"), a != 0.0)),
            _ => {}
        }
        gates.push((format!("{name} non-degenerate"), c.verdict()));
        certs.push(json!({ "profile": p, "certificate": c }));
    }
    Ok(Outcome {
        file: "certificate.json",
        body: json!({ "certificates": certs }),
        extra_files: Vec::new(),
        gates,
    })
}

pub fn oracle(cfg: &RunConfig, file: Option<&Path>) -> Result<Outcome, CliError> {
    let tol = &cfg.tolerances;
    let modes = cfg.truncation.modes;
    let mut rows = Vec::new();
    let mut gates = Vec::new();
    for p in resolve_profiles(cfg, file)? {
        let eq = p.equation();
        let guess = FourierSeries1D::project(|t| p.g(t), modes);
        let sol = ode_newton(&eq, &guess, newton_options(cfg))?;
        let sup = sol.eta.sup_distance(|t| p.g(t), 32 * modes);
        // halving then doubling, so the last doubling lands on `modes` or beyond
        let half = FourierSeries1D::project(|t| p.g(t), modes / 2);
        let refined = ode_newton_refined(&eq, &half, newton_options(cfg), tol.refinement, 8 * modes)?;
        let sigma = galerkin_sigma_min(&eq, &sol.eta);
        let doubled = ode_newton(&eq, &sol.eta.resized(2 * modes), newton_options(cfg))?;
        let sigma_doubled = galerkin_sigma_min(&eq, &doubled.eta);
        let spectral = spectral_kernel_check(&p, modes).ok();
        let name = label(&p);
        gates.push((format!("{name} sup-norm agreement {sup:.2e} < {:.0e}", tol.oracle), sup < tol.oracle));
        gates.push((format!("{name} doubling change {:.2e}", refined.doubling_change), refined.doubling_change < tol.refinement));
        gates.push((format!("{name} sigma_min {sigma:.4} > 1e-3"), sigma > 1e-3));
        gates.push((
            format!("{name} sigma_min stable under doubling"),
            (sigma - sigma_doubled).abs() < 0.1 * sigma,
        ));
        if let Some(s) = spectral {
            gates.push((
                format!("{name} sigma_min within 5% of spectral {:.4}", s.sigma_min),
                (sigma - s.sigma_min).abs() < 0.05 * s.sigma_min,
            ));
        }
        rows.push(json!({
            "profile": p,
            "modes": modes,
            "newton_iterations": sol.iterations,
            "newton_residual": sol.residual,
            "sup_distance": sup,
            "refined_modes": refined.modes,
            "doubling_change": refined.doubling_change,
            "sigma_min": sigma,
            "sigma_min_doubled": sigma_doubled,
            "spectral": spectral,
            "eta": sol.eta.b,
        }));
    }
    Ok(Outcome {
        file: "oracle.json",
        body: json!({ "oracle": rows }),
        extra_files: Vec::new(),
        gates,
    })
}

/// Galerkin solution of the reduced equation for the first configured profile.
fn reduced_solution(cfg: &RunConfig) -> Result<(WaveProfile, FourierSeries1D), CliError> {
    let (profiles, _) = profiles_from_config(cfg)?;
    let p = profiles[0];
    let guess = FourierSeries1D::project(|t| p.g(t), cfg.truncation.modes);
    Ok((p, ode_newton(&p.equation(), &guess, newton_options(cfg))?.eta))
}

fn s_star_of(p: &WaveProfile) -> Result<i8, CliError> {
    p.s_star.ok_or_else(|| CliError::Input("profile carries no s*".into()))
}

pub fn develop(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (case, eta) = match cfg.case {
        Case::Quartic => {
            let eta = match &cfg.eta {
                Some(b) => FourierSeries1D::new(b.clone()),
                None => reduced_solution(cfg)?.1.resized(cfg.truncation.eta_modes),
            };
            (DevelopmentCase::Quartic { a4: cfg.a4 }, eta)
        }
        Case::Cubic => {
            let (p, star) = reduced_solution(cfg)?;
            let eta = match &cfg.eta {
                Some(b) => FourierSeries1D::new(b.clone()),
                None => star.resized(cfg.truncation.eta_modes),
            };
            let case = DevelopmentCase::Cubic {
                a2: cfg.a2,
                a3: cfg.a3_profile()?,
                s_star: cfg.s_star.map_or_else(|| s_star_of(&p), Ok)?,
            };
            (case, eta)
        }
    };
    let rep = verify_development(&case, &eta, &cfg.truncation.ns)?;
    let tol = &cfg.tolerances;
    let gates = vec![
        (
            format!("fitted remainder exponent {:.4} = 2 ± {}", rep.fitted_exponent, tol.exponent),
            (rep.fitted_exponent - 2.0).abs() < tol.exponent,
        ),
        (
            format!("kinetic identity defect {:.2e} < {:.0e}", rep.kinetic_defect, tol.kinetic),
            rep.kinetic_defect < tol.kinetic,
        ),
        (format!("support on multiples of n (defect {:.1e})", rep.support_defect), rep.support_defect == 0.0),
    ];
    Ok(Outcome {
        file: "development.json",
        body: json!({ "case": case, "eta": eta.b, "report": rep }),
        extra_files: Vec::new(),
        gates,
    })
}

fn csv_grid(points: usize, f: impl Fn(f64, f64) -> f64) -> String {
    let mut out = String::from("t,x,u\n");
    for i in 0..points {
        let t = 2.0 * PI * i as f64 / points as f64;
        for j in 0..points {
            let x = PI * j as f64 / (points - 1) as f64;
            out.push_str(&format!("{t:.17e},{x:.17e},{:.17e}\n", f(t, x)));
        }
    }
    out
}

pub fn range(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tr = &cfg.truncation;
    let (p, star) = reduced_solution(cfg)?;
    let (bcase, problem) = match cfg.case {
        Case::Quartic => (
            BifurcationCase::Quartic { a4: cfg.a4 },
            RangeProblem::Quartic {
                a4: cfg.a4,
                a5: CosineProfile::constant(cfg.a5),
            },
        ),
        Case::Cubic => {
            let a3 = cfg.a3_profile()?;
            let s_star = cfg.s_star.map_or_else(|| s_star_of(&p), Ok)?;
            (
                BifurcationCase::Cubic {
                    a2: cfg.a2,
                    a3: a3.clone(),
                    s_star,
                },
                RangeProblem::QuadraticCubic {
                    a2: cfg.a2,
                    a3,
                    a4: cfg.a4,
                    s_star,
                },
            )
        }
    };
    let opts = RangeOptions {
        l_max: tr.l_max,
        j_max: tr.j_max,
        divisor_threshold: cfg.tolerances.divisor,
        ..Default::default()
    };
    // fail fast on a resonant frequency before the bifurcation solve
    let omega = problem.omega(cfg.delta)?;
    let (d, l, j) = resowave::galerkin::min_small_divisor(omega, tr.l_max, tr.j_max);
    if d < opts.divisor_threshold {
        return Err(resowave::Error::Resonance { l, j, divisor: d }.into());
    }
    let seed = scaled_seed(&bcase, tr.n, &star.resized(tr.base_modes));
    let bif = solve_bifurcation(&bcase, tr.n, &seed, cfg.tolerances.bifurcation, 50)?;
    let v = FourierSeries2D::from_eta(&bif.eta, tr.n);
    let sol = range_solve(&problem, &v, cfg.delta, opts)?;
    let rep = &sol.report;
    let scale = 2.0 * (tr.n * tr.n) as f64 * bif.eta.b.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let gates = vec![
        (
            format!("bifurcation residual {:.2e} < 1e-8 (relative, with tail)", bif.residual.max(bif.residual_tail) / scale),
            bif.residual.max(bif.residual_tail) < 1e-8 * scale,
        ),
        (
            format!("range residual {:.2e} < {:.0e}", rep.residual_sup, cfg.tolerances.range),
            rep.residual_sup < cfg.tolerances.range,
        ),
        (
            "range residual decreases across Newton steps".to_string(),
            rep.residual_history.windows(2).all(|w| w[1] < w[0]),
        ),
    ];
    let extra = vec![
        ("range_v.csv".to_string(), csv_grid(tr.grid_points, |t, x| v.eval(t, x))),
        ("range_w.csv".to_string(), csv_grid(tr.grid_points, |t, x| sol.w.eval(t, x))),
    ];
    Ok(Outcome {
        file: "range.json",
        body: json!({ "bifurcation": bif, "report": rep }),
        extra_files: extra,
        gates,
    })
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (case, s_star) = match cfg.case {
        Case::Quartic => (NonlinearityCase::Quartic, 1),
        Case::Cubic => (NonlinearityCase::QuadraticCubic, cfg.s_star.unwrap_or(-1)),
    };
    let s = &cfg.sweep;
    let tr = &cfg.truncation;
    let mut reports = Vec::new();
    let mut dm = s.delta_max;
    // the configured interval and three successive halvings
    for _ in 0..4 {
        reports.push(delta_sweep(case, s_star, dm, s.samples, tr.l_max, tr.j_max, s.threshold, cfg.seed)?);
        dm *= 0.5;
    }
    let gates = reports
        .iter()
        .map(|r| (format!("delta_max {:.4}: admissible fraction {:.4}", r.delta_max, r.admissible_fraction), true))
        .collect();
    Ok(Outcome {
        file: "sweep.json",
        body: json!({ "sweeps": reports }),
        extra_files: Vec::new(),
        gates,
    })
}
