//! Run configuration: TOML file, command-line overrides, content hash.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use resowave::galerkin::CosineProfile;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Quartic,
    Cubic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    /// Sine modes of the one-dimensional Galerkin solve.
    pub modes: usize,
    /// Base modes `K` of the bifurcation solve in `V_n`.
    pub base_modes: usize,
    /// Coefficients of `η` kept by the development check.
    pub eta_modes: usize,
    /// Frequency `n` of the bifurcation solution fed to the range solve.
    pub n: usize,
    pub l_max: usize,
    pub j_max: usize,
    /// `n` values of the development check.
    pub ns: Vec<usize>,
    /// Points per axis of the CSV grids.
    pub grid_points: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            modes: 64,
            base_modes: 32,
            eta_modes: 8,
            n: 2,
            l_max: 32,
            j_max: 32,
            ns: vec![4, 8, 16, 32],
            grid_points: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Sup-norm gate on the profile equation residual.
    pub profile_residual: f64,
    /// Coefficient 2-norm target of the Galerkin Newton solve.
    pub newton: f64,
    /// Sup-norm gate between Galerkin and closed-form profiles.
    pub oracle: f64,
    /// Sup-norm change allowed when the Galerkin truncation doubles.
    pub refinement: f64,
    /// Relative residual target of the bifurcation Newton solve.
    pub bifurcation: f64,
    /// Coefficient residual gate of the range solve.
    pub range: f64,
    /// Small divisors below this abort the range solve.
    pub divisor: f64,
    /// Allowed distance of the fitted development exponent from 2.
    pub exponent: f64,
    pub kinetic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            profile_residual: 1e-8,
            newton: 1e-12,
            oracle: 1e-7,
            refinement: 1e-9,
            bifurcation: 1e-13,
            range: 1e-9,
            divisor: 1e-6,
            exponent: 0.3,
            kinetic: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub delta_max: f64,
    pub samples: usize,
    pub threshold: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            delta_max: 0.2,
            samples: 2000,
            threshold: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub case: Case,
    pub a2: f64,
    /// x-average of `a₃`, ignored when `a3_file` is given.
    pub a3_mean: f64,
    /// Two-column `x a₃(x)` samples on `[0, π]`.
    pub a3_file: Option<PathBuf>,
    pub a3_modes: usize,
    pub a4: f64,
    /// Constant coefficient `a₅` of the quartic range equation.
    pub a5: f64,
    pub lambda: Option<f64>,
    pub s_star: Option<i8>,
    pub delta: f64,
    /// Explicit base coefficients `b_k` for the development; the profile is used otherwise.
    pub eta: Option<Vec<f64>>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub truncation: Truncation,
    pub tolerances: Tolerances,
    pub sweep: Sweep,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: Case::Quartic,
            a2: 0.0,
            a3_mean: 0.0,
            a3_file: None,
            a3_modes: 8,
            a4: 1.0,
            a5: 0.0,
            lambda: None,
            s_star: None,
            delta: 0.0,
            eta: None,
            seed: 0,
            out_dir: PathBuf::from("out"),
            truncation: Truncation::default(),
            tolerances: Tolerances::default(),
            sweep: Sweep::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        let tols = [
            ("profile_residual", t.profile_residual),
            ("newton", t.newton),
            ("oracle", t.oracle),
            ("refinement", t.refinement),
            ("bifurcation", t.bifurcation),
            ("range", t.range),
            ("divisor", t.divisor),
            ("exponent", t.exponent),
            ("kinetic", t.kinetic),
            ("sweep.threshold", self.sweep.threshold),
        ];
        if let Some((name, v)) = tols.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(CliError::Input(format!("tolerance {name} must be positive, got {v}")));
        }
        let tr = &self.truncation;
        let zero = [tr.base_modes, tr.eta_modes, tr.n, tr.l_max, tr.j_max].contains(&0);
        if tr.modes < 8 || zero || tr.grid_points < 2 {
            return Err(CliError::Input("truncations must be positive (modes >= 8)".into()));
        }
        if let Some(s) = self.s_star {
            if s != 1 && s != -1 {
                return Err(CliError::Input(format!("s_star must be +1 or -1, got {s}")));
            }
        }
        Ok(())
    }

    /// `⟨a₃⟩` and the full `a₃(x)` profile, from the sample file if one is given.
    pub fn a3_profile(&self) -> Result<CosineProfile, CliError> {
        let Some(path) = &self.a3_file else {
            return Ok(CosineProfile::constant(self.a3_mean));
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Input(format!("{}:{}: {e}", path.display(), i + 1)))?;
            if cols.len() != 2 {
                return Err(CliError::Input(format!("{}:{}: expected two columns", path.display(), i + 1)));
            }
            samples.push((cols[0], cols[1]));
        }
        Ok(CosineProfile::from_samples(&samples, self.a3_modes)?)
    }

    /// SHA-256 of the canonical JSON form, with the output directory left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        let json = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
