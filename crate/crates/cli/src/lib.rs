//! Front end for the resowave pipeline.
//!
//! Exit codes: 0 all gates pass, 1 a gate failed, 2 invalid input or domain
//! error, 3 a solver did not converge, 4 a small divisor below threshold.

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub use config::{Case, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_RESONANCE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(resowave::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "input error: {s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<resowave::Error> for CliError {
    fn from(e: resowave::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use resowave::Error::*;
        match self {
            CliError::Input(_) | CliError::Core(Domain(_)) => EXIT_DOMAIN,
            CliError::Core(Convergence { .. } | Singular { .. } | Resolution { .. }) => EXIT_CONVERGENCE,
            CliError::Core(Resonance { .. }) => EXIT_RESONANCE,
            CliError::Core(CrossCheck { .. }) => EXIT_GATE,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Core(resowave::Error::Resonance { l, j, divisor }) => {
                json!({ "kind": "resonance", "l": l, "j": j, "divisor": divisor, "message": self.to_string() })
            }
            _ => json!({ "kind": self.kind(), "message": self.to_string() }),
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_DOMAIN => "domain",
            EXIT_CONVERGENCE => "convergence",
            EXIT_RESONANCE => "resonance",
            _ => "gate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Profile,
    Certify,
    Oracle,
    Develop,
    Range,
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::Certify => "certify",
            Command::Oracle => "oracle",
            Command::Develop => "develop",
            Command::Range => "range",
            Command::Sweep => "sweep",
        }
    }
}

fn meta(cfg: &RunConfig, cmd: Command) -> Value {
    json!({
        "tool": "resowave",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Runs one subcommand, writes its artifacts and returns the exit code.
pub fn run(cfg: &RunConfig, cmd: Command, profile_file: Option<&Path>) -> i32 {
    let result = cfg.validate().and_then(|_| match cmd {
        Command::Profile => commands::profile(cfg),
        Command::Certify => commands::certify_cmd(cfg, profile_file),
        Command::Oracle => commands::oracle(cfg, profile_file),
        Command::Develop => commands::develop(cfg),
        Command::Range => commands::range(cfg),
        Command::Sweep => commands::sweep(cfg),
    });
    match result {
        Ok(out) => {
            let pass = out.gates.iter().all(|(_, ok)| *ok);
            let gates: Vec<Value> = out.gates.iter().map(|(n, ok)| json!({ "name": n, "pass": ok })).collect();
            let mut body = json!({ "meta": meta(cfg, cmd), "pass": pass, "gates": gates });
            if let (Value::Object(dst), Value::Object(src)) = (&mut body, out.body) {
                dst.extend(src);
            }
            let text = serde_json::to_string_pretty(&body).expect("report serializes");
            let written = write(&cfg.out_dir, out.file, &text)
                .and_then(|p| {
                    for (name, contents) in &out.extra_files {
                        write(&cfg.out_dir, name, contents)?;
                    }
                    Ok(p)
                });
            match written {
                Ok(path) => {
                    for (name, ok) in &out.gates {
                        println!("{name}: {}", if *ok { "pass" } else { "FAIL" });
                    }
                    println!("wrote {}", path.display());
                    if pass {
                        EXIT_PASS
                    } else {
                        EXIT_GATE
                    }
                }
                Err(e) => {
                    eprintln!("{e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("{e}");
            let body = json!({ "meta": meta(cfg, cmd), "pass": false, "error": e.to_json() });
            let _ = write(
                &cfg.out_dir,
                &format!("{}_error.json", cmd.name()),
                &serde_json::to_string_pretty(&body).expect("report serializes"),
            );
            e.exit_code()
        }
    }
}
