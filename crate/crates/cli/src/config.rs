//! Run configuration. The same structs back the command-line flags and the
//! JSON files accepted by `xprod run`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use xprod::norms::DEFAULT_SUPPORT_CAP;

/// Where the dynamical system comes from.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Built-in fixture (see `xprod fixtures`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    /// JSON system file.
    #[arg(long, value_name = "PATH")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Representable,
    NotRepresentable,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSystemArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Fail (exit 1) unless the verdict matches.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Semigroup element; coordinates separated by ':' when k > 1.
    #[arg(long, default_value = "1")]
    #[serde(default = "default_x")]
    pub x: String,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Left factor (element spec).
    #[arg(long)]
    pub a: String,
    /// Right factor (element spec).
    #[arg(long)]
    pub b: String,
    /// Project coefficients onto their allowed corners instead of rejecting them.
    #[arg(long)]
    #[serde(default)]
    pub project: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Element spec.
    #[arg(long)]
    pub element: String,
    #[arg(long, default_value_t = default_kmax())]
    #[serde(default = "default_kmax")]
    pub kmax: usize,
    /// Largest support allowed for intermediate powers.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_CAP)]
    #[serde(default = "default_support_cap")]
    pub support_cap: usize,
    #[arg(long)]
    #[serde(default)]
    pub project: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegrepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Window radius N: degrees with every |g_i| <= N.
    #[arg(long, default_value_t = default_window())]
    #[serde(default = "default_window")]
    pub window: i64,
    /// Comma-separated semigroup elements whose U_x are checked.
    #[arg(long, default_value = "1")]
    #[serde(default = "default_gens")]
    pub gens: String,
    /// `trace`, or a JSON file holding a positive density.
    #[arg(long, default_value = "trace")]
    #[serde(default = "default_state")]
    pub state: String,
    /// Interior margin; defaults to the largest generator radius.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandConfig {
    Fixtures,
    CheckSystem(CheckSystemArgs),
    Transfer(TransferArgs),
    Mul(MulArgs),
    Norm(NormArgs),
    Regrep(RegrepArgs),
    Selftest,
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Fixtures => "fixtures",
            CommandConfig::CheckSystem(_) => "check-system",
            CommandConfig::Transfer(_) => "transfer",
            CommandConfig::Mul(_) => "mul",
            CommandConfig::Norm(_) => "norm",
            CommandConfig::Regrep(_) => "regrep",
            CommandConfig::Selftest => "selftest",
        }
    }

    pub fn source(&self) -> Option<&SourceArgs> {
        match self {
            CommandConfig::Fixtures | CommandConfig::Selftest => None,
            CommandConfig::CheckSystem(a) => Some(&a.source),
            CommandConfig::Transfer(a) => Some(&a.source),
            CommandConfig::Mul(a) => Some(&a.source),
            CommandConfig::Norm(a) => Some(&a.source),
            CommandConfig::Regrep(a) => Some(&a.source),
        }
    }
}

/// A complete, reproducible run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: CommandConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

fn default_x() -> String {
    "1".into()
}

fn default_kmax() -> usize {
    10
}

fn default_support_cap() -> usize {
    DEFAULT_SUPPORT_CAP
}

fn default_window() -> i64 {
    10
}

fn default_gens() -> String {
    "1".into()
}

fn default_state() -> String {
    "trace".into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let text = r#"{"command": "norm", "fixture": "S2", "element": "u1", "seed": 7}"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.seed, 7);
        match &cfg.command {
            CommandConfig::Norm(n) => {
                assert_eq!(n.kmax, 10);
                assert_eq!(n.source.fixture.as_deref(), Some("S2"));
            }
            other => panic!("parsed as {other:?}"),
        }
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);

        let sel: RunConfig = serde_json::from_str(r#"{"command": "selftest"}"#).unwrap();
        assert_eq!(sel.command, CommandConfig::Selftest);
        assert!(serde_json::from_str::<RunConfig>(r#"{"command": "plot"}"#).is_err());
    }
}
