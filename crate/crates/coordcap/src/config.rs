//! Flags, config files and per-command validation.
//!
//! A config file is a JSON object whose keys are the long flag names. Flags
//! given on the command line win over the file.

use std::path::{Path, PathBuf};

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Seed used by every randomized command when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Region,
    Optimize,
    Simulate,
    Rd,
    Scaling,
    Fixtures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Region => "region",
            Command::Optimize => "optimize",
            Command::Simulate => "simulate",
            Command::Rd => "rd",
            Command::Scaling => "scaling",
            Command::Fixtures => "fixtures",
        }
    }

    /// Keys the command reads besides `command`, `config` and `out`.
    fn allowed(self) -> &'static [&'static str] {
        match self {
            Command::Region => &[
                "network", "fixture", "source", "target", "witness", "aux", "rate", "rates", "f0",
                "cap", "rho-xy", "rho-yz", "base",
            ],
            Command::Optimize => &[
                "problem",
                "fixture",
                "source",
                "target",
                "weights",
                "r0",
                "f0",
                "cap",
                "restarts",
                "iterations",
                "seed",
                "base",
            ],
            Command::Simulate => &[
                "scheme", "fixture", "source", "target", "aux", "rate", "rates", "r0", "n",
                "trials", "epsilon", "seed", "budget", "mode",
            ],
            Command::Rd => &["fixture", "source", "grid", "rate"],
            Command::Scaling => &["topology", "k", "base"],
            Command::Fixtures => &["fixture"],
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Command::Region => &["network"],
            Command::Optimize => &["problem"],
            Command::Simulate => &["scheme", "n", "trials"],
            Command::Rd => &["rate"],
            Command::Scaling => &["topology", "k"],
            Command::Fixtures => &[],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Base {
    Bits,
    Nats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Codebook,
    FullRandomness,
}

/// Every setting the tool understands. All fields are optional; a config
/// file and the command line each supply any subset.
#[derive(Clone, Debug, Default, PartialEq, Parser, Serialize, Deserialize)]
#[command(
    name = "coordcap",
    version,
    about = "Coordination capacity regions, optimizers and simulators"
)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// region, optimize, simulate, rd, scaling or fixtures
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON file of default settings
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV artifact path
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Units for reported rates
    #[arg(long, value_enum)]
    pub base: Option<Base>,
    /// two-node, isolated-node, cascade, broadcast, cascade-mt, degraded-source, gaussian
    #[arg(long)]
    pub network: Option<String>,
    /// Built-in distribution, e.g. TA2:5, TA3, BSC:0.1
    #[arg(long)]
    pub fixture: Option<String>,
    /// Source pmf (JSON)
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Target channel (JSON)
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Broadcast auxiliary channel p(u|x,y,z): a JSON file or `golden-ratio`
    #[arg(long)]
    pub witness: Option<String>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Comma-separated rate pair, e.g. 1.6,0.6
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    /// Common-randomness rate
    #[arg(long)]
    pub r0: Option<f64>,
    /// wyner, necessary-entropy, strong-two-node, no-comm, broadcast, cascade-mt, degraded-source
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Cardinality cap on auxiliary alphabets
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// two-node, cascade, side-info, strong-markov, strong-markov-corner, exact-no-comm
    #[arg(long)]
    pub scheme: Option<String>,
    /// Block length
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Grid resolution per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// extended-cascade or extended-broadcast
    #[arg(long)]
    pub topology: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "rho-xy", allow_negative_numbers = true)]
    pub rho_xy: Option<f64>,
    #[arg(long = "rho-yz", allow_negative_numbers = true)]
    pub rho_yz: Option<f64>,
    /// Auxiliary channel p(u|x,y) for side-information coding (JSON)
    #[arg(long)]
    pub aux: Option<PathBuf>,
    /// Work budget of the exact evaluator
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Deterministic map X -> Y of the degraded source, e.g. 0,0,1
    #[arg(long, value_delimiter = ',')]
    pub f0: Option<Vec<usize>>,
}

/// Outcome of reading argv: either settings to run or text clap already
/// rendered (help, version).
#[derive(Debug)]
pub enum Parsed {
    Run(Box<Settings>),
    Display(String),
}

impl Settings {
    fn to_map(&self) -> Map<String, Value> {
        match serde_json::to_value(self).expect("settings serialize") {
            Value::Object(m) => m,
            _ => unreachable!("settings serialize to an object"),
        }
    }

    pub fn keys() -> Vec<String> {
        Settings::default().to_map().keys().cloned().collect()
    }

    /// Keys that hold a value.
    pub fn present(&self) -> Vec<String> {
        self.to_map()
            .into_iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, _)| k)
            .collect()
    }

    /// Reads a JSON config object; each value is checked on its own so an
    /// error names the key it came from.
    pub fn from_file(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        Settings::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Settings> {
        let root: Value =
            serde_json::from_str(text).map_err(|e| CliError::malformed("config", e))?;
        let Value::Object(map) = root else {
            return Err(CliError::malformed("config", "expected a JSON object"));
        };
        let known = Settings::keys();
        let mut merged = Map::new();
        for (k, v) in map {
            if !known.contains(&k) {
                return Err(CliError::UnknownFlag(k));
            }
            if k == "config" && !v.is_null() {
                return Err(CliError::malformed(
                    "config",
                    "config files cannot include other config files",
                ));
            }
            let mut one = Map::new();
            one.insert(k.clone(), v.clone());
            serde_json::from_value::<Settings>(Value::Object(one))
                .map_err(|e| CliError::malformed(&k, e))?;
            merged.insert(k, v);
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::malformed("config", e))
    }

    /// Values present in `over` replace those in `self`.
    pub fn overlay(&self, over: &Settings) -> Settings {
        let mut base = self.to_map();
        for (k, v) in over.to_map() {
            if !v.is_null() {
                base.insert(k, v);
            }
        }
        serde_json::from_value(Value::Object(base)).expect("merged settings deserialize")
    }

    pub fn command(&self) -> Result<Command> {
        self.command
            .ok_or_else(|| CliError::MissingRequired("command".into()))
    }

    /// Rejects keys the command does not read and reports the first missing
    /// required key.
    pub fn validate(&self) -> Result<Command> {
        let cmd = self.command()?;
        let allowed = cmd.allowed();
        for k in self.present() {
            if !matches!(k.as_str(), "command" | "config" | "out") && !allowed.contains(&k.as_str())
            {
                return Err(CliError::invalid(
                    &k,
                    format!("not used by the {} command", cmd.name()),
                ));
            }
        }
        let present = self.present();
        for k in cmd.required() {
            if !present.iter().any(|p| p == k) {
                return Err(CliError::MissingRequired(k.to_string()));
            }
        }
        Ok(cmd)
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

/// Parses argv (including the program name) and folds in `--config`.
pub fn parse_config<I, T>(argv: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let flags = match Settings::try_parse_from(argv) {
        Ok(s) => s,
        Err(e) => return clap_error(e),
    };
    let settings = match &flags.config {
        Some(path) => Settings::from_file(path)?.overlay(&flags),
        None => flags,
    };
    settings.validate()?;
    Ok(Parsed::Run(Box::new(settings)))
}

fn clap_error(e: clap::Error) -> Result<Parsed> {
    let arg = match e.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => flag_name(s),
        _ => String::new(),
    };
    match e.kind() {
        ErrorKind::DisplayHelp
        | ErrorKind::DisplayVersion
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            Ok(Parsed::Display(e.render().to_string()))
        }
        ErrorKind::UnknownArgument => Err(CliError::UnknownFlag(arg)),
        ErrorKind::MissingRequiredArgument => Err(CliError::MissingRequired(arg)),
        _ => {
            let reason = e.render().to_string();
            let reason = reason
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ")
                .to_string();
            Err(CliError::invalid(
                if arg.is_empty() { "argv" } else { &arg },
                reason,
            ))
        }
    }
}

/// `--rate <RATE>` and `[COMMAND]` become `rate` and `command`.
fn flag_name(s: &str) -> String {
    let s = s.trim_start_matches('-');
    let s = s.split(['=', ' ']).next().unwrap_or(s);
    let s = s.trim_matches(|c| c == '[' || c == ']' || c == '<' || c == '>');
    s.to_ascii_lowercase()
}
