use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "torfan",
    version,
    about = "Formal group ring models of oriented cohomology of smooth toric varieties"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Apply {
    Pullback,
    Pushforward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Recursive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Polynomial,
    Exponential,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Formal group law: additive, mult:v, mult:unit:b, lorentz:u2 or generic:<file>
    #[arg(long, default_value = "additive")]
    pub fgl: String,

    /// Truncation degree N
    #[arg(
        long = "truncate",
        env = "TORFAN_TRUNCATE",
        default_value_t = 6,
        value_parser = clap::value_parser!(u32).range(1..=64)
    )]
    pub truncate: u32,

    /// Parameter assignments such as v=1 (repeatable or comma-separated)
    #[arg(long = "specialize", value_delimiter = ',')]
    pub specialize: Vec<String>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Skip the convexity checks when reading a fan file
    #[arg(long)]
    pub trusted: bool,
}

/// Fan source: a JSON file or a catalog name (p1, pn:N, dp6, hirzebruch:r, affine:N).
#[derive(Debug, Clone, Args)]
pub struct FanArg {
    #[arg(long)]
    pub fan: String,
}

#[derive(Debug, Clone, Args)]
pub struct Sampling {
    /// Number of random samples
    #[arg(long, default_value_t = 20)]
    pub samples: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a fan and summarize its combinatorics
    Validate {
        #[command(flatten)]
        fan: FanArg,
        #[command(flatten)]
        common: Common,
    },
    /// Equivariant presentation: formal group ring modulo the Stanley-Reisner ideal
    Model {
        #[command(flatten)]
        fan: FanArg,
        /// Also print character classes of the standard basis
        #[arg(long)]
        characters: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Ordinary presentation after eliminating the rays of a maximal cone
    Ordinary {
        #[command(flatten)]
        fan: FanArg,
        /// Maximal cone to eliminate, as ray indices or labels (default: first)
        #[arg(long)]
        tau: Option<String>,
        /// Element to reduce and test for membership in the ideal
        #[arg(long)]
        element: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Picard group presentation
    Pic {
        #[command(flatten)]
        fan: FanArg,
        #[command(flatten)]
        common: Common,
    },
    /// Check or perform gluing of per-cone restrictions
    GlueCheck {
        #[command(flatten)]
        fan: FanArg,
        /// JSON list with one element per maximal cone; without it random
        /// elements are restricted and glued back
        #[arg(long)]
        tuple: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// Blow-up along a cone: pull-back, push-forward and their checks
    Blowup {
        #[command(flatten)]
        fan: FanArg,
        /// Center cone, as ray indices or labels
        #[arg(long)]
        center: String,
        #[arg(long, value_enum)]
        apply: Option<Apply>,
        /// Element on the base (pullback) or on the subdivided fan (pushforward)
        #[arg(long)]
        element: Option<String>,
        /// Degree bound of the push-forward table
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// Apply --specialize to an element
    Specialize {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long)]
        element: String,
        #[command(flatten)]
        common: Common,
    },
    /// Piecewise polynomial (or exponential) image of an element
    Piecewise {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long, required_unless_present = "courant")]
        element: Option<String>,
        /// Courant function of a ray instead of an element
        #[arg(long, conflicts_with = "element")]
        courant: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Polynomial)]
        mode: Mode,
        /// Lattice point to evaluate at, e.g. 1,-2
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run built-in checks over catalog fans
    Selftest {
        /// Comma-separated catalog names; empty runs no checks
        #[arg(long, default_value = "p1,pn:2,pn:3,dp6,hirzebruch:1")]
        catalog: String,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Model { .. } => "model",
            Command::Ordinary { .. } => "ordinary",
            Command::Pic { .. } => "pic",
            Command::GlueCheck { .. } => "glue-check",
            Command::Blowup { .. } => "blowup",
            Command::Specialize { .. } => "specialize",
            Command::Piecewise { .. } => "piecewise",
            Command::Selftest { .. } => "selftest",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Validate { common, .. }
            | Command::Model { common, .. }
            | Command::Ordinary { common, .. }
            | Command::Pic { common, .. }
            | Command::GlueCheck { common, .. }
            | Command::Blowup { common, .. }
            | Command::Specialize { common, .. }
            | Command::Piecewise { common, .. }
            | Command::Selftest { common, .. } => common,
        }
    }

    pub fn fan_source(&self) -> Option<&str> {
        match self {
            Command::Validate { fan, .. }
            | Command::Model { fan, .. }
            | Command::Ordinary { fan, .. }
            | Command::Pic { fan, .. }
            | Command::GlueCheck { fan, .. }
            | Command::Blowup { fan, .. }
            | Command::Specialize { fan, .. }
            | Command::Piecewise { fan, .. } => Some(&fan.fan),
            Command::Selftest { .. } => None,
        }
    }
}

/// Inline JSON or a path to a JSON file.
pub fn read_json_arg(arg: &str) -> Result<serde_json::Value, String> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(PathBuf::from(arg)).map_err(|e| format!("cannot read `{arg}`: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("`{arg}`: {e}"))
}
