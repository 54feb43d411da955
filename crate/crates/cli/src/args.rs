use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// A scalar, a comma-separated list, or an inclusive `start:stop:count` sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ValueSpec {
    Scalar(f64),
    List(Vec<f64>),
    Sweep { start: f64, stop: f64, count: usize },
}

impl ValueSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            ValueSpec::Scalar(x) => vec![*x],
            ValueSpec::List(v) => v.clone(),
            ValueSpec::Sweep { start, stop, count } => {
                frustra_core::phase_map::linspace(*start, *stop, *count)
            }
        }
    }
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

impl FromStr for ValueSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [one] if one.contains(',') => {
                Ok(ValueSpec::List(one.split(',').map(parse_finite).collect::<Result<_, _>>()?))
            }
            [one] => Ok(ValueSpec::Scalar(parse_finite(one)?)),
            [a, b, n] => {
                let count: usize = n.trim().parse().map_err(|_| format!("bad sweep count {n:?}"))?;
                if count < 2 {
                    return Err(format!("sweep count must be at least 2, got {count}"));
                }
                Ok(ValueSpec::Sweep { start: parse_finite(a)?, stop: parse_finite(b)?, count })
            }
            _ => Err(format!("expected a number, a list a,b,c or a sweep start:stop:count, got {s:?}")),
        }
    }
}

impl fmt::Display for ValueSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSpec::Scalar(x) => write!(f, "{x}"),
            ValueSpec::List(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", s.join(","))
            }
            ValueSpec::Sweep { start, stop, count } => write!(f, "{start}:{stop}:{count}"),
        }
    }
}

/// Ring lengths: `11`, `5,7,9` or an inclusive range `5:13` (optionally `5:13:2`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthSpec(pub Vec<usize>);

impl FromStr for LengthSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad length {x:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let v = match parts.as_slice() {
            [one] => one.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            [a, b] => (num(a)?..=num(b)?).collect(),
            [a, b, step] => (num(a)?..=num(b)?).step_by(num(step)?.max(1)).collect(),
            _ => return Err(format!("bad length spec {s:?}")),
        };
        if v.is_empty() {
            return Err(format!("empty length spec {s:?}"));
        }
        Ok(LengthSpec(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Analytic,
    Ed,
}

#[derive(Debug, Parser)]
#[command(name = "frustra", version, about = "Spectra, phases and topology of the ring-frustrated non-Hermitian XY chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// Field given directly or through its inverse.
#[derive(Debug, Args, Clone)]
pub struct FieldArgs {
    /// Field h: value, list a,b,c or sweep start:stop:count.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "inv_h")]
    pub h: Option<ValueSpec>,
    /// Sweep over 1/h instead of h.
    #[arg(long = "inv-h", allow_hyphen_values = true)]
    pub inv_h: Option<ValueSpec>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All 2^L levels along a field sweep.
    Spectrum {
        #[arg(long = "L")]
        l: usize,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Match analytic channels against the ED parity sectors.
    Verify {
        #[arg(long = "L")]
        l: LengthSpec,
        #[arg(long, allow_hyphen_values = true)]
        gamma: ValueSpec,
        #[arg(long, allow_hyphen_values = true)]
        delta: ValueSpec,
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// |Im E0| and phase labels over an (h, delta) grid, plus boundaries.
    PhaseDiagram {
        #[arg(long = "L", default_value_t = 11)]
        l: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: ValueSpec,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value = "analytic")]
        engine: EngineArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Winding number along a field sweep.
    Winding {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 10_000)]
        n_grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Normalized Bloch-vector trajectory over one period.
    Bloch {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Ground energy, degeneracy and gap against ring length.
    GapScan {
        #[arg(long = "L")]
        l: LengthSpec,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}
