//! Input loading, literal parsing and report output.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use heatcomp_core::{Error, Scalar, ScalarMode, Temperature};
use num_rational::BigRational;
use serde::Serialize;

/// Exit status 2 for caller mistakes, 1 for failures of the tool itself.
#[derive(Debug)]
pub enum CliError {
    Precondition(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        CliError::Precondition(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Precondition(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_precondition() {
            CliError::Precondition(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// `rational`, `real`, or `real:BITS`.
pub fn parse_mode(s: &str, precision: usize) -> CliResult<ScalarMode> {
    match s.split_once(':') {
        None if s == "rational" => Ok(ScalarMode::Rational),
        None if s == "real" => Ok(ScalarMode::Real(precision)),
        Some(("real", bits)) => match bits.parse::<usize>() {
            Ok(b) if b >= 16 => Ok(ScalarMode::Real(b)),
            _ => Err(CliError::precondition(format!("invalid precision `{bits}` in scalar mode (need at least 16 bits)"))),
        },
        _ => Err(CliError::precondition(format!("unknown scalar mode `{s}`; expected rational, real or real:BITS"))),
    }
}

/// Literal parsing under the active scalar mode.
#[derive(Clone, Copy, Debug)]
pub struct Literals {
    pub precision: usize,
    pub mode: ScalarMode,
}

impl Literals {
    fn working_precision(&self) -> usize {
        match self.mode {
            ScalarMode::Rational => self.precision,
            ScalarMode::Real(p) => p,
        }
    }

    pub fn scalar(&self, name: &str, s: &str) -> CliResult<Scalar> {
        let v = Scalar::parse(s, self.working_precision()).map_err(|e| CliError::precondition(format!("--{name}: {e}")))?;
        Ok(match self.mode {
            ScalarMode::Rational => v,
            ScalarMode::Real(p) => v.into_real_mode(p),
        })
    }

    pub fn temperature(&self, name: &str, s: &str) -> CliResult<Temperature> {
        let t = Temperature::parse(s, self.working_precision()).map_err(|e| CliError::precondition(format!("--{name}: {e}")))?;
        match (self.mode, &t) {
            (ScalarMode::Real(p), Temperature::Finite(_) | Temperature::LogScale { .. }) => {
                let v = t.value().expect("finite").into_real_mode(p);
                Ok(Temperature::finite(v)?)
            }
            _ => Ok(t),
        }
    }

    /// Machines whose domain is exact rationals reject real literals.
    pub fn rational(&self, name: &str, s: &str) -> CliResult<BigRational> {
        match Scalar::parse(s, self.precision) {
            Ok(Scalar::Exact(r)) => Ok(r),
            Ok(_) => Err(CliError::precondition(format!("--{name} must be an exact rational, got `{s}`"))),
            Err(e) => Err(CliError::precondition(format!("--{name}: {e}"))),
        }
    }
}

/// Reads `--input`: inline JSON if it starts with `{`, stdin for `-`, else a path.
pub fn read_input(input: Option<&str>) -> CliResult<String> {
    let Some(src) = input else {
        return Err(CliError::precondition("this subcommand needs --input (a path, `-`, or inline JSON)"));
    };
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::precondition(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(src).map_err(|e| CliError::precondition(format!("reading {src}: {e}")))
}

pub fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::precondition(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // A closed downstream reader is not a failure of the run.
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Internal(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}
