//! Parsing of the space, function and degree arguments.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use opaz::series::{binomial_series, cayley_witness, BinomialSign, CoeffSeries};
use opaz::{closedform, Series, Weights};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Smallest automatic truncation tried for infinite series.
const AUTO_TERMS_START: usize = 64;
/// Largest automatic truncation.
const AUTO_TERMS_CAP: usize = 1 << 20;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::BadInput(msg.into())
}

fn parse_f64(text: &str, what: &str) -> CliResult<f64> {
    let v: f64 = text.trim().parse().map_err(|_| bad(format!("{what}: cannot parse '{text}' as a number")))?;
    if !v.is_finite() {
        return Err(bad(format!("{what}: '{text}' is not finite")));
    }
    Ok(v)
}

fn parse_usize(text: &str, what: &str) -> CliResult<usize> {
    text.trim().parse().map_err(|_| bad(format!("{what}: cannot parse '{text}' as a nonnegative integer")))
}

/// `hardy`, `dirichlet:<alpha>`, `bergman:<beta>` or `custom:<file>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceSpec {
    Hardy,
    Dirichlet { alpha: f64 },
    Bergman { beta: f64 },
    Custom { path: PathBuf },
}

impl FromStr for SpaceSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head.trim(), arg) {
            ("hardy", None) => Ok(SpaceSpec::Hardy),
            ("dirichlet", Some(a)) => Ok(SpaceSpec::Dirichlet { alpha: parse_f64(a, "dirichlet alpha")? }),
            ("bergman", Some(b)) => {
                let beta = parse_f64(b, "bergman beta")?;
                if beta <= -1.0 {
                    return Err(bad(format!("bergman beta must exceed -1, got {beta}")));
                }
                Ok(SpaceSpec::Bergman { beta })
            }
            ("custom", Some(p)) if !p.is_empty() => Ok(SpaceSpec::Custom { path: PathBuf::from(p) }),
            _ => Err(bad(format!(
                "unknown space '{s}'; expected hardy, dirichlet:<alpha>, bergman:<beta> or custom:<file>"
            ))),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Hardy => write!(f, "hardy"),
            SpaceSpec::Dirichlet { alpha } => write!(f, "dirichlet:{alpha}"),
            SpaceSpec::Bergman { beta } => write!(f, "bergman:{beta}"),
            SpaceSpec::Custom { path } => write!(f, "custom:{}", path.display()),
        }
    }
}

impl SpaceSpec {
    pub fn build(&self) -> CliResult<Weights> {
        Ok(match self {
            SpaceSpec::Hardy => Weights::hardy(),
            SpaceSpec::Dirichlet { alpha } => Weights::dirichlet(*alpha),
            SpaceSpec::Bergman { beta } => Weights::bergman(*beta)?,
            SpaceSpec::Custom { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                Weights::from_json_str(&text)?
            }
        })
    }
}

/// Named test functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// 1 − z.
    OneMinusZ,
    /// (1 − z)^a.
    OneMinusZPow { re: f64, im: f64 },
    /// z^k T_n((1+z)/(1−z)).
    Cayley { k: usize, n: usize },
    /// (1 − z/√(β+2))^{−(β+3)}.
    BergmanExtremal { beta: f64 },
    /// A CoeffSeries JSON document.
    Coeffs { path: PathBuf },
}

impl FromStr for FunctionSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head.trim(), arg) {
            ("one_minus_z", None) => Ok(FunctionSpec::OneMinusZ),
            ("one_minus_z_pow", Some(a)) => {
                let (re, im) = match a.split_once(',') {
                    Some((r, i)) => (parse_f64(r, "exponent")?, parse_f64(i, "exponent")?),
                    None => (parse_f64(a, "exponent")?, 0.0),
                };
                if re <= 0.0 {
                    return Err(bad(format!("one_minus_z_pow needs Re a > 0, got {re}")));
                }
                Ok(FunctionSpec::OneMinusZPow { re, im })
            }
            ("cayley", Some(a)) => {
                let (k, n) = a.split_once(',').ok_or_else(|| bad("cayley expects cayley:<k>,<n>"))?;
                let n = parse_usize(n, "cayley n")?;
                if n == 0 {
                    return Err(bad("cayley n must be at least 1"));
                }
                Ok(FunctionSpec::Cayley { k: parse_usize(k, "cayley k")?, n })
            }
            ("bergman_extremal", Some(b)) => {
                let beta = parse_f64(b, "bergman_extremal beta")?;
                if beta <= -1.0 {
                    return Err(bad(format!("bergman_extremal beta must exceed -1, got {beta}")));
                }
                Ok(FunctionSpec::BergmanExtremal { beta })
            }
            ("coeffs", Some(p)) if !p.is_empty() => Ok(FunctionSpec::Coeffs { path: PathBuf::from(p) }),
            _ => Err(bad(format!(
                "unknown function '{s}'; expected one_minus_z, one_minus_z_pow:<a>[,<im>], cayley:<k>,<n>, \
                 bergman_extremal:<beta> or coeffs:<file>"
            ))),
        }
    }
}

impl FunctionSpec {
    /// Builds the series. Infinite series use `terms` coefficients, or the
    /// smallest power of two whose tail bound is below `tail_tol`.
    pub fn build(&self, terms: Option<usize>, tail_tol: f64) -> CliResult<Series> {
        match self {
            FunctionSpec::OneMinusZ => Ok(CoeffSeries::real_polynomial(&[1.0, -1.0])),
            FunctionSpec::Cayley { k, n } => Ok(cayley_witness(*k, *n)),
            FunctionSpec::Coeffs { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
            }
            FunctionSpec::OneMinusZPow { re, im } => {
                let a = Complex64::new(*re, *im);
                with_terms(terms, tail_tol, |n| Ok(binomial_series(a, BinomialSign::Plus, n)?))
            }
            FunctionSpec::BergmanExtremal { beta } => {
                with_terms(terms, tail_tol, |n| Ok(closedform::bergman_extremal(*beta, n)?))
            }
        }
    }
}

fn with_terms(terms: Option<usize>, tail_tol: f64, make: impl Fn(usize) -> CliResult<Series>) -> CliResult<Series> {
    if let Some(n) = terms {
        return make(n);
    }
    let mut n = AUTO_TERMS_START;
    loop {
        let s = make(n)?;
        if s.is_exact() || s.tail_bound().is_some_and(|b| b < tail_tol) || n >= AUTO_TERMS_CAP {
            return Ok(s);
        }
        n *= 2;
    }
}

/// Degree list: `n`, `a..b` (inclusive) or `a,b,c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Degrees(pub Vec<usize>);

impl FromStr for Degrees {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (parse_usize(a, "degree range")?, parse_usize(b.trim_start_matches('='), "degree range")?);
            if a > b {
                return Err(bad(format!("empty degree range {s}")));
            }
            return Ok(Degrees((a..=b).collect()));
        }
        let v = s.split(',').map(|x| parse_usize(x, "degree")).collect::<CliResult<Vec<_>>>()?;
        Ok(Degrees(v))
    }
}

/// Real-valued list: `x`, `a..b` (integer steps of ±1, inclusive) or `x,y,z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        if let Some((a, b)) = s.split_once("..") {
            let a: i64 = a.trim().parse().map_err(|_| bad(format!("bad range start in '{s}'")))?;
            let b: i64 = b.trim().parse().map_err(|_| bad(format!("bad range end in '{s}'")))?;
            let v: Vec<f64> = if a <= b { (a..=b).map(|x| x as f64).collect() } else { (b..=a).rev().map(|x| x as f64).collect() };
            return Ok(RealList(v));
        }
        Ok(RealList(s.split(',').map(|x| parse_f64(x, "list entry")).collect::<CliResult<_>>()?))
    }
}
