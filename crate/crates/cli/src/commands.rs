//! Subcommands and their arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use opaz::gram::{first_order_zero, optimal_approximants};
use opaz::jacobi::{self, extremal_coeffs, norm_estimate_with_cap, point_spectrum_above_2};
use opaz::jentzsch::{jentzsch_sweep, multi_zero_example, DEFAULT_CUTOFF};
use opaz::{closedform, Weights};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::output::{Cell, Format, Report};
use crate::spec::{Degrees, FunctionSpec, RealList, SpaceSpec};
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "opaz", version, about = "Optimal polynomial approximants in weighted Hardy spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format (csv by default, json for verify).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Operator norm of the Jacobi matrix and the minimal zero modulus.
    Norm(NormArgs),
    /// Half-norm estimates against the Dirichlet bounds over an alpha grid.
    Figure1(Figure1Args),
    /// Optimal approximant coefficients, roots and residuals.
    Approximant(ApproximantArgs),
    /// Eigenvalues of the Jacobi operator above 2.
    Spectrum(SpectrumArgs),
    /// Coefficients of the extremal function.
    Extremal(ExtremalArgs),
    /// Zero statistics of approximants over a degree sweep.
    Jentzsch(JentzschArgs),
    /// Approximants with r zeros inside the disk.
    Multizero(MultiZeroArgs),
    /// Run an acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NormArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub space: SpaceSpec,
    /// Stop doubling when successive truncated norms differ by less than this.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest truncation size.
    #[arg(long, default_value_t = jacobi::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Figure1Args {
    /// Dirichlet parameters, as a list or an integer range such as 0..-12.
    #[arg(long, default_value = "0..-12", allow_hyphen_values = true)]
    pub alphas: RealList,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FunctionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub space: SpaceSpec,
    #[arg(long)]
    pub function: FunctionSpec,
    /// Truncation degree for infinite series (automatic when omitted).
    #[arg(long)]
    pub terms: Option<usize>,
    /// Tail target for the automatic truncation.
    #[arg(long, default_value_t = 1e-10)]
    pub tail_tol: f64,
    #[arg(long, conflicts_with = "degrees")]
    pub degree: Option<usize>,
    /// Degrees as a..b or a comma list.
    #[arg(long)]
    pub degrees: Option<Degrees>,
}

impl FunctionArgs {
    fn degree_list(&self) -> CliResult<Vec<usize>> {
        match (&self.degree, &self.degrees) {
            (Some(n), None) => Ok(vec![*n]),
            (None, Some(d)) => Ok(d.0.clone()),
            _ => Err(CliError::BadInput("give one of --degree or --degrees".into())),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ApproximantArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FunctionArgs,
    /// Root-finding tolerance on the normalized residual.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub space: SpaceSpec,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Report at most this many eigenvalues.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtremalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub space: SpaceSpec,
    /// Highest coefficient index.
    #[arg(long, default_value_t = 64)]
    pub terms: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Compare with the closed form (Bergman spaces only).
    #[arg(long)]
    pub closed_form: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct JentzschArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: FunctionArgs,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MultiZeroArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub space: SpaceSpec,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Values of r.
    #[arg(long, default_value = "2,3,5")]
    pub r: Degrees,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Suite name, or "all".
    pub suite: String,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm(_) => "norm",
            Command::Figure1(_) => "figure1",
            Command::Approximant(_) => "approximant",
            Command::Spectrum(_) => "spectrum",
            Command::Extremal(_) => "extremal",
            Command::Jentzsch(_) => "jentzsch",
            Command::Multizero(_) => "multizero",
            Command::Verify(_) => "verify",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Verify(_) => Format::Json,
            _ => Format::Csv,
        }
    }

    pub fn run(&self) -> CliResult<Report> {
        let config = serde_json::to_value(self).expect("arguments serialize");
        match self {
            Command::Norm(a) => cmd_norm(a, config),
            Command::Figure1(a) => cmd_figure1(a, config),
            Command::Approximant(a) => cmd_approximant(a, config),
            Command::Spectrum(a) => cmd_spectrum(a, config),
            Command::Extremal(a) => cmd_extremal(a, config),
            Command::Jentzsch(a) => cmd_jentzsch(a, config),
            Command::Multizero(a) => cmd_multizero(a, config),
            Command::Verify(a) => cmd_verify(a, config),
        }
    }
}

fn positive(x: f64, what: &str) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::BadInput(format!("{what} must be positive, got {x}")))
    }
}

const REGIME_ATTAINED: &str = "above_2_attained";
const REGIME_AT_MOST_2: &str = "at_most_2_not_attained";

fn regime(norm: f64) -> &'static str {
    if norm > 2.0 + jacobi::DEFAULT_MARGIN {
        REGIME_ATTAINED
    } else {
        REGIME_AT_MOST_2
    }
}

pub fn cmd_norm(a: &NormArgs, config: Value) -> CliResult<Report> {
    positive(a.tol, "--tol")?;
    let omega = a.space.build()?;
    let est = norm_estimate_with_cap(&omega, a.tol, a.cap)?;
    let mut r = Report::new(
        "norm",
        config,
        &["space", "norm", "theta_sup", "min_zero_modulus", "size", "previous", "regime"],
    );
    r.row(vec![
        a.space.to_string().into(),
        est.value.into(),
        est.theta_sup().into(),
        (1.0 / est.theta_sup()).into(),
        est.size.into(),
        est.previous.into(),
        regime(est.value).into(),
    ]);
    Ok(r)
}

/// One row of the Dirichlet half-norm table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure1Row {
    pub alpha: f64,
    pub half_norm: f64,
    /// (2/3)^{α/2}.
    pub bound: f64,
    /// (3/2)^{α/2}.
    pub zero_free_radius: f64,
    pub min_zero_modulus: f64,
    pub size: usize,
    pub within_bound: bool,
}

pub fn figure1_rows(alphas: &[f64], tol: f64) -> CliResult<Vec<Figure1Row>> {
    positive(tol, "--tol")?;
    alphas
        .iter()
        .map(|&alpha| {
            let est = jacobi::norm_estimate(&Weights::dirichlet(alpha), tol)?;
            let (zero_free_radius, bound) = if alpha < 0.0 {
                let (rad, upper) = closedform::dirichlet_bounds(alpha)?;
                (rad, upper / 2.0)
            } else {
                (1.5f64.powf(alpha / 2.0), (2.0f64 / 3.0).powf(alpha / 2.0))
            };
            let half_norm = est.theta_sup();
            Ok(Figure1Row {
                alpha,
                half_norm,
                bound,
                zero_free_radius,
                min_zero_modulus: 1.0 / half_norm,
                size: est.size,
                within_bound: half_norm <= bound,
            })
        })
        .collect()
}

pub fn cmd_figure1(a: &Figure1Args, config: Value) -> CliResult<Report> {
    let rows = figure1_rows(&a.alphas.0, a.tol)?;
    let mut r = Report::new(
        "figure1",
        config,
        &["alpha", "half_norm", "bound", "zero_free_radius", "min_zero_modulus", "size", "within_bound"],
    );
    for x in rows {
        r.row(vec![
            x.alpha.into(),
            x.half_norm.into(),
            x.bound.into(),
            x.zero_free_radius.into(),
            x.min_zero_modulus.into(),
            x.size.into(),
            x.within_bound.into(),
        ]);
    }
    Ok(r)
}

fn tail_cell(f: &opaz::Series) -> Cell {
    if f.is_exact() {
        Cell::Float(0.0)
    } else {
        f.tail_bound().map_or(Cell::Text("untrusted".into()), Cell::Float)
    }
}

pub fn cmd_approximant(a: &ApproximantArgs, config: Value) -> CliResult<Report> {
    positive(a.tol, "--tol")?;
    let degrees = a.input.degree_list()?;
    let omega = a.input.space.build()?;
    let f = a.input.function.build(a.input.terms, a.input.tail_tol)?;
    let top = degrees.iter().copied().max().unwrap_or(0);
    let all = optimal_approximants(&f, &omega, top)?;
    let mut r = Report::new(
        "approximant",
        config,
        &[
            "degree",
            "k",
            "coeff_re",
            "coeff_im",
            "root_re",
            "root_im",
            "root_modulus",
            "residual_norm",
            "direct_residual",
            "gram_error_bound",
            "tail_trusted",
            "root_max_residual",
        ],
    );
    r.summary("terms", f.len());
    r.summary("f_tail_bound", tail_cell(&f));
    for &d in &degrees {
        let p = all[d].clone()?.with_roots(a.tol)?;
        let roots: Vec<Complex64> = p.roots.as_ref().map_or(Vec::new(), |s| s.roots.clone());
        for (k, c) in p.coeffs.iter().enumerate() {
            let z = roots.get(k);
            let first = k == 0;
            let only = |x: Cell| if first { x } else { Cell::Empty };
            r.row(vec![
                d.into(),
                k.into(),
                c.re.into(),
                c.im.into(),
                z.map(|z| z.re).into(),
                z.map(|z| z.im).into(),
                z.map(|z| z.norm()).into(),
                only(p.residual_norm.into()),
                only(p.direct_residual.into()),
                only(p.gram_error_bound.into()),
                only(p.tail_trusted.into()),
                only(p.roots.as_ref().map(|s| s.max_residual).into()),
            ]);
        }
    }
    Ok(r)
}

pub fn cmd_spectrum(a: &SpectrumArgs, config: Value) -> CliResult<Report> {
    positive(a.tol, "--tol")?;
    let omega = a.space.build()?;
    let eig = point_spectrum_above_2(&omega, a.tol, a.count)?;
    let beta = match a.space {
        SpaceSpec::Bergman { beta } => Some(beta),
        _ => None,
    };
    let mut r = Report::new(
        "spectrum",
        config,
        &["index", "eigenvalue", "lambda_minus", "lambda_plus", "closed_form", "abs_error"],
    );
    r.summary("count", eig.len());
    for (m, &t) in eig.iter().enumerate() {
        let disc = (t * t - 4.0).max(0.0).sqrt();
        let exact = beta.map(|b| closedform::bergman_tm(b, m)).transpose()?.map(|e| e.t_m);
        r.row(vec![
            m.into(),
            t.into(),
            ((t - disc) / 2.0).into(),
            ((t + disc) / 2.0).into(),
            exact.into(),
            exact.map(|e| (e - t).abs()).into(),
        ]);
    }
    Ok(r)
}

pub fn cmd_extremal(a: &ExtremalArgs, config: Value) -> CliResult<Report> {
    positive(a.tol, "--tol")?;
    let omega = a.space.build()?;
    let closed = match (&a.space, a.closed_form) {
        (SpaceSpec::Bergman { beta }, true) => Some(closedform::bergman_extremal(*beta, a.terms)?),
        (_, true) => return Err(CliError::BadInput("--closed-form needs a bergman space".into())),
        _ => None,
    };
    let f = extremal_coeffs(&omega, a.terms, a.tol)?;
    let norm = jacobi::norm_estimate(&omega, a.tol)?;
    let mut cols = vec!["n", "coeff"];
    if closed.is_some() {
        cols.extend(["closed_form", "abs_diff"]);
    }
    let mut r = Report::new("extremal", config, &cols);
    r.summary("norm", norm.value);
    r.summary("size", norm.size);
    r.summary("tail_bound", tail_cell(&f));
    r.summary("predicted_zero_modulus", 2.0 / norm.value);
    r.summary("first_order_zero_modulus", first_order_zero(&f, &omega).zero().map(|z| z.norm()));
    for (n, c) in f.coeffs().iter().enumerate() {
        let mut row: Vec<Cell> = vec![n.into(), c.re.into()];
        if let Some(g) = &closed {
            let e = g.coeff(n).re;
            row.push(e.into());
            row.push((e - c.re).abs().into());
        }
        r.row(row);
    }
    Ok(r)
}

pub fn cmd_jentzsch(a: &JentzschArgs, config: Value) -> CliResult<Report> {
    positive(a.tol, "--tol")?;
    if a.eps.is_nan() || a.eps < 0.0 {
        return Err(CliError::BadInput(format!("--eps must be nonnegative, got {}", a.eps)));
    }
    let degrees = a.input.degree_list()?;
    let omega = a.input.space.build()?;
    let f = a.input.function.build(a.input.terms, a.input.tail_tol)?;
    let rows = jentzsch_sweep(&f, &omega, &degrees, a.eps, a.tol)?;
    let mut r = Report::new(
        "jentzsch",
        config,
        &[
            "degree",
            "tau_eps_fraction",
            "geo_mean_modulus",
            "angular_discrepancy",
            "count_in_unit_disk",
            "min_root_modulus",
            "residual_norm",
            "status",
        ],
    );
    r.summary("terms", f.len());
    r.summary("epsilon", a.eps);
    r.summary("cutoff_radius", DEFAULT_CUTOFF);
    for row in rows {
        let cells = match &row.stats {
            Some(s) => vec![
                row.degree.into(),
                s.tau_eps_fraction.into(),
                s.geo_mean_modulus.into(),
                s.angular_discrepancy.into(),
                s.count_in_unit_disk.into(),
                s.min_root_modulus.into(),
                row.residual_norm.into(),
                "ok".into(),
            ],
            None => vec![
                row.degree.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                row.residual_norm.into(),
                "constant approximant".into(),
            ],
        };
        r.row(cells);
    }
    Ok(r)
}

pub fn cmd_multizero(a: &MultiZeroArgs, config: Value) -> CliResult<Report> {
    positive(a.tol, "--tol")?;
    let omega = a.space.build()?;
    let mut r = Report::new(
        "multizero",
        config,
        &[
            "r",
            "condition_stated",
            "condition_exact",
            "weights_decreasing",
            "degenerate",
            "depends_only_on_z_r",
            "off_support",
            "predicted_modulus_pow_r",
            "root_count",
            "min_root_modulus",
            "max_root_modulus",
            "modulus_error",
            "gap_error",
            "roots_inside_disk",
        ],
    );
    for &rr in &a.r.0 {
        let rep = multi_zero_example(&omega, a.k, a.n, rr, a.tol)?.report;
        let moduli: Vec<f64> = rep.roots.iter().map(|z| z.norm()).collect();
        let lo = moduli.iter().copied().reduce(f64::min);
        let hi = moduli.iter().copied().reduce(f64::max);
        let fin = |x: f64| if x.is_finite() { Cell::Float(x) } else { Cell::Empty };
        r.row(vec![
            rr.into(),
            rep.condition_stated.into(),
            rep.condition_exact.into(),
            rep.weights_decreasing.into(),
            rep.degenerate.into(),
            rep.depends_only_on_z_r.into(),
            rep.off_support.into(),
            rep.predicted_modulus_pow_r.into(),
            rep.roots.len().into(),
            lo.into(),
            hi.into(),
            fin(rep.modulus_error),
            fin(rep.gap_error),
            rep.roots_inside_disk.into(),
        ]);
    }
    Ok(r)
}

pub fn cmd_verify(a: &VerifyArgs, config: Value) -> CliResult<Report> {
    let ids = verify::suite(&a.suite)?;
    let results: Vec<verify::CriterionResult> = ids.iter().map(|&id| verify::run_criterion(id)).collect();
    let mut r = Report::new(
        "verify",
        config,
        &["criterion", "name", "label", "measured", "relation", "reference", "tolerance", "passed"],
    );
    let passed = results.iter().all(|c| c.passed());
    r.summary("suite", a.suite.as_str());
    r.summary("criteria", results.len());
    for c in &results {
        if let Some(e) = &c.error {
            r.row(vec![
                c.id.into(),
                c.name.into(),
                format!("error: {e}").into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                false.into(),
            ]);
        }
        for k in &c.checks {
            r.row(vec![
                c.id.into(),
                c.name.into(),
                k.label.clone().into(),
                k.measured.into(),
                k.relation.symbol().into(),
                k.reference.into(),
                k.tolerance.into(),
                k.passed.into(),
            ]);
        }
    }
    r.detail = Some(serde_json::to_value(verify::rounded(&results)).expect("verdicts serialize"));
    r.passed = Some(passed);
    Ok(r)
}
