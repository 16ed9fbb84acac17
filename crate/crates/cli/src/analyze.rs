use std::fmt::Write as _;
use std::path::PathBuf;

use avoid1324::{asym_eval, AsymptoticParams};
use avoid1324_analysis::{
    amplitude_sequence, bs_tableau, fit_log_quad, fit_log_triple_mu, fit_ratio_triple,
    loglog_gradient, pair_extrapolate, parse_series, renormalize, scan, sigma_free,
    sigma_local_given_mu, AnalysisError, CoefficientSeries, DegreePolicy, FitResult, RealSeries,
};
use clap::{Args, ValueEnum};

use crate::csv::{read_input, sig12, write_output};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Ratios,
    Intercepts,
    Sigma,
    Fit3,
    Fit4,
    Fitlog3,
    Transform,
    Bs,
    Da,
    Amplitude,
    Asym,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    analysis: Analysis,
    /// Series file; standard input when absent or `-`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Differential approximant order.
    #[arg(long)]
    order: Option<usize>,
    /// Deepest tableau row, or largest inhomogeneous degree for `da`.
    #[arg(long)]
    lmax: Option<usize>,
    /// `B,mu,mu1,sigma,g`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<u64>,
    /// `da`: also fit the homogeneous equation.
    #[arg(long)]
    homogeneous: bool,
    /// `da`: number of coefficient counts tried per cell.
    #[arg(long)]
    span: Option<usize>,
    /// `da`: degree offsets between the highest and lowest polynomial.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    offsets: Option<Vec<i32>>,
    /// `transform`: print `c_n = ln d_n` instead of `d_n`.
    #[arg(long)]
    log: bool,
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str, analysis: Analysis) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{analysis:?} needs --{flag}").to_lowercase()))
}

fn params(args: &AnalyzeArgs) -> Result<AsymptoticParams, CliError> {
    let p = args
        .params
        .as_ref()
        .ok_or_else(|| CliError::Usage("--params B,mu,mu1,sigma,g is required".into()))?;
    if p.len() != 5 {
        return Err(CliError::Usage(format!(
            "--params needs 5 values, got {}",
            p.len()
        )));
    }
    Ok(AsymptoticParams::new(p[0], p[1], p[2], p[3], p[4]))
}

fn load(args: &AnalyzeArgs) -> Result<CoefficientSeries, CliError> {
    let text = read_input(args.input.as_deref())?;
    parse_series(&text).map_err(|e| CliError::Usage(format!("series input: {e}")))
}

fn series_csv(header: &str, series: &RealSeries) -> String {
    let mut out = format!("n,{header}\n");
    for (n, v) in series.iter() {
        let _ = writeln!(out, "{n},{}", sig12(v));
    }
    out
}

fn fit_csv(fit: &FitResult) -> String {
    let mut out = format!("k,{},residual\n", fit.basis.join(","));
    for w in &fit.windows {
        let coefs: Vec<String> = w.coefficients.iter().map(|&c| sig12(c)).collect();
        let _ = writeln!(out, "{},{},{}", w.top, coefs.join(","), sig12(w.residual));
    }
    out
}

pub fn run(args: AnalyzeArgs) -> Result<(), CliError> {
    let kind = args.analysis;
    let text = match kind {
        Analysis::Asym => {
            let n = require(args.n, "n", kind)?;
            let m = asym_eval(&params(&args)?, n).map_err(|e| CliError::Usage(e.to_string()))?;
            format!(
                "log10,mantissa,exponent\n{},{},{}\n",
                sig12(m.log10),
                sig12(m.mantissa),
                m.exponent
            )
        }
        Analysis::Ratios => series_csv("ratio", &load(&args)?.ratios()?),
        Analysis::Intercepts => {
            let t = args.t.unwrap_or(0.5);
            series_csv("intercept", &pair_extrapolate(&load(&args)?.ratios()?, t)?)
        }
        Analysis::Sigma => {
            let series = load(&args)?;
            match args.mu {
                Some(mu) => series_csv(
                    "one_minus_sigma",
                    &sigma_local_given_mu(&series.ratios()?, mu)?,
                ),
                None => series_csv("gradient", &loglog_gradient(&sigma_free(&series)?)?),
            }
        }
        Analysis::Fit3 => {
            let mu = require(args.mu, "mu", kind)?;
            fit_csv(&fit_ratio_triple(&load(&args)?.ratios()?, mu)?)
        }
        Analysis::Fit4 => fit_csv(&fit_log_quad(&load(&args)?)?),
        Analysis::Fitlog3 => {
            let mu = require(args.mu, "mu", kind)?;
            fit_csv(&fit_log_triple_mu(&load(&args)?, mu)?)
        }
        Analysis::Transform => {
            let renormalized = renormalize(&load(&args)?)?;
            let (header, values) = if args.log {
                ("log_value", renormalized.log_values)
            } else {
                match renormalized.values() {
                    Ok(v) => ("value", v),
                    Err(e) => {
                        eprintln!("warning: {e}; writing the log form");
                        ("log_value", renormalized.log_values)
                    }
                }
            };
            // shortest round-trip form so that piping loses nothing
            let mut out = format!("n,{header}\n");
            for (n, v) in values.iter() {
                let _ = writeln!(out, "{n},{v:?}");
            }
            out
        }
        Analysis::Bs => {
            let w = require(args.w, "w", kind)?;
            let ratios = load(&args)?.ratios()?;
            let tableau = bs_tableau(&ratios, w, args.lmax.unwrap_or(4))?;
            let mut out = String::from("L,n,value\n");
            for (level, row) in tableau.rows.iter().enumerate() {
                for (i, cell) in row.iter().enumerate() {
                    let value = cell.map_or_else(|| "invalid".to_string(), sig12);
                    let _ = writeln!(out, "{level},{},{value}", tableau.start + i);
                }
            }
            out
        }
        Analysis::Da => {
            let order = args.order.unwrap_or(3);
            let coeffs = load(&args)?.to_rationals()?;
            let mut cells: Vec<Option<usize>> = (0..=args.lmax.unwrap_or(10)).map(Some).collect();
            if args.homogeneous {
                cells.insert(0, None);
            }
            let defaults = DegreePolicy::default();
            let policy = DegreePolicy {
                span: args.span.unwrap_or(defaults.span),
                offsets: args.offsets.clone().unwrap_or(defaults.offsets),
            };
            let report = scan(&coeffs, order, &cells, &policy)?;
            let mut out =
                String::from("L,mean_xc,mean_rho,accepted,attempted,spread_xc,spread_rho\n");
            let cell_text = |v: Option<f64>| v.map_or_else(String::new, sig12);
            for cell in &report.cells {
                let label = cell
                    .inhomogeneous
                    .map_or("hom".to_string(), |l| l.to_string());
                let (root, exponent) = (cell.root(), cell.exponent());
                let _ = writeln!(
                    out,
                    "{label},{},{},{},{},{},{}",
                    cell_text(root.map(|s| s.mean)),
                    cell_text(exponent.map(|s| s.mean)),
                    cell.accepted.len(),
                    cell.attempted,
                    cell_text(root.map(|s| s.spread)),
                    cell_text(exponent.map(|s| s.spread)),
                );
            }
            if let Some((root, exponent)) = report.overall() {
                let _ = writeln!(
                    out,
                    "all,{},{},{},,{},{}",
                    sig12(root.mean),
                    sig12(exponent.mean),
                    report.cells.iter().map(|c| c.accepted.len()).sum::<usize>(),
                    sig12(root.spread),
                    sig12(exponent.spread)
                );
            }
            let canary = &report.canary;
            let _ = writeln!(
                out,
                "# canary: {} (root spread {}, median |rho| {})",
                if canary.fires {
                    "non-algebraic singularity suspected"
                } else {
                    "quiet"
                },
                sig12(canary.root_spread),
                sig12(canary.median_abs_exponent)
            );
            out
        }
        Analysis::Amplitude => {
            let b = amplitude_sequence(&load(&args)?, &params(&args)?)?;
            let ext = pair_extrapolate(&b, args.t.unwrap_or(1.0))?;
            let mut out = String::from("n,amplitude,extrapolated\n");
            for (n, v) in b.iter() {
                let e = ext.get(n).map_or_else(String::new, sig12);
                let _ = writeln!(out, "{n},{},{e}", sig12(v));
            }
            out
        }
    };
    write_output(None, &text)
}
