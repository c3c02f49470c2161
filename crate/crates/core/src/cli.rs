//! The `depapprox` command line.
//!
//! Exit status: 0 success, 2 bad arguments or model spec, 3 every row was
//! skipped on preconditions, 4 resource or numerical failure, 5 an
//! inequality was violated.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::approximants::{make_approximant, ApproxParams, Approximant, ApproximantKind, DEFAULT_TRUNCATION};
use crate::charfn::BergstromBase;
use crate::cumulants::{gamma_set, CumulantSet};
use crate::error::{arg, Error, Result};
use crate::measure::NormKind;
use crate::models::{DependentModel, ModelSpec};
use crate::verify::{
    bergstrom_report, default_sharp_grid, distance_table, sharp_constant_run, smoothing_check, ExperimentReport,
    ModelFamily, SharpExperiment, SmoothingGrid, SmoothingLemma,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_SKIPPED: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "depapprox", version, about = "Approximations for sums of 1-dependent lattice variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ModelArg {
    /// Model spec as inline JSON, or a path to a JSON file.
    #[arg(long)]
    pub model: String,
}

#[derive(Debug, clap::Args)]
pub struct OutArg {
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact law of S_n as CSV `k,probability`.
    Dist {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Approximant weights and parameters as JSON.
    Approx {
        #[command(flatten)]
        model: ModelArg,
        /// Comma-separated kinds: pois, g, pois+, g+, tp, nb, nb+, bi, bi+.
        #[arg(long, default_value = "pois,g")]
        kinds: String,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Factorial cumulants, λ, remainders and condition flags as JSON.
    Cumulants {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Normalized distance toward a sharp constant.
    Sharp {
        /// nb_2runs_tv, nb_2runs_local, bi_k1k2_tv or bi_k1k2_local.
        #[arg(long)]
        experiment: String,
        /// Instances as `n:p,n:p,…`; defaults to the experiment's grid.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Smoothing-inequality checks.
    Smoothing {
        /// a10 or sharpC.
        #[arg(long, default_value = "a10")]
        lemma: String,
        /// Override the t-grid as `t,t,…`.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Bergström expansion remainders for s = 0..=order.
    Bergstrom {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// pois or g.
        #[arg(long, default_value = "pois")]
        base: String,
        /// Values of n as `n,n,…`; defaults to the model's n.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value = "tv")]
        norm: String,
        /// Factorization depth; default min(n, 64), or 40 when n > 2048.
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Distance table and log-log slopes across n.
    Rates {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value = "pois,g,g+")]
        kinds: String,
        /// Values of n as `n,n,…`.
        #[arg(long)]
        grid: String,
        #[arg(long, default_value = "tv")]
        norm: String,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

fn parse_model(s: &str) -> Result<ModelSpec> {
    let text = if s.trim_start().starts_with('{') { s.to_string() } else { std::fs::read_to_string(s)? };
    ModelSpec::from_json(&text)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| Error::Argument(format!("bad {what} `{x}`"))))
        .collect()
}

fn parse_kinds(s: &str) -> Result<Vec<ApproximantKind>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::parse).collect()
}

fn parse_sharp_grid(s: &str) -> Result<Vec<(usize, f64)>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|pair| {
            let (n, p) = pair.split_once(':').ok_or_else(|| Error::Argument(format!("expected n:p, got `{pair}`")))?;
            let n = n.parse().map_err(|_| Error::Argument(format!("bad n `{n}`")))?;
            let p = p.parse().map_err(|_| Error::Argument(format!("bad p `{p}`")))?;
            Ok((n, p))
        })
        .collect()
}

fn spec_n(spec: &ModelSpec) -> Option<usize> {
    match spec {
        ModelSpec::TwoRuns { n, .. } | ModelSpec::K1k2 { n, .. } => Some(*n),
        ModelSpec::Independent { n, pmfs, .. } => n.or(pmfs.as_ref().map(Vec::len)),
        ModelSpec::Grouped { .. } => None,
    }
}

#[derive(Serialize)]
struct ApproxOut {
    kind: ApproximantKind,
    params: ApproxParams,
    truncation_mass: f64,
    offset: i64,
    weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

impl ApproxOut {
    fn new(a: Approximant, warning: Option<String>) -> Self {
        ApproxOut {
            kind: a.kind,
            params: a.params,
            truncation_mass: a.truncation_mass,
            offset: a.measure.offset(),
            weights: a.measure.weights().to_vec(),
            warning,
        }
    }
}

#[derive(Serialize)]
struct CumulantsOut<'a> {
    model: &'a ModelSpec,
    cumulants: CumulantSet,
}

/// What a command produced and which exit status it implies.
struct Output {
    text: String,
    status: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, status: EXIT_OK }
    }

    fn report(rep: &ExperimentReport) -> Self {
        let status = if !rep.violations.is_empty() {
            EXIT_VIOLATION
        } else if rep.only_skips() {
            EXIT_SKIPPED
        } else {
            EXIT_OK
        };
        Output { text: rep.to_csv(), status }
    }
}

fn execute(cmd: Command) -> Result<(Output, Option<PathBuf>)> {
    Ok(match cmd {
        Command::Dist { model, out } => {
            let m = DependentModel::build(&parse_model(&model.model)?)?;
            let d = m.exact_distribution()?;
            let mut text = String::from("k,probability\n");
            for (k, w) in d.iter() {
                text.push_str(&format!("{k},{w:.11e}\n"));
            }
            (Output::ok(text), out.out)
        }
        Command::Approx { model, kinds, tol, out } => {
            let m = DependentModel::build(&parse_model(&model.model)?)?;
            let c = gamma_set(&m)?;
            let mut list = Vec::new();
            for kind in parse_kinds(&kinds)? {
                match make_approximant(kind, &c, tol) {
                    Ok(a) => list.push(ApproxOut::new(a, None)),
                    Err(Error::Degenerate(msg)) => {
                        let a = make_approximant(ApproximantKind::Pois, &c, tol)?;
                        list.push(ApproxOut::new(a, Some(format!("{kind}: {msg}; fell back to pois"))));
                    }
                    Err(e) => return Err(e),
                }
            }
            (Output::ok(serde_json::to_string_pretty(&list)? + "\n"), out.out)
        }
        Command::Cumulants { model, out } => {
            let spec = parse_model(&model.model)?;
            let c = gamma_set(&DependentModel::build(&spec)?)?;
            (Output::ok(serde_json::to_string_pretty(&CumulantsOut { model: &spec, cumulants: c })? + "\n"), out.out)
        }
        Command::Sharp { experiment, grid, tol, out } => {
            let exp: SharpExperiment = experiment.parse()?;
            let grid = match grid {
                Some(g) => parse_sharp_grid(&g)?,
                None => default_sharp_grid(exp),
            };
            (Output::report(&sharp_constant_run(exp, &grid, tol)?), out.out)
        }
        Command::Smoothing { lemma, grid, out } => {
            let lemma: SmoothingLemma = lemma.parse()?;
            let mut g = match lemma {
                SmoothingLemma::A10 => SmoothingGrid::a10_default(),
                SmoothingLemma::SharpC => SmoothingGrid::sharp_default(),
            };
            if let Some(ts) = grid {
                g.ts = parse_list(&ts, "t")?;
            }
            (Output::report(&smoothing_check(lemma, &g)?), out.out)
        }
        Command::Bergstrom { model, order, base, grid, norm, depth, out } => {
            let spec = parse_model(&model.model)?;
            let family = ModelFamily::from_spec(&spec)?;
            let ns = match grid {
                Some(g) => parse_list(&g, "n")?,
                None => vec![spec_n(&spec).ok_or_else(|| Error::Argument("model has no n".into()))?],
            };
            let base: BergstromBase = base.parse()?;
            let norm: NormKind = norm.parse()?;
            (Output::report(&bergstrom_report(&family, &ns, order, base, norm, depth)?), out.out)
        }
        Command::Rates { model, kinds, grid, norm, tol, out } => {
            let family = ModelFamily::from_spec(&parse_model(&model.model)?)?;
            let ns: Vec<usize> = parse_list(&grid, "n")?;
            if ns.is_empty() {
                return arg("empty n grid");
            }
            let norm: NormKind = norm.parse()?;
            (Output::report(&distance_table(&family, &ns, &parse_kinds(&kinds)?, norm, tol)), out.out)
        }
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) | Error::Json(_) | Error::Degenerate(_) => EXIT_ARGUMENT,
        Error::Precondition(_) => EXIT_SKIPPED,
        Error::Resource(_) | Error::Numerical(_) | Error::Io(_) => EXIT_RESOURCE,
    }
}

/// Runs the CLI on `args` (program name first), writing results to `stdout`
/// and diagnostics to `stderr`. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGUMENT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, &out.text),
                None => stdout.write_all(out.text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_RESOURCE;
            }
            match out.status {
                EXIT_VIOLATION => {
                    let _ = writeln!(stderr, "inequality violations found");
                }
                EXIT_SKIPPED => {
                    let _ = writeln!(stderr, "every row was skipped on preconditions");
                }
                _ => {}
            }
            out.status
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
