//! Argument parsing and dispatch for the `semireg` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use semireg::asymptotics::DensityModel;
use semireg::experiments::{self, DeletionMethod, RunOptions};
use semireg::generators::{integer_pairs, ModelParams, RsrParams, RsrbParams, SmallWorldParams};
use semireg::io;
use semireg::series::{self, ExtFloat, SystemKind};
use semireg::{spectra, BigRational, Error, Multigraph};

/// Exit code for runtime failures.
pub const EXIT_RUNTIME: i32 = 1;
/// Exit code for usage errors and invalid parameters.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "semireg", version, about = "Random semi-regular graphs and their algebraic connectivity")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Rsrb,
    Rsr,
    Regular,
    SmallWorld,
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// Random graph family.
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Lower degree (rsrb, rsr).
    #[arg(long)]
    d1: Option<u32>,
    /// Higher degree (rsrb, rsr).
    #[arg(long)]
    d2: Option<u32>,
    /// Degree (regular).
    #[arg(long)]
    d: Option<u32>,
    /// Fraction of degree-d2 vertices (rsr); decimal or fraction such as 1/3.
    #[arg(long)]
    p: Option<String>,
    /// Number of vertices; rsrb uses the nearest valid count.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Exact size of the degree-d1 part (rsrb); overrides --n.
    #[arg(long)]
    n1: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep multi-edges and loops instead of rewiring to a simple graph.
    #[arg(long)]
    keep_multi: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 80)]
    bins: usize,
}

#[derive(Debug, Clone, Args)]
struct OutArg {
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    Laplacian,
    Adjacency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableName {
    Rsrb,
    Rsr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    FullBfs,
    UnionFind,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Sample one graph and write it as an edge-list CSV.
    Gen {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        keep_multi: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Algebraic connectivity of a graph read from an edge-list CSV.
    Ac {
        #[arg(long = "in")]
        input: PathBuf,
        /// Vertex count, if isolated top-numbered vertices exist.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Full spectrum of a graph read from an edge-list CSV.
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MatrixKind::Laplacian)]
        matrix: MatrixKind,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Asymptotic algebraic connectivity of a model.
    Predict {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monte Carlo ensemble of algebraic connectivities.
    Mc {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Reproduce one of the two comparison tables.
    Table {
        #[arg(long, value_enum)]
        name: TableName,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Pooled adjacency spectra of bipartite samples against the limiting law.
    Density {
        #[arg(long)]
        d1: u32,
        #[arg(long)]
        d2: u32,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fraction of samples whose AC reaches the Ramanujan bound.
    Ramanujan {
        #[command(flatten)]
        model: ModelArgs,
        /// Threshold (default: d - 2 sqrt(d - 1) for the average degree d).
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Random edge deletions until the graph disconnects.
    Reliability {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Method::FullBfs)]
        method: Method,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Coefficients and growth rate of a generating-function system.
    Series {
        /// catalan, rsrb, rsrb-looped, rsr or small-world.
        #[arg(long, required_unless_present = "file")]
        system: Option<String>,
        #[arg(long, default_value_t = 0)]
        d1: u32,
        #[arg(long, default_value_t = 0)]
        d2: u32,
        #[arg(long)]
        p: Option<String>,
        /// Read the system from a file instead.
        #[arg(long = "file")]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 4000)]
        order: usize,
        /// Exact rational coefficients (slow at high order).
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
    /// Integer degree pairs with a given average degree.
    Pairs {
        /// Average degree (default: every d in 3..=8).
        #[arg(long)]
        d: Option<u32>,
        #[command(flatten)]
        out: OutArg,
    },
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum Command {
    Gen { model: ModelParams, seed: u64, simple: bool },
    Ac { input: PathBuf, n: Option<usize> },
    Spectrum { input: PathBuf, n: Option<usize>, matrix: MatrixKind },
    Predict { model: ModelParams, p_exact: Option<BigRational> },
    Mc { model: ModelParams, opts: RunOptions },
    Table { name: TableName, n: usize, format: Format, opts: RunOptions },
    Density { d1: u32, d2: u32, n: usize, opts: RunOptions },
    Ramanujan { model: ModelParams, threshold: Option<f64>, opts: RunOptions },
    Reliability { model: ModelParams, method: DeletionMethod, opts: RunOptions },
    Series { system: SeriesSource, order: usize, exact: bool, format: Format },
    Pairs { d: Option<u32> },
}

#[derive(Debug, Clone)]
pub enum SeriesSource {
    Builtin(SystemKind),
    File(PathBuf),
}

/// Errors from argument parsing; `code` is the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

fn usage_from(e: Error) -> CliError {
    CliError::usage(e.to_string())
}

fn need<T>(v: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("--{flag} is required for {model}")))
}

fn parse_p(p: Option<String>) -> Result<Option<BigRational>, CliError> {
    p.map(|s| series::parse_rational(&s).map_err(|_| CliError::usage(format!("--p: not a number: {s:?}"))))
        .transpose()
}

fn to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer().to_string(), r.denom().to_string());
    n.parse::<f64>().unwrap_or(f64::NAN) / d.parse::<f64>().unwrap_or(f64::NAN)
}

fn resolve_model(m: ModelArgs) -> Result<(ModelParams, Option<BigRational>), CliError> {
    let p = parse_p(m.p)?;
    let model = match m.model {
        ModelKind::Rsrb => {
            let (d1, d2) = (need(m.d1, "d1", "rsrb")?, need(m.d2, "d2", "rsrb")?);
            let params = match m.n1 {
                Some(n1) => RsrbParams::new(d1, d2, n1),
                None => RsrbParams::nearest(d1, d2, m.n),
            };
            ModelParams::Rsrb(params.map_err(usage_from)?)
        }
        ModelKind::Rsr => {
            let (d1, d2) = (need(m.d1, "d1", "rsr")?, need(m.d2, "d2", "rsr")?);
            let pv = need(p.as_ref(), "p", "rsr")?;
            ModelParams::Rsr(RsrParams::new(to_f64(pv), d1, d2, m.n).map_err(usage_from)?)
        }
        ModelKind::Regular => {
            let d = need(m.d, "d", "regular")?;
            if d == 0 || (m.n * d as usize) % 2 == 1 {
                return Err(CliError::usage(format!("regular graph needs n*d even and d >= 1, got n={}, d={d}", m.n)));
            }
            ModelParams::Regular { d, n: m.n }
        }
        ModelKind::SmallWorld => ModelParams::SmallWorld(SmallWorldParams::new(m.n).map_err(usage_from)?),
    };
    Ok((model, p))
}

fn resolve_run(r: RunArgs) -> Result<RunOptions, CliError> {
    if r.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    if r.bins == 0 {
        return Err(CliError::usage("--bins must be at least 1"));
    }
    Ok(RunOptions::new(r.trials, r.seed).simple(!r.keep_multi).jobs(r.jobs.unwrap_or(0)).bins(r.bins))
}

/// Parses `argv` (program name first). Help and version requests come back
/// as errors with code 0.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
        CliError { code, message: e.render().to_string() }
    })?;
    let (command, out) = match cli.command {
        Cmd::Gen { model, seed, keep_multi, out } => {
            (Command::Gen { model: resolve_model(model)?.0, seed, simple: !keep_multi }, out.out)
        }
        Cmd::Ac { input, n, out } => (Command::Ac { input, n }, out.out),
        Cmd::Spectrum { input, matrix, n, out } => (Command::Spectrum { input, n, matrix }, out.out),
        Cmd::Predict { model, out } => {
            let (model, p_exact) = resolve_model(model)?;
            (Command::Predict { model, p_exact }, out.out)
        }
        Cmd::Mc { model, run, out } => (Command::Mc { model: resolve_model(model)?.0, opts: resolve_run(run)? }, out.out),
        Cmd::Table { name, n, format, run, out } => (Command::Table { name, n, format, opts: resolve_run(run)? }, out.out),
        Cmd::Density { d1, d2, n, run, out } => {
            RsrbParams::nearest(d1, d2, n).map_err(usage_from)?;
            (Command::Density { d1, d2, n, opts: resolve_run(run)? }, out.out)
        }
        Cmd::Ramanujan { model, threshold, run, out } => {
            (Command::Ramanujan { model: resolve_model(model)?.0, threshold, opts: resolve_run(run)? }, out.out)
        }
        Cmd::Reliability { model, method, run, out } => {
            let method = match method {
                Method::FullBfs => DeletionMethod::FullBfs,
                Method::UnionFind => DeletionMethod::ReverseUnionFind,
            };
            (Command::Reliability { model: resolve_model(model)?.0, method, opts: resolve_run(run)? }, out.out)
        }
        Cmd::Series { system, d1, d2, p, file, order, exact, format, out } => {
            let source = match file {
                Some(path) => SeriesSource::File(path),
                None => {
                    let name = system.unwrap_or_default();
                    SeriesSource::Builtin(SystemKind::from_name(&name, d1, d2, parse_p(p)?).map_err(usage_from)?)
                }
            };
            if order < 2 {
                return Err(CliError::usage("--order must be at least 2"));
            }
            (Command::Series { system: source, order, exact, format }, out.out)
        }
        Cmd::Pairs { d, out } => (Command::Pairs { d }, out.out),
    };
    Ok(RunConfig { command, out })
}

fn read_text(path: &Path) -> semireg::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path, n: Option<usize>) -> semireg::Result<Multigraph> {
    io::read_edge_csv(&read_text(path)?, n)
}

fn json(v: &serde_json::Value) -> semireg::Result<String> {
    io::to_json(v)
}

fn to_value<T: serde::Serialize>(v: &T) -> semireg::Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

/// Report text plus an optional one-line note for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub note: Option<String>,
}

/// Runs a resolved command.
pub fn dispatch(cfg: &RunConfig) -> semireg::Result<Output> {
    if let Command::Series { system, order, exact, format } = &cfg.command {
        return series_report(system, *order, *exact, *format);
    }
    dispatch_text(&cfg.command).map(|text| Output { text, note: None })
}

fn dispatch_text(command: &Command) -> semireg::Result<String> {
    match command {
        Command::Gen { model, seed, simple } => {
            let g = experiments::sample_graph(model, *seed, 0, *simple)?;
            Ok(io::write_edge_csv(&g))
        }
        Command::Ac { input, n } => {
            let g = read_graph(input, *n)?;
            let ac = spectra::algebraic_connectivity(&g)?;
            json(&serde_json::json!({ "n": g.n(), "m": g.m(), "ac": ac, "connected": g.is_connected() }))
        }
        Command::Spectrum { input, n, matrix } => {
            let g = read_graph(input, *n)?;
            let s = match matrix {
                MatrixKind::Laplacian => spectra::laplacian_spectrum(&g)?,
                MatrixKind::Adjacency => spectra::adjacency_spectrum(&g)?,
            };
            Ok(io::write_spectrum_csv(&s.values))
        }
        Command::Predict { model, p_exact } => {
            let mu = match (model, p_exact) {
                (ModelParams::Rsr(r), Some(p)) => semireg::asymptotics::mu_rsr_exact(p, r.d1, r.d2)?,
                _ => model.mu_asymptotic()?,
            };
            let (radii, delta) = match model {
                ModelParams::Rsrb(r) => {
                    let law = DensityModel::new(r.d1, r.d2)?;
                    (Some(law.radii), Some(law.delta_weight))
                }
                _ => (None, None),
            };
            json(&serde_json::json!({
                "model": model.name(),
                "params": to_value(model)?,
                "mu_asymptotic": mu,
                "edge_radii": to_value(&radii)?,
                "delta_weight": delta,
            }))
        }
        Command::Mc { model, opts } => io::to_json(&experiments::run_ensemble(model, opts)?),
        Command::Table { name, n, format, opts } => {
            let t = match name {
                TableName::Rsrb => experiments::reproduce_rsrb_table(*n, opts)?,
                TableName::Rsr => experiments::reproduce_rsr_table(*n, opts)?,
            };
            match format {
                Format::Csv => Ok(t.to_csv()),
                Format::Json => io::to_json(&t),
            }
        }
        Command::Density { d1, d2, n, opts } => io::to_json(&experiments::density_check(*d1, *d2, *n, opts)?),
        Command::Ramanujan { model, threshold, opts } => {
            io::to_json(&experiments::ramanujan_fraction(model, *threshold, opts)?)
        }
        Command::Reliability { model, method, opts } => {
            io::to_json(&experiments::reliability_deletions(model, *method, opts)?)
        }
        Command::Series { .. } => unreachable!("handled in dispatch"),
        Command::Pairs { d } => {
            let ds: Vec<u32> = match d {
                Some(d) => vec![*d],
                None => (3..=8).collect(),
            };
            let mut s = String::from("d,d1,d2\n");
            for d in ds {
                for (d1, d2) in integer_pairs(d) {
                    s.push_str(&format!("{d},{d1},{d2}\n"));
                }
            }
            Ok(s)
        }
    }
}

fn series_report(source: &SeriesSource, order: usize, exact: bool, format: Format) -> semireg::Result<Output> {
    let sys = match source {
        SeriesSource::Builtin(kind) => series::builtin_system(kind)?,
        SeriesSource::File(path) => series::GfSystem::parse(&read_text(path)?)?,
    };
    let step = sys.default_step();
    let (values, growth, richardson) = if exact {
        let s = series::solve_output::<BigRational>(&sys, order);
        let vals = s.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>();
        (vals, series::growth_rate(&s, step).ok(), series::growth_rate_richardson(&s, step).ok())
    } else {
        let s = series::solve_output::<ExtFloat>(&sys, order);
        let vals = s.coeffs().iter().map(|c| c.to_decimal()).collect::<Vec<_>>();
        (vals, series::growth_rate(&s, step).ok(), series::growth_rate_richardson(&s, step).ok())
    };
    match format {
        Format::Csv => {
            let mut text = String::from("s,value\n");
            for (i, v) in values.iter().enumerate() {
                text.push_str(&format!("{i},{v}\n"));
            }
            let note = Some(match growth {
                Some(g) => format!("growth_rate={}", io::fmt_f64(g)),
                None => "growth_rate=unavailable".to_string(),
            });
            Ok(Output { text, note })
        }
        Format::Json => Ok(Output {
            note: None,
            text: json(&serde_json::json!({
            "system": sys.output_name(),
            "order": order,
            "step": step,
            "coefficients": values,
            "growth_rate": growth,
            "growth_rate_richardson": richardson,
            }))?,
        }),
    }
}

/// Parses, dispatches and writes output. Returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let sink: &mut dyn std::io::Write = if e.code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.message);
            if !e.message.ends_with('\n') {
                let _ = writeln!(sink);
            }
            return e.code;
        }
    };
    let Output { text, note } = match dispatch(&cfg) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_RUNTIME;
        }
    };
    if let Some(note) = note {
        let _ = writeln!(stderr, "{note}");
    }
    match &cfg.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                let _ = writeln!(stderr, "error: {}: {e}", path.display());
                return EXIT_RUNTIME;
            }
        }
        None => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_RUNTIME;
            }
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_args(std::iter::once("semireg").chain(args.iter().copied()))
    }

    #[test]
    fn run_defaults() {
        let cfg = parse(&["mc", "--model", "regular", "--d", "3"]).unwrap();
        let Command::Mc { model, opts } = cfg.command else { panic!("not mc") };
        assert_eq!(model, ModelParams::Regular { d: 3, n: 1000 });
        assert_eq!((opts.trials, opts.seed, opts.simple, opts.jobs, opts.bins), (200, 0, true, 0, 80));
        assert!(cfg.out.is_none());
    }

    #[test]
    fn rational_p_and_nearest_n() {
        let cfg = parse(&["predict", "--model", "rsr", "--d1", "3", "--d2", "6", "--p", "1/3"]).unwrap();
        let Command::Predict { model: ModelParams::Rsr(r), p_exact } = cfg.command else { panic!("not rsr") };
        assert_eq!(p_exact.unwrap().to_string(), "1/3");
        assert!((r.p - 1.0 / 3.0).abs() < 1e-16);
        let cfg = parse(&["gen", "--model", "rsrb", "--d1", "3", "--d2", "15", "--keep-multi"]).unwrap();
        let Command::Gen { model, simple, .. } = cfg.command else { panic!("not gen") };
        assert_eq!(model.n(), 1002);
        assert!(!simple);
    }

    #[test]
    fn usage_errors() {
        for args in [
            &["mc", "--model", "rsr", "--d1", "2", "--d2", "3"][..],
            &["mc", "--model", "regular", "--d", "3", "--n", "11"],
            &["mc", "--model", "small-world", "--n", "10"],
            &["mc", "--model", "regular", "--d", "3", "--trials", "0"],
            &["series"],
            &["series", "--system", "catalan", "--order", "1"],
        ] {
            assert_eq!(parse(args).unwrap_err().code, EXIT_USAGE, "{args:?}");
        }
        assert_eq!(parse(&["--version"]).unwrap_err().code, 0);
    }
}
