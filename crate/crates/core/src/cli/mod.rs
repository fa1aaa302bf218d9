//! Command-line front end (`gen`, `verify`, `solve`, `bench`, `plot`).

mod instance_file;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, ExperimentConfig, BUILTIN_EXPERIMENTS};
use crate::certgen::{self, ConstructError, MethodChoice};
use crate::ensembles::{self, EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use crate::solvers::{self, SolveStatus, SolverConfig, SolverKind, SolverMethod};

pub use instance_file::{load_instance, save_instance, InstanceFile, LoadError, FORMAT_VERSION, TAMPER_FACTOR};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

/// `verify` succeeds iff the optimality residual is at most this.
pub const VERIFY_TOL: f64 = 1e-8;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  bad flags, unknown experiment, or I/O failure
  2  sign pattern could not be certified (gen)
  3  instance file could not be parsed
  4  optimality residual too large, or file tampered with
  5  solver stopped at --max-iter without converging (solve)";

#[derive(Parser, Debug)]
#[command(
    name = "bpdn-testgen",
    version,
    about = "Basis pursuit denoising instances with exactly known minimizers",
    after_help = EXIT_CODES
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a certified instance and write it as JSON.
    Gen(GenArgs),
    /// Recheck the optimality of a stored instance.
    Verify(VerifyArgs),
    /// Run one solver on a stored instance.
    Solve(SolveArgs),
    /// Run a benchmark experiment and write CSVs and SVG plots.
    Bench(BenchArgs),
    /// Render convergence plots from a trace CSV.
    Plot(PlotArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EnsembleArg {
    Dct,
    Bernoulli,
    Threebases,
    Banded,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Pocs,
    Qp,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SolverArg {
    Ista,
    Fista,
    Gpsr,
    Admm,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    ensemble: EnsembleArg,
    /// Number of variables (columns of A).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Number of measurements (rows of A); defaults to n for banded matrices.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    sparsity: u64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bandwidth of the banded ensemble.
    #[arg(long = "K", value_parser = clap::value_parser!(u64).range(1..))]
    bandwidth: Option<u64>,
    /// Dynamic range Θ of the solution (log-uniform magnitudes in [1, Θ]).
    #[arg(long, conflicts_with = "unit_magnitudes")]
    dynrange: Option<f64>,
    /// Use ±1 solution entries.
    #[arg(long)]
    unit_magnitudes: bool,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    path: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    path: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverArg,
    #[arg(long, default_value_t = solvers::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = solvers::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// ADMM penalty parameter.
    #[arg(long)]
    rho: Option<f64>,
    /// ISTA λ-continuation factor in (0, 1).
    #[arg(long)]
    continuation: Option<f64>,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Built-in experiment: lambda, sparsity, dynrange or coherence.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    experiment: Option<String>,
    /// JSON experiment description.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Seeds to run, e.g. `1,2,3` or `1-10`; overrides the configuration.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<SeedList>,
    /// Use the original study's dimensions for built-in experiments.
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Output directory for the SVG files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u64 = lo.trim().parse().map_err(|e| format!("{part}: {e}"))?;
                let hi: u64 = hi.trim().parse().map_err(|e| format!("{part}: {e}"))?;
                if lo > hi {
                    return Err(format!("empty seed range {part}"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|e| format!("{part}: {e}"))?),
        }
    }
    if out.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(SeedList(out))
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn cmd_gen(a: GenArgs) -> i32 {
    let n = a.n as usize;
    let kind = match a.ensemble {
        EnsembleArg::Dct => EnsembleKind::PartialDct,
        EnsembleArg::Bernoulli => EnsembleKind::Bernoulli,
        EnsembleArg::Threebases => EnsembleKind::ThreeBasesUnion,
        EnsembleArg::Banded => match a.bandwidth {
            Some(bw) => EnsembleKind::BandedCoherent { bandwidth: bw as usize },
            None => return fail(EXIT_USAGE, "--ensemble banded requires --K"),
        },
    };
    let k = match (a.k, kind) {
        (Some(k), _) => k as usize,
        (None, EnsembleKind::BandedCoherent { .. }) => n,
        (None, _) => return fail(EXIT_USAGE, "--k is required for this ensemble"),
    };
    if !(a.lambda > 0.0 && a.lambda.is_finite()) {
        return fail(EXIT_USAGE, format!("--lambda must be positive, got {}", a.lambda));
    }
    let law = match (a.dynrange, a.unit_magnitudes) {
        (Some(theta), _) => MagnitudeLaw::LogUniformDynamicRange { theta },
        (None, true) => MagnitudeLaw::Unit,
        (None, false) => MagnitudeLaw::Gaussian,
    };
    let ensemble = EnsembleSpec::new(kind, n, k, a.seed);
    let solution = SolutionSpec::new(a.sparsity as usize, law, a.seed);
    if let Err(e) = ensemble.validate().and_then(|_| solution.validate(n)) {
        return fail(EXIT_USAGE, e);
    }
    let method = match a.method {
        MethodArg::Pocs => MethodChoice::Pocs,
        MethodArg::Qp => MethodChoice::QuadProg,
        MethodArg::Auto => MethodChoice::Auto,
    };
    let inst = match certgen::construct(&ensemble, &solution, a.lambda, method) {
        Ok(inst) => inst,
        Err(ConstructError::Certification(e)) => return fail(EXIT_INFEASIBLE, e),
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let mu = ensembles::coherence(&inst.a).ok();
    let file = InstanceFile::from_instance(&inst, mu);
    if let Err(e) = save_instance(&file, &a.out) {
        return fail(EXIT_USAGE, format!("{}: {e}", a.out.display()));
    }
    println!(
        "wrote {} (n = {}, k = {}, s = {}, method = {:?}, certificate iterations = {}, optimality residual = {:e})",
        a.out.display(),
        file.n,
        file.k,
        inst.pattern.active().len(),
        file.method,
        file.certificate_iterations,
        file.optimality_residual
    );
    EXIT_OK
}

fn load_or_exit(path: &std::path::Path) -> Result<(InstanceFile, certgen::Instance), i32> {
    load_instance(path).map_err(|e| match e {
        LoadError::Io { .. } | LoadError::Parse { .. } | LoadError::Invalid { .. } => fail(EXIT_PARSE, e),
        LoadError::Tampered { .. } => fail(EXIT_VIOLATION, e),
    })
}

fn cmd_verify(a: VerifyArgs) -> i32 {
    let (file, inst) = match load_or_exit(&a.path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let residual = inst.optimality_residual;
    let (sigma, tau) = certgen::equivalent_parameters(&inst);
    println!("optimality_residual = {residual:e}");
    println!("range_residual      = {:e}", file.range_residual);
    println!("sign_residual       = {:e}", file.sign_residual);
    println!("sigma_equiv         = {sigma}");
    println!("tau_equiv           = {tau}");
    if residual <= VERIFY_TOL {
        println!("OK");
        EXIT_OK
    } else {
        fail(EXIT_VIOLATION, format!("optimality residual {residual:e} exceeds {VERIFY_TOL:e}"))
    }
}

fn cmd_solve(a: SolveArgs) -> i32 {
    let (_, inst) = match load_or_exit(&a.path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let kind = match a.solver {
        SolverArg::Ista => SolverKind::Ista,
        SolverArg::Fista => SolverKind::Fista,
        SolverArg::Gpsr => SolverKind::Gpsr,
        SolverArg::Admm => SolverKind::Admm,
    };
    let mut method = SolverMethod::default_for(kind);
    match &mut method {
        SolverMethod::Admm { rho } => *rho = a.rho.unwrap_or(*rho),
        SolverMethod::Ista { continuation } => *continuation = a.continuation.or(*continuation),
        _ => {}
    }
    let cfg = SolverConfig::new(method, a.tol, a.max_iter);
    if let Err(e) = cfg.validate() {
        return fail(EXIT_USAGE, e);
    }
    let (_, trace) = match solvers::solve(&inst, &cfg) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_NOT_CONVERGED, e),
    };
    if let Some(path) = &a.trace {
        let id = a.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let written = std::fs::File::create(path)
            .map_err(csv::Error::from)
            .and_then(|f| bench::write_traces(std::io::BufWriter::new(f), &[("solve", &id, &trace)]));
        if let Err(e) = written {
            return fail(EXIT_USAGE, format!("{}: {e}", path.display()));
        }
    }
    let status = match trace.status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIter => "max_iter",
    };
    println!(
        "solver = {kind}  iterations = {}  final_rel_error = {:e}  objective = {:.16e}  status = {status}",
        trace.iterations(),
        trace.final_rel_error().unwrap_or(f64::NAN),
        trace.final_objective().unwrap_or(f64::NAN)
    );
    match trace.status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxIter => EXIT_NOT_CONVERGED,
    }
}

fn cmd_bench(a: BenchArgs) -> i32 {
    let cfg: Result<ExperimentConfig, _> = match (&a.experiment, &a.config) {
        (Some(name), _) if !BUILTIN_EXPERIMENTS.contains(&name.as_str()) => {
            return fail(
                EXIT_USAGE,
                format!("unknown experiment '{name}'; valid names: {}", BUILTIN_EXPERIMENTS.join(", ")),
            )
        }
        (Some(name), _) if a.full_scale => bench::builtin_experiment_full_scale(name),
        (Some(name), _) => bench::builtin_experiment(name),
        (None, Some(path)) => ExperimentConfig::from_json_file(path),
        (None, None) => unreachable!("clap enforces one source"),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    if let Some(SeedList(seeds)) = a.seeds {
        cfg = cfg.with_seeds(seeds);
    }
    if a.threads.is_some() {
        cfg.threads = a.threads;
    }
    let results = match bench::run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let (summary, traces) = match bench::emit_csv(&results, &a.out) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let plots = match bench::plot_convergence(&traces, &a.out) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let records: Vec<_> = results.into_iter().map(|(r, _)| r).collect();
    for cell in bench::cell_keys(&records) {
        let medians: Vec<String> = cfg
            .solvers
            .iter()
            .map(|m| {
                let med = bench::median_iterations(&records, m.kind(), |r| {
                    bench::split_instance_id(&r.instance_id).0 == cell
                });
                match med {
                    Some(v) => format!("{}={v}", m.kind()),
                    None => format!("{}=n/a", m.kind()),
                }
            })
            .collect();
        println!("{cell}: median iterations {}", medians.join(" "));
    }
    println!(
        "wrote {}, {} and {} plot(s) to {}",
        summary.display(),
        traces.display(),
        plots.len(),
        a.out.display()
    );
    EXIT_OK
}

fn cmd_plot(a: PlotArgs) -> i32 {
    match bench::plot_convergence(&a.trace, &a.out) {
        Ok(paths) => {
            for p in &paths {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => fail(EXIT_USAGE, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("1,2,5").unwrap().0, vec![1, 2, 5]);
        assert_eq!(parse_seeds("3-6").unwrap().0, vec![3, 4, 5, 6]);
        assert_eq!(parse_seeds("1, 4-5").unwrap().0, vec![1, 4, 5]);
        assert!(parse_seeds("5-2").is_err());
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn bad_flags_exit_one() {
        assert_eq!(run(["bpdn-testgen", "gen", "--n", "0"]), EXIT_USAGE);
        assert_eq!(run(["bpdn-testgen", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["bpdn-testgen", "bench", "--experiment", "nope", "--out", "x"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["bpdn-testgen", "--help"]), EXIT_OK);
    }
}
