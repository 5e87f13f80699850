use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cesaro_lab::batch::map_tasks;
use cesaro_lab::cesaro::{sample_cesaro_path, sample_product_cesaro};
use cesaro_lab::discrete_young::thoma_table;
use cesaro_lab::graph::{format_f64, parse_list, PathWindow};
use cesaro_lab::restriction::{check_restriction_preconditions, rejection_sample_batch};
use cesaro_lab::simplex::{sample_ordered_simplex, SimplexMethod};
use cesaro_lab::verify::{criteria, run_criterion, Suite, DEFAULT_SEED};
use cesaro_lab::wishart::{sample_wishart_spectral_path_with_state, GramJson};
use cesaro_lab::{ConeKind, Error, FrequencyVector, RandomStream};

/// Largest error tolerated by `verify-thoma` before exiting nonzero.
const THOMA_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "cesaro-lab", version, about = "Central measures on Gelfand-Tsetlin type graphs")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Master seed of every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniform points of the ordered simplex; CSV `sample_id,i,x_i`.
    SampleSimplex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "sort")]
        method: SimplexMethod,
    },
    /// Cesàro (exponential) walks; CSV `sample_id,step,coord,x`.
    SampleCesaro {
        /// One mean, or a comma-separated list for a product measure.
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Product Cesàro paths restricted to a cone by rejection.
    SampleGt {
        #[arg(long)]
        lambdas: FrequencyVector,
        #[arg(long, default_value = "gt")]
        cone: ConeKind,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_attempts: u64,
    },
    /// Spectral paths of nested minors of a rank-d Wishart matrix.
    SampleWishartPath {
        #[arg(long)]
        lambdas: FrequencyVector,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Append the final Gram matrix of each path as a JSON line.
        #[arg(long)]
        emit_gram: bool,
    },
    /// Per-path chamber probabilities against Schur functions (two rows).
    VerifyThoma {
        #[arg(long, default_value = "0.7,0.3")]
        p: String,
        #[arg(long, default_value_t = 4)]
        max_size: u32,
    },
    /// Run the acceptance criteria and print one JSON report per check.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
}

/// Exit status of a successful run: 0, or 1 when a check failed.
type Outcome = Result<u8, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let g = cli.global;
    if g.workers == 0 {
        return Err(Error::Precondition("--workers must be >= 1".into()));
    }
    let root = RandomStream::new(g.seed, 0);
    match cli.command {
        Command::SampleSimplex { n, a, count, method } => {
            if n == 0 || !(a > 0.0 && a.is_finite()) {
                return Err(Error::Precondition(format!("need n >= 1 and a > 0, got n = {n}, a = {a}")));
            }
            let points = map_tasks(&root, count, g.workers, |_, mut s| sample_ordered_simplex(n, a, &mut s, method))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            let mut out = String::from("sample_id,i,x_i\n");
            for (id, p) in points.iter().enumerate() {
                for (i, x) in p.coords().iter().enumerate() {
                    let _ = writeln!(out, "{id},{i},{}", format_f64(*x));
                }
            }
            emit(g.out.as_deref(), &out)?;
            Ok(0)
        }
        Command::SampleCesaro { lambda, length, count } => {
            let lambdas = parse_list(&lambda)?;
            if length == 0 {
                return Err(Error::Precondition("--length must be >= 1".into()));
            }
            let paths = if lambdas.len() == 1 {
                let l = lambdas[0];
                map_tasks(&root, count, g.workers, |_, mut s| sample_cesaro_path(l, length, &mut s).map(|p| vec![p]))
            } else {
                let freq = FrequencyVector::new(lambdas)?;
                map_tasks(&root, count, g.workers, |_, mut s| sample_product_cesaro(&freq, length, &mut s))
            }
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let mut out = String::from("sample_id,step,coord,x\n");
            for (id, coords) in paths.iter().enumerate() {
                for step in 0..length {
                    for (c, p) in coords.iter().enumerate() {
                        let _ = writeln!(out, "{id},{},{},{}", step + 1, c + 1, format_f64(p.values()[step]));
                    }
                }
            }
            emit(g.out.as_deref(), &out)?;
            Ok(0)
        }
        Command::SampleGt { lambdas, cone, depth, count, max_attempts } => {
            check_restriction_preconditions(&lambdas, cone)?;
            if depth == 0 || max_attempts == 0 {
                return Err(Error::Precondition("--depth and --max-attempts must be >= 1".into()));
            }
            let (outcomes, summary) =
                rejection_sample_batch(&lambdas, cone, depth, count, max_attempts, &root, g.workers)?;
            let paths: Vec<(usize, &PathWindow)> = outcomes
                .iter()
                .enumerate()
                .filter_map(|(i, o)| o.accepted_path.as_ref().map(|p| (i, p)))
                .collect();
            emit(g.out.as_deref(), &paths_csv(lambdas.dim(), &paths))?;
            let sidecar = serde_json::to_string(&summary).expect("summary serializes");
            match &g.out {
                Some(path) => fs::write(sidecar_path(path), sidecar + "\n")?,
                None => eprintln!("{sidecar}"),
            }
            Ok(0)
        }
        Command::SampleWishartPath { lambdas, n_max, count, emit_gram } => {
            if lambdas.as_slice().iter().any(|&l| !(l > 0.0)) {
                return Err(Error::Precondition("Wishart frequencies must be strictly positive".into()));
            }
            if n_max < lambdas.dim() {
                return Err(Error::Precondition(format!("--n-max must be >= d = {}", lambdas.dim())));
            }
            let results = map_tasks(&root, count, g.workers, |_, mut s| {
                sample_wishart_spectral_path_with_state(&lambdas, n_max, &mut s)
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let paths: Vec<(usize, &PathWindow)> = results.iter().map(|(p, _)| p).enumerate().collect();
            let mut out = paths_csv(lambdas.dim(), &paths);
            if emit_gram {
                for (id, (_, state)) in results.iter().enumerate() {
                    out.push_str(&serde_json::to_string(&GramJson::new(id, state)).expect("gram serializes"));
                    out.push('\n');
                }
            }
            emit(g.out.as_deref(), &out)?;
            Ok(0)
        }
        Command::VerifyThoma { p, max_size } => {
            let p = parse_list(&p)?;
            let (rows, mass_err) = thoma_table(&p, max_size)?;
            let mut out = String::from("lambda, schur, per_path_prob, abs_error\n");
            let mut worst = mass_err;
            for r in &rows {
                let _ = writeln!(out, "{}, {:.17e}, {:.17e}, {:.3e}", r.lambda, r.schur, r.per_path_prob, r.abs_error);
                worst = worst.max(r.abs_error);
            }
            let _ = writeln!(out, "# max level-mass error {mass_err:.3e}");
            emit(g.out.as_deref(), &out)?;
            Ok(if worst > THOMA_TOLERANCE { 1 } else { 0 })
        }
        Command::Verify { suite } => {
            let mut lines = String::new();
            let mut all_passed = true;
            for c in criteria(suite) {
                let outcome = run_criterion(c, g.seed, g.workers)?;
                for r in &outcome.reports {
                    lines.push_str(&r.to_json_line());
                    lines.push('\n');
                }
                eprintln!(
                    "[{}] criterion {} {} ({:.2}s)",
                    if outcome.passed() { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    outcome.elapsed.as_secs_f64()
                );
                all_passed &= outcome.passed();
            }
            emit(g.out.as_deref(), &lines)?;
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}

/// Several PathWindows in one table: `path_id,level,x1,...,xd`.
fn paths_csv(d: usize, paths: &[(usize, &PathWindow)]) -> String {
    let mut out = String::from("path_id,level");
    for i in 1..=d {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (id, p) in paths {
        for line in p.to_csv().lines().skip(1) {
            let _ = writeln!(out, "{id},{line}");
        }
    }
    out
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
