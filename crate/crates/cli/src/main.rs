//! `orbitkit` command-line front end.
//!
//! Exit status: 0 on success, 2 when the computation itself is impossible
//! (the report then carries the error code), 1 on I/O or parse failures.

mod commands;
mod input;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use orbitkit::OrbitError;
use serde_json::json;

use output::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Domain(#[from] OrbitError),
}

#[derive(Parser)]
#[command(
    name = "orbitkit",
    version,
    about = "Normal operators under unitary and partial-isometry conjugation"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Write the report here instead of stdout; metadata goes to `<out>.meta.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

const DEFAULT_TOL: &str = "1e-9";

#[derive(Subcommand)]
enum Verb {
    /// Symmetric norm of a matrix or of a singular-value list.
    Norm {
        input: PathBuf,
        #[arg(long, default_value = "operator")]
        spec: String,
    },
    /// Ky Fan dominance of the singular values of X by those of Y.
    Majorize {
        x: PathBuf,
        y: PathBuf,
        /// Slack allowed on every partial sum.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Compression of X to the block diagonal of a family (or of a profile's spectral family).
    Expectation { x: PathBuf, family: PathBuf },
    /// Solve [x, a] = y for a diagonal a given by a profile.
    CommutatorSolve {
        profile: PathBuf,
        y: PathBuf,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Rank-two witnesses for the lower bound of the commutator map.
    Witnesses {
        profile: PathBuf,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Tangent dimension split at a partial isometry (default: the support projection).
    Tangent {
        profile: PathBuf,
        v0: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Orbit and orbit-closure verdicts for two profiles or matrices.
    Verdict {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Greedy eps-partition of a profile's eigenvalues.
    Partition {
        profile: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Partial isometry v with v a v* close to b.
    Intertwine {
        a: PathBuf,
        b: PathBuf,
        /// Cell diameter; 0 selects half the smallest gap.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        dim: Option<usize>,
        /// Include v and its projections in the report.
        #[arg(long)]
        matrix: bool,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Errors of the finite-rank unitary approximants for m = 0..=M.
    ApproxSeq {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "operator")]
        spec: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Lagrange polynomial of the n-th eigenvalue evaluated on X.
    Projector {
        profile: PathBuf,
        x: Option<PathBuf>,
        /// 1-based eigenvalue index.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value = DEFAULT_TOL)]
        tol: f64,
    },
    /// Unitary orbit that is not norm closed: rotations escaping to a larger kernel.
    DemoIsclosed {
        #[arg(long, default_value = "harmonic:16")]
        seq: String,
        #[arg(long, default_value = "trace")]
        spec: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Pair in one unitary orbit that finite-rank unitaries cannot connect in a ratio norm.
    DemoNonseparable {
        /// Reference sequence; defaults to 1/k of length 2n.
        #[arg(long)]
        seq: Option<String>,
        /// A ratio spec overriding --seq.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        m: usize,
    },
    /// Shifted operators close in norm but far in the partial-isometry topology.
    DemoShift {
        #[arg(long, default_value = "harmonic:16")]
        seq: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Norm { .. } => "norm",
            Verb::Majorize { .. } => "majorize",
            Verb::Expectation { .. } => "expectation",
            Verb::CommutatorSolve { .. } => "commutator-solve",
            Verb::Witnesses { .. } => "witnesses",
            Verb::Tangent { .. } => "tangent",
            Verb::Verdict { .. } => "verdict",
            Verb::Partition { .. } => "partition",
            Verb::Intertwine { .. } => "intertwine",
            Verb::ApproxSeq { .. } => "approx-seq",
            Verb::Projector { .. } => "projector",
            Verb::DemoIsclosed { .. } => "demo-isclosed",
            Verb::DemoNonseparable { .. } => "demo-nonseparable",
            Verb::DemoShift { .. } => "demo-shift",
        }
    }
}

fn run(verb: &Verb) -> Result<Report, CliError> {
    use commands as c;
    match verb {
        Verb::Norm { input, spec } => c::norm(input, spec),
        Verb::Majorize { x, y, tol } => c::majorize(x, y, *tol),
        Verb::Expectation { x, family } => c::expectation(x, family),
        Verb::CommutatorSolve { profile, y, tol } => c::commutator_solve(profile, y, *tol),
        Verb::Witnesses { profile, tol } => c::witnesses(profile, *tol),
        Verb::Tangent {
            profile,
            v0,
            dim,
            tol,
        } => c::tangent(profile, v0.as_deref(), *dim, *tol),
        Verb::Verdict { a, b, tol } => c::verdict(a, b, *tol),
        Verb::Partition { profile, eps, tol } => c::partition(profile, *eps, *tol),
        Verb::Intertwine {
            a,
            b,
            eps,
            dim,
            matrix,
            tol,
        } => c::intertwine(a, b, *eps, *dim, *matrix, *tol),
        Verb::ApproxSeq {
            a,
            b,
            spec,
            m,
            dim,
            tol,
        } => c::approx_seq(a, b, spec, *m, *dim, *tol),
        Verb::Projector {
            profile,
            x,
            n,
            dim,
            tol,
        } => c::projector(profile, x.as_deref(), *n, *dim, *tol),
        Verb::DemoIsclosed { seq, spec, n } => c::demo_isclosed(seq, spec, *n),
        Verb::DemoNonseparable { seq, spec, n, m } => {
            c::demo_nonseparable(seq.as_deref(), spec.as_deref(), *n, *m)
        }
        Verb::DemoShift { seq, n, rank } => c::demo_shift(seq, *n, *rank),
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_meta(out: &Path, verb: &str, exit: u8, started: Instant) -> Result<(), CliError> {
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "tool": "orbitkit",
        "version": env!("CARGO_PKG_VERSION"),
        "verb": verb,
        "args": std::env::args().skip(1).collect::<Vec<_>>(),
        "seed": orbitkit::sampling::seed_from_env(),
        "exit_code": exit,
        "unix_time": unix,
        "elapsed_ms": started.elapsed().as_millis() as u64,
    });
    emit(&Report::new(meta).to_json(), Some(&sidecar_path(out)))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    let out = cli.out.as_deref();

    let (text, exit) = match run(&cli.verb) {
        Ok(report) => (render(&report, cli.format), 0),
        Err(CliError::Domain(e)) => {
            let report = Report::new(json!({
                "error": {"code": e.code(), "message": e.to_string()}
            }))
            .with_table(
                vec!["code", "message"],
                vec![vec![json!(e.code()), json!(e.to_string())]],
            );
            eprintln!("orbitkit: {e}");
            (render(&report, cli.format), 2)
        }
        Err(e) => {
            eprintln!("orbitkit: {e}");
            return ExitCode::from(1);
        }
    };

    let written = emit(&text, out).and_then(|_| match out {
        Some(path) => write_meta(path, cli.verb.name(), exit, started),
        None => Ok(()),
    });
    match written {
        Ok(()) => ExitCode::from(exit),
        Err(e) => {
            eprintln!("orbitkit: {e}");
            ExitCode::from(1)
        }
    }
}
