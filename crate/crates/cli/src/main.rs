//! `pdslab`: construct, verify, profile and export lifted quadric PDS.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pdslab::coverage::{coverage_table, render_csv, render_text};
use pdslab::forms::{
    classify, hyperplane_profile, predicted_profile, quadric, FormSpec, FormType, QuadricKind,
};
use pdslab::graph::{cayley, export, ExportFormat};
use pdslab::lift::{build_d, PdsCandidate};
use pdslab::verify::{brute_force_verify, spectral_verify, verify_both, VerifyError};

const EXIT_FAIL: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_USAGE: u8 = 3;

/// Largest ℓ accepted without `--allow-large`.
const SMALL_ELL: usize = 3;
const MAX_ELL: usize = 4;

#[derive(Parser, Debug)]
#[command(
    name = "pdslab",
    version,
    about = "Partial difference sets from lifted GF(4) quadrics"
)]
struct Cli {
    /// Worker threads (default: PDSLAB_THREADS, then hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build D(ℓ,j,k) and write it as candidate JSON.
    Construct {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Permit ℓ = 4 (65536 elements).
        #[arg(long)]
        allow_large: bool,
    },
    /// Verify a candidate file and print a certificate.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to `both`, or `spectral` at ℓ = 4.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        allow_large: bool,
    },
    /// Which groups carry a PDS of each type.
    Table {
        #[arg(long, default_value_t = 4)]
        max_ell: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hyperplane intersection profile of the quadric of Q(ℓ,j).
    Profile {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        j: usize,
        /// Use the section x1 = 0 instead of the full quadric.
        #[arg(long)]
        restrict_x1: bool,
        #[arg(long)]
        allow_large: bool,
    },
    /// Write the Cayley graph of a candidate.
    ExportGraph {
        #[arg(long = "in")]
        input: PathBuf,
        /// graph6, dimacs or edgelist
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the spectral check.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Brute,
    Spectral,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Err(f) = init_threads(cli.threads) {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn init_threads(flag: Option<usize>) -> Result<(), Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("PDSLAB_THREADS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                Failure::usage(format!(
                    "PDSLAB_THREADS must be a positive integer, got `{s}`"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Failure::usage("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Construct {
            ell,
            j,
            k,
            out,
            allow_large,
        } => construct(ell, j, k, out.as_deref(), allow_large),
        Command::Verify {
            input,
            method,
            out,
            allow_large,
        } => verify(&input, method, out.as_deref(), allow_large),
        Command::Table {
            max_ell,
            format,
            out,
        } => table(max_ell, format, out.as_deref()),
        Command::Profile {
            ell,
            j,
            restrict_x1,
            allow_large,
        } => profile(ell, j, restrict_x1, allow_large),
        Command::ExportGraph {
            input,
            format,
            out,
            force,
            allow_large,
        } => export_graph(&input, &format, out.as_deref(), force, allow_large),
    }
}

fn gate_ell(ell: usize, allow_large: bool) -> Result<(), Failure> {
    if ell == 0 || ell > MAX_ELL {
        return Err(Failure::usage(format!(
            "ℓ must be in 1..={MAX_ELL}, got {ell}"
        )));
    }
    if ell > SMALL_ELL && !allow_large {
        return Err(Failure::usage(format!(
            "ℓ = {ell} works in a group of order {}; pass --allow-large to proceed",
            1u64 << (4 * ell)
        )));
    }
    Ok(())
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::new(EXIT_FAIL, format!("cannot write to stdout: {e}"))),
    }
}

fn load_candidate(path: &Path, allow_large: bool) -> Result<PdsCandidate, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    // a file that reads but is not a valid candidate counts as a failed check
    let candidate = PdsCandidate::from_json(&text)
        .map_err(|e| Failure::new(EXIT_FAIL, format!("{}: {e}", path.display())))?;
    gate_ell(candidate.shape().ell(), allow_large)?;
    Ok(candidate)
}

fn construct(ell: usize, j: usize, k: usize, out: Option<&Path>, allow_large: bool) -> Outcome {
    gate_ell(ell, allow_large)?;
    if k > j || j > ell {
        return Err(Failure::usage(format!(
            "need 0 ≤ k ≤ j ≤ ℓ, got ℓ = {ell}, j = {j}, k = {k}"
        )));
    }
    let candidate = build_d(ell, j, k).map_err(|e| Failure::usage(e.to_string()))?;
    eprintln!(
        "D({ell},{j},{k}) in {}: {} elements, expected {} with epsilon {:+}",
        candidate.shape().name(),
        candidate.len(),
        candidate.expected_params(),
        candidate.epsilon()
    );
    write_output(out, candidate.to_json().as_bytes())?;
    if candidate.is_degenerate() {
        eprintln!("warning: degenerate input, the set is empty");
        return Ok(EXIT_DEGENERATE);
    }
    Ok(0)
}

fn verify_error(e: VerifyError) -> Failure {
    match e {
        VerifyError::Degenerate => Failure::new(EXIT_DEGENERATE, e.to_string()),
        VerifyError::Failed {
            witness: Some(w), ..
        } => Failure::new(EXIT_FAIL, format!("{e} (witness {w})")),
        _ => Failure::new(EXIT_FAIL, e.to_string()),
    }
}

fn verify(
    input: &Path,
    method: Option<MethodArg>,
    out: Option<&Path>,
    allow_large: bool,
) -> Outcome {
    let candidate = load_candidate(input, allow_large)?;
    let large = candidate.shape().ell() > SMALL_ELL;
    let method = method.unwrap_or(if large {
        MethodArg::Spectral
    } else {
        MethodArg::Both
    });
    if large && method != MethodArg::Spectral {
        return Err(Failure::usage(format!(
            "brute force is refused at ℓ = {}; use --method spectral",
            candidate.shape().ell()
        )));
    }
    let result = match method {
        MethodArg::Brute => brute_force_verify(&candidate),
        MethodArg::Spectral => spectral_verify(&candidate),
        MethodArg::Both => verify_both(&candidate),
    };
    let cert = result.map_err(verify_error)?;
    let mut text = serde_json::to_string(&cert.to_json_value()).expect("certificate serializes");
    text.push('\n');
    write_output(out, text.as_bytes())?;
    eprintln!("pass: {}", cert.params);
    Ok(0)
}

fn table(max_ell: usize, format: TableFormat, out: Option<&Path>) -> Outcome {
    if max_ell == 0 || max_ell > MAX_ELL {
        return Err(Failure::usage(format!(
            "--max-ell must be in 1..={MAX_ELL}, got {max_ell}"
        )));
    }
    let rows = coverage_table(max_ell);
    let text = match format {
        TableFormat::Text => render_text(&rows),
        TableFormat::Csv => render_csv(&rows),
    };
    write_output(out, text.as_bytes())?;
    Ok(0)
}

fn histogram_text(h: &BTreeMap<usize, usize>) -> String {
    let mut s = String::from("{");
    for (i, (size, count)) in h.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{size}:{count}");
    }
    s.push('}');
    s
}

fn profile(ell: usize, j: usize, restrict_x1: bool, allow_large: bool) -> Outcome {
    gate_ell(ell, allow_large)?;
    if j > ell {
        return Err(Failure::usage(format!(
            "need j ≤ ℓ, got ℓ = {ell}, j = {j}"
        )));
    }
    let spec = FormSpec::new(ell, j).map_err(|e| Failure::usage(e.to_string()))?;
    let kind = if restrict_x1 {
        if j == 0 || ell < 2 {
            return Err(Failure::usage(
                "the x1 = 0 section is a nonsingular parabolic quadric only for ℓ ≥ 2 and j ≥ 1",
            ));
        }
        QuadricKind::Parabolic
    } else {
        match classify(spec)
            .map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?
            .form_type
        {
            FormType::Elliptic => QuadricKind::Elliptic,
            FormType::Hyperbolic => QuadricKind::Hyperbolic,
        }
    };
    let points = quadric(spec, restrict_x1);
    let observed = hyperplane_profile(&points);
    let predicted =
        predicted_profile(kind, ell).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
    println!(
        "{} quadric of Q({ell},{j}){} in PG({}, 4): {} points",
        kind.name(),
        if restrict_x1 { " on x1 = 0" } else { "" },
        points.dim() - 1,
        points.len()
    );
    println!("observed:  {}", histogram_text(&observed.histogram));
    println!("predicted: {}", histogram_text(&predicted));
    if observed.histogram == predicted {
        println!("pass");
        Ok(0)
    } else {
        println!("fail");
        Ok(EXIT_FAIL)
    }
}

fn export_graph(
    input: &Path,
    format: &str,
    out: Option<&Path>,
    force: bool,
    allow_large: bool,
) -> Outcome {
    let format: ExportFormat = format
        .parse()
        .map_err(|e: pdslab::graph::GraphError| Failure::usage(e.to_string()))?;
    let candidate = load_candidate(input, allow_large)?;
    if candidate.is_degenerate() {
        return Err(Failure::new(
            EXIT_DEGENERATE,
            VerifyError::Degenerate.to_string(),
        ));
    }
    if !force {
        spectral_verify(&candidate).map_err(verify_error)?;
    }
    let graph = cayley(&candidate).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
    write_output(out, &export(&graph, format))?;
    Ok(0)
}
