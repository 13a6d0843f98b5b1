use clap::{Parser, Subcommand};
use hhcalc::{Error, Field};
use hhcalc_cli::commands::{cmd_hh, cmd_phi, cmd_relext, load_algebra, BimoduleSpec, HhOptions, ModuleSpec};
use hhcalc_cli::files::Corpus;
use hhcalc_cli::report::{envelope, sha256_hex, to_text};
use hhcalc_cli::suite::run_suite;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "hhcalc", version, about = "Exact Hochschild cohomology of bound quiver algebras")]
struct Cli {
    /// Print a human-readable summary on standard error.
    #[arg(long, global = true)]
    verbose: bool,
    /// Add wall-clock time to the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of hh^0..hh^N(A, M).
    Hh {
        file: PathBuf,
        /// Expected ground field, "Q" or "Fp:<p>".
        #[arg(long)]
        field: Option<String>,
        /// regular, dual, ext:<m> or file:<path>.
        #[arg(long, default_value = "regular")]
        module: String,
        #[arg(long, default_value_t = 1)]
        max_degree: usize,
        /// Include cocycle representatives.
        #[arg(long)]
        reps: bool,
        /// Largest cochain space (in columns) the bar complex may build.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// The projection morphism HH^n(B) -> HH^n(C) as a matrix.
    Phi {
        /// The algebra C.
        file: PathBuf,
        #[arg(long)]
        field: Option<String>,
        /// regular, dual, ext:<m>, file:<path> for C x M, or split:<B file>.
        #[arg(long, default_value = "dual")]
        bimodule: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
    },
    /// Relation extension of a triangular algebra.
    Relext {
        file: PathBuf,
        #[arg(long)]
        field: Option<String>,
        /// Comma-separated names for the new arrows.
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
        /// Write the algebra file of B here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the replication suite on the bundled examples.
    VerifyPaper {
        /// Run one block only.
        #[arg(long)]
        only: Option<String>,
        /// Directory whose <name>.json files replace bundled examples.
        #[arg(long)]
        examples: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn hash_files(paths: &[PathBuf]) -> Result<String, Failure> {
    let bytes = paths.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let parts: Vec<&[u8]> = bytes.iter().map(|b| b.as_slice()).collect();
    Ok(sha256_hex(&parts))
}

fn parse_field(s: &Option<String>) -> Result<Option<Field>, Failure> {
    Ok(s.as_deref().map(Field::parse).transpose()?)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let (command, hash, results, passed) = match &cli.command {
        Command::Hh { file, field, module, max_degree, reps, cap } => {
            let spec = ModuleSpec::parse(module)?;
            let (_, alg) = load_algebra(file, parse_field(field)?)?;
            let mut opts = HhOptions { max_degree: *max_degree, reps: *reps, ..HhOptions::default() };
            if let Some(c) = cap {
                opts.cap = *c;
            }
            let results = cmd_hh(&alg, &spec, &opts)?;
            let mut inputs = vec![file.clone()];
            inputs.extend(spec.inputs());
            let cmd = json!({"name": "hh", "module": module, "max_degree": max_degree, "reps": reps, "cap": opts.cap.to_string()});
            if cli.verbose {
                eprintln!("hh dims: {}", results["dims"]);
            }
            (cmd, hash_files(&inputs)?, results, true)
        }
        Command::Phi { file, field, bimodule, degree } => {
            let spec = BimoduleSpec::parse(bimodule)?;
            let (_, c) = load_algebra(file, parse_field(field)?)?;
            let results = cmd_phi(&c, &spec, *degree)?;
            let mut inputs = vec![file.clone()];
            inputs.extend(spec.inputs());
            if cli.verbose {
                eprintln!(
                    "phi^{degree}: rank {}, surjective {}, kernel {}",
                    results["rank"], results["surjective"], results["kernel_dim"]
                );
            }
            let cmd = json!({"name": "phi", "bimodule": bimodule, "degree": degree});
            (cmd, hash_files(&inputs)?, results, true)
        }
        Command::Relext { file, field, names, out } => {
            let (f, _) = load_algebra(file, parse_field(field)?)?;
            let (results, b_file, passed) = cmd_relext(&f, names.as_deref())?;
            if let Some(o) = out {
                let text = serde_json::to_string_pretty(&b_file).expect("serializable") + "\n";
                std::fs::write(o, text).map_err(|e| Failure::Input(format!("{}: {e}", o.display())))?;
            }
            if cli.verbose {
                eprintln!("relations of B: {}", results["relations"]);
                eprintln!("cross-checks passed: {passed}");
            }
            let cmd = json!({"name": "relext", "names": names});
            (cmd, hash_files(&[file.clone()])?, results, passed)
        }
        Command::VerifyPaper { only, examples } => {
            let corpus = match examples {
                Some(d) => Corpus::with_overrides(d)?,
                None => Corpus::bundled(),
            };
            let report = run_suite(&corpus, only.as_deref())?;
            let texts: Vec<String> = corpus
                .files
                .iter()
                .map(|(n, f)| format!("{n}\n{}", serde_json::to_string(f).expect("serializable")))
                .collect();
            let parts: Vec<&[u8]> = texts.iter().map(|t| t.as_bytes()).collect();
            if cli.verbose {
                for b in &report.blocks {
                    let n = b.checks.len();
                    let bad = b.failures();
                    eprintln!(
                        "[{}] criterion {} {}: {}/{} checks pass",
                        if bad.is_empty() { "PASS" } else { "FAIL" },
                        b.criterion,
                        b.id,
                        n - bad.len(),
                        n
                    );
                    for c in bad {
                        eprintln!("    failed: {}: {}", c.name, c.detail);
                    }
                }
            }
            let cmd = json!({"name": "verify-paper", "only": only});
            (cmd, sha256_hex(&parts), report.to_json(), report.passed())
        }
    };
    let timing = cli.timing.then(|| start.elapsed().as_millis());
    print!("{}", to_text(&envelope(command, hash, results, timing)));
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

