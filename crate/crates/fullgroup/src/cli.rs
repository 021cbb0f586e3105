//! The `fullgroup` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use fullgroup_core::backend::compare_clopen;
use fullgroup_core::certificate::{commutator_target, simplicity_certificate, verify_certificate};
use fullgroup_core::decompose::{decompose_small_support, split_nontrivial_support};
use fullgroup_core::transfer::{commutator_transfer, exact_swap_involution, full_group_transfer, gw_intertwining};
use fullgroup_core::{Backend, ClopenSet, Environment, GroupElement, Ratio};

use crate::config::RunConfig;
use crate::error::HarnessError;
use crate::json::{self, CertificateFile, CompareFile, DecompositionFile, GwFile, SplitFile, SwapFile, TransferFile};
use crate::selftest;

#[derive(Debug, Parser)]
#[command(name = "fullgroup", version, about = "Exact computations in topological full groups of Cantor groupoids")]
pub struct Cli {
    /// `odo<b>` or `shift<b>`; `odo2` when omitted, except that `verify`
    /// takes the backend from the file.
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Write the JSON artifact here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized commands; `FULLGROUP_SEED` takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Do not print the summary table.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Comparison bisection from A into B, or from B into A.
    Compare { a: String, b: String },
    /// An element moving A into B.
    Transfer {
        a: String,
        b: String,
        /// Build a commutator instead of an involution.
        #[arg(long)]
        commutator: bool,
    },
    /// An involution exchanging A∖B and B∖A.
    Swap { a: String, b: String },
    /// Rounds of the alternating intertwining construction.
    Gw {
        a: String,
        b: String,
        #[arg(long, allow_negative_numbers = true)]
        rounds: i64,
    },
    /// Factors with small support.
    Decompose {
        element: String,
        /// Measure bound `p/q` for the factor supports (odometer).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Two factors of proper support, with a certificate for the first.
    Split { element: String },
    /// Certificate writing `[alpha, beta]` as a product of conjugates of `tau0^(±1)`.
    Certify {
        #[arg(long)]
        tau0: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Checks a certificate file.
    Verify { file: PathBuf },
    /// Randomized property suites.
    Selftest {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn set_arg(backend: Backend, text: &str) -> Result<ClopenSet, HarnessError> {
    let set: ClopenSet = text.parse()?;
    backend.check_set(&set)?;
    Ok(set)
}

fn element_arg(backend: Backend, text: &str) -> Result<GroupElement, HarnessError> {
    let g: GroupElement = text.parse()?;
    backend.check_same(&g.backend())?;
    Ok(g)
}

/// Writes the artifact to `--output` and the summary to standard output, or
/// the artifact to standard output and the summary to standard error.
fn emit(cli: &Cli, text: &str, summary: &[(&str, String)]) -> Result<(), HarnessError> {
    let width = summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let table: String = if cli.quiet {
        String::new()
    } else {
        summary.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    };
    match cli.output.as_deref() {
        Some(path) => {
            std::fs::write(path, text)?;
            print!("{table}");
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            eprint!("{table}");
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), HarnessError> {
    let backend: Backend = cli.backend.as_deref().unwrap_or("odo2").parse()?;
    match &cli.command {
        Command::Compare { a, b } => {
            let (a, b) = (set_arg(backend, a)?, set_arg(backend, b)?);
            let u = compare_clopen(backend, &a, &b)?;
            let file = CompareFile::new(&a, &b, &u);
            emit(cli, &json::to_pretty(&file)?, &[("bisection", file.bisection.clone()), ("source", file.source.clone()), ("range", file.range.clone())])
        }
        Command::Transfer { a, b, commutator } => {
            let (a, b) = (set_arg(backend, a)?, set_arg(backend, b)?);
            let r = if *commutator { commutator_transfer(backend, &a, &b)? } else { full_group_transfer(backend, &a, &b)? };
            r.check(&a, &b)?;
            let file = TransferFile::new(&a, &b, &r)?;
            emit(cli, &json::to_pretty(&file)?, &[("kind", file.kind.clone()), ("element", file.element.clone()), ("image of A", file.image_of_a.clone())])
        }
        Command::Swap { a, b } => {
            let (a, b) = (set_arg(backend, a)?, set_arg(backend, b)?);
            let g = exact_swap_involution(backend, &a, &b)?;
            let file = SwapFile::new(&a, &b, &g);
            emit(cli, &json::to_pretty(&file)?, &[("element", file.element.clone()), ("support", file.support.clone())])
        }
        Command::Gw { a, b, rounds } => {
            let (a, b) = (set_arg(backend, a)?, set_arg(backend, b)?);
            let rounds = usize::try_from(*rounds)
                .map_err(|_| HarnessError::Core(fullgroup_core::Error::Precondition("rounds must be nonnegative".into())))?;
            let state = gw_intertwining(backend, &a, &b, rounds)?;
            state.check()?;
            let file = GwFile::new(&state)?;
            let mut summary = vec![("x0", file.x0.clone()), ("y0", file.y0.clone())];
            let last = file.rounds.last();
            summary.push(("rounds", rounds.to_string()));
            summary.push(("residual A", last.map_or(file.a_minus_b.clone(), |r| r.residual_a.clone())));
            summary.push(("residual B", last.map_or(file.b_minus_a.clone(), |r| r.residual_b.clone())));
            emit(cli, &json::to_pretty(&file)?, &summary)
        }
        Command::Decompose { element, eps } => {
            let alpha = element_arg(backend, element)?;
            let eps: Ratio = match eps {
                Some(text) => text.parse().map_err(|_| HarnessError::Config(format!("bad --eps {text:?}, expected p/q")))?,
                None if backend.has_measure() => return Err(HarnessError::Config("--eps is required on the odometer".into())),
                None => Ratio::new(1, 4),
            };
            let d = decompose_small_support(&alpha, eps)?;
            d.check(&alpha)?;
            let file = DecompositionFile::new(&alpha, &d);
            emit(cli, &json::to_pretty(&file)?, &[("factors", d.factors.len().to_string()), ("epsilon", eps.to_string())])
        }
        Command::Split { element } => {
            let tau = element_arg(backend, element)?;
            let s = split_nontrivial_support(&tau)?;
            s.check(&tau)?;
            let file = SplitFile::new(&tau, &s);
            emit(
                cli,
                &json::to_pretty(&file)?,
                &[("tau1", file.tau1.clone()), ("tau2", file.tau2.clone()), ("certificate factors", s.certificate.len().to_string())],
            )
        }
        Command::Certify { tau0, alpha, beta } => {
            let mut env = Environment::new(backend);
            env.insert("tau0", element_arg(backend, tau0)?)?;
            env.insert("alpha", element_arg(backend, alpha)?)?;
            env.insert("beta", element_arg(backend, beta)?)?;
            let targets = vec![("alpha".to_string(), "beta".to_string())];
            let (cp, trace) = simplicity_certificate("tau0", &targets, &mut env)?;
            let target = commutator_target(&targets, &env)?;
            if !verify_certificate(&cp, &env, &target)? {
                return Err(HarnessError::Verification("synthesized certificate does not verify".into()));
            }
            let file = CertificateFile::new(&cp, &env, &target, &trace);
            emit(cli, &json::to_pretty(&file)?, &[("factors", cp.len().to_string()), ("target", file.target.clone())])
        }
        Command::Verify { file } => {
            let text = std::fs::read_to_string(file)?;
            let cert = CertificateFile::from_json(&text)?;
            let (cp, env, target) = cert.to_parts()?;
            if cli.backend.is_some() {
                backend.check_same(&env.backend())?;
            }
            if !verify_certificate(&cp, &env, &target)? {
                return Err(HarnessError::Verification(format!("{} does not verify", file.display())));
            }
            if !cli.quiet {
                println!("ok  {} factors", cp.len());
            }
            Ok(())
        }
        Command::Selftest { suite, trials, max_depth } => {
            let mut config = RunConfig::new(backend, cli.seed, *max_depth, *trials)?.with_env_seed()?;
            config.output_path = cli.output.clone();
            let report = selftest::run_suite(suite, &config)?;
            let mut summary = Vec::new();
            for s in &report.suites {
                for (name, p) in &s.properties {
                    summary.push((name.as_str(), format!("{}/{}  {}", p.passed, p.checked, s.suite)));
                }
            }
            emit(cli, &json::to_pretty(&report)?, &summary)?;
            if report.passed() {
                Ok(())
            } else {
                Err(HarnessError::Verification("some properties failed".into()))
            }
        }
    }
}
