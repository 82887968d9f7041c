use std::path::PathBuf;
use std::process::ExitCode;

use albert_forge::{run_text, Command, ForgeError, Options};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "albert-forge", version, about = "Build cubic norm structures and certify their identities")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Build every configured structure and check N(c) = 1.
    Build(Common),
    /// Run the axiom suite on the structures listed under [suite].
    CheckAxioms(Common),
    /// Build isotopes J^(v) and run the axiom suite on them.
    Isotope(Common),
    /// Certify the isotope isomorphisms (b, x) -> (vb, x).
    VerifyIso(Common),
    /// Certify the configured automorphisms.
    ExtendAut(Common),
    /// Certify structure-group words and report their multipliers.
    Word(Common),
    /// Fixed subalgebras of automorphism words.
    Fixed(Common),
    /// Conformal identities and domain sampling.
    Conformal(Common),
    /// Everything the config asks for, in one report.
    Report(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Required by randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn split(sub: Sub) -> (Command, Common) {
    match sub {
        Sub::Build(c) => (Command::Build, c),
        Sub::CheckAxioms(c) => (Command::CheckAxioms, c),
        Sub::Isotope(c) => (Command::Isotope, c),
        Sub::VerifyIso(c) => (Command::VerifyIso, c),
        Sub::ExtendAut(c) => (Command::ExtendAut, c),
        Sub::Word(c) => (Command::Word, c),
        Sub::Fixed(c) => (Command::Fixed, c),
        Sub::Conformal(c) => (Command::Conformal, c),
        Sub::Report(c) => (Command::Report, c),
    }
}

fn execute(command: Command, common: &Common) -> Result<i32, ForgeError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| ForgeError::Io(format!("cannot read {}: {e}", common.config.display())))?;
    let options = Options {
        seed: common.seed,
        trials: common.trials,
    };
    let report = run_text(&text, command, &options)?;
    let json = report.to_json();
    match &common.out {
        Some(path) => std::fs::write(path, json)
            .map_err(|e| ForgeError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    for c in report.checks.iter().filter(|c| !c.passed()) {
        eprintln!("FAIL {} [{}]: {}", c.id, c.structure, c.detail.as_deref().unwrap_or(""));
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (command, common) = split(cli.command);
    match execute(command, &common) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
