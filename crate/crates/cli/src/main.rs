use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use valdef_core::valfield::Catalog;

mod analyze;
mod catalog;
mod formula;
mod group;
mod oracle;
mod verify;

/// Definability of henselian valuations on power-series towers.
#[derive(Parser, Debug)]
#[command(name = "valdef", version)]
struct Cli {
    /// Extra catalog of base fields (JSON list), merged over the built-in one
    #[arg(long, global = true, env = "VALDEF_CATALOG")]
    catalog: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the decision rules on one or more towers
    Analyze(analyze::Args),
    /// Evaluate a predicate on a group spine
    Group(group::Args),
    /// Print or evaluate one of the group-language formulas
    Formula(formula::Args),
    /// Run the randomized agreement suite against the brute-force oracle
    Oracle(oracle::Args),
    /// Replay the worked examples and property suites
    VerifyPaper(verify::Args),
    /// Inspect the catalog of base fields
    Catalog {
        #[command(subcommand)]
        action: catalog::Action,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

/// Bad input: unreadable or malformed files, unknown names, parse errors.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

fn load_catalog(path: Option<&Path>) -> anyhow::Result<Catalog> {
    let mut cat = Catalog::builtin();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
        let extra = Catalog::from_json(&text).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
        cat.merge(extra).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
    }
    Ok(cat)
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

pub fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let catalog = || load_catalog(cli.catalog.as_deref());
    match cli.command {
        Command::Analyze(args) => analyze::run(args, &catalog()?, cli.format),
        Command::Group(args) => group::run(args, cli.format),
        Command::Formula(args) => formula::run(args, cli.format),
        Command::Oracle(args) => oracle::run(args, cli.format),
        Command::VerifyPaper(args) => verify::run(args, catalog()?, cli.format),
        Command::Catalog { action } => catalog::run(action, &catalog()?, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
