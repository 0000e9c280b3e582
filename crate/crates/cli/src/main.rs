//! `hyperaccel`: check certificates, evaluate identities, print canonical
//! series forms, and measure acceleration against the catalog.
//!
//! Exit status: 0 when every selected check passes, 1 when one fails, 2 on
//! usage errors (bad flags, unknown ids, unreadable catalog).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperaccel::catalog::{builtin_catalog, load_catalog, Catalog};

#[derive(Parser, Debug)]
#[command(name = "hyperaccel", version, about = "Accelerated hypergeometric series, checked exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Catalog file to use instead of the built-in one.
    #[arg(long, global = true, env = "HYPERACCEL_CATALOG")]
    catalog: Option<PathBuf>,

    /// `machine` prints one JSON object per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Re-check certificates and derived recursions of families.
    Verify(Select),
    /// Sum entries and compare with their closed forms.
    Evaluate {
        #[command(flatten)]
        select: Select,
        #[command(flatten)]
        precision: Precision,
    },
    /// Print the canonical series of entries.
    Emit(Select),
    /// Digits reached by the accelerated and the original series per term budget.
    Compare {
        #[command(flatten)]
        select: Select,
        #[command(flatten)]
        precision: Precision,
    },
    /// Digits per term and wall time per entry.
    Bench {
        #[command(flatten)]
        select: Select,
        #[command(flatten)]
        precision: Precision,
    },
    /// List families and entries.
    List,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Select {
    /// Entry id; repeatable.
    #[arg(long = "entry", value_name = "ID")]
    pub entries: Vec<String>,
    /// Family id; repeatable. Selects the family's entries for entry commands.
    #[arg(long = "family", value_name = "ID")]
    pub families: Vec<String>,
    /// Everything in the catalog.
    #[arg(long)]
    pub all: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Precision {
    /// Decimal digits required.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
    /// Fixed number of terms instead of the count derived from the rate.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

/// A usage problem: reported on stderr with exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let owned;
    let catalog: &Catalog = match &cli.catalog {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage(&format!("cannot read catalog {}: {e}", path.display())),
            };
            owned = match load_catalog(&text) {
                Ok(c) => c,
                Err(e) => return usage(&format!("catalog {}: {e}", path.display())),
            };
            &owned
        }
        None => builtin_catalog(),
    };
    let mut out = output::Printer::new(cli.format);
    let result = match cli.command {
        Command::Verify(sel) => commands::verify(catalog, &sel, &mut out),
        Command::Evaluate { select: sel, precision: p } => commands::evaluate(catalog, &sel, p, &mut out),
        Command::Emit(sel) => commands::emit(catalog, &sel, &mut out),
        Command::Compare { select: sel, precision: p } => commands::compare(catalog, &sel, p, &mut out),
        Command::Bench { select: sel, precision: p } => commands::bench(catalog, &sel, p, &mut out),
        Command::List => commands::list(catalog, &mut out),
    };
    match result {
        Err(UsageError(msg)) => usage(&msg),
        Ok(()) => {
            out.summary();
            if out.failed() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}
