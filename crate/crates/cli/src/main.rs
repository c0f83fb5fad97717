//! Command-line entry point for the conductor verification driver.
//!
//! Emits one JSON line per verification case (to stdout or `--out`), then a
//! human-readable summary table on stdout.  Exit code 0 means every case was
//! clean, 2 means at least one formula/oracle mismatch or failed property,
//! and 1 means an internal error (bad arguments, unusable field parameters,
//! or an aborted suite).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;
use conductor_cli::{default_cells, run, summarize, Cell, RunConfig, Suite};

#[derive(Parser, Debug)]
#[command(
    name = "conductor-verify",
    version,
    about = "Verify closed-form conductor formulas against a norm-group oracle"
)]
struct Cli {
    /// Suite to run.
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,

    /// Prime p of a single verification cell (otherwise the default matrix runs).
    #[arg(long)]
    p: Option<u64>,

    /// Cyclotomic depth n of the cell (requires --p; default 1).
    #[arg(long)]
    n: Option<u32>,

    /// Unramified degree f of the base field (requires --p; default 1).
    #[arg(long)]
    unram_deg: Option<usize>,

    /// Working precision in p-adic digits (default n + 6 per cell).
    #[arg(long)]
    prec: Option<u32>,

    /// Master seed; each report row derives its own reproducible stream.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Random draws per (suite, r, m) row family.
    #[arg(long, default_value_t = 20)]
    samples: usize,

    /// Norm generators tried before the oracle gives up on a certificate.
    #[arg(long, default_value_t = 400)]
    family_budget: usize,

    /// Write the JSON-lines reports to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Extend the default matrix with the slower depth-two cells.
    #[arg(long, default_value_t = false)]
    slow: bool,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let cells = match (cli.p, cli.n, cli.unram_deg) {
        (Some(p), n, f) => vec![Cell::new(p, n.unwrap_or(1), f.unwrap_or(1))],
        (None, None, None) => default_cells(cli.slow),
        _ => {
            eprintln!("error: --n and --unram-deg select a single cell and require --p");
            std::process::exit(1);
        }
    };
    let cfg = RunConfig {
        suite: cli.suite,
        cells,
        prec: cli.prec,
        seed: cli.seed,
        samples: cli.samples,
        family_budget: cli.family_budget,
    };
    let outcome = run(&cfg);

    let written: std::io::Result<()> = (|| {
        match &cli.out {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                for r in &outcome.reports {
                    writeln!(w, "{}", r.to_json_line())?;
                }
                w.flush()?;
            }
            None => {
                let stdout = std::io::stdout();
                let mut w = stdout.lock();
                for r in &outcome.reports {
                    writeln!(w, "{}", r.to_json_line())?;
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = written {
        eprintln!("error: cannot write reports: {e}");
        std::process::exit(1);
    }

    print!("{}", summarize(&outcome.reports));
    std::process::exit(outcome.exit_code());
}
