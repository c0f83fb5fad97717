//! Verification driver for the conductor library.
//!
//! The driver walks a matrix of field parameters (p, n, f), runs the selected
//! verification suites in each field, and emits one JSON line per case.  A
//! case compares a closed-form conductor (or symbol-order) prediction against
//! the norm-group oracle, records the certificate trace, and carries its own
//! RNG seed so any single row can be replayed in isolation.
//!
//! Report bodies are pure functions of the run configuration and the seed;
//! only the per-case wall-clock field differs between runs.

pub mod lemmas;
pub mod suites;

use conductor_core::report::ConductorReport;
use conductor_core::{FieldCtx, FieldParams};
use conductor_core::conductor::ConductorEngine;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One field of the verification matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub p: u64,
    pub n: u32,
    pub f: usize,
}

impl Cell {
    pub fn new(p: u64, n: u32, f: usize) -> Self {
        Cell { p, n, f }
    }
}

/// Suite selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Twisted-norm classes in the generic residue classes r ≢ 0, 1.
    Metcond,
    /// Generator monomials in the residue class r ≡ 0 (mod p−1).
    Condr0,
    /// Generator monomials in the residue class r ≡ 1 (mod p−1).
    Condr1,
    /// Cyclotomic symbol values against the base-field norm.
    Zetaform,
    /// Structural property suite (filtration, eigenspaces, pairings, ideals).
    Lemmas,
    /// Everything above.
    All,
}

impl Suite {
    /// Concrete suites to run, in a fixed order.
    pub fn selected(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Metcond,
                Suite::Condr0,
                Suite::Condr1,
                Suite::Zetaform,
                Suite::Lemmas,
            ],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Metcond => "metcond",
            Suite::Condr0 => "condr0",
            Suite::Condr1 => "condr1",
            Suite::Zetaform => "zetaform",
            Suite::Lemmas => "lemmas",
            Suite::All => "all",
        }
    }
}

/// Full configuration of one driver invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suite: Suite,
    pub cells: Vec<Cell>,
    /// Working precision override; default is n + 6 p-adic digits per cell.
    pub prec: Option<u32>,
    /// Master seed; every row derives its own stream from this and its key.
    pub seed: u64,
    /// Random draws per (suite, r, m) row family.
    pub samples: usize,
    /// Norm generators tried before the oracle gives up on a certificate.
    pub family_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: Suite::All,
            cells: default_cells(false),
            prec: None,
            seed: 1,
            samples: 20,
            family_budget: 400,
        }
    }
}

/// Default verification matrix.  The fast matrix keeps every cell under a
/// couple of minutes; `slow` adds the depth-two and larger-residue fields.
pub fn default_cells(slow: bool) -> Vec<Cell> {
    let mut cells = vec![
        Cell::new(3, 1, 1),
        Cell::new(3, 1, 2),
        Cell::new(3, 2, 1),
        Cell::new(5, 1, 1),
        Cell::new(5, 1, 2),
    ];
    if slow {
        cells.extend([Cell::new(3, 2, 2), Cell::new(5, 2, 1), Cell::new(5, 2, 2)]);
    }
    cells
}

/// FNV-1a hash of a row key; XORed with the master seed to give each row an
/// independent, reproducible RNG stream.
pub fn fnv1a(key: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Per-row seed and RNG.
pub fn row_seed(master: u64, key: &str) -> u64 {
    master ^ fnv1a(key)
}

pub fn row_rng(master: u64, key: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(row_seed(master, key))
}

/// Aggregated result of a run.
#[derive(Debug)]
pub struct RunOutcome {
    pub reports: Vec<ConductorReport>,
    /// Rows where the formula and the oracle disagree, a congruence is
    /// violated, or a property check failed.
    pub mismatches: usize,
    /// Rows that aborted with an internal error.
    pub errors: usize,
}

impl RunOutcome {
    /// 0 = clean, 2 = at least one mismatch, 1 = at least one error.
    pub fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            1
        } else if self.mismatches > 0 {
            2
        } else {
            0
        }
    }
}

/// A row counts as a mismatch when the formula/oracle flag is false or when a
/// note flags a violated congruence or a disagreeing cross-check.
pub fn is_mismatch(r: &ConductorReport) -> bool {
    !r.is_clean()
        || r.note
            .as_deref()
            .is_some_and(|s| s.contains("violated") || s.contains("disagrees"))
}

pub fn is_error(r: &ConductorReport) -> bool {
    r.note.as_deref().is_some_and(|s| s.starts_with("error:"))
}

/// Run the configured suites over the configured cells.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    let mut reports = Vec::new();
    for &cell in &cfg.cells {
        for s in cfg.suite.selected() {
            reports.extend(run_suite_cell(s, cell, cfg));
        }
    }
    let mismatches = reports.iter().filter(|r| is_mismatch(r)).count();
    let errors = reports.iter().filter(|r| is_error(r)).count();
    RunOutcome {
        reports,
        mismatches,
        errors,
    }
}

/// Run one suite in one field, funneling hard failures into an error row so
/// a single bad cell cannot abort the rest of the matrix.
pub fn run_suite_cell(s: Suite, cell: Cell, cfg: &RunConfig) -> Vec<ConductorReport> {
    let prec = cfg.prec.unwrap_or(cell.n + 6);
    let error_row = |msg: String| {
        let mut row =
            ConductorReport::skip(s.name(), cell.p, cell.n, cell.f, prec, cfg.seed, "");
        row.note = Some(format!("error: {msg}"));
        vec![row]
    };
    let par = FieldParams {
        p: cell.p,
        n: cell.n,
        f: cell.f,
        prec,
    };
    let ctx = match FieldCtx::new(par) {
        Ok(c) => c,
        Err(e) => return error_row(e.to_string()),
    };
    let mut eng = ConductorEngine::new(ctx, cfg.family_budget);
    let res = match s {
        Suite::Metcond => suites::metcond(&mut eng, cfg),
        Suite::Condr0 => suites::condr0(&mut eng, cfg),
        Suite::Condr1 => suites::condr1(&mut eng, cfg),
        Suite::Zetaform => suites::zetaform(&mut eng, cfg),
        Suite::Lemmas => lemmas::run(&mut eng, cfg),
        Suite::All => unreachable!("selected() never yields All"),
    };
    match res {
        Ok(rows) => rows,
        Err(e) => error_row(e.to_string()),
    }
}

/// Human-readable run summary: one line per (suite, field) group in emission
/// order, then a verdict.
pub fn summarize(reports: &[ConductorReport]) -> String {
    use std::fmt::Write as _;
    let mut order: Vec<(String, u64, u32, usize)> = Vec::new();
    let mut stats: std::collections::HashMap<(String, u64, u32, usize), (usize, usize, usize, usize, u128)> =
        std::collections::HashMap::new();
    for r in reports {
        let key = (r.suite.clone(), r.p, r.n, r.f);
        if !stats.contains_key(&key) {
            order.push(key.clone());
        }
        let e = stats.entry(key).or_insert((0, 0, 0, 0, 0));
        e.0 += 1;
        if is_error(r) {
            e.3 += 1;
        } else if is_mismatch(r) {
            e.2 += 1;
        } else if r.matches.is_none() {
            e.1 += 1; // skip or pure-diagnostic row
        }
        e.4 += r.ms;
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>3} {:>2} {:>2} {:>6} {:>6} {:>9} {:>7} {:>9}",
        "suite", "p", "n", "f", "rows", "other", "mismatch", "error", "ms"
    );
    let mut mismatches = 0usize;
    let mut errors = 0usize;
    for key in order {
        let (rows, other, mism, errs, ms) = stats[&key];
        mismatches += mism;
        errors += errs;
        let _ = writeln!(
            out,
            "{:<10} {:>3} {:>2} {:>2} {:>6} {:>6} {:>9} {:>7} {:>9}",
            key.0, key.1, key.2, key.3, rows, other, mism, errs, ms
        );
    }
    if mismatches == 0 && errors == 0 {
        let _ = writeln!(out, "VERDICT: clean ({} rows)", reports.len());
    } else {
        let _ = writeln!(
            out,
            "VERDICT: {mismatches} mismatching rows, {errors} error rows out of {}",
            reports.len()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_seeds_depend_on_every_key_component() {
        let a = row_seed(7, "metcond:3:1:1:r2:m1:i0");
        let b = row_seed(7, "metcond:3:1:1:r2:m1:i1");
        let c = row_seed(8, "metcond:3:1:1:r2:m1:i0");
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, row_seed(7, "metcond:3:1:1:r2:m1:i0"));
    }

    #[test]
    fn suite_selection_expands_all() {
        assert_eq!(Suite::All.selected().len(), 5);
        assert_eq!(Suite::Metcond.selected(), vec![Suite::Metcond]);
    }

    #[test]
    fn default_matrix_is_ordered_and_slow_extends_it() {
        let fast = default_cells(false);
        let slow = default_cells(true);
        assert_eq!(&slow[..fast.len()], &fast[..]);
        assert!(slow.len() > fast.len());
        assert!(fast.contains(&Cell::new(5, 1, 2)));
    }
}
