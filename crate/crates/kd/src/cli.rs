//! The `kd` command line.
//!
//! Exit codes: 0 success, 2 invalid input or I/O failure, 3 failed `verify`,
//! 4 membership solver hit its iteration cap.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kd_core::geometry::{decompose_pq_three, hull_membership_labeled, LabeledSet};
use kd_core::{
    classicality, decompose_p2, dft_pair, entry_partition, is_density_matrix, is_kd_real,
    kd_real_dimension, kd_table, pure_kd_set, real_span_rank, EntryPartition, FamilyLetter,
    Tolerances,
};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::formats::{
    read_matrix, to_json, write_table_csv, write_text, CertificateDoc, FamiliesDoc, MatrixDoc,
    PartitionDoc, VerdictDoc,
};
use crate::harness::{probe_conjecture, SampleConfig, SampleMode};
use crate::verify::verify_dimension;

#[derive(Debug, Parser)]
#[command(
    name = "kd",
    version,
    about = "Kirkwood-Dirac classicality tools for DFT bases"
)]
pub struct Cli {
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,

    /// Classicality tolerance (smallest allowed Re Q is -tol, largest |Im Q| is tol).
    #[arg(long = "tol", env = "KD_DEFAULT_TOL", global = true, value_parser = parse_positive)]
    pub tol_classicality: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecomposeMode {
    /// `d = p²`, over A ∪ B ∪ C.
    P2,
    /// `d = p·q`, over three of A, B, C, D.
    Pq3,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the DFT transition matrix `U_ij = ω^{ij}/√d`.
    Dft {
        #[arg(long, value_parser = parse_dim)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the KD table of a state as CSV (`i,j,re,im`).
    Table {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classicality and KD-reality verdict for a state.
    Check {
        #[arg(long)]
        state: PathBuf,
    },
    /// Enumerate every KD-classical pure state.
    Pure {
        #[arg(long, value_parser = parse_dim)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Category partition of the cells of KD-real operators.
    Categories {
        #[arg(long, value_parser = parse_dim)]
        d: usize,
        /// Draw the partition as an ASCII grid.
        #[arg(long)]
        render: bool,
    },
    /// Dimension of the real space of KD-real operators.
    RealDim {
        #[arg(long, value_parser = parse_dim)]
        d: usize,
    },
    /// Real-span rank of a union of pure families.
    SpanRank {
        #[arg(long, value_parser = parse_dim)]
        d: usize,
        /// Family letters such as `ABC`; all pure classical states when omitted.
        #[arg(long)]
        sets: Option<String>,
    },
    /// Nonnegative decomposition of a state over pure families.
    Decompose {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        mode: DecomposeMode,
        /// Three family letters for `pq3`.
        #[arg(long, default_value = "BCD")]
        sets: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hull-membership verdict against the pure classical states.
    Member {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_parser = parse_dim)]
        d: usize,
        /// Restrict the hull to these family letters.
        #[arg(long)]
        sets: Option<String>,
    },
    /// Classify seeded samples by classicality and hull membership.
    Probe {
        #[arg(long, value_parser = parse_dim)]
        d: usize,
        #[arg(long, value_enum)]
        mode: SampleMode,
        #[arg(long, value_parser = parse_dim)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for report.json and counterexample files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every self-check for one dimension and print a pass/fail table.
    Verify {
        #[arg(long, value_parser = parse_dim)]
        d: usize,
    },
}

fn parse_dim(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
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
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if cli.json {
                let doc = json!({ "error": e.to_string(), "exit_code": e.exit_code() });
                let _ = write!(out, "{}", to_json(&doc));
            }
            e.exit_code()
        }
    }
}

pub fn tolerances(cli: &Cli) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(c) = cli.tol_classicality {
        tol.classicality = c;
    }
    tol
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(io_err)
}

fn emit_doc<T: Serialize>(
    out: &mut dyn Write,
    doc: &T,
    path: Option<&PathBuf>,
) -> Result<(), CliError> {
    let text = to_json(doc);
    match path {
        Some(p) => write_text(p, &text),
        None => emit(out, &text),
    }
}

fn letters(s: &str) -> Result<Vec<FamilyLetter>, CliError> {
    let v: Option<Vec<_>> = s.chars().map(FamilyLetter::from_char).collect();
    match v {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Invalid(format!(
            "bad family letters {s:?}; use A, B, C, D"
        ))),
    }
}

fn hull_set(d: usize, sets: Option<&str>) -> Result<LabeledSet, CliError> {
    let pair = dft_pair(d);
    Ok(match sets {
        Some(s) => LabeledSet::from_letters(&pair, &letters(s)?)?,
        None => LabeledSet::pure(&pair),
    })
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let tol = tolerances(cli);
    match &cli.command {
        Command::Dft { d, out: path } => {
            let pair = dft_pair(*d);
            emit_doc(out, &MatrixDoc::from(pair.transition()), path.as_ref())
        }
        Command::Table { state, out: path } => {
            let rho = read_matrix(state)?;
            let table = kd_table(&rho, &dft_pair(rho.dim()))?;
            let mut buf = Vec::new();
            write_table_csv(&table, &mut buf).map_err(|e| CliError::Invalid(e.to_string()))?;
            let text = String::from_utf8(buf).expect("CSV output is UTF-8");
            match path {
                Some(p) => write_text(p, &text),
                None => emit(out, &text),
            }
        }
        Command::Check { state } => {
            let rho = read_matrix(state)?;
            let pair = dft_pair(rho.dim());
            let verdict = classicality(&kd_table(&rho, &pair)?, &tol);
            let kd_real = is_kd_real(&rho, &pair, &tol)?;
            let density = is_density_matrix(&rho, &tol);
            let doc = json!({
                "d": rho.dim(),
                "classical": verdict.classical,
                "min_real": verdict.min_real,
                "max_imag_abs": verdict.max_imag_abs,
                "witness": verdict.witness.map(|(i, j)| [i, j]),
                "kd_real": kd_real,
                "density_matrix": density,
            });
            if cli.json {
                emit(out, &to_json(&doc))
            } else {
                let witness = verdict
                    .witness
                    .map(|(i, j)| format!(" (worst cell {i},{j})"))
                    .unwrap_or_default();
                emit(
                    out,
                    &format!(
                        "classical: {}{witness}\nmin Re Q: {:e}\nmax |Im Q|: {:e}\nKD real: {kd_real}\ndensity matrix: {density}\n",
                        verdict.classical, verdict.min_real, verdict.max_imag_abs
                    ),
                )
            }
        }
        Command::Pure { d, out: path } => {
            let pair = dft_pair(*d);
            let doc = FamiliesDoc::new(&pair, &pure_kd_set(&pair))?;
            if cli.json || path.is_some() {
                emit_doc(out, &doc, path.as_ref())
            } else {
                let mut text = String::new();
                for f in &doc.families {
                    text += &format!(
                        "{} (p={}, q={}): {} states\n",
                        f.label,
                        f.p,
                        f.q,
                        f.members.len()
                    );
                    for m in &f.members {
                        text += &format!("  {}  n_a={} n_b={}\n", m.label, m.n_a, m.n_b);
                    }
                }
                emit(out, &text)
            }
        }
        Command::Categories { d, render } => {
            let partition = entry_partition(*d);
            if *render {
                emit(out, &render_partition(&partition))
            } else {
                emit(out, &to_json(&PartitionDoc::from(&partition)))
            }
        }
        Command::RealDim { d } => {
            let dim = kd_real_dimension(*d);
            if cli.json {
                emit(out, &to_json(&json!({ "d": d, "dimension": dim })))
            } else {
                emit(out, &format!("{dim}\n"))
            }
        }
        Command::SpanRank { d, sets } => {
            let set = hull_set(*d, sets.as_deref())?;
            let rank = real_span_rank(&set.projectors, &tol)?;
            if cli.json {
                let doc = json!({ "d": d, "sets": sets, "projectors": set.len(), "rank": rank });
                emit(out, &to_json(&doc))
            } else {
                emit(out, &format!("{rank}\n"))
            }
        }
        Command::Decompose {
            state,
            mode,
            sets,
            out: path,
        } => {
            let rho = read_matrix(state)?;
            let d = rho.dim();
            let pair = dft_pair(d);
            let cert = match mode {
                DecomposeMode::P2 => {
                    let p = (d as f64).sqrt().round() as usize;
                    decompose_p2(&rho, &pair, p, &tol)?
                }
                DecomposeMode::Pq3 => {
                    decompose_pq_three(&rho, &pair, FamilyLetter::parse_triple(sets)?, &tol)?
                }
            };
            emit_doc(out, &CertificateDoc::from(&cert), path.as_ref())
        }
        Command::Member { state, d, sets } => {
            let rho = read_matrix(state)?;
            if rho.dim() != *d {
                return Err(kd_core::Error::MixedDimensions {
                    expected: *d,
                    found: rho.dim(),
                }
                .into());
            }
            let set = hull_set(*d, sets.as_deref())?;
            let verdict = hull_membership_labeled(&rho, &set.projectors, &set.labels, &tol)?;
            emit(out, &to_json(&VerdictDoc::from(&verdict)))
        }
        Command::Probe {
            d,
            mode,
            samples,
            seed,
            out: dir,
        } => {
            let config = SampleConfig {
                d: *d,
                seed: *seed,
                n_samples: *samples,
                mode: *mode,
                tolerances: tol,
            };
            let report = probe_conjecture(&config, dir.as_deref())?;
            if cli.json {
                let mut doc = serde_json::to_value(&report).expect("report serializes");
                doc["runtime_ms"] = json!(report.runtime_ms);
                emit(out, &to_json(&doc))
            } else {
                let c = report.counts;
                emit(
                    out,
                    &format!(
                        "d={} mode={} samples={} seed={}\nclassical_and_member: {}\nclassical_not_member: {}\nnot_classical: {}\nsolver_failures: {}\nworst_margin: {:e}\ncounterexamples: {}\nruntime_ms: {}\n",
                        report.d,
                        report.mode,
                        report.n_samples,
                        report.seed,
                        c.classical_and_member,
                        c.classical_not_member,
                        c.not_classical,
                        report.solver_failures,
                        report.worst_margin,
                        report.counterexample_files.len(),
                        report.runtime_ms
                    ),
                )
            }
        }
        Command::Verify { d } => {
            let table = verify_dimension(*d, &tol)?;
            if cli.json {
                emit(out, &to_json(&table))?;
            } else {
                emit(out, &format!("{table}\n"))?;
            }
            if table.passed() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed(*d))
            }
        }
    }
}

/// Grid of category indices: `k` marks a cell of category `k`, `k'` its
/// conjugate cell, `.` the diagonal; real categories are starred in the
/// legend.
pub fn render_partition(p: &EntryPartition) -> String {
    let d = p.dim;
    let mut grid = vec![String::from("."); d * d];
    for (k, c) in p.categories.iter().enumerate() {
        for &(i, j) in &c.cells {
            grid[i * d + j] = k.to_string();
        }
        for &(i, j) in &c.conjugate_cells {
            grid[i * d + j] = format!("{k}'");
        }
    }
    let width = grid.iter().map(String::len).max().unwrap_or(1);
    let mut text = String::new();
    for i in 0..d {
        let row: Vec<String> = (0..d)
            .map(|j| format!("{:>width$}", grid[i * d + j]))
            .collect();
        text += row.join(" ").trim_end();
        text.push('\n');
    }
    text += &format!(
        "{} categories including the diagonal\n",
        p.total_categories()
    );
    for (k, c) in p.categories.iter().enumerate() {
        let star = if c.is_real { " *real" } else { "" };
        text += &format!(
            "{k}: step {} residue {} length {}{star}\n",
            c.step,
            c.residue,
            c.cells.len()
        );
    }
    text
}
