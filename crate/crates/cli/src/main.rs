//! `braidmon`: curves to tables, tables to factorizations, factorizations
//! against expected lists.
//!
//! Exit codes: 0 success, 1 unreadable or unparseable input, 2 semantic or
//! geometric failure, 3 check mismatch.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use braidmon::arrangement::{lefschetz_table, ArrangementError, BaseSide, CurveSpec};
use braidmon::check::{compare, parse_expected, CheckError};
use braidmon::describe::Describer;
use braidmon::dictionary::entries;
use braidmon::engine::{parse_table_file, run_table_file, EngineError};
use braidmon::notation::Kind;

#[derive(Parser)]
#[command(name = "braidmon", version, about = "Braid monodromy of real line and conic arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curve file to singularity table.
    Analyze {
        curve: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::Right)]
        basepoint: Side,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singularity table to the list of monodromy factors.
    Monodromy {
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Compare a table's factors with an expected list.
    Check { table: PathBuf, expected: PathBuf },
    /// Verify the move dictionary.
    Dict,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Right,
    Left,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Words,
    Pretty,
    Both,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn parse(msg: impl ToString) -> Self {
        Failure { code: 1, msg: msg.to_string() }
    }

    fn semantic(msg: impl ToString) -> Self {
        Failure { code: 2, msg: msg.to_string() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure { code: if e.is_parse() { 1 } else { 2 }, msg: e.to_string() }
    }
}

impl From<ArrangementError> for Failure {
    fn from(e: ArrangementError) -> Self {
        Failure { code: if e.is_parse() { 1 } else { 2 }, msg: e.to_string() }
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Braid(_) => Failure::semantic(e),
            _ => Failure::parse(e),
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn analyze(curve: &PathBuf, side: Side, out: Option<&PathBuf>) -> Result<String, Failure> {
    let spec = CurveSpec::parse(&read(curve)?)?;
    let side = match side {
        Side::Right => BaseSide::Right,
        Side::Left => BaseSide::Left,
    };
    let table = lefschetz_table(&spec, side)?.to_string();
    match out {
        Some(p) => {
            fs::write(p, &table).map_err(|e| Failure::semantic(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(table),
    }
}

fn monodromy(table: &PathBuf, format: Format) -> Result<String, Failure> {
    let file = parse_table_file(&read(table)?)?;
    let factors = run_table_file(&file)?;
    let describer = (format != Format::Words).then(|| Describer::new(&file.table.labels));
    let mut out = String::new();
    if file.s2_mode {
        out.push_str("# phi_M = F1 * F1^(rho^-1)\n");
    }
    for f in &factors {
        let _ = write!(out, "j={} e={}", f.origin_j, f.epsilon);
        if format != Format::Pretty {
            let _ = write!(out, " word={}", f.braid());
        }
        if let Some(d) = &describer {
            let pretty = d.describe(&f.band, Kind::Halftwist, f.epsilon).map(|e| e.render());
            let _ = write!(out, " pretty={}", pretty.as_deref().unwrap_or("FLAG"));
        }
        out.push('\n');
    }
    Ok(out)
}

fn check(table: &PathBuf, expected: &PathBuf) -> Result<(String, bool), Failure> {
    let file = parse_table_file(&read(table)?)?;
    let labels = &file.table.labels;
    let exp = parse_expected(&read(expected)?, labels)?;
    let factors = run_table_file(&file)?;
    let report = compare(&factors, &exp, labels)?;
    Ok((format!("{report}\n"), report.all_match()))
}

fn dict() -> Result<(String, bool), Failure> {
    let mut out = String::new();
    let mut total = 0;
    let mut held = 0;
    // one line per entry; every entry is checked at two sizes and two k
    for i in 0..8 {
        let mut ok = true;
        let mut name = String::new();
        for n in [10, 12] {
            for k in [3, 4] {
                let case = entries(n, k).map_err(Failure::semantic)?.swap_remove(i);
                ok &= case.holds().map_err(Failure::semantic)?;
                if name.is_empty() {
                    name = case.to_string();
                }
            }
        }
        total += 1;
        held += usize::from(ok);
        let _ = writeln!(out, "{} {name}", if ok { "ok  " } else { "FAIL" });
    }
    let _ = writeln!(out, "{held}/{total}");
    Ok((out, held == total))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { curve, basepoint, out } => analyze(curve, *basepoint, out.as_ref()).map(|s| (s, true)),
        Command::Monodromy { table, format } => monodromy(table, *format).map(|s| (s, true)),
        Command::Check { table, expected } => check(table, expected),
        Command::Dict => dict(),
    };
    match result {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
