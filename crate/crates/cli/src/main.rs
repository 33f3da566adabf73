use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use crystfib::atlas::Atlas;
use crystfib::fiberclass::fibration_rows;
use crystfib::groupcore::{betti1, center, torus_bundle_base, transfer_kernel, SpaceGroup};
use crystfib::normsub::is_reducible;
use crystfib::symparse::GroupId;
use crystfib::verify::{self, SuiteReport};
use rayon::prelude::*;
use thiserror::Error;

use crystfib_cli::report::{write_csv, ReportRow, TableRow};

#[derive(Parser)]
#[command(
    name = "crystfib",
    version,
    about = "Fibrations of flat orbifolds of plane and space groups"
)]
struct Cli {
    /// Extra catalog merged over the bundled one.
    #[arg(long, global = true, env = "CRYSTFIB_CATALOG")]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of one group.
    Analyze { id: String },
    /// Fibration classes of one group.
    Fibrations {
        id: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Coefficient bound for families of invariant lines.
        #[arg(long, default_value_t = 2)]
        bound: u32,
    },
    /// Fibration table for a range of IT numbers, written as CSV.
    Table {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        from: Option<u32>,
        #[arg(long)]
        to: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: u32,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random subgroups drawn by the props suite.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    #[value(name = "2d")]
    Plane,
    Table1,
    Props,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Atlas(#[from] crystfib::atlas::AtlasError),
    #[error(transparent)]
    Fiber(#[from] crystfib::fiberclass::FiberError),
    #[error("{0}: {1}")]
    Io(String, io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    Failed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed => 1,
            _ => 2,
        }
    }
}

fn io_err(what: impl AsRef<Path>) -> impl FnOnce(io::Error) -> CliError {
    let what = what.as_ref().display().to_string();
    move |e| CliError::Io(what, e)
}

fn load_atlas(catalog: Option<&Path>) -> Result<Atlas, CliError> {
    let mut atlas = Atlas::load_default()?;
    if let Some(path) = catalog {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        atlas.extend_from_text(&text, &path.display().to_string())?;
    }
    Ok(atlas)
}

fn rows_for(
    atlas: &Atlas,
    id: GroupId,
    g: &Arc<SpaceGroup>,
    bound: u32,
) -> Result<Vec<ReportRow>, CliError> {
    let name = atlas.name(id);
    Ok(fibration_rows(g, bound)?
        .iter()
        .enumerate()
        .map(|(i, r)| ReportRow::new(&id.to_string(), name, i + 1, r))
        .collect())
}

fn analyze(atlas: &Atlas, id: &str) -> Result<(), CliError> {
    let rid = atlas.resolve(id)?;
    let g = atlas.get(id)?;
    let z = center(&g);
    let tk = transfer_kernel(&g);
    let mut out = io::stdout().lock();
    let mut line = |k: &str, v: String| writeln!(out, "{k:<20} {v}").map_err(io_err("stdout"));
    line("group", format!("{rid} {}", atlas.name(rid)))?;
    if rid.to_string() != id.trim() {
        line("requested", id.trim().to_string())?;
    }
    line("dimension", g.dim().to_string())?;
    line("point group order", g.order().to_string())?;
    line("betti number", betti1(&g).to_string())?;
    line("center rank", z.rank().to_string())?;
    line("center span", z.span().to_string())?;
    line("transfer kernel", tk.span().to_string())?;
    if let Ok(tb) = torus_bundle_base(&g) {
        let show = |c: Option<crystfib::OrbifoldClass>| {
            c.map_or("-".to_string(), |c| c.symbol().to_string())
        };
        line(
            "torus bundle",
            format!("fiber {} base {}", show(tb.fiber), show(tb.base())),
        )?;
    }
    line("reducible", is_reducible(&g).to_string())?;
    Ok(())
}

fn fibrations(atlas: &Atlas, id: &str, format: Format, bound: u32) -> Result<(), CliError> {
    let rid = atlas.resolve(id)?;
    let g = atlas.get(id)?;
    let rows = rows_for(atlas, rid, &g, bound)?;
    if rows.is_empty() {
        eprintln!("note: {rid} is irreducible and has no fibrations");
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out).map_err(io_err("stdout"))?;
        }
        Format::Csv => write_csv(&rows, &mut out)?,
        Format::Text if rows.is_empty() => {}
        Format::Text => {
            writeln!(
                out,
                "{:>3}  {:<6} {:<6} {:<5} | {:<6} {:<8} {:<5} {:>5}  spans K | N",
                "row", "fiber", "base", "split", "cofib", "base", "split", "index"
            )
            .map_err(io_err("stdout"))?;
            for r in &rows {
                let yn = |b: bool| if b { "yes" } else { "no" };
                let base = match r.base {
                    crystfib::OrbifoldClass::Circle => "circle",
                    crystfib::OrbifoldClass::Interval => "interval",
                    other => other.symbol(),
                };
                writeln!(
                    out,
                    "{:>3}  {:<6} {:<6} {:<5} | {:<6} {:<8} {:<5} {:>5}  {} | {}",
                    r.row,
                    r.seifert_fiber.symbol(),
                    r.seifert_base.symbol(),
                    yn(r.seifert_split),
                    r.cofiber.symbol(),
                    base,
                    yn(r.coseifert_split),
                    r.index,
                    r.k_span,
                    r.n_span
                )
                .map_err(io_err("stdout"))?;
            }
        }
    }
    Ok(())
}

fn table(
    atlas: &Atlas,
    dim: usize,
    from: Option<u32>,
    to: Option<u32>,
    out: &Path,
    bound: u32,
) -> Result<(), CliError> {
    let ids: Vec<GroupId> = atlas
        .ids(dim)
        .into_iter()
        .filter(|id| from.is_none_or(|a| id.it >= a) && to.is_none_or(|b| id.it <= b))
        .collect();
    if ids.is_empty() {
        return Err(CliError::Usage(format!(
            "no groups of dimension {dim} in the requested range"
        )));
    }
    let per_group: Vec<Result<Vec<TableRow>, CliError>> = ids
        .par_iter()
        .map(|&id| {
            let g = atlas.group(id).expect("listed id");
            Ok(rows_for(atlas, id, &g, bound)?
                .iter()
                .map(|r| r.table_row(id.it))
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_group {
        rows.extend(r?);
    }
    let result = File::create(out).map_err(io_err(out)).and_then(|f| {
        let mut w = BufWriter::new(f);
        write_csv(&rows, &mut w)?;
        w.flush().map_err(io_err(out))
    });
    if result.is_err() {
        let _ = fs::remove_file(out);
    }
    result?;
    eprintln!(
        "wrote {} rows for {} groups to {}",
        rows.len(),
        ids.len(),
        out.display()
    );
    Ok(())
}

fn run_suite(atlas: &Atlas, suite: Suite, bound: u32, seed: u64, samples: usize) -> SuiteReport {
    match suite {
        Suite::Plane => verify::suite_2d(atlas),
        Suite::Table1 => verify::suite_table1_with(atlas, bound, |its, f| {
            its.par_iter().map(|&it| f(it)).collect()
        }),
        Suite::Props => verify::suite_props(atlas, seed, samples),
    }
}

fn table1_summary(r: &SuiteReport) -> String {
    let reducible: Vec<u32> = crystfib::oracle::table1_its();
    let its = |c: &verify::CaseReport| c.case.trim_start_matches("3/").parse::<u32>().unwrap_or(0);
    let count = |low: bool| {
        let cases: Vec<_> = r
            .cases
            .iter()
            .filter(|c| verify::low_symmetry(its(c)) == low)
            .collect();
        (cases.iter().filter(|c| c.passed).count(), cases.len())
    };
    let (lp, lt) = count(true);
    let (hp, ht) = count(false);
    let compared = r
        .cases
        .iter()
        .filter(|c| reducible.contains(&its(c)))
        .count();
    format!("{compared} reducible groups compared; triclinic and monoclinic {lp}/{lt} pass; other families {hp}/{ht} pass")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let atlas = load_atlas(cli.catalog.as_deref())?;
    match cli.command {
        Command::Analyze { id } => analyze(&atlas, &id),
        Command::Fibrations { id, format, bound } => fibrations(&atlas, &id, format, bound),
        Command::Table {
            dim,
            from,
            to,
            out,
            bound,
        } => table(&atlas, dim, from, to, &out, bound),
        Command::Verify {
            suite,
            bound,
            seed,
            samples,
        } => {
            let report = run_suite(&atlas, suite, bound, seed, samples);
            println!("{report}");
            if matches!(suite, Suite::Table1) {
                println!("{}", table1_summary(&report));
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Failed)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
