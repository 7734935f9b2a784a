use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use andreev_core::harness::compare::CompareRow;
use andreev_core::harness::config::TableDConfig;
use andreev_core::harness::gnuplot::{write_script, Plot};
use andreev_core::harness::{
    compare_report, run_hardwall, run_spectrum, run_widths, table_d, write_csv, CompareReport, HarnessError, RunConfig,
    SpectrumRow, TableDRow, WidthFit, WidthRow,
};

#[derive(Parser)]
#[command(
    name = "andreev",
    version,
    about = "Andreev levels and resonance widths of gated SNS junctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long)]
    emit_gnuplot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Levels and supercurrents over the (method, h, phi) sweep.
    Spectrum(Common),
    /// Resonance widths and the ln Gamma vs 1/h fit.
    Widths(Common),
    /// Semiclassical levels against direct and hard-wall levels.
    Compare(Common),
    /// Hard-wall levels over the sweep.
    Hardwall(Common),
    /// Table of D_nu(z); the `table_d` block of the config is used when given.
    #[command(name = "table-D")]
    TableD {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

enum Failure {
    Harness(HarnessError),
    Acceptance(CompareReport),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Harness(e)
    }
}

fn load(path: &Path) -> Result<andreev_core::harness::Resolved, HarnessError> {
    Ok(RunConfig::from_path(path)?.resolve()?)
}

fn prepare(out: &OutArgs) -> Result<(), HarnessError> {
    std::fs::create_dir_all(&out.out).map_err(|e| HarnessError::Io {
        path: out.out.display().to_string(),
        source: e,
    })
}

fn emit<R: serde::Serialize>(
    out: &OutArgs,
    name: &str,
    header: &[&str],
    rows: &[R],
    plot: Option<Plot>,
) -> Result<(), HarnessError> {
    write_csv(&out.out.join(name), header, rows)?;
    if let (true, Some(p)) = (out.emit_gnuplot, plot) {
        write_script(&out.out, p, name)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(c) => {
            let r = load(&c.config)?;
            prepare(&c.out)?;
            let rows: Vec<SpectrumRow> = run_spectrum(&r, c.out.jobs)?;
            emit(
                &c.out,
                &r.config.output.spectrum,
                &SpectrumRow::HEADER,
                &rows,
                Some(Plot::Spectrum),
            )?;
        }
        Command::Hardwall(c) => {
            let r = load(&c.config)?;
            prepare(&c.out)?;
            let rows = run_hardwall(&r, c.out.jobs)?;
            emit(
                &c.out,
                &r.config.output.hardwall,
                &SpectrumRow::HEADER,
                &rows,
                Some(Plot::Spectrum),
            )?;
        }
        Command::Widths(c) => {
            let r = load(&c.config)?;
            prepare(&c.out)?;
            let w = run_widths(&r, c.out.jobs)?;
            emit(
                &c.out,
                &r.config.output.widths,
                &WidthRow::HEADER,
                &w.rows,
                Some(Plot::Widths),
            )?;
            emit(
                &c.out,
                &r.config.output.widths_fit,
                &WidthFit::HEADER,
                std::slice::from_ref(&w.fit),
                None,
            )?;
            if w.fit.status != "ok" {
                eprintln!("slope fit {}", w.fit.status);
            }
        }
        Command::Compare(c) => {
            let r = load(&c.config)?;
            prepare(&c.out)?;
            let rep = compare_report(&r, c.out.jobs)?;
            let name = &r.config.output.compare;
            emit(&c.out, name, &CompareRow::HEADER, &rep.rows, Some(Plot::Compare))?;
            let txt = c
                .out
                .out
                .join(format!("{}.txt", name.strip_suffix(".csv").unwrap_or(name)));
            std::fs::write(&txt, &rep.text).map_err(|e| HarnessError::Io {
                path: txt.display().to_string(),
                source: e,
            })?;
            print!("{}", rep.text);
            if !rep.passed() {
                return Err(Failure::Acceptance(rep));
            }
        }
        Command::TableD { config, out } => {
            let (cfg, name) = match config {
                Some(p) => {
                    let r = load(&p)?;
                    (r.config.table_d.clone(), r.config.output.table_d.clone())
                }
                None => (TableDConfig::default(), "table_d.csv".to_string()),
            };
            prepare(&out)?;
            let rows: Vec<TableDRow> = table_d(&cfg);
            emit(&out, &name, &TableDRow::HEADER, &rows, Some(Plot::TableD))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Harness(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
        Err(Failure::Acceptance(rep)) => {
            for v in &rep.violations {
                eprintln!("acceptance violated: {v}");
            }
            ExitCode::from(3)
        }
    }
}
