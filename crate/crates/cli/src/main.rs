use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resonax::output::{emit_figure_data, emit_table};
use resonax::run::{oracle_check, trace_roots};
use resonax::{presets, run, solve, CliError, Format, Result, RunConfig, RunReport};

#[derive(Parser)]
#[command(name = "resonax", version, about = "Resonances by trace-optimized Rayleigh-Ritz")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Diagonalize at a single dimension (the first of ladder.M unless --m).
    Solve {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Run the whole ladder and report the stabilized eigenvalues.
    Ladder {
        #[command(flatten)]
        io: Io,
    },
    /// List every stationary point of the trace at each rung.
    TraceRoots {
        #[command(flatten)]
        io: Io,
    },
    /// Compare matrix elements against brute-force quadrature.
    OracleCheck {
        #[command(flatten)]
        io: Io,
    },
    /// Run a bundled config; `list` prints the names.
    Preset {
        name: String,
        #[arg(long, value_enum)]
        format: Option<OutFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write figure data (JSON) here.
        #[arg(long)]
        figure: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Io {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write figure data (JSON) here.
    #[arg(long)]
    figure: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Io {
            path: p.to_path_buf(),
            source: e,
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

struct Target {
    format: Format,
    out: Option<PathBuf>,
    figure: Option<PathBuf>,
}

impl Target {
    fn new(cfg: &RunConfig, format: Option<OutFormat>, out: Option<PathBuf>, figure: Option<PathBuf>) -> Self {
        Target {
            format: format.map(Format::from).unwrap_or(cfg.output.format),
            out: out.or_else(|| cfg.output.path.clone()),
            figure: figure.or_else(|| cfg.output.figure.clone()),
        }
    }

    fn report(&self, cfg: &RunConfig, report: &RunReport) -> Result<()> {
        emit_table(report, self.format, sink(self.out.as_deref())?)?;
        if let Some(fig) = &self.figure {
            emit_figure_data(cfg, report, sink(Some(fig))?)?;
        }
        eprintln!("finished in {:.2} s", report.timing.0.as_secs_f64());
        Ok(())
    }

    fn rows<S: serde::Serialize>(&self, rows: &[S], csv_rows: impl Fn(&mut csv::Writer<Box<dyn Write>>) -> Result<()>) -> Result<()> {
        let mut out = sink(self.out.as_deref())?;
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, rows)?;
                out.write_all(b"\n")?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                csv_rows(&mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn pairs(z: &[[f64; 2]]) -> String {
    z.iter().map(|p| format!("{}{:+}i", p[0], p[1])).collect::<Vec<_>>().join(" ")
}

fn exec(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Solve { io, m } => {
            let cfg = RunConfig::load(&io.config)?;
            let m = m.unwrap_or(cfg.ladder.m[0]);
            let t = Target::new(&cfg, io.format, io.out, None);
            let report = solve(&cfg, m)?;
            emit_table(&report, t.format, sink(t.out.as_deref())?)?;
        }
        Cmd::Ladder { io } => {
            let cfg = RunConfig::load(&io.config)?;
            Target::new(&cfg, io.format, io.out, io.figure).report(&cfg, &run(&cfg)?)?;
        }
        Cmd::Preset { name, format, out, figure } => {
            if name == "list" {
                for n in presets::names() {
                    println!("{n}");
                }
                return Ok(true);
            }
            let cfg = presets::load(&name)?;
            Target::new(&cfg, format, out, figure).report(&cfg, &run(&cfg)?)?;
        }
        Cmd::TraceRoots { io } => {
            let cfg = RunConfig::load(&io.config)?;
            let rows = trace_roots(&cfg)?;
            Target::new(&cfg, io.format, io.out, None).rows(&rows, |w| {
                w.write_record(["sector", "M", "params", "residual", "valid", "selected"])?;
                for r in &rows {
                    w.write_record([
                        r.sector.clone(),
                        r.m.to_string(),
                        pairs(&r.params),
                        r.residual.to_string(),
                        r.valid.to_string(),
                        r.selected.to_string(),
                    ])?;
                }
                Ok(())
            })?;
        }
        Cmd::OracleCheck { io } => {
            let cfg = RunConfig::load(&io.config)?;
            let rows = oracle_check(&cfg)?;
            Target::new(&cfg, io.format, io.out, None).rows(&rows, |w| {
                w.write_record(["sector", "M", "params", "max_error", "tolerance", "pass"])?;
                for r in &rows {
                    w.write_record([
                        r.sector.clone(),
                        r.m.to_string(),
                        pairs(&r.params),
                        r.max_error.to_string(),
                        r.tolerance.to_string(),
                        r.pass.to_string(),
                    ])?;
                }
                Ok(())
            })?;
            return Ok(rows.iter().all(|r| r.pass));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match exec(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
