use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polecond::config::parse_number;
use polecond::experiment::build_mesh;
use polecond::plot::{plot_tables, PlotStyle};
use polecond::table::CsvTable;
use polecond::{export, run, sweep_convergence_space, sweep_convergence_time, sweep_nxi, write_atomic, CliError};
use polecond::ExperimentConfig;
use polecond_core::assembly::{assemble_global, Boundary};

#[derive(Parser)]
#[command(name = "polecond", version, about = "Time-dependent FEM with pole-condition transparent boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write the error/energy series as CSV.
    Run {
        config: PathBuf,
        /// Overrides `output` from the config; stdout if neither is set.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spatial convergence over FE orders and refinement levels.
    SweepSpace {
        config: PathBuf,
        #[arg(long, default_value = "1,2,3,4")]
        orders: String,
        /// `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "1..3")]
        levels: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Temporal convergence over a list of step sizes.
    SweepTime {
        config: PathBuf,
        #[arg(long, default_value = "1/800,1/1600")]
        dts: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Error against the number of Hardy coefficients per ray.
    SweepNxi {
        config: PathBuf,
        #[arg(long, default_value = "1,2,5,10,20")]
        nxi: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render CSV series as an SVG line plot.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        log_x: bool,
        #[arg(long)]
        linear_y: bool,
    },
    /// Export the mesh of a config as `v`/`t`/`r` lines.
    Mesh {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Dump one assembled matrix as `i j re im` lines.
    DumpMatrix {
        config: PathBuf,
        /// One of m0, mm1, mm2, l0, l1, d0, dm1.
        #[arg(long)]
        matrix: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn list<T>(text: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, CliError> {
    text.split(',').map(|s| parse(s.trim()).map_err(CliError::Config)).collect()
}

fn int(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not an integer"))
}

fn levels(text: &str) -> Result<Vec<usize>, CliError> {
    match text.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (int(a.trim()).map_err(CliError::Config)?, int(b.trim()).map_err(CliError::Config)?);
            if a > b {
                return Err(CliError::Config(format!("empty level range {text}")));
            }
            Ok((a..=b).collect())
        }
        None => list(text, int),
    }
}

fn emit(table: &CsvTable, path: Option<&Path>) -> Result<(), CliError> {
    let text = table.emit()?;
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = run(&cfg)?;
            let target = output.or_else(|| cfg.output.clone());
            emit(&CsvTable::from_run(&result), target.as_deref())?;
            match result.max_error {
                Some(e) => eprintln!("max relative error {e:.6e} ({:.1?})", result.wall_time),
                None => eprintln!("done ({:.1?})", result.wall_time),
            }
        }
        Command::SweepSpace { config, orders, levels: lv, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = sweep_convergence_space(&cfg, &list(&orders, int)?, &levels(&lv)?)?;
            for r in &rows {
                eprintln!("order {} level {}: {:.4e} rate {}", r.order, r.level, r.max_error, r.rate.map_or("-".into(), |v| format!("{v:.2}")));
            }
            emit(&CsvTable::from_space(&cfg, &rows), output.as_deref())?;
        }
        Command::SweepTime { config, dts, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = sweep_convergence_time(&cfg, &list(&dts, parse_number)?)?;
            for r in &rows {
                eprintln!("dt {:.3e}: {:.4e} rate {}", r.dt, r.max_error, r.rate.map_or("-".into(), |v| format!("{v:.2}")));
            }
            emit(&CsvTable::from_time(&cfg, &rows), output.as_deref())?;
        }
        Command::SweepNxi { config, nxi, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = sweep_nxi(&cfg, &list(&nxi, int)?)?;
            for r in &rows {
                eprintln!("n_xi {}: {:.4e}", r.n_xi, r.max_error);
            }
            emit(&CsvTable::from_nxi(&cfg, &rows), output.as_deref())?;
        }
        Command::Plot { csv, output, log_x, linear_y } => {
            let mut tables = Vec::new();
            for path in &csv {
                let text = std::fs::read_to_string(path)?;
                tables.push((path.display().to_string(), CsvTable::parse(&text)?));
            }
            let style = PlotStyle { log_x, log_y: !linear_y, ..PlotStyle::default() };
            write_atomic(&output, plot_tables(&tables, &style).as_bytes())?;
        }
        Command::Mesh { config, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            write_atomic(&output, export::mesh_text(&build_mesh(cfg.refinements)?).as_bytes())?;
        }
        Command::DumpMatrix { config, matrix, output } => {
            let cfg = ExperimentConfig::load(&config)?;
            let mesh = build_mesh(cfg.refinements)?;
            let spec = cfg.problem()?;
            let sys = assemble_global(&mesh, cfg.fe_order, Boundary::Transparent { n_xi: cfg.n_xi }, spec.params())
                .map_err(|e| CliError::Config(e.to_string()))?;
            let a = match matrix.as_str() {
                "m0" => &sys.m0,
                "mm1" => &sys.mm1,
                "mm2" => &sys.mm2,
                "l0" => &sys.l0,
                "l1" => &sys.l1,
                "d0" => &sys.d0,
                "dm1" => &sys.dm1,
                other => return Err(CliError::Config(format!("unknown matrix `{other}`"))),
            };
            write_atomic(&output, export::matrix_text(a).as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
