//! Command-line front end: `solve`, `scan`, `wavefunction`, `series-compare`.
//!
//! Exit codes: 0 on success, 2 when the requested state does not exist
//! (no bound state or empty support), 1 on any other error.

pub mod config;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::deformation::{DeformationFamily, FamilyKind};
use crate::error::{Error, Result};
use crate::kinematics::TwoBodySystem;
use crate::perturbation::{series_cutoff_distinct, series_cutoff_identical, series_inversesqrt_identical};
use crate::spectrum::{scan_p0, solve, solve_coulomb_levels, BoundState, Interaction};
use crate::wavefunction::build_wavefunction;

use config::{parse_pairs, split_assignment, OutputFormat, RunConfig, SeriesRegime};
use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NO_STATE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "minlen",
    version,
    about = "Two-body bound states in deformed algebras with a minimal length"
)]
pub struct Cli {
    /// Configuration file with `section.key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true, value_parser = parse_override)]
    pub overrides: Vec<(String, String)>,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_parser = ["csv", "json"])]
    pub format: Option<String>,

    /// Print the fully resolved configuration and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Solve one level (or levels 0..=solve.n_max for Coulomb) at solve.p0.
    Solve,
    /// Solve the level over solve.p0_grid.
    Scan,
    /// Export the momentum-space wavefunction at solve.p0.
    Wavefunction,
    /// Compare numerical energies against the perturbative series.
    SeriesCompare,
}

fn parse_override(s: &str) -> std::result::Result<(String, String), String> {
    split_assignment(s)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(code) => code,
        Err(e @ (Error::NoBoundState(_) | Error::EmptySupport { .. })) => {
            eprintln!("{e}");
            EXIT_NO_STATE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("MINLEN_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring MINLEN_THREADS='{v}'"),
        }
    }
}

/// Merges the config file, `--set` overrides and output flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut pairs = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_pairs(&text)?
        }
        None => Default::default(),
    };
    for (k, v) in &cli.overrides {
        pairs.insert(k.clone(), v.clone());
    }
    if let Some(f) = &cli.format {
        pairs.insert("output.format".into(), f.clone());
    }
    if let Some(out) = &cli.out {
        pairs.insert("output.path".into(), out.display().to_string());
    }
    RunConfig::from_pairs(&pairs)
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = resolve_config(cli)?;
    if cli.dump_config {
        emit(&cfg, &cfg.dump())?;
        return Ok(EXIT_OK);
    }
    let Some(command) = cli.command else {
        return Err(Error::Config(
            "a subcommand is required (solve, scan, wavefunction, series-compare)".into(),
        ));
    };
    let (table, code) = match command {
        Command::Solve => cmd_solve(&cfg)?,
        Command::Scan => (cmd_scan(&cfg)?, EXIT_OK),
        Command::Wavefunction => (cmd_wavefunction(&cfg)?, EXIT_OK),
        Command::SeriesCompare => (cmd_series_compare(&cfg)?, EXIT_OK),
    };
    let text = match cfg.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    };
    emit(&cfg, &text)?;
    Ok(code)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn level(cfg: &RunConfig, interaction: &Interaction) -> Option<u32> {
    (!interaction.is_delta()).then_some(cfg.n)
}

fn state_row(s: &BoundState) -> Vec<Cell> {
    vec![
        s.n.map_or(Cell::Empty, Cell::Int),
        Cell::Num(s.p0),
        Cell::Num(s.energy),
        Cell::Num(s.s),
        Cell::Num(s.residual),
        Cell::Num(s.support.c1),
        Cell::Num(s.support.c2),
        Cell::Text(s.support.label.to_string()),
    ]
}

/// `n,p0,E,s,residual,c1,c2,domain`; levels `0..=n_max` when set for Coulomb.
pub fn cmd_solve(cfg: &RunConfig) -> Result<(Table, i32)> {
    let sys = cfg.system()?;
    let interaction = cfg.interaction()?;
    let mut table = Table::new(&["n", "p0", "E", "s", "residual", "c1", "c2", "domain"]);
    match (interaction, cfg.n_max) {
        (Interaction::Coulomb { .. }, Some(n_max)) => {
            let levels = solve_coulomb_levels(&sys, &interaction, cfg.p0, n_max, cfg.tol)?;
            if levels.is_empty() {
                return Err(Error::NoBoundState(format!("no Coulomb level at p0 = {}", cfg.p0)));
            }
            for s in &levels {
                table.push(state_row(s));
            }
        }
        _ => {
            let s = solve(&sys, &interaction, cfg.p0, level(cfg, &interaction), cfg.tol)?;
            table.push(state_row(&s));
        }
    }
    Ok((table, EXIT_OK))
}

/// `p0,E,residual,domain`; failed points keep empty `E` and `residual`.
pub fn cmd_scan(cfg: &RunConfig) -> Result<Table> {
    let sys = cfg.system()?;
    let interaction = cfg.interaction()?;
    let grid = cfg.p0_grid.clone().unwrap_or_else(|| vec![cfg.p0]);
    let mut table = Table::new(&["p0", "E", "residual", "domain"]);
    for (p0, result) in scan_p0(&sys, &interaction, &grid, level(cfg, &interaction), cfg.tol) {
        let domain = Cell::Text(sys.momentum_support(p0).label.to_string());
        match result {
            Ok(s) => table.push(vec![Cell::Num(p0), Cell::Num(s.energy), Cell::Num(s.residual), domain]),
            Err(e) => {
                eprintln!("p0 = {p0}: {e}");
                table.push(vec![Cell::Num(p0), Cell::Empty, Cell::Empty, domain]);
            }
        }
    }
    Ok(table)
}

/// `p,re,im,abs2` on the wavefunction grid.
pub fn cmd_wavefunction(cfg: &RunConfig) -> Result<Table> {
    let sys = cfg.system()?;
    let interaction = cfg.interaction()?;
    let state = solve(&sys, &interaction, cfg.p0, level(cfg, &interaction), cfg.tol)?;
    let wf = build_wavefunction(&state, &sys, &interaction, cfg.grid_size)?;
    let mut table = Table::new(&["p", "re", "im", "abs2"]);
    for (p, v) in wf.grid.iter().zip(&wf.values) {
        table.push(vec![
            Cell::Num(*p),
            Cell::Num(v.re),
            Cell::Num(v.im),
            Cell::Num(v.norm_sqr()),
        ]);
    }
    Ok(table)
}

struct SeriesPoint {
    param: f64,
    numeric: Option<f64>,
    series: f64,
}

fn series_point(cfg: &RunConfig, interaction: &Interaction, kappa: f64, v: f64) -> Result<SeriesPoint> {
    let s = &cfg.series;
    let (sys, prediction) = match (s.family, s.regime) {
        (FamilyKind::Cutoff, SeriesRegime::Distinct) => {
            let sys = TwoBodySystem::new(
                cfg.m1,
                DeformationFamily::cutoff(s.b1_ratio * v)?,
                cfg.m2,
                DeformationFamily::cutoff(v)?,
                cfg.hbar,
            )?;
            let pred = series_cutoff_distinct(&sys, kappa, cfg.p0, v)?;
            (sys, pred)
        }
        (FamilyKind::Cutoff, SeriesRegime::Identical) => {
            let sys = identical(cfg, DeformationFamily::cutoff(v)?)?;
            let pred = series_cutoff_identical(&sys, kappa, cfg.p0, v)?;
            (sys, pred)
        }
        (FamilyKind::InverseSqrt, SeriesRegime::Identical) => {
            let sys = identical(cfg, DeformationFamily::inverse_sqrt(v)?)?;
            let pred = series_inversesqrt_identical(&sys, kappa, cfg.p0, v)?;
            (sys, pred)
        }
        _ => {
            return Err(Error::Config(
                "series-compare supports cutoff (identical|distinct) and inverse_sqrt (identical)".into(),
            ))
        }
    };
    if let Some(w) = &prediction.warning {
        eprintln!("warning: {w}");
    }
    let numeric = match solve(&sys, interaction, cfg.p0, level(cfg, interaction), cfg.tol) {
        Ok(st) => Some(st.energy),
        Err(e) => {
            eprintln!("parameter {v}: {e}");
            None
        }
    };
    Ok(SeriesPoint {
        param: v,
        numeric,
        series: prediction.total,
    })
}

fn identical(cfg: &RunConfig, family: DeformationFamily) -> Result<TwoBodySystem> {
    if cfg.m1 != cfg.m2 {
        return Err(Error::Config(
            "identical series regime needs system.m1 = system.m2".into(),
        ));
    }
    TwoBodySystem::identical(cfg.m1, family, cfg.hbar)
}

/// `param,E_numeric,E_series,abs_diff,fitted_order`. The fitted order is the
/// log-log slope of `abs_diff` against `1/b` (cutoff) or `beta`
/// (inverse_sqrt) between consecutive rows.
pub fn cmd_series_compare(cfg: &RunConfig) -> Result<Table> {
    let interaction = cfg.interaction()?;
    let kappa = interaction.kappa(cfg.hbar, cfg.n)?;
    let points: Vec<SeriesPoint> = cfg
        .series
        .values
        .par_iter()
        .map(|&v| series_point(cfg, &interaction, kappa, v))
        .collect::<Result<_>>()?;
    let abscissa = |v: f64| {
        if cfg.series.family == FamilyKind::Cutoff {
            1.0 / v
        } else {
            v
        }
    };
    let mut table = Table::new(&["param", "E_numeric", "E_series", "abs_diff", "fitted_order"]);
    let mut prev: Option<(f64, f64)> = None;
    for p in &points {
        let diff = p.numeric.map(|e| (e - p.series).abs());
        let order = match (prev, diff) {
            (Some((x0, d0)), Some(d)) if d > 0.0 && d0 > 0.0 => {
                let x = abscissa(p.param);
                Cell::Num((d / d0).ln() / (x / x0).ln())
            }
            _ => Cell::Empty,
        };
        prev = diff.map(|d| (abscissa(p.param), d));
        table.push(vec![
            Cell::Num(p.param),
            p.numeric.map_or(Cell::Empty, Cell::Num),
            Cell::Num(p.series),
            diff.map_or(Cell::Empty, Cell::Num),
            order,
        ]);
    }
    Ok(table)
}
