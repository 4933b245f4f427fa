//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 the frame check
//! failed, 3 the missing samples are not recoverable, 4 numerical failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::duals::{projection_defect, write_fourier_csv, write_time_csv, DualSet};
use crate::error::Error;
use crate::experiment::{degradation, run_recovery, RecoveryRun, Setup};
use crate::gramian::{verify_frame, FrameReport};
use crate::recovery::{recoverable, write_report_csv, MissingIndexSet};
use crate::sampling::{read_samples_csv, reconstruction_error, take_samples, write_reconstruction_csv, write_samples_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_FRAME: i32 = 2;
pub const EXIT_NOT_RECOVERABLE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "bandframe", version, about = "Derivative oversampling frames and missing-sample recovery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (flat key = value)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV and report files
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for random test signals
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Frequency grid density for the frame check (points per unit)
    #[arg(long, global = true)]
    pub grid_density: Option<f64>,
    /// Sample window radius
    #[arg(long, global = true)]
    pub window_radius: Option<i64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Verify the frame conditions on a frequency grid
    CheckFrame,
    /// Emit dual generators in frequency and time
    Duals,
    /// Emit the samples of the configured signal
    Sample,
    /// Reconstruct from samples and report the error
    Reconstruct,
    /// Withhold and recover the configured missing samples
    Recover,
    /// Frame check, duals, degradation and recovery in one run
    Experiment,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Lib(#[from] Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Lib(Error::Domain(_)) => EXIT_USAGE,
            CliError::Lib(Error::NotRecoverable { .. }) => EXIT_NOT_RECOVERABLE,
            CliError::Lib(_) => EXIT_NUMERIC,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = cli.grid_density {
        cfg.grid_density = d;
    }
    if let Some(r) = cli.window_radius {
        cfg.window_radius = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io { path: "<stdout>".into(), message: e.to_string() }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = load_config(cli)?;
    fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Io { path: cli.out.display().to_string(), message: e.to_string() })?;
    let setup = Setup::new(&cfg, cli.seed)?;
    let p = &setup.params;
    writeln!(
        out,
        "omega = {:.16e}\nt0 = {:.16e}\nh = {:.16e}\nell = {}\nregime = {}\nlength = {}\norder = {}",
        p.omega,
        p.t0,
        p.h,
        p.ell,
        p.regime,
        p.length,
        setup.gens.len()
    )
    .map_err(io_err)?;
    let dir = cli.out.as_path();
    match cli.command {
        Command::CheckFrame => {
            let rep = check_frame(&cfg, &setup, dir, out)?;
            Ok(if rep.is_frame { EXIT_OK } else { EXIT_NOT_FRAME })
        }
        Command::Duals => {
            duals(&cfg, &setup, dir, out)?;
            Ok(EXIT_OK)
        }
        Command::Sample => {
            let s = take_samples(&setup.signal, p, (-cfg.window_radius, cfg.window_radius))?;
            write_samples_csv(&s, create(dir, "samples.csv")?)?;
            writeln!(out, "samples = {}", s.channels * s.indices().count()).map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Reconstruct => {
            reconstruct(&cfg, &setup, dir, out)?;
            Ok(EXIT_OK)
        }
        Command::Recover => recover(&cfg, &setup, dir, out),
        Command::Experiment => {
            let rep = check_frame(&cfg, &setup, dir, out)?;
            if !rep.is_frame {
                return Ok(EXIT_NOT_FRAME);
            }
            let d = duals(&cfg, &setup, dir, out)?;
            let (base, zeroed) = degradation(&cfg, &setup, &d)?;
            writeln!(
                out,
                "degradation: zeroed = {:?}\n  sup_error_full = {base:.16e}\n  sup_error_zeroed = {zeroed:.16e}\n  ratio = {:.16e}",
                cfg.zeroed,
                zeroed / base
            )
            .map_err(io_err)?;
            recover(&cfg, &setup, dir, out)
        }
    }
}

fn check_frame(cfg: &ExperimentConfig, setup: &Setup, dir: &Path, out: &mut dyn Write) -> CliResult<FrameReport> {
    let rep = verify_frame(&setup.gens, &setup.params, cfg.grid_density)?;
    write!(out, "{rep}").map_err(io_err)?;
    let mut txt = create(dir, "frame_report.txt")?;
    write!(txt, "{rep}").map_err(io_err)?;
    txt.flush().map_err(io_err)?;
    let mut w = csv::Writer::from_writer(create(dir, "frame_report.csv")?);
    let rows = [
        ("is_frame", rep.is_frame.to_string()),
        ("is_riesz", rep.is_riesz.to_string()),
        ("delta", format!("{:.16e}", rep.delta)),
        ("gamma", format!("{:.16e}", rep.gamma)),
        ("sigma", format!("{:.16e}", rep.sigma)),
        ("eta", format!("{:.16e}", rep.eta)),
        ("grid_density", format!("{:.16e}", rep.grid_density)),
        ("violations", rep.violations.len().to_string()),
    ];
    let csv_io = |e: csv::Error| CliError::Io { path: "frame_report.csv".into(), message: e.to_string() };
    w.write_record(["field", "value"]).map_err(csv_io)?;
    for (k, v) in rows {
        w.write_record([k, v.as_str()]).map_err(csv_io)?;
    }
    w.flush().map_err(io_err)?;
    Ok(rep)
}

fn duals(cfg: &ExperimentConfig, setup: &Setup, dir: &Path, out: &mut dyn Write) -> CliResult<DualSet> {
    let d = setup.duals(cfg)?;
    writeln!(out, "dual_path = {}", d.path()).map_err(io_err)?;
    if let DualSet::Numeric(n) = &d {
        let (idem, herm) = projection_defect(&setup.gens, &d, &setup.params, 16)?;
        writeln!(
            out,
            "max_pre_gramian_cond = {:.16e}\nprojection_defect = {idem:.16e}\nhermitian_defect = {herm:.16e}",
            n.max_cond
        )
        .map_err(io_err)?;
    }
    write_fourier_csv(&d, cfg.eval_points, create(dir, "duals_fourier.csv")?)?;
    write_time_csv(&d, cfg.eval_from, cfg.eval_to, cfg.eval_points, create(dir, "duals_time.csv")?)?;
    Ok(d)
}

fn reconstruct(cfg: &ExperimentConfig, setup: &Setup, dir: &Path, out: &mut dyn Write) -> CliResult<()> {
    setup.require_frame_length()?;
    let d = setup.duals(cfg)?;
    let s = match &cfg.samples_file {
        Some(path) => {
            let f = File::open(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
            read_samples_csv(&setup.params, f)?
        }
        None => take_samples(&setup.signal, &setup.params, (-cfg.window_radius, cfg.window_radius))?,
    };
    let m = reconstruction_error(&setup.signal, &s, &d, (cfg.eval_from, cfg.eval_to), cfg.eval_points)?;
    write_reconstruction_csv(&m, create(dir, "reconstruction.csv")?)?;
    writeln!(out, "dual_path = {}\nsup_error = {:.16e}\nrms_error = {:.16e}", m.path, m.sup, m.rms).map_err(io_err)?;
    Ok(())
}

fn recover(cfg: &ExperimentConfig, setup: &Setup, dir: &Path, out: &mut dyn Write) -> CliResult<i32> {
    let d = setup.duals(cfg)?;
    let run = match run_recovery(cfg, setup, &d) {
        Ok(r) => r,
        Err(e @ Error::NotRecoverable { .. }) => {
            let lambda = cfg.lambda.unwrap_or(setup.params.length);
            let miss = MissingIndexSet::new(cfg.missing.clone(), lambda, setup.params.length)?;
            if let Ok(c) = recoverable(&setup.gens, &setup.params, &miss) {
                writeln!(out, "certificate: recoverable = {} method = {:?}", c.recoverable, c.method).map_err(io_err)?;
                if let Some(ev) = c.max_eigenvalue {
                    writeln!(out, "  max_eigenvalue = {ev:.16e}").map_err(io_err)?;
                }
            }
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_report_csv(&run.outcome, &run.truth, create(dir, "recovery_report.csv")?)?;
    write_recovery_reconstruction(&run, create(dir, "recovery_reconstruction.csv")?)?;
    writeln!(
        out,
        "missing = {:?}\nlambda = {}\nrecovery_radius = {}\ncond = {:.16e}\nhermitian_defect = {:.16e}\nresidual = {:.16e}\nmax_abs_error = {:.16e}\nmax_rel_error = {:.16e}\nsup_error_full = {:.16e}\nsup_error_zeroed = {:.16e}\nsup_error_recovered = {:.16e}",
        run.miss.indices,
        run.miss.lambda,
        cfg.recovery_window(),
        run.outcome.cond,
        run.hermitian_defect,
        run.outcome.residual,
        run.max_abs,
        run.max_rel,
        run.sup_full(),
        run.sup_zeroed(),
        run.sup_recovered()
    )
    .map_err(io_err)?;
    if let Some(w) = &run.outcome.warning {
        writeln!(out, "warning: {w}").map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn write_recovery_reconstruction<W: Write>(run: &RecoveryRun, out: W) -> CliResult<()> {
    let csv_io = |e: csv::Error| CliError::Io { path: "recovery_reconstruction.csv".into(), message: e.to_string() };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "f_true", "f_recon_full", "f_recon_zeroed", "f_recon_recovered", "err_full", "err_zeroed", "err_recovered"])
        .map_err(csv_io)?;
    for i in 0..run.xs.len() {
        let t = run.f_true[i];
        let vals = [run.xs[i], t, run.f_full[i], run.f_zeroed[i], run.f_recovered[i]];
        let errs = [run.f_full[i] - t, run.f_zeroed[i] - t, run.f_recovered[i] - t].map(f64::abs);
        let rec: Vec<String> = vals.iter().chain(&errs).map(|v| format!("{v:.16e}")).collect();
        w.write_record(&rec).map_err(csv_io)?;
    }
    w.flush().map_err(io_err)
}
