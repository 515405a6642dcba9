//! Front end of the `wigner-frames` binary.
//!
//! Reports go to stdout as `key=value` lines, prose to stderr. Exit codes:
//! 0 success, 1 verification or numerical failure, 2 bad job file or
//! arguments, 3 I/O or boundary error, 4 inconsistent frame.

pub mod config;
pub mod export;
pub mod verify;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::frames::{
    solve_phases, transform_wigner_closed_form, transform_wigner_momentum_route,
    transform_wigner_position_route, AffineFrame, PhaseConvention,
};
use crate::states::WaveFunction;
use crate::wigner::{marginal_momentum, marginal_position, negativity_volume, wigner_from_state, WignerGrid};

use config::{Format, JobSpec, What};
use export::{write_marginal, write_wigner, MarginalAxis};
use verify::{run_suite, Suite};

#[derive(Debug, Parser)]
#[command(name = "wigner-frames", version, about = "Wigner functions under changes of reference frame")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner function of the configured state.
    Wigner(JobArgs),
    /// Transformed Wigner function along one or all routes.
    Transform {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum, default_value = "all")]
        route: Route,
        /// Override the frame's shared phase constant.
        #[arg(long, allow_negative_numbers = true)]
        xi: Option<f64>,
    },
    /// Run a built-in invariant suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Write the configured output without a report; with `--route`, of the
    /// transformed Wigner function.
    Export {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_enum)]
        route: Option<Route>,
        #[arg(long, allow_negative_numbers = true)]
        xi: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct JobArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output path, overriding `[output] path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Position,
    Momentum,
    Closed,
    All,
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::Position => "position",
            Route::Momentum => "momentum",
            Route::Closed => "closed",
            Route::All => "all",
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::UnsupportedDimension(_)
        | Error::UnsupportedLevel(_)
        | Error::Index { .. }
        | Error::DegenerateState => 2,
        Error::Boundary(_) | Error::Io(_) => 3,
        Error::FrameInconsistent { .. } => 4,
        Error::GridMismatch | Error::DegenerateSymbol | Error::Numerical(_) | Error::Internal(_) => 1,
    }
}

/// Ordered `key=value` lines.
#[derive(Debug, Default)]
struct Report(Vec<(String, String)>);

impl Report {
    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    fn summary(&mut self, w: &WignerGrid, suffix: &str) {
        self.push(format!("norm{suffix}"), format!("{:.6}", w.total()));
        self.push(format!("min{suffix}"), format!("{:.9}", w.min()));
        self.push(format!("negativity{suffix}"), format!("{:.9}", negativity_volume(w)));
        self.push(format!("purity{suffix}"), format!("{:.6}", w.purity()));
    }

    fn text(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

struct Target {
    path: PathBuf,
    format: Format,
    what: What,
}

impl Target {
    fn resolve(job: &JobSpec, args: &JobArgs) -> Result<Self> {
        let (path, format, what) = match (&job.output, &args.out) {
            (Some(o), out) => (out.clone().unwrap_or_else(|| o.path.clone()), o.format, o.what),
            (None, Some(out)) => (out.clone(), Format::Bin, What::Wigner),
            (None, None) => return Err(Error::Config("missing [output] section".into())),
        };
        Ok(Self { path, format: args.format.unwrap_or(format), what })
    }

    /// `dir/stem_suffix.ext`, with the extension taken from the format.
    fn with_suffix(&self, suffix: &str) -> PathBuf {
        let stem = self.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let name = format!("{stem}_{suffix}.{}", self.format.extension());
        match self.path.parent() {
            Some(dir) => dir.join(name),
            None => PathBuf::from(name),
        }
    }
}

fn write_object(target: &Target, path: &Path, w: &WignerGrid, written: &mut Vec<PathBuf>) -> Result<()> {
    match target.what {
        What::Wigner => {
            write_wigner(w, path, target.format)?;
            written.push(path.to_path_buf());
        }
        What::Marginals => {
            let sub = Target { path: path.to_path_buf(), ..*target };
            let (px, pp) = (sub.with_suffix("x"), sub.with_suffix("p"));
            write_marginal(w.grid(), w.time_tag(), MarginalAxis::Position, &marginal_position(w), &px, target.format)?;
            write_marginal(w.grid(), w.time_tag(), MarginalAxis::Momentum, &marginal_momentum(w), &pp, target.format)?;
            written.extend([px, pp]);
        }
        What::Phases | What::Report => {}
    }
    Ok(())
}

fn phase_text(frame: &AffineFrame) -> Result<String> {
    let (alpha, beta) = solve_phases(frame)?;
    let list = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",");
    Ok(format!(
        "alpha_linear={}\nalpha_constant={:.17e}\nbeta_linear={}\nbeta_constant={:.17e}\n",
        list(&alpha.linear),
        alpha.constant,
        list(&beta.linear),
        beta.constant
    ))
}

fn load(args: &JobArgs) -> Result<(JobSpec, Target)> {
    let job = JobSpec::load(&args.config)?;
    let target = Target::resolve(&job, args)?;
    Ok((job, target))
}

fn frame_with_xi(job: &JobSpec, wf: &WaveFunction, xi: Option<f64>) -> Result<AffineFrame> {
    let frame = job.frame(wf.grid())?;
    Ok(match xi {
        Some(xi) => {
            let c = frame.convention();
            frame.with_convention(PhaseConvention { xi, ..c })
        }
        None => frame,
    })
}

fn finish_output(target: &Target, report: &Report, extra: Option<String>, written: &[PathBuf]) -> Result<()> {
    match target.what {
        What::Report => {
            std::fs::write(&target.path, report.text())?;
            eprintln!("wrote {}", target.path.display());
        }
        What::Phases => {
            let text = extra.ok_or_else(|| Error::Config("`what = \"phases\"` needs a [frame] section".into()))?;
            std::fs::write(&target.path, text)?;
            eprintln!("wrote {}", target.path.display());
        }
        _ => {
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn cmd_wigner(args: &JobArgs) -> Result<Report> {
    let (job, target) = load(args)?;
    let g = job.grid()?;
    let wf = job.state(&g)?;
    let w = wigner_from_state(&wf)?;
    let mut report = Report::default();
    report.summary(&w, "");
    let phases = match &job.frame {
        Some(_) => Some(phase_text(&job.frame(&g)?)?),
        None => None,
    };
    let mut written = Vec::new();
    write_object(&target, &target.path, &w, &mut written)?;
    finish_output(&target, &report, phases, &written)?;
    Ok(report)
}

fn run_route(route: Route, wf: &WaveFunction, frame: &AffineFrame) -> Result<WignerGrid> {
    match route {
        Route::Position => transform_wigner_position_route(wf, frame),
        Route::Momentum => transform_wigner_momentum_route(wf, frame),
        Route::Closed => transform_wigner_closed_form(&wigner_from_state(wf)?, frame),
        Route::All => unreachable!("expanded by the caller"),
    }
}

fn cmd_transform(args: &JobArgs, route: Route, xi: Option<f64>, quiet: bool) -> Result<Report> {
    let (job, target) = load(args)?;
    let g = job.grid()?;
    let wf = job.state(&g)?;
    let frame = frame_with_xi(&job, &wf, xi)?;
    let phases = phase_text(&frame)?;

    let mut report = Report::default();
    report.push("t", frame.t());
    let mut written = Vec::new();
    if route == Route::All {
        let routes = [Route::Position, Route::Momentum, Route::Closed];
        let grids = routes.iter().map(|&r| run_route(r, &wf, &frame)).collect::<Result<Vec<_>>>()?;
        for (r, w) in routes.iter().zip(&grids) {
            report.summary(w, &format!("_{}", r.name()));
            if !matches!(target.what, What::Phases | What::Report) {
                write_object(&target, &target.with_suffix(r.name()), w, &mut written)?;
            }
        }
        report.push("max_diff_pos_mom", format!("{:.3e}", grids[0].max_abs_diff(&grids[1])?));
        report.push("max_diff_pos_closed", format!("{:.3e}", grids[0].max_abs_diff(&grids[2])?));
        report.push("max_diff_mom_closed", format!("{:.3e}", grids[1].max_abs_diff(&grids[2])?));
    } else {
        let w = run_route(route, &wf, &frame)?;
        report.push("route", route.name());
        report.summary(&w, "");
        write_object(&target, &target.path, &w, &mut written)?;
    }
    if !quiet {
        finish_output(&target, &report, Some(phases), &written)?;
    } else {
        finish_output(&target, &Report::default(), Some(phases), &written)?;
    }
    Ok(report)
}

fn cmd_export(args: &JobArgs, route: Option<Route>, xi: Option<f64>) -> Result<()> {
    match route {
        Some(r) => cmd_transform(args, r, xi, true).map(|_| ()),
        None => {
            let (job, target) = load(args)?;
            let g = job.grid()?;
            let w = wigner_from_state(&job.state(&g)?)?;
            let mut written = Vec::new();
            write_object(&target, &target.path, &w, &mut written)?;
            let phases = match &job.frame {
                Some(_) => Some(phase_text(&job.frame(&g)?)?),
                None => None,
            };
            finish_output(&target, &Report::default(), phases, &written)
        }
    }
}

fn cmd_verify(suite: Suite) -> Result<bool> {
    let checks = run_suite(suite)?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    for c in &checks {
        println!("{}", c.line());
    }
    println!("checks={}", checks.len());
    println!("failed={failed}");
    Ok(failed == 0)
}

/// Run one command and return the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match &cli.command {
        Command::Wigner(args) => cmd_wigner(args).map(|r| {
            print!("{}", r.text());
            true
        }),
        Command::Transform { job, route, xi } => cmd_transform(job, *route, *xi, false).map(|r| {
            print!("{}", r.text());
            true
        }),
        Command::Export { job, route, xi } => cmd_export(job, *route, *xi).map(|_| true),
        Command::Verify { suite } => cmd_verify(*suite),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("verification failed");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
