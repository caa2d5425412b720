//! Batch front end for `sechom-core`: JSON input, TSV charts, ASCII grids
//! and the verification report.

pub mod chart;
pub mod input;
pub mod job;
pub mod verify;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use sechom_core::track::Kind;

pub use job::{Command, JobSpec, Setup};

/// Exit status: 0 pass, 1 computation or input error, 2 verification failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Error,
    Failed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Error => 1,
            Status::Failed => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TrackArg {
    Pair,
    Square,
}

#[derive(Debug, Parser)]
#[command(name = "sechom", version, about = "Resolutions, Ext, secondary resolutions and d2 over finite coefficient rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Classical minimal resolution of the object
    Resolve,
    /// Classical Ext chart
    Ext,
    /// Secondary resolution (chart plus JSON complex with --out)
    Secres,
    /// d2 on a class list (--classes) or on every basis class of the window
    D2 {
        #[arg(long)]
        classes: Option<PathBuf>,
    },
    /// Secondary Ext table
    Sext,
    /// Run every invariant suite
    Verify,
}

#[derive(Debug, clap::Args)]
pub struct Opts {
    #[arg(long, global = true, value_enum)]
    pub track: Option<TrackArg>,
    /// Shipped fixture: e1, exterior, e1-split, e1-nonsplit, z4-plain, z4-twisted
    #[arg(long, global = true)]
    pub fixture: Option<String>,
    /// Algebra JSON file
    #[arg(long, global = true)]
    pub algebra: Option<PathBuf>,
    /// Object to resolve (JSON)
    #[arg(long, global = true)]
    pub x: Option<PathBuf>,
    /// Coefficient object (JSON)
    #[arg(long, global = true)]
    pub y: Option<PathBuf>,
    /// Secondary complex (JSON) used instead of building one
    #[arg(long, global = true)]
    pub complex: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 4)]
    pub smax: usize,
    #[arg(long, global = true, default_value_t = 8)]
    pub tmax: i32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for TSV/JSON artifacts; without it tables go to stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Cli {
    pub fn job(&self) -> JobSpec {
        let (command, classes) = match &self.command {
            Cmd::Resolve => (Command::Resolve, None),
            Cmd::Ext => (Command::Ext, None),
            Cmd::Secres => (Command::Secres, None),
            Cmd::D2 { classes } => (Command::D2, classes.clone()),
            Cmd::Sext => (Command::Sext, None),
            Cmd::Verify => (Command::Verify, None),
        };
        let o = &self.opts;
        JobSpec {
            command,
            track: o.track.map(|t| match t {
                TrackArg::Pair => Kind::PairCat,
                TrackArg::Square => Kind::SquareRing,
            }),
            fixture: o.fixture.clone(),
            algebra: o.algebra.clone(),
            x: o.x.clone(),
            y: o.y.clone(),
            complex: o.complex.clone(),
            classes,
            s_max: o.smax,
            t_max: o.tmax,
            seed: o.seed,
            out: o.out.clone(),
        }
    }
}

/// Text produced by a job: files for `--out` and what goes to stdout.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub stdout: String,
}

/// Runs a job without touching the file system.
pub fn execute(job: &JobSpec) -> Result<(Status, Output)> {
    job.check_window()?;
    let s = job::setup(job)?;
    let name = job.command.name();
    let tsv = format!("{name}.tsv");
    let mut out = Output::default();
    let to_stdout = job.out.is_none();
    let mut status = Status::Pass;
    match job.command {
        Command::Resolve | Command::Ext | Command::Sext => {
            let chart = match job.command {
                Command::Resolve => job::resolve(job, &s)?,
                Command::Ext => job::ext(job, &s)?,
                _ => job::sext(job, &s)?,
            };
            out.files.push((tsv, chart.to_tsv()));
            out.stdout = chart.grid();
        }
        Command::Secres => {
            let (chart, c) = job::secres(job, &s)?;
            out.files.push((tsv, chart.to_tsv()));
            out.files.push(("secres.json".into(), job::complex_json(&c)));
            out.stdout = chart.grid();
        }
        Command::D2 => {
            let table = job::d2(job, &s)?;
            out.files.push((tsv, table.to_tsv()));
            out.stdout = table.summary();
        }
        Command::Verify => {
            let report = verify::verify(job, &s);
            if !report.passed() {
                status = Status::Failed;
            }
            let text = report.render();
            out.files.push(("verify.txt".into(), text.clone()));
            out.stdout = text;
            if to_stdout {
                return Ok((status, out));
            }
        }
    }
    if to_stdout {
        let tables: String = out.files.iter().filter(|(n, _)| n.ends_with(".tsv")).map(|(_, t)| t.as_str()).collect();
        out.stdout = format!("{tables}\n{}", out.stdout);
    }
    Ok((status, out))
}

/// Runs a job, writes artifacts and prints; returns the exit status.
pub fn run(job: &JobSpec) -> Status {
    match execute(job).and_then(|(status, out)| {
        if let Some(dir) = &job.out {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, text) in &out.files {
                let path = dir.join(name);
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        print!("{}", out.stdout);
        Ok(status)
    }) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| matches!(c.downcast_ref::<sechom_core::Error>(), Some(sechom_core::Error::D2SquareNonzero { .. }))) {
                Status::Failed
            } else {
                Status::Error
            }
        }
    }
}
