//! `quasimin generate | certify | list-families`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::families::{AdmissibilityScan, FamilyTag, GeneratedSurface};
use crate::immersion::{fundamental_data, null_space_of};
use crate::verify::{certify_surface, convergence_study, CertificationReport, Grid2D, OdeProblem};

#[derive(Debug, Parser)]
#[command(
    name = "quasimin",
    version,
    about = "Generate and certify quasi-minimal surfaces in E^4_2 and S^4_2"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a family on its grid and write CSV plus a JSON sidecar.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// CSV path; the sidecar goes next to it with a `.json` extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every certification and write a JSON report.
    Certify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Grid override, e.g. `20x20`.
        #[arg(long)]
        grid: Option<Grid2D>,
        /// Curvature-residual tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        /// Also run the step-halving convergence study.
        #[arg(long)]
        convergence: bool,
    },
    /// Print the family tags and their admissibility conditions.
    ListFamilies,
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    CertificationFailed = 1,
    Inadmissible = 2,
    Error = 3,
}

impl ExitCode {
    pub fn of_error(e: &Error) -> ExitCode {
        if e.condition().is_some() {
            ExitCode::Inadmissible
        } else {
            ExitCode::Error
        }
    }
}

/// Wraps output so that everything outside `metadata` is reproducible.
#[derive(Debug, Serialize)]
pub struct Document<T> {
    pub payload: T,
    pub metadata: Metadata,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub created_unix: u64,
}

impl Metadata {
    fn now() -> Metadata {
        Metadata {
            tool: "quasimin",
            version: env!("CARGO_PKG_VERSION"),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GeneratePayload<'a> {
    pub label: &'a str,
    pub form: &'static str,
    pub config: &'a RunConfig,
    pub admissibility: Option<&'a AdmissibilityScan>,
    pub csv: String,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
pub struct CertifyPayload<'a> {
    pub config: &'a RunConfig,
    pub admissibility: Option<&'a AdmissibilityScan>,
    pub report: &'a CertificationReport,
}

pub const CSV_HEADER: [&str; 14] = [
    "s",
    "t",
    "x1",
    "x2",
    "x3",
    "x4",
    "x5",
    "H1",
    "H2",
    "H3",
    "H4",
    "H5",
    "nullity",
    "on_form_residual",
];

/// Shortest round-trip decimal.
fn num(x: f64) -> String {
    format!("{x:?}")
}

struct Row {
    s: f64,
    t: f64,
    x: Vec<f64>,
    h: Option<Vec<f64>>,
    nullity: Option<usize>,
    on_form: f64,
}

fn sample_rows(surface: &GeneratedSurface, cfg: &RunConfig) -> Vec<Row> {
    let f = &surface.immersion;
    cfg.grid
        .nodes(&cfg.domain)
        .into_par_iter()
        .map(|[s, t]| {
            let x = f.eval(s, t).coords().to_vec();
            let data = if f.singular_reason(s, t, cfg.tolerances.singular_margin).is_some() {
                None
            } else {
                fundamental_data(f, s, t).ok()
            };
            let h = data.as_ref().map(|d| d.mean_curvature.coords().to_vec());
            let nullity = data
                .as_ref()
                .and_then(|d| null_space_of(d).ok())
                .map(|n| n.dimension);
            Row {
                s,
                t,
                x,
                h,
                nullity,
                on_form: f.on_form_residual(s, t),
            }
        })
        .collect()
}

fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let mut rec: Vec<String> = vec![num(r.s), num(r.t)];
        let pad = |v: Option<&Vec<f64>>, rec: &mut Vec<String>| {
            for k in 0..5 {
                rec.push(v.and_then(|v| v.get(k)).map(|&x| num(x)).unwrap_or_default());
            }
        };
        pad(Some(&r.x), &mut rec);
        pad(r.h.as_ref(), &mut rec);
        rec.push(r.nullity.map(|n| n.to_string()).unwrap_or_default());
        rec.push(num(r.on_form));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, payload: T) -> Result<()> {
    let doc = Document {
        payload,
        metadata: Metadata::now(),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `<csv>` with its extension replaced by `json`.
pub fn sidecar_path(csv: &Path) -> Result<PathBuf> {
    if csv.extension().is_some_and(|e| e == "json") {
        return Err(Error::Config(format!(
            "output {} would collide with its JSON sidecar",
            csv.display()
        )));
    }
    Ok(csv.with_extension("json"))
}

fn pick(cli: Option<PathBuf>, cfg: Option<&PathBuf>, what: &str) -> Result<PathBuf> {
    cli.or_else(|| cfg.cloned())
        .ok_or_else(|| Error::Config(format!("no {what} path given (flag or config `outputs`)")))
}

/// Samples the configured surface, writes the CSV and its sidecar; returns the CSV path.
pub fn cmd_generate(cfg: &RunConfig, out: Option<PathBuf>) -> Result<PathBuf> {
    let out = pick(out, cfg.outputs.csv.as_ref(), "CSV output")?;
    let sidecar = sidecar_path(&out)?;
    let surface = cfg.build()?;
    let rows = sample_rows(&surface, cfg);
    write_csv(&out, &rows)?;
    let payload = GeneratePayload {
        label: surface.label(),
        form: surface.immersion.form().name(),
        config: cfg,
        admissibility: surface.scan.as_ref(),
        csv: out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        rows: rows.len(),
    };
    write_json(&sidecar, payload)?;
    Ok(out)
}

/// Certifies the configured surface, optionally with the convergence study.
pub fn certify_config(cfg: &RunConfig, convergence: bool) -> Result<(GeneratedSurface, CertificationReport)> {
    let surface = cfg.build()?;
    let mut report = certify_surface(&surface, cfg.grid, &cfg.tolerances);
    if convergence {
        let f = &surface.immersion;
        let ode = cfg
            .family
            .ode_problem(cfg.domain)
            .unwrap_or_else(OdeProblem::reference);
        let probes: Vec<[f64; 2]> = cfg
            .grid
            .probe_nodes(&cfg.domain)
            .into_iter()
            .filter(|&[s, t]| f.singular_reason(s, t, cfg.tolerances.singular_margin).is_none())
            .collect();
        report = report.with_convergence(convergence_study(f, &ode, &probes)?);
    }
    Ok((surface, report))
}

pub fn cmd_certify(
    cfg: &RunConfig,
    report_path: Option<PathBuf>,
    convergence: bool,
) -> Result<CertificationReport> {
    let path = pick(report_path, cfg.outputs.report.as_ref(), "report")?;
    let (surface, report) = certify_config(cfg, convergence)?;
    write_json(
        &path,
        CertifyPayload {
            config: cfg,
            admissibility: surface.scan.as_ref(),
            report: &report,
        },
    )?;
    Ok(report)
}

pub fn list_families() -> String {
    let mut out = String::new();
    for tag in FamilyTag::ALL {
        let mut conds = vec![tag.condition().as_str()];
        conds.extend(tag.extra_conditions().iter().map(|c| c.as_str()));
        out.push_str(&format!(
            "{:<20} {:<5}  requires {:<52} {}\n",
            tag.as_str(),
            tag.form().name(),
            conds.join(", "),
            tag.description()
        ));
    }
    out
}

/// Runs one command, printing to stdout/stderr, and returns the exit code.
pub fn run(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::ListFamilies => {
            print!("{}", list_families());
            Ok(ExitCode::Success)
        }
        Command::Generate { config, out } => RunConfig::from_path(&config)
            .and_then(|cfg| cmd_generate(&cfg, out))
            .map(|path| {
                println!("wrote {}", path.display());
                ExitCode::Success
            }),
        Command::Certify {
            config,
            report,
            grid,
            tol,
            convergence,
        } => (|| {
            let mut cfg = RunConfig::from_path(&config)?;
            if let Some(g) = grid {
                cfg = cfg.with_grid(g)?;
            }
            if let Some(t) = tol {
                cfg.tolerances.residual = t;
                cfg.validate()?;
            }
            let r = cmd_certify(&cfg, report, convergence)?;
            print!("{}", r.summary());
            Ok(if r.pass {
                ExitCode::Success
            } else {
                ExitCode::CertificationFailed
            })
        })(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::of_error(&e)
        }
    }
}
