//! Command-line front end. `thopf <command> --config run.json [...]`.
//!
//! Exit codes: 0 ok, 1 invalid configuration, 2 Turing condition flags
//! false, 3 degenerate normal form, 4 simulation failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::diagnostics::{diagnostics, DiagnosticsConfig};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sim::{run, InitialCondition, SimConfig, SimResult, Termination};
use crate::spectrum::{analyze, check_a6, hopf_branch, stability_label, turing_branch, DEFAULT_BRANCHES};
use crate::unfolding::{classify, classify_linear, unfold, MIXED_MODE_THRESHOLD};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Parser)]
#[command(name = "thopf", version, about = "Turing-Hopf analysis of the delayed Holling-Tanner system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format, overrides `output.formats`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turing/Hopf spectra, Bogdanov-Takens and Turing-Hopf points.
    Analyze(Common),
    /// Normal form coefficients and planar reduction.
    Normalform(Common),
    /// Region of `(alpha1, alpha2)` in the unfolding.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Offset `r - r*`.
        #[arg(long, allow_hyphen_values = true)]
        alpha1: f64,
        /// Offset `tau - tau*`.
        #[arg(long, allow_hyphen_values = true)]
        alpha2: f64,
    },
    /// Solve the delayed reaction-diffusion system.
    Simulate(Common),
    /// Stability labels on an `(r, tau)` grid and critical curves.
    Sweep(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default)]
    pub nx: Option<usize>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub stride: Option<usize>,
    pub init: InitialCondition,
}

impl SimSection {
    pub fn config(&self) -> SimConfig {
        let d = SimConfig::default();
        SimConfig {
            nx: self.nx.unwrap_or(d.nx),
            dt: self.dt,
            t_end: self.t_end.unwrap_or(d.t_end),
            stride: self.stride,
            kinetics: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub r_range: [f64; 2],
    pub tau_range: [f64; 2],
    /// Points along `r` and `tau`.
    pub grid: [usize; 2],
    /// Label each point by simulation instead of the linear spectrum.
    #[serde(default)]
    pub simulate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default)]
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.model.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Config = 1,
    Condition = 2,
    Degenerate = 3,
    Runtime = 4,
}

fn status_of(err: &Error) -> ExitStatus {
    match err {
        Error::InvalidParams(_) | Error::Config(_) | Error::Json(_) => ExitStatus::Config,
        Error::NoPositiveTuring | Error::ComplexAux => ExitStatus::Condition,
        Error::DegenerateCase(_)
        | Error::DegenerateCubic(_)
        | Error::ResonantMatrix { .. }
        | Error::SingularMixedSystem
        | Error::NoRoot { .. }
        | Error::NoConvergence { .. } => ExitStatus::Degenerate,
        Error::Blowup { .. }
        | Error::PositivityViolation { .. }
        | Error::WindowTooShort(_)
        | Error::Io(_)
        | Error::Csv(_) => ExitStatus::Runtime,
    }
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    formats: Vec<Format>,
    jobs: Option<usize>,
}

impl Ctx {
    fn new(common: &Common) -> Result<Self> {
        let cfg = RunConfig::load(&common.config)?;
        let output = cfg.output.clone().unwrap_or(OutputSection { dir: None, formats: None });
        let out = common
            .out
            .clone()
            .or(output.dir)
            .unwrap_or_else(|| PathBuf::from("."));
        let formats = match common.format {
            Some(f) => vec![f],
            None => output.formats.unwrap_or_else(|| vec![Format::Json]),
        };
        fs::create_dir_all(&out)?;
        Ok(Self {
            cfg,
            out,
            formats,
            jobs: common.jobs,
        })
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_json(&self, name: &str, kind: &str, body: Value) -> Result<()> {
        let doc = envelope(kind, &self.cfg.model, body);
        let path = self.path(name);
        fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
        info!("wrote {}", path.display());
        Ok(())
    }
}

/// Common wrapper of every JSON report.
pub fn envelope(kind: &str, params: &ModelParams, body: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "generated": { "tool": "thopf", "version": env!("CARGO_PKG_VERSION") },
        "params": params,
        "report": body,
    })
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    info!("wrote {}", path.display());
    Ok(())
}

fn cmd_analyze(ctx: &Ctx) -> Result<ExitStatus> {
    let params = ctx.cfg.model;
    let report = match analyze(&params, DEFAULT_BRANCHES) {
        Ok(r) => r,
        Err(e @ (Error::NoPositiveTuring | Error::ComplexAux)) => {
            // no Turing branch to report, but the flags still are
            let a6 = check_a6(&params);
            warn!("{e}; condition flags: {a6:?}");
            if ctx.wants(Format::Json) {
                let body = json!({
                    "params": params,
                    "turing": null,
                    "bt": null,
                    "hopf": null,
                    "a6": a6,
                    "error": e.to_string(),
                });
                ctx.write_json("analyze.json", "analyze", body)?;
            }
            return Ok(ExitStatus::Condition);
        }
        Err(e) => return Err(e),
    };
    let holds = report.turing.a6.holds;
    if ctx.wants(Format::Json) {
        ctx.write_json("analyze.json", "analyze", serde_json::to_value(&report)?)?;
    }
    if ctx.wants(Format::Csv) {
        let t = &report.turing;
        write_csv(
            &ctx.path("turing.csv"),
            &["n", "r_T", "r_H"],
            (0..t.r_t.len()).map(|n| vec![n.to_string(), t.r_t[n].to_string(), t.r_h[n].to_string()]),
        )?;
        if let Some(h) = &report.hopf {
            let mut rows = Vec::new();
            for b in &h.branches {
                for (j, root) in b.roots.iter().enumerate() {
                    for (k, tau) in root.taus.iter().enumerate() {
                        rows.push(vec![
                            b.n.to_string(),
                            j.to_string(),
                            root.omega.to_string(),
                            k.to_string(),
                            tau.to_string(),
                        ]);
                    }
                }
            }
            write_csv(&ctx.path("hopf.csv"), &["n", "root", "omega", "k", "tau"], rows)?;
        }
    }
    if !holds {
        warn!("Turing condition does not hold: {:?}", report.turing.a6);
        return Ok(ExitStatus::Condition);
    }
    Ok(ExitStatus::Ok)
}

fn cmd_normalform(ctx: &Ctx) -> Result<ExitStatus> {
    let (nf, pu) = unfold(&ctx.cfg.model, MIXED_MODE_THRESHOLD)?;
    let body = json!({
        "normal_form": nf,
        "planar": pu,
        "d0_minus_b0c0": pu.d0 - pu.b0 * pu.c0,
    });
    ctx.write_json("normalform.json", "normalform", body)?;
    if ctx.wants(Format::Csv) {
        let u = &nf.unfolding;
        let c = |z: num_complex::Complex64| vec![z.re.to_string(), z.im.to_string()];
        let rows = [
            ("f_a1z1", c(u.f_a1z1)),
            ("f_a2z1", c(u.f_a2z1)),
            ("f_a1z2", c(u.f_a1z2.into())),
            ("f_a2z2", c(u.f_a2z2.into())),
            ("g210", c(nf.g210)),
            ("g102", c(nf.g102)),
            ("g111", c(nf.g111.into())),
            ("g003", c(nf.g003.into())),
        ];
        write_csv(
            &ctx.path("normalform.csv"),
            &["name", "re", "im"],
            rows.into_iter().map(|(n, v)| [vec![n.to_string()], v].concat()),
        )?;
    }
    Ok(ExitStatus::Ok)
}

fn cmd_classify(ctx: &Ctx, alpha1: f64, alpha2: f64) -> Result<ExitStatus> {
    let (_, pu) = unfold(&ctx.cfg.model, MIXED_MODE_THRESHOLD)?;
    let class = classify(&pu, alpha1, alpha2)?;
    let linear = classify_linear(&pu, alpha1, alpha2)?;
    let body = json!({
        "classification": class,
        "linear_eps": linear.eps,
        "linear_region": linear.region,
        "planar": pu,
    });
    ctx.write_json("classify.json", "classify", body)?;
    Ok(ExitStatus::Ok)
}

/// Field CSV: header `x, x0, x1, ...`, then one `t, w(x0, t), ...` row per
/// stored sample.
pub fn write_field_csv(path: &Path, x: &[f64], t: &[f64], field: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(false).from_path(path)?;
    let mut header = vec!["x".to_string()];
    header.extend(x.iter().map(|x| x.to_string()));
    w.write_record(&header)?;
    for (t, row) in t.iter().zip(field) {
        let mut rec = vec![t.to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a field CSV back into `(x, t, rows)`.
pub fn read_field_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut records = r.records();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("bad number {s:?}: {e}")))
    };
    let header = records
        .next()
        .ok_or_else(|| Error::Config("empty field file".into()))??;
    if header.get(0).map(str::trim) != Some("x") {
        return Err(Error::Config("field file must start with `x`".into()));
    }
    let x = header.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?;
    let (mut t, mut rows) = (Vec::new(), Vec::new());
    for rec in records {
        let rec = rec?;
        let mut vals = rec.iter().map(parse);
        t.push(vals.next().ok_or_else(|| Error::Config("empty row".into()))??);
        rows.push(vals.collect::<Result<Vec<_>>>()?);
    }
    Ok((x, t, rows))
}

fn sim_section(cfg: &RunConfig) -> Result<&SimSection> {
    cfg.sim
        .as_ref()
        .ok_or_else(|| Error::Config("missing `sim` section".into()))
}

fn sim_metadata(res: &SimResult) -> Value {
    let diag = match diagnostics(res, &DiagnosticsConfig::default()) {
        Ok(d) => json!(d),
        Err(e) => json!({ "error": e.to_string() }),
    };
    json!({
        "config": res.config,
        "init": res.init,
        "plan": res.plan,
        "termination": res.termination,
        "samples": res.t.len(),
        "files": { "u": "u.csv", "v": "v.csv" },
        "diagnostics": diag,
    })
}

fn cmd_simulate(ctx: &Ctx) -> Result<ExitStatus> {
    let section = sim_section(&ctx.cfg)?;
    let res = run(&ctx.cfg.model, &section.init, &section.config())?;
    write_field_csv(&ctx.path("u.csv"), &res.x, &res.t, &res.u)?;
    write_field_csv(&ctx.path("v.csv"), &res.x, &res.t, &res.v)?;
    ctx.write_json("simulate.json", "simulate", sim_metadata(&res))?;
    match res.termination {
        Termination::Completed => Ok(ExitStatus::Ok),
        ref t => {
            warn!(
                "run at (r, tau) = ({}, {}) stopped: {t:?}",
                ctx.cfg.model.r, ctx.cfg.model.tau
            );
            Ok(ExitStatus::Runtime)
        }
    }
}

fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range[0]];
    }
    (0..n)
        .map(|i| range[0] + (range[1] - range[0]) * i as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct SweepPoint {
    r: f64,
    tau: f64,
    label: String,
    status: String,
}

fn cmd_sweep(ctx: &Ctx) -> Result<ExitStatus> {
    let sweep = ctx
        .cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::Config("missing `sweep` section".into()))?;
    let [nr, nt] = sweep.grid;
    let ordered = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
    if nr == 0 || nt == 0 || !ordered(sweep.r_range) || !ordered(sweep.tau_range) {
        return Err(Error::Config("empty sweep grid".into()));
    }
    if sweep.r_range[0] <= 0.0 || sweep.tau_range[0] < 0.0 {
        return Err(Error::Config("sweep ranges need r > 0 and tau >= 0".into()));
    }
    let params = ctx.cfg.model;
    let turing = turing_branch(&params)?;
    let rs = linspace(sweep.r_range, nr);
    let taus = linspace(sweep.tau_range, nt);
    let grid: Vec<(f64, f64)> = rs
        .iter()
        .flat_map(|&r| taus.iter().map(move |&t| (r, t)))
        .collect();

    let sim = if sweep.simulate {
        Some(sim_section(&ctx.cfg)?.clone())
    } else {
        None
    };
    let eval = |&(r, tau): &(f64, f64)| -> SweepPoint {
        match &sim {
            None => SweepPoint {
                r,
                tau,
                label: stability_label(&params, &turing, r, tau).as_str().to_string(),
                status: "ok".into(),
            },
            Some(section) => {
                let p = params.with_r(r).with_tau(tau);
                let outcome = run(&p, &section.init, &section.config()).map(|res| {
                    let status = match res.termination {
                        Termination::Completed => "ok".to_string(),
                        Termination::Blowup { .. } => "blowup".to_string(),
                        Termination::PositivityViolation { .. } => "positivity-violation".to_string(),
                    };
                    let label = diagnostics(&res, &DiagnosticsConfig::default())
                        .map(|d| d.label.as_str().to_string())
                        .unwrap_or_else(|_| "undetermined".to_string());
                    (label, status)
                });
                let (label, status) =
                    outcome.unwrap_or_else(|e| ("undetermined".to_string(), e.to_string()));
                SweepPoint { r, tau, label, status }
            }
        }
    };
    let points: Vec<SweepPoint> = match ctx.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| grid.par_iter().map(eval).collect()),
        None => grid.par_iter().map(eval).collect(),
    };

    write_csv(
        &ctx.path("sweep.csv"),
        &["r", "tau", "label", "status"],
        points
            .iter()
            .map(|p| vec![p.r.to_string(), p.tau.to_string(), p.label.clone(), p.status.clone()]),
    )?;

    // critical curves
    let report = analyze(&params, 1)?;
    let fine = linspace(sweep.r_range, (4 * nr).max(64));
    let n_curves = turing.r_t.len();
    let mut curves = Vec::new();
    for n in 0..n_curves {
        let pts: Vec<[f64; 2]> = fine
            .iter()
            .filter_map(|&r| hopf_branch(&params, r, n, 1).ok().map(|b| [r, b.principal().1]))
            .filter(|p| p[1] >= sweep.tau_range[0] && p[1] <= sweep.tau_range[1])
            .collect();
        if !pts.is_empty() {
            curves.push(json!({ "n": n, "points": pts }));
        }
    }
    let body = json!({
        "grid": { "r": rs, "tau": taus, "simulated": sweep.simulate },
        "points_file": "sweep.csv",
        "turing_line": { "n_t": turing.n_t, "r": turing.r_star },
        "hopf_curves": curves,
        "bt_point": report.bt.map(|b| [b.r_star, b.tau0]),
        "turing_hopf_point": report.turing_hopf().map(|(r, t, w)| json!({ "r": r, "tau": t, "omega": w })),
    });
    if ctx.wants(Format::Json) {
        ctx.write_json("sweep.json", "sweep", body)?;
    }
    if ctx.wants(Format::Csv) {
        let mut rows = Vec::new();
        for c in &curves {
            let n = c["n"].as_u64().unwrap_or(0);
            for p in c["points"].as_array().into_iter().flatten() {
                rows.push(vec![
                    format!("hopf-{n}"),
                    p[0].to_string(),
                    p[1].to_string(),
                ]);
            }
        }
        rows.push(vec!["turing".into(), turing.r_star.to_string(), String::new()]);
        if let Some(b) = report.bt {
            rows.push(vec!["bt".into(), b.r_star.to_string(), b.tau0.to_string()]);
        }
        if let Some((r, t, _)) = report.turing_hopf() {
            rows.push(vec!["turing-hopf".into(), r.to_string(), t.to_string()]);
        }
        write_csv(&ctx.path("curves.csv"), &["curve", "r", "tau"], rows)?;
    }
    let failed = points.iter().any(|p| p.status != "ok");
    Ok(if failed { ExitStatus::Runtime } else { ExitStatus::Ok })
}

/// Runs one parsed command and maps errors to exit codes.
pub fn execute(cli: Cli) -> ExitStatus {
    let result = (|| -> Result<ExitStatus> {
        match &cli.command {
            Command::Analyze(c) => cmd_analyze(&Ctx::new(c)?),
            Command::Normalform(c) => cmd_normalform(&Ctx::new(c)?),
            Command::Classify {
                common,
                alpha1,
                alpha2,
            } => cmd_classify(&Ctx::new(common)?, *alpha1, *alpha2),
            Command::Simulate(c) => cmd_simulate(&Ctx::new(c)?),
            Command::Sweep(c) => cmd_sweep(&Ctx::new(c)?),
        }
    })();
    match result {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            status_of(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli) as i32,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitStatus::Config as i32
            } else {
                ExitStatus::Ok as i32
            }
        }
    }
}
