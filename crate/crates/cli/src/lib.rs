//! Library side of the `laminate` command: configuration, command runners
//! and the run manifest.

pub mod config;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use laminate_core::evolution::{energy_identity, evolve_any, griffith_check, jump_cost, toughness_on, LoadProgram};
use laminate_core::homogenization::{effective_toughness_estimate, evolution_convergence, Study, StudyConfig};
use laminate_core::mesh::{BoundaryDatum, Grid};
use laminate_core::output::{self, SummaryRow};
use laminate_core::release::{CurveSetup, ReleaseCurve};
use laminate_core::solver::solve_with;
use laminate_core::Error as CoreError;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{parse_config, parse_config_str, LoadSpec, RunConfig, Violation};

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const DIAGNOSTIC_FILE: &str = "diagnostic.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Release,
    Evolve,
    Homogenize,
    Study,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Release => "release",
            Command::Evolve => "evolve",
            Command::Homogenize => "homogenize",
            Command::Study => "study",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", format_violations(.0))]
    Config(Vec<Violation>),
    #[error("{0}")]
    Input(CoreError),
    #[error("{0}")]
    Numerical(CoreError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    /// 1 for problems with the input, 2 for failures while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 1,
            CliError::Numerical(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        match e {
            InvalidSpec(_) | TipOutOfRange(_) | InadmissibleTip(_) | MisalignedMesh(_) | InvalidLoad(_)
            | NonMonotoneLoad | InvalidWindow(_) | EmptyWindow { .. } | RescalingInapplicable(_)
            | ClosedFormNotApplicable(_) => CliError::Input(e),
            _ => CliError::Numerical(e),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Collects output files in memory so that the manifest can hash them.
struct Outputs {
    dir: PathBuf,
    files: BTreeMap<String, Vec<u8>>,
}

impl Outputs {
    fn add<F>(&mut self, name: &str, write: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        write(&mut buf).map_err(io_err(&self.dir.join(name)))?;
        self.files.insert(name.to_string(), buf);
        Ok(())
    }

    fn flush(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir).map_err(io_err(&self.dir))?;
        for (name, bytes) in &self.files {
            let path = self.dir.join(name);
            let mut w = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
            w.write_all(bytes).and_then(|_| w.flush()).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest {
    version: String,
    command: String,
    config_sha256: String,
    tolerances: Tolerances,
    notes: BTreeMap<String, String>,
    files: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Tolerances {
    solver: f64,
    griffith: f64,
}

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// What a run printed and where its files went.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub lines: Vec<String>,
    pub files: Vec<String>,
}

/// Runs `command` on the configuration text and writes every file, the
/// manifest included, under `out_dir`. On failure a diagnostic is written
/// there instead, when the directory can be created.
pub fn run(command: Command, config_text: &str, out_dir: &Path) -> Result<RunSummary, CliError> {
    let result = parse_config_str(config_text)
        .map_err(CliError::Config)
        .and_then(|cfg| execute(command, &cfg, config_text, out_dir));
    if let Err(e) = &result {
        let text = format!(
            "command: {}\nconfig_sha256: {}\nexit_code: {}\nerror: {e}\n",
            command.name(),
            hex(config_text.as_bytes()),
            e.exit_code()
        );
        if fs::create_dir_all(out_dir).is_ok() {
            let _ = fs::write(out_dir.join(DIAGNOSTIC_FILE), text);
        }
    }
    result
}

fn execute(command: Command, cfg: &RunConfig, config_text: &str, out_dir: &Path) -> Result<RunSummary, CliError> {
    let mut out = Outputs { dir: out_dir.to_path_buf(), files: BTreeMap::new() };
    let mut lines = Vec::new();
    let mut notes = BTreeMap::new();
    match command {
        Command::Solve => solve_cmd(cfg, &mut out, &mut lines, &mut notes)?,
        Command::Release => {
            let curve = laminate_curve(cfg)?;
            out.add("release.csv", |w| output::write_release(w, &curve))?;
            lines.push(format!("release curve: {} tips in [{}, {}]", curve.tips.len(), curve.tips[0], curve.length));
        }
        Command::Evolve => evolve_cmd(cfg, &mut out, &mut lines, &mut notes)?,
        Command::Homogenize => {
            let m = cfg.spec.homogenized_model();
            let eff = m.gc_eff_closed_form.map_or_else(|| "undefined".to_string(), |g| g.to_string());
            let line = format!("mu_hom1={}, mu_hom2={}, gc_hom={}, gc_eff={eff}", m.mu_hom1, m.mu_hom2, m.gc_hom);
            out.add("homogenized.txt", |w| writeln!(w, "{line}"))?;
            lines.push(line);
        }
        Command::Study => study_cmd(cfg, &mut out, &mut lines, &mut notes)?,
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        config_sha256: hex(config_text.as_bytes()),
        tolerances: Tolerances { solver: cfg.solver.tol, griffith: cfg.griffith_tol },
        notes,
        files: out.files.iter().map(|(k, v)| (k.clone(), hex(v))).collect(),
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Numerical(CoreError::InvariantBreach(e.to_string())))?;
    out.files.insert(MANIFEST_FILE.to_string(), text.into_bytes());
    out.flush()?;
    // a stale diagnostic from an earlier failed run would be misleading
    let _ = fs::remove_file(out_dir.join(DIAGNOSTIC_FILE));
    Ok(RunSummary { out_dir: out_dir.to_path_buf(), lines, files: out.files.keys().cloned().collect() })
}

fn laminate_curve(cfg: &RunConfig) -> Result<ReleaseCurve, CliError> {
    Ok(CurveSetup::for_laminate(&cfg.spec, &cfg.mesh, &BoundaryDatum::Step, cfg.solver)?.build()?)
}

fn solve_cmd(
    cfg: &RunConfig,
    out: &mut Outputs,
    lines: &mut Vec<String>,
    notes: &mut BTreeMap<String, String>,
) -> Result<(), CliError> {
    let grid = std::sync::Arc::new(Grid::for_laminate(&cfg.spec, &cfg.mesh)?);
    let tips = grid.admissible_tips();
    let tip = tips.iter().cloned().min_by(|a, b| (a - cfg.tip).abs().total_cmp(&(b - cfg.tip).abs())).unwrap_or(cfg.tip);
    if tip != cfg.tip {
        lines.push(format!("tip {} moved to the nearest lattice tip {tip}", cfg.tip));
    }
    notes.insert("tip".into(), tip.to_string());
    let mesh = grid.crack_at(tip)?;
    let stiffness = grid.laminate_stiffness(&cfg.spec)?;
    let phases = grid.laminate_phases(&cfg.spec)?;
    let field = solve_with(&mesh, &stiffness, &BoundaryDatum::Step, &cfg.solver)?;
    out.add("field.csv", |w| output::write_field(w, &mesh, &field))?;
    out.add("mesh.txt", |w| mesh.write_dump(w, &phases))?;
    lines.push(format!("solved at tip {tip}: {} nodes", mesh.n_nodes()));
    Ok(())
}

/// Peak load when none is configured: the smallest load whose stable tip
/// has passed every barrier between `l0` and `0.8 L` on `curve`.
fn fallback_peak(curve: &ReleaseCurve, toughness: &[f64], l0: f64) -> Result<f64, CliError> {
    let target = 0.8 * curve.length;
    let mut worst: f64 = 0.0;
    for k in (0..curve.tips.len()).filter(|&k| curve.tips[k] >= l0 && curve.tips[k] <= target) {
        let g = curve.release[k];
        if !(g > 0.0) {
            return Err(CliError::Input(CoreError::InvalidLoad(format!(
                "release vanishes at {}; set load.f_max",
                curve.tips[k]
            ))));
        }
        worst = worst.max(toughness[k] / g);
    }
    Ok(worst.sqrt())
}

fn evolve_cmd(
    cfg: &RunConfig,
    out: &mut Outputs,
    lines: &mut Vec<String>,
    notes: &mut BTreeMap<String, String>,
) -> Result<(), CliError> {
    let curve = laminate_curve(cfg)?;
    let toughness = toughness_on(&cfg.spec, &curve.tips)?;
    let l0 = snap_l0(&curve, cfg.l0);
    let peak = if cfg.load.explicit_peak() { 1.0 } else { fallback_peak(&curve, &toughness, l0)? };
    let load = cfg.load.program(peak)?;
    notes.insert("l0".into(), l0.to_string());
    notes.insert("load_peak".into(), load.f_values.iter().cloned().fold(0.0, f64::max).to_string());
    let trace = evolve_any(&curve, &toughness, &load, l0)?;
    let griffith = griffith_check(&trace, &curve, &toughness, &load, cfg.griffith_tol);
    let identity = energy_identity(&trace);
    let costs = jump_cost(&trace, &curve, &toughness, &load)?;
    out.add("release.csv", |w| output::write_release(w, &curve))?;
    out.add("trace.csv", |w| output::write_trace(w, &trace))?;
    out.add("jumps.csv", |w| output::write_jumps(w, &costs))?;
    let mut summary = vec![
        format!("griffith: {}", if griffith.passed() { "pass" } else { "fail" }),
        format!("identity_residual: {}", output::num(identity.max_relative)),
        format!("jumps: {}", trace.jumps.len()),
        format!("final_tip: {}", trace.tip.last().copied().unwrap_or(l0)),
    ];
    for v in &griffith.violations {
        summary.push(format!("violation: {:?} at step {} (l = {}): {}", v.condition, v.time_index, v.l, v.detail));
    }
    out.add("summary.txt", |w| summary.iter().try_for_each(|s| writeln!(w, "{s}")))?;
    lines.extend(summary);
    Ok(())
}

/// `l0` moved onto the tip lattice of `curve`.
fn snap_l0(curve: &ReleaseCurve, l0: f64) -> f64 {
    curve.tips.iter().cloned().min_by(|a, b| (a - l0).abs().total_cmp(&(b - l0).abs())).unwrap_or(l0)
}

fn study_cmd(
    cfg: &RunConfig,
    out: &mut Outputs,
    lines: &mut Vec<String>,
    notes: &mut BTreeMap<String, String>,
) -> Result<(), CliError> {
    let mut sc = StudyConfig::new(cfg.spec, cfg.n_list.clone(), cfg.probes.clone());
    sc.mesh = cfg.mesh;
    sc.solver = cfg.solver;
    sc.l0 = cfg.l0;
    let study = Study::run(sc)?;
    let load = study_load(cfg, &study)?;
    notes.insert("load_peak".into(), load.f_values.iter().cloned().fold(0.0, f64::max).to_string());
    let estimates = effective_toughness_estimate(&study)?;
    let conv = evolution_convergence(&study, &load)?;
    out.add("release_hom.csv", |w| output::write_release(w, &study.hom_curve))?;
    out.add("trace_hom.csv", |w| output::write_trace(w, &conv.hom_trace))?;
    let mut rows = Vec::new();
    for (i, lv) in study.levels.iter().enumerate() {
        let (_, trace) = &conv.traces[i];
        let costs = jump_cost(trace, &lv.curve, &lv.toughness, &load)?;
        let residual = energy_identity(trace).max_relative;
        out.add(&format!("release_n{}.csv", lv.n), |w| output::write_release(w, &lv.curve))?;
        out.add(&format!("trace_n{}.csv", lv.n), |w| output::write_trace(w, trace))?;
        out.add(&format!("jumps_n{}.csv", lv.n), |w| output::write_jumps(w, &costs))?;
        let d_n = conv.distances.iter().find(|(n, _)| *n == lv.n).map(|&(_, d)| d);
        for e in &estimates {
            let (_, ratio, gc_eff) = e.per_n[i];
            rows.push(SummaryRow { n: lv.n, probe_l: e.l, ratio, gc_eff, d_n, identity_residual: Some(residual) });
        }
    }
    out.add("summary.csv", |w| output::write_summary(w, &rows))?;
    for e in &estimates {
        lines.push(format!("probe {}: gc_eff estimate {}", e.l, e.describe()));
    }
    for (n, d) in &conv.distances {
        lines.push(format!("n = {n}: d_n = {}", output::num(*d)));
    }
    Ok(())
}

fn study_load(cfg: &RunConfig, study: &Study) -> Result<LoadProgram, CliError> {
    match &cfg.load {
        LoadSpec::Linear { f_max: None, t_end, steps } => {
            let base = study.default_load(*steps)?;
            let peak = *base.f_values.last().unwrap_or(&0.0);
            Ok(LoadProgram::linear(*t_end, peak, *steps)?)
        }
        other => Ok(other.program(1.0)?),
    }
}
