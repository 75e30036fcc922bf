//! Run configuration: a TOML file with `[laminate]`, `[mesh]`, `[load]` and
//! `[run]` sections. Parsing reports every violation it finds, each tagged
//! with the field and, where it can be found, the line.

use std::fmt;
use std::path::Path;

use laminate_core::evolution::LoadProgram;
use laminate_core::materials::{LaminateSpec, MaterialPhase, Orientation, Phase};
use laminate_core::mesh::MeshParams;
use laminate_core::solver::{SolverKind, SolverOptions, DEFAULT_TOL};
use serde::Deserialize;

const SECTIONS: &[(&str, &[&str])] = &[
    ("laminate", &["length", "half_height", "n_layers", "lambda", "orientation", "phase_a", "phase_b"]),
    ("mesh", &["elems_per_layer_x", "elems_y", "refine_near_crack"]),
    ("load", &["profile", "f_max", "t_end", "steps", "times", "values"]),
    ("run", &["tip", "l0", "tol", "solver", "cg_max_iter", "griffith_tol", "n_list", "probes", "out"]),
];
const PHASE_KEYS: &[&str] = &["mu1", "mu2", "gc"];

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    mu1: f64,
    mu2: f64,
    gc: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaminate {
    length: Option<f64>,
    half_height: Option<f64>,
    n_layers: Option<i64>,
    lambda: Option<f64>,
    orientation: Option<String>,
    phase_a: Option<RawPhase>,
    phase_b: Option<RawPhase>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    elems_per_layer_x: Option<i64>,
    elems_y: Option<i64>,
    refine_near_crack: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoad {
    profile: Option<String>,
    f_max: Option<f64>,
    t_end: Option<f64>,
    steps: Option<i64>,
    times: Option<Vec<f64>>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    tip: Option<f64>,
    l0: Option<f64>,
    tol: Option<f64>,
    solver: Option<String>,
    cg_max_iter: Option<i64>,
    griffith_tol: Option<f64>,
    n_list: Option<Vec<i64>>,
    probes: Option<Vec<f64>>,
    out: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    laminate: Option<RawLaminate>,
    mesh: Option<RawMesh>,
    load: Option<RawLoad>,
    run: Option<RawRun>,
}

/// Load program as configured; `f_max = None` lets a study pick its own.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadSpec {
    Linear { f_max: Option<f64>, t_end: f64, steps: usize },
    Triangle { f_max: f64, t_end: f64, steps: usize },
    Table { times: Vec<f64>, values: Vec<f64> },
}

impl LoadSpec {
    /// The program, with `fallback` as peak when none was configured.
    pub fn program(&self, fallback: f64) -> laminate_core::Result<LoadProgram> {
        match self {
            LoadSpec::Linear { f_max, t_end, steps } => LoadProgram::linear(*t_end, f_max.unwrap_or(fallback), *steps),
            LoadSpec::Triangle { f_max, t_end, steps } => LoadProgram::triangle(*t_end, *f_max, *steps),
            LoadSpec::Table { times, values } => LoadProgram::new(times.clone(), values.clone()),
        }
    }

    pub fn explicit_peak(&self) -> bool {
        !matches!(self, LoadSpec::Linear { f_max: None, .. })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: LaminateSpec,
    pub mesh: MeshParams,
    pub load: LoadSpec,
    pub tip: f64,
    pub l0: f64,
    pub solver: SolverOptions,
    pub griffith_tol: f64,
    pub n_list: Vec<usize>,
    pub probes: Vec<f64>,
    pub out: Option<String>,
}

/// Line of `key` inside `[section]`, counted from 1.
fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut in_section = false;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            in_section = t.trim_start_matches('[').trim_end_matches(']').trim() == section;
            if in_section && key.is_none() {
                return Some(i + 1);
            }
            continue;
        }
        if let (true, Some(k)) = (in_section, key) {
            if t.split('=').next().map(str::trim) == Some(k) {
                return Some(i + 1);
            }
        }
    }
    None
}

struct Collector<'a> {
    text: &'a str,
    out: Vec<Violation>,
}

impl Collector<'_> {
    fn push(&mut self, section: &str, key: &str, message: impl Into<String>) {
        let line = locate(self.text, section, Some(key.split('.').next().unwrap_or(key)));
        self.out.push(Violation { field: format!("{section}.{key}"), line, message: message.into() });
    }
}

fn unknown_keys(text: &str, table: &toml::Table) -> Vec<Violation> {
    let mut out = Vec::new();
    for (name, value) in table {
        let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == name) else {
            out.push(Violation { field: name.clone(), line: locate(text, name, None), message: "unknown section".into() });
            continue;
        };
        let Some(inner) = value.as_table() else {
            out.push(Violation { field: name.clone(), line: None, message: "must be a table".into() });
            continue;
        };
        for (key, v) in inner {
            if !keys.contains(&key.as_str()) {
                out.push(Violation { field: format!("{name}.{key}"), line: locate(text, name, Some(key)), message: "unknown key".into() });
            } else if key.starts_with("phase_") {
                for k in v.as_table().into_iter().flat_map(|t| t.keys()) {
                    if !PHASE_KEYS.contains(&k.as_str()) {
                        out.push(Violation {
                            field: format!("{name}.{key}.{k}"),
                            line: locate(text, name, Some(key)),
                            message: "unknown key".into(),
                        });
                    }
                }
            }
        }
    }
    out
}

fn positive(c: &mut Collector, section: &str, key: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        c.push(section, key, format!("must be a finite number > 0, got {v}"));
    }
}

fn phase(c: &mut Collector, key: &str, p: Option<RawPhase>) -> MaterialPhase {
    match p {
        Some(p) => {
            positive(c, "laminate", &format!("{key}.mu1"), p.mu1);
            positive(c, "laminate", &format!("{key}.mu2"), p.mu2);
            positive(c, "laminate", &format!("{key}.gc"), p.gc);
            MaterialPhase { mu1: p.mu1, mu2: p.mu2, gc: p.gc }
        }
        None => {
            c.push("laminate", key, "missing required key");
            MaterialPhase { mu1: 1.0, mu2: 1.0, gc: 1.0 }
        }
    }
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str) -> Result<RunConfig, Vec<Violation>> {
    let table: toml::Table = toml::from_str(text).map_err(|e| {
        vec![Violation { field: "<file>".into(), line: None, message: e.to_string().trim().replace('\n', " ") }]
    })?;
    let unknown = unknown_keys(text, &table);
    if !unknown.is_empty() {
        return Err(unknown);
    }
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        vec![Violation { field: "<file>".into(), line: None, message: e.to_string().trim().replace('\n', " ") }]
    })?;
    let mut c = Collector { text, out: Vec::new() };

    let Some(lam) = raw.laminate else {
        return Err(vec![Violation { field: "laminate".into(), line: None, message: "missing required section".into() }]);
    };
    let length = lam.length.unwrap_or(1.0);
    let half_height = lam.half_height.unwrap_or(0.5);
    positive(&mut c, "laminate", "length", length);
    positive(&mut c, "laminate", "half_height", half_height);
    let orientation = match lam.orientation.as_deref().unwrap_or("vertical") {
        "vertical" => Orientation::Vertical,
        "horizontal" => Orientation::Horizontal,
        other => {
            c.push("laminate", "orientation", format!("must be \"vertical\" or \"horizontal\", got {other:?}"));
            Orientation::Vertical
        }
    };
    let n_layers = match lam.n_layers {
        None => {
            c.push("laminate", "n_layers", "missing required key");
            2
        }
        Some(n) if n < 1 => {
            c.push("laminate", "n_layers", format!("must be >= 1, got {n}"));
            2
        }
        Some(n) => {
            if orientation == Orientation::Horizontal && n % 2 != 0 {
                c.push("laminate", "n_layers", format!("horizontal layers need an even n_layers, got {n}"));
            }
            n as usize
        }
    };
    let lambda = match lam.lambda {
        None => {
            c.push("laminate", "lambda", "missing required key");
            0.5
        }
        Some(l) => {
            if !(l > 0.0 && l < 1.0) {
                c.push("laminate", "lambda", format!("lambda must lie in (0,1), got {l}"));
            }
            l
        }
    };
    let phase_a = phase(&mut c, "phase_a", lam.phase_a);
    let phase_b = phase(&mut c, "phase_b", lam.phase_b);
    let spec = LaminateSpec { length, half_height, n_layers, lambda, phase_a, phase_b, orientation };

    let m = raw.mesh.unwrap_or_default();
    let d = MeshParams::default();
    let count = |c: &mut Collector, key: &str, v: Option<i64>, default: usize, min: i64| match v {
        None => default,
        Some(v) if v < min => {
            c.push("mesh", key, format!("must be >= {min}, got {v}"));
            default
        }
        Some(v) => v as usize,
    };
    let heterogeneous_vertical = orientation == Orientation::Vertical && !spec.is_elastically_homogeneous();
    let min_epl = if heterogeneous_vertical { 4 } else { 2 };
    let mesh = MeshParams {
        elems_per_layer_x: count(&mut c, "elems_per_layer_x", m.elems_per_layer_x, d.elems_per_layer_x, min_epl),
        elems_y: count(&mut c, "elems_y", m.elems_y, d.elems_y, 4),
        refine_near_crack: m.refine_near_crack.unwrap_or(d.refine_near_crack),
    };
    if !(1.0..=4.0).contains(&mesh.refine_near_crack) {
        c.push("mesh", "refine_near_crack", format!("must lie in [1, 4], got {}", mesh.refine_near_crack));
    }

    let ld = raw.load.unwrap_or_default();
    let has_table = ld.times.is_some() || ld.values.is_some();
    let t_end = ld.t_end.unwrap_or(1.0);
    positive(&mut c, "load", "t_end", t_end);
    let steps = match ld.steps {
        None => 400,
        Some(s) if s < 1 => {
            c.push("load", "steps", format!("must be >= 1, got {s}"));
            400
        }
        Some(s) => s as usize,
    };
    if let Some(f) = ld.f_max {
        if !(f >= 0.0 && f.is_finite()) {
            c.push("load", "f_max", format!("must be a finite number >= 0, got {f}"));
        }
    }
    let load = match ld.profile.as_deref().unwrap_or("linear") {
        "linear" => LoadSpec::Linear { f_max: ld.f_max, t_end, steps },
        "triangle" => {
            if ld.f_max.is_none() {
                c.push("load", "f_max", "required for the triangle profile");
            }
            LoadSpec::Triangle { f_max: ld.f_max.unwrap_or(1.0), t_end, steps }
        }
        "table" => {
            let (times, values) = (ld.times.unwrap_or_default(), ld.values.unwrap_or_default());
            if let Err(e) = LoadProgram::new(times.clone(), values.clone()) {
                c.push("load", "times", e.to_string());
            }
            LoadSpec::Table { times, values }
        }
        other => {
            c.push("load", "profile", format!("must be \"linear\", \"triangle\" or \"table\", got {other:?}"));
            LoadSpec::Linear { f_max: ld.f_max, t_end, steps }
        }
    };
    if !matches!(load, LoadSpec::Table { .. }) && has_table {
        c.push("load", "times", "sample tables need profile = \"table\"");
    }

    let r = raw.run.unwrap_or_default();
    let l0 = r.l0.unwrap_or(length / 4.0);
    if !(l0 > 0.0 && l0 < length) {
        c.push("run", "l0", format!("must lie in (0, L), got {l0}"));
    }
    let tip = r.tip.unwrap_or(length / 2.0);
    if !(tip > 0.0 && tip <= length) {
        c.push("run", "tip", format!("must lie in (0, L], got {tip}"));
    }
    let tol = r.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol <= 1e-4) {
        c.push("run", "tol", format!("must lie in (0, 1e-4], got {tol}"));
    }
    let kind = match r.solver.as_deref().unwrap_or("direct") {
        "direct" => SolverKind::Direct,
        "cg" => match r.cg_max_iter {
            Some(m) if m < 1 => {
                c.push("run", "cg_max_iter", format!("must be >= 1, got {m}"));
                SolverKind::Cg { max_iter: 1 }
            }
            m => SolverKind::Cg { max_iter: m.unwrap_or(20_000) as usize },
        },
        other => {
            c.push("run", "solver", format!("must be \"direct\" or \"cg\", got {other:?}"));
            SolverKind::Direct
        }
    };
    let griffith_tol = r.griffith_tol.unwrap_or(1e-8);
    if !(griffith_tol >= 0.0 && griffith_tol < 1.0) {
        c.push("run", "griffith_tol", format!("must lie in [0, 1), got {griffith_tol}"));
    }
    let n_list: Vec<usize> = match r.n_list {
        None => vec![2, 4, 8, 16],
        Some(v) => {
            if v.is_empty() || v.iter().any(|&n| n < 1) || !v.windows(2).all(|w| w[1] > w[0]) {
                c.push("run", "n_list", format!("must be a non-empty increasing list of counts >= 1, got {v:?}"));
            }
            if orientation == Orientation::Horizontal && v.iter().any(|n| n % 2 != 0) {
                c.push("run", "n_list", "horizontal layers need even layer counts");
            }
            v.into_iter().map(|n| n.max(1) as usize).collect()
        }
    };
    let probes = match r.probes {
        Some(p) => {
            for &x in &p {
                if !(x > l0 && x < length) {
                    c.push("run", "probes", format!("probe {x} must lie in (l0, L)"));
                }
            }
            p
        }
        None => default_probes(&spec, n_list.last().copied().unwrap_or(n_layers)),
    };

    if c.out.is_empty() {
        if let Err(e) = spec.validate().and_then(|_| mesh.validate()) {
            c.push("laminate", "n_layers", e.to_string());
        }
    }
    if !c.out.is_empty() {
        return Err(c.out);
    }
    Ok(RunConfig {
        spec,
        mesh,
        load,
        tip,
        l0,
        solver: SolverOptions { tol, kind },
        griffith_tol,
        n_list,
        probes,
        out: r.out,
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig, Vec<Violation>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![Violation { field: "<file>".into(), line: None, message: format!("cannot read {}: {e}", path.display()) }]
    })?;
    parse_config_str(&text)
}

/// Centres of phase-B sub-layers of the finest laminate nearest to
/// `0.4 L`, `0.55 L` and `0.7 L`. The window minimum sits closest to a
/// probe placed there.
pub fn default_probes(spec: &LaminateSpec, n_max: usize) -> Vec<f64> {
    let fine = spec.with_layers(n_max);
    let centres: Vec<f64> = fine
        .sub_layers()
        .iter()
        .filter(|s| s.phase == Phase::B)
        .map(|s| 0.5 * (s.start + s.end))
        .collect();
    let mut out: Vec<f64> = [0.4, 0.55, 0.7]
        .iter()
        .filter_map(|&f| {
            let target = f * spec.length;
            centres.iter().cloned().min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        })
        .collect();
    out.dedup();
    out
}
