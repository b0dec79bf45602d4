//! Flat `section.key = value` scenario files.
//!
//! ```text
//! # Case 1, Region I_a
//! system.a_exp = -1.5
//! system.rho_bar = 5
//! source.pieces = 0:0, 30:0.1
//! initial.left_rho = 3
//! initial.left_u = -3
//! initial.right_rho = 2
//! initial.right_u = -5
//! run.t_end = 100
//! output.kinds = profiles, regions
//! ```
//!
//! Lists are comma separated. `source.pieces` holds `t_start:value` pairs.
//! `grid.n_cells` defaults to the smallest domain that keeps every wave
//! inside until `run.t_end`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::model::{SourceTerm, State, SystemParams};
use crate::solver::{self, Grid, RunConfig};

pub const DEFAULT_CFL: f64 = 0.45;
pub const DEFAULT_DX: f64 = 1.0;
pub const DEFAULT_BLOCKS: usize = 20;
pub const DEFAULT_BLOCK_STEPS: usize = 1000;

/// Products a scenario asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Profiles,
    Regions,
    Curves,
    Delta,
    Scan,
}

impl OutputKind {
    pub const ALL: [OutputKind; 5] =
        [OutputKind::Profiles, OutputKind::Regions, OutputKind::Curves, OutputKind::Delta, OutputKind::Scan];

    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Profiles => "profiles",
            OutputKind::Regions => "regions",
            OutputKind::Curves => "curves",
            OutputKind::Delta => "delta",
            OutputKind::Scan => "scan",
        }
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        OutputKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown output kind `{s}`"))
    }
}

/// One fully specified Riemann problem plus run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: SystemParams,
    pub left: State,
    pub right: State,
    pub grid: Grid,
    pub t_end: f64,
    pub cfl: f64,
    /// Steps between snapshots.
    pub block_steps: usize,
    /// The run stops after `blocks * block_steps` steps even short of `t_end`.
    pub blocks: usize,
    /// Extra snapshot times.
    pub times: Vec<f64>,
    pub renormalize: bool,
    pub outputs: Vec<OutputKind>,
}

impl Scenario {
    /// Scenario with default run settings and an auto-sized grid.
    pub fn new(params: SystemParams, left: State, right: State, t_end: f64) -> Result<Self, IoError> {
        let n = solver::required_cells(&params, left, right, t_end, DEFAULT_DX);
        let s = Self {
            params,
            left,
            right,
            grid: Grid::centered(n, DEFAULT_DX),
            t_end,
            cfl: DEFAULT_CFL,
            block_steps: DEFAULT_BLOCK_STEPS,
            blocks: DEFAULT_BLOCKS,
            times: Vec::new(),
            renormalize: true,
            outputs: vec![OutputKind::Profiles],
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks the invariants a parsed file must satisfy.
    pub fn validate(&self) -> Result<(), IoError> {
        let bad = |m: String| Err(IoError::Validation(m));
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return bad(format!("run.cfl = {} must lie in (0, 0.5]", self.cfl));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("run.t_end = {} must be finite and nonnegative", self.t_end));
        }
        if self.blocks == 0 || self.block_steps == 0 {
            return bad("run.blocks and run.block_steps must be positive".into());
        }
        if let Some(t) = self.times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return bad(format!("run.times entry {t} must be finite and nonnegative"));
        }
        if !(self.left.rho > 0.0 && self.right.rho > 0.0) {
            return bad("initial densities must be positive".into());
        }
        if ![self.left.u_tilde, self.right.u_tilde, self.left.rho, self.right.rho].iter().all(|x| x.is_finite()) {
            return bad("initial states must be finite".into());
        }
        if !(self.grid.dx > 0.0 && self.grid.dx.is_finite()) {
            return bad(format!("grid.dx = {} must be positive", self.grid.dx));
        }
        let need = solver::required_cells(&self.params, self.left, self.right, self.t_end, self.grid.dx).max(3);
        if self.grid.n_cells < need {
            return bad(format!(
                "grid.n_cells = {} is below the {need} cells needed to keep waves inside the domain until t_end",
                self.grid.n_cells
            ));
        }
        if self.outputs.is_empty() {
            return bad("output.kinds must name at least one output".into());
        }
        Ok(())
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Solver settings: a snapshot every block and at each of `times`.
    pub fn run_config(&self) -> RunConfig {
        let mut cfg = RunConfig::new(self.params.clone(), self.left, self.right, self.grid, self.t_end);
        cfg.cfl = self.cfl;
        cfg.renormalize = self.renormalize;
        cfg.block_steps = self.block_steps;
        cfg.blocks = self.blocks;
        cfg.snapshot_times = self.times.clone();
        cfg
    }
}

const KEYS: [&str; 16] = [
    "system.a_exp",
    "system.rho_bar",
    "source.pieces",
    "initial.left_rho",
    "initial.left_u",
    "initial.right_rho",
    "initial.right_u",
    "grid.n_cells",
    "grid.dx",
    "run.t_end",
    "run.cfl",
    "run.blocks",
    "run.block_steps",
    "run.times",
    "run.renormalize",
    "output.kinds",
];

struct Entries {
    map: BTreeMap<&'static str, (usize, String)>,
    end_line: usize,
}

impl Entries {
    fn raw(&self, key: &'static str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn required<T: FromStr>(&self, key: &'static str) -> Result<T, IoError> {
        match self.raw(key) {
            Some(_) => self.optional(key).map(|v| v.expect("present")),
            None => Err(IoError::Parse { line: self.end_line, message: format!("missing required key `{key}`") }),
        }
    }

    fn optional<T: FromStr>(&self, key: &'static str) -> Result<Option<T>, IoError> {
        let Some((line, v)) = self.raw(key) else { return Ok(None) };
        v.parse::<T>()
            .map(Some)
            .map_err(|_| IoError::Parse { line: *line, message: format!("cannot read `{v}` as the value of `{key}`") })
    }

    fn list<T, F>(&self, key: &'static str, item: F) -> Result<Option<Vec<T>>, IoError>
    where
        F: Fn(&str) -> Option<T>,
    {
        let Some((line, v)) = self.raw(key) else { return Ok(None) };
        if v.is_empty() {
            return Ok(Some(Vec::new()));
        }
        v.split(',')
            .map(|s| {
                let s = s.trim();
                item(s).ok_or_else(|| IoError::Parse { line: *line, message: format!("bad list item `{s}` in `{key}`") })
            })
            .collect::<Result<Vec<T>, IoError>>()
            .map(Some)
    }
}

fn tokenize(text: &str) -> Result<Entries, IoError> {
    let mut map = BTreeMap::new();
    let mut end_line = 1;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        end_line = line;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| IoError::Parse { line, message: format!("expected `section.key = value`, found `{body}`") })?;
        let key = key.trim();
        let Some(known) = KEYS.iter().find(|k| **k == key) else {
            return Err(IoError::Parse { line, message: format!("unknown key `{key}`") });
        };
        if map.insert(*known, (line, value.trim().to_string())).is_some() {
            return Err(IoError::Parse { line, message: format!("duplicate key `{key}`") });
        }
    }
    if map.is_empty() {
        return Err(IoError::Parse { line: end_line, message: "configuration is empty".into() });
    }
    Ok(Entries { map, end_line })
}

fn parse_piece(s: &str) -> Option<(f64, f64)> {
    let (t, v) = s.split_once(':')?;
    Some((t.trim().parse().ok()?, v.trim().parse().ok()?))
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<Scenario, IoError> {
    let e = tokenize(text)?;
    let a_exp: f64 = e.required("system.a_exp")?;
    let rho_bar: f64 = e.required("system.rho_bar")?;
    let source = match e.list("source.pieces", parse_piece)? {
        None => SourceTerm::zero(),
        Some(p) => SourceTerm::new(p).map_err(|err| IoError::Validation(format!("source.pieces: {err}")))?,
    };
    let params =
        SystemParams::new(a_exp, rho_bar, source).map_err(|err| IoError::Validation(format!("system: {err}")))?;
    let left = State::new(e.required("initial.left_rho")?, e.required("initial.left_u")?);
    let right = State::new(e.required("initial.right_rho")?, e.required("initial.right_u")?);
    let t_end: f64 = e.required("run.t_end")?;
    let dx = e.optional("grid.dx")?.unwrap_or(DEFAULT_DX);
    let n_cells = match e.optional::<usize>("grid.n_cells")? {
        Some(n) => n,
        None if t_end.is_finite() && dx > 0.0 => solver::required_cells(&params, left, right, t_end.max(0.0), dx).max(3),
        None => 3,
    };
    let mut outputs = e.list("output.kinds", |s| s.parse().ok())?.unwrap_or_else(|| vec![OutputKind::Profiles]);
    outputs.sort();
    outputs.dedup();
    let s = Scenario {
        params,
        left,
        right,
        grid: Grid::centered(n_cells, dx),
        t_end,
        cfl: e.optional("run.cfl")?.unwrap_or(DEFAULT_CFL),
        block_steps: e.optional("run.block_steps")?.unwrap_or(DEFAULT_BLOCK_STEPS),
        blocks: e.optional("run.blocks")?.unwrap_or(DEFAULT_BLOCKS),
        times: e.list("run.times", |s| s.parse().ok())?.unwrap_or_default(),
        renormalize: e.optional("run.renormalize")?.unwrap_or(true),
        outputs,
    };
    s.validate()?;
    Ok(s)
}

/// Writes every key explicitly; `parse_config(&render_config(s)) == s`.
pub fn render_config(s: &Scenario) -> String {
    let join = |v: Vec<String>| v.join(", ");
    let pieces = join(s.params.source.pieces().iter().map(|(t, v)| format!("{t}:{v}")).collect());
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("system.a_exp", s.params.a_exp.to_string());
    put("system.rho_bar", s.params.rho_bar.to_string());
    put("source.pieces", pieces);
    put("initial.left_rho", s.left.rho.to_string());
    put("initial.left_u", s.left.u_tilde.to_string());
    put("initial.right_rho", s.right.rho.to_string());
    put("initial.right_u", s.right.u_tilde.to_string());
    put("grid.n_cells", s.grid.n_cells.to_string());
    put("grid.dx", s.grid.dx.to_string());
    put("run.t_end", s.t_end.to_string());
    put("run.cfl", s.cfl.to_string());
    put("run.blocks", s.blocks.to_string());
    put("run.block_steps", s.block_steps.to_string());
    put("run.times", join(s.times.iter().map(f64::to_string).collect()));
    put("run.renormalize", s.renormalize.to_string());
    put("output.kinds", join(s.outputs.iter().map(|k| k.to_string()).collect()));
    out
}
