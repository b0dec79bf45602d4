//! Local Lax-Friedrichs integration of Riemann data.
//!
//! The update is
//!
//! ```text
//! H_i ← ½(H_{i−1} + H_{i+1}) − Δt/(2Δx) (G_{i+1} − G_{i−1})
//! ```
//!
//! with `Δt = cfl · Δx / max_i max(|λ_a|, |λ_0|)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{State, SystemParams, VACUUM_FLOOR};
use crate::par::{self, Execution};

mod extract;

pub use extract::{extract_wave_structure, ExtractOptions, ExtractedWave, Plateau, WaveStructure};

/// Chunk size below which per-cell loops are not split across threads.
const PAR_MIN_LEN: usize = 2048;

/// Uniform cell-centred grid on `[x_left, x_left + n_cells·dx]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_left: f64,
    pub dx: f64,
    pub n_cells: usize,
}

impl Grid {
    /// Grid symmetric about `x = 0`.
    pub fn centered(n_cells: usize, dx: f64) -> Self {
        Self { x_left: -0.5 * n_cells as f64 * dx, dx, n_cells }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx
    }

    pub fn width(&self) -> f64 {
        self.n_cells as f64 * self.dx
    }
}

/// Conserved variables on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub rho: Vec<f64>,
    pub m: Vec<f64>,
}

impl Field {
    /// Riemann data with the jump at `x = 0`.
    pub fn riemann(grid: &Grid, left: State, right: State) -> Self {
        let (cl, cr) = (left.to_conserved(), right.to_conserved());
        let mut rho = Vec::with_capacity(grid.n_cells);
        let mut m = Vec::with_capacity(grid.n_cells);
        for i in 0..grid.n_cells {
            let c = if grid.x(i) < 0.0 { cl } else { cr };
            rho.push(c.rho);
            m.push(c.m);
        }
        Self { rho, m }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn state(&self, i: usize) -> State {
        crate::model::Conserved { rho: self.rho[i], m: self.m[i] }.to_state()
    }

    pub fn u_tilde(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.state(i).u_tilde).collect()
    }

    /// `(Σρ, Σm) · dx`, summed pairwise.
    pub fn totals(&self, dx: f64) -> (f64, f64) {
        (pairwise_sum(&self.rho) * dx, pairwise_sum(&self.m) * dx)
    }
}

fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 64 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Boundary {
    /// Zero-gradient ghost cells.
    #[default]
    Outflow,
    Periodic,
}

/// What one step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    pub lambda_max: f64,
    /// `λ_max Δt / Δx`.
    pub courant: f64,
}

/// Reusable buffers for [`llf_step`].
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    g1: Vec<f64>,
    g2: Vec<f64>,
    speed: Vec<f64>,
    rho: Vec<f64>,
    m: Vec<f64>,
}

/// Settings for one step.
#[derive(Debug, Clone, Copy)]
pub struct StepSettings {
    pub cfl: f64,
    pub boundary: Boundary,
    pub exec: Execution,
    /// Upper bound on `Δt`, used to land on output times.
    pub dt_cap: f64,
}

/// Advances `field` by one step from time `t`.
pub fn llf_step(
    params: &SystemParams,
    grid: &Grid,
    field: &mut Field,
    t: f64,
    settings: StepSettings,
    ws: &mut Workspace,
) -> Result<StepInfo> {
    let n = field.len();
    ws.g1.resize(n, 0.0);
    ws.g2.resize(n, 0.0);
    ws.speed.resize(n, 0.0);
    ws.rho.resize(n, 0.0);
    ws.m.resize(n, 0.0);

    let i_t = params.shift(t);
    {
        let (rho, m) = (&field.rho, &field.m);
        let mut cells: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 0.0); n];
        par::fill_indexed(settings.exec, &mut cells, PAR_MIN_LEN, |i| cell_flux(params, rho[i], m[i], i_t));
        for (i, (g1, g2, s)) in cells.into_iter().enumerate() {
            ws.g1[i] = g1;
            ws.g2[i] = g2;
            ws.speed[i] = s;
        }
    }
    let lambda_max = ws.speed.iter().copied().fold(0.0, f64::max);
    if !(lambda_max > 0.0) {
        return Err(Error::ZeroWaveSpeed);
    }
    let dt = (settings.cfl * grid.dx / lambda_max).min(settings.dt_cap);
    let c = 0.5 * dt / grid.dx;

    let last = n - 1;
    let nb = |i: usize| -> (usize, usize) {
        match settings.boundary {
            Boundary::Outflow => (i.saturating_sub(1), (i + 1).min(last)),
            Boundary::Periodic => ((i + n - 1) % n, (i + 1) % n),
        }
    };
    let (rho, m, g1, g2) = (&field.rho, &field.m, &ws.g1, &ws.g2);
    let mut new_rho = std::mem::take(&mut ws.rho);
    let mut new_m = std::mem::take(&mut ws.m);
    let update = |i: usize| -> (f64, f64) {
        let (l, r) = nb(i);
        let h1 = 0.5 * (rho[l] + rho[r]) - c * (g1[r] - g1[l]);
        let h2 = 0.5 * (m[l] + m[r]) - c * (g2[r] - g2[l]);
        (h1, h2)
    };
    {
        let mut pairs: Vec<(f64, f64)> = vec![(0.0, 0.0); n];
        par::fill_indexed(settings.exec, &mut pairs, PAR_MIN_LEN, update);
        for (i, (h1, h2)) in pairs.into_iter().enumerate() {
            new_rho[i] = h1;
            new_m[i] = h2;
        }
    }
    std::mem::swap(&mut field.rho, &mut new_rho);
    std::mem::swap(&mut field.m, &mut new_m);
    ws.rho = new_rho;
    ws.m = new_m;
    Ok(StepInfo { dt, lambda_max, courant: lambda_max * dt / grid.dx })
}

/// `(f1, f2, max |λ|)` for one cell; vacuum cells are inert.
#[inline]
fn cell_flux(params: &SystemParams, rho: f64, m: f64, i_t: f64) -> (f64, f64, f64) {
    if !(rho > VACUUM_FLOOR) {
        return (0.0, 0.0, 0.0);
    }
    let u = m / rho;
    let v = u + i_t;
    let p = params.pressure_ratio(rho);
    let mob = 1.0 - p;
    let f1 = rho * v * mob;
    let la = v * (1.0 - (params.a_exp + 1.0) * p);
    let l0 = v * mob;
    (f1, u * f1, la.abs().max(l0.abs()))
}

/// Flattens near-constant runs to their mean, conserving both totals.
///
/// A run is at least `min_run` consecutive cells whose `ρ` and `m` stay
/// within `tol` (relative) of the run's first cell.
pub fn renormalize(field: &mut Field, min_run: usize, tol: f64) -> usize {
    let n = field.len();
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
    let mut flattened = 0;
    let mut i = 0;
    while i < n {
        let (r0, m0) = (field.rho[i], field.m[i]);
        let mut j = i + 1;
        while j < n && close(field.rho[j], r0) && close(field.m[j], m0) {
            j += 1;
        }
        let uniform = field.rho[i..j].iter().all(|&r| r == r0) && field.m[i..j].iter().all(|&m| m == m0);
        if j - i >= min_run && !uniform {
            let len = (j - i) as f64;
            let mr = field.rho[i..j].iter().sum::<f64>() / len;
            let mm = field.m[i..j].iter().sum::<f64>() / len;
            field.rho[i..j].fill(mr);
            field.m[i..j].fill(mm);
            flattened += j - i;
        }
        i = j;
    }
    flattened
}

/// Run settings for one Riemann problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: SystemParams,
    pub left: State,
    pub right: State,
    pub grid: Grid,
    pub t_end: f64,
    pub cfl: f64,
    /// Steps between regular snapshots.
    pub block_steps: usize,
    /// Maximum number of blocks.
    pub blocks: usize,
    /// Extra output times, hit exactly.
    pub snapshot_times: Vec<f64>,
    pub renormalize: bool,
    pub renormalize_every: usize,
    pub boundary: Boundary,
}

impl RunConfig {
    /// Defaults: CFL 0.45, 20 blocks of 1000 steps, renormalization on.
    pub fn new(params: SystemParams, left: State, right: State, grid: Grid, t_end: f64) -> Self {
        Self {
            params,
            left,
            right,
            grid,
            t_end,
            cfl: 0.45,
            block_steps: 1000,
            blocks: 20,
            snapshot_times: Vec::new(),
            renormalize: true,
            renormalize_every: 100,
            boundary: Boundary::Outflow,
        }
    }
}

/// Largest characteristic speed over the Riemann data at the start and end
/// of a run.
pub fn speed_bound(params: &SystemParams, left: State, right: State, t_end: f64) -> f64 {
    [0.0, t_end]
        .iter()
        .flat_map(|&t| [left, right].map(|s| params.eigenvalues(s, t).max_abs()))
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max)
}

/// Cells needed so waves stay inside the domain until `t_end`, with a 1.5
/// margin on the speed bound.
pub fn required_cells(params: &SystemParams, left: State, right: State, t_end: f64, dx: f64) -> usize {
    let half = 1.5 * speed_bound(params, left, right, t_end) * t_end;
    (2.0 * half / dx).ceil() as usize + 8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub rho: Vec<f64>,
    pub u_tilde: Vec<f64>,
}

impl Snapshot {
    fn of(field: &Field, step: usize, t: f64) -> Self {
        Self { step, t, rho: field.rho.clone(), u_tilde: field.u_tilde() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub grid: Grid,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub t_final: f64,
    pub max_courant: f64,
    /// Initial and final `(Σρ dx, Σm dx)`.
    pub totals: [(f64, f64); 2],
}

/// Integrates `cfg` until `t_end` or the step budget runs out.
///
/// Snapshots: the initial data, every `block_steps` steps, each requested
/// time and the final state.
pub fn run(cfg: &RunConfig, exec: Execution) -> Result<RunOutput> {
    run_with(cfg, exec, |_, _| {})
}

/// [`run`] with a callback after every step.
pub fn run_with<F>(cfg: &RunConfig, exec: Execution, mut on_step: F) -> Result<RunOutput>
where
    F: FnMut(&StepInfo, &Field),
{
    if !(cfg.cfl > 0.0 && cfg.cfl <= 0.5) {
        return Err(Error::InvalidParameter(format!("cfl must lie in (0, 0.5], got {}", cfg.cfl)));
    }
    let grid = cfg.grid;
    let mut field = Field::riemann(&grid, cfg.left, cfg.right);
    let totals0 = field.totals(grid.dx);
    let mut snapshots = vec![Snapshot::of(&field, 0, 0.0)];
    let mut times: Vec<f64> = cfg.snapshot_times.iter().copied().filter(|t| *t > 0.0 && *t <= cfg.t_end).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut next_time = 0;
    let max_steps = cfg.block_steps.saturating_mul(cfg.blocks);
    let mut ws = Workspace::default();
    let mut t = 0.0;
    let mut step = 0;
    let mut max_courant: f64 = 0.0;
    while t < cfg.t_end && step < max_steps {
        let target = times.get(next_time).copied().unwrap_or(cfg.t_end).min(cfg.t_end);
        let settings = StepSettings { cfl: cfg.cfl, boundary: cfg.boundary, exec, dt_cap: target - t };
        let info = llf_step(&cfg.params, &grid, &mut field, t, settings, &mut ws)?;
        step += 1;
        t = if info.dt == target - t { target } else { t + info.dt };
        max_courant = max_courant.max(info.courant);
        if let Some(cell) = field.rho.iter().zip(&field.m).position(|(r, m)| !(r.is_finite() && m.is_finite())) {
            return Err(Error::NonFinite { cell, step });
        }
        for r in field.rho.iter_mut() {
            if *r < 0.0 {
                *r = 0.0;
            }
        }
        if cfg.renormalize && cfg.renormalize_every > 0 && step % cfg.renormalize_every == 0 {
            renormalize(&mut field, 5, 1e-7);
        }
        on_step(&info, &field);
        let hit_time = next_time < times.len() && t >= times[next_time];
        if hit_time {
            while next_time < times.len() && times[next_time] <= t {
                next_time += 1;
            }
        }
        if hit_time || (cfg.block_steps > 0 && step % cfg.block_steps == 0) {
            snapshots.push(Snapshot::of(&field, step, t));
        }
    }
    if snapshots.last().map_or(true, |s| s.step != step) {
        snapshots.push(Snapshot::of(&field, step, t));
    }
    let totals1 = field.totals(grid.dx);
    Ok(RunOutput { grid, snapshots, steps: step, t_final: t, max_courant, totals: [totals0, totals1] })
}

/// One level of a refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineLevel {
    pub n_cells: usize,
    pub t_end: f64,
    pub peak_rho: f64,
    /// `x/t` of the density peak.
    pub peak_speed: f64,
}

/// Repeats a run while doubling both the cell count and the end time at
/// fixed `Δx`, reporting the density peak at each level.
pub fn refine_study(cfg: &RunConfig, levels: usize, exec: Execution) -> Result<Vec<RefineLevel>> {
    if levels < 2 {
        return Err(Error::InvalidParameter("refinement needs at least two levels".into()));
    }
    let mut out = Vec::with_capacity(levels);
    let mut c = cfg.clone();
    c.blocks = usize::MAX / c.block_steps.max(1) / 2;
    c.snapshot_times.clear();
    for _ in 0..levels {
        let res = run(&c, exec)?;
        let snap = res.snapshots.last().expect("run keeps the final snapshot");
        let (k, peak) = snap
            .rho
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
        out.push(RefineLevel { n_cells: c.grid.n_cells, t_end: snap.t, peak_rho: peak, peak_speed: c.grid.x(k) / snap.t });
        c.grid = Grid { x_left: 2.0 * c.grid.x_left, dx: c.grid.dx, n_cells: 2 * c.grid.n_cells };
        c.t_end *= 2.0;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64) -> SystemParams {
        SystemParams::frozen(a, 5.0).unwrap()
    }

    #[test]
    fn uniform_state_is_steady() {
        let grid = Grid::centered(64, 1.0);
        let s = State::new(3.0, -3.0);
        let cfg = RunConfig::new(params(-1.5), s, s, grid, 10.0);
        let out = run(&cfg, Execution::Sequential).unwrap();
        let last = out.snapshots.last().unwrap();
        assert!(last.rho.iter().all(|r| (r - 3.0).abs() < 1e-13));
        assert!(last.u_tilde.iter().all(|u| (u + 3.0).abs() < 1e-13));
    }

    #[test]
    fn hits_requested_times() {
        let grid = Grid::centered(200, 1.0);
        let mut cfg = RunConfig::new(params(-1.5), State::new(3.0, -3.0), State::new(2.0, -5.0), grid, 4.0);
        cfg.snapshot_times = vec![1.0, 3.0];
        let out = run(&cfg, Execution::Sequential).unwrap();
        let ts: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert!(ts.contains(&1.0) && ts.contains(&3.0) && ts.contains(&4.0));
        assert!(out.max_courant <= 0.5);
    }

    #[test]
    fn renormalize_conserves() {
        let mut f = Field { rho: vec![1.0, 1.0 + 1e-9, 1.0, 1.0, 1.0 - 1e-9, 2.0], m: vec![0.5; 6] };
        let before = f.totals(1.0);
        assert_eq!(renormalize(&mut f, 5, 1e-7), 5);
        let after = f.totals(1.0);
        assert!((before.0 - after.0).abs() < 1e-14);
        assert!(f.rho[..5].iter().all(|r| *r == f.rho[0]));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let grid = Grid::centered(5000, 1.0);
        let cfg = RunConfig::new(params(-1.5), State::new(3.0, -3.0), State::new(2.0, -5.0), grid, 50.0);
        let a = run(&cfg, Execution::Sequential).unwrap();
        let b = run(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a.snapshots.last(), b.snapshots.last());
    }
}
