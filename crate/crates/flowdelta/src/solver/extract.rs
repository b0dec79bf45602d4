//! Reading elementary waves off a computed profile.
//!
//! The profile is split into plateaus (runs of nearly constant cells) and
//! the transition zones between them. Inside a zone:
//!
//! - cells far below both end densities form a vacuum,
//! - a density spike well above both neighbouring plateaus is a delta shock,
//! - everything else is cut into runs by local characteristic
//!   decomposition of each cell increment into the `R_a` and `R_0`
//!   directions.
//!
//! An a-family run is a shock when its end states are compressive and a
//! rarefaction when it is expansive and about as wide as its fan should be.
//! Waves touching a vacuum are labelled from the side of `ρ̄` their
//! non-vacuum plateau sits on: below `ρ̄` the plateau's contact curve runs
//! into the vacuum, above it an a-wave is needed first.

use serde::{Deserialize, Serialize};

use crate::model::{State, SystemParams, VACUUM_FLOOR};
use crate::solver::{Grid, Snapshot};
use crate::waves::WaveKind;

/// Thresholds used by [`extract_wave_structure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Largest relative cell-to-cell change inside a plateau.
    pub plateau_tol: f64,
    pub min_plateau_cells: usize,
    /// Vacuum cells sit below this fraction of the smaller end density.
    pub vacuum_ratio: f64,
    /// Delta cells rise above this multiple of the larger neighbouring plateau.
    pub delta_ratio: f64,
    /// A run wider than this fraction of its fan is a rarefaction.
    pub fan_ratio: f64,
    /// Runs lighter than this (in scaled units) merge into a neighbour.
    pub min_run_weight: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            plateau_tol: 1e-4,
            min_plateau_cells: 4,
            vacuum_ratio: 0.08,
            delta_ratio: 1.8,
            fan_ratio: 0.25,
            min_run_weight: 0.02,
        }
    }
}

/// A run of nearly constant cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub first: usize,
    pub last: usize,
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub state: State,
}

/// One wave found in a profile, with its `x/t` extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractedWave {
    pub kind: WaveKind,
    pub first: usize,
    pub last: usize,
    pub speed_lo: f64,
    pub speed_hi: f64,
    pub left: State,
    pub right: State,
    /// A 0-contact lying on `ρ = ρ̄`.
    pub vertical: bool,
}

impl ExtractedWave {
    pub fn speed(&self) -> f64 {
        0.5 * (self.speed_lo + self.speed_hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveStructure {
    pub t: f64,
    pub waves: Vec<ExtractedWave>,
    pub plateaus: Vec<Plateau>,
}

impl WaveStructure {
    pub fn kinds(&self) -> Vec<WaveKind> {
        self.waves.iter().map(|w| w.kind).collect()
    }

    pub fn sequence(&self) -> String {
        crate::waves::sequence_string(&self.kinds())
    }

    /// Plateau states strictly between the outermost plateaus.
    pub fn middle_states(&self) -> Vec<State> {
        let n = self.plateaus.len();
        if n < 3 {
            return Vec::new();
        }
        self.plateaus[1..n - 1].iter().map(|p| p.state).collect()
    }
}

struct Profile<'a> {
    params: &'a SystemParams,
    opts: &'a ExtractOptions,
    xi: Vec<f64>,
    rho: &'a [f64],
    u: &'a [f64],
    vac: Vec<bool>,
    rho_scale: f64,
    u_scale: f64,
    shift: f64,
    t: f64,
}

impl Profile<'_> {
    fn state(&self, i: usize) -> State {
        State::new(self.rho[i], self.u[i])
    }

    fn jump(&self, j: usize) -> f64 {
        if self.vac[j] || self.vac[j + 1] {
            return f64::INFINITY;
        }
        let dr = (self.rho[j + 1] - self.rho[j]).abs() / self.rho_scale;
        let du = (self.u[j + 1] - self.u[j]).abs() / self.u_scale;
        dr.max(du)
    }

    fn u_flat(&self, anchor: usize, i: usize) -> bool {
        (self.u[i] - self.u[anchor]).abs() <= 1e-3 * self.u_scale
    }

    fn xi_face(&self, j: usize) -> f64 {
        0.5 * (self.xi[j] + self.xi[j + 1])
    }

    /// Splits the increment across face `j` into a-family and 0-family sizes.
    fn family_weights(&self, j: usize) -> (f64, f64) {
        let (r0, r1) = (self.rho[j], self.rho[j + 1]);
        let (u0, u1) = (self.u[j], self.u[j + 1]);
        let (dr, du) = (r1 - r0, u1 - u0);
        let rho = 0.5 * (r0 + r1);
        let v = 0.5 * (u0 + u1) + self.shift;
        let p = self.params.pressure_ratio(rho);
        let mob = 1.0 - p;
        let apv = self.params.a_exp * p * v;
        // dρ/dũ along R_0 = (ρ(1−P), aPv).
        let slope = if apv.abs() > 1e-12 {
            rho * mob / apv
        } else if mob.abs() < 1e-12 {
            0.0
        } else {
            return (dr.abs() / self.rho_scale, du.abs() / self.u_scale);
        };
        let alpha = dr - slope * du;
        let w_a = alpha.abs() / self.rho_scale;
        let w_0 = ((slope * du / self.rho_scale).powi(2) + (du / self.u_scale).powi(2)).sqrt();
        (w_a, w_0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    A,
    Zero,
}

#[derive(Debug, Clone)]
struct Run {
    family: Family,
    /// Faces `j0..=j1`.
    j0: usize,
    j1: usize,
    weights: Vec<f64>,
}

impl Run {
    fn weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Finds plateaus and waves in `snap`.
pub fn extract_wave_structure(
    params: &SystemParams,
    grid: &Grid,
    snap: &Snapshot,
    opts: &ExtractOptions,
) -> WaveStructure {
    let n = snap.rho.len();
    let t = snap.t;
    let mut out = WaveStructure { t, waves: Vec::new(), plateaus: Vec::new() };
    if !(t > 0.0) || n < 3 {
        return out;
    }
    let (rl, rr) = (snap.rho[0], snap.rho[n - 1]);
    let (ul, ur) = (snap.u_tilde[0], snap.u_tilde[n - 1]);
    let rho_scale = rl.max(rr).max(VACUUM_FLOOR);
    let u_scale = (ul - ur).abs().max(0.1 * ul.abs().max(ur.abs())).max(1e-3);
    let end_min = rl.min(rr);
    let vac_level = if end_min > VACUUM_FLOOR { opts.vacuum_ratio * end_min } else { opts.vacuum_ratio * rho_scale };
    let prof = Profile {
        params,
        opts,
        xi: (0..n).map(|i| grid.x(i) / t).collect(),
        rho: &snap.rho,
        u: &snap.u_tilde,
        vac: snap.rho.iter().map(|r| *r <= vac_level.max(VACUUM_FLOOR)).collect(),
        rho_scale,
        u_scale,
        shift: params.shift(t),
        t,
    };

    out.plateaus = find_plateaus(&prof);
    for w in out.plateaus.windows(2) {
        let (pl, pr) = (&w[0], &w[1]);
        if pr.first > pl.last + 1 {
            out.waves.extend(zone_waves(&prof, pl, pr));
        }
    }
    out
}

fn find_plateaus(prof: &Profile) -> Vec<Plateau> {
    let n = prof.rho.len();
    let tol = prof.opts.plateau_tol;
    let quiet: Vec<bool> = (0..n)
        .map(|i| {
            !prof.vac[i] && (i == 0 || prof.jump(i - 1) <= tol) && (i + 1 == n || prof.jump(i) <= tol)
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if !quiet[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && quiet[j + 1] {
            j += 1;
        }
        if j + 1 - i >= prof.opts.min_plateau_cells {
            let mid = (i + j) / 2;
            out.push(Plateau { first: i, last: j, xi_lo: prof.xi[i], xi_hi: prof.xi[j], state: prof.state(mid) });
        }
        i = j + 1;
    }
    out
}

/// Waves between two plateaus; cells `pl.last` and `pr.first` anchor the zone.
fn zone_waves(prof: &Profile, pl: &Plateau, pr: &Plateau) -> Vec<ExtractedWave> {
    let (lo, hi) = (pl.last, pr.first);
    let base = pl.state.rho.max(pr.state.rho);
    let spike = prof.opts.delta_ratio * base;
    let cores = cell_runs(lo + 1, hi - 1, |i| prof.rho[i] > spike);
    if !cores.is_empty() {
        return delta_zone(prof, lo, hi, &cores, base);
    }
    let vacs = cell_runs(lo + 1, hi - 1, |i| prof.vac[i]);
    if !vacs.is_empty() {
        return vacuum_zone(prof, lo, hi, &vacs, pl.state, pr.state);
    }
    decompose(prof, lo, hi)
}

/// Maximal runs of cells in `a..=b` satisfying `pred`.
fn cell_runs<F: Fn(usize) -> bool>(a: usize, b: usize, pred: F) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = a;
    while i <= b {
        if pred(i) {
            let s = i;
            while i < b && pred(i + 1) {
                i += 1;
            }
            out.push((s, i));
        }
        i += 1;
    }
    out
}

fn delta_zone(prof: &Profile, lo: usize, hi: usize, cores: &[(usize, usize)], base: f64) -> Vec<ExtractedWave> {
    let mut out = Vec::new();
    let mut start = lo;
    for &(c0, c1) in cores {
        // Only a fan survives next to a delta; the rest is its foot. An
        // a-wave leaves ũ unchanged, so the fan ends where ũ starts to move.
        let mut end = start;
        while end + 1 < c0 && prof.u_flat(start, end + 1) {
            end += 1;
        }
        out.extend(fans(prof, start, end));
        let (mut mass, mut moment) = (0.0, 0.0);
        for i in c0..=c1 {
            let e = prof.rho[i] - base;
            mass += e;
            moment += e * prof.xi[i];
        }
        let xi = moment / mass;
        out.push(ExtractedWave {
            kind: WaveKind::Delta,
            first: c0,
            last: c1,
            speed_lo: xi,
            speed_hi: xi,
            left: prof.state(c0.saturating_sub(1).max(lo)),
            right: prof.state((c1 + 1).min(hi)),
            vertical: false,
        });
        start = c1 + 1;
    }
    let mut begin = hi;
    while begin > start && prof.u_flat(hi, begin - 1) {
        begin -= 1;
    }
    out.extend(fans(prof, begin, hi));
    out
}

fn fans(prof: &Profile, lo: usize, hi: usize) -> Vec<ExtractedWave> {
    decompose(prof, lo, hi).into_iter().filter(|w| w.kind == WaveKind::RarefactionA).collect()
}

fn vacuum_zone(
    prof: &Profile,
    lo: usize,
    hi: usize,
    vacs: &[(usize, usize)],
    left: State,
    right: State,
) -> Vec<ExtractedWave> {
    let (v0, v1) = (vacs[0].0, vacs[vacs.len() - 1].1);
    let rb = prof.params.rho_bar;
    let mut out = Vec::new();

    // Into the vacuum.
    if v0 > lo + 1 {
        let runs = decompose(prof, lo, v0 - 1);
        let fans: Vec<ExtractedWave> = runs.iter().copied().filter(|w| w.kind == WaveKind::RarefactionA).collect();
        let span = span_wave(prof, lo, v0 - 1, WaveKind::Contact0);
        if !fans.is_empty() {
            out.extend(runs.into_iter().filter(|w| w.kind == WaveKind::RarefactionA || w.kind == WaveKind::Contact0));
        } else if left.rho < rb {
            out.push(span);
        } else {
            out.push(span);
            out.push(ExtractedWave { kind: a_jump_kind(prof), ..span });
        }
    }
    out.push(ExtractedWave {
        kind: WaveKind::Vacuum,
        first: v0,
        last: v1,
        speed_lo: prof.xi[v0],
        speed_hi: prof.xi[v1],
        left: prof.state(v0 - 1),
        right: prof.state(v1 + 1),
        vertical: false,
    });

    // Out of the vacuum.
    if hi > v1 + 1 {
        let span = span_wave(prof, v1 + 1, hi, WaveKind::Contact0);
        if right.rho < rb {
            out.push(span);
        } else {
            let runs = decompose(prof, v1 + 1, hi);
            let a_run = runs.iter().copied().find(|w| w.kind.is_a_family());
            let kind = match a_run {
                Some(w) if w.kind == WaveKind::RarefactionA => WaveKind::RarefactionA,
                _ => a_jump_kind(prof),
            };
            let a_wave = a_run.map_or(ExtractedWave { kind, ..span }, |w| ExtractedWave { kind, ..w });
            let c0 = runs
                .iter()
                .copied()
                .find(|w| w.kind == WaveKind::Contact0 && w.first >= a_wave.first)
                .unwrap_or(ExtractedWave { kind: WaveKind::Contact0, ..span });
            out.push(a_wave);
            out.push(c0);
        }
    }
    out
}

fn a_jump_kind(prof: &Profile) -> WaveKind {
    if prof.params.a_exp == -1.0 {
        WaveKind::ContactA
    } else {
        WaveKind::ShockA
    }
}

/// A single wave covering cells `i0..=i1`.
fn span_wave(prof: &Profile, i0: usize, i1: usize, kind: WaveKind) -> ExtractedWave {
    ExtractedWave {
        kind,
        first: i0,
        last: i1,
        speed_lo: prof.xi[i0],
        speed_hi: prof.xi[i1],
        left: prof.state(i0),
        right: prof.state(i1),
        vertical: false,
    }
}

/// Characteristic decomposition of the faces between cells `lo` and `hi`.
fn decompose(prof: &Profile, lo: usize, hi: usize) -> Vec<ExtractedWave> {
    if hi <= lo {
        return Vec::new();
    }
    let mut runs: Vec<Run> = Vec::new();
    for j in lo..hi {
        let (wa, w0) = prof.family_weights(j);
        let (fam, w) = if wa >= w0 { (Family::A, wa) } else { (Family::Zero, w0) };
        let w = if w.is_finite() { w } else { 0.0 };
        match runs.last_mut() {
            Some(r) if r.family == fam || w < 1e-9 => {
                r.j1 = j;
                r.weights.push(w);
            }
            _ => runs.push(Run { family: fam, j0: j, j1: j, weights: vec![w] }),
        }
    }
    merge_light_runs(&mut runs, prof.opts.min_run_weight);
    runs.iter().map(|r| run_wave(prof, r)).collect()
}

fn merge_light_runs(runs: &mut Vec<Run>, min_weight: f64) {
    loop {
        let Some((k, _)) = runs
            .iter()
            .enumerate()
            .map(|(k, r)| (k, r.weight()))
            .filter(|(_, w)| *w < min_weight)
            .min_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if runs.len() == 1 {
            runs.clear();
            break;
        }
        let r = runs.remove(k);
        // Absorb into the heavier neighbour.
        let left = k.checked_sub(1);
        let right = (k < runs.len()).then_some(k);
        let target = match (left, right) {
            (Some(l), Some(rt)) => {
                if runs[l].weight() >= runs[rt].weight() {
                    l
                } else {
                    rt
                }
            }
            (Some(l), None) => l,
            (None, Some(rt)) => rt,
            (None, None) => unreachable!(),
        };
        let t = &mut runs[target];
        if target < k {
            t.j1 = r.j1;
            t.weights.extend(r.weights.iter().map(|_| 0.0));
        } else {
            t.j0 = r.j0;
            let mut w: Vec<f64> = r.weights.iter().map(|_| 0.0).collect();
            w.append(&mut t.weights);
            t.weights = w;
        }
        // Coalesce neighbours of the same family.
        let mut i = 0;
        while i + 1 < runs.len() {
            if runs[i].family == runs[i + 1].family {
                let next = runs.remove(i + 1);
                runs[i].j1 = next.j1;
                runs[i].weights.extend(next.weights);
            } else {
                i += 1;
            }
        }
    }
}

/// `x/t` where the cumulative weight of `run` crosses `frac`.
fn xi_quantile(prof: &Profile, run: &Run, frac: f64) -> f64 {
    let total = run.weight();
    let mut acc = 0.0;
    for (k, w) in run.weights.iter().enumerate() {
        acc += w;
        if acc >= frac * total {
            return prof.xi_face(run.j0 + k);
        }
    }
    prof.xi_face(run.j1)
}

fn run_wave(prof: &Profile, run: &Run) -> ExtractedWave {
    let left = prof.state(run.j0);
    let right = prof.state(run.j1 + 1);
    let (x10, x50, x90) = (xi_quantile(prof, run, 0.1), xi_quantile(prof, run, 0.5), xi_quantile(prof, run, 0.9));
    let params = prof.params;
    let kind = match run.family {
        Family::Zero => WaveKind::Contact0,
        Family::A if params.a_exp == -1.0 => WaveKind::ContactA,
        Family::A => {
            let ll = params.eigenvalues(left, prof.t).lambda_a;
            let lr = params.eigenvalues(right, prof.t).lambda_a;
            if ll > lr {
                WaveKind::ShockA
            } else if x90 - x10 >= prof.opts.fan_ratio * (lr - ll) {
                WaveKind::RarefactionA
            } else {
                WaveKind::ShockA
            }
        }
    };
    let (speed_lo, speed_hi) = if kind == WaveKind::RarefactionA { (x10, x90) } else { (x50, x50) };
    let near_bar = |s: State| (s.rho - params.rho_bar).abs() <= 0.02 * params.rho_bar;
    ExtractedWave {
        kind,
        first: run.j0,
        last: run.j1 + 1,
        speed_lo,
        speed_hi,
        left,
        right,
        vertical: kind == WaveKind::Contact0 && near_bar(left) && near_bar(right),
    }
}
