//! Case identification and Riemann-solution construction.
//!
//! [`classify_region`] tries, in order: a classical two-wave solution (for
//! `a = −1` this is the double contact of Region III), a three-wave
//! solution through a vertical contact on `ρ = ρ̄` (Region VI), a delta
//! shock with or without a leading rarefaction (Region IV), and a vacuum
//! solution (Region V). The first admissible construction wins.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::delta::{self, SpeedRoots};
use crate::error::{Error, Result};
use crate::model::{Regime, State, SystemParams, VACUUM_FLOOR};
use crate::par::{self, Execution};
use crate::roots;
use crate::waves::{self, AWave, AWaveKind, BranchKind, WaveKind};
use crate::solver::ExtractOptions;

/// Absolute tolerance for `ρ = ρ̄` and `ũ = −I(t)` membership.
pub const EQ_TOL: f64 = 1e-12;

/// Samples per branch when bracketing middle-state roots.
const BRANCH_SAMPLES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VelocitySide {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensitySide {
    Below,
    Equal,
    Above,
}

/// One of the 24 cases, fixed by the exponent range and the position of
/// the left state relative to `A(t) = −I(t)` and `ρ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseId {
    pub index: u8,
    pub regime: Regime,
    pub velocity_side: VelocitySide,
    pub density_side: DensitySide,
}

impl CaseId {
    pub fn from_parts(regime: Regime, velocity_side: VelocitySide, density_side: DensitySide) -> Self {
        let base = match regime {
            Regime::BelowMinusOne => 1,
            Regime::MinusOne => 7,
            Regime::MinusOneToZero => 13,
            Regime::Positive => 19,
        };
        let vel = if velocity_side == VelocitySide::Above { 3 } else { 0 };
        let dens = match density_side {
            DensitySide::Below => 0,
            DensitySide::Equal => 1,
            DensitySide::Above => 2,
        };
        Self { index: base + vel + dens, regime, velocity_side, density_side }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Case {}", self.index)
    }
}

pub fn case_id(params: &SystemParams, left: State, t: f64) -> Result<CaseId> {
    let v = params.physical_velocity(left, t);
    if v.abs() < EQ_TOL {
        return Err(Error::FullDegeneracy);
    }
    let vel = if v > 0.0 { VelocitySide::Above } else { VelocitySide::Below };
    Ok(CaseId::from_parts(params.regime(), vel, density_side(params, left.rho)))
}

fn density_side(params: &SystemParams, rho: f64) -> DensitySide {
    let d = rho - params.rho_bar;
    if d.abs() <= EQ_TOL {
        DensitySide::Equal
    } else if d < 0.0 {
        DensitySide::Below
    } else {
        DensitySide::Above
    }
}

/// A change of case at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseTransition {
    pub t: f64,
    pub from: CaseId,
    pub to: CaseId,
}

/// Times in `(0, horizon]` where `ũ_L + I(t)` changes sign.
pub fn case_transitions(params: &SystemParams, left: State, horizon: f64) -> Result<Vec<CaseTransition>> {
    let mut current = case_id(params, left, 0.0)?;
    let pieces = params.source.pieces();
    let mut out = Vec::new();
    for (k, &(t0, value)) in pieces.iter().enumerate() {
        if t0 > horizon {
            break;
        }
        let t1 = pieces.get(k + 1).map_or(f64::INFINITY, |p| p.0).min(horizon);
        if value == 0.0 {
            continue;
        }
        let v0 = params.physical_velocity(left, t0);
        let tc = t0 - v0 / value;
        let new_side = if value > 0.0 { VelocitySide::Above } else { VelocitySide::Below };
        if tc > t0 && tc <= t1 && new_side != current.velocity_side {
            let to = CaseId::from_parts(current.regime, new_side, current.density_side);
            out.push(CaseTransition { t: tc, from: current, to });
            current = to;
        }
    }
    Ok(out)
}

/// Which family leaves the left state first in a two-wave solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveOrder {
    AFirst,
    ZeroFirst,
}

impl WaveOrder {
    /// The slower family at `s`: `λ_a < λ_0` exactly when `a v > 0`.
    pub fn natural(params: &SystemParams, s: State, t: f64) -> Self {
        if params.a_exp * params.physical_velocity(s, t) > 0.0 {
            WaveOrder::AFirst
        } else {
            WaveOrder::ZeroFirst
        }
    }

    fn other(self) -> Self {
        match self {
            WaveOrder::AFirst => WaveOrder::ZeroFirst,
            WaveOrder::ZeroFirst => WaveOrder::AFirst,
        }
    }
}

/// Maps `z ∈ ℝ` onto one side of `ρ̄`, approaching 0 / ∞ and `ρ̄` at the ends.
fn branch_rho(rho_bar: f64, above: bool, z: f64) -> f64 {
    let s = 1.0 / (1.0 + (-z).exp());
    if above {
        rho_bar / s
    } else {
        rho_bar * s
    }
}

/// Root of `contact_curve_u(anchor, ρ) = u` on the anchor's side of `ρ̄`.
fn contact_root(params: &SystemParams, anchor: State, u: f64, t: f64) -> Result<f64> {
    let rb = params.rho_bar;
    if params.on_critical(anchor.rho) {
        return Err(Error::CriticalDensity { rho_bar: rb });
    }
    if u == anchor.u_tilde {
        return Ok(anchor.rho);
    }
    let above = anchor.rho > rb;
    let f = |rho: f64| waves::contact_curve_u(params, anchor, rho, t).map_or(f64::NAN, |v| v - u);
    let (z_lo, z_hi) = (-30.0, 27.0);
    let h = (z_hi - z_lo) / BRANCH_SAMPLES as f64;
    let mut r0 = branch_rho(rb, above, z_lo);
    let mut f0 = f(r0);
    for k in 1..=BRANCH_SAMPLES {
        let r1 = branch_rho(rb, above, z_lo + h * k as f64);
        let f1 = f(r1);
        if f0.is_finite() && f1.is_finite() && (f0 == 0.0 || f0.signum() != f1.signum()) {
            let (lo, hi) = if r0 < r1 { (r0, r1) } else { (r1, r0) };
            return roots::bisect(f, lo, hi, EQ_TOL).ok_or(Error::NoIntersection);
        }
        r0 = r1;
        f0 = f1;
    }
    Err(Error::NoIntersection)
}

/// The middle state of a two-wave solution.
///
/// `AFirst`: `M = (ρ_M, ũ_L)` on the 0-contact through `right`.
/// `ZeroFirst`: `M = (ρ_M, ũ_R)` on the 0-contact through `left`. The
/// contact never crosses `ρ̄`, so only the anchor's side is searched.
pub fn classical_middle_state(
    params: &SystemParams,
    left: State,
    right: State,
    order: WaveOrder,
    t: f64,
) -> Result<State> {
    if !(left.rho > 0.0 && right.rho > 0.0) {
        return Err(Error::InvalidParameter("classical states need positive density".into()));
    }
    match order {
        WaveOrder::AFirst => Ok(State::new(contact_root(params, right, left.u_tilde, t)?, left.u_tilde)),
        WaveOrder::ZeroFirst => Ok(State::new(contact_root(params, left, right.u_tilde, t)?, right.u_tilde)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Region {
    pub fn roman(self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
            Region::VI => "VI",
        }
    }
}

/// One wave of a constructed solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternWave {
    pub kind: WaveKind,
    /// A 0-contact on `ρ = ρ̄` with speed zero.
    pub vertical: bool,
    pub left: State,
    pub right: State,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl PatternWave {
    fn from_a(w: AWave) -> Self {
        Self {
            kind: w.kind.wave_kind(),
            vertical: false,
            left: w.left,
            right: w.right,
            speed_lo: w.speed_lo,
            speed_hi: w.speed_hi,
        }
    }

    fn contact(left: State, right: State, speed: f64) -> Self {
        Self { kind: WaveKind::Contact0, vertical: false, left, right, speed_lo: speed, speed_hi: speed }
    }
}

/// A constructed Riemann solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavePattern {
    pub region: Region,
    /// `a` or `0` for the leading family, `a` for the prefixed delta, the
    /// wave tag (e.g. `C0VSaC0`) for vacuum solutions, empty otherwise.
    pub subscript: String,
    pub waves: Vec<PatternWave>,
    pub middle_states: Vec<State>,
}

impl WavePattern {
    pub fn label(&self) -> String {
        if self.subscript.is_empty() {
            self.region.roman().to_string()
        } else {
            format!("{}_{}", self.region.roman(), self.subscript)
        }
    }

    pub fn kinds(&self) -> Vec<WaveKind> {
        self.waves.iter().map(|w| w.kind).collect()
    }

    pub fn sequence(&self) -> String {
        waves::sequence_string(&self.kinds())
    }

    /// Wave sequence a numerical run of this pattern is expected to show.
    /// A middle state thin enough to read as vacuum inserts `V`; one dense
    /// enough to read as a spike merges its two neighbours into `S_δ`.
    pub fn numerical_signature(&self, left: State, right: State, opts: &ExtractOptions) -> Vec<WaveKind> {
        let kinds = self.kinds();
        if self.region == Region::V || self.middle_states.len() + 1 != kinds.len() {
            return kinds;
        }
        let vac = opts.vacuum_ratio * left.rho.min(right.rho);
        let spike = opts.delta_ratio * left.rho.max(right.rho);
        let mut out = vec![kinds[0]];
        for (m, k) in self.middle_states.iter().zip(&kinds[1..]) {
            if m.rho > spike {
                out.pop();
                out.push(WaveKind::Delta);
                continue;
            }
            if m.rho <= vac {
                out.push(WaveKind::Vacuum);
            }
            out.push(*k);
        }
        out.dedup_by(|b, a| *a == WaveKind::Delta && *b == WaveKind::Delta);
        out
    }

    /// Each wave's fastest speed is at most the next wave's slowest.
    pub fn speeds_ordered(&self) -> bool {
        self.waves.windows(2).all(|w| speed_le(w[0].speed_hi, w[1].speed_lo))
    }
}

fn speed_le(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a <= b;
    }
    a <= b + 1e-12 * (1.0 + a.abs().max(b.abs()))
}

fn order_tag(order: WaveOrder) -> &'static str {
    match order {
        WaveOrder::AFirst => "a",
        WaveOrder::ZeroFirst => "0",
    }
}

/// An a-wave that is either a Lax shock, an expanding fan, or an a-contact.
fn valid_a_wave(params: &SystemParams, left: State, rho_right: f64, t: f64) -> Option<AWave> {
    let w = waves::a_wave(params, left, rho_right, t).ok()?;
    if w.kind == AWaveKind::Rarefaction {
        let ll = params.eigenvalues(left, t).lambda_a;
        let lr = params.eigenvalues(w.right, t).lambda_a;
        if !(ll <= lr) {
            return None;
        }
    }
    Some(w)
}

/// Relative distance in `ρ` below which a root-found middle state is taken
/// to be the end state it approximates.
const SNAP_TOL: f64 = 1e-10;

fn snap(m: State, end: State) -> State {
    if m.u_tilde == end.u_tilde && (m.rho - end.rho).abs() <= SNAP_TOL * end.rho {
        end
    } else {
        m
    }
}

fn classical(params: &SystemParams, left: State, right: State, order: WaveOrder, t: f64) -> Option<WavePattern> {
    let m = snap(snap(classical_middle_state(params, left, right, order, t).ok()?, left), right);
    if m.rho <= VACUUM_FLOOR {
        return None;
    }
    let mut out = Vec::new();
    let a_part = |from: State, rho: f64| -> Option<Option<PatternWave>> {
        if rho == from.rho {
            return Some(None);
        }
        valid_a_wave(params, from, rho, t).map(|w| Some(PatternWave::from_a(w)))
    };
    match order {
        WaveOrder::AFirst => {
            out.extend(a_part(left, m.rho)?);
            if m != right {
                out.push(PatternWave::contact(m, right, params.eigenvalues(right, t).lambda_0));
            }
        }
        WaveOrder::ZeroFirst => {
            if m != left {
                out.push(PatternWave::contact(left, m, params.eigenvalues(left, t).lambda_0));
            }
            out.extend(a_part(m, right.rho)?);
        }
    }
    let a_kind = out.iter().map(|w| w.kind).find(|k| k.is_a_family());
    let region = match a_kind {
        _ if params.a_exp == -1.0 => Region::III,
        Some(WaveKind::RarefactionA) => Region::II,
        _ => Region::I,
    };
    let middle = if m != left && m != right { vec![m] } else { Vec::new() };
    let pattern = WavePattern { region, subscript: order_tag(order).into(), waves: out, middle_states: middle };
    pattern.speeds_ordered().then_some(pattern)
}

/// `a`-wave to `ρ̄`, vertical contact along `ρ̄`, `a`-wave to the right state.
fn through_critical(params: &SystemParams, left: State, right: State, t: f64) -> Option<WavePattern> {
    let rb = params.rho_bar;
    let (vl, vr) = (params.physical_velocity(left, t), params.physical_velocity(right, t));
    if vl * vr > 0.0 || left.u_tilde == right.u_tilde {
        return None;
    }
    let m1 = State::new(rb, left.u_tilde);
    let m2 = State::new(rb, right.u_tilde);
    let mut out = Vec::new();
    if !params.on_critical(left.rho) {
        let w = valid_a_wave(params, left, rb, t)?;
        if !speed_le(w.speed_hi, 0.0) {
            return None;
        }
        out.push(PatternWave::from_a(w));
    }
    out.push(PatternWave { vertical: true, ..PatternWave::contact(m1, m2, 0.0) });
    if !params.on_critical(right.rho) {
        let w = valid_a_wave(params, m2, right.rho, t)?;
        if !speed_le(0.0, w.speed_lo) {
            return None;
        }
        out.push(PatternWave::from_a(w));
    }
    Some(WavePattern { region: Region::VI, subscript: String::new(), waves: out, middle_states: vec![m1, m2] })
}

fn delta_wave(left: State, right: State, speed: f64) -> PatternWave {
    PatternWave { kind: WaveKind::Delta, vertical: false, left, right, speed_lo: speed, speed_hi: speed }
}

/// Delta speed at time `t` for a delta already known to be admissible.
fn delta_speed_at(params: &SystemParams, left: State, right: State, t: f64, dt: f64) -> f64 {
    delta::integrate_delta(params, left, right, t, dt)
        .ok()
        .and_then(|traj| traj.speed.last().copied())
        .unwrap_or(f64::NAN)
}

fn direct_delta(params: &SystemParams, left: State, right: State, t: f64, dt: f64) -> Option<WavePattern> {
    if left.rho <= VACUUM_FLOOR || right.rho <= VACUUM_FLOOR || !delta::delta_admissible(params, left, right, t, dt) {
        return None;
    }
    let s = delta_speed_at(params, left, right, t, dt);
    Some(WavePattern {
        region: Region::IV,
        subscript: String::new(),
        waves: vec![delta_wave(left, right, s)],
        middle_states: Vec::new(),
    })
}

/// Frozen-time view: states shifted by `I(t)` under a zero source.
fn frozen_view(params: &SystemParams, s: State, t: f64) -> State {
    State::new(s.rho, params.physical_velocity(s, t))
}

/// Delta speed from `m` to `right` that is faster than both right
/// characteristics and slower than `λ_0(m)`, at frozen time `t`.
fn sonic_candidate(params: &SystemParams, frozen: &SystemParams, m: State, right: State, t: f64) -> Option<f64> {
    let (fm, fr) = (frozen_view(params, m, t), frozen_view(params, right, t));
    let roots = delta::initial_speed_roots(frozen, fm, fr).ok()?;
    let er = frozen.eigenvalues(fr, 0.0);
    let l0 = frozen.eigenvalues(fm, 0.0).lambda_0;
    let ok: Vec<f64> = roots.to_vec().into_iter().filter(|s| er.max() < *s && *s < l0).collect();
    match (roots, ok.as_slice()) {
        (SpeedRoots::Pair(..), [s]) | (SpeedRoots::Single(_), [s]) => Some(*s),
        _ => None,
    }
}

/// A rarefaction along `ũ_L` to the state `M` where `λ_a(M)` equals the
/// delta speed from `M`, followed by that delta.
fn prefixed_delta(params: &SystemParams, left: State, right: State, t: f64) -> Option<WavePattern> {
    let a = params.a_exp;
    if a == -1.0 || left.rho <= VACUUM_FLOOR || right.rho <= VACUUM_FLOOR {
        return None;
    }
    let vl = params.physical_velocity(left, t);
    // dλ_a/dρ along ũ = const has the sign of −(a + 1) a v.
    let grows = -(a + 1.0) * a * vl > 0.0;
    let frozen = SystemParams::frozen(a, params.rho_bar).ok()?;
    let g = |rho: f64| {
        let m = State::new(rho, left.u_tilde);
        match sonic_candidate(params, &frozen, m, right, t) {
            Some(s) => params.eigenvalues(m, t).lambda_a - s,
            None => f64::NAN,
        }
    };
    let span = 1000.0f64.ln();
    let rho_at = |k: usize| {
        let e = span * k as f64 / BRANCH_SAMPLES as f64;
        left.rho * if grows { e.exp() } else { (-e).exp() }
    };
    let mut r0 = left.rho;
    let mut g0 = g(r0);
    let mut found = None;
    for k in 1..=BRANCH_SAMPLES {
        let r1 = rho_at(k);
        let g1 = g(r1);
        if g0.is_finite() && g1.is_finite() && g0 < 0.0 && g1 >= 0.0 {
            let (lo, hi) = if r0 < r1 { (r0, r1) } else { (r1, r0) };
            found = roots::bisect(g, lo, hi, EQ_TOL);
            break;
        }
        r0 = r1;
        g0 = g1;
    }
    let rho_m = found?;
    let m = State::new(rho_m, left.u_tilde);
    let fan = valid_a_wave(params, left, rho_m, t)?;
    if fan.kind != AWaveKind::Rarefaction {
        return None;
    }
    let s = sonic_candidate(params, &frozen, m, right, t)?;
    Some(WavePattern {
        region: Region::IV,
        subscript: "a".into(),
        waves: vec![PatternWave::from_a(fan), delta_wave(m, right, s)],
        middle_states: vec![m],
    })
}

/// The a-wave between a vacuum at `ũ = u` and the state `s` on the side
/// given by `into_vacuum`.
fn vacuum_a_wave(params: &SystemParams, s: State, into_vacuum: bool, t: f64) -> Option<PatternWave> {
    let vac = State::new(0.0, s.u_tilde);
    let (left, right) = if into_vacuum { (s, vac) } else { (vac, s) };
    let la = |x: State| params.eigenvalues(x, t).lambda_a;
    let (ll, lr) = (la(left), la(right));
    let (kind, lo, hi) = if params.a_exp == -1.0 {
        let v = params.physical_velocity(s, t);
        (WaveKind::ContactA, v, v)
    } else if ll < lr {
        (WaveKind::RarefactionA, ll, lr)
    } else if params.a_exp > -1.0 {
        // A shock against vacuum moves with λ_0 of the non-vacuum side.
        let sp = params.eigenvalues(s, t).lambda_0;
        if !(lr < sp && sp < ll) {
            return None;
        }
        (WaveKind::ShockA, sp, sp)
    } else {
        return None;
    };
    Some(PatternWave { kind, vertical: false, left, right, speed_lo: lo, speed_hi: hi })
}

fn tag(kind: WaveKind) -> &'static str {
    match kind {
        WaveKind::ShockA => "Sa",
        WaveKind::RarefactionA => "Ra",
        WaveKind::ContactA => "Ca",
        WaveKind::Contact0 => "C0",
        WaveKind::Vacuum => "V",
        WaveKind::Delta => "Sd",
    }
}

/// `ũ` where the 0-contact through `s` meets `ρ = 0`.
fn contact_vacuum_u(params: &SystemParams, s: State, t: f64) -> Option<f64> {
    waves::contact_curve_u(params, s, 0.0, t).ok()
}

/// Waves from `left` into vacuum and from vacuum to `right`, joined by a
/// vacuum segment.
fn vacuum(params: &SystemParams, left: State, right: State, t: f64) -> Option<WavePattern> {
    let rb = params.rho_bar;
    if params.on_critical(left.rho) || params.on_critical(right.rho) {
        return None;
    }
    let mut out = Vec::new();

    // Left of the vacuum.
    let u_vac_left;
    if WaveOrder::natural(params, left, t) == WaveOrder::AFirst {
        let w = vacuum_a_wave(params, left, true, t)?;
        if w.kind == WaveKind::ShockA {
            return None;
        }
        u_vac_left = left.u_tilde;
        out.push(w);
    } else if left.rho < rb {
        u_vac_left = contact_vacuum_u(params, left, t)?;
        let l0 = params.eigenvalues(left, t).lambda_0;
        out.push(PatternWave::contact(left, State::new(0.0, u_vac_left), l0));
    } else {
        let l0 = params.eigenvalues(left, t).lambda_0;
        out.push(PatternWave::contact(left, left, l0));
        out.push(vacuum_a_wave(params, left, true, t)?);
        u_vac_left = left.u_tilde;
    }
    let left_end = out.last()?.speed_hi;

    // Right of the vacuum.
    let mut right_part = Vec::new();
    let u_vac_right;
    if params.a_exp * params.physical_velocity(right, t) >= 0.0 {
        if right.rho < rb {
            u_vac_right = contact_vacuum_u(params, right, t)?;
            let l0 = params.eigenvalues(right, t).lambda_0;
            right_part.push(PatternWave::contact(State::new(0.0, u_vac_right), right, l0));
        } else {
            right_part.push(vacuum_a_wave(params, right, false, t)?);
            let l0 = params.eigenvalues(right, t).lambda_0;
            right_part.push(PatternWave::contact(right, right, l0));
            u_vac_right = right.u_tilde;
        }
    } else {
        right_part.push(vacuum_a_wave(params, right, false, t)?);
        u_vac_right = right.u_tilde;
    }
    // Speeds need not be ordered across the vacuum itself.
    let right_start = right_part[0].speed_lo;
    let (v0, v1) = (State::new(0.0, u_vac_left), State::new(0.0, u_vac_right));
    out.push(PatternWave { kind: WaveKind::Vacuum, vertical: false, left: v0, right: v1, speed_lo: left_end, speed_hi: right_start });
    out.extend(right_part);
    let subscript: String = out.iter().map(|w| tag(w.kind)).collect();
    Some(WavePattern { region: Region::V, subscript, waves: out, middle_states: vec![v0, v1] })
}

/// Step used when a delta construction integrates up to `t`.
pub const CLASSIFY_DT: f64 = delta::DEFAULT_DT;

/// Builds the Riemann solution from `left` to `right` at time `t`.
pub fn classify_region(params: &SystemParams, left: State, right: State, t: f64) -> Result<WavePattern> {
    case_id(params, left, t)?;
    if !(left.rho > 0.0 && right.rho > 0.0) {
        return Err(Error::InvalidParameter("classify_region needs positive densities".into()));
    }
    if left == right {
        let order = WaveOrder::natural(params, left, t);
        let region = if params.a_exp == -1.0 { Region::III } else { Region::I };
        return Ok(WavePattern { region, subscript: order_tag(order).into(), waves: Vec::new(), middle_states: Vec::new() });
    }
    let order = WaveOrder::natural(params, left, t);
    if let Some(p) = classical(params, left, right, order, t).or_else(|| classical(params, left, right, order.other(), t)) {
        return Ok(p);
    }
    if let Some(p) = through_critical(params, left, right, t) {
        return Ok(p);
    }
    if let Some(p) = direct_delta(params, left, right, t, CLASSIFY_DT).or_else(|| prefixed_delta(params, left, right, t)) {
        return Ok(p);
    }
    vacuum(params, left, right, t).ok_or(Error::Unclassifiable)
}

/// Label used for cells where no construction applies.
pub const UNCLASSIFIABLE: &str = "Unclassifiable";
/// Label used for cells on the fully degenerate line.
pub const DEGENERATE: &str = "Degenerate";

/// `(0, ρ_max] × [ũ_min, ũ_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub rho_max: f64,
    pub u_min: f64,
    pub u_max: f64,
}

impl Window {
    pub fn new(rho_max: f64, u_min: f64, u_max: f64) -> Result<Self> {
        if !(rho_max > 0.0 && rho_max.is_finite() && u_min.is_finite() && u_max.is_finite() && u_max >= u_min) {
            return Err(Error::InvalidParameter("window needs rho_max > 0 and u_min <= u_max".into()));
        }
        Ok(Self { rho_max, u_min, u_max })
    }

    /// Cell centres along each axis for an `n × n` grid.
    pub fn axes(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let hr = self.rho_max / n as f64;
        let hu = (self.u_max - self.u_min) / n as f64;
        let rho = (0..n).map(|i| (i as f64 + 0.5) * hr).collect();
        let u = (0..n).map(|j| self.u_min + (j as f64 + 0.5) * hu).collect();
        (rho, u)
    }
}

impl Default for Window {
    fn default() -> Self {
        Self { rho_max: 15.0, u_min: -10.0, u_max: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub name: String,
    /// `(ρ, ũ)` vertices.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub left: State,
    pub t: f64,
    pub rho: Vec<f64>,
    pub u_tilde: Vec<f64>,
    /// Row-major in `ũ`, then `ρ`: index `j * rho.len() + i`.
    pub labels: Vec<String>,
    pub overlays: Vec<Overlay>,
}

impl RegionMap {
    pub fn at(&self, i: usize, j: usize) -> &str {
        &self.labels[j * self.rho.len() + i]
    }

    /// Distinct labels in first-seen order.
    pub fn distinct(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for l in &self.labels {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        out
    }
}

fn cell_label(params: &SystemParams, left: State, right: State, t: f64) -> String {
    match classify_region(params, left, right, t) {
        Ok(p) => p.label(),
        Err(Error::FullDegeneracy) => DEGENERATE.into(),
        Err(_) => UNCLASSIFIABLE.into(),
    }
}

/// Classifies every cell of an `n × n` grid over `window`.
pub fn region_map(params: &SystemParams, left: State, t: f64, window: Window, n: usize, exec: Execution) -> Result<RegionMap> {
    if n == 0 {
        return Err(Error::InvalidParameter("region map needs at least one cell".into()));
    }
    let (rho, u) = window.axes(n);
    let labels = par::map_range(exec, n * n, |k| cell_label(params, left, State::new(rho[k % n], u[k / n]), t));
    let overlays = overlays(params, left, t, &window, &rho, &u, &labels);
    Ok(RegionMap { left, t, rho, u_tilde: u, labels, overlays })
}

fn clip(points: Vec<(f64, f64)>, w: &Window) -> Vec<(f64, f64)> {
    points.into_iter().filter(|(r, u)| *r > 0.0 && *r <= w.rho_max && *u >= w.u_min && *u <= w.u_max).collect()
}

/// Boundary curves through `left`: the S/R line, `ρ = ρ̄`, the 0-contact
/// branches with their asymptotes and the degenerate line, clipped to `w`.
pub fn wave_curves(params: &SystemParams, left: State, t: f64, w: &Window, rho_grid: &[f64]) -> Vec<Overlay> {
    let mut out = vec![
        Overlay { name: "sr_line".into(), points: vec![(0.0, left.u_tilde), (w.rho_max, left.u_tilde)] },
        Overlay { name: "rho_bar".into(), points: vec![(params.rho_bar, w.u_min), (params.rho_bar, w.u_max)] },
    ];
    if let Ok(branches) = waves::contact_branches(params, left, t, rho_grid) {
        for b in branches {
            let name = match b.kind {
                BranchKind::C0 => "c0",
                BranchKind::Mirror => "c0_mirror",
                BranchKind::Limiting => "c0_limiting",
                BranchKind::Vertical => "c0_vertical",
            };
            let pts = clip(b.samples.iter().map(|s| (s.rho, s.u_tilde)).collect(), w);
            out.push(Overlay { name: name.into(), points: pts });
        }
        let (near, far) = waves::contact_asymptotes(params, left, t);
        for (name, a) in [("asymptote_rho0", near), ("asymptote_rhoinf", far)] {
            if a.is_finite() {
                out.push(Overlay { name: name.into(), points: vec![(0.0, a), (w.rho_max, a)] });
            }
        }
    }
    out.push(Overlay { name: "degenerate_line".into(), points: vec![(0.0, -params.shift(t)), (w.rho_max, -params.shift(t))] });
    out
}

fn overlays(
    params: &SystemParams,
    left: State,
    t: f64,
    w: &Window,
    rho: &[f64],
    u: &[f64],
    labels: &[String],
) -> Vec<Overlay> {
    let mut out = wave_curves(params, left, t, w, rho);
    // Edge cells of the delta region.
    let n = rho.len();
    let is_iv = |i: usize, j: usize| labels[j * n + i].starts_with("IV");
    let mut frontier = Vec::new();
    for j in 0..u.len() {
        for i in 0..n {
            if !is_iv(i, j) {
                continue;
            }
            let edge = (i == 0 || !is_iv(i - 1, j))
                || (i + 1 == n || !is_iv(i + 1, j))
                || (j == 0 || !is_iv(i, j - 1))
                || (j + 1 == u.len() || !is_iv(i, j + 1));
            if edge {
                frontier.push((rho[i], u[j]));
            }
        }
    }
    out.push(Overlay { name: "overcompressive_frontier".into(), points: frontier });
    out
}
