//! Elementary waves: a-family shocks, rarefactions and contacts, and the
//! 0-family contact curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{State, SystemParams};

/// Relative distance from `ρ̄` treated as sitting on the critical density.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Elementary waves appearing in Riemann solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveKind {
    ShockA,
    RarefactionA,
    ContactA,
    Contact0,
    Vacuum,
    Delta,
}

impl WaveKind {
    /// Short symbol such as `S_a` or `C_0`.
    pub fn symbol(self) -> &'static str {
        match self {
            WaveKind::ShockA => "S_a",
            WaveKind::RarefactionA => "R_a",
            WaveKind::ContactA => "C_a",
            WaveKind::Contact0 => "C_0",
            WaveKind::Vacuum => "V",
            WaveKind::Delta => "S_delta",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s.trim() {
            "S_a" => WaveKind::ShockA,
            "R_a" => WaveKind::RarefactionA,
            "C_a" => WaveKind::ContactA,
            "C_0" => WaveKind::Contact0,
            "V" => WaveKind::Vacuum,
            "S_delta" | "S_δ" => WaveKind::Delta,
            _ => return None,
        })
    }

    pub fn is_a_family(self) -> bool {
        matches!(self, WaveKind::ShockA | WaveKind::RarefactionA | WaveKind::ContactA)
    }
}

/// Joins symbols as `S_a + C_0`.
pub fn sequence_string(kinds: &[WaveKind]) -> String {
    kinds.iter().map(|k| k.symbol()).collect::<Vec<_>>().join(" + ")
}

/// Parses `S_a + C_0` style sequences.
pub fn parse_sequence(s: &str) -> Option<Vec<WaveKind>> {
    s.split('+').map(WaveKind::from_symbol).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AWaveKind {
    Shock,
    Rarefaction,
    ContactA,
}

/// An a-family wave at constant `ũ`.
///
/// Shocks and contacts have `speed_lo == speed_hi`; a rarefaction fan spans
/// `λ_a(left)..λ_a(right)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AWave {
    pub kind: AWaveKind,
    pub left: State,
    pub right: State,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl AWaveKind {
    pub fn wave_kind(self) -> WaveKind {
        match self {
            AWaveKind::Shock => WaveKind::ShockA,
            AWaveKind::Rarefaction => WaveKind::RarefactionA,
            AWaveKind::ContactA => WaveKind::ContactA,
        }
    }
}

impl SystemParams {
    /// `ρ (ρ/ρ̄)^a` with its `ρ → 0⁺` limit.
    pub(crate) fn rho_p(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return if self.a_exp > -1.0 { 0.0 } else { f64::INFINITY };
        }
        rho * self.pressure_ratio(rho)
    }

    pub(crate) fn on_critical(&self, rho: f64) -> bool {
        (rho - self.rho_bar).abs() <= CRITICAL_TOL * self.rho_bar
    }
}

/// Rankine-Hugoniot speed of the a-shock from `left` to `(rho_right, ũ_L)`.
pub fn shock_speed_a(params: &SystemParams, left: State, rho_right: f64, t: f64) -> Result<f64> {
    let v = params.physical_velocity(left, t);
    if params.a_exp == -1.0 {
        return Ok(v);
    }
    if rho_right == left.rho {
        return Err(Error::DegenerateJump);
    }
    let q = (params.rho_p(left.rho) - params.rho_p(rho_right)) / (left.rho - rho_right);
    Ok(v * (1.0 - q))
}

/// Strict Lax test `λ_a(R) < s < λ_a(L)`. Always false when `a = −1`.
pub fn lax_admissible_a(params: &SystemParams, left: State, right: State, s: f64, t: f64) -> bool {
    if params.a_exp == -1.0 {
        return false;
    }
    let ll = params.eigenvalues(left, t).lambda_a;
    let lr = params.eigenvalues(right, t).lambda_a;
    lr < s && s < ll
}

/// The a-wave from `left` to density `rho_right` along `ũ = ũ_L`.
pub fn a_wave(params: &SystemParams, left: State, rho_right: f64, t: f64) -> Result<AWave> {
    if rho_right == left.rho {
        return Err(Error::DegenerateJump);
    }
    let right = State::new(rho_right, left.u_tilde);
    let s = shock_speed_a(params, left, rho_right, t)?;
    if params.a_exp == -1.0 {
        return Ok(AWave { kind: AWaveKind::ContactA, left, right, speed_lo: s, speed_hi: s });
    }
    if lax_admissible_a(params, left, right, s, t) {
        return Ok(AWave { kind: AWaveKind::Shock, left, right, speed_lo: s, speed_hi: s });
    }
    let ll = params.eigenvalues(left, t).lambda_a;
    let lr = params.eigenvalues(right, t).lambda_a;
    Ok(AWave { kind: AWaveKind::Rarefaction, left, right, speed_lo: ll.min(lr), speed_hi: ll.max(lr) })
}

/// `ũ` on the 0-contact curve through `left` at density `rho`.
pub fn contact_curve_u(params: &SystemParams, left: State, rho: f64, t: f64) -> Result<f64> {
    if params.on_critical(rho) || params.on_critical(left.rho) {
        return Err(Error::CriticalDensity { rho_bar: params.rho_bar });
    }
    let p = params.pressure_ratio(rho);
    let pl = params.pressure_ratio(left.rho);
    let ratio = if p.is_infinite() { -1.0 } else { (p - pl) / (1.0 - p) };
    Ok(ratio * params.physical_velocity(left, t) + left.u_tilde)
}

/// Inverse of [`contact_curve_u`]: the density on the branch through
/// `left` where `ũ = u`, if that branch reaches `u`.
pub fn contact_curve_rho(params: &SystemParams, left: State, u: f64, t: f64) -> Option<f64> {
    let v = params.physical_velocity(left, t);
    let pl = params.pressure_ratio(left.rho);
    if v == 0.0 || params.on_critical(left.rho) {
        return None;
    }
    // (P − P_L)/(1 − P) = k  ⇒  P = (k + P_L)/(1 + k)
    let k = (u - left.u_tilde) / v;
    let p = (k + pl) / (1.0 + k);
    if !(p.is_finite() && p > 0.0) {
        return None;
    }
    let rho = params.rho_bar * p.powf(1.0 / params.a_exp);
    let same_side = (rho > params.rho_bar) == (left.rho > params.rho_bar);
    (rho.is_finite() && same_side && !params.on_critical(rho)).then_some(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchKind {
    /// The contact curve on the same side of `ρ̄` as the anchor.
    C0,
    /// The same relation on the opposite side of `ρ̄`.
    Mirror,
    /// The `ρ_L → ∞` limit of the contact curve, `ũ = ũ_L + v_L P / (1 − P)`, `a < 0` only.
    Limiting,
    /// The segment `ρ = ρ̄` used when the anchor sits on `ρ̄`.
    Vertical,
}

/// A sampled 0-contact branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactBranch {
    pub kind: BranchKind,
    pub anchor: State,
    pub samples: Vec<State>,
    /// Horizontal asymptote of the defining relation as `ρ → ∞`.
    pub asymptote_u: f64,
}

/// `(limit as ρ → 0, limit as ρ → ∞)` of the contact relation through `left`.
pub fn contact_asymptotes(params: &SystemParams, left: State, t: f64) -> (f64, f64) {
    let i = params.shift(t);
    let outer = params.eigenvalues(left, t).lambda_0 - i;
    if params.a_exp > 0.0 {
        (outer, -i)
    } else {
        (-i, outer)
    }
}

fn refined_grid(params: &SystemParams, rho_grid: &[f64]) -> Vec<f64> {
    let rb = params.rho_bar;
    let lo = rho_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rho_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h0 = rho_grid
        .iter()
        .map(|r| (r - rb).abs())
        .filter(|d| *d > 0.0)
        .fold(0.1 * rb, f64::min);
    let mut pts: Vec<f64> = rho_grid.iter().copied().filter(|r| *r > 0.0).collect();
    let mut h = h0;
    for _ in 0..20 {
        h *= 0.5;
        pts.extend([rb - h, rb + h].into_iter().filter(|r| *r >= lo && *r <= hi && *r > 0.0));
    }
    pts.retain(|r| !params.on_critical(*r));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// C0, Mirror and (for `a < 0`) Limiting branches through `left`, sampled on
/// `rho_grid` plus geometric refinement towards `ρ̄`.
pub fn contact_branches(params: &SystemParams, left: State, t: f64, rho_grid: &[f64]) -> Result<Vec<ContactBranch>> {
    if params.on_critical(left.rho) {
        return Err(Error::CriticalDensity { rho_bar: params.rho_bar });
    }
    let rb = params.rho_bar;
    let pts = refined_grid(params, rho_grid);
    let left_side = left.rho > rb;
    let (_, at_inf) = contact_asymptotes(params, left, t);
    let mut c0 = Vec::new();
    let mut mirror = Vec::new();
    for &r in &pts {
        let u = contact_curve_u(params, left, r, t)?;
        if (r > rb) == left_side {
            c0.push(State::new(r, u));
        } else {
            mirror.push(State::new(r, u));
        }
    }
    let mut out = vec![
        ContactBranch { kind: BranchKind::C0, anchor: left, samples: c0, asymptote_u: at_inf },
        ContactBranch { kind: BranchKind::Mirror, anchor: left, samples: mirror, asymptote_u: at_inf },
    ];
    if params.a_exp < 0.0 {
        let v = params.physical_velocity(left, t);
        let samples = pts
            .iter()
            .filter(|r| **r > rb)
            .map(|&r| {
                let p = params.pressure_ratio(r);
                State::new(r, left.u_tilde + v * p / (1.0 - p))
            })
            .collect();
        out.push(ContactBranch { kind: BranchKind::Limiting, anchor: left, samples, asymptote_u: left.u_tilde });
    }
    Ok(out)
}

/// The vertical contact at `ρ = ρ̄` from `left` to `u_target`; its speed is 0.
/// An empty target leaves only the anchor.
pub fn contact_vertical(params: &SystemParams, left: State, u_target: f64) -> Result<ContactBranch> {
    if !params.on_critical(left.rho) {
        return Err(Error::InvalidParameter("vertical contact needs an anchor on rho_bar".into()));
    }
    let n = 64;
    let samples = if u_target == left.u_tilde {
        vec![left]
    } else {
        (0..=n).map(|k| State::new(params.rho_bar, left.u_tilde + (u_target - left.u_tilde) * k as f64 / n as f64)).collect()
    };
    Ok(ContactBranch { kind: BranchKind::Vertical, anchor: left, samples, asymptote_u: f64::NAN })
}

/// `(s[ρ] − [f1], s[ρũ] − [f2])` with `[q] = q_L − q_R`.
pub fn rh_residual(params: &SystemParams, left: State, right: State, s: f64, t: f64) -> [f64; 2] {
    let fl = params.flux_or_zero(left, t);
    let fr = params.flux_or_zero(right, t);
    let cl = left.to_conserved();
    let cr = right.to_conserved();
    [s * (cl.rho - cr.rho) - (fl[0] - fr[0]), s * (cl.m - cr.m) - (fl[1] - fr[1])]
}
