//! Delta shocks: initial speeds, admissibility and the trajectory ODEs.
//!
//! Jumps are written `[q] = q_L − q_R`. For `a < 0` the unknowns are the
//! position `x`, the strength `ζ` and the internal velocity `η`:
//!
//! ```text
//! x' = η + I,   ζ' = −κ1,   (ζη)' = −κ2,
//! κ1 = x'[ρ] − [f1],   κ2 = x'[ρũ] − [f2]
//! ```
//!
//! For `a > 0` the internal velocity is pinned at `−I` and
//!
//! ```text
//! ζ'(1 + rI) + ζ r a(t) = [f1] − r[f2],   r = [ρ]/[ρũ]
//! x' = ([f2] + (ζI)') / [ρũ]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{State, SystemParams};
use crate::par;

/// Exponents `(k, β, γ, δ)` of the shadow-wave ansatz for `a < 0`.
pub const SHADOW_EXPONENTS_NEG: [f64; 4] = [1.0, 1.0, 0.0, 0.0];

/// Exponents `(k, β, γ, δ)` for `a > 0`; the last two equal `−a`.
pub fn shadow_exponents_pos(a_exp: f64) -> [f64; 4] {
    [1.0, 1.0, -a_exp, -a_exp]
}

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-3;

/// Jumps across a delta between fixed side states.
#[derive(Debug, Clone, Copy)]
pub struct Jumps {
    pub rho: f64,
    pub m: f64,
    pub f1: f64,
    pub f2: f64,
}

pub fn jumps(params: &SystemParams, left: State, right: State, t: f64) -> Result<Jumps> {
    let fl = params.flux(left, t)?;
    let fr = params.flux(right, t)?;
    let cl = left.to_conserved();
    let cr = right.to_conserved();
    Ok(Jumps { rho: cl.rho - cr.rho, m: cl.m - cr.m, f1: fl[0] - fr[0], f2: fl[1] - fr[1] })
}

/// Real roots of the speed equation at the initial time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpeedRoots {
    /// Two roots, larger first.
    Pair(f64, f64),
    /// `[ρ] = 0`: the equation is linear.
    Single(f64),
}

impl SpeedRoots {
    pub fn to_vec(self) -> Vec<f64> {
        match self {
            SpeedRoots::Pair(a, b) => vec![a, b],
            SpeedRoots::Single(a) => vec![a],
        }
    }
}

/// Roots of `s²[ρ] − s([ρũ] + [ρũ(1−P)]) + [ρũ²(1−P)] = 0` at `t = 0`.
pub fn initial_speed_roots(params: &SystemParams, left: State, right: State) -> Result<SpeedRoots> {
    if left == right {
        return Err(Error::NoJump);
    }
    let ml = params.mobility(left.rho)?;
    let mr = params.mobility(right.rho)?;
    let (cl, cr) = (left.to_conserved(), right.to_conserved());
    let qa = cl.rho - cr.rho;
    let qb = -((cl.m - cr.m) + (cl.m * ml - cr.m * mr));
    let qc = cl.m * left.u_tilde * ml - cr.m * right.u_tilde * mr;
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    if qa.abs() <= 1e-14 * scale {
        if qb == 0.0 {
            return Err(Error::NoRealRoot);
        }
        return Ok(SpeedRoots::Single(-qc / qb));
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::NoRealRoot);
    }
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / qa, qc / q) };
    Ok(SpeedRoots::Pair(r1.max(r2), r1.min(r2)))
}

/// `max(λ_a(R), λ_0(R)) < x' < min(λ_a(L), λ_0(L))` at time `t`.
pub fn overcompressive_at(params: &SystemParams, left: State, right: State, xprime: f64, t: f64) -> bool {
    let el = params.eigenvalues(left, t);
    let er = params.eigenvalues(right, t);
    er.max() < xprime && xprime < el.min()
}

/// The unique overcompressive initial root.
pub fn admissible_initial_speed(params: &SystemParams, left: State, right: State) -> Result<f64> {
    let roots = initial_speed_roots(params, left, right)?.to_vec();
    let ok: Vec<f64> = roots.into_iter().filter(|s| overcompressive_at(params, left, right, *s, 0.0)).collect();
    match ok.len() {
        0 => Err(Error::Inadmissible),
        1 => Ok(ok[0]),
        _ => Err(Error::AmbiguousRoot),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaRegime {
    Negative,
    Positive,
}

/// Sampled delta-shock trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaTrajectory {
    pub regime: DeltaRegime,
    pub left: State,
    pub right: State,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub zeta: Vec<f64>,
    /// Internal velocity `η` (transformed frame).
    pub eta: Vec<f64>,
    /// Propagation speed `x'`.
    pub speed: Vec<f64>,
}

impl DeltaTrajectory {
    /// `η₀ = −x'(ρ̄/(ζ/2))^a`, the amplitude of the internal velocity for `a > 0`.
    pub fn internal_amplitude(&self, params: &SystemParams, k: usize) -> f64 {
        -self.speed[k] * (params.rho_bar / (0.5 * self.zeta[k])).powf(params.a_exp)
    }

    /// Whether the speed stays overcompressive at every sample.
    pub fn stays_overcompressive(&self, params: &SystemParams) -> bool {
        self.times
            .iter()
            .zip(&self.speed)
            .all(|(&t, &s)| overcompressive_at(params, self.left, self.right, s, t))
    }
}

/// Step times from 0 to `t_end` with spacing at most `dt`, landing on
/// source breakpoints and on `t_end` exactly.
fn time_grid(params: &SystemParams, t_end: f64, dt: f64) -> Vec<f64> {
    let mut marks: Vec<f64> = params.source.breakpoints().filter(|b| *b > 0.0 && *b < t_end).collect();
    marks.push(t_end);
    let mut out = vec![0.0];
    let mut t0 = 0.0;
    for m in marks {
        let n = ((m - t0) / dt).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n { m } else { t0 + (m - t0) * k as f64 / n as f64 });
        }
        t0 = m;
    }
    if t_end == 0.0 {
        out.truncate(1);
    }
    out
}

fn check_inputs(t_end: f64, dt: f64) -> Result<()> {
    if !(t_end >= 0.0 && t_end.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter("t_end must be nonnegative and dt positive".into()));
    }
    Ok(())
}

/// Integrates the `a < 0` system with RK4 in `(x, ζ, ζη)`.
pub fn integrate_delta_neg(
    params: &SystemParams,
    left: State,
    right: State,
    t_end: f64,
    dt: f64,
) -> Result<DeltaTrajectory> {
    check_inputs(t_end, dt)?;
    if params.a_exp >= 0.0 {
        return Err(Error::InvalidParameter("integrate_delta_neg needs a < 0".into()));
    }
    let s0 = admissible_initial_speed(params, left, right)?;
    let rho_jump = left.rho - right.rho;
    let m_jump = left.to_conserved().m - right.to_conserved().m;

    // f1 and f2 are affine in I, so the flux jumps are too.
    let (ml, mr) = (params.mobility(left.rho)?, params.mobility(right.rho)?);
    let f1_jump = |i: f64| left.rho * (left.u_tilde + i) * ml - right.rho * (right.u_tilde + i) * mr;
    let f2_jump = |i: f64| {
        left.rho * left.u_tilde * (left.u_tilde + i) * ml - right.rho * right.u_tilde * (right.u_tilde + i) * mr
    };
    let rhs = |t: f64, eta: f64| -> [f64; 3] {
        let i = params.shift(t);
        let xp = eta + i;
        let k1 = xp * rho_jump - f1_jump(i);
        let k2 = xp * m_jump - f2_jump(i);
        [xp, -k1, -k2]
    };
    let eta_of = |y: [f64; 3]| y[2] / y[1];

    let grid = time_grid(params, t_end, dt);
    let mut traj = DeltaTrajectory {
        regime: DeltaRegime::Negative,
        left,
        right,
        times: Vec::with_capacity(grid.len()),
        x: Vec::with_capacity(grid.len()),
        zeta: Vec::with_capacity(grid.len()),
        eta: Vec::with_capacity(grid.len()),
        speed: Vec::with_capacity(grid.len()),
    };
    let mut y = [0.0, 0.0, 0.0];
    let mut eta = s0;
    let push = |traj: &mut DeltaTrajectory, t: f64, y: [f64; 3], eta: f64| {
        traj.times.push(t);
        traj.x.push(y[0]);
        traj.zeta.push(y[1]);
        traj.eta.push(eta);
        traj.speed.push(eta + params.shift(t));
    };
    push(&mut traj, 0.0, y, eta);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = t1 - t0;
        // ζ = 0 at the start, so the first stage uses η(0) = s₋ directly.
        let e1 = if y[1] == 0.0 { eta } else { eta_of(y) };
        let k1 = rhs(t0, e1);
        let y2 = add(y, k1, 0.5 * h);
        let k2 = rhs(t0 + 0.5 * h, eta_or(y2, e1));
        let y3 = add(y, k2, 0.5 * h);
        let k3 = rhs(t0 + 0.5 * h, eta_or(y3, e1));
        let y4 = add(y, k3, h);
        let k4 = rhs(t1, eta_or(y4, e1));
        for c in 0..3 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if y[1] < -1e-12 {
            return Err(Error::StrengthNegative { t: t1 });
        }
        eta = eta_or(y, eta);
        push(&mut traj, t1, y, eta);
    }
    Ok(traj)
}

fn eta_or(y: [f64; 3], fallback: f64) -> f64 {
    if y[1] > 0.0 {
        y[2] / y[1]
    } else {
        fallback
    }
}

fn add<const N: usize>(y: [f64; N], k: [f64; N], h: f64) -> [f64; N] {
    let mut out = y;
    for c in 0..N {
        out[c] += h * k[c];
    }
    out
}

/// Integrates the `a > 0` system with RK4 in `(x, ζ)`.
pub fn integrate_delta_pos(
    params: &SystemParams,
    left: State,
    right: State,
    t_end: f64,
    dt: f64,
) -> Result<DeltaTrajectory> {
    check_inputs(t_end, dt)?;
    if params.a_exp <= 0.0 {
        return Err(Error::InvalidParameter("integrate_delta_pos needs a > 0".into()));
    }
    if left == right {
        return Err(Error::NoJump);
    }
    let rho_jump = left.rho - right.rho;
    let m_jump = left.to_conserved().m - right.to_conserved().m;
    if m_jump == 0.0 {
        return Err(Error::SingularCoefficient { t: 0.0 });
    }
    let r = rho_jump / m_jump;
    let (ml, mr) = (params.mobility(left.rho)?, params.mobility(right.rho)?);
    let f1_jump = |i: f64| left.rho * (left.u_tilde + i) * ml - right.rho * (right.u_tilde + i) * mr;
    let f2_jump = |i: f64| {
        left.rho * left.u_tilde * (left.u_tilde + i) * ml - right.rho * right.u_tilde * (right.u_tilde + i) * mr
    };
    // Returns (ζ', x') at time t.
    let rhs = |t: f64, zeta: f64| -> Result<(f64, f64)> {
        let i = params.shift(t);
        let a = params.source.value(t);
        let denom = 1.0 + r * i;
        if denom.abs() < 1e-14 {
            return Err(Error::SingularCoefficient { t });
        }
        let zp = (f1_jump(i) - r * f2_jump(i) - zeta * r * a) / denom;
        let xp = (f2_jump(i) + zp * i + zeta * a) / m_jump;
        Ok((zp, xp))
    };

    let (_, xp0) = rhs(0.0, 0.0)?;
    if !overcompressive_at(params, left, right, xp0, 0.0) {
        return Err(Error::Inadmissible);
    }
    let grid = time_grid(params, t_end, dt);
    let mut traj = DeltaTrajectory {
        regime: DeltaRegime::Positive,
        left,
        right,
        times: vec![0.0],
        x: vec![0.0],
        zeta: vec![0.0],
        eta: vec![0.0],
        speed: vec![xp0],
    };
    let (mut x, mut zeta) = (0.0, 0.0);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = t1 - t0;
        // Step within [t0, t1) so a(t) stays on one piece.
        let tm = t0 + 0.5 * h;
        let (z1, x1) = rhs(t0, zeta)?;
        let (z2, x2) = rhs(tm, zeta + 0.5 * h * z1)?;
        let (z3, x3) = rhs(tm, zeta + 0.5 * h * z2)?;
        let (z4, x4) = rhs_left_limit(&rhs, t0, t1, zeta + h * z3)?;
        zeta += h / 6.0 * (z1 + 2.0 * z2 + 2.0 * z3 + z4);
        x += h / 6.0 * (x1 + 2.0 * x2 + 2.0 * x3 + x4);
        if zeta < -1e-12 {
            return Err(Error::StrengthNegative { t: t1 });
        }
        let (_, xp) = rhs(t1, zeta)?;
        traj.times.push(t1);
        traj.x.push(x);
        traj.zeta.push(zeta);
        traj.eta.push(-params.shift(t1));
        traj.speed.push(xp);
    }
    Ok(traj)
}

// Evaluates the right-hand side at the end of a step using the source piece
// active inside the step.
fn rhs_left_limit<F>(rhs: &F, t0: f64, t1: f64, zeta: f64) -> Result<(f64, f64)>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    let t = t1 - 1e-12 * (t1 - t0).max(f64::MIN_POSITIVE);
    rhs(t.max(t0), zeta)
}

/// Integrates whichever system matches the sign of `a`.
pub fn integrate_delta(
    params: &SystemParams,
    left: State,
    right: State,
    t_end: f64,
    dt: f64,
) -> Result<DeltaTrajectory> {
    if params.a_exp < 0.0 {
        integrate_delta_neg(params, left, right, t_end, dt)
    } else {
        integrate_delta_pos(params, left, right, t_end, dt)
    }
}

/// Grid of right states tested for an overcompressive delta from `left`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvercompressiveScan {
    pub left: State,
    pub t: f64,
    pub rho: Vec<f64>,
    pub u_tilde: Vec<f64>,
    /// Row-major in `u_tilde`, then `rho`: index `j * rho.len() + i`.
    pub admissible: Vec<bool>,
    /// Cells where both initial roots were overcompressive.
    pub flagged: Vec<(usize, usize)>,
    /// Cells skipped because `[ρũ] = 0` for `a > 0`.
    pub momentum_jump_zero: usize,
}

impl OvercompressiveScan {
    pub fn at(&self, i: usize, j: usize) -> bool {
        self.admissible[j * self.rho.len() + i]
    }
}

#[derive(Debug, Clone, Copy)]
enum CellOutcome {
    Admissible,
    Rejected,
    Ambiguous,
    MomentumZero,
}

/// Whether a delta from `left` to `right` exists and stays overcompressive on
/// `[0, t]`, sampled every `dt`.
pub fn delta_admissible(params: &SystemParams, left: State, right: State, t: f64, dt: f64) -> bool {
    matches!(scan_cell(params, left, right, t, dt), CellOutcome::Admissible)
}

fn scan_cell(params: &SystemParams, left: State, right: State, t: f64, dt: f64) -> CellOutcome {
    if params.a_exp > 0.0 && left.to_conserved().m == right.to_conserved().m {
        return CellOutcome::MomentumZero;
    }
    match integrate_delta(params, left, right, t, dt) {
        Ok(traj) if traj.stays_overcompressive(params) => CellOutcome::Admissible,
        Ok(_) => CellOutcome::Rejected,
        Err(Error::AmbiguousRoot) => CellOutcome::Ambiguous,
        Err(_) => CellOutcome::Rejected,
    }
}

/// Marks right states `(ρ, ũ)` reached by a delta that stays overcompressive
/// on `[0, t]`, sampled every `dt`.
pub fn scan_overcompressive(
    params: &SystemParams,
    left: State,
    t: f64,
    rho: &[f64],
    u_tilde: &[f64],
    dt: f64,
    exec: par::Execution,
) -> OvercompressiveScan {
    let nr = rho.len();
    let cells: Vec<CellOutcome> = par::map_range(exec, nr * u_tilde.len(), |k| {
        let right = State::new(rho[k % nr], u_tilde[k / nr]);
        scan_cell(params, left, right, t, dt)
    });
    let mut scan = OvercompressiveScan {
        left,
        t,
        rho: rho.to_vec(),
        u_tilde: u_tilde.to_vec(),
        admissible: vec![false; cells.len()],
        flagged: Vec::new(),
        momentum_jump_zero: 0,
    };
    for (k, c) in cells.into_iter().enumerate() {
        match c {
            CellOutcome::Admissible => scan.admissible[k] = true,
            CellOutcome::Ambiguous => scan.flagged.push((k % nr, k / nr)),
            CellOutcome::MomentumZero => scan.momentum_jump_zero += 1,
            CellOutcome::Rejected => {}
        }
    }
    scan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SourceTerm;

    fn p(a: f64) -> SystemParams {
        SystemParams::frozen(a, 5.0).unwrap()
    }

    const L: State = State::new(3.0, 3.0);
    const R: State = State::new(9.0, -8.0);

    #[test]
    fn reference_roots() {
        let SpeedRoots::Pair(hi, lo) = initial_speed_roots(&p(-1.5), L, R).unwrap() else { panic!() };
        assert!((hi - -4.20919239).abs() < 1e-7);
        assert!((lo - -14.59428154).abs() < 1e-7);
        assert!((admissible_initial_speed(&p(-1.5), L, R).unwrap() - hi).abs() < 1e-15);
    }

    #[test]
    fn linear_speed_equation() {
        let r = initial_speed_roots(&p(-1.5), State::new(3.0, 3.0), State::new(3.0, -2.0)).unwrap();
        assert!(matches!(r, SpeedRoots::Single(_)));
        assert_eq!(initial_speed_roots(&p(-1.5), L, L), Err(Error::NoJump));
    }

    #[test]
    fn zero_source_closed_form() {
        let pr = p(-1.5);
        let traj = integrate_delta_neg(&pr, L, R, 3.0, DEFAULT_DT).unwrap();
        let s = admissible_initial_speed(&pr, L, R).unwrap();
        let k = traj.times.len() - 1;
        assert!((traj.x[k] - 3.0 * s).abs() < 1e-10);
        assert!((traj.zeta[k] - 3.0 * 6.5656892).abs() < 1e-5);
        assert!(traj.eta.iter().all(|e| (e - s).abs() < 1e-10));
    }

    #[test]
    fn positive_delta_case19() {
        let pr = p(0.5);
        let l = State::new(3.0, -3.0);
        let r = State::new(9.0, 9.0);
        let traj = integrate_delta_pos(&pr, l, r, 2.0, 1e-2).unwrap();
        assert!((traj.speed[0] - -2.834).abs() < 1e-3);
        assert!(traj.stays_overcompressive(&pr));
        assert!(traj.zeta.iter().all(|z| *z >= 0.0));
        assert!(traj.internal_amplitude(&pr, traj.times.len() - 1).is_finite());
    }

    #[test]
    fn steps_land_on_breakpoints() {
        let pr = SystemParams::new(-1.5, 5.0, SourceTerm::new(vec![(0.0, 0.0), (0.25, 0.1)]).unwrap()).unwrap();
        let g = time_grid(&pr, 1.0, 0.1);
        assert!(g.contains(&0.25));
        assert_eq!(*g.last().unwrap(), 1.0);
    }
}
