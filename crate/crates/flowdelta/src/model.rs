//! Parameters, states and the closed-form flux and eigenstructure.
//!
//! The system is written in the transformed velocity `ũ`. With
//! `I(t) = ∫₀ᵗ a(s) ds`, the physical velocity is `v = ũ + I` and
//!
//! ```text
//! ρ_t    + (ρ v (1 − P))_x   = 0
//! (ρũ)_t + (ρũ v (1 − P))_x = 0,      P = (ρ/ρ̄)^a
//! ```
//!
//! Every function here is pure and works at a frozen time `t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Densities at or below this value are treated as vacuum.
pub const VACUUM_FLOOR: f64 = 1e-10;

/// Piecewise-constant source `a(t)`.
///
/// Stored as `(t_start, value)` pieces. The first piece starts at zero and
/// the last one extends to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct SourceTerm {
    pieces: Vec<(f64, f64)>,
    /// `I` at the start of each piece.
    offsets: Vec<f64>,
}

impl TryFrom<Vec<(f64, f64)>> for SourceTerm {
    type Error = Error;

    fn try_from(pieces: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(pieces)
    }
}

impl From<SourceTerm> for Vec<(f64, f64)> {
    fn from(s: SourceTerm) -> Self {
        s.pieces
    }
}

impl SourceTerm {
    pub fn new(pieces: Vec<(f64, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("source needs at least one piece".into()));
        }
        if pieces[0].0 != 0.0 {
            return Err(Error::InvalidParameter("first source piece must start at t = 0".into()));
        }
        for w in pieces.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameter("source breakpoints must increase".into()));
            }
        }
        if pieces.iter().any(|&(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidParameter("source values must be finite".into()));
        }
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for (k, &(t0, v)) in pieces.iter().enumerate() {
            offsets.push(acc);
            if let Some(&(t1, _)) = pieces.get(k + 1) {
                acc += v * (t1 - t0);
            }
        }
        Ok(Self { pieces, offsets })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self { pieces: vec![(0.0, value)], offsets: vec![0.0] }
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    fn piece_index(&self, t: f64) -> usize {
        self.pieces.partition_point(|&(t0, _)| t0 <= t).saturating_sub(1)
    }

    /// `a(t)`, right-continuous at breakpoints.
    pub fn value(&self, t: f64) -> f64 {
        self.pieces[self.piece_index(t)].1
    }

    /// `I(t) = ∫₀ᵗ a(s) ds`, exact for piecewise-constant data.
    pub fn integral(&self, t: f64) -> f64 {
        let k = self.piece_index(t);
        let (t0, v) = self.pieces[k];
        self.offsets[k] + v * (t - t0)
    }

    /// Interior breakpoints, useful for aligning integrator steps.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().skip(1).map(|p| p.0)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.1 == 0.0)
    }

    /// Earliest `t ≥ 0` with `I(t) = level`, if any.
    pub fn first_time_reaching(&self, level: f64) -> Option<f64> {
        if level == 0.0 {
            return Some(0.0);
        }
        for (k, &(t0, v)) in self.pieces.iter().enumerate() {
            let i0 = self.offsets[k];
            let t1 = self.pieces.get(k + 1).map_or(f64::INFINITY, |p| p.0);
            if v == 0.0 {
                if i0 == level {
                    return Some(t0);
                }
                continue;
            }
            let t = t0 + (level - i0) / v;
            if t >= t0 && t <= t1 {
                return Some(t);
            }
        }
        None
    }
}

impl Default for SourceTerm {
    fn default() -> Self {
        Self::zero()
    }
}

/// Which of the four exponent ranges `a` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    BelowMinusOne,
    MinusOne,
    MinusOneToZero,
    Positive,
}

/// Model constants and the source term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub a_exp: f64,
    pub rho_bar: f64,
    pub source: SourceTerm,
}

/// Primitive state `(ρ, ũ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub rho: f64,
    pub u_tilde: f64,
}

impl State {
    pub const fn new(rho: f64, u_tilde: f64) -> Self {
        Self { rho, u_tilde }
    }

    pub fn to_conserved(self) -> Conserved {
        Conserved { rho: self.rho, m: self.rho * self.u_tilde }
    }
}

/// Conserved state `(ρ, m = ρũ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Conserved {
    pub rho: f64,
    pub m: f64,
}

impl Conserved {
    /// Recovers `(ρ, ũ)`; vacuum cells report `ũ = 0`.
    pub fn to_state(self) -> State {
        if self.rho > VACUUM_FLOOR {
            State { rho: self.rho, u_tilde: self.m / self.rho }
        } else {
            State { rho: self.rho.max(0.0), u_tilde: 0.0 }
        }
    }
}

/// Characteristic speeds, possibly infinite at vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalues {
    pub lambda_a: f64,
    pub lambda_0: f64,
}

impl Eigenvalues {
    pub fn max_abs(&self) -> f64 {
        self.lambda_a.abs().max(self.lambda_0.abs())
    }

    pub fn min(&self) -> f64 {
        self.lambda_a.min(self.lambda_0)
    }

    pub fn max(&self) -> f64 {
        self.lambda_a.max(self.lambda_0)
    }
}

/// Right eigenvectors in `(ρ, ũ)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvectors {
    pub r_a: [f64; 2],
    pub r_0: [f64; 2],
}

impl SystemParams {
    pub fn new(a_exp: f64, rho_bar: f64, source: SourceTerm) -> Result<Self> {
        if !a_exp.is_finite() || a_exp == 0.0 {
            return Err(Error::InvalidParameter(format!("a_exp must be finite and nonzero, got {a_exp}")));
        }
        if !(rho_bar.is_finite() && rho_bar > 0.0) {
            return Err(Error::InvalidParameter(format!("rho_bar must be positive, got {rho_bar}")));
        }
        Ok(Self { a_exp, rho_bar, source })
    }

    /// Zero-source parameters.
    pub fn frozen(a_exp: f64, rho_bar: f64) -> Result<Self> {
        Self::new(a_exp, rho_bar, SourceTerm::zero())
    }

    pub fn regime(&self) -> Regime {
        let a = self.a_exp;
        if a > 0.0 {
            Regime::Positive
        } else if a == -1.0 {
            Regime::MinusOne
        } else if a < -1.0 {
            Regime::BelowMinusOne
        } else {
            Regime::MinusOneToZero
        }
    }

    /// `I(t)`.
    pub fn shift(&self, t: f64) -> f64 {
        self.source.integral(t)
    }

    /// `(ρ/ρ̄)^a`, with the `ρ → 0⁺` limit at `ρ ≤ 0`.
    pub fn pressure_ratio(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return if self.a_exp > 0.0 { 0.0 } else { f64::INFINITY };
        }
        let x = rho / self.rho_bar;
        let a = self.a_exp;
        if a == a.trunc() && a.abs() <= 16.0 {
            x.powi(a as i32)
        } else {
            (a * x.ln()).exp()
        }
    }

    /// `1 − (ρ/ρ̄)^a`.
    pub fn mobility(&self, rho: f64) -> Result<f64> {
        if self.a_exp < 0.0 && rho <= VACUUM_FLOOR {
            return Err(Error::VacuumSingularity { rho });
        }
        Ok(1.0 - self.pressure_ratio(rho))
    }

    pub fn physical_velocity(&self, s: State, t: f64) -> f64 {
        s.u_tilde + self.shift(t)
    }

    /// `(f1, f2)` with `f2 = ũ · f1` exactly.
    pub fn flux(&self, s: State, t: f64) -> Result<[f64; 2]> {
        let mob = self.mobility(s.rho)?;
        let f1 = s.rho * self.physical_velocity(s, t) * mob;
        Ok([f1, s.u_tilde * f1])
    }

    /// Flux with vacuum cells contributing nothing.
    pub fn flux_or_zero(&self, s: State, t: f64) -> [f64; 2] {
        if s.rho <= VACUUM_FLOOR {
            return [0.0, 0.0];
        }
        self.flux(s, t).unwrap_or([0.0, 0.0])
    }

    /// `λ_a = v(1 − (a+1)P)` and `λ_0 = v(1 − P)`.
    ///
    /// At `ρ = 0` with `a < 0` the result is the signed infinite limit of
    /// these formulas as `ρ → 0⁺`.
    pub fn eigenvalues(&self, s: State, t: f64) -> Eigenvalues {
        let v = self.physical_velocity(s, t);
        let p = self.pressure_ratio(s.rho);
        let a = self.a_exp;
        if v == 0.0 {
            return Eigenvalues { lambda_a: 0.0, lambda_0: 0.0 };
        }
        if p.is_infinite() {
            let lambda_a = if a == -1.0 { v } else { -v.signum() * (a + 1.0).signum() * f64::INFINITY };
            return Eigenvalues { lambda_a, lambda_0: -v.signum() * f64::INFINITY };
        }
        Eigenvalues { lambda_a: v * (1.0 - (a + 1.0) * p), lambda_0: v * (1.0 - p) }
    }

    /// `R_a = (1, 0)` and `R_0 = (ρ(1 − P), a P v)`.
    pub fn eigenvectors(&self, s: State, t: f64) -> Result<Eigenvectors> {
        let mob = self.mobility(s.rho)?;
        let p = 1.0 - mob;
        let v = self.physical_velocity(s, t);
        Ok(Eigenvectors { r_a: [1.0, 0.0], r_0: [s.rho * mob, self.a_exp * p * v] })
    }

    /// Closed form of `∇λ_a · R_a = −(a+1) a ρ^(a−1) ρ̄^(−a) v`.
    pub fn genuine_nonlinearity_a(&self, s: State, t: f64) -> f64 {
        let a = self.a_exp;
        let v = self.physical_velocity(s, t);
        -(a + 1.0) * a * self.pressure_ratio(s.rho) / s.rho * v
    }

    /// Flux Jacobian in conserved variables `(ρ, m)`.
    pub fn conserved_jacobian(&self, s: State, t: f64) -> Result<[[f64; 2]; 2]> {
        let mob = self.mobility(s.rho)?;
        let p = 1.0 - mob;
        let a = self.a_exp;
        let i = self.shift(t);
        let u = s.u_tilde;
        let v = u + i;
        // f1 = (m + ρI)(1 − P); ∂P/∂ρ = aP/ρ.
        let df1_drho = i * mob - v * a * p;
        let df1_dm = mob;
        // f2 = (m/ρ) f1.
        let df2_drho = -u * v * mob + u * df1_drho;
        let df2_dm = v * mob + u * df1_dm;
        Ok([[df1_drho, df1_dm], [df2_drho, df2_dm]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64) -> SystemParams {
        SystemParams::frozen(a, 5.0).unwrap()
    }

    #[test]
    fn reference_eigenvalues() {
        let e = p(-1.5).eigenvalues(State::new(3.0, -3.0), 0.0);
        assert!((e.lambda_a - -6.2274861218).abs() < 1e-9);
        assert!((e.lambda_0 - 3.4549722437).abs() < 1e-9);
        let e = p(0.5).eigenvalues(State::new(3.0, -3.0), 0.0);
        assert!((e.lambda_a - 0.4856850).abs() < 1e-6);
        assert!((e.lambda_0 - -0.6762100).abs() < 1e-6);
        assert!((p(0.5).mobility(3.0).unwrap() - 0.2254033).abs() < 1e-6);
    }

    #[test]
    fn vacuum_mobility() {
        assert!(matches!(p(-1.5).mobility(0.0), Err(Error::VacuumSingularity { .. })));
        assert_eq!(p(0.5).mobility(0.0).unwrap(), 1.0);
    }

    #[test]
    fn vacuum_limits_match_small_density() {
        for a in [-1.5, -1.0, -0.5, 0.5] {
            for u in [-2.0, 3.0] {
                let e0 = p(a).eigenvalues(State::new(0.0, u), 0.0);
                let e1 = p(a).eigenvalues(State::new(1e-12, u), 0.0);
                for (x, y) in [(e0.lambda_a, e1.lambda_a), (e0.lambda_0, e1.lambda_0)] {
                    if x.is_infinite() {
                        assert_eq!(x.signum(), y.signum(), "a={a} u={u}");
                    } else {
                        assert!((x - y).abs() < 1e-3, "a={a} u={u}: {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn source_integral_is_piecewise_linear() {
        let s = SourceTerm::new(vec![(0.0, 0.1), (10.0, -0.2), (20.0, 0.0)]).unwrap();
        assert!((s.integral(5.0) - 0.5).abs() < 1e-15);
        assert!((s.integral(15.0) - 0.0).abs() < 1e-15);
        assert!((s.integral(30.0) - -1.0).abs() < 1e-15);
        assert_eq!(s.value(10.0), -0.2);
        assert!((s.first_time_reaching(0.3).unwrap() - 3.0).abs() < 1e-12);
        assert!((s.first_time_reaching(-0.5).unwrap() - 17.5).abs() < 1e-12);
        assert!(SourceTerm::new(vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SystemParams::frozen(0.0, 5.0).is_err());
        assert!(SystemParams::frozen(1.0, -5.0).is_err());
    }
}
