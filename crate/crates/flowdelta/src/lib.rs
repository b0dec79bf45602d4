//! Riemann problems and numerics for the transformed system
//!
//! ```text
//! ρ_t    + (ρ (ũ + I) (1 − (ρ/ρ̄)^a))_x   = 0
//! (ρũ)_t + (ρũ (ũ + I) (1 − (ρ/ρ̄)^a))_x = 0
//! ```
//!
//! with `I(t) = ∫₀ᵗ a(s) ds` for a piecewise-constant source `a(t)`.
//!
//! - [`model`]: parameters, states, flux and eigenstructure.
//! - [`waves`]: a-family shocks and rarefactions, 0-contact curves.
//! - [`delta`]: delta-shock speeds, admissibility and trajectories.
//! - [`classify`]: case ids, state-space regions and wave patterns.
//! - [`solver`]: Lax-Friedrichs runs and wave-structure extraction.
//! - [`io`]: config files, the scenario catalog and CSV/SVG output.

pub mod classify;
pub mod delta;
pub mod error;
pub mod io;
pub mod model;
pub mod par;
pub mod roots;
pub mod solver;
pub mod waves;

pub use error::{Error, Result};
pub use model::{Conserved, SourceTerm, State, SystemParams};
pub use par::Execution;
