use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("density {rho:e} is at or below the vacuum floor")]
    VacuumSingularity { rho: f64 },
    #[error("density sits on the critical density {rho_bar}")]
    CriticalDensity { rho_bar: f64 },
    #[error("a-wave between equal densities")]
    DegenerateJump,
    #[error("left and right states coincide")]
    NoJump,
    #[error("speed equation has no real root")]
    NoRealRoot,
    #[error("no overcompressive delta speed")]
    Inadmissible,
    #[error("both delta speeds are overcompressive")]
    AmbiguousRoot,
    #[error("delta strength became negative at t = {t}")]
    StrengthNegative { t: f64 },
    #[error("delta equation is singular at t = {t}")]
    SingularCoefficient { t: f64 },
    #[error("left velocity sits on the degenerate line u = -I(t)")]
    FullDegeneracy,
    #[error("wave curves do not intersect on the admissible side")]
    NoIntersection,
    #[error("no wave construction matches the right state")]
    Unclassifiable,
    #[error("maximum wave speed is zero")]
    ZeroWaveSpeed,
    #[error("non-finite value in cell {cell} at step {step}")]
    NonFinite { cell: usize, step: usize },
    #[error("root is not bracketed on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
