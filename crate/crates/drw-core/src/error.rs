//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A catalog entry was requested by a name that does not exist.
    #[error("material '{0}' not found in catalog")]
    NotFound(String),

    /// No guided eigenmode exists for the requested configuration.
    #[error("no guided mode at {f_ghz:.3} GHz")]
    NoGuidedMode { f_ghz: f64 },

    /// A grid violates the sampling invariants required by the solver.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// The requested resolution exceeds the cell-count cap.
    #[error("grid of {cells} cells exceeds the cap of {cap}")]
    GridTooLarge { cells: usize, cap: usize },

    /// The closed-form transverse equation has no root in its bracket.
    #[error("mode ({family} p={p} q={q}) below cutoff at {f_ghz:.3} GHz")]
    BelowCutoff {
        family: String,
        p: u32,
        q: u32,
        f_ghz: f64,
    },

    /// Two field solutions live on different grids or frequencies.
    #[error("operands live on incompatible grids")]
    IncompatibleGrids,

    /// A taper endpoint pair cannot produce a guiding profile.
    #[error("taper infeasible: {0}")]
    TaperInfeasible(String),

    /// A frequency grid has too few points for a derivative stencil.
    #[error("insufficient grid: {points} frequency points, need at least {needed}")]
    InsufficientGrid { points: usize, needed: usize },

    /// The iterative eigensolver failed its residual checks.
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    /// Any other construction-time validation failure.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
