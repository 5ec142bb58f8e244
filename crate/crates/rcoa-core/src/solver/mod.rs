//! Self-contained solve kernel: interior-point LP, branch-and-bound MILP,
//! and successive-convexification loops (continuous, mixed-integer, and the
//! two-phase hybrid for mixed-integer nonlinear problems).

pub mod linalg;
pub mod lp;
pub mod milp;
pub mod scvx;

use alloc::vec::Vec;
use thiserror::Error;

pub use lp::{lp_solve, lp_solve_traced, LpIterate, LpParams};
pub use milp::{milp_solve, MilpParams};
pub use scvx::{hybrid_solve, scvx_solve, smilp_solve, ScvxParams};

/// Hard errors: malformed inputs or irrecoverable numerics. Solver outcomes
/// that carry a usable iterate (infeasible, iteration limit, stall) are
/// reported through [`SolveStatus`] instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid program: {0}")]
    BadProgram(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(&'static str),
}

/// Terminal state of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    IterLimit,
    Stalled,
    NodeLimit,
    /// Hybrid route: the fixed-integer refinement phase was infeasible; the
    /// returned solution is the phase-1 iterate.
    Phase2Infeasible,
}

impl SolveStatus {
    pub fn is_optimal(&self) -> bool {
        matches!(self, SolveStatus::Optimal)
    }
}

/// One accepted or rejected successive-convexification iteration.
#[derive(Debug, Clone, Copy)]
pub struct IterRecord {
    pub trust_radius: f64,
    pub rho: f64,
    /// Worst nonlinear constraint violation at the iterate.
    pub slack_inf: f64,
    pub accepted: bool,
    /// Penalized nonlinear objective after the iteration.
    pub objective: f64,
    /// Predicted objective decrease of the convex model.
    pub predicted: f64,
    /// Merit weight in force when the step was evaluated.
    pub merit_weight: f64,
}

/// Outcome summary shared by every solver in the kernel.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: f64,
    /// Interior-point iterations, branch-and-bound nodes, or SCvx
    /// iterations, depending on the solver.
    pub iterations: usize,
    pub log: Vec<IterRecord>,
    /// Wall-clock seconds, filled by the caller (the kernel itself does not
    /// read clocks).
    pub wall_time: f64,
    /// Trust radius at exit (successive solvers only); lets warm-started
    /// re-solves skip the shrink cascade.
    pub final_trust_radius: f64,
}

impl SolveReport {
    pub fn with_status(status: SolveStatus, objective: f64, iterations: usize) -> Self {
        SolveReport {
            status,
            objective,
            iterations,
            log: Vec::new(),
            wall_time: 0.0,
            final_trust_radius: 0.0,
        }
    }

    /// Worst slack recorded on the final accepted iteration, if any.
    pub fn final_slack(&self) -> Option<f64> {
        self.log.iter().rev().find(|r| r.accepted).map(|r| r.slack_inf)
    }
}

/// Interface for plugging an external nonlinear-programming backend in place
/// of the built-in successive-convexification route. The built-in routes
/// implement it; no external binding ships with the crate.
pub trait NlpBackend {
    fn solve_nlp(
        &self,
        nlp: &crate::nlp::NlpProblem,
        x_ref: &[f64],
    ) -> Result<(Vec<f64>, SolveReport), SolveError>;
}
