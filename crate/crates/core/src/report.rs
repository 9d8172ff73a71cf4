use std::fmt;
use std::time::Duration;

use nalgebra::DVector;

/// How an outer iteration produced its next iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// The subproblem solution was accepted as is.
    UnitStep,
    /// Projection onto the hyperplane built from the subproblem residual.
    Hyperplane,
    /// Projection onto the hyperplane found by backtracking.
    LineSearchHyperplane,
    /// The iterate at which the run stopped.
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIterations,
    LineSearchExhausted,
    SubproblemFailure,
    /// The subproblem returned the current iterate (or a zero hyperplane
    /// normal) while the residual was still above tolerance.
    Stalled,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIterations => "MaxIterations",
            Status::LineSearchExhausted => "LineSearchExhausted",
            Status::SubproblemFailure => "SubproblemFailure",
            Status::Stalled => "Stalled",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "Converged" => Status::Converged,
            "MaxIterations" => Status::MaxIterations,
            "LineSearchExhausted" => Status::LineSearchExhausted,
            "SubproblemFailure" => Status::SubproblemFailure,
            "Stalled" => Status::Stalled,
            other => return Err(format!("unknown status {other:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Natural residual at `xₖ`.
    pub res: f64,
    /// Gap function value at `xₖ`.
    pub merit: f64,
    pub branch: Branch,
    /// `β^mₖ` on the line-search branch, 1 otherwise.
    pub step_size: f64,
    pub inner_iters: usize,
    /// `μₖ` used for the subproblem (0 on the terminal record).
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BranchCounts {
    pub unit_steps: usize,
    pub hyperplane_steps: usize,
    pub linesearch_steps: usize,
}

impl BranchCounts {
    pub fn record(&mut self, branch: Branch) {
        match branch {
            Branch::UnitStep => self.unit_steps += 1,
            Branch::Hyperplane => self.hyperplane_steps += 1,
            Branch::LineSearchHyperplane => self.linesearch_steps += 1,
            Branch::Terminal => {}
        }
    }

    /// Iterations that ended in a projection onto a separating hyperplane.
    pub fn projections(&self) -> usize {
        self.hyperplane_steps + self.linesearch_steps
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: Status,
    /// Outer iterations completed.
    pub iterations: usize,
    pub final_x: DVector<f64>,
    pub final_res: f64,
    pub history: Vec<IterationRecord>,
    pub wall_time: Duration,
    pub branch_counts: BranchCounts,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}
