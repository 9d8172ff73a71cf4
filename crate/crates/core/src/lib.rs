//! Solvers for monotone variational inequality problems.
//!
//! Given a continuous mapping `F: Rⁿ → Rⁿ` and a closed convex set `C`, a
//! variational inequality asks for `x* ∈ C` with `⟨F(x*), x − x*⟩ ≥ 0` for all
//! `x ∈ C`. This crate provides
//!
//! - [`solvers::irqn_solve`]: an inexact regularized quasi-Newton method. Each
//!   iteration solves a strongly monotone linear VI built from a cautious BFGS
//!   model, accepts the result outright when it halves the regularized gap
//!   function, and otherwise falls back to a separating-hyperplane projection.
//! - [`solvers::inm_solve`]: the inexact Newton baseline that uses the true
//!   Jacobian and always projects.
//! - Euclidean projections onto boxes and polyhedra ([`sets`]), the latter
//!   backed by a dense dual active-set QP with KKT certificates.
//! - The regularized gap function and natural residual ([`merit`]).
//! - A twelve-problem benchmark suite ([`suite`]) and a CSV harness
//!   ([`bench`]) used by the `visolve` binary.
//!
//! ```
//! use nalgebra::DVector;
//! use visolve::{sets::FeasibleSet, solvers::irqn_solve, SolverConfig, Status, VIProblem};
//!
//! // F(x) = x - 2 on [0, 1]: the solution sits on the upper bound.
//! let set = FeasibleSet::boxed(DVector::from_element(1, 0.0), DVector::from_element(1, 1.0)).unwrap();
//! let problem = VIProblem::new("shifted", 1, set, |x: &DVector<f64>| x.add_scalar(-2.0)).unwrap();
//! let report = irqn_solve(&problem, &DVector::from_element(1, 0.5), &SolverConfig::default()).unwrap();
//! assert_eq!(report.status, Status::Converged);
//! assert!((report.final_x[0] - 1.0).abs() < 1e-6);
//! ```

pub mod bench;
pub mod config;
pub mod linvi;
pub mod merit;
pub mod problem;
pub mod qn;
pub mod report;
pub mod sets;
pub mod solvers;
pub mod suite;

pub use config::{InvalidConfig, RhoSchedule, SecantPair, SolverConfig};
pub use problem::{ProblemError, VIProblem};
pub use report::{Branch, BranchCounts, IterationRecord, SolveReport, Status};
