//! The regularized gap function, the fixed-point map and the natural residual.
//!
//! For `α > 0`, `H_α(x) = P_C(x − F(x)/α)` and
//!
//! ```text
//! f_α(x) = max_{y ∈ C} −⟨F(x), y − x⟩ − (α/2)‖y − x‖²
//!        = −⟨F(x), H_α(x) − x⟩ − (α/2)‖H_α(x) − x‖²
//! ```
//!
//! The maximizer is exactly `H_α(x)`, so one projection yields both the gap
//! and the natural residual `α‖x − H_α(x)‖`. The gap is nonnegative on `C`
//! and vanishes exactly at solutions.

use nalgebra::DVector;

use crate::problem::VIProblem;
use crate::sets::{ProjectionError, Projector};

#[derive(Debug, Clone, PartialEq)]
pub struct MeritEval {
    /// `H_α(x)`.
    pub h_point: DVector<f64>,
    /// `f_α(x)`.
    pub gap: f64,
    /// `α‖x − H_α(x)‖`.
    pub residual: f64,
}

/// Evaluates everything from a known `F(x)` with a caller-owned projector.
pub fn evaluate_with(
    projector: &mut Projector<'_>,
    x: &DVector<f64>,
    fx: &DVector<f64>,
    alpha: f64,
) -> Result<MeritEval, ProjectionError> {
    debug_assert!(alpha > 0.0);
    let h_point = projector.project(&(x - fx / alpha))?;
    let d = &h_point - x;
    let gap = -fx.dot(&d) - 0.5 * alpha * d.norm_squared();
    let residual = alpha * d.norm();
    Ok(MeritEval {
        h_point,
        gap,
        residual,
    })
}

pub fn evaluate(problem: &VIProblem, x: &DVector<f64>, alpha: f64) -> Result<MeritEval, ProjectionError> {
    let fx = problem.eval(x);
    evaluate_with(&mut Projector::new(problem.set()), x, &fx, alpha)
}

/// `H_α(x) = P_C(x − F(x)/α)`.
pub fn h_alpha(problem: &VIProblem, x: &DVector<f64>, alpha: f64) -> Result<DVector<f64>, ProjectionError> {
    Ok(evaluate(problem, x, alpha)?.h_point)
}

/// `f_α(x)`.
pub fn f_alpha(problem: &VIProblem, x: &DVector<f64>, alpha: f64) -> Result<f64, ProjectionError> {
    Ok(evaluate(problem, x, alpha)?.gap)
}

/// `α‖x − H_α(x)‖`.
pub fn natural_residual(problem: &VIProblem, x: &DVector<f64>, alpha: f64) -> Result<f64, ProjectionError> {
    Ok(evaluate(problem, x, alpha)?.residual)
}
