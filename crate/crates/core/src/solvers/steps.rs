use nalgebra::DVector;
use thiserror::Error;

use crate::problem::VIProblem;
use crate::sets::{FeasibleSet, ProjectionError, Projector};

/// Normals shorter than this are treated as zero.
pub const ZERO_NORMAL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("no backtracking step in 0..={max_linesearch} satisfies the descent test")]
    LineSearchExhausted { max_linesearch: usize },
    #[error("hyperplane normal has norm {norm:e}")]
    ZeroNormal { norm: f64 },
    #[error("hyperplane does not separate the iterate: ⟨v, x − y⟩ = {value:e}")]
    NotSeparating { value: f64 },
    #[error("line search needs z ≠ x")]
    ZeroDirection,
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// Result of the backtracking search along `z − x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    /// `mₖ`.
    pub m: usize,
    /// `αₖ = β^mₖ`.
    pub alpha: f64,
    /// `yₖ = xₖ + αₖ(zₖ − xₖ)`.
    pub y: DVector<f64>,
    /// `F(yₖ)`.
    pub v: DVector<f64>,
}

/// Smallest `m ≤ max_linesearch` with
/// `⟨F(x + βᵐ(z − x)), x − z⟩ ≥ λ(1 − ρ̂)μ‖z − x‖²`.
///
/// The factor `μ` makes the test invariant under scaling of `F` and
/// guarantees a finite `m` whenever `z` solves the regularized subproblem to
/// the required accuracy; `μ = 1` gives the unscaled test.
#[allow(clippy::too_many_arguments)]
pub fn line_search(
    problem: &VIProblem,
    x: &DVector<f64>,
    z: &DVector<f64>,
    rho_hat: f64,
    mu: f64,
    lambda: f64,
    beta: f64,
    max_linesearch: usize,
) -> Result<LineSearchOutcome, StepError> {
    let d = z - x;
    let dd = d.norm_squared();
    if dd == 0.0 {
        return Err(StepError::ZeroDirection);
    }
    let target = lambda * (1.0 - rho_hat) * mu * dd;
    let mut alpha = 1.0;
    for m in 0..=max_linesearch {
        let y = x + &d * alpha;
        let v = problem.eval(&y);
        if -v.dot(&d) >= target {
            return Ok(LineSearchOutcome { m, alpha, y, v });
        }
        alpha *= beta;
    }
    Err(StepError::LineSearchExhausted { max_linesearch })
}

/// `P_C(x̂)` where `x̂ = x − (⟨v, x − y⟩/‖v‖²) v` is the projection of `x`
/// onto the hyperplane `{w : ⟨v, w − y⟩ = 0}`.
pub fn hyperplane_step(
    x: &DVector<f64>,
    y: &DVector<f64>,
    v: &DVector<f64>,
    set: &FeasibleSet,
) -> Result<DVector<f64>, StepError> {
    hyperplane_step_with(&mut Projector::new(set), x, y, v)
}

pub fn hyperplane_step_with(
    proj: &mut Projector<'_>,
    x: &DVector<f64>,
    y: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<DVector<f64>, StepError> {
    let vv = v.norm_squared();
    if vv.sqrt() <= ZERO_NORMAL {
        return Err(StepError::ZeroNormal { norm: vv.sqrt() });
    }
    let gap = v.dot(&(x - y));
    if gap <= 0.0 {
        return Err(StepError::NotSeparating { value: gap });
    }
    let x_hat = x - v * (gap / vv);
    Ok(proj.project(&x_hat)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn identity_map(n: usize) -> VIProblem {
        VIProblem::new("id", n, FeasibleSet::whole_space(n), |x: &DVector<f64>| x.clone()).unwrap()
    }

    #[test]
    fn backtracks_twice() {
        // F(y) = y with y = 1 − βᵐ, so the test reads 1 − βᵐ ≥ 0.5:
        // m = 0 gives 0, m = 1 gives 0.3, m = 2 gives 0.51.
        let p = identity_map(1);
        let out = line_search(&p, &v(&[1.0]), &v(&[0.0]), 0.0, 1.0, 0.5, 0.7, 60).unwrap();
        assert_eq!(out.m, 2);
        assert!((out.alpha - 0.49).abs() < 1e-15);
        assert!((out.y[0] - 0.51).abs() < 1e-15);
        assert_eq!(out.v, out.y);
    }

    #[test]
    fn accepts_full_step_for_strongly_monotone_map() {
        let p = VIProblem::new("shift", 1, FeasibleSet::whole_space(1), |x: &DVector<f64>| x.add_scalar(1.0)).unwrap();
        // F(z) = F(0) = 1 and x − z = 1, so the test holds at m = 0.
        let out = line_search(&p, &v(&[1.0]), &v(&[0.0]), 0.0, 1.0, 0.5, 0.7, 60).unwrap();
        assert_eq!(out.m, 0);
        assert_eq!(out.alpha, 1.0);
    }

    #[test]
    fn zero_map_exhausts() {
        let p = VIProblem::new("zero", 2, FeasibleSet::whole_space(2), |_x: &DVector<f64>| DVector::zeros(2)).unwrap();
        assert_eq!(
            line_search(&p, &v(&[1.0, 0.0]), &v(&[0.0, 0.0]), 0.0, 1.0, 0.5, 0.7, 10),
            Err(StepError::LineSearchExhausted { max_linesearch: 10 })
        );
        assert_eq!(
            line_search(&p, &v(&[1.0, 0.0]), &v(&[1.0, 0.0]), 0.0, 1.0, 0.5, 0.7, 10),
            Err(StepError::ZeroDirection)
        );
    }

    #[test]
    fn hyperplane_examples() {
        let whole = FeasibleSet::whole_space(2);
        let x = hyperplane_step(&v(&[2.0, 0.0]), &v(&[1.0, 0.0]), &v(&[1.0, 0.0]), &whole).unwrap();
        assert_eq!(x, v(&[1.0, 0.0]));

        let orthant = FeasibleSet::nonnegative_orthant(2);
        let x = hyperplane_step(&v(&[1.0, 1.0]), &v(&[0.0, 0.0]), &v(&[1.0, 1.0]), &orthant).unwrap();
        assert_eq!(x, v(&[0.0, 0.0]));
    }

    #[test]
    fn hyperplane_error_paths() {
        let whole = FeasibleSet::whole_space(2);
        assert!(matches!(
            hyperplane_step(&v(&[1.0, 0.0]), &v(&[0.0, 0.0]), &v(&[0.0, 1.0]), &whole),
            Err(StepError::NotSeparating { .. })
        ));
        assert!(matches!(
            hyperplane_step(&v(&[1.0, 0.0]), &v(&[0.0, 0.0]), &v(&[0.0, 0.0]), &whole),
            Err(StepError::ZeroNormal { .. })
        ));
    }
}
