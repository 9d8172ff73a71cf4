use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::problem::VIProblem;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("mapping is not finite at the base point or along coordinate {coordinate:?}")]
pub struct NonFiniteEvaluation {
    pub coordinate: Option<usize>,
}

/// Forward-difference step `hᵢ = scale · (1 + |xᵢ|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdStep {
    pub scale: f64,
}

impl Default for FdStep {
    fn default() -> Self {
        Self { scale: 1e-7 }
    }
}

/// Column `i` is `(F(x + hᵢeᵢ) − F(x)) / hᵢ`.
pub fn fd_jacobian(problem: &VIProblem, x: &DVector<f64>, step: FdStep) -> Result<DMatrix<f64>, NonFiniteEvaluation> {
    let n = x.len();
    let f0 = problem.eval(x);
    if f0.iter().any(|v| !v.is_finite()) {
        return Err(NonFiniteEvaluation { coordinate: None });
    }
    let mut jac = DMatrix::zeros(n, n);
    let mut xp = x.clone();
    for i in 0..n {
        let h = step.scale * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let fi = problem.eval(&xp);
        xp[i] = x[i];
        if fi.iter().any(|v| !v.is_finite()) {
            return Err(NonFiniteEvaluation { coordinate: Some(i) });
        }
        jac.set_column(i, &((fi - &f0) / h));
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::FeasibleSet;

    #[test]
    fn recovers_affine_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.5, 0.0, 3.0, 1.0, -4.0, 0.25, 1.0]);
        let q = DVector::from_column_slice(&[1.0, -2.0, 3.0]);
        let (mm, qq) = (m.clone(), q.clone());
        let p = VIProblem::new("affine", 3, FeasibleSet::whole_space(3), move |x: &DVector<f64>| &mm * x + &qq).unwrap();
        let j = fd_jacobian(&p, &DVector::from_column_slice(&[0.3, -7.0, 2.0]), FdStep::default()).unwrap();
        assert!((&j - &m).amax() <= 1e-6 * m.amax());
    }

    #[test]
    fn reports_non_finite() {
        let p = VIProblem::new("log", 1, FeasibleSet::whole_space(1), |x: &DVector<f64>| x.map(|v| (1.0 - v).ln())).unwrap();
        let err = fd_jacobian(&p, &DVector::from_element(1, 2.0), FdStep::default()).unwrap_err();
        assert_eq!(err.coordinate, None);
    }
}
