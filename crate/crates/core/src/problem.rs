use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::merit;
use crate::sets::{FeasibleSet, ProjectionError};

pub type Mapping = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type JacobianMap = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// Residual a registered solution must reach under `α = 0.01`.
pub const KNOWN_SOLUTION_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("declared solution has natural residual {residual:e}")]
    NotASolution { residual: f64 },
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// `VI(F, C)`: find `x* ∈ C` with `⟨F(x*), x − x*⟩ ≥ 0` for all `x ∈ C`.
///
/// Immutable once built; cloning shares the mapping.
#[derive(Clone)]
pub struct VIProblem {
    label: String,
    dim: usize,
    map: Mapping,
    jacobian: Option<JacobianMap>,
    set: FeasibleSet,
    known_solutions: Vec<DVector<f64>>,
}

impl fmt::Debug for VIProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VIProblem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("jacobian", &self.jacobian.is_some())
            .field("set", &self.set)
            .field("known_solutions", &self.known_solutions)
            .finish()
    }
}

impl VIProblem {
    /// Wraps `f`, checking the set dimension and that `f` maps `Rⁿ` to `Rⁿ`
    /// at the projection of the origin.
    pub fn new<F>(label: impl Into<String>, dim: usize, set: FeasibleSet, f: F) -> Result<Self, ProblemError>
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        if set.dim() != dim {
            return Err(ProblemError::DimensionMismatch {
                expected: dim,
                got: set.dim(),
            });
        }
        let probe = set.project(&DVector::zeros(dim))?;
        let out = f(&probe);
        if out.len() != dim {
            return Err(ProblemError::DimensionMismatch {
                expected: dim,
                got: out.len(),
            });
        }
        Ok(Self {
            label: label.into(),
            dim,
            map: Arc::new(f),
            jacobian: None,
            set,
            known_solutions: Vec::new(),
        })
    }

    pub fn with_jacobian<J>(mut self, j: J) -> Self
    where
        J: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(j));
        self
    }

    /// Registers a solution after checking its natural residual.
    pub fn with_known_solution(mut self, x: DVector<f64>) -> Result<Self, ProblemError> {
        if x.len() != self.dim {
            return Err(ProblemError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let residual = merit::natural_residual(&self, &x, 0.01)?;
        if !self.set.contains(&x, 1e-12)? || residual > KNOWN_SOLUTION_TOL {
            return Err(ProblemError::NotASolution { residual });
        }
        self.known_solutions.push(x);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn known_solutions(&self) -> &[DVector<f64>] {
        &self.known_solutions
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// `F(x)`.
    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        let out = (self.map)(x);
        debug_assert_eq!(out.len(), self.dim, "mapping changed output length");
        out
    }

    /// Analytic `∇F(x)` when one was supplied.
    pub fn jacobian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        self.jacobian.as_ref().map(|j| j(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_output_length() {
        let err = VIProblem::new("bad", 2, FeasibleSet::whole_space(2), |_x: &DVector<f64>| DVector::zeros(3)).unwrap_err();
        assert!(matches!(err, ProblemError::DimensionMismatch { expected: 2, got: 3 }));
    }

    #[test]
    fn rejects_false_solution() {
        let p = VIProblem::new("id", 2, FeasibleSet::whole_space(2), |x: &DVector<f64>| x.clone()).unwrap();
        assert!(p.clone().with_known_solution(DVector::zeros(2)).is_ok());
        assert!(matches!(
            p.with_known_solution(DVector::from_element(2, 1.0)),
            Err(ProblemError::NotASolution { .. })
        ));
    }
}
