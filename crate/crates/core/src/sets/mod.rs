//! Feasible sets and Euclidean projections onto them.

mod qp;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use qp::{solve_qp, QpCertificate, QpSolution, DENSE_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("feasible set is empty")]
    InfeasibleSet,
    #[error("active-set iteration cap of {steps} exceeded")]
    CycleLimitExceeded { steps: usize },
    #[error("dense QP limit exceeded: n={n}, m={m}, limit {limit}")]
    TooLarge { n: usize, m: usize, limit: usize },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("projection certificate rejected: kkt {kkt:e}, complementarity {comp:e}")]
    Uncertified { kkt: f64, comp: f64 },
}

/// Componentwise bounds `lower ≤ x ≤ upper`; infinite entries are allowed, so
/// the nonnegative orthant is `lower = 0, upper = +∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl BoxSet {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self, ProjectionError> {
        if lower.len() != upper.len() {
            return Err(ProjectionError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l.is_nan() || u.is_nan() || l > u) {
            return Err(ProjectionError::InvalidSet("box requires lower <= upper".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    pub fn clamp(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(v, (l, u))| v.max(*l).min(*u)),
        )
    }
}

/// `{x : A x ≤ b, lower ≤ x ≤ upper}` with optional bounds.
///
/// Bounds are stacked below `A` as extra rows (`−xᵢ ≤ −lᵢ`, then `xᵢ ≤ uᵢ`,
/// finite entries only), so certificates carry one multiplier per stacked row.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    a: DMatrix<f64>,
    b: DVector<f64>,
    lower: Option<DVector<f64>>,
    upper: Option<DVector<f64>>,
    rows: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl Polyhedron {
    /// Builds the set and checks it is nonempty by projecting the origin.
    pub fn new(
        a: DMatrix<f64>,
        b: DVector<f64>,
        lower: Option<DVector<f64>>,
        upper: Option<DVector<f64>>,
    ) -> Result<Self, ProjectionError> {
        let n = a.ncols();
        if a.nrows() != b.len() {
            return Err(ProjectionError::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        for bound in [&lower, &upper].into_iter().flatten() {
            if bound.len() != n {
                return Err(ProjectionError::DimensionMismatch {
                    expected: n,
                    got: bound.len(),
                });
            }
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if l.iter().zip(u.iter()).any(|(l, u)| l > u) {
                return Err(ProjectionError::InvalidSet("bounds require lower <= upper".into()));
            }
        }
        let mut stacked: Vec<(DVector<f64>, f64)> =
            (0..a.nrows()).map(|i| (a.row(i).transpose(), b[i])).collect();
        if let Some(l) = &lower {
            for (i, li) in l.iter().enumerate().filter(|(_, v)| v.is_finite()) {
                let mut row = DVector::zeros(n);
                row[i] = -1.0;
                stacked.push((row, -li));
            }
        }
        if let Some(u) = &upper {
            for (i, ui) in u.iter().enumerate().filter(|(_, v)| v.is_finite()) {
                let mut row = DVector::zeros(n);
                row[i] = 1.0;
                stacked.push((row, *ui));
            }
        }
        let mut rows = DMatrix::zeros(stacked.len(), n);
        let mut rhs = DVector::zeros(stacked.len());
        for (i, (row, bi)) in stacked.into_iter().enumerate() {
            rows.set_row(i, &row.transpose());
            rhs[i] = bi;
        }
        let poly = Self {
            a,
            b,
            lower,
            upper,
            rows,
            rhs,
        };
        poly.project_with_hint(&DVector::zeros(n), &[])?;
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn lower(&self) -> Option<&DVector<f64>> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&DVector<f64>> {
        self.upper.as_ref()
    }

    /// All constraints as stacked rows `R x ≤ r`.
    pub fn stacked(&self) -> (&DMatrix<f64>, &DVector<f64>) {
        (&self.rows, &self.rhs)
    }

    fn project_with_hint(
        &self,
        x: &DVector<f64>,
        hint: &[usize],
    ) -> Result<(DVector<f64>, QpCertificate), ProjectionError> {
        let n = self.dim();
        let eye = DMatrix::identity(n, n);
        let sol = solve_qp(&eye, &eye, &(-x), &self.rows, &self.rhs, hint)?;
        let cert = sol.certificate;
        if !cert.accepted(1e-8) {
            return Err(ProjectionError::Uncertified {
                kkt: cert.kkt_residual,
                comp: cert.complementarity_residual,
            });
        }
        Ok((sol.y, cert))
    }

    /// Projects `x` and returns the KKT certificate of the projection QP.
    pub fn project(&self, x: &DVector<f64>) -> Result<(DVector<f64>, QpCertificate), ProjectionError> {
        check_dim(self.dim(), x)?;
        self.project_with_hint(x, &[])
    }

    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        (&self.rows * x - &self.rhs).iter().fold(0.0f64, |acc, s| acc.max(*s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    WholeSpace { dim: usize },
    Box(BoxSet),
    Polyhedron(Polyhedron),
}

fn check_dim(expected: usize, x: &DVector<f64>) -> Result<(), ProjectionError> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(ProjectionError::DimensionMismatch {
            expected,
            got: x.len(),
        })
    }
}

impl FeasibleSet {
    pub fn whole_space(dim: usize) -> Self {
        FeasibleSet::WholeSpace { dim }
    }

    pub fn boxed(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self, ProjectionError> {
        Ok(FeasibleSet::Box(BoxSet::new(lower, upper)?))
    }

    pub fn nonnegative_orthant(dim: usize) -> Self {
        FeasibleSet::Box(BoxSet {
            lower: DVector::zeros(dim),
            upper: DVector::from_element(dim, f64::INFINITY),
        })
    }

    pub fn polyhedron(
        a: DMatrix<f64>,
        b: DVector<f64>,
        lower: Option<DVector<f64>>,
        upper: Option<DVector<f64>>,
    ) -> Result<Self, ProjectionError> {
        Ok(FeasibleSet::Polyhedron(Polyhedron::new(a, b, lower, upper)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::WholeSpace { dim } => *dim,
            FeasibleSet::Box(b) => b.lower.len(),
            FeasibleSet::Polyhedron(p) => p.dim(),
        }
    }

    /// `argmin_{y ∈ C} ‖y − x‖`.
    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>, ProjectionError> {
        Projector::new(self).project(x)
    }

    /// True iff no constraint is violated by more than `tol`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool, ProjectionError> {
        check_dim(self.dim(), x)?;
        Ok(match self {
            FeasibleSet::WholeSpace { .. } => x.iter().all(|v| !v.is_nan()),
            FeasibleSet::Box(b) => x
                .iter()
                .zip(b.lower.iter().zip(b.upper.iter()))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
            FeasibleSet::Polyhedron(p) => p.violation(x) <= tol,
        })
    }
}

/// Projection operator bound to one set, caching the last polyhedral active
/// set as a warm start for the next call. Owned by a single solve.
#[derive(Debug, Clone)]
pub struct Projector<'a> {
    set: &'a FeasibleSet,
    hint: Vec<usize>,
    calls: usize,
}

impl<'a> Projector<'a> {
    pub fn new(set: &'a FeasibleSet) -> Self {
        Self {
            set,
            hint: Vec::new(),
            calls: 0,
        }
    }

    pub fn set(&self) -> &'a FeasibleSet {
        self.set
    }

    /// Number of projections performed so far.
    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn project(&mut self, x: &DVector<f64>) -> Result<DVector<f64>, ProjectionError> {
        check_dim(self.set.dim(), x)?;
        self.calls += 1;
        match self.set {
            FeasibleSet::WholeSpace { .. } => Ok(x.clone()),
            FeasibleSet::Box(b) => Ok(b.clamp(x)),
            FeasibleSet::Polyhedron(p) => {
                let (y, cert) = p.project_with_hint(x, &self.hint)?;
                self.hint = cert.active_set;
                Ok(y)
            }
        }
    }
}

/// Projects `x` onto `{y : A y ≤ b, lower ≤ y ≤ upper}` and certifies the
/// result. Convenience wrapper that builds the polyhedron first.
pub fn project_polyhedron(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    lower: Option<&DVector<f64>>,
    upper: Option<&DVector<f64>>,
    x: &DVector<f64>,
) -> Result<(DVector<f64>, QpCertificate), ProjectionError> {
    let poly = Polyhedron::new(a.clone(), b.clone(), lower.cloned(), upper.cloned())?;
    poly.project(x)
}
