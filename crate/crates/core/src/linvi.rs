//! Inexact solver for the affine subproblem
//!
//! ```text
//! find z ∈ C:  ⟨φ(z), x − z⟩ ≥ 0  ∀x ∈ C,    φ(z) = q_base + M (z − anchor)
//! ```
//!
//! where `M = Bₖ + μₖI` has a positive definite symmetric part, so the
//! solution is unique. On the whole space this is one dense linear solve.
//! Otherwise the workhorse is the extragradient method with a Khobotov step
//! rule; when its observed linear rate cannot reach the tolerance within the
//! iteration budget it hands over to projected Gauss–Seidel (boxes) or to an
//! exact active-set QP solve (symmetric `M`).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::sets::{solve_qp, FeasibleSet, ProjectionError, Projector, DENSE_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinViError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("inner solver hit {iters} iterations with residual {residual:e}")]
    InnerMaxIterExceeded { iters: usize, residual: f64 },
    #[error("subproblem matrix has no positive definite symmetric part")]
    SingularSystem,
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// The affine operator `φ(z) = q_base + M (z − anchor)` over `set`.
#[derive(Debug, Clone)]
pub struct LinViSpec<'a> {
    pub m: DMatrix<f64>,
    pub q_base: DVector<f64>,
    pub anchor: DVector<f64>,
    pub set: &'a FeasibleSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerMethod {
    DirectSolve,
    Extragradient,
    GaussSeidel,
    ActiveSetQp,
}

#[derive(Debug, Clone)]
pub struct LinViResult {
    pub z: DVector<f64>,
    /// `e = z − P_C(z − φ(z))`.
    pub e: DVector<f64>,
    /// `φ(z)`, kept for the hyperplane construction.
    pub phi_z: DVector<f64>,
    pub inner_iters: usize,
    /// Whether both relative inexactness tests hold (as opposed to only the
    /// absolute fallback).
    pub satisfied_inexact: bool,
    pub method: InnerMethod,
}

/// Stopping levels for one subproblem solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerTolerances {
    pub rho_hat: f64,
    pub mu: f64,
    pub tol_abs: f64,
    pub max_iter: usize,
}

impl<'a> LinViSpec<'a> {
    pub fn new(
        m: DMatrix<f64>,
        q_base: DVector<f64>,
        anchor: DVector<f64>,
        set: &'a FeasibleSet,
    ) -> Result<Self, LinViError> {
        let n = set.dim();
        for got in [m.nrows(), m.ncols(), q_base.len(), anchor.len()] {
            if got != n {
                return Err(LinViError::DimensionMismatch { expected: n, got });
            }
        }
        Ok(Self { m, q_base, anchor, set })
    }

    pub fn phi(&self, z: &DVector<f64>) -> Result<DVector<f64>, LinViError> {
        if z.len() != self.anchor.len() {
            return Err(LinViError::DimensionMismatch {
                expected: self.anchor.len(),
                got: z.len(),
            });
        }
        Ok(self.phi_unchecked(z))
    }

    fn phi_unchecked(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.q_base + &self.m * (z - &self.anchor)
    }

    fn is_symmetric(&self) -> bool {
        let n = self.m.nrows();
        (0..n).all(|i| (0..i).all(|j| self.m[(i, j)] == self.m[(j, i)]))
    }
}

/// Both inexactness tests:
/// `‖e‖ ≤ ρ̂μ‖z − x‖` and `⟨e, φ(z) + z − x⟩ ≤ ρ̂μ‖z − x‖²`.
pub fn check_inexact(
    e: &DVector<f64>,
    phi_z: &DVector<f64>,
    z: &DVector<f64>,
    x: &DVector<f64>,
    rho_hat: f64,
    mu: f64,
) -> bool {
    let d = z - x;
    let dn = d.norm();
    let level = rho_hat * mu;
    e.norm() <= level * dn && e.dot(&(phi_z + &d)) <= level * dn * dn
}

/// Solves the subproblem from `z0` with a fresh projector.
pub fn solve_linvi(
    spec: &LinViSpec<'_>,
    z0: &DVector<f64>,
    rho_hat: f64,
    mu_k: f64,
    inner_tol_abs: f64,
    inner_max_iter: usize,
) -> Result<LinViResult, LinViError> {
    let tols = InnerTolerances {
        rho_hat,
        mu: mu_k,
        tol_abs: inner_tol_abs,
        max_iter: inner_max_iter,
    };
    solve_linvi_with(spec, &mut Projector::new(spec.set), z0, tols)
}

struct Evaluated {
    z: DVector<f64>,
    phi_z: DVector<f64>,
    e: DVector<f64>,
}

impl Evaluated {
    fn at(spec: &LinViSpec<'_>, proj: &mut Projector<'_>, z: DVector<f64>) -> Result<Self, LinViError> {
        let phi_z = spec.phi_unchecked(&z);
        let e = &z - proj.project(&(&z - &phi_z))?;
        Ok(Self { z, phi_z, e })
    }

    fn done(&self, spec: &LinViSpec<'_>, tols: &InnerTolerances) -> Option<bool> {
        if check_inexact(&self.e, &self.phi_z, &self.z, &spec.anchor, tols.rho_hat, tols.mu) {
            Some(true)
        } else if self.e.norm() <= tols.tol_abs {
            Some(false)
        } else {
            None
        }
    }

    fn finish(self, inner_iters: usize, satisfied_inexact: bool, method: InnerMethod) -> LinViResult {
        LinViResult {
            z: self.z,
            e: self.e,
            phi_z: self.phi_z,
            inner_iters,
            satisfied_inexact,
            method,
        }
    }
}

/// Solves the subproblem reusing `proj` (and its warm-start state).
pub fn solve_linvi_with(
    spec: &LinViSpec<'_>,
    proj: &mut Projector<'_>,
    z0: &DVector<f64>,
    tols: InnerTolerances,
) -> Result<LinViResult, LinViError> {
    let n = spec.anchor.len();
    if z0.len() != n {
        return Err(LinViError::DimensionMismatch {
            expected: n,
            got: z0.len(),
        });
    }
    if let FeasibleSet::WholeSpace { .. } = spec.set {
        return direct_solve(spec, proj, tols);
    }

    let z_start = proj.project(z0)?;
    let start = Evaluated::at(spec, proj, z_start)?;
    if let Some(sat) = start.done(spec, &tols) {
        return Ok(start.finish(0, sat, InnerMethod::Extragradient));
    }
    let (last, iters) = match extragradient(spec, proj, start, &tols)? {
        Ok(result) => return Ok(result),
        Err(stalled) => stalled,
    };
    log::debug!(
        "extragradient stalled after {iters} iterations at residual {:e}",
        last.e.norm()
    );

    let symmetric = spec.is_symmetric();
    if let FeasibleSet::Box(_) = spec.set {
        if let Some(result) = gauss_seidel(spec, proj, &last, &tols, iters)? {
            return Ok(result);
        }
    }
    if symmetric && n <= DENSE_LIMIT {
        if let Some(result) = exact_qp(spec, proj, &tols, iters)? {
            return Ok(result);
        }
    }
    Err(LinViError::InnerMaxIterExceeded {
        iters,
        residual: last.e.norm(),
    })
}

fn direct_solve(
    spec: &LinViSpec<'_>,
    proj: &mut Projector<'_>,
    tols: InnerTolerances,
) -> Result<LinViResult, LinViError> {
    let n = spec.anchor.len();
    let sym = (&spec.m + spec.m.transpose()) * 0.5 - DMatrix::identity(n, n) * 1e-14;
    if sym.cholesky().is_none() {
        return Err(LinViError::SingularSystem);
    }
    let step = spec
        .m
        .clone()
        .lu()
        .solve(&spec.q_base)
        .ok_or(LinViError::SingularSystem)?;
    let z = &spec.anchor - step;
    let ev = Evaluated::at(spec, proj, z)?;
    let sat = ev.done(spec, &tols).unwrap_or(false);
    Ok(ev.finish(1, sat, InnerMethod::DirectSolve))
}

const RATE_WINDOW: usize = 50;

/// Korpelevich iteration `z̄ = P(z − τφ(z))`, `z⁺ = P(z − τφ(z̄))`, shrinking
/// `τ` until `τ‖φ(z) − φ(z̄)‖ ≤ ν‖z − z̄‖` and growing it after easy steps.
///
/// Returns the stalled state instead of a result when the residual stops
/// improving or when the observed rate over the last window cannot reach the
/// absolute tolerance within the budget.
#[allow(clippy::type_complexity)]
fn extragradient(
    spec: &LinViSpec<'_>,
    proj: &mut Projector<'_>,
    start: Evaluated,
    tols: &InnerTolerances,
) -> Result<Result<LinViResult, (Evaluated, usize)>, LinViError> {
    const NU: f64 = 0.9;
    let m_inf = spec
        .m
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut tau = 1.0 / (1.0 + m_inf);
    let mut cur = start;
    let mut window_start = cur.e.norm();
    let mut iters = 0usize;

    while iters < tols.max_iter {
        let (zbar, phi_bar) = loop {
            let zbar = proj.project(&(&cur.z - &cur.phi_z * tau))?;
            let phi_bar = spec.phi_unchecked(&zbar);
            let dz = (&cur.z - &zbar).norm();
            let dphi = (&cur.phi_z - &phi_bar).norm();
            if tau * dphi <= NU * dz || dz == 0.0 {
                if tau * dphi <= 0.5 * NU * dz {
                    tau *= 1.25;
                }
                break (zbar, phi_bar);
            }
            tau *= 0.5;
        };
        let next = proj.project(&(&cur.z - &phi_bar * tau))?;
        let _ = zbar;
        cur = Evaluated::at(spec, proj, next)?;
        iters += 1;
        if let Some(sat) = cur.done(spec, tols) {
            return Ok(Ok(cur.finish(iters, sat, InnerMethod::Extragradient)));
        }
        if iters % RATE_WINDOW == 0 {
            let now = cur.e.norm();
            let ratio = now / window_start;
            if !(ratio < 1.0 - 1e-14) {
                return Ok(Err((cur, iters)));
            }
            let windows_needed = (tols.tol_abs / now).ln() / ratio.ln();
            if iters as f64 + windows_needed * RATE_WINDOW as f64 > tols.max_iter as f64 {
                return Ok(Err((cur, iters)));
            }
            window_start = now;
        }
    }
    Ok(Err((cur, iters)))
}

/// Symmetric projected Gauss–Seidel over a box: `zᵢ ← clamp(zᵢ − φᵢ(z)/Mᵢᵢ)`.
fn gauss_seidel(
    spec: &LinViSpec<'_>,
    proj: &mut Projector<'_>,
    from: &Evaluated,
    tols: &InnerTolerances,
    spent: usize,
) -> Result<Option<LinViResult>, LinViError> {
    let FeasibleSet::Box(bx) = spec.set else {
        return Ok(None);
    };
    let n = spec.anchor.len();
    if (0..n).any(|i| spec.m[(i, i)] <= 0.0) {
        return Ok(None);
    }
    let mut z = from.z.clone();
    let mut phi = spec.phi_unchecked(&z);
    let start_norm = from.e.norm();
    let sweeps = tols.max_iter.max(1);
    for sweep in 1..=sweeps {
        // Forward then backward, so triangular M is solved in one sweep.
        for i in (0..n).chain((0..n).rev()) {
            let zi = (z[i] - phi[i] / spec.m[(i, i)]).max(bx.lower()[i]).min(bx.upper()[i]);
            let delta = zi - z[i];
            if delta != 0.0 {
                z[i] = zi;
                phi.axpy(delta, &spec.m.column(i), 1.0);
            }
        }
        let ev = Evaluated::at(spec, proj, z.clone())?;
        if let Some(sat) = ev.done(spec, tols) {
            return Ok(Some(ev.finish(spent + sweep, sat, InnerMethod::GaussSeidel)));
        }
        let en = ev.e.norm();
        if !en.is_finite() || en > 1e6 * (1.0 + start_norm) {
            return Ok(None);
        }
        phi = ev.phi_z;
    }
    Ok(None)
}

/// With symmetric `M` the subproblem is the optimality condition of
/// `min ½ zᵀMz + (q_base − M·anchor)ᵀz` over `C`, solved exactly.
fn exact_qp(
    spec: &LinViSpec<'_>,
    proj: &mut Projector<'_>,
    tols: &InnerTolerances,
    spent: usize,
) -> Result<Option<LinViResult>, LinViError> {
    let n = spec.anchor.len();
    let Some(chol) = spec.m.clone().cholesky() else {
        return Ok(None);
    };
    let l = chol.l();
    let c = &spec.q_base - &spec.m * &spec.anchor;
    let (rows, rhs) = match spec.set {
        FeasibleSet::Polyhedron(p) => {
            let (r, b) = p.stacked();
            (r.clone(), b.clone())
        }
        FeasibleSet::Box(bx) => {
            let mut rows = Vec::new();
            for i in 0..n {
                if bx.lower()[i].is_finite() {
                    rows.push((i, -1.0, -bx.lower()[i]));
                }
                if bx.upper()[i].is_finite() {
                    rows.push((i, 1.0, bx.upper()[i]));
                }
            }
            let mut r = DMatrix::zeros(rows.len(), n);
            let mut b = DVector::zeros(rows.len());
            for (k, (i, sign, bound)) in rows.into_iter().enumerate() {
                r[(k, i)] = sign;
                b[k] = bound;
            }
            (r, b)
        }
        FeasibleSet::WholeSpace { .. } => return Ok(None),
    };
    let sol = match solve_qp(&spec.m, &l, &c, &rows, &rhs, &[]) {
        Ok(sol) => sol,
        Err(ProjectionError::CycleLimitExceeded { .. }) | Err(ProjectionError::TooLarge { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let z = proj.project(&sol.y)?;
    let ev = Evaluated::at(spec, proj, z)?;
    Ok(ev
        .done(spec, tols)
        .map(|sat| ev.finish(spent + sol.iterations, sat, InnerMethod::ActiveSetQp)))
}
