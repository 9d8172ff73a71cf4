//! Outer loops: the quasi-Newton method with merit-function unit steps and
//! the Newton baseline that always takes the hyperplane projection.

mod steps;

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::config::{InvalidConfig, SecantPair, SolverConfig};
use crate::linvi::{solve_linvi_with, InnerTolerances, LinViError, LinViSpec};
use crate::merit::{self, MeritEval};
use crate::problem::VIProblem;
use crate::qn::QnState;
use crate::report::{Branch, BranchCounts, IterationRecord, SolveReport, Status};
use crate::sets::{ProjectionError, Projector};
use crate::suite::{fd_jacobian, FdStep};

pub use steps::{hyperplane_step, hyperplane_step_with, line_search, LineSearchOutcome, StepError, ZERO_NORMAL};

/// Errors for unusable inputs. Algorithmic failures are reported through
/// [`SolveReport::status`] instead.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    InvalidConfig(#[from] InvalidConfig),
    #[error("starting point has length {got}, problem dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("starting point is not finite")]
    NonFiniteStart,
    #[error("problem has no analytic Jacobian and finite differences are disabled")]
    JacobianUnavailable,
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// `μₖ = scale · ‖xₖ − H_α(xₖ)‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSchedule {
    pub scale: f64,
    pub alpha: f64,
}

impl MuSchedule {
    pub fn from_config(cfg: &SolverConfig) -> Self {
        Self {
            scale: cfg.mu_scale,
            alpha: cfg.alpha,
        }
    }

    pub fn mu(&self, x: &DVector<f64>, h_point: &DVector<f64>) -> f64 {
        self.scale * (x - h_point).norm()
    }

    /// Same value from the natural residual `α‖x − H_α(x)‖`.
    pub fn from_residual(&self, res: f64) -> f64 {
        self.scale * res / self.alpha
    }
}

/// The hyperplane ingredients formed from an inexact subproblem solution.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneData {
    /// `yₖ = zₖ − eₖ`.
    pub y: DVector<f64>,
    /// `υₖ = F(yₖ) − φₖ(zₖ) + eₖ`.
    pub v: DVector<f64>,
    /// `εₖ = −υₖ − μₖ(yₖ − xₖ)`.
    pub eps_vec: DVector<f64>,
}

impl HyperplaneData {
    pub fn new(
        problem: &VIProblem,
        x: &DVector<f64>,
        z: &DVector<f64>,
        e: &DVector<f64>,
        phi_z: &DVector<f64>,
        mu: f64,
    ) -> Self {
        let y = z - e;
        let v = problem.eval(&y) - phi_z + e;
        let eps_vec = -&v - (&y - x) * mu;
        Self { y, v, eps_vec }
    }

    /// `‖εₖ‖ ≤ η μₖ ‖yₖ − xₖ‖`.
    pub fn accepts(&self, x: &DVector<f64>, eta: f64, mu: f64) -> bool {
        self.eps_vec.norm() <= eta * mu * (&self.y - x).norm()
    }
}

/// Where the Newton baseline takes its Jacobian from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobianSource {
    /// Analytic when available, forward differences otherwise.
    AnalyticOrFiniteDifference(FdStep),
    AnalyticOnly,
}

impl Default for JacobianSource {
    fn default() -> Self {
        JacobianSource::AnalyticOrFiniteDifference(FdStep::default())
    }
}

/// One completed outer iteration, handed to an observer.
#[derive(Debug, Clone)]
pub struct StepEvent<'a> {
    pub k: usize,
    pub x: &'a DVector<f64>,
    pub z: &'a DVector<f64>,
    pub x_next: &'a DVector<f64>,
    pub branch: Branch,
    pub mu: f64,
    pub rho_hat: f64,
    /// `f_α(xₖ)`.
    pub gap_x: f64,
    /// `f_α(zₖ)` when the unit-step test was evaluated.
    pub gap_z: Option<f64>,
    /// `mₖ` on the line-search branch.
    pub line_search_m: Option<usize>,
}

enum Model {
    Quasi(QnState),
    Newton(JacobianSource),
}

/// Inexact regularized quasi-Newton method.
pub fn irqn_solve(problem: &VIProblem, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    irqn_solve_observed(problem, x0, cfg, |_| {})
}

pub fn irqn_solve_observed<O>(
    problem: &VIProblem,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    observer: O,
) -> Result<SolveReport, SolveError>
where
    O: FnMut(&StepEvent<'_>),
{
    let model = Model::Quasi(QnState::identity(problem.dim()));
    run(problem, x0, cfg, model, observer)
}

/// Inexact Newton baseline: true Jacobian, no unit-step branch.
pub fn inm_solve(problem: &VIProblem, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    inm_solve_observed(problem, x0, cfg, JacobianSource::default(), |_| {})
}

pub fn inm_solve_observed<O>(
    problem: &VIProblem,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    source: JacobianSource,
    observer: O,
) -> Result<SolveReport, SolveError>
where
    O: FnMut(&StepEvent<'_>),
{
    if source == JacobianSource::AnalyticOnly && !problem.has_jacobian() {
        return Err(SolveError::JacobianUnavailable);
    }
    run(problem, x0, cfg, Model::Newton(source), observer)
}

struct Next {
    x: DVector<f64>,
    fx: DVector<f64>,
    branch: Branch,
    step_size: f64,
    gap_z: Option<f64>,
    line_search_m: Option<usize>,
    /// `F(z)` when it was evaluated for the merit test.
    fz: Option<DVector<f64>>,
}

fn run<O>(
    problem: &VIProblem,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    mut model: Model,
    mut observer: O,
) -> Result<SolveReport, SolveError>
where
    O: FnMut(&StepEvent<'_>),
{
    let started = Instant::now();
    cfg.validate()?;
    let n = problem.dim();
    if x0.len() != n {
        return Err(SolveError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFiniteStart);
    }

    let mu_rule = MuSchedule::from_config(cfg);
    let mut proj = Projector::new(problem.set());
    let mut x = proj.project(x0)?;
    let mut fx = problem.eval(&x);
    let mut history = Vec::new();
    let mut counts = BranchCounts::default();
    let mut k = 0usize;

    let finish = |status: Status,
                  k: usize,
                  x: DVector<f64>,
                  cur: &MeritEval,
                  mut history: Vec<IterationRecord>,
                  counts: BranchCounts| {
        history.push(IterationRecord {
            k,
            res: cur.residual,
            merit: cur.gap,
            branch: Branch::Terminal,
            step_size: 0.0,
            inner_iters: 0,
            mu: 0.0,
        });
        SolveReport {
            status,
            iterations: k,
            final_x: x,
            final_res: cur.residual,
            history,
            wall_time: started.elapsed(),
            branch_counts: counts,
        }
    };

    loop {
        let cur = match merit::evaluate_with(&mut proj, &x, &fx, cfg.alpha) {
            Ok(m) => m,
            Err(e) => {
                log::warn!("projection failed at iteration {k}: {e}");
                let fallback = MeritEval {
                    h_point: x.clone(),
                    gap: f64::NAN,
                    residual: f64::NAN,
                };
                return Ok(finish(Status::SubproblemFailure, k, x, &fallback, history, counts));
            }
        };
        if cur.residual <= cfg.tol {
            return Ok(finish(Status::Converged, k, x, &cur, history, counts));
        }
        if !cur.residual.is_finite() {
            return Ok(finish(Status::SubproblemFailure, k, x, &cur, history, counts));
        }
        if k >= cfg.max_iter {
            return Ok(finish(Status::MaxIterations, k, x, &cur, history, counts));
        }

        let mu = mu_rule.mu(&x, &cur.h_point);
        let rho_hat = cfg.rho.effective(k);
        let outcome = iterate(problem, cfg, &mut model, &mut proj, &x, &fx, &cur, mu, rho_hat);
        let (mut next, z, inner_iters) = match outcome {
            Ok(v) => v,
            Err(status) => return Ok(finish(status, k, x, &cur, history, counts)),
        };

        observer(&StepEvent {
            k,
            x: &x,
            z: &z,
            x_next: &next.x,
            branch: next.branch,
            mu,
            rho_hat,
            gap_x: cur.gap,
            gap_z: next.gap_z,
            line_search_m: next.line_search_m,
        });

        if let Model::Quasi(qn) = &mut model {
            let (s, y) = match (next.branch, cfg.qn_pair) {
                (Branch::UnitStep, _) | (_, SecantPair::Step) => (&next.x - &x, &next.fx - &fx),
                (_, SecantPair::Trial) => {
                    let fz = next.fz.take().unwrap_or_else(|| problem.eval(&z));
                    (&z - &x, fz - &fx)
                }
            };
            let updated = if cfg.qn_scaling {
                qn.scaled_cautious_update(&s, &y, cfg.h, mu, cfg.r_exp)
            } else {
                qn.cautious_bfgs_update(&s, &y, cfg.h, mu, cfg.r_exp)
            };
            if let Err(e) = updated {
                log::debug!("quasi-Newton update skipped at iteration {k}: {e}");
            }
        }

        counts.record(next.branch);
        history.push(IterationRecord {
            k,
            res: cur.residual,
            merit: cur.gap,
            branch: next.branch,
            step_size: next.step_size,
            inner_iters,
            mu,
        });
        x = next.x;
        fx = next.fx;
        k += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn iterate(
    problem: &VIProblem,
    cfg: &SolverConfig,
    model: &mut Model,
    proj: &mut Projector<'_>,
    x: &DVector<f64>,
    fx: &DVector<f64>,
    cur: &MeritEval,
    mu: f64,
    rho_hat: f64,
) -> Result<(Next, DVector<f64>, usize), Status> {
    let n = x.len();
    let b = match model {
        Model::Quasi(qn) => qn.matrix().clone(),
        Model::Newton(source) => newton_matrix(problem, x, *source).ok_or(Status::SubproblemFailure)?,
    };
    let m = b + DMatrix::identity(n, n) * mu;
    let spec = LinViSpec::new(m, fx.clone(), x.clone(), problem.set()).map_err(|_| Status::SubproblemFailure)?;
    let tols = InnerTolerances {
        rho_hat,
        mu,
        tol_abs: cfg.inner_tol_abs,
        max_iter: cfg.inner_max_iter,
    };
    let sub = solve_linvi_with(&spec, proj, x, tols).map_err(|e| {
        match &e {
            LinViError::InnerMaxIterExceeded { .. } | LinViError::SingularSystem => {
                log::debug!("subproblem failed: {e}")
            }
            _ => log::warn!("subproblem failed: {e}"),
        }
        Status::SubproblemFailure
    })?;
    let z = sub.z;
    if (&z - x).norm() <= 1e-14 * (1.0 + x.norm()) {
        return Err(Status::Stalled);
    }

    if matches!(model, Model::Quasi(_)) && cur.gap > 0.0 {
        let fz = problem.eval(&z);
        if let Ok(mz) = merit::evaluate_with(proj, &z, &fz, cfg.alpha) {
            if mz.gap <= cfg.gamma * cur.gap {
                let next = Next {
                    x: z.clone(),
                    fx: fz,
                    branch: Branch::UnitStep,
                    step_size: 1.0,
                    gap_z: Some(mz.gap),
                    line_search_m: None,
                    fz: None,
                };
                return Ok((next, z, sub.inner_iters));
            }
            return hyperplane_branch(problem, cfg, proj, x, &z, &sub.e, &sub.phi_z, mu, rho_hat, Some(mz.gap))
                .map(|next| (Next { fz: Some(fz), ..next }, z.clone(), sub.inner_iters));
        }
    }
    hyperplane_branch(problem, cfg, proj, x, &z, &sub.e, &sub.phi_z, mu, rho_hat, None)
        .map(|next| (next, z.clone(), sub.inner_iters))
}

#[allow(clippy::too_many_arguments)]
fn hyperplane_branch(
    problem: &VIProblem,
    cfg: &SolverConfig,
    proj: &mut Projector<'_>,
    x: &DVector<f64>,
    z: &DVector<f64>,
    e: &DVector<f64>,
    phi_z: &DVector<f64>,
    mu: f64,
    rho_hat: f64,
    gap_z: Option<f64>,
) -> Result<Next, Status> {
    let data = HyperplaneData::new(problem, x, z, e, phi_z, mu);
    if data.accepts(x, cfg.eta, mu) {
        match hyperplane_step_with(proj, x, &data.y, &data.v) {
            Ok(x_next) => {
                let fx_next = problem.eval(&x_next);
                return Ok(Next {
                    x: x_next,
                    fx: fx_next,
                    branch: Branch::Hyperplane,
                    step_size: 1.0,
                    gap_z,
                    line_search_m: None,
                    fz: None,
                });
            }
            Err(StepError::Projection(e)) => {
                log::warn!("hyperplane projection failed: {e}");
                return Err(Status::SubproblemFailure);
            }
            // Roundoff can leave the normal degenerate; backtracking is still valid.
            Err(e) => log::debug!("hyperplane step rejected, backtracking: {e}"),
        }
    }

    let ls = match line_search(problem, x, z, rho_hat, mu, cfg.lambda, cfg.beta, cfg.max_linesearch) {
        Ok(ls) => ls,
        Err(StepError::LineSearchExhausted { .. }) => return Err(Status::LineSearchExhausted),
        Err(_) => return Err(Status::Stalled),
    };
    let x_next = if ls.v.norm() <= ZERO_NORMAL {
        // F(y) = 0 with y ∈ C: y already solves the problem.
        ls.y.clone()
    } else {
        match hyperplane_step_with(proj, x, &ls.y, &ls.v) {
            Ok(p) => p,
            Err(StepError::Projection(e)) => {
                log::warn!("hyperplane projection failed: {e}");
                return Err(Status::SubproblemFailure);
            }
            Err(_) => return Err(Status::Stalled),
        }
    };
    let fx_next = problem.eval(&x_next);
    Ok(Next {
        x: x_next,
        fx: fx_next,
        branch: Branch::LineSearchHyperplane,
        step_size: ls.alpha,
        gap_z,
        line_search_m: Some(ls.m),
        fz: None,
    })
}

fn newton_matrix(problem: &VIProblem, x: &DVector<f64>, source: JacobianSource) -> Option<DMatrix<f64>> {
    if let Some(j) = problem.jacobian(x) {
        return Some(j);
    }
    match source {
        JacobianSource::AnalyticOnly => None,
        JacobianSource::AnalyticOrFiniteDifference(step) => match fd_jacobian(problem, x, step) {
            Ok(j) => Some(j),
            Err(e) => {
                log::warn!("finite-difference Jacobian failed: {e}");
                None
            }
        },
    }
}
