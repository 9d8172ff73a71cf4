//! Dense dual active-set solver for strictly convex QPs
//!
//! ```text
//!     minimize    ½ yᵀ G y + cᵀ y
//!     subject to  aᵢᵀ y ≤ bᵢ,   i = 1..m
//! ```
//!
//! following Goldfarb and Idnani: start from the unconstrained minimizer and
//! add violated constraints one at a time, dropping constraints whose
//! multipliers would turn negative. Every intermediate point is optimal for
//! the constraints in the working set, so no feasible starting point is
//! needed and an empty feasible set is detected when a violated constraint
//! can be neither reached nor traded for a working constraint.

use nalgebra::{DMatrix, DVector};

use super::ProjectionError;

/// Largest `n` or `m` accepted by the dense solver.
pub const DENSE_LIMIT: usize = 512;

/// KKT data attesting that a QP solution (or projection) is optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct QpCertificate {
    /// One multiplier per constraint row, all nonnegative.
    pub multipliers: DVector<f64>,
    /// Rows in the final working set, in the order they were added.
    pub active_set: Vec<usize>,
    /// `‖G y + c + Aᵀλ‖∞ / (1 + ‖c‖∞)`.
    pub kkt_residual: f64,
    /// `maxᵢ |λᵢ (aᵢᵀy − bᵢ)| / (1 + ‖λ‖∞)`.
    pub complementarity_residual: f64,
    /// `maxᵢ (aᵢᵀy − bᵢ)₊`.
    pub primal_violation: f64,
}

impl QpCertificate {
    pub fn accepted(&self, tol: f64) -> bool {
        self.kkt_residual <= tol && self.complementarity_residual <= tol
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub y: DVector<f64>,
    pub certificate: QpCertificate,
    pub iterations: usize,
}

/// The working-set geometry in the metric of `G = L Lᵀ`.
struct Working {
    rows: Vec<usize>,
    lambda: Vec<f64>,
}

fn violation_tol(b: f64) -> f64 {
    1e-11 * (1.0 + b.abs())
}

/// Solves the QP with Hessian factor `chol_l` (lower triangular, `G = L Lᵀ`).
///
/// `hint` lists rows that were active in a previous, nearby solve; violated
/// rows from the hint are added before any other so the working set is rebuilt
/// in few steps. Among the remaining violated rows the lowest index is chosen,
/// which rules out cycling between equally violated rows.
pub fn solve_qp(
    g: &DMatrix<f64>,
    chol_l: &DMatrix<f64>,
    c: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    hint: &[usize],
) -> Result<QpSolution, ProjectionError> {
    let n = g.nrows();
    let m = a.nrows();
    if n > DENSE_LIMIT || m > DENSE_LIMIT {
        return Err(ProjectionError::TooLarge { n, m, limit: DENSE_LIMIT });
    }
    let solve_g = |v: &DVector<f64>| -> DVector<f64> {
        let w = chol_l.solve_lower_triangular(v).expect("nonsingular factor");
        chol_l.tr_solve_lower_triangular(&w).expect("nonsingular factor")
    };

    let mut y = -solve_g(c);
    let mut work = Working {
        rows: Vec::new(),
        lambda: Vec::new(),
    };
    let max_steps = 50 * (m + n) + 100;
    let mut steps = 0usize;

    loop {
        let slack = a * &y - b;
        let pick = hint
            .iter()
            .copied()
            .filter(|&i| i < m)
            .find(|&i| slack[i] > violation_tol(b[i]) && !work.rows.contains(&i))
            .or_else(|| (0..m).find(|&i| slack[i] > violation_tol(b[i]) && !work.rows.contains(&i)));
        let Some(p) = pick else { break };
        let ap = a.row(p).transpose();
        let mut lambda_p = 0.0;

        // Inner loop: move towards satisfying row p, dropping blocking rows.
        loop {
            steps += 1;
            if steps > max_steps {
                return Err(ProjectionError::CycleLimitExceeded { steps: max_steps });
            }
            let (z, r, dependent) = step_directions(chol_l, a, &work.rows, &ap);
            let full = if dependent {
                f64::INFINITY
            } else {
                let curvature = -ap.dot(&z);
                let viol = ap.dot(&y) - b[p];
                if curvature <= 0.0 {
                    f64::INFINITY
                } else {
                    (viol / curvature).max(0.0)
                }
            };
            let mut partial = f64::INFINITY;
            let mut drop_at = None;
            for (j, (&rj, &lj)) in r.iter().zip(&work.lambda).enumerate() {
                if rj > 1e-14 {
                    let t = lj / rj;
                    if t < partial {
                        partial = t;
                        drop_at = Some(j);
                    }
                }
            }
            if full.is_infinite() && partial.is_infinite() {
                return Err(ProjectionError::InfeasibleSet);
            }
            let t = full.min(partial);
            if full.is_finite() {
                y += &z * t;
            }
            for (lj, rj) in work.lambda.iter_mut().zip(r.iter()) {
                *lj = (*lj - t * rj).max(0.0);
            }
            lambda_p += t;
            if full <= partial {
                work.rows.push(p);
                work.lambda.push(lambda_p);
                break;
            }
            let j = drop_at.expect("finite partial step has a blocking row");
            work.rows.remove(j);
            work.lambda.remove(j);
        }
    }

    polish(chol_l, c, a, b, &mut y, &mut work);

    let mut multipliers = DVector::zeros(m);
    for (&row, &l) in work.rows.iter().zip(&work.lambda) {
        multipliers[row] = l;
    }
    let stationarity = g * &y + c + a.transpose() * &multipliers;
    let slack = a * &y - b;
    let complementarity = multipliers
        .iter()
        .zip(slack.iter())
        .map(|(l, s)| (l * s).abs())
        .fold(0.0, f64::max)
        / (1.0 + multipliers.amax());
    let primal = slack.iter().fold(0.0f64, |acc, s| acc.max(*s));
    Ok(QpSolution {
        y,
        certificate: QpCertificate {
            multipliers,
            active_set: work.rows,
            kkt_residual: stationarity.amax() / (1.0 + c.amax()),
            complementarity_residual: complementarity,
            primal_violation: primal,
        },
        iterations: steps,
    })
}

/// Primal direction `z = −H aₚ` and dual direction `r = N* aₚ` for the
/// working rows `N`, computed through `W = L⁻¹N` by least squares. The flag
/// is set when `aₚ` lies in the span of the working rows (`z = 0`).
fn step_directions(
    chol_l: &DMatrix<f64>,
    a: &DMatrix<f64>,
    rows: &[usize],
    ap: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>, bool) {
    let w = chol_l.solve_lower_triangular(ap).expect("nonsingular factor");
    if rows.is_empty() {
        let z = -chol_l.tr_solve_lower_triangular(&w).expect("nonsingular factor");
        return (z, DVector::zeros(0), w.norm() == 0.0);
    }
    let n = ap.len();
    let mut nmat = DMatrix::zeros(n, rows.len());
    for (j, &row) in rows.iter().enumerate() {
        nmat.set_column(j, &a.row(row).transpose());
    }
    let wmat = chol_l.solve_lower_triangular(&nmat).expect("nonsingular factor");
    let r = least_squares(&wmat, &w);
    let resid = &w - &wmat * &r;
    let dependent = resid.norm() <= 1e-11 * w.norm();
    let z = -chol_l.tr_solve_lower_triangular(&resid).expect("nonsingular factor");
    (z, r, dependent)
}

fn least_squares(w: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let qr = w.clone().qr();
    let qtb = qr.q().transpose() * rhs;
    let r = qr.r();
    r.solve_upper_triangular(&qtb)
        .unwrap_or_else(|| w.clone().svd(true, true).solve(rhs, 1e-14).expect("svd solve"))
}

/// Recomputes `y` and the working multipliers directly from the working set,
/// removing drift accumulated over many incremental steps.
fn polish(
    chol_l: &DMatrix<f64>,
    c: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    y: &mut DVector<f64>,
    work: &mut Working,
) {
    if work.rows.is_empty() {
        let v = chol_l.solve_lower_triangular(c).expect("nonsingular factor");
        *y = -chol_l.tr_solve_lower_triangular(&v).expect("nonsingular factor");
        return;
    }
    let n = y.len();
    let q = work.rows.len();
    let mut nmat = DMatrix::zeros(n, q);
    let mut bw = DVector::zeros(q);
    for (j, &row) in work.rows.iter().enumerate() {
        nmat.set_column(j, &a.row(row).transpose());
        bw[j] = b[row];
    }
    // Nᵀy = b_W and G y + c + N λ = 0 give (WᵀW) λ = −Wᵀ L⁻¹c − b_W.
    let wmat = chol_l.solve_lower_triangular(&nmat).expect("nonsingular factor");
    let lc = chol_l.solve_lower_triangular(c).expect("nonsingular factor");
    let gram = wmat.transpose() * &wmat;
    let rhs = -(wmat.transpose() * &lc) - bw;
    let Some(lambda) = gram.clone().cholesky().map(|ch| ch.solve(&rhs)) else {
        return;
    };
    if lambda.iter().any(|l| *l < -1e-9 * (1.0 + lambda.amax())) {
        return;
    }
    let v = -(lc + &wmat * &lambda);
    let candidate = chol_l.tr_solve_lower_triangular(&v).expect("nonsingular factor");
    let drift_before = (a * &*y - b).iter().fold(0.0f64, |acc, s| acc.max(*s));
    let drift_after = (a * &candidate - b).iter().fold(0.0f64, |acc, s| acc.max(*s));
    if drift_after <= drift_before.max(1e-12) {
        *y = candidate;
        work.lambda = lambda.iter().map(|l| l.max(0.0)).collect();
    }
}
