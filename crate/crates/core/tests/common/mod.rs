//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use proptest::test_runner::{Config, RngSeed};
use visolve::sets::FeasibleSet;
use visolve::qn::{QnState, UpdateOutcome};
use visolve::solvers::{inm_solve_observed, irqn_solve_observed, StepEvent};
use visolve::suite::rng::SuiteRng;
use visolve::{Branch, SolveReport, SolverConfig, VIProblem};

/// Property-test configuration with a fixed seed, so every run draws the
/// same cases.
pub fn fixed_cases(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed_1e55),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

pub fn random_vec(rng: &mut SuiteRng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.uniform(lo, hi)))
}

pub fn random_mat(rng: &mut SuiteRng, rows: usize, cols: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.uniform(lo, hi))
}

/// Row data `A y ≤ b` with a strictly feasible point, `1 ≤ m ≤ 6`, `n ≤ 6`.
pub struct RandomPolyhedron {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

pub fn random_polyhedron(seed: u64) -> RandomPolyhedron {
    let mut rng = SuiteRng::new(seed);
    let n = 1 + (rng.next_u64() % 6) as usize;
    let m = 1 + (rng.next_u64() % 6) as usize;
    let a = random_mat(&mut rng, m, n, -1.0, 1.0);
    let inside = random_vec(&mut rng, n, -1.0, 1.0);
    let slack = random_vec(&mut rng, m, 0.05, 1.0);
    let b = &a * inside + slack;
    RandomPolyhedron { a, b }
}

/// A random set of one of the supported kinds together with a point to
/// project, spread well outside the set.
pub fn random_case(seed: u64) -> (FeasibleSet, DVector<f64>) {
    let mut rng = SuiteRng::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = 1 + (rng.next_u64() % 6) as usize;
    let set = match rng.next_u64() % 4 {
        0 => FeasibleSet::whole_space(n),
        1 => {
            let lo = random_vec(&mut rng, n, -2.0, 0.0);
            let hi = &lo + random_vec(&mut rng, n, 0.0, 2.0);
            FeasibleSet::boxed(lo, hi).unwrap()
        }
        2 => {
            let p = random_polyhedron(seed);
            FeasibleSet::polyhedron(p.a, p.b, None, None).unwrap()
        }
        _ => {
            let p = random_polyhedron(seed);
            let k = p.a.ncols();
            let lo = DVector::from_element(k, -3.0);
            FeasibleSet::polyhedron(p.a, p.b, Some(lo), None).unwrap()
        }
    };
    let x = random_vec(&mut rng, set.dim(), -5.0, 5.0);
    (set, x)
}

/// Projection onto `{A y ≤ b}` by enumerating every subset of rows as the
/// active set, solving the equality-constrained least-squares problem and
/// keeping the nearest feasible candidate.
pub fn brute_force_projection(a: &DMatrix<f64>, b: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let m = a.nrows();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1 << m) {
        let rows: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let y = if rows.is_empty() {
            x.clone()
        } else {
            let a_s = DMatrix::from_fn(rows.len(), a.ncols(), |r, c| a[(rows[r], c)]);
            let b_s = DVector::from_iterator(rows.len(), rows.iter().map(|&r| b[r]));
            let gram = &a_s * a_s.transpose();
            let Some(lu) = gram.clone().full_piv_lu().try_inverse() else {
                continue;
            };
            if (&gram * &lu - DMatrix::identity(rows.len(), rows.len())).amax() > 1e-8 {
                continue;
            }
            let lambda = lu * (&a_s * x - b_s);
            x - a_s.transpose() * lambda
        };
        if (a * &y - b).max() > 1e-9 {
            continue;
        }
        let d = (&y - x).norm();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, y));
        }
    }
    best.expect("nonempty polyhedron").1
}

/// Solves the LCP `z ≥ 0, w = M z + q ≥ 0, zᵀw = 0` by trying every support.
pub fn lcp_enumerate(m: &DMatrix<f64>, q: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = q.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut z = DVector::zeros(n);
        if !idx.is_empty() {
            let m_ii = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
            let q_i = DVector::from_iterator(idx.len(), idx.iter().map(|&i| -q[i]));
            let Some(sol) = m_ii.lu().solve(&q_i) else {
                continue;
            };
            for (k, &i) in idx.iter().enumerate() {
                z[i] = sol[k];
            }
        }
        let w = m * &z + q;
        if z.min() >= -1e-12 && w.min() >= -1e-12 {
            out.push(z);
        }
    }
    out
}

/// Exact solution of the box VI with `φ(z) = M z + q` by trying every
/// assignment of each coordinate to its lower bound, upper bound or interior.
pub fn box_vi_enumerate(m: &DMatrix<f64>, q: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> Option<DVector<f64>> {
    let n = q.len();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut kinds = vec![0u8; n];
        let mut c = code;
        for k in kinds.iter_mut() {
            *k = (c % 3) as u8;
            c /= 3;
        }
        let mut z = DVector::zeros(n);
        for i in 0..n {
            z[i] = match kinds[i] {
                0 => lo[i],
                1 => hi[i],
                _ => 0.0,
            };
        }
        let free: Vec<usize> = (0..n).filter(|&i| kinds[i] == 2).collect();
        if !free.is_empty() {
            let rhs = -(q + m * &z);
            let m_ff = DMatrix::from_fn(free.len(), free.len(), |r, c| m[(free[r], free[c])]);
            let r_f = DVector::from_iterator(free.len(), free.iter().map(|&i| rhs[i]));
            let sol = m_ff.lu().solve(&r_f)?;
            for (k, &i) in free.iter().enumerate() {
                z[i] = sol[k];
            }
        }
        let w = m * &z + q;
        let ok = (0..n).all(|i| match kinds[i] {
            0 => w[i] >= -1e-12,
            1 => w[i] <= 1e-12,
            _ => z[i] >= lo[i] - 1e-12 && z[i] <= hi[i] + 1e-12,
        });
        if ok {
            return Some(z);
        }
    }
    None
}

/// What one solver run looked like from the outside.
pub struct Trace {
    pub report: SolveReport,
    pub events: Vec<Event>,
}

pub struct Event {
    pub x: DVector<f64>,
    pub z: DVector<f64>,
    pub x_next: DVector<f64>,
    pub branch: Branch,
    pub mu: f64,
    pub rho_hat: f64,
    pub line_search_m: Option<usize>,
    pub gap_x: f64,
    pub gap_z: Option<f64>,
}

fn record(events: &mut Vec<Event>, ev: &StepEvent<'_>) {
    events.push(Event {
        x: ev.x.clone(),
        z: ev.z.clone(),
        x_next: ev.x_next.clone(),
        branch: ev.branch,
        mu: ev.mu,
        rho_hat: ev.rho_hat,
        line_search_m: ev.line_search_m,
        gap_x: ev.gap_x,
        gap_z: ev.gap_z,
    });
}

pub fn trace_irqn(problem: &VIProblem, x0: &DVector<f64>, cfg: &SolverConfig) -> Trace {
    let mut events = Vec::new();
    let report = irqn_solve_observed(problem, x0, cfg, |ev| record(&mut events, ev)).unwrap();
    Trace { report, events }
}

pub fn trace_inm(problem: &VIProblem, x0: &DVector<f64>, cfg: &SolverConfig) -> Trace {
    let mut events = Vec::new();
    let report = inm_solve_observed(problem, x0, cfg, Default::default(), |ev| record(&mut events, ev)).unwrap();
    Trace { report, events }
}

/// Largest increase of the distance to any of `solutions` over an iteration
/// that ended in a hyperplane projection.
pub fn worst_fejer_violation(trace: &Trace, solutions: &[DVector<f64>]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for ev in &trace.events {
        if !matches!(ev.branch, Branch::Hyperplane | Branch::LineSearchHyperplane) {
            continue;
        }
        for s in solutions {
            worst = worst.max((&ev.x_next - s).norm() - (&ev.x - s).norm());
        }
    }
    worst
}

/// Checks that every reported backtracking index is the first one passing the
/// sufficient-decrease test. Returns the number of searches checked.
pub fn check_line_search_minimality(problem: &VIProblem, trace: &Trace, cfg: &SolverConfig) -> Result<usize, String> {
    let mut checked = 0;
    for ev in &trace.events {
        let Some(m) = ev.line_search_m else { continue };
        let d = &ev.z - &ev.x;
        let target = cfg.lambda * (1.0 - ev.rho_hat) * ev.mu * d.norm_squared();
        let passes = |j: usize| {
            let y = &ev.x + &d * cfg.beta.powi(j as i32);
            -problem.eval(&y).dot(&d) >= target
        };
        if !passes(m) {
            return Err(format!("m = {m} does not satisfy the test"));
        }
        if let Some(j) = (0..m).find(|&j| passes(j)) {
            return Err(format!("m = {m} reported but {j} already passes"));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Share of UnitStep iterations among those started at residual ≤ `level`.
pub fn unit_share_below(report: &SolveReport, level: f64) -> Option<f64> {
    let tail: Vec<_> = report
        .history
        .iter()
        .skip_while(|r| r.res > level)
        .filter(|r| r.branch != Branch::Terminal)
        .collect();
    if tail.is_empty() {
        return None;
    }
    let unit = tail.iter().filter(|r| r.branch == Branch::UnitStep).count();
    Some(unit as f64 / tail.len() as f64)
}

/// The known solution nearest to where a run ended. For a monotone mapping
/// every solution would do, but ex8 is not monotone and a run can move away
/// from the solution it does not approach.
pub fn nearest_known_solution(p: &VIProblem, x: &DVector<f64>) -> Option<DVector<f64>> {
    let dist = |s: &DVector<f64>| (s - x).norm();
    p.known_solutions().iter().min_by(|a, b| dist(a).total_cmp(&dist(b))).cloned()
}

fn random_spd(rng: &mut SuiteRng, n: usize) -> DMatrix<f64> {
    let g = random_mat(rng, n, n, -1.0, 1.0);
    &g * g.transpose() + DMatrix::identity(n, n) * 0.1
}

/// Random cautious updates on SPD matrices with `n ≤ 10`, alternating plain
/// and self-scaled. Checks positive definiteness after every update, the
/// secant equation `B⁺s = y` when the update is applied and the curvature
/// threshold when it is skipped. Returns the applied counts (plain, scaled).
pub fn random_bfgs_checks(seed: u64, rounds: usize) -> Result<[usize; 2], String> {
    let mut rng = SuiteRng::new(seed);
    let mut applied = [0usize; 2];
    for round in 0..rounds {
        let n = 1 + round % 10;
        let scaled = round % 2 == 1;
        let mut q = QnState::from_matrix(random_spd(&mut rng, n));
        let s = random_vec(&mut rng, n, -1.0, 1.0);
        // Every seventh pair has negative curvature and must be skipped.
        let mut y = random_spd(&mut rng, n) * &s;
        if round % 7 == 0 {
            y = -y;
        }
        let (h, mu, r) = (1e-5, rng.uniform(1e-6, 1.0), 1.0);
        let outcome = if scaled {
            q.scaled_cautious_update(&s, &y, h, mu, r)
        } else {
            q.cautious_bfgs_update(&s, &y, h, mu, r)
        }
        .map_err(|e| format!("round {round}: {e}"))?;
        let b = q.matrix();
        let min_eig = b.clone().symmetric_eigenvalues().min();
        if min_eig <= 0.0 {
            return Err(format!("round {round}: smallest eigenvalue {min_eig:e}"));
        }
        if outcome == UpdateOutcome::Updated {
            let secant = (b * &s - &y).norm();
            if secant > 1e-10 * (1.0 + y.norm()) {
                return Err(format!("round {round}: secant residual {secant:e}"));
            }
            applied[scaled as usize] += 1;
        } else if y.dot(&s) >= h * mu * s.norm_squared() {
            return Err(format!("round {round}: update skipped with sufficient curvature"));
        }
    }
    Ok(applied)
}

/// Maximum of `−⟨f, y − x⟩ − (α/2)‖y − x‖²` over a product grid on the box.
/// The maximand is a sum of one-variable terms, so the grid maximum is the
/// sum of the per-coordinate grid maxima.
pub fn grid_gap(f: &DVector<f64>, x: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>, alpha: f64) -> f64 {
    const POINTS: usize = 200_001;
    (0..x.len())
        .map(|i| {
            let h = (hi[i] - lo[i]) / (POINTS - 1) as f64;
            (0..POINTS)
                .map(|k| {
                    let d = lo[i] + h * k as f64 - x[i];
                    -f[i] * d - 0.5 * alpha * d * d
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}
