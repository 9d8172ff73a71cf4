//! A monotone nonlinear complementarity problem: find `x ≥ 0` with
//! `F(x) ≥ 0` and `xᵀF(x) = 0`, posed as a VI over the nonnegative orthant.

use nalgebra::{DMatrix, DVector};
use visolve::sets::FeasibleSet;
use visolve::solvers::irqn_solve;
use visolve::{SolverConfig, VIProblem};

fn main() {
    // Positive definite symmetric part plus a skew coupling, and a cubic term.
    let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, -1.0, 2.0, 1.0, 0.0, -1.0, 2.0]);
    let q = DVector::from_vec(vec![-1.0, 1.0, -2.0]);
    let (mf, mj) = (m.clone(), m);
    let p = VIProblem::new("ncp", 3, FeasibleSet::nonnegative_orthant(3), move |x: &DVector<f64>| {
        &mf * x + &q + x.map(|t| t.powi(3))
    })
    .unwrap()
    .with_jacobian(move |x: &DVector<f64>| &mj + DMatrix::from_diagonal(&x.map(|t| 3.0 * t * t)));

    let r = irqn_solve(&p, &DVector::from_element(3, 1.0), &SolverConfig::default()).unwrap();
    let f = p.eval(&r.final_x);
    println!("{} in {} iterations", r.status, r.iterations);
    println!("x    = {:.5?}", r.final_x.as_slice());
    println!("F(x) = {:.5?}", f.as_slice());
    println!("xᵀF  = {:.1e}", r.final_x.dot(&f));
}
