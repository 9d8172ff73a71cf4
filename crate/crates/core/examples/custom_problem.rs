//! A user-defined monotone VI over a polyhedron, with solver settings read
//! from the same key=value format the CLI accepts.

use nalgebra::{DMatrix, DVector};
use visolve::sets::FeasibleSet;
use visolve::solvers::irqn_solve;
use visolve::{SolverConfig, VIProblem};

const SETTINGS: &str = "
# tighter than the default
tol = 1e-7
max_iter = 500
";

fn main() {
    // Three suppliers with rising marginal costs share a demand of at least 6.
    let set = FeasibleSet::polyhedron(
        DMatrix::from_row_slice(1, 3, &[-1.0, -1.0, -1.0]),
        DVector::from_element(1, -6.0),
        Some(DVector::zeros(3)),
        Some(DVector::from_element(3, 4.0)),
    )
    .unwrap();
    let cost = |x: &DVector<f64>| DVector::from_vec(vec![1.0 + x[0].powi(3), 2.0 + x[1], 0.5 + 2.0 * x[2]]);
    let p = VIProblem::new("suppliers", 3, set, cost)
        .unwrap()
        .with_jacobian(|x: &DVector<f64>| DMatrix::from_diagonal(&DVector::from_vec(vec![3.0 * x[0] * x[0], 1.0, 2.0])));

    let cfg = SolverConfig::from_key_value(SETTINGS).unwrap();
    let r = irqn_solve(&p, &DVector::zeros(3), &cfg).unwrap();
    println!("{} in {} iterations, res {:.1e}", r.status, r.iterations, r.final_res);
    println!("shares   {:.4?}", r.final_x.as_slice());
    println!("marginal {:.4?}", p.eval(&r.final_x).as_slice());
}
