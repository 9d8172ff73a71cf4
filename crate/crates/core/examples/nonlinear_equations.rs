//! With `C = Rⁿ` the variational inequality is the equation `F(x) = 0`.

use nalgebra::{DMatrix, DVector};
use visolve::sets::FeasibleSet;
use visolve::solvers::irqn_solve;
use visolve::{SolverConfig, VIProblem};

fn main() {
    let n = 50;
    // Tridiagonal linear part plus a componentwise sine.
    let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 3.0,
        1 => -1.0,
        _ => 0.0,
    });
    let b = DVector::from_element(n, 1.0);
    let p = VIProblem::new("tridiagonal + sin", n, FeasibleSet::whole_space(n), move |x: &DVector<f64>| {
        &a * x + x.map(f64::sin) - &b
    })
    .unwrap();

    let report = irqn_solve(&p, &DVector::from_element(n, 5.0), &SolverConfig::default()).unwrap();
    println!("{} in {} iterations", report.status, report.iterations);
    println!("‖F(x)‖ = {:.2e}", p.eval(&report.final_x).norm());
    println!("branches {:?}", report.branch_counts);
}
