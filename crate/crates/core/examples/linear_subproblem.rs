use nalgebra::{DMatrix, DVector};
use visolve::linvi::{solve_linvi, LinViSpec};
use visolve::sets::FeasibleSet;

fn main() {
    // φ(z) = q + M z on [0, 1]², with a skew part in M.
    let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, -1.0, 2.0]);
    let q = DVector::from_vec(vec![-3.0, 0.5]);
    let set = FeasibleSet::boxed(DVector::zeros(2), DVector::from_element(2, 1.0)).unwrap();
    let anchor = DVector::zeros(2);
    let spec = LinViSpec::new(m, q, anchor.clone(), &set).unwrap();

    let out = solve_linvi(&spec, &anchor, 1e-8, 1.0, 1e-12, 10_000).unwrap();
    println!("z = {:.6?}", out.z.as_slice());
    println!("{:?}, {} inner iterations, ‖e‖ = {:.1e}", out.method, out.inner_iters, out.e.norm());
}
