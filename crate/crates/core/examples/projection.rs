use nalgebra::{DMatrix, DVector};
use visolve::sets::{project_polyhedron, FeasibleSet};

fn main() {
    let x = DVector::from_vec(vec![2.0, -3.0, 0.5]);

    let cube = FeasibleSet::boxed(DVector::zeros(3), DVector::from_element(3, 1.0)).unwrap();
    println!("box:        {:?}", cube.project(&x).unwrap().as_slice());

    // The simplex-like set x1 + x2 + x3 <= 1, x >= 0.
    let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
    let b = DVector::from_element(1, 1.0);
    let (y, cert) = project_polyhedron(&a, &b, Some(&DVector::zeros(3)), None, &x).unwrap();
    println!("polyhedron: {:.6?}", y.as_slice());
    println!("active rows {:?}, multipliers {:.6?}", cert.active_set, cert.multipliers.as_slice());
    println!("kkt {:.1e}, complementarity {:.1e}", cert.kkt_residual, cert.complementarity_residual);
}
