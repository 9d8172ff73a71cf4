use nalgebra::DVector;
use visolve::merit::evaluate;
use visolve::sets::FeasibleSet;
use visolve::VIProblem;

fn main() {
    // F(x) = x - 2 on [0, 1]; the solution is x = 1.
    let set = FeasibleSet::boxed(DVector::from_element(1, 0.0), DVector::from_element(1, 1.0)).unwrap();
    let p = VIProblem::new("shift", 1, set, |x: &DVector<f64>| x.add_scalar(-2.0)).unwrap();

    for t in [0.0, 0.5, 0.9, 1.0] {
        let x = DVector::from_element(1, t);
        for alpha in [0.01, 1.0] {
            let m = evaluate(&p, &x, alpha).unwrap();
            println!("x = {t:<4} alpha = {alpha:<5} gap {:<10.4} residual {:.4}", m.gap, m.residual);
        }
    }
}
