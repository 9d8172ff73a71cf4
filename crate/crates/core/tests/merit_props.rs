mod common;

use common::{grid_gap, random_mat, random_vec};
use nalgebra::DVector;
use proptest::prelude::*;
use visolve::merit::{evaluate, f_alpha};
use visolve::sets::FeasibleSet;
use visolve::suite::rng::SuiteRng;
use visolve::suite::{build_problem, entry_for, ProblemSpec, NAMES};
use visolve::VIProblem;

fn small_suite() -> Vec<VIProblem> {
    NAMES
        .iter()
        .map(|name| {
            let mut spec = ProblemSpec::new(*name);
            if entry_for(name).unwrap().fixed_n.is_none() {
                spec = spec.with_n(8);
            }
            build_problem(&spec).unwrap().problem
        })
        .collect()
}

#[test]
fn gap_is_nonnegative_on_feasible_samples() {
    let mut rng = SuiteRng::new(11);
    let problems = small_suite();
    let mut checked = 0;
    for p in &problems {
        for _ in 0..100 {
            let raw = random_vec(&mut rng, p.dim(), -10.0, 10.0);
            let x = p.set().project(&raw).unwrap();
            for alpha in [0.01, 1.0] {
                let m = evaluate(p, &x, alpha).unwrap();
                assert!(m.gap >= -1e-12, "{} gap {:e}", p.label(), m.gap);
                // f_α(x) ≥ (α/2)‖x − H_α(x)‖² = res²/(2α).
                let lower = m.residual * m.residual / (2.0 * alpha);
                assert!(m.gap >= lower * (1.0 - 1e-9) - 1e-12, "{}", p.label());
                checked += 1;
            }
        }
    }
    assert!(checked >= 1000);
}

#[test]
fn gap_vanishes_at_known_solutions() {
    for p in small_suite() {
        for star in p.known_solutions() {
            let m = evaluate(&p, star, 0.01).unwrap();
            assert!(m.gap <= 1e-10, "{}: {:e}", p.label(), m.gap);
            assert!(m.residual <= 1e-8, "{}: {:e}", p.label(), m.residual);
        }
    }
}

proptest! {
    #![proptest_config(common::fixed_cases(40))]

    #[test]
    fn gap_matches_grid_maximization(seed in any::<u64>(), n in 1usize..=3, alpha in 0.05f64..2.0) {
        let mut rng = SuiteRng::new(seed);
        let lo = random_vec(&mut rng, n, -2.0, 0.0);
        let hi = &lo + random_vec(&mut rng, n, 0.1, 2.0);
        let set = FeasibleSet::boxed(lo.clone(), hi.clone()).unwrap();
        let m = random_mat(&mut rng, n, n, -2.0, 2.0);
        let q = random_vec(&mut rng, n, -2.0, 2.0);
        let p = VIProblem::new("affine", n, set, move |x: &DVector<f64>| &m * x + &q).unwrap();
        let x = p.set().project(&random_vec(&mut rng, n, -3.0, 3.0)).unwrap();
        let exact = f_alpha(&p, &x, alpha).unwrap();
        let grid = grid_gap(&p.eval(&x), &x, &lo, &hi, alpha);
        prop_assert!((exact - grid).abs() <= 1e-6, "exact {exact} grid {grid}");
        prop_assert!(grid <= exact + 1e-12);
    }
}

#[test]
fn hand_value_on_unit_interval() {
    // F(x) = x − 2 on [0, 1], α = 1, x = 0.5: H = 1 and f = 1.5·0.5 − 0.125.
    let set = FeasibleSet::boxed(DVector::from_element(1, 0.0), DVector::from_element(1, 1.0)).unwrap();
    let p = VIProblem::new("shift", 1, set, |x: &DVector<f64>| x.add_scalar(-2.0)).unwrap();
    let m = evaluate(&p, &DVector::from_element(1, 0.5), 1.0).unwrap();
    assert_eq!(m.h_point[0], 1.0);
    assert!((m.gap - 0.625).abs() < 1e-15);
    assert!((m.residual - 0.5).abs() < 1e-15);
}
