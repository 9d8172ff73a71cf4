use nalgebra::DVector;
use visolve::solvers::{inm_solve_observed, irqn_solve_observed, StepEvent};
use visolve::suite::{build_problem, ProblemSpec};
use visolve::{Branch, SolverConfig};

fn describe(ev: &StepEvent<'_>) -> String {
    let tag = match ev.branch {
        Branch::UnitStep => "unit".to_string(),
        Branch::Hyperplane => "hyperplane".to_string(),
        Branch::LineSearchHyperplane => format!("line search m={}", ev.line_search_m.unwrap_or(0)),
        Branch::Terminal => "stop".to_string(),
    };
    format!("  k={:<3} gap {:.2e}  mu {:.2e}  {tag}", ev.k, ev.gap_x, ev.mu)
}

fn main() {
    let sp = build_problem(&ProblemSpec::new("ex1").with_n(100)).unwrap();
    let x0: &DVector<f64> = &sp.x0("ones").unwrap().point;
    let cfg = SolverConfig::default();

    println!("IRQN");
    let r = irqn_solve_observed(&sp.problem, x0, &cfg, |ev| println!("{}", describe(ev))).unwrap();
    println!("  {} after {} iterations, {} projections", r.status, r.iterations, r.branch_counts.projections());

    println!("INM");
    let r = inm_solve_observed(&sp.problem, x0, &cfg, Default::default(), |ev| println!("{}", describe(ev))).unwrap();
    println!("  {} after {} iterations, {} projections", r.status, r.iterations, r.branch_counts.projections());
}
