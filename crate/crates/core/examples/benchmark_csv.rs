use visolve::bench::{self, RunItem, RunRequest, SolverChoice, X0Selection};
use visolve::suite::ProblemSpec;

fn main() {
    let items = vec![
        RunItem { spec: ProblemSpec::new("ex2").with_n(50), x0: X0Selection::All },
        RunItem { spec: ProblemSpec::new("ex10"), x0: X0Selection::One("0".into()) },
    ];
    let request = RunRequest { reps: 1, ..RunRequest::new(items, SolverChoice::Both) };
    let rows = bench::run(&request).unwrap();

    let mut csv = Vec::new();
    bench::write_csv(&mut csv, &rows).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());

    // Comparing a run with itself can never flag a regression.
    println!();
    print!("{}", bench::compare(&rows, &rows).unwrap().render());
}
