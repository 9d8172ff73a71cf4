//! Batch runs over the suite, CSV results and side-by-side comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io;
use std::time::Duration;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::config::SolverConfig;
use crate::report::{SolveReport, Status};
use crate::solvers::{inm_solve, irqn_solve, SolveError};
use crate::suite::{build_problem, ProblemSpec, SuiteError, SuiteProblem, X0Choice};

pub const CSV_HEADER: &str =
    "problem,n,x0,solver,iter,time_s,res,status,unit_steps,hyperplane_steps,linesearch_steps,seed,repaired";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("{problem} has no starting point {selector:?}")]
    UnknownX0 { problem: String, selector: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("rows do not line up: {0}")]
    KeyMismatch(String),
    #[error("unknown solver {0:?} (expected irqn, inm or both)")]
    UnknownSolver(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Irqn,
    Inm,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Irqn => "irqn",
            SolverKind::Inm => "inm",
        }
    }

    pub fn solve(
        &self,
        problem: &crate::VIProblem,
        x0: &nalgebra::DVector<f64>,
        cfg: &SolverConfig,
    ) -> Result<SolveReport, SolveError> {
        match self {
            SolverKind::Irqn => irqn_solve(problem, x0, cfg),
            SolverKind::Inm => inm_solve(problem, x0, cfg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Irqn,
    Inm,
    Both,
}

impl SolverChoice {
    /// INM first, matching the column order of the printed tables.
    pub fn kinds(&self) -> &'static [SolverKind] {
        match self {
            SolverChoice::Irqn => &[SolverKind::Irqn],
            SolverChoice::Inm => &[SolverKind::Inm],
            SolverChoice::Both => &[SolverKind::Inm, SolverKind::Irqn],
        }
    }
}

impl std::str::FromStr for SolverChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "irqn" => Ok(SolverChoice::Irqn),
            "inm" => Ok(SolverChoice::Inm),
            "both" => Ok(SolverChoice::Both),
            other => Err(BenchError::UnknownSolver(other.to_string())),
        }
    }
}

/// Which starting points of a problem to run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum X0Selection {
    All,
    /// A label such as `ones` or `(5,-1,1,1)`, or a zero-based index.
    One(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunItem {
    pub spec: ProblemSpec,
    pub x0: X0Selection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub items: Vec<RunItem>,
    pub solver: SolverChoice,
    pub config: SolverConfig,
    /// Timing repetitions; the reported time is their median.
    pub reps: usize,
}

impl RunRequest {
    pub fn new(items: Vec<RunItem>, solver: SolverChoice) -> Self {
        Self {
            items,
            solver,
            config: SolverConfig::default(),
            reps: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: String,
    pub n: usize,
    pub x0: String,
    pub solver: String,
    pub iter: usize,
    pub time_s: f64,
    pub res: f64,
    #[serde(serialize_with = "ser_status", deserialize_with = "de_status")]
    pub status: Status,
    pub unit_steps: usize,
    pub hyperplane_steps: usize,
    pub linesearch_steps: usize,
    pub seed: Option<u64>,
    pub repaired: bool,
}

fn ser_status<S: Serializer>(s: &Status, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(s.as_str())
}

fn de_status<'de, D: Deserializer<'de>>(de: D) -> Result<Status, D::Error> {
    let s = String::deserialize(de)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl ResultRow {
    /// Identity of the run, without the solver.
    pub fn case_key(&self) -> (String, usize, String, Option<u64>) {
        (self.problem.clone(), self.n, self.x0.clone(), self.seed)
    }
}

fn select_x0<'a>(p: &'a SuiteProblem, sel: &X0Selection) -> Result<Vec<&'a X0Choice>, BenchError> {
    match sel {
        X0Selection::All => Ok(p.x0_choices.iter().collect()),
        X0Selection::One(s) => {
            if let Some(c) = p.x0(s) {
                return Ok(vec![c]);
            }
            s.parse::<usize>()
                .ok()
                .and_then(|i| p.x0_choices.get(i))
                .map(|c| vec![c])
                .ok_or_else(|| BenchError::UnknownX0 {
                    problem: p.name.clone(),
                    selector: s.clone(),
                })
        }
    }
}

fn median(mut times: Vec<Duration>) -> Duration {
    times.sort();
    let mid = times.len() / 2;
    if times.len() % 2 == 1 {
        times[mid]
    } else {
        (times[mid - 1] + times[mid]) / 2
    }
}

/// Runs every (problem, x0, solver) combination in request order.
///
/// Non-convergence of any kind is recorded in the `status` column; only
/// harness problems (unknown names, bad configs) are errors.
pub fn run(request: &RunRequest) -> Result<Vec<ResultRow>, BenchError> {
    request.config.validate().map_err(SolveError::from)?;
    let reps = request.reps.max(1);
    let mut rows = Vec::new();
    for item in &request.items {
        let sp = build_problem(&item.spec)?;
        for choice in select_x0(&sp, &item.x0)? {
            for kind in request.solver.kinds() {
                let report = kind.solve(&sp.problem, &choice.point, &request.config)?;
                let mut times = vec![report.wall_time];
                for _ in 1..reps {
                    times.push(kind.solve(&sp.problem, &choice.point, &request.config)?.wall_time);
                }
                log::info!(
                    "{} n={} x0={} {}: {} after {} iterations, res {:e}",
                    sp.name,
                    sp.n,
                    choice.label,
                    kind.as_str(),
                    report.status,
                    report.iterations,
                    report.final_res
                );
                rows.push(ResultRow {
                    problem: sp.name.clone(),
                    n: sp.n,
                    x0: choice.label.clone(),
                    solver: kind.as_str().to_string(),
                    iter: report.iterations,
                    time_s: median(times).as_secs_f64(),
                    res: report.final_res,
                    status: report.status,
                    unit_steps: report.branch_counts.unit_steps,
                    hyperplane_steps: report.branch_counts.hyperplane_steps,
                    linesearch_steps: report.branch_counts.linesearch_steps,
                    seed: sp.seed,
                    repaired: sp.repaired,
                });
            }
        }
    }
    Ok(rows)
}

/// Writes the header even when `rows` is empty.
pub fn write_csv<W: io::Write>(out: W, rows: &[ResultRow]) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<ResultRow>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(BenchError::KeyMismatch(format!("unexpected header {:?}", header.join(","))));
    }
    Ok(r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?)
}

type Key = (String, usize, String, Option<u64>, String);

#[derive(Debug, Clone, PartialEq)]
pub struct ComparedRow {
    pub a: ResultRow,
    pub b: ResultRow,
    /// `b` needed more than twice the iterations of `a`, or lost convergence.
    pub regression: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparedRow>,
}

impl Comparison {
    pub fn regressions(&self) -> usize {
        self.rows.iter().filter(|r| r.regression).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<6} {:>5} {:<22} | {:<5} {:>5} {:>9} {:>9} {:<19} | {:<5} {:>5} {:>9} {:>9} {:<19} |",
            "prob", "n", "x0", "A", "iter", "time", "res", "status", "B", "iter", "time", "res", "status"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<6} {:>5} {:<22} | {:<5} {:>5} {:>9.1e} {:>9.1e} {:<19} | {:<5} {:>5} {:>9.1e} {:>9.1e} {:<19} |{}",
                r.a.problem,
                r.a.n,
                r.a.x0,
                r.a.solver,
                r.a.iter,
                r.a.time_s,
                r.a.res,
                r.a.status.as_str(),
                r.b.solver,
                r.b.iter,
                r.b.time_s,
                r.b.res,
                r.b.status.as_str(),
                if r.regression { " REGRESSION" } else { "" }
            );
        }
        let _ = writeln!(out, "{} rows, {} regressions", self.rows.len(), self.regressions());
        out
    }
}

fn is_regression(a: &ResultRow, b: &ResultRow) -> bool {
    let lost = a.status == Status::Converged && b.status != Status::Converged;
    lost || b.iter as f64 > 2.0 * a.iter.max(1) as f64
}

fn keyed(rows: &[ResultRow], with_solver: bool, side: &str) -> Result<BTreeMap<Key, ResultRow>, BenchError> {
    let mut map = BTreeMap::new();
    for r in rows {
        let (p, n, x0, seed) = r.case_key();
        let key = (p, n, x0, seed, if with_solver { r.solver.clone() } else { String::new() });
        if map.insert(key, r.clone()).is_some() {
            return Err(BenchError::KeyMismatch(format!("duplicate row in {side}: {}", describe(r))));
        }
    }
    Ok(map)
}

fn describe(r: &ResultRow) -> String {
    let seed = r.seed.map(|s| format!(" seed={s}")).unwrap_or_default();
    format!("{} n={} x0={} solver={}{seed}", r.problem, r.n, r.x0, r.solver)
}

/// Aligns two result sets row by row.
///
/// When each side holds a single solver the solver is left out of the key,
/// so an INM file can be set against an IRQN file.
pub fn compare(a: &[ResultRow], b: &[ResultRow]) -> Result<Comparison, BenchError> {
    let solvers = |rows: &[ResultRow]| rows.iter().map(|r| r.solver.clone()).collect::<BTreeSet<_>>();
    let with_solver = solvers(a).len() > 1 || solvers(b).len() > 1;
    let ka = keyed(a, with_solver, "first file")?;
    let mut kb = keyed(b, with_solver, "second file")?;
    let mut rows = Vec::new();
    for (key, ra) in ka {
        let rb = kb
            .remove(&key)
            .ok_or_else(|| BenchError::KeyMismatch(format!("only in first file: {}", describe(&ra))))?;
        rows.push(ComparedRow {
            regression: is_regression(&ra, &rb),
            a: ra,
            b: rb,
        });
    }
    if let Some(extra) = kb.values().next() {
        return Err(BenchError::KeyMismatch(format!("only in second file: {}", describe(extra))));
    }
    Ok(Comparison { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(problem: &str, solver: &str, iter: usize, status: Status) -> ResultRow {
        ResultRow {
            problem: problem.into(),
            n: 4,
            x0: "(1,1,1,1)".into(),
            solver: solver.into(),
            iter,
            time_s: 1.25e-3,
            res: 3.0e-7,
            status,
            unit_steps: 3,
            hyperplane_steps: 1,
            linesearch_steps: 0,
            seed: None,
            repaired: false,
        }
    }

    #[test]
    fn empty_request_writes_header_only() {
        let rows = run(&RunRequest::new(vec![], SolverChoice::Both)).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trip() {
        let mut rows = vec![row("ex7", "irqn", 5, Status::Converged), row("ex8", "inm", 101, Status::MaxIterations)];
        rows[1].seed = Some(u64::MAX);
        rows[1].repaired = true;
        rows[1].x0 = "(-6,-6,-10,-1)".into();
        rows[1].res = 0.1 + 0.2;
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn identical_files_have_no_regressions() {
        let rows = vec![row("ex7", "irqn", 5, Status::Converged), row("ex7", "inm", 9, Status::Converged)];
        let c = compare(&rows, &rows).unwrap();
        assert_eq!(c.rows.len(), 2);
        assert_eq!(c.regressions(), 0);
    }

    #[test]
    fn flags_regressions_across_solvers() {
        let a = vec![row("ex11", "irqn", 17, Status::Converged)];
        let b = vec![row("ex11", "inm", 101, Status::MaxIterations)];
        let c = compare(&a, &b).unwrap();
        assert_eq!(c.regressions(), 1);
        assert!(c.render().contains("REGRESSION"));
    }

    #[test]
    fn extra_row_is_named() {
        let a = vec![row("ex7", "irqn", 5, Status::Converged)];
        let mut b = a.clone();
        b.push(row("ex8", "irqn", 5, Status::Converged));
        match compare(&a, &b) {
            Err(BenchError::KeyMismatch(msg)) => assert!(msg.contains("ex8"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_x0_is_a_harness_error() {
        let item = RunItem {
            spec: ProblemSpec::new("ex7"),
            x0: X0Selection::One("(9,9,9,9)".into()),
        };
        assert!(matches!(
            run(&RunRequest::new(vec![item], SolverChoice::Irqn)),
            Err(BenchError::UnknownX0 { .. })
        ));
    }

    #[test]
    fn median_of_even_count() {
        let ms = Duration::from_millis;
        assert_eq!(median(vec![ms(4), ms(1), ms(3), ms(2)]), Duration::from_micros(2500));
        assert_eq!(median(vec![ms(5)]), ms(5));
    }
}
