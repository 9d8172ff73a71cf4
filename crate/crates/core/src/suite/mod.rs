//! The twelve-problem benchmark suite.
//!
//! | name | C | n |
//! |------|---|---|
//! | ex1, ex2 | Rⁿ | any |
//! | ex3, ex4 | Rⁿ₊ | any |
//! | ex5 | [0,1]ⁿ | any |
//! | ex6 | {Qx ≤ b} | any |
//! | ex7, ex8, ex9 | box | 4 |
//! | ex10, ex11, ex12 | polyhedron | 5 |

mod fd;
mod problems;
pub mod rng;

use std::fmt::Write as _;

use nalgebra::DVector;
use thiserror::Error;

use crate::problem::{ProblemError, VIProblem};
use crate::sets::ProjectionError;

pub use fd::{fd_jacobian, FdStep, NonFiniteEvaluation};
pub use problems::{ex3_matrix, random_matrix_suite, RandomData, RandomKind, EX12_REFERENCE};

/// Seed used by the randomized problems when none is given.
pub const DEFAULT_SEED: u64 = 1;

/// Nonlinearity weight used by ex4 and ex11 when none is given. At this value
/// (and any other) `(2, …, 2)` solves ex11 exactly.
pub const DEFAULT_RHO: f64 = 1.0;

pub const NAMES: [&str; 12] = [
    "ex1", "ex2", "ex3", "ex4", "ex5", "ex6", "ex7", "ex8", "ex9", "ex10", "ex11", "ex12",
];

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown problem {0:?}")]
    UnknownProblem(String),
    #[error("{name} does not accept n = {n}: {reason}")]
    BadDimension { name: String, n: usize, reason: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

impl From<ProjectionError> for SuiteError {
    fn from(e: ProjectionError) -> Self {
        SuiteError::Problem(e.into())
    }
}

/// Which instance to build.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    /// `None` selects the default dimension.
    pub n: Option<usize>,
    /// Only read by the randomized problems.
    pub seed: Option<u64>,
    /// Only read by ex4 and ex11.
    pub rho: Option<f64>,
}

impl ProblemSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            n: None,
            seed: None,
            rho: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct X0Choice {
    pub label: String,
    pub point: DVector<f64>,
}

/// A solution quoted only to limited precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub point: DVector<f64>,
    pub tol: f64,
}

/// A built instance with everything the harness reports about it.
#[derive(Debug, Clone)]
pub struct SuiteProblem {
    pub name: String,
    pub n: usize,
    /// Seed actually used, for randomized problems.
    pub seed: Option<u64>,
    pub rho: Option<f64>,
    pub problem: VIProblem,
    pub x0_choices: Vec<X0Choice>,
    /// The printed data was inconsistent and had to be completed.
    pub repaired: bool,
    pub reference: Option<Reference>,
}

impl SuiteProblem {
    pub fn x0(&self, label: &str) -> Option<&X0Choice> {
        self.x0_choices.iter().find(|c| c.label == label)
    }
}

pub(crate) struct Built {
    problem: VIProblem,
    x0: Vec<(String, DVector<f64>)>,
    repaired: bool,
    reference: Option<Reference>,
}

impl Built {
    fn new(problem: VIProblem, x0: Vec<(String, DVector<f64>)>) -> Self {
        Self {
            problem,
            x0,
            repaired: false,
            reference: None,
        }
    }

    fn repaired(mut self) -> Self {
        self.repaired = true;
        self
    }

    fn with_reference(mut self, point: DVector<f64>, tol: f64) -> Self {
        self.reference = Some(Reference { point, tol });
        self
    }
}

/// Static facts about one registry entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub name: &'static str,
    pub default_n: usize,
    /// `Some(n)` when the dimension is fixed.
    pub fixed_n: Option<usize>,
    pub randomized: bool,
    pub uses_rho: bool,
    pub description: &'static str,
}

pub const ENTRIES: [Entry; 12] = [
    entry("ex1", 100, None, false, false, "x - sin(x) = 0 on R^n"),
    entry("ex2", 100, None, false, false, "tridiag(-1,2,-1) x + exp(x) - 1 = 0 on R^n"),
    entry("ex3", 100, None, false, false, "degenerate LCP, upper-triangular M"),
    entry("ex4", 100, None, true, true, "NCP, rho*a*atan(x) + (A'A + B) x + q"),
    entry("ex5", 100, None, false, false, "box LCP on [0,1]^n, tridiag(-1,4,-1)"),
    entry("ex6", 5, None, true, false, "F = (ZZ' + S + D) x over {Qx <= b}"),
    entry("ex7", 4, Some(4), false, false, "Kojima-Shindo map on [-0.5,0.5]^4"),
    entry("ex8", 4, Some(4), false, false, "degenerate box VI on [0,5]^4"),
    entry("ex9", 4, Some(4), false, false, "nonlinear box VI on [-10,10]^4"),
    entry("ex10", 5, Some(5), false, false, "affine VI over two linear constraints"),
    entry("ex11", 5, Some(5), false, true, "Mx + rho*atan(x - 2) + q over 10 <= sum x <= 50"),
    entry("ex12", 5, Some(5), false, false, "Mx + D(x) + q over a 4-row polyhedron"),
];

const fn entry(
    name: &'static str,
    default_n: usize,
    fixed_n: Option<usize>,
    randomized: bool,
    uses_rho: bool,
    description: &'static str,
) -> Entry {
    Entry {
        name,
        default_n,
        fixed_n,
        randomized,
        uses_rho,
        description,
    }
}

pub fn entry_for(name: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.name == name)
}

pub fn build_problem(spec: &ProblemSpec) -> Result<SuiteProblem, SuiteError> {
    let entry = entry_for(&spec.name).ok_or_else(|| SuiteError::UnknownProblem(spec.name.clone()))?;
    let n = spec.n.unwrap_or(entry.default_n);
    let bad = |reason: &str| SuiteError::BadDimension {
        name: spec.name.clone(),
        n,
        reason: reason.to_string(),
    };
    match entry.fixed_n {
        Some(fixed) if fixed != n => return Err(bad(&format!("dimension is fixed at {fixed}"))),
        _ if n == 0 => return Err(bad("dimension must be positive")),
        _ => {}
    }
    let seed = entry.randomized.then(|| spec.seed.unwrap_or(DEFAULT_SEED));
    let rho = entry.uses_rho.then(|| spec.rho.unwrap_or(DEFAULT_RHO));
    let built = match entry.name {
        "ex1" => problems::ex1(n),
        "ex2" => problems::ex2(n),
        "ex3" => problems::ex3(n),
        "ex4" => problems::ex4(n, seed.unwrap_or(DEFAULT_SEED), rho.unwrap_or(DEFAULT_RHO)),
        "ex5" => problems::ex5(n),
        "ex6" => problems::ex6(n, seed.unwrap_or(DEFAULT_SEED)),
        "ex7" => problems::ex7(),
        "ex8" => problems::ex8(),
        "ex9" => problems::ex9(),
        "ex10" => problems::ex10(),
        "ex11" => problems::ex11(rho.unwrap_or(DEFAULT_RHO)),
        "ex12" => problems::ex12(),
        other => return Err(SuiteError::UnknownProblem(other.to_string())),
    }?;
    Ok(SuiteProblem {
        name: entry.name.to_string(),
        n,
        seed,
        rho,
        problem: built.problem,
        x0_choices: built
            .x0
            .into_iter()
            .map(|(label, point)| X0Choice { label, point })
            .collect(),
        repaired: built.repaired,
        reference: built.reference,
    })
}

fn fmt_point(x: &DVector<f64>) -> String {
    if x.len() > 6 {
        let nonzero: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| format!("x{}={v}", i + 1))
            .collect();
        return if nonzero.is_empty() {
            "0".to_string()
        } else {
            format!("0 except {}", nonzero.join(","))
        };
    }
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Human-readable registry listing, one block per problem at its default size.
pub fn render_list() -> Result<String, SuiteError> {
    let mut out = String::new();
    for e in ENTRIES.iter() {
        let p = build_problem(&ProblemSpec::new(e.name))?;
        let dims = match e.fixed_n {
            Some(n) => format!("n={n}"),
            None => format!("n={} (any)", e.default_n),
        };
        let _ = writeln!(out, "{:<5} {:<12} {}", e.name, dims, e.description);
        let labels: Vec<&str> = p.x0_choices.iter().map(|c| c.label.as_str()).collect();
        let _ = writeln!(out, "      x0: {}", labels.join(" "));
        let sols: Vec<String> = p.problem.known_solutions().iter().map(fmt_point).collect();
        if !sols.is_empty() {
            let _ = writeln!(out, "      known solution: {}", sols.join(" or "));
        }
        if let Some(r) = &p.reference {
            let _ = writeln!(out, "      reference solution: {} (+/- {})", fmt_point(&r.point), r.tol);
        }
        if let Some(seed) = p.seed {
            let _ = writeln!(out, "      seed: {seed} (default)");
        }
        if let Some(rho) = p.rho {
            let _ = writeln!(out, "      rho: {rho} (default)");
        }
        let _ = writeln!(out, "      repaired: {}", p.repaired);
    }
    Ok(out)
}
