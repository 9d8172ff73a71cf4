//! Mappings, sets and starting points of the twelve test problems.

use nalgebra::{DMatrix, DVector};

use super::rng::SuiteRng;
use super::{Built, SuiteError};
use crate::problem::VIProblem;
use crate::sets::FeasibleSet;

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn tridiag(n: usize, lo: f64, diag: f64, up: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag
        } else if j + 1 == i {
            lo
        } else if i + 1 == j {
            up
        } else {
            0.0
        }
    })
}

fn affine(label: &str, set: FeasibleSet, m: DMatrix<f64>, q: DVector<f64>) -> Result<VIProblem, SuiteError> {
    let n = q.len();
    let jm = m.clone();
    Ok(VIProblem::new(label, n, set, move |x: &DVector<f64>| &m * x + &q)?.with_jacobian(move |_x: &DVector<f64>| jm.clone()))
}

pub(super) fn ex1(n: usize) -> Result<Built, SuiteError> {
    let p = VIProblem::new("ex1", n, FeasibleSet::whole_space(n), |x: &DVector<f64>| x - x.map(f64::sin))?
        .with_jacobian(|x: &DVector<f64>| DMatrix::from_diagonal(&x.map(|t| 1.0 - t.cos())))
        .with_known_solution(DVector::zeros(n))?;
    Ok(Built::new(p, vec![("ones".into(), DVector::from_element(n, 1.0))]))
}

pub(super) fn ex2(n: usize) -> Result<Built, SuiteError> {
    let a = tridiag(n, -1.0, 2.0, -1.0);
    let ja = a.clone();
    let p = VIProblem::new("ex2", n, FeasibleSet::whole_space(n), move |x: &DVector<f64>| {
        &a * x + x.map(|t| t.exp_m1())
    })?
    .with_jacobian(move |x: &DVector<f64>| &ja + DMatrix::from_diagonal(&x.map(f64::exp)))
    .with_known_solution(DVector::zeros(n))?;
    Ok(Built::new(p, vec![("ones".into(), DVector::from_element(n, 1.0))]))
}

/// Upper triangular: ones on the diagonal, twos above.
pub fn ex3_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => 2.0,
        std::cmp::Ordering::Greater => 0.0,
    })
}

pub(super) fn ex3(n: usize) -> Result<Built, SuiteError> {
    // Fᵢ = xᵢ + 2 Σ_{j>i} xⱼ − 1, evaluated with a running suffix sum.
    let p = VIProblem::new("ex3", n, FeasibleSet::nonnegative_orthant(n), |x: &DVector<f64>| {
        let mut out = DVector::zeros(x.len());
        let mut tail = 0.0;
        for i in (0..x.len()).rev() {
            out[i] = x[i] + 2.0 * tail - 1.0;
            tail += x[i];
        }
        out
    })?
    .with_jacobian(move |_x: &DVector<f64>| ex3_matrix(n));
    let mut star = DVector::zeros(n);
    star[n - 1] = 1.0;
    let p = p.with_known_solution(star)?;
    Ok(Built::new(p, vec![("ones".into(), DVector::from_element(n, 1.0))]))
}

/// Random data of the two generated problems.
#[derive(Debug, Clone, PartialEq)]
pub enum RandomData {
    Ex4 {
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        m: DMatrix<f64>,
        q: DVector<f64>,
        weights: DVector<f64>,
    },
    Ex6 {
        z: DMatrix<f64>,
        s: DMatrix<f64>,
        d: DVector<f64>,
        m: DMatrix<f64>,
        q_rows: DMatrix<f64>,
        b: DVector<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    Ex4,
    Ex6,
}

fn antisymmetric(rng: &mut SuiteRng, n: usize, half_width: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let t = rng.uniform(-half_width, half_width);
            a[(i, j)] = t;
            a[(j, i)] = -t;
        }
    }
    a
}

fn dense(rng: &mut SuiteRng, rows: usize, cols: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = rng.uniform(lo, hi);
        }
    }
    m
}

fn uniform_vec(rng: &mut SuiteRng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.uniform(lo, hi)))
}

/// Draws the data in a fixed order (documented in the README) from `seed`.
pub fn random_matrix_suite(seed: u64, n: usize, kind: RandomKind) -> RandomData {
    let mut rng = SuiteRng::new(seed);
    match kind {
        RandomKind::Ex4 => {
            let a = antisymmetric(&mut rng, n, 5.0);
            let b = antisymmetric(&mut rng, n, 5.0);
            let q = uniform_vec(&mut rng, n, -500.0, 500.0);
            let weights = uniform_vec(&mut rng, n, 0.0, 1.0);
            let m = a.transpose() * &a + &b;
            RandomData::Ex4 { a, b, m, q, weights }
        }
        RandomKind::Ex6 => {
            let z = dense(&mut rng, n, n, -5.0, 5.0);
            let s = antisymmetric(&mut rng, n, 5.0);
            let d = uniform_vec(&mut rng, n, 0.1, 1.0);
            let q_rows = dense(&mut rng, n, n, 0.0, 1.0);
            let b = uniform_vec(&mut rng, n, 0.0, 10.0);
            let m = &z * z.transpose() + &s + DMatrix::from_diagonal(&d);
            RandomData::Ex6 { z, s, d, m, q_rows, b }
        }
    }
}

pub(super) fn ex4(n: usize, seed: u64, rho: f64) -> Result<Built, SuiteError> {
    let RandomData::Ex4 { m, q, weights, .. } = random_matrix_suite(seed, n, RandomKind::Ex4) else {
        unreachable!()
    };
    let (jm, jw) = (m.clone(), weights.clone());
    let p = VIProblem::new("ex4", n, FeasibleSet::nonnegative_orthant(n), move |x: &DVector<f64>| {
        &m * x + &q + x.map(f64::atan).component_mul(&weights) * rho
    })?
    .with_jacobian(move |x: &DVector<f64>| {
        &jm + DMatrix::from_diagonal(&x.map(|t| 1.0 / (1.0 + t * t)).component_mul(&jw)) * rho
    });
    Ok(Built::new(p, vec![("ones".into(), DVector::from_element(n, 1.0))]))
}

pub(super) fn ex5(n: usize) -> Result<Built, SuiteError> {
    let set = FeasibleSet::boxed(DVector::zeros(n), DVector::from_element(n, 1.0))?;
    let p = affine("ex5", set, tridiag(n, -1.0, 4.0, -1.0), DVector::from_element(n, -1.0))?;
    Ok(Built::new(p, vec![("-ones".into(), DVector::from_element(n, -1.0))]))
}

pub(super) fn ex6(n: usize, seed: u64) -> Result<Built, SuiteError> {
    let RandomData::Ex6 { m, q_rows, b, .. } = random_matrix_suite(seed, n, RandomKind::Ex6) else {
        unreachable!()
    };
    let set = FeasibleSet::polyhedron(q_rows, b, None, None)?;
    // b ≥ 0 puts the origin in C, and F(0) = 0.
    let p = affine("ex6", set, m, DVector::zeros(n))?.with_known_solution(DVector::zeros(n))?;
    Ok(Built::new(p, vec![("ones".into(), DVector::from_element(n, 1.0))]))
}

fn labelled(points: &[&[f64]]) -> Vec<(String, DVector<f64>)> {
    points
        .iter()
        .map(|p| {
            let parts: Vec<String> = p.iter().map(|t| t.to_string()).collect();
            (format!("({})", parts.join(",")), v(p))
        })
        .collect()
}

pub(super) fn ex7() -> Result<Built, SuiteError> {
    let set = FeasibleSet::boxed(DVector::from_element(4, -0.5), DVector::from_element(4, 0.5))?;
    let p = VIProblem::new("ex7", 4, set, |x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        v(&[
            3.0 * a * a + 2.0 * a * b + 2.0 * b * b + c + 3.0 * d - 6.0,
            2.0 * a * a + a + b * b + 10.0 * c + 2.0 * d - 2.0,
            3.0 * a * a + a * b + 2.0 * b * b + 2.0 * c + 9.0 * d - 9.0,
            a * a + 3.0 * b * b + 2.0 * c + 3.0 * d - 3.0,
        ])
    })?
    .with_jacobian(|x: &DVector<f64>| {
        let (a, b) = (x[0], x[1]);
        DMatrix::from_row_slice(
            4,
            4,
            &[
                6.0 * a + 2.0 * b,
                2.0 * a + 4.0 * b,
                1.0,
                3.0,
                4.0 * a + 1.0,
                2.0 * b,
                10.0,
                2.0,
                6.0 * a + b,
                a + 4.0 * b,
                2.0,
                9.0,
                2.0 * a,
                6.0 * b,
                2.0,
                3.0,
            ],
        )
    });
    let x0 = labelled(&[
        &[5.0, -1.0, 1.0, 1.0],
        &[-1.0, -5.0, 0.0, -3.0],
        &[0.6, 4.0, 0.0, 8.0],
        &[1.0, -2.0, 0.7, 1.0],
        &[1.0, -6.0, 5.0, 3.0],
        &[-1.0, -1.0, -1.0, -1.0],
    ]);
    Ok(Built::new(p, x0))
}

/// The third component uses `x₂ + x₃`; with the printed `x₂ − x₃` neither
/// stated solution satisfies the third condition.
pub(super) fn ex8() -> Result<Built, SuiteError> {
    let set = FeasibleSet::boxed(DVector::zeros(4), DVector::from_element(4, 5.0))?;
    let p = VIProblem::new("ex8", 4, set, |x: &DVector<f64>| {
        v(&[
            x[0].powi(3) - 8.0,
            x[1] - x[2] + x[1].powi(3) + 3.0,
            x[1] + x[2] + 2.0 * x[2].powi(3) - 3.0,
            x[3] - 2.0 * x[3].powi(3),
        ])
    })?
    .with_jacobian(|x: &DVector<f64>| {
        let mut j = DMatrix::zeros(4, 4);
        j[(0, 0)] = 3.0 * x[0] * x[0];
        j[(1, 1)] = 1.0 + 3.0 * x[1] * x[1];
        j[(1, 2)] = -1.0;
        j[(2, 1)] = 1.0;
        j[(2, 2)] = 1.0 + 6.0 * x[2] * x[2];
        j[(3, 3)] = 1.0 - 6.0 * x[3] * x[3];
        j
    })
    .with_known_solution(v(&[2.0, 0.0, 1.0, 0.0]))?
    .with_known_solution(v(&[2.0, 0.0, 1.0, 5.0]))?;
    let x0 = labelled(&[&[1.0, 1.0, 1.0, 1.0], &[-1.0, -1.0, -1.0, -1.0], &[-6.0, -6.0, -10.0, -1.0]]);
    Ok(Built::new(p, x0).repaired())
}

pub(super) fn ex9() -> Result<Built, SuiteError> {
    let set = FeasibleSet::boxed(DVector::from_element(4, -10.0), DVector::from_element(4, 10.0))?;
    let p = VIProblem::new("ex9", 4, set, |x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        v(&[
            400.0 * a.powi(3) + 2.0 * a - 400.0 * a * b - 2.0,
            -200.0 * a * a + 200.2 * b + 19.8 * d - 40.0,
            360.0 * a.powi(3) + 2.0 * b - 360.0 * c * d - 2.0,
            19.8 * b - 180.0 * c * c + 220.2 * d * d - 40.0,
        ])
    })?
    .with_jacobian(|x: &DVector<f64>| {
        let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
        DMatrix::from_row_slice(
            4,
            4,
            &[
                1200.0 * a * a + 2.0 - 400.0 * b,
                -400.0 * a,
                0.0,
                0.0,
                -400.0 * a,
                200.2,
                0.0,
                19.8,
                1080.0 * a * a,
                2.0,
                -360.0 * d,
                -360.0 * c,
                0.0,
                19.8,
                -360.0 * c,
                440.4 * d,
            ],
        )
    });
    let x0 = labelled(&[&[3.0, 3.0, 3.0, 3.0], &[0.0, 0.0, 0.0, 0.0], &[1.0, 1.0, 1.0, 1.0]]);
    Ok(Built::new(p, x0))
}

/// The printed matrix has four rows; the fifth row `eₙᵀ` completes it.
pub(super) fn ex10() -> Result<Built, SuiteError> {
    let n = 5;
    let rows = DMatrix::from_row_slice(2, n, &[1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -2.0, -3.0, -4.0, -5.0]);
    let b = v(&[n as f64, -(n as f64 + 1.0)]);
    let lower = v(&[0.0, 0.0, 0.0, 0.0, f64::NEG_INFINITY]);
    let set = FeasibleSet::polyhedron(rows, b, Some(lower), None)?;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(5, 5, &[
        1.0, 0.0, 0.0, 0.0, 1.0,
        0.0, 1.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 0.0, 1.0,
    ]);
    let p = affine("ex10", set, m, v(&[-1.0, -1.0, -0.5, -0.5, -1.0]))?;
    let x0 = labelled(&[&[10.0, 0.0, 0.0, 0.0, 0.0], &[10.0, 0.0, 10.0, 0.0, 10.0], &[25.0, 0.0, 0.0, 0.0, 0.0]]);
    Ok(Built::new(p, x0).repaired())
}

#[rustfmt::skip]
const EX11_M: [f64; 25] = [
     0.726, -0.949,  0.266, -1.193, -0.504,
     1.645,  0.678,  0.333, -0.217, -1.443,
    -1.016, -0.225,  0.769,  0.934,  1.007,
     1.063,  0.567, -1.144,  0.550, -0.548,
    -0.259,  1.453, -1.073,  0.509,  1.026,
];
const EX11_Q: [f64; 5] = [5.308, 0.008, -0.938, 1.024, -1.312];

pub(super) fn ex11(rho: f64) -> Result<Built, SuiteError> {
    let rows = DMatrix::from_row_slice(2, 5, &[1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0]);
    let set = FeasibleSet::polyhedron(rows, v(&[50.0, -10.0]), Some(DVector::zeros(5)), None)?;
    let m = DMatrix::from_row_slice(5, 5, &EX11_M);
    let q = v(&EX11_Q);
    let jm = m.clone();
    let p = VIProblem::new("ex11", 5, set, move |x: &DVector<f64>| {
        &m * x + x.map(|t| (t - 2.0).atan()) * rho + &q
    })?
    .with_jacobian(move |x: &DVector<f64>| {
        &jm + DMatrix::from_diagonal(&x.map(|t| 1.0 / (1.0 + (t - 2.0) * (t - 2.0)))) * rho
    })
    .with_known_solution(DVector::from_element(5, 2.0))?;
    let x0 = labelled(&[
        &[25.0, 0.0, 0.0, 0.0, 0.0],
        &[10.0, 0.0, 10.0, 0.0, 10.0],
        &[0.0, 2.5, 2.5, 2.5, 2.5],
        &[10.0, 0.0, 0.0, 0.0, 0.0],
    ]);
    Ok(Built::new(p, x0))
}

/// Two-decimal solution quoted with the problem.
pub const EX12_REFERENCE: [f64; 5] = [9.08, 4.84, 0.0, 0.0, 5.0];

pub(super) fn ex12() -> Result<Built, SuiteError> {
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(4, 5, &[
         0.0,  0.0, -0.5,  0.0, -2.0,
        -2.0, -2.0,  0.0, -0.5, -2.0,
         2.0,  2.0, -4.0,  2.0, -3.0,
        -5.0,  3.0, -2.0,  0.0,  2.0,
    ]);
    let set = FeasibleSet::polyhedron(a, v(&[-10.0, -10.0, 13.0, 18.0]), Some(DVector::zeros(5)), None)?;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(5, 5, &[
         3.0, -4.0, -16.0, -15.0,  -4.0,
         4.0,  1.0,  -5.0, -10.0, -11.0,
        16.0,  5.0,   2.0, -11.0,  -7.0,
        15.0, 10.0,  11.0,   3.0, -10.0,
         4.0, 11.0,   7.0,  10.0,   1.0,
    ]);
    let c = v(&[0.004, 0.007, 0.005, 0.009, 0.008]);
    let q = v(&[-15.0, 10.0, -50.0, -30.0, -25.0]);
    let (jm, jc) = (m.clone(), c.clone());
    let p = VIProblem::new("ex12", 5, set, move |x: &DVector<f64>| {
        &m * x + x.map(|t| t.powi(4)).component_mul(&c) + &q
    })?
    .with_jacobian(move |x: &DVector<f64>| &jm + DMatrix::from_diagonal(&(x.map(|t| 4.0 * t.powi(3)).component_mul(&jc))));
    let x0 = labelled(&[&[0.0, 0.0, 100.0, 0.0, 0.0], &[10.0, 0.0, 10.0, 0.0, 10.0], &[0.0, 2.5, 2.5, 2.5, 2.5]]);
    Ok(Built::new(p, x0).with_reference(v(&EX12_REFERENCE), 5e-2))
}
