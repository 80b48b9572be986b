#![allow(dead_code)]

use num_complex::Complex64;
use opcalc::linalg::identity;
use opcalc::{ComplexMatrix, HermitianOperator, SpectralMeasure};
use proptest::prelude::*;

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `Σ Φ(a, b, c) P_a T_1 P_b T_2 P_c` accumulated over explicit projections.
pub fn naive_triple(
    phi: impl Fn(f64, f64, f64) -> Complex64,
    e1: &SpectralMeasure,
    t1: &ComplexMatrix,
    e2: &SpectralMeasure,
    t2: &ComplexMatrix,
    e3: &SpectralMeasure,
) -> ComplexMatrix {
    let dim = e1.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for a in e1.atoms() {
        for b in e2.atoms() {
            for c in e3.atoms() {
                let term = a.projection() * t1 * b.projection() * t2 * c.projection();
                acc += term * phi(a.eigenvalue(), b.eigenvalue(), c.eigenvalue());
            }
        }
    }
    acc
}

/// `Σ Φ(a, b) P_a T P_b` over explicit projections.
pub fn naive_double(
    phi: impl Fn(f64, f64) -> Complex64,
    e1: &SpectralMeasure,
    t: &ComplexMatrix,
    e2: &SpectralMeasure,
) -> ComplexMatrix {
    let dim = e1.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for a in e1.atoms() {
        for b in e2.atoms() {
            acc += a.projection() * t * b.projection() * phi(a.eigenvalue(), b.eigenvalue());
        }
    }
    acc
}

/// `Σ c_k M^k` by Horner's rule on matrices.
pub fn matrix_polynomial(coefficients: &[f64], m: &ComplexMatrix) -> ComplexMatrix {
    let dim = m.nrows();
    coefficients
        .iter()
        .rev()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, &c| {
            acc * m + identity(dim) * re(c)
        })
}

/// `e^{iM}` by scaling and squaring with a 30-term Taylor series.
pub fn matrix_exp_i(m: &ComplexMatrix) -> ComplexMatrix {
    let dim = m.nrows();
    let norm = m.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    let squarings = norm.log2().ceil().max(0.0) as u32 + 1;
    let x = m * Complex64::new(0.0, 1.0 / 2f64.powi(squarings as i32));
    let mut term = identity(dim);
    let mut sum = identity(dim);
    for k in 1..30 {
        term = &term * &x * re(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Products of the operators for monomials `x^a y^b z^c` applied to
/// `A, B, C`: `A^a B^b C^c`.
pub fn monomial_product(
    exponents: [u32; 3],
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
) -> ComplexMatrix {
    let pow = |m: &ComplexMatrix, k: u32| (0..k).fold(identity(m.nrows()), |acc, _| acc * m);
    pow(a, exponents[0]) * pow(b, exponents[1]) * pow(c, exponents[2])
}

pub fn complex_matrix(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), r * c).prop_map(move |v| {
            ComplexMatrix::from_iterator(r, c, v.into_iter().map(|(x, y)| Complex64::new(x, y)))
        })
    })
}

pub fn square_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), dim * dim).prop_map(move |v| {
        ComplexMatrix::from_iterator(dim, dim, v.into_iter().map(|(x, y)| Complex64::new(x, y)))
    })
}

pub fn hermitian(dim: usize) -> impl Strategy<Value = HermitianOperator> {
    square_matrix(dim)
        .prop_map(|m| HermitianOperator::from_matrix((&m + m.adjoint()) * re(0.5)).unwrap())
}
