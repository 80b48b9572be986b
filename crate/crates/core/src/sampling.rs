//! Seeded random matrices and test functions.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, HermitianOperator, SpectralMeasure};
use crate::moi::{Symbol1, Symbol3};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20240501;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries `(x + iy)/√2` with `x, y` standard normal.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// The `Q` factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    complex_gaussian(dim, dim, rng).qr().q()
}

/// Random Hermitian matrix with independent Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = complex_gaussian(dim, dim, rng);
    HermitianOperator::from_matrix((&g + g.adjoint()).scale(0.5))
        .expect("symmetrized matrix is Hermitian")
}

/// `Q Λ Q*` with `Q` unitary and `Λ` holding `rank` nonzero entries drawn
/// uniformly from `(−1, 1)`.
pub fn random_rank_hermitian<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> HermitianOperator {
    let q = random_unitary(dim, rng);
    let lambdas = DVector::from_fn(dim, |i, _| {
        if i < rank.min(dim) {
            Complex64::new(rng.random_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = &q * ComplexMatrix::from_diagonal(&lambdas) * q.adjoint();
    HermitianOperator::from_matrix(m).expect("unitary conjugate of a real diagonal is Hermitian")
}

/// `X Y*` with `X`, `Y` complex Gaussian of inner dimension `rank`.
pub fn random_rank_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rank: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let x = complex_gaussian(rows, rank, rng);
    let y = complex_gaussian(cols, rank, rng);
    x * y.adjoint()
}

/// Spectral measure with between 1 and `max_atoms` atoms at distinct
/// integer-free random locations in `(−3, 3)`, eigenvectors from a random
/// unitary. Every atom receives at least one eigenvector.
pub fn random_spectral_measure<R: Rng + ?Sized>(
    dim: usize,
    max_atoms: usize,
    rng: &mut R,
) -> SpectralMeasure {
    let k = rng.random_range(1..=max_atoms.min(dim).max(1));
    let mut locations: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
    locations.sort_by(f64::total_cmp);
    locations.dedup();
    let k = locations.len();

    // column c belongs to atom owner[c]; the first k columns cover every atom
    let mut owner: Vec<usize> = (0..dim)
        .map(|c| if c < k { c } else { rng.random_range(0..k) })
        .collect();
    owner.sort_unstable();
    let u = random_unitary(dim, rng);
    let atoms = (0..k)
        .map(|a| {
            let cols: Vec<usize> = (0..dim).filter(|&c| owner[c] == a).collect();
            let mut basis = ComplexMatrix::zeros(dim, cols.len());
            for (i, &c) in cols.iter().enumerate() {
                basis.set_column(i, &u.column(c));
            }
            (locations[a], basis)
        })
        .collect();
    SpectralMeasure::from_atoms(dim, atoms).expect("columns of a unitary resolve the identity")
}

/// `Σ c_k t^k` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn random<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Self {
        Self {
            coefficients: (0..=degree).map(|_| rng.sample(StandardNormal)).collect(),
        }
    }
}

impl Symbol1 for Polynomial {
    fn eval(&self, t: f64) -> Complex64 {
        let v = self
            .coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c);
        Complex64::new(v, 0.0)
    }
}

/// `t ↦ e^{iωt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    pub frequency: f64,
}

impl Symbol1 for Oscillation {
    fn eval(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.frequency * t)
    }
}

/// Three-variable test functions used in perturbation checks.
#[derive(Debug, Clone, PartialEq)]
pub enum TripleTestFunction {
    /// `Σ c_{abc} x^a y^b z^c` over `a + b + c ≤ degree`
    Polynomial { terms: Vec<([u32; 3], f64)> },
    /// `e^{i(ω₁x + ω₂y + ω₃z)}`
    Plane { frequencies: [f64; 3] },
    /// `sin(x) cos(y) + z`
    SinCosPlusZ,
}

impl TripleTestFunction {
    pub fn random_polynomial<R: Rng + ?Sized>(degree: u32, rng: &mut R) -> Self {
        let mut terms = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    terms.push(([a, b, c], rng.sample(StandardNormal)));
                }
            }
        }
        Self::Polynomial { terms }
    }

    pub fn random_plane<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::Plane {
            frequencies: [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ],
        }
    }
}

impl Symbol3 for TripleTestFunction {
    fn eval(&self, x: f64, y: f64, z: f64) -> Complex64 {
        match self {
            Self::Polynomial { terms } => {
                let v: f64 = terms
                    .iter()
                    .map(|([a, b, c], coef)| {
                        coef * x.powi(*a as i32) * y.powi(*b as i32) * z.powi(*c as i32)
                    })
                    .sum();
                Complex64::new(v, 0.0)
            }
            Self::Plane { frequencies: w } => {
                Complex64::from_polar(1.0, w[0] * x + w[1] * y + w[2] * z)
            }
            Self::SinCosPlusZ => Complex64::new(x.sin() * y.cos() + z, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs, numerical_rank};

    #[test]
    fn same_seed_same_draws() {
        let a = complex_gaussian(3, 3, &mut seeded_rng(7));
        let b = complex_gaussian(3, 3, &mut seeded_rng(7));
        assert_eq!(a, b);
        assert_ne!(a, complex_gaussian(3, 3, &mut seeded_rng(8)));
    }

    #[test]
    fn unitary_and_rank_control() {
        let mut rng = seeded_rng(1);
        let u = random_unitary(6, &mut rng);
        assert!(max_abs(&(u.adjoint() * &u - identity(6))) < 1e-13);
        let h = random_rank_hermitian(8, 3, &mut rng);
        assert_eq!(numerical_rank(h.matrix()).unwrap(), 3);
        let m = random_rank_matrix(10, 7, 2, &mut rng);
        assert_eq!(numerical_rank(&m).unwrap(), 2);
    }

    #[test]
    fn random_measure_respects_atom_cap() {
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            let e = random_spectral_measure(6, 4, &mut rng);
            assert!(e.len() <= 4 && !e.is_empty());
            assert!(e.invariant_violation(None) < 1e-12);
        }
    }

    #[test]
    fn polynomial_horner() {
        let p = Polynomial {
            coefficients: vec![1.0, -2.0, 3.0],
        };
        assert_eq!(p.eval(2.0), Complex64::new(9.0, 0.0));
    }
}
