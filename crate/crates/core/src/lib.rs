//! Functional calculus for tuples of non-commuting self-adjoint matrices via
//! multiple operator integrals, Littlewood–Paley machinery for Besov-type
//! bounds, and an explicit family of triples on which Schatten-norm Lipschitz
//! estimates in terms of the `B¹_{∞,1}` norm blow up like `√N`.

pub mod besov;
pub mod bounds;
pub mod counterexample;
pub mod error;
pub mod linalg;
pub mod moi;
pub mod sampling;
pub mod selfcheck;

pub use error::{Error, Result};
pub use linalg::{
    hermitian_from_matrix, rank_one, schatten_norm, singular_values, spectral_measure,
    ComplexMatrix, ComplexVector, HermitianOperator, SchattenIndex, SpectralAtom, SpectralMeasure,
};
pub use moi::{Symbol1, Symbol2, Symbol3};
