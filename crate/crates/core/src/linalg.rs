//! Dense complex linear algebra: Hermitian operators, finitely atomic
//! spectral measures, singular values and Schatten norms.
//!
//! Inner products are linear in the first slot and conjugate-linear in the
//! second, `(x, y) = Σ x_i conj(y_i)`, so the rank-one operator
//! `w ↦ (w, v) u` has entries `u_i conj(v_k)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Default width used to merge numerically coincident eigenvalues.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;

/// Singular values below this fraction of the largest one are treated as 0.
pub const SINGULAR_VALUE_CUTOFF: f64 = 1e-14;

const MAX_SWEEPS_PER_DIM: usize = 1000;

/// Builds a matrix from row-major entries, rejecting non-finite values.
pub fn matrix_from_row_major(
    rows: usize,
    cols: usize,
    entries: &[Complex64],
) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "matrix dimensions must be positive, got {rows}x{cols}"
        )));
    }
    if entries.len() != rows * cols {
        return Err(Error::EntryCount {
            expected: rows * cols,
            actual: entries.len(),
        });
    }
    let m = ComplexMatrix::from_row_slice(rows, cols, entries);
    check_finite(&m)?;
    Ok(m)
}

pub(crate) fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Largest entry modulus, `‖M‖_max`.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Tolerance for accepting a matrix as Hermitian.
pub fn hermitian_tol(m: &ComplexMatrix) -> f64 {
    1e-10 * max_abs(m).max(1.0)
}

/// Tolerance for projection and reconstruction identities at a given dimension.
pub fn projection_tol(dim: usize) -> f64 {
    1e-8 * dim as f64
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Accepts `m` if `‖M − M*‖_max` is within [`hermitian_tol`] and stores
    /// the exactly Hermitian part `(M + M*)/2`.
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        check_finite(&m)?;
        let adjoint = m.adjoint();
        let deviation = max_abs(&(&m - &adjoint));
        let tolerance = hermitian_tol(&m);
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let matrix = (&m + &adjoint).scale(0.5);
        Ok(Self { matrix })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self {
            matrix: ComplexMatrix::from_diagonal(&d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    /// Spectral measure with eigenvalues closer than `group_tol` merged.
    pub fn spectral_measure(&self, group_tol: f64) -> Result<SpectralMeasure> {
        spectral_measure(self, group_tol)
    }
}

/// Free-function form of [`HermitianOperator::from_matrix`].
pub fn hermitian_from_matrix(m: ComplexMatrix) -> Result<HermitianOperator> {
    HermitianOperator::from_matrix(m)
}

/// One atom `(λ, E({λ}))` of a finitely atomic spectral measure. The
/// projection is stored through an orthonormal basis `V` of its range,
/// `E({λ}) = V V*`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAtom {
    eigenvalue: f64,
    basis: ComplexMatrix,
}

impl SpectralAtom {
    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projection(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }
}

/// The spectral measure of a Hermitian operator on `C^dim`: atoms sorted by
/// strictly increasing eigenvalue whose projections resolve the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    dim: usize,
    atoms: Vec<SpectralAtom>,
    // all atom bases side by side, and the atom owning each column
    eigenbasis: ComplexMatrix,
    column_atom: Vec<usize>,
}

impl SpectralMeasure {
    /// Builds a measure from `(eigenvalue, orthonormal basis of the range)`
    /// pairs. Eigenvalues must be strictly increasing and the bases must
    /// together form an orthonormal basis of `C^dim`.
    pub fn from_atoms(dim: usize, atoms: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument(
                "spectral measure needs at least one atom".into(),
            ));
        }
        for w in atoms.windows(2) {
            if w[0].0.partial_cmp(&w[1].0) != Some(std::cmp::Ordering::Less) {
                return Err(Error::InvalidArgument(format!(
                    "eigenvalues must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for (lambda, basis) in &atoms {
            if !lambda.is_finite() {
                return Err(Error::InvalidArgument("eigenvalue is not finite".into()));
            }
            if basis.nrows() != dim || basis.ncols() == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "atom basis is {}x{}, expected {dim} rows and at least one column",
                    basis.nrows(),
                    basis.ncols()
                )));
            }
        }
        let measure = Self::assemble(
            dim,
            atoms
                .into_iter()
                .map(|(eigenvalue, basis)| SpectralAtom { eigenvalue, basis })
                .collect(),
        );
        if measure.eigenbasis.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "atom bases span {} columns, expected {dim}",
                measure.eigenbasis.ncols()
            )));
        }
        let gram = measure.eigenbasis.adjoint() * &measure.eigenbasis;
        let deviation = max_abs(&(gram - identity(dim)));
        if deviation > projection_tol(dim) {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: projection_tol(dim),
            });
        }
        Ok(measure)
    }

    fn assemble(dim: usize, atoms: Vec<SpectralAtom>) -> Self {
        let total: usize = atoms.iter().map(SpectralAtom::multiplicity).sum();
        let mut eigenbasis = ComplexMatrix::zeros(dim, total);
        let mut column_atom = Vec::with_capacity(total);
        let mut col = 0;
        for (idx, atom) in atoms.iter().enumerate() {
            let k = atom.multiplicity();
            eigenbasis.columns_mut(col, k).copy_from(&atom.basis);
            column_atom.extend(std::iter::repeat_n(idx, k));
            col += k;
        }
        Self {
            dim,
            atoms,
            eigenbasis,
            column_atom,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[SpectralAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.atoms.iter().map(SpectralAtom::eigenvalue).collect()
    }

    pub fn projections(&self) -> Vec<ComplexMatrix> {
        self.atoms.iter().map(SpectralAtom::projection).collect()
    }

    /// Unitary whose columns are the atom bases in atom order.
    pub fn eigenbasis(&self) -> &ComplexMatrix {
        &self.eigenbasis
    }

    /// Atom index of each column of [`Self::eigenbasis`].
    pub fn column_atoms(&self) -> &[usize] {
        &self.column_atom
    }

    /// `Σ λ_i P_i`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambdas = DVector::from_iterator(
            self.column_atom.len(),
            self.column_atom
                .iter()
                .map(|&a| Complex64::new(self.atoms[a].eigenvalue, 0.0)),
        );
        &self.eigenbasis * ComplexMatrix::from_diagonal(&lambdas) * self.eigenbasis.adjoint()
    }

    /// Checks idempotence, self-adjointness, mutual orthogonality and
    /// completeness of the projections, and reconstruction of `source` if
    /// given. Returns the largest violation found.
    pub fn invariant_violation(&self, source: Option<&HermitianOperator>) -> f64 {
        let projections = self.projections();
        let mut worst: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, p) in projections.iter().enumerate() {
            worst = worst.max(max_abs(&(p * p - p)));
            worst = worst.max(max_abs(&(p - p.adjoint())));
            for q in &projections[i + 1..] {
                worst = worst.max(max_abs(&(p * q)));
            }
            sum += p;
        }
        worst = worst.max(max_abs(&(sum - identity(self.dim))));
        if let Some(a) = source {
            worst = worst.max(max_abs(&(self.reconstruct() - a.matrix())));
        }
        worst
    }
}

/// Eigendecomposition of `a` with eigenvalues within `group_tol` of their
/// neighbour merged into one atom located at the group mean.
pub fn spectral_measure(a: &HermitianOperator, group_tol: f64) -> Result<SpectralMeasure> {
    if group_tol.is_nan() || group_tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "group_tol must be nonnegative, got {group_tol}"
        )));
    }
    let dim = a.dim();
    let eig = SymmetricEigen::try_new(
        a.matrix().clone(),
        f64::EPSILON,
        MAX_SWEEPS_PER_DIM * dim.max(1),
    )
    .ok_or(Error::EigensolverFailure)?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for &i in &order {
        let lambda = eig.eigenvalues[i];
        if !lambda.is_finite() {
            return Err(Error::EigensolverFailure);
        }
        match groups.last_mut() {
            Some(g) if lambda - prev <= group_tol => g.push(i),
            _ => groups.push(vec![i]),
        }
        prev = lambda;
    }

    let atoms = groups
        .into_iter()
        .map(|cols| {
            let eigenvalue =
                cols.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cols.len() as f64;
            let mut basis = ComplexMatrix::zeros(dim, cols.len());
            for (k, &i) in cols.iter().enumerate() {
                basis.set_column(k, &eig.eigenvectors.column(i));
            }
            SpectralAtom { eigenvalue, basis }
        })
        .collect();
    Ok(SpectralMeasure::assemble(dim, atoms))
}

/// Index `p ∈ [1, ∞]` of a Schatten–von Neumann norm. `∞` is its own variant
/// and is written `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenIndex {
    Finite(f64),
    Infinity,
}

impl SchattenIndex {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::InvalidSchattenIndex(p.to_string()))
        }
    }

    pub const ONE: Self = Self::Finite(1.0);
    pub const TWO: Self = Self::Finite(2.0);

    /// `p` as a float, with `∞` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, zero at `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(p) => 1.0 / p,
            Self::Infinity => 0.0,
        }
    }
}

impl fmt::Display for SchattenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(p) => write!(f, "{p}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for SchattenIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidSchattenIndex(t.to_string()))?;
                Self::new(p).map_err(|_| Error::InvalidSchattenIndex(t.to_string()))
            }
        }
    }
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.nrows().min(m.ncols());
    if n == 0 {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new_unordered(
        m.clone(),
        false,
        false,
        f64::EPSILON,
        MAX_SWEEPS_PER_DIM * n,
    )
    .ok_or(Error::SvdFailure)?;
    let mut values: Vec<f64> = svd.singular_values.iter().map(|s| s.abs()).collect();
    if values.iter().any(|s| !s.is_finite()) {
        return Err(Error::SvdFailure);
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `(Σ s_k^p)^{1/p}` for finite `p`, the largest singular value for `p = ∞`.
pub fn schatten_norm(m: &ComplexMatrix, p: SchattenIndex) -> Result<f64> {
    let s = singular_values(m)?;
    Ok(schatten_norm_from_singular_values(&s, p))
}

/// Schatten norm of a descending singular-value list.
pub fn schatten_norm_from_singular_values(s: &[f64], p: SchattenIndex) -> f64 {
    let top = match s.first() {
        Some(&t) if t > 0.0 => t,
        _ => return 0.0,
    };
    match p {
        SchattenIndex::Infinity => top,
        SchattenIndex::Finite(p) => {
            let cutoff = SINGULAR_VALUE_CUTOFF * top;
            // scaled by s_1 to keep s^p in range
            let sum: f64 = s
                .iter()
                .filter(|&&v| v > cutoff)
                .map(|&v| (v / top).powf(p))
                .sum();
            top * sum.powf(1.0 / p)
        }
    }
}

/// Number of singular values above the cutoff used by [`schatten_norm`].
pub fn numerical_rank(m: &ComplexMatrix) -> Result<usize> {
    let s = singular_values(m)?;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter()
        .filter(|&&v| v > SINGULAR_VALUE_CUTOFF * top)
        .count())
}

/// The operator `w ↦ (w, v) u`, entry `(i, k) = u_i conj(v_k)`.
pub fn rank_one(u: &ComplexVector, v: &ComplexVector) -> Result<ComplexMatrix> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "rank_one vectors have lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(u * v.adjoint())
}

/// The inner product `(x, y) = Σ x_i conj(y_i)`.
pub fn inner(x: &ComplexVector, y: &ComplexVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}
