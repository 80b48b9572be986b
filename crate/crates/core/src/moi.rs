//! Multiple operator integrals for finitely atomic spectral measures.
//!
//! For measures `E_1, …, E_m` with atoms `x^(i)_j` and operators
//! `T_1, …, T_{m-1}`, the integral of a symbol `Φ` is the finite sum
//!
//! ```text
//! Σ Φ(x^(1)_{j1}, …, x^(m)_{jm}) E_1({x^(1)_{j1}}) T_1 E_2({x^(2)_{j2}}) T_2 ⋯ E_m({x^(m)_{jm}})
//! ```
//!
//! which is defined for every function `Φ`. Functions of non-commuting tuples
//! are the special case `T_i = I`: `f(A, B, C) = Σ f(λ, μ, ν) E_A({λ}) E_B({μ}) E_C({ν})`.
//!
//! The sum is evaluated in the eigenbases of the measures: with `U_i` the
//! eigenbasis of `E_i` and `X_i = U_i* T_i U_{i+1}`, the result is
//! `U_1 R U_m*` where
//! `R[c_1, c_m] = Σ_{c_2…c_{m-1}} Φ(atoms of c_1…c_m) X_1[c_1, c_2] ⋯ X_{m-1}[c_{m-1}, c_m]`.
//! Every entry of `R` is accumulated sequentially in a fixed index order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    identity, ComplexMatrix, HermitianOperator, SpectralMeasure, DEFAULT_GROUP_TOL,
};

/// Scalar function of one real variable.
pub trait Symbol1 {
    fn eval(&self, x: f64) -> Complex64;
}

/// Scalar function of two real variables.
pub trait Symbol2 {
    fn eval(&self, x: f64, y: f64) -> Complex64;

    /// Values on the tensor grid `xs × ys`, row-major. Override when the
    /// symbol has structure that makes this cheaper than pointwise calls.
    fn eval_table(&self, xs: &[f64], ys: &[f64]) -> Vec<Complex64> {
        xs.iter()
            .flat_map(|&x| ys.iter().map(move |&y| self.eval(x, y)))
            .collect()
    }
}

/// Scalar function of three real variables.
pub trait Symbol3 {
    fn eval(&self, x: f64, y: f64, z: f64) -> Complex64;

    /// Values on the tensor grid `xs × ys × zs`, row-major.
    fn eval_table(&self, xs: &[f64], ys: &[f64], zs: &[f64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for &x in xs {
            for &y in ys {
                for &z in zs {
                    out.push(self.eval(x, y, z));
                }
            }
        }
        out
    }
}

impl<F: Fn(f64) -> Complex64> Symbol1 for F {
    fn eval(&self, x: f64) -> Complex64 {
        self(x)
    }
}

impl<F: Fn(f64, f64) -> Complex64> Symbol2 for F {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        self(x, y)
    }
}

impl<F: Fn(f64, f64, f64) -> Complex64> Symbol3 for F {
    fn eval(&self, x: f64, y: f64, z: f64) -> Complex64 {
        self(x, y, z)
    }
}

/// Value assigned to a divided difference on the diagonal `x = y`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DiagonalPolicy {
    #[default]
    Zero,
    Constant(Complex64),
    /// Central difference `(f(x+h) − f(x−h)) / 2h`.
    CentralDifference {
        step: f64,
    },
}

/// `(f(x) − f(y)) / (x − y)` off the diagonal, [`DiagonalPolicy`] on it.
#[derive(Debug, Clone, Copy)]
pub struct DividedDifference2<S> {
    pub base: S,
    pub diagonal: DiagonalPolicy,
}

impl<S: Symbol1> DividedDifference2<S> {
    pub fn new(base: S) -> Self {
        Self {
            base,
            diagonal: DiagonalPolicy::Zero,
        }
    }

    pub fn with_policy(base: S, diagonal: DiagonalPolicy) -> Self {
        Self { base, diagonal }
    }
}

impl<S: Symbol1> Symbol2 for DividedDifference2<S> {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        if x != y {
            return (self.base.eval(x) - self.base.eval(y)) / (x - y);
        }
        match self.diagonal {
            DiagonalPolicy::Zero => Complex64::new(0.0, 0.0),
            DiagonalPolicy::Constant(c) => c,
            DiagonalPolicy::CentralDifference { step } => {
                (self.base.eval(x + step) - self.base.eval(x - step)) / (2.0 * step)
            }
        }
    }
}

fn finite_or_err(z: Complex64, point: &[f64]) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFiniteSymbol(format!("{point:?}")))
    }
}

fn check_square(m: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_same_dim(ops: &[&HermitianOperator]) -> Result<usize> {
    let dim = ops[0].dim();
    if let Some(bad) = ops.iter().find(|o| o.dim() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "operators of dimension {dim} and {}",
            bad.dim()
        )));
    }
    Ok(dim)
}

/// Multiple operator integral of any order `m = measures.len() ≥ 1` with
/// `operators.len() = m − 1`. `symbol` receives one eigenvalue per measure.
pub fn operator_integral<F>(
    symbol: F,
    measures: &[&SpectralMeasure],
    operators: &[&ComplexMatrix],
) -> Result<ComplexMatrix>
where
    F: Fn(&[f64]) -> Complex64,
{
    validate_chain(measures, operators)?;
    let table = SymbolTable::evaluate(&symbol, measures)?;
    integrate_table(&table, measures, operators)
}

fn validate_chain(measures: &[&SpectralMeasure], operators: &[&ComplexMatrix]) -> Result<usize> {
    let m = measures.len();
    if m == 0 {
        return Err(Error::InvalidArgument(
            "at least one spectral measure is required".into(),
        ));
    }
    if operators.len() + 1 != m {
        return Err(Error::InvalidArgument(format!(
            "{m} measures need {} interleaved operators, got {}",
            m - 1,
            operators.len()
        )));
    }
    let dim = measures[0].dim();
    for e in measures {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "spectral measures of dimension {dim} and {}",
                e.dim()
            )));
        }
    }
    for (i, t) in operators.iter().enumerate() {
        check_square(t, dim, &format!("operator T_{}", i + 1))?;
    }
    Ok(dim)
}

fn integrate_table(
    table: &SymbolTable,
    measures: &[&SpectralMeasure],
    operators: &[&ComplexMatrix],
) -> Result<ComplexMatrix> {
    let m = measures.len();
    let dim = measures[0].dim();
    if m == 1 {
        let u = measures[0].eigenbasis();
        let mut scaled = u.clone();
        for (c, &a) in measures[0].column_atoms().iter().enumerate() {
            scaled.column_mut(c).apply(|z| *z *= table.values[a]);
        }
        return Ok(scaled * u.adjoint());
    }

    let links: Vec<ComplexMatrix> = operators
        .iter()
        .enumerate()
        .map(|(i, t)| measures[i].eigenbasis().adjoint() * *t * measures[i + 1].eigenbasis())
        .collect();
    let columns: Vec<&[usize]> = measures.iter().map(|e| e.column_atoms()).collect();

    let mut core = ComplexMatrix::zeros(dim, dim);
    let mut out_row = vec![Complex64::new(0.0, 0.0); dim];
    for c1 in 0..dim {
        out_row
            .iter_mut()
            .for_each(|z| *z = Complex64::new(0.0, 0.0));
        let offset = columns[0][c1] * table.strides[0];
        accumulate_chain(
            table,
            &links,
            &columns,
            1,
            c1,
            offset,
            Complex64::new(1.0, 0.0),
            &mut out_row,
        );
        for (cm, z) in out_row.iter().enumerate() {
            core[(c1, cm)] = *z;
        }
    }
    Ok(measures[0].eigenbasis() * core * measures[m - 1].eigenbasis().adjoint())
}

#[allow(clippy::too_many_arguments)]
fn accumulate_chain(
    table: &SymbolTable,
    links: &[ComplexMatrix],
    columns: &[&[usize]],
    level: usize,
    prev_col: usize,
    offset: usize,
    product: Complex64,
    out_row: &mut [Complex64],
) {
    let link = &links[level - 1];
    let last = level + 1 == columns.len();
    for (c, &atom) in columns[level].iter().enumerate() {
        let x = link[(prev_col, c)];
        let idx = offset + atom * table.strides[level];
        if last {
            out_row[c] += table.values[idx] * product * x;
        } else {
            accumulate_chain(
                table,
                links,
                columns,
                level + 1,
                c,
                idx,
                product * x,
                out_row,
            );
        }
    }
}

/// Symbol values on every tuple of atoms, row-major over the measures.
struct SymbolTable {
    values: Vec<Complex64>,
    strides: Vec<usize>,
}

impl SymbolTable {
    fn strides(spectra: &[Vec<f64>]) -> Vec<usize> {
        let m = spectra.len();
        let mut strides = vec![1usize; m];
        for i in (0..m.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * spectra[i + 1].len();
        }
        strides
    }

    fn evaluate<F: Fn(&[f64]) -> Complex64>(
        symbol: &F,
        measures: &[&SpectralMeasure],
    ) -> Result<Self> {
        let spectra: Vec<Vec<f64>> = measures.iter().map(|e| e.eigenvalues()).collect();
        let m = spectra.len();
        let strides = Self::strides(&spectra);
        let total = strides[0] * spectra[0].len();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; m];
        let mut point = vec![0.0; m];
        for _ in 0..total {
            for (k, &j) in idx.iter().enumerate() {
                point[k] = spectra[k][j];
            }
            values.push(finite_or_err(symbol(&point), &point)?);
            // odometer, last index fastest
            for k in (0..m).rev() {
                idx[k] += 1;
                if idx[k] < spectra[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Self { values, strides })
    }

    /// Wraps a precomputed row-major table, checking size and finiteness.
    fn from_values(values: Vec<Complex64>, spectra: &[Vec<f64>]) -> Result<Self> {
        let strides = Self::strides(spectra);
        let total = strides[0] * spectra[0].len();
        if values.len() != total {
            return Err(Error::InvalidArgument(format!(
                "symbol table has {} entries, expected {total}",
                values.len()
            )));
        }
        if let Some(pos) = values
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            let mut rest = pos;
            let point: Vec<f64> = spectra
                .iter()
                .zip(&strides)
                .map(|(s, &stride)| {
                    let j = rest / stride;
                    rest %= stride;
                    s[j]
                })
                .collect();
            return Err(Error::NonFiniteSymbol(format!("{point:?}")));
        }
        Ok(Self { values, strides })
    }
}

/// `f(A) = Σ_λ f(λ) E({λ})`.
pub fn apply_function_single<F: Symbol1>(f: &F, e: &SpectralMeasure) -> Result<ComplexMatrix> {
    operator_integral(|x: &[f64]| f.eval(x[0]), &[e], &[])
}

/// `Σ_{j,k} Φ(a_j, b_k) E_1({a_j}) T E_2({b_k})`.
pub fn double_operator_integral<F: Symbol2>(
    phi: &F,
    e1: &SpectralMeasure,
    t: &ComplexMatrix,
    e2: &SpectralMeasure,
) -> Result<ComplexMatrix> {
    let measures = [e1, e2];
    validate_chain(&measures, &[t])?;
    let spectra = [e1.eigenvalues(), e2.eigenvalues()];
    let table = SymbolTable::from_values(phi.eval_table(&spectra[0], &spectra[1]), &spectra)?;
    integrate_table(&table, &measures, &[t])
}

/// `Σ_{j,k,l} Φ(a_j, b_k, c_l) E_1({a_j}) T_1 E_2({b_k}) T_2 E_3({c_l})`.
pub fn triple_operator_integral<F: Symbol3>(
    phi: &F,
    e1: &SpectralMeasure,
    t1: &ComplexMatrix,
    e2: &SpectralMeasure,
    t2: &ComplexMatrix,
    e3: &SpectralMeasure,
) -> Result<ComplexMatrix> {
    let measures = [e1, e2, e3];
    validate_chain(&measures, &[t1, t2])?;
    let spectra = [e1.eigenvalues(), e2.eigenvalues(), e3.eigenvalues()];
    let table = SymbolTable::from_values(
        phi.eval_table(&spectra[0], &spectra[1], &spectra[2]),
        &spectra,
    )?;
    integrate_table(&table, &measures, &[t1, t2])
}

/// `f(A)` for a Hermitian operator.
pub fn apply_function<F: Symbol1>(f: &F, a: &HermitianOperator) -> Result<ComplexMatrix> {
    apply_function_single(f, &a.spectral_measure(DEFAULT_GROUP_TOL)?)
}

/// `f(A, B) = Σ f(λ, μ) E_A({λ}) E_B({μ})`.
pub fn apply_function_pair<F: Symbol2>(
    f: &F,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<ComplexMatrix> {
    let dim = check_same_dim(&[a, b])?;
    let ea = a.spectral_measure(DEFAULT_GROUP_TOL)?;
    let eb = b.spectral_measure(DEFAULT_GROUP_TOL)?;
    double_operator_integral(f, &ea, &identity(dim), &eb)
}

/// `f(A, B, C) = Σ f(λ, μ, ν) E_A({λ}) E_B({μ}) E_C({ν})`.
pub fn apply_function_triple<F: Symbol3>(
    f: &F,
    a: &HermitianOperator,
    b: &HermitianOperator,
    c: &HermitianOperator,
) -> Result<ComplexMatrix> {
    let dim = check_same_dim(&[a, b, c])?;
    let ea = a.spectral_measure(DEFAULT_GROUP_TOL)?;
    let eb = b.spectral_measure(DEFAULT_GROUP_TOL)?;
    let ec = c.spectral_measure(DEFAULT_GROUP_TOL)?;
    apply_function_triple_measures(f, &ea, &eb, &ec, dim)
}

pub(crate) fn apply_function_triple_measures<F: Symbol3>(
    f: &F,
    ea: &SpectralMeasure,
    eb: &SpectralMeasure,
    ec: &SpectralMeasure,
    dim: usize,
) -> Result<ComplexMatrix> {
    let id = identity(dim);
    triple_operator_integral(f, ea, &id, eb, &id, ec)
}

/// `f(A) − f(B)` as the double operator integral of the divided difference
/// of `f` against `A − B`, with the default diagonal policy.
pub fn perturbation_via_divided_difference<F: Symbol1>(
    f: &F,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<ComplexMatrix> {
    perturbation_with_policy(f, DiagonalPolicy::default(), a, b)
}

pub fn perturbation_with_policy<F: Symbol1>(
    f: &F,
    policy: DiagonalPolicy,
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<ComplexMatrix> {
    check_same_dim(&[a, b])?;
    let ea = a.spectral_measure(DEFAULT_GROUP_TOL)?;
    let eb = b.spectral_measure(DEFAULT_GROUP_TOL)?;
    let diff = a.matrix() - b.matrix();
    perturbation_with_measures(f, policy, &ea, &eb, &diff)
}

/// Measure-level form: `Σ DD_f(a_j, b_k) E_A({a_j}) (A − B) E_B({b_k})`,
/// where `diff` is `A − B`.
pub fn perturbation_with_measures<F: Symbol1>(
    f: &F,
    policy: DiagonalPolicy,
    ea: &SpectralMeasure,
    eb: &SpectralMeasure,
    diff: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let dd = DividedDifference2::with_policy(|x: f64| f.eval(x), policy);
    double_operator_integral(&dd, ea, diff, eb)
}

/// Which argument of a three-variable function is perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgumentSlot {
    First,
    Second,
    Third,
}

impl ArgumentSlot {
    pub const ALL: [ArgumentSlot; 3] = [Self::First, Self::Second, Self::Third];

    pub fn index(self) -> usize {
        match self {
            Self::First => 0,
            Self::Second => 1,
            Self::Third => 2,
        }
    }
}

/// Difference `f(…, X_1, …) − f(…, X_2, …)` in the given argument slot, as
/// the sum over pairs of distinct eigenvalues `s ≠ t` of `X_1`, `X_2` of the
/// divided difference of `f` in that slot, applied to
/// `E_{X_1}({s}) (X_1 − X_2) E_{X_2}({t})` inserted in place of the slot's
/// projection. `fixed` holds the two unperturbed operators in argument order.
///
/// For the first slot this is
/// `Σ [f(s,μ,ν) − f(t,μ,ν)]/(s − t) E_{A_1}({s})(A_1 − A_2)E_{A_2}({t}) E_B({μ}) E_C({ν})`.
pub fn argument_perturbation<F: Symbol3>(
    f: &F,
    slot: ArgumentSlot,
    perturbed: (&HermitianOperator, &HermitianOperator),
    fixed: (&HermitianOperator, &HermitianOperator),
) -> Result<ComplexMatrix> {
    let (x1, x2) = perturbed;
    let (y, z) = fixed;
    let dim = check_same_dim(&[x1, x2, y, z])?;
    let e1 = x1.spectral_measure(DEFAULT_GROUP_TOL)?;
    let e2 = x2.spectral_measure(DEFAULT_GROUP_TOL)?;
    let ey = y.spectral_measure(DEFAULT_GROUP_TOL)?;
    let ez = z.spectral_measure(DEFAULT_GROUP_TOL)?;
    let diff = x1.matrix() - x2.matrix();
    let id = identity(dim);

    // chain of four measures; the perturbed pair is adjacent with X_1 − X_2 between
    let (measures, operators): ([&SpectralMeasure; 4], [&ComplexMatrix; 3]) = match slot {
        ArgumentSlot::First => ([&e1, &e2, &ey, &ez], [&diff, &id, &id]),
        ArgumentSlot::Second => ([&ey, &e1, &e2, &ez], [&id, &diff, &id]),
        ArgumentSlot::Third => ([&ey, &ez, &e1, &e2], [&id, &id, &diff]),
    };
    let pos = slot.index();
    let symbol = |x: &[f64]| {
        let (s, t) = (x[pos], x[pos + 1]);
        if s == t {
            return Complex64::new(0.0, 0.0);
        }
        let mut p1 = [0.0; 3];
        let mut p2 = [0.0; 3];
        let mut k = 0;
        for (i, &v) in x.iter().enumerate() {
            if i == pos + 1 {
                continue;
            }
            p1[k] = v;
            p2[k] = if i == pos { t } else { v };
            k += 1;
        }
        (f.eval(p1[0], p1[1], p1[2]) - f.eval(p2[0], p2[1], p2[2])) / (s - t)
    };
    operator_integral(symbol, &measures, &operators)
}

/// `f(A_1, B, C) − f(A_2, B, C)` via [`argument_perturbation`].
pub fn first_argument_perturbation<F: Symbol3>(
    f: &F,
    a1: &HermitianOperator,
    a2: &HermitianOperator,
    b: &HermitianOperator,
    c: &HermitianOperator,
) -> Result<ComplexMatrix> {
    argument_perturbation(f, ArgumentSlot::First, (a1, a2), (b, c))
}

/// `f(A, B_1, C) − f(A, B_2, C)` via [`argument_perturbation`].
pub fn second_argument_perturbation<F: Symbol3>(
    f: &F,
    a: &HermitianOperator,
    b1: &HermitianOperator,
    b2: &HermitianOperator,
    c: &HermitianOperator,
) -> Result<ComplexMatrix> {
    argument_perturbation(f, ArgumentSlot::Second, (b1, b2), (a, c))
}

/// `f(A, B, C_1) − f(A, B, C_2)` via [`argument_perturbation`].
pub fn third_argument_perturbation<F: Symbol3>(
    f: &F,
    a: &HermitianOperator,
    b: &HermitianOperator,
    c1: &HermitianOperator,
    c2: &HermitianOperator,
) -> Result<ComplexMatrix> {
    argument_perturbation(f, ArgumentSlot::Third, (c1, c2), (a, b))
}
