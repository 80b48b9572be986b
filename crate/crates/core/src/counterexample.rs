//! An explicit family of triples `(A, B, C)` of self-adjoint `N × N`
//! matrices and functions `f = φ ⊗ ψ` with uniformly bounded `B¹_{∞,1}`
//! surrogate for which
//!
//! ```text
//! ‖f(A, B, C) − f(A, B, 0)‖_{S_p} = √N · ‖C‖_{S_p}   for every p ∈ [1, ∞].
//! ```
//!
//! `A = Σ 2πj P_j` and `B = Σ 2πk Q_k` have rank-one spectral projections onto
//! orthonormal systems `g_j`, `h_k` with `(h_k, g_j) = u_jk`, the entries of
//! the unitary DFT matrix. `φ(x, y) = Σ θ_jk η(x − 2πj) η(y − 2πk)` with
//! `θ_jk = √N conj(u_jk)` interpolates `θ` on the lattice, so `φ(A, B)`
//! collapses to the rank-one operator `N^{−1/2} (·, Σh_k) Σg_j`, and `C` is
//! the projection onto `Σh_k / √N`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::besov::{
    psi_reference, tensor_majorant, PsiReference, DEFAULT_GRID_M, DEFAULT_HALF_WIDTH,
};
use crate::error::{Error, Result};
use crate::linalg::{
    identity, max_abs, rank_one, schatten_norm_from_singular_values, singular_values,
    ComplexMatrix, ComplexVector, HermitianOperator, SchattenIndex, DEFAULT_GROUP_TOL,
};
use crate::moi::{double_operator_integral, triple_operator_integral, Symbol2, Symbol3};

/// Below this `|x|`, `η` is evaluated from its Taylor polynomial.
pub const ETA_TAYLOR_SWITCH: f64 = 1e-2;

/// Relative tolerance for `ratio = √N`.
pub const GROWTH_RTOL: f64 = 1e-8;

/// Lattice points per period `2π` used for grid sup-norms of `φ`.
pub const DEFAULT_POINTS_PER_PERIOD: usize = 8;

/// `η(x) = 2(1 − cos x)/x²`, continuous at 0 with `η(0) = 1`.
///
/// Away from 0 the half-angle form `(sin(x/2) / (x/2))²` is used, which is
/// the same function without cancellation in `1 − cos x`.
pub fn eta(x: f64) -> f64 {
    if x.abs() <= ETA_TAYLOR_SWITCH {
        let x2 = x * x;
        1.0 - x2 / 12.0 + x2 * x2 / 360.0 - x2 * x2 * x2 / 20160.0
    } else {
        let s = (0.5 * x).sin() / (0.5 * x);
        s * s
    }
}

/// How `η` is evaluated. `Direct` is the literal quotient with no special
/// case at the origin, where it yields NaN; it exists for fault injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtaEvaluation {
    #[default]
    TaylorGuarded,
    Direct,
}

impl EtaEvaluation {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::TaylorGuarded => eta(x),
            Self::Direct => 2.0 * (1.0 - x.cos()) / (x * x),
        }
    }
}

/// `u_jk = N^{−1/2} exp(2πi jk/N)` for `1 ≤ j, k ≤ N`, stored 0-based.
pub fn dft_unitary(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (j, k) = (r as u64 + 1, c as u64 + 1);
        // reduce jk mod N before forming the phase
        let phase = 2.0 * PI * ((j * k) % n as u64) as f64 / n as f64;
        Complex64::from_polar(scale, phase)
    }))
}

/// Orthonormal systems `g_j`, `h_k` realizing a unitary as the Gram matrix
/// `(h_k, g_j) = u_jk`: `h_k = e_k` and `g_j[k] = conj(u_jk)`.
pub fn orthonormal_realization(
    u: &ComplexMatrix,
) -> Result<(Vec<ComplexVector>, Vec<ComplexVector>)> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: u.ncols(),
        });
    }
    let deviation = max_abs(&(u.adjoint() * u - identity(n)));
    let tolerance = 1e-10;
    if deviation > tolerance {
        return Err(Error::NotUnitary {
            deviation,
            tolerance,
        });
    }
    let g = (0..n)
        .map(|j| ComplexVector::from_iterator(n, (0..n).map(|k| u[(j, k)].conj())))
        .collect();
    let h = (0..n)
        .map(|k| {
            let mut e = ComplexVector::zeros(n);
            e[k] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    Ok((g, h))
}

/// `φ(x, y) = Σ_{j,k=1}^N θ_jk η(x − 2πj) η(y − 2πk)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSymbol {
    theta: ComplexMatrix,
    eta: EtaEvaluation,
}

impl PhiSymbol {
    pub fn new(theta: ComplexMatrix) -> Result<Self> {
        Self::with_eta(theta, EtaEvaluation::default())
    }

    pub fn with_eta(theta: ComplexMatrix, eta: EtaEvaluation) -> Result<Self> {
        if theta.nrows() != theta.ncols() || theta.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: theta.nrows(),
                cols: theta.ncols(),
            });
        }
        Ok(Self { theta, eta })
    }

    pub fn n(&self) -> usize {
        self.theta.nrows()
    }

    pub fn theta(&self) -> &ComplexMatrix {
        &self.theta
    }

    /// Matrix `[η(x_i − 2πj)]_{i,j}`.
    fn eta_matrix(&self, xs: &[f64]) -> ComplexMatrix {
        let n = self.n();
        DMatrix::from_fn(xs.len(), n, |i, j| {
            Complex64::new(self.eta.eval(xs[i] - 2.0 * PI * (j + 1) as f64), 0.0)
        })
    }

    /// `[φ(x_i, y_k)]` as a matrix.
    pub fn table(&self, xs: &[f64], ys: &[f64]) -> ComplexMatrix {
        self.eta_matrix(xs) * &self.theta * self.eta_matrix(ys).transpose()
    }

    /// Max of `|φ|` over the square lattice on `[0, 2π(N+1)]²` with
    /// `points_per_period` points per `2π`. Includes every node `(2πj, 2πk)`.
    pub fn grid_sup(&self, points_per_period: usize) -> f64 {
        let count = points_per_period.max(1) * (self.n() + 1);
        let step = 2.0 * PI / points_per_period.max(1) as f64;
        let xs: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
        max_abs(&self.table(&xs, &xs))
    }
}

impl Symbol2 for PhiSymbol {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        let n = self.n();
        let ex: Vec<f64> = (1..=n)
            .map(|j| self.eta.eval(x - 2.0 * PI * j as f64))
            .collect();
        let ey: Vec<f64> = (1..=n)
            .map(|k| self.eta.eval(y - 2.0 * PI * k as f64))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &a) in ex.iter().enumerate() {
            for (k, &b) in ey.iter().enumerate() {
                acc += self.theta[(j, k)] * (a * b);
            }
        }
        acc
    }

    fn eval_table(&self, xs: &[f64], ys: &[f64]) -> Vec<Complex64> {
        let t = self.table(xs, ys);
        (0..xs.len())
            .flat_map(|i| (0..ys.len()).map(move |k| (i, k)))
            .map(|(i, k)| t[(i, k)])
            .collect()
    }
}

/// The symbol interpolating `θ_jk` at the lattice points `(2πj, 2πk)`.
pub fn phi_symbol(theta: ComplexMatrix) -> Result<PhiSymbol> {
    PhiSymbol::new(theta)
}

/// `(x, y, z) ↦ φ(x, y) ψ(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSymbol {
    pub phi: PhiSymbol,
    pub psi: PsiReference,
}

impl Symbol3 for TensorSymbol {
    fn eval(&self, x: f64, y: f64, z: f64) -> Complex64 {
        self.phi.eval(x, y) * self.psi.value(z)
    }

    fn eval_table(&self, xs: &[f64], ys: &[f64], zs: &[f64]) -> Vec<Complex64> {
        let t = self.phi.table(xs, ys);
        let psi: Vec<f64> = zs.iter().map(|&z| self.psi.value(z)).collect();
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for i in 0..xs.len() {
            for k in 0..ys.len() {
                let v = t[(i, k)];
                out.extend(psi.iter().map(|&p| v * p));
            }
        }
        out
    }
}

/// The operators, vectors and symbols of the construction at size `N`.
#[derive(Debug, Clone)]
pub struct CounterexampleInstance {
    pub n: usize,
    pub u: ComplexMatrix,
    pub theta: ComplexMatrix,
    pub g: Vec<ComplexVector>,
    pub h: Vec<ComplexVector>,
    pub a: HermitianOperator,
    pub b: HermitianOperator,
    pub c: HermitianOperator,
    pub f: TensorSymbol,
}

/// Largest deviations from the construction's identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceDiagnostics {
    /// `‖U*U − I‖_max`
    pub unitarity: f64,
    /// `max |(h_k, g_j) − u_jk|`
    pub gram: f64,
    /// `max` of `|(g_j, g_j') − δ|` and `|(h_k, h_k') − δ|`
    pub orthonormality: f64,
    /// `|‖C‖ − 1|`
    pub c_norm: f64,
    /// `‖C² − C‖_max`
    pub c_idempotence: f64,
    /// `|trace C − 1|`
    pub c_trace: f64,
    /// max distance of the computed spectra of `A`, `B` from `{2πj}`, or
    /// infinity if the atom counts differ
    pub spectra: f64,
}

impl CounterexampleInstance {
    pub fn phi(&self) -> &PhiSymbol {
        &self.f.phi
    }

    pub fn diagnostics(&self) -> Result<InstanceDiagnostics> {
        let n = self.n;
        let unitarity = max_abs(&(self.u.adjoint() * &self.u - identity(n)));
        let mut gram: f64 = 0.0;
        let mut orthonormality: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                gram = gram
                    .max((crate::linalg::inner(&self.h[k], &self.g[j]) - self.u[(j, k)]).norm());
                let delta = if j == k { 1.0 } else { 0.0 };
                orthonormality = orthonormality
                    .max((crate::linalg::inner(&self.g[j], &self.g[k]) - delta).norm())
                    .max((crate::linalg::inner(&self.h[j], &self.h[k]) - delta).norm());
            }
        }
        let c = self.c.matrix();
        let c_norm = (singular_values(c)?[0] - 1.0).abs();
        let c_idempotence = max_abs(&(c * c - c));
        let c_trace = (c.trace() - Complex64::new(1.0, 0.0)).norm();

        let mut spectra: f64 = 0.0;
        for op in [&self.a, &self.b] {
            let ev = op.spectral_measure(DEFAULT_GROUP_TOL)?.eigenvalues();
            if ev.len() != n {
                spectra = f64::INFINITY;
                continue;
            }
            for (j, v) in ev.iter().enumerate() {
                spectra = spectra.max((v - 2.0 * PI * (j + 1) as f64).abs());
            }
        }
        Ok(InstanceDiagnostics {
            unitarity,
            gram,
            orthonormality,
            c_norm,
            c_idempotence,
            c_trace,
            spectra,
        })
    }
}

/// Builds the construction at size `N`.
pub fn build_instance(n: usize) -> Result<CounterexampleInstance> {
    build_instance_with(n, EtaEvaluation::default())
}

pub fn build_instance_with(n: usize, eta: EtaEvaluation) -> Result<CounterexampleInstance> {
    let u = dft_unitary(n)?;
    let (g, h) = orthonormal_realization(&u)?;
    let sqrt_n = (n as f64).sqrt();
    let theta = u.map(|z| z.conj() * sqrt_n);

    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let lambda = 2.0 * PI * (j + 1) as f64;
        a += rank_one(&g[j], &g[j])?.scale(lambda);
        b += rank_one(&h[j], &h[j])?.scale(lambda);
    }
    let h_sum: ComplexVector = h.iter().sum();
    let c = rank_one(&h_sum, &h_sum)?.scale(1.0 / n as f64);

    let phi = PhiSymbol::with_eta(theta.clone(), eta)?;
    Ok(CounterexampleInstance {
        n,
        u,
        theta,
        g,
        h,
        a: HermitianOperator::from_matrix(a)?,
        b: HermitianOperator::from_matrix(b)?,
        c: HermitianOperator::from_matrix(c)?,
        f: TensorSymbol {
            phi,
            psi: psi_reference(),
        },
    })
}

/// Grid parameters for the Besov surrogate, with the `ψ` majorant
/// `sup|ψ♭| + Σ_{n≥0} 2^n sup|ψ_n|` evaluated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateContext {
    pub half_width: f64,
    pub grid_m: u32,
    pub points_per_period: usize,
    pub psi_majorant: f64,
}

impl SurrogateContext {
    pub fn new(half_width: f64, grid_m: u32) -> Result<Self> {
        let psi = psi_reference().sample(half_width, grid_m)?;
        Ok(Self {
            half_width,
            grid_m,
            points_per_period: DEFAULT_POINTS_PER_PERIOD,
            psi_majorant: tensor_majorant(&psi)?.total(),
        })
    }

    /// `tensor_bound_kappa(sup|φ|, ψ)` for a grid-measured `sup|φ|`.
    pub fn kappa(&self, phi_sup: f64) -> f64 {
        phi_sup * self.psi_majorant
    }
}

impl Default for SurrogateContext {
    fn default() -> Self {
        Self::new(DEFAULT_HALF_WIDTH, DEFAULT_GRID_M).expect("default grid is valid")
    }
}

/// One row of a growth experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    pub n: usize,
    pub p: SchattenIndex,
    /// `‖f(A, B, C₁) − f(A, B, C₂)‖_{S_p}`
    pub lhs: f64,
    /// `‖C₁ − C₂‖_{S_p}`
    pub perturbation: f64,
    pub besov_surrogate: f64,
    pub ratio: f64,
}

impl ExperimentRecord {
    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Whether `ratio` equals `√N` within relative [`GROWTH_RTOL`].
    pub fn matches_sqrt_n(&self) -> bool {
        (self.ratio - self.sqrt_n()).abs() <= GROWTH_RTOL * self.sqrt_n()
    }
}

/// The difference `f(A, B, εC) − f(A, B, 0)` and the cross-checks around it.
#[derive(Debug, Clone)]
pub struct GrowthAnalysis {
    pub n: usize,
    pub epsilon: f64,
    pub difference: ComplexMatrix,
    pub phi_ab: ComplexMatrix,
    /// `‖D − φ(A, B) εC‖_max`
    pub factorization_error: f64,
    /// `‖f(A, B, 0)‖_max`; the closed form is `φ(A, B) ψ(0) = 0`
    pub zero_path_error: f64,
    pub phi_sup: f64,
    pub besov_surrogate: f64,
    difference_sv: Vec<f64>,
    perturbation_sv: Vec<f64>,
}

impl GrowthAnalysis {
    pub fn record(&self, p: SchattenIndex) -> ExperimentRecord {
        let lhs = schatten_norm_from_singular_values(&self.difference_sv, p);
        let perturbation = schatten_norm_from_singular_values(&self.perturbation_sv, p);
        ExperimentRecord {
            n: self.n,
            p,
            lhs,
            perturbation,
            besov_surrogate: self.besov_surrogate,
            ratio: lhs / perturbation,
        }
    }

    /// Singular values of `φ(A, B)`.
    pub fn phi_ab_singular_values(&self) -> Result<Vec<f64>> {
        singular_values(&self.phi_ab)
    }
}

/// Computes `f(A, B, εC) − f(A, B, 0)` by triple operator integrals, with
/// the zero operator's single-atom spectral measure for the second term.
pub fn analyze_growth(
    inst: &CounterexampleInstance,
    epsilon: f64,
    ctx: &SurrogateContext,
) -> Result<GrowthAnalysis> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let n = inst.n;
    let id = identity(n);
    let c1 = inst.c.scale(epsilon);
    let ea = inst.a.spectral_measure(DEFAULT_GROUP_TOL)?;
    let eb = inst.b.spectral_measure(DEFAULT_GROUP_TOL)?;
    let ec = c1.spectral_measure(DEFAULT_GROUP_TOL)?;
    let e0 = HermitianOperator::zero(n).spectral_measure(DEFAULT_GROUP_TOL)?;

    let f_abc = triple_operator_integral(&inst.f, &ea, &id, &eb, &id, &ec)?;
    let f_ab0 = triple_operator_integral(&inst.f, &ea, &id, &eb, &id, &e0)?;
    let phi_ab = double_operator_integral(&inst.f.phi, &ea, &id, &eb)?;

    let difference = f_abc - &f_ab0;
    let factorization_error = max_abs(&(&difference - &phi_ab * c1.matrix()));
    let zero_path_error = max_abs(&f_ab0);
    let phi_sup = inst.phi().grid_sup(ctx.points_per_period);
    let difference_sv = singular_values(&difference)?;
    let perturbation_sv = singular_values(c1.matrix())?;
    Ok(GrowthAnalysis {
        n,
        epsilon,
        difference,
        phi_ab,
        factorization_error,
        zero_path_error,
        phi_sup,
        besov_surrogate: ctx.kappa(phi_sup),
        difference_sv,
        perturbation_sv,
    })
}

/// The experiment record for `(A, B, C)` against `(A, B, 0)` at size `N`.
pub fn verify_growth(n: usize, p: SchattenIndex) -> Result<ExperimentRecord> {
    let inst = build_instance(n)?;
    Ok(analyze_growth(&inst, 1.0, &SurrogateContext::default())?.record(p))
}

/// Records for every `(N, p)`, sorted by `N` then by position in `p_list`.
pub fn growth_sweep(
    n_list: &[usize],
    p_list: &[SchattenIndex],
    ctx: &SurrogateContext,
) -> Result<Vec<ExperimentRecord>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    let mut out = Vec::with_capacity(ns.len() * p_list.len());
    for n in ns {
        let analysis = analyze_growth(&build_instance(n)?, 1.0, ctx)?;
        out.extend(p_list.iter().map(|&p| analysis.record(p)));
    }
    Ok(out)
}

/// How the scaling factor `ε` of `C` depends on `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonRule {
    Constant(f64),
    /// `ε = N^{−exponent}`
    InversePower(f64),
}

impl EpsilonRule {
    pub fn epsilon(self, n: usize) -> Result<f64> {
        let eps = match self {
            Self::Constant(e) => e,
            Self::InversePower(a) => (n as f64).powf(-a),
        };
        if eps > 0.0 && eps <= 1.0 {
            Ok(eps)
        } else {
            Err(Error::InvalidEpsilon(eps))
        }
    }
}

/// Replaces `C` by `C₁ = εC`, `C₂ = 0`: the perturbation `‖C₁ − C₂‖_{S_p} = ε`
/// while the difference norm is `ε√N`.
pub fn epsilon_scaling_run(
    n_list: &[usize],
    rule: EpsilonRule,
    p: SchattenIndex,
    ctx: &SurrogateContext,
) -> Result<Vec<ExperimentRecord>> {
    n_list
        .iter()
        .map(|&n| {
            let eps = rule.epsilon(n)?;
            Ok(analyze_growth(&build_instance(n)?, eps, ctx)?.record(p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0), 1.0);
        assert!(eta(2.0 * PI).abs() < 1e-14);
        assert!((eta(PI) - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!(eta(-4.0 * PI).abs() < 1e-14);
        assert!(EtaEvaluation::Direct.eval(0.0).is_nan());
    }

    #[test]
    fn eta_taylor_seam_is_continuous() {
        let x = ETA_TAYLOR_SWITCH;
        let below = eta(x);
        let above = eta(x * (1.0 + f64::EPSILON));
        assert!((below - above).abs() <= 4.0 * f64::EPSILON);
        let s = (0.5 * x).sin() / (0.5 * x);
        assert!((below - s * s).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn dft_small_cases() {
        let u1 = dft_unitary(1).unwrap();
        assert!((u1[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let u2 = dft_unitary(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        // j,k ∈ {1,2}: exp(πi jk) = -1, 1, 1, 1
        let expected = [[-s, s], [s, s]];
        for j in 0..2 {
            for k in 0..2 {
                assert!((u2[(j, k)] - Complex64::new(expected[j][k], 0.0)).norm() < 1e-15);
            }
        }
        assert!(dft_unitary(0).is_err());
    }

    #[test]
    fn realization_of_identity() {
        let (g, h) = orthonormal_realization(&identity(3)).unwrap();
        for j in 0..3 {
            assert_eq!(g[j], h[j]);
            assert_eq!(g[j][j], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn realization_rejects_non_unitary() {
        let m = identity(2).scale(2.0);
        assert!(matches!(
            orthonormal_realization(&m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn phi_zero_theta() {
        let phi = PhiSymbol::new(ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(phi.eval(1.3, 4.0), Complex64::new(0.0, 0.0));
        assert_eq!(phi.grid_sup(4), 0.0);
    }

    #[test]
    fn phi_table_matches_pointwise() {
        let inst = build_instance(5).unwrap();
        let xs = [0.3, 6.0, 12.9, 40.0];
        let ys = [1.0, 7.5];
        let table = inst.phi().eval_table(&xs, &ys);
        for (i, &x) in xs.iter().enumerate() {
            for (k, &y) in ys.iter().enumerate() {
                assert!((table[i * ys.len() + k] - inst.phi().eval(x, y)).norm() < 1e-13);
            }
        }
        let t3 = inst.f.eval_table(&xs, &ys, &[0.5, 3.0]);
        assert!((t3[2] - inst.f.eval(xs[0], ys[1], 0.5)).norm() < 1e-13);
        assert_eq!(t3[3], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn instance_n1_closed_forms() {
        let inst = build_instance(1).unwrap();
        let two_pi = Complex64::new(2.0 * PI, 0.0);
        assert!((inst.a.matrix()[(0, 0)] - two_pi).norm() < 1e-14);
        assert!((inst.b.matrix()[(0, 0)] - two_pi).norm() < 1e-14);
        assert!((inst.c.matrix()[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((inst.phi().eval(2.0 * PI, 2.0 * PI) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn epsilon_rule_validation() {
        assert_eq!(EpsilonRule::InversePower(0.25).epsilon(16).unwrap(), 0.5);
        assert!(matches!(
            EpsilonRule::Constant(0.0).epsilon(4),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            EpsilonRule::Constant(1.5).epsilon(4),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            EpsilonRule::InversePower(-1.0).epsilon(4),
            Err(Error::InvalidEpsilon(_))
        ));
    }
}
