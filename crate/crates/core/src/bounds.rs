//! Randomized checks of the upper estimates for functions of pairs and
//! triples of finite-rank perturbations.
//!
//! Pairs: for `p ≥ 2` the `S_p` norm of `f(A_1,B_1) − f(A_2,B_2)` is bounded
//! through the Hilbert–Schmidt norm, and the Hilbert–Schmidt norm of a rank-`r`
//! operator exceeds its `S_p` norm by at most `r^{1/2−1/p}`.
//!
//! Triples: telescoping `f(A_1,B_1,C_1) − f(A_2,B_2,C_2)` through one argument at
//! a time and expanding each step as a sum over eigenvalue quadruples gives a
//! bound by the number of terms times `‖f‖_Lip` times the perturbation.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::besov::window_w;
use crate::error::{Error, Result};
use crate::linalg::{
    max_abs, numerical_rank, schatten_norm_from_singular_values, singular_values, ComplexMatrix,
    HermitianOperator, SchattenIndex, DEFAULT_GROUP_TOL,
};
use crate::moi::{
    apply_function_pair, apply_function_triple, argument_perturbation, ArgumentSlot, Symbol2,
    Symbol3,
};
use crate::sampling::{random_rank_hermitian, random_rank_matrix, seeded_rng};

/// Slack added to the finite-rank inequality.
pub const RANK_CHAIN_ATOL: f64 = 1e-12;
/// Slack added to the triple Lipschitz bound and its steps.
pub const LIPSCHITZ_ATOL: f64 = 1e-9;
/// Largest frequency `|m|, |l|` in the random trigonometric polynomials.
pub const TRIG_DEGREE: i32 = 3;

/// `‖X‖_{S_2}` against `r^{1/2−1/p}‖X‖_{S_p}` for a rank-`r` matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankChain {
    pub rank: usize,
    pub hilbert_schmidt: f64,
    pub schatten_p: f64,
    pub bound: f64,
}

impl RankChain {
    pub fn evaluate(x: &ComplexMatrix, p: SchattenIndex) -> Result<Self> {
        let s = singular_values(x)?;
        let rank = numerical_rank(x)?;
        let hilbert_schmidt = schatten_norm_from_singular_values(&s, SchattenIndex::TWO);
        let schatten_p = schatten_norm_from_singular_values(&s, p);
        let bound = rank_factor(rank, p) * schatten_p;
        Ok(Self {
            rank,
            hilbert_schmidt,
            schatten_p,
            bound,
        })
    }

    pub fn holds(&self) -> bool {
        self.hilbert_schmidt <= self.bound + RANK_CHAIN_ATOL
    }
}

/// `r^{1/2 − 1/p}`; `p < 2` gives a factor below one, for which the inequality
/// is not claimed.
pub fn rank_factor(rank: usize, p: SchattenIndex) -> f64 {
    (rank as f64).powf(0.5 - p.reciprocal())
}

fn require_p_at_least_two(p: SchattenIndex) -> Result<()> {
    if p.value() < 2.0 {
        return Err(Error::RequiresPAtLeastTwo(p.to_string()));
    }
    Ok(())
}

/// `Σ c_{ml} e^{i(mx + ly)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial2 {
    pub terms: Vec<(i32, i32, Complex64)>,
}

impl TrigPolynomial2 {
    /// Independent complex Gaussian coefficients for all `|m|, |l| ≤ degree`.
    pub fn random<R: Rng + ?Sized>(degree: i32, rng: &mut R) -> Self {
        let mut terms = Vec::with_capacity(((2 * degree + 1) * (2 * degree + 1)) as usize);
        for m in -degree..=degree {
            for l in -degree..=degree {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                terms.push((m, l, Complex64::new(re, im)));
            }
        }
        Self { terms }
    }

    /// `Σ_n 2^n Σ |c_{ml}| w(ρ_{ml}/2^n)` with `ρ_{ml} = |(m, l)|`. Each band
    /// piece is a finite sum of exponentials, so its sup-norm is at most the
    /// sum of its coefficient moduli. The constant term lies in no band.
    pub fn besov_surrogate(&self) -> f64 {
        let mut total = 0.0;
        for &(m, l, c) in &self.terms {
            let rho = ((m * m + l * l) as f64).sqrt();
            if rho == 0.0 {
                continue;
            }
            // w(ρ/2^n) ≠ 0 only for 2^{n−1} < ρ < 2^{n+1}
            let top = rho.log2().floor() as i32 + 1;
            for n in top - 2..=top + 1 {
                let scale = 2f64.powi(n);
                total += scale * c.norm() * window_w(rho / scale);
            }
        }
        total
    }
}

impl Symbol2 for TrigPolynomial2 {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(m, l, c)| c * Complex64::from_polar(1.0, m as f64 * x + l as f64 * y))
            .sum()
    }
}

/// Test functions of two variables for the pairs check.
#[derive(Debug, Clone, PartialEq)]
pub enum PairFunction {
    Trig(TrigPolynomial2),
    /// `f(x, y) = x`
    FirstCoordinate,
}

impl PairFunction {
    /// Norm placed in the denominator of the reported ratio: the Besov
    /// surrogate for trigonometric polynomials, the Lipschitz constant 1 for
    /// the coordinate function.
    pub fn reference_norm(&self) -> f64 {
        match self {
            Self::Trig(t) => t.besov_surrogate(),
            Self::FirstCoordinate => 1.0,
        }
    }
}

impl Symbol2 for PairFunction {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        match self {
            Self::Trig(t) => t.eval(x, y),
            Self::FirstCoordinate => Complex64::new(x, 0.0),
        }
    }
}

/// Which test functions the pairs check draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairFamily {
    #[default]
    TrigPolynomial,
    FirstCoordinate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTrial {
    pub trial: usize,
    pub delta_f_p: f64,
    pub delta_f_2: f64,
    /// `max(‖A_1 − A_2‖_{S_p}, ‖B_1 − B_2‖_{S_p})`
    pub perturbation: f64,
    pub reference_norm: f64,
    pub ratio: f64,
    /// Rank chains for `A_1 − A_2`, `B_1 − B_2` and the function difference.
    pub chains: [RankChain; 3],
}

impl PairTrial {
    pub fn norm_monotonicity_holds(&self) -> bool {
        self.delta_f_p <= self.delta_f_2 + RANK_CHAIN_ATOL
    }

    pub fn holds(&self) -> bool {
        self.norm_monotonicity_holds() && self.chains.iter().all(RankChain::holds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairsReport {
    pub n: usize,
    pub p: SchattenIndex,
    pub seed: u64,
    pub trials: Vec<PairTrial>,
}

impl PairsReport {
    pub fn all_hold(&self) -> bool {
        self.trials.iter().all(PairTrial::holds)
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.trials.iter().map(|t| t.ratio).reduce(f64::max)
    }
}

/// Rank-≤`n` Hermitian pairs in dimension `2n` with random trigonometric
/// polynomials; see [`rank_estimate_check_pairs_with`].
pub fn rank_estimate_check_pairs(
    n: usize,
    p: SchattenIndex,
    trials: usize,
    seed: u64,
) -> Result<PairsReport> {
    rank_estimate_check_pairs_with(n, p, trials, seed, PairFamily::TrigPolynomial)
}

/// For each trial draws `(A_1, B_1)`, `(A_2, B_2)` and `f`, evaluates
/// `Δf = f(A_1, B_1) − f(A_2, B_2)` and records the chain
/// `‖Δf‖_{S_p} ≤ ‖Δf‖_{S_2}` together with the finite-rank inequality for
/// every difference. The reported ratio is
/// `‖Δf‖_{S_p} / (n^{1/2−1/p} · ‖f‖ · max perturbation)`.
pub fn rank_estimate_check_pairs_with(
    n: usize,
    p: SchattenIndex,
    trials: usize,
    seed: u64,
    family: PairFamily,
) -> Result<PairsReport> {
    require_p_at_least_two(p)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let dim = 2 * n;
    let mut rng = seeded_rng(seed);
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let a1 = random_rank_hermitian(dim, n, &mut rng);
        let b1 = random_rank_hermitian(dim, n, &mut rng);
        let a2 = random_rank_hermitian(dim, n, &mut rng);
        let b2 = random_rank_hermitian(dim, n, &mut rng);
        let f = match family {
            PairFamily::TrigPolynomial => {
                PairFunction::Trig(TrigPolynomial2::random(TRIG_DEGREE, &mut rng))
            }
            PairFamily::FirstCoordinate => PairFunction::FirstCoordinate,
        };

        let delta_f = apply_function_pair(&f, &a1, &b1)? - apply_function_pair(&f, &a2, &b2)?;
        let delta_a = a1.matrix() - a2.matrix();
        let delta_b = b1.matrix() - b2.matrix();
        let chains = [
            RankChain::evaluate(&delta_a, p)?,
            RankChain::evaluate(&delta_b, p)?,
            RankChain::evaluate(&delta_f, p)?,
        ];
        let perturbation = chains[0].schatten_p.max(chains[1].schatten_p);
        let reference_norm = f.reference_norm();
        let delta_f_p = chains[2].schatten_p;
        let denominator = rank_factor(n, p) * reference_norm * perturbation;
        rows.push(PairTrial {
            trial,
            delta_f_p,
            delta_f_2: chains[2].hilbert_schmidt,
            perturbation,
            reference_norm,
            ratio: delta_f_p / denominator,
            chains,
        });
    }
    Ok(PairsReport {
        n,
        p,
        seed,
        trials: rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankChainTrial {
    pub trial: usize,
    pub rows: usize,
    pub cols: usize,
    pub chain: RankChain,
}

/// Random `X Y*` with dimensions in `[2, 12]` and rank in `[1, min]`, checked
/// against `‖M‖_{S_2} ≤ r^{1/2−1/p}‖M‖_{S_p} + 1e−12`.
pub fn finite_rank_chain_check(
    p: SchattenIndex,
    trials: usize,
    seed: u64,
) -> Result<Vec<RankChainTrial>> {
    require_p_at_least_two(p)?;
    let mut rng = seeded_rng(seed);
    (0..trials)
        .map(|trial| {
            let rows = rng.random_range(2..=12);
            let cols = rng.random_range(2..=12);
            let rank = rng.random_range(1..=rows.min(cols));
            let m = random_rank_matrix(rows, cols, rank, &mut rng);
            Ok(RankChainTrial {
                trial,
                rows,
                cols,
                chain: RankChain::evaluate(&m, p)?,
            })
        })
        .collect()
}

/// `c · min(1, |ℓ · x + d|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub coefficient: f64,
    pub direction: [f64; 3],
    pub offset: f64,
}

fn euclid(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64; 3], x: f64, y: f64, z: f64) -> f64 {
    a[0] * x + a[1] * y + a[2] * z
}

/// `a · x + b + Σ c_m min(1, |ℓ_m · x + d_m|)` on `ℝ³`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzFunction {
    pub linear: [f64; 3],
    pub constant: f64,
    pub ramps: Vec<Ramp>,
}

impl LipschitzFunction {
    pub fn constant(value: f64) -> Self {
        Self {
            linear: [0.0; 3],
            constant: value,
            ramps: Vec::new(),
        }
    }

    /// `f(x, y, z) = x_axis`.
    pub fn coordinate(axis: usize) -> Self {
        let mut linear = [0.0; 3];
        linear[axis] = 1.0;
        Self {
            linear,
            constant: 0.0,
            ramps: Vec::new(),
        }
    }

    pub fn random<R: Rng + ?Sized>(ramps: usize, rng: &mut R) -> Self {
        let gauss3 = |rng: &mut R| -> [f64; 3] {
            [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ]
        };
        let linear = gauss3(rng);
        let constant = rng.sample(StandardNormal);
        let ramps = (0..ramps)
            .map(|_| Ramp {
                coefficient: rng.sample(StandardNormal),
                direction: gauss3(rng),
                offset: rng.random_range(-1.0..1.0),
            })
            .collect();
        Self {
            linear,
            constant,
            ramps,
        }
    }

    /// `‖a‖₂ + Σ |c_m| ‖ℓ_m‖₂`, an upper bound for the Lipschitz seminorm
    /// with respect to the Euclidean norm. Exact when there are no ramps.
    pub fn lipschitz_bound(&self) -> f64 {
        euclid(&self.linear)
            + self
                .ramps
                .iter()
                .map(|r| r.coefficient.abs() * euclid(&r.direction))
                .sum::<f64>()
    }
}

impl Symbol3 for LipschitzFunction {
    fn eval(&self, x: f64, y: f64, z: f64) -> Complex64 {
        let ramps: f64 = self
            .ramps
            .iter()
            .map(|r| r.coefficient * (dot(&r.direction, x, y, z) + r.offset).abs().min(1.0))
            .sum();
        Complex64::new(dot(&self.linear, x, y, z) + self.constant + ramps, 0.0)
    }
}

/// Which test functions the triple check draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LipschitzFamily {
    #[default]
    Random,
    Constant,
    FirstCoordinate,
}

/// One step of the telescoping sum, changing a single argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelescopingStep {
    pub slot: ArgumentSlot,
    /// `‖step‖_{S_p}`
    pub norm: f64,
    /// `‖X_1 − X_2‖_{S_p}` in the changed argument
    pub perturbation: f64,
    /// Product of the atom counts of the four spectral measures in the
    /// eigenvalue expansion of this step.
    pub term_count: usize,
    /// `term_count · ‖f‖_Lip · perturbation`
    pub bound: f64,
    /// Max-entry distance between the direct difference and its eigenvalue
    /// expansion.
    pub expansion_error: f64,
}

impl TelescopingStep {
    pub fn holds(&self) -> bool {
        self.norm <= self.bound + LIPSCHITZ_ATOL && self.expansion_error <= LIPSCHITZ_ATOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzTrial {
    pub trial: usize,
    /// `‖f(A_1,B_1,C_1) − f(A_2,B_2,C_2)‖_{S_p}`
    pub lhs: f64,
    pub lipschitz: f64,
    /// `‖ΔA‖_{S_p} + ‖ΔB‖_{S_p} + ‖ΔC‖_{S_p}`
    pub perturbation_sum: f64,
    /// `N⁴ ‖f‖_Lip · perturbation_sum`
    pub rhs: f64,
    pub ratio: f64,
    pub steps: [TelescopingStep; 3],
}

impl LipschitzTrial {
    pub fn bound_holds(&self) -> bool {
        self.lhs <= self.rhs + LIPSCHITZ_ATOL
    }

    pub fn holds(&self) -> bool {
        self.bound_holds() && self.steps.iter().all(TelescopingStep::holds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub n: usize,
    pub p: SchattenIndex,
    pub seed: u64,
    pub trials: Vec<LipschitzTrial>,
}

impl LipschitzReport {
    pub fn all_hold(&self) -> bool {
        self.trials.iter().all(LipschitzTrial::holds)
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.trials
            .iter()
            .map(|t| t.ratio)
            .filter(|r| r.is_finite())
            .reduce(f64::max)
    }
}

pub fn lipschitz_rank_bound_check(
    n: usize,
    p: SchattenIndex,
    trials: usize,
    seed: u64,
) -> Result<LipschitzReport> {
    lipschitz_rank_bound_check_with(n, p, trials, seed, LipschitzFamily::Random)
}

/// Draws rank-≤`n` Hermitian triples in dimension `2n` and checks
/// `‖Δf‖_{S_p} ≤ n⁴ ‖f‖_Lip (‖ΔA‖_{S_p} + ‖ΔB‖_{S_p} + ‖ΔC‖_{S_p}) + 1e−9`
/// along with each telescoping step
/// `f(A_1,B_1,C_1) → f(A_2,B_1,C_1) → f(A_2,B_2,C_1) → f(A_2,B_2,C_2)`.
pub fn lipschitz_rank_bound_check_with(
    n: usize,
    p: SchattenIndex,
    trials: usize,
    seed: u64,
    family: LipschitzFamily,
) -> Result<LipschitzReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let dim = 2 * n;
    let mut rng = seeded_rng(seed);
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let [a1, b1, c1, a2, b2, c2] =
            std::array::from_fn(|_| random_rank_hermitian(dim, n, &mut rng));
        let f = match family {
            LipschitzFamily::Random => {
                let ramps = rng.random_range(0..=4);
                LipschitzFunction::random(ramps, &mut rng)
            }
            LipschitzFamily::Constant => LipschitzFunction::constant(rng.sample(StandardNormal)),
            LipschitzFamily::FirstCoordinate => LipschitzFunction::coordinate(0),
        };
        let lip = f.lipschitz_bound();

        let f111 = apply_function_triple(&f, &a1, &b1, &c1)?;
        let f211 = apply_function_triple(&f, &a2, &b1, &c1)?;
        let f221 = apply_function_triple(&f, &a2, &b2, &c1)?;
        let f222 = apply_function_triple(&f, &a2, &b2, &c2)?;

        let steps = [
            telescoping_step(
                &f,
                ArgumentSlot::First,
                (&a1, &a2),
                (&b1, &c1),
                &f111,
                &f211,
                p,
                lip,
            )?,
            telescoping_step(
                &f,
                ArgumentSlot::Second,
                (&b1, &b2),
                (&a2, &c1),
                &f211,
                &f221,
                p,
                lip,
            )?,
            telescoping_step(
                &f,
                ArgumentSlot::Third,
                (&c1, &c2),
                (&a2, &b2),
                &f221,
                &f222,
                p,
                lip,
            )?,
        ];
        let lhs = norm(&(&f111 - &f222), p)?;
        let perturbation_sum: f64 = steps.iter().map(|s| s.perturbation).sum();
        let rhs = (n as f64).powi(4) * lip * perturbation_sum;
        rows.push(LipschitzTrial {
            trial,
            lhs,
            lipschitz: lip,
            perturbation_sum,
            rhs,
            ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
            steps,
        });
    }
    Ok(LipschitzReport {
        n,
        p,
        seed,
        trials: rows,
    })
}

fn norm(m: &ComplexMatrix, p: SchattenIndex) -> Result<f64> {
    Ok(schatten_norm_from_singular_values(&singular_values(m)?, p))
}

#[allow(clippy::too_many_arguments)]
fn telescoping_step<F: Symbol3>(
    f: &F,
    slot: ArgumentSlot,
    perturbed: (&HermitianOperator, &HermitianOperator),
    fixed: (&HermitianOperator, &HermitianOperator),
    before: &ComplexMatrix,
    after: &ComplexMatrix,
    p: SchattenIndex,
    lip: f64,
) -> Result<TelescopingStep> {
    let direct = before - after;
    let expansion = argument_perturbation(f, slot, perturbed, fixed)?;
    let atoms = |h: &HermitianOperator| h.spectral_measure(DEFAULT_GROUP_TOL).map(|e| e.len());
    let term_count = atoms(perturbed.0)? * atoms(perturbed.1)? * atoms(fixed.0)? * atoms(fixed.1)?;
    let perturbation = norm(&(perturbed.0.matrix() - perturbed.1.matrix()), p)?;
    Ok(TelescopingStep {
        slot,
        norm: norm(&direct, p)?,
        perturbation,
        term_count,
        bound: term_count as f64 * lip * perturbation,
        expansion_error: max_abs(&(&direct - &expansion)),
    })
}
