//! Runs the invariant suite of every module and reports one status per item.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::besov::{
    band_piece, besov_upper_bound, decompose, max_band, partition_check, psi_reference,
    tensor_majorant, window_w, DEFAULT_GRID_M, DEFAULT_HALF_WIDTH, DEFAULT_MIN_BAND,
};
use crate::bounds::{
    finite_rank_chain_check, lipschitz_rank_bound_check, rank_estimate_check_pairs,
};
use crate::counterexample::{
    analyze_growth, build_instance_with, EpsilonRule, EtaEvaluation, SurrogateContext,
    ETA_TAYLOR_SWITCH, GROWTH_RTOL,
};
use crate::error::Result;
use crate::linalg::{
    max_abs, schatten_norm, ComplexMatrix, HermitianOperator, SchattenIndex, SpectralMeasure,
    DEFAULT_GROUP_TOL,
};
use crate::moi::{
    apply_function, apply_function_single, apply_function_triple, argument_perturbation,
    double_operator_integral, perturbation_via_divided_difference, perturbation_with_measures,
    triple_operator_integral, ArgumentSlot, DiagonalPolicy, Symbol3,
};
use crate::sampling::{
    complex_gaussian, random_hermitian, random_spectral_measure, random_unitary, seeded_rng,
    Oscillation, Polynomial, TripleTestFunction, DEFAULT_SEED,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Warn => "WARN",
            Self::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub module: &'static str,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for CheckItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}/{}: {}",
            self.status, self.module, self.name, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfcheckOptions {
    pub seed: u64,
    pub half_width: f64,
    pub grid_m: u32,
    /// Promote grid-resolution warnings to failures.
    pub strict: bool,
    pub eta: EtaEvaluation,
    pub n_list: Vec<usize>,
    pub p_list: Vec<SchattenIndex>,
    pub trials: usize,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            half_width: DEFAULT_HALF_WIDTH,
            grid_m: DEFAULT_GRID_M,
            strict: false,
            eta: EtaEvaluation::TaylorGuarded,
            n_list: vec![1, 2, 4, 8, 16, 32, 64],
            p_list: vec![
                SchattenIndex::ONE,
                SchattenIndex::Finite(1.5),
                SchattenIndex::TWO,
                SchattenIndex::Finite(3.0),
                SchattenIndex::Infinity,
            ],
            trials: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfcheckReport {
    pub items: Vec<CheckItem>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.items.iter().filter(|i| i.status == status).count()
    }

    pub fn item(&self, name: &str) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

type Outcome = Result<(Status, String)>;

fn verdict(ok: bool, detail: String) -> Outcome {
    Ok((if ok { Status::Pass } else { Status::Fail }, detail))
}

struct Runner {
    items: Vec<CheckItem>,
}

impl Runner {
    fn run(&mut self, module: &'static str, name: &'static str, check: impl FnOnce() -> Outcome) {
        let (status, detail) = check().unwrap_or_else(|e| (Status::Fail, format!("error: {e}")));
        self.items.push(CheckItem {
            module,
            name,
            status,
            detail,
        });
    }
}

/// Executes every item; items never abort the run.
pub fn run_selfcheck(opts: &SelfcheckOptions) -> SelfcheckReport {
    let mut r = Runner { items: Vec::new() };
    let seed = opts.seed;

    r.run("linalg", "schatten monotonicity", || {
        schatten_monotonicity(seed)
    });
    r.run("linalg", "unitary invariance", || unitary_invariance(seed));
    r.run("linalg", "frobenius identity", || frobenius_identity(seed));
    r.run("linalg", "finite-rank inequality", || {
        finite_rank(seed, opts.trials)
    });
    r.run("linalg", "spectral resolution", || {
        spectral_resolution(seed)
    });

    r.run("moi", "resolution collapse", || resolution_collapse(seed));
    r.run("moi", "diagonal independence", || {
        diagonal_independence(seed)
    });
    r.run("moi", "divided-difference exactness", || {
        divided_difference_exactness(seed)
    });
    r.run("moi", "argument-perturbation exactness", || {
        argument_perturbation_exactness(seed)
    });
    r.run("moi", "commuting consistency", || {
        commuting_consistency(seed)
    });
    r.run("moi", "brute-force equivalence", || {
        brute_force_equivalence(seed)
    });

    r.run("besov", "window functional equation", window_equation);
    r.run("besov", "partition of unity", partition_of_unity);
    r.run("besov", "band support", || band_support(opts));
    r.run("besov", "psi majorant stability", || psi_stability(opts));
    r.run("besov", "psi tail summability", || psi_tail(opts));

    r.run("counterexample", "eta taylor seam", || eta_seam(opts.eta));
    growth_items(&mut r, opts);
    r.run("counterexample", "epsilon scaling", || {
        epsilon_scaling(opts)
    });
    r.run("counterexample", "rank estimate for pairs", || {
        pairs(seed, opts.trials)
    });
    r.run("counterexample", "lipschitz bound for triples", || {
        lipschitz(seed, opts.trials)
    });

    SelfcheckReport { items: r.items }
}

fn sub_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = seeded_rng(seed);
    rng.set_stream(stream);
    rng
}

/// Random Hermitian matrix with spectrum of order one.
fn test_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    random_hermitian(dim, rng).scale(1.0 / (dim as f64).sqrt())
}

fn p_grid() -> [SchattenIndex; 6] {
    [
        SchattenIndex::ONE,
        SchattenIndex::Finite(1.5),
        SchattenIndex::TWO,
        SchattenIndex::Finite(3.0),
        SchattenIndex::Finite(4.0),
        SchattenIndex::Infinity,
    ]
}

fn schatten_monotonicity(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 1);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let (rows, cols) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let m = complex_gaussian(rows, cols, &mut rng);
        let norms = p_grid().map(|p| schatten_norm(&m, p));
        for w in norms.windows(2) {
            let (a, b) = (w[0].clone()?, w[1].clone()?);
            worst = worst.max(b - a - 1e-12 * a);
        }
    }
    verdict(
        worst <= 0.0,
        format!("max increase {worst:.3e} over 100 matrices"),
    )
}

fn unitary_invariance(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let dim = rng.random_range(1..=8);
        let m = complex_gaussian(dim, dim, &mut rng);
        let u = random_unitary(dim, &mut rng);
        let v = random_unitary(dim, &mut rng);
        let rotated = &u * &m * &v;
        for p in p_grid() {
            let a = schatten_norm(&m, p)?;
            let b = schatten_norm(&rotated, p)?;
            worst = worst.max((a - b).abs() / a.max(1.0));
        }
    }
    verdict(worst <= 1e-10, format!("max relative change {worst:.3e}"))
}

fn frobenius_identity(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = complex_gaussian(rng.random_range(1..=9), rng.random_range(1..=9), &mut rng);
        let direct = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max((schatten_norm(&m, SchattenIndex::TWO)? - direct).abs() / direct);
    }
    verdict(worst <= 1e-12, format!("max relative error {worst:.3e}"))
}

fn finite_rank(seed: u64, trials: usize) -> Outcome {
    let mut failures = 0;
    let mut total = 0;
    for p in [
        SchattenIndex::TWO,
        SchattenIndex::Finite(3.0),
        SchattenIndex::Finite(4.0),
        SchattenIndex::Infinity,
    ] {
        let rows = finite_rank_chain_check(p, trials, seed)?;
        total += rows.len();
        failures += rows.iter().filter(|r| !r.chain.holds()).count();
    }
    verdict(
        failures == 0,
        format!("{failures} violations in {total} trials"),
    )
}

fn spectral_resolution(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let dim = rng.random_range(1..=10);
        // repeated eigenvalues exercise the grouping
        let u = random_unitary(dim, &mut rng);
        let diag: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(-2i32..=2) as f64)
            .collect();
        let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            diag.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let h = HermitianOperator::from_matrix(&u * d * u.adjoint())?;
        let e = h.spectral_measure(DEFAULT_GROUP_TOL)?;
        let mut distinct = diag.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        if e.len() != distinct.len() {
            return verdict(
                false,
                format!("{} atoms, expected {}", e.len(), distinct.len()),
            );
        }
        worst = worst.max(e.invariant_violation(Some(&h)));
    }
    verdict(
        worst <= 1e-10,
        format!("max invariant violation {worst:.3e}"),
    )
}

fn resolution_collapse(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 5);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let dim = rng.random_range(1..=8);
        let e1 = random_spectral_measure(dim, 5, &mut rng);
        let e2 = random_spectral_measure(dim, 5, &mut rng);
        let t = complex_gaussian(dim, dim, &mut rng);
        let phi = |x: f64, _y: f64| Complex64::new(x.cos(), x.sin() * 0.5);
        let lhs = double_operator_integral(&phi, &e1, &t, &e2)?;
        let rhs = apply_function_single(&|x: f64| phi(x, 0.0), &e1)? * &t;
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    verdict(worst <= 1e-10, format!("max entry error {worst:.3e}"))
}

fn diagonal_independence(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 6);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let dim = rng.random_range(2..=8);
        // both measures use the same atom locations, so the diagonal is hit
        let ea = random_spectral_measure(dim, 4, &mut rng);
        let locations = ea.eigenvalues();
        let u = random_unitary(dim, &mut rng);
        let atoms = locations
            .iter()
            .zip(ea.atoms())
            .scan(0usize, |col, (&x, atom)| {
                let k = atom.multiplicity();
                let basis = u.columns(*col, k).into_owned();
                *col += k;
                Some((x, basis))
            })
            .collect();
        let eb = SpectralMeasure::from_atoms(dim, atoms)?;
        let diff = ea.reconstruct() - eb.reconstruct();
        let f = Polynomial::random(4, &mut rng);
        let zero = perturbation_with_measures(&f, DiagonalPolicy::Zero, &ea, &eb, &diff)?;
        for policy in [
            DiagonalPolicy::Constant(Complex64::new(7.0, -3.0)),
            DiagonalPolicy::CentralDifference { step: 1e-3 },
        ] {
            let other = perturbation_with_measures(&f, policy, &ea, &eb, &diff)?;
            worst = worst.max(max_abs(&(&other - &zero)));
        }
    }
    verdict(
        worst <= 1e-12,
        format!("max policy-to-policy difference {worst:.3e}"),
    )
}

fn divided_difference_exactness(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 7);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let dim = rng.random_range(1..=10);
        let a = test_hermitian(dim, &mut rng);
        let b = test_hermitian(dim, &mut rng);
        let err = if i % 2 == 0 {
            let f = Polynomial::random(rng.random_range(0..=4), &mut rng);
            max_abs(
                &(perturbation_via_divided_difference(&f, &a, &b)?
                    - (apply_function(&f, &a)? - apply_function(&f, &b)?)),
            )
        } else {
            let f = Oscillation { frequency: 1.0 };
            max_abs(
                &(perturbation_via_divided_difference(&f, &a, &b)?
                    - (apply_function(&f, &a)? - apply_function(&f, &b)?)),
            )
        };
        worst = worst.max(err);
    }
    verdict(
        worst <= 1e-9,
        format!("max entry error {worst:.3e} over 100 pairs"),
    )
}

fn argument_perturbation_exactness(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 8);
    let mut worst = 0.0f64;
    for slot in ArgumentSlot::ALL {
        for i in 0..100 {
            let dim = rng.random_range(1..=6);
            let [x1, x2, y, z] = std::array::from_fn(|_| test_hermitian(dim, &mut rng));
            let f = if i % 2 == 0 {
                TripleTestFunction::random_polynomial(rng.random_range(0..=3), &mut rng)
            } else {
                TripleTestFunction::random_plane(&mut rng)
            };
            let expansion = argument_perturbation(&f, slot, (&x1, &x2), (&y, &z))?;
            let args = |x: &HermitianOperator| -> [HermitianOperator; 3] {
                match slot {
                    ArgumentSlot::First => [x.clone(), y.clone(), z.clone()],
                    ArgumentSlot::Second => [y.clone(), x.clone(), z.clone()],
                    ArgumentSlot::Third => [y.clone(), z.clone(), x.clone()],
                }
            };
            let [p, q, s] = args(&x1);
            let [p2, q2, s2] = args(&x2);
            let direct =
                apply_function_triple(&f, &p, &q, &s)? - apply_function_triple(&f, &p2, &q2, &s2)?;
            worst = worst.max(max_abs(&(direct - expansion)));
        }
    }
    verdict(
        worst <= 1e-9,
        format!("max entry error {worst:.3e} over 300 instances"),
    )
}

fn commuting_consistency(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 9);
    let mut worst = 0.0f64;
    let f = TripleTestFunction::SinCosPlusZ;
    for _ in 0..30 {
        let dim = rng.random_range(1..=8);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..dim)
                .map(|_| rng.random_range(-2i32..=2) as f64 * 0.5)
                .collect()
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let out = apply_function_triple(
            &f,
            &HermitianOperator::from_real_diagonal(&a),
            &HermitianOperator::from_real_diagonal(&b),
            &HermitianOperator::from_real_diagonal(&c),
        )?;
        let expected = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                f.eval(a[i], b[i], c[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        worst = worst.max(max_abs(&(out - expected)));
    }
    verdict(worst <= 1e-12, format!("max entry error {worst:.3e}"))
}

/// `Σ_{j,k,l} Φ E_1 T_1 E_2 T_2 E_3` summed term by term over projections.
fn naive_triple<F: Symbol3>(
    phi: &F,
    e1: &SpectralMeasure,
    t1: &ComplexMatrix,
    e2: &SpectralMeasure,
    t2: &ComplexMatrix,
    e3: &SpectralMeasure,
) -> ComplexMatrix {
    let dim = e1.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for a in e1.atoms() {
        let pa = a.projection();
        for b in e2.atoms() {
            let left = &pa * t1 * b.projection() * t2;
            for c in e3.atoms() {
                acc += (&left * c.projection())
                    * phi.eval(a.eigenvalue(), b.eigenvalue(), c.eigenvalue());
            }
        }
    }
    acc
}

fn brute_force_equivalence(seed: u64) -> Outcome {
    let mut rng = sub_rng(seed, 10);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let dim = rng.random_range(1..=7);
        let [e1, e2, e3] = std::array::from_fn(|_| random_spectral_measure(dim, 5, &mut rng));
        let t1 = complex_gaussian(dim, dim, &mut rng);
        let t2 = complex_gaussian(dim, dim, &mut rng);
        let f = TripleTestFunction::random_plane(&mut rng);
        let fast = triple_operator_integral(&f, &e1, &t1, &e2, &t2, &e3)?;
        worst = worst.max(max_abs(&(fast - naive_triple(&f, &e1, &t1, &e2, &t2, &e3))));
    }
    verdict(
        worst <= 1e-10,
        format!("max entry error {worst:.3e} over 50 instances"),
    )
}

fn window_equation() -> Outcome {
    let k = 10_000;
    let worst = (0..=k)
        .map(|i| {
            let s = 1.0 + i as f64 / k as f64;
            (window_w(s) - 1.0 + window_w(s / 2.0)).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        worst <= 1e-12,
        format!("max |w(s) − 1 + w(s/2)| = {worst:.3e}"),
    )
}

fn partition_of_unity() -> Outcome {
    let k = 1000;
    let mut worst = 0.0f64;
    for i in 0..k {
        let s = 2f64.powf(-10.0 + 20.0 * i as f64 / (k - 1) as f64);
        worst = worst.max((partition_check(s)? - 1.0).abs());
    }
    verdict(
        worst <= 1e-10,
        format!("max deviation {worst:.3e} on {k} points"),
    )
}

fn downgrade(ok: bool, strict: bool, detail: String) -> Outcome {
    let status = match (ok, strict) {
        (true, _) => Status::Pass,
        (false, true) => Status::Fail,
        (false, false) => Status::Warn,
    };
    Ok((status, detail))
}

fn band_support(opts: &SelfcheckOptions) -> Outcome {
    let psi = psi_reference().sample(opts.half_width, opts.grid_m)?;
    let freqs = psi.frequencies();
    let scale = psi
        .discrete_spectrum()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for n in -4..=max_band(&psi) {
        let spectrum = band_piece(&psi, n)?.discrete_spectrum();
        let (low, high) = (2f64.powi(n - 1), 2f64.powi(n + 1));
        for (xi, z) in freqs.iter().zip(&spectrum) {
            if xi.abs() <= low || xi.abs() >= high {
                worst = worst.max(z.norm() / scale);
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("max relative out-of-band mass {worst:.3e}"),
    )
}

fn psi_stability(opts: &SelfcheckOptions) -> Outcome {
    let majorant = |m: u32| -> Result<(f64, f64)> {
        let psi = psi_reference().sample(opts.half_width, m)?;
        let kappa = tensor_majorant(&psi)?.total();
        let besov =
            besov_upper_bound(&decompose(&psi, DEFAULT_MIN_BAND, 6.min(max_band(&psi)))?).total;
        Ok((kappa, besov))
    };
    let (k0, b0) = majorant(opts.grid_m)?;
    let (k1, b1) = majorant(opts.grid_m + 1)?;
    let dk = (k1 - k0).abs() / k1;
    let db = (b1 - b0).abs() / b1;
    downgrade(
        dk < 0.02 && db < 0.02,
        opts.strict,
        format!("majorant {k0:.6} → {k1:.6} ({dk:.2e}), Besov sum {b0:.6} → {b1:.6} ({db:.2e}) for m = {} → {}", opts.grid_m, opts.grid_m + 1),
    )
}

/// Mass gained by the band sum when the grid resolves one more band, as a
/// fraction of the majorant.
fn psi_tail(opts: &SelfcheckOptions) -> Outcome {
    let bands = |m: u32| -> Result<(f64, f64)> {
        let t = tensor_majorant(&psi_reference().sample(opts.half_width, m)?)?;
        Ok((t.bands.total, t.total()))
    };
    let (b0, _) = bands(opts.grid_m)?;
    let (b1, total) = bands(opts.grid_m + 1)?;
    let tail = (b1 - b0).abs() / total;
    downgrade(
        tail < 0.01,
        opts.strict,
        format!("tail share {tail:.2e} at m = {}", opts.grid_m),
    )
}

fn eta_seam(eta: EtaEvaluation) -> Outcome {
    let x = ETA_TAYLOR_SWITCH;
    let below = eta.eval(x);
    let above = eta.eval(x * (1.0 + f64::EPSILON));
    let at_zero = eta.eval(0.0);
    let jump = (below - above).abs();
    verdict(
        at_zero == 1.0 && jump <= 1e-15,
        format!("eta(0) = {at_zero}, jump at switch {jump:.3e}"),
    )
}

fn growth_items(r: &mut Runner, opts: &SelfcheckOptions) {
    let mut ns = opts.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let instances: Result<Vec<_>> = ns
        .iter()
        .map(|&n| build_instance_with(n, opts.eta))
        .collect();

    r.run("counterexample", "gram fidelity", || {
        let mut worst = 0.0f64;
        for inst in instances.as_ref().map_err(Clone::clone)? {
            let d = inst.diagnostics()?;
            worst = worst.max(d.gram).max(d.unitarity).max(d.orthonormality);
        }
        verdict(
            worst <= 1e-12,
            format!("max Gram/unitarity deviation {worst:.3e}"),
        )
    });

    let analyses: Result<Vec<_>> = instances.and_then(|insts| {
        let ctx = SurrogateContext::new(opts.half_width, opts.grid_m)?;
        insts
            .iter()
            .map(|inst| analyze_growth(inst, 1.0, &ctx))
            .collect()
    });
    let analyses = match analyses {
        Ok(a) => a,
        Err(e) => {
            for name in [
                "exact blow-up",
                "factorization identity",
                "zero-operator path",
                "rank-one collapse",
                "bounded symbol",
                "bounded besov surrogate",
            ] {
                r.run("counterexample", name, || Err(e.clone()));
            }
            return;
        }
    };

    r.run("counterexample", "exact blow-up", || {
        let mut worst = 0.0f64;
        for g in &analyses {
            for &p in &opts.p_list {
                let rec = g.record(p);
                worst = worst.max((rec.ratio - rec.sqrt_n()).abs() / rec.sqrt_n());
            }
        }
        verdict(
            worst <= GROWTH_RTOL,
            format!("max relative |ratio − √N|/√N = {worst:.3e}"),
        )
    });
    r.run("counterexample", "factorization identity", || {
        let worst = analyses
            .iter()
            .map(|g| g.factorization_error)
            .fold(0.0, f64::max);
        verdict(worst <= 1e-10, format!("max entry error {worst:.3e}"))
    });
    r.run("counterexample", "zero-operator path", || {
        let worst = analyses
            .iter()
            .map(|g| g.zero_path_error)
            .fold(0.0, f64::max);
        verdict(worst <= 1e-12, format!("max |f(A, B, 0)| = {worst:.3e}"))
    });
    r.run("counterexample", "rank-one collapse", || {
        for g in &analyses {
            let root = (g.n as f64).sqrt();
            let s = g.phi_ab_singular_values()?;
            let big: Vec<f64> = s.into_iter().filter(|&v| v > 1e-10 * root).collect();
            if big.len() != 1 || (big[0] - root).abs() > 1e-8 * root {
                return verdict(
                    false,
                    format!("N = {}: singular values above cutoff {big:?}", g.n),
                );
            }
        }
        verdict(true, "φ(A, B) has a single singular value √N".into())
    });
    let variation = |values: &[f64]| {
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) / max
    };
    r.run("counterexample", "bounded symbol", || {
        let sups: Vec<f64> = analyses
            .iter()
            .filter(|g| g.n >= 4)
            .map(|g| g.phi_sup)
            .collect();
        if sups.is_empty() {
            return Ok((Status::Warn, "no N ≥ 4 in the sweep".into()));
        }
        let v = variation(&sups);
        verdict(
            v < 0.1,
            format!(
                "grid sup |φ_N| in [{:.6}, {:.6}], variation {v:.3e}",
                sups.iter().cloned().fold(f64::INFINITY, f64::min),
                sups.iter().cloned().fold(0.0, f64::max)
            ),
        )
    });
    r.run("counterexample", "bounded besov surrogate", || {
        let kappas: Vec<f64> = analyses
            .iter()
            .filter(|g| g.n >= 2)
            .map(|g| g.besov_surrogate)
            .collect();
        if kappas.is_empty() {
            return Ok((Status::Warn, "no N ≥ 2 in the sweep".into()));
        }
        let v = variation(&kappas);
        verdict(
            v < 0.1,
            format!("κ variation {v:.3e} while the ratio grows as √N"),
        )
    });
}

fn epsilon_scaling(opts: &SelfcheckOptions) -> Outcome {
    let ctx = SurrogateContext::new(opts.half_width, opts.grid_m)?;
    let ns = [4, 16, 64];
    let rule = EpsilonRule::InversePower(0.25);
    let rows = ns
        .iter()
        .map(|&n| {
            Ok(
                analyze_growth(&build_instance_with(n, opts.eta)?, rule.epsilon(n)?, &ctx)?
                    .record(SchattenIndex::TWO),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for r in &rows {
        let eps = (r.n as f64).powf(-0.25);
        worst = worst
            .max((r.perturbation - eps).abs())
            .max((r.lhs - eps * r.sqrt_n()).abs());
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].perturbation < w[0].perturbation && w[1].lhs > w[0].lhs);
    verdict(
        monotone && worst <= 1e-8,
        format!("max deviation from (ε, ε√N) {worst:.3e}"),
    )
}

fn pairs(seed: u64, trials: usize) -> Outcome {
    let mut failures = 0;
    let mut total = 0;
    let mut max_ratio = 0.0f64;
    for n in [2, 3, 4] {
        for p in [
            SchattenIndex::TWO,
            SchattenIndex::Finite(3.0),
            SchattenIndex::Infinity,
        ] {
            let report = rank_estimate_check_pairs(n, p, trials / 4, seed)?;
            total += report.trials.len();
            failures += report.trials.iter().filter(|t| !t.holds()).count();
            max_ratio = max_ratio.max(report.max_ratio().unwrap_or(0.0));
        }
    }
    verdict(
        failures == 0,
        format!("{failures} chain violations in {total} trials, max ratio {max_ratio:.4}"),
    )
}

fn lipschitz(seed: u64, trials: usize) -> Outcome {
    let mut failures = 0;
    let mut total = 0;
    let mut max_ratio = 0.0f64;
    for n in [2, 3, 4] {
        for p in [
            SchattenIndex::ONE,
            SchattenIndex::TWO,
            SchattenIndex::Infinity,
        ] {
            let report = lipschitz_rank_bound_check(n, p, trials / 4, seed)?;
            total += report.trials.len();
            failures += report.trials.iter().filter(|t| !t.holds()).count();
            max_ratio = max_ratio.max(report.max_ratio().unwrap_or(0.0));
        }
    }
    verdict(
        failures == 0,
        format!("{failures} violations in {total} trials, max ratio {max_ratio:.3e}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SelfcheckOptions {
        SelfcheckOptions {
            n_list: vec![1, 2, 4, 8],
            grid_m: 12,
            trials: 8,
            ..SelfcheckOptions::default()
        }
    }

    #[test]
    fn quick_run_passes() {
        let report = run_selfcheck(&quick());
        for item in &report.items {
            assert_ne!(item.status, Status::Fail, "{item}");
        }
        assert!(report.passed());
    }

    #[test]
    fn direct_eta_breaks_growth_items() {
        let report = run_selfcheck(&SelfcheckOptions {
            eta: EtaEvaluation::Direct,
            ..quick()
        });
        assert!(!report.passed());
        assert_eq!(report.item("eta taylor seam").unwrap().status, Status::Fail);
        assert_eq!(report.item("exact blow-up").unwrap().status, Status::Fail);
    }

    #[test]
    fn status_display() {
        assert_eq!(Status::Warn.to_string(), "WARN");
    }
}
