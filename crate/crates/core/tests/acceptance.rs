//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line straight to
//! stderr so the verdicts show up even when output capture is on.

mod common;

use std::io::Write;
use std::time::Instant;

use common::{matrix_exp_i, matrix_polynomial, monomial_product, naive_triple, re};
use num_complex::Complex64;
use opcalc::besov::{
    band_piece, besov_upper_bound, decompose, max_band, partition_check, psi_reference,
    tensor_majorant, DEFAULT_HALF_WIDTH, DEFAULT_MIN_BAND,
};
use opcalc::bounds::lipschitz_rank_bound_check;
use opcalc::counterexample::{
    build_instance, epsilon_scaling_run, growth_sweep, EpsilonRule, SurrogateContext,
};
use opcalc::linalg::{max_abs, numerical_rank};
use opcalc::moi::{
    argument_perturbation, perturbation_via_divided_difference, triple_operator_integral,
    ArgumentSlot,
};
use opcalc::sampling::{
    complex_gaussian, random_hermitian, random_rank_matrix, random_spectral_measure, seeded_rng,
    Oscillation, Polynomial, TripleTestFunction,
};
use opcalc::{schatten_norm, ComplexMatrix, HermitianOperator, SchattenIndex};
use rand::Rng;

const N_SWEEP: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
const P_SWEEP: [SchattenIndex; 5] = [
    SchattenIndex::Finite(1.0),
    SchattenIndex::Finite(1.5),
    SchattenIndex::Finite(2.0),
    SchattenIndex::Finite(3.0),
    SchattenIndex::Infinity,
];

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{status}] criterion {id}: {name} ({detail})");
    assert!(pass, "criterion {id} failed: {detail}");
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    (hi - lo) / hi
}

#[test]
fn criterion_1_exact_blow_up() {
    let start = Instant::now();
    let records = growth_sweep(&N_SWEEP, &P_SWEEP, &SurrogateContext::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let worst = records
        .iter()
        .map(|r| (r.ratio - (r.n as f64).sqrt()).abs() / (r.n as f64).sqrt())
        .fold(0.0, f64::max);
    let pass = records.len() == 35 && worst <= 1e-8 && elapsed < 60.0;
    verdict(
        1,
        "ratio equals sqrt(N) over the sweep",
        pass,
        &format!(
            "{} records, max rel err {worst:.2e}, {elapsed:.2} s",
            records.len()
        ),
    );
}

#[test]
fn criterion_2_bounded_data_unbounded_ratio() {
    let ctx = SurrogateContext::default();
    let mut sups = Vec::new();
    let mut kappas = Vec::new();
    let mut ratios = Vec::new();
    for n in N_SWEEP {
        let sup = build_instance(n)
            .unwrap()
            .phi()
            .grid_sup(ctx.points_per_period);
        sups.push(sup);
        kappas.push(ctx.kappa(sup));
    }
    for r in growth_sweep(&N_SWEEP, &[SchattenIndex::TWO], &ctx).unwrap() {
        ratios.push(r.ratio);
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let growth = ratios[ratios.len() - 1] / ratios[0];
    let pass =
        spread(&sups) < 0.1 && spread(&kappas) < 0.1 && increasing && (growth - 8.0).abs() < 1e-7;
    verdict(
        2,
        "bounded symbol and surrogate, ratio grows",
        pass,
        &format!(
            "sup spread {:.2e}, kappa spread {:.2e}, kappa {:.6}, ratio growth {growth:.6}",
            spread(&sups),
            spread(&kappas),
            kappas[0]
        ),
    );
}

fn unit_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    random_hermitian(dim, rng).scale(1.0 / (dim as f64).sqrt())
}

fn slot_order(
    slot: ArgumentSlot,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    z: &ComplexMatrix,
) -> [ComplexMatrix; 3] {
    match slot {
        ArgumentSlot::First => [x.clone(), y.clone(), z.clone()],
        ArgumentSlot::Second => [y.clone(), x.clone(), z.clone()],
        ArgumentSlot::Third => [y.clone(), z.clone(), x.clone()],
    }
}

fn polynomial_oracle(terms: &[([u32; 3], f64)], m: &[ComplexMatrix; 3]) -> ComplexMatrix {
    let dim = m[0].nrows();
    terms
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, (e, c)| {
            acc + monomial_product(*e, &m[0], &m[1], &m[2]) * re(*c)
        })
}

/// Separable plane wave `e^{i(ω·x)}` on non-commuting arguments:
/// `e^{iω₁X} e^{iω₂Y} e^{iω₃Z}`.
fn plane_oracle(w: [f64; 3], m: &[ComplexMatrix; 3]) -> ComplexMatrix {
    let exp = |k: usize| matrix_exp_i(&(&m[k] * re(w[k])));
    exp(0) * exp(1) * exp(2)
}

#[test]
fn criterion_3_perturbation_formulas() {
    let mut rng = seeded_rng(2023);
    let mut worst_pair: f64 = 0.0;
    for i in 0..100 {
        let dim = rng.random_range(1..=10);
        let a = unit_hermitian(dim, &mut rng);
        let b = unit_hermitian(dim, &mut rng);
        let err = if i % 2 == 0 {
            let f = Polynomial::random(rng.random_range(0..=5), &mut rng);
            let got = perturbation_via_divided_difference(&f, &a, &b).unwrap();
            max_abs(
                &(got
                    - (matrix_polynomial(&f.coefficients, a.matrix())
                        - matrix_polynomial(&f.coefficients, b.matrix()))),
            )
        } else {
            let f = Oscillation {
                frequency: rng.random_range(-2.0..2.0),
            };
            let got = perturbation_via_divided_difference(&f, &a, &b).unwrap();
            let e = |m: &ComplexMatrix| matrix_exp_i(&(m * re(f.frequency)));
            max_abs(&(got - (e(a.matrix()) - e(b.matrix()))))
        };
        worst_pair = worst_pair.max(err);
    }

    let mut worst_triple: f64 = 0.0;
    for slot in ArgumentSlot::ALL {
        for i in 0..100 {
            let dim = rng.random_range(1..=10);
            let [x1, x2, y, z] = std::array::from_fn(|_| unit_hermitian(dim, &mut rng));
            let m1 = slot_order(slot, x1.matrix(), y.matrix(), z.matrix());
            let m2 = slot_order(slot, x2.matrix(), y.matrix(), z.matrix());
            let (f, expected) = if i % 2 == 0 {
                let f = TripleTestFunction::random_polynomial(rng.random_range(0..=3), &mut rng);
                let TripleTestFunction::Polynomial { terms } = &f else {
                    unreachable!()
                };
                let expected = polynomial_oracle(terms, &m1) - polynomial_oracle(terms, &m2);
                (f, expected)
            } else {
                let f = TripleTestFunction::random_plane(&mut rng);
                let TripleTestFunction::Plane { frequencies } = f else {
                    unreachable!()
                };
                let expected = plane_oracle(frequencies, &m1) - plane_oracle(frequencies, &m2);
                (f, expected)
            };
            let got = argument_perturbation(&f, slot, (&x1, &x2), (&y, &z)).unwrap();
            worst_triple = worst_triple.max(max_abs(&(got - expected)));
        }
    }
    let pass = worst_pair <= 1e-9 && worst_triple <= 1e-9;
    verdict(
        3,
        "perturbation formulas exact",
        pass,
        &format!("pairs max err {worst_pair:.2e}, triples max err {worst_triple:.2e} over 3x100"),
    );
}

#[test]
fn criterion_4_triple_integral_oracle() {
    let mut rng = seeded_rng(4);
    let mut worst: f64 = 0.0;
    let mut max_atoms = 0;
    for _ in 0..50 {
        let dim = rng.random_range(1..=10);
        let [e1, e2, e3] = std::array::from_fn(|_| random_spectral_measure(dim, 5, &mut rng));
        max_atoms = max_atoms.max(e1.len()).max(e2.len()).max(e3.len());
        let t1 = complex_gaussian(dim, dim, &mut rng);
        let t2 = complex_gaussian(dim, dim, &mut rng);
        let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let phi = move |x: f64, y: f64, z: f64| {
            Complex64::new((w[0] * x - y).cos() + w[3] * z * z, w[1] * x * y + w[2] * z)
        };
        let fast = triple_operator_integral(&phi, &e1, &t1, &e2, &t2, &e3).unwrap();
        worst = worst.max(max_abs(
            &(fast - naive_triple(phi, &e1, &t1, &e2, &t2, &e3)),
        ));
    }
    let pass = worst <= 1e-10 && max_atoms <= 5;
    verdict(
        4,
        "triple integral matches naive loop",
        pass,
        &format!("50 instances, max err {worst:.2e}, max atoms {max_atoms}"),
    );
}

#[test]
fn criterion_5_littlewood_paley() {
    let worst_partition = (0..1000)
        .map(|i| 2f64.powf(-10.0 + 20.0 * i as f64 / 999.0))
        .map(|s| (partition_check(s).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);

    let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, 13).unwrap();
    let xi = psi.frequencies();
    let mut worst_leak: f64 = 0.0;
    for n in -8..=max_band(&psi) {
        let spectrum = band_piece(&psi, n).unwrap().discrete_spectrum();
        let peak = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (low, high) = (2f64.powi(n - 1), 2f64.powi(n + 1));
        for (z, &k) in spectrum.iter().zip(&xi) {
            if (k.abs() < low || k.abs() > high) && peak > 0.0 {
                worst_leak = worst_leak.max(z.norm() / peak);
            }
        }
    }

    let surrogate = |m: u32| {
        let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, m).unwrap();
        let top = max_band(&psi).min(6);
        let bands = besov_upper_bound(&decompose(&psi, DEFAULT_MIN_BAND, top).unwrap()).total;
        (bands, tensor_majorant(&psi).unwrap().total())
    };
    let (b16, k16) = surrogate(16);
    let (b17, k17) = surrogate(17);
    let band_change = (b17 - b16).abs() / b16;
    let kappa_change = (k17 - k16).abs() / k16;

    let pass = worst_partition <= 1e-10
        && worst_leak <= 1e-12
        && band_change < 0.02
        && kappa_change < 0.02;
    verdict(
        5,
        "Littlewood-Paley partition and surrogate stability",
        pass,
        &format!(
            "partition err {worst_partition:.2e}, band leak {worst_leak:.2e}, \
             surrogate change {band_change:.2e}, kappa0 {k16:.6} change {kappa_change:.2e}"
        ),
    );
}

#[test]
fn criterion_6_lipschitz_bound_for_triples() {
    let mut failures = 0;
    let mut max_ratio: f64 = 0.0;
    for n in [2, 3, 4] {
        for p in [
            SchattenIndex::ONE,
            SchattenIndex::TWO,
            SchattenIndex::Infinity,
        ] {
            let report = lipschitz_rank_bound_check(n, p, 200, 6).unwrap();
            for t in &report.trials {
                let bound = (n as f64).powi(4) * t.lipschitz * t.perturbation_sum;
                if t.lhs > bound + 1e-9 || !t.holds() {
                    failures += 1;
                }
                max_ratio = max_ratio.max(t.ratio);
            }
        }
    }
    verdict(
        6,
        "N^4 Lipschitz bound for triples",
        failures == 0,
        &format!("9x200 trials, {failures} violations, max ratio {max_ratio:.3e}"),
    );
}

#[test]
fn criterion_7_finite_rank_chain() {
    let mut rng = seeded_rng(7);
    let mut failures = 0;
    let mut count = 0;
    for p in [
        SchattenIndex::Finite(2.0),
        SchattenIndex::Finite(3.0),
        SchattenIndex::Finite(4.0),
        SchattenIndex::Infinity,
    ] {
        for _ in 0..200 {
            let rows = rng.random_range(2..=12);
            let cols = rng.random_range(2..=12);
            let r = rng.random_range(1..=rows.min(cols));
            let m = random_rank_matrix(rows, cols, r, &mut rng);
            let rank = numerical_rank(&m).unwrap();
            let exponent = 0.5 - 1.0 / p.value();
            let hs = schatten_norm(&m, SchattenIndex::TWO).unwrap();
            let sp = schatten_norm(&m, p).unwrap();
            if rank != r || hs > (rank as f64).powf(exponent) * sp + 1e-12 {
                failures += 1;
            }
            count += 1;
        }
    }
    verdict(
        7,
        "finite-rank Schatten chain",
        failures == 0,
        &format!("{count} matrices, {failures} violations"),
    );
}

#[test]
fn criterion_8_epsilon_scaling() {
    let ns = [4, 16, 64, 256];
    let records = epsilon_scaling_run(
        &ns,
        EpsilonRule::InversePower(0.25),
        SchattenIndex::TWO,
        &SurrogateContext::default(),
    )
    .unwrap();
    let expected_pert = [0.5f64.sqrt(), 0.5, 0.125f64.sqrt(), 0.25];
    let expected_diff = [2f64.sqrt(), 2.0, 8f64.sqrt(), 4.0];
    let mut table = String::from("N,epsilon,perturbation,difference");
    let mut pass = records.len() == 4;
    for (i, r) in records.iter().enumerate() {
        let eps = (r.n as f64).powf(-0.25);
        table.push_str(&format!("\n{},{eps},{},{}", r.n, r.perturbation, r.lhs));
        pass &= (r.perturbation - expected_pert[i]).abs() <= 1e-8;
        pass &= (r.lhs - expected_diff[i]).abs() <= 1e-8;
        pass &= (r.lhs - eps * (r.n as f64).sqrt()).abs() <= 1e-8;
        pass &= (r.perturbation - eps).abs() <= 1e-8;
    }
    pass &= records
        .windows(2)
        .all(|w| w[1].perturbation < w[0].perturbation && w[1].lhs > w[0].lhs);
    let _ = writeln!(std::io::stderr().lock(), "{table}");
    verdict(
        8,
        "epsilon scaling",
        pass,
        "N = 4, 16, 64, 256 with epsilon = N^(-1/4)",
    );
}
