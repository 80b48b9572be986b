use std::f64::consts::PI;

use num_complex::Complex64;
use opcalc::besov::{
    band_piece, besov_upper_bound, decompose, max_band, partition_check, psi_reference,
    tensor_bound_kappa, tensor_majorant, window_w, BesovBreakdown, GridFunction,
    DEFAULT_HALF_WIDTH, DEFAULT_MIN_BAND,
};
use opcalc::Error;
use proptest::prelude::*;

fn cosine_grid() -> GridFunction {
    // a whole number of periods so the sampled cosine is exactly one DFT mode
    GridFunction::sample(&|t: f64| Complex64::new(t.cos(), 0.0), 32.0 * PI, 12).unwrap()
}

#[test]
fn window_examples() {
    assert_eq!(window_w(0.5), 0.0);
    assert_eq!(window_w(1.0), 1.0);
    assert_eq!(window_w(2.0), 0.0);
}

#[test]
fn window_functional_equation_on_fine_grid() {
    let worst = (0..=10_000)
        .map(|i| 1.0 + i as f64 / 10_000.0)
        .map(|s| (window_w(s) - 1.0 + window_w(s / 2.0)).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-12, "{worst:e}");
}

#[test]
fn partition_examples() {
    assert_eq!(partition_check(1.0).unwrap(), 1.0);
    assert!((partition_check(3.0).unwrap() - 1.0).abs() <= 1e-10);
    assert!((partition_check(1024.0 * 1.3).unwrap() - 1.0).abs() <= 1e-10);
    for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(
            partition_check(bad),
            Err(Error::NonpositiveArgument(_))
        ));
    }
}

#[test]
fn partition_of_unity_on_log_grid() {
    let worst = (0..1000)
        .map(|i| 2f64.powf(-10.0 + 20.0 * i as f64 / 999.0))
        .map(|s| (partition_check(s).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn cosine_band_pieces() {
    let f = cosine_grid();
    let low = band_piece(&f, 0).unwrap();
    let diff = low.sub(&f).unwrap();
    assert!(diff.sup_norm() <= 1e-10, "{:e}", diff.sup_norm());
    let high = band_piece(&f, 3).unwrap();
    assert!(high.sup_norm() <= 1e-10, "{:e}", high.sup_norm());
}

#[test]
fn zero_function_has_zero_pieces() {
    let z = GridFunction::sample(&|_t: f64| Complex64::new(0.0, 0.0), 16.0, 10).unwrap();
    for (_, piece) in decompose(&z, -4, max_band(&z)).unwrap() {
        assert_eq!(piece.sup_norm(), 0.0);
    }
}

#[test]
fn band_above_nyquist_is_rejected() {
    let f = cosine_grid();
    let top = max_band(&f);
    assert!(band_piece(&f, top).is_ok());
    assert!(matches!(
        band_piece(&f, top + 1),
        Err(Error::BandAboveNyquist { .. })
    ));
}

#[test]
fn band_pieces_are_supported_in_their_bands() {
    let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, 12).unwrap();
    let xi = psi.frequencies();
    for n in -6..=max_band(&psi) {
        let spectrum = band_piece(&psi, n).unwrap().discrete_spectrum();
        let peak = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (low, high) = (2f64.powi(n - 1), 2f64.powi(n + 1));
        for (z, &k) in spectrum.iter().zip(&xi) {
            if k.abs() < low || k.abs() > high {
                assert!(
                    z.norm() <= 1e-12 * peak.max(f64::MIN_POSITIVE),
                    "band {n}, ξ = {k}"
                );
            }
        }
    }
}

#[test]
fn psi_examples() {
    let psi = psi_reference();
    assert_eq!(psi.value(0.5), 0.5);
    assert_eq!(psi.value(3.0), 0.0);
    assert_eq!(psi.value(1.0), 1.0);
    assert_eq!(psi.value(-1.0), -1.0);
    for i in 0..=200 {
        let t = -1.0 + i as f64 / 100.0;
        assert_eq!(psi.value(t), t);
    }
}

#[test]
fn psi_reconstructs_from_its_pieces() {
    let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, 14).unwrap();
    let mut sum = psi.zeros_like();
    for (_, piece) in decompose(&psi, DEFAULT_MIN_BAND, max_band(&psi)).unwrap() {
        sum.add_assign(&piece).unwrap();
    }
    let err = psi.sub(&sum).unwrap().sup_norm_within(0.5);
    assert!(err <= 1e-6, "{err:e}");
}

#[test]
fn besov_upper_bound_examples() {
    let one = GridFunction::sample(&|_t: f64| Complex64::new(1.0, 0.0), 8.0, 8).unwrap();
    assert_eq!(besov_upper_bound(&[(0, one)]).total, 1.0);
    assert_eq!(besov_upper_bound(&[]).total, 0.0);

    let totals: Vec<f64> = [14, 15]
        .iter()
        .map(|&m| {
            let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, m).unwrap();
            let top = max_band(&psi).min(6);
            besov_upper_bound(&decompose(&psi, DEFAULT_MIN_BAND, top).unwrap()).total
        })
        .collect();
    assert!(totals[0].is_finite());
    assert!(
        (totals[1] - totals[0]).abs() <= 0.02 * totals[0],
        "{totals:?}"
    );
}

#[test]
fn kappa_examples() {
    let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, 14).unwrap();
    assert_eq!(tensor_bound_kappa(0.0, &psi).unwrap(), 0.0);
    let k1 = tensor_bound_kappa(0.75, &psi).unwrap();
    let k2 = tensor_bound_kappa(1.5, &psi).unwrap();
    assert!((k2 - 2.0 * k1).abs() <= 1e-12 * k2);
    assert!(tensor_bound_kappa(-1.0, &psi).is_err());
    assert!(tensor_bound_kappa(f64::NAN, &psi).is_err());
}

#[test]
fn kappa_zero_is_stable_under_refinement() {
    let kappas: Vec<f64> = (14..=17)
        .map(|m| {
            tensor_bound_kappa(1.0, &psi_reference().sample(DEFAULT_HALF_WIDTH, m).unwrap())
                .unwrap()
        })
        .collect();
    for pair in kappas.windows(2) {
        assert!((pair[1] - pair[0]).abs() <= 0.02 * pair[0], "{kappas:?}");
    }
    // reference value of the majorant at the default grid
    assert!((kappas[2] - 3.759898533569407).abs() <= 1e-6, "{kappas:?}");
}

#[test]
fn psi_band_weights_decay() {
    let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, 16).unwrap();
    let bands = tensor_majorant(&psi).unwrap().bands.bands;
    let weights: Vec<f64> = bands.iter().map(|b| b.weighted).collect();
    let total: f64 = weights.iter().sum();
    assert!(weights[weights.len() - 1] < 0.01 * total, "{weights:?}");
    let late = &weights[4..];
    for pair in late.windows(2) {
        assert!(pair[1] <= pair[0], "{weights:?}");
    }
}

#[test]
fn breakdown_csv_dump() {
    let psi = psi_reference().sample(DEFAULT_HALF_WIDTH, 12).unwrap();
    let breakdown = besov_upper_bound(&decompose(&psi, -2, 2).unwrap());
    let csv = breakdown.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(BesovBreakdown::CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("-2,"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("breakdown.csv");
    breakdown
        .write_csv(std::fs::File::create(&path).unwrap())
        .unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), csv);
}

proptest! {
    #[test]
    fn window_stays_in_unit_interval(s in -4.0f64..8.0) {
        let w = window_w(s);
        prop_assert!((0.0..=1.0).contains(&w));
        if !(0.5..=2.0).contains(&s) {
            prop_assert_eq!(w, 0.0);
        }
    }

    #[test]
    fn partition_is_dyadic_invariant(s in 1e-6f64..1e6, shift in -8i32..8) {
        let a = partition_check(s).unwrap();
        let b = partition_check(s * 2f64.powi(shift)).unwrap();
        prop_assert!((a - 1.0).abs() <= 1e-10);
        prop_assert!((a - b).abs() <= 1e-10);
    }
}
