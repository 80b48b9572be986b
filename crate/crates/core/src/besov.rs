//! Littlewood–Paley pieces on a periodized uniform grid and `B¹_{∞,1}`
//! surrogates built from them.
//!
//! The dyadic window `w` is supported in `[1/2, 2]` and satisfies
//! `w(s) = 1 − w(s/2)` on `[1, 2]`, so `Σ_n w(|ξ|/2^n) = 1` for `ξ ≠ 0`.
//! The piece `f_n = f * W_n` is the Fourier multiplier `w(|ξ|/2^n)` applied
//! to `f`, and the surrogate Besov norm is `Σ_n 2^n sup|f_n|`.
//!
//! Fourier transforms use `(𝓕f)(ξ) = ∫ f(x) e^{−ixξ} dx`, approximated on
//! the grid by the spacing times the discrete transform.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::moi::Symbol1;

/// Default half-width of the sampling interval `[−L, L]`.
pub const DEFAULT_HALF_WIDTH: f64 = 64.0;
/// Default `log2` of the sample count.
pub const DEFAULT_GRID_M: u32 = 16;
/// Lowest band index visited by default decompositions.
pub const DEFAULT_MIN_BAND: i32 = -20;

/// `exp(−1/x)` for `x > 0`, 0 otherwise.
fn flat_ramp(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, infinitely differentiable.
pub fn smooth_step(x: f64) -> f64 {
    let a = flat_ramp(x);
    let b = flat_ramp(1.0 - x);
    a / (a + b)
}

/// The dyadic window: rises on `[1/2, 1]`, falls on `[1, 2]` as the mirror
/// `1 − w(s/2)`, vanishes elsewhere.
pub fn window_w(s: f64) -> f64 {
    if (0.5..=1.0).contains(&s) {
        smooth_step(2.0 * s - 1.0)
    } else if s > 1.0 && s <= 2.0 {
        1.0 - smooth_step(s - 1.0)
    } else {
        0.0
    }
}

/// `2^n` exactly.
fn dyadic(n: i32) -> f64 {
    2f64.powi(n)
}

/// `Σ_{n∈ℤ} w(s/2^n)`, which should equal 1 for every `s > 0`.
pub fn partition_check(s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::NonpositiveArgument(s));
    }
    let k = s.log2().floor() as i32;
    Ok(((k - 2)..=(k + 2)).map(|n| window_w(s / dyadic(n))).sum())
}

/// Samples of a function on the periodized interval `[−L, L)` at the
/// `2^m` points `x_i = −L + i·2L/2^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    half_width: f64,
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_samples(half_width: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::NonpositiveArgument(half_width));
        }
        let n = samples.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument("grid samples must be finite".into()));
        }
        Ok(Self {
            half_width,
            samples,
        })
    }

    /// Samples `f` on `2^m` points of `[−L, L)`.
    pub fn sample<F: Symbol1>(f: &F, half_width: f64, m: u32) -> Result<Self> {
        if m == 0 || m > 30 {
            return Err(Error::InvalidArgument(format!(
                "grid exponent m must be in 1..=30, got {m}"
            )));
        }
        let n = 1usize << m;
        let h = 2.0 * half_width / n as f64;
        let samples = (0..n).map(|i| f.eval(-half_width + i as f64 * h)).collect();
        Self::from_samples(half_width, samples)
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            half_width: self.half_width,
            samples: vec![Complex64::new(0.0, 0.0); self.samples.len()],
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `log2` of the sample count.
    pub fn m(&self) -> u32 {
        self.samples.len().trailing_zeros()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples.len() as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.samples.len()).map(move |i| -self.half_width + i as f64 * h)
    }

    /// Largest representable angular frequency, `π / spacing`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Angular frequency of each DFT bin, in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.samples.len() as i64;
        let step = PI / self.half_width;
        (0..n)
            .map(|k| {
                let signed = if k <= n / 2 { k } else { k - n };
                signed as f64 * step
            })
            .collect()
    }

    /// Spacing times the forward DFT; approximates `𝓕f` at
    /// [`Self::frequencies`] up to the phase `e^{iξL}` of the grid origin.
    pub fn discrete_spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
        let h = self.spacing();
        buf.iter_mut().for_each(|z| *z *= h);
        buf
    }

    /// Applies the real Fourier multiplier `m(|ξ|)`.
    pub fn apply_multiplier<M: Fn(f64) -> f64>(&self, multiplier: M) -> Self {
        let n = self.samples.len();
        let mut buf = self.samples.clone();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut buf);
        for (z, xi) in buf.iter_mut().zip(self.frequencies()) {
            *z *= multiplier(xi.abs()) / n as f64;
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        Self {
            half_width: self.half_width,
            samples: buf,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sup over the samples with `|x| ≤ fraction · L`.
    pub fn sup_norm_within(&self, fraction: f64) -> f64 {
        let bound = fraction * self.half_width;
        self.points()
            .zip(&self.samples)
            .filter(|(x, _)| x.abs() <= bound)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            half_width: self.half_width,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        self.samples
            .iter_mut()
            .zip(&other.samples)
            .for_each(|(a, b)| *a += b);
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.samples.len() != other.samples.len() || self.half_width != other.half_width {
            return Err(Error::DimensionMismatch(format!(
                "grids ({}, L={}) and ({}, L={})",
                self.samples.len(),
                self.half_width,
                other.samples.len(),
                other.half_width
            )));
        }
        Ok(())
    }
}

/// Largest band index whose frequency range `[2^{n−1}, 2^{n+1}]` still
/// reaches below the grid's Nyquist frequency.
pub fn max_band(grid: &GridFunction) -> i32 {
    let nyq = grid.nyquist();
    let mut n = nyq.log2().ceil() as i32 + 1;
    while dyadic(n - 1) >= nyq {
        n -= 1;
    }
    n
}

/// The Littlewood–Paley piece `f_n`: multiplier `w(|ξ|/2^n)` on the grid.
pub fn band_piece(f: &GridFunction, n: i32) -> Result<GridFunction> {
    let (low, high) = (dyadic(n - 1), dyadic(n + 1));
    let nyquist = f.nyquist();
    if low >= nyquist {
        return Err(Error::BandAboveNyquist {
            band: n,
            low,
            high,
            nyquist,
        });
    }
    let scale = dyadic(n);
    Ok(f.apply_multiplier(|xi| window_w(xi / scale)))
}

/// All pieces `f_n` for `n` in `min_band..=max_band`.
pub fn decompose(
    f: &GridFunction,
    min_band: i32,
    max_band: i32,
) -> Result<Vec<(i32, GridFunction)>> {
    (min_band..=max_band)
        .map(|n| Ok((n, band_piece(f, n)?)))
        .collect()
}

/// Sup-norm of one band and its dyadic weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandNorm {
    pub n: i32,
    pub sup_norm: f64,
    pub weighted: f64,
}

/// Per-band `2^n sup|f_n|` and their sum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BesovBreakdown {
    pub bands: Vec<BandNorm>,
    pub total: f64,
}

impl BesovBreakdown {
    pub const CSV_HEADER: &'static str = "n,sup_norm,weighted";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for b in &self.bands {
            let _ = writeln!(out, "{},{},{}", b.n, b.sup_norm, b.weighted);
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Surrogate `B¹_{∞,1}` bound `Σ 2^n sup|g_n|` of a list of band pieces.
pub fn besov_upper_bound(pieces: &[(i32, GridFunction)]) -> BesovBreakdown {
    let bands: Vec<BandNorm> = pieces
        .iter()
        .map(|(n, g)| {
            let sup_norm = g.sup_norm();
            BandNorm {
                n: *n,
                sup_norm,
                weighted: dyadic(*n) * sup_norm,
            }
        })
        .collect();
    let total = bands.iter().map(|b| b.weighted).sum();
    BesovBreakdown { bands, total }
}

/// Smooth compactly supported function equal to `t` on `[−1, 1]`:
/// `ψ(t) = t χ(t)` with `χ ≡ 1` on `[−1, 1]` and `χ ≡ 0` off `(−2, 2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PsiReference;

impl PsiReference {
    pub fn cutoff(t: f64) -> f64 {
        let a = smooth_step(2.0 - t.abs());
        let b = smooth_step(t.abs() - 1.0);
        a / (a + b)
    }

    pub fn value(&self, t: f64) -> f64 {
        t * Self::cutoff(t)
    }

    pub fn sample(&self, half_width: f64, m: u32) -> Result<GridFunction> {
        GridFunction::sample(self, half_width, m)
    }
}

impl Symbol1 for PsiReference {
    fn eval(&self, t: f64) -> Complex64 {
        Complex64::new(self.value(t), 0.0)
    }
}

pub fn psi_reference() -> PsiReference {
    PsiReference
}

/// The 1-D data entering the bound on `‖φ ⊗ ψ‖_{B¹_{∞,1}(ℝ³)}`: the low-frequency
/// remainder `ψ♭ = ψ − Σ_{n≥0} ψ_n` and the weighted high bands.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorMajorant {
    pub flat_sup: f64,
    pub bands: BesovBreakdown,
}

impl TensorMajorant {
    /// `sup|ψ♭| + Σ_{n≥0} 2^n sup|ψ_n|`.
    pub fn total(&self) -> f64 {
        self.flat_sup + self.bands.total
    }
}

pub fn tensor_majorant(psi: &GridFunction) -> Result<TensorMajorant> {
    let top = max_band(psi);
    if top < 0 {
        return Err(Error::BandAboveNyquist {
            band: 0,
            low: 0.5,
            high: 2.0,
            nyquist: psi.nyquist(),
        });
    }
    let pieces = decompose(psi, 0, top)?;
    let mut high = psi.zeros_like();
    for (_, piece) in &pieces {
        high.add_assign(piece)?;
    }
    let flat = psi.sub(&high)?;
    Ok(TensorMajorant {
        flat_sup: flat.sup_norm(),
        bands: besov_upper_bound(&pieces),
    })
}

/// `phi_sup · (sup|ψ♭| + Σ_{n≥0} 2^n sup|ψ_n|)`.
pub fn tensor_bound_kappa(phi_sup: f64, psi: &GridFunction) -> Result<f64> {
    if !(phi_sup.is_finite() && phi_sup >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "phi_sup must be finite and nonnegative, got {phi_sup}"
        )));
    }
    Ok(phi_sup * tensor_majorant(psi)?.total())
}
