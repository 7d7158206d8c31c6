//! Heralded pair sources: emission statistics, joint spectral purity and
//! two-photon interference.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linalg::{svd_singular_values, ComplexMatrix};
use crate::rng::rng_from_seed;
use crate::scalar::Real;

/// Per-source parameters of a pulsed pair source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceParams {
    /// Pair-generation probability per pulse.
    pub epsilon: f64,
    /// Collection efficiency of each arm (raw or loss-corrected, caller's choice).
    pub eta_herald: f64,
    /// Detector efficiency.
    pub eta_detect: f64,
    /// Single-photon wavepacket overlap between independent sources.
    #[serde(default = "one")]
    pub indistinguishability: f64,
    /// Pulses per second.
    pub rep_rate: f64,
}

fn one() -> f64 {
    1.0
}

impl SourceParams {
    pub fn new(epsilon: f64, eta_herald: f64, eta_detect: f64, indistinguishability: f64, rep_rate: f64) -> Result<Self> {
        let p = Self { epsilon, eta_herald, eta_detect, indistinguishability, rep_rate };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("eta_herald", self.eta_herald),
            ("eta_detect", self.eta_detect),
            ("indistinguishability", self.indistinguishability),
        ] {
            ensure!((0.0..=1.0).contains(&v), Contract, "{name} = {v} outside [0, 1]");
        }
        ensure!(self.rep_rate > 0.0 && self.rep_rate.is_finite(), Contract, "rep_rate = {} must be positive", self.rep_rate);
        Ok(())
    }

    /// Probability per pulse that the idler of this source is detected.
    pub fn herald_probability(&self) -> f64 {
        self.epsilon * self.eta_herald * self.eta_detect
    }

    /// Probability that a heralded signal photon reaches the interferometer and
    /// is registered at its output.
    pub fn signal_detection_probability(&self) -> f64 {
        self.eta_herald * self.eta_detect
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceFile {
    source: Vec<SourceParams>,
}

/// Parses a TOML source list: one `[[source]]` table per source.
pub fn parse_source_config(text: &str) -> Result<Vec<SourceParams>> {
    let file: SourceFile = toml::from_str(text).map_err(|e| Error::Parse(format!("source config: {e}")))?;
    ensure!(!file.source.is_empty(), Contract, "source config lists no sources");
    for (i, s) in file.source.iter().enumerate() {
        s.validate().map_err(|e| Error::Contract(format!("source {i}: {e}")))?;
    }
    Ok(file.source)
}

/// Outcome of one pulse at one source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SourceOutcome {
    pub pair_created: bool,
    pub heralded: bool,
    /// Signal photon survived collection and entered the interferometer.
    pub signal_present: bool,
}

/// One pulse across all sources, drawing from `rng`.
///
/// Each source emits a pair with probability `epsilon`; given a pair the idler
/// is detected with probability `eta_herald * eta_detect` and, independently,
/// the signal survives collection with probability `eta_herald`. Detector loss
/// on the signal is applied at the interferometer outputs.
pub fn fire_sources_with<R: Rng + ?Sized>(params: &[SourceParams], rng: &mut R) -> Vec<SourceOutcome> {
    params
        .iter()
        .map(|p| {
            if rng.random::<f64>() >= p.epsilon {
                return SourceOutcome::default();
            }
            SourceOutcome {
                pair_created: true,
                heralded: rng.random::<f64>() < p.eta_herald * p.eta_detect,
                signal_present: rng.random::<f64>() < p.eta_herald,
            }
        })
        .collect()
}

/// One pulse, deterministic in `seed`.
pub fn fire_sources(params: &[SourceParams], seed: u64) -> Result<Vec<SourceOutcome>> {
    ensure!(!params.is_empty(), Contract, "no sources given");
    Ok(fire_sources_with(params, &mut rng_from_seed(seed)))
}

/// Joint spectral amplitude sampled on a square detuning grid.
#[derive(Clone, Debug)]
pub struct JointSpectrum<T> {
    /// `grid[(i, j)] = f(nu_s_i, nu_i_j)`.
    pub grid: ComplexMatrix<T>,
    /// Grid spacing in both axes.
    pub nu_step: T,
    /// Half-width of the grid, which spans `[-span, span]`.
    pub span: T,
    /// Set when the grid truncates a noticeable part of the spectrum.
    pub warning: Option<String>,
}

impl<T: Real> JointSpectrum<T> {
    /// Wraps a grid, rescaling so that `sum |f|^2 * step^2 == 1`.
    pub fn from_grid(grid: ComplexMatrix<T>, nu_step: T, span: T) -> Result<Self> {
        ensure!(grid.is_square(), Dimension, "joint spectrum grid must be square");
        ensure!(nu_step > T::zero(), Contract, "grid step must be positive");
        let mass = grid.frobenius_norm_sqr() * nu_step * nu_step;
        ensure!(mass > T::zero(), Contract, "joint spectrum is identically zero");
        let scale = T::one() / mass.sqrt();
        Ok(Self { grid: grid.scale(Complex::new(scale, T::zero())), nu_step, span, warning: None })
    }

    pub fn norm(&self) -> T {
        self.grid.frobenius_norm_sqr() * self.nu_step * self.nu_step
    }

    /// Detuning of grid index `i`.
    pub fn detuning(&self, i: usize) -> T {
        -self.span + self.nu_step * T::of(i as f64)
    }
}

/// Coefficients `(a, b, d)` of the amplitude exponent `-(a x^2 + 2 b x y + d y^2) / 2`.
fn gaussian_quadratic_form<T: Real>(sigma_pump: T, sigma_pm: T, angle: T) -> (T, T, T) {
    let two = T::of(2.0);
    let p = T::one() / (two * sigma_pump * sigma_pump);
    let q = T::one() / (two * sigma_pm * sigma_pm);
    let (s, c) = angle.sin_cos();
    (p + q * c * c, p + q * c * s, p + q * s * s)
}

/// Gaussian joint amplitude: pump envelope `exp(-(x+y)^2 / (4 sp^2))` times
/// phase-matching envelope `exp(-(x cos t + y sin t)^2 / (4 spm^2))`.
///
/// The grid is `grid_size` points per axis over `[-span, span]`. A warning is
/// attached when the grid is narrower than four standard deviations of the
/// joint intensity along either axis.
pub fn gaussian_jsa<T: Real>(sigma_pump: T, sigma_pm: T, correlation_angle: T, grid_size: usize, span: T) -> Result<JointSpectrum<T>> {
    ensure!(sigma_pump > T::zero() && sigma_pm > T::zero(), Contract, "envelope widths must be positive");
    ensure!(span > T::zero(), Contract, "span must be positive");
    ensure!(grid_size >= 16, Contract, "grid_size {grid_size} below the minimum of 16");
    let step = (span + span) / T::of((grid_size - 1) as f64);
    let (a, b, d) = gaussian_quadratic_form(sigma_pump, sigma_pm, correlation_angle);
    let half = T::of(0.5);
    let nu = |i: usize| -span + step * T::of(i as f64);
    let grid = ComplexMatrix::from_fn(grid_size, grid_size, |i, j| {
        let (x, y) = (nu(i), nu(j));
        Complex::new((-(a * x * x + (b + b) * x * y + d * y * y) * half).exp(), T::zero())
    });
    let mut jsa = JointSpectrum::from_grid(grid, step, span)?;

    // |f|^2 has precision matrix 2[[a, b], [b, d]].
    let det = a * d - b * b;
    jsa.warning = if det <= T::epsilon() * a * d {
        Some("joint intensity is unbounded along one direction; grid truncates it".into())
    } else {
        let four = T::of(4.0);
        let sx = (d / (det + det)).sqrt();
        let sy = (a / (det + det)).sqrt();
        (four * sx.max(sy) > span).then(|| {
            format!("span {span} smaller than 4 standard deviations ({}) of the joint intensity", four * sx.max(sy))
        })
    };
    Ok(jsa)
}

/// Correlation angle in `[-pi/4, 0)` at which the Gaussian amplitude factorises,
/// or `None` when `sigma_pm > sigma_pump / sqrt(2)` and no such angle exists.
pub fn factorable_angle<T: Real>(sigma_pump: T, sigma_pm: T) -> Option<T> {
    let r = sigma_pm / sigma_pump;
    let s = T::of(2.0) * r * r;
    let ok = sigma_pump > T::zero() && sigma_pm > T::zero() && s <= T::one() + T::of(4.0) * T::epsilon();
    ok.then(|| -T::of(0.5) * s.min(T::one()).asin())
}

/// Purity of a bipartite amplitude grid, `sum s^4 / (sum s^2)^2`.
pub fn grid_purity<T: Real>(grid: &ComplexMatrix<T>) -> Result<T> {
    let sv = svd_singular_values(grid);
    let s2: T = sv.iter().map(|&s| s * s).sum();
    ensure!(s2 > T::zero(), Contract, "purity of an all-zero grid");
    let s4: T = sv.iter().map(|&s| s * s * s * s).sum();
    Ok((s4 / (s2 * s2)).min(T::one()))
}

/// Heralded single-photon spectral purity from the Schmidt decomposition.
pub fn schmidt_purity<T: Real>(jsa: &JointSpectrum<T>) -> Result<T> {
    grid_purity(&jsa.grid)
}

/// HOM visibility expected between two identical independent heralded photons.
pub fn predicted_visibility<T: Real>(jsa: &JointSpectrum<T>) -> Result<T> {
    schmidt_purity(jsa)
}

/// Normalised coincidence probability at delay `tau`: `(1 - V exp(-sigma^2 tau^2)) / 2`.
pub fn hom_dip<T: Real>(visibility: T, sigma: T, tau: T) -> Result<T> {
    ensure!(visibility >= T::zero() && visibility <= T::one(), Contract, "visibility {visibility} outside [0, 1]");
    ensure!(sigma > T::zero(), Contract, "dip width must be positive");
    let half = T::of(0.5);
    Ok(half * (T::one() - visibility * (-(sigma * sigma * tau * tau)).exp()))
}

/// Finds the correlation angle in `bracket` at which the Gaussian JSA reaches
/// `target` purity, by bisection. The purity must straddle `target` at the two
/// ends of the bracket.
pub fn tune_correlation_angle<T: Real>(
    target: T,
    sigma_pump: T,
    sigma_pm: T,
    grid_size: usize,
    span: T,
    bracket: (T, T),
    tol: T,
) -> Result<(T, JointSpectrum<T>)> {
    let purity_at = |angle: T| -> Result<(T, JointSpectrum<T>)> {
        let jsa = gaussian_jsa(sigma_pump, sigma_pm, angle, grid_size, span)?;
        Ok((schmidt_purity(&jsa)?, jsa))
    };
    let (mut lo, mut hi) = bracket;
    let (p_lo, jsa_lo) = purity_at(lo)?;
    let (p_hi, jsa_hi) = purity_at(hi)?;
    ensure!(
        (p_lo - target) * (p_hi - target) <= T::zero(),
        Contract,
        "purity {p_lo} .. {p_hi} over the bracket does not straddle {target}"
    );
    if (p_lo - target).abs() <= tol {
        return Ok((lo, jsa_lo));
    }
    if (p_hi - target).abs() <= tol {
        return Ok((hi, jsa_hi));
    }
    let lo_above = p_lo > target;
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        let (p, jsa) = purity_at(mid)?;
        if (p - target).abs() <= tol || (hi - lo).abs() <= T::epsilon() {
            return Ok((mid, jsa));
        }
        if (p > target) == lo_above {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Data("bisection failed to converge".into()))
}
