//! N-photon GHZ analysis.
//!
//! The state model keeps weight `P` on the two extremal diagonal elements
//! `|H..H><H..H|` and `|V..V><V..V|` (split evenly), spreads `1 - P` uniformly
//! over the remaining `2^N - 2` diagonal elements, and carries a single real
//! coherence `C/2` between the two extremal elements. Under this model the
//! equatorial parity observable `(cos t X + sin t Y)^N` has expectation
//! `C cos(N t)`.
//!
//! Outcomes are indexed by bitmask: bit `i` set means photon `i` was found in
//! `V` (H/V basis) or in the `-` eigenstate (equatorial basis).

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{ensure, Error, Result};
use crate::rng::derived_rng;
use crate::scalar::Real;

/// Largest photon number for which outcome distributions are enumerated.
pub const MAX_ENUMERATED_PHOTONS: usize = 20;

/// Phenomenological noisy GHZ state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzModel<T> {
    n_photons: usize,
    population: T,
    coherence: T,
}

impl<T: Real> GhzModel<T> {
    pub fn new(n_photons: usize, population: T, coherence: T) -> Result<Self> {
        ensure!(
            (2..=MAX_ENUMERATED_PHOTONS).contains(&n_photons),
            Contract,
            "photon number {n_photons} outside 2..={MAX_ENUMERATED_PHOTONS}"
        );
        ensure!(
            T::zero() <= coherence && coherence <= population && population <= T::one(),
            Contract,
            "need 0 <= C <= P <= 1, got P = {population}, C = {coherence}"
        );
        Ok(Self { n_photons, population, coherence })
    }

    pub fn n_photons(&self) -> usize {
        self.n_photons
    }

    pub fn population(&self) -> T {
        self.population
    }

    pub fn coherence(&self) -> T {
        self.coherence
    }

    fn outcomes(&self) -> usize {
        1usize << self.n_photons
    }
}

/// Measurement setting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Basis<T> {
    Hv,
    /// Every photon measured in `(|H> +/- e^{i theta}|V>)/sqrt2`.
    Theta(T),
}

impl<T: Real> fmt::Display for Basis<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Hv => write!(f, "HV"),
            Basis::Theta(t) => write!(f, "theta={t:.12}"),
        }
    }
}

/// Outcome string: one character per photon, `H`/`V` or `+`/`-`.
pub fn outcome_label<T>(basis: &Basis<T>, n_photons: usize, outcome: u64) -> String {
    let (zero, one) = match basis {
        Basis::Hv => ('H', 'V'),
        Basis::Theta(_) => ('+', '-'),
    };
    (0..n_photons).map(|i| if outcome >> i & 1 == 1 { one } else { zero }).collect()
}

pub fn parse_outcome_label(label: &str) -> Result<u64> {
    ensure!(label.len() <= 64, Parse, "outcome label longer than 64 photons");
    label.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        'H' | '+' => Ok(acc),
        'V' | '-' => Ok(acc | 1 << i),
        _ => Err(Error::Parse(format!("bad outcome character {c:?}"))),
    })
}

/// Registered coincidences for one measurement setting.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisCounts<T> {
    pub basis: Basis<T>,
    pub n_photons: usize,
    /// Outcome bitmask to number of events.
    pub counts: BTreeMap<u64, u64>,
}

impl<T: Real> BasisCounts<T> {
    pub fn new(basis: Basis<T>, n_photons: usize, counts: BTreeMap<u64, u64>) -> Result<Self> {
        ensure!((1..=64).contains(&n_photons), Contract, "photon number {n_photons} out of range");
        let limit = if n_photons == 64 { u64::MAX } else { (1u64 << n_photons) - 1 };
        ensure!(counts.keys().all(|&k| k <= limit), Contract, "outcome longer than {n_photons} photons");
        Ok(Self { basis, n_photons, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Merge counts from the same setting.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        ensure!(self.basis == other.basis && self.n_photons == other.n_photons, Contract, "cannot merge different settings");
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        Ok(())
    }
}

#[inline]
fn parity<T: Real>(outcome: usize) -> T {
    if outcome.count_ones().is_multiple_of(2) { T::one() } else { -T::one() }
}

/// H/V outcome probabilities, indexed by bitmask.
pub fn hv_outcome_distribution<T: Real>(model: &GhzModel<T>) -> Vec<T> {
    let size = model.outcomes();
    let extremal = model.population * T::of(0.5);
    let rest = (T::one() - model.population) / T::of((size - 2) as f64);
    let mut p = vec![rest; size];
    p[0] = extremal;
    p[size - 1] = extremal;
    p
}

/// Equatorial-basis outcome probabilities `(1 + parity * C cos(N theta)) / 2^N`.
pub fn theta_outcome_distribution<T: Real>(model: &GhzModel<T>, theta: T) -> Vec<T> {
    let size = model.outcomes();
    let m = theta_expectation(model, theta);
    let norm = T::of(size as f64);
    (0..size).map(|b| (T::one() + parity::<T>(b) * m) / norm).collect()
}

/// Model expectation of the parity observable at angle `theta`.
pub fn theta_expectation<T: Real>(model: &GhzModel<T>, theta: T) -> T {
    model.coherence * (T::of(model.n_photons as f64) * theta).cos()
}

/// Equatorial angle of setting `k`, `k pi / N`.
pub fn setting_angle<T: Real>(n_photons: usize, k: usize) -> T {
    T::PI() * T::of(k as f64) / T::of(n_photons as f64)
}

fn draw_counts<T: Real, R: Rng + ?Sized>(probs: &[T], shots: u64, rng: &mut R) -> BTreeMap<u64, u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p.as_f64().max(0.0);
        cdf.push(acc);
    }
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let x = rng.random::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= x).min(probs.len() - 1);
        *counts.entry(idx as u64).or_insert(0) += 1;
    }
    counts
}

/// Multinomial sample of `shots` coincidences in `basis`, from a stream keyed by `(seed, setting)`.
pub fn simulate_counts<T: Real>(model: &GhzModel<T>, basis: Basis<T>, shots: u64, seed: u64) -> Result<BasisCounts<T>> {
    ensure!(shots >= 1, Contract, "shots must be at least 1");
    let (probs, label) = match basis {
        Basis::Hv => (hv_outcome_distribution(model), "ghz-hv"),
        Basis::Theta(t) => (theta_outcome_distribution(model, t), "ghz-theta"),
    };
    let key = match basis {
        Basis::Hv => 0,
        Basis::Theta(t) => t.as_f64().to_bits(),
    };
    let mut rng = derived_rng(seed, label, key);
    BasisCounts::new(basis, model.n_photons, draw_counts(&probs, shots, &mut rng))
}

/// The full measurement campaign: one H/V setting plus the `N` equatorial
/// settings `theta_k = k pi / N`, each with `shots` events.
pub fn simulate_campaign<T: Real>(model: &GhzModel<T>, shots: u64, seed: u64) -> Result<(BasisCounts<T>, Vec<BasisCounts<T>>)> {
    let hv = simulate_counts(model, Basis::Hv, shots, seed)?;
    let thetas = (0..model.n_photons)
        .map(|k| simulate_counts(model, Basis::Theta(setting_angle(model.n_photons, k)), shots, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok((hv, thetas))
}

/// `(P, sigma_P)`: extremal fraction of the H/V counts with a binomial error.
pub fn estimate_population<T: Real>(counts: &BasisCounts<T>) -> Result<(T, T)> {
    ensure!(counts.basis == Basis::Hv, Contract, "population needs H/V-basis counts, got {}", counts.basis);
    let total = counts.total();
    ensure!(total >= 1, Contract, "no counts");
    let all_v = (1u64 << counts.n_photons) - 1;
    let extremal = counts.counts.get(&0).copied().unwrap_or(0) + counts.counts.get(&all_v).copied().unwrap_or(0);
    let n = T::of(total as f64);
    let p = T::of(extremal as f64) / n;
    Ok((p, (p * (T::one() - p) / n).sqrt()))
}

/// Empirical parity expectation of one setting and its binomial error.
pub fn parity_expectation<T: Real>(counts: &BasisCounts<T>) -> Result<(T, T)> {
    let total = counts.total();
    ensure!(total >= 1, Contract, "no counts");
    let n = T::of(total as f64);
    let signed: T = counts.counts.iter().map(|(&b, &c)| parity::<T>(b as usize) * T::of(c as f64)).sum();
    let m = signed / n;
    Ok((m, ((T::one() - m * m).max(T::zero()) / n).sqrt()))
}

/// `(C, sigma_C)` with `C = (1/N) sum_k (-1)^k <M_k>` over the settings
/// `theta_k = k pi / N`, `k = 0..N`. Each setting must appear exactly once.
pub fn estimate_coherence<T: Real>(settings: &[BasisCounts<T>]) -> Result<(T, T)> {
    ensure!(!settings.is_empty(), Contract, "no equatorial settings supplied");
    let n = settings[0].n_photons;
    ensure!(settings.iter().all(|s| s.n_photons == n), Contract, "settings disagree on photon number");
    ensure!(settings.len() == n, Contract, "expected {n} equatorial settings, got {}", settings.len());
    let mut seen = vec![false; n];
    let mut sum = T::zero();
    let mut var = T::zero();
    for s in settings {
        let theta = match s.basis {
            Basis::Theta(t) => t,
            Basis::Hv => return Err(Error::Contract("H/V counts passed as an equatorial setting".into())),
        };
        let k_real = theta.as_f64() * n as f64 / std::f64::consts::PI;
        let k = k_real.round();
        ensure!(
            (k_real - k).abs() < 1e-6 && k >= 0.0 && (k as usize) < n,
            Contract,
            "angle {theta} is not one of k pi / {n}"
        );
        let k = k as usize;
        ensure!(!seen[k], Contract, "setting k = {k} supplied twice");
        seen[k] = true;
        let (m, sigma) = parity_expectation(s)?;
        sum = if k.is_multiple_of(2) { sum + m } else { sum - m };
        var = var + sigma * sigma;
    }
    let nf = T::of(n as f64);
    Ok((sum / nf, var.sqrt() / nf))
}

/// Fidelity bound and genuine-multipartite-entanglement verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Witness<T> {
    pub fidelity: T,
    pub sigma: T,
    /// `fidelity > 1/2`.
    pub genuine: bool,
    /// Standard deviations above the 1/2 threshold.
    pub significance: T,
}

pub fn fidelity_and_witness<T: Real>(population: T, sigma_p: T, coherence: T, sigma_c: T) -> Witness<T> {
    let half = T::of(0.5);
    let fidelity = (population + coherence) * half;
    let sigma = half * (sigma_p * sigma_p + sigma_c * sigma_c).sqrt();
    let excess = fidelity - half;
    let significance = if sigma > T::zero() {
        excess / sigma
    } else if excess > T::zero() {
        T::infinity()
    } else if excess < T::zero() {
        T::neg_infinity()
    } else {
        T::zero()
    };
    Witness { fidelity, sigma, genuine: excess > T::zero(), significance }
}
