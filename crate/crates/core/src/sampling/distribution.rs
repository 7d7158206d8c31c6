use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{ensure, Error, Result};
use crate::linalg::{all_patterns, binomial, collision_free_patterns, transition_submatrix, ComplexMatrix, ModeOccupation};
use crate::permanent::permanent_ryser;
use crate::rng::rng_from_seed;
use crate::scalar::Real;

/// Largest photon number accepted by the exact enumerators.
pub const ENUMERATION_MAX_PHOTONS: usize = 6;
/// Largest outcome-space size accepted by the exact enumerators.
pub const ENUMERATION_MAX_OUTCOMES: f64 = 1e6;
/// Normalisation tolerance on a distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Probabilities over output patterns, keyed in lexicographic pattern order.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T> {
    outcomes: BTreeMap<ModeOccupation, T>,
}

impl<T: Real> OutcomeDistribution<T> {
    /// Validates non-negativity and normalisation.
    pub fn new(outcomes: BTreeMap<ModeOccupation, T>) -> Result<Self> {
        ensure!(!outcomes.is_empty(), Contract, "empty outcome set");
        let mut total = 0.0;
        for (k, p) in &outcomes {
            let p = p.as_f64();
            ensure!(p.is_finite() && p >= 0.0, Data, "outcome {k} has invalid probability {p}");
            total += p;
        }
        let tol = NORMALIZATION_TOL.max(T::epsilon().as_f64() * 1e3);
        ensure!((total - 1.0).abs() <= tol, Data, "probabilities sum to {total}");
        Ok(Self { outcomes })
    }

    /// Normalises non-negative weights.
    pub fn from_weights(weights: BTreeMap<ModeOccupation, T>) -> Result<Self> {
        let total: T = weights.values().copied().sum();
        ensure!(total > T::zero() && total.is_finite(), Data, "weights sum to {total}");
        Self::new(weights.into_iter().map(|(k, w)| (k, w / total)).collect())
    }

    pub fn point_mass(outcome: ModeOccupation) -> Self {
        Self { outcomes: BTreeMap::from([(outcome, T::one())]) }
    }

    /// Probability of `outcome`; zero for patterns outside the outcome set.
    pub fn probability(&self, outcome: &ModeOccupation) -> T {
        self.outcomes.get(outcome).copied().unwrap_or_else(T::zero)
    }

    pub fn contains(&self, outcome: &ModeOccupation) -> bool {
        self.outcomes.contains_key(outcome)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeOccupation, T)> {
        self.outcomes.iter().map(|(k, &p)| (k, p))
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &ModeOccupation> {
        self.outcomes.keys()
    }

    pub fn total(&self) -> T {
        self.outcomes.values().copied().sum()
    }
}

fn enumeration_guard(u_modes: usize, input: &ModeOccupation) -> Result<usize> {
    let n = input.photons();
    ensure!(n >= 1, Contract, "input carries no photons");
    ensure!(input.modes() == u_modes, Dimension, "input over {} modes, interferometer has {}", input.modes(), u_modes);
    let size = binomial(u_modes + n - 1, n);
    if n > ENUMERATION_MAX_PHOTONS || size > ENUMERATION_MAX_OUTCOMES {
        return Err(Error::Refused(format!(
            "exact enumeration of {n} photons over {u_modes} modes ({size} outcomes) exceeds the guard \
             (n <= {ENUMERATION_MAX_PHOTONS}, outcomes <= {ENUMERATION_MAX_OUTCOMES}); use a Monte-Carlo sampler"
        )));
    }
    Ok(n)
}

fn output_space(modes: usize, n: usize, collisions: bool) -> Vec<ModeOccupation> {
    if collisions {
        all_patterns(modes, n)
    } else {
        collision_free_patterns(modes, n)
    }
}

fn finish<T: Real>(weights: BTreeMap<ModeOccupation, T>, collisions: bool) -> Result<OutcomeDistribution<T>> {
    if collisions {
        OutcomeDistribution::new(weights)
    } else {
        OutcomeDistribution::from_weights(weights)
    }
}

/// Output distribution of indistinguishable photons: `|Perm(U_{S,T})|^2 / (prod s_i! prod t_j!)`.
///
/// With `collisions == false` only collision-free outputs are kept and the
/// result is renormalised over them.
pub fn exact_distribution<T: Real>(
    u: &ComplexMatrix<T>,
    input: &ModeOccupation,
    collisions: bool,
) -> Result<OutcomeDistribution<T>> {
    ensure!(u.is_square(), Dimension, "interferometer must be square");
    let n = enumeration_guard(u.rows(), input)?;
    let s_fact = input.factorial_product();
    let mut weights = BTreeMap::new();
    for out in output_space(u.rows(), n, collisions) {
        let sub = transition_submatrix(u, input, &out)?;
        let amp = permanent_ryser(&sub)?;
        let p = amp.norm_sqr() / T::of(s_fact * out.factorial_product());
        weights.insert(out, p);
    }
    finish(weights, collisions)
}

/// Output distribution of fully distinguishable photons:
/// `Perm(M_{S,T}) / prod t_j!` with `M_ij = |U_ij|^2`.
pub fn distinguishable_distribution<T: Real>(
    u: &ComplexMatrix<T>,
    input: &ModeOccupation,
    collisions: bool,
) -> Result<OutcomeDistribution<T>> {
    ensure!(u.is_square(), Dimension, "interferometer must be square");
    let n = enumeration_guard(u.rows(), input)?;
    let m = u.abs_squared();
    let mut weights = BTreeMap::new();
    for out in output_space(u.rows(), n, collisions) {
        let sub = transition_submatrix(&m, input, &out)?;
        let p = permanent_ryser(&sub)?.re.max(T::zero()) / T::of(out.factorial_product());
        weights.insert(out, p);
    }
    finish(weights, collisions)
}

/// Inverse-CDF sampler over a fixed distribution.
#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    outcomes: Vec<ModeOccupation>,
    cdf: Vec<f64>,
}

impl OutcomeSampler {
    pub fn new<T: Real>(dist: &OutcomeDistribution<T>) -> Self {
        let mut outcomes = Vec::with_capacity(dist.len());
        let mut cdf = Vec::with_capacity(dist.len());
        let mut acc = 0.0;
        for (k, p) in dist.iter() {
            let p = p.as_f64();
            if p <= 0.0 {
                continue;
            }
            acc += p;
            outcomes.push(k.clone());
            cdf.push(acc);
        }
        Self { outcomes, cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &ModeOccupation {
        let total = *self.cdf.last().expect("distribution has positive mass");
        let x = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= x).min(self.outcomes.len() - 1);
        &self.outcomes[idx]
    }
}

/// `shots` independent draws from `dist`, deterministic in `seed`.
pub fn sample_outputs<T: Real>(dist: &OutcomeDistribution<T>, shots: usize, seed: u64) -> Vec<ModeOccupation> {
    let sampler = OutcomeSampler::new(dist);
    let mut rng = rng_from_seed(seed);
    (0..shots).map(|_| sampler.sample(&mut rng).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_unitary;
    use num_complex::Complex;

    fn occ(v: &[u32]) -> ModeOccupation {
        ModeOccupation::new(v.to_vec())
    }

    fn beamsplitter() -> ComplexMatrix<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]).unwrap()
    }

    #[test]
    fn identity_gives_point_mass() {
        let u = ComplexMatrix::<f64>::identity(4);
        let s = occ(&[1, 0, 2, 0]);
        for dist in [exact_distribution(&u, &s, true).unwrap(), distinguishable_distribution(&u, &s, true).unwrap()] {
            assert!((dist.probability(&s) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hong_ou_mandel_suppression() {
        let d = exact_distribution(&beamsplitter(), &occ(&[1, 1]), true).unwrap();
        assert!(d.probability(&occ(&[1, 1])) < 1e-15);
        assert!((d.probability(&occ(&[2, 0])) - 0.5).abs() < 1e-14);
        assert!((d.probability(&occ(&[0, 2])) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn classical_coin_pair() {
        let d = distinguishable_distribution(&beamsplitter(), &occ(&[1, 1]), true).unwrap();
        assert!((d.probability(&occ(&[2, 0])) - 0.25).abs() < 1e-14);
        assert!((d.probability(&occ(&[0, 2])) - 0.25).abs() < 1e-14);
        assert!((d.probability(&occ(&[1, 1])) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fourier_cyclic_output() {
        let s = 1.0 / 3f64.sqrt();
        let f = ComplexMatrix::from_fn(3, 3, |j, k| Complex::from_polar(s, 2.0 * std::f64::consts::PI * (j * k) as f64 / 3.0));
        let d = exact_distribution(&f, &occ(&[1, 1, 1]), true).unwrap();
        assert!((d.probability(&occ(&[1, 1, 1])) - 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn normalisation_and_guards() {
        let u = haar_random_unitary::<f64>(6, 11).unwrap();
        let s = occ(&[1, 1, 1, 0, 0, 0]);
        let d = distinguishable_distribution(&u, &s, true).unwrap();
        assert_eq!(d.len(), 56);
        assert!((d.total() - 1.0).abs() < 1e-9);
        let nc = exact_distribution(&u, &s, false).unwrap();
        assert_eq!(nc.len(), 20);
        assert!((nc.total() - 1.0).abs() < 1e-12);
        let big = ModeOccupation::new(vec![1; 7]);
        let u7 = haar_random_unitary::<f64>(7, 1).unwrap();
        assert!(matches!(exact_distribution(&u7, &big, true), Err(Error::Refused(_))));
        assert!(matches!(exact_distribution(&u7, &ModeOccupation::vacuum(7), true), Err(Error::Contract(_))));
    }

    #[test]
    fn sampler_point_mass_and_zero_cells() {
        let pm = OutcomeDistribution::<f64>::point_mass(occ(&[0, 1]));
        assert!(sample_outputs(&pm, 100, 3).iter().all(|o| *o == occ(&[0, 1])));
        let hom = exact_distribution(&beamsplitter(), &occ(&[1, 1]), true).unwrap();
        let draws = sample_outputs(&hom, 10_000, 5);
        assert!(draws.iter().all(|o| *o != occ(&[1, 1])));
        assert_eq!(draws, sample_outputs(&hom, 10_000, 5));
    }

    #[test]
    fn uniform_chi_square() {
        let dist = OutcomeDistribution::<f64>::new(
            (0..4).map(|i| (ModeOccupation::from_modes(4, &[i]).unwrap(), 0.25)).collect(),
        )
        .unwrap();
        let shots = 100_000;
        let draws = sample_outputs(&dist, shots, 2024);
        let mut counts = BTreeMap::new();
        for d in draws {
            *counts.entry(d).or_insert(0usize) += 1;
        }
        let expected = shots as f64 / 4.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi^2 with 3 degrees of freedom
        let critical = 16.266;
        assert!(chi2 < critical, "chi2 = {chi2}");
    }
}
