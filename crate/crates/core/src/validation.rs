//! Comparing sample streams with model distributions.
//!
//! Similarity is the Bhattacharyya coefficient `sum sqrt(p q)`, distance the
//! total-variation distance `sum |p - q| / 2`. Empirical distributions are
//! plain frequencies with no smoothing. Hypotheses are discriminated by the
//! cumulative log-likelihood ratio of the indistinguishable model against the
//! distinguishable one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::linalg::{ComplexMatrix, ModeOccupation};
use crate::sampling::{distinguishable_distribution, exact_distribution, OutcomeDistribution, SampleRecord};
use crate::scalar::Real;

fn normalisation_tol<T: Real>() -> f64 {
    1e-9f64.max(T::epsilon().as_f64() * 1e3)
}

fn check_pair<T: Real>(p: &[T], q: &[T]) -> Result<()> {
    ensure!(p.len() == q.len(), Contract, "distributions over {} and {} outcomes", p.len(), q.len());
    ensure!(!p.is_empty(), Contract, "empty outcome set");
    let tol = normalisation_tol::<T>();
    for (name, d) in [("p", p), ("q", q)] {
        ensure!(d.iter().all(|&x| x >= T::zero() && x.is_finite()), Contract, "{name} has negative or non-finite entries");
        let total: f64 = d.iter().map(|x| x.as_f64()).sum();
        ensure!((total - 1.0).abs() <= tol, Contract, "{name} sums to {total}");
    }
    Ok(())
}

/// Bhattacharyya coefficient of two distributions over one index set.
pub fn similarity<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    check_pair(p, q)?;
    let s: T = p.iter().zip(q).map(|(&a, &b)| (a * b).sqrt()).sum();
    Ok(s.min(T::one()))
}

/// Total-variation distance of two distributions over one index set.
pub fn tv_distance<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    check_pair(p, q)?;
    let d: T = p.iter().zip(q).map(|(&a, &b)| (a - b).abs()).sum();
    Ok((d * T::of(0.5)).min(T::one()))
}

/// Lines up observed counts with a model's outcome set, returning
/// `(empirical frequencies, model probabilities)`.
pub fn align_with_model(counts: &BTreeMap<ModeOccupation, u64>, model: &OutcomeDistribution<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let total: u64 = counts.values().sum();
    ensure!(total > 0, Contract, "no samples");
    if let Some(stray) = counts.keys().find(|k| !model.contains(k)) {
        return Err(Error::Contract(format!("observed outcome {stray} is outside the model's outcome set")));
    }
    let n = total as f64;
    Ok(model
        .iter()
        .map(|(k, q)| (counts.get(k).copied().unwrap_or(0) as f64 / n, q))
        .unzip())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Indistinguishable,
    Distinguishable,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Indistinguishable => "indistinguishable",
            Verdict::Distinguishable => "distinguishable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub similarity: Option<f64>,
    pub distance: Option<f64>,
    /// Cumulative `sum ln(q/p)` after each sample; `+/-inf` once a sample is
    /// impossible under one of the hypotheses.
    pub lr_trajectory: Vec<f64>,
    pub verdict: Verdict,
    pub samples_used: usize,
}

impl ValidationReport {
    pub fn final_log_ratio(&self) -> f64 {
        self.lr_trajectory.last().copied().unwrap_or(0.0)
    }
}

/// Sequential log-likelihood ratio of hypothesis `q` (indistinguishable)
/// against `p` (distinguishable).
///
/// A sample impossible under exactly one hypothesis settles the test for the
/// other and the trajectory stays at the matching infinity. The verdict reads
/// the final value against `+/- threshold`.
pub fn likelihood_ratio_test<Q, P>(
    samples: &[(ModeOccupation, ModeOccupation)],
    mut q_model: Q,
    mut p_model: P,
    threshold: f64,
) -> Result<ValidationReport>
where
    Q: FnMut(&ModeOccupation, &ModeOccupation) -> Result<f64>,
    P: FnMut(&ModeOccupation, &ModeOccupation) -> Result<f64>,
{
    ensure!(threshold > 0.0 && threshold.is_finite(), Contract, "threshold must be positive, got {threshold}");
    let mut trajectory = Vec::with_capacity(samples.len());
    let mut log_ratio = 0.0f64;
    for (i, (input, output)) in samples.iter().enumerate() {
        let q = q_model(input, output)?;
        let p = p_model(input, output)?;
        if q <= 0.0 && p <= 0.0 {
            return Err(Error::Data(format!("sample {i} ({input} -> {output}) is impossible under both hypotheses")));
        }
        if log_ratio.is_finite() {
            log_ratio = if p <= 0.0 {
                f64::INFINITY
            } else if q <= 0.0 {
                f64::NEG_INFINITY
            } else {
                log_ratio + (q / p).ln()
            };
        }
        trajectory.push(log_ratio);
    }
    let verdict = if log_ratio > threshold {
        Verdict::Indistinguishable
    } else if log_ratio < -threshold {
        Verdict::Distinguishable
    } else {
        Verdict::Inconclusive
    };
    Ok(ValidationReport { similarity: None, distance: None, lr_trajectory: trajectory, verdict, samples_used: samples.len() })
}

/// Indistinguishable and distinguishable output distributions for a set of inputs.
#[derive(Clone, Debug)]
pub struct HypothesisTable {
    models: BTreeMap<ModeOccupation, (OutcomeDistribution<f64>, OutcomeDistribution<f64>)>,
}

impl HypothesisTable {
    pub fn build<'a>(
        u: &ComplexMatrix<f64>,
        inputs: impl IntoIterator<Item = &'a ModeOccupation>,
        collisions: bool,
    ) -> Result<Self> {
        let inputs: Vec<ModeOccupation> = inputs.into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let models = inputs
            .into_par_iter()
            .map(|s| {
                let q = exact_distribution(u, &s, collisions)?;
                let p = distinguishable_distribution(u, &s, collisions)?;
                Ok((s, (q, p)))
            })
            .collect::<Result<_>>()?;
        Ok(Self { models })
    }

    fn entry(&self, input: &ModeOccupation) -> Result<&(OutcomeDistribution<f64>, OutcomeDistribution<f64>)> {
        self.models.get(input).ok_or_else(|| Error::Contract(format!("no model for input {input}")))
    }

    pub fn indistinguishable(&self, input: &ModeOccupation) -> Result<&OutcomeDistribution<f64>> {
        Ok(&self.entry(input)?.0)
    }

    pub fn distinguishable(&self, input: &ModeOccupation) -> Result<&OutcomeDistribution<f64>> {
        Ok(&self.entry(input)?.1)
    }

    /// Likelihood-ratio test of `samples` using the tables' models.
    pub fn likelihood_ratio_test(&self, samples: &[(ModeOccupation, ModeOccupation)], threshold: f64) -> Result<ValidationReport> {
        likelihood_ratio_test(
            samples,
            |s, t| Ok(self.indistinguishable(s)?.probability(t)),
            |s, t| Ok(self.distinguishable(s)?.probability(t)),
            threshold,
        )
    }
}

/// Per-trigger-pattern comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupValidation {
    pub trigger_pattern: ModeOccupation,
    pub samples: u64,
    pub similarity: f64,
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct AggregateValidation {
    pub groups: Vec<GroupValidation>,
    pub mean_similarity: f64,
    /// Sample standard deviation across groups.
    pub std_similarity: f64,
    pub mean_distance: f64,
    pub std_distance: f64,
    /// Similarity of the joint (input, output) frequencies against the model
    /// weighted by the observed input frequencies.
    pub pooled_similarity: f64,
    pub pooled_distance: f64,
    /// Log-likelihood-ratio test over all records, with group means as its
    /// similarity and distance.
    pub report: ValidationReport,
}

fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Validates post-selected scattershot records group by group against the
/// exact distribution of each group's input, and runs the pooled
/// likelihood-ratio test against distinguishable photons.
///
/// Records are put in canonical order first, so the result does not depend
/// on the order of `records`.
pub fn scattershot_aggregate_validation(
    records: &[SampleRecord],
    u: &ComplexMatrix<f64>,
    collisions: bool,
    threshold: f64,
) -> Result<AggregateValidation> {
    ensure!(!records.is_empty(), Contract, "no records to validate");
    let mut sorted: Vec<&SampleRecord> = records.iter().collect();
    sorted.sort();

    let mut groups: BTreeMap<&ModeOccupation, (&ModeOccupation, BTreeMap<ModeOccupation, u64>)> = BTreeMap::new();
    for r in &sorted {
        ensure!(
            r.output_pattern.photons() == r.trigger_pattern.photons(),
            Contract,
            "record at pulse {} is not post-selected ({} heralds, {} detected)",
            r.pulse_index,
            r.trigger_pattern.photons(),
            r.output_pattern.photons()
        );
        ensure!(
            collisions || r.output_pattern.is_collision_free(),
            Contract,
            "record at pulse {} has a collision output but the analysis is collision-free",
            r.pulse_index
        );
        let entry = groups.entry(&r.trigger_pattern).or_insert_with(|| (&r.input_pattern, BTreeMap::new()));
        ensure!(
            entry.0 == &r.input_pattern,
            Contract,
            "trigger pattern {} seen with inputs {} and {}",
            r.trigger_pattern,
            entry.0,
            r.input_pattern
        );
        *entry.1.entry(r.output_pattern.clone()).or_insert(0) += 1;
    }

    let table = HypothesisTable::build(u, groups.values().map(|(s, _)| *s), collisions)?;
    let group_list: Vec<_> = groups.into_iter().collect();
    let per_group: Vec<(GroupValidation, Vec<f64>, Vec<f64>)> = group_list
        .par_iter()
        .map(|(trigger, (input, counts))| {
            let model = table.indistinguishable(input)?;
            let (p, q) = align_with_model(counts, model)?;
            let g = GroupValidation {
                trigger_pattern: (*trigger).clone(),
                samples: counts.values().sum(),
                similarity: similarity(&p, &q)?,
                distance: tv_distance(&p, &q)?,
            };
            Ok((g, p, q))
        })
        .collect::<Result<_>>()?;

    let total = sorted.len() as f64;
    let mut joint_p = Vec::new();
    let mut joint_q = Vec::new();
    for (g, p, q) in &per_group {
        let w = g.samples as f64 / total;
        joint_p.extend(p.iter().map(|x| x * w));
        joint_q.extend(q.iter().map(|x| x * w));
    }
    let pooled_similarity = similarity(&joint_p, &joint_q)?;
    let pooled_distance = tv_distance(&joint_p, &joint_q)?;

    let groups: Vec<GroupValidation> = per_group.into_iter().map(|(g, _, _)| g).collect();
    let (mean_similarity, std_similarity) = mean_and_std(&groups.iter().map(|g| g.similarity).collect::<Vec<_>>());
    let (mean_distance, std_distance) = mean_and_std(&groups.iter().map(|g| g.distance).collect::<Vec<_>>());

    let samples: Vec<(ModeOccupation, ModeOccupation)> =
        sorted.iter().map(|r| (r.input_pattern.clone(), r.output_pattern.clone())).collect();
    let mut report = table.likelihood_ratio_test(&samples, threshold)?;
    report.similarity = Some(mean_similarity);
    report.distance = Some(mean_distance);

    Ok(AggregateValidation {
        groups,
        mean_similarity,
        std_similarity,
        mean_distance,
        std_distance,
        pooled_similarity,
        pooled_distance,
        report,
    })
}
