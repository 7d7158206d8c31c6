use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;

use super::distribution::{exact_distribution, OutcomeSampler};
use super::rates::model_retained_rate;
use crate::error::{ensure, Result};
use crate::linalg::{ComplexMatrix, ModeOccupation};
use crate::rng::derived_rng;
use crate::sources::{fire_sources_with, SourceOutcome, SourceParams};

/// Pulses simulated per independently seeded batch.
const BATCH_PULSES: u64 = 1 << 16;

/// One retained scattershot event.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SampleRecord {
    pub pulse_index: u64,
    /// Which sources heralded (one entry per source).
    pub trigger_pattern: ModeOccupation,
    /// Photons that entered the interferometer.
    pub input_pattern: ModeOccupation,
    /// Photons registered at the outputs.
    pub output_pattern: ModeOccupation,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ScattershotOptions {
    /// Drop retained events whose output has two or more photons in one mode.
    pub collision_free_only: bool,
}

/// Counting summary of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub n: usize,
    pub pulses: u64,
    pub retained_events: u64,
    pub rate_hz: f64,
    pub predicted_rate_hz: f64,
    /// `herald_histogram[j]` counts pulses in which exactly `j` sources heralded.
    pub herald_histogram: Vec<u64>,
    /// Pulses with `n` heralds but fewer than `n` photons registered.
    pub lost_events: u64,
    pub distinct_trigger_patterns: usize,
}

#[derive(Clone, Debug)]
pub struct ScattershotRun {
    pub records: Vec<SampleRecord>,
    pub report: RateReport,
}

struct Candidate {
    pulse_index: u64,
    trigger: ModeOccupation,
    input: ModeOccupation,
}

fn pattern_from(outcomes: &[SourceOutcome], pick: impl Fn(&SourceOutcome) -> bool) -> ModeOccupation {
    ModeOccupation::new(outcomes.iter().map(|o| u32::from(pick(o))).collect())
}

/// Full scattershot protocol: source `i` feeds input mode `i` of `u`.
///
/// Per pulse every source fires; if exactly `n_select` idlers herald, the
/// surviving heralded signal photons form the input pattern, an output is
/// drawn from the exact boson-sampling distribution for that input, and each
/// output photon is then registered with its mode's detector efficiency. The
/// event is retained when `n_select` photons are registered.
///
/// Pulses are simulated in batches with streams derived from `seed`, and each
/// candidate event draws from a stream keyed by its pulse index, so the result
/// does not depend on the number of worker threads.
pub fn scattershot_run(
    u: &ComplexMatrix<f64>,
    sources: &[SourceParams],
    pulses: u64,
    n_select: usize,
    seed: u64,
    options: ScattershotOptions,
) -> Result<ScattershotRun> {
    ensure!(u.is_square(), Dimension, "interferometer must be square");
    let k = sources.len();
    ensure!(k == u.rows(), Contract, "{k} sources for a {}-mode interferometer; one source per input mode is required", u.rows());
    ensure!(n_select >= 1 && n_select <= k, Contract, "n_select = {n_select} must lie in 1..={k}");
    for s in sources {
        s.validate()?;
    }
    let predicted_rate_hz = model_retained_rate(sources, n_select)?;

    let batches = pulses.div_ceil(BATCH_PULSES);
    let per_batch: Vec<(Vec<u64>, Vec<Candidate>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = derived_rng(seed, "scattershot-pulses", b);
            let mut hist = vec![0u64; k + 1];
            let mut cands = Vec::new();
            let start = b * BATCH_PULSES;
            let end = (start + BATCH_PULSES).min(pulses);
            for pulse in start..end {
                let out = fire_sources_with(sources, &mut rng);
                let heralds = out.iter().filter(|o| o.heralded).count();
                hist[heralds] += 1;
                if heralds == n_select {
                    cands.push(Candidate {
                        pulse_index: pulse,
                        trigger: pattern_from(&out, |o| o.heralded),
                        input: pattern_from(&out, |o| o.heralded && o.signal_present),
                    });
                }
            }
            (hist, cands)
        })
        .collect();

    let mut herald_histogram = vec![0u64; k + 1];
    let mut candidates = Vec::new();
    for (hist, cands) in per_batch {
        for (h, c) in herald_histogram.iter_mut().zip(hist) {
            *h += c;
        }
        candidates.extend(cands);
    }

    // Only inputs that still carry n_select photons can yield a retained event.
    let inputs: BTreeSet<ModeOccupation> =
        candidates.iter().filter(|c| c.input.photons() == n_select).map(|c| c.input.clone()).collect();
    let samplers: BTreeMap<ModeOccupation, OutcomeSampler> = inputs
        .into_par_iter()
        .map(|s| exact_distribution(u, &s, true).map(|d| (s, OutcomeSampler::new(&d))))
        .collect::<Result<_>>()?;

    let eta_detect: Vec<f64> = sources.iter().map(|s| s.eta_detect).collect();
    let outcomes: Vec<Option<SampleRecord>> = candidates
        .par_iter()
        .map(|c| {
            let sampler = samplers.get(&c.input)?;
            let mut rng = derived_rng(seed, "scattershot-event", c.pulse_index);
            let ideal = sampler.sample(&mut rng);
            let detected: Vec<u32> = ideal
                .counts()
                .iter()
                .zip(&eta_detect)
                .map(|(&t, &eta)| (0..t).filter(|_| rng.random::<f64>() < eta).count() as u32)
                .collect();
            let output = ModeOccupation::new(detected);
            (output.photons() == n_select).then(|| SampleRecord {
                pulse_index: c.pulse_index,
                trigger_pattern: c.trigger.clone(),
                input_pattern: c.input.clone(),
                output_pattern: output,
            })
        })
        .collect();

    let lost_events = outcomes.iter().filter(|o| o.is_none()).count() as u64;
    let records: Vec<SampleRecord> = outcomes
        .into_iter()
        .flatten()
        .filter(|r| !options.collision_free_only || r.output_pattern.is_collision_free())
        .collect();
    let distinct_trigger_patterns = records.iter().map(|r| &r.trigger_pattern).collect::<BTreeSet<_>>().len();
    let rep = sources[0].rep_rate;
    let retained_events = records.len() as u64;
    let report = RateReport {
        n: n_select,
        pulses,
        retained_events,
        rate_hz: if pulses > 0 { retained_events as f64 / pulses as f64 * rep } else { 0.0 },
        predicted_rate_hz,
        herald_histogram,
        lost_events,
        distinct_trigger_patterns,
    };
    Ok(ScattershotRun { records, report })
}

/// Standard boson sampling with a fixed input: `shots` lossless events, one
/// record per shot with the trigger pattern equal to the input.
pub fn standard_run(
    u: &ComplexMatrix<f64>,
    input: &ModeOccupation,
    shots: usize,
    collisions: bool,
    seed: u64,
) -> Result<Vec<SampleRecord>> {
    let dist = exact_distribution(u, input, collisions)?;
    let outputs = super::sample_outputs(&dist, shots, seed);
    Ok(outputs
        .into_iter()
        .enumerate()
        .map(|(i, output_pattern)| SampleRecord {
            pulse_index: i as u64,
            trigger_pattern: input.clone(),
            input_pattern: input.clone(),
            output_pattern,
        })
        .collect())
}
