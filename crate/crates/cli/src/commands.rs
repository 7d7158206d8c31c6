use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use heralded::ghz::{
    estimate_coherence, estimate_population, fidelity_and_witness, outcome_label, simulate_campaign, BasisCounts,
    GhzModel,
};
use heralded::linalg::io::{format_matrix, parse_matrix};
use heralded::linalg::{binomial, check_unitary, haar_random_unitary, UNITARITY_TOL};
use heralded::permanent::{permanent_naive, permanent_parallel, permanent_ryser};
use heralded::rng::derive_seed;
use heralded::sampling::log::{format_sample_log, parse_sample_log};
use heralded::sampling::{expected_rate, scattershot_run, standard_run, ScattershotOptions};
use heralded::sources::{
    factorable_angle, gaussian_jsa, hom_dip, parse_source_config, schmidt_purity, tune_correlation_angle,
    SourceParams,
};
use heralded::validation::scattershot_aggregate_validation;
use heralded::{ComplexMatrix, ModeOccupation};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::{read_text, Context, Report, Session};

macro_rules! defaults {
    ($s:ident { $($field:ident: $value:expr),* $(,)? }) => {
        $( if $s.$field.is_none() { $s.$field = Some($value.into()); } )*
    };
}

fn finish(session: &Session, report: &Report, name: &str) -> CliResult<()> {
    print!("{}", report.text());
    session.write(name, report.text())
}

fn load_unitary(path: Option<&PathBuf>, modes: usize, seed: u64) -> CliResult<ComplexMatrix<f64>> {
    let u = match path {
        Some(p) => parse_matrix(&read_text(p)?)?,
        None => haar_random_unitary(modes, derive_seed(seed, "haar-unitary", 0))?,
    };
    if !check_unitary(&u, UNITARITY_TOL)? {
        return Err(CliError::contract(format!("interferometer matrix is not unitary within {UNITARITY_TOL:e}")));
    }
    Ok(u)
}

fn format_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re}")
    } else {
        format!("{re}{im:+}i")
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct PermanentArgs {
    /// Square matrix document.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// One of `ryser`, `naive`, `parallel`.
    #[arg(long)]
    pub method: Option<String>,
}

pub fn permanent(mut args: PermanentArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args { method: "ryser" });
    let session = ctx.session("permanent", &args)?;
    let path = args.matrix.as_ref().ok_or_else(|| CliError::contract("--matrix is required"))?;
    let a = parse_matrix::<f64>(&read_text(path)?)?;
    let method = args.method.as_deref().unwrap_or_default();
    let start = Instant::now();
    let value = match method {
        "ryser" => permanent_ryser(&a)?,
        "naive" => permanent_naive(&a)?,
        "parallel" => permanent_parallel(&a, ctx.threads)?,
        other => return Err(CliError::contract(format!("unknown method {other:?}; expected ryser, naive or parallel"))),
    };
    let elapsed = start.elapsed().as_secs_f64();
    // Drop the sign of negative zeros.
    let value = value + heralded::C64::new(0.0, 0.0);
    let mut report = Report::default();
    report.field("permanent", format_complex(value.re, value.im)).field("re", value.re).field("im", value.im);
    report.field("n", a.rows()).field("method", method);
    session.write("permanent.txt", report.text())?;
    print!("{}", report.text());
    println!("wall_time_s = {elapsed:.6}");
    Ok(())
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct RatesArgs {
    /// Number of sources.
    #[arg(long)]
    pub k: Option<usize>,
    /// Photon number.
    #[arg(long)]
    pub n: Option<usize>,
    /// Pair-creation probability per pulse.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Overall per-photon efficiency.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub rep_rate: Option<f64>,
    /// Report the scattershot rate rather than the fixed-input one.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub scattershot: Option<bool>,
}

pub fn rates(mut args: RatesArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args { k: 12usize, n: 3usize, eps: 0.01, eta: 0.5, rep_rate: 8e7, scattershot: false });
    let session = ctx.session("rates", &args)?;
    let (k, n, eps, eta, rep) = (args.k.unwrap(), args.n.unwrap(), args.eps.unwrap(), args.eta.unwrap(), args.rep_rate.unwrap());
    let scattershot = args.scattershot.unwrap();
    let standard = expected_rate(k, n, eps, eta, rep, false)?;
    let scatter = expected_rate(k, n, eps, eta, rep, true)?;
    let mut report = Report::default();
    report.field("k", k).field("n", n).field("combinations", binomial(k, n) as u64);
    report.field("mode", if scattershot { "scattershot" } else { "standard" });
    report.field("rate_hz", if scattershot { scatter } else { standard });
    report.field("standard_rate_hz", standard).field("scattershot_rate_hz", scatter);
    report.field("gain", if standard > 0.0 { scatter / standard } else { f64::NAN });
    finish(&session, &report, "rates.txt")
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct SampleArgs {
    /// Interferometer matrix document; a seeded Haar unitary is used if absent.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    /// Mode count of the Haar unitary.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Input occupation string, e.g. `111000000000`.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub shots: Option<usize>,
    /// Keep outputs with several photons in one mode.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub collisions: Option<bool>,
}

pub fn sample(mut args: SampleArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args { modes: 12usize, input: "111000000000", shots: 1000usize, collisions: true });
    let session = ctx.session("sample", &args)?;
    let input: ModeOccupation = args.input.as_deref().unwrap().parse()?;
    let u = load_unitary(args.unitary.as_ref(), args.modes.unwrap(), session.seed)?;
    let records = standard_run(&u, &input, args.shots.unwrap(), args.collisions.unwrap(), derive_seed(session.seed, "sample", 0))?;
    let distinct = records.iter().map(|r| &r.output_pattern).collect::<std::collections::BTreeSet<_>>().len();
    let mut report = Report::default();
    report.field("n", input.photons()).field("modes", u.rows()).field("input", &input);
    report.field("shots", records.len()).field("distinct_outputs", distinct);
    session.write("samples.csv", &format_sample_log(&records))?;
    session.write_raw("unitary.json", &format_matrix(&u, Some(session.json_header())))?;
    finish(&session, &report, "sample_report.txt")
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ScattershotArgs {
    /// Interferometer matrix document; a seeded Haar unitary is used if absent.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    /// Mode count of the Haar unitary, and the number of identical sources.
    #[arg(long)]
    pub modes: Option<usize>,
    /// TOML list of `[[source]]` tables, one per input mode.
    #[arg(long)]
    pub sources: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub eta_herald: Option<f64>,
    #[arg(long)]
    pub eta_detect: Option<f64>,
    #[arg(long)]
    pub rep_rate: Option<f64>,
    #[arg(long)]
    pub pulses: Option<u64>,
    /// Number of heralds that selects a pulse.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub collision_free_only: Option<bool>,
}

pub fn scattershot(mut args: ScattershotArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args {
        modes: 12usize, epsilon: 0.05, eta_herald: 0.9, eta_detect: 0.75, rep_rate: 8e7,
        pulses: 1_000_000u64, n: 3usize, collision_free_only: false,
    });
    let session = ctx.session("scattershot", &args)?;
    let sources = match &args.sources {
        Some(p) => parse_source_config(&read_text(p)?)?,
        None => {
            let s = SourceParams::new(args.epsilon.unwrap(), args.eta_herald.unwrap(), args.eta_detect.unwrap(), 1.0, args.rep_rate.unwrap())?;
            vec![s; args.modes.unwrap()]
        }
    };
    let u = load_unitary(args.unitary.as_ref(), sources.len(), session.seed)?;
    let options = ScattershotOptions { collision_free_only: args.collision_free_only.unwrap() };
    let n = args.n.unwrap();
    let run = scattershot_run(&u, &sources, args.pulses.unwrap(), n, derive_seed(session.seed, "scattershot", 0), options)?;
    let r = &run.report;
    let histogram: Vec<String> = r.herald_histogram.iter().map(u64::to_string).collect();
    let mut report = Report::default();
    report.field("n", r.n).field("k", sources.len()).field("pulses", r.pulses).field("retained_events", r.retained_events);
    report.field("rate_hz", r.rate_hz).field("predicted_rate_hz", r.predicted_rate_hz);
    report.field("combinations", binomial(sources.len(), n) as u64);
    report.field("distinct_trigger_patterns", r.distinct_trigger_patterns).field("lost_events", r.lost_events);
    report.field("herald_histogram", histogram.join(","));
    session.write("samples.csv", &format_sample_log(&run.records))?;
    session.write_raw("unitary.json", &format_matrix(&u, Some(session.json_header())))?;
    finish(&session, &report, "rate_report.txt")
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct GhzArgs {
    #[arg(long)]
    pub photons: Option<usize>,
    /// Extremal H/V population of the model state.
    #[arg(long)]
    pub population: Option<f64>,
    /// Off-diagonal coherence of the model state.
    #[arg(long)]
    pub coherence: Option<f64>,
    /// Coincidences per measurement setting.
    #[arg(long)]
    pub shots: Option<u64>,
}

fn counts_rows(csv: &mut String, counts: &BasisCounts<f64>) {
    use std::fmt::Write;
    for (&outcome, &count) in &counts.counts {
        let _ = writeln!(csv, "{},{},{count}", counts.basis, outcome_label(&counts.basis, counts.n_photons, outcome));
    }
}

pub fn ghz(mut args: GhzArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args { photons: 12usize, population: 0.732, coherence: 0.419, shots: 100_000u64 });
    let session = ctx.session("ghz", &args)?;
    let model = GhzModel::new(args.photons.unwrap(), args.population.unwrap(), args.coherence.unwrap())?;
    let (hv, thetas) = simulate_campaign(&model, args.shots.unwrap(), derive_seed(session.seed, "ghz", 0))?;
    let (p, sp) = estimate_population(&hv)?;
    let (c, sc) = estimate_coherence(&thetas)?;
    let w = fidelity_and_witness(p, sp, c, sc);
    let mut csv = String::from("basis,outcome,count\n");
    counts_rows(&mut csv, &hv);
    for t in &thetas {
        counts_rows(&mut csv, t);
    }
    let mut report = Report::default();
    report.field("photons", model.n_photons()).field("shots_per_setting", args.shots.unwrap());
    report.field("population", p).field("sigma_population", sp);
    report.field("coherence", c).field("sigma_coherence", sc);
    report.field("fidelity", w.fidelity).field("sigma_fidelity", w.sigma);
    report.field("significance", w.significance).field("genuine", w.genuine);
    session.write("ghz_counts.csv", &csv)?;
    finish(&session, &report, "ghz_summary.txt")
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct HomArgs {
    #[arg(long)]
    pub visibility: Option<f64>,
    /// Dip width parameter, in inverse delay units.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

pub fn hom(mut args: HomArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args { visibility: 0.96, sigma: 1.0, tau_max: 3.0, points: 121usize });
    let session = ctx.session("hom", &args)?;
    let (v, sigma, tau_max, points) = (args.visibility.unwrap(), args.sigma.unwrap(), args.tau_max.unwrap(), args.points.unwrap());
    if points < 2 || tau_max.is_nan() || tau_max <= 0.0 {
        return Err(CliError::contract("hom needs at least 2 points and a positive tau_max"));
    }
    let mut csv = String::from("tau,coincidence\n");
    for i in 0..points {
        let tau = -tau_max + 2.0 * tau_max * i as f64 / (points - 1) as f64;
        csv.push_str(&format!("{tau},{}\n", hom_dip(v, sigma, tau)?));
    }
    let mut report = Report::default();
    report.field("visibility", v).field("sigma", sigma).field("points", points);
    report.field("coincidence_at_zero", hom_dip(v, sigma, 0.0)?).field("coincidence_far", hom_dip(v, sigma, tau_max)?);
    session.write("hom.csv", &csv)?;
    finish(&session, &report, "hom_summary.txt")
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct JsaArgs {
    #[arg(long)]
    pub sigma_pump: Option<f64>,
    #[arg(long)]
    pub sigma_pm: Option<f64>,
    /// Correlation angle in radians; ignored when a target purity is given.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    /// Tune the angle by bisection until the purity reaches this value.
    #[arg(long)]
    pub target_purity: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the detuning grid.
    #[arg(long)]
    pub span: Option<f64>,
}

pub fn jsa(mut args: JsaArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args { sigma_pump: 1.0, sigma_pm: std::f64::consts::FRAC_1_SQRT_2, grid: 128usize, span: 6.0 });
    let (sp, spm, grid, span) = (args.sigma_pump.unwrap(), args.sigma_pm.unwrap(), args.grid.unwrap(), args.span.unwrap());
    let start = factorable_angle(sp, spm);
    if args.target_purity.is_none() && args.angle.is_none() {
        args.angle = Some(start.unwrap_or(0.0));
    }
    let session = ctx.session("jsa", &args)?;
    let (angle, jsa) = match args.target_purity {
        Some(target) => {
            let lo = start.ok_or_else(|| {
                CliError::contract(format!("no factorable angle for sigma_pm {spm} > sigma_pump / sqrt 2; tuning needs one"))
            })?;
            tune_correlation_angle(target, sp, spm, grid, span, (lo, 0.0), 1e-5)?
        }
        None => {
            let a = args.angle.unwrap();
            (a, gaussian_jsa(sp, spm, a, grid, span)?)
        }
    };
    let purity = schmidt_purity(&jsa)?;
    let mut csv = String::from("nu_signal,nu_idler,re,im\n");
    for i in 0..grid {
        for j in 0..grid {
            let z = jsa.grid[(i, j)];
            csv.push_str(&format!("{},{},{},{}\n", jsa.detuning(i), jsa.detuning(j), z.re, z.im));
        }
    }
    let mut report = Report::default();
    report.field("angle", angle).field("purity", purity).field("schmidt_number", 1.0 / purity);
    report.field("predicted_visibility", purity).field("grid", grid);
    if let Some(w) = &jsa.warning {
        eprintln!("warning: {w}");
        report.field("warning", format!("{w:?}"));
    }
    session.write("jsa.csv", &csv)?;
    finish(&session, &report, "jsa_summary.txt")
}

#[derive(Args, Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ValidateArgs {
    /// Sample log written by `sample` or `scattershot`.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Interferometer matrix document the samples were drawn with.
    #[arg(long)]
    pub unitary: Option<PathBuf>,
    /// Alternative hypothesis; only `distinguishable` is supported.
    #[arg(long)]
    pub hypothesis: Option<String>,
    /// Log-likelihood-ratio decision threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Compare against distributions that include collision outputs.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub collisions: Option<bool>,
}

pub fn validate(mut args: ValidateArgs, ctx: &Context) -> CliResult<()> {
    defaults!(args { hypothesis: "distinguishable", threshold: 1000f64.ln(), collisions: true });
    let session = ctx.session("validate", &args)?;
    if args.hypothesis.as_deref() != Some("distinguishable") {
        return Err(CliError::contract(format!("unsupported hypothesis {:?}", args.hypothesis.unwrap_or_default())));
    }
    let samples = args.samples.as_ref().ok_or_else(|| CliError::contract("--samples is required"))?;
    let unitary = args.unitary.as_ref().ok_or_else(|| CliError::contract("--unitary is required"))?;
    let records = parse_sample_log(&read_text(samples)?)?;
    let u = load_unitary(Some(unitary), 0, session.seed)?;
    let agg = scattershot_aggregate_validation(&records, &u, args.collisions.unwrap(), args.threshold.unwrap())?;
    let mut report = Report::default();
    report.field("samples_used", agg.report.samples_used).field("groups", agg.groups.len());
    report.field("mean_similarity", agg.mean_similarity).field("std_similarity", agg.std_similarity);
    report.field("mean_distance", agg.mean_distance).field("std_distance", agg.std_distance);
    report.field("pooled_similarity", agg.pooled_similarity).field("pooled_distance", agg.pooled_distance);
    report.field("final_log_ratio", agg.report.final_log_ratio()).field("verdict", agg.report.verdict);
    let mut csv = String::from("sample,log_ratio\n");
    for (i, l) in agg.report.lr_trajectory.iter().enumerate() {
        csv.push_str(&format!("{},{l}\n", i + 1));
    }
    session.write("lr_trajectory.csv", &csv)?;
    finish(&session, &report, "validation_report.txt")
}
