//! Module invariants, each run by a seeded proptest runner or, for the
//! statistical ones, over a fixed set of seeded trials.

use std::collections::BTreeMap;

use heralded::ghz::{
    estimate_coherence, estimate_population, hv_outcome_distribution, simulate_campaign, theta_expectation,
    theta_outcome_distribution, GhzModel,
};
use heralded::linalg::{haar_random_unitary, svd_singular_values, transition_submatrix, ComplexMatrix};
use heralded::permanent::{permanent_naive, permanent_ryser};
use heralded::rng::derived_rng;
use heralded::sampling::{
    distinguishable_distribution, exact_distribution, sample_outputs, scattershot_run, ScattershotOptions,
};
use heralded::sources::{fire_sources_with, gaussian_jsa, hom_dip, schmidt_purity, JointSpectrum, SourceParams};
use heralded::validation::{scattershot_aggregate_validation, similarity, tv_distance, HypothesisTable};
use heralded::{ModeOccupation, C64};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rand::seq::index::sample as choose_indices;
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::common::ginibre;

pub const CASES: u32 = 100;

pub type Property = (&'static str, fn() -> Result<(), String>);

pub const ALL: &[Property] = &[
    ("linalg: all-ones transition sub-matrix is U", all_ones_submatrix_is_u),
    ("linalg: Haar column norms", haar_column_norms),
    ("linalg: singular values of A and its adjoint", svd_adjoint_invariance),
    ("permanent: row swap", permanent_row_swap),
    ("permanent: transpose", permanent_transpose),
    ("permanent: row scaling", permanent_row_scaling),
    ("permanent: block law", permanent_block_law),
    ("permanent: Ryser vs naive", ryser_matches_naive),
    ("sources: purity under change of basis", purity_basis_invariance),
    ("sources: purity falls away from the factorable point", purity_monotone_sweep),
    ("sources: HOM dip even and monotone", hom_dip_shape),
    ("sources: herald rate law of large numbers", herald_rate_converges),
    ("ghz: distributions normalized", ghz_normalized),
    ("ghz: equatorial probabilities non-negative", ghz_non_negative),
    ("ghz: estimator closure", ghz_estimator_closure),
    ("ghz: period and antiperiod of M_theta", ghz_periodicity),
    ("sampling: exact distribution normalized", exact_normalized),
    ("sampling: permutation interferometer is a point mass", permutation_point_mass),
    ("sampling: single photon is classical", single_photon_classical),
    ("sampling: trigger patterns exchangeable", trigger_exchangeability),
    ("sampling: scattershot / standard rate ratio", scattershot_gain),
    ("validation: Bhattacharyya / TVD bounds", similarity_distance_bounds),
    ("validation: positive LR drift under the truth", lr_drift),
    ("validation: aggregate invariant under record order", aggregate_order_invariance),
];

fn check<S: Strategy>(seed: u64, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config =
        Config { cases: CASES, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() };
    TestRunner::new(config).run(&strategy, test).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn matrix(n: usize, seed: u64) -> ComplexMatrix<f64> {
    ginibre(n, &mut derived_rng(seed, "property-matrix", n as u64))
}

fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn all_ones_submatrix_is_u() -> Result<(), String> {
    check(1, (1usize..=12, any::<u64>()), |(m, seed)| {
        let u = haar_random_unitary::<f64>(m, seed).unwrap();
        let ones = ModeOccupation::new(vec![1; m]);
        let sub = transition_submatrix(&u, &ones, &ones).unwrap();
        prop_assert_eq!(sub, u);
        Ok(())
    })
}

fn haar_column_norms() -> Result<(), String> {
    check(2, (1usize..=16, any::<u64>()), |(m, seed)| {
        let u = haar_random_unitary::<f64>(m, seed).unwrap();
        for j in 0..m {
            let norm: f64 = u.column(j).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() <= 1e-10, "column {} has norm {}", j, norm);
        }
        Ok(())
    })
}

fn svd_adjoint_invariance() -> Result<(), String> {
    check(3, (1usize..=10, 1usize..=10, any::<u64>()), |(r, c, seed)| {
        let mut rng = derived_rng(seed, "property-rect", 0);
        let a = ComplexMatrix::from_fn(r, c, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let s = svd_singular_values(&a);
        let t = svd_singular_values(&a.adjoint());
        prop_assert_eq!(s.len(), t.len());
        for (x, y) in s.iter().zip(&t) {
            prop_assert!((x - y).abs() <= 1e-9, "{} vs {}", x, y);
        }
        Ok(())
    })
}

fn permanent_row_swap() -> Result<(), String> {
    check(4, (2usize..=8, any::<u64>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()), |(n, seed, i, j)| {
        let a = matrix(n, seed);
        let mut b = a.clone();
        b.swap_rows(i.index(n), j.index(n));
        let (pa, pb) = (permanent_ryser(&a).unwrap(), permanent_ryser(&b).unwrap());
        prop_assert!(rel_err(pb, pa) <= 1e-10, "{} vs {}", pa, pb);
        Ok(())
    })
}

fn permanent_transpose() -> Result<(), String> {
    check(5, (1usize..=8, any::<u64>()), |(n, seed)| {
        let a = matrix(n, seed);
        let (pa, pt) = (permanent_ryser(&a).unwrap(), permanent_ryser(&a.transpose()).unwrap());
        prop_assert!(rel_err(pt, pa) <= 1e-10, "{} vs {}", pa, pt);
        Ok(())
    })
}

fn permanent_row_scaling() -> Result<(), String> {
    check(6, (1usize..=8, any::<u64>(), any::<prop::sample::Index>(), -3.0..3.0f64, -3.0..3.0f64), |(n, seed, i, re, im)| {
        let a = matrix(n, seed);
        let c = C64::new(re, im);
        let mut b = a.clone();
        b.scale_row(i.index(n), c);
        let expected = permanent_ryser(&a).unwrap() * c;
        let got = permanent_ryser(&b).unwrap();
        prop_assert!((got - expected).norm() <= 1e-10 * expected.norm().max(1e-12), "{} vs {}", got, expected);
        Ok(())
    })
}

fn permanent_block_law() -> Result<(), String> {
    check(7, (1usize..=5, 1usize..=5, any::<u64>()), |(na, nb, seed)| {
        let a = matrix(na, seed);
        let b = matrix(nb, seed ^ 0x9e37_79b9);
        let joint = permanent_ryser(&ComplexMatrix::block_diag(&a, &b)).unwrap();
        let product = permanent_ryser(&a).unwrap() * permanent_ryser(&b).unwrap();
        prop_assert!(rel_err(joint, product) <= 1e-10, "{} vs {}", joint, product);
        Ok(())
    })
}

fn ryser_matches_naive() -> Result<(), String> {
    check(8, (1usize..=8, any::<u64>()), |(n, seed)| {
        let a = matrix(n, seed);
        let (r, nv) = (permanent_ryser(&a).unwrap(), permanent_naive(&a).unwrap());
        prop_assert!(rel_err(r, nv) <= 1e-10, "{} vs {}", r, nv);
        Ok(())
    })
}

fn purity_basis_invariance() -> Result<(), String> {
    check(9, (16usize..=40, 0.5..2.0f64, 0.3..1.5f64, -1.5..1.5f64, any::<u64>(), any::<bool>()), |(g, sp, spm, angle, seed, left)| {
        let jsa = gaussian_jsa(sp, spm, angle, g, 6.0).unwrap();
        let u = haar_random_unitary::<f64>(g, seed).unwrap();
        let rotated = if left { u.matmul(&jsa.grid) } else { jsa.grid.matmul(&u) }.unwrap();
        let other = JointSpectrum::from_grid(rotated, jsa.nu_step, jsa.span).unwrap();
        let (p, q) = (schmidt_purity(&jsa).unwrap(), schmidt_purity(&other).unwrap());
        prop_assert!((p - q).abs() <= 1e-9, "{} vs {}", p, q);
        Ok(())
    })
}

fn purity_monotone_sweep() -> Result<(), String> {
    // The factorable angle solves sin(2 theta) = -2 (sigma_pm / sigma_p)^2.
    check(10, (0.6..1.6f64, 0.4..0.7f64), |(sp, ratio)| {
        let spm = sp * ratio;
        let start = -0.5 * (2.0 * ratio * ratio).asin();
        let span = 6.0 * sp;
        let mut last = f64::INFINITY;
        for j in 0..=6 {
            let angle = start * (1.0 - j as f64 / 6.0);
            let p = schmidt_purity(&gaussian_jsa(sp, spm, angle, 96, span).unwrap()).unwrap();
            prop_assert!(p < last, "purity {} at {} after {}", p, angle, last);
            last = p;
        }
        Ok(())
    })
}

fn hom_dip_shape() -> Result<(), String> {
    check(11, (0.0..=1.0f64, 0.01..10.0f64, 0.0..5.0f64, 0.0..1.0f64), |(v, sigma, tau, step)| {
        let here = hom_dip(v, sigma, tau).unwrap();
        prop_assert_eq!(here, hom_dip(v, sigma, -tau).unwrap());
        prop_assert!(hom_dip(v, sigma, tau + step).unwrap() >= here);
        Ok(())
    })
}

fn herald_rate_converges() -> Result<(), String> {
    check(12, (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, any::<u64>()), |(eps, eta_h, eta_d, seed)| {
        let params = vec![SourceParams::new(eps, eta_h, eta_d, 1.0, 8e7).unwrap(); 2];
        let pulses = 1_000_000u64;
        let mut heralds = [0u64; 2];
        let mut rng = derived_rng(seed, "property-herald", 0);
        for _ in 0..pulses {
            for (h, o) in heralds.iter_mut().zip(fire_sources_with(&params, &mut rng)) {
                *h += u64::from(o.heralded);
            }
        }
        let p = eps * eta_h * eta_d;
        let sigma = (p * (1.0 - p) / pulses as f64).sqrt();
        for h in heralds {
            let rate = h as f64 / pulses as f64;
            prop_assert!((rate - p).abs() <= 5.0 * sigma + 1e-12, "rate {} vs {}", rate, p);
        }
        Ok(())
    })
}

fn ghz_model() -> impl Strategy<Value = (usize, f64, f64)> {
    (2usize..=14, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(n, p, frac)| (n, p, p * frac))
}

fn ghz_normalized() -> Result<(), String> {
    check(13, (ghz_model(), -7.0..7.0f64), |((n, p, c), theta)| {
        let model = GhzModel::new(n, p, c).unwrap();
        let hv: f64 = hv_outcome_distribution(&model).iter().sum();
        let th: f64 = theta_outcome_distribution(&model, theta).iter().sum();
        prop_assert!((hv - 1.0).abs() <= 1e-12 && (th - 1.0).abs() <= 1e-12, "{} {}", hv, th);
        Ok(())
    })
}

fn ghz_non_negative() -> Result<(), String> {
    check(14, (ghz_model(), -7.0..7.0f64, 1.0001..3.0f64), |((n, p, c), theta, too_big)| {
        let model = GhzModel::new(n, p, c).unwrap();
        prop_assert!(theta_outcome_distribution(&model, theta).iter().all(|&x| x >= 0.0));
        prop_assert!(hv_outcome_distribution(&model).iter().all(|&x| x >= 0.0));
        prop_assert!(GhzModel::new(n, too_big, too_big).is_err());
        Ok(())
    })
}

fn ghz_estimator_closure() -> Result<(), String> {
    let points: [(usize, f64, f64); 3] = [(12, 0.732, 0.419), (4, 0.9, 0.85), (7, 0.5, 0.1)];
    for (i, &(n, p, c)) in points.iter().enumerate() {
        let model = GhzModel::new(n, p, c).unwrap();
        let mut within = 0;
        for t in 0..100u64 {
            let (hv, thetas) = simulate_campaign(&model, 100_000, 1000 * i as u64 + t).map_err(|e| e.to_string())?;
            let (p_hat, sp) = estimate_population(&hv).map_err(|e| e.to_string())?;
            let (c_hat, sc) = estimate_coherence(&thetas).map_err(|e| e.to_string())?;
            if (p_hat - p).abs() <= 5.0 * sp && (c_hat - c).abs() <= 5.0 * sc {
                within += 1;
            }
        }
        ensure(within >= 99, || format!("N={n} P={p} C={c}: only {within}/100 trials within 5 sigma"))?;
    }
    Ok(())
}

fn ghz_periodicity() -> Result<(), String> {
    check(15, (ghz_model(), -7.0..7.0f64), |((n, p, c), theta)| {
        let model = GhzModel::new(n, p, c).unwrap();
        let nf = n as f64;
        let m = theta_expectation(&model, theta);
        let period = theta_expectation(&model, theta + 2.0 * std::f64::consts::PI / nf);
        let shifted = theta_expectation(&model, theta + std::f64::consts::PI / nf);
        prop_assert!((period - m).abs() <= 1e-12 && (shifted + m).abs() <= 1e-12, "{} {} {}", m, period, shifted);
        Ok(())
    })
}

fn random_input(m: usize, n: usize, seed: u64) -> ModeOccupation {
    let mut rng = derived_rng(seed, "property-input", 0);
    let modes: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
    ModeOccupation::from_modes(m, &modes).unwrap()
}

fn exact_normalized() -> Result<(), String> {
    check(16, (1usize..=12, 1usize..=5, any::<u64>(), any::<bool>()), |(m, n, seed, collisions)| {
        let u = haar_random_unitary::<f64>(m, seed).unwrap();
        let input = random_input(m, n, seed);
        let collisions = collisions || n > m;
        let total: f64 = exact_distribution(&u, &input, collisions).unwrap().iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() <= 1e-9, "total {}", total);
        Ok(())
    })
}

fn permutation_point_mass() -> Result<(), String> {
    check(17, (1usize..=8, 1usize..=4, any::<u64>()), |(m, n, seed)| {
        let mut rng = derived_rng(seed, "property-permutation", 0);
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut rng);
        let phases: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        let u = ComplexMatrix::from_fn(m, m, |i, j| if perm[i] == j { C64::from_polar(1.0, phases[i]) } else { C64::new(0.0, 0.0) });
        let input = random_input(m, n, seed);
        let mut routed = vec![0u32; m];
        for i in input.mode_list() {
            routed[perm[i]] += 1;
        }
        let target = ModeOccupation::new(routed);
        for dist in [exact_distribution(&u, &input, true).unwrap(), distinguishable_distribution(&u, &input, true).unwrap()] {
            prop_assert!((dist.probability(&target) - 1.0).abs() <= 1e-12);
            prop_assert!(dist.iter().all(|(o, p)| o == &target || p <= 1e-12));
        }
        Ok(())
    })
}

fn single_photon_classical() -> Result<(), String> {
    check(18, (1usize..=12, any::<u64>(), any::<prop::sample::Index>(), any::<bool>()), |(m, seed, mode, collisions)| {
        let u = haar_random_unitary::<f64>(m, seed).unwrap();
        let input = ModeOccupation::from_modes(m, &[mode.index(m)]).unwrap();
        let q = exact_distribution(&u, &input, collisions).unwrap();
        let p = distinguishable_distribution(&u, &input, collisions).unwrap();
        prop_assert_eq!(q, p);
        Ok(())
    })
}

fn trigger_exchangeability() -> Result<(), String> {
    let u = haar_random_unitary::<f64>(12, 42).unwrap();
    let params = vec![SourceParams::new(0.25, 0.9, 0.8, 1.0, 8e7).unwrap(); 12];
    let run = scattershot_run(&u, &params, 1_000_000, 3, 9, ScattershotOptions::default()).map_err(|e| e.to_string())?;
    let mut counts: BTreeMap<&ModeOccupation, u64> = BTreeMap::new();
    for r in &run.records {
        *counts.entry(&r.trigger_pattern).or_insert(0) += 1;
    }
    ensure(counts.len() == 220, || format!("{} trigger patterns", counts.len()))?;
    let expected = run.records.len() as f64 / 220.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(219.0).unwrap().inverse_cdf(0.999);
    ensure(chi2 <= critical, || format!("chi2 {chi2:.1} exceeds {critical:.1}"))
}

fn scattershot_gain() -> Result<(), String> {
    let (k, n, eps, eta_h) = (6usize, 2usize, 0.02, 0.5f64.sqrt());
    let eta = eta_h * eta_h;
    let u = haar_random_unitary::<f64>(k, 13).unwrap();
    let small = haar_random_unitary::<f64>(n, 13).unwrap();
    let params = |count| vec![SourceParams::new(eps, eta_h, 1.0, 1.0, 8e7).unwrap(); count];
    let opts = ScattershotOptions::default();
    let scatter = scattershot_run(&u, &params(k), 10_000_000, n, 21, opts).map_err(|e| e.to_string())?;
    let standard = scattershot_run(&small, &params(n), 10_000_000, n, 22, opts).map_err(|e| e.to_string())?;
    let ratio = scatter.report.rate_hz / standard.report.rate_hz;
    let predicted = 15.0 * (1.0 - eps * eta).powi((k - n) as i32);
    ensure((ratio / predicted - 1.0).abs() <= 0.10, || format!("ratio {ratio:.3} vs {predicted:.3}"))
}

fn random_distribution(len: usize, seed: u64, sparse: bool) -> Vec<f64> {
    let mut rng = derived_rng(seed, "property-distribution", len as u64);
    let w: Vec<f64> = (0..len).map(|_| if sparse && rng.random::<f64>() < 0.4 { 0.0 } else { rng.random() }).collect();
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        let mut w = vec![0.0; len];
        w[0] = 1.0;
        return w;
    }
    w.into_iter().map(|x| x / total).collect()
}

fn similarity_distance_bounds() -> Result<(), String> {
    check(19, (1usize..=64, any::<u64>(), any::<u64>(), any::<bool>()), |(len, a, b, sparse)| {
        let p = random_distribution(len, a, sparse);
        let q = random_distribution(len, b, sparse);
        let s = similarity(&p, &q).unwrap();
        let d = tv_distance(&p, &q).unwrap();
        prop_assert!(1.0 - s <= d + 1e-12, "S {} D {}", s, d);
        prop_assert!(d <= (1.0 - s * s).max(0.0).sqrt() + 1e-12, "S {} D {}", s, d);
        Ok(())
    })
}

fn lr_drift() -> Result<(), String> {
    let u = haar_random_unitary::<f64>(12, 42).unwrap();
    let mut positive = [0u32; 2];
    for t in 0..100u64 {
        let mut rng = derived_rng(31, "property-lr", t);
        let input = ModeOccupation::from_modes(12, &choose_indices(&mut rng, 12, 3).into_vec()).unwrap();
        let table = HypothesisTable::build(&u, [&input], true).map_err(|e| e.to_string())?;
        let truths = [table.indistinguishable(&input).unwrap(), table.distinguishable(&input).unwrap()];
        for (h, truth) in truths.into_iter().enumerate() {
            let samples: Vec<_> = sample_outputs(truth, 500, rng.random()).into_iter().map(|o| (input.clone(), o)).collect();
            let l = table.likelihood_ratio_test(&samples, 1.0).map_err(|e| e.to_string())?.final_log_ratio();
            // Drift towards the true hypothesis: up for indistinguishable, down otherwise.
            if (h == 0 && l > 0.0) || (h == 1 && l < 0.0) {
                positive[h] += 1;
            }
        }
    }
    ensure(positive.iter().all(|&c| c >= 95), || format!("drift towards the truth in {positive:?} of 100 runs"))
}

fn aggregate_order_invariance() -> Result<(), String> {
    let u = haar_random_unitary::<f64>(6, 5).unwrap();
    let params = vec![SourceParams::new(0.3, 0.9, 0.9, 1.0, 8e7).unwrap(); 6];
    let run = scattershot_run(&u, &params, 20_000, 2, 17, ScattershotOptions::default()).map_err(|e| e.to_string())?;
    let baseline = scattershot_aggregate_validation(&run.records, &u, true, 5.0).map_err(|e| e.to_string())?;
    check(20, any::<u64>(), |seed| {
        let mut shuffled = run.records.clone();
        shuffled.shuffle(&mut derived_rng(seed, "property-shuffle", 0));
        let agg = scattershot_aggregate_validation(&shuffled, &u, true, 5.0).unwrap();
        prop_assert_eq!(&agg.groups, &baseline.groups);
        prop_assert_eq!(agg.mean_similarity, baseline.mean_similarity);
        prop_assert_eq!(agg.mean_distance, baseline.mean_distance);
        prop_assert_eq!(agg.pooled_similarity, baseline.pooled_similarity);
        prop_assert_eq!(&agg.report, &baseline.report);
        Ok(())
    })
}
