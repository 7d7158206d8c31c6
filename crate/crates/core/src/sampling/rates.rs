use crate::error::{ensure, Result};
use crate::linalg::binomial;
use crate::sources::SourceParams;

/// Number of collision-free ways to pick `n` heralding sources out of `k`.
pub fn no_collision_inputs(k: usize, n: usize) -> Result<u64> {
    ensure!(n <= k, Contract, "cannot select {n} of {k} sources");
    Ok(binomial(k, n) as u64)
}

/// First-order `n`-photon event rate.
///
/// Standard: `rep_rate * (eps*eta)^n`. Scattershot: the rate at which exactly
/// `n` of `k` identical sources succeed,
/// `rep_rate * C(k, n) * (eps*eta)^n * (1 - eps*eta)^(k - n)`.
pub fn expected_rate(k: usize, n: usize, eps: f64, eta: f64, rep_rate: f64, scattershot: bool) -> Result<f64> {
    ensure!(n <= k, Contract, "photon number {n} exceeds source count {k}");
    ensure!((0.0..=1.0).contains(&eps) && (0.0..=1.0).contains(&eta), Contract, "eps and eta must lie in [0, 1]");
    ensure!(rep_rate > 0.0, Contract, "rep_rate must be positive");
    let p = eps * eta;
    Ok(if scattershot {
        rep_rate * binomial(k, n) * p.powi(n as i32) * (1.0 - p).powi((k - n) as i32)
    } else {
        rep_rate * p.powi(n as i32)
    })
}

/// Retained-event rate implied by the source model used in the scattershot
/// driver: exactly `n` sources herald and all `n` heralded signal photons
/// survive collection and detection.
///
/// Detector losses are taken as the mean `eta_detect` over sources, which is
/// exact when all detectors share one efficiency.
pub fn model_retained_rate(sources: &[SourceParams], n: usize) -> Result<f64> {
    ensure!(!sources.is_empty(), Contract, "no sources");
    ensure!(n <= sources.len(), Contract, "photon number {n} exceeds source count {}", sources.len());
    let rep = sources[0].rep_rate;
    ensure!(sources.iter().all(|s| s.rep_rate == rep), Contract, "sources must share one repetition rate");
    let eta_d = sources.iter().map(|s| s.eta_detect).sum::<f64>() / sources.len() as f64;
    // e[j]: probability that exactly j of the sources seen so far succeed.
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for s in sources {
        let herald = s.herald_probability();
        let success = herald * s.eta_herald * eta_d;
        for j in (0..=n).rev() {
            let stay = e[j] * (1.0 - herald);
            let up = if j > 0 { e[j - 1] * success } else { 0.0 };
            e[j] = stay + up;
        }
    }
    Ok(rep * e[n])
}
