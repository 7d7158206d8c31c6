#![allow(dead_code)]

use std::time::Duration;

use heralded::{ComplexMatrix, C64};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn report(criterion: u32, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} ({:.2} s) {detail}", elapsed.as_secs_f64());
}

pub fn ginibre<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Purity of the Gaussian amplitude `exp(-(a x^2 + 2 b x y + d y^2) / 2)`.
pub fn closed_form_purity(sigma_pump: f64, sigma_pm: f64, angle: f64) -> f64 {
    let p = 1.0 / (2.0 * sigma_pump * sigma_pump);
    let q = 1.0 / (2.0 * sigma_pm * sigma_pm);
    let (s, c) = angle.sin_cos();
    let (a, b, d) = (p + q * c * c, p + q * c * s, p + q * s * s);
    (1.0 - b * b / (a * d)).sqrt()
}

fn binomial_pmf(s: u64, q: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; s as usize + 1];
    if q <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if q >= 1.0 {
        pmf[s as usize] = 1.0;
        return pmf;
    }
    let (lq, lr) = (q.ln(), (1.0 - q).ln());
    let mut log_choose = 0.0f64;
    for x in 0..=s {
        if x > 0 {
            log_choose += ((s - x + 1) as f64).ln() - (x as f64).ln();
        }
        pmf[x as usize] = (log_choose + x as f64 * lq + (s - x) as f64 * lr).exp();
    }
    pmf
}

/// Expected similarity and distance between the plug-in frequencies of `s`
/// multinomial draws from `q` and `q` itself.
pub fn multinomial_noise_floor(q: &[f64], s: u64) -> (f64, f64) {
    let n = s as f64;
    let mut sim = 0.0;
    let mut dist = 0.0;
    for &qi in q {
        let pmf = binomial_pmf(s, qi);
        let mut e_sqrt = 0.0;
        let mut e_abs = 0.0;
        for (x, w) in pmf.iter().enumerate() {
            let f = x as f64 / n;
            e_sqrt += w * f.sqrt();
            e_abs += w * (f - qi).abs();
        }
        sim += qi.sqrt() * e_sqrt;
        dist += 0.5 * e_abs;
    }
    (sim, dist)
}
