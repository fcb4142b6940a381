//! Extreme-value estimates of the minimum energy of a Gaussian spectrum.
//!
//! The minimum of `N` i.i.d. `N(mu, sigma^2)` energies is modelled by a
//! Gumbel law for minima with density
//! `(1/beta_g) exp((x - mu_g)/beta_g - exp((x - mu_g)/beta_g))`, whose location
//! and scale come from normal quantiles at `1/N` and `1/(eN)`. Both quantiles
//! sit in the lower tail, so `mu_g` is negative for centred spectra and
//! `beta_g` is positive without any further sign bookkeeping.

use std::f64::consts::{E, FRAC_PI_2, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::ParamSchedule;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, accurate to a few ulps relative in both tails.
///
/// Uses the Taylor series `1/2 + phi(x) * sum x^(2k+1)/(2k+1)!!` for
/// `|x| < 1.5` and the Laplace continued fraction for the tails.
pub fn norm_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 1.5 {
        return 1.0 - lower_tail(-x);
    }
    if x <= -1.5 {
        return lower_tail(x);
    }
    0.5 + norm_pdf(x) * central_series(x)
}

fn central_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    loop {
        term *= x2 / (2.0 * k + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        k += 1.0;
    }
    sum
}

// Phi(x) for x <= -1.5: phi(x) / (t + 1/(t + 2/(t + 3/(t + ...)))), t = -x.
fn lower_tail(x: f64) -> f64 {
    if x < -38.5 {
        return 0.0;
    }
    let t = -x;
    let mut frac = t;
    for k in (1..=200).rev() {
        frac = t + k as f64 / frac;
    }
    norm_pdf(x) / frac
}

// Acklam's rational approximation (relative error < 1.15e-9).
const ACKLAM_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_690e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const ACKLAM_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACKLAM_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const ACKLAM_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const ACKLAM_P_LOW: f64 = 0.024_25;

fn acklam_lower_half(p: f64) -> f64 {
    let [a0, a1, a2, a3, a4, a5] = ACKLAM_A;
    let [b0, b1, b2, b3, b4] = ACKLAM_B;
    let [c0, c1, c2, c3, c4, c5] = ACKLAM_C;
    let [d0, d1, d2, d3] = ACKLAM_D;
    if p < ACKLAM_P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((c0 * q + c1) * q + c2) * q + c3) * q + c4) * q + c5)
            / ((((d0 * q + d1) * q + d2) * q + d3) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((a0 * r + a1) * r + a2) * r + a3) * r + a4) * r + a5) * q
            / (((((b0 * r + b1) * r + b2) * r + b3) * r + b4) * r + 1.0)
    }
}

/// Quantile function of the standard normal distribution.
///
/// Acklam's rational approximation followed by one Halley step against
/// [`norm_cdf`]. The upper half is obtained by reflection, which is exact
/// because `1 - p` is representable for `p >= 1/2`.
pub fn inv_norm_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain { value: p });
    }
    if p > 0.5 {
        return Ok(-lower_half_quantile(1.0 - p));
    }
    Ok(lower_half_quantile(p))
}

fn lower_half_quantile(p: f64) -> f64 {
    let x = acklam_lower_half(p);
    if x == 0.0 {
        return 0.0;
    }
    let err = norm_cdf(x) - p;
    let u = err * SQRT_2PI * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Location and scale of the Gumbel law for the minimum of `N` Gaussian draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelParams {
    pub mu_g: f64,
    pub beta_g: f64,
}

impl GumbelParams {
    /// Mean of the minima law, `mu_g - EULER_GAMMA * beta_g`.
    pub fn mean(&self) -> f64 {
        self.mu_g - EULER_GAMMA * self.beta_g
    }

    /// Mode of the minima law.
    pub fn mode(&self) -> f64 {
        self.mu_g
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu_g) / self.beta_g;
        (z - z.exp()).exp() / self.beta_g
    }
}

/// `mu_g = mu + sigma * Phi^-1(1/N)`,
/// `beta_g = sigma * (Phi^-1(1/N) - Phi^-1(1/(eN)))`.
pub fn gumbel_params(mu: f64, sigma: f64, n_states: f64) -> Result<GumbelParams> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !(n_states >= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "need at least two states, got {n_states}"
        )));
    }
    let q1 = inv_norm_cdf(1.0 / n_states)?;
    let qe = inv_norm_cdf(1.0 / (E * n_states))?;
    Ok(GumbelParams {
        mu_g: mu + sigma * q1,
        beta_g: sigma * (q1 - qe),
    })
}

/// Gumbel-mode estimate of the ground energy, `sigma * Phi^-1(2^-n)`.
///
/// Returns exactly `0.0` for `n = 1`; callers that divide by the estimate
/// must reject it.
pub fn emin_estimate_quantile(sigma: f64, n: usize) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    Ok(sigma * inv_norm_cdf((-(n as f64)).exp2())?)
}

/// Large-`n` closed form
/// `-sigma sqrt(2 ln 2) sqrt(n) / (1 + ln(n) / (4 ln 2 n))`.
pub fn emin_estimate_closed_form(sigma: f64, n: usize) -> f64 {
    let n = n as f64;
    let correction = 1.0 + n.ln() / (4.0 * LN_2 * n);
    -sigma * (2.0 * LN_2).sqrt() * n.sqrt() / correction
}

/// Constant Grover-like schedule: `beta_k = pi/2`, `gamma_k = -pi / e_min_est`.
pub fn constant_angles(e_min_est: f64, depth: usize) -> Result<ParamSchedule> {
    if e_min_est == 0.0 || !e_min_est.is_finite() {
        return Err(Error::DegenerateEstimate(e_min_est));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let gamma = -PI / e_min_est;
    ParamSchedule::new(vec![FRAC_PI_2; depth], vec![gamma; depth])
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn reference_cdf(x: f64) -> f64 {
        Normal::new(0.0, 1.0).unwrap().cdf(x)
    }

    // bisection on an independent CDF implementation; the upper half is
    // reflected because 1 - p is exact there
    fn bisect_quantile(p: f64) -> f64 {
        if p > 0.5 {
            return -bisect_quantile(1.0 - p);
        }
        let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reference_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn cdf_matches_reference() {
        for i in -800..=800 {
            let x = i as f64 / 100.0;
            let ours = norm_cdf(x);
            let theirs = reference_cdf(x);
            assert!((ours - theirs).abs() <= 1e-9 * theirs, "x={x}: {ours} vs {theirs}");
        }
    }

    #[test]
    fn cdf_tail_values() {
        // 30-digit reference values
        let table = [
            (-1.0, 0.158655253931457051414767454368),
            (-2.9, 0.00186581330038403847900136864606),
            (-3.1, 0.000967603213218356601963853246317),
            (-4.7, 0.00000130080745391728092809370473),
            (-8.0, 6.22096057427178412351599517259e-16),
            (-12.0, 1.77648211207767899769617100185e-33),
        ];
        for (x, want) in table {
            let got = norm_cdf(x);
            assert!((got - want).abs() <= 4e-15 * want, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn median_is_zero() {
        assert_eq!(inv_norm_cdf(0.5).unwrap(), 0.0);
    }

    #[test]
    fn quantile_is_odd() {
        // complements must be exact for the comparison to be meaningful
        for &p in &[2f64.powi(-40), 2f64.powi(-20), 1e-3, 0.01, 0.1, 0.3, 0.49] {
            let lo = inv_norm_cdf(p).unwrap();
            let hi = inv_norm_cdf(1.0 - p).unwrap();
            assert!((lo + hi).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn quantile_at_two_to_minus_ten() {
        let x = inv_norm_cdf(2f64.powi(-10)).unwrap();
        let oracle = bisect_quantile(2f64.powi(-10));
        assert!((x - oracle).abs() < 1e-9);
        assert!((x + 3.097).abs() < 1e-3);
    }

    #[test]
    fn quantile_accuracy_over_range() {
        for k in 0..=300 {
            let p = 10f64.powf(-15.0 + 15.0 * k as f64 / 300.0) * 0.5;
            for q in [p, 1.0 - p] {
                if q >= 1.0 {
                    continue;
                }
                let x = inv_norm_cdf(q).unwrap();
                assert!((x - bisect_quantile(q)).abs() < 1e-9, "p={q}");
            }
        }
    }

    #[test]
    fn quantile_domain_errors() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(inv_norm_cdf(p), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn gumbel_location_for_1024_states() {
        let g = gumbel_params(0.0, 1.0, 1024.0).unwrap();
        assert!((g.mu_g - bisect_quantile(1.0 / 1024.0)).abs() < 1e-9);
        assert!((g.mu_g + 3.097).abs() < 1e-3);
    }

    #[test]
    fn gumbel_is_linear_in_sigma() {
        let g1 = gumbel_params(0.0, 1.3, 5000.0).unwrap();
        let g2 = gumbel_params(0.0, 2.6, 5000.0).unwrap();
        assert!((g2.mu_g - 2.0 * g1.mu_g).abs() < 1e-12);
        assert!((g2.beta_g - 2.0 * g1.beta_g).abs() < 1e-12);
    }

    #[test]
    fn gumbel_scale_positive() {
        for k in 1..60 {
            let g = gumbel_params(0.0, 1.0, 2f64.powi(k)).unwrap();
            assert!(g.beta_g > 0.0, "N=2^{k}");
        }
        assert!(gumbel_params(0.0, 0.0, 16.0).is_err());
        assert!(gumbel_params(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gumbel_pdf_integrates_to_one() {
        let g = gumbel_params(0.0, 1.0, 4096.0).unwrap();
        let (a, b, m) = (g.mu_g - 30.0 * g.beta_g, g.mu_g + 10.0 * g.beta_g, 20_000);
        let h = (b - a) / m as f64;
        let total: f64 = (0..m).map(|i| g.pdf(a + (i as f64 + 0.5) * h) * h).sum();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quantile_estimates() {
        assert_eq!(emin_estimate_quantile(2.5, 1).unwrap(), 0.0);
        let e10 = emin_estimate_quantile(1.0, 10).unwrap();
        assert!((e10 - bisect_quantile(2f64.powi(-10))).abs() < 1e-9);
        let e14 = emin_estimate_quantile(1.0, 14).unwrap();
        assert!((e14 - bisect_quantile(2f64.powi(-14))).abs() < 1e-9);
        assert!((e14 + 3.841_930_685_5).abs() < 1e-9);
        assert!(emin_estimate_quantile(0.0, 4).is_err());
    }

    #[test]
    fn quantile_estimate_monotone_and_linear() {
        let mut prev = 0.0;
        for n in 1..=40 {
            let e = emin_estimate_quantile(1.0, n).unwrap();
            assert!(e <= prev);
            if n > 1 {
                assert!(e < prev);
            }
            let scaled = emin_estimate_quantile(3.0, n).unwrap();
            assert!((scaled - 3.0 * e).abs() < 1e-12);
            prev = e;
        }
    }

    #[test]
    fn closed_form_values() {
        assert!((emin_estimate_closed_form(1.0, 1) + (2.0 * LN_2).sqrt()).abs() < 1e-15);
        assert!((emin_estimate_closed_form(1.0, 1) + 1.17741).abs() < 1e-5);
        // -sqrt(2 ln 2 * 10) / (1 + ln 10 / (40 ln 2))
        let direct = -(20.0 * LN_2).sqrt() / (1.0 + 10f64.ln() / (40.0 * LN_2));
        let e = emin_estimate_closed_form(1.0, 10);
        assert!((e - direct).abs() < 1e-15);
        assert!((e + 3.438).abs() < 1e-3);
        assert!((emin_estimate_closed_form(2.0, 10) - 2.0 * e).abs() < 1e-12);
    }

    #[test]
    fn closed_form_approaches_quantile() {
        let ratio = |n: usize| {
            emin_estimate_closed_form(1.0, n) / bisect_quantile((-(n as f64)).exp2())
        };
        assert!((ratio(64) - 1.0).abs() < (ratio(8) - 1.0).abs());
    }

    #[test]
    fn constant_schedule() {
        let s = constant_angles(-PI, 3).unwrap();
        assert_eq!(s.betas(), &[FRAC_PI_2; 3]);
        assert_eq!(s.gammas(), &[1.0; 3]);
        let s = constant_angles(-3.097, 5).unwrap();
        assert!(s.betas().iter().all(|&b| b == FRAC_PI_2));
        assert!((s.gammas()[0] - 1.0144).abs() < 1e-4);
        assert!(matches!(
            constant_angles(0.0, 2),
            Err(Error::DegenerateEstimate(_))
        ));
        assert!(constant_angles(-1.0, 0).is_err());
    }

    #[test]
    fn gumbel_fits_minima_of_small_batches() {
        use crate::rng::SeedStream;
        let n_states = 1usize << 10;
        let trials = 1500;
        let mut rng = SeedStream::new(99);
        let minima: Vec<f64> = (0..trials)
            .map(|_| {
                (0..n_states)
                    .map(|_| rng.standard_normal())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let mean = minima.iter().sum::<f64>() / trials as f64;
        let var = minima.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let g = gumbel_params(0.0, 1.0, n_states as f64).unwrap();
        assert!((mean - g.mean()).abs() < 3.0 * se, "{mean} vs {}", g.mean());
    }
}
