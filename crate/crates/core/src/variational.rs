//! Layer-wise maximization of the ground-state probability.
//!
//! Each new layer `(beta, gamma)` is chosen with all earlier layers frozen,
//! by [`crate::search::maximize_layer`] on the exact statevector objective.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::emin_estimate_quantile;
use crate::hubo::Spectrum;
use crate::search::{maximize_layer, mirror_canonical, GammaSlice, Landscape, OptBudget};
use crate::simulator::{run_circuit, Mixer, ParamSchedule, StateVector};

/// Angles and objective value chosen for one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerStep {
    pub beta: f64,
    pub gamma: f64,
    /// Ground-state probability after the new layer.
    pub p: f64,
    pub evals: u64,
}

/// Result of a layer-wise optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerwiseTrace {
    pub mixer: Mixer,
    #[serde(flatten)]
    pub schedule: ParamSchedule,
    /// Ground-state probability after depths `1..=p`.
    pub p_success: Vec<f64>,
    /// Objective evaluations spent on each layer.
    pub evals: Vec<u64>,
}

impl LayerwiseTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// Half-width of the `gamma` search box.
///
/// `scale * pi / |E_min^est|` with `E_min^est` the Gumbel-mode estimate for
/// the spectrum's RMS energy; the transverse mixer additionally caps it at
/// `2 pi / sigma`. Flat spectra, where `gamma` is irrelevant, get `pi`.
pub fn gamma_max_for(spectrum: &Spectrum, mixer: Mixer, budget: &OptBudget) -> f64 {
    let sigma = spectrum.second_moment().sqrt();
    if !(sigma > 0.0) || spectrum.n() < 2 {
        return PI;
    }
    let e_est = emin_estimate_quantile(sigma, spectrum.n()).expect("sigma > 0, n >= 2");
    let mut gmax = budget.gamma_scale * PI / e_est.abs();
    if mixer == Mixer::Transverse {
        gmax = gmax.min(2.0 * PI / sigma);
    }
    gmax
}

struct GroverLandscape<'a> {
    prefix: &'a StateVector,
    spectrum: &'a Spectrum,
}

struct GroverSlice {
    ground: Vec<Complex64>,
    mean: Complex64,
}

impl GammaSlice for GroverSlice {
    fn value(&self, beta: f64) -> f64 {
        let shift = (Complex64::cis(-2.0 * beta) - 1.0) * self.mean;
        self.ground.iter().map(|a| (a + shift).norm_sqr()).sum()
    }
}

impl Landscape for GroverLandscape<'_> {
    type Slice = GroverSlice;

    fn at_gamma(&self, gamma: f64) -> GroverSlice {
        let energies = self.spectrum.energies();
        let amps = self.prefix.amps();
        let total: Complex64 = amps
            .iter()
            .zip(energies)
            .map(|(a, &e)| a * Complex64::cis(-gamma * e))
            .sum();
        let ground = self
            .spectrum
            .ground_states()
            .iter()
            .map(|&z| amps[z] * Complex64::cis(-gamma * energies[z]))
            .collect();
        GroverSlice {
            ground,
            mean: total / amps.len() as f64,
        }
    }
}

struct TransverseLandscape<'a> {
    prefix: &'a StateVector,
    spectrum: &'a Spectrum,
    by_distance: bool,
}

enum TransverseSlice {
    // per ground state g: sums of phased amplitudes at Hamming distance d from g
    Distance { n: usize, sums: Vec<Vec<Complex64>> },
    Full { state: StateVector, ground: Vec<usize> },
}

impl GammaSlice for TransverseSlice {
    fn value(&self, beta: f64) -> f64 {
        match self {
            TransverseSlice::Distance { n, sums } => {
                let (s, c) = beta.sin_cos();
                // <g| prod_j exp(-i beta X_j) |z> = cos^(n-d) (-i sin)^d
                let mut weights = vec![Complex64::new(0.0, 0.0); n + 1];
                for (d, w) in weights.iter_mut().enumerate() {
                    *w = Complex64::new(c.powi((n - d) as i32), 0.0) * Complex64::new(0.0, -s).powi(d as i32);
                }
                sums.iter()
                    .map(|row| row.iter().zip(&weights).map(|(a, w)| a * w).sum::<Complex64>().norm_sqr())
                    .sum()
            }
            TransverseSlice::Full { state, ground } => {
                let mut out = state.clone();
                out.apply_x_mixer(beta);
                ground.iter().map(|&z| out.amps()[z].norm_sqr()).sum()
            }
        }
    }
}

impl Landscape for TransverseLandscape<'_> {
    type Slice = TransverseSlice;

    fn at_gamma(&self, gamma: f64) -> TransverseSlice {
        let mut phased = self.prefix.clone();
        phased
            .apply_cost(self.spectrum, gamma)
            .expect("prefix state matches spectrum");
        let ground = self.spectrum.ground_states();
        if self.by_distance {
            let n = self.spectrum.n();
            let sums = ground
                .iter()
                .map(|&g| {
                    let mut row = vec![Complex64::new(0.0, 0.0); n + 1];
                    for (z, a) in phased.amps().iter().enumerate() {
                        row[(g ^ z).count_ones() as usize] += a;
                    }
                    row
                })
                .collect();
            TransverseSlice::Distance { n, sums }
        } else {
            TransverseSlice::Full {
                state: phased,
                ground: ground.to_vec(),
            }
        }
    }
}

fn best_next_layer(
    prefix: &StateVector,
    spectrum: &Spectrum,
    mixer: Mixer,
    gamma_max: f64,
    budget: &OptBudget,
    first_layer: bool,
) -> Result<LayerStep> {
    let mut opt = match mixer {
        Mixer::Grover => maximize_layer(&GroverLandscape { prefix, spectrum }, gamma_max, budget)?,
        Mixer::Transverse => {
            // distance sums cost |G| 2^n per gamma, full butterflies n 2^n per beta
            let by_distance = spectrum.ground_states().len() <= spectrum.n();
            maximize_layer(
                &TransverseLandscape { prefix, spectrum, by_distance },
                gamma_max,
                budget,
            )?
        }
    };
    if first_layer {
        (opt.beta, opt.gamma) = mirror_canonical(opt.beta, opt.gamma);
    }
    let mut next = prefix.clone();
    next.apply_layer(spectrum, mixer, opt.beta, opt.gamma)?;
    Ok(LayerStep {
        beta: opt.beta,
        gamma: opt.gamma,
        p: next.success_probability(spectrum)?,
        evals: opt.evals,
    })
}

/// Best next layer after `prefix` (which is applied to `|sym>` first).
pub fn optimize_layer(
    spectrum: &Spectrum,
    prefix: &ParamSchedule,
    mixer: Mixer,
    budget: &OptBudget,
) -> Result<LayerStep> {
    let state = run_circuit(spectrum, prefix, mixer)?;
    best_next_layer(&state, spectrum, mixer, gamma_max_for(spectrum, mixer, budget), budget, prefix.is_empty())
}

/// Grow a schedule one optimized layer at a time up to `max_depth`.
pub fn optimize_layerwise(
    spectrum: &Spectrum,
    mixer: Mixer,
    max_depth: usize,
    budget: &OptBudget,
) -> Result<LayerwiseTrace> {
    if max_depth == 0 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    let gamma_max = gamma_max_for(spectrum, mixer, budget);
    let mut state = StateVector::uniform(spectrum.n())?;
    let mut trace = LayerwiseTrace {
        mixer,
        schedule: ParamSchedule::empty(),
        p_success: Vec::with_capacity(max_depth),
        evals: Vec::with_capacity(max_depth),
    };
    for k in 0..max_depth {
        let step = best_next_layer(&state, spectrum, mixer, gamma_max, budget, k == 0)?;
        state.apply_layer(spectrum, mixer, step.beta, step.gamma)?;
        trace.schedule.push(step.beta, step.gamma);
        trace.p_success.push(step.p);
        trace.evals.push(step.evals);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubo::{enumerate_spectrum, generate_maxcut_hypergraph, generate_sk, HuboInstance, HuboTerm};
    use crate::simulator::needle_spectrum;
    use std::f64::consts::FRAC_PI_2;

    fn success(spectrum: &Spectrum, sched: &ParamSchedule, mixer: Mixer) -> f64 {
        run_circuit(spectrum, sched, mixer).unwrap().success_probability(spectrum).unwrap()
    }

    #[test]
    fn flat_landscape_returns_certainty() {
        let inst = HuboInstance::new(3, 2, vec![], "").unwrap();
        let spec = enumerate_spectrum(&inst, None).unwrap();
        for mixer in [Mixer::Grover, Mixer::Transverse] {
            let step = optimize_layer(&spec, &ParamSchedule::empty(), mixer, &OptBudget::default()).unwrap();
            assert!((step.p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zz_depth_one_matches_dense_grid() {
        let inst = HuboInstance::new(2, 2, vec![HuboTerm::new(vec![0, 1], 1.0)], "").unwrap();
        let spec = enumerate_spectrum(&inst, None).unwrap();
        let step = optimize_layer(&spec, &ParamSchedule::empty(), Mixer::Grover, &OptBudget::default()).unwrap();
        let m = 1000;
        let mut best: f64 = 0.0;
        for i in 0..m {
            for j in 0..=m {
                let beta = PI * i as f64 / m as f64;
                let gamma = -PI + 2.0 * PI * j as f64 / m as f64;
                let sched = ParamSchedule::new(vec![beta], vec![gamma]).unwrap();
                best = best.max(success(&spec, &sched, Mixer::Grover));
            }
        }
        assert!((step.p - best).abs() < 1e-4, "{} vs {}", step.p, best);
        assert!(step.p >= best - 1e-9, "strict: {} vs {}", step.p, best);
    }

    #[test]
    fn grover_needle_single_layer() {
        // one Grover iteration is exact for four states
        let spec = needle_spectrum(2, 1).unwrap();
        let step = optimize_layer(&spec, &ParamSchedule::empty(), Mixer::Grover, &OptBudget::default()).unwrap();
        assert!((step.p - 1.0).abs() < 1e-6, "{}", step.p);

        let spec = needle_spectrum(4, 5).unwrap();
        let step = optimize_layer(&spec, &ParamSchedule::empty(), Mixer::Grover, &OptBudget::default()).unwrap();
        let theta = 0.25f64.asin();
        let grover = (3.0 * theta).sin().powi(2);
        // phase-matched Grover is optimal for a single layer
        assert!((step.p - grover).abs() < 1e-6, "{} vs {}", step.p, grover);
    }

    #[test]
    fn returned_probability_is_exact() {
        let spec = enumerate_spectrum(&generate_sk(5, 3, 12).unwrap(), None).unwrap();
        let mut prefix = ParamSchedule::empty();
        prefix.push(0.4, 0.7);
        for mixer in [Mixer::Grover, Mixer::Transverse] {
            let step = optimize_layer(&spec, &prefix, mixer, &OptBudget::default()).unwrap();
            let mut full = prefix.clone();
            full.push(step.beta, step.gamma);
            assert_eq!(step.p, success(&spec, &full, mixer));
            assert!(step.p >= success(&spec, &prefix, mixer) - 1e-12);
            assert!((0.0..PI).contains(&step.beta));
        }
    }

    #[test]
    fn distance_and_butterfly_slices_agree() {
        let spec = enumerate_spectrum(&generate_sk(6, 3, 4).unwrap(), None).unwrap();
        let mut prefix = StateVector::uniform(6).unwrap();
        prefix.apply_layer(&spec, Mixer::Transverse, 0.3, 0.6).unwrap();
        let a = TransverseLandscape { prefix: &prefix, spectrum: &spec, by_distance: true };
        let b = TransverseLandscape { prefix: &prefix, spectrum: &spec, by_distance: false };
        for &(beta, gamma) in &[(0.0, 0.0), (0.3, -1.2), (1.1, 0.8), (2.9, 2.0)] {
            assert!((a.value(beta, gamma) - b.value(beta, gamma)).abs() < 1e-13);
        }
    }

    #[test]
    fn grover_slice_matches_simulator() {
        let spec = enumerate_spectrum(&generate_maxcut_hypergraph(5, 3, 1).unwrap(), None).unwrap();
        let prefix = StateVector::uniform(5).unwrap();
        let land = GroverLandscape { prefix: &prefix, spectrum: &spec };
        for &(beta, gamma) in &[(0.2, 0.4), (FRAC_PI_2, PI), (2.5, -1.0)] {
            let mut s = prefix.clone();
            s.apply_layer(&spec, Mixer::Grover, beta, gamma).unwrap();
            assert!((land.value(beta, gamma) - s.success_probability(&spec).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn layerwise_is_monotone_and_deterministic() {
        for seed in 0..20 {
            let spec = enumerate_spectrum(&generate_sk(6, 2, seed).unwrap(), None).unwrap();
            for mixer in [Mixer::Grover, Mixer::Transverse] {
                let trace = optimize_layerwise(&spec, mixer, 6, &OptBudget::default()).unwrap();
                assert!(trace.p_success.iter().all(|p| (0.0..=1.0 + 1e-12).contains(p)));
                for w in trace.p_success.windows(2) {
                    assert!(w[1] >= w[0] - 1e-12);
                }
                if seed < 2 {
                    let again = optimize_layerwise(&spec, mixer, 6, &OptBudget::default()).unwrap();
                    assert_eq!(trace, again);
                }
            }
        }
    }

    #[test]
    fn depth_one_trace_equals_single_layer() {
        let spec = enumerate_spectrum(&generate_sk(5, 2, 3).unwrap(), None).unwrap();
        let trace = optimize_layerwise(&spec, Mixer::Grover, 1, &OptBudget::default()).unwrap();
        let step = optimize_layer(&spec, &ParamSchedule::empty(), Mixer::Grover, &OptBudget::default()).unwrap();
        assert_eq!(trace.schedule.betas(), &[step.beta]);
        assert_eq!(trace.p_success, vec![step.p]);
        assert!(optimize_layerwise(&spec, Mixer::Grover, 0, &OptBudget::default()).is_err());
    }

    #[test]
    fn trace_json_shape() {
        let spec = enumerate_spectrum(&generate_sk(4, 2, 3).unwrap(), None).unwrap();
        let trace = optimize_layerwise(&spec, Mixer::Transverse, 2, &OptBudget::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&trace.to_json()).unwrap();
        assert_eq!(v["mixer"], "XM");
        for key in ["betas", "gammas", "p_success", "evals"] {
            assert_eq!(v[key].as_array().unwrap().len(), 2, "{key}");
        }
        let back: LayerwiseTrace = serde_json::from_value(v).unwrap();
        assert_eq!(back, trace);
    }

    #[test]
    fn objective_is_pi_periodic_in_beta() {
        let spec = enumerate_spectrum(&generate_sk(5, 3, 6).unwrap(), None).unwrap();
        let mut prefix = StateVector::uniform(5).unwrap();
        prefix.apply_layer(&spec, Mixer::Grover, 0.7, 0.3).unwrap();
        let g = GroverLandscape { prefix: &prefix, spectrum: &spec };
        let x = TransverseLandscape { prefix: &prefix, spectrum: &spec, by_distance: false };
        for &(beta, gamma) in &[(0.1, 0.2), (1.3, -0.9)] {
            assert!((g.value(beta, gamma) - g.value(beta + PI, gamma)).abs() < 1e-13);
            assert!((x.value(beta, gamma) - x.value(beta + PI, gamma)).abs() < 1e-12);
        }
    }
}
