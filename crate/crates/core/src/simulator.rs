//! Exact statevector simulation of alternating cost/mixer circuits.
//!
//! Both mixers are applied algebraically in `O(2^n)` (Grover) or
//! `O(n 2^n)` (transverse field) time per layer; no dense matrices are
//! formed.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hubo::{Spectrum, MAX_QUBITS};

/// Mixer family of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mixer {
    /// Product of single-qubit X rotations, `prod_j exp(-i beta X_j)`.
    #[serde(rename = "XM")]
    Transverse,
    /// `I + (exp(-2i beta) - 1) |sym><sym|`.
    #[serde(rename = "GM")]
    Grover,
}

impl Mixer {
    pub fn name(self) -> &'static str {
        match self {
            Mixer::Transverse => "XM",
            Mixer::Grover => "GM",
        }
    }
}

impl fmt::Display for Mixer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Paired angle lists `(beta_1..beta_p, gamma_1..gamma_p)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct ParamSchedule {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSchedule {
    betas: Vec<f64>,
    gammas: Vec<f64>,
}

impl TryFrom<RawSchedule> for ParamSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        ParamSchedule::new(raw.betas, raw.gammas)
    }
}

impl ParamSchedule {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.len() != gammas.len() {
            return Err(Error::InvalidArgument(format!(
                "schedule has {} betas but {} gammas",
                betas.len(),
                gammas.len()
            )));
        }
        Ok(Self { betas, gammas })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn push(&mut self, beta: f64, gamma: f64) {
        self.betas.push(beta);
        self.gammas.push(gamma);
    }

    pub fn depth(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// First `k` layers.
    pub fn prefix(&self, k: usize) -> Self {
        let k = k.min(self.depth());
        Self {
            betas: self.betas[..k].to_vec(),
            gammas: self.gammas[..k].to_vec(),
        }
    }

    /// Layers as `(beta, gamma)` pairs.
    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.betas.iter().copied().zip(self.gammas.iter().copied())
    }
}

/// `2^n` complex amplitudes indexed by basis-state integer.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::Capacity { what: "statevector", n, max: MAX_QUBITS });
    }
    Ok(())
}

/// Uniform superposition `|sym>` on `n` qubits.
pub fn init_uniform(n: usize) -> Result<StateVector> {
    StateVector::uniform(n)
}

impl StateVector {
    pub fn uniform(n: usize) -> Result<Self> {
        check_qubits(n)?;
        // 2^{-n/2} exactly for even n; odd n picks up one factor of 1/sqrt(2)
        let mut amp = (-((n / 2) as f64)).exp2();
        if n % 2 == 1 {
            amp *= FRAC_1_SQRT_2;
        }
        Ok(Self {
            n,
            amps: vec![Complex64::new(amp, 0.0); 1 << n],
        })
    }

    /// Wrap raw amplitudes; the caller is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_spectrum(&self, spectrum: &Spectrum) -> Result<()> {
        if spectrum.n() != self.n {
            return Err(Error::DimensionMismatch { state: self.n, spectrum: spectrum.n() });
        }
        Ok(())
    }

    /// `amps[z] *= exp(-i gamma E_z)`.
    pub fn apply_cost(&mut self, spectrum: &Spectrum, gamma: f64) -> Result<()> {
        self.check_spectrum(spectrum)?;
        if gamma == 0.0 {
            return Ok(());
        }
        for (a, &e) in self.amps.iter_mut().zip(spectrum.energies()) {
            *a *= Complex64::cis(-gamma * e);
        }
        Ok(())
    }

    /// Rank-one update `amps += (exp(-2i beta) - 1) * mean(amps)`.
    pub fn apply_grover_mixer(&mut self, beta: f64) {
        let factor = Complex64::cis(-2.0 * beta) - 1.0;
        let mean = self.amps.iter().sum::<Complex64>() / self.dim() as f64;
        let shift = factor * mean;
        for a in &mut self.amps {
            *a += shift;
        }
    }

    /// `exp(-i beta X_j)` on every qubit, as bit-pair butterflies.
    pub fn apply_x_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let mis = Complex64::new(0.0, -s);
        for j in 0..self.n {
            let stride = 1usize << j;
            for block in self.amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * c + y * mis;
                    *b = x * mis + y * c;
                }
            }
        }
    }

    pub fn apply_mixer(&mut self, mixer: Mixer, beta: f64) {
        match mixer {
            Mixer::Transverse => self.apply_x_mixer(beta),
            Mixer::Grover => self.apply_grover_mixer(beta),
        }
    }

    /// One cost layer followed by one mixer layer.
    pub fn apply_layer(&mut self, spectrum: &Spectrum, mixer: Mixer, beta: f64, gamma: f64) -> Result<()> {
        self.apply_cost(spectrum, gamma)?;
        self.apply_mixer(mixer, beta);
        Ok(())
    }

    /// Probability mass on the ground level of `spectrum`.
    pub fn success_probability(&self, spectrum: &Spectrum) -> Result<f64> {
        self.check_spectrum(spectrum)?;
        Ok(spectrum
            .ground_states()
            .iter()
            .map(|&z| self.amps[z].norm_sqr())
            .sum())
    }

    /// Probability mass per energy level, ascending in energy.
    pub fn energy_distribution(&self, spectrum: &Spectrum) -> Result<Vec<(f64, f64)>> {
        self.check_spectrum(spectrum)?;
        Ok(spectrum
            .levels()
            .iter()
            .map(|level| {
                let mass = level.members.iter().map(|&z| self.amps[z].norm_sqr()).sum();
                (level.energy, mass)
            })
            .collect())
    }

    /// Debug dump with columns `z,re,im,prob`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "z,re,im,prob")?;
        for (z, a) in self.amps.iter().enumerate() {
            writeln!(out, "{z},{},{},{}", a.re, a.im, a.norm_sqr())?;
        }
        Ok(())
    }
}

/// Apply `schedule` to `|sym>`, cost layer first in every round.
pub fn run_circuit(spectrum: &Spectrum, schedule: &ParamSchedule, mixer: Mixer) -> Result<StateVector> {
    let mut state = StateVector::uniform(spectrum.n())?;
    for (beta, gamma) in schedule.layers() {
        state.apply_layer(spectrum, mixer, beta, gamma)?;
    }
    Ok(state)
}

/// Success probability after each prefix `1..=depth` of `schedule`.
pub fn prefix_success_curve(spectrum: &Spectrum, schedule: &ParamSchedule, mixer: Mixer) -> Result<Vec<f64>> {
    let mut state = StateVector::uniform(spectrum.n())?;
    let mut curve = Vec::with_capacity(schedule.depth());
    for (beta, gamma) in schedule.layers() {
        state.apply_layer(spectrum, mixer, beta, gamma)?;
        curve.push(state.success_probability(spectrum)?);
    }
    Ok(curve)
}

/// Energy table with one marked state at `-1` and all others at `0`.
pub fn needle_spectrum(n: usize, marked: usize) -> Result<Spectrum> {
    check_qubits(n)?;
    if marked >> n != 0 {
        return Err(Error::InvalidArgument(format!("marked state {marked} out of range")));
    }
    let mut energies = vec![0.0; 1 << n];
    energies[marked] = -1.0;
    Spectrum::from_energies(energies, None)
}
