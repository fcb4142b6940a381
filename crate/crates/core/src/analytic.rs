//! Energy-resolved amplitude model of Grover-mixer circuits.
//!
//! Under a Grover mixer every amplitude depends on its basis state only
//! through the state's energy, `Psi_k(E)`. Replacing the average over basis
//! states by an average over a centred Gaussian energy density of variance
//! `sigma2` closes the recursion into
//!
//! ```text
//! Psi_k(E) = A_k + sum_{j=1..k} A_{k-j} exp(-i (gamma_k + ... + gamma_{k-j+1}) E)
//! A_k      = (exp(-2i beta_k) - 1) sum_{i=1..k} D_{k,i} A_{k-i},   A_0 = 2^{-n/2}
//! ```
//!
//! where the damping `D_{k,i}` is `exp(-sigma2/2 * (gamma_k^2 + ... + gamma_{k-i+1}^2))`
//! in [`DampingMode::Paper`] and `exp(-sigma2/2 * (gamma_k + ... + gamma_{k-i+1})^2)`,
//! the exact Gaussian characteristic function of the accumulated phase, in
//! [`DampingMode::ExactCf`]. The two agree whenever at most one `gamma` in
//! the window is nonzero.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::emin_estimate_quantile;
use crate::search::{maximize_layer, mirror_canonical, GammaSlice, Landscape, OptBudget};
use crate::simulator::ParamSchedule;

/// Damping of the energy-independent coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DampingMode {
    /// Sum of squared phases in the window.
    #[default]
    #[serde(rename = "paper")]
    Paper,
    /// Square of the summed phase in the window.
    #[serde(rename = "exact-cf")]
    ExactCf,
}

impl DampingMode {
    pub fn name(self) -> &'static str {
        match self {
            DampingMode::Paper => "paper",
            DampingMode::ExactCf => "exact-cf",
        }
    }
}

impl fmt::Display for DampingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DampingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(DampingMode::Paper),
            "exact-cf" => Ok(DampingMode::ExactCf),
            other => Err(Error::InvalidArgument(format!("unknown damping mode {other:?}"))),
        }
    }
}

/// Coefficients `A_0..A_k` and the applied angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticState {
    n: usize,
    sigma2: f64,
    a_coeffs: Vec<Complex64>,
    betas: Vec<f64>,
    gammas: Vec<f64>,
    // cum_gamma[k] = gamma_1 + ... + gamma_k, cum_gamma_sq likewise for squares
    cum_gamma: Vec<f64>,
    cum_gamma_sq: Vec<f64>,
}

impl AnalyticState {
    /// Zero-layer state, `A_0 = 2^{-n/2}`.
    pub fn new(n: usize, sigma2: f64) -> Result<Self> {
        if n == 0 || n > 1023 {
            return Err(Error::InvalidArgument(format!("qubit count {n} outside 1..=1023")));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma2 must be finite and >= 0, got {sigma2}")));
        }
        Ok(Self {
            n,
            sigma2,
            a_coeffs: vec![Complex64::new((-(n as f64) / 2.0).exp2(), 0.0)],
            betas: vec![],
            gammas: vec![],
            cum_gamma: vec![0.0],
            cum_gamma_sq: vec![0.0],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Number of applied layers `k`.
    pub fn depth(&self) -> usize {
        self.betas.len()
    }

    pub fn a_coeffs(&self) -> &[Complex64] {
        &self.a_coeffs
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn schedule(&self) -> ParamSchedule {
        ParamSchedule::new(self.betas.clone(), self.gammas.clone()).expect("equal lengths")
    }

    /// `sum_{i=1..k+1} D_{k+1,i} A_{k+1-i}` for a prospective next phase `gamma`.
    fn damped_sum(&self, gamma: f64, mode: DampingMode) -> Complex64 {
        let k = self.depth();
        let (cg, cq) = (self.cum_gamma[k], self.cum_gamma_sq[k]);
        (1..=k + 1)
            .map(|i| {
                let start = k + 1 - i;
                let exponent = match mode {
                    DampingMode::Paper => cq + gamma * gamma - self.cum_gamma_sq[start],
                    DampingMode::ExactCf => (cg + gamma - self.cum_gamma[start]).powi(2),
                };
                self.a_coeffs[start] * (-0.5 * self.sigma2 * exponent).exp()
            })
            .sum()
    }

    /// `B_{k+1}(e)` for a prospective next phase `gamma`.
    fn energy_part(&self, gamma: f64, e: f64) -> Complex64 {
        let k = self.depth();
        let cg = self.cum_gamma[k];
        (1..=k + 1)
            .map(|j| {
                let start = k + 1 - j;
                let phase = cg + gamma - self.cum_gamma[start];
                self.a_coeffs[start] * Complex64::cis(-phase * e)
            })
            .sum()
    }

    /// Append layer `(beta, gamma)`.
    pub fn step(&self, beta: f64, gamma: f64, mode: DampingMode) -> AnalyticState {
        let a_next = (Complex64::cis(-2.0 * beta) - 1.0) * self.damped_sum(gamma, mode);
        let mut next = self.clone();
        next.a_coeffs.push(a_next);
        next.betas.push(beta);
        next.gammas.push(gamma);
        let k = self.depth();
        next.cum_gamma.push(self.cum_gamma[k] + gamma);
        next.cum_gamma_sq.push(self.cum_gamma_sq[k] + gamma * gamma);
        next
    }

    /// `Psi_k(e) = A_k + B_k(e)`.
    pub fn amplitude(&self, e: f64) -> Complex64 {
        let k = self.depth();
        let a_k = self.a_coeffs[k];
        if k == 0 {
            return a_k;
        }
        let cg = self.cum_gamma[k];
        let b: Complex64 = (1..=k)
            .map(|j| self.a_coeffs[k - j] * Complex64::cis(-(cg - self.cum_gamma[k - j]) * e))
            .sum();
        a_k + b
    }

    /// `|Psi_k(e_target)|^2`.
    pub fn success_objective(&self, e_target: f64) -> f64 {
        self.amplitude(e_target).norm_sqr()
    }
}

/// Append one layer; see [`AnalyticState::step`].
pub fn analytic_step(state: &AnalyticState, beta: f64, gamma: f64, mode: DampingMode) -> AnalyticState {
    state.step(beta, gamma, mode)
}

pub fn analytic_amplitude(state: &AnalyticState, e: f64) -> Complex64 {
    state.amplitude(e)
}

pub fn analytic_success_objective(state: &AnalyticState, e_min_est: f64) -> f64 {
    state.success_objective(e_min_est)
}

struct AnalyticLandscape<'a> {
    state: &'a AnalyticState,
    target: f64,
    mode: DampingMode,
}

struct AnalyticSlice {
    damped: Complex64,
    energy_part: Complex64,
}

impl GammaSlice for AnalyticSlice {
    fn value(&self, beta: f64) -> f64 {
        ((Complex64::cis(-2.0 * beta) - 1.0) * self.damped + self.energy_part).norm_sqr()
    }
}

impl Landscape for AnalyticLandscape<'_> {
    type Slice = AnalyticSlice;

    fn at_gamma(&self, gamma: f64) -> AnalyticSlice {
        AnalyticSlice {
            damped: self.state.damped_sum(gamma, self.mode),
            energy_part: self.state.energy_part(gamma, self.target),
        }
    }
}

/// Classically pre-optimized Grover-mixer schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSchedule {
    pub source: String,
    pub mode: DampingMode,
    pub n: usize,
    pub sigma2: f64,
    pub e_min_est: f64,
    #[serde(flatten)]
    pub schedule: ParamSchedule,
    /// Model objective `|Psi_k(E_min^est)|^2` after each layer.
    pub objective: Vec<f64>,
    pub evals: Vec<u64>,
}

impl AnalyticSchedule {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serializes")
    }
}

/// Layer-by-layer maximization of the model probability at the Gumbel-mode
/// estimate `E_min^est = sigma Phi^-1(2^-n)`. No statevector is simulated.
pub fn preoptimize_gm_angles(
    n: usize,
    sigma2: f64,
    depth: usize,
    budget: &OptBudget,
    mode: DampingMode,
) -> Result<AnalyticSchedule> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma2 must be positive, got {sigma2}")));
    }
    if n < 2 {
        return Err(Error::DegenerateEstimate(0.0));
    }
    let e_min_est = emin_estimate_quantile(sigma2.sqrt(), n)?;
    let gamma_max = budget.gamma_scale * std::f64::consts::PI / e_min_est.abs();

    let mut state = AnalyticState::new(n, sigma2)?;
    let mut objective = Vec::with_capacity(depth);
    let mut evals = Vec::with_capacity(depth);
    for k in 0..depth {
        let mut opt = maximize_layer(
            &AnalyticLandscape { state: &state, target: e_min_est, mode },
            gamma_max,
            budget,
        )?;
        if k == 0 {
            (opt.beta, opt.gamma) = mirror_canonical(opt.beta, opt.gamma);
        }
        state = state.step(opt.beta, opt.gamma, mode);
        objective.push(state.success_objective(e_min_est));
        evals.push(opt.evals);
    }
    Ok(AnalyticSchedule {
        source: "analytic".into(),
        mode,
        n,
        sigma2,
        e_min_est,
        schedule: state.schedule(),
        objective,
        evals,
    })
}
