//! Higher-order binary optimization instances over `±1` spins.
//!
//! Basis-state convention used throughout the crate: bit `i` of the integer
//! `z` encodes spin `i`, with bit value 0 meaning `s_i = +1` and 1 meaning
//! `s_i = -1`. A term over `sites` therefore contributes
//! `coeff * (-1)^popcount(z & mask(sites))`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Largest qubit count accepted by spectrum enumeration and the simulator.
pub const MAX_QUBITS: usize = 24;

/// One monomial `coeff * s_{i1} ... s_{id}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuboTerm {
    pub sites: Vec<usize>,
    pub coeff: f64,
}

impl HuboTerm {
    pub fn new(sites: Vec<usize>, coeff: f64) -> Self {
        Self { sites, coeff }
    }

    pub fn order(&self) -> usize {
        self.sites.len()
    }

    /// Bit mask of the sites.
    pub fn mask(&self) -> u64 {
        self.sites.iter().fold(0, |m, &i| m | (1u64 << i))
    }
}

/// A validated instance: `n` spins, interaction order at most `order`, and
/// terms with pairwise distinct site tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct HuboInstance {
    n: usize,
    order: usize,
    label: String,
    terms: Vec<HuboTerm>,
}

#[derive(Deserialize)]
struct RawInstance {
    n: usize,
    order: usize,
    #[serde(default)]
    label: String,
    terms: Vec<HuboTerm>,
}

impl TryFrom<RawInstance> for HuboInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        HuboInstance::new(raw.n, raw.order, raw.terms, raw.label)
    }
}

impl HuboInstance {
    pub fn new(n: usize, order: usize, terms: Vec<HuboTerm>, label: impl Into<String>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidArgument(format!("spin count {n} outside 1..=63")));
        }
        if order == 0 {
            return Err(Error::InvalidArgument("interaction order must be at least 1".into()));
        }
        let mut seen = BTreeSet::new();
        for term in &terms {
            if term.sites.is_empty() || term.sites.len() > order {
                return Err(Error::InvalidArgument(format!(
                    "term {:?} has order {} outside 1..={order}",
                    term.sites,
                    term.sites.len()
                )));
            }
            if !term.sites.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "term sites {:?} are not strictly increasing",
                    term.sites
                )));
            }
            if term.sites.last().is_some_and(|&s| s >= n) {
                return Err(Error::InvalidArgument(format!(
                    "term sites {:?} exceed spin count {n}",
                    term.sites
                )));
            }
            if !term.coeff.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "term {:?} has non-finite coefficient",
                    term.sites
                )));
            }
            if !seen.insert(term.sites.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate term {:?}; merge coefficients first",
                    term.sites
                )));
            }
        }
        Ok(Self {
            n,
            order,
            label: label.into(),
            terms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[HuboTerm] {
        &self.terms
    }

    /// Energy of basis state `z`.
    ///
    /// # Panics
    /// If `z >= 2^n`.
    pub fn energy(&self, z: u64) -> f64 {
        assert!(z >> self.n == 0, "basis state {z} out of range for n={}", self.n);
        self.terms
            .iter()
            .map(|t| {
                if (z & t.mask()).count_ones() & 1 == 0 {
                    t.coeff
                } else {
                    -t.coeff
                }
            })
            .sum()
    }

    /// Spectral variance `sum_terms coeff^2`.
    pub fn sigma_squared(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.coeff).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Energies of all `2^n` basis states, grouped into degenerate levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    energies: Vec<f64>,
    e_min: f64,
    levels: Vec<Level>,
}

/// A group of basis states sharing one energy within the grouping tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// Lowest energy among the members.
    pub energy: f64,
    /// Member basis states, ascending.
    pub members: Vec<usize>,
}

/// Default grouping tolerance, `1e-9 * max(1, |e_min|)`.
pub fn default_group_tol(e_min: f64) -> f64 {
    1e-9 * e_min.abs().max(1.0)
}

impl Spectrum {
    /// Build a spectrum from an explicit energy table (length a power of two).
    ///
    /// This is also the hook for diagnostic landscapes that no low-order
    /// instance can express, such as a single marked state.
    pub fn from_energies(energies: Vec<f64>, group_tol: Option<f64>) -> Result<Self> {
        let len = energies.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "energy table length {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::Capacity { what: "spectrum", n, max: MAX_QUBITS });
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument("energies must be finite".into()));
        }
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| match energies[a].total_cmp(&energies[b]) {
            Ordering::Equal => a.cmp(&b),
            o => o,
        });
        let e_min = energies[order[0]];
        let tol = match group_tol {
            Some(t) if t >= 0.0 => t,
            Some(t) => {
                return Err(Error::InvalidArgument(format!("negative grouping tolerance {t}")))
            }
            None => default_group_tol(e_min),
        };

        // a level spans at most `tol` from its lowest member
        let mut levels: Vec<Level> = Vec::new();
        for &z in &order {
            let e = energies[z];
            match levels.last_mut() {
                Some(level) if e - level.energy <= tol => level.members.push(z),
                _ => levels.push(Level { energy: e, members: vec![z] }),
            }
        }
        for level in &mut levels {
            level.members.sort_unstable();
        }
        Ok(Self { n, energies, e_min, levels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    pub fn ground_states(&self) -> &[usize] {
        &self.levels[0].members
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Mean energy over all basis states.
    pub fn mean(&self) -> f64 {
        self.energies.iter().sum::<f64>() / self.dim() as f64
    }

    /// Mean squared energy over all basis states.
    pub fn second_moment(&self) -> f64 {
        self.energies.iter().map(|e| e * e).sum::<f64>() / self.dim() as f64
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} e_min={} ground degeneracy={} levels={}",
            self.n,
            self.e_min,
            self.ground_states().len(),
            self.levels.len()
        )
    }
}

/// Evaluate every basis-state energy and group the levels.
///
/// `group_tol = None` selects [`default_group_tol`].
pub fn enumerate_spectrum(instance: &HuboInstance, group_tol: Option<f64>) -> Result<Spectrum> {
    let n = instance.n();
    if n > MAX_QUBITS {
        return Err(Error::Capacity { what: "spectrum", n, max: MAX_QUBITS });
    }
    let dim = 1usize << n;
    let mut energies = vec![0.0; dim];
    for term in instance.terms() {
        let mask = term.mask();
        for (z, e) in energies.iter_mut().enumerate() {
            if (z as u64 & mask).count_ones() & 1 == 0 {
                *e += term.coeff;
            } else {
                *e -= term.coeff;
            }
        }
    }
    Spectrum::from_energies(energies, group_tol)
}

/// Random ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    /// Gaussian couplings on every subset of size 2..=D.
    #[serde(rename = "SK")]
    Sk,
    /// Unit-weight hyperedges of size 2..=D, each kept with probability 1/2.
    #[serde(rename = "MaxCutHypergraph")]
    MaxCutHypergraph,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Sk => "SK",
            Problem::MaxCutHypergraph => "MaxCutHypergraph",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_generator_args(n: usize, order: usize) -> Result<()> {
    if n == 0 || n > 63 {
        return Err(Error::InvalidArgument(format!("spin count {n} outside 1..=63")));
    }
    if order < 2 || order > n {
        return Err(Error::InvalidArgument(format!(
            "interaction order {order} outside 2..={n}"
        )));
    }
    Ok(())
}

/// Every site subset of size `2..=order`, by size then lexicographically.
fn candidate_subsets(n: usize, order: usize) -> impl Iterator<Item = Vec<usize>> {
    (2..=order).flat_map(move |d| (0..n).combinations(d))
}

/// Spin glass with i.i.d. standard normal couplings on every subset of size
/// `2..=order` and no linear terms.
pub fn generate_sk(n: usize, order: usize, seed: u64) -> Result<HuboInstance> {
    check_generator_args(n, order)?;
    let mut rng = SeedStream::new(seed);
    let terms = candidate_subsets(n, order)
        .map(|sites| HuboTerm::new(sites, rng.standard_normal()))
        .collect();
    HuboInstance::new(n, order, terms, format!("SK n={n} D={order} seed={seed}"))
}

/// Random hypergraph: each subset of size `2..=order` becomes a term with
/// coefficient `sign` (`+1` or `-1`) with probability 1/2.
pub fn generate_maxcut_hypergraph_signed(
    n: usize,
    order: usize,
    seed: u64,
    sign: f64,
) -> Result<HuboInstance> {
    check_generator_args(n, order)?;
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::InvalidArgument(format!("max-cut sign must be +1 or -1, got {sign}")));
    }
    let mut rng = SeedStream::new(seed);
    let terms = candidate_subsets(n, order)
        .filter(|_| rng.coin())
        .map(|sites| HuboTerm::new(sites, sign))
        .collect();
    HuboInstance::new(
        n,
        order,
        terms,
        format!("MaxCutHypergraph n={n} D={order} seed={seed}"),
    )
}

/// [`generate_maxcut_hypergraph_signed`] with unit coefficients `+1`.
pub fn generate_maxcut_hypergraph(n: usize, order: usize, seed: u64) -> Result<HuboInstance> {
    generate_maxcut_hypergraph_signed(n, order, seed, 1.0)
}

/// Dispatch on [`Problem`].
pub fn generate(problem: Problem, n: usize, order: usize, seed: u64, maxcut_sign: f64) -> Result<HuboInstance> {
    match problem {
        Problem::Sk => generate_sk(n, order, seed),
        Problem::MaxCutHypergraph => generate_maxcut_hypergraph_signed(n, order, seed, maxcut_sign),
    }
}
