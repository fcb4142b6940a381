//! Two-angle maximization shared by the layer-wise optimizers.
//!
//! A coarse grid over `beta in [0, pi)` and `gamma in [-gamma_max, gamma_max]`
//! seeds a few Nelder-Mead refinements. The grid is evaluated row by row:
//! every objective here factors into a `gamma`-dependent part that costs
//! `O(2^n)` (or `O(k)` for the analytic model) and a cheap `beta`-dependent
//! part, which [`Landscape::at_gamma`] exposes.

use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Objective of one new layer with everything before it frozen.
pub trait Landscape: Sync {
    type Slice: GammaSlice;

    fn at_gamma(&self, gamma: f64) -> Self::Slice;

    fn value(&self, beta: f64, gamma: f64) -> f64 {
        self.at_gamma(gamma).value(beta)
    }
}

/// The objective restricted to a fixed `gamma`.
pub trait GammaSlice {
    fn value(&self, beta: f64) -> f64;
}

/// Resources for one layer search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptBudget {
    /// Grid points along `beta in [0, pi)`.
    pub beta_points: usize,
    /// Grid points along `gamma in [-gamma_max, gamma_max]`, endpoints included.
    pub gamma_points: usize,
    /// Nelder-Mead evaluations per start.
    pub refine_evals: usize,
    /// Number of best grid points refined.
    pub starts: usize,
    /// Refinement stops once the simplex values spread less than this.
    pub tol: f64,
    /// `gamma_max = gamma_scale * pi / |E_min^est|`.
    pub gamma_scale: f64,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self {
            beta_points: 24,
            gamma_points: 48,
            refine_evals: 200,
            starts: 3,
            tol: 1e-10,
            gamma_scale: 4.0,
        }
    }
}

/// Best angles found for one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerOptimum {
    pub beta: f64,
    pub gamma: f64,
    pub value: f64,
    pub evals: u64,
}

// values closer than this count as ties
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    beta: f64,
    gamma: f64,
    value: f64,
}

// Highest value wins; near-ties go to the smallest |beta|, then |gamma|.
fn pick_best(cands: &[Candidate]) -> Candidate {
    let top = cands.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    *cands
        .iter()
        .filter(|c| c.value >= top - TIE_TOL)
        .min_by(|a, b| {
            a.beta
                .abs()
                .total_cmp(&b.beta.abs())
                .then(a.gamma.abs().total_cmp(&b.gamma.abs()))
        })
        .expect("non-empty candidate list")
}

fn wrap_beta(beta: f64) -> f64 {
    let b = beta.rem_euclid(PI);
    // rem_euclid can round up to exactly pi
    if b >= PI {
        0.0
    } else {
        b
    }
}

/// Representative of the pair `(beta, gamma) ~ (pi - beta, -gamma)` with
/// `gamma >= 0`.
///
/// Starting from `|sym>` (real amplitudes, real spectrum) the two members
/// of the pair give complex-conjugate states, hence identical probabilities
/// at every later depth once the rest of the schedule is mirrored too. The
/// first layer therefore has an exact two-fold tie which this resolves.
pub fn mirror_canonical(beta: f64, gamma: f64) -> (f64, f64) {
    if gamma < 0.0 {
        (wrap_beta(PI - beta), -gamma)
    } else {
        (beta, gamma)
    }
}

/// Maximize `landscape` over `(beta, gamma)`.
///
/// The identity layer `(0, 0)` is always a candidate, so the result is
/// never worse than leaving the layer out. Returned `beta` lies in `[0, pi)`;
/// every landscape in this crate is `pi`-periodic in `beta` at the
/// probability level.
pub fn maximize_layer<L: Landscape>(landscape: &L, gamma_max: f64, budget: &OptBudget) -> Result<LayerOptimum> {
    let grid_evals = budget.beta_points * budget.gamma_points;
    if grid_evals == 0 && (budget.refine_evals == 0 || budget.starts == 0) {
        return Err(Error::Config("optimizer budget allows no evaluations".into()));
    }
    if !(gamma_max.is_finite() && gamma_max > 0.0) {
        return Err(Error::Config(format!("invalid gamma range {gamma_max}")));
    }

    let identity = Candidate {
        beta: 0.0,
        gamma: 0.0,
        value: landscape.value(0.0, 0.0),
    };
    let mut evals = 1u64;

    let betas: Vec<f64> = (0..budget.beta_points)
        .map(|i| PI * i as f64 / budget.beta_points as f64)
        .collect();
    let gammas: Vec<f64> = match budget.gamma_points {
        0 => vec![],
        1 => vec![0.0],
        m => (0..m)
            .map(|j| -gamma_max + 2.0 * gamma_max * j as f64 / (m - 1) as f64)
            .collect(),
    };
    let mut grid: Vec<Candidate> = gammas
        .par_iter()
        .flat_map_iter(|&gamma| {
            let slice = landscape.at_gamma(gamma);
            betas
                .iter()
                .map(|&beta| Candidate { beta, gamma, value: slice.value(beta) })
                .collect::<Vec<_>>()
        })
        .collect();
    evals += grid.len() as u64;

    let mut finalists = vec![identity];
    let mut starts = Vec::new();
    if grid.is_empty() {
        starts.push(identity);
    } else {
        while starts.len() < budget.starts && !grid.is_empty() {
            let best = pick_best(&grid);
            grid.retain(|c| !(c.beta == best.beta && c.gamma == best.gamma));
            starts.push(best);
        }
        finalists.extend(starts.iter().copied());
    }

    let step_beta = PI / budget.beta_points.max(1) as f64 / 2.0;
    let step_gamma = gamma_max / budget.gamma_points.max(2) as f64;
    for start in starts.iter().take(budget.starts) {
        let (point, value, used) = nelder_mead(
            |x| -landscape.value(x[0], x[1]),
            [start.beta, start.gamma],
            [step_beta, step_gamma],
            budget.refine_evals,
            budget.tol,
        );
        evals += used;
        finalists.push(Candidate {
            beta: wrap_beta(point[0]),
            gamma: point[1],
            value: -value,
        });
    }

    let best = pick_best(&finalists);
    Ok(LayerOptimum {
        beta: best.beta,
        gamma: best.gamma,
        value: best.value,
        evals,
    })
}

/// Minimize `f` over the plane with a Nelder-Mead simplex.
///
/// Returns the best vertex, its value, and the number of evaluations.
pub fn nelder_mead<F>(f: F, start: [f64; 2], step: [f64; 2], max_evals: usize, tol: f64) -> ([f64; 2], f64, u64)
where
    F: Fn([f64; 2]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let evals = Cell::new(0u64);
    let eval = |x: [f64; 2]| {
        evals.set(evals.get() + 1);
        f(x)
    };
    if max_evals == 0 {
        return (start, f64::INFINITY, 0);
    }
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut values = [eval(simplex[0]), f64::INFINITY, f64::INFINITY];
    for i in 1..3 {
        if (evals.get() as usize) < max_evals {
            values[i] = eval(simplex[i]);
        }
    }

    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    while (evals.get() as usize) < max_evals {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);
        if values[worst] - values[best] <= tol {
            break;
        }
        let centroid = lerp(simplex[best], simplex[mid], 0.5);
        let reflected = lerp(centroid, simplex[worst], -REFLECT);
        let fr = eval(reflected);
        if fr < values[best] {
            if (evals.get() as usize) >= max_evals {
                simplex[worst] = reflected;
                values[worst] = fr;
                break;
            }
            let expanded = lerp(centroid, simplex[worst], -EXPAND);
            let fe = eval(expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[mid] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            if (evals.get() as usize) >= max_evals {
                break;
            }
            let (target, ft) = if fr < values[worst] {
                (lerp(centroid, reflected, CONTRACT), None)
            } else {
                (lerp(centroid, simplex[worst], CONTRACT), Some(values[worst]))
            };
            let fc = eval(target);
            let bound = ft.unwrap_or(fr);
            if fc < bound {
                simplex[worst] = target;
                values[worst] = fc;
            } else {
                for &i in &[mid, worst] {
                    if (evals.get() as usize) >= max_evals {
                        break;
                    }
                    simplex[i] = lerp(simplex[best], simplex[i], SHRINK);
                    values[i] = eval(simplex[i]);
                }
            }
        }
    }

    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best], values[best], evals.get())
}
