//! Query lower-bound experiment on the planted-element pair `(f, g)`.
//!
//! A prober spends up to `budget` queries on `g` and wins when some probe
//! takes a value that `f` would not give. Probes are fixed per trial before
//! the budget is known, so frequencies are monotone across budgets.

use std::fmt;
use std::str::FromStr;

use super::exec::Execution;
use crate::error::{Error, Result};
use crate::oracle::{adversarial_pair, Oracle};
use crate::rng::{derive_seed, SeedStream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProbeMode {
    /// Independent uniform size-`(c-1)` sets.
    #[default]
    Random,
    /// A random partition into size-`(c-1)` chunks, probed in turn.
    Disjoint,
}

impl FromStr for ProbeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(ProbeMode::Random),
            "disjoint" => Ok(ProbeMode::Disjoint),
            other => Err(Error::validation(format!(
                "unknown probe mode `{other}` (expected random or disjoint)"
            ))),
        }
    }
}

impl fmt::Display for ProbeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeMode::Random => "random",
            ProbeMode::Disjoint => "disjoint",
        })
    }
}

fn check(n: usize, c: usize, trials: usize) -> Result<()> {
    if c < 2 {
        return Err(Error::validation(format!("c must be at least 2 (got {c})")));
    }
    if n < c {
        return Err(Error::validation(format!("n must be at least c (got n={n}, c={c})")));
    }
    if trials == 0 {
        return Err(Error::validation("trials must be at least 1"));
    }
    Ok(())
}

/// Index of the first probe that tells `g` apart from `f`, spending at
/// most `budget` queries on `g`.
pub fn first_hit(n: usize, c: usize, budget: u64, trial_seed: u64, mode: ProbeMode) -> Result<Option<u64>> {
    let (f, g, _) = adversarial_pair(n, c, derive_seed(trial_seed, 0))?;
    let mut rng = SeedStream::new(derive_seed(trial_seed, 1));
    let size = c - 1;
    let mut pool: Vec<usize> = (0..n).collect();
    if mode == ProbeMode::Disjoint {
        rng.shuffle(&mut pool);
    }
    let chunks = n.div_ceil(size);
    for j in 0..budget {
        let probe: Vec<usize> = match mode {
            ProbeMode::Random => {
                for i in 0..size {
                    let r = i + rng.below(n - i);
                    pool.swap(i, r);
                }
                pool[..size].to_vec()
            }
            ProbeMode::Disjoint => {
                let start = (j as usize % chunks) * size;
                pool[start..(start + size).min(n)].to_vec()
            }
        };
        if g.evaluate(&probe)? != f.evaluate(&probe)? {
            debug_assert!(g.queries() <= budget);
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Fraction of `trials` in which the planted element is found within
/// `budget` queries. Budget 0 gives 0.
pub fn lower_bound_experiment(n: usize, c: usize, budget: u64, trials: usize, seed: u64) -> Result<f64> {
    Ok(lower_bound_sweep(n, c, &[budget], trials, seed, ProbeMode::Random, Execution::default())?[0])
}

/// Hit frequency for each budget, using the same trials for all of them.
pub fn lower_bound_sweep(
    n: usize,
    c: usize,
    budgets: &[u64],
    trials: usize,
    seed: u64,
    mode: ProbeMode,
    exec: Execution,
) -> Result<Vec<f64>> {
    check(n, c, trials)?;
    let max_budget = budgets.iter().copied().max().unwrap_or(0);
    let hits = exec
        .map_indexed(trials, |t| first_hit(n, c, max_budget, derive_seed(seed, t as u64), mode))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(budgets
        .iter()
        .map(|&b| hits.iter().filter(|h| h.is_some_and(|j| j < b)).count() as f64 / trials as f64)
        .collect())
}

/// Bound on the hit probability for a budget: `budget (c-1) / n`, capped at 1.
pub fn hit_bound(n: usize, c: usize, budget: u64) -> f64 {
    (budget as f64 * (c - 1) as f64 / n as f64).min(1.0)
}

/// Standard deviation of a frequency over `trials` Bernoulli(`p`) draws.
pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
