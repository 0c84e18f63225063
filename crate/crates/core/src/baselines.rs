//! Reference algorithms: greedy (plain and lazy), stochastic greedy,
//! SieveStream++, uniform random sampling and exhaustive search.
//!
//! All of them assume `f(∅) = 0`, which holds for every objective in
//! [`crate::oracle`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::rng::SeedStream;
use crate::solution::{Metrics, PeakMeter, QueryMark, Solution};

/// Upper limit on subsets enumerated by [`brute_force_opt`].
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::validation("cardinality k must be at least 1"));
    }
    Ok(())
}

fn with_element(set: &[usize], e: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(set.len() + 1);
    v.extend_from_slice(set);
    v.push(e);
    v
}

/// Heap entry for lazy greedy. Ordered by cached bound, then by lower id.
#[derive(Clone, Copy, Debug)]
pub struct LazyEntry {
    pub element: usize,
    pub bound: f64,
    /// Round in which `bound` was last computed.
    pub stamp: usize,
}

impl PartialEq for LazyEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LazyEntry {}

impl PartialOrd for LazyEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LazyEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.element.cmp(&self.element))
    }
}

/// `k` rounds of best-marginal selection, ties to the lowest id. Stops early
/// if the best marginal is negative. The lazy mode keeps stale marginals in
/// a max-heap and re-evaluates only the top; it returns the same set.
pub fn greedy(oracle: &dyn Oracle, k: usize, lazy: bool) -> Result<Solution> {
    check_k(k)?;
    let mark = QueryMark::of(oracle);
    let n = oracle.ground_size();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut value = 0.0f64;
    let mut rounds = 0u32;

    if lazy {
        let mut heap: BinaryHeap<LazyEntry> = (0..n)
            .map(|element| LazyEntry {
                element,
                bound: f64::INFINITY,
                stamp: usize::MAX,
            })
            .collect();
        let mut last_query = vec![0.0f64; n];
        while chosen.len() < k {
            let round = chosen.len();
            let mut picked = None;
            while let Some(top) = heap.pop() {
                if top.stamp == round {
                    picked = Some(top);
                    break;
                }
                let q = oracle.evaluate(&with_element(&chosen, top.element))?;
                last_query[top.element] = q;
                heap.push(LazyEntry {
                    element: top.element,
                    bound: q - value,
                    stamp: round,
                });
            }
            rounds += 1;
            match picked {
                Some(top) if top.bound >= 0.0 => {
                    chosen.push(top.element);
                    value = last_query[top.element];
                }
                _ => break,
            }
        }
    } else {
        let mut taken = vec![false; n];
        while chosen.len() < k {
            let mut best: Option<(f64, usize, f64)> = None;
            for (e, _) in taken.iter().enumerate().filter(|(_, &t)| !t) {
                let q = oracle.evaluate(&with_element(&chosen, e))?;
                let gain = q - value;
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, e, q));
                }
            }
            rounds += 1;
            match best {
                Some((gain, e, q)) if gain >= 0.0 => {
                    chosen.push(e);
                    taken[e] = true;
                    value = q;
                }
                _ => break,
            }
        }
    }

    Ok(Solution {
        value: Some(value),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: chosen.len(),
            passes: rounds,
        },
        elements: chosen,
        trace: None,
    })
}

/// Per-round sample size `⌈(n/k) ln(1/eps)⌉`.
pub fn sample_size(n: usize, k: usize, eps: f64) -> usize {
    ((n as f64 / k as f64) * (1.0 / eps).ln()).ceil() as usize
}

/// Stochastic greedy: each of `k` rounds samples [`sample_size`] unselected
/// elements without replacement and adds the best (ties to the lowest id).
pub fn stochastic_greedy(oracle: &dyn Oracle, k: usize, eps: f64, seed: u64) -> Result<Solution> {
    check_k(k)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::validation(format!("eps must lie in (0, 1) (got {eps})")));
    }
    let mark = QueryMark::of(oracle);
    let n = oracle.ground_size();
    let s = sample_size(n, k, eps);
    let mut rng = SeedStream::new(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut value = 0.0f64;
    let mut rounds = 0u32;

    while chosen.len() < k && !pool.is_empty() {
        let take = s.min(pool.len());
        for j in 0..take {
            let r = j + rng.below(pool.len() - j);
            pool.swap(j, r);
        }
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for (slot, &e) in pool[..take].iter().enumerate() {
            let q = oracle.evaluate(&with_element(&chosen, e))?;
            let gain = q - value;
            let better = match best {
                None => true,
                Some((g, id, _, _)) => gain > g || (gain == g && e < id),
            };
            if better {
                best = Some((gain, e, slot, q));
            }
        }
        rounds += 1;
        match best {
            Some((gain, e, slot, q)) if gain >= 0.0 => {
                chosen.push(e);
                pool.swap_remove(slot);
                value = q;
            }
            _ => break,
        }
    }

    Ok(Solution {
        value: Some(value),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: chosen.len() + s.min(n),
            passes: rounds,
        },
        elements: chosen,
        trace: None,
    })
}

#[derive(Clone, Debug, Default)]
struct Sieve {
    set: Vec<usize>,
    value: f64,
}

/// Largest number of sieves alive at once in one [`sieve_stream_pp`] run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SieveStats {
    pub max_live_sieves: usize,
}

/// SieveStream++ for monotone objectives. Thresholds `v = (1+eps)^i` are
/// kept for `max(LB, Δ) ≤ v ≤ 2kΔ`, where `Δ` is the largest singleton
/// value seen and `LB` the best sieve value. Sieve `S_v` accepts `e` when
/// its gain is at least `(v/2 - f(S_v)) / (k - |S_v|)`.
pub fn sieve_stream_pp(
    oracle: &dyn Oracle,
    k: usize,
    eps: f64,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    sieve_stream_pp_detailed(oracle, k, eps, stream).map(|(s, _)| s)
}

pub fn sieve_stream_pp_detailed(
    oracle: &dyn Oracle,
    k: usize,
    eps: f64,
    stream: impl IntoIterator<Item = usize>,
) -> Result<(Solution, SieveStats)> {
    check_k(k)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation(format!("eps must be positive (got {eps})")));
    }
    let mark = QueryMark::of(oracle);
    let base = (1.0 + eps).ln();
    let kf = k as f64;
    let mut sieves: BTreeMap<i64, Sieve> = BTreeMap::new();
    let mut delta = 0.0f64;
    let mut lower = 0.0f64;
    let mut best = Sieve::default();
    let mut peak = PeakMeter::default();
    let mut stats = SieveStats::default();

    for e in stream {
        let single = oracle.evaluate(&[e])?;
        delta = delta.max(single);
        if delta > 0.0 {
            let lo = lower.max(delta);
            let hi = 2.0 * kf * delta;
            let mut i_lo = (lo.ln() / base).ceil() as i64;
            while (1.0 + eps).powi(i_lo as i32) < lo {
                i_lo += 1;
            }
            while (1.0 + eps).powi((i_lo - 1) as i32) >= lo {
                i_lo -= 1;
            }
            let mut i_hi = (hi.ln() / base).floor() as i64;
            while (1.0 + eps).powi(i_hi as i32) > hi {
                i_hi -= 1;
            }
            while (1.0 + eps).powi((i_hi + 1) as i32) <= hi {
                i_hi += 1;
            }
            sieves = sieves.split_off(&i_lo);
            for i in i_lo..=i_hi {
                sieves.entry(i).or_default();
            }
        }
        stats.max_live_sieves = stats.max_live_sieves.max(sieves.len());

        for (&i, sieve) in sieves.iter_mut() {
            let size = sieve.set.len();
            if size >= k {
                continue;
            }
            let v = (1.0 + eps).powi(i as i32);
            let q = if size == 0 {
                single
            } else {
                oracle.evaluate(&with_element(&sieve.set, e))?
            };
            let gain = q - sieve.value;
            if gain >= (v / 2.0 - sieve.value) / (k - size) as f64 {
                sieve.set.push(e);
                sieve.value = q;
                if q > best.value {
                    best = sieve.clone();
                }
                lower = lower.max(q);
            }
        }
        let stored: usize = sieves.values().map(|s| s.set.len()).sum::<usize>() + best.set.len();
        peak.observe(stored + 1);
    }

    Ok((
        Solution {
            elements: best.set,
            value: Some(best.value),
            metrics: Metrics {
                queries: mark.since(oracle),
                peak_memory: peak.peak(),
                passes: 1,
            },
            trace: None,
        },
        stats,
    ))
}

/// Best of `trials` uniform size-`k` subsets; exactly `trials` queries.
pub fn random_baseline(oracle: &dyn Oracle, k: usize, trials: usize, seed: u64) -> Result<Solution> {
    check_k(k)?;
    if trials == 0 {
        return Err(Error::validation("trials must be at least 1"));
    }
    let mark = QueryMark::of(oracle);
    let n = oracle.ground_size();
    let size = k.min(n);
    let mut rng = SeedStream::new(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..trials {
        for j in 0..size {
            let r = j + rng.below(n - j);
            pool.swap(j, r);
        }
        let sample = pool[..size].to_vec();
        let q = oracle.evaluate(&sample)?;
        if best.as_ref().is_none_or(|(b, _)| q > *b) {
            best = Some((q, sample));
        }
    }
    let (value, elements) = best.expect("trials >= 1");
    Ok(Solution {
        elements,
        value: Some(value),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: 2 * size,
            passes: 0,
        },
        trace: None,
    })
}

/// Number of subsets of size at most `k` drawn from `n` elements.
pub fn subsets_up_to(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for j in 0..=k.min(n) {
        total += binom;
        binom = binom * (n - j) as u128 / (j + 1) as u128;
    }
    total
}

/// Exact maximum over all subsets of size at most `k`, scanned by size and
/// then lexicographically; the first maximizer wins.
pub fn brute_force_opt(oracle: &dyn Oracle, k: usize) -> Result<Solution> {
    let n = oracle.ground_size();
    let count = subsets_up_to(n, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::validation(format!(
            "brute force over n={n}, k={k} needs {count} subsets (limit {BRUTE_FORCE_LIMIT})"
        )));
    }
    let mark = QueryMark::of(oracle);
    let mut best: (f64, Vec<usize>) = (oracle.evaluate(&[])?, Vec::new());
    for size in 1..=k.min(n) {
        for set in (0..n).combinations(size) {
            let q = oracle.evaluate(&set)?;
            if q > best.0 {
                best = (q, set);
            }
        }
    }
    Ok(Solution {
        elements: best.1,
        value: Some(best.0),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: 2 * k.min(n),
            passes: 0,
        },
        trace: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Graph, ObjectiveKind, ValueOracle};
    use std::sync::Arc;

    fn path4(kind: ObjectiveKind) -> ValueOracle {
        let g = Graph::from_edges(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        ValueOracle::for_graph(kind, Arc::new(g), 0).unwrap()
    }

    #[test]
    fn greedy_path_tie_goes_low() {
        for lazy in [false, true] {
            let s = greedy(&path4(ObjectiveKind::Coverage), 1, lazy).unwrap();
            assert_eq!(s.elements, vec![1]);
            assert_eq!(s.value, Some(3.0));
        }
    }

    #[test]
    fn greedy_modular_top_k() {
        let o = ValueOracle::modular(vec![3.0, 9.0, 1.0, 7.0, 5.0]);
        for lazy in [false, true] {
            let mut s = greedy(&o.fresh(), 3, lazy).unwrap().elements;
            s.sort();
            assert_eq!(s, vec![1, 3, 4]);
        }
        let plain = o.fresh();
        let lazy = o.fresh();
        greedy(&plain, 3, false).unwrap();
        greedy(&lazy, 3, true).unwrap();
        assert!(plain.queries() <= 3 * 5);
        assert!(lazy.queries() <= plain.queries());
    }

    #[test]
    fn greedy_stops_on_negative_gain() {
        let g = Graph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let o = ValueOracle::for_graph(ObjectiveKind::MaxCut, Arc::new(g), 0).unwrap();
        let s = greedy(&o, 3, false).unwrap();
        assert_eq!(s.value, Some(2.0));
        assert!(s.len() <= 2);
    }

    #[test]
    fn stochastic_full_sample_matches_greedy() {
        let g = Graph::erdos_renyi(30, 0.15, 4).unwrap();
        let o = ValueOracle::for_graph(ObjectiveKind::Coverage, Arc::new(g), 0).unwrap();
        // ln(1/eps) >= k makes every round scan the whole pool
        let eps = (-6.0f64).exp();
        let a = stochastic_greedy(&o.fresh(), 5, eps, 11).unwrap();
        let b = greedy(&o.fresh(), 5, false).unwrap();
        assert_eq!(a.elements, b.elements);
    }

    #[test]
    fn stochastic_query_bound_and_replay() {
        let g = Graph::barabasi_albert(200, 3, 1).unwrap();
        let o = ValueOracle::for_graph(ObjectiveKind::Coverage, Arc::new(g), 0).unwrap();
        let (n, k, eps) = (200usize, 10usize, 0.1f64);
        let a = stochastic_greedy(&o.fresh(), k, eps, 5).unwrap();
        let b = stochastic_greedy(&o.fresh(), k, eps, 5).unwrap();
        assert_eq!(a, b);
        let bound = (n as f64 * (1.0 / eps).ln()).ceil() as u64 + k as u64;
        assert!(a.metrics.queries <= bound);
    }

    #[test]
    fn sieve_single_nonzero_element() {
        let o = ValueOracle::modular(vec![0.0, 0.0, 4.0, 0.0]);
        let s = sieve_stream_pp(&o, 2, 0.1, 0..4).unwrap();
        assert_eq!(s.elements, vec![2]);
        assert_eq!(s.value, Some(4.0));
    }

    #[test]
    fn sieve_half_ratio_on_small_coverage() {
        for seed in 0..30u64 {
            let g = Graph::erdos_renyi(12, 0.25, seed).unwrap();
            let o = ValueOracle::for_graph(ObjectiveKind::Coverage, Arc::new(g), 0).unwrap();
            let opt = brute_force_opt(&o.fresh(), 3).unwrap().value.unwrap();
            let (s, stats) = sieve_stream_pp_detailed(&o, 3, 0.1, 0..12).unwrap();
            assert!(s.value.unwrap() >= (0.5 - 0.1) * opt - 1e-9);
            let width = ((2.0 * 3.0f64).ln() / 1.1f64.ln()).floor() as usize + 2;
            assert!(stats.max_live_sieves <= width, "{} > {width}", stats.max_live_sieves);
            assert!(s.metrics.peak_memory <= 3 * width + 3 + 1);
        }
    }

    #[test]
    fn random_counts_trials() {
        let o = ValueOracle::modular((0..20).map(f64::from).collect());
        let s = random_baseline(&o, 4, 7, 3).unwrap();
        assert_eq!(s.metrics.queries, 7);
        assert_eq!(s.len(), 4);
        assert!(random_baseline(&o, 4, 0, 3).is_err());
    }

    #[test]
    fn random_expectation_on_uniform_weights() {
        let w: Vec<f64> = (0..50).map(|i| (i % 10) as f64).collect();
        let mean_w = 4.5;
        let o = ValueOracle::modular(w);
        let trials = 400u64;
        let total: f64 = (0..trials)
            .map(|seed| random_baseline(&o, 5, 1, seed).unwrap().value.unwrap())
            .sum();
        let mean = total / trials as f64;
        assert!((mean - 5.0 * mean_w).abs() < 1.5, "{mean}");
    }

    #[test]
    fn brute_force_examples() {
        let s = brute_force_opt(&path4(ObjectiveKind::Coverage), 2).unwrap();
        assert_eq!(s.value, Some(4.0));
        let o = ValueOracle::modular(vec![2.0, 8.0, 5.0, 1.0]);
        let mut top = brute_force_opt(&o, 2).unwrap().elements;
        top.sort();
        assert_eq!(top, vec![1, 2]);
        let g = Graph::from_edges(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let tri = ValueOracle::for_graph(ObjectiveKind::MaxCut, Arc::new(g), 0).unwrap();
        let s = brute_force_opt(&tri, 2).unwrap();
        assert_eq!(s.value, Some(2.0));
        assert_eq!(tri.queries(), 7);
    }

    #[test]
    fn brute_force_guard() {
        assert_eq!(subsets_up_to(4, 2), 11);
        let o = ValueOracle::modular(vec![1.0; 60]);
        assert!(brute_force_opt(&o, 10).is_err());
    }
}
