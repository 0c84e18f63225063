//! Multi-pass descending-threshold boosters.
//!
//! Both take a value `Γ` with `Γ ≤ OPT ≤ Γ/α` (typically the answer of a
//! single-pass run and its proven ratio), then sweep the stream repeatedly
//! with a threshold that starts near `OPT/k` and shrinks by `(1 - eps)` per
//! pass. [`boost_ratio`] grows one set for monotone objectives;
//! [`multipass_linear`] grows two disjoint sets for general objectives.

use crate::error::{Error, Result};
use crate::monotone::{dispatch_monotone, Branch, QsConfig};
use crate::nonmonotone::{quickstream_nm, NmConfig};
use crate::oracle::Oracle;
use crate::solution::{Metrics, PeakMeter, QueryMark, Solution};
use crate::trace::{StepRecord, Trace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PassConfig {
    pub eps: f64,
    /// Skip a query when an earlier marginal of the same element is already
    /// below the current threshold. Reported query counts stay exact.
    pub lazy: bool,
    pub trace: bool,
}

impl PassConfig {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::validation(format!("eps must lie in (0, 1) (got {eps})")));
        }
        Ok(PassConfig {
            eps,
            lazy: false,
            trace: false,
        })
    }

    pub fn with_lazy(mut self, on: bool) -> Self {
        self.lazy = on;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }
}

/// Geometric threshold sequence. The loop runs while `tau ≥ floor`; with
/// `decay_first` the threshold shrinks before each pass rather than after.
#[derive(Clone, Debug)]
pub struct ThresholdSchedule {
    tau: f64,
    floor: f64,
    decay: f64,
    decay_first: bool,
}

impl ThresholdSchedule {
    pub fn new(start: f64, floor: f64, eps: f64, decay_first: bool) -> Self {
        ThresholdSchedule {
            tau: start,
            floor,
            decay: 1.0 - eps,
            decay_first,
        }
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// `⌈ln(start/floor)/eps⌉ + 1`, an upper bound on the number of passes.
    pub fn pass_bound(start: f64, floor: f64, eps: f64) -> u32 {
        ((start / floor).ln() / eps).ceil().max(0.0) as u32 + 1
    }
}

impl Iterator for ThresholdSchedule {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if !(self.tau >= self.floor) {
            return None;
        }
        if self.decay_first {
            self.tau *= self.decay;
            Some(self.tau)
        } else {
            let t = self.tau;
            self.tau *= self.decay;
            Some(t)
        }
    }
}

fn check_guess(gamma: f64, alpha: f64, k: usize) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::validation(format!("Gamma must be positive (got {gamma})")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::validation(format!("alpha must lie in (0, 1] (got {alpha})")));
    }
    if k == 0 {
        return Err(Error::validation("cardinality k must be at least 1"));
    }
    Ok(())
}

/// Pass bound for [`boost_ratio`]: `⌈ln(8/α)/eps⌉`.
pub fn boost_pass_bound(alpha: f64, eps: f64) -> u32 {
    ((8.0 / alpha).ln() / eps).ceil() as u32
}

/// One growing set; an element joins when its gain is at least the current
/// pass threshold. Starts at `Γ/(αk)`, stops once the threshold falls below
/// `Γ/(8k)` or the set reaches `k` elements. Needs `0 < eps < 1/2`.
pub fn boost_ratio(
    oracle: &dyn Oracle,
    k: usize,
    alpha: f64,
    gamma: f64,
    cfg: &PassConfig,
    stream: &[usize],
) -> Result<Solution> {
    check_guess(gamma, alpha, k)?;
    if !(cfg.eps > 0.0 && cfg.eps < 0.5) {
        return Err(Error::validation(format!("eps must lie in (0, 1/2) (got {})", cfg.eps)));
    }
    let n = oracle.ground_size();
    let mark = QueryMark::of(oracle);
    let start = gamma / (alpha * k as f64);
    let schedule = ThresholdSchedule::new(start, gamma / (8.0 * k as f64), cfg.eps, true);
    let mut trace = cfg.trace.then(|| {
        let mut t = Trace::new(1);
        t.size_bound = Some(k);
        t.tau_decay = Some(schedule.decay());
        t
    });

    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut member = vec![false; n];
    let mut value = 0.0f64;
    let mut bound = vec![f64::INFINITY; if cfg.lazy { n } else { 0 }];
    let mut peak = PeakMeter::default();
    let mut passes = 0u32;

    'passes: for tau in schedule {
        if let Some(t) = trace.as_mut() {
            t.taus.push(tau);
        }
        for &e in stream {
            if member[e] {
                continue;
            }
            if cfg.lazy && bound[e] < tau {
                continue;
            }
            peak.observe(chosen.len() + 1);
            let mut with = chosen.clone();
            with.push(e);
            let q = oracle.evaluate(&with)?;
            let gain = q - value;
            if cfg.lazy {
                bound[e] = gain;
            }
            let accepted = gain >= tau;
            let before = value;
            if accepted {
                chosen.push(e);
                member[e] = true;
                value = q;
            }
            if let Some(t) = trace.as_mut() {
                t.steps.push(StepRecord {
                    pass: passes,
                    target: 0,
                    items: vec![e],
                    gain,
                    rival_gain: None,
                    threshold: tau,
                    accepted,
                    value_before: before,
                    value_after: value,
                    retained: None,
                    size_after: chosen.len(),
                });
            }
            if chosen.len() == k {
                passes += 1;
                break 'passes;
            }
        }
        passes += 1;
    }

    Ok(Solution {
        elements: chosen,
        value: Some(value),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: peak.peak(),
            passes,
        },
        trace,
    })
}

/// Two disjoint sets capped at `k`; each element goes to the non-full set
/// with the larger marginal gain (A on ties) if that gain reaches the pass
/// threshold. Starts at `Γ/(4kα)`, runs while the threshold is at least
/// `eps Γ/(16k)`, and stops early once both sets are full. Needs
/// `0 < eps ≤ 1/2`.
pub fn multipass_linear(
    oracle: &dyn Oracle,
    k: usize,
    gamma: f64,
    alpha: f64,
    cfg: &PassConfig,
    stream: &[usize],
) -> Result<Solution> {
    check_guess(gamma, alpha, k)?;
    if !(cfg.eps > 0.0 && cfg.eps <= 0.5) {
        return Err(Error::validation(format!("eps must lie in (0, 1/2] (got {})", cfg.eps)));
    }
    let n = oracle.ground_size();
    let mark = QueryMark::of(oracle);
    let kf = k as f64;
    let schedule = ThresholdSchedule::new(
        gamma / (4.0 * kf * alpha),
        cfg.eps * gamma / (16.0 * kf),
        cfg.eps,
        false,
    );
    let mut trace = cfg.trace.then(|| {
        let mut t = Trace::new(2);
        t.size_bound = Some(k);
        t.tau_decay = Some(schedule.decay());
        t
    });

    let mut sets: [Vec<usize>; 2] = [Vec::with_capacity(k), Vec::with_capacity(k)];
    let mut values = [0.0f64; 2];
    // 0 = free, 1 = in A, 2 = in B
    let mut owner = vec![0u8; n];
    let mut bound = vec![[f64::INFINITY; 2]; if cfg.lazy { n } else { 0 }];
    let mut peak = PeakMeter::default();
    let mut passes = 0u32;

    'passes: for tau in schedule {
        if let Some(t) = trace.as_mut() {
            t.taus.push(tau);
        }
        passes += 1;
        for &e in stream {
            if owner[e] != 0 {
                continue;
            }
            if sets[0].len() >= k && sets[1].len() >= k {
                break 'passes;
            }
            peak.observe(sets[0].len() + sets[1].len() + 1);
            let mut gains: [Option<(f64, f64)>; 2] = [None, None];
            for x in 0..2 {
                if sets[x].len() >= k || (cfg.lazy && bound[e][x] < tau) {
                    continue;
                }
                let mut with = sets[x].clone();
                with.push(e);
                let q = oracle.evaluate(&with)?;
                let gain = q - values[x];
                if cfg.lazy {
                    bound[e][x] = gain;
                }
                gains[x] = Some((gain, q));
            }
            let target = match gains {
                [None, None] => continue,
                [Some(_), None] => 0,
                [None, Some(_)] => 1,
                [Some((ga, _)), Some((gb, _))] => usize::from(gb > ga),
            };
            let (gain, q) = gains[target].unwrap();
            let accepted = gain >= tau;
            let before = values[target];
            if accepted {
                sets[target].push(e);
                values[target] = q;
                owner[e] = target as u8 + 1;
            }
            if let Some(t) = trace.as_mut() {
                t.steps.push(StepRecord {
                    pass: passes - 1,
                    target,
                    items: vec![e],
                    gain,
                    rival_gain: gains[1 - target].map(|(g, _)| g),
                    threshold: tau,
                    accepted,
                    value_before: before,
                    value_after: values[target],
                    retained: None,
                    size_after: sets[target].len(),
                });
            }
        }
    }

    let pick = usize::from(values[1] > values[0]);
    let [a, b] = sets;
    let elements = if pick == 0 { a } else { b };
    Ok(Solution {
        elements,
        value: Some(values[pick]),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: peak.peak(),
            passes,
        },
        trace,
    })
}

/// Pass bound for [`multipass_linear`]: `⌈ln(4/(α eps))/eps⌉ + 1`.
pub fn linear_pass_bound(alpha: f64, eps: f64) -> u32 {
    ThresholdSchedule::pass_bound(4.0 / alpha, eps, eps)
}

/// Result of a single-pass seed run followed by a booster.
#[derive(Clone, Debug)]
pub struct Boosted {
    /// Better of the seed and boosted answers.
    pub solution: Solution,
    pub seed: Solution,
    /// Booster output, absent when the seed value was zero.
    pub boosted: Option<Solution>,
    /// Single-pass branch that produced the seed (monotone pipeline only).
    pub branch: Option<Branch>,
    pub gamma: f64,
    pub alpha: f64,
}

impl Boosted {
    pub fn boost_passes(&self) -> u32 {
        self.boosted.as_ref().map_or(0, |b| b.metrics.passes)
    }
}

fn combine(
    oracle: &dyn Oracle,
    mark: QueryMark,
    seed: Solution,
    boosted: Option<Solution>,
    gamma: f64,
) -> Solution {
    let mut metrics = Metrics {
        queries: 0,
        peak_memory: seed.metrics.peak_memory,
        passes: seed.metrics.passes,
    };
    let mut best = Solution {
        value: Some(gamma),
        trace: None,
        ..seed
    };
    if let Some(b) = boosted {
        metrics.peak_memory = metrics.peak_memory.max(b.metrics.peak_memory);
        metrics.passes += b.metrics.passes;
        if b.value.unwrap_or(0.0) > gamma {
            best = Solution { trace: None, ..b };
        }
    }
    metrics.queries = mark.since(oracle);
    best.metrics = metrics;
    best
}

/// Dispatched single-pass run for `(Γ, α)`, then [`boost_ratio`]; returns
/// the better of the two.
pub fn qs_br(oracle: &dyn Oracle, qs: &QsConfig, pass: &PassConfig, stream: &[usize]) -> Result<Boosted> {
    let mark = QueryMark::of(oracle);
    let dispatched = dispatch_monotone(oracle, qs, stream.iter().copied())?;
    let seed = dispatched.solution;
    let gamma = seed.value_or_evaluate(oracle)?;
    let alpha = dispatched.branch.ratio(qs);
    let boosted = if gamma > 0.0 {
        Some(boost_ratio(oracle, qs.k, alpha, gamma, pass, stream)?)
    } else {
        None
    };
    let solution = combine(oracle, mark, seed.clone(), boosted.clone(), gamma);
    Ok(Boosted {
        solution,
        seed,
        boosted,
        branch: Some(dispatched.branch),
        gamma,
        alpha,
    })
}

/// [`quickstream_nm`] for `(Γ, α)`, then [`multipass_linear`]; returns the
/// better of the two.
pub fn qs_mpl(oracle: &dyn Oracle, nm: &NmConfig, pass: &PassConfig, stream: &[usize]) -> Result<Boosted> {
    let mark = QueryMark::of(oracle);
    let seed = quickstream_nm(oracle, nm, stream.iter().copied())?;
    let gamma = seed.value.unwrap_or(0.0);
    let alpha = nm.alpha();
    let boosted = if gamma > 0.0 {
        Some(multipass_linear(oracle, nm.k, gamma, alpha, pass, stream)?)
    } else {
        None
    };
    let solution = combine(oracle, mark, seed.clone(), boosted.clone(), gamma);
    Ok(Boosted {
        solution,
        seed,
        boosted,
        branch: None,
        gamma,
        alpha,
    })
}
