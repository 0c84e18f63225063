//! Per-step records of the threshold algorithms and the checks run on them.
//!
//! A trace is written by the algorithm as it goes; [`audit`] replays it
//! independently and reports every place a structural invariant fails:
//! the maintained candidate values never decrease, every acceptance cleared
//! its threshold, accepted blocks grow the value geometrically, candidate
//! sets stay disjoint and within their size bound, and multi-pass thresholds
//! follow their geometric schedule.

use std::fmt;

use crate::error::Result;
use crate::oracle::Oracle;

/// One processed block (or element) of the stream.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// Pass index, 0 for single-pass algorithms.
    pub pass: u32,
    /// Candidate set the block was offered to (0 = A, 1 = B).
    pub target: usize,
    pub items: Vec<usize>,
    pub gain: f64,
    /// Gain to the other candidate set, when one was compared.
    pub rival_gain: Option<f64>,
    pub threshold: f64,
    pub accepted: bool,
    /// Maintained value of the target before and after the step.
    pub value_before: f64,
    pub value_after: f64,
    /// Suffix length kept if the step triggered a deletion.
    pub retained: Option<usize>,
    pub size_after: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    /// Number of candidate sets the algorithm maintains.
    pub sets: usize,
    /// Largest size a candidate set may have at the end of a step.
    pub size_bound: Option<usize>,
    /// Minimum factor by which an acceptance multiplies the target's value.
    pub growth: Option<f64>,
    /// Threshold of each pass, for multi-pass algorithms.
    pub taus: Vec<f64>,
    pub tau_decay: Option<f64>,
    pub steps: Vec<StepRecord>,
}

impl Trace {
    pub(crate) fn new(sets: usize) -> Self {
        Trace {
            sets,
            ..Trace::default()
        }
    }

    pub fn acceptances(&self) -> usize {
        self.steps.iter().filter(|s| s.accepted).count()
    }

    pub fn deletions(&self) -> usize {
        self.steps.iter().filter(|s| s.retained.is_some()).count()
    }

    /// Candidate sets after every step, rebuilt from the records alone.
    pub fn replay(&self) -> Vec<Vec<Vec<usize>>> {
        let mut sets = vec![Vec::<usize>::new(); self.sets.max(1)];
        let mut out = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let set = &mut sets[step.target];
            if step.accepted {
                set.extend_from_slice(&step.items);
            }
            if let Some(keep) = step.retained {
                let len = set.len();
                set.drain(..len.saturating_sub(keep));
            }
            out.push(sets.clone());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub step: usize,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.what)
    }
}

const REL_TOL: f64 = 1e-12;

fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - REL_TOL * rhs.abs().max(lhs.abs())
}

/// Structural invariants of a trace. Empty result means all hold.
pub fn audit(trace: &Trace) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |step: usize, what: String| out.push(Violation { step, what });

    let nsets = trace.sets.max(1);
    let mut last_value = vec![0.0f64; nsets];
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); nsets];

    for w in trace.taus.windows(2) {
        if let Some(decay) = trace.tau_decay {
            if w[1] != w[0] * decay {
                bad(0, format!("tau schedule broke: {} then {}", w[0], w[1]));
            }
        }
        if !(w[1] < w[0]) {
            bad(0, format!("tau did not decrease: {} then {}", w[0], w[1]));
        }
    }

    for (i, s) in trace.steps.iter().enumerate() {
        if s.target >= nsets {
            bad(i, format!("target {} out of range", s.target));
            continue;
        }
        if s.value_before != last_value[s.target] {
            bad(
                i,
                format!(
                    "maintained value jumped from {} to {} between steps",
                    last_value[s.target], s.value_before
                ),
            );
        }
        if s.value_after < s.value_before {
            bad(
                i,
                format!("value decreased {} -> {}", s.value_before, s.value_after),
            );
        }
        if s.accepted {
            if !(s.gain >= s.threshold) {
                bad(i, format!("accepted gain {} below threshold {}", s.gain, s.threshold));
            }
            if let Some(growth) = trace.growth {
                if !at_least(s.value_after, growth * s.value_before) {
                    bad(
                        i,
                        format!(
                            "acceptance grew value {} -> {}, less than factor {growth}",
                            s.value_before, s.value_after
                        ),
                    );
                }
            }
        } else if s.gain >= s.threshold {
            bad(i, format!("rejected gain {} cleared threshold {}", s.gain, s.threshold));
        } else if s.value_after != s.value_before {
            bad(i, "rejection changed the maintained value".into());
        }
        if let Some(rival) = s.rival_gain {
            if rival > s.gain || (rival == s.gain && s.target != 0) {
                bad(i, format!("offered to set {} with gain {} but rival had {}", s.target, s.gain, rival));
            }
        }
        if !trace.taus.is_empty() {
            match trace.taus.get(s.pass as usize) {
                Some(&tau) if tau == s.threshold => {}
                _ => bad(i, format!("threshold {} is not tau of pass {}", s.threshold, s.pass)),
            }
        }

        if s.accepted {
            for &e in &s.items {
                if sets.iter().any(|set| set.contains(&e)) {
                    bad(i, format!("element {e} added while already held"));
                }
            }
            sets[s.target].extend_from_slice(&s.items);
        }
        if let Some(keep) = s.retained {
            let set = &mut sets[s.target];
            let len = set.len();
            set.drain(..len.saturating_sub(keep));
        }
        if sets[s.target].len() != s.size_after {
            bad(
                i,
                format!(
                    "recorded size {} but replay gives {}",
                    s.size_after,
                    sets[s.target].len()
                ),
            );
        }
        if let Some(bound) = trace.size_bound {
            if s.size_after > bound {
                bad(i, format!("set size {} exceeds bound {bound}", s.size_after));
            }
        }
        last_value[s.target] = s.value_after;
    }
    out
}

/// Re-evaluates every candidate set after every step through `oracle` and
/// checks that the true values never decrease.
pub fn audit_true_values(trace: &Trace, oracle: &dyn Oracle) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    let mut last = vec![0.0f64; trace.sets.max(1)];
    for (i, sets) in trace.replay().into_iter().enumerate() {
        let target = trace.steps[i].target;
        let v = oracle.evaluate(&sets[target])?;
        if v < last[target] - 1e-9 * last[target].abs().max(1.0) {
            out.push(Violation {
                step: i,
                what: format!("true value of set {target} fell {} -> {v}", last[target]),
            });
        }
        last[target] = v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(target: usize, items: &[usize], gain: f64, threshold: f64, before: f64) -> StepRecord {
        let accepted = gain >= threshold;
        StepRecord {
            pass: 0,
            target,
            items: items.to_vec(),
            gain,
            rival_gain: None,
            threshold,
            accepted,
            value_before: before,
            value_after: if accepted { before + gain } else { before },
            retained: None,
            size_after: 0,
        }
    }

    #[test]
    fn clean_trace_passes() {
        let mut t = Trace::new(1);
        t.growth = Some(1.5);
        let mut a = step(0, &[0], 1.0, 0.0, 0.0);
        a.size_after = 1;
        let mut b = step(0, &[1], 1.0, 0.5, 1.0);
        b.size_after = 2;
        let mut c = step(0, &[2], 0.2, 1.0, 2.0);
        c.size_after = 2;
        t.steps = vec![a, b, c];
        assert!(audit(&t).is_empty(), "{:?}", audit(&t));
        assert_eq!(t.replay().last().unwrap()[0], vec![0, 1]);
    }

    #[test]
    fn detects_duplicate_and_bound() {
        let mut t = Trace::new(2);
        t.size_bound = Some(1);
        let mut a = step(0, &[4], 1.0, 0.0, 0.0);
        a.size_after = 1;
        let mut b = step(1, &[4, 5], 1.0, 0.0, 0.0);
        b.size_after = 2;
        t.steps = vec![a, b];
        let v = audit(&t);
        assert!(v.iter().any(|x| x.what.contains("already held")));
        assert!(v.iter().any(|x| x.what.contains("exceeds bound")));
    }

    #[test]
    fn detects_wrong_tau_schedule() {
        let mut t = Trace::new(1);
        t.taus = vec![1.0, 0.9, 0.8];
        t.tau_decay = Some(0.9);
        assert!(!audit(&t).is_empty());
    }
}
