use crate::error::Result;
use crate::oracle::Oracle;
use crate::trace::Trace;

/// Resource usage of one algorithm run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Metrics {
    /// Oracle queries issued by the run.
    pub queries: u64,
    /// Most element ids held at once across the run's buffers.
    pub peak_memory: usize,
    /// Full traversals of the stream.
    pub passes: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub elements: Vec<usize>,
    /// `f(elements)` when the run itself queried that exact set. Algorithms
    /// that return a set they never evaluated leave this empty.
    pub value: Option<f64>,
    pub metrics: Metrics,
    pub trace: Option<Trace>,
}

impl Solution {
    pub fn empty() -> Self {
        Solution {
            elements: Vec::new(),
            value: Some(0.0),
            metrics: Metrics::default(),
            trace: None,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Recorded value, or a fresh evaluation through `oracle`.
    pub fn value_or_evaluate(&self, oracle: &dyn Oracle) -> Result<f64> {
        match self.value {
            Some(v) => Ok(v),
            None if self.elements.is_empty() => Ok(0.0),
            None => oracle.evaluate(&self.elements),
        }
    }
}

/// Tracks the largest simultaneous element count seen.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct PeakMeter(usize);

impl PeakMeter {
    #[inline]
    pub fn observe(&mut self, stored: usize) {
        self.0 = self.0.max(stored);
    }

    pub fn peak(self) -> usize {
        self.0
    }
}

/// Snapshot of an oracle's counter, for charging queries to one run.
#[derive(Clone, Copy)]
pub(crate) struct QueryMark(u64);

impl QueryMark {
    pub fn of(oracle: &dyn Oracle) -> Self {
        QueryMark(oracle.queries())
    }

    pub fn since(self, oracle: &dyn Oracle) -> u64 {
        oracle.queries() - self.0
    }
}

/// `⌈log2 k⌉` for `k ≥ 1`.
pub fn ceil_log2(k: usize) -> usize {
    assert!(k >= 1, "ceil_log2 of zero");
    (usize::BITS - (k - 1).leading_zeros()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        let expect = [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (1024, 10)];
        for (k, l) in expect {
            assert_eq!(ceil_log2(k), l, "k={k}");
        }
    }
}
