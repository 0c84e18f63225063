//! Single-pass algorithm for general (possibly non-monotone) submodular
//! objectives. Two disjoint candidate sets are grown side by side; each
//! arriving element goes to the set where its marginal gain is larger,
//! provided that gain is at least `b f(S)/k`.

use crate::buffer::CandidateBuffer;
use crate::error::{Error, Result};
use crate::multipass::{multipass_linear, PassConfig};
use crate::oracle::{BlockOracle, Oracle, RestrictedOracle};
use crate::solution::{ceil_log2, Metrics, PeakMeter, QueryMark, Solution};
use crate::trace::{StepRecord, Trace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NmConfig {
    pub k: usize,
    /// Threshold scale.
    pub b: f64,
    pub eps: f64,
    /// Block size for [`quickstream_nm_blocked`].
    pub c: usize,
    pub trace: bool,
}

/// Threshold scale minimizing the worst-case ratio at `k = 10`.
pub const DEFAULT_B: f64 = 1.49;

impl NmConfig {
    pub fn new(k: usize, b: f64, eps: f64) -> Result<Self> {
        let cfg = NmConfig {
            k,
            b,
            eps,
            c: 1,
            trace: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_block(mut self, c: usize) -> Self {
        self.c = c;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::validation("cardinality k must be at least 1"));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::validation(format!("b must be positive (got {})", self.b)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::validation(format!("eps must be positive (got {})", self.eps)));
        }
        if self.c == 0 {
            return Err(Error::validation("block size c must be at least 1"));
        }
        Ok(())
    }

    /// `1 / (1 - (1 + b/k)^{-k})`.
    pub fn beta(&self) -> f64 {
        let k = self.k as f64;
        1.0 / (1.0 - (1.0 + self.b / k).powf(-k))
    }

    /// `⌈ln(6β/eps + 1)⌉ + 3`.
    pub fn ell(&self) -> usize {
        (6.0 * self.beta() / self.eps + 1.0).ln().ceil() as usize + 3
    }

    /// `ℓ (k/b + 1) ⌈log2 k⌉`, with the logarithm floored at 1 so `k = 1`
    /// still keeps a non-empty suffix.
    pub fn retain_real(&self) -> f64 {
        self.ell() as f64 * (self.k as f64 / self.b + 1.0) * ceil_log2(self.k).max(1) as f64
    }

    pub fn retain_len(&self) -> usize {
        self.retain_real().ceil() as usize
    }

    /// Largest set size that survives a step without deletion.
    pub fn size_bound(&self) -> usize {
        (2.0 * self.retain_real()).floor() as usize
    }

    /// Worst-case `OPT / f(S')` bound: `(2b + 4) β + eps`.
    pub fn ratio(&self) -> f64 {
        (2.0 * self.b + 4.0) * self.beta() + self.eps
    }

    /// Approximation factor `1 / ratio`, as fed to the multi-pass booster.
    pub fn alpha(&self) -> f64 {
        1.0 / self.ratio()
    }
}

/// Full end state of a [`quickstream_nm`] run.
#[derive(Clone, Debug)]
pub struct TwinOutcome {
    pub solution: Solution,
    /// Final contents of the two candidate sets, in insertion order.
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// Two queries per element (`f(A+e)`, `f(B+e)`) plus two at the end:
/// exactly `2n + 2`.
pub fn quickstream_nm(
    oracle: &dyn Oracle,
    cfg: &NmConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    quickstream_nm_detailed(oracle, cfg, stream).map(|o| o.solution)
}

pub fn quickstream_nm_detailed(
    oracle: &dyn Oracle,
    cfg: &NmConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<TwinOutcome> {
    cfg.validate()?;
    let k = cfg.k;
    let mark = QueryMark::of(oracle);
    let mut stream = stream.into_iter().peekable();
    if stream.peek().is_none() {
        return Ok(TwinOutcome {
            solution: Solution::empty(),
            a: Vec::new(),
            b: Vec::new(),
        });
    }

    let retain = cfg.retain_len();
    let trigger = 2.0 * cfg.retain_real();
    let mut sets = [CandidateBuffer::new(), CandidateBuffer::new()];
    let mut values = [0.0f64; 2];
    let mut peak = PeakMeter::default();
    let mut trace = cfg.trace.then(|| {
        let mut t = Trace::new(2);
        t.size_bound = Some(cfg.size_bound());
        t.growth = Some(1.0 + cfg.b / k as f64);
        t
    });

    for e in stream {
        peak.observe(sets[0].len() + sets[1].len() + 1);
        let qa = oracle.evaluate(&sets[0].with(&[e]))?;
        let qb = oracle.evaluate(&sets[1].with(&[e]))?;
        let gains = [qa - values[0], qb - values[1]];
        // ties go to A
        let target = usize::from(gains[1] > gains[0]);
        let gain = gains[target];
        let threshold = cfg.b * values[target] / k as f64;
        let before = values[target];
        let accepted = gain >= threshold;
        if accepted {
            sets[target].push(e);
            values[target] = if target == 0 { qa } else { qb };
        }
        let mut retained = None;
        if sets[target].len() as f64 > trigger {
            sets[target].retain_suffix(retain);
            retained = Some(retain);
        }
        if let Some(t) = trace.as_mut() {
            t.steps.push(StepRecord {
                pass: 0,
                target,
                items: vec![e],
                gain,
                rival_gain: Some(gains[1 - target]),
                threshold,
                accepted,
                value_before: before,
                value_after: values[target],
                retained,
                size_after: sets[target].len(),
            });
        }
    }

    let a_tail = sets[0].suffix(k).to_vec();
    let b_tail = sets[1].suffix(k).to_vec();
    let va = oracle.evaluate(&a_tail)?;
    let vb = oracle.evaluate(&b_tail)?;
    let (elements, value) = if vb > va { (b_tail, vb) } else { (a_tail, va) };
    let [a, b] = sets;
    Ok(TwinOutcome {
        solution: Solution {
            elements,
            value: Some(value),
            metrics: Metrics {
                queries: mark.since(oracle),
                peak_memory: peak.peak(),
                passes: 1,
            },
            trace,
        },
        a: a.as_slice().to_vec(),
        b: b.as_slice().to_vec(),
    })
}

/// Groups consecutive stream elements into blocks of `c` (last one may be
/// shorter).
pub fn block_reduce(stream: impl IntoIterator<Item = usize>, c: usize) -> Vec<Vec<usize>> {
    let c = c.max(1);
    let mut blocks = Vec::new();
    let mut current = Vec::with_capacity(c);
    for e in stream {
        current.push(e);
        if current.len() == c {
            blocks.push(std::mem::replace(&mut current, Vec::with_capacity(c)));
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
}

/// Flattens a solution over blocks, splits it into contiguous pieces of at
/// most `k` elements and returns the best piece. One query per piece.
pub fn unreduce(
    oracle: &dyn Oracle,
    blocks: &BlockOracle<'_>,
    block_solution: &[usize],
    k: usize,
) -> Result<Solution> {
    let flat = blocks.flatten(block_solution);
    let mark = QueryMark::of(oracle);
    let mut best: Option<(f64, &[usize])> = None;
    for piece in flat.chunks(k.max(1)) {
        let v = oracle.evaluate(piece)?;
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, piece));
        }
    }
    Ok(match best {
        None => Solution::empty(),
        Some((v, piece)) => Solution {
            elements: piece.to_vec(),
            value: Some(v),
            metrics: Metrics {
                queries: mark.since(oracle),
                peak_memory: flat.len(),
                passes: 0,
            },
            trace: None,
        },
    })
}

/// [`quickstream_nm`] over blocks of `cfg.c` elements: `2⌈n/c⌉ + 2` queries
/// on the block objective plus at most `c` to pick the final piece.
pub fn quickstream_nm_blocked(
    oracle: &dyn Oracle,
    cfg: &NmConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    cfg.validate()?;
    let mark = QueryMark::of(oracle);
    let blocks = BlockOracle::new(oracle, block_reduce(stream, cfg.c));
    let count = blocks.ground_size();
    let inner = quickstream_nm(&blocks, cfg, 0..count)?;
    let mut out = unreduce(oracle, &blocks, &inner.elements, cfg.k)?;
    out.metrics = Metrics {
        queries: mark.since(oracle),
        peak_memory: inner.metrics.peak_memory * cfg.c,
        passes: 1,
    };
    out.trace = inner.trace;
    Ok(out)
}

/// Post-processing routine run on the restricted universe `A ∪ B`; it
/// receives the restricted oracle, `k`, and `f(S')` of the single pass.
pub type PostProcessor<'p> = dyn Fn(&dyn Oracle, usize, f64) -> Result<Solution> + 'p;

/// Runs [`quickstream_nm`], then `post` on the universe `A ∪ B`; returns
/// the best of `A'`, `B'` and the post-processed answer. Post-processing
/// queries are charged to `oracle`.
pub fn qs_pp(
    oracle: &dyn Oracle,
    cfg: &NmConfig,
    stream: impl IntoIterator<Item = usize>,
    post: &PostProcessor<'_>,
) -> Result<Solution> {
    let mark = QueryMark::of(oracle);
    let outcome = quickstream_nm_detailed(oracle, cfg, stream)?;
    let base = outcome.solution;
    let base_value = base.value.unwrap_or(0.0);
    let mut universe = outcome.a;
    universe.extend_from_slice(&outcome.b);
    let restricted = RestrictedOracle::new(oracle, universe);
    let refined = post(&restricted, cfg.k, base_value)?;
    let refined_value = refined.value_or_evaluate(&restricted)?;

    let metrics = Metrics {
        queries: 0,
        peak_memory: base.metrics.peak_memory.max(refined.metrics.peak_memory),
        passes: base.metrics.passes + refined.metrics.passes,
    };
    let mut best = if refined_value > base_value {
        Solution {
            elements: restricted.to_parent(&refined.elements),
            value: Some(refined_value),
            metrics,
            trace: base.trace,
        }
    } else {
        Solution { metrics, ..base }
    };
    best.metrics.queries = mark.since(oracle);
    Ok(best)
}

/// The default post-processor: the two-set multi-pass booster over the
/// restricted universe, seeded with `Γ = f(S')` and `α = 1/ratio`.
pub fn multipass_post(cfg: &NmConfig) -> impl Fn(&dyn Oracle, usize, f64) -> Result<Solution> {
    let alpha = cfg.alpha();
    let eps = cfg.eps.min(0.5);
    move |inner: &dyn Oracle, k: usize, gamma: f64| {
        if gamma <= 0.0 {
            return Ok(Solution::empty());
        }
        let local: Vec<usize> = (0..inner.ground_size()).collect();
        multipass_linear(inner, k, gamma, alpha, &PassConfig::new(eps)?, &local)
    }
}

/// [`qs_pp`] with [`multipass_post`].
pub fn qs_pp_default(
    oracle: &dyn Oracle,
    cfg: &NmConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    qs_pp(oracle, cfg, stream, &multipass_post(cfg))
}
