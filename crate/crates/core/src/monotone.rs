//! Single-pass algorithms for monotone objectives: the buffered
//! variable-threshold stream ([`quickstream_c`]), its top-blocks augmentation
//! ([`quickstream_pp`]), the best-block scan for `k = 1` ([`qs_small`]), the
//! large-`k` variant ([`quickstream_largek`]) and the dispatcher choosing
//! among them.
//!
//! Candidate values are maintained from accepted queries only: after a
//! suffix deletion the recorded value is that of the pre-deletion superset,
//! which for a monotone objective upper-bounds the retained set's value.

use std::f64::consts::E;
use std::fmt;

use crate::buffer::CandidateBuffer;
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::solution::{ceil_log2, Metrics, PeakMeter, QueryMark, Solution};
use crate::trace::{StepRecord, Trace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QsConfig {
    pub k: usize,
    /// Block size: elements buffered per query.
    pub c: usize,
    pub eps: f64,
    /// Record a per-block trace in the returned solution.
    pub trace: bool,
}

impl QsConfig {
    pub fn new(k: usize, c: usize, eps: f64) -> Result<Self> {
        let cfg = QsConfig {
            k,
            c,
            eps,
            trace: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::validation("cardinality k must be at least 1"));
        }
        if self.c == 0 {
            return Err(Error::validation("block size c must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::validation(format!("eps must be positive (got {})", self.eps)));
        }
        Ok(())
    }

    /// `⌈log2(1/(4 eps))⌉ + 2`, never below 2.
    pub fn ell(&self) -> usize {
        let raw = (1.0 / (4.0 * self.eps)).log2().ceil() + 2.0;
        if raw < 2.0 {
            2
        } else {
            raw as usize
        }
    }

    /// Suffix length kept by a deletion: `c ℓ (k+1) ⌈log2 k⌉`.
    pub fn retain_len(&self) -> usize {
        self.c * self.ell() * (self.k + 1) * ceil_log2(self.k)
    }

    /// Size above which the buffer is trimmed: twice [`Self::retain_len`].
    pub fn trigger_len(&self) -> usize {
        2 * self.retain_len()
    }
}

/// Which single-pass algorithm the dispatcher ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `k = 1`: best block, then best singleton inside it.
    Small,
    /// `1 < k < 8c/e`.
    Standard,
    /// `k ≥ 8c/e`.
    LargeK,
}

impl Branch {
    pub fn for_params(k: usize, c: usize) -> Branch {
        if k <= 1 {
            Branch::Small
        } else if (k as f64) < 8.0 * c as f64 / E {
            Branch::Standard
        } else {
            Branch::LargeK
        }
    }

    /// Proven approximation ratio of the branch on `cfg`.
    ///
    /// The standard branch uses `1 / (c (4 + 2/(k^ℓ - 1)))`, which is at
    /// least `1/(4c) - eps`. The large-`k` branch uses the form with
    /// `1/(k² - 1)`, which is the smaller of the two known bounds.
    pub fn ratio(self, cfg: &QsConfig) -> f64 {
        let k = cfg.k as f64;
        let c = cfg.c as f64;
        match self {
            Branch::Small => 1.0 / c,
            Branch::Standard => {
                let gamma = 1.0 / (k.powi(cfg.ell() as i32) - 1.0);
                1.0 / (c * (4.0 + 2.0 * gamma))
            }
            Branch::LargeK => {
                let lead = 1.0 / (1.0 + c + 1.0 / (k * k - 1.0));
                lead * (1.0 - 1.0 / E - 2.0 * c / (k * E) - c * c / (k * k * E))
            }
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Small => "qs-small",
            Branch::Standard => "quickstream",
            Branch::LargeK => "quickstream-largek",
        })
    }
}

/// Splits `elements` into contiguous chunks of at most `k` (at most `c` of
/// them), queries each and returns the best, earliest on ties.
pub fn partition_best(oracle: &dyn Oracle, elements: &[usize], k: usize, c: usize) -> Result<Solution> {
    if k == 0 || c == 0 {
        return Err(Error::validation("partition needs k >= 1 and c >= 1"));
    }
    if elements.len() > c * k {
        return Err(Error::validation(format!(
            "{} elements cannot be split into {c} pieces of size {k}",
            elements.len()
        )));
    }
    let mark = QueryMark::of(oracle);
    let mut best: Option<(f64, &[usize])> = None;
    for chunk in elements.chunks(k) {
        let v = oracle.evaluate(chunk)?;
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, chunk));
        }
    }
    let Some((value, chunk)) = best else {
        return Ok(Solution::empty());
    };
    Ok(Solution {
        elements: chunk.to_vec(),
        value: Some(value),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: elements.len(),
            passes: 0,
        },
        trace: None,
    })
}

/// Parameters of one threshold-stream run.
struct BlockRule {
    k: usize,
    c: usize,
    /// Threshold is `scale · f(A) / k`.
    scale: f64,
    retain: usize,
    trigger: usize,
}

struct BlockRun {
    buffer: CandidateBuffer,
    value: f64,
    peak: PeakMeter,
    trace: Option<Trace>,
    deleted: bool,
}

/// Shared stream loop. `observe` sees each block with its marginal gain and
/// returns how many extra elements the caller now holds.
fn run_blocks(
    oracle: &dyn Oracle,
    rule: &BlockRule,
    stream: impl IntoIterator<Item = usize>,
    record: bool,
    mut observe: impl FnMut(&[usize], f64) -> usize,
) -> Result<BlockRun> {
    let mut buffer = CandidateBuffer::new();
    let mut value = 0.0f64;
    let mut peak = PeakMeter::default();
    let mut extra = 0usize;
    let mut deleted = false;
    let mut trace = record.then(|| {
        let mut t = Trace::new(1);
        t.size_bound = Some(rule.trigger);
        t.growth = Some(1.0 + rule.scale / rule.k as f64);
        t
    });

    let mut block: Vec<usize> = Vec::with_capacity(rule.c);
    let mut stream = stream.into_iter().peekable();
    while let Some(e) = stream.next() {
        block.push(e);
        peak.observe(buffer.len() + block.len() + extra);
        if block.len() < rule.c && stream.peek().is_some() {
            continue;
        }

        let joined = oracle.evaluate(&buffer.with(&block))?;
        let gain = joined - value;
        let threshold = rule.scale * value / rule.k as f64;
        let before = value;
        let accepted = gain >= threshold;
        if accepted {
            buffer.extend_from_slice(&block);
            value = joined;
        }
        extra = observe(&block, gain);
        peak.observe(buffer.len() + extra);
        let mut retained = None;
        if buffer.len() > rule.trigger {
            buffer.retain_suffix(rule.retain);
            retained = Some(rule.retain);
            deleted = true;
        }
        if let Some(t) = trace.as_mut() {
            t.steps.push(StepRecord {
                pass: 0,
                target: 0,
                items: block.clone(),
                gain,
                rival_gain: None,
                threshold,
                accepted,
                value_before: before,
                value_after: value,
                retained,
                size_after: buffer.len(),
            });
        }
        block.clear();
    }

    Ok(BlockRun {
        buffer,
        value,
        peak,
        trace,
        deleted,
    })
}

fn standard_rule(cfg: &QsConfig) -> BlockRule {
    BlockRule {
        k: cfg.k,
        c: cfg.c,
        scale: 1.0,
        retain: cfg.retain_len(),
        trigger: cfg.trigger_len(),
    }
}

fn require_k_at_least_two(cfg: &QsConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.k < 2 {
        return Err(Error::validation(
            "quickstream needs k >= 2; use the dispatcher for k = 1",
        ));
    }
    Ok(())
}

/// Buffered single-pass threshold stream: a block joins `A` when its gain is
/// at least `f(A)/k`; at the end the last `ck` elements of `A` are split
/// into `c` pieces and the best piece is returned. Uses at most
/// `⌈n/c⌉ + c` queries.
pub fn quickstream_c(
    oracle: &dyn Oracle,
    cfg: &QsConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    require_k_at_least_two(cfg)?;
    let mark = QueryMark::of(oracle);
    let run = run_blocks(oracle, &standard_rule(cfg), stream, cfg.trace, |_, _| 0)?;
    let tail = run.buffer.suffix(cfg.c * cfg.k);
    let best = partition_best(oracle, tail, cfg.k, cfg.c)?;
    Ok(Solution {
        elements: best.elements,
        value: best.value,
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: run.peak.peak(),
            passes: 1,
        },
        trace: run.trace,
    })
}

/// Bookkeeping reported by [`quickstream_pp_detailed`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TopBlockStats {
    /// Most gain comparisons spent placing a single block.
    pub max_comparisons: usize,
    /// Whether the tracked top blocks beat the plain answer.
    pub improved: bool,
}

/// The `k` blocks with the largest observed gains, kept sorted (largest
/// first, earlier arrival first among equals).
struct TopBlocks {
    cap: usize,
    entries: Vec<(f64, usize, Vec<usize>)>,
    held: usize,
    max_comparisons: usize,
}

impl TopBlocks {
    fn new(cap: usize) -> Self {
        TopBlocks {
            cap,
            entries: Vec::with_capacity(cap + 1),
            held: 0,
            max_comparisons: 0,
        }
    }

    fn offer(&mut self, gain: f64, seq: usize, block: &[usize]) {
        let mut comparisons = 0usize;
        // equal gains go after existing ones, so earlier blocks win ties
        let (mut lo, mut hi) = (0usize, self.entries.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            comparisons += 1;
            if self.entries[mid].0 >= gain {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let pos = lo;
        self.max_comparisons = self.max_comparisons.max(comparisons);
        if pos >= self.cap {
            return;
        }
        self.held += block.len();
        self.entries.insert(pos, (gain, seq, block.to_vec()));
        if self.entries.len() > self.cap {
            let (_, _, dropped) = self.entries.pop().unwrap();
            self.held -= dropped.len();
        }
    }

    /// Tracked elements in arrival order.
    fn elements(&self) -> Vec<usize> {
        let mut by_arrival: Vec<&(f64, usize, Vec<usize>)> = self.entries.iter().collect();
        by_arrival.sort_by_key(|(_, seq, _)| *seq);
        by_arrival
            .into_iter()
            .flat_map(|(_, _, b)| b.iter().copied())
            .collect()
    }
}

/// [`quickstream_c`] that also remembers the `k` blocks with the largest
/// marginal gains at arrival and, at the end, partitions those into pieces
/// of size `k` as a second candidate. At most `c` extra queries.
pub fn quickstream_pp(
    oracle: &dyn Oracle,
    cfg: &QsConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    quickstream_pp_detailed(oracle, cfg, stream).map(|(s, _)| s)
}

pub fn quickstream_pp_detailed(
    oracle: &dyn Oracle,
    cfg: &QsConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<(Solution, TopBlockStats)> {
    require_k_at_least_two(cfg)?;
    let mark = QueryMark::of(oracle);
    let mut top = TopBlocks::new(cfg.k);
    let mut seq = 0usize;
    let run = run_blocks(oracle, &standard_rule(cfg), stream, cfg.trace, |block, gain| {
        top.offer(gain, seq, block);
        seq += 1;
        top.held
    })?;

    let plain = partition_best(oracle, run.buffer.suffix(cfg.c * cfg.k), cfg.k, cfg.c)?;
    let tracked = partition_best(oracle, &top.elements(), cfg.k, cfg.c)?;
    let improved = tracked.value.unwrap_or(0.0) > plain.value.unwrap_or(0.0);
    let best = if improved { tracked } else { plain };
    let stats = TopBlockStats {
        max_comparisons: top.max_comparisons,
        improved,
    };
    Ok((
        Solution {
            elements: best.elements,
            value: best.value,
            metrics: Metrics {
                queries: mark.since(oracle),
                peak_memory: run.peak.peak(),
                passes: 1,
            },
            trace: run.trace,
        },
        stats,
    ))
}

/// Keeps the best-valued block seen (strictly better replaces) and returns
/// its best singleton. Aimed at `k = 1`.
pub fn qs_small(
    oracle: &dyn Oracle,
    cfg: &QsConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    cfg.validate()?;
    let mark = QueryMark::of(oracle);
    let mut best_block: Vec<usize> = Vec::new();
    let mut best_value = 0.0f64;
    let mut block: Vec<usize> = Vec::with_capacity(cfg.c);
    let mut peak = PeakMeter::default();
    let mut stream = stream.into_iter().peekable();
    while let Some(e) = stream.next() {
        block.push(e);
        peak.observe(best_block.len() + block.len());
        if block.len() < cfg.c && stream.peek().is_some() {
            continue;
        }
        let v = oracle.evaluate(&block)?;
        if v > best_value {
            std::mem::swap(&mut best_block, &mut block);
            best_value = v;
        }
        block.clear();
    }

    let (elements, value) = match best_block.len() {
        0 => (Vec::new(), 0.0),
        1 => (best_block.clone(), best_value),
        _ => {
            let mut best: Option<(usize, f64)> = None;
            for &a in &best_block {
                let v = oracle.evaluate(&[a])?;
                if best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((a, v));
                }
            }
            let (a, v) = best.unwrap();
            (vec![a], v)
        }
    };
    Ok(Solution {
        elements,
        value: Some(value),
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: peak.peak(),
            passes: 1,
        },
        trace: None,
    })
}

/// Large-`k` variant: blocks need gain `c f(A)/k`, the buffer is trimmed to
/// `2c(k+1)⌈log2 k⌉` once it exceeds twice that, and the last `k` elements
/// are returned without a final query. Exactly `⌈n/c⌉` queries.
///
/// The returned [`Solution::value`] is only known when that set was itself
/// queried, i.e. when `A` never grew past `k`.
pub fn quickstream_largek(
    oracle: &dyn Oracle,
    cfg: &QsConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Solution> {
    cfg.validate()?;
    let (k, c) = (cfg.k, cfg.c);
    if Branch::for_params(k, c) != Branch::LargeK {
        log::warn!("quickstream-largek run with k={k} < 8c/e (c={c}); no ratio guarantee");
    }
    let retain = 2 * c * (k + 1) * ceil_log2(k.max(2));
    let rule = BlockRule {
        k,
        c,
        scale: c as f64,
        retain,
        trigger: 2 * retain,
    };
    let mark = QueryMark::of(oracle);
    let run = run_blocks(oracle, &rule, stream, cfg.trace, |_, _| 0)?;
    let elements = run.buffer.suffix(k).to_vec();
    let value = (!run.deleted && run.buffer.len() <= k).then_some(run.value);
    Ok(Solution {
        elements,
        value,
        metrics: Metrics {
            queries: mark.since(oracle),
            peak_memory: run.peak.peak(),
            passes: 1,
        },
        trace: run.trace,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dispatched {
    pub branch: Branch,
    pub solution: Solution,
}

/// Routes to [`qs_small`] for `k = 1`, [`quickstream_c`] for `1 < k < 8c/e`
/// and [`quickstream_largek`] otherwise.
pub fn dispatch_monotone(
    oracle: &dyn Oracle,
    cfg: &QsConfig,
    stream: impl IntoIterator<Item = usize>,
) -> Result<Dispatched> {
    cfg.validate()?;
    let branch = Branch::for_params(cfg.k, cfg.c);
    let solution = match branch {
        Branch::Small => qs_small(oracle, cfg, stream)?,
        Branch::Standard => quickstream_c(oracle, cfg, stream)?,
        Branch::LargeK => quickstream_largek(oracle, cfg, stream)?,
    };
    Ok(Dispatched { branch, solution })
}
