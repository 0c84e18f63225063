//! Brute-force verification campaigns on small synthetic instances.
//!
//! Each campaign returns raw samples (value, optimum, queries, passes) plus
//! every trace-audit violation it saw, and flags samples that miss the
//! proven bound.

use std::sync::Arc;

use super::exec::Execution;
use super::lowerbound::{binomial_sigma, hit_bound, lower_bound_sweep, ProbeMode};
use crate::baselines::brute_force_opt;
use crate::error::Result;
use crate::monotone::{qs_small, quickstream_c, quickstream_largek, QsConfig};
use crate::multipass::{boost_pass_bound, linear_pass_bound, qs_br, qs_mpl, PassConfig};
use crate::nonmonotone::{quickstream_nm, NmConfig, DEFAULT_B};
use crate::oracle::{Graph, ObjectiveKind, Oracle, ValueOracle};
use crate::rng::{derive_seed, SeedStream};
use crate::solution::Solution;
use crate::trace::{audit, audit_true_values};

/// Non-monotone worst-case ratio at `k = 10`, `b = 1.49`, before adding `eps`.
pub const NM_RATIO_K10: f64 = 9.298;

#[derive(Clone, Debug, PartialEq)]
pub struct RatioSample {
    pub algo: &'static str,
    pub family: &'static str,
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub value: f64,
    pub opt: f64,
    pub queries: u64,
    pub passes: u32,
    /// Pass limit the run must respect (0 when not applicable).
    pub pass_bound: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetSample {
    pub algo: &'static str,
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub queries: u64,
    pub limit: u64,
    /// `queries` must equal `limit` rather than merely stay below it.
    pub exact: bool,
}

impl BudgetSample {
    pub fn holds(&self) -> bool {
        if self.exact {
            self.queries == self.limit
        } else {
            self.queries <= self.limit
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CampaignReport {
    pub name: String,
    pub ratios: Vec<RatioSample>,
    pub budgets: Vec<BudgetSample>,
    pub frequencies: Vec<(u64, f64, f64)>,
    pub violations: Vec<String>,
    pub failures: Vec<String>,
}

impl CampaignReport {
    fn named(name: &str) -> Self {
        CampaignReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        let runs = self.ratios.len() + self.budgets.len() + self.frequencies.len();
        format!(
            "{}: {} ({} samples, {} failures, {} invariant violations)",
            self.name,
            if self.passed() { "ok" } else { "FAILED" },
            runs,
            self.failures.len(),
            self.violations.len()
        )
    }

    fn absorb(&mut self, part: Partial) {
        self.ratios.extend(part.ratios);
        self.budgets.extend(part.budgets);
        self.violations.extend(part.violations);
    }
}

#[derive(Default)]
struct Partial {
    ratios: Vec<RatioSample>,
    budgets: Vec<BudgetSample>,
    violations: Vec<String>,
}

impl Partial {
    /// Structural audit of a trace, plus a true-value replay when no
    /// deletion happened (deleted elements are no longer part of the set
    /// the trace describes).
    fn audit(&mut self, label: &str, solution: &Solution, oracle: &ValueOracle) -> Result<()> {
        let Some(trace) = solution.trace.as_ref() else {
            return Ok(());
        };
        for v in audit(trace) {
            self.violations.push(format!("{label}: step {}: {}", v.step, v.what));
        }
        if trace.deletions() == 0 {
            for v in audit_true_values(trace, &oracle.fresh())? {
                self.violations.push(format!("{label}: step {}: {}", v.step, v.what));
            }
        }
        Ok(())
    }
}

fn uniform(rng: &mut SeedStream, lo: usize, hi: usize) -> usize {
    lo + rng.below(hi - lo + 1)
}

/// Coverage on G(n, p) or modular weights (multiples of 1/8, so sums are
/// exact), `n` drawn from `[6, max_n]`.
pub fn monotone_instance(seed: u64, max_n: usize) -> Result<(&'static str, ValueOracle)> {
    let mut rng = SeedStream::new(seed);
    let n = uniform(&mut rng, 6.min(max_n), max_n);
    if rng.below(2) == 0 {
        let p = 0.1 + 0.4 * rng.open01();
        let g = Graph::erdos_renyi(n, p, rng.next_u64())?;
        Ok(("coverage", ValueOracle::for_graph(ObjectiveKind::Coverage, Arc::new(g), 0)?))
    } else {
        let w = (0..n).map(|_| (1 + rng.below(800)) as f64 / 8.0).collect();
        Ok(("modular", ValueOracle::modular(w)))
    }
}

/// Max-cut on disjoint weighted triangles plus light random edges, or the
/// non-monotone revenue objective on G(n, p).
pub fn nonmonotone_instance(seed: u64, max_n: usize) -> Result<(&'static str, ValueOracle)> {
    let mut rng = SeedStream::new(seed);
    let n = uniform(&mut rng, 6.min(max_n), max_n);
    if rng.below(2) == 0 {
        let mut edges = Vec::new();
        for t in 0..n / 3 {
            let (a, b, c) = (3 * t, 3 * t + 1, 3 * t + 2);
            for (u, v) in [(a, b), (b, c), (a, c)] {
                edges.push((u, v, 0.5 + rng.open01()));
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.open01() < 0.15 {
                    edges.push((u, v, 0.5 * rng.open01()));
                }
            }
        }
        let g = Graph::from_edges(n, edges)?;
        Ok(("maxcut", ValueOracle::for_graph(ObjectiveKind::MaxCut, Arc::new(g), 0)?))
    } else {
        let p = 0.2 + 0.3 * rng.open01();
        let g = Graph::erdos_renyi(n, p, rng.next_u64())?;
        let wseed = rng.next_u64();
        Ok((
            "revenue-nm",
            ValueOracle::for_graph(ObjectiveKind::RevenueNonMonotone, Arc::new(g), wseed)?,
        ))
    }
}

fn value_of(solution: &Solution, oracle: &ValueOracle) -> Result<f64> {
    solution.value_or_evaluate(&oracle.fresh())
}

fn collect(exec: Execution, count: usize, f: impl Fn(usize) -> Result<Partial> + Sync + Send) -> Result<Vec<Partial>> {
    exec.map_indexed(count, f).into_iter().collect()
}

/// Query budgets on larger instances. The buffered stream stays within
/// `⌈n/c⌉ + c`; the large-`k` variant and the non-monotone stream must hit
/// `⌈n/c⌉` and `2n + 2` exactly.
pub fn budget_campaign(instances: usize, seed: u64, exec: Execution) -> Result<CampaignReport> {
    let parts = collect(exec, instances, |i| {
        let mut rng = SeedStream::new(derive_seed(seed, i as u64));
        let n = uniform(&mut rng, 10, 500);
        let c = uniform(&mut rng, 1, 4);
        let k = uniform(&mut rng, 2, 20);
        let g = Arc::new(Graph::barabasi_albert(n, 3, rng.next_u64())?);
        let cover = ValueOracle::for_graph(ObjectiveKind::Coverage, g.clone(), 0)?;
        let cut = ValueOracle::for_graph(ObjectiveKind::MaxCut, g, 0)?;
        let blocks = n.div_ceil(c) as u64;
        let cfg = QsConfig::new(k, c, 0.1)?.with_trace(true);
        let nm = NmConfig::new(k, DEFAULT_B, 0.1)?.with_trace(true);
        let mut part = Partial::default();

        let o = cover.fresh();
        let s = quickstream_c(&o, &cfg, 0..n)?;
        part.audit("quickstream", &s, &cover)?;
        part.budgets.push(BudgetSample {
            algo: "quickstream",
            n,
            k,
            c,
            queries: o.queries(),
            limit: blocks + c as u64,
            exact: false,
        });
        let o = cover.fresh();
        let s = quickstream_largek(&o, &cfg, 0..n)?;
        part.audit("quickstream-largek", &s, &cover)?;
        part.budgets.push(BudgetSample {
            algo: "quickstream-largek",
            n,
            k,
            c,
            queries: o.queries(),
            limit: blocks,
            exact: true,
        });
        let o = cut.fresh();
        let s = quickstream_nm(&o, &nm, 0..n)?;
        part.audit("qs-nm", &s, &cut)?;
        part.budgets.push(BudgetSample {
            algo: "qs-nm",
            n,
            k,
            c: 1,
            queries: o.queries(),
            limit: 2 * n as u64 + 2,
            exact: true,
        });
        Ok(part)
    })?;
    let mut report = CampaignReport::named("query budgets");
    for p in parts {
        report.absorb(p);
    }
    for b in &report.budgets {
        if !b.holds() {
            report.failures.push(format!("{b:?}"));
        }
    }
    Ok(report)
}

/// Single-pass buffered stream (`c = 1`, eps 0.1) and the boosted pipeline
/// (eps 0.1) against brute force on monotone instances with `k ∈ {2,3,4}`.
pub fn monotone_campaign(instances: usize, max_n: usize, seed: u64, exec: Execution) -> Result<CampaignReport> {
    let eps = 0.1;
    let parts = collect(exec, instances, |i| {
        let iseed = derive_seed(seed, i as u64);
        let (family, oracle) = monotone_instance(iseed, max_n)?;
        let n = oracle.ground_size();
        let k = 2 + (i % 3);
        let opt = brute_force_opt(&oracle.fresh(), k)?.value.unwrap_or(0.0);
        let stream: Vec<usize> = (0..n).collect();
        let cfg = QsConfig::new(k, 1, eps)?.with_trace(true);
        let mut part = Partial::default();

        let o = oracle.fresh();
        let s = quickstream_c(&o, &cfg, stream.iter().copied())?;
        part.audit("quickstream", &s, &oracle)?;
        part.ratios.push(RatioSample {
            algo: "quickstream",
            family,
            n,
            k,
            c: 1,
            value: value_of(&s, &oracle)?,
            opt,
            queries: o.queries(),
            passes: s.metrics.passes,
            pass_bound: 1,
        });

        let o = oracle.fresh();
        let pass = PassConfig::new(eps)?.with_trace(true);
        let r = qs_br(&o, &cfg, &pass, &stream)?;
        part.audit("qs-br seed", &r.seed, &oracle)?;
        if let Some(b) = &r.boosted {
            part.audit("qs-br boost", b, &oracle)?;
        }
        part.ratios.push(RatioSample {
            algo: "qs-br",
            family,
            n,
            k,
            c: 1,
            value: value_of(&r.solution, &oracle)?,
            opt,
            queries: o.queries(),
            passes: r.boost_passes(),
            pass_bound: boost_pass_bound(r.alpha, eps),
        });
        Ok(part)
    })?;
    let mut report = CampaignReport::named("monotone ratios");
    for p in parts {
        report.absorb(p);
    }
    for s in &report.ratios {
        let (factor, tol) = match s.algo {
            "quickstream" => (0.25 - eps, 1e-9),
            _ => (1.0 - (-1.0f64).exp() - eps, 1e-9),
        };
        if s.value < factor * s.opt - tol || s.passes > s.pass_bound {
            report.failures.push(format!("{s:?}"));
        }
    }
    Ok(report)
}

/// `k = 1` branch with `c ∈ {1,2,3}`: value at least `OPT/c`.
pub fn small_k_campaign(instances: usize, max_n: usize, seed: u64, exec: Execution) -> Result<CampaignReport> {
    let parts = collect(exec, instances, |i| {
        let (family, oracle) = monotone_instance(derive_seed(seed, i as u64), max_n)?;
        let n = oracle.ground_size();
        let c = 1 + i % 3;
        let opt = brute_force_opt(&oracle.fresh(), 1)?.value.unwrap_or(0.0);
        let o = oracle.fresh();
        let s = qs_small(&o, &QsConfig::new(1, c, 0.1)?, 0..n)?;
        let mut part = Partial::default();
        part.ratios.push(RatioSample {
            algo: "qs-small",
            family,
            n,
            k: 1,
            c,
            value: value_of(&s, &oracle)?,
            opt,
            queries: o.queries(),
            passes: s.metrics.passes,
            pass_bound: 1,
        });
        Ok(part)
    })?;
    let mut report = CampaignReport::named("k = 1 ratio");
    for p in parts {
        report.absorb(p);
    }
    for s in &report.ratios {
        if s.value * (s.c as f64) < s.opt {
            report.failures.push(format!("{s:?}"));
        }
    }
    Ok(report)
}

/// Non-monotone stream (`k = 10`, `b = 1.49`, eps 0.1) and its two-set
/// multi-pass pipeline against brute force.
pub fn nonmonotone_campaign(instances: usize, max_n: usize, seed: u64, exec: Execution) -> Result<CampaignReport> {
    let (k, eps) = (10usize, 0.1);
    let parts = collect(exec, instances, |i| {
        let (family, oracle) = nonmonotone_instance(derive_seed(seed, i as u64), max_n)?;
        let n = oracle.ground_size();
        let opt = brute_force_opt(&oracle.fresh(), k)?.value.unwrap_or(0.0);
        let stream: Vec<usize> = (0..n).collect();
        let nm = NmConfig::new(k, DEFAULT_B, eps)?.with_trace(true);
        let mut part = Partial::default();

        let o = oracle.fresh();
        let s = quickstream_nm(&o, &nm, stream.iter().copied())?;
        part.audit("qs-nm", &s, &oracle)?;
        part.ratios.push(RatioSample {
            algo: "qs-nm",
            family,
            n,
            k,
            c: 1,
            value: value_of(&s, &oracle)?,
            opt,
            queries: o.queries(),
            passes: s.metrics.passes,
            pass_bound: 1,
        });

        let o = oracle.fresh();
        let r = qs_mpl(&o, &nm, &PassConfig::new(eps)?.with_trace(true), &stream)?;
        if let Some(b) = &r.boosted {
            part.audit("qs-mpl boost", b, &oracle)?;
        }
        part.ratios.push(RatioSample {
            algo: "qs-mpl",
            family,
            n,
            k,
            c: 1,
            value: value_of(&r.solution, &oracle)?,
            opt,
            queries: o.queries(),
            passes: r.boost_passes(),
            pass_bound: linear_pass_bound(r.alpha, eps),
        });
        Ok(part)
    })?;
    let mut report = CampaignReport::named("non-monotone ratios");
    for p in parts {
        report.absorb(p);
    }
    for s in &report.ratios {
        let factor = match s.algo {
            "qs-nm" => NM_RATIO_K10 + eps + 1e-6,
            _ => 4.0 + 6.0 * eps,
        };
        if s.opt > factor * s.value || s.passes > s.pass_bound {
            report.failures.push(format!("{s:?}"));
        }
    }
    Ok(report)
}

/// Planted-element experiment: hit frequency within
/// `budget (c-1)/n + 3σ` for each budget, and monotone in the budget.
pub fn lower_bound_campaign(n: usize, c: usize, budgets: &[u64], trials: usize, seed: u64, exec: Execution) -> Result<CampaignReport> {
    let freqs = lower_bound_sweep(n, c, budgets, trials, seed, ProbeMode::Random, exec)?;
    let mut report = CampaignReport::named("lower bound");
    for (&b, &f) in budgets.iter().zip(&freqs) {
        let p = hit_bound(n, c, b);
        let limit = p + 3.0 * binomial_sigma(p, trials);
        report.frequencies.push((b, f, limit));
        if f > limit {
            report.failures.push(format!("budget {b}: frequency {f} > {limit}"));
        }
    }
    let mut sorted: Vec<(u64, f64)> = budgets.iter().copied().zip(freqs.iter().copied()).collect();
    sorted.sort_by_key(|x| x.0);
    if sorted.windows(2).any(|w| w[1].1 < w[0].1) {
        report.failures.push(format!("frequency not monotone in budget: {sorted:?}"));
    }
    Ok(report)
}

/// Every campaign at its default size. `max_n` caps brute-forced ground
/// sets (non-monotone instances stay at 14 or below).
pub fn verify_all(max_n: usize, seed: u64, exec: Execution) -> Result<Vec<CampaignReport>> {
    let max_n = max_n.max(6);
    Ok(vec![
        budget_campaign(50, seed, exec)?,
        monotone_campaign(500, max_n, derive_seed(seed, 1), exec)?,
        small_k_campaign(500, max_n, derive_seed(seed, 2), exec)?,
        nonmonotone_campaign(200, max_n.min(14), derive_seed(seed, 3), exec)?,
        lower_bound_campaign(100, 2, &[5, 10, 20], 2000, derive_seed(seed, 4), exec)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_campaigns_pass() {
        let exec = Execution::default();
        for r in [
            budget_campaign(4, 1, exec).unwrap(),
            monotone_campaign(12, 10, 2, exec).unwrap(),
            small_k_campaign(12, 10, 3, exec).unwrap(),
            nonmonotone_campaign(6, 10, 4, exec).unwrap(),
        ] {
            assert!(r.passed(), "{}: {:?} {:?}", r.name, r.failures, r.violations);
        }
    }

    #[test]
    fn instances_are_seeded() {
        let a = monotone_instance(5, 12).unwrap();
        let b = monotone_instance(5, 12).unwrap();
        assert_eq!(a.0, b.0);
        let all: Vec<usize> = (0..a.1.ground_size()).collect();
        assert_eq!(a.1.evaluate(&all).unwrap(), b.1.evaluate(&all).unwrap());
    }
}
