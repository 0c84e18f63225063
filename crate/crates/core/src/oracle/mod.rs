//! Objectives behind a query-counted evaluation interface.
//!
//! Every algorithm reaches `f` only through [`Oracle::evaluate`], so the
//! counter on a [`ValueOracle`] is an exact tally of the queries a run made.

pub mod graph;
pub mod objectives;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::SeedStream;
pub use graph::{load_edge_list, parse_edge_list, Graph};
pub use objectives::{RevenueParams, RevenueVariant};

/// Query access to a set function over the ground set `0..ground_size()`.
pub trait Oracle: Sync {
    fn ground_size(&self) -> usize;

    /// Evaluates `f(set)`. Counts as exactly one query.
    fn evaluate(&self, set: &[usize]) -> Result<f64>;

    /// Queries answered so far.
    fn queries(&self) -> u64;
}

fn check_ids(set: &[usize], n: usize) -> Result<()> {
    match set.iter().find(|&&e| e >= n) {
        Some(e) => Err(Error::validation(format!(
            "element {e} outside ground set of size {n}"
        ))),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectiveKind {
    Coverage,
    MaxCut,
    RevenueMonotone,
    RevenueNonMonotone,
    Modular,
    Adversarial,
}

impl ObjectiveKind {
    pub fn is_monotone(self) -> bool {
        !matches!(self, ObjectiveKind::MaxCut | ObjectiveKind::RevenueNonMonotone)
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Coverage => "coverage",
            ObjectiveKind::MaxCut => "maxcut",
            ObjectiveKind::RevenueMonotone => "revenue",
            ObjectiveKind::RevenueNonMonotone => "revenue-nm",
            ObjectiveKind::Modular => "modular",
            ObjectiveKind::Adversarial => "adversarial",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "coverage" | "maxcover" => ObjectiveKind::Coverage,
            "maxcut" | "cut" => ObjectiveKind::MaxCut,
            "revenue" | "revenue-monotone" => ObjectiveKind::RevenueMonotone,
            "revenue-nm" | "revenue-nonmonotone" => ObjectiveKind::RevenueNonMonotone,
            "modular" => ObjectiveKind::Modular,
            "adversarial" => ObjectiveKind::Adversarial,
            other => return Err(Error::validation(format!("unknown objective `{other}`"))),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Objective {
    Coverage(Arc<Graph>),
    MaxCut(Arc<Graph>),
    Revenue {
        graph: Arc<Graph>,
        params: Arc<RevenueParams>,
        variant: RevenueVariant,
    },
    Modular(Arc<Vec<f64>>),
    /// `min(|A|, cap)`, raised to `cap` on any set holding `planted`.
    Adversarial {
        n: usize,
        cap: usize,
        planted: Option<usize>,
    },
}

impl Objective {
    pub fn ground_size(&self) -> usize {
        match self {
            Objective::Coverage(g) | Objective::MaxCut(g) => g.vertex_count(),
            Objective::Revenue { graph, .. } => graph.vertex_count(),
            Objective::Modular(w) => w.len(),
            Objective::Adversarial { n, .. } => *n,
        }
    }

    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::Coverage(_) => ObjectiveKind::Coverage,
            Objective::MaxCut(_) => ObjectiveKind::MaxCut,
            Objective::Revenue {
                variant: RevenueVariant::Monotone,
                ..
            } => ObjectiveKind::RevenueMonotone,
            Objective::Revenue { .. } => ObjectiveKind::RevenueNonMonotone,
            Objective::Modular(_) => ObjectiveKind::Modular,
            Objective::Adversarial { .. } => ObjectiveKind::Adversarial,
        }
    }

    fn value(&self, set: &[usize]) -> f64 {
        match self {
            Objective::Coverage(g) => objectives::coverage_value(g, set),
            Objective::MaxCut(g) => objectives::maxcut_value(g, set),
            Objective::Revenue {
                graph,
                params,
                variant,
            } => objectives::revenue_value(graph, params, set, *variant),
            Objective::Modular(w) => objectives::modular_value(w, set),
            Objective::Adversarial { n, cap, planted } => {
                objectives::capped_cardinality(*n, *cap, *planted, set)
            }
        }
    }
}

/// An objective plus its query counter.
#[derive(Debug)]
pub struct ValueOracle {
    objective: Objective,
    queries: AtomicU64,
}

impl ValueOracle {
    pub fn new(objective: Objective) -> Self {
        ValueOracle {
            objective,
            queries: AtomicU64::new(0),
        }
    }

    /// Graph objective of the given kind; `seed` feeds the revenue parameters.
    pub fn for_graph(kind: ObjectiveKind, graph: Arc<Graph>, seed: u64) -> Result<Self> {
        let objective = match kind {
            ObjectiveKind::Coverage => Objective::Coverage(graph),
            ObjectiveKind::MaxCut => Objective::MaxCut(graph),
            ObjectiveKind::RevenueMonotone | ObjectiveKind::RevenueNonMonotone => {
                let params = Arc::new(RevenueParams::generate(&graph, seed));
                let variant = if kind == ObjectiveKind::RevenueMonotone {
                    RevenueVariant::Monotone
                } else {
                    RevenueVariant::NonMonotone
                };
                Objective::Revenue {
                    graph,
                    params,
                    variant,
                }
            }
            ObjectiveKind::Modular | ObjectiveKind::Adversarial => {
                return Err(Error::validation(format!(
                    "objective `{kind}` is not defined on a graph"
                )))
            }
        };
        Ok(ValueOracle::new(objective))
    }

    pub fn modular(weights: Vec<f64>) -> Self {
        ValueOracle::new(Objective::Modular(Arc::new(weights)))
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.objective.kind()
    }

    /// Same objective with a zeroed counter, e.g. for scoring returned sets
    /// without touching an algorithm's tally.
    pub fn fresh(&self) -> Self {
        ValueOracle::new(self.objective.clone())
    }
}

impl Oracle for ValueOracle {
    fn ground_size(&self) -> usize {
        self.objective.ground_size()
    }

    fn evaluate(&self, set: &[usize]) -> Result<f64> {
        check_ids(set, self.ground_size())?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.objective.value(set))
    }

    fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// The planted-element pair `f(A) = min(|A|, c)` and `g`, which equals `c`
/// on every set containing a hidden element drawn from `seed`.
pub fn adversarial_pair(n: usize, c: usize, seed: u64) -> Result<(ValueOracle, ValueOracle, usize)> {
    if c < 2 {
        return Err(Error::validation(format!("cap c must be at least 2 (got {c})")));
    }
    if n < c {
        return Err(Error::validation(format!(
            "ground set of size {n} is smaller than cap {c}"
        )));
    }
    let planted = SeedStream::new(seed).below(n);
    let f = ValueOracle::new(Objective::Adversarial {
        n,
        cap: c,
        planted: None,
    });
    let g = ValueOracle::new(Objective::Adversarial {
        n,
        cap: c,
        planted: Some(planted),
    });
    Ok((f, g, planted))
}

/// Pass-through wrapper with its own counter, used to cross-check the
/// counter of the oracle it wraps.
pub struct CountingOracle<'a> {
    inner: &'a dyn Oracle,
    count: AtomicU64,
}

impl<'a> CountingOracle<'a> {
    pub fn new(inner: &'a dyn Oracle) -> Self {
        CountingOracle {
            inner,
            count: AtomicU64::new(0),
        }
    }
}

impl Oracle for CountingOracle<'_> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn evaluate(&self, set: &[usize]) -> Result<f64> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(set)
    }

    fn queries(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

/// Objective over blocks: block `i` stands for the elements `blocks[i]`,
/// and a set of blocks is evaluated as the union of its members.
pub struct BlockOracle<'a> {
    base: &'a dyn Oracle,
    blocks: Vec<Vec<usize>>,
}

impl<'a> BlockOracle<'a> {
    pub fn new(base: &'a dyn Oracle, blocks: Vec<Vec<usize>>) -> Self {
        BlockOracle { base, blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn flatten(&self, block_ids: &[usize]) -> Vec<usize> {
        block_ids
            .iter()
            .flat_map(|&b| self.blocks[b].iter().copied())
            .collect()
    }
}

impl Oracle for BlockOracle<'_> {
    fn ground_size(&self) -> usize {
        self.blocks.len()
    }

    fn evaluate(&self, set: &[usize]) -> Result<f64> {
        check_ids(set, self.blocks.len())?;
        self.base.evaluate(&self.flatten(set))
    }

    fn queries(&self) -> u64 {
        self.base.queries()
    }
}

/// Objective restricted to a sub-universe; local id `i` maps to
/// `universe[i]`. Queries are charged to the parent oracle.
pub struct RestrictedOracle<'a> {
    base: &'a dyn Oracle,
    universe: Vec<usize>,
}

impl<'a> RestrictedOracle<'a> {
    pub fn new(base: &'a dyn Oracle, universe: Vec<usize>) -> Self {
        RestrictedOracle { base, universe }
    }

    pub fn to_parent(&self, local: &[usize]) -> Vec<usize> {
        local.iter().map(|&i| self.universe[i]).collect()
    }
}

impl Oracle for RestrictedOracle<'_> {
    fn ground_size(&self) -> usize {
        self.universe.len()
    }

    fn evaluate(&self, set: &[usize]) -> Result<f64> {
        check_ids(set, self.universe.len())?;
        self.base.evaluate(&self.to_parent(set))
    }

    fn queries(&self) -> u64 {
        self.base.queries()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> Arc<Graph> {
        Arc::new(parse_edge_list("0 1\n1 2\n2 3").unwrap())
    }

    #[test]
    fn evaluate_counts_each_call() {
        let o = ValueOracle::for_graph(ObjectiveKind::Coverage, path4(), 0).unwrap();
        assert_eq!(o.evaluate(&[1]).unwrap(), 3.0);
        assert_eq!(o.evaluate(&[]).unwrap(), 0.0);
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn out_of_range_rejected_without_counting() {
        let o = ValueOracle::for_graph(ObjectiveKind::MaxCut, path4(), 0).unwrap();
        assert!(matches!(o.evaluate(&[4]), Err(Error::Validation(_))));
        assert_eq!(o.queries(), 0);
    }

    #[test]
    fn empty_set_is_zero_everywhere() {
        let g = path4();
        for kind in [
            ObjectiveKind::Coverage,
            ObjectiveKind::MaxCut,
            ObjectiveKind::RevenueMonotone,
            ObjectiveKind::RevenueNonMonotone,
        ] {
            let o = ValueOracle::for_graph(kind, g.clone(), 3).unwrap();
            assert_eq!(o.evaluate(&[]).unwrap(), 0.0, "{kind}");
        }
        assert_eq!(ValueOracle::modular(vec![1.0; 3]).evaluate(&[]).unwrap(), 0.0);
    }

    #[test]
    fn adversarial_examples() {
        let (f, g, a) = adversarial_pair(10, 3, 42).unwrap();
        assert_eq!(f.evaluate(&[]).unwrap(), 0.0);
        let five: Vec<usize> = (0..10).filter(|&e| e != a).take(5).collect();
        assert_eq!(f.evaluate(&five).unwrap(), 3.0);
        assert_eq!(g.evaluate(&five).unwrap(), 3.0);
        assert_eq!(g.evaluate(&[a]).unwrap(), 3.0);
        assert_eq!(f.evaluate(&[a]).unwrap(), 1.0);
        assert!(adversarial_pair(2, 3, 0).is_err());
        assert!(adversarial_pair(5, 1, 0).is_err());
    }

    #[test]
    fn wrappers_charge_the_base() {
        let base = ValueOracle::modular(vec![1.0, 2.0, 4.0, 8.0]);
        let blocks = BlockOracle::new(&base, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(blocks.evaluate(&[1]).unwrap(), 12.0);
        let restricted = RestrictedOracle::new(&base, vec![3, 0]);
        assert_eq!(restricted.evaluate(&[0, 1]).unwrap(), 9.0);
        assert_eq!(base.queries(), 2);
        let counting = CountingOracle::new(&base);
        counting.evaluate(&[2]).unwrap();
        assert_eq!(counting.queries(), 1);
        assert_eq!(base.queries(), 3);
    }

    #[test]
    fn objective_names_round_trip() {
        for kind in [
            ObjectiveKind::Coverage,
            ObjectiveKind::MaxCut,
            ObjectiveKind::RevenueMonotone,
            ObjectiveKind::RevenueNonMonotone,
            ObjectiveKind::Modular,
            ObjectiveKind::Adversarial,
        ] {
            assert_eq!(kind.name().parse::<ObjectiveKind>().unwrap(), kind);
        }
        assert!("pagerank".parse::<ObjectiveKind>().is_err());
    }
}
