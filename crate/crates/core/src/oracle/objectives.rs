//! Objective functions. Each is a pure function of the queried set.

use std::cell::RefCell;

use super::graph::Graph;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Per-vertex stamp marks reused across evaluations on one thread.
#[derive(Default)]
struct Scratch {
    member: Vec<u32>,
    touched: Vec<u32>,
    epoch: u32,
    acc: Vec<f64>,
    order: Vec<usize>,
    list: Vec<usize>,
}

impl Scratch {
    fn begin(&mut self, n: usize) {
        if self.member.len() < n {
            self.member.resize(n, 0);
            self.touched.resize(n, 0);
            self.acc.resize(n, 0.0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.member.iter_mut().for_each(|m| *m = 0);
            self.touched.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.list.clear();
    }

    /// Marks `v` as a member; returns false if it was already marked.
    #[inline]
    fn add_member(&mut self, v: usize) -> bool {
        if self.member[v] == self.epoch {
            false
        } else {
            self.member[v] = self.epoch;
            true
        }
    }

    #[inline]
    fn is_member(&self, v: usize) -> bool {
        self.member[v] == self.epoch
    }

    #[inline]
    fn touch(&mut self, v: usize) -> bool {
        if self.touched[v] == self.epoch {
            false
        } else {
            self.touched[v] = self.epoch;
            true
        }
    }

    /// Sorted, de-duplicated copy of `set` in `self.order`.
    fn sorted(&mut self, set: &[usize]) {
        self.order.clear();
        self.order.extend_from_slice(set);
        self.order.sort_unstable();
        self.order.dedup();
    }
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

/// Number of vertices incident to an edge that touches `set`. A member with
/// no incident edge contributes nothing, not even itself.
pub fn coverage_value(graph: &Graph, set: &[usize]) -> f64 {
    SCRATCH.with(|cell| {
        let mut s = cell.borrow_mut();
        s.begin(graph.vertex_count());
        let mut covered = 0usize;
        for &v in set {
            if graph.degree(v) == 0 || !s.add_member(v) {
                continue;
            }
            if s.touch(v) {
                covered += 1;
            }
            for &(u, _) in graph.neighbors(v) {
                if s.touch(u as usize) {
                    covered += 1;
                }
            }
        }
        covered as f64
    })
}

/// Total weight of edges with exactly one endpoint in `set`.
pub fn maxcut_value(graph: &Graph, set: &[usize]) -> f64 {
    SCRATCH.with(|cell| {
        let mut s = cell.borrow_mut();
        let s = &mut *s;
        s.begin(graph.vertex_count());
        s.sorted(set);
        for &v in &s.order {
            s.member[v] = s.epoch;
        }
        let mut total = 0.0;
        for &v in &s.order {
            for &(u, e) in graph.neighbors(v) {
                if s.member[u as usize] != s.epoch {
                    total += graph.edge_weight(e as usize);
                }
            }
        }
        total
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RevenueVariant {
    /// Sum of concave revenues over every vertex.
    Monotone,
    /// Sum only over vertices outside the seed set.
    NonMonotone,
}

/// Random parameters of the revenue objective: one weight per edge and one
/// concavity exponent per vertex, all in (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct RevenueParams {
    edge_weights: Vec<f64>,
    alphas: Vec<f64>,
}

impl RevenueParams {
    pub fn new(graph: &Graph, edge_weights: Vec<f64>, alphas: Vec<f64>) -> Result<Self> {
        if edge_weights.len() != graph.edge_count() || alphas.len() != graph.vertex_count() {
            return Err(Error::validation(
                "revenue parameters do not match the graph's edge/vertex counts",
            ));
        }
        if edge_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::validation("revenue edge weights must be non-negative"));
        }
        if alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::validation("revenue exponents must lie in (0, 1)"));
        }
        Ok(RevenueParams {
            edge_weights,
            alphas,
        })
    }

    /// Draws all edge weights (in edge-index order) and then all exponents
    /// (in vertex order) from `SeedStream::open01`.
    pub fn generate(graph: &Graph, seed: u64) -> Self {
        let mut rng = SeedStream::new(seed);
        let edge_weights = (0..graph.edge_count()).map(|_| rng.open01()).collect();
        let alphas = (0..graph.vertex_count()).map(|_| rng.open01()).collect();
        RevenueParams {
            edge_weights,
            alphas,
        }
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

/// `Σ_u (Σ_{v ∈ S, uv ∈ E} w_uv)^{α_u}`, restricted to `u ∉ S` for the
/// non-monotone variant. Vertices with an empty inner sum contribute 0.
pub fn revenue_value(
    graph: &Graph,
    params: &RevenueParams,
    set: &[usize],
    variant: RevenueVariant,
) -> f64 {
    SCRATCH.with(|cell| {
        let mut s = cell.borrow_mut();
        let s = &mut *s;
        s.begin(graph.vertex_count());
        s.sorted(set);
        for &v in &s.order {
            s.member[v] = s.epoch;
        }
        for &v in &s.order {
            for &(u, e) in graph.neighbors(v) {
                let u = u as usize;
                if s.touched[u] != s.epoch {
                    s.touched[u] = s.epoch;
                    s.acc[u] = 0.0;
                    s.list.push(u);
                }
                s.acc[u] += params.edge_weights[e as usize];
            }
        }
        let mut total = 0.0;
        for &u in &s.list {
            if variant == RevenueVariant::NonMonotone && s.member[u] == s.epoch {
                continue;
            }
            total += s.acc[u].powf(params.alphas[u]);
        }
        total
    })
}

/// Additive set function: sum of the weights of distinct members.
pub fn modular_value(weights: &[f64], set: &[usize]) -> f64 {
    SCRATCH.with(|cell| {
        let mut s = cell.borrow_mut();
        let s = &mut *s;
        s.begin(weights.len());
        s.sorted(set);
        s.order.iter().map(|&v| weights[v]).sum()
    })
}

/// `min(|A|, cap)`, or `cap` whenever the planted element is present.
pub fn capped_cardinality(n: usize, cap: usize, planted: Option<usize>, set: &[usize]) -> f64 {
    SCRATCH.with(|cell| {
        let mut s = cell.borrow_mut();
        s.begin(n);
        let mut distinct = 0usize;
        let mut hit = false;
        for &v in set {
            if s.add_member(v) {
                distinct += 1;
                hit |= Some(v) == planted;
            }
        }
        debug_assert!(set.iter().all(|&v| s.is_member(v)));
        if hit {
            cap as f64
        } else {
            distinct.min(cap) as f64
        }
    })
}
