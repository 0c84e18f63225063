use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::exec::Execution;
use super::order::{stream_order, OrderMode};
use crate::baselines::{brute_force_opt, greedy, random_baseline, sieve_stream_pp, stochastic_greedy};
use crate::error::{Error, Result};
use crate::monotone::{dispatch_monotone, qs_small, quickstream_c, quickstream_largek, quickstream_pp, QsConfig};
use crate::multipass::{qs_br, qs_mpl, PassConfig};
use crate::nonmonotone::{qs_pp_default, quickstream_nm, quickstream_nm_blocked, NmConfig, DEFAULT_B};
use crate::oracle::{load_edge_list, CountingOracle, Graph, ObjectiveKind, Oracle, ValueOracle};
use crate::rng::SeedStream;
use crate::solution::Solution;

/// Where the ground set comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    /// Edge-list file.
    File(PathBuf),
    /// `ba:N:M:SEED`, preferential attachment graph.
    BarabasiAlbert { n: usize, m: usize, seed: u64 },
    /// `er:N:P:SEED`, G(n, p) graph.
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    /// `weights:N:SEED`, uniform (0, 1) element weights for the modular objective.
    Weights { n: usize, seed: u64 },
}

impl Dataset {
    /// Preferential-attachment graph with the vertex and edge count of the
    /// SNAP ego-Facebook network (4039 vertices, about 88k edges).
    pub fn ego_facebook_scale() -> Self {
        Dataset::BarabasiAlbert {
            n: 4039,
            m: 22,
            seed: 0,
        }
    }

    pub fn graph(&self) -> Result<Option<Graph>> {
        Ok(Some(match self {
            Dataset::File(path) => load_edge_list(path)?,
            Dataset::BarabasiAlbert { n, m, seed } => Graph::barabasi_albert(*n, *m, *seed)?,
            Dataset::ErdosRenyi { n, p, seed } => Graph::erdos_renyi(*n, *p, *seed)?,
            Dataset::Weights { .. } => return Ok(None),
        }))
    }
}

fn spec_field<T: FromStr>(spec: &str, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::validation(format!("bad field `{field}` in dataset spec `{spec}`")))
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["ba", n, m, seed] => Ok(Dataset::BarabasiAlbert {
                n: spec_field(s, n)?,
                m: spec_field(s, m)?,
                seed: spec_field(s, seed)?,
            }),
            ["er", n, p, seed] => Ok(Dataset::ErdosRenyi {
                n: spec_field(s, n)?,
                p: spec_field(s, p)?,
                seed: spec_field(s, seed)?,
            }),
            ["weights", n, seed] => Ok(Dataset::Weights {
                n: spec_field(s, n)?,
                seed: spec_field(s, seed)?,
            }),
            ["ba" | "er" | "weights", ..] => Err(Error::validation(format!("malformed dataset spec `{s}`"))),
            _ => Ok(Dataset::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dataset::File(p) => write!(f, "{}", p.display()),
            Dataset::BarabasiAlbert { n, m, seed } => write!(f, "ba:{n}:{m}:{seed}"),
            Dataset::ErdosRenyi { n, p, seed } => write!(f, "er:{n}:{p}:{seed}"),
            Dataset::Weights { n, seed } => write!(f, "weights:{n}:{seed}"),
        }
    }
}

macro_rules! algo_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Algorithms the harness can run.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum AlgoId { $($variant),* }

        impl AlgoId {
            pub const ALL: &'static [AlgoId] = &[$(AlgoId::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(AlgoId::$variant => $name),* }
            }
        }
    };
}

algo_ids! {
    Greedy => "greedy",
    Ltl => "ltl",
    Sieve => "sieve",
    Random => "random",
    QuickStream => "quickstream",
    QuickStreamPp => "quickstream-pp",
    QsSmall => "qs-small",
    QuickStreamLargeK => "quickstream-largek",
    QuickStreamAuto => "quickstream-auto",
    QsBr => "qs-br",
    QsNm => "qs-nm",
    QsNmPp => "qs-nm-pp",
    QsMpl => "qs-mpl",
    BruteForce => "bruteforce",
}

impl FromStr for AlgoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgoId::ALL.iter().copied().find(|a| a.name() == s).ok_or_else(|| {
            let known: Vec<&str> = AlgoId::ALL.iter().map(|a| a.name()).collect();
            Error::validation(format!("unknown algorithm `{s}` (known: {})", known.join(", ")))
        })
    }
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub objective: ObjectiveKind,
    pub algo: AlgoId,
    pub k: usize,
    pub c: usize,
    pub eps: f64,
    pub b: f64,
    /// Samples for the random baseline; `None` means `n`.
    pub trials: Option<usize>,
    pub order: OrderMode,
    pub lazy: bool,
    pub reps: usize,
    /// Seeds the objective; repetition `r` uses `seed + r` for order and sampling.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(dataset: Dataset, objective: ObjectiveKind, algo: AlgoId, k: usize) -> Self {
        ExperimentConfig {
            dataset,
            objective,
            algo,
            k,
            c: 1,
            eps: 0.1,
            b: DEFAULT_B,
            trials: None,
            order: OrderMode::File,
            lazy: false,
            reps: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::validation("reps must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::validation("k must be at least 1"));
        }
        if self.c == 0 {
            return Err(Error::validation("c must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::validation(format!("eps must be positive (got {})", self.eps)));
        }
        if self.trials == Some(0) {
            return Err(Error::validation("trials must be at least 1"));
        }
        Ok(())
    }

    pub fn rep_seed(&self, rep: usize) -> u64 {
        self.seed.wrapping_add(rep as u64)
    }
}

/// One CSV row: the configuration of a run and what it measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub objective: String,
    pub algo: String,
    pub k: usize,
    pub c: usize,
    pub eps: f64,
    pub b: f64,
    pub trials: Option<usize>,
    pub order: String,
    pub lazy: bool,
    pub rep: usize,
    pub seed: u64,
    pub n: usize,
    pub value: f64,
    /// `value` divided by the greedy value on the same instance and `k`.
    pub value_norm: f64,
    pub queries: u64,
    /// `queries / n`.
    pub queries_norm: f64,
    pub peak_memory: usize,
    pub passes: u32,
    pub wall_ms: f64,
}

impl ResultRecord {
    pub const COLUMNS: [&'static str; 20] = [
        "dataset",
        "objective",
        "algo",
        "k",
        "c",
        "eps",
        "b",
        "trials",
        "order",
        "lazy",
        "rep",
        "seed",
        "n",
        "value",
        "value_norm",
        "queries",
        "queries_norm",
        "peak_memory",
        "passes",
        "wall_ms",
    ];
}

fn normalized(value: f64, by: f64) -> f64 {
    if by > 0.0 {
        value / by
    } else {
        f64::NAN
    }
}

/// Builds the objective for `dataset`. `seed` feeds randomized parameters
/// such as revenue weights.
pub fn build_oracle(dataset: &Dataset, graph: Option<Arc<Graph>>, kind: ObjectiveKind, seed: u64) -> Result<ValueOracle> {
    match (dataset, kind) {
        (Dataset::Weights { n, seed: wseed }, ObjectiveKind::Modular) => {
            let mut rng = SeedStream::new(*wseed);
            Ok(ValueOracle::modular((0..*n).map(|_| rng.open01()).collect()))
        }
        (Dataset::Weights { .. }, other) => Err(Error::validation(format!(
            "objective `{other}` needs a graph dataset"
        ))),
        (_, ObjectiveKind::Modular) => Err(Error::validation(
            "objective `modular` needs a weights:N:SEED dataset",
        )),
        (_, ObjectiveKind::Adversarial) => Err(Error::validation(
            "objective `adversarial` is only available through the lowerbound command",
        )),
        (_, kind) => {
            let graph = graph.ok_or_else(|| Error::validation("graph dataset expected"))?;
            ValueOracle::for_graph(kind, graph, seed)
        }
    }
}

/// Runs the configured algorithm once on `stream`.
pub fn run_algorithm(cfg: &ExperimentConfig, oracle: &dyn Oracle, stream: &[usize], seed: u64) -> Result<Solution> {
    let (k, c, eps) = (cfg.k, cfg.c, cfg.eps);
    let it = stream.iter().copied();
    let qs = || QsConfig::new(k, c, eps);
    let nm = || NmConfig::new(k, cfg.b, eps).map(|n| n.with_block(c));
    let pass = || PassConfig::new(eps).map(|p| p.with_lazy(cfg.lazy));
    match cfg.algo {
        AlgoId::Greedy => greedy(oracle, k, cfg.lazy),
        AlgoId::Ltl => stochastic_greedy(oracle, k, eps, seed),
        AlgoId::Sieve => sieve_stream_pp(oracle, k, eps, it),
        AlgoId::Random => random_baseline(oracle, k, cfg.trials.unwrap_or(oracle.ground_size()).max(1), seed),
        AlgoId::QuickStream => quickstream_c(oracle, &qs()?, it),
        AlgoId::QuickStreamPp => quickstream_pp(oracle, &qs()?, it),
        AlgoId::QsSmall => qs_small(oracle, &qs()?, it),
        AlgoId::QuickStreamLargeK => quickstream_largek(oracle, &qs()?, it),
        AlgoId::QuickStreamAuto => dispatch_monotone(oracle, &qs()?, it).map(|d| d.solution),
        AlgoId::QsBr => qs_br(oracle, &qs()?, &pass()?, stream).map(|b| b.solution),
        AlgoId::QsNm if c > 1 => quickstream_nm_blocked(oracle, &nm()?, it),
        AlgoId::QsNm => quickstream_nm(oracle, &nm()?, it),
        AlgoId::QsNmPp => qs_pp_default(oracle, &nm()?, it),
        AlgoId::QsMpl => qs_mpl(oracle, &nm()?, &pass()?, stream).map(|b| b.solution),
        AlgoId::BruteForce => brute_force_opt(oracle, k),
    }
}

/// Runs one repetition against a fresh copy of `template`, cross-checking
/// the query count three ways: the algorithm's own tally, a wrapping
/// counter, and the oracle's internal counter.
pub fn run_once(cfg: &ExperimentConfig, rep: usize, template: &ValueOracle, greedy_value: Option<f64>) -> Result<ResultRecord> {
    let oracle = template.fresh();
    let n = oracle.ground_size();
    let seed = cfg.rep_seed(rep);
    let stream = stream_order(n, cfg.order, seed);
    let counted = CountingOracle::new(&oracle);
    let start = Instant::now();
    let solution = run_algorithm(cfg, &counted, &stream, seed)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let queries = oracle.queries();
    if counted.queries() != queries || solution.metrics.queries != queries {
        return Err(Error::validation(format!(
            "query accounting mismatch for {}: reported {}, wrapper {}, oracle {}",
            cfg.algo,
            solution.metrics.queries,
            counted.queries(),
            queries
        )));
    }
    let value = match solution.value {
        Some(v) => v,
        None => template.fresh().evaluate(&solution.elements)?,
    };
    Ok(ResultRecord {
        dataset: cfg.dataset.to_string(),
        objective: cfg.objective.to_string(),
        algo: cfg.algo.to_string(),
        k: cfg.k,
        c: cfg.c,
        eps: cfg.eps,
        b: cfg.b,
        trials: cfg.trials,
        order: cfg.order.to_string(),
        lazy: cfg.lazy,
        rep,
        seed,
        n,
        value,
        value_norm: greedy_value.map_or(1.0, |g| normalized(value, g)),
        queries,
        queries_norm: queries as f64 / n.max(1) as f64,
        peak_memory: solution.metrics.peak_memory,
        passes: solution.metrics.passes,
        wall_ms,
    })
}

type OracleKey = (String, ObjectiveKind, u64);
type GreedyKey = (String, ObjectiveKind, usize, u64);

/// Caches loaded graphs and greedy baselines across the runs of a sweep.
pub struct Session {
    exec: Execution,
    graphs: Mutex<HashMap<String, Arc<Graph>>>,
    greedy: Mutex<HashMap<GreedyKey, f64>>,
}

impl Session {
    pub fn new(exec: Execution) -> Self {
        Session {
            exec,
            graphs: Mutex::new(HashMap::new()),
            greedy: Mutex::new(HashMap::new()),
        }
    }

    fn graph(&self, dataset: &Dataset) -> Result<Option<Arc<Graph>>> {
        let key = dataset.to_string();
        if let Some(g) = self.graphs.lock().unwrap().get(&key) {
            return Ok(Some(g.clone()));
        }
        let Some(graph) = dataset.graph()? else {
            return Ok(None);
        };
        let graph = Arc::new(graph);
        self.graphs.lock().unwrap().insert(key, graph.clone());
        Ok(Some(graph))
    }

    pub fn oracle(&self, dataset: &Dataset, kind: ObjectiveKind, seed: u64) -> Result<ValueOracle> {
        build_oracle(dataset, self.graph(dataset)?, kind, seed)
    }

    /// Runs every repetition of every config. Greedy baseline rows come
    /// first, one per distinct (dataset, objective, k, seed) not already
    /// computed by this session, followed by the run rows in config order.
    pub fn run_sweep(&self, configs: &[ExperimentConfig]) -> Result<Vec<ResultRecord>> {
        for cfg in configs {
            cfg.validate()?;
        }
        let mut templates: HashMap<OracleKey, ValueOracle> = HashMap::new();
        let mut baselines: Vec<(GreedyKey, ExperimentConfig)> = Vec::new();
        for cfg in configs {
            let okey = (cfg.dataset.to_string(), cfg.objective, cfg.seed);
            if !templates.contains_key(&okey) {
                let oracle = self.oracle(&cfg.dataset, cfg.objective, cfg.seed)?;
                templates.insert(okey.clone(), oracle);
            }
            let gkey = (okey.0, okey.1, cfg.k, okey.2);
            let cached = self.greedy.lock().unwrap().contains_key(&gkey);
            if !cached && !baselines.iter().any(|(k, _)| *k == gkey) {
                let mut g = cfg.clone();
                g.algo = AlgoId::Greedy;
                g.lazy = true;
                g.order = OrderMode::File;
                g.trials = None;
                baselines.push((gkey, g));
            }
        }
        let template = |cfg: &ExperimentConfig| &templates[&(cfg.dataset.to_string(), cfg.objective, cfg.seed)];

        let greedy_rows = self
            .exec
            .map_indexed(baselines.len(), |i| run_once(&baselines[i].1, 0, template(&baselines[i].1), None))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        {
            let mut cache = self.greedy.lock().unwrap();
            for ((key, _), row) in baselines.iter().zip(&greedy_rows) {
                cache.insert(key.clone(), row.value);
            }
        }
        let cache = self.greedy.lock().unwrap().clone();

        let jobs: Vec<(usize, usize)> = configs
            .iter()
            .enumerate()
            .flat_map(|(i, cfg)| (0..cfg.reps).map(move |r| (i, r)))
            .collect();
        let runs = self
            .exec
            .map_indexed(jobs.len(), |j| {
                let cfg = &configs[jobs[j].0];
                let gkey = (cfg.dataset.to_string(), cfg.objective, cfg.k, cfg.seed);
                run_once(cfg, jobs[j].1, template(cfg), cache.get(&gkey).copied())
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;

        let mut out = greedy_rows;
        out.extend(runs);
        Ok(out)
    }
}

/// Runs one configuration with its greedy baseline row.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    Session::new(Execution::default()).run_sweep(std::slice::from_ref(config))
}

/// Cartesian product of `ks × eps_list × algos` over a base config, in
/// that nesting order.
pub fn sweep_configs(base: &ExperimentConfig, ks: &[usize], eps_list: &[f64], algos: &[AlgoId]) -> Vec<ExperimentConfig> {
    let mut out = Vec::with_capacity(ks.len() * eps_list.len() * algos.len());
    for &k in ks {
        for &eps in eps_list {
            for &algo in algos {
                out.push(ExperimentConfig {
                    k,
                    eps,
                    algo,
                    ..base.clone()
                });
            }
        }
    }
    out
}
