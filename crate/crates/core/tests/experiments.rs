use std::sync::Arc;

use substream::baselines::{greedy, stochastic_greedy};
use substream::harness::experiment::{sweep_configs, AlgoId, Dataset, ExperimentConfig, Session};
use substream::harness::{Execution, OrderMode};
use substream::monotone::{quickstream_c, quickstream_pp, QsConfig};
use substream::oracle::{Graph, ObjectiveKind, ValueOracle};
use substream::rng::SeedStream;
use substream::solution::ceil_log2;

#[test]
fn quickstream_peak_memory_from_records() {
    let base = ExperimentConfig {
        order: OrderMode::Shuffle,
        reps: 2,
        ..ExperimentConfig::new("ba:3000:5:1".parse().unwrap(), ObjectiveKind::Coverage, AlgoId::QuickStream, 2)
    };
    let mut configs = Vec::new();
    for c in [1usize, 2, 4] {
        configs.extend(sweep_configs(&ExperimentConfig { c, ..base.clone() }, &[2, 5, 20, 60], &[0.1, 0.01], &[AlgoId::QuickStream]));
    }
    let rows = Session::new(Execution::default()).run_sweep(&configs).unwrap();
    for r in rows.iter().filter(|r| r.algo == "quickstream") {
        let ell = 2usize.max((1.0 / (4.0 * r.eps)).log2().ceil() as usize + 2);
        let bound = 2 * r.c * ell * (r.k + 1) * ceil_log2(r.k) + r.c;
        assert!(r.peak_memory <= bound, "{r:?} bound {bound}");
        assert!(r.queries <= (r.n.div_ceil(r.c) + r.c) as u64);
        assert!(r.value_norm > 0.0 && r.value_norm <= 1.0 + 1e-9);
    }
}

#[test]
fn stochastic_greedy_tracks_greedy_at_scale() {
    let g = Arc::new(Dataset::ego_facebook_scale().graph().unwrap().unwrap());
    let o = ValueOracle::for_graph(ObjectiveKind::Coverage, g, 0).unwrap();
    for k in [10usize, 50] {
        let reference = greedy(&o.fresh(), k, true).unwrap().value.unwrap();
        let mean = (0..10u64)
            .map(|seed| stochastic_greedy(&o.fresh(), k, 0.1, seed).unwrap().value.unwrap())
            .sum::<f64>()
            / 10.0;
        assert!(mean >= 0.95 * reference, "k={k}: {mean} vs {reference}");
    }
}

#[test]
fn lazy_and_plain_greedy_agree_on_200_instances() {
    for i in 0..200u64 {
        let mut rng = SeedStream::new(i);
        let n = 10 + rng.below(60);
        let o = if i % 2 == 0 {
            let g = Graph::erdos_renyi(n, 0.05 + 0.2 * rng.open01(), i).unwrap();
            ValueOracle::for_graph(ObjectiveKind::Coverage, Arc::new(g), 0).unwrap()
        } else {
            ValueOracle::modular((0..n).map(|_| rng.below(20) as f64).collect())
        };
        let k = 1 + rng.below(8);
        let a = greedy(&o.fresh(), k, false).unwrap();
        let b = greedy(&o.fresh(), k, true).unwrap();
        assert_eq!(a.elements, b.elements, "instance {i}");
        assert!(b.metrics.queries <= a.metrics.queries);
    }
}

#[test]
fn tracked_blocks_never_hurt() {
    for i in 0..100u64 {
        let mut rng = SeedStream::new(1000 + i);
        let n = 20 + rng.below(300);
        let w: Vec<f64> = (0..n).map(|_| rng.open01() * if rng.below(10) == 0 { 100.0 } else { 1.0 }).collect();
        let o = ValueOracle::modular(w);
        let cfg = QsConfig::new(2 + rng.below(6), 1 + rng.below(3), 0.1).unwrap();
        let plain = quickstream_c(&o.fresh(), &cfg, 0..n).unwrap();
        let pp = quickstream_pp(&o.fresh(), &cfg, 0..n).unwrap();
        assert!(pp.value.unwrap() >= plain.value.unwrap());
    }
}
