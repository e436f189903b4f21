//! Acceptance criteria. Runs as a plain binary and prints one PASS/FAIL
//! line per criterion; exits nonzero if any criterion fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use exemplar_cli::run_cli;
use exemplar_core::experiments::{
    conditional_branch_experiment, growth_identity_experiment, miss_branch_experiment, theorem_experiment,
};
use exemplar_core::index::{LinearScan, NearestSetIndex, VpTree};
use exemplar_core::metric::{
    AbsoluteDifference, BitString, Chebyshev, Discrete, Euclidean, Hamming, Metric, PointVector, ScalarMetric,
    VectorMetric,
};
use exemplar_core::stream::{StreamGenerator, StreamKind};
use exemplar_core::target::Target;
use exemplar_core::{IndexKind, LearnerConfig, RandomStream};

struct Outcome {
    passed: bool,
    detail: String,
}

fn criterion(number: u32, title: &str, budget: Option<Duration>, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut outcome = body();
    let elapsed = start.elapsed();
    if let Some(limit) = budget {
        if elapsed > limit {
            outcome.passed = false;
            outcome.detail.push_str(&format!("; runtime {elapsed:.2?} exceeds {limit:?}"));
        }
    }
    println!(
        "[{}] criterion {number}: {title} ({:.2?}) {}",
        if outcome.passed { "PASS" } else { "FAIL" },
        elapsed,
        outcome.detail
    );
    outcome.passed
}

fn conditional_branches() -> Outcome {
    let mut passed = true;
    let mut detail = Vec::new();
    for q in [0.5, 0.6, 0.75, 0.9] {
        let f = conditional_branch_experiment(&LearnerConfig::new(1.0, q).unwrap().with_seed(1), 100_000);
        let p_rm = 1.0 / q - 1.0;
        let ok_remove = if q == 0.5 {
            f.remove_frequency == 1.0
        } else {
            (f.remove_frequency - p_rm).abs() <= 0.01
        };
        let ok_delta = (f.mean_size_delta - (1.0 - 1.0 / q)).abs() <= 0.015;
        passed &= ok_remove && ok_delta;
        detail.push(format!("q={q}: remove={:.5} (want {p_rm:.5}) E[d|hit]={:.5}", f.remove_frequency, f.mean_size_delta));
    }
    Outcome { passed, detail: detail.join(", ") }
}

fn miss_branch() -> Outcome {
    let f = miss_branch_experiment(&LearnerConfig::new(1.0, 0.9).unwrap().with_seed(2), 10_000);
    Outcome {
        passed: f.mean_size_delta == 1.0 && f.remove_frequency == 0.0 && f.keep_frequency == 0.0,
        detail: format!("insert fraction {:.5}, E[d|miss]={}", 1.0 - f.remove_frequency - f.keep_frequency, f.mean_size_delta),
    }
}

fn growth_identity() -> Outcome {
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for q in [0.5, 0.75, 0.9] {
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let g = growth_identity_experiment(p, &LearnerConfig::new(1.0, q).unwrap().with_seed(3), 100_000);
            let err = (g.mean_size_delta - (1.0 - p / q)).abs();
            let exact = p == 0.0 || (p == 1.0 && q == 0.5);
            passed &= if exact { err == 0.0 } else { err <= 0.01 };
            worst = worst.max(err);
        }
    }
    Outcome { passed, detail: format!("15 cells, max |mean - (1 - p/q)| = {worst:.5}") }
}

fn theorem(q: f64) -> Outcome {
    let config = LearnerConfig::new(0.05, q).unwrap().with_seed(4);
    let stream = StreamGenerator::cube(StreamKind::IidUniform, 0.0, TAU, 1, 4)
        .unwrap()
        .generate(200_000)
        .unwrap();
    let r = theorem_experiment(
        &Target::Sine1d,
        VectorMetric::Absolute,
        ScalarMetric::Absolute,
        &config,
        IndexKind::default(),
        stream,
        50_000,
        0.01,
    )
    .unwrap();
    let stabilized = r.tail_mean_size_delta.abs() <= 0.01;
    let near_q = (r.tail_hit_rate - q).abs() <= 0.03;
    Outcome {
        passed: stabilized && near_q,
        detail: format!(
            "q={q}: tail mean delta {:.5}, tail hit rate {:.5}, |A_n| = {}",
            r.tail_mean_size_delta, r.tail_hit_rate, r.final_size
        ),
    }
}

fn random_point(rng: &mut RandomStream, lattice: bool) -> PointVector {
    let c = (0..2)
        .map(|_| if lattice { rng.below(7) as f64 } else { rng.next_f64() * 20.0 - 10.0 })
        .collect();
    PointVector::new(c).unwrap()
}

fn differential<M: Metric<PointVector> + Clone>(metric: M, lattice: bool, seed: u64) -> (usize, usize) {
    let mut rng = RandomStream::new(seed);
    let mut oracle = LinearScan::new(metric.clone());
    let mut tree = VpTree::new(metric, 8);
    let (mut queries, mut agree) = (0, 0);
    for _ in 0..10_000 {
        match rng.below(3) {
            0 => {
                let p = random_point(&mut rng, lattice);
                oracle.insert(p.clone());
                tree.insert(p);
            }
            1 if !oracle.is_empty() => {
                let pos = rng.below(oracle.len() as u64) as usize;
                oracle.remove(pos).unwrap();
                tree.remove(pos).unwrap();
            }
            _ if !oracle.is_empty() => {
                let q = random_point(&mut rng, lattice);
                queries += 1;
                agree += (tree.nearest_set(&q, 0.0).unwrap() == oracle.nearest_set(&q, 0.0).unwrap()) as usize;
            }
            _ => {}
        }
    }
    (queries, agree)
}

fn index_differential() -> Outcome {
    let runs = [
        ("euclidean", differential(Euclidean, false, 5)),
        ("chebyshev", differential(Chebyshev, false, 6)),
        ("euclidean-lattice", differential(Euclidean, true, 7)),
        ("chebyshev-lattice", differential(Chebyshev, true, 8)),
    ];
    Outcome {
        passed: runs.iter().all(|(_, (q, a))| q == a && *q > 0),
        detail: runs
            .iter()
            .map(|(n, (q, a))| format!("{n}: {a}/{q}"))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let args = ["exemplar", "run", "--q", "0.9", "--epsilon", "0.05", "--steps", "20000", "--seed", "7", "--output"];
        let code = run_cli(
            args.iter().map(|s| s.to_string()).chain([path.display().to_string()]),
            &mut Vec::new(),
            &mut Vec::new(),
        );
        (code, std::fs::read(path).unwrap_or_default())
    };
    let (c1, a) = run("a.csv");
    let (c2, b) = run("b.csv");
    Outcome {
        passed: c1 == 0 && c2 == 0 && !a.is_empty() && a == b,
        detail: format!("{} bytes, identical = {}", a.len(), a == b),
    }
}

fn ulp(x: f64) -> f64 {
    f64::from_bits(x.abs().to_bits() + 1) - x.abs()
}

fn axioms<T, M: Metric<T>>(m: &M, mut sample: impl FnMut() -> T) -> bool {
    (0..10_000).all(|_| {
        let (a, b, c) = (sample(), sample(), sample());
        let ab = m.distance(&a, &b);
        let rhs = ab + m.distance(&b, &c);
        m.distance(&a, &a) == 0.0 && ab == m.distance(&b, &a) && m.distance(&a, &c) <= rhs + 4.0 * ulp(rhs)
    })
}

fn metric_axioms() -> Outcome {
    let mut rng = RandomStream::new(9);
    let mut results = Vec::new();
    let vec3 = |rng: &mut RandomStream| PointVector::new((0..3).map(|_| rng.next_f64() * 200.0 - 100.0).collect()).unwrap();
    results.push(("euclidean", axioms(&Euclidean, || vec3(&mut rng))));
    results.push(("chebyshev", axioms(&Chebyshev, || vec3(&mut rng))));
    results.push(("absolute", axioms(&AbsoluteDifference, || rng.next_f64() * 1e4 - 5e3)));
    results.push(("hamming", axioms(&Hamming, || BitString::new((0..16).map(|_| rng.below(2) == 1).collect()))));
    results.push(("discrete", axioms(&Discrete, || rng.below(4))));
    Outcome {
        passed: results.iter().all(|r| r.1),
        detail: results
            .iter()
            .map(|(n, ok)| format!("{n}={}", if *ok { "ok" } else { "violated" }))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "conditional branch frequencies", Some(secs(5)), conditional_branches),
        criterion(2, "miss branch determinism", Some(secs(1)), miss_branch),
        criterion(3, "growth identity grid", Some(secs(30)), growth_identity),
        criterion(4, "limiting hit rate, q=0.5", Some(secs(60)), || theorem(0.5)),
        criterion(4, "limiting hit rate, q=0.75", Some(secs(60)), || theorem(0.75)),
        criterion(4, "limiting hit rate, q=0.9", Some(secs(60)), || theorem(0.9)),
        criterion(5, "index differential", Some(secs(10)), index_differential),
        criterion(6, "byte-identical traces", None, determinism),
        criterion(7, "metric axioms", None, metric_axioms),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} criteria checks, {failed} failed", results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
